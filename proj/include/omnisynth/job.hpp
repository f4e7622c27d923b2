#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omnisynth/config.hpp"

namespace omnisynth::cli {

// FNV-1a, 64-bit: the hash recorded per artifact in the run manifest.
uint64_t fnv1a64(const void* data, size_t size);
uint64_t fnv1a64_file(const std::string& path);
std::string hex16(uint64_t v);  // zero-padded lowercase hex

struct JobResult {
  bool ok = false;
  std::vector<std::string> errors;
  std::string manifest_path;
  std::vector<std::string> artifacts;  // relative to the output directory
};

// Executes one validated render job end to end: oracle setup, frame
// rendering, ground-truth sidecars, and a deterministic manifest.json that
// lists every artifact with its content hash.
JobResult run_job(const JobConfig& cfg);

}  // namespace omnisynth::cli
