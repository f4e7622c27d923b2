#pragma once

#include <map>
#include <string>
#include <vector>

#include "omnisynth/groundtruth.hpp"

namespace omnisynth::cli {

// One configurable parameter of a camera model. Numeric defaults are given
// as text; `computed` parameters derive their default from the image grid
// (focal lengths sized so the rendered disc spans a 180-degree view, centers
// at the grid midpoint). Angle-valued keys end in _deg.
struct ParamSpec {
  enum class Type { Num, Str, Bool };
  std::string key;
  Type type = Type::Num;
  const char* def = nullptr;  // nullptr + !computed means required
  bool computed = false;
  double lo = -1e300, hi = 1e300;
  bool lo_open = false, hi_open = false;
  const char* doc = "";
};

struct ModelInfo {
  std::string name;
  const char* summary;
  bool central = true;
  bool disc = false;  // renders a centered disc
  int default_width = 1024, default_height = 1024;
  std::vector<ParamSpec> params;
};

// The 13 supported projection models, in catalog order.
const std::vector<ModelInfo>& model_catalog();
const ModelInfo* find_model(const std::string& name);

// Maps the family aliases ("fisheye" + lens=..., "catadioptric" +
// mirror=...) onto catalog names. Returns the canonical name or an empty
// string with `error` set.
std::string resolve_model_name(const std::string& name,
                               const std::map<std::string, std::string>& params,
                               std::string& error);

// Human-readable catalog for `omnisynth models`.
std::string catalog_text();

struct BuildResult {
  gt::AnyModel model;
  central::ImageGrid grid;
  bool is_central = true;
  // (param key, message); empty key marks model-level errors.
  std::vector<std::pair<std::string, std::string>> errors;
  bool ok() const { return errors.empty(); }
};

// Validates parameters against the model's declared set (unknown keys,
// missing values, range violations) and constructs the model. width/height
// of 0 pick the model's default grid.
BuildResult build_model(const std::string& name,
                        const std::map<std::string, std::string>& params,
                        int width, int height);

}  // namespace omnisynth::cli
