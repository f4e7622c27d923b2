#include "omnisynth/catalog.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace omnisynth::cli {

using central::CentralModel;
using central::FisheyeLens;
using central::ImageGrid;
using geo::deg2rad;
using geo::kPi;

namespace {

using Type = ParamSpec::Type;

ParamSpec num(const char* key, const char* def, double lo = -1e300,
              double hi = 1e300, bool lo_open = false, bool hi_open = false,
              const char* doc = "") {
  return {key, Type::Num, def, false, lo, hi, lo_open, hi_open, doc};
}

ParamSpec computed(const char* key, const char* doc) {
  ParamSpec p{key, Type::Num, nullptr, true};
  p.doc = doc;
  return p;
}

std::vector<ParamSpec> pinhole_params() {
  return {
      computed("f_x", "horizontal focal, px (default: 180-degree disc)"),
      computed("f_y", "vertical focal, px (default: f_x)"),
      computed("u_0", "principal point x, px (default: grid center)"),
      computed("v_0", "principal point y, px (default: grid center)"),
      num("cam_yaw_deg", "0", -360, 360, false, false, "mirror-camera yaw"),
      num("cam_pitch_deg", "0", -360, 360, false, false, "mirror-camera pitch"),
      num("cam_roll_deg", "0", -360, 360, false, false, "mirror-camera roll"),
  };
}

std::vector<ModelInfo> make_catalog() {
  std::vector<ModelInfo> cat;
  cat.push_back({"equirect",
                 "full-sphere panorama, pixels linear in azimuth/elevation",
                 true, false, 1920, 960, {}});
  cat.push_back({"cylindrical",
                 "panorama bounded by horizontal/vertical FOV",
                 true, false, 1920, 960,
                 {num("fov_h_deg", "360", 0, 360, true, false,
                      "horizontal field of view"),
                  num("fov_v_deg", "120", 0, 180, true, true,
                      "vertical field of view"),
                  {"tan_vertical", Type::Bool, "false", false, 0, 0, false,
                   false, "rows linear in tan(elevation) instead of angle"}}});
  for (const char* lens :
       {"equiangular", "stereographic", "orthogonal", "equisolid"})
    cat.push_back({std::string("fisheye_") + lens,
                   "fish-eye lens, radius grows with the polar angle",
                   true, true, 1024, 1024,
                   {computed("f", "focal, px (default: 180-degree disc)")}});
  for (const char* mirror : {"para", "hyper"})
    cat.push_back({std::string("cata_") + mirror,
                   "single-viewpoint mirror camera (sphere model)",
                   true, true, 1024, 1024, [] {
                     auto p = pinhole_params();
                     p.insert(p.begin(),
                              {num("d", "1", 0, 1e300, true, false,
                                   "camera-mirror distance, m"),
                               num("p", "0.5", 0, 1e300, true, false,
                                   "mirror shape (semi-latus rectum / 2), m")});
                     return p;
                   }()});
  cat.push_back(
      {"scaramuzza",
       "polynomial ray model (u'', v'', a0 + a1 r + ... + a4 r^4)",
       true, true, 1024, 1024,
       {computed("a0", "constant term, != 0 (default: 180-degree lens fit)"),
        computed("a1", "linear term (default 0)"),
        computed("a2", "quadratic term"),
        computed("a3", "cubic term (default 0)"),
        computed("a4", "quartic term"),
        computed("u_0", "distortion center x, px (default: grid center)"),
        computed("v_0", "distortion center y, px (default: grid center)")}});
  cat.push_back(
      {"kannala_brandt",
       "radially symmetric lens, d(theta) = theta + k1 t^3 + ... + k4 t^9",
       true, true, 1024, 1024,
       {computed("f_x", "horizontal focal, px (default: 180-degree disc)"),
        computed("f_y", "vertical focal, px (default: f_x)"),
        computed("c_x", "principal point x, px (default: grid center)"),
        computed("c_y", "principal point y, px (default: grid center)"),
        num("k1", "0"), num("k2", "0"), num("k3", "0"), num("k4", "0")}});
  cat.push_back(
      {"nc_panorama",
       "panorama whose column optical centers lie on a circle",
       false, false, 2048, 1024,
       {num("r_c", "0.3", 0, 1e300, false, false,
            "radius of the circle of optical centers, m (0 = central)"),
        num("tilt_deg", "10", -90, 90, false, false, "circle pitch"),
        num("center_x", "0"), num("center_y", "0"), num("center_z", "0")}});
  cat.push_back(
      {"conical_cat",
       "camera under a cone mirror; rays grouped by pixel rings",
       false, true, 1024, 1024,
       {num("tau_deg", "35", 0, 45, true, true, "cone half-angle"),
        num("beta_max_deg", "30", 0, 90, true, true,
            "host-camera half field of view"),
        computed("z_c", "center-circle height, m (default: apex_z shape)"),
        computed("r_c", "center-circle radius, m (default: apex_z shape)"),
        num("apex_z", "0.5", 0, 1e300, true, false,
            "cone apex height used when z_c/r_c are not given, m")}});
  cat.push_back(
      {"spherical_cat",
       "camera under a sphere mirror; rays grouped by pixel rings",
       false, true, 1024, 1024,
       {num("z_m", "0.3", 0, 1e300, true, false,
            "camera-to-mirror-bottom distance, m"),
        num("r_s", "0.35", 0, 1e300, true, false, "mirror radius, m"),
        num("beta_max_deg", "30", 0, 90, true, true,
            "host-camera half field of view")}});
  return cat;
}

double parse_num(const std::string& text, bool& ok) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  ok = end && *end == '\0' && end != text.c_str();
  return v;
}

// Gathers declared parameter values with defaults applied and records
// unknown-key / parse / range errors.
struct ParamReader {
  const ModelInfo& info;
  const std::map<std::string, std::string>& given;
  std::vector<std::pair<std::string, std::string>>& errors;

  bool has(const std::string& key) const { return given.count(key) > 0; }

  double number(const std::string& key, double fallback_if_computed) const {
    const ParamSpec* spec = find(key);
    const auto it = given.find(key);
    std::string text;
    if (it != given.end()) {
      text = it->second;
    } else if (spec->computed) {
      return fallback_if_computed;
    } else {
      text = spec->def;
    }
    bool ok = false;
    const double v = parse_num(text, ok);
    if (!ok) {
      errors.push_back({key, "expected a number, got '" + text + "'"});
      return fallback_if_computed;
    }
    const bool below = spec->lo_open ? v <= spec->lo : v < spec->lo;
    const bool above = spec->hi_open ? v >= spec->hi : v > spec->hi;
    if (below || above) {
      std::ostringstream os;
      os << "value " << v << " out of range " << (spec->lo_open ? "(" : "[")
         << spec->lo << ", " << spec->hi << (spec->hi_open ? ")" : "]");
      errors.push_back({key, os.str()});
    }
    return v;
  }

  bool flag(const std::string& key) const {
    const ParamSpec* spec = find(key);
    const auto it = given.find(key);
    const std::string text = it != given.end() ? it->second : spec->def;
    if (text == "true" || text == "1" || text == "on") return true;
    if (text == "false" || text == "0" || text == "off") return false;
    errors.push_back({key, "expected true/false, got '" + text + "'"});
    return false;
  }

  const ParamSpec* find(const std::string& key) const {
    for (const auto& p : info.params)
      if (p.key == key) return &p;
    throw std::logic_error("catalog: undeclared param lookup: " + key);
  }

  void check_unknown() const {
    for (const auto& [key, value] : given) {
      bool known = false;
      for (const auto& p : info.params) known |= p.key == key;
      if (!known)
        errors.push_back(
            {key, "unknown parameter for model '" + info.name + "'"});
    }
  }
};

FisheyeLens lens_from_name(const std::string& name, bool& ok) {
  ok = true;
  if (name == "equiangular") return FisheyeLens::EquiAngular;
  if (name == "stereographic") return FisheyeLens::Stereographic;
  if (name == "orthogonal") return FisheyeLens::Orthogonal;
  if (name == "equisolid") return FisheyeLens::EquiSolid;
  ok = false;
  return FisheyeLens::EquiAngular;
}

// Focal length putting the polar angle pi/2 at the disc edge.
double fisheye_default_f(FisheyeLens lens, double r_hat_max) {
  switch (lens) {
    case FisheyeLens::EquiAngular: return r_hat_max / (kPi / 2.0);
    case FisheyeLens::Stereographic: return r_hat_max / 2.0;
    case FisheyeLens::Orthogonal: return r_hat_max;
    case FisheyeLens::EquiSolid: return r_hat_max * std::sqrt(2.0);
  }
  return r_hat_max;
}

}  // namespace

const std::vector<ModelInfo>& model_catalog() {
  static const std::vector<ModelInfo> cat = make_catalog();
  return cat;
}

const ModelInfo* find_model(const std::string& name) {
  for (const auto& m : model_catalog())
    if (m.name == name) return &m;
  return nullptr;
}

std::string resolve_model_name(
    const std::string& name, const std::map<std::string, std::string>& params,
    std::string& error) {
  error.clear();
  if (name == "fisheye") {
    const auto it = params.find("lens");
    if (it == params.end()) {
      error = "model 'fisheye' needs the 'lens' parameter "
              "(equiangular|stereographic|orthogonal|equisolid)";
      return "";
    }
    bool ok = false;
    lens_from_name(it->second, ok);
    if (!ok) {
      error = "unknown lens '" + it->second + "'";
      return "";
    }
    return "fisheye_" + it->second;
  }
  if (name == "catadioptric") {
    const auto it = params.find("mirror");
    if (it == params.end()) {
      error = "model 'catadioptric' needs the 'mirror' parameter (para|hyper)";
      return "";
    }
    if (it->second != "para" && it->second != "hyper") {
      error = "unknown mirror '" + it->second + "'";
      return "";
    }
    return "cata_" + it->second;
  }
  if (!find_model(name)) {
    error = "unknown model '" + name + "' (run 'omnisynth models')";
    return "";
  }
  return name;
}

std::string catalog_text() {
  std::ostringstream os;
  const auto& cat = model_catalog();
  os << cat.size() << " projection models, each rendering lit, semantic and "
     << "depth modes (" << cat.size() * 3 << " image types).\n\n";
  for (const auto& m : cat) {
    os << m.name << (m.central ? "  [central" : "  [non-central")
       << (m.disc ? ", disc]" : "]") << "\n    " << m.summary
       << "\n    default grid " << m.default_width << "x" << m.default_height
       << "\n";
    for (const auto& p : m.params) {
      os << "      " << p.key;
      if (p.computed)
        os << " (computed)";
      else if (p.def)
        os << " = " << p.def;
      else
        os << " (required)";
      if (p.doc[0]) os << "  -- " << p.doc;
      os << "\n";
    }
  }
  os << "\nAliases: model=fisheye with lens=<name>, model=catadioptric with "
     << "mirror=<para|hyper>.\n";
  return os.str();
}

BuildResult build_model(const std::string& name,
                        const std::map<std::string, std::string>& params,
                        int width, int height) {
  BuildResult out;
  std::string err;
  const std::string canonical = resolve_model_name(name, params, err);
  if (!err.empty()) {
    out.errors.push_back({"", err});
    return out;
  }
  const ModelInfo& info = *find_model(canonical);

  // Strip the alias selector keys before unknown-key checking.
  std::map<std::string, std::string> clean = params;
  clean.erase("lens");
  clean.erase("mirror");

  if (width == 0) width = info.default_width;
  if (height == 0) height = info.default_height;
  if (width < 1 || height < 1) {
    out.errors.push_back({"", "image size must be at least 1x1"});
    return out;
  }
  out.grid = ImageGrid(width, height);
  out.is_central = info.central;
  const double r_max = out.grid.r_hat_max();
  const geo::Vec2 mid = out.grid.center();

  ParamReader rd{info, clean, out.errors};
  rd.check_unknown();

  if (canonical == "equirect") {
    out.model = CentralModel(central::Equirect{});
  } else if (canonical == "cylindrical") {
    central::Cylindrical m;
    m.fov_h = deg2rad(rd.number("fov_h_deg", 360));
    m.fov_v = deg2rad(rd.number("fov_v_deg", 120));
    m.tan_vertical = rd.flag("tan_vertical");
    out.model = CentralModel(m);
  } else if (canonical.rfind("fisheye_", 0) == 0) {
    bool ok = false;
    const FisheyeLens lens = lens_from_name(canonical.substr(8), ok);
    central::Fisheye m;
    m.lens = lens;
    m.f = rd.number("f", fisheye_default_f(lens, r_max));
    if (m.f <= 0) out.errors.push_back({"f", "focal must be positive"});
    out.model = CentralModel(m);
  } else if (canonical == "cata_para" || canonical == "cata_hyper") {
    central::Catadioptric m;
    m.mirror = canonical == "cata_para" ? central::MirrorKind::Para
                                        : central::MirrorKind::Hyper;
    m.d = rd.number("d", 1.0);
    m.p = rd.number("p", 0.5);
    // Default focal puts the 90-degree viewing ring on the disc edge: that
    // ring sits at radius f * (xi - eta) / xi in pixels.
    const double f_disc = r_max * m.xi() / (m.xi() - m.eta());
    m.k.f_x = rd.number("f_x", f_disc);
    m.k.f_y = rd.number("f_y", m.k.f_x);
    m.k.u_0 = rd.number("u_0", mid.x());
    m.k.v_0 = rd.number("v_0", mid.y());
    if (m.k.f_x <= 0 || m.k.f_y <= 0)
      out.errors.push_back({"f_x", "focal must be positive"});
    m.r_c = geo::yaw_pitch_roll(deg2rad(rd.number("cam_yaw_deg", 0)),
                                deg2rad(rd.number("cam_pitch_deg", 0)),
                                deg2rad(rd.number("cam_roll_deg", 0)));
    out.model = CentralModel(m);
  } else if (canonical == "scaramuzza") {
    central::Scaramuzza m;
    m.u_0 = rd.number("u_0", mid.x());
    m.v_0 = rd.number("v_0", mid.y());
    const bool any_a = rd.has("a0") || rd.has("a1") || rd.has("a2") ||
                       rd.has("a3") || rd.has("a4");
    if (any_a && !rd.has("a0")) {
      out.errors.push_back({"a0", "a0 is required when any a_k is given"});
    }
    // Default: series of the equi-angular lens rho * cot(rho / f).
    const double f = r_max / (kPi / 2.0);
    m.a = {rd.number("a0", f), rd.number("a1", 0.0),
           rd.number("a2", -1.0 / (3.0 * f)), rd.number("a3", 0.0),
           rd.number("a4", -1.0 / (45.0 * f * f * f))};
    if (any_a) {
      // Explicit coefficients: unspecified higher terms drop to zero.
      if (!rd.has("a1")) m.a[1] = 0;
      if (!rd.has("a2")) m.a[2] = 0;
      if (!rd.has("a3")) m.a[3] = 0;
      if (!rd.has("a4")) m.a[4] = 0;
    }
    if (m.a[0] == 0.0) out.errors.push_back({"a0", "a0 must be nonzero"});
    out.model = CentralModel(m);
  } else if (canonical == "kannala_brandt") {
    central::KannalaBrandt m;
    m.f_x = rd.number("f_x", r_max / (kPi / 2.0));
    m.f_y = rd.number("f_y", m.f_x);
    m.c_x = rd.number("c_x", mid.x());
    m.c_y = rd.number("c_y", mid.y());
    m.k1 = rd.number("k1", 0);
    m.k2 = rd.number("k2", 0);
    m.k3 = rd.number("k3", 0);
    m.k4 = rd.number("k4", 0);
    if (m.f_x <= 0 || m.f_y <= 0)
      out.errors.push_back({"f_x", "focal must be positive"});
    out.model = CentralModel(m);
  } else if (canonical == "nc_panorama") {
    nc::NCPanorama m;
    m.r_c = rd.number("r_c", 0.3);
    m.tilt = deg2rad(rd.number("tilt_deg", 10));
    m.center = {rd.number("center_x", 0), rd.number("center_y", 0),
                rd.number("center_z", 0)};
    out.model = gt::AnyModel(nc::NonCentralModel(m));
  } else if (canonical == "conical_cat") {
    const double tau = deg2rad(rd.number("tau_deg", 35));
    const double beta = deg2rad(rd.number("beta_max_deg", 30));
    const double apex = rd.number("apex_z", 0.5);
    const nc::ConicalCat shape = nc::conical_from_apex(apex, tau, beta);
    nc::ConicalCat m;
    m.tau = tau;
    m.beta_max = beta;
    m.z_c = rd.number("z_c", shape.z_c);
    m.r_c = rd.number("r_c", shape.r_c);
    if (m.r_c <= 0) out.errors.push_back({"r_c", "must be positive"});
    out.model = gt::AnyModel(nc::NonCentralModel(m));
  } else if (canonical == "spherical_cat") {
    nc::SphericalCat m;
    m.z_m = rd.number("z_m", 0.3);
    m.r_s = rd.number("r_s", 0.35);
    m.beta_max = deg2rad(rd.number("beta_max_deg", 30));
    out.model = gt::AnyModel(nc::NonCentralModel(m));
  } else {
    out.errors.push_back({"", "unhandled model '" + canonical + "'"});
  }
  return out;
}

}  // namespace omnisynth::cli
