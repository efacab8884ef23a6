#include "holoimg/config.hpp"

#include "holoimg/errors.hpp"
#include "holoimg/random_field.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

namespace holoimg {

using nlohmann::json;

namespace {

const std::vector<std::string> kFunctionals{"km", "interf", "srint", "cint", "music", "signal"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Splits "<number> <unit>" and returns the number; `unit` receives the trimmed rest.
bool split_quantity(const std::string& text, double& value, std::string& unit) {
  const std::string t = trim(text);
  const char* begin = t.c_str();
  char* end = nullptr;
  value = std::strtod(begin, &end);
  if (end == begin || !std::isfinite(value)) return false;
  unit = trim(std::string(end));
  return true;
}

double frequency_scale(const std::string& unit) {
  if (unit.empty() || unit == "THz") return 1.0;
  if (unit == "GHz") return 1e-3;
  if (unit == "PHz") return 1e3;
  if (unit == "Hz") return 1e-12;
  return -1.0;
}

/// A JSON object node with its key path, used to produce ParseErrors that name the key.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  const json& raw(const std::string& k) const {
    if (!j_.contains(k)) throw ParseError(key(k), "required key is missing");
    return j_.at(k);
  }
  Node child(const std::string& k) const { return Node(raw(k), key(k)); }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw ParseError(key(it.key()), "unknown key");
    }
  }

  double number(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_number()) throw ParseError(key(k), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(key(k), "expected a finite number");
    return d;
  }
  double number_or(const std::string& k, double def) const { return has(k) ? number(k) : def; }

  std::uint64_t unsigned_int(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ParseError(key(k), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t unsigned_or(const std::string& k, std::uint64_t def) const {
    return has(k) ? unsigned_int(k) : def;
  }

  std::string string(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_string()) throw ParseError(key(k), "expected a string");
    return v.get<std::string>();
  }

  static double length_value(const json& v, const std::string& path, double lambda0_m) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return parse_length(v.get<std::string>(), lambda0_m);
      } catch (const ValidationError& e) {
        throw ParseError(path, e.what());
      }
    }
    throw ParseError(path, "expected a length (number in lambda0 or string with unit)");
  }

  double length(const std::string& k, double lambda0_m) const {
    return length_value(raw(k), key(k), lambda0_m);
  }

  static Point2 point_value(const json& v, const std::string& path, double lambda0_m) {
    if (!v.is_array() || v.size() != 2) throw ParseError(path, "expected [cross-range, range]");
    return {length_value(v[0], path + "[0]", lambda0_m), length_value(v[1], path + "[1]", lambda0_m)};
  }

  Point2 point(const std::string& k, double lambda0_m) const {
    return point_value(raw(k), key(k), lambda0_m);
  }

  std::vector<Point2> points(const std::string& k, double lambda0_m) const {
    const json& v = raw(k);
    if (!v.is_array()) throw ParseError(key(k), "expected a list of points");
    std::vector<Point2> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(point_value(v[i], key(k) + "[" + std::to_string(i) + "]", lambda0_m));
    }
    return out;
  }

  double frequency(const std::string& k) const {
    const json& v = raw(k);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      double value = 0.0;
      std::string unit;
      const double scale = split_quantity(v.get<std::string>(), value, unit) ? frequency_scale(unit) : -1.0;
      if (scale > 0.0) return value * scale;
    }
    throw ParseError(key(k), "expected a frequency (number in THz or string such as \"600 THz\")");
  }

 private:
  const json& j_;
  std::string path_;
};

template <class Fn>
auto wrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(path, e.what());
  }
}

json point_json(const Point2& p) { return json::array({p.x(), p.y()}); }

}  // namespace

double parse_length(const std::string& text, double lambda0_m) {
  double value = 0.0;
  std::string unit;
  if (!split_quantity(text, value, unit)) {
    throw ValidationError("cannot read a length from '" + text + "'");
  }
  if (unit.empty() || unit == "lambda0" || unit == "l0") return value;
  double metres = 0.0;
  if (unit == "nm") metres = 1e-9;
  else if (unit == "um") metres = 1e-6;
  else if (unit == "mm") metres = 1e-3;
  else if (unit == "m") metres = 1.0;
  else throw ValidationError("unknown length unit '" + unit + "' (use nm, um, mm, m or lambda0)");
  return value * metres / lambda0_m;
}

ArrayGeometry ArraySpec::build() const {
  if (!positions.empty()) {
    if (receivers.empty()) return ArrayGeometry(positions);
    return ArrayGeometry(positions, receivers);
  }
  const ArrayGeometry g = ArrayGeometry::equispaced(aperture, count, center);
  if (receivers.empty()) return g;
  return ArrayGeometry(g.sources(), receivers);
}

FrequencyGrid FrequencySpec::build() const {
  return FrequencyGrid::from_thz(thz, f0_thz, c0_m_per_s);
}

double ExperimentConfig::range() const {
  return (window.center - geometry().center()).norm();
}

std::size_t ExperimentConfig::receiver() const {
  if (run.receiver != 0) return run.receiver;
  return (geometry().receiver_count() + 1) / 2;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.allow_only({"array", "frequencies", "window", "scene", "medium", "run"});
  ExperimentConfig cfg;

  // Frequencies first: they fix lambda0 for every length conversion.
  {
    const Node f = root.child("frequencies");
    f.allow_only({"f0", "c0", "min", "max", "count", "list"});
    cfg.frequencies.f0_thz = f.has("f0") ? f.frequency("f0") : 600.0;
    cfg.frequencies.c0_m_per_s = f.number_or("c0", 3.0e8);
    if (!(cfg.frequencies.f0_thz > 0.0)) throw ParseError(f.key("f0"), "must be > 0");
    if (!(cfg.frequencies.c0_m_per_s > 0.0)) throw ParseError(f.key("c0"), "must be > 0");
    if (f.has("list")) {
      if (f.has("min") || f.has("max") || f.has("count")) {
        throw ParseError(f.key("list"), "give either list or min/max/count");
      }
      const json& l = f.raw("list");
      if (!l.is_array() || l.empty()) throw ParseError(f.key("list"), "expected a non-empty list");
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (!l[i].is_number()) {
          throw ParseError(f.key("list") + "[" + std::to_string(i) + "]", "expected THz number");
        }
        cfg.frequencies.thz.push_back(l[i].get<double>());
      }
    } else {
      const double lo = f.frequency("min");
      const double hi = f.frequency("max");
      const auto count = f.unsigned_int("count");
      if (count == 0) throw ParseError(f.key("count"), "must be >= 1");
      cfg.frequencies.thz = wrap(f.path(), [&] {
        return FrequencyGrid::equispaced_thz(lo, hi, count, cfg.frequencies.f0_thz,
                                             cfg.frequencies.c0_m_per_s)
            .frequencies_thz();
      });
    }
    wrap(f.path(), [&] { return cfg.frequencies.build(); });
  }
  const double lambda0 = cfg.frequencies.lambda0_m();

  {
    const Node a = root.child("array");
    a.allow_only({"count", "aperture", "center", "positions", "receivers"});
    if (a.has("positions")) {
      if (a.has("count") || a.has("aperture")) {
        throw ParseError(a.key("positions"), "give either positions or count/aperture");
      }
      cfg.array.positions = a.points("positions", lambda0);
      cfg.array.count = cfg.array.positions.size();
    } else {
      cfg.array.count = a.unsigned_int("count");
      cfg.array.aperture = a.length("aperture", lambda0);
      if (a.has("center")) cfg.array.center = a.point("center", lambda0);
    }
    if (a.has("receivers")) cfg.array.receivers = a.points("receivers", lambda0);
    wrap(a.path(), [&] { return cfg.array.build(); });
  }

  {
    const Node w = root.child("window");
    w.allow_only({"center", "extent", "pixel"});
    cfg.window.center = w.point("center", lambda0);
    cfg.window.extent = w.point("extent", lambda0);
    cfg.window.pixel = w.point("pixel", lambda0);
    wrap(w.path(), [&] { return cfg.window.build(); });
  }

  {
    const Node s = root.child("scene");
    s.allow_only({"scatterers"});
    const json& list = s.raw("scatterers");
    if (!list.is_array()) throw ParseError(s.key("scatterers"), "expected a list");
    if (list.empty()) throw ParseError(s.key("scatterers"), "needs at least one scatterer");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node sc(list[i], s.key("scatterers") + "[" + std::to_string(i) + "]");
      sc.allow_only({"position", "reflectivity"});
      Scatterer item;
      item.position = sc.point("position", lambda0);
      item.reflectivity = 1.0;
      if (sc.has("reflectivity")) {
        const json& r = sc.raw("reflectivity");
        if (r.is_number()) {
          item.reflectivity = r.get<double>();
        } else if (r.is_array() && r.size() == 2 && r[0].is_number() && r[1].is_number()) {
          item.reflectivity = Complex(r[0].get<double>(), r[1].get<double>());
        } else {
          throw ParseError(sc.key("reflectivity"), "expected a number or [re, im]");
        }
      }
      cfg.scatterers.push_back(item);
    }
    wrap(s.path(), [&] { return cfg.scene(); });
  }

  if (root.has("medium")) {
    const Node m = root.child("medium");
    m.allow_only({"type", "epsilon", "sigma", "corr_len", "grid_spacing", "seed"});
    const std::string type = m.has("type") ? m.string("type") : "homogeneous";
    if (type == "random") {
      cfg.medium.random = true;
      cfg.medium.corr_len = m.length("corr_len", lambda0);
      if (!(cfg.medium.corr_len > 0.0)) throw ParseError(m.key("corr_len"), "must be > 0");
      if (m.has("epsilon") == m.has("sigma")) {
        throw ParseError(m.key("epsilon"), "give exactly one of epsilon and sigma");
      }
      if (m.has("epsilon")) {
        cfg.medium.epsilon = m.number("epsilon");
        if (!(*cfg.medium.epsilon > 0.0)) throw ParseError(m.key("epsilon"), "must be > 0");
        cfg.medium.sigma =
            *cfg.medium.epsilon * characteristic_strength(cfg.medium.corr_len, cfg.range());
      } else {
        cfg.medium.sigma = m.number("sigma");
        if (!(cfg.medium.sigma > 0.0)) throw ParseError(m.key("sigma"), "must be > 0");
      }
      if (m.has("grid_spacing")) {
        cfg.medium.grid_spacing = m.length("grid_spacing", lambda0);
        if (!(cfg.medium.grid_spacing > 0.0) ||
            cfg.medium.grid_spacing > 0.25 * cfg.medium.corr_len * (1.0 + 1e-12)) {
          throw ParseError(m.key("grid_spacing"), "must be in (0, corr_len / 4]");
        }
      }
      cfg.medium.seed = m.unsigned_or("seed", 0);
    } else if (type == "homogeneous") {
      for (const char* k : {"epsilon", "sigma", "corr_len", "grid_spacing", "seed"}) {
        if (m.has(k)) throw ParseError(m.key(k), "only valid for a random medium");
      }
    } else {
      throw ParseError(m.key("type"), "expected \"homogeneous\" or \"random\"");
    }
  }

  if (root.has("run")) {
    const Node r = root.child("run");
    r.allow_only({"seed", "receiver", "functionals", "x_d_over_a", "omega_d_over_b",
                  "signal_rank", "noise_snr_db", "peak_threshold", "peak_separation",
                  "realizations"});
    RunSpec& run = cfg.run;
    run.seed = r.unsigned_or("seed", 0);
    run.receiver = r.unsigned_or("receiver", 0);
    if (run.receiver > cfg.geometry().receiver_count()) {
      throw ParseError(r.key("receiver"), "outside 1.." +
                                              std::to_string(cfg.geometry().receiver_count()));
    }
    if (r.has("functionals")) {
      const json& f = r.raw("functionals");
      if (!f.is_array() || f.empty()) throw ParseError(r.key("functionals"), "expected a list");
      run.functionals.clear();
      for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string path = r.key("functionals") + "[" + std::to_string(i) + "]";
        if (!f[i].is_string()) throw ParseError(path, "expected a functional name");
        const auto name = f[i].get<std::string>();
        if (std::find(kFunctionals.begin(), kFunctionals.end(), name) == kFunctionals.end()) {
          throw ParseError(path, "unknown functional '" + name +
                                     "' (valid: km, interf, srint, cint, music, signal)");
        }
        run.functionals.push_back(name);
      }
    }
    run.x_d_over_a = r.number_or("x_d_over_a", run.x_d_over_a);
    run.omega_d_over_b = r.number_or("omega_d_over_b", run.omega_d_over_b);
    if (run.x_d_over_a < 0.0) throw ParseError(r.key("x_d_over_a"), "must be >= 0");
    if (run.omega_d_over_b < 0.0) throw ParseError(r.key("omega_d_over_b"), "must be >= 0");
    run.signal_rank = r.unsigned_or("signal_rank", 0);
    if (r.has("noise_snr_db")) run.noise_snr_db = r.number("noise_snr_db");
    run.peak_threshold = r.number_or("peak_threshold", run.peak_threshold);
    if (!(run.peak_threshold > 0.0) || run.peak_threshold > 1.0) {
      throw ParseError(r.key("peak_threshold"), "must be in (0, 1]");
    }
    run.peak_separation = r.number_or("peak_separation", run.peak_separation);
    run.realizations = r.unsigned_or("realizations", 1);
    if (run.realizations == 0) throw ParseError(r.key("realizations"), "must be >= 1");
  }
  return cfg;
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
  json doc;
  json& a = doc["array"];
  if (!cfg.array.positions.empty()) {
    a["positions"] = json::array();
    for (const auto& p : cfg.array.positions) a["positions"].push_back(point_json(p));
  } else {
    a["count"] = cfg.array.count;
    a["aperture"] = cfg.array.aperture;
    a["center"] = point_json(cfg.array.center);
  }
  if (!cfg.array.receivers.empty()) {
    a["receivers"] = json::array();
    for (const auto& p : cfg.array.receivers) a["receivers"].push_back(point_json(p));
  }
  doc["frequencies"] = {{"f0", cfg.frequencies.f0_thz},
                        {"c0", cfg.frequencies.c0_m_per_s},
                        {"list", cfg.frequencies.thz}};
  doc["window"] = {{"center", point_json(cfg.window.center)},
                   {"extent", json::array({cfg.window.extent.x(), cfg.window.extent.y()})},
                   {"pixel", json::array({cfg.window.pixel.x(), cfg.window.pixel.y()})}};
  json sc = json::array();
  for (const auto& s : cfg.scatterers) {
    sc.push_back({{"position", point_json(s.position)},
                  {"reflectivity", json::array({s.reflectivity.real(), s.reflectivity.imag()})}});
  }
  doc["scene"] = {{"scatterers", sc}};
  if (cfg.medium.random) {
    json m = {{"type", "random"}, {"corr_len", cfg.medium.corr_len}, {"seed", cfg.medium.seed}};
    if (cfg.medium.epsilon) m["epsilon"] = *cfg.medium.epsilon;
    else m["sigma"] = cfg.medium.sigma;
    if (cfg.medium.grid_spacing > 0.0) m["grid_spacing"] = cfg.medium.grid_spacing;
    doc["medium"] = m;
  } else {
    doc["medium"] = {{"type", "homogeneous"}};
  }
  const RunSpec& r = cfg.run;
  json run = {{"seed", r.seed},
              {"receiver", r.receiver},
              {"functionals", r.functionals},
              {"x_d_over_a", r.x_d_over_a},
              {"omega_d_over_b", r.omega_d_over_b},
              {"signal_rank", r.signal_rank},
              {"peak_threshold", r.peak_threshold},
              {"peak_separation", r.peak_separation},
              {"realizations", r.realizations}};
  if (r.noise_snr_db) run["noise_snr_db"] = *r.noise_snr_db;
  doc["run"] = run;
  return doc.dump(2) + "\n";
}

Medium make_medium(const ExperimentConfig& cfg, std::uint64_t index) {
  const double c0 = kReferenceSpeed;
  if (!cfg.medium.random) return Medium::homogeneous(c0);
  const ArrayGeometry g = cfg.geometry();
  const ImageWindow iw = cfg.image_window();
  std::vector<Point2> pts = g.sources();
  pts.insert(pts.end(), g.receivers().begin(), g.receivers().end());
  pts.push_back(iw.origin());
  pts.push_back(iw.origin() + iw.extent());
  pts.push_back(iw.origin() + Point2(iw.extent().x(), 0.0));
  pts.push_back(iw.origin() + Point2(0.0, iw.extent().y()));
  for (const auto& s : cfg.scatterers) pts.push_back(s.position);
  const double l = cfg.medium.corr_len;
  const double h = cfg.medium.grid_spacing > 0.0 ? cfg.medium.grid_spacing : 0.25 * l;
  const auto spec = RandomFieldSpec::covering(pts, l, h, 3.0 * l);
  auto field = std::make_shared<const RandomField>(
      sample_mu_field(spec, realization_seed(cfg.medium.seed, index)));
  return Medium::random_phase(cfg.medium.sigma, std::move(field), c0);
}

}  // namespace holoimg
