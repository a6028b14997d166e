#include "qtele/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

int line_of(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? m.line + 1 : -1;
}

// Walks one mapping, recording which keys were consumed so leftovers can be
// reported as unknown fields.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_, "must be a mapping", line_of(node_));
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    if (has(key)) return node_[key];
    // A default-constructed Node counts as a defined null; a failed const
    // lookup is the undefined node callers test for.
    static const YAML::Node empty(YAML::NodeType::Map);
    return empty["missing"];
  }

  Section sub(const std::string& key) { return Section(raw(key), field(key)); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    const YAML::Node n = raw(key);
    if (!n) return fallback;
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field(key), "has the wrong type", line_of(n));
    }
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key), "is required", line_of(node_));
    return get<T>(key, T{});
  }

  double number(const std::string& key, double fallback) {
    const double v = get<double>(key, fallback);
    if (!std::isfinite(v)) throw ConfigError(field(key), "must be finite", line_of(raw(key)));
    return v;
  }

  int line(const std::string& key) {
    const YAML::Node n = has(key) ? node_[key] : node_;
    return n ? line_of(n) : -1;
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!seen_.count(k)) throw ConfigError(field(k), "is not a known field", line_of(kv.first));
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

DetectorConfig read_detector(Section s) {
  DetectorConfig d;
  d.efficiency = s.number("efficiency", d.efficiency);
  d.jitter_sigma_ps = s.number("jitter_sigma_ps", d.jitter_sigma_ps);
  d.dead_time_ps = s.number("dead_time_ps", d.dead_time_ps);
  d.dark_rate = s.number("dark_rate", d.dark_rate);
  s.finish();
  return d;
}

std::optional<std::array<double, 2>> read_band(Section& s, const std::string& key) {
  const YAML::Node n = s.raw(key);
  if (!n) return std::nullopt;
  if (!n.IsSequence() || n.size() != 2) throw ConfigError(s.field(key), "must be a [low, high] pair", line_of(n));
  std::array<double, 2> b{n[0].as<double>(), n[1].as<double>()};
  if (!(b[0] <= b[1])) throw ConfigError(s.field(key), "low bound exceeds high bound", line_of(n));
  return b;
}

// Re-throws a validation error with the line of the offending YAML entry.
template <typename F>
void with_lines(const YAML::Node& root, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    if (e.line() >= 0) throw;
    YAML::Node n;
    n.reset(root);
    std::stringstream path(e.field());
    std::string part;
    int line = -1;
    while (std::getline(path, part, '.')) {
      if (!n.IsMap() || !n[part]) break;
      n.reset(n[part]);  // plain assignment would rebind the tree
      line = line_of(n);
    }
    const std::string prefix = e.field() + ": ";
    std::string msg = e.what();
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw ConfigError(e.field(), msg, line);
  }
}

LinkConfig from_yaml(const YAML::Node& root) {
  Section top(root, "");
  LinkConfig c;
  c.name = top.require<std::string>("name");
  if (!top.has("seed")) throw ConfigError("seed", "is required (runs must be reproducible)", line_of(root));
  c.seed = top.get<std::uint64_t>("seed", 0);

  {
    Section s = top.sub("wcs");
    c.wcs.detected_rate_ch1 = s.number("detected_rate_ch1", 0.0);
    c.wcs.detected_rate_ch2 = s.number("detected_rate_ch2", 0.0);
    s.finish();
  }
  {
    Section s = top.sub("source");
    PairSourceConfig& p = c.source;
    p.pair_coincidence_rate = s.number("pair_coincidence_rate", 0.0);
    p.pair_fidelity = s.number("pair_fidelity", 1.0);
    p.idler_rate_ch1 = s.number("idler_rate_ch1", 0.0);
    p.idler_rate_ch2 = s.number("idler_rate_ch2", 0.0);
    p.signal_rate = s.number("signal_rate", 0.0);
    p.zeta_at_zero_brightness = s.number("zeta_at_zero_brightness", 1.0);
    p.brightness_visibility_slope = s.number("brightness_visibility_slope", 0.0);
    if (s.has("zeta_override")) c.zeta_override = s.number("zeta_override", 1.0);
    s.finish();
  }
  {
    Section s = top.sub("fiber");
    c.fiber.length_km = s.number("length_km", 0.0);
    c.fiber.atten_db_per_km = s.number("atten_db_per_km", 0.0);
    c.fiber.excess_loss_db = s.number("excess_loss_db", 0.0);
    c.fiber.drift_rate = s.number("drift_rate", 0.0);
    s.finish();
  }
  {
    Section s = top.sub("crosstalk");
    c.crosstalk.background_rate_ch3 = s.number("background_rate_ch3", 0.0);
    c.crosstalk.bandpass_suppression_db = s.number("bandpass_suppression_db", 0.0);
    s.finish();
  }
  {
    Section s = top.sub("detectors");
    c.detectors[0] = read_detector(s.sub("ch1"));
    c.detectors[1] = read_detector(s.sub("ch2"));
    c.detectors[2] = read_detector(s.sub("ch3"));
    s.finish();
  }
  {
    Section s = top.sub("window");
    c.window_ps = s.get<std::int64_t>("width_ps", 64);
    s.finish();
  }
  {
    Section s = top.sub("acquisition");
    AcquisitionConfig& a = c.acquisition;
    a.seconds_per_setting = s.number("seconds_per_setting", a.seconds_per_setting);
    if (s.has("inputs")) {
      const YAML::Node n = s.raw("inputs");
      if (!n.IsSequence()) throw ConfigError(s.field("inputs"), "must be a list of basis names", line_of(n));
      a.inputs.clear();
      for (const auto& item : n) {
        try {
          a.inputs.push_back(basis_from_name(item.as<std::string>()));
        } catch (const DomainError& e) {
          throw ConfigError(s.field("inputs"), e.what(), line_of(item));
        }
      }
    }
    a.mc_trials = s.get<int>("mc_trials", a.mc_trials);
    a.drift_step_s = s.number("drift_step_s", a.drift_step_s);
    a.guard_ps = s.number("guard_ps", a.guard_ps);
    s.finish();
  }
  {
    Section s = top.sub("compensation");
    CompensationConfig& k = c.compensation;
    k.enabled = s.get<bool>("enabled", k.enabled);
    k.interval_s = s.number("interval_s", k.interval_s);
    k.reference_photons = s.get<std::uint64_t>("reference_photons", k.reference_photons);
    k.required_fidelity = s.number("required_fidelity", k.required_fidelity);
    k.max_iters = s.get<int>("max_iters", k.max_iters);
    s.finish();
  }
  {
    Section s = top.sub("hom");
    HomConfig& h = c.hom;
    if (s.has("delays_ps")) h.delays_ps = s.get<std::vector<double>>("delays_ps", {});
    h.seconds_per_point = s.number("seconds_per_point", h.seconds_per_point);
    h.coherence_time_ps = s.number("coherence_time_ps", h.coherence_time_ps);
    h.wcs_rate_scale = s.number("wcs_rate_scale", h.wcs_rate_scale);
    s.finish();
  }
  {
    Section s = top.sub("check");
    c.check.average_fidelity = read_band(s, "average_fidelity");
    c.check.visibility = read_band(s, "visibility");
    s.finish();
  }
  top.finish();
  with_lines(root, [&] { c.validate(); });
  return c;
}

void emit_band(YAML::Emitter& out, const char* key, const std::optional<std::array<double, 2>>& b) {
  if (!b) return;
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << (*b)[0] << (*b)[1] << YAML::EndSeq;
}

void emit_detector(YAML::Emitter& out, const char* key, const DetectorConfig& d) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "efficiency" << YAML::Value << d.efficiency;
  out << YAML::Key << "jitter_sigma_ps" << YAML::Value << d.jitter_sigma_ps;
  out << YAML::Key << "dead_time_ps" << YAML::Value << d.dead_time_ps;
  out << YAML::Key << "dark_rate" << YAML::Value << d.dark_rate;
  out << YAML::EndMap;
}

}  // namespace

WcsConfig WcsLinkConfig::channel(int ch, const PolarizationState& pol) const {
  return WcsConfig{ch == 1 ? detected_rate_ch1 : detected_rate_ch2, pol};
}

void LinkConfig::validate() const {
  if (name.empty()) throw ConfigError("name", "must not be empty");
  if (!(wcs.detected_rate_ch1 >= 0.0)) throw ConfigError("wcs.detected_rate_ch1", "must be non-negative");
  if (!(wcs.detected_rate_ch2 >= 0.0)) throw ConfigError("wcs.detected_rate_ch2", "must be non-negative");
  source.validate();
  if (source.pair_coincidence_rate > source.idler_rate_ch1 + source.idler_rate_ch2)
    throw ConfigError("source.pair_coincidence_rate", "exceeds the idler singles rate");
  if (zeta_override && !(*zeta_override >= 0.0 && *zeta_override <= 1.0))
    throw ConfigError("source.zeta_override", "must lie in [0, 1]");
  fiber.validate();
  crosstalk.validate();
  detectors[0].validate("detectors.ch1");
  detectors[1].validate("detectors.ch2");
  detectors[2].validate("detectors.ch3");
  for (int i = 0; i < 2; ++i)
    if (!(detectors[i].efficiency > 0.0))
      throw ConfigError(i == 0 ? "detectors.ch1.efficiency" : "detectors.ch2.efficiency", "must be positive");
  if (!(detectors[2].efficiency > 0.0)) throw ConfigError("detectors.ch3.efficiency", "must be positive");
  if (window_ps <= 0) throw ConfigError("window.width_ps", "must be positive");
  if (!(acquisition.seconds_per_setting > 0.0))
    throw ConfigError("acquisition.seconds_per_setting", "must be positive");
  if (acquisition.inputs.empty()) throw ConfigError("acquisition.inputs", "must list at least one input state");
  for (Basis b : acquisition.inputs) {
    if (b != Basis::H && b != Basis::D && b != Basis::R)
      throw ConfigError("acquisition.inputs", "only H, D and R have a teleportation target");
  }
  if (acquisition.mc_trials < 1) throw ConfigError("acquisition.mc_trials", "must be at least 1");
  if (!(acquisition.drift_step_s > 0.0)) throw ConfigError("acquisition.drift_step_s", "must be positive");
  if (!(compensation.interval_s > 0.0)) throw ConfigError("compensation.interval_s", "must be positive");
  if (!(compensation.required_fidelity > 0.0 && compensation.required_fidelity <= 1.0))
    throw ConfigError("compensation.required_fidelity", "must lie in (0, 1]");
  if (compensation.max_iters < 1) throw ConfigError("compensation.max_iters", "must be at least 1");
  if (!(hom.seconds_per_point > 0.0)) throw ConfigError("hom.seconds_per_point", "must be positive");
  if (!(hom.coherence_time_ps > 0.0)) throw ConfigError("hom.coherence_time_ps", "must be positive");
  if (!(hom.wcs_rate_scale > 0.0)) throw ConfigError("hom.wcs_rate_scale", "must be positive");
  if (!hom.delays_ps.empty()) {
    bool far = false;
    for (double d : hom.delays_ps) far = far || std::abs(d) >= 3.0 * hom.coherence_time_ps;
    if (!far) throw ConfigError("hom.delays_ps", "needs at least one delay beyond three coherence times");
  }
}

LinkConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  if (!root.IsMap()) throw ConfigError("<document>", "top level must be a mapping");
  return from_yaml(root);
}

LinkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const LinkConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(12);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "wcs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "detected_rate_ch1" << YAML::Value << c.wcs.detected_rate_ch1;
  out << YAML::Key << "detected_rate_ch2" << YAML::Value << c.wcs.detected_rate_ch2;
  out << YAML::EndMap;
  out << YAML::Key << "source" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "pair_coincidence_rate" << YAML::Value << c.source.pair_coincidence_rate;
  out << YAML::Key << "pair_fidelity" << YAML::Value << c.source.pair_fidelity;
  out << YAML::Key << "idler_rate_ch1" << YAML::Value << c.source.idler_rate_ch1;
  out << YAML::Key << "idler_rate_ch2" << YAML::Value << c.source.idler_rate_ch2;
  out << YAML::Key << "signal_rate" << YAML::Value << c.source.signal_rate;
  out << YAML::Key << "zeta_at_zero_brightness" << YAML::Value << c.source.zeta_at_zero_brightness;
  out << YAML::Key << "brightness_visibility_slope" << YAML::Value << c.source.brightness_visibility_slope;
  if (c.zeta_override) out << YAML::Key << "zeta_override" << YAML::Value << *c.zeta_override;
  out << YAML::EndMap;
  out << YAML::Key << "fiber" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "length_km" << YAML::Value << c.fiber.length_km;
  out << YAML::Key << "atten_db_per_km" << YAML::Value << c.fiber.atten_db_per_km;
  out << YAML::Key << "excess_loss_db" << YAML::Value << c.fiber.excess_loss_db;
  out << YAML::Key << "drift_rate" << YAML::Value << c.fiber.drift_rate;
  out << YAML::EndMap;
  out << YAML::Key << "crosstalk" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "background_rate_ch3" << YAML::Value << c.crosstalk.background_rate_ch3;
  out << YAML::Key << "bandpass_suppression_db" << YAML::Value << c.crosstalk.bandpass_suppression_db;
  out << YAML::EndMap;
  out << YAML::Key << "detectors" << YAML::Value << YAML::BeginMap;
  emit_detector(out, "ch1", c.detectors[0]);
  emit_detector(out, "ch2", c.detectors[1]);
  emit_detector(out, "ch3", c.detectors[2]);
  out << YAML::EndMap;
  out << YAML::Key << "window" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "width_ps" << YAML::Value << c.window_ps;
  out << YAML::EndMap;
  out << YAML::Key << "acquisition" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "seconds_per_setting" << YAML::Value << c.acquisition.seconds_per_setting;
  out << YAML::Key << "inputs" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Basis b : c.acquisition.inputs) out << std::string(basis_name(b));
  out << YAML::EndSeq;
  out << YAML::Key << "mc_trials" << YAML::Value << c.acquisition.mc_trials;
  out << YAML::Key << "drift_step_s" << YAML::Value << c.acquisition.drift_step_s;
  out << YAML::Key << "guard_ps" << YAML::Value << c.acquisition.guard_ps;
  out << YAML::EndMap;
  out << YAML::Key << "compensation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << c.compensation.enabled;
  out << YAML::Key << "interval_s" << YAML::Value << c.compensation.interval_s;
  out << YAML::Key << "reference_photons" << YAML::Value << c.compensation.reference_photons;
  out << YAML::Key << "required_fidelity" << YAML::Value << c.compensation.required_fidelity;
  out << YAML::Key << "max_iters" << YAML::Value << c.compensation.max_iters;
  out << YAML::EndMap;
  out << YAML::Key << "hom" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "delays_ps" << YAML::Value << YAML::Flow << c.hom.delays_ps;
  out << YAML::Key << "seconds_per_point" << YAML::Value << c.hom.seconds_per_point;
  out << YAML::Key << "coherence_time_ps" << YAML::Value << c.hom.coherence_time_ps;
  out << YAML::Key << "wcs_rate_scale" << YAML::Value << c.hom.wcs_rate_scale;
  out << YAML::EndMap;
  if (c.check.average_fidelity || c.check.visibility) {
    out << YAML::Key << "check" << YAML::Value << YAML::BeginMap;
    emit_band(out, "average_fidelity", c.check.average_fidelity);
    emit_band(out, "visibility", c.check.visibility);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

LinkConfig fast_variant(const LinkConfig& cfg, double factor) {
  LinkConfig c = cfg;
  c.acquisition.seconds_per_setting *= factor;
  c.hom.seconds_per_point *= factor;
  // Statistical bands widen with the square root of the count reduction.
  const double widen = std::sqrt(1.0 / factor);
  const auto scale = [&](std::optional<std::array<double, 2>>& b) {
    if (!b) return;
    const double mid = 0.5 * ((*b)[0] + (*b)[1]);
    const double half = 0.5 * ((*b)[1] - (*b)[0]) * widen;
    *b = {mid - half, mid + half};
  };
  scale(c.check.average_fidelity);
  scale(c.check.visibility);
  return c;
}

}  // namespace qtele
