#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "qtele/config.hpp"
#include "qtele/errors.hpp"

using namespace qtele;

namespace {

std::string read_text(const std::string& name) {
  std::ifstream in(std::string(QTELE_SCENARIO_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

int line_containing(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n)
    if (line.find(needle) != std::string::npos) return n;
  return -1;
}

ConfigError parse_error(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ConfigError";
  return ConfigError("", "");
}

}  // namespace

TEST(Config, BundledScenariosValidate) {
  for (const char* f : {"local.yaml", "metro30km.yaml", "metro30km_traffic.yaml"}) {
    const LinkConfig c = load_config(std::string(QTELE_SCENARIO_DIR) + "/" + f);
    EXPECT_NO_THROW(c.validate()) << f;
    EXPECT_FALSE(c.name.empty());
    EXPECT_EQ(c.window_ps, 64);
  }
  const LinkConfig metro = load_config(QTELE_SCENARIO_DIR "/metro30km.yaml");
  EXPECT_NEAR(transmission(metro.fiber), 0.01585, 1e-5);
  const LinkConfig traffic = load_config(QTELE_SCENARIO_DIR "/metro30km_traffic.yaml");
  EXPECT_EQ(traffic.crosstalk.background_rate_ch3, 51000.0);
}

TEST(Config, NegativeLossNamesFieldAndLine) {
  const std::string text = replace(read_text("metro30km.yaml"), "atten_db_per_km: 0.34", "atten_db_per_km: -0.34");
  const ConfigError e = parse_error(text);
  EXPECT_EQ(e.field(), "fiber.atten_db_per_km");
  EXPECT_EQ(e.line(), line_containing(text, "atten_db_per_km"));
  EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
}

TEST(Config, PairRateAboveSinglesIsACrossFieldError) {
  const std::string text = replace(read_text("local.yaml"), "pair_coincidence_rate: 1600", "pair_coincidence_rate: 5.0e5");
  EXPECT_EQ(parse_error(text).field(), "source.pair_coincidence_rate");
}

TEST(Config, UnknownKeyIsRejected) {
  const std::string text = replace(read_text("local.yaml"), "  length_km: 0", "  length_km: 0\n  lenght_km: 3");
  const ConfigError e = parse_error(text);
  EXPECT_EQ(e.field(), "fiber.lenght_km");
  EXPECT_EQ(e.line(), line_containing(text, "lenght_km"));
}

TEST(Config, MissingSeedIsRejected) {
  EXPECT_EQ(parse_error(replace(read_text("local.yaml"), "seed: 1\n", "")).field(), "seed");
}

TEST(Config, WrongTypeIsReported) {
  const ConfigError e = parse_error(replace(read_text("local.yaml"), "pair_fidelity: 0.95", "pair_fidelity: high"));
  EXPECT_EQ(e.field(), "source.pair_fidelity");
}

TEST(Config, DumpParsesBackToTheSameConfig) {
  for (const char* f : {"local.yaml", "metro30km.yaml", "metro30km_traffic.yaml"}) {
    const LinkConfig a = load_config(std::string(QTELE_SCENARIO_DIR) + "/" + f);
    const std::string once = dump_config(a);
    const LinkConfig b = parse_config(once);
    EXPECT_EQ(dump_config(b), once) << f;
    EXPECT_EQ(b.seed, a.seed);
    EXPECT_EQ(b.zeta(), a.zeta());
    EXPECT_EQ(b.hom.wcs_rate_scale, a.hom.wcs_rate_scale);
  }
}

TEST(Config, FastVariantScalesDurationsAndWidensBands) {
  const LinkConfig c = load_config(QTELE_SCENARIO_DIR "/local.yaml");
  const LinkConfig f = fast_variant(c);
  EXPECT_DOUBLE_EQ(f.acquisition.seconds_per_setting, 0.1 * c.acquisition.seconds_per_setting);
  EXPECT_DOUBLE_EQ(f.hom.seconds_per_point, 0.1 * c.hom.seconds_per_point);
  const auto& a = *c.check.average_fidelity;
  const auto& b = *f.check.average_fidelity;
  EXPECT_NEAR(b[0] + b[1], a[0] + a[1], 1e-12);
  EXPECT_NEAR((b[1] - b[0]) / (a[1] - a[0]), std::sqrt(10.0), 1e-12);
}

TEST(Config, ZetaOverrideReplacesBrightnessLaw) {
  const std::string text =
      replace(read_text("local.yaml"), "  pair_fidelity: 0.95", "  pair_fidelity: 0.95\n  zeta_override: 0.0");
  const LinkConfig c = parse_config(text);
  EXPECT_EQ(c.zeta(), 0.0);
  const LinkConfig d = load_config(QTELE_SCENARIO_DIR "/local.yaml");
  EXPECT_NEAR(d.zeta(), 0.967 - 3.78e-8 * 3.4e5, 1e-12);
}
