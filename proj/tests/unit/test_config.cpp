#include "holoimg/config.hpp"
#include "holoimg/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace holoimg;

namespace {

const char* kFullConfig = R"({
  "frequencies": {"f0": "600 THz", "min": 580, "max": "620 THz", "count": 16},
  "array": {"count": 81, "aperture": "250 um"},
  "window": {"center": [0, "5 mm"], "extent": [160, 80], "pixel": [2, 1]},
  "scene": {"scatterers": [
    {"position": [-40, 9980], "reflectivity": 1},
    {"position": ["20 um", "5000 um"], "reflectivity": [0.5, -0.25]}
  ]},
  "medium": {"type": "random", "epsilon": 0.2, "corr_len": "100 lambda0", "seed": 9},
  "run": {"seed": 4, "functionals": ["km", "srint"], "noise_snr_db": 30}
})";

std::string expect_parse_error(const std::string& text) {
  try {
    parse_experiment_config(text);
  } catch (const ParseError& e) {
    return e.key_path();
  }
  ADD_FAILURE() << "no ParseError for " << text;
  return {};
}

}  // namespace

TEST(Config, FullScaleGeometry) {
  const auto cfg = parse_experiment_config(kFullConfig);
  const auto g = cfg.geometry();
  EXPECT_EQ(g.size(), 81u);
  EXPECT_NEAR(g.aperture(), 500.0, 1e-9);
  EXPECT_NEAR(g.sources()[1].x() - g.sources()[0].x(), 6.25, 1e-12);
  EXPECT_NEAR(cfg.range(), 10000.0, 1e-9);
  EXPECT_EQ(cfg.receiver(), 41u);
}

TEST(Config, FullScaleFrequencies) {
  const auto cfg = parse_experiment_config(kFullConfig);
  const auto f = cfg.grid();
  EXPECT_EQ(f.size(), 16u);
  EXPECT_NEAR(f.bandwidth_thz(), 40.0, 1e-9);
}

TEST(Config, UnitConversions) {
  const auto cfg = parse_experiment_config(kFullConfig);
  EXPECT_NEAR(cfg.scatterers[1].position.x(), 40.0, 1e-9);
  EXPECT_NEAR(cfg.scatterers[1].position.y(), 10000.0, 1e-9);
  EXPECT_EQ(cfg.scatterers[1].reflectivity, Complex(0.5, -0.25));
  EXPECT_NEAR(parse_length("1.5 um", 5e-7), 3.0, 1e-12);
  EXPECT_NEAR(parse_length("250 nm", 5e-7), 0.5, 1e-12);
  EXPECT_NEAR(parse_length("7 lambda0", 5e-7), 7.0, 1e-12);
  EXPECT_THROW(parse_length("3 furlongs", 5e-7), ValidationError);
}

TEST(Config, EpsilonFixesSigma) {
  const auto cfg = parse_experiment_config(kFullConfig);
  ASSERT_TRUE(cfg.medium.random);
  EXPECT_NEAR(cfg.medium.sigma, 0.2 / std::sqrt(100.0 * 10000.0), 1e-15);
  EXPECT_EQ(cfg.medium.seed, 9u);
}

TEST(Config, EmptySceneIsRejected) {
  const std::string text = R"({"frequencies": {"list": [600]}, "array": {"count": 3, "aperture": 10},
    "window": {"center": [0, 100], "extent": [4, 4], "pixel": [1, 1]}, "scene": {"scatterers": []}})";
  EXPECT_EQ(expect_parse_error(text), "scene.scatterers");
}

TEST(Config, ErrorsCarryKeyPath) {
  const std::string base_f = R"("frequencies": {"list": [600]})";
  const std::string base_w = R"("window": {"center": [0, 100], "extent": [4, 4], "pixel": [1, 1]})";
  const std::string base_s = R"("scene": {"scatterers": [{"position": [0, 100]}]})";
  EXPECT_EQ(expect_parse_error("{" + base_f + R"(, "array": {"count": "x", "aperture": 1}, )" +
                               base_w + "," + base_s + "}"),
            "array.count");
  EXPECT_EQ(expect_parse_error("{" + base_f + R"(, "array": {"count": 3, "aperture": 10, "pitch": 1}, )" +
                               base_w + "," + base_s + "}"),
            "array.pitch");
  EXPECT_EQ(expect_parse_error("{" + base_f + R"(, "array": {"count": 3, "aperture": 10}, )" + base_w +
                               "," + R"("scene": {"scatterers": [{"position": [0]}]}})"),
            "scene.scatterers[0].position");
  EXPECT_EQ(expect_parse_error("{" + base_f + R"(, "array": {"count": 3, "aperture": 10}, )" + base_w +
                               "," + base_s + R"(, "run": {"functionals": ["kirchhoff"]}})"),
            "run.functionals[0]");
  EXPECT_EQ(expect_parse_error(R"({"array": {"count": 3, "aperture": 10}})"), "frequencies");
  EXPECT_EQ(expect_parse_error("{not json"), "");
}

TEST(Config, SerializeParseIsIdempotent) {
  const auto a = parse_experiment_config(kFullConfig);
  const auto text = serialize_experiment_config(a);
  const auto b = parse_experiment_config(text);
  EXPECT_EQ(serialize_experiment_config(b), text);
  EXPECT_EQ(a.frequencies.thz, b.frequencies.thz);
  EXPECT_EQ(a.medium.sigma, b.medium.sigma);
  EXPECT_EQ(a.run.functionals, b.run.functionals);
  ASSERT_EQ(a.scatterers.size(), b.scatterers.size());
  for (std::size_t j = 0; j < a.scatterers.size(); ++j) {
    EXPECT_EQ(a.scatterers[j].position, b.scatterers[j].position);
    EXPECT_EQ(a.scatterers[j].reflectivity, b.scatterers[j].reflectivity);
  }
}

TEST(Config, MediumCoversEverything) {
  const auto cfg = parse_experiment_config(kFullConfig);
  const Medium m = make_medium(cfg, 0);
  ASSERT_FALSE(m.is_homogeneous());
  for (const auto& x : cfg.geometry().sources()) EXPECT_TRUE(m.field()->covers(x));
  const auto iw = cfg.image_window();
  EXPECT_TRUE(m.field()->covers(iw.origin()));
  EXPECT_TRUE(m.field()->covers(iw.origin() + iw.extent()));
  const Medium again = make_medium(cfg, 0);
  EXPECT_EQ(m.field()->samples(), again.field()->samples());
  const Medium other = make_medium(cfg, 1);
  EXPECT_NE(m.field()->samples(), other.field()->samples());
}
