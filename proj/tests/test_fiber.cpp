#include <gtest/gtest.h>

#include <cmath>

#include "qtele/errors.hpp"
#include "qtele/fiber.hpp"
#include "qtele/rng.hpp"
#include "qtele/tomography.hpp"

using namespace qtele;

namespace {

std::vector<PolarizedPhoton> stream(std::size_t n, const PolarizationState& pol) {
  std::vector<PolarizedPhoton> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back({static_cast<std::int64_t>(i) * 1000, DensityMatrix::pure(pol)});
  return v;
}

bool within_sigma(double observed, double expected, double sigma, double k = 3.0) {
  return std::abs(observed - expected) <= k * sigma;
}

// Rotation angle of an SU(2) element (global phase removed).
double rotation_angle(const Matrix2& u) {
  const Complex det = u.determinant();
  const Matrix2 su = u / std::sqrt(det);
  const double c = std::min(1.0, std::abs(su.trace().real()) / 2.0);
  return 2.0 * std::acos(c);
}

std::vector<PolarizationState> refs() { return {PolarizationState::H(), PolarizationState::D()}; }

double ref_fidelity(const Matrix2& total, const PolarizationState& r) { return project(r.transformed(total), r); }

// Fully depolarizing channel: no correction helps.
class DepolarizedProbe : public PolarizationProbe {
 public:
  double pass_fraction(const PolarizationState&, const Matrix2&) override { return 0.5; }
};

}  // namespace

TEST(Transmission, LossBudgetArithmetic) {
  EXPECT_NEAR(transmission(FiberConfig{30.0, 0.34, 0.0, 0.0}), std::pow(10.0, -1.02), 1e-12);
  EXPECT_NEAR(transmission(FiberConfig{30.0, 0.34, 0.0, 0.0}), 0.0955, 5e-5);
  EXPECT_NEAR(transmission(FiberConfig{30.0, 0.34, 7.8, 0.0}), 0.01585, 1e-5);
  EXPECT_DOUBLE_EQ(transmission(FiberConfig{}), 1.0);
}

TEST(Transmission, ValidationNamesTheField) {
  try {
    FiberConfig{30.0, -0.34, 0.0, 0.0}.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "fiber.atten_db_per_km");
  }
}

TEST(Drift, ZeroStepOrZeroRateIsUnchanged) {
  Rng rng(1);
  const DriftState s{random_unitary(rng), 3.0};
  const DriftState a = evolve_drift(s, 0.5, 0.0, rng);
  EXPECT_LT((a.unitary - s.unitary).norm(), 1e-15);
  const DriftState b = evolve_drift(s, 0.0, 100.0, rng);
  EXPECT_LT((b.unitary - s.unitary).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(b.elapsed_s, 103.0);
  EXPECT_THROW(evolve_drift(s, 0.1, -1.0, rng), DomainError);
}

TEST(Drift, AngleVarianceGrowsLinearly) {
  // E[angle^2] = 3 rate^2 t for small accumulated rotations.
  const double rate = 0.02;
  const std::array<int, 4> steps = {1, 2, 5, 10};
  std::array<double, 4> mean_sq{};
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng = make_stream(99, {static_cast<std::uint64_t>(s)});
    DriftState d;
    int done = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      for (; done < steps[k]; ++done) d = evolve_drift(d, rate, 1.0, rng);
      const double a = rotation_angle(d.unitary);
      mean_sq[k] += a * a / seeds;
    }
  }
  for (std::size_t k = 0; k < steps.size(); ++k)
    EXPECT_NEAR(mean_sq[k] / (3.0 * rate * rate * steps[k]), 1.0, 0.05) << steps[k];
}

TEST(Drift, UnitarityHoldsOverAMillionSteps) {
  Rng rng(2);
  DriftState d{random_unitary(rng), 0.0};
  Matrix2 product = Matrix2::Identity();
  for (int i = 0; i < 1000000; ++i) {
    d = evolve_drift(d, 0.05, 1.0, rng);
    if (i % 1000 == 0) product = d.unitary * product;
  }
  EXPECT_LT(unitarity_error(d.unitary), 1e-10);
  EXPECT_LT(unitarity_error(product), 1e-10);
}

TEST(Drift, RandomUnitaryIsUnitary) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(unitarity_error(random_unitary(rng)), 1e-12);
}

TEST(Channel, IdentityAndTotalLoss) {
  Rng rng(4);
  const auto in = stream(1000, PolarizationState::D());
  const auto same = apply_channel(in, Matrix2::Identity(), 1.0, rng);
  ASSERT_EQ(same.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(same[i].t_ps, in[i].t_ps);
    EXPECT_LT((same[i].polarization.matrix() - in[i].polarization.matrix()).norm(), 1e-15);
  }
  EXPECT_TRUE(apply_channel(in, Matrix2::Identity(), 0.0, rng).empty());
}

TEST(Channel, BinomialSurvival) {
  const double t = 0.0955;
  const double n = 1e6;
  const double sigma = std::sqrt(n * t * (1.0 - t));
  for (const PolarizationState& pol : {PolarizationState::H(), PolarizationState::D()}) {
    Rng rng(5);
    const auto out = apply_channel(stream(static_cast<std::size_t>(n), pol), Matrix2::Identity(), t, rng);
    EXPECT_TRUE(within_sigma(static_cast<double>(out.size()), n * t, sigma)) << out.size();
  }
}

TEST(Channel, SurvivorsAreRotated) {
  Rng rng(6);
  const Matrix2 hwp = half_wave_plate(22.5);  // H -> D
  const auto out = apply_channel(stream(100, PolarizationState::H()), hwp, 1.0, rng);
  for (const auto& p : out) EXPECT_NEAR(fidelity(p.polarization, PolarizationState::D()), 1.0, 1e-12);
}

TEST(Background, InjectedRateAndSuppression) {
  const std::vector<PolarizedPhoton> none;
  for (const auto& [db, expected] : std::vector<std::pair<double, double>>{{0.0, 51000.0}, {10.0, 5100.0}}) {
    Rng rng(7);
    const auto out = inject_background(none, CrosstalkConfig{51000.0, db}, 1.0, rng);
    EXPECT_TRUE(within_sigma(static_cast<double>(out.size()), expected, std::sqrt(expected))) << out.size();
  }
  Rng rng(8);
  const auto signal = stream(500, PolarizationState::H());
  const auto same = inject_background(signal, CrosstalkConfig{0.0, 0.0}, 1.0, rng);
  EXPECT_EQ(same.size(), signal.size());
}

TEST(Background, MergedInTimeOrder) {
  Rng rng(9);
  const auto out = inject_background(stream(10000, PolarizationState::H()), CrosstalkConfig{51000.0, 0.0}, 1.0, rng);
  EXPECT_TRUE(std::is_sorted(out.begin(), out.end(),
                             [](const PolarizedPhoton& a, const PolarizedPhoton& b) { return a.t_ps < b.t_ps; }));
}

TEST(Background, TomographicallyWhite) {
  Rng rng(10);
  const auto bg = inject_background({}, CrosstalkConfig{1.2e5, 0.0}, 1.0, rng);
  BasisCounts c;
  for (const auto& p : bg) {
    // Each photon meets one randomly chosen analyzer setting.
    const auto& [basis, setting] = projection_schedule()[static_cast<std::size_t>(uniform01(rng) * 6.0) % 6];
    if (uniform01(rng) < project(p.polarization, analyzer_state(setting))) ++c[basis];
  }
  ASSERT_GE(c.total(), 10000u);
  EXPECT_LT(reconstruct(c).stokes.norm(), 0.05);
}

TEST(Compensation, IdentityDriftNeedsNoWork) {
  NoiselessProbe probe(Matrix2::Identity());
  const CompensationResult r = compensate_polarization(probe, refs());
  EXPECT_EQ(r.iterations, 0);
  EXPECT_TRUE(equal_up_to_phase(r.correction, Matrix2::Identity(), 1e-12));
}

TEST(Compensation, RecoversKnownDriftNoiseless) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Matrix2 u = random_unitary(rng);
    NoiselessProbe probe(u);
    const CompensationResult r = compensate_polarization(probe, refs());
    const Matrix2 total = r.correction * u;
    for (const auto& ref : refs()) EXPECT_GT(ref_fidelity(total, ref), 0.999);
    EXPECT_LT(unitarity_error(r.correction), 1e-10);
  }
}

TEST(Compensation, WorksWithShotNoise) {
  Rng rng(12);
  Rng probe_rng(13);
  for (int i = 0; i < 20; ++i) {
    const Matrix2 u = random_unitary(rng);
    ShotNoiseProbe probe(u, 1000000, probe_rng);
    const CompensationResult r = compensate_polarization(probe, refs());
    for (const auto& ref : refs()) EXPECT_GT(ref_fidelity(r.correction * u, ref), 0.995);
  }
}

TEST(Compensation, TracksDriftFromPreviousCorrection) {
  Rng rng(14);
  DriftState d{random_unitary(rng), 0.0};
  NoiselessProbe first(d.unitary);
  Matrix2 correction = compensate_polarization(first, refs()).correction;
  for (int k = 0; k < 50; ++k) {
    for (int s = 0; s < 30; ++s) d = evolve_drift(d, 0.02, 1.0, rng);
    NoiselessProbe probe(d.unitary);
    correction = compensate_polarization(probe, refs(), {}, correction).correction;
    for (const auto& ref : refs()) EXPECT_GT(ref_fidelity(correction * d.unitary, ref), 0.995);
  }
  EXPECT_LT(unitarity_error(correction), 1e-10);
}

TEST(Compensation, NonConvergenceReportsBestInfidelity) {
  DepolarizedProbe probe;
  try {
    compensate_polarization(probe, refs(), CompensationOptions{5, 0.995, 1.5707963267948966, 1e-7});
    FAIL() << "expected CompensationError";
  } catch (const CompensationError& e) {
    EXPECT_NEAR(e.best_infidelity(), 0.5, 1e-12);
  }
}

TEST(Compensation, RejectsOrthogonalReferences) {
  NoiselessProbe probe(Matrix2::Identity());
  EXPECT_THROW(compensate_polarization(probe, {PolarizationState::H(), PolarizationState::V()}), DomainError);
}
