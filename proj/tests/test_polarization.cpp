#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qtele/errors.hpp"
#include "qtele/polarization.hpp"
#include "qtele/rng.hpp"
#include "qtele/tomography.hpp"

using namespace qtele;

namespace {

constexpr double kTol = 1e-10;

Matrix2 outer(const Vector2& v) { return v * v.adjoint(); }

// Independent reference kets, written out by hand.
Vector2 ket(Basis b) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  switch (b) {
    case Basis::H: return Vector2(1.0, 0.0);
    case Basis::V: return Vector2(0.0, 1.0);
    case Basis::D: return Vector2(s, s);
    case Basis::A: return Vector2(s, -s);
    case Basis::R: return Vector2(s, s * i);
    case Basis::L: return Vector2(s, -s * i);
  }
  return Vector2::Zero();
}

DensityMatrix random_rho(Rng& rng) {
  // Uniform point in the Bloch ball.
  std::normal_distribution<double> g(0.0, 1.0);
  StokesVector s{g(rng), g(rng), g(rng)};
  const double n = s.norm();
  const double r = std::cbrt(uniform01(rng));
  return stokes_to_rho({s.x / n * r, s.y / n * r, s.z / n * r});
}

}  // namespace

TEST(PolarizationState, NormalizesOnConstruction) {
  const PolarizationState s(Complex(3.0, 0.0), Complex(0.0, 4.0));
  EXPECT_NEAR(std::norm(s.alpha()) + std::norm(s.beta()), 1.0, 1e-12);
  EXPECT_THROW(PolarizationState(Complex(0.0), Complex(0.0)), DomainError);
}

TEST(PolarizationState, NamedStatesMatchConventions) {
  for (Basis b : kAllBases) {
    const Vector2 k = PolarizationState::named(b).ket();
    EXPECT_LT((k - ket(b)).norm(), 1e-12) << basis_name(b);
  }
  EXPECT_EQ(basis_from_name("R"), Basis::R);
  EXPECT_THROW(basis_from_name("X"), DomainError);
}

TEST(DensityMatrix, RejectsNonHermitianOrWrongTrace) {
  Matrix2 m = Matrix2::Identity();
  EXPECT_THROW(DensityMatrix{m}, DomainError);
  m *= 0.5;
  m(0, 1) = Complex(0.1, 0.0);
  EXPECT_THROW(DensityMatrix{m}, DomainError);
  m(1, 0) = Complex(0.1, 0.0);
  EXPECT_NO_THROW(DensityMatrix{m});
}

TEST(Waveplates, UnitaryForArbitraryAngles) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const WaveplateSetting w{360.0 * uniform01(rng) - 180.0, 360.0 * uniform01(rng) - 180.0};
    EXPECT_LT(unitarity_error(waveplate_unitary(w)), 1e-12);
  }
}

TEST(Waveplates, ZeroAnglesAreDiagonal) {
  // QWP(0) HWP(0) = diag(1, -i) up to phase: diagonal, so H and V pass unchanged,
  // though the pair is not the identity.
  const Matrix2 u = waveplate_unitary({0.0, 0.0});
  EXPECT_LT(std::abs(u(0, 1)) + std::abs(u(1, 0)), 1e-12);
  EXPECT_TRUE(equal_up_to_phase(u, Matrix2(Eigen::Vector2cd(1.0, Complex(0.0, -1.0)).asDiagonal()), 1e-12));
  EXPECT_NEAR(project(PolarizationState::H(), analyzer_state({0.0, 0.0})), 1.0, 1e-12);
}

TEST(Waveplates, AnglesAreModulo180) {
  const WaveplateSetting a{45.0, 22.5}, b{225.0, -157.5};
  EXPECT_TRUE(equal_up_to_phase(waveplate_unitary(a), waveplate_unitary(b), 1e-12));
}

TEST(Waveplates, AnalyzerSettingsSelectTheirStates) {
  // Each setting followed by the H port must equal the projector of its state.
  for (const auto& [basis, setting] : projection_schedule()) {
    const Matrix2 u = waveplate_unitary(setting);
    const Matrix2 effect = u.adjoint() * outer(Vector2(1.0, 0.0)) * u;
    EXPECT_LT((effect - outer(ket(basis))).norm(), kTol) << basis_name(basis);
  }
}

TEST(Waveplates, CircularHandedness) {
  // (45, 0) selects R = (H + iV)/sqrt2, the +1 eigenstate of sigma_y.
  const PolarizationState r = analyzer_state({45.0, 0.0});
  EXPECT_NEAR(project(PolarizationState::R(), r), 1.0, kTol);
  EXPECT_LT((pauli_y() * ket(Basis::R) - ket(Basis::R)).norm(), 1e-12);
  const StokesVector s = rho_to_stokes(DensityMatrix::pure(PolarizationState::R()));
  EXPECT_NEAR(s.y, 1.0, 1e-12);
  EXPECT_NEAR(project(PolarizationState::L(), analyzer_state({0.0, 22.5})), 1.0, kTol);
}

TEST(Project, Examples) {
  const DensityMatrix h = DensityMatrix::pure(PolarizationState::H());
  EXPECT_NEAR(project(h, PolarizationState::H()), 1.0, 1e-12);
  EXPECT_NEAR(project(h, PolarizationState::D()), 0.5, 1e-12);
  for (Basis b : kAllBases) EXPECT_NEAR(project(DensityMatrix::maximally_mixed(), PolarizationState::named(b)), 0.5, 1e-12);
}

TEST(Fidelity, Examples) {
  EXPECT_NEAR(fidelity(DensityMatrix::pure(PolarizationState::V()), PolarizationState::V()), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(DensityMatrix::maximally_mixed(), PolarizationState::R()), 0.5, 1e-12);
  EXPECT_NEAR(fidelity(DensityMatrix::pure(PolarizationState::H()), PolarizationState::V()), 0.0, 1e-12);
}

TEST(Fidelity, EqualsProjectExactly) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix rho = random_rho(rng);
    const PolarizationState t(Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5),
                              Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5));
    EXPECT_EQ(fidelity(rho, t), project(rho, t));
  }
}

TEST(Stokes, Examples) {
  const auto near = [](const DensityMatrix& a, const Matrix2& b) { return (a.matrix() - b).norm() < 1e-12; };
  EXPECT_TRUE(near(stokes_to_rho({0, 0, 1}), outer(ket(Basis::H))));
  EXPECT_TRUE(near(stokes_to_rho({0, 0, 0}), 0.5 * Matrix2::Identity()));
  EXPECT_TRUE(near(stokes_to_rho({1, 0, 0}), outer(ket(Basis::D))));

  const StokesVector h = rho_to_stokes(DensityMatrix::pure(PolarizationState::H()));
  EXPECT_NEAR(h.x, 0.0, 1e-12);
  EXPECT_NEAR(h.z, 1.0, 1e-12);
  const StokesVector m = rho_to_stokes(DensityMatrix::maximally_mixed());
  EXPECT_NEAR(m.norm(), 0.0, 1e-12);
}

TEST(Stokes, UnphysicalVectorsPassThrough) {
  const DensityMatrix rho = stokes_to_rho({1.0, 1.0, 0.0});
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_FALSE(rho.is_physical());
}

TEST(Stokes, RoundTripOverRandomStates) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const DensityMatrix rho = random_rho(rng);
    const DensityMatrix back = stokes_to_rho(rho_to_stokes(rho));
    ASSERT_LT((back.matrix() - rho.matrix()).norm(), kTol);
  }
}

TEST(Completeness, BasisPairsSumToOne) {
  Rng rng(5);
  const std::array<std::pair<Basis, Basis>, 3> pairs = {
      {{Basis::H, Basis::V}, {Basis::D, Basis::A}, {Basis::R, Basis::L}}};
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix rho = random_rho(rng);
    for (const auto& [a, b] : pairs)
      EXPECT_NEAR(project(rho, PolarizationState::named(a)) + project(rho, PolarizationState::named(b)), 1.0, 1e-12);
  }
}

TEST(TraceDistance, OrthogonalAndIdentical) {
  const DensityMatrix h = DensityMatrix::pure(PolarizationState::H());
  EXPECT_NEAR(trace_distance(h, DensityMatrix::pure(PolarizationState::V())), 1.0, 1e-12);
  EXPECT_NEAR(trace_distance(h, h), 0.0, 1e-12);
  EXPECT_NEAR(trace_distance(h, DensityMatrix::maximally_mixed()), 0.5, 1e-12);
}

TEST(Su2Rotation, IsUnitaryAndMatchesAxisAngle) {
  const Matrix2 u = su2_rotation(0.0, 0.0, M_PI);
  EXPECT_TRUE(equal_up_to_phase(u, pauli_z(), 1e-12));
  EXPECT_LT(unitarity_error(su2_rotation(0.3, -1.2, 2.0)), 1e-12);
  EXPECT_TRUE(equal_up_to_phase(su2_rotation(0.0, 0.0, 0.0), Matrix2::Identity(), 1e-15));
}
