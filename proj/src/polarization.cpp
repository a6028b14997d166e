#include "qtele/polarization.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI(0.0, 1.0);

Matrix2 rotation(double deg) {
  const double t = deg * std::numbers::pi / 180.0;
  Matrix2 r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

}  // namespace

std::string_view basis_name(Basis b) {
  switch (b) {
    case Basis::H: return "H";
    case Basis::V: return "V";
    case Basis::D: return "D";
    case Basis::A: return "A";
    case Basis::R: return "R";
    case Basis::L: return "L";
  }
  return "?";
}

Basis basis_from_name(std::string_view name) {
  for (Basis b : kAllBases) {
    if (basis_name(b) == name) return b;
  }
  throw DomainError("unknown polarization basis state '" + std::string(name) + "'");
}

PolarizationState::PolarizationState(Complex alpha, Complex beta) {
  const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("polarization state has zero or non-finite norm");
  ket_ << alpha / n, beta / n;
}

PolarizationState PolarizationState::named(Basis b) {
  switch (b) {
    case Basis::H: return {1.0, 0.0};
    case Basis::V: return {0.0, 1.0};
    case Basis::D: return {kInvSqrt2, kInvSqrt2};
    case Basis::A: return {kInvSqrt2, -kInvSqrt2};
    case Basis::R: return {Complex(kInvSqrt2), kI * kInvSqrt2};
    case Basis::L: return {Complex(kInvSqrt2), -kI * kInvSqrt2};
  }
  return {};
}

PolarizationState PolarizationState::orthogonal() const {
  return {-std::conj(beta()), std::conj(alpha())};
}

DensityMatrix PolarizationState::projector() const {
  return DensityMatrix(Matrix2(ket_ * ket_.adjoint()), DensityMatrix::Unchecked{});
}

double StokesVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DensityMatrix::DensityMatrix(const Matrix2& m) : m_(m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw DomainError("density matrix is not Hermitian");
  if (std::abs(m.trace() - Complex(1.0)) > 1e-9) throw DomainError("density matrix trace is not 1");
  // Symmetrize away round-off so downstream invariants hold exactly.
  m_ = 0.5 * (m + m.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix2(0.5 * Matrix2::Identity()), Unchecked{});
}

std::array<double, 2> DensityMatrix::eigenvalues() const {
  // Closed form for a 2x2 Hermitian matrix: 1/2 (1 -+ |S|).
  const StokesVector s = rho_to_stokes(*this);
  const double tr = m_.trace().real();
  return {0.5 * (tr - s.norm()), 0.5 * (tr + s.norm())};
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix DensityMatrix::transformed(const Matrix2& u) const {
  Matrix2 out = u * m_ * u.adjoint();
  return DensityMatrix(Matrix2(0.5 * (out + out.adjoint())), Unchecked{});
}

DensityMatrix DensityMatrix::mixed_with(const DensityMatrix& other, double w) const {
  return DensityMatrix(Matrix2(w * m_ + (1.0 - w) * other.m_), Unchecked{});
}

const Matrix2& pauli_x() {
  static const Matrix2 m = (Matrix2() << 0.0, 1.0, 1.0, 0.0).finished();
  return m;
}

const Matrix2& pauli_y() {
  static const Matrix2 m = (Matrix2() << 0.0, -kI, kI, 0.0).finished();
  return m;
}

const Matrix2& pauli_z() {
  static const Matrix2 m = (Matrix2() << 1.0, 0.0, 0.0, -1.0).finished();
  return m;
}

Matrix2 retarder(double fast_axis_deg, double retardance_rad) {
  Matrix2 d = Matrix2::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::exp(kI * retardance_rad);
  return rotation(fast_axis_deg) * d * rotation(-fast_axis_deg);
}

Matrix2 quarter_wave_plate(double fast_axis_deg) { return retarder(fast_axis_deg, std::numbers::pi / 2.0); }

Matrix2 half_wave_plate(double fast_axis_deg) { return retarder(fast_axis_deg, std::numbers::pi); }

Matrix2 waveplate_unitary(const WaveplateSetting& setting) {
  return half_wave_plate(setting.hwp_deg) * quarter_wave_plate(setting.qwp_deg);
}

PolarizationState analyzer_state(const WaveplateSetting& setting) {
  return PolarizationState(Vector2(waveplate_unitary(setting).adjoint() * Vector2(1.0, 0.0)));
}

double project(const DensityMatrix& rho, const PolarizationState& axis) {
  return (axis.ket().adjoint() * rho.matrix() * axis.ket())(0, 0).real();
}

double project(const PolarizationState& state, const PolarizationState& axis) {
  return std::norm(axis.ket().dot(state.ket()));
}

double fidelity(const DensityMatrix& rho, const PolarizationState& target) { return project(rho, target); }

DensityMatrix stokes_to_rho(const StokesVector& s) {
  Matrix2 m = Matrix2::Identity() + s.x * pauli_x() + s.y * pauli_y() + s.z * pauli_z();
  return DensityMatrix(Matrix2(0.5 * m), DensityMatrix::Unchecked{});
}

StokesVector rho_to_stokes(const DensityMatrix& rho) {
  const Matrix2& m = rho.matrix();
  return {(m * pauli_x()).trace().real(), (m * pauli_y()).trace().real(), (m * pauli_z()).trace().real()};
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  // Difference of two unit-trace Hermitian 2x2 matrices is traceless, so its
  // eigenvalues are +-|dS|/2 and the trace distance is |dS|/2.
  const StokesVector sa = rho_to_stokes(a);
  const StokesVector sb = rho_to_stokes(b);
  return 0.5 * StokesVector{sa.x - sb.x, sa.y - sb.y, sa.z - sb.z}.norm();
}

double unitarity_error(const Matrix2& u) {
  return (u.adjoint() * u - Matrix2::Identity()).cwiseAbs().maxCoeff();
}

bool equal_up_to_phase(const Matrix2& a, const Matrix2& b, double tol) {
  // Align the phase on the largest entry of b.
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(a(r, c)) < 1e-15) return (a - b).norm() <= tol;
  const Complex phase = b(r, c) / a(r, c);
  return (a * (phase / std::abs(phase)) - b).norm() <= tol;
}

Matrix2 su2_rotation(double theta_x, double theta_y, double theta_z) {
  const double angle = std::sqrt(theta_x * theta_x + theta_y * theta_y + theta_z * theta_z);
  if (angle == 0.0) return Matrix2::Identity();
  const Matrix2 n_sigma = (theta_x * pauli_x() + theta_y * pauli_y() + theta_z * pauli_z()) / angle;
  return std::cos(angle / 2.0) * Matrix2::Identity() - kI * std::sin(angle / 2.0) * n_sigma;
}

}  // namespace qtele
