#pragma once

// Single-qubit polarization algebra over the {|H>, |V>} basis.
//
// Conventions (fixed for the whole library):
//   |H> = (1, 0), |V> = (0, 1), S_z = +1 <-> |H>
//   |D> = (|H> + |V>)/sqrt2,  |A> = (|H> - |V>)/sqrt2
//   |R> = (|H> + i|V>)/sqrt2, |L> = (|H> - i|V>)/sqrt2   (R is the +1 eigenstate of sigma_y)
//   Retarder with fast axis at angle t from horizontal and retardance d:
//     J(t, d) = Rot(t) * diag(1, e^{i d}) * Rot(-t)
//   A measurement setting (qwp, hwp) applies U = J_hwp * J_qwp and then keeps
//   the H port of a PBS, i.e. projects onto U^dagger |H>.

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace qtele {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

// Structural invariants (normalization, hermiticity, trace) are held to this.
inline constexpr double kStructuralTol = 1e-12;

enum class Basis { H, V, D, A, R, L };

inline constexpr std::array<Basis, 6> kAllBases = {Basis::H, Basis::V, Basis::D,
                                                   Basis::A, Basis::R, Basis::L};

std::string_view basis_name(Basis b);
Basis basis_from_name(std::string_view name);

class DensityMatrix;

// A pure polarization qubit alpha|H> + beta|V>, normalized on construction.
class PolarizationState {
 public:
  PolarizationState() : PolarizationState(Complex(1.0), Complex(0.0)) {}
  // Throws DomainError for the zero vector.
  PolarizationState(Complex alpha, Complex beta);
  explicit PolarizationState(const Vector2& ket) : PolarizationState(ket(0), ket(1)) {}

  static PolarizationState named(Basis b);
  static PolarizationState H() { return named(Basis::H); }
  static PolarizationState V() { return named(Basis::V); }
  static PolarizationState D() { return named(Basis::D); }
  static PolarizationState A() { return named(Basis::A); }
  static PolarizationState R() { return named(Basis::R); }
  static PolarizationState L() { return named(Basis::L); }

  Complex alpha() const { return ket_(0); }
  Complex beta() const { return ket_(1); }
  const Vector2& ket() const { return ket_; }

  // Orthogonal partner (the other output of the same basis).
  PolarizationState orthogonal() const;
  PolarizationState transformed(const Matrix2& u) const { return PolarizationState(Vector2(u * ket_)); }
  DensityMatrix projector() const;

 private:
  Vector2 ket_;
};

struct StokesVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  bool is_physical(double tol = 1e-9) const { return norm() <= 1.0 + tol; }
};

// 2x2 Hermitian, unit-trace operator. Positivity is not enforced: linear
// tomographic inversion may legitimately produce a negative eigenvalue.
class DensityMatrix {
 public:
  DensityMatrix() : DensityMatrix(maximally_mixed()) {}
  // Throws DomainError if `m` is not Hermitian with unit trace (1e-9).
  explicit DensityMatrix(const Matrix2& m);

  static DensityMatrix maximally_mixed();
  static DensityMatrix pure(const PolarizationState& s) { return s.projector(); }

  const Matrix2& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  // Ascending eigenvalues.
  std::array<double, 2> eigenvalues() const;
  bool is_physical(double tol = 1e-9) const { return eigenvalues()[0] >= -tol; }
  double purity() const;

  DensityMatrix transformed(const Matrix2& u) const;
  // Convex combination w*this + (1-w)*other.
  DensityMatrix mixed_with(const DensityMatrix& other, double w) const;

 private:
  struct Unchecked {};
  DensityMatrix(const Matrix2& m, Unchecked) : m_(m) {}
  friend class PolarizationState;
  friend DensityMatrix stokes_to_rho(const StokesVector& s);

  Matrix2 m_;
};

struct WaveplateSetting {
  double qwp_deg = 0.0;
  double hwp_deg = 0.0;
};

const Matrix2& pauli_x();
const Matrix2& pauli_y();
const Matrix2& pauli_z();

// Retarder Jones matrix (see header comment for the convention).
Matrix2 retarder(double fast_axis_deg, double retardance_rad);
Matrix2 quarter_wave_plate(double fast_axis_deg);
Matrix2 half_wave_plate(double fast_axis_deg);

// U = U_HWP(hwp) * U_QWP(qwp).
Matrix2 waveplate_unitary(const WaveplateSetting& setting);

// The state selected by the H port of the PBS after `setting`: U^dagger |H>.
PolarizationState analyzer_state(const WaveplateSetting& setting);

// Born rule <axis|rho|axis>.
double project(const DensityMatrix& rho, const PolarizationState& axis);
double project(const PolarizationState& state, const PolarizationState& axis);

// <target|rho|target>; identical to project().
double fidelity(const DensityMatrix& rho, const PolarizationState& target);

DensityMatrix stokes_to_rho(const StokesVector& s);
StokesVector rho_to_stokes(const DensityMatrix& rho);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Max deviation of u^dagger u from identity.
double unitarity_error(const Matrix2& u);

// Equality of two operators up to a global phase, within tol (Frobenius).
bool equal_up_to_phase(const Matrix2& a, const Matrix2& b, double tol);

// exp(-i (theta . sigma) / 2).
Matrix2 su2_rotation(double theta_x, double theta_y, double theta_z);

}  // namespace qtele
