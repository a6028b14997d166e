#include "qtele/oracles.hpp"

#include <cmath>

namespace qtele::oracle {

namespace {

using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;
using Vector8c = Eigen::Matrix<Complex, 8, 1>;

Vector4c basis4(int i) {
  Vector4c v = Vector4c::Zero();
  v(i) = 1.0;
  return v;
}

}  // namespace

TeleportOracleResult teleport(const Vector2& input, double werner_p, double zeta) {
  const double s = 1.0 / std::sqrt(2.0);
  // Pair state on (idler, signal).
  const Vector4c phi = s * (basis4(0) + basis4(3));
  const Matrix4c pair = werner_p * phi * phi.adjoint() + (1.0 - werner_p) * 0.25 * Matrix4c::Identity();
  // Herald effect on (WCS, idler).
  const Vector4c psi_m = s * (basis4(1) - basis4(2));
  const Matrix4c effect = zeta * psi_m * psi_m.adjoint() +
                          0.5 * (1.0 - zeta) * (basis4(1) * basis4(1).adjoint() + basis4(2) * basis4(2).adjoint());

  const Vector2 in = input / input.norm();
  Matrix8 joint = Matrix8::Zero();
  for (int a = 0; a < 2; ++a)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int bc = 0; bc < 4; ++bc)
        for (int bc2 = 0; bc2 < 4; ++bc2) joint(4 * a + bc, 4 * a2 + bc2) = in(a) * std::conj(in(a2)) * pair(bc, bc2);

  Matrix8 op = Matrix8::Zero();  // effect ⊗ I on (a b) c
  for (int ab = 0; ab < 4; ++ab)
    for (int ab2 = 0; ab2 < 4; ++ab2)
      for (int c = 0; c < 2; ++c) op(2 * ab + c, 2 * ab2 + c) = effect(ab, ab2);

  const Matrix8 m = op * joint;
  Matrix2 out = Matrix2::Zero();
  for (int ab = 0; ab < 4; ++ab)
    for (int c = 0; c < 2; ++c)
      for (int c2 = 0; c2 < 2; ++c2) out(c, c2) += m(2 * ab + c, 2 * ab + c2);
  const double prob = out.trace().real();
  return {out / prob, prob};
}

std::vector<TimeTag> coincidences(const std::vector<TimeTag>& merged, const CoincidenceWindow& window) {
  const std::size_t fold = window.channels.size();
  std::vector<bool> used(merged.size(), false);
  std::vector<TimeTag> groups;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    std::size_t my_slot = fold;
    for (std::size_t s = 0; s < fold; ++s)
      if (window.channels[s] == merged[i].channel) my_slot = s;
    if (my_slot == fold) continue;
    std::vector<std::ptrdiff_t> pick(fold, -1);
    pick[my_slot] = static_cast<std::ptrdiff_t>(i);
    for (std::size_t j = 0; j < i; ++j) {
      if (used[j] || merged[j].t_ps < merged[i].t_ps - window.width_ps) continue;
      for (std::size_t s = 0; s < fold; ++s)
        if (s != my_slot && window.channels[s] == merged[j].channel && pick[s] < 0)
          pick[s] = static_cast<std::ptrdiff_t>(j);
    }
    bool complete = true;
    for (auto p : pick) complete = complete && p >= 0;
    if (!complete) continue;
    for (auto p : pick) {
      used[static_cast<std::size_t>(p)] = true;
      groups.push_back(merged[static_cast<std::size_t>(p)]);
    }
  }
  return groups;
}

double average_fidelity(double werner_p, double zeta) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  // (input, target) for H->V, D->A, R->R with R = (H + iV)/sqrt2.
  const std::vector<std::pair<Vector2, Vector2>> cases = {
      {Vector2(1.0, 0.0), Vector2(0.0, 1.0)},
      {Vector2(s, s), Vector2(s, -s)},
      {Vector2(s, s * i), Vector2(s, s * i)},
  };
  double sum = 0.0;
  for (const auto& [in, target] : cases) {
    const Matrix2 rho = teleport(in, werner_p, zeta).rho;
    sum += (target.adjoint() * rho * target)(0, 0).real();
  }
  return sum / 3.0;
}

}  // namespace qtele::oracle
