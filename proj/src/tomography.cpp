#include "qtele/tomography.hpp"

#include <cmath>
#include <string>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

double axis_ratio(double plus, double minus, char axis) {
  const double sum = plus + minus;
  if (!(sum > 0.0))
    throw UndefinedAxisError(axis, std::string("no counts in the ") + axis + " basis pair; Stokes parameter undefined");
  return (plus - minus) / sum;
}

StokesVector stokes_from_values(const std::array<double, 6>& c) {
  const auto at = [&](Basis b) { return c[static_cast<std::size_t>(b)]; };
  return {axis_ratio(at(Basis::D), at(Basis::A), 'x'), axis_ratio(at(Basis::R), at(Basis::L), 'y'),
          axis_ratio(at(Basis::H), at(Basis::V), 'z')};
}

}  // namespace

std::uint64_t BasisCounts::total() const {
  std::uint64_t s = 0;
  for (auto v : c) s += v;
  return s;
}

const std::array<std::pair<Basis, WaveplateSetting>, 6>& projection_schedule() {
  static const std::array<std::pair<Basis, WaveplateSetting>, 6> table = {{
      {Basis::H, {0.0, 0.0}},
      {Basis::V, {0.0, 45.0}},
      {Basis::D, {45.0, 22.5}},
      {Basis::A, {45.0, 67.5}},
      {Basis::R, {45.0, 0.0}},
      {Basis::L, {0.0, 22.5}},
  }};
  return table;
}

WaveplateSetting setting_for(Basis b) {
  for (const auto& [basis, s] : projection_schedule())
    if (basis == b) return s;
  throw DomainError("no analyzer setting for basis");
}

const std::vector<std::pair<Basis, Basis>>& target_map() {
  static const std::vector<std::pair<Basis, Basis>> map = {
      {Basis::H, Basis::V},
      {Basis::D, Basis::A},
      {Basis::R, Basis::R},
  };
  return map;
}

Basis teleport_target(Basis input) {
  for (const auto& [in, out] : target_map())
    if (in == input) return out;
  throw DomainError("no teleportation target for input " + std::string(basis_name(input)));
}

StokesVector stokes_from_counts(const BasisCounts& c) {
  std::array<double, 6> v;
  for (std::size_t i = 0; i < 6; ++i) v[i] = static_cast<double>(c.c[i]);
  return stokes_from_values(v);
}

TomographyResult reconstruct(const BasisCounts& c) {
  TomographyResult r;
  r.counts = c;
  r.stokes = stokes_from_counts(c);
  r.rho = stokes_to_rho(r.stokes);
  const double n = r.stokes.norm();
  r.physicality_flag = n > 1.0;
  r.nearest_physical = r.physicality_flag ? stokes_to_rho({r.stokes.x / n, r.stokes.y / n, r.stokes.z / n}) : r.rho;
  return r;
}

FidelityEstimate fidelity_with_mc(const BasisCounts& c, const PolarizationState& target, int trials, Rng& rng) {
  if (trials < 1) throw DomainError("Monte Carlo needs at least one trial");
  FidelityEstimate est;
  est.fidelity = fidelity(stokes_to_rho(stokes_from_counts(c)), target);

  double mean = 0.0, m2 = 0.0;
  int n = 0;
  std::array<double, 6> draw;
  for (int t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < 6; ++i) draw[i] = static_cast<double>(poisson(rng, static_cast<double>(c.c[i])));
    double f;
    try {
      f = fidelity(stokes_to_rho(stokes_from_values(draw)), target);
    } catch (const UndefinedAxisError&) {
      ++est.degenerate_trials;
      continue;
    }
    ++n;
    const double d = f - mean;
    mean += d / n;
    m2 += d * (f - mean);
  }
  est.sigma = n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0;
  return est;
}

TeleportEvaluation evaluate_teleport_run(const RunCounts& run, int trials, Rng& rng) {
  if (run.empty()) throw IncompleteRunError("no input states were acquired");
  TeleportEvaluation ev;
  double var = 0.0;
  for (const auto& [input, settings] : run) {
    BasisCounts counts;
    for (Basis b : kAllBases) {
      const auto it = settings.find(b);
      if (it == settings.end())
        throw IncompleteRunError("input " + std::string(basis_name(input)) + " is missing the " +
                                 std::string(basis_name(b)) + " analyzer acquisition");
      counts[b] = it->second;
    }
    StateEvaluation s{input, teleport_target(input), reconstruct(counts)};
    const FidelityEstimate f = fidelity_with_mc(counts, PolarizationState::named(s.target), trials, rng);
    s.result.fidelity = f.fidelity;
    s.result.fidelity_sigma = f.sigma;
    ev.average_fidelity += f.fidelity;
    var += f.sigma * f.sigma;
    ev.states.push_back(std::move(s));
  }
  const double n = static_cast<double>(ev.states.size());
  ev.average_fidelity /= n;
  ev.average_sigma = std::sqrt(var) / n;
  ev.beats_classical_bound = ev.average_fidelity > kClassicalBound;
  return ev;
}

BasisCounts born_counts(const DensityMatrix& rho, double n_per_pair) {
  BasisCounts c;
  for (Basis b : kAllBases) c[b] = static_cast<std::uint64_t>(std::llround(n_per_pair * project(rho, PolarizationState::named(b))));
  return c;
}

}  // namespace qtele
