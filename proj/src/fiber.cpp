#include "qtele/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

// Gram-Schmidt on the columns; keeps long random-walk products on U(2).
Matrix2 reunitarize(const Matrix2& u) {
  Vector2 c0 = u.col(0);
  c0.normalize();
  Vector2 c1 = u.col(1) - c0 * c0.dot(u.col(1));
  c1.normalize();
  Matrix2 out;
  out << c0, c1;
  return out;
}

PolarizationState random_pure_state(Rng& rng) {
  // Uniform on the Bloch sphere.
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const double theta = std::acos(z);
  return {Complex(std::cos(theta / 2.0)), std::polar(std::sin(theta / 2.0), phi)};
}

}  // namespace

void FiberConfig::validate() const {
  if (!(length_km >= 0.0)) throw ConfigError("fiber.length_km", "must be non-negative");
  if (!(atten_db_per_km >= 0.0)) throw ConfigError("fiber.atten_db_per_km", "must be non-negative");
  if (!(excess_loss_db >= 0.0)) throw ConfigError("fiber.excess_loss_db", "must be non-negative");
  if (!(drift_rate >= 0.0)) throw ConfigError("fiber.drift_rate", "must be non-negative");
}

double CrosstalkConfig::effective_rate() const {
  return background_rate_ch3 * std::pow(10.0, -bandpass_suppression_db / 10.0);
}

void CrosstalkConfig::validate() const {
  if (!(background_rate_ch3 >= 0.0)) throw ConfigError("crosstalk.background_rate_ch3", "must be non-negative");
  if (!(bandpass_suppression_db >= 0.0))
    throw ConfigError("crosstalk.bandpass_suppression_db", "must be non-negative");
}

double transmission(const FiberConfig& cfg) { return std::pow(10.0, -cfg.total_loss_db() / 10.0); }

Matrix2 random_unitary(Rng& rng) {
  // Unit quaternion from four normals.
  std::normal_distribution<double> n(0.0, 1.0);
  double a = n(rng), b = n(rng), c = n(rng), d = n(rng);
  const double norm = std::sqrt(a * a + b * b + c * c + d * d);
  a /= norm, b /= norm, c /= norm, d /= norm;
  Matrix2 u;
  u << Complex(a, b), Complex(c, d), Complex(-c, d), Complex(a, -b);
  return u;
}

DriftState evolve_drift(const DriftState& state, double drift_rate, double dt_s, Rng& rng) {
  if (!(dt_s >= 0.0)) throw DomainError("drift time step must be non-negative");
  DriftState out = state;
  out.elapsed_s += dt_s;
  if (dt_s == 0.0 || drift_rate == 0.0) return out;
  std::normal_distribution<double> step(0.0, drift_rate * std::sqrt(dt_s));
  const double tx = step(rng), ty = step(rng), tz = step(rng);
  out.unitary = reunitarize(su2_rotation(tx, ty, tz) * state.unitary);
  return out;
}

std::vector<PolarizedPhoton> apply_channel(const std::vector<PolarizedPhoton>& events, const Matrix2& drift,
                                           double transmission, Rng& rng) {
  std::vector<PolarizedPhoton> out;
  if (transmission <= 0.0) return out;
  std::bernoulli_distribution keep(std::min(1.0, transmission));
  out.reserve(static_cast<std::size_t>(events.size() * std::min(1.0, transmission) * 1.1) + 8);
  for (const PolarizedPhoton& e : events) {
    if (keep(rng)) out.push_back({e.t_ps, e.polarization.transformed(drift)});
  }
  return out;
}

std::vector<PolarizedPhoton> inject_background(const std::vector<PolarizedPhoton>& events,
                                               const CrosstalkConfig& cfg, double duration_s, Rng& rng) {
  const double rate = cfg.effective_rate();
  if (rate <= 0.0 || duration_s <= 0.0) return events;
  std::vector<PolarizedPhoton> bg;
  std::exponential_distribution<double> gap(rate * 1e-12);
  const double end_ps = duration_s * 1e12;
  for (double t = gap(rng); t < end_ps; t += gap(rng))
    bg.push_back({static_cast<std::int64_t>(t), DensityMatrix::pure(random_pure_state(rng))});
  std::vector<PolarizedPhoton> out;
  out.reserve(events.size() + bg.size());
  std::merge(events.begin(), events.end(), bg.begin(), bg.end(), std::back_inserter(out),
             [](const PolarizedPhoton& a, const PolarizedPhoton& b) { return a.t_ps < b.t_ps; });
  return out;
}

double NoiselessProbe::pass_fraction(const PolarizationState& reference, const Matrix2& correction) {
  return project(reference.transformed(correction * channel_), reference);
}

double ShotNoiseProbe::pass_fraction(const PolarizationState& reference, const Matrix2& correction) {
  const double p = std::clamp(project(reference.transformed(correction * channel_), reference), 0.0, 1.0);
  std::binomial_distribution<std::uint64_t> shots(shots_, p);
  return static_cast<double>(shots(rng_)) / static_cast<double>(shots_);
}

CompensationResult compensate_polarization(PolarizationProbe& probe, const std::vector<PolarizationState>& references,
                                           const CompensationOptions& options, const Matrix2& start) {
  if (references.size() < 2) throw DomainError("compensation needs two reference states");
  if (project(references[0], references[1]) < 1e-6)
    throw DomainError("compensation references must be non-orthogonal");

  // Objective: summed infidelity; also tracks the worst single reference.
  struct Eval {
    double sum;
    double worst_fidelity;
  };
  const auto evaluate = [&](const Matrix2& u) {
    Eval e{0.0, 1.0};
    for (const PolarizationState& r : references) {
      const double f = probe.pass_fraction(r, u);
      e.sum += 1.0 - f;
      e.worst_fidelity = std::min(e.worst_fidelity, f);
    }
    return e;
  };

  CompensationResult res;
  res.correction = start;
  Eval best = evaluate(start);
  const double stop_sum = 1e-10;
  double step = options.initial_step_rad;
  while (best.sum > stop_sum && res.iterations < options.max_iters && step >= options.min_step_rad) {
    ++res.iterations;
    bool improved = false;
    for (int axis = 0; axis < 3; ++axis) {
      for (double sign : {1.0, -1.0}) {
        double th[3] = {0.0, 0.0, 0.0};
        th[axis] = sign * step;
        const Matrix2 cand = reunitarize(su2_rotation(th[0], th[1], th[2]) * res.correction);
        const Eval e = evaluate(cand);
        if (e.sum < best.sum) {
          best = e;
          res.correction = cand;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  res.worst_fidelity = best.worst_fidelity;
  if (best.worst_fidelity < options.required_fidelity)
    throw CompensationError("polarization compensation did not converge", 1.0 - best.worst_fidelity);
  return res;
}

}  // namespace qtele
