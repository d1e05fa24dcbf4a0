#include "hannay/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hannay/errors.hpp"
#include "hannay/parallel.hpp"

namespace hannay {

namespace {

struct Trajectory {
  double final_action = 0.0;
  double angle_gain = 0.0;  // unwrapped Phi(final) - Phi_0
  double dynamical = 0.0;
  double sup_drift = 0.0;
};

Trajectory drive(const GeneralizedOscillator& osc, double mu, double phi0, const ParamLoop& loop,
                 double epsilon, std::size_t steps) {
  const double period = 1.0 / epsilon;
  const double dt = period / static_cast<double>(steps);
  const ParamPoint start = loop.at(0.0);
  PhasePoint y = osc.from_action_angle({mu, phi0}, start);

  Trajectory tr;
  double previous = phi0;
  ExactSum gain, dynamical;
  for (std::size_t j = 0; j < steps; ++j) {
    const double s_mid = (static_cast<double>(j) + 0.5) / static_cast<double>(steps);
    const double s_end = static_cast<double>(j + 1) / static_cast<double>(steps);
    const ParamPoint x_mid = loop.at(s_mid);
    const ParamPoint x_end = loop.at(std::min(1.0, s_end));
    if (auto v = osc.admissibility_violation(x_mid)) {
      fail(ErrorKind::oracle_domain, "driven parameter " + x_mid.to_string() +
                                         " leaves the chart domain: " + *v);
    }
    y = osc.rotate(y, x_mid, dt);
    dynamical.add(osc.frequency(x_mid) * dt);
    const ActionAngle aa = osc.to_action_angle(y, x_end);
    gain.add(wrap_angle(aa.angle - previous));
    previous = aa.angle;
    tr.sup_drift = std::max(tr.sup_drift, std::fabs(aa.action - mu));
    tr.final_action = aa.action;
  }
  tr.angle_gain = gain.value();
  tr.dynamical = dynamical.value();
  return tr;
}

}  // namespace

AdiabaticOracleResult adiabatic_hannay_oracle(const GeneralizedOscillator& family, double mu,
                                              const ParamLoop& loop,
                                              const AdiabaticOptions& options) {
  const auto& eps = options.epsilons;
  if (eps.size() < 2) fail(ErrorKind::oracle_domain, "the oracle needs at least two slowness values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) {
      fail(ErrorKind::oracle_domain, "slowness values must be positive and finite");
    }
    if (i > 0 && !(eps[i] < eps[i - 1])) {
      fail(ErrorKind::oracle_domain, "slowness values must be strictly decreasing");
    }
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) fail(ErrorKind::oracle_domain, "action must be positive");
  if (!(options.substep > 0.0)) fail(ErrorKind::oracle_domain, "substep must be positive");
  if (options.phase_samples < 1) fail(ErrorKind::oracle_domain, "need at least one initial phase");
  if (loop.dim() != family.param_dim()) {
    fail(ErrorKind::oracle_domain, "loop dimension does not match the oscillator parameters");
  }
  for (const auto& x : loop.base_nodes(64)) {
    if (auto v = family.admissibility_violation(x)) {
      fail(ErrorKind::oracle_domain, "loop point " + x.to_string() + " is not admissible: " + *v);
    }
  }

  const std::size_t P = options.phase_samples;
  const std::size_t E = eps.size();
  std::vector<Trajectory> grid(E * P);
  std::vector<std::size_t> steps(E);
  for (std::size_t e = 0; e < E; ++e) {
    steps[e] = static_cast<std::size_t>(std::ceil((1.0 / eps[e]) / options.substep));
  }
  detail::parallel_for(E * P, options.workers, [&](std::size_t job) {
    const std::size_t e = job / P, k = job % P;
    const double phi0 = kTwoPi * static_cast<double>(k) / static_cast<double>(P);
    grid[job] = drive(family, mu, phi0, loop, eps[e], steps[e]);
  });

  AdiabaticOracleResult out;
  out.phase_samples = P;
  out.substep = options.substep;
  for (std::size_t e = 0; e < E; ++e) {
    AdiabaticRun run;
    run.epsilon = eps[e];
    run.initial_action = mu;
    run.steps = steps[e];
    double sq = 0.0;
    for (std::size_t k = 0; k < P; ++k) {
      const auto& tr = grid[e * P + k];
      run.final_action += tr.final_action;
      run.final_angle_unwrapped += tr.angle_gain;
      run.dynamical_angle += tr.dynamical;
      run.theta += tr.angle_gain - tr.dynamical;
      run.sup_drift += tr.sup_drift;
      sq += (tr.final_action - mu) * (tr.final_action - mu);
    }
    const double n = static_cast<double>(P);
    run.final_action /= n;
    run.final_angle_unwrapped /= n;
    run.dynamical_angle /= n;
    run.theta /= n;
    run.sup_drift /= n;
    run.endpoint_drift = std::sqrt(sq / n);
    out.runs.push_back(run);
  }

  const auto& a = out.runs[E - 2];
  const auto& b = out.runs[E - 1];
  const double r = a.epsilon / b.epsilon;
  out.theta_oracle = (r * b.theta - a.theta) / (r - 1.0);

  for (std::size_t e = 0; e + 1 < E; ++e) {
    out.endpoint_drift_ratios.push_back(out.runs[e].endpoint_drift / out.runs[e + 1].endpoint_drift);
    out.sup_drift_ratios.push_back(out.runs[e].sup_drift / out.runs[e + 1].sup_drift);
  }
  for (std::size_t e = 0; e + 2 < E; ++e) {
    out.difference_ratios.push_back(std::fabs(out.runs[e].theta - out.runs[e + 1].theta) /
                                    std::fabs(out.runs[e + 1].theta - out.runs[e + 2].theta));
  }
  return out;
}

std::optional<double> fitted_order(const std::vector<double>& resolutions,
                                   const std::vector<double>& errors, double floor) {
  if (resolutions.size() != errors.size()) fail(ErrorKind::input, "resolutions and errors differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > floor && resolutions[i] > 0.0) {
      lx.push_back(std::log(resolutions[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return -sxy / sxx;
}

ConvergenceResult convergence_sweep(const std::function<double(double)>& computation,
                                    const std::vector<double>& resolutions,
                                    std::optional<double> reference) {
  if (resolutions.size() < 3) fail(ErrorKind::input, "a convergence sweep needs at least 3 resolutions");
  ConvergenceResult out;
  out.resolutions = resolutions;
  for (double r : resolutions) out.values.push_back(computation(r));
  out.reference = reference ? *reference : out.values.back();
  const std::size_t used = reference ? resolutions.size() : resolutions.size() - 1;
  std::vector<double> res(resolutions.begin(), resolutions.begin() + static_cast<long>(used));
  for (std::size_t i = 0; i < used; ++i) out.errors.push_back(std::fabs(out.values[i] - out.reference));

  out.exact = std::all_of(out.errors.begin(), out.errors.end(), [](double e) { return e == 0.0; });
  if (out.exact) return out;
  for (std::size_t i = 0; i < used; ++i) {
    if (out.errors[i] <= kExactFloor) out.spectral = true;
  }
  if (auto order = fitted_order(res, out.errors)) {
    out.order = *order;
  } else {
    // Fewer than two errors above the floor: the scheme hit rounding at once.
    out.spectral = true;
    out.order = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace hannay
