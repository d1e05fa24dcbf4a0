#include "hannay/projective.hpp"

#include <algorithm>
#include <cmath>

#include "hannay/errors.hpp"

namespace hannay {

namespace {
constexpr double kUnitTolerance = 1e-12;
constexpr double kMinOverlap = 1e-12;

double vector_norm(const AmplitudeVector& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}
}  // namespace

Complex inner(const AmplitudeVector& a, const AmplitudeVector& b) {
  if (a.size() != b.size()) fail(ErrorKind::shape, "vectors differ in length");
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

Ray Ray::from_amplitudes(AmplitudeVector amplitudes) {
  const double nrm = vector_norm(amplitudes);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    fail(ErrorKind::normalization, "a ray needs a nonzero finite representative");
  }
  for (auto& c : amplitudes) c /= nrm;
  return Ray(std::move(amplitudes));
}

Ray Ray::rephased(double phase) const {
  AmplitudeVector v = v_;
  const Complex u = std::polar(1.0, phase);
  for (auto& c : v) c *= u;
  return Ray(std::move(v));
}

double fs_distance(const Ray& psi, const Ray& phi) {
  const double overlap = std::abs(inner(psi.representative(), phi.representative()));
  return std::acos(std::min(1.0, overlap));
}

Complex aa_connection_value(const AmplitudeVector& psi, const AmplitudeVector& tangent) {
  if (std::fabs(vector_norm(psi) - 1.0) > kUnitTolerance) {
    fail(ErrorKind::normalization, "connection is evaluated at unit vectors only");
  }
  return {0.0, std::imag(inner(psi, tangent))};
}

double horizontality_defect(std::span<const AmplitudeVector> samples, double dt) {
  if (samples.size() < 3) fail(ErrorKind::input, "horizontality needs at least 3 samples");
  if (!(dt > 0.0)) fail(ErrorKind::input, "sample spacing must be positive");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
    const auto& prev = samples[k - 1];
    const auto& next = samples[k + 1];
    if (prev.size() != next.size()) fail(ErrorKind::shape, "samples differ in length");
    AmplitudeVector velocity(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) velocity[i] = (next[i] - prev[i]) / (2.0 * dt);
    worst = std::max(worst, std::abs(inner(samples[k], velocity)));
  }
  return worst;
}

StateLoop::StateLoop(std::vector<Ray> rays) : rays_(std::move(rays)) {
  if (rays_.empty()) fail(ErrorKind::input, "a loop needs at least one ray");
  for (const auto& r : rays_) {
    if (r.size() != rays_.front().size()) fail(ErrorKind::shape, "rays differ in dimension");
  }
}

StateLoop StateLoop::reversed() const {
  std::vector<Ray> rev;
  rev.reserve(rays_.size());
  rev.push_back(rays_.front());
  for (std::size_t k = rays_.size(); k-- > 1;) rev.push_back(rays_[k]);
  return StateLoop(std::move(rev));
}

double discrete_holonomy(const StateLoop& loop) {
  const auto& rays = loop.rays();
  const std::size_t K = rays.size();
  ExactSum phase;
  for (std::size_t k = 0; k < K; ++k) {
    const Complex overlap =
        inner(rays[k].representative(), rays[(k + 1) % K].representative());
    if (std::abs(overlap) < kMinOverlap) {
      fail(ErrorKind::degenerate_chain,
           "consecutive rays " + std::to_string(k) + " and " + std::to_string((k + 1) % K) +
               " are orthogonal");
    }
    phase.add(std::arg(overlap));
  }
  return wrap_angle(phase.value());
}

Ray to_ray(const FourierState& state) {
  AmplitudeVector v;
  v.reserve(state.amplitudes().size());
  for (const auto& [m, c] : state.amplitudes()) v.push_back(c);
  return Ray::from_amplitudes(std::move(v));
}

StateLoop sample_evolution(const FourierState& initial, const RealVector& omega, double period,
                           std::size_t steps) {
  if (steps < 1) fail(ErrorKind::input, "need at least one sample");
  std::vector<Ray> rays;
  rays.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = period * static_cast<double>(k) / static_cast<double>(steps);
    rays.push_back(to_ray(evolve(initial, {omega, t})));
  }
  return StateLoop(std::move(rays));
}

AAPhaseResult aa_phase_from_evolution(const FourierState& initial, const RealVector& omega,
                                      double period, std::size_t steps,
                                      double closure_tolerance) {
  const FourierState psi0 = initial.normalized();
  const FourierState psiT = evolve(psi0, {omega, period});
  AAPhaseResult r;
  r.closure_distance = fs_distance(to_ray(psi0), to_ray(psiT));
  if (!(r.closure_distance < closure_tolerance)) {
    fail(ErrorKind::not_a_loop, "evolved curve does not close in P(H) at T (distance " +
                                    std::to_string(r.closure_distance) + ")");
  }
  r.total_phase = std::arg(psi0.inner(psiT));
  r.dynamical_phase = psi0.generator_expectation(omega) * period;
  r.beta = wrap_angle(r.total_phase - r.dynamical_phase);
  if (steps >= 1) r.bargmann_phase = discrete_holonomy(sample_evolution(psi0, omega, period, steps));
  return r;
}

}  // namespace hannay
