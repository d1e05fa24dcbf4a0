#pragma once

// Classical flows, Liouville-measure checks, resonance bookkeeping,
// fibrewise Hamiltonian fields and torus averages.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hannay/errors.hpp"
#include "hannay/families.hpp"
#include "hannay/types.hpp"

namespace hannay {

enum class Scheme { exact_oscillator, leapfrog };

Scheme parse_scheme(std::string_view name);
const char* to_string(Scheme scheme) noexcept;

/// H(q, p) = T(p) + V(q), the form leapfrog can split.
struct SeparableHamiltonian {
  std::function<double(double)> kinetic;
  std::function<double(double)> kinetic_slope;
  std::function<double(double)> potential;
  std::function<double(double)> potential_slope;

  double operator()(PhasePoint y) const { return kinetic(y.p) + potential(y.q); }
};

/// p^2/2 + q^4/4.
SeparableHamiltonian quartic_oscillator();

struct FlowSpec {
  Scheme scheme = Scheme::exact_oscillator;
  ParamPoint x;   // oscillator parameters for the exact scheme
  double dt = 1e-3;
  std::shared_ptr<const SeparableHamiltonian> system;  // leapfrog only
};

/// T_t applied to `point`. The exact scheme rotates in the oscillator's normal
/// form; leapfrog uses kick-drift-kick with ceil(|t|/dt) equal steps.
PhasePoint flow(PhasePoint point, const FlowSpec& setup, double t);

// --- Liouville measure ------------------------------------------------------

struct Observable {
  std::string name;
  std::function<double(PhasePoint)> value;
};

/// Built-in observables: "q", "p", "q2+p2", "indicator(q>0)".
Observable named_observable(std::string_view name);

struct DiskRegion {
  double q0 = 0.0, p0 = 0.0, radius = 1.0;
};
struct BoxRegion {
  double q_lo = -1.0, q_hi = 1.0, p_lo = -1.0, p_hi = 1.0;
};
/// {H <= level} sampled by rejection from `bounds`; flow-invariant when H is
/// the flow's own Hamiltonian.
struct SublevelRegion {
  std::function<double(PhasePoint)> energy;
  double level = 1.0;
  BoxRegion bounds;
};
using SamplingRegion = std::variant<DiskRegion, BoxRegion, SublevelRegion>;

struct DriftEntry {
  std::string name;
  double mean_pre = 0.0;
  double mean_post = 0.0;
  double drift = 0.0;      // mean over samples of f(T_t y) - f(y)
  double std_error = 0.0;  // standard error of that mean
  bool pass = false;
};

struct DriftReport {
  std::vector<DriftEntry> entries;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 0;
  double sigma_threshold = 3.0;
  std::string substreams;  // description of the seed derivation
  bool all_pass() const;
};

inline constexpr std::size_t kLiouvilleChunk = 4096;

/// Samples N points uniformly (Liouville measure in canonical coordinates),
/// evolves each by t, and compares observable means. Sampling is split into
/// fixed chunks with their own seed-derived stream, so the report does not
/// depend on `workers`.
DriftReport liouville_drift(const FlowSpec& setup, double t, std::size_t samples,
                            std::span<const Observable> observables, const SamplingRegion& region,
                            std::uint64_t seed, unsigned workers = 1);

/// Seed of chunk `index`: splitmix64(seed + index * 0x9E3779B97F4A7C15).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// --- Resonances ---------------------------------------------------------------

struct ResonanceResult {
  bool resonant = false;
  std::vector<int> witness;  // empty when nonresonant
  int max_order = 0;
};

/// Searches 0 < |k|_inf <= max_order for |k . Omega| < tol. Candidates are
/// visited shell by shell in |k|_inf, lexicographically within a shell, and
/// only with the first nonzero entry positive (k and -k are the same relation).
ResonanceResult resonance_classify(const RealVector& omega, int max_order, double tol);

// --- Fibrewise Hamiltonian vector field --------------------------------------

struct TangentVector {
  double dq = 0.0;
  double dp = 0.0;
};

/// Components (a, b) of the one-form a dq + b dp.
struct OneForm1D {
  double dq = 0.0;
  double dp = 0.0;
};

struct FibreFunction {
  std::function<double(PhasePoint, const ParamPoint&)> value;
  /// Optional (df/dq, df/dp) at fixed x.
  std::function<OneForm1D(PhasePoint, const ParamPoint&)> gradient;
};

/// X_f with i_{X_f}(dq ^ dp) = d_M f, i.e. (df/dp, -df/dq) at fixed x.
TangentVector fibrewise_hamiltonian_field(const FibreFunction& f, PhasePoint point,
                                          const ParamPoint& x, double step = 1e-6);

/// i_X (dq ^ dp) = -X^p dq + X^q dp.
OneForm1D contract_symplectic(TangentVector v) noexcept;

// --- Torus averages ------------------------------------------------------------

inline constexpr double kMaxTorusNodes = 16777216.0;  // 2^24

/// Tensor-product trapezoid average over [0, 2pi)^n with Q^n nodes: the
/// normalized Haar average for the torus acting on itself.
template <class Sampler>
auto torus_average(Sampler&& sampler, std::size_t n, std::size_t order)
    -> decltype(sampler(std::declval<const RealVector&>())) {
  using Value = decltype(sampler(std::declval<const RealVector&>()));
  if (order < 4) fail(ErrorKind::domain, "torus quadrature order must be at least 4");
  if (n == 0) fail(ErrorKind::domain, "torus dimension must be positive");
  if (static_cast<double>(n) * std::log(static_cast<double>(order)) > std::log(kMaxTorusNodes)) {
    fail(ErrorKind::resource, "torus grid of " + std::to_string(order) + "^" + std::to_string(n) +
                                  " nodes exceeds the node budget");
  }
  std::vector<std::size_t> index(n, 0);
  RealVector phi = RealVector::Zero(static_cast<Eigen::Index>(n));
  const double h = kTwoPi / static_cast<double>(order);
  Value sum{};
  std::size_t count = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) phi(static_cast<Eigen::Index>(i)) = h * index[i];
    sum += sampler(static_cast<const RealVector&>(phi));
    ++count;
    std::size_t d = 0;
    while (d < n && ++index[d] == order) index[d++] = 0;
    if (d == n) break;
  }
  return sum / static_cast<double>(count);
}

}  // namespace hannay
