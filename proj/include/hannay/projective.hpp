#pragma once

// Finite-truncation projective geometry: the Fubini-Study distance, the
// Aharonov-Anandan connection A_psi(X) = i Im<psi|X>, horizontality, and
// discrete holonomy of closed chains of rays.

#include <span>
#include <vector>

#include "hannay/koopman.hpp"
#include "hannay/types.hpp"

namespace hannay {

using AmplitudeVector = std::vector<Complex>;

/// <a|b> = sum conj(a_i) b_i.
Complex inner(const AmplitudeVector& a, const AmplitudeVector& b);

/// A point of P(H), held through a unit-norm representative.
class Ray {
 public:
  /// Normalizes `amplitudes`; the zero vector is rejected.
  static Ray from_amplitudes(AmplitudeVector amplitudes);

  const AmplitudeVector& representative() const noexcept { return v_; }
  std::size_t size() const noexcept { return v_.size(); }

  /// Same ray, representative multiplied by exp(i phase).
  Ray rephased(double phase) const;

 private:
  explicit Ray(AmplitudeVector v) : v_(std::move(v)) {}
  AmplitudeVector v_;
};

/// arccos |<psi|phi>| in [0, pi/2].
double fs_distance(const Ray& psi, const Ray& phi);

/// i Im<psi|X>; psi must have unit norm to 1e-12.
Complex aa_connection_value(const AmplitudeVector& psi, const AmplitudeVector& tangent);

/// max_k |<psi_k | (psi_{k+1} - psi_{k-1}) / (2 dt)>| over interior samples.
double horizontality_defect(std::span<const AmplitudeVector> samples, double dt);

/// Closed chain psi_0 ... psi_{K-1}, closed by psi_K := psi_0.
class StateLoop {
 public:
  explicit StateLoop(std::vector<Ray> rays);

  const std::vector<Ray>& rays() const noexcept { return rays_; }
  std::size_t size() const noexcept { return rays_.size(); }
  StateLoop reversed() const;

 private:
  std::vector<Ray> rays_;
};

/// arg prod_k <psi_k|psi_{k+1}> in (-pi, pi]. The product's argument is
/// accumulated as an exact sum of per-link arguments, so re-ordering the
/// links (loop reversal) negates the result bit for bit.
double discrete_holonomy(const StateLoop& loop);

/// Dense amplitude vector of a Fourier state in mode order over its support.
Ray to_ray(const FourierState& state);

/// Samples psi(t_k) = U_{t_k} psi, t_k = k T / K, k = 0 .. K-1.
StateLoop sample_evolution(const FourierState& initial, const RealVector& omega, double period,
                           std::size_t steps);

struct AAPhaseResult {
  double beta = 0.0;             // geometric phase in (-pi, pi]
  double total_phase = 0.0;      // arg <psi(0)|psi(T)>
  double dynamical_phase = 0.0;  // <H> T
  double closure_distance = 0.0; // fs_distance(psi(0), psi(T))
  double bargmann_phase = 0.0;   // discrete_holonomy of the K sampled rays
};

inline constexpr double kDefaultClosureTolerance = 1e-9;

/// beta = arg<psi(0)|psi(T)> - <H> T for the Koopman evolution, reduced to
/// (-pi, pi]. With U_t = exp(+iHt) this is the holonomy of the horizontal
/// lift; the Bargmann product of the sampled curve approximates -beta.
AAPhaseResult aa_phase_from_evolution(const FourierState& initial, const RealVector& omega,
                                      double period, std::size_t steps,
                                      double closure_tolerance = kDefaultClosureTolerance);

}  // namespace hannay
