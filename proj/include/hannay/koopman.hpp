#pragma once

// The Koopman lift of an integrable flow restricted to an invariant torus:
// L^2(T^n, dPhi/(2pi)^n) with the Fourier basis |m> = exp(i m . Phi), on which
// U_t = exp(+i H t) acts diagonally with eigenphase exp(+i m . Omega t).

#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "hannay/families.hpp"
#include "hannay/types.hpp"

namespace hannay {

/// Integer mode vector m in Z^n.
class ModeVector {
 public:
  ModeVector() = default;
  explicit ModeVector(std::vector<int> entries) : entries_(std::move(entries)) {}
  ModeVector(std::initializer_list<int> entries) : entries_(entries) {}

  std::size_t size() const noexcept { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const noexcept { return entries_; }
  int max_abs() const noexcept;
  bool is_zero() const noexcept;
  ModeVector negated() const;

  /// m . v
  double dot(const RealVector& v) const;

  friend auto operator<=>(const ModeVector&, const ModeVector&) = default;

 private:
  std::vector<int> entries_;
};

/// Truncated element of L^2(T^n): sparse amplitudes on modes with
/// |m_i| <= n_max. Modes absent from the map have amplitude zero.
class FourierState {
 public:
  FourierState(std::size_t dim, int n_max);

  static FourierState basis(const ModeVector& m, int n_max);

  std::size_t dim() const noexcept { return dim_; }
  int n_max() const noexcept { return n_max_; }
  const std::map<ModeVector, Complex>& amplitudes() const noexcept { return amps_; }

  void set(const ModeVector& m, Complex amplitude);
  Complex amplitude(const ModeVector& m) const;

  double norm() const;
  FourierState normalized() const;

  /// psi(Phi) = sum_m c_m exp(i m . Phi)
  Complex evaluate(const RealVector& angles) const;

  /// <this | other>
  Complex inner(const FourierState& other) const;

  /// <H> = sum_m |c_m|^2 (m . Omega)
  double generator_expectation(const RealVector& omega) const;

  /// Largest |c_m - d_m| over the union of both supports.
  double max_abs_difference(const FourierState& other) const;

  /// l2 norm of the difference.
  double distance(const FourierState& other) const;

 private:
  void check_mode(const ModeVector& m) const;

  std::size_t dim_;
  int n_max_;
  std::map<ModeVector, Complex> amps_;
};

/// Unit-norm state with independent complex Gaussian amplitudes on every
/// mode of the truncation box.
FourierState random_state(std::size_t dim, int n_max, std::mt19937_64& rng);

struct KoopmanPropagator {
  RealVector omega;
  double t = 0.0;
};

/// c_m -> exp(i m . Omega t) c_m.
FourierState evolve(const FourierState& state, const KoopmanPropagator& prop);

/// Eigenvalue m . Omega of the generator on each |m>.
std::vector<double> generator_spectrum(const RealVector& omega, std::span<const ModeVector> modes);

/// (U_t psi)(Phi) = psi(Phi + Omega t) evaluated on a Q^n grid and projected
/// back onto the Fourier basis by the trapezoid rule. Refuses Q <= 2 n_max.
FourierState composition_apply(const FourierState& state, const RealVector& omega, double t,
                               std::size_t order);

/// Koopman lift bound to the frequencies Omega(mu; x) of one torus.
class KoopmanLift {
 public:
  explicit KoopmanLift(RealVector omega) : omega_(std::move(omega)) {}
  const RealVector& frequencies() const noexcept { return omega_; }
  KoopmanPropagator propagator(double t) const { return {omega_, t}; }

 private:
  RealVector omega_;
};

KoopmanLift koopman_from_family(const IntegrableFamily& family, const ParamPoint& x,
                                const RealVector& mu);

}  // namespace hannay
