#pragma once

// Brute-force references: slow-drive integration of the oscillator around a
// parameter loop, and convergence-order measurement.
//
// Nothing here reads the connection or overlap code; only the loop geometry
// is shared with holonomy.hpp.

#include <functional>
#include <optional>
#include <vector>

#include "hannay/families.hpp"
#include "hannay/loop.hpp"
#include "hannay/types.hpp"

namespace hannay {

struct AdiabaticOptions {
  std::vector<double> epsilons{1e-3, 5e-4};  // decreasing
  std::size_t phase_samples = 8;             // equidistributed Phi_0; 1 means Phi_0 = 0
  double substep = 5e-3;                     // physical-time step with x frozen at its midpoint
  unsigned workers = 1;
};

struct AdiabaticRun {
  double epsilon = 0.0;
  double initial_action = 0.0;
  double final_action = 0.0;          // Phi_0-averaged
  double final_angle_unwrapped = 0.0; // Phi_0-averaged, minus Phi_0
  double dynamical_angle = 0.0;       // int Omega dt
  double theta = 0.0;                 // geometric angle estimate
  double endpoint_drift = 0.0;        // rms over Phi_0 of |I(1/eps) - mu|
  double sup_drift = 0.0;             // mean over Phi_0 of max_t |I(t) - mu|
  std::size_t steps = 0;
};

struct AdiabaticOracleResult {
  std::vector<AdiabaticRun> runs;
  double theta_oracle = 0.0;             // Richardson on the two smallest epsilons
  std::vector<double> difference_ratios; // |th_k - th_{k+1}| / |th_{k+1} - th_{k+2}|
  std::vector<double> endpoint_drift_ratios;
  std::vector<double> sup_drift_ratios;
  std::size_t phase_samples = 0;
  double substep = 0.0;
};

/// theta(eps) = [unwrapped Phi(final) - Phi_0] - int_0^{1/eps} Omega(gamma(eps t)) dt
/// for x(t) = gamma(eps t), integrated with the exact rotation of H at the
/// substep midpoint parameter; extrapolated assuming a leading O(eps) error.
AdiabaticOracleResult adiabatic_hannay_oracle(const GeneralizedOscillator& family, double mu,
                                              const ParamLoop& loop,
                                              const AdiabaticOptions& options = {});

inline constexpr double kExactFloor = 1e-14;

struct ConvergenceResult {
  std::vector<double> resolutions;
  std::vector<double> values;
  std::vector<double> errors;  // |value - reference|, one per resolution
  double reference = 0.0;
  double order = 0.0;          // least-squares slope of -log(error) vs log(r)
  bool exact = false;          // every error is zero
  bool spectral = false;       // error fell below the floor before the last resolution
};

/// Least-squares order over the errors above `floor`; needs two such points.
std::optional<double> fitted_order(const std::vector<double>& resolutions,
                                   const std::vector<double>& errors,
                                   double floor = kExactFloor);

/// Runs `computation` at every resolution (>= 3). The reference is the value
/// at the last resolution unless one is supplied, in which case every
/// resolution gets an error.
ConvergenceResult convergence_sweep(const std::function<double(double)>& computation,
                                    const std::vector<double>& resolutions,
                                    std::optional<double> reference = std::nullopt);

}  // namespace hannay
