#pragma once

// Hannay-Berry connection on the torus bundle E^mu over the parameter
// manifold, its holonomy (the Hannay angle), the Berry-Simon phase of the
// Koopman eigenstates |m, x>, and the relation between the two holonomies.

#include <optional>
#include <string>
#include <vector>

#include "hannay/families.hpp"
#include "hannay/koopman.hpp"
#include "hannay/loop.hpp"
#include "hannay/types.hpp"

namespace hannay {

/// Global sign convention of the Hannay angle, fixed against the adiabatic
/// slow-drive oracle on the oscillator circle loop.
inline constexpr int kHannayOrientation = +1;

struct HolonomyOptions {
  std::size_t segments = 256;     // K, per traversal
  std::size_t quadrature = 128;   // Q, nodes per torus axis
  double fd_step = 1e-5;          // delta x
  int max_halvings = 8;           // branch-cut retries of delta x
  unsigned workers = 1;
};

/// Local one-form of the Hannay-Berry connection at x:
/// A_ij = < dPhi_i/dx_j at fixed phase-space point >_torus.
struct HannayOneFormSample {
  ParamPoint x;
  RealMatrix A;  // n x m
  double step_used = 0.0;
};

HannayOneFormSample hannay_one_form(const IntegrableFamily& family, const RealVector& mu,
                                    const ParamPoint& x, std::size_t quadrature,
                                    double fd_step = 1e-5, int max_halvings = 8);

struct HannayAngle {
  RealVector raw;              // unwrapped sum of segment increments
  RealVector wrapped;          // per component in (-pi, pi]
  std::vector<long> winding;   // (raw - wrapped) / 2pi
};

/// theta = sigma * sum_k A(mid_k) . (x_{k+1} - x_k), midpoint rule on chords.
HannayAngle hannay_holonomy(const IntegrableFamily& family, const RealVector& mu,
                            const ParamLoop& loop, const HolonomyOptions& options = {});

/// <m, x1 | m, x2> = < exp(i m . (Phi_{x2}(y(phi)) - phi)) >_phi over the fibre
/// torus at x1, y(phi) the point with chart coordinates (mu, phi) at x1.
Complex berry_overlap(const ModeVector& m, const IntegrableFamily& family, const RealVector& mu,
                      const ParamPoint& x1, const ParamPoint& x2, std::size_t quadrature);

struct BerryPhase {
  double raw = 0.0;      // sum of link arguments
  double wrapped = 0.0;  // (-pi, pi]
};

/// beta = arg prod_k <m, x_k | m, x_{k+1}>.
BerryPhase berry_phase(const ModeVector& m, const IntegrableFamily& family, const RealVector& mu,
                       const ParamLoop& loop, const HolonomyOptions& options = {});

struct RelationRow {
  ModeVector mode;
  double s = 0.0;         // m . theta_raw, the argument of S
  double beta = 0.0;      // wrapped Berry phase
  double residual = 0.0;  // |wrap(beta - m . theta_raw)|
};

struct HolonomyReport {
  HannayAngle theta;
  std::vector<RelationRow> rows;
  std::size_t segments = 0;
  std::size_t quadrature = 0;
  double fd_step = 0.0;
  int orientation_sign = kHannayOrientation;
  double max_residual = 0.0;
  bool s_zero_from_zero_mode = false;      // beta_0 == 0 exactly
  bool s_zero_from_constant_loop = false;  // theta == 0 and beta_m == 0 exactly
};

HolonomyReport relation_report(const std::vector<ModeVector>& modes,
                               const IntegrableFamily& family, const RealVector& mu,
                               const ParamLoop& loop, const HolonomyOptions& options = {});

}  // namespace hannay
