#pragma once

// Parametrized integrable Hamiltonian families and their action-angle charts.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "hannay/types.hpp"

namespace hannay {

struct ActionAngle {
  double action = 0.0;
  double angle = 0.0;
};

/// A family H_x of integrable systems over a parameter manifold P in R^m,
/// seen through a global action-angle chart on each fibre.
///
/// Everything the holonomy constructions need is expressed through
/// `transport_angles`: given a phase-space point by its chart coordinates at
/// one parameter value, return its angles in the chart of another.
class IntegrableFamily {
 public:
  virtual ~IntegrableFamily() = default;

  virtual std::string name() const = 0;
  virtual std::size_t torus_dim() const = 0;
  virtual std::size_t param_dim() const = 0;

  /// Empty when x is admissible, otherwise the violated condition.
  virtual std::optional<std::string> admissibility_violation(const ParamPoint& x) const = 0;
  void require_admissible(const ParamPoint& x) const;
  bool admissible(const ParamPoint& x) const { return !admissibility_violation(x).has_value(); }

  /// H(I; x).
  virtual double energy(const RealVector& actions, const ParamPoint& x) const = 0;

  /// dH/dI when the family knows it in closed form.
  virtual std::optional<RealVector> analytic_frequency(const RealVector& actions,
                                                       const ParamPoint& x) const;

  /// d(Omega)/dI when the family knows it in closed form.
  virtual std::optional<RealMatrix> analytic_frequency_jacobian(const RealVector& actions,
                                                                const ParamPoint& x) const;

  /// Angles, in the chart at `to`, of the phase-space point whose coordinates
  /// in the chart at `from` are (actions, angles). Not wrapped.
  virtual RealVector transport_angles(const RealVector& actions, const RealVector& angles,
                                      const ParamPoint& from, const ParamPoint& to) const = 0;

  /// dPhi_i/dx_j at a fixed phase-space point (n x m), for families that
  /// supply it instead of canonical coordinates.
  virtual std::optional<RealMatrix> chart_deformation(const RealVector& actions,
                                                      const RealVector& angles,
                                                      const ParamPoint& x) const;

  /// Identifier of the angle-origin convention.
  virtual std::string gauge_tag() const = 0;
};

/// One-degree-of-freedom family given in canonical coordinates together with
/// its action-angle chart.
class CanonicalFamily1D : public IntegrableFamily {
 public:
  std::size_t torus_dim() const override { return 1; }

  virtual double hamiltonian(PhasePoint y, const ParamPoint& x) const = 0;
  virtual ActionAngle to_action_angle(PhasePoint y, const ParamPoint& x) const = 0;
  virtual PhasePoint from_action_angle(ActionAngle aa, const ParamPoint& x) const = 0;

  double energy(const RealVector& actions, const ParamPoint& x) const override;
  RealVector transport_angles(const RealVector& actions, const RealVector& angles,
                              const ParamPoint& from, const ParamPoint& to) const override;
};

/// H(q, p; X, Y, Z) = (X q^2 + 2 Y q p + Z p^2) / 2 on the admissible
/// component Z > 0, XZ - Y^2 > 0.
///
/// Chart: with omega = sqrt(XZ - Y^2), the normal form
///   Q = sqrt(omega/Z) q,  P = Y/sqrt(omega Z) q + sqrt(Z/omega) p
/// is canonical, H = omega (Q^2 + P^2)/2, and I = (Q^2 + P^2)/2,
/// Phi = atan2(-P, Q) so that Phi advances at +omega under the flow.
class GeneralizedOscillator final : public CanonicalFamily1D {
 public:
  struct NormalForm {
    double omega;
    double q_scale;      // sqrt(omega/Z)
    double shear;        // Y/sqrt(omega Z)
    double p_scale;      // sqrt(Z/omega)
  };

  std::string name() const override { return "generalized-oscillator"; }
  std::size_t param_dim() const override { return 3; }
  std::optional<std::string> admissibility_violation(const ParamPoint& x) const override;
  std::string gauge_tag() const override { return "atan2(-P,Q)"; }

  /// sqrt(XZ - Y^2); throws a domain error naming the violated inequality.
  double frequency(const ParamPoint& x) const;
  NormalForm normal_form(const ParamPoint& x) const;

  double hamiltonian(PhasePoint y, const ParamPoint& x) const override;
  ActionAngle to_action_angle(PhasePoint y, const ParamPoint& x) const override;
  PhasePoint from_action_angle(ActionAngle aa, const ParamPoint& x) const override;

  /// Exact flow of the frozen Hamiltonian H_x for time t.
  PhasePoint rotate(PhasePoint y, const ParamPoint& x, double t) const;

  std::optional<RealVector> analytic_frequency(const RealVector& actions,
                                               const ParamPoint& x) const override;
  std::optional<RealMatrix> analytic_frequency_jacobian(const RealVector& actions,
                                                        const ParamPoint& x) const override;
};

/// Free-function spellings of the oscillator chart.
double oscillator_frequency(const ParamPoint& x);
ActionAngle aa_forward(double q, double p, const ParamPoint& x);
PhasePoint aa_inverse(double action, double angle, const ParamPoint& x);

/// A family given directly in action-angle form: H(I; x) plus the chart
/// deformation dPhi/dx at a fixed phase-space point. Transport between charts
/// integrates the deformation along the straight parameter segment.
class AbstractIntegrableFamily final : public IntegrableFamily {
 public:
  using EnergyFn = std::function<double(const RealVector&, const ParamPoint&)>;
  using GradientFn = std::function<RealVector(const RealVector&, const ParamPoint&)>;
  using HessianFn = std::function<RealMatrix(const RealVector&, const ParamPoint&)>;
  using DeformationFn =
      std::function<RealMatrix(const RealVector&, const RealVector&, const ParamPoint&)>;
  using AdmissibleFn = std::function<std::optional<std::string>(const ParamPoint&)>;
  using TransportFn = std::function<RealVector(const RealVector&, const RealVector&, const ParamPoint&,
                                               const ParamPoint&)>;

  struct Definition {
    std::string name = "abstract";
    std::size_t torus_dim = 1;
    std::size_t param_dim = 1;
    EnergyFn energy;
    DeformationFn deformation;
    GradientFn gradient;   // optional
    HessianFn hessian;     // optional
    AdmissibleFn admissible;  // optional; default accepts every finite point
    TransportFn transport;    // optional closed form; otherwise RK4 along the segment
    int transport_substeps = 8;
  };

  explicit AbstractIntegrableFamily(Definition def);

  std::string name() const override { return def_.name; }
  std::size_t torus_dim() const override { return def_.torus_dim; }
  std::size_t param_dim() const override { return def_.param_dim; }
  std::optional<std::string> admissibility_violation(const ParamPoint& x) const override;
  std::string gauge_tag() const override { return "user-supplied"; }

  double energy(const RealVector& actions, const ParamPoint& x) const override;
  std::optional<RealVector> analytic_frequency(const RealVector& actions,
                                               const ParamPoint& x) const override;
  std::optional<RealMatrix> analytic_frequency_jacobian(const RealVector& actions,
                                                        const ParamPoint& x) const override;
  RealVector transport_angles(const RealVector& actions, const RealVector& angles,
                              const ParamPoint& from, const ParamPoint& to) const override;
  std::optional<RealMatrix> chart_deformation(const RealVector& actions, const RealVector& angles,
                                              const ParamPoint& x) const override;

 private:
  Definition def_;
};

/// H = omega I + beta I^2 / 2 with an x-independent chart (one parameter,
/// unused by the Hamiltonian).
std::shared_ptr<AbstractIntegrableFamily> make_anharmonic_family(double omega, double beta,
                                                                  bool analytic_derivatives = true);

/// n-torus rotor whose charts differ by Moebius maps of each circle factor:
///   e^{i Phi_i} = (e^{i t_i} - w_i) / (1 - conj(w_i) e^{i t_i}),  w_i = kappa_i (x_1 + i x_2),
/// where t labels a fixed phase-space point. Energy H = omega . I + beta |I|^2 / 2.
/// The deformation is dPhi_i/dx_j = 2 Im(d_j conj(w_i) (e^{i Phi_i} + w_i)) / (1 - |w_i|^2),
/// admissible for kappa_i |x| < 1.
std::shared_ptr<AbstractIntegrableFamily> make_mobius_rotor_family(RealVector omega, double beta,
                                                                   RealVector kappa);

/// Single-valued regauging Phi -> Phi + g(x) of another family's chart.
class RegaugedFamily final : public IntegrableFamily {
 public:
  using GaugeFn = std::function<RealVector(const ParamPoint&)>;
  using GaugeGradientFn = std::function<RealMatrix(const ParamPoint&)>;

  RegaugedFamily(std::shared_ptr<const IntegrableFamily> base, GaugeFn gauge,
                 GaugeGradientFn gauge_gradient = {});

  std::string name() const override { return base_->name() + "+regauge"; }
  std::size_t torus_dim() const override { return base_->torus_dim(); }
  std::size_t param_dim() const override { return base_->param_dim(); }
  std::optional<std::string> admissibility_violation(const ParamPoint& x) const override {
    return base_->admissibility_violation(x);
  }
  std::string gauge_tag() const override { return base_->gauge_tag() + "+g(x)"; }

  double energy(const RealVector& actions, const ParamPoint& x) const override {
    return base_->energy(actions, x);
  }
  std::optional<RealVector> analytic_frequency(const RealVector& actions,
                                               const ParamPoint& x) const override {
    return base_->analytic_frequency(actions, x);
  }
  std::optional<RealMatrix> analytic_frequency_jacobian(const RealVector& actions,
                                                        const ParamPoint& x) const override {
    return base_->analytic_frequency_jacobian(actions, x);
  }
  RealVector transport_angles(const RealVector& actions, const RealVector& angles,
                              const ParamPoint& from, const ParamPoint& to) const override;
  std::optional<RealMatrix> chart_deformation(const RealVector& actions, const RealVector& angles,
                                              const ParamPoint& x) const override;

 private:
  std::shared_ptr<const IntegrableFamily> base_;
  GaugeFn gauge_;
  GaugeGradientFn gauge_gradient_;
};

inline constexpr double kDefaultActionStep = 1e-5;
inline constexpr double kDefaultDegeneracyTolerance = 1e-9;

enum class DerivativeMethod { automatic, finite_difference };

/// Omega(I; x) = dH/dI: closed form when available, else central differences.
RealVector frequency(const IntegrableFamily& family, const RealVector& actions, const ParamPoint& x,
                     double action_step = kDefaultActionStep,
                     DerivativeMethod method = DerivativeMethod::automatic);

struct NondegeneracyResult {
  double determinant = 0.0;
  bool degenerate = true;
};

/// det dOmega/dI, flagged degenerate below `tolerance`. Never gates anything.
NondegeneracyResult nondegeneracy(const IntegrableFamily& family, const RealVector& actions,
                                  const ParamPoint& x, double action_step = kDefaultActionStep,
                                  double tolerance = kDefaultDegeneracyTolerance,
                                  DerivativeMethod method = DerivativeMethod::automatic);

using ParametricEnergy = std::function<double(PhasePoint, const ParamPoint&)>;

/// I = (1/2pi) \oint p dq over the closed level curve H = E around the origin.
/// The curve is found radially, r(alpha), and the enclosed area
/// (1/2) \int r^2 d alpha is integrated by the periodic trapezoid rule on
/// `order` nodes.
double numeric_action(double energy, const ParamPoint& x, const ParametricEnergy& hamiltonian,
                      std::size_t order);

}  // namespace hannay
