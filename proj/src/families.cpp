#include "hannay/families.hpp"

#include <cmath>
#include <limits>

#include "hannay/errors.hpp"

namespace hannay {

void IntegrableFamily::require_admissible(const ParamPoint& x) const {
  if (auto violation = admissibility_violation(x)) {
    fail(ErrorKind::domain, name() + " at x = " + x.to_string() + ": " + *violation);
  }
}

std::optional<RealVector> IntegrableFamily::analytic_frequency(const RealVector&,
                                                               const ParamPoint&) const {
  return std::nullopt;
}

std::optional<RealMatrix> IntegrableFamily::analytic_frequency_jacobian(const RealVector&,
                                                                        const ParamPoint&) const {
  return std::nullopt;
}

std::optional<RealMatrix> IntegrableFamily::chart_deformation(const RealVector&, const RealVector&,
                                                              const ParamPoint&) const {
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double CanonicalFamily1D::energy(const RealVector& actions, const ParamPoint& x) const {
  if (actions.size() != 1) fail(ErrorKind::shape, "one-degree-of-freedom family needs one action");
  return hamiltonian(from_action_angle({actions(0), 0.0}, x), x);
}

RealVector CanonicalFamily1D::transport_angles(const RealVector& actions, const RealVector& angles,
                                               const ParamPoint& from,
                                               const ParamPoint& to) const {
  if (actions.size() != 1 || angles.size() != 1) {
    fail(ErrorKind::shape, "one-degree-of-freedom family needs one action and one angle");
  }
  const PhasePoint y = from_action_angle({actions(0), angles(0)}, from);
  RealVector out(1);
  out(0) = to_action_angle(y, to).angle;
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::string> GeneralizedOscillator::admissibility_violation(
    const ParamPoint& x) const {
  if (x.size() != 3) return "expected parameters (X, Y, Z)";
  const double X = x[0], Y = x[1], Z = x[2];
  if (!(Z > 0.0)) return "Z > 0 violated";
  if (!(X * Z - Y * Y > 0.0)) return "XZ - Y^2 > 0 violated";
  return std::nullopt;
}

double GeneralizedOscillator::frequency(const ParamPoint& x) const {
  require_admissible(x);
  return std::sqrt(x[0] * x[2] - x[1] * x[1]);
}

GeneralizedOscillator::NormalForm GeneralizedOscillator::normal_form(const ParamPoint& x) const {
  const double omega = frequency(x);
  const double Y = x[1], Z = x[2];
  return {omega, std::sqrt(omega / Z), Y / std::sqrt(omega * Z), std::sqrt(Z / omega)};
}

double GeneralizedOscillator::hamiltonian(PhasePoint y, const ParamPoint& x) const {
  require_admissible(x);
  return 0.5 * (x[0] * y.q * y.q + 2.0 * x[1] * y.q * y.p + x[2] * y.p * y.p);
}

ActionAngle GeneralizedOscillator::to_action_angle(PhasePoint y, const ParamPoint& x) const {
  if (y.q == 0.0 && y.p == 0.0) {
    fail(ErrorKind::singular_point, "(q, p) = (0, 0) has action 0 and no angle");
  }
  const NormalForm nf = normal_form(x);
  const double Q = nf.q_scale * y.q;
  const double P = nf.shear * y.q + nf.p_scale * y.p;
  return {0.5 * (Q * Q + P * P), wrap_positive(std::atan2(-P, Q))};
}

PhasePoint GeneralizedOscillator::from_action_angle(ActionAngle aa, const ParamPoint& x) const {
  if (!(aa.action > 0.0)) fail(ErrorKind::domain, "action must be positive");
  const NormalForm nf = normal_form(x);
  const double r = std::sqrt(2.0 * aa.action);
  const double Q = r * std::cos(aa.angle);
  const double P = -r * std::sin(aa.angle);
  const double q = Q / nf.q_scale;
  return {q, (P - nf.shear * q) / nf.p_scale};
}

PhasePoint GeneralizedOscillator::rotate(PhasePoint y, const ParamPoint& x, double t) const {
  const NormalForm nf = normal_form(x);
  const double Q = nf.q_scale * y.q;
  const double P = nf.shear * y.q + nf.p_scale * y.p;
  const double c = std::cos(nf.omega * t), s = std::sin(nf.omega * t);
  // Hamilton's equations Q' = omega P, P' = -omega Q.
  const double Qt = Q * c + P * s;
  const double Pt = -Q * s + P * c;
  const double q = Qt / nf.q_scale;
  return {q, (Pt - nf.shear * q) / nf.p_scale};
}

std::optional<RealVector> GeneralizedOscillator::analytic_frequency(const RealVector&,
                                                                    const ParamPoint& x) const {
  RealVector omega(1);
  omega(0) = frequency(x);
  return omega;
}

std::optional<RealMatrix> GeneralizedOscillator::analytic_frequency_jacobian(
    const RealVector&, const ParamPoint& x) const {
  require_admissible(x);
  return RealMatrix::Zero(1, 1);
}

double oscillator_frequency(const ParamPoint& x) { return GeneralizedOscillator{}.frequency(x); }

ActionAngle aa_forward(double q, double p, const ParamPoint& x) {
  return GeneralizedOscillator{}.to_action_angle({q, p}, x);
}

PhasePoint aa_inverse(double action, double angle, const ParamPoint& x) {
  return GeneralizedOscillator{}.from_action_angle({action, angle}, x);
}

// ---------------------------------------------------------------------------

AbstractIntegrableFamily::AbstractIntegrableFamily(Definition def) : def_(std::move(def)) {
  if (!def_.energy) fail(ErrorKind::configuration, "abstract family needs an energy function");
  if (!def_.deformation) {
    fail(ErrorKind::configuration, "abstract family needs a chart deformation");
  }
  if (def_.torus_dim == 0 || def_.param_dim == 0) {
    fail(ErrorKind::configuration, "abstract family needs positive dimensions");
  }
  if (def_.transport_substeps < 1) def_.transport_substeps = 1;
}

std::optional<std::string> AbstractIntegrableFamily::admissibility_violation(
    const ParamPoint& x) const {
  if (x.size() != def_.param_dim) {
    return "expected " + std::to_string(def_.param_dim) + " parameters";
  }
  if (def_.admissible) return def_.admissible(x);
  return std::nullopt;
}

double AbstractIntegrableFamily::energy(const RealVector& actions, const ParamPoint& x) const {
  if (static_cast<std::size_t>(actions.size()) != def_.torus_dim) {
    fail(ErrorKind::shape, "action tuple has the wrong dimension");
  }
  return def_.energy(actions, x);
}

std::optional<RealVector> AbstractIntegrableFamily::analytic_frequency(
    const RealVector& actions, const ParamPoint& x) const {
  if (!def_.gradient) return std::nullopt;
  return def_.gradient(actions, x);
}

std::optional<RealMatrix> AbstractIntegrableFamily::analytic_frequency_jacobian(
    const RealVector& actions, const ParamPoint& x) const {
  if (!def_.hessian) return std::nullopt;
  return def_.hessian(actions, x);
}

std::optional<RealMatrix> AbstractIntegrableFamily::chart_deformation(
    const RealVector& actions, const RealVector& angles, const ParamPoint& x) const {
  return def_.deformation(actions, angles, x);
}

RealVector AbstractIntegrableFamily::transport_angles(const RealVector& actions,
                                                      const RealVector& angles,
                                                      const ParamPoint& from,
                                                      const ParamPoint& to) const {
  if (static_cast<std::size_t>(angles.size()) != def_.torus_dim) {
    fail(ErrorKind::shape, "angle tuple has the wrong dimension");
  }
  if (from == to) return angles;
  if (def_.transport) return def_.transport(actions, angles, from, to);
  const RealVector dx = to - from;
  auto rhs = [&](double lambda, const RealVector& phi) -> RealVector {
    const ParamPoint x(RealVector(from.coords() + lambda * dx));
    return def_.deformation(actions, phi, x) * dx;
  };
  // Classical RK4 in the segment parameter lambda in [0, 1].
  const int n = def_.transport_substeps;
  const double h = 1.0 / n;
  RealVector phi = angles;
  for (int k = 0; k < n; ++k) {
    const double l = k * h;
    const RealVector k1 = rhs(l, phi);
    const RealVector k2 = rhs(l + 0.5 * h, phi + 0.5 * h * k1);
    const RealVector k3 = rhs(l + 0.5 * h, phi + 0.5 * h * k2);
    const RealVector k4 = rhs(l + h, phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

std::shared_ptr<AbstractIntegrableFamily> make_anharmonic_family(double omega, double beta,
                                                                  bool analytic_derivatives) {
  AbstractIntegrableFamily::Definition def;
  def.name = "anharmonic";
  def.torus_dim = 1;
  def.param_dim = 1;
  def.energy = [omega, beta](const RealVector& I, const ParamPoint&) {
    return omega * I(0) + 0.5 * beta * I(0) * I(0);
  };
  def.deformation = [](const RealVector&, const RealVector&, const ParamPoint&) {
    return RealMatrix::Zero(1, 1).eval();
  };
  if (analytic_derivatives) {
    def.gradient = [omega, beta](const RealVector& I, const ParamPoint&) {
      RealVector g(1);
      g(0) = omega + beta * I(0);
      return g;
    };
    def.hessian = [beta](const RealVector&, const ParamPoint&) {
      RealMatrix h(1, 1);
      h(0, 0) = beta;
      return h;
    };
  }
  return std::make_shared<AbstractIntegrableFamily>(std::move(def));
}

std::shared_ptr<AbstractIntegrableFamily> make_mobius_rotor_family(RealVector omega, double beta,
                                                                   RealVector kappa) {
  if (omega.size() == 0 || omega.size() != kappa.size()) {
    fail(ErrorKind::configuration, "rotor needs matching, nonempty omega and kappa");
  }
  const auto n = static_cast<std::size_t>(omega.size());
  AbstractIntegrableFamily::Definition def;
  def.name = "mobius-rotor";
  def.torus_dim = n;
  def.param_dim = 2;
  def.energy = [omega, beta](const RealVector& I, const ParamPoint&) {
    return omega.dot(I) + 0.5 * beta * I.squaredNorm();
  };
  def.gradient = [omega, beta](const RealVector& I, const ParamPoint&) {
    return RealVector(omega + beta * I);
  };
  def.hessian = [beta, n](const RealVector&, const ParamPoint&) {
    return RealMatrix(beta * RealMatrix::Identity(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n)));
  };
  def.deformation = [kappa](const RealVector&, const RealVector& phi, const ParamPoint& x) {
    RealMatrix d(phi.size(), 2);
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      const Complex w = kappa(i) * Complex(x[0], x[1]);
      const Complex u = std::polar(1.0, phi(i));
      const double denom = 1.0 - std::norm(w);
      const Complex dwbar[2] = {Complex(kappa(i), 0.0), Complex(0.0, -kappa(i))};
      for (int j = 0; j < 2; ++j) d(i, j) = 2.0 * std::imag(dwbar[j] * (u + w)) / denom;
    }
    return d;
  };
  def.transport = [kappa](const RealVector&, const RealVector& phi, const ParamPoint& from,
                          const ParamPoint& to) {
    RealVector out(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      const Complex wa = kappa(i) * Complex(from[0], from[1]);
      const Complex wb = kappa(i) * Complex(to[0], to[1]);
      const Complex u = std::polar(1.0, phi(i));
      const Complex e = (u + wa) / (1.0 + std::conj(wa) * u);  // fixed-point label e^{i t}
      // Continuous branch: the chart change moves each angle by less than pi here.
      out(i) = phi(i) + wrap_angle(std::arg((e - wb) / (1.0 - std::conj(wb) * e)) - phi(i));
    }
    return out;
  };
  def.admissible = [kappa](const ParamPoint& x) -> std::optional<std::string> {
    const double r = std::hypot(x[0], x[1]);
    if (!(kappa.cwiseAbs().maxCoeff() * r < 1.0)) return "kappa |x| < 1 violated";
    return std::nullopt;
  };
  return std::make_shared<AbstractIntegrableFamily>(std::move(def));
}

// ---------------------------------------------------------------------------

RegaugedFamily::RegaugedFamily(std::shared_ptr<const IntegrableFamily> base, GaugeFn gauge,
                               GaugeGradientFn gauge_gradient)
    : base_(std::move(base)), gauge_(std::move(gauge)), gauge_gradient_(std::move(gauge_gradient)) {
  if (!base_ || !gauge_) fail(ErrorKind::configuration, "regauge needs a base family and a gauge");
}

RealVector RegaugedFamily::transport_angles(const RealVector& actions, const RealVector& angles,
                                            const ParamPoint& from, const ParamPoint& to) const {
  const RealVector base_angles = angles - gauge_(from);
  return base_->transport_angles(actions, base_angles, from, to) + gauge_(to);
}

std::optional<RealMatrix> RegaugedFamily::chart_deformation(const RealVector& actions,
                                                            const RealVector& angles,
                                                            const ParamPoint& x) const {
  if (!gauge_gradient_) return std::nullopt;
  auto base = base_->chart_deformation(actions, RealVector(angles - gauge_(x)), x);
  if (!base) return std::nullopt;
  return RealMatrix(*base + gauge_gradient_(x));
}

// ---------------------------------------------------------------------------

RealVector frequency(const IntegrableFamily& family, const RealVector& actions, const ParamPoint& x,
                     double action_step, DerivativeMethod method) {
  family.require_admissible(x);
  if (method == DerivativeMethod::automatic) {
    if (auto omega = family.analytic_frequency(actions, x)) return *omega;
  }
  RealVector omega(actions.size());
  for (Eigen::Index i = 0; i < actions.size(); ++i) {
    RealVector up = actions, down = actions;
    up(i) += action_step;
    down(i) -= action_step;
    omega(i) = (family.energy(up, x) - family.energy(down, x)) / (2.0 * action_step);
  }
  return omega;
}

NondegeneracyResult nondegeneracy(const IntegrableFamily& family, const RealVector& actions,
                                  const ParamPoint& x, double action_step, double tolerance,
                                  DerivativeMethod method) {
  RealMatrix jac;
  std::optional<RealMatrix> analytic;
  if (method == DerivativeMethod::automatic) {
    family.require_admissible(x);
    analytic = family.analytic_frequency_jacobian(actions, x);
  }
  if (analytic) {
    jac = *analytic;
  } else {
    const Eigen::Index n = actions.size();
    // Differencing a differenced frequency is a second difference: widen the
    // outer step to the eps^(1/4) scale so rounding stays small.
    const bool nested = method == DerivativeMethod::finite_difference ||
                        !family.analytic_frequency(actions, x);
    jac.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double h = action_step;
      if (nested) h = std::max(h, std::pow(std::numeric_limits<double>::epsilon(), 0.25) * std::max(1.0, std::fabs(actions(j))));
      RealVector up = actions, down = actions;
      up(j) += h;
      down(j) -= h;
      jac.col(j) = (frequency(family, up, x, action_step, method) -
                    frequency(family, down, x, action_step, method)) /
                   (2.0 * h);
    }
  }
  const double det = jac.determinant();
  return {det, std::fabs(det) < tolerance};
}

double numeric_action(double energy, const ParamPoint& x, const ParametricEnergy& hamiltonian,
                      std::size_t order) {
  if (order < 4) fail(ErrorKind::domain, "quadrature order must be at least 4");
  if (!(hamiltonian({0.0, 0.0}, x) < energy)) {
    fail(ErrorKind::level_set, "level set does not enclose the origin");
  }
  double sum_r2 = 0.0;
  for (std::size_t k = 0; k < order; ++k) {
    const double alpha = kTwoPi * static_cast<double>(k) / static_cast<double>(order);
    const double c = std::cos(alpha), s = std::sin(alpha);
    auto excess = [&](double r) { return hamiltonian({r * c, r * s}, x) - energy; };
    double lo = 0.0, hi = 1.0;
    int expansions = 0;
    while (!(excess(hi) > 0.0)) {
      lo = hi;
      hi *= 2.0;
      if (++expansions > 60) {
        fail(ErrorKind::level_set, "level set is open along direction alpha = " +
                                       std::to_string(alpha));
      }
    }
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    const double r = 0.5 * (lo + hi);
    sum_r2 += r * r;
  }
  // (1/2pi) * (1/2) * (2pi/order) * sum r^2
  return sum_r2 / (2.0 * static_cast<double>(order));
}

}  // namespace hannay
