#include <doctest.h>

#include <cmath>
#include <random>

#include "hannay/families.hpp"
#include "support.hpp"

using namespace hannay;

namespace {

// Reference action of H = p^2/2 + q^4/4 at E = 1 and E = 1/2, and the frequency
// dH/dI at E = 1 (30-digit adaptive quadrature of (2/pi) int sqrt(2(E - q^4/4)) dq).
constexpr double kQuarticAction1 = 1.1128357888987642;
constexpr double kQuarticActionHalf = 0.66169611899403828;
constexpr double kQuarticFrequency1 = 1.1981402347355922;

double quartic(PhasePoint y, const ParamPoint&) { return 0.5 * y.p * y.p + 0.25 * std::pow(y.q, 4); }

const GeneralizedOscillator osc;

}  // namespace

TEST_CASE("oscillator frequency") {
  CHECK(oscillator_frequency({1, 0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(oscillator_frequency({4, 0, 1}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(oscillator_frequency({2, 1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("oscillator admissibility names the violated inequality") {
  CHECK(test::error_message([] { oscillator_frequency({1, 0, -1}); }).find("Z > 0") != std::string::npos);
  CHECK(test::error_message([] { oscillator_frequency({1, 2, 1}); }).find("XZ - Y^2 > 0") !=
        std::string::npos);
  CHECK_ERROR_KIND(oscillator_frequency({1, 1, 1}), ErrorKind::domain);
  CHECK(osc.admissible({2, 0.5, 1}));
  CHECK_FALSE(osc.admissible({0.2, 0.5, 1}));
}

TEST_CASE("action-angle chart values") {
  auto a = aa_forward(1, 0, {1, 0, 1});
  CHECK(a.action == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.angle == doctest::Approx(0.0));
  a = aa_forward(0, 1, {1, 0, 1});
  CHECK(a.action == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.angle == doctest::Approx(1.5 * kPi).epsilon(1e-15));
  const auto y = aa_inverse(0.5, 0.0, {1, 0, 1});
  CHECK(y.q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(y.p) < 1e-15);
  CHECK_ERROR_KIND(aa_forward(0, 0, {1, 0, 1}), ErrorKind::singular_point);
  CHECK_ERROR_KIND(aa_inverse(0.0, 1.0, {1, 0, 1}), ErrorKind::domain);
  CHECK_ERROR_KIND(aa_inverse(-1.0, 1.0, {1, 0, 1}), ErrorKind::domain);
}

TEST_CASE("chart round trip on random points") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const ParamPoint x = test::random_oscillator_point(rng);
    const double q = g(rng), p = g(rng);
    const auto aa = aa_forward(q, p, x);
    CHECK(aa.angle >= 0.0);
    CHECK(aa.angle < kTwoPi);
    const auto back = aa_inverse(aa.action, aa.angle, x);
    CHECK(std::fabs(back.q - q) < 1e-12);
    CHECK(std::fabs(back.p - p) < 1e-12);
  }
}

TEST_CASE("energy is omega I and constant on the torus") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 20; ++k) {
    const ParamPoint x = test::random_oscillator_point(rng);
    const double I = 0.3 + 0.1 * k, w = oscillator_frequency(x);
    const double h0 = osc.hamiltonian(aa_inverse(I, 0.0, x), x);
    for (int j = 0; j < 64; ++j) {
      const double h = osc.hamiltonian(aa_inverse(I, kTwoPi * j / 64.0, x), x);
      CHECK(std::fabs(h - w * I) < 1e-12 * std::max(1.0, w * I));
      CHECK(std::fabs(h - h0) < 1e-12 * std::max(1.0, h0));
    }
  }
}

TEST_CASE("chart is canonical") {
  // d(Phi) ^ d(I) = dq ^ dp, which is the orientation in which the angle
  // advances at +omega; det d(I, Phi)/d(q, p) is -1 in the same chart.
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  const double h = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ParamPoint x = test::random_oscillator_point(rng);
    const double q = g(rng), p = g(rng);
    if (q * q + p * p < 0.05) continue;
    auto f = [&](double a, double b) { return aa_forward(a, b, x); };
    auto dphi = [&](const ActionAngle& u, const ActionAngle& v) { return wrap_angle(u.angle - v.angle); };
    const auto qp = f(q + h, p), qm = f(q - h, p), pp = f(q, p + h), pm = f(q, p - h);
    const double dPhi_dq = dphi(qp, qm) / (2 * h), dPhi_dp = dphi(pp, pm) / (2 * h);
    const double dI_dq = (qp.action - qm.action) / (2 * h), dI_dp = (pp.action - pm.action) / (2 * h);
    const double det = dPhi_dq * dI_dp - dPhi_dp * dI_dq;
    worst = std::max(worst, std::fabs(det - 1.0));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("angle is smooth in x away from the branch cut") {
  const ParamPoint x{2.0, 0.3, 1.2};
  const double d = 1e-6;
  for (int j = 0; j < 3; ++j) {
    const auto a = aa_forward(0.7, -0.4, x);
    const auto b = aa_forward(0.7, -0.4, x.shifted(static_cast<std::size_t>(j), d));
    CHECK(std::fabs(wrap_angle(b.angle - a.angle)) < 10 * d);
  }
}

TEST_CASE("frequency matches the angle rate along an integrated trajectory") {
  // Independent RK4 integration of Hamilton's equations, unwrapping atan2 angles.
  const ParamPoint x{2.0, 0.5, 1.0};
  const double X = 2.0, Y = 0.5, Z = 1.0;
  const double w = oscillator_frequency(x);
  const double T = kTwoPi / w;
  const int N = 20000;
  const double dt = T / N;
  PhasePoint y = aa_inverse(0.8, 0.3, x);
  auto rhs = [&](PhasePoint s) { return PhasePoint{Y * s.q + Z * s.p, -(X * s.q + Y * s.p)}; };
  double unwrapped = 0.0, previous = aa_forward(y.q, y.p, x).angle;
  for (int k = 0; k < N; ++k) {
    const auto k1 = rhs(y);
    const auto k2 = rhs({y.q + 0.5 * dt * k1.q, y.p + 0.5 * dt * k1.p});
    const auto k3 = rhs({y.q + 0.5 * dt * k2.q, y.p + 0.5 * dt * k2.p});
    const auto k4 = rhs({y.q + dt * k3.q, y.p + dt * k3.p});
    y.q += dt / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q);
    y.p += dt / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    const double phi = aa_forward(y.q, y.p, x).angle;
    unwrapped += wrap_angle(phi - previous);
    previous = phi;
  }
  RealVector I(1);
  I << 0.8;
  CHECK(std::fabs(unwrapped / T - frequency(osc, I, x)(0)) < 1e-6);
}

TEST_CASE("frequency and nondegeneracy") {
  RealVector I(1);
  I << 2.0;
  CHECK(frequency(osc, I, {4, 0, 1})(0) == doctest::Approx(2.0).epsilon(1e-15));
  const auto anh = make_anharmonic_family(1.0, 0.3);
  const ParamPoint x0{0.0};
  CHECK(frequency(*anh, I, x0)(0) == doctest::Approx(1.6).epsilon(1e-15));
  const double fd = frequency(*anh, I, x0, 1e-5, DerivativeMethod::finite_difference)(0);
  CHECK(std::fabs(fd - 1.6) < 1e-8);
  const double fd_osc = frequency(osc, I, {4, 0, 1}, 1e-5, DerivativeMethod::finite_difference)(0);
  CHECK(std::fabs(fd_osc - 2.0) < 1e-8);

  const auto nd_osc = nondegeneracy(osc, I, {4, 0, 1});
  CHECK(nd_osc.determinant == 0.0);
  CHECK(nd_osc.degenerate);
  const auto nd = nondegeneracy(*anh, I, x0);
  CHECK(nd.determinant == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_FALSE(nd.degenerate);
  const auto nd_fd = nondegeneracy(*anh, I, x0, 1e-5, 1e-9, DerivativeMethod::finite_difference);
  CHECK(std::fabs(nd_fd.determinant - 0.3) < 1e-6);
  CHECK_FALSE(nd_fd.degenerate);
  const auto numeric_only = make_anharmonic_family(1.0, 0.3, false);
  CHECK(std::fabs(nondegeneracy(*numeric_only, I, x0).determinant - 0.3) < 1e-6);
}

TEST_CASE("numeric action") {
  auto h = [](PhasePoint y, const ParamPoint& x) { return osc.hamiltonian(y, x); };
  CHECK(numeric_action(0.5, {1, 0, 1}, h, 256) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(numeric_action(1.0, {4, 0, 1}, h, 256) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(numeric_action(1.0, {2, 0.7, 1.3}, h, 256) ==
        doctest::Approx(1.0 / oscillator_frequency({2, 0.7, 1.3})).epsilon(1e-12));
  CHECK(std::fabs(numeric_action(1.0, {0.0}, quartic, 512) - kQuarticAction1) < 1e-8);
  CHECK(std::fabs(numeric_action(0.5, {0.0}, quartic, 512) - kQuarticActionHalf) < 1e-8);
  const double dE = 1e-4;
  const double dIdE = (numeric_action(1 + dE, {0.0}, quartic, 512) -
                       numeric_action(1 - dE, {0.0}, quartic, 512)) / (2 * dE);
  CHECK(std::fabs(1.0 / dIdE - kQuarticFrequency1) < 1e-6);
  auto open = [](PhasePoint y, const ParamPoint&) { return y.q * y.q - y.p * y.p; };
  CHECK_ERROR_KIND(numeric_action(1.0, {0.0}, open, 64), ErrorKind::level_set);
  auto shifted = [](PhasePoint y, const ParamPoint&) { return (y.q - 5) * (y.q - 5) + y.p * y.p; };
  CHECK_ERROR_KIND(numeric_action(1.0, {0.0}, shifted, 64), ErrorKind::level_set);
}

TEST_CASE("abstract and regauged families") {
  RealVector omega(2), kappa(2);
  omega << 1.0, std::sqrt(2.0);
  kappa << 0.5, 0.25;
  const auto rotor = make_mobius_rotor_family(omega, 0.1, kappa);
  CHECK(rotor->torus_dim() == 2);
  CHECK(rotor->param_dim() == 2);
  CHECK_FALSE(rotor->admissible({2.5, 0.0}));
  RealVector I(2), phi(2);
  I << 1.0, 2.0;
  phi << 0.4, 5.9;
  // The transport reproduces the closed-form Moebius chart change.
  const ParamPoint a{0.3, -0.2}, b{-0.1, 0.6};
  const RealVector moved = rotor->transport_angles(I, phi, a, b);
  for (int i = 0; i < 2; ++i) {
    const double k = kappa(i);
    auto chart = [&](const ParamPoint& x) { return Complex(k * x[0], k * x[1]); };
    auto to_t = [&](double Phi, Complex w) {  // inverse Moebius
      const Complex e = std::polar(1.0, Phi);
      return std::arg((e + w) / (1.0 + std::conj(w) * e));
    };
    auto from_t = [&](double t, Complex w) {
      const Complex e = std::polar(1.0, t);
      return std::arg((e - w) / (1.0 - std::conj(w) * e));
    };
    const double expected = from_t(to_t(phi(i), chart(a)), chart(b));
    CHECK(std::fabs(wrap_angle(moved(i) - expected)) < 1e-9);
  }
  CHECK((rotor->transport_angles(I, phi, a, a).array() == phi.array()).all());
  // RK4 along the rotor's deformation field reproduces the closed-form transport.
  AbstractIntegrableFamily::Definition def;
  def.torus_dim = 2;
  def.param_dim = 2;
  def.energy = [](const RealVector& J, const ParamPoint&) { return J.sum(); };
  def.deformation = [rotor](const RealVector& J, const RealVector& p, const ParamPoint& x) {
    return *rotor->chart_deformation(J, p, x);
  };
  def.transport_substeps = 64;
  const AbstractIntegrableFamily integrated(def);
  CHECK((integrated.transport_angles(I, phi, a, b) - moved).cwiseAbs().maxCoeff() < 1e-9);

  auto base = std::make_shared<GeneralizedOscillator>();
  RegaugedFamily regauged(base, [](const ParamPoint& x) {
    RealVector g(1);
    g << std::sin(x[0]) * x[1];
    return g;
  });
  RealVector one(1), ang(1);
  one << 1.0;
  ang << 2.0;
  const ParamPoint p{2, 0.1, 1}, r{2.2, 0.3, 1};
  const double plain = base->transport_angles(one, ang - RealVector::Constant(1, std::sin(2.0) * 0.1), p, r)(0);
  CHECK(std::fabs(regauged.transport_angles(one, ang, p, r)(0) - (plain + std::sin(2.2) * 0.3)) < 1e-12);
}
