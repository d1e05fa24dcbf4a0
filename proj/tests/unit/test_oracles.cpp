#include <doctest.h>

#include <cmath>

#include "hannay/dynamics.hpp"
#include "hannay/holonomy.hpp"
#include "hannay/oracles.hpp"
#include "support.hpp"

using namespace hannay;

namespace {
constexpr double kStokesTheta = 0.07524993377909589;
constexpr double kBesselI0At1 = 1.2660658777520082;  // <exp(sin phi)> = I_0(1)

const GeneralizedOscillator osc;

ParamLoop standard_circle() { return ParamLoop::circle({2.0, 0.0, 1.0}, 0.5, 0, 1); }

AdiabaticOptions options(std::vector<double> eps) {
  AdiabaticOptions o;
  o.epsilons = std::move(eps);
  o.workers = 8;
  return o;
}
}  // namespace

TEST_CASE("oracle on the constant loop") {
  const auto r = adiabatic_hannay_oracle(osc, 1.0, ParamLoop::constant({2, 0.3, 1}), options({1e-2, 5e-3}));
  CHECK(std::fabs(r.theta_oracle) < 1e-6);
  for (const auto& run : r.runs) CHECK(run.sup_drift < 1e-12);
}

TEST_CASE("oracle on the standard circle") {
  const auto r = adiabatic_hannay_oracle(osc, 1.0, standard_circle(), options({2e-3, 1e-3, 5e-4}));
  CHECK(std::fabs(r.theta_oracle - kStokesTheta) < 1e-5);
  // Leading O(eps) error: successive differences halve.
  REQUIRE(r.difference_ratios.size() == 1);
  CHECK(r.difference_ratios[0] >= 1.5);
  CHECK(r.difference_ratios[0] <= 3.0);
  for (double q : r.sup_drift_ratios) CHECK(q == doctest::Approx(2.0).epsilon(0.15));

  const auto rev = adiabatic_hannay_oracle(osc, 1.0, standard_circle().reversed(), options({1e-3, 5e-4}));
  CHECK(std::fabs(rev.theta_oracle + r.theta_oracle) < 2e-3);

  HolonomyOptions h;
  h.segments = 512;
  h.quadrature = 256;
  h.workers = 4;
  CHECK(std::fabs(hannay_holonomy(osc, RealVector::Constant(1, 1.0), standard_circle(), h).raw(0) -
                  r.theta_oracle) < 1e-3);
}

TEST_CASE("oracle result does not depend on workers") {
  auto a = options({4e-3, 2e-3}), b = a;
  a.workers = 1;
  b.workers = 3;
  const auto ra = adiabatic_hannay_oracle(osc, 0.7, standard_circle(), a);
  const auto rb = adiabatic_hannay_oracle(osc, 0.7, standard_circle(), b);
  CHECK(ra.theta_oracle == rb.theta_oracle);
}

TEST_CASE("oracle input checks") {
  CHECK_ERROR_KIND(adiabatic_hannay_oracle(osc, 1.0, standard_circle(), options({1e-3})), ErrorKind::oracle_domain);
  CHECK_ERROR_KIND(adiabatic_hannay_oracle(osc, 1.0, standard_circle(), options({1e-3, 2e-3})),
                   ErrorKind::oracle_domain);
  CHECK_ERROR_KIND(adiabatic_hannay_oracle(osc, 1.0, ParamLoop::circle({1.0, 0.0, 1.0}, 1.5, 0, 1),
                                           options({1e-2, 5e-3})),
                   ErrorKind::oracle_domain);
}

TEST_CASE("convergence sweeps") {
  const auto spectral = convergence_sweep(
      [](double Q) {
        return torus_average([](const RealVector& p) { return std::exp(std::sin(p(0))); }, 1,
                             static_cast<std::size_t>(Q));
      },
      {4, 8, 16, 32}, kBesselI0At1);
  CHECK(spectral.spectral);
  CHECK(spectral.errors.back() < 1e-14);

  const auto flat = convergence_sweep([](double) { return 3.0; }, {1, 2, 4});
  CHECK(flat.exact);

  HolonomyOptions h;
  h.quadrature = 128;
  const auto th = convergence_sweep(
      [&](double K) {
        h.segments = static_cast<std::size_t>(K);
        return hannay_holonomy(osc, RealVector::Constant(1, 1.0), standard_circle(), h).raw(0);
      },
      {64, 128, 256, 512});
  CHECK(th.order >= 1.0);

  const auto order = fitted_order({1, 2, 4, 8}, {1, 0.25, 0.0625, 0.015625});
  REQUIRE(order.has_value());
  CHECK(*order == doctest::Approx(2.0));
  CHECK_ERROR_KIND(convergence_sweep([](double r) { return r; }, {1, 2}), ErrorKind::input);
}
