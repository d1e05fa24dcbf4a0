#include <doctest.h>

#include <cmath>
#include <random>

#include "hannay/projective.hpp"
#include "support.hpp"

using namespace hannay;

namespace {

AmplitudeVector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  AmplitudeVector v(n);
  for (auto& c : v) c = Complex(g(rng), g(rng));
  return v;
}

Ray random_ray(std::mt19937_64& rng, std::size_t n) { return Ray::from_amplitudes(random_vector(rng, n)); }

RealVector vec1(double x) {
  RealVector v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("fubini-study distance") {
  const auto psi = Ray::from_amplitudes({1.0, 0.0});
  const auto phi = Ray::from_amplitudes({0.0, 1.0});
  CHECK(fs_distance(psi, psi.rephased(1.234)) == doctest::Approx(0.0));
  CHECK(fs_distance(psi, phi) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(fs_distance(psi, Ray::from_amplitudes({1.0, 1.0})) == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK_ERROR_KIND(Ray::from_amplitudes({0.0, 0.0}), ErrorKind::normalization);

  std::mt19937_64 rng(41);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_ray(rng, 3), b = random_ray(rng, 3), c = random_ray(rng, 3);
    CHECK(fs_distance(a, b) == fs_distance(b, a));
    CHECK(fs_distance(a, c) <= fs_distance(a, b) + fs_distance(b, c) + 1e-12);
  }
}

TEST_CASE("aharonov-anandan connection") {
  std::mt19937_64 rng(42);
  const auto psi = random_ray(rng, 4).representative();
  AmplitudeVector ipsi(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) ipsi[i] = Complex(0, 1) * psi[i];
  CHECK(std::abs(aa_connection_value(psi, ipsi) - Complex(0, 1)) < 1e-15);
  AmplitudeVector real_overlap = psi;  // <psi|psi> = 1
  CHECK(std::abs(aa_connection_value(psi, real_overlap)) < 1e-15);
  for (int k = 0; k < 20; ++k) {
    const auto X = random_vector(rng, 4), Y = random_vector(rng, 4);
    AmplitudeVector S(4);
    for (int i = 0; i < 4; ++i) S[i] = X[i] + Y[i];
    CHECK(std::abs(aa_connection_value(psi, S) - aa_connection_value(psi, X) -
                   aa_connection_value(psi, Y)) < 1e-14);
  }
  CHECK_ERROR_KIND(aa_connection_value({2.0, 0.0}, {1.0, 0.0}), ErrorKind::normalization);
}

TEST_CASE("horizontality defect") {
  const double dt = 1e-3, rate = 1.6;
  std::vector<AmplitudeVector> moving, horizontal, still;
  const AmplitudeVector base{Complex(0.6, 0), Complex(0, 0.8)};
  for (int k = 0; k < 50; ++k) {
    const Complex u = std::polar(1.0, rate * k * dt);
    moving.push_back({u * base[0], u * base[1]});
    horizontal.push_back(base);
    still.push_back(base);
  }
  CHECK(std::fabs(horizontality_defect(moving, dt) - 1.6) < 1e-5);
  CHECK(horizontality_defect(horizontal, dt) < 1e-6);
  CHECK(horizontality_defect(still, dt) == 0.0);
  CHECK_ERROR_KIND(horizontality_defect(std::vector<AmplitudeVector>(2, base), dt), ErrorKind::input);
}

TEST_CASE("discrete holonomy") {
  const double r = 1 / std::sqrt(2.0);
  const StateLoop chain({Ray::from_amplitudes({1.0, 0.0}), Ray::from_amplitudes({r, r}),
                         Ray::from_amplitudes({Complex(r), Complex(0, r)})});
  CHECK(std::fabs(discrete_holonomy(chain) - kPi / 4) < 1e-12);
  CHECK(discrete_holonomy(chain.reversed()) == -discrete_holonomy(chain));

  const auto p = Ray::from_amplitudes({0.3, Complex(0.1, 0.2)});
  CHECK(discrete_holonomy(StateLoop({p, p, p})) == 0.0);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  std::vector<Ray> rays, rephased;
  for (int k = 0; k < 7; ++k) {
    rays.push_back(random_ray(rng, 3));
    rephased.push_back(rays.back().rephased(ph(rng)));
  }
  const StateLoop a(rays), b(rephased);
  CHECK(std::fabs(wrap_angle(discrete_holonomy(a) - discrete_holonomy(b))) < 1e-14);
  CHECK(discrete_holonomy(a.reversed()) == -discrete_holonomy(a));

  CHECK_ERROR_KIND(discrete_holonomy(StateLoop({Ray::from_amplitudes({1.0, 0.0}),
                                                Ray::from_amplitudes({0.0, 1.0})})),
                   ErrorKind::degenerate_chain);
}

TEST_CASE("geometric phase of the koopman evolution") {
  const RealVector w = vec1(1.3);
  const auto eig = FourierState::basis(ModeVector({2}), 2);
  const auto r0 = aa_phase_from_evolution(eig, w, kTwoPi / (2 * 1.3), 256);
  CHECK(std::fabs(r0.beta) < 1e-12);

  // Two modes, |c2|^2 = 1/4: analytically beta = -2 pi |c2|^2 = -pi/2.
  FourierState two(1, 3);
  two.set(ModeVector({1}), std::sqrt(0.75));
  two.set(ModeVector({3}), Complex(0, 0.5));
  const double T = kTwoPi / ((3 - 1) * 1.3);
  const auto r = aa_phase_from_evolution(two, w, T, 10000);
  CHECK(std::fabs(wrap_angle(r.beta + kPi / 2)) < 1e-6);
  // The Bargmann product of the sampled rays runs with the opposite sign.
  CHECK(std::fabs(wrap_angle(r.bargmann_phase + r.beta)) < 1e-6);
  CHECK(r.closure_distance < 1e-9);

  CHECK_ERROR_KIND(aa_phase_from_evolution(two, w, 0.5 * T, 100), ErrorKind::not_a_loop);
}

TEST_CASE("sampled holonomy refines with order at least one") {
  FourierState two(1, 2);
  two.set(ModeVector({0}), 0.8);
  two.set(ModeVector({2}), 0.6);
  const RealVector w = vec1(1.0);
  const double T = kPi;
  const double exact = -aa_phase_from_evolution(two, w, T, 1).beta;
  double previous = 1.0;
  std::vector<double> errs;
  for (std::size_t K : {16, 32, 64, 128}) {
    const double e = std::fabs(wrap_angle(discrete_holonomy(sample_evolution(two, w, T, K)) - exact));
    CHECK(e < previous);
    previous = e;
    errs.push_back(e);
  }
  CHECK(std::log2(errs[0] / errs[3]) / 3.0 >= 1.0);
}
