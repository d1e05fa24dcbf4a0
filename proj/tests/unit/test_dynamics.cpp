#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "hannay/dynamics.hpp"
#include "support.hpp"

using namespace hannay;

namespace {

FlowSpec oscillator_flow(ParamPoint x) {
  FlowSpec s;
  s.scheme = Scheme::exact_oscillator;
  s.x = std::move(x);
  return s;
}

FlowSpec quartic_flow(double dt) {
  FlowSpec s;
  s.scheme = Scheme::leapfrog;
  s.dt = dt;
  s.system = std::make_shared<SeparableHamiltonian>(quartic_oscillator());
  return s;
}

// Brute force over the whole box, smallest |k|_inf first, then lexicographic,
// first nonzero entry positive.
std::optional<std::vector<int>> brute_force_resonance(const RealVector& omega, int K, double tol) {
  const auto n = static_cast<std::size_t>(omega.size());
  for (int shell = 1; shell <= K; ++shell) {
    std::vector<int> k(n, -K);
    while (true) {
      int inf = 0, first = 0;
      for (int v : k) {
        inf = std::max(inf, std::abs(v));
        if (first == 0) first = v;
      }
      if (inf == shell && first > 0) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += k[i] * omega(static_cast<Eigen::Index>(i));
        if (std::fabs(dot) < tol) return k;
      }
      std::size_t d = n;
      while (d > 0) {
        --d;
        if (k[d] < K) {
          ++k[d];
          break;
        }
        k[d] = -K;
        if (d == 0) {
          d = n + 1;
          break;
        }
      }
      if (d == n + 1) break;
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("exact oscillator flow") {
  const auto s = oscillator_flow({1, 0, 1});
  const auto y = flow({1, 0}, s, kPi / 2);
  CHECK(std::fabs(y.q) < 1e-12);
  CHECK(std::fabs(y.p + 1) < 1e-12);
  const auto same = flow({0.3, -0.7}, s, 0.0);
  CHECK(same.q == 0.3);
  CHECK(same.p == -0.7);
  CHECK(parse_scheme("leapfrog") == Scheme::leapfrog);
  CHECK_ERROR_KIND(parse_scheme("euler"), ErrorKind::configuration);
}

TEST_CASE("flow composition") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 50; ++k) {
    const auto setup = oscillator_flow(test::random_oscillator_point(rng));
    const PhasePoint y{u(rng), u(rng)};
    const double s = u(rng), t = u(rng);
    const auto a = flow(flow(y, setup, s), setup, t);
    const auto b = flow(y, setup, s + t);
    CHECK(std::fabs(a.q - b.q) < 1e-10);
    CHECK(std::fabs(a.p - b.p) < 1e-10);
  }
}

TEST_CASE("leapfrog energy drift on the quartic") {
  const auto setup = quartic_flow(1e-3);
  const auto& H = *setup.system;
  PhasePoint y{1.0, 0.3};
  const double h0 = H(y);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    y = flow(y, setup, 1.0);
    worst = std::max(worst, std::fabs(H(y) - h0) / h0);
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("leapfrog map is area preserving") {
  const auto setup = quartic_flow(1e-2);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const double q = u(rng), p = u(rng);
    const auto qp = flow({q + h, p}, setup, 0.5), qm = flow({q - h, p}, setup, 0.5);
    const auto pp = flow({q, p + h}, setup, 0.5), pm = flow({q, p - h}, setup, 0.5);
    const double det = ((qp.q - qm.q) * (pp.p - pm.p) - (pp.q - pm.q) * (qp.p - qm.p)) / (4 * h * h);
    CHECK(std::fabs(det - 1.0) < 1e-8);
  }
}

TEST_CASE("liouville drift") {
  const std::vector<Observable> obs{named_observable("q"), named_observable("q2+p2")};
  const auto setup = oscillator_flow({1, 0, 1});
  const auto rep = liouville_drift(setup, 1.0, 20000, obs, DiskRegion{0, 0, 1}, 5);
  CHECK(rep.all_pass());
  CHECK(rep.entries.size() == 2);
  CHECK(std::fabs(rep.entries[1].drift) < 16 * 2.3e-16);

  const std::vector<Observable> ind{named_observable("indicator(q>0)")};
  auto lf = quartic_flow(1e-2);
  const auto sys = lf.system;
  const SublevelRegion region{[sys](PhasePoint y) { return (*sys)(y); }, 1.0, {-1.5, 1.5, -1.5, 1.5}};
  const auto r2 = liouville_drift(lf, 3.0, 10000, ind, region, 6);
  CHECK(r2.all_pass());

  CHECK_ERROR_KIND(named_observable("q^3"), ErrorKind::configuration);
  CHECK_ERROR_KIND(liouville_drift(setup, 1.0, 10, obs, DiskRegion{}, 1), ErrorKind::domain);
}

TEST_CASE("liouville drift does not depend on the worker count") {
  const std::vector<Observable> obs{named_observable("q"), named_observable("p")};
  const auto setup = oscillator_flow({2, 0.4, 1});
  const auto a = liouville_drift(setup, 2.0, 30000, obs, BoxRegion{}, 9, 1);
  const auto b = liouville_drift(setup, 2.0, 30000, obs, BoxRegion{}, 9, 5);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].drift == b.entries[i].drift);
    CHECK(a.entries[i].std_error == b.entries[i].std_error);
  }
}

TEST_CASE("resonance classification") {
  RealVector w(2);
  w << 1, 1;
  auto r = resonance_classify(w, 5, 1e-12);
  CHECK(r.resonant);
  CHECK(r.witness == std::vector<int>{1, -1});
  RealVector one(1);
  one << 2.7;
  CHECK_FALSE(resonance_classify(one, 30, 1e-12).resonant);
  w << 1, std::sqrt(2.0);
  CHECK_FALSE(resonance_classify(w, 50, 1e-9).resonant);
}

TEST_CASE("resonance classification matches brute force on random frequencies") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> small(-4, 4), dim(2, 3);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  int resonant = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = dim(rng);
    RealVector w(n);
    if (t % 2 == 0) {
      // Rational frequencies, so some relation exists inside the box.
      for (int i = 0; i < n; ++i) w(i) = small(rng) / 2.0 + (small(rng) == 0 ? 0.25 : 0.0);
    } else {
      for (int i = 0; i < n; ++i) w(i) = u(rng);
    }
    const auto got = resonance_classify(w, 10, 1e-10);
    const auto want = brute_force_resonance(w, 10, 1e-10);
    CHECK(got.resonant == want.has_value());
    if (want) {
      CHECK(got.witness == *want);
      ++resonant;
    }
  }
  CHECK(resonant > 10);
}

TEST_CASE("fibrewise hamiltonian field") {
  const ParamPoint x{0.0};
  FibreFunction q{[](PhasePoint y, const ParamPoint&) { return y.q; }, {}};
  const auto v = fibrewise_hamiltonian_field(q, {0.3, 0.2}, x);
  CHECK(std::fabs(v.dq) < 1e-9);
  CHECK(std::fabs(v.dp + 1) < 1e-9);
  FibreFunction h{[](PhasePoint y, const ParamPoint&) { return 0.5 * (y.q * y.q + y.p * y.p); },
                  [](PhasePoint y, const ParamPoint&) { return OneForm1D{y.q, y.p}; }};
  const auto w = fibrewise_hamiltonian_field(h, {0.3, 0.2}, x);
  CHECK(w.dq == doctest::Approx(0.2));
  CHECK(w.dp == doctest::Approx(-0.3));

  std::mt19937_64 rng(24);
  std::normal_distribution<double> g;
  double c[10];
  for (double& ci : c) ci = g(rng);
  FibreFunction cubic{[&](PhasePoint y, const ParamPoint&) {
                        const double a = y.q, b = y.p;
                        return c[0] + c[1] * a + c[2] * b + c[3] * a * a + c[4] * a * b + c[5] * b * b +
                               c[6] * a * a * a + c[7] * a * a * b + c[8] * a * b * b + c[9] * b * b * b;
                      },
                      {}};
  for (int k = 0; k < 10; ++k) {
    const PhasePoint y{g(rng), g(rng)};
    const auto X = fibrewise_hamiltonian_field(cubic, y, x);
    const auto iw = contract_symplectic(X);
    const double e = 1e-5;
    const double dfq = (cubic.value({y.q + e, y.p}, x) - cubic.value({y.q - e, y.p}, x)) / (2 * e);
    const double dfp = (cubic.value({y.q, y.p + e}, x) - cubic.value({y.q, y.p - e}, x)) / (2 * e);
    CHECK(std::fabs(iw.dq - dfq) < 1e-7 * std::max(1.0, std::fabs(dfq)));
    CHECK(std::fabs(iw.dp - dfp) < 1e-7 * std::max(1.0, std::fabs(dfp)));
  }
}

TEST_CASE("torus average") {
  auto constant = [](const RealVector&) { return 2.5; };
  CHECK(torus_average(constant, 2, 8) == 2.5);
  auto wave = [](const RealVector& p) { return std::polar(1.0, p(0)); };
  CHECK(std::abs(torus_average(wave, 1, 16)) < 1e-15);
  auto c2 = [](const RealVector& p) { return std::cos(p(0)) * std::cos(p(0)); };
  CHECK(std::fabs(torus_average(c2, 1, 8) - 0.5) < 1e-15);

  auto f = [](const RealVector& p) { return std::exp(std::sin(p(0)) + 0.5 * std::cos(p(1))); };
  const double c = 0.37;
  auto shifted = [&](const RealVector& p) { return f(p + RealVector::Constant(2, c)); };
  CHECK(std::fabs(torus_average(f, 2, 32) - torus_average(shifted, 2, 32)) < 1e-13);
  CHECK_ERROR_KIND(torus_average(constant, 1, 3), ErrorKind::domain);
  CHECK_ERROR_KIND(torus_average(constant, 5, 64), ErrorKind::resource);
}

TEST_CASE("time and torus averages agree for a nonresonant flow") {
  // Linear flow on T^2 with Omega = (1, sqrt 2), observable cos(phi1 - phi2) + sin(phi2)^2.
  const double w1 = 1.0, w2 = std::sqrt(2.0);
  auto obs = [](double a, double b) { return std::cos(a - b) + std::sin(b) * std::sin(b); };
  const int N = 200000;
  const double T = 1e4, dt = T / N;
  double sum = 0.0;
  for (int k = 0; k < N; ++k) sum += obs(0.3 + w1 * k * dt, 1.1 + w2 * k * dt);
  const double space = torus_average([&](const RealVector& p) { return obs(p(0), p(1)); }, 2, 32);
  CHECK(std::fabs(sum / N - space) < 1e-2);
}
