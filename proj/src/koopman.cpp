#include "hannay/koopman.hpp"

#include <algorithm>
#include <cmath>

#include "hannay/errors.hpp"

namespace hannay {

int ModeVector::max_abs() const noexcept {
  int m = 0;
  for (int e : entries_) m = std::max(m, std::abs(e));
  return m;
}

bool ModeVector::is_zero() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e == 0; });
}

ModeVector ModeVector::negated() const {
  std::vector<int> out(entries_);
  for (int& e : out) e = -e;
  return ModeVector(std::move(out));
}

double ModeVector::dot(const RealVector& v) const {
  if (static_cast<std::size_t>(v.size()) != entries_.size()) {
    fail(ErrorKind::shape, "mode vector and frequency vector differ in dimension");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    s += entries_[i] * v(static_cast<Eigen::Index>(i));
  }
  return s;
}

FourierState::FourierState(std::size_t dim, int n_max) : dim_(dim), n_max_(n_max) {
  if (dim == 0) fail(ErrorKind::shape, "torus dimension must be positive");
  if (n_max < 0) fail(ErrorKind::domain, "truncation bound must be non-negative");
}

FourierState FourierState::basis(const ModeVector& m, int n_max) {
  FourierState s(m.size(), n_max);
  s.set(m, 1.0);
  return s;
}

void FourierState::check_mode(const ModeVector& m) const {
  if (m.size() != dim_) fail(ErrorKind::shape, "mode vector has the wrong dimension");
  if (m.max_abs() > n_max_) fail(ErrorKind::domain, "mode outside the truncation bound");
}

void FourierState::set(const ModeVector& m, Complex amplitude) {
  check_mode(m);
  amps_[m] = amplitude;
}

Complex FourierState::amplitude(const ModeVector& m) const {
  auto it = amps_.find(m);
  return it == amps_.end() ? Complex{} : it->second;
}

double FourierState::norm() const {
  double s = 0.0;
  for (const auto& [m, c] : amps_) s += std::norm(c);
  return std::sqrt(s);
}

FourierState FourierState::normalized() const {
  const double nrm = norm();
  if (!(nrm > 0.0)) fail(ErrorKind::normalization, "cannot normalize the zero state");
  FourierState out = *this;
  for (auto& [m, c] : out.amps_) c /= nrm;
  return out;
}

Complex FourierState::evaluate(const RealVector& angles) const {
  if (static_cast<std::size_t>(angles.size()) != dim_) {
    fail(ErrorKind::shape, "angle tuple has the wrong dimension");
  }
  Complex s{};
  for (const auto& [m, c] : amps_) s += c * std::polar(1.0, m.dot(angles));
  return s;
}

Complex FourierState::inner(const FourierState& other) const {
  if (other.dim_ != dim_) fail(ErrorKind::shape, "states live on tori of different dimension");
  Complex s{};
  for (const auto& [m, c] : amps_) {
    auto it = other.amps_.find(m);
    if (it != other.amps_.end()) s += std::conj(c) * it->second;
  }
  return s;
}

double FourierState::generator_expectation(const RealVector& omega) const {
  double s = 0.0;
  for (const auto& [m, c] : amps_) s += std::norm(c) * m.dot(omega);
  return s;
}

double FourierState::max_abs_difference(const FourierState& other) const {
  double worst = 0.0;
  for (const auto& [m, c] : amps_) worst = std::max(worst, std::abs(c - other.amplitude(m)));
  for (const auto& [m, c] : other.amps_) worst = std::max(worst, std::abs(c - amplitude(m)));
  return worst;
}

double FourierState::distance(const FourierState& other) const {
  double s = 0.0;
  for (const auto& [m, c] : amps_) s += std::norm(c - other.amplitude(m));
  for (const auto& [m, c] : other.amps_) {
    if (!amps_.count(m)) s += std::norm(c);
  }
  return std::sqrt(s);
}

namespace {

// Calls fn(mode) for every mode of the box |m_i| <= n_max.
template <class Fn>
void for_each_mode(std::size_t dim, int n_max, Fn&& fn) {
  std::vector<int> k(dim, -n_max);
  while (true) {
    fn(ModeVector(k));
    std::size_t d = 0;
    while (d < dim && k[d] == n_max) k[d++] = -n_max;
    if (d == dim) break;
    ++k[d];
  }
}

}  // namespace

FourierState random_state(std::size_t dim, int n_max, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  FourierState s(dim, n_max);
  for_each_mode(dim, n_max, [&](const ModeVector& m) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    s.set(m, Complex(re, im));
  });
  return s.normalized();
}

FourierState evolve(const FourierState& state, const KoopmanPropagator& prop) {
  if (static_cast<std::size_t>(prop.omega.size()) != state.dim()) {
    fail(ErrorKind::shape, "propagator and state differ in torus dimension");
  }
  FourierState out(state.dim(), state.n_max());
  for (const auto& [m, c] : state.amplitudes()) {
    out.set(m, std::polar(1.0, m.dot(prop.omega) * prop.t) * c);
  }
  return out;
}

std::vector<double> generator_spectrum(const RealVector& omega, std::span<const ModeVector> modes) {
  std::vector<double> out;
  out.reserve(modes.size());
  for (const auto& m : modes) out.push_back(m.dot(omega));
  return out;
}

FourierState composition_apply(const FourierState& state, const RealVector& omega, double t,
                               std::size_t order) {
  const std::size_t n = state.dim();
  if (static_cast<std::size_t>(omega.size()) != n) {
    fail(ErrorKind::shape, "frequency vector and state differ in torus dimension");
  }
  if (order <= 2 * static_cast<std::size_t>(state.n_max())) {
    fail(ErrorKind::aliasing, "quadrature order " + std::to_string(order) +
                                  " must exceed twice the truncation bound " +
                                  std::to_string(state.n_max()));
  }
  if (static_cast<double>(n) * std::log(static_cast<double>(order)) > std::log(16777216.0)) {
    fail(ErrorKind::resource, "composition grid too large");
  }
  const int nmax = state.n_max();
  const double h = kTwoPi / static_cast<double>(order);
  const RealVector shift = omega * t;

  // Per-axis phasor tables: table[i][node][m + nmax] = exp(i m Phi_i(node)).
  auto tables = [&](const RealVector& offset) {
    std::vector<std::vector<std::vector<Complex>>> tab(n);
    for (std::size_t i = 0; i < n; ++i) {
      tab[i].assign(order, std::vector<Complex>(2 * nmax + 1));
      for (std::size_t node = 0; node < order; ++node) {
        const double phi = h * static_cast<double>(node) + offset(static_cast<Eigen::Index>(i));
        for (int m = -nmax; m <= nmax; ++m) tab[i][node][m + nmax] = std::polar(1.0, m * phi);
      }
    }
    return tab;
  };
  const auto shifted = tables(shift);
  const auto plain = tables(RealVector::Zero(static_cast<Eigen::Index>(n)));

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= order;

  // Values of psi o T_t on the grid.
  std::vector<Complex> values(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t g = 0; g < total; ++g) {
    Complex v{};
    for (const auto& [m, c] : state.amplitudes()) {
      Complex e = c;
      for (std::size_t i = 0; i < n; ++i) e *= shifted[i][idx[i]][m[i] + nmax];
      v += e;
    }
    values[g] = v;
    for (std::size_t d = 0; d < n && ++idx[d] == order; ++d) idx[d] = 0;
  }

  FourierState out(n, nmax);
  for_each_mode(n, nmax, [&](const ModeVector& m) {
    Complex s{};
    std::vector<std::size_t> j(n, 0);
    for (std::size_t g = 0; g < total; ++g) {
      Complex e = values[g];
      for (std::size_t i = 0; i < n; ++i) e *= std::conj(plain[i][j[i]][m[i] + nmax]);
      s += e;
      for (std::size_t d = 0; d < n && ++j[d] == order; ++d) j[d] = 0;
    }
    out.set(m, s / static_cast<double>(total));
  });
  return out;
}

KoopmanLift koopman_from_family(const IntegrableFamily& family, const ParamPoint& x,
                                const RealVector& mu) {
  if (static_cast<std::size_t>(mu.size()) != family.torus_dim()) {
    fail(ErrorKind::shape, "action tuple has the wrong dimension");
  }
  return KoopmanLift(frequency(family, mu, x));
}

}  // namespace hannay
