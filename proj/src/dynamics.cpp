#include "hannay/dynamics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>

#include "hannay/parallel.hpp"

namespace hannay {

Scheme parse_scheme(std::string_view name) {
  if (name == "exact-oscillator") return Scheme::exact_oscillator;
  if (name == "leapfrog") return Scheme::leapfrog;
  fail(ErrorKind::configuration, "unknown integration scheme '" + std::string(name) + "'");
}

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::exact_oscillator: return "exact-oscillator";
    case Scheme::leapfrog: return "leapfrog";
  }
  return "unknown";
}

SeparableHamiltonian quartic_oscillator() {
  return {
      [](double p) { return 0.5 * p * p; },
      [](double p) { return p; },
      [](double q) { return 0.25 * q * q * q * q; },
      [](double q) { return q * q * q; },
  };
}

PhasePoint flow(PhasePoint point, const FlowSpec& setup, double t) {
  if (!std::isfinite(t)) fail(ErrorKind::domain, "flow duration must be finite");
  switch (setup.scheme) {
    case Scheme::exact_oscillator:
      return GeneralizedOscillator{}.rotate(point, setup.x, t);
    case Scheme::leapfrog: {
      if (!setup.system) fail(ErrorKind::configuration, "leapfrog needs a separable Hamiltonian");
      if (!(setup.dt > 0.0)) fail(ErrorKind::configuration, "leapfrog needs dt > 0");
      if (t == 0.0) return point;
      const auto steps = static_cast<long>(std::ceil(std::fabs(t) / setup.dt));
      const double h = t / static_cast<double>(steps);
      const auto& sys = *setup.system;
      double q = point.q, p = point.p;
      p -= 0.5 * h * sys.potential_slope(q);
      for (long k = 0; k < steps; ++k) {
        q += h * sys.kinetic_slope(p);
        const double kick = (k + 1 == steps ? 0.5 : 1.0) * h;
        p -= kick * sys.potential_slope(q);
      }
      return {q, p};
    }
  }
  fail(ErrorKind::configuration, "unknown integration scheme");
}

Observable named_observable(std::string_view name) {
  if (name == "q") return {"q", [](PhasePoint y) { return y.q; }};
  if (name == "p") return {"p", [](PhasePoint y) { return y.p; }};
  if (name == "q2+p2") return {"q2+p2", [](PhasePoint y) { return y.q * y.q + y.p * y.p; }};
  if (name == "indicator(q>0)") {
    return {"indicator(q>0)", [](PhasePoint y) { return y.q > 0.0 ? 1.0 : 0.0; }};
  }
  fail(ErrorKind::configuration, "unknown observable '" + std::string(name) + "'");
}

bool DriftReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const DriftEntry& e) { return e.pass; });
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + index * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_region(const SamplingRegion& region) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) {
    if (!(d->radius > 0.0)) fail(ErrorKind::domain, "sampling disk is empty");
  } else {
    const BoxRegion& b = std::holds_alternative<BoxRegion>(region)
                             ? std::get<BoxRegion>(region)
                             : std::get<SublevelRegion>(region).bounds;
    if (!(b.q_hi > b.q_lo) || !(b.p_hi > b.p_lo)) {
      fail(ErrorKind::domain, "sampling box is empty");
    }
    if (const auto* s = std::get_if<SublevelRegion>(&region); s && !s->energy) {
      fail(ErrorKind::domain, "sublevel region needs an energy function");
    }
  }
}

PhasePoint sample_point(const SamplingRegion& region, std::mt19937_64& rng) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) {
    const double r = d->radius * std::sqrt(unit_uniform(rng));
    const double a = kTwoPi * unit_uniform(rng);
    return {d->q0 + r * std::cos(a), d->p0 + r * std::sin(a)};
  }
  auto in_box = [&](const BoxRegion& b) {
    const double q = b.q_lo + (b.q_hi - b.q_lo) * unit_uniform(rng);
    const double p = b.p_lo + (b.p_hi - b.p_lo) * unit_uniform(rng);
    return PhasePoint{q, p};
  };
  if (const auto* b = std::get_if<BoxRegion>(&region)) return in_box(*b);
  const auto& s = std::get<SublevelRegion>(region);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const PhasePoint y = in_box(s.bounds);
    if (s.energy(y) <= s.level) return y;
  }
  fail(ErrorKind::domain, "sublevel region is empty inside its bounding box");
}

// Running moments of one observable over one chunk.
struct Moments {
  double count = 0.0;
  double mean_pre = 0.0;
  double mean_post = 0.0;
  double mean_diff = 0.0;
  double m2_diff = 0.0;

  void push(double pre, double post) {
    count += 1.0;
    mean_pre += (pre - mean_pre) / count;
    mean_post += (post - mean_post) / count;
    const double d = post - pre;
    const double delta = d - mean_diff;
    mean_diff += delta / count;
    m2_diff += delta * (d - mean_diff);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Moments m;
    m.count = a.count + b.count;
    const double wb = b.count / m.count;
    m.mean_pre = a.mean_pre + (b.mean_pre - a.mean_pre) * wb;
    m.mean_post = a.mean_post + (b.mean_post - a.mean_post) * wb;
    const double delta = b.mean_diff - a.mean_diff;
    m.mean_diff = a.mean_diff + delta * wb;
    m.m2_diff = a.m2_diff + b.m2_diff + delta * delta * a.count * wb;
    return m;
  }
};

Moments reduce_pairwise(const std::vector<Moments>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return Moments::merge(reduce_pairwise(parts, lo, mid), reduce_pairwise(parts, mid, hi));
}

}  // namespace

DriftReport liouville_drift(const FlowSpec& setup, double t, std::size_t samples,
                            std::span<const Observable> observables, const SamplingRegion& region,
                            std::uint64_t seed, unsigned workers) {
  if (samples < 1000) fail(ErrorKind::domain, "liouville check needs at least 1000 samples");
  if (observables.empty()) fail(ErrorKind::domain, "no observables requested");
  check_region(region);

  const std::size_t chunks = (samples + kLiouvilleChunk - 1) / kLiouvilleChunk;
  const std::size_t nobs = observables.size();
  std::vector<std::vector<Moments>> per_chunk(chunks, std::vector<Moments>(nobs));

  detail::parallel_for(chunks, workers, [&](std::size_t c) {
    std::mt19937_64 rng(substream_seed(seed, c));
    const std::size_t begin = c * kLiouvilleChunk;
    const std::size_t end = std::min(samples, begin + kLiouvilleChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const PhasePoint y0 = sample_point(region, rng);
      const PhasePoint y1 = flow(y0, setup, t);
      for (std::size_t o = 0; o < nobs; ++o) {
        per_chunk[c][o].push(observables[o].value(y0), observables[o].value(y1));
      }
    }
  });

  DriftReport report;
  report.samples = samples;
  report.seed = seed;
  report.chunk_size = kLiouvilleChunk;
  report.substreams =
      "chunk c of " + std::to_string(kLiouvilleChunk) +
      " samples uses mt19937_64 seeded with splitmix64(seed + c * 0x9E3779B97F4A7C15)";
  for (std::size_t o = 0; o < nobs; ++o) {
    std::vector<Moments> column(chunks);
    for (std::size_t c = 0; c < chunks; ++c) column[c] = per_chunk[c][o];
    const Moments m = reduce_pairwise(column, 0, chunks);
    DriftEntry e;
    e.name = observables[o].name;
    e.mean_pre = m.mean_pre;
    e.mean_post = m.mean_post;
    e.drift = m.mean_diff;
    const double variance = m.count > 1.0 ? m.m2_diff / (m.count - 1.0) : 0.0;
    e.std_error = std::sqrt(std::max(variance, 0.0) / m.count);
    // Rounding floor so pointwise-conserved observables pass with zero spread.
    const double floor = 16.0 * DBL_EPSILON * std::max(std::fabs(m.mean_pre), std::fabs(m.mean_post));
    e.pass = std::fabs(e.drift) <= report.sigma_threshold * e.std_error + floor;
    report.entries.push_back(std::move(e));
  }
  return report;
}

ResonanceResult resonance_classify(const RealVector& omega, int max_order, double tol) {
  if (max_order < 1) fail(ErrorKind::domain, "max_order must be at least 1");
  if (!(tol > 0.0)) fail(ErrorKind::domain, "tolerance must be positive");
  const auto n = static_cast<std::size_t>(omega.size());
  if (n == 0) fail(ErrorKind::domain, "frequency vector is empty");
  if (static_cast<double>(n) * std::log(2.0 * max_order + 1.0) > std::log(1e8)) {
    fail(ErrorKind::resource, "resonance search space too large");
  }
  ResonanceResult result;
  result.max_order = max_order;
  std::vector<int> k(n);
  for (int shell = 1; shell <= max_order; ++shell) {
    std::fill(k.begin(), k.end(), -shell);
    while (true) {
      int linf = 0;
      int first_nonzero = 0;
      for (int ki : k) {
        linf = std::max(linf, std::abs(ki));
        if (first_nonzero == 0) first_nonzero = ki;
      }
      if (linf == shell && first_nonzero > 0) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += k[i] * omega(static_cast<Eigen::Index>(i));
        if (std::fabs(dot) < tol) {
          result.resonant = true;
          result.witness = k;
          return result;
        }
      }
      // Lexicographic odometer, last entry fastest.
      std::size_t d = n;
      while (d > 0 && k[d - 1] == shell) k[--d] = -shell;
      if (d == 0) break;
      ++k[d - 1];
    }
  }
  return result;
}

TangentVector fibrewise_hamiltonian_field(const FibreFunction& f, PhasePoint point,
                                          const ParamPoint& x, double step) {
  OneForm1D grad;
  if (f.gradient) {
    grad = f.gradient(point, x);
  } else {
    if (!f.value) fail(ErrorKind::input, "fibre function has no value");
    grad.dq = (f.value({point.q + step, point.p}, x) - f.value({point.q - step, point.p}, x)) /
              (2.0 * step);
    grad.dp = (f.value({point.q, point.p + step}, x) - f.value({point.q, point.p - step}, x)) /
              (2.0 * step);
  }
  return {grad.dp, -grad.dq};
}

OneForm1D contract_symplectic(TangentVector v) noexcept { return {-v.dp, v.dq}; }

}  // namespace hannay
