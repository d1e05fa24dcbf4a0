#include "hannay/holonomy.hpp"

#include <cmath>

#include "hannay/errors.hpp"
#include "hannay/parallel.hpp"

namespace hannay {

// --- helpers -------------------------------------------------------------------

namespace {

constexpr double kMinLinkOverlap = 1e-12;

template <class Fn>
void for_each_torus_node(std::size_t n, std::size_t order, Fn&& fn) {
  if (order < 4) fail(ErrorKind::domain, "torus quadrature order must be at least 4");
  if (static_cast<double>(n) * std::log(static_cast<double>(order)) > std::log(16777216.0)) {
    fail(ErrorKind::resource, "torus grid exceeds the node budget");
  }
  const double h = kTwoPi / static_cast<double>(order);
  std::vector<std::size_t> idx(n, 0);
  RealVector phi = RealVector::Zero(static_cast<Eigen::Index>(n));
  while (true) {
    for (std::size_t i = 0; i < n; ++i) phi(static_cast<Eigen::Index>(i)) = h * idx[i];
    fn(static_cast<const RealVector&>(phi));
    std::size_t d = 0;
    while (d < n && ++idx[d] == order) idx[d++] = 0;
    if (d == n) break;
  }
}

double torus_node_count(std::size_t n, std::size_t order) {
  return std::pow(static_cast<double>(order), static_cast<double>(n));
}

void check_action(const IntegrableFamily& family, const RealVector& mu) {
  if (static_cast<std::size_t>(mu.size()) != family.torus_dim()) {
    fail(ErrorKind::shape, "action tuple has the wrong dimension");
  }
  if (!mu.allFinite()) fail(ErrorKind::domain, "action value must be finite");
}

void check_loop(const IntegrableFamily& family, const ParamLoop& loop,
                const std::vector<ParamPoint>& nodes) {
  if (loop.dim() != family.param_dim()) {
    fail(ErrorKind::configuration, "loop dimension does not match the family's parameters");
  }
  for (const auto& x : nodes) family.require_admissible(x);
}

// Overlaps <m, x1 | m, x2> for several modes sharing one transport pass.
std::vector<Complex> link_overlaps(const std::vector<ModeVector>& modes,
                                   const IntegrableFamily& family, const RealVector& mu,
                                   const ParamPoint& x1, const ParamPoint& x2,
                                   std::size_t order) {
  std::vector<Complex> out(modes.size(), Complex(1.0, 0.0));
  if (x1 == x2) return out;
  for (const auto& m : modes) {
    if (m.size() != family.torus_dim()) fail(ErrorKind::shape, "mode vector has the wrong dimension");
  }
  family.require_admissible(x1);
  if (auto violation = family.admissibility_violation(x2)) {
    fail(ErrorKind::overlap_domain, "second fibre " + x2.to_string() + " leaves the chart domain: " +
                                        *violation);
  }
  std::vector<Complex> sums(modes.size(), Complex{});
  for_each_torus_node(family.torus_dim(), order, [&](const RealVector& phi) {
    const RealVector delta = family.transport_angles(mu, phi, x1, x2) - phi;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (!modes[i].is_zero()) sums[i] += std::polar(1.0, modes[i].dot(delta));
    }
  });
  const double count = torus_node_count(family.torus_dim(), order);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (!modes[i].is_zero()) out[i] = sums[i] / count;
  }
  return out;
}

struct LoopBerryData {
  std::vector<BerryPhase> phases;  // per mode
};

LoopBerryData berry_phases(const std::vector<ModeVector>& modes, const IntegrableFamily& family,
                           const RealVector& mu, const ParamLoop& loop,
                           const HolonomyOptions& options) {
  check_action(family, mu);
  if (options.segments < 1) fail(ErrorKind::domain, "need at least one segment");
  const auto nodes = loop.base_nodes(options.segments);
  check_loop(family, loop, nodes);
  const std::size_t K = options.segments;
  std::vector<std::vector<Complex>> links(K);
  detail::parallel_for(K, options.workers, [&](std::size_t k) {
    links[k] = link_overlaps(modes, family, mu, nodes[k], nodes[k + 1], options.quadrature);
  });
  LoopBerryData data;
  data.phases.resize(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    ExactSum sum;
    for (int rep = 0; rep < loop.traversals(); ++rep) {
      for (std::size_t k = 0; k < K; ++k) {
        const Complex o = links[k][i];
        if (std::abs(o) < kMinLinkOverlap) {
          fail(ErrorKind::degenerate_chain,
               "overlap between fibres " + nodes[k].to_string() + " and " +
                   nodes[k + 1].to_string() + " vanishes");
        }
        // A reversed loop runs each link backwards: conj(<x_k|x_{k+1}>).
        sum.add(loop.orientation() * std::arg(o));
      }
    }
    data.phases[i].raw = sum.value();
    data.phases[i].wrapped = wrap_angle(data.phases[i].raw);
  }
  return data;
}

}  // namespace

// --- Hannay-Berry connection ----------------------------------------------------

HannayOneFormSample hannay_one_form(const IntegrableFamily& family, const RealVector& mu,
                                    const ParamPoint& x, std::size_t quadrature, double fd_step,
                                    int max_halvings) {
  check_action(family, mu);
  family.require_admissible(x);
  const auto n = static_cast<Eigen::Index>(family.torus_dim());
  const auto m = static_cast<Eigen::Index>(family.param_dim());
  if (x.size() != family.param_dim()) fail(ErrorKind::shape, "parameter point has the wrong dimension");

  HannayOneFormSample sample{x, RealMatrix::Zero(n, m), fd_step};
  const double count = torus_node_count(family.torus_dim(), quadrature);

  if (family.chart_deformation(mu, RealVector::Zero(n), x)) {
    sample.step_used = 0.0;
    for_each_torus_node(family.torus_dim(), quadrature, [&](const RealVector& phi) {
      sample.A += *family.chart_deformation(mu, phi, x);
    });
    sample.A /= count;
    return sample;
  }

  if (!(fd_step > 0.0)) fail(ErrorKind::domain, "finite-difference step must be positive");
  double smallest_step = fd_step;
  for (Eigen::Index j = 0; j < m; ++j) {
    double step = fd_step;
    for (int attempt = 0;; ++attempt) {
      const ParamPoint up = x.shifted(static_cast<std::size_t>(j), step);
      const ParamPoint down = x.shifted(static_cast<std::size_t>(j), -step);
      if (!family.admissible(up) || !family.admissible(down)) {
        fail(ErrorKind::stencil, "finite-difference stencil around " + x.to_string() +
                                     " leaves the chart domain along axis " + std::to_string(j));
      }
      RealVector column = RealVector::Zero(n);
      bool ambiguous = false;
      for_each_torus_node(family.torus_dim(), quadrature, [&](const RealVector& phi) {
        const RealVector a = family.transport_angles(mu, phi, x, up);
        const RealVector b = family.transport_angles(mu, phi, x, down);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d = wrap_angle(a(i) - b(i));
          if (std::fabs(d) > 0.5 * kPi) ambiguous = true;
          column(i) += d;
        }
      });
      if (!ambiguous) {
        sample.A.col(j) = column / (count * 2.0 * step);
        break;
      }
      if (attempt >= max_halvings) {
        fail(ErrorKind::step_too_large, "angle difference stays near the branch cut at " +
                                            x.to_string() + " after " +
                                            std::to_string(max_halvings) + " halvings");
      }
      step *= 0.5;
    }
    smallest_step = std::min(smallest_step, step);
  }
  sample.step_used = smallest_step;
  return sample;
}

HannayAngle hannay_holonomy(const IntegrableFamily& family, const RealVector& mu,
                            const ParamLoop& loop, const HolonomyOptions& options) {
  check_action(family, mu);
  if (options.segments < 8) fail(ErrorKind::domain, "Hannay holonomy needs K >= 8 segments");
  const auto nodes = loop.base_nodes(options.segments);
  check_loop(family, loop, nodes);
  const std::size_t K = options.segments;
  const auto n = static_cast<Eigen::Index>(family.torus_dim());

  std::vector<RealVector> increments(K, RealVector::Zero(n));
  detail::parallel_for(K, options.workers, [&](std::size_t k) {
    const RealVector dx = nodes[k + 1] - nodes[k];
    if ((dx.array() == 0.0).all()) return;
    const auto sample = hannay_one_form(family, mu, midpoint(nodes[k], nodes[k + 1]),
                                        options.quadrature, options.fd_step, options.max_halvings);
    increments[k] = sample.A * dx;
  });

  HannayAngle theta;
  theta.raw.resize(n);
  theta.wrapped.resize(n);
  theta.winding.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    ExactSum sum;
    for (int rep = 0; rep < loop.traversals(); ++rep) {
      for (std::size_t k = 0; k < K; ++k) {
        sum.add(kHannayOrientation * loop.orientation() * increments[k](i));
      }
    }
    theta.raw(i) = sum.value();
    theta.wrapped(i) = wrap_angle(theta.raw(i));
    theta.winding[static_cast<std::size_t>(i)] =
        std::lround((theta.raw(i) - theta.wrapped(i)) / kTwoPi);
  }
  return theta;
}

// --- Berry-Simon pullback ------------------------------------------------------

Complex berry_overlap(const ModeVector& m, const IntegrableFamily& family, const RealVector& mu,
                      const ParamPoint& x1, const ParamPoint& x2, std::size_t quadrature) {
  check_action(family, mu);
  return link_overlaps({m}, family, mu, x1, x2, quadrature).front();
}

BerryPhase berry_phase(const ModeVector& m, const IntegrableFamily& family, const RealVector& mu,
                       const ParamLoop& loop, const HolonomyOptions& options) {
  return berry_phases({m}, family, mu, loop, options).phases.front();
}

HolonomyReport relation_report(const std::vector<ModeVector>& modes,
                               const IntegrableFamily& family, const RealVector& mu,
                               const ParamLoop& loop, const HolonomyOptions& options) {
  if (modes.empty()) fail(ErrorKind::input, "relation report needs at least one mode");

  HolonomyReport report;
  report.segments = options.segments;
  report.quadrature = options.quadrature;
  report.fd_step = options.fd_step;
  report.theta = hannay_holonomy(family, mu, loop, options);

  // The zero mode rides along so S(0) is read off the same overlap chain.
  std::vector<ModeVector> all = modes;
  all.emplace_back(std::vector<int>(family.torus_dim(), 0));
  const auto berry = berry_phases(all, family, mu, loop, options);

  for (std::size_t i = 0; i < modes.size(); ++i) {
    RelationRow row;
    row.mode = modes[i];
    row.s = modes[i].dot(report.theta.raw);
    row.beta = berry.phases[i].wrapped;
    row.residual = std::fabs(wrap_angle(row.beta - row.s));
    report.max_residual = std::max(report.max_residual, row.residual);
    report.rows.push_back(std::move(row));
  }
  report.s_zero_from_zero_mode = berry.phases.back().raw == 0.0;

  const ParamLoop still = ParamLoop::constant(loop.at(0.0));
  const HannayAngle theta0 = hannay_holonomy(family, mu, still, options);
  const auto berry0 = berry_phases(all, family, mu, still, options);
  bool zero = (theta0.raw.array() == 0.0).all();
  for (const auto& b : berry0.phases) zero = zero && b.raw == 0.0;
  report.s_zero_from_constant_loop = zero;
  return report;
}

}  // namespace hannay
