#include "hannay/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "hannay/cli/report_writer.hpp"
#include "hannay/dynamics.hpp"
#include "hannay/errors.hpp"
#include "hannay/families.hpp"
#include "hannay/holonomy.hpp"
#include "hannay/koopman.hpp"
#include "hannay/oracles.hpp"
#include "hannay/projective.hpp"

namespace hannay::cli {

using nlohmann::json;

namespace {

json to_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(RealVector(m.row(i).transpose())));
  return rows;
}

json to_json(const ModeVector& m) { return json(m.entries()); }

RealVector to_vector(const std::vector<double>& v) {
  RealVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// Tolerances in effect: command defaults overridden by the config.
class Tolerances {
 public:
  Tolerances(std::map<std::string, double> defaults, const std::map<std::string, double>& overrides)
      : values_(std::move(defaults)) {
    for (const auto& [k, v] : overrides) {
      if (!values_.count(k)) {
        std::string known;
        for (const auto& [name, _] : values_) known += (known.empty() ? "" : ", ") + name;
        throw ConfigError("field 'tolerances." + k + "'",
                          "not used by this command (known: " + (known.empty() ? "none" : known) + ")");
      }
      values_[k] = v;
    }
  }
  double operator[](const std::string& k) const { return values_.at(k); }
  json to_json() const {
    json o = json::object();
    for (const auto& [k, v] : values_) o[k] = v;
    return o;
  }

 private:
  std::map<std::string, double> values_;
};

struct Checks {
  json list = json::array();
  bool all = true;
  void add(const std::string& name, double value, double tolerance, bool pass) {
    list.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
    all = all && pass;
  }
  void at_most(const std::string& name, double value, double tolerance) {
    add(name, value, tolerance, value <= tolerance);
  }
  void flag(const std::string& name, bool pass) {
    list.push_back({{"name", name}, {"pass", pass}});
    all = all && pass;
  }
};

struct Context {
  Context(const RunConfig& c, unsigned w, const Tolerances& t) : cfg(c), workers(w), tol(t) {}
  const RunConfig& cfg;
  unsigned workers;
  const Tolerances& tol;
  json results = json::object();
  json oracle;
  json convergence;
  json work = json::object();
  Checks checks;
};

std::map<std::string, double> tolerance_defaults(const std::string& command) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (command == "hannay") return {{"oracle_agreement", 1e-3}};
  if (command == "verify-relation") {
    return {{"relation_residual", 1e-6}, {"oracle_agreement", 1e-3}, {"min_order", 1.0}};
  }
  if (command == "koopman-check") {
    return {{"norm_preservation", 4.0 * eps}, {"group_law", 1e-14}, {"composition_vs_evolve", 1e-10}};
  }
  if (command == "liouville-check") return {{"sigma_threshold", 3.0}, {"radial_drift", 16.0 * eps}};
  return {};
}

std::shared_ptr<IntegrableFamily> build_family(const FamilySpec& f) {
  if (f.kind == "oscillator") return std::make_shared<GeneralizedOscillator>();
  if (f.kind == "anharmonic") return make_anharmonic_family(f.omega, f.beta);
  return make_mobius_rotor_family(to_vector(f.omega_vector), f.beta, to_vector(f.kappa));
}

RealVector action_of(const RunConfig& cfg, const IntegrableFamily& family) {
  const auto& mu = *cfg.mu;
  if (mu.size() != family.torus_dim()) {
    throw ConfigError("field 'mu'", "family " + family.name() + " has " +
                                        std::to_string(family.torus_dim()) + " action(s), got " +
                                        std::to_string(mu.size()));
  }
  return to_vector(mu);
}

ParamLoop build_loop(const LoopSpec& l, const IntegrableFamily& family) {
  auto check_dim = [&](std::size_t d, const std::string& field) {
    if (d != family.param_dim()) {
      throw ConfigError("field '" + field + "'", "family " + family.name() + " has " +
                                                     std::to_string(family.param_dim()) +
                                                     " parameters, got " + std::to_string(d));
    }
  };
  ParamLoop loop = ParamLoop::constant(ParamPoint(RealVector::Zero(1)));
  if (l.kind == "constant") {
    check_dim(l.point.size(), "loop.point");
    loop = ParamLoop::constant(ParamPoint(to_vector(l.point)));
  } else if (l.kind == "circle") {
    check_dim(l.center.size(), "loop.center");
    loop = ParamLoop::circle(ParamPoint(to_vector(l.center)), l.radius, l.plane[0], l.plane[1], l.phase);
  } else {
    check_dim(l.vertices.front().size(), "loop.vertices");
    std::vector<ParamPoint> vs;
    for (const auto& v : l.vertices) vs.emplace_back(to_vector(v));
    loop = ParamLoop::polyline(std::move(vs));
  }
  if (l.reversed) loop = loop.reversed();
  if (l.traversals > 1) loop = loop.repeated(l.traversals);
  return loop;
}

std::vector<ModeVector> modes_of(const RunConfig& cfg, const IntegrableFamily& family) {
  std::vector<ModeVector> out;
  for (const auto& m : *cfg.modes) {
    if (m.size() != family.torus_dim()) {
      throw ConfigError("field 'modes'", "modes must have " + std::to_string(family.torus_dim()) +
                                             " entries for family " + family.name());
    }
    out.emplace_back(m);
  }
  return out;
}

HolonomyOptions holonomy_options(const RunConfig& cfg, unsigned workers) {
  HolonomyOptions o;
  o.segments = cfg.K;
  o.quadrature = cfg.Q;
  o.fd_step = cfg.fd_step;
  o.workers = workers;
  return o;
}

json theta_json(const HannayAngle& th) {
  return {{"raw", to_json(th.raw)}, {"wrapped", to_json(th.wrapped)}, {"winding", th.winding}};
}

json describe_family(const IntegrableFamily& f) {
  return {{"name", f.name()}, {"gauge", f.gauge_tag()}, {"torus_dim", f.torus_dim()},
          {"param_dim", f.param_dim()}};
}

// The oracle drives the oscillator only; the comparison is on theta_raw.
void attach_oracle(Context& ctx, const IntegrableFamily& family, const RealVector& mu,
                   const ParamLoop& loop, double theta_raw) {
  if (!ctx.cfg.oracle.enabled) return;
  const auto* osc = dynamic_cast<const GeneralizedOscillator*>(&family);
  if (!osc) throw ConfigError("field 'oracle'", "the adiabatic oracle drives the oscillator family only");
  AdiabaticOptions ao;
  ao.epsilons = ctx.cfg.epsilons;
  ao.phase_samples = ctx.cfg.oracle.phase_samples;
  ao.substep = ctx.cfg.oracle.substep;
  ao.workers = ctx.workers;
  const auto r = adiabatic_hannay_oracle(*osc, mu(0), loop, ao);

  json runs = json::array();
  std::size_t steps = 0;
  for (const auto& run : r.runs) {
    runs.push_back({{"epsilon", run.epsilon},
                    {"theta", run.theta},
                    {"initial_action", run.initial_action},
                    {"final_action", run.final_action},
                    {"final_angle_unwrapped", run.final_angle_unwrapped},
                    {"dynamical_angle", run.dynamical_angle},
                    {"endpoint_action_drift", run.endpoint_drift},
                    {"sup_action_drift", run.sup_drift},
                    {"steps", run.steps}});
    steps += run.steps * r.phase_samples;
  }
  const double diff = std::fabs(theta_raw - r.theta_oracle);
  ctx.oracle = {{"method", "slow drive, exact frozen-midpoint rotation, Richardson O(eps)"},
                {"phase_samples", r.phase_samples},
                {"substep", r.substep},
                {"runs", runs},
                {"theta_oracle", r.theta_oracle},
                {"theta_connection", theta_raw},
                {"abs_difference", diff},
                {"theta_difference_ratios", r.difference_ratios},
                {"endpoint_drift_ratios", r.endpoint_drift_ratios},
                {"sup_drift_ratios", r.sup_drift_ratios}};
  ctx.work["oracle_rotation_steps"] = steps;
  ctx.checks.at_most("oracle_agreement", diff, ctx.tol["oracle_agreement"]);
}

void cmd_hannay(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto family = build_family(*cfg.family);
  const RealVector mu = action_of(cfg, *family);
  const ParamLoop loop = build_loop(*cfg.loop, *family);
  const HolonomyOptions opts = holonomy_options(cfg, ctx.workers);

  const HannayAngle th = hannay_holonomy(*family, mu, loop, opts);
  const ParamPoint start = loop.at(0.0);
  const auto A = hannay_one_form(*family, mu, start, cfg.Q, cfg.fd_step);
  const auto nd = nondegeneracy(*family, mu, start);

  ctx.results = {{"family", describe_family(*family)},
                 {"loop", loop.describe()},
                 {"mu", to_json(mu)},
                 {"K", cfg.K},
                 {"Q", cfg.Q},
                 {"fd_step", cfg.fd_step},
                 {"orientation_sign", kHannayOrientation},
                 {"theta", theta_json(th)},
                 {"one_form_at_start", {{"x", to_json(start.coords())}, {"A", to_json(A.A)}}},
                 {"frequency_at_start", to_json(frequency(*family, mu, start))},
                 {"nondegeneracy_at_start",
                  {{"determinant", nd.determinant}, {"degenerate", nd.degenerate}}}};
  ctx.work["segments"] = cfg.K * static_cast<std::size_t>(loop.traversals());

  if (!cfg.convergence_K.empty()) {
    std::vector<double> res(cfg.convergence_K.begin(), cfg.convergence_K.end());
    const auto sweep = convergence_sweep(
        [&](double K) {
          HolonomyOptions o = opts;
          o.segments = static_cast<std::size_t>(K);
          return hannay_holonomy(*family, mu, loop, o).raw(0);
        },
        res);
    ctx.convergence = {{"quantity", "theta_raw[0] vs K"},
                       {"resolutions", sweep.resolutions},
                       {"values", sweep.values},
                       {"errors_vs_finest", sweep.errors},
                       {"fitted_order", sweep.order},
                       {"exact", sweep.exact},
                       {"spectral", sweep.spectral}};
  }
  attach_oracle(ctx, *family, mu, loop, th.raw(0));
}

void cmd_berry(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto family = build_family(*cfg.family);
  const RealVector mu = action_of(cfg, *family);
  const ParamLoop loop = build_loop(*cfg.loop, *family);
  const HolonomyOptions opts = holonomy_options(cfg, ctx.workers);
  json rows = json::array();
  for (const auto& m : modes_of(cfg, *family)) {
    const auto b = berry_phase(m, *family, mu, loop, opts);
    rows.push_back({{"mode", to_json(m)}, {"beta", b.wrapped}, {"beta_unwrapped", b.raw}});
  }
  ctx.results = {{"family", describe_family(*family)},
                 {"loop", loop.describe()},
                 {"mu", to_json(mu)},
                 {"K", cfg.K},
                 {"Q", cfg.Q},
                 {"phases", rows}};
  ctx.work["segments"] = cfg.K * static_cast<std::size_t>(loop.traversals());
}

void cmd_verify_relation(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Tolerances& tol = ctx.tol;
  const auto family = build_family(*cfg.family);
  const RealVector mu = action_of(cfg, *family);
  const ParamLoop loop = build_loop(*cfg.loop, *family);
  const auto modes = modes_of(cfg, *family);
  const HolonomyOptions opts = holonomy_options(cfg, ctx.workers);

  const HolonomyReport rep = relation_report(modes, *family, mu, loop, opts);
  json rows = json::array();
  json s_graph = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"mode", to_json(r.mode)}, {"s", r.s}, {"beta", r.beta}, {"residual", r.residual}});
    s_graph.push_back(json::array({r.s, r.beta}));
  }

  ctx.results = {{"family", describe_family(*family)},
                 {"loop", loop.describe()},
                 {"mu", to_json(mu)},
                 {"K", rep.segments},
                 {"Q", rep.quadrature},
                 {"fd_step", rep.fd_step},
                 {"orientation_sign", rep.orientation_sign},
                 {"theta", theta_json(rep.theta)},
                 {"rows", rows},
                 {"s_samples", s_graph},
                 {"max_residual", rep.max_residual},
                 {"s_zero", {{"from_zero_mode", rep.s_zero_from_zero_mode},
                             {"from_constant_loop", rep.s_zero_from_constant_loop}}}};
  ctx.work["segments"] = cfg.K * static_cast<std::size_t>(loop.traversals());
  ctx.checks.at_most("max_relation_residual", rep.max_residual, tol["relation_residual"]);
  ctx.checks.flag("s_zero_from_zero_mode", rep.s_zero_from_zero_mode);
  ctx.checks.flag("s_zero_from_constant_loop", rep.s_zero_from_constant_loop);

  if (!cfg.convergence_K.empty()) {
    std::vector<double> res;
    json per_k = json::array();
    std::vector<double> worst;
    for (std::size_t K : cfg.convergence_K) {
      HolonomyOptions o = opts;
      o.segments = K;
      const auto r = relation_report(modes, *family, mu, loop, o);
      res.push_back(static_cast<double>(K));
      worst.push_back(r.max_residual);
      per_k.push_back({{"K", K}, {"theta_raw", to_json(r.theta.raw)}, {"max_residual", r.max_residual}});
    }
    const auto order = fitted_order(res, worst);
    ctx.convergence = {{"quantity", "max relation residual vs K"},
                       {"sweep", per_k},
                       {"fitted_order", order ? json(*order) : json(nullptr)},
                       {"exact", !order.has_value()}};
    if (order) ctx.checks.add("residual_convergence_order", *order, tol["min_order"], *order >= tol["min_order"]);
  }
  attach_oracle(ctx, *family, mu, loop, rep.theta.raw(0));
}

void cmd_aa_phase(Context& ctx) {
  const auto& cfg = ctx.cfg;
  ctx.results = json::object();
  if (!cfg.state.empty()) {
    const std::size_t dim = cfg.state.front().mode.size();
    int n_max = 0;
    for (const auto& e : cfg.state) {
      if (e.mode.size() != dim) throw ConfigError("field 'state'", "modes differ in dimension");
      for (int v : e.mode) n_max = std::max(n_max, std::abs(v));
    }
    if (!cfg.omega || cfg.omega->size() != dim) {
      throw ConfigError("field 'omega'", "needs one frequency per torus dimension of the state");
    }
    FourierState psi(dim, n_max);
    for (const auto& e : cfg.state) psi.set(ModeVector(e.mode), e.amplitude);
    const auto r = aa_phase_from_evolution(psi, to_vector(*cfg.omega), *cfg.period, cfg.samples);
    ctx.results["evolution"] = {{"beta", r.beta},
                                {"total_phase", r.total_phase},
                                {"dynamical_phase", r.dynamical_phase},
                                {"closure_distance", r.closure_distance},
                                {"bargmann_phase_of_samples", r.bargmann_phase},
                                {"samples", cfg.samples},
                                {"period", *cfg.period}};
    ctx.work["samples"] = cfg.samples;
  }
  json chains = json::array();
  for (const auto& chain : cfg.chains) {
    std::vector<Ray> rays;
    for (const auto& v : chain) rays.push_back(Ray::from_amplitudes(v));
    const StateLoop loop(std::move(rays));
    chains.push_back({{"length", loop.size()}, {"holonomy", discrete_holonomy(loop)}});
  }
  if (!chains.empty()) ctx.results["chains"] = chains;
}

void cmd_koopman_check(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Tolerances& tol = ctx.tol;
  const RealVector omega = to_vector(*cfg.omega);
  const std::size_t n = static_cast<std::size_t>(omega.size());
  const std::size_t Q =
      cfg.echo.contains("Q") ? cfg.Q : std::max<std::size_t>(32, 4 * static_cast<std::size_t>(cfg.n_max));

  std::mt19937_64 rng(cfg.seed);
  double worst_norm = 0.0, worst_group = 0.0, worst_comp = 0.0;
  for (std::size_t k = 0; k < cfg.trials; ++k) {
    const FourierState psi = random_state(n, cfg.n_max, rng);
    const FourierState ut = evolve(psi, {omega, cfg.t});
    worst_norm = std::max(worst_norm, std::fabs(ut.norm() - psi.norm()));
    const FourierState ts = evolve(evolve(psi, {omega, cfg.s}), {omega, cfg.t});
    const FourierState sum = evolve(psi, {omega, cfg.t + cfg.s});
    worst_group = std::max(worst_group, ts.max_abs_difference(sum));
    worst_comp = std::max(worst_comp, composition_apply(psi, omega, cfg.t, Q).max_abs_difference(ut));
  }
  ctx.results = {{"torus_dim", n},
                 {"N_max", cfg.n_max},
                 {"Q", Q},
                 {"t", cfg.t},
                 {"s", cfg.s},
                 {"trials", cfg.trials},
                 {"max_norm_change", worst_norm},
                 {"max_group_law_defect", worst_group},
                 {"max_composition_vs_evolve", worst_comp}};
  ctx.work["states"] = cfg.trials;
  ctx.checks.at_most("norm_preservation", worst_norm, tol["norm_preservation"]);
  ctx.checks.at_most("group_law", worst_group, tol["group_law"]);
  ctx.checks.at_most("composition_vs_evolve", worst_comp, tol["composition_vs_evolve"]);
}

void cmd_liouville_check(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& L = cfg.liouville;
  const Tolerances& tol = ctx.tol;

  FlowSpec setup;
  std::function<double(PhasePoint)> energy;
  double q_extent = 0.0, p_extent = 0.0;
  const double level = L.region == "sublevel" && !L.region_params.empty() ? L.region_params[0] : 1.0;
  if (!(level > 0.0)) throw ConfigError("field 'liouville.region_params'", "energy level must be positive");
  if (L.system == "oscillator") {
    setup.scheme = L.scheme.empty() ? Scheme::exact_oscillator : parse_scheme(L.scheme);
    if (setup.scheme != Scheme::exact_oscillator) {
      throw ConfigError("field 'liouville.scheme'", "the oscillator system runs on the exact scheme");
    }
    setup.x = ParamPoint(to_vector(L.x));
    GeneralizedOscillator osc;
    osc.require_admissible(setup.x);
    const ParamPoint x = setup.x;
    energy = [osc, x](PhasePoint y) { return osc.hamiltonian(y, x); };
    const double X = L.x[0], Y = L.x[1], Z = L.x[2], w2 = X * Z - Y * Y;
    q_extent = std::sqrt(2.0 * level * Z / w2) * 1.0001;
    p_extent = std::sqrt(2.0 * level * X / w2) * 1.0001;
  } else {
    setup.scheme = L.scheme.empty() ? Scheme::leapfrog : parse_scheme(L.scheme);
    if (setup.scheme != Scheme::leapfrog) {
      throw ConfigError("field 'liouville.scheme'", "the quartic system runs on leapfrog");
    }
    auto sys = std::make_shared<SeparableHamiltonian>(quartic_oscillator());
    setup.system = sys;
    setup.dt = L.dt;
    energy = [sys](PhasePoint y) { return (*sys)(y); };
    q_extent = std::pow(4.0 * level, 0.25) * 1.0001;
    p_extent = std::sqrt(2.0 * level) * 1.0001;
  }

  SamplingRegion region;
  const auto& rp = L.region_params;
  if (L.region == "disk") {
    DiskRegion d;
    if (rp.size() == 3) d = {rp[0], rp[1], rp[2]};
    else if (!rp.empty()) throw ConfigError("field 'liouville.region_params'", "disk takes [q0, p0, radius]");
    region = d;
  } else if (L.region == "box") {
    BoxRegion b;
    if (rp.size() == 4) b = {rp[0], rp[1], rp[2], rp[3]};
    else if (!rp.empty()) throw ConfigError("field 'liouville.region_params'", "box takes [q_lo, q_hi, p_lo, p_hi]");
    region = b;
  } else {
    if (rp.size() > 1) throw ConfigError("field 'liouville.region_params'", "sublevel takes [level]");
    region = SublevelRegion{energy, level, BoxRegion{-q_extent, q_extent, -p_extent, p_extent}};
  }

  std::vector<Observable> obs;
  for (const auto& name : L.observables) {
    try {
      obs.push_back(named_observable(name));
    } catch (const Error&) {
      throw ConfigError("field 'liouville.observables'", "unknown observable '" + name + "'");
    }
  }
  const DriftReport rep = liouville_drift(setup, L.t, L.samples, obs, region, cfg.seed, ctx.workers);

  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"observable", e.name},
                       {"mean_pre", e.mean_pre},
                       {"mean_post", e.mean_post},
                       {"drift", e.drift},
                       {"std_error", e.std_error},
                       {"pass", e.pass}});
    const double allowed = tol["sigma_threshold"] * e.std_error +
                           16.0 * std::numeric_limits<double>::epsilon() * std::fabs(e.mean_pre);
    ctx.checks.at_most("drift_" + e.name, std::fabs(e.drift), allowed);
    if (e.name == "q2+p2" && L.system == "oscillator" && L.x[1] == 0.0 && L.x[0] == L.x[2]) {
      // On the isotropic oscillator the radius is conserved to rounding.
      ctx.checks.at_most("radial_drift_relative", std::fabs(e.drift) / std::max(1.0, std::fabs(e.mean_pre)),
                         tol["radial_drift"]);
    }
  }
  ctx.results = {{"system", L.system},
                 {"scheme", to_string(setup.scheme)},
                 {"t", L.t},
                 {"samples", rep.samples},
                 {"region", L.region},
                 {"seed", rep.seed},
                 {"chunk_size", rep.chunk_size},
                 {"substreams", rep.substreams},
                 {"entries", entries}};
  if (L.system == "oscillator") ctx.results["x"] = L.x;
  else ctx.results["dt"] = L.dt;
  ctx.work["flowed_points"] = rep.samples;
}

void cmd_resonance(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto r = resonance_classify(to_vector(*cfg.omega), cfg.k_max, cfg.resonance_tol);
  ctx.results = {{"omega", *cfg.omega},
                 {"K_max", r.max_order},
                 {"tol", cfg.resonance_tol},
                 {"resonant", r.resonant},
                 {"witness", r.resonant ? json(r.witness) : json(nullptr)}};
}

}  // namespace

RunResult execute(const RunConfig& cfg, unsigned workers) {
  const Tolerances tol(tolerance_defaults(cfg.command), cfg.tolerances);
  Context ctx{cfg, workers, tol};
  const auto started = std::chrono::steady_clock::now();
  RunResult out;
  json status;
  try {
    if (cfg.command == "hannay") cmd_hannay(ctx);
    else if (cfg.command == "berry") cmd_berry(ctx);
    else if (cfg.command == "verify-relation") cmd_verify_relation(ctx);
    else if (cfg.command == "aa-phase") cmd_aa_phase(ctx);
    else if (cfg.command == "koopman-check") cmd_koopman_check(ctx);
    else if (cfg.command == "liouville-check") cmd_liouville_check(ctx);
    else if (cfg.command == "resonance") cmd_resonance(ctx);
    const bool has_checks = !ctx.checks.list.empty();
    out.exit_code = ctx.checks.all ? kExitOk : kExitNumerical;
    status = {{"outcome", !has_checks ? "ok" : (ctx.checks.all ? "pass" : "fail")},
              {"exit_code", out.exit_code},
              {"checks", ctx.checks.list}};
  } catch (const Error& e) {
    out.exit_code = kExitNumerical;
    status = {{"outcome", "error"},
              {"exit_code", out.exit_code},
              {"error_kind", to_string(e.kind())},
              {"message", e.what()},
              {"checks", ctx.checks.list}};
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json report = {{"schema_version", kSchemaVersion},
                 {"command", cfg.command},
                 {"config", cfg.echo},
                 {"results", ctx.results},
                 {"tolerances", tol.to_json()},
                 {"timing", {{"wall_seconds", cfg.record_wall_time ? json(wall) : json(nullptr)},
                             {"work", ctx.work}}},
                 {"status", status}};
  if (!ctx.oracle.is_null()) report["oracle"] = ctx.oracle;
  if (!ctx.convergence.is_null()) report["convergence"] = ctx.convergence;
  out.report = std::move(report);
  return out;
}

std::string resolve_output_path(const RunConfig& config, const std::optional<std::string>& out_flag) {
  if (out_flag) return *out_flag;
  if (config.output) return *config.output;
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv(kOutDirVariable); env && *env) dir = env;
  return (dir / (config.command + "_report.json")).string();
}

int run(const RunConfig& config, const std::optional<std::string>& out_flag, unsigned workers,
        std::ostream& log) {
  RunResult r = execute(config, workers);
  const std::string path = resolve_output_path(config, out_flag);
  write_text_file(path, serialize_report(r.report));

  if (config.tables) {
    // The flat table is read back out of the report so the two agree byte for byte.
    if (config.command == "verify-relation" && r.report["results"].contains("rows")) {
      std::ostringstream csv;
      csv << "mode,s,beta,residual\n";
      for (const auto& row : r.report["results"]["rows"]) {
        std::string mode;
        for (std::size_t i = 0; i < row["mode"].size(); ++i) {
          mode += (i ? " " : "") + std::to_string(row["mode"][i].get<int>());
        }
        csv << mode << "," << format_double(row["s"].get<double>()) << ","
            << format_double(row["beta"].get<double>()) << ","
            << format_double(row["residual"].get<double>()) << "\n";
      }
      std::filesystem::path p(path);
      write_text_file((p.parent_path() / (p.stem().string() + "_residuals.csv")).string(), csv.str());
    }
  }

  const auto& status = r.report["status"];
  log << config.command << ": " << status["outcome"].get<std::string>();
  if (status.contains("message")) log << " (" << status["message"].get<std::string>() << ")";
  for (const auto& c : status["checks"]) {
    if (!c["pass"].get<bool>()) log << "; failed " << c["name"].get<std::string>();
  }
  log << "; report " << path << "\n";
  return r.exit_code;
}

}  // namespace hannay::cli
