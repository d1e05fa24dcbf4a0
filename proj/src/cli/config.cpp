#include "hannay/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hannay::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

[[noreturn]] void bad(const std::string& path, const std::string& message) {
  throw ConfigError("field '" + path + "'", message);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(path, "must be finite");
  return d;
}

long long integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e15) {
      return static_cast<long long>(d);
    }
  }
  bad(path, "expected an integer");
}

std::size_t count(const json& v, const std::string& path, std::size_t minimum = 0) {
  const long long n = integer(v, path);
  if (n < static_cast<long long>(minimum)) {
    bad(path, "must be at least " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(n);
}

std::vector<double> vector_of(const json& v, const std::string& path) {
  if (v.is_number()) return {number(v, path)};
  if (!v.is_array() || v.empty()) bad(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], index(path, i)));
  return out;
}

std::vector<int> int_vector(const json& v, const std::string& path) {
  if (v.is_number()) return {static_cast<int>(integer(v, path))};
  if (!v.is_array() || v.empty()) bad(path, "expected a nonempty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(static_cast<int>(integer(v[i], index(path, i))));
  }
  return out;
}

Complex complex_of(const json& v, const std::string& path) {
  if (v.is_number()) return {number(v, path), 0.0};
  if (v.is_array() && v.size() == 2) return {number(v[0], index(path, 0)), number(v[1], index(path, 1))};
  bad(path, "expected a number or a [re, im] pair");
}

std::string string_of(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) bad(path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) bad(join(path, it.key()), "unknown field");
  }
}

FamilySpec parse_family(const json& v) {
  const std::string path = "family";
  FamilySpec f;
  if (v.is_string()) {
    f.kind = v.get<std::string>();
  } else {
    require_object(v, path);
    reject_unknown(v, path, {"kind", "omega", "beta", "kappa"});
    const json* kind = find(v, "kind");
    if (!kind) bad(join(path, "kind"), "missing");
    f.kind = string_of(*kind, join(path, "kind"));
    if (f.kind == "mobius-rotor") {
      if (const json* o = find(v, "omega")) f.omega_vector = vector_of(*o, join(path, "omega"));
      if (const json* k = find(v, "kappa")) f.kappa = vector_of(*k, join(path, "kappa"));
    } else if (const json* o = find(v, "omega")) {
      f.omega = number(*o, join(path, "omega"));
    }
    if (const json* b = find(v, "beta")) f.beta = number(*b, join(path, "beta"));
  }
  if (f.kind == "oscillator") return f;
  if (f.kind == "anharmonic") return f;
  if (f.kind == "mobius-rotor") {
    if (f.omega_vector.empty()) bad(join(path, "omega"), "missing (frequency per circle)");
    if (f.kappa.empty()) f.kappa.assign(f.omega_vector.size(), 0.5);
    if (f.kappa.size() != f.omega_vector.size()) {
      bad(join(path, "kappa"), "must have one entry per torus dimension");
    }
    return f;
  }
  bad(join(path, "kind"), "unknown family '" + f.kind + "' (oscillator, anharmonic, mobius-rotor)");
}

LoopSpec parse_loop(const json& v) {
  const std::string path = "loop";
  require_object(v, path);
  reject_unknown(v, path,
                 {"kind", "point", "center", "radius", "plane", "phase", "vertices", "reversed",
                  "traversals"});
  LoopSpec l;
  const json* kind = find(v, "kind");
  if (!kind) bad(join(path, "kind"), "missing");
  l.kind = string_of(*kind, join(path, "kind"));
  if (l.kind == "constant") {
    const json* p = find(v, "point");
    if (!p) bad(join(path, "point"), "missing (required by a constant loop)");
    l.point = vector_of(*p, join(path, "point"));
  } else if (l.kind == "circle") {
    const json* c = find(v, "center");
    if (!c) bad(join(path, "center"), "missing (required by a circle loop)");
    l.center = vector_of(*c, join(path, "center"));
    const json* r = find(v, "radius");
    if (!r) bad(join(path, "radius"), "missing (required by a circle loop)");
    l.radius = number(*r, join(path, "radius"));
    if (l.radius < 0.0) bad(join(path, "radius"), "must be non-negative");
    if (const json* pl = find(v, "plane")) {
      const auto axes = int_vector(*pl, join(path, "plane"));
      if (axes.size() != 2 || axes[0] < 0 || axes[1] < 0 || axes[0] == axes[1] ||
          static_cast<std::size_t>(std::max(axes[0], axes[1])) >= l.center.size()) {
        bad(join(path, "plane"), "must be two distinct axis indices of the center");
      }
      l.plane = {static_cast<std::size_t>(axes[0]), static_cast<std::size_t>(axes[1])};
    } else if (l.center.size() < 2) {
      bad(join(path, "center"), "a circle needs at least two parameter axes");
    }
    if (const json* ph = find(v, "phase")) l.phase = number(*ph, join(path, "phase"));
  } else if (l.kind == "polyline") {
    const json* vs = find(v, "vertices");
    if (!vs || !vs->is_array() || vs->size() < 2) {
      bad(join(path, "vertices"), "expected an array of at least 2 points");
    }
    for (std::size_t i = 0; i < vs->size(); ++i) {
      l.vertices.push_back(vector_of((*vs)[i], index(join(path, "vertices"), i)));
      if (l.vertices.back().size() != l.vertices.front().size()) {
        bad(index(join(path, "vertices"), i), "vertices differ in dimension");
      }
    }
  } else {
    bad(join(path, "kind"), "unknown loop '" + l.kind + "' (constant, circle, polyline)");
  }
  if (const json* r = find(v, "reversed")) l.reversed = boolean(*r, join(path, "reversed"));
  if (const json* t = find(v, "traversals")) {
    l.traversals = static_cast<int>(count(*t, join(path, "traversals"), 1));
  }
  return l;
}

std::vector<std::vector<int>> parse_modes(const json& v) {
  const std::string path = "modes";
  std::vector<std::vector<int>> out;
  if (v.is_object()) {
    // {"range": [lo, hi]} for one-dimensional tori.
    reject_unknown(v, path, {"range"});
    const json* r = find(v, "range");
    if (!r) bad(join(path, "range"), "missing");
    const auto lohi = int_vector(*r, join(path, "range"));
    if (lohi.size() != 2 || lohi[0] > lohi[1]) bad(join(path, "range"), "expected [lo, hi] with lo <= hi");
    for (int m = lohi[0]; m <= lohi[1]; ++m) out.push_back({m});
    return out;
  }
  if (!v.is_array() || v.empty()) bad(path, "expected a nonempty array of modes");
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(int_vector(v[i], index(path, i)));
    if (out.back().size() != out.front().size()) bad(index(path, i), "modes differ in dimension");
  }
  return out;
}

void parse_oracle(const json& v, OracleSpec& o) {
  const std::string path = "oracle";
  if (v.is_boolean()) {
    o.enabled = v.get<bool>();
    return;
  }
  require_object(v, path);
  reject_unknown(v, path, {"enabled", "phase_samples", "substep"});
  o.enabled = true;
  if (const json* e = find(v, "enabled")) o.enabled = boolean(*e, join(path, "enabled"));
  if (const json* p = find(v, "phase_samples")) o.phase_samples = count(*p, join(path, "phase_samples"), 1);
  if (const json* s = find(v, "substep")) {
    o.substep = number(*s, join(path, "substep"));
    if (!(o.substep > 0.0)) bad(join(path, "substep"), "must be positive");
  }
}

void parse_liouville(const json& v, LiouvilleSpec& l) {
  const std::string path = "liouville";
  require_object(v, path);
  reject_unknown(v, path,
                 {"system", "x", "scheme", "dt", "t", "N", "observables", "region", "region_params"});
  if (const json* s = find(v, "system")) l.system = string_of(*s, join(path, "system"));
  if (l.system != "oscillator" && l.system != "quartic") {
    bad(join(path, "system"), "unknown system '" + l.system + "' (oscillator, quartic)");
  }
  if (const json* x = find(v, "x")) l.x = vector_of(*x, join(path, "x"));
  if (l.x.size() != 3) bad(join(path, "x"), "oscillator parameters are (X, Y, Z)");
  if (const json* s = find(v, "scheme")) l.scheme = string_of(*s, join(path, "scheme"));
  if (const json* d = find(v, "dt")) {
    l.dt = number(*d, join(path, "dt"));
    if (!(l.dt > 0.0)) bad(join(path, "dt"), "must be positive");
  }
  if (const json* t = find(v, "t")) l.t = number(*t, join(path, "t"));
  if (const json* n = find(v, "N")) l.samples = count(*n, join(path, "N"), 1000);
  if (const json* o = find(v, "observables")) {
    if (!o->is_array() || o->empty()) bad(join(path, "observables"), "expected a nonempty array of names");
    l.observables.clear();
    for (std::size_t i = 0; i < o->size(); ++i) {
      l.observables.push_back(string_of((*o)[i], index(join(path, "observables"), i)));
    }
  }
  if (const json* r = find(v, "region")) l.region = string_of(*r, join(path, "region"));
  if (l.region != "disk" && l.region != "box" && l.region != "sublevel") {
    bad(join(path, "region"), "unknown region '" + l.region + "' (disk, box, sublevel)");
  }
  if (const json* p = find(v, "region_params")) l.region_params = vector_of(*p, join(path, "region_params"));
}

std::size_t line_of(const std::string& text, std::size_t byte, std::size_t& column) {
  std::size_t line = 1, last_break = 0;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      last_break = i + 1;
    }
  }
  column = byte >= last_break ? byte - last_break : 0;
  return line;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& command,
                       std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t column = 0;
    const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1, column);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column + 1),
                      "not valid JSON");
  }
  if (!doc.is_object()) throw ConfigError("document", "the configuration must be a JSON object");

  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw ConfigError("command", "unknown command '" + command + "'");
  }
  reject_unknown(doc, "",
                 {"command", "family", "mu", "loop", "K", "Q", "fd_step", "modes", "epsilons",
                  "oracle", "convergence_K", "omega", "period", "samples", "state", "chains",
                  "N_max", "t", "s", "trials", "liouville", "K_max", "resonance_tol", "seed",
                  "output", "tables", "record_wall_time", "tolerances", "comment"});

  RunConfig c;
  c.command = command;
  if (const json* cmd = find(doc, "command")) {
    const std::string declared = string_of(*cmd, "command");
    if (declared != command) {
      bad("command", "config is for '" + declared + "' but the subcommand is '" + command + "'");
    }
  }

  if (const json* f = find(doc, "family")) c.family = parse_family(*f);
  if (const json* m = find(doc, "mu")) c.mu = vector_of(*m, "mu");
  if (const json* l = find(doc, "loop")) c.loop = parse_loop(*l);
  if (const json* k = find(doc, "K")) c.K = count(*k, "K", 1);
  if (const json* q = find(doc, "Q")) c.Q = count(*q, "Q", 4);
  if (const json* d = find(doc, "fd_step")) {
    c.fd_step = number(*d, "fd_step");
    if (!(c.fd_step > 0.0)) bad("fd_step", "must be positive");
  }
  if (const json* m = find(doc, "modes")) c.modes = parse_modes(*m);
  if (const json* e = find(doc, "epsilons")) c.epsilons = vector_of(*e, "epsilons");
  if (const json* o = find(doc, "oracle")) parse_oracle(*o, c.oracle);
  if (const json* k = find(doc, "convergence_K")) {
    if (!k->is_array() || k->size() < 3) bad("convergence_K", "expected at least 3 segment counts");
    for (std::size_t i = 0; i < k->size(); ++i) {
      c.convergence_K.push_back(count((*k)[i], index("convergence_K", i), 8));
    }
  }
  if (const json* o = find(doc, "omega")) c.omega = vector_of(*o, "omega");
  if (const json* p = find(doc, "period")) {
    c.period = number(*p, "period");
    if (!(*c.period > 0.0)) bad("period", "must be positive");
  }
  if (const json* s = find(doc, "samples")) c.samples = count(*s, "samples", 1);
  if (const json* st = find(doc, "state")) {
    if (!st->is_array() || st->empty()) bad("state", "expected a nonempty array of {mode, amplitude}");
    for (std::size_t i = 0; i < st->size(); ++i) {
      const json& e = (*st)[i];
      const std::string p = index("state", i);
      require_object(e, p);
      reject_unknown(e, p, {"mode", "amplitude"});
      const json* m = find(e, "mode");
      const json* a = find(e, "amplitude");
      if (!m) bad(join(p, "mode"), "missing");
      if (!a) bad(join(p, "amplitude"), "missing");
      c.state.push_back({int_vector(*m, join(p, "mode")), complex_of(*a, join(p, "amplitude"))});
    }
  }
  if (const json* ch = find(doc, "chains")) {
    if (!ch->is_array()) bad("chains", "expected an array of ray chains");
    for (std::size_t i = 0; i < ch->size(); ++i) {
      const json& chain = (*ch)[i];
      const std::string p = index("chains", i);
      if (!chain.is_array() || chain.empty()) bad(p, "expected a nonempty array of vectors");
      std::vector<std::vector<Complex>> rays;
      for (std::size_t k = 0; k < chain.size(); ++k) {
        const json& ray = chain[k];
        const std::string rp = index(p, k);
        if (!ray.is_array() || ray.empty()) bad(rp, "expected an array of complex amplitudes");
        std::vector<Complex> amps;
        for (std::size_t j = 0; j < ray.size(); ++j) amps.push_back(complex_of(ray[j], index(rp, j)));
        rays.push_back(std::move(amps));
      }
      c.chains.push_back(std::move(rays));
    }
  }
  if (const json* n = find(doc, "N_max")) c.n_max = static_cast<int>(count(*n, "N_max", 0));
  if (const json* t = find(doc, "t")) c.t = number(*t, "t");
  if (const json* s = find(doc, "s")) c.s = number(*s, "s");
  if (const json* t = find(doc, "trials")) c.trials = count(*t, "trials", 1);
  if (const json* l = find(doc, "liouville")) parse_liouville(*l, c.liouville);
  if (const json* k = find(doc, "K_max")) c.k_max = static_cast<int>(count(*k, "K_max", 1));
  if (const json* r = find(doc, "resonance_tol")) c.resonance_tol = number(*r, "resonance_tol");
  if (const json* s = find(doc, "seed")) {
    const long long v = integer(*s, "seed");
    if (v < 0) bad("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(v);
  }
  if (seed_override) {
    c.seed = *seed_override;
    doc["seed"] = *seed_override;
  }
  if (const json* o = find(doc, "output")) c.output = string_of(*o, "output");
  if (const json* t = find(doc, "tables")) c.tables = boolean(*t, "tables");
  if (const json* w = find(doc, "record_wall_time")) c.record_wall_time = boolean(*w, "record_wall_time");
  if (const json* t = find(doc, "tolerances")) {
    require_object(*t, "tolerances");
    for (auto it = t->begin(); it != t->end(); ++it) {
      const double v = number(it.value(), join("tolerances", it.key()));
      if (!(v >= 0.0)) bad(join("tolerances", it.key()), "must be non-negative");
      c.tolerances[it.key()] = v;
    }
  }

  // Fields each command cannot run without.
  auto need = [&](bool present, const char* field) {
    if (!present) bad(field, std::string("missing (required by command ") + command + ")");
  };
  if (command == "hannay" || command == "berry" || command == "verify-relation") {
    need(c.family.has_value(), "family");
    need(c.mu.has_value(), "mu");
    need(c.loop.has_value(), "loop");
  }
  if (command == "berry" || command == "verify-relation") need(c.modes.has_value(), "modes");
  if (command == "aa-phase") {
    if (c.chains.empty()) {
      need(c.omega.has_value(), "omega");
      need(c.period.has_value(), "period");
      need(!c.state.empty(), "state");
    }
  }
  if (command == "koopman-check") need(c.omega.has_value(), "omega");
  if (command == "resonance") need(c.omega.has_value(), "omega");

  c.echo = std::move(doc);
  return c;
}

RunConfig load_config(const std::string& path, const std::string& command,
                      std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("file '" + path + "'", "cannot be read");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), command, seed_override);
}

}  // namespace hannay::cli
