#include "mhdnat/io/config.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mhdnat/expression.hpp"
#include "mhdnat/families.hpp"
#include "mhdnat/field_expr.hpp"

namespace mhdnat {

using nlohmann::json;

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(fmt::format("config key \"{}\": {}", key, message)), key_(std::move(key)) {}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void allow(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(join(path, it.key()), "unknown key");
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string text(const json& j, const std::string& key) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return fmt::format("{:.17g}", j.get<double>());
  throw ConfigError(key, "expected an expression string or a number");
}

std::string text_or(const json& obj, const char* key, const std::string& path, const std::string& fallback) {
  const json* v = find(obj, key);
  return v ? text(*v, join(path, key)) : fallback;
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  const json* v = find(obj, key);
  return v ? config_number(*v, join(path, key)) : fallback;
}

int int_or(const json& obj, const char* key, const std::string& path, int fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v->get<int>();
}

Interval interval(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(key, "expected [lo, hi]");
  const Interval iv{config_number(j[0], key + "[0]"), config_number(j[1], key + "[1]")};
  if (!(iv.lo <= iv.hi)) throw ConfigError(key, "lo must not exceed hi");
  return iv;
}

template <class Fn, class Names>
Fn parse_fn(const json& obj, const char* key, const std::string& path, const Names& names, const char* fallback) {
  const json* v = find(obj, key);
  if (!v && !fallback) throw ConfigError(join(path, key), "required");
  const std::string t = v ? text(*v, join(path, key)) : fallback;
  try {
    return Fn::parse(t, names);
  } catch (const std::exception& e) {
    throw ConfigError(join(path, key), e.what());
  }
}

ScalarFn1 fn1(const json& o, const char* key, const std::string& path, const char* var, const char* fallback) {
  return parse_fn<ScalarFn1>(o, key, path, std::array<std::string, 1>{var}, fallback);
}
ScalarFn2 fn2(const json& o, const char* key, const std::string& path, std::array<std::string, 2> vars,
              const char* fallback) {
  return parse_fn<ScalarFn2>(o, key, path, vars, fallback);
}
ScalarFn3 fn3(const json& o, const char* key, const std::string& path, std::array<std::string, 3> vars,
              const char* fallback) {
  return parse_fn<ScalarFn3>(o, key, path, vars, fallback);
}

std::array<std::string, 3> triple(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(key, "expected an array of 3 entries");
  return {text(j[0], key + "[0]"), text(j[1], key + "[1]"), text(j[2], key + "[2]")};
}

DomainBox domain_of(const json* j, const std::string& path, DomainBox box) {
  if (!j) return box;
  allow(*j, path, {"t", "xi1", "xi2", "xi3"});
  static const char* names[] = {"t", "xi1", "xi2", "xi3"};
  for (int a = 0; a < 4; ++a)
    if (const json* v = find(*j, names[a])) box.axes[a] = interval(*v, join(path, names[a]));
  return box;
}

AxisSpec axis_spec(const json& j, const std::string& key) {
  allow(j, key, {"lo", "hi", "n"});
  AxisSpec a{number_or(j, "lo", key, 0.0), number_or(j, "hi", key, 0.0), int_or(j, "n", key, 1)};
  if (a.n < 1) throw ConfigError(join(key, "n"), "must be positive");
  return a;
}

CellAxis cell_axis(const json& j, const std::string& key, CellAxis a) {
  allow(j, key, {"lo", "hi", "cells"});
  a.lo = number_or(j, "lo", key, a.lo);
  a.hi = number_or(j, "hi", key, a.hi);
  a.cells = int_or(j, "cells", key, a.cells);
  if (a.cells < 1) throw ConfigError(join(key, "cells"), "must be positive");
  if (!(a.hi > a.lo)) throw ConfigError(key, "hi must exceed lo");
  return a;
}

TorusKnotParams torus_params(const json& p, const std::string& path, TorusKnotParams base, bool preset) {
  allow(p, path, {"A", "B", "phi", "a", "b", "k", "u", "delta"});
  const std::array<std::string, 2> xi{"xi2", "xi3"};
  if (!preset || find(p, "A")) base.A = fn2(p, "A", path, xi, nullptr);
  if (!preset || find(p, "B")) base.B = fn2(p, "B", path, xi, nullptr);
  if (!preset || find(p, "phi")) base.phi = fn1(p, "phi", path, "mu", "0");
  if (!preset || find(p, "a")) base.a = fn1(p, "a", path, "mu", "0");
  if (!preset || find(p, "b")) base.b = fn1(p, "b", path, "mu", nullptr);
  base.k = number_or(p, "k", path, preset ? base.k : 2.0);
  base.u = fn1(p, "u", path, "s", preset ? base.u.text().c_str() : "0");
  base.delta = number_or(p, "delta", path, base.delta);
  return base;
}

Solution build_family(const std::string& family, const json& params, const FamilyOptions& opt) {
  const std::string path = "params";
  const std::array<std::string, 3> mu_xi{"mu", "xi2", "xi3"};
  const std::array<std::string, 2> xi{"xi2", "xi3"};
  auto optional_f = [&](std::optional<ScalarFn2>& slot) {
    if (find(params, "f")) slot = fn2(params, "f", path, xi, nullptr);
    return slot ? &*slot : nullptr;
  };
  if (family == "static") {
    allow(params, path, {});
    return build_static(opt);
  }
  if (family == "field_aligned") {
    allow(params, path, {"tau"});
    const json* t = find(params, "tau");
    if (!t) throw ConfigError("params.tau", "required");
    const auto s = triple(*t, "params.tau");
    VectorFn3 tau;
    for (int i = 0; i < 3; ++i) {
      try {
        tau[i] = ScalarFn3::parse(s[i], mu_xi);
      } catch (const std::exception& e) {
        throw ConfigError(fmt::format("params.tau[{}]", i), e.what());
      }
    }
    return build_field_aligned(tau, opt);
  }
  if (family == "dim3") {
    allow(params, path, {"tau1", "tau2", "tau3", "u1", "u2", "f"});
    Dim3Params d{fn3(params, "tau1", path, mu_xi, nullptr), fn3(params, "tau2", path, mu_xi, nullptr),
                 fn1(params, "tau3", path, "mu", nullptr), fn1(params, "u1", path, "s", "0"),
                 fn1(params, "u2", path, "s", "0")};
    std::optional<ScalarFn2> f;
    return build_dim3(d, opt, optional_f(f));
  }
  if (family == "jet") {
    allow(params, path, {"A", "B", "alpha", "beta", "a", "b", "phi", "u1", "u2"});
    JetParams j;
    j.A = fn2(params, "A", path, xi, nullptr);
    j.B = fn2(params, "B", path, xi, nullptr);
    j.alpha = fn1(params, "alpha", path, "mu", "1");
    j.beta = fn1(params, "beta", path, "mu", "1");
    j.a = fn1(params, "a", path, "mu", "0");
    j.b = fn1(params, "b", path, "mu", "0");
    j.phi = fn1(params, "phi", path, "mu", "0");
    j.u1 = fn1(params, "u1", path, "s", "0");
    j.u2 = fn1(params, "u2", path, "s", "0");
    return build_jet(j, opt);
  }
  if (family == "dim2") {
    allow(params, path, {"tau1", "lambda", "tau2", "tau3", "u", "f"});
    const std::array<std::string, 2> ml{"mu", "lambda"};
    Dim2Params d{fn3(params, "tau1", path, mu_xi, nullptr), fn3(params, "lambda", path, mu_xi, nullptr),
                 fn2(params, "tau2", path, ml, nullptr), fn2(params, "tau3", path, ml, nullptr),
                 fn1(params, "u", path, "s", "0")};
    std::optional<ScalarFn2> f;
    return build_dim2(d, opt, optional_f(f));
  }
  if (family == "torus_knot") return build_torus_knot(torus_params(params, path, TorusKnotParams{}, false), opt);
  if (family == "sol13") return build_torus_knot(torus_params(params, path, sol13_params(), true), opt);
  if (family == "sol14") return build_torus_knot(torus_params(params, path, sol14_params(), true), opt);
  if (family == "explicit") {
    allow(params, path, {"gamma", "rho", "P", "p", "P_total", "h", "f"});
    Solution s;
    s.family = "explicit";
    const json* g = find(params, "gamma");
    if (!g) throw ConfigError("params.gamma", "required");
    auto field = [&](const char* key) {
      try {
        return parse_scalar_field(text(params.at(key), join(path, key)), opt.box);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw ConfigError(join(path, key), e.what());
      }
    };
    try {
      s.gamma = parse_map(triple(*g, "params.gamma"), opt.box);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("params.gamma", e.what());
    }
    if (const json* r = find(params, "rho")) {
      if (r->is_number())
        s.density = r->get<double>();
      else
        s.density = field("rho");
    }
    const bool total = find(params, "P"), gas = find(params, "p");
    if (total == gas) throw ConfigError("params", "exactly one of P (total pressure) or p (gas pressure) is required");
    if (total) {
      s.pressure = TotalPressure{field("P")};
    } else {
      GasPressure gp;
      gp.p = field("p");
      if (find(params, "P_total")) gp.P = field("P_total");
      s.pressure = gp;
      if (const json* h = find(params, "h")) {
        try {
          s.h = StateFunction::parse(text(*h, "params.h"));
        } catch (const std::exception& e) {
          throw ConfigError("params.h", e.what());
        }
      }
    }
    s.f = fn2(params, "f", path, xi, "1");
    s.diff = opt.diff;
    s.set_domain(opt.box);
    return s;
  }
  throw ConfigError("family", fmt::format("unknown family \"{}\"", family));
}

// Applies one pipeline entry; returns its name.
std::string apply_step(const json& step, const std::string& path, Solution& sol) {
  if (!step.is_object() || !find(step, "type") || !step["type"].is_string())
    throw ConfigError(join(path, "type"), "pipeline entries need a string \"type\"");
  const std::string type = step["type"].get<std::string>();
  const std::array<std::string, 2> xi{"xi2", "xi3"};
  std::optional<Transform> tr;
  if (type == "time_shift") {
    allow(step, path, {"type", "dt"});
    tr = TimeShift{number_or(step, "dt", path, 0.0)};
  } else if (type == "rotation") {
    allow(step, path, {"type", "axis", "angle"});
    Rotation r;
    if (const json* a = find(step, "axis")) {
      const auto s = triple(*a, join(path, "axis"));
      for (int i = 0; i < 3; ++i) r.axis[i] = config_number(json(s[i]), fmt::format("{}.axis[{}]", path, i));
    }
    r.angle = number_or(step, "angle", path, 0.0);
    tr = r;
  } else if (type == "dilation1") {
    allow(step, path, {"type", "eps"});
    tr = Dilation1{number_or(step, "eps", path, 0.0)};
  } else if (type == "dilation2") {
    allow(step, path, {"type", "eps"});
    tr = Dilation2{number_or(step, "eps", path, 0.0)};
  } else if (type == "galilean") {
    allow(step, path, {"type", "alpha"});
    const json* a = find(step, "alpha");
    if (!a) throw ConfigError(join(path, "alpha"), "required");
    const auto s = triple(*a, join(path, "alpha"));
    GeneralizedGalilean g;
    for (int i = 0; i < 3; ++i) {
      try {
        g.alpha[i] = ScalarFn1::parse(s[i], {"t"});
      } catch (const std::exception& e) {
        throw ConfigError(fmt::format("{}.alpha[{}]", path, i), e.what());
      }
    }
    tr = g;
  } else if (type == "pressure_shift") {
    allow(step, path, {"type", "beta"});
    tr = PressureShift{fn1(step, "beta", path, "t", nullptr)};
  } else if (type == "reparametrization") {
    allow(step, path, {"type", "a", "eta2", "eta3", "domain"});
    Reparametrization r{fn2(step, "a", path, xi, "0"), fn2(step, "eta2", path, xi, "xi2"),
                        fn2(step, "eta3", path, xi, "xi3"), std::nullopt};
    if (const json* d = find(step, "domain")) r.box = domain_of(d, join(path, "domain"), sol.domain);
    tr = r;
  } else if (type == "cauchy_equivalence") {
    allow(step, path, {"type", "eta2", "eta3", "domain"});
    CauchyEquivalence c{fn2(step, "eta2", path, xi, "xi2"), fn2(step, "eta3", path, xi, "xi3"), std::nullopt};
    if (const json* d = find(step, "domain")) c.box = domain_of(d, join(path, "domain"), sol.domain);
    tr = c;
  } else if (type == "equivalence") {
    allow(step, path, {"type", "alpha", "beta", "kappa"});
    const CompressibleEquivalence e{number_or(step, "alpha", path, 1.0), number_or(step, "beta", path, 1.0),
                                    number_or(step, "kappa", path, 0.0)};
    try {
      sol = apply_equiv(e, sol);
    } catch (const std::exception& ex) {
      throw ConfigError(path, ex.what());
    }
    return type;
  } else {
    throw ConfigError(join(path, "type"), fmt::format("unknown transform \"{}\"", type));
  }
  try {
    sol = mhdnat::apply(*tr, sol);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return name_of(*tr);
}

VerifyConfig verify_of(const json* j) {
  VerifyConfig v;
  const double two_pi = 6.283185307179586;
  std::array<Interval, 4> ranges{Interval{0.0, 1.0}, Interval{0.0, two_pi}, Interval{0.0, two_pi}, Interval{0.5, 1.0}};
  int n = 17;
  if (j) {
    allow(*j, "verify", {"grid", "checks", "tolerance", "exec"});
    if (const json* g = find(*j, "grid")) {
      allow(*g, "verify.grid", {"n", "t", "xi1", "xi2", "xi3"});
      n = int_or(*g, "n", "verify.grid", n);
      if (n < 1) throw ConfigError("verify.grid.n", "must be positive");
      static const char* names[] = {"t", "xi1", "xi2", "xi3"};
      for (int a = 0; a < 4; ++a)
        if (const json* r = find(*g, names[a])) ranges[a] = interval(*r, std::string("verify.grid.") + names[a]);
    }
    if (const json* c = find(*j, "checks")) {
      if (!c->is_array()) throw ConfigError("verify.checks", "expected an array");
      v.checks.clear();
      static const std::set<std::string> known{"incompressible", "compressible", "eulerian", "cauchy", "wave"};
      for (std::size_t i = 0; i < c->size(); ++i) {
        const std::string key = fmt::format("verify.checks[{}]", i);
        if (!(*c)[i].is_string() || !known.count((*c)[i].get<std::string>()))
          throw ConfigError(key, "expected one of incompressible, compressible, eulerian, cauchy, wave");
        v.checks.push_back((*c)[i].get<std::string>());
      }
    }
    v.tolerance = number_or(*j, "tolerance", "verify", v.tolerance);
    if (const json* e = find(*j, "exec")) {
      if (*e == "serial")
        v.exec = Execution::serial;
      else if (*e != "parallel")
        throw ConfigError("verify.exec", "expected \"serial\" or \"parallel\"");
    }
  }
  for (int a = 0; a < 4; ++a) v.grid.axes[a] = {ranges[a].lo, ranges[a].hi, n};
  return v;
}

Box3 box3(const json& j, const std::string& path) {
  allow(j, path, {"x", "y", "z"});
  Box3 b;
  static const char* names[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i)
    if (const json* v = find(j, names[i])) b[i] = interval(*v, join(path, names[i]));
  return b;
}

EulerianConfig eulerian_of(const json& j) {
  allow(j, "eulerian", {"B0", "rho0", "u0", "domain", "seed_surface", "transversality", "grid"});
  const json* B = find(j, "B0");
  if (!B) throw ConfigError("eulerian.B0", "required");
  std::array<std::string, 3> u{"0", "0", "0"};
  if (const json* uu = find(j, "u0")) u = triple(*uu, "eulerian.u0");
  Box3 dom;
  if (const json* d = find(j, "domain")) dom = box3(*d, "eulerian.domain");
  EulerianConfig e;
  try {
    e.data = EulerianInitialData::parse(triple(*B, "eulerian.B0"), text_or(j, "rho0", "eulerian", "1"), u, dom);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError("eulerian", ex.what());
  }
  if (const json* s = find(j, "seed_surface")) {
    try {
      e.seed = SeedSurface::parse(triple(*s, "eulerian.seed_surface"), number_or(j, "transversality", "eulerian", 0.1));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError("eulerian.seed_surface", ex.what());
    }
  }
  if (const json* g = find(j, "grid")) {
    allow(*g, "eulerian.grid", {"xi1", "xi2", "xi3"});
    static const char* names[] = {"xi1", "xi2", "xi3"};
    for (int a = 0; a < 3; ++a) {
      const json* ax = find(*g, names[a]);
      if (!ax) throw ConfigError(std::string("eulerian.grid.") + names[a], "required");
      e.grid[a] = axis_spec(*ax, std::string("eulerian.grid.") + names[a]);
    }
  }
  return e;
}

TraceConfig trace_of(const json& j) {
  allow(j, "trace", {"start", "range", "n", "method", "step", "abs_tol", "rel_tol", "max_param"});
  TraceConfig t;
  if (const json* s = find(j, "start")) {
    const auto v = triple(*s, "trace.start");
    for (int i = 0; i < 3; ++i) t.start[i] = config_number(json(v[i]), fmt::format("trace.start[{}]", i));
  }
  if (const json* r = find(j, "range")) {
    const Interval iv = interval(*r, "trace.range");
    t.lo = iv.lo, t.hi = iv.hi;
  }
  t.n = int_or(j, "n", "trace", t.n);
  if (const json* m = find(j, "method")) {
    if (*m == "rk4")
      t.integrator.method = IntegratorConfig::Method::rk4;
    else if (*m != "rk45")
      throw ConfigError("trace.method", "expected \"rk4\" or \"rk45\"");
  }
  t.integrator.step = number_or(j, "step", "trace", t.integrator.step);
  t.integrator.abs_tol = number_or(j, "abs_tol", "trace", t.integrator.abs_tol);
  t.integrator.rel_tol = number_or(j, "rel_tol", "trace", t.integrator.rel_tol);
  t.integrator.max_param = number_or(j, "max_param", "trace", t.integrator.max_param);
  try {
    t.integrator.validate();
  } catch (const std::exception& e) {
    throw ConfigError("trace", e.what());
  }
  return t;
}

}  // namespace

double config_number(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return eval_constant(j.get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(key, e.what());
    }
  }
  throw ConfigError(key, "expected a number or a constant expression");
}

RunConfig load_config(const json& doc) {
  allow(doc, "", {"family", "params", "domain", "P0", "derivatives", "stencil", "pipeline", "perturb", "verify",
                  "mesh", "line", "eulerian", "trace", "seed", "report"});
  RunConfig rc;
  rc.source = doc;
  if (const json* s = find(doc, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    rc.seed = s->get<std::uint64_t>();
  }
  if (const json* r = find(doc, "report")) {
    if (!r->is_string()) throw ConfigError("report", "expected a path string");
    rc.report = r->get<std::string>();
  }
  rc.verify = verify_of(find(doc, "verify"));
  if (const json* e = find(doc, "eulerian")) rc.eulerian = eulerian_of(*e);
  if (const json* t = find(doc, "trace")) rc.trace = trace_of(*t);

  if (const json* m = find(doc, "mesh")) {
    allow(*m, "mesh", {"t0", "fix", "value", "u", "v", "format"});
    rc.mesh.t0 = number_or(*m, "t0", "mesh", rc.mesh.t0);
    if (const json* f = find(*m, "fix")) {
      if (*f == "xi2")
        rc.mesh.fix = FixAxis::xi2;
      else if (*f != "xi3")
        throw ConfigError("mesh.fix", "expected \"xi2\" or \"xi3\"");
    }
    rc.mesh.value = number_or(*m, "value", "mesh", rc.mesh.value);
    if (const json* u = find(*m, "u")) rc.mesh.u = cell_axis(*u, "mesh.u", rc.mesh.u);
    if (const json* v = find(*m, "v")) rc.mesh.v = cell_axis(*v, "mesh.v", rc.mesh.v);
    if (const json* f = find(*m, "format")) {
      if (!f->is_string() || (*f != "obj" && *f != "vtk")) throw ConfigError("mesh.format", "expected \"obj\" or \"vtk\"");
      rc.mesh.format = f->get<std::string>();
    }
  }
  if (const json* l = find(doc, "line")) {
    allow(*l, "line", {"t0", "xi2", "xi3", "range", "n", "closure_tol"});
    rc.line.t0 = number_or(*l, "t0", "line", rc.line.t0);
    rc.line.xi2 = number_or(*l, "xi2", "line", rc.line.xi2);
    rc.line.xi3 = number_or(*l, "xi3", "line", rc.line.xi3);
    if (const json* r = find(*l, "range")) {
      const Interval iv = interval(*r, "line.range");
      rc.line.lo = iv.lo, rc.line.hi = iv.hi;
    }
    rc.line.n = int_or(*l, "n", "line", rc.line.n);
    rc.line.closure_tol = number_or(*l, "closure_tol", "line", rc.line.closure_tol);
  }

  const json* fam = find(doc, "family");
  if (!fam) {
    if (!rc.eulerian) throw ConfigError("family", "required (or give an eulerian section)");
    return rc;
  }
  if (!fam->is_string()) throw ConfigError("family", "expected a string");
  rc.family = fam->get<std::string>();

  FamilyOptions opt;
  opt.box = domain_of(find(doc, "domain"), "domain", opt.box);
  opt.P0 = number_or(doc, "P0", "", opt.P0);
  if (const json* d = find(doc, "derivatives")) {
    if (*d == "finite_difference")
      opt.diff.mode = DerivativeMode::finite_difference;
    else if (*d != "closed_form")
      throw ConfigError("derivatives", "expected \"closed_form\" or \"finite_difference\"");
  }
  if (const json* s = find(doc, "stencil")) {
    allow(*s, "stencil", {"order", "step", "richardson"});
    opt.diff.stencil.order = int_or(*s, "order", "stencil", opt.diff.stencil.order);
    opt.diff.stencil.step = number_or(*s, "step", "stencil", opt.diff.stencil.step);
    if (const json* r = find(*s, "richardson")) {
      if (!r->is_boolean()) throw ConfigError("stencil.richardson", "expected true or false");
      opt.diff.stencil.richardson = r->get<bool>();
    }
    try {
      opt.diff.stencil.validate();
    } catch (const std::exception& e) {
      throw ConfigError("stencil", e.what());
    }
  }

  const json empty = json::object();
  const json* params = find(doc, "params");
  Solution sol;
  try {
    sol = build_family(rc.family, params ? *params : empty, opt);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("params", e.what());
  }
  sol.diff = opt.diff;

  if (const json* p = find(doc, "pipeline")) {
    if (!p->is_array()) throw ConfigError("pipeline", "expected an array");
    for (std::size_t i = 0; i < p->size(); ++i)
      rc.steps.push_back(apply_step((*p)[i], fmt::format("pipeline[{}]", i), sol));
  }

  if (const json* p = find(doc, "perturb")) {
    allow(*p, "perturb", {"component", "delta", "amplitude"});
    const json* c = find(*p, "component");
    const std::string delta_text = text_or(*p, "delta", "perturb", "1");
    const double amp = number_or(*p, "amplitude", "perturb", 1e-3);
    ScalarField delta;
    try {
      delta = parse_scalar_field(delta_text, sol.domain);
    } catch (const std::exception& e) {
      throw ConfigError("perturb.delta", e.what());
    }
    if (c && c->is_string() && *c == "pressure") {
      sol = perturb_pressure(sol, delta, amp);
    } else {
      if (!c || !c->is_number_integer() || c->get<int>() < 0 || c->get<int>() > 2)
        throw ConfigError("perturb.component", "expected 0, 1, 2 or \"pressure\"");
      sol = perturb(sol, c->get<int>(), delta, amp);
    }
  }
  rc.solution = std::move(sol);
  return rc;
}

RunConfig load_config_file(const std::string& path) {
  std::string content;
  if (path == "-") {
    content.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot read config file {}", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    content = ss.str();
  }
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", fmt::format("invalid JSON: {}", e.what()));
  }
  return load_config(doc);
}

}  // namespace mhdnat
