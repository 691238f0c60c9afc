#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "symorb/conditions.hpp"
#include "symorb/error.hpp"
#include "symorb/kernels.hpp"
#include "symorb/manifolds.hpp"
#include "symorb/orbits.hpp"
#include "symorb/problems.hpp"
#include "symorb/report.hpp"

using namespace symorb;

namespace {

constexpr int exit_ok = 0, exit_condition_fail = 2, exit_not_found = 3, exit_usage = 64;

struct RunConfig {
  std::string problem = "pyramidal";
  int n = 2;
  double mu = 1.0;
  std::optional<double> rtol, atol, max_s;
  std::optional<long> max_steps;
  std::size_t grid = 400;
  std::optional<double> lo, hi;
  bool exhaustive = false;
  std::string out, csv, format = "json";
  long seed = 0;
  int workers = 0;
  std::string family = "B";
  int k = 0, i = 1, j = 1;
  std::string which = "g3";
  std::vector<int> n_list;
  std::string sweep = "mu";
  double from = 1.0, to = 3.0;
  int steps = 9;
  double beta = -1.32, alpha = 0.8;
  bool omit_runtime = false;
};

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json config_json(const std::string& cmd, const RunConfig& c) {
  json j;
  j["command"] = cmd;
  j["problem"] = {{"kind", c.problem}, {"n", c.n}, {"mu", c.mu}};
  j["integrator"] = {{"rtol", opt(c.rtol)}, {"atol", opt(c.atol)}, {"max_s", opt(c.max_s)}, {"max_steps", opt(c.max_steps)}};
  j["search"] = {{"grid", c.grid}, {"lo", opt(c.lo)}, {"hi", opt(c.hi)}, {"exhaustive", c.exhaustive}};
  j["output"] = {{"path", c.out}, {"csv", c.csv}, {"format", c.format}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  if (cmd == "orbit") j["family"] = {{"name", c.family}, {"k", c.k}, {"i", c.i}, {"j", c.j}};
  if (cmd == "table")
    j["table"] = {{"which", c.which}, {"n_list", c.n_list}, {"sweep", c.sweep}, {"from", c.from}, {"to", c.to}, {"steps", c.steps}};
  if (cmd == "conditions") j["conditions"] = {{"beta", c.beta}, {"alpha", c.alpha}};
  return j;
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key) && !j[key].is_null()) dst = j[key].get<T>();
}
template <class T>
void take(const json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key) && !j[key].is_null()) dst = j[key].get<T>();
}

// Accepts both the nested layout echoed in outputs and flat keys.
void load_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    fail(ErrorKind::usage, std::string("config is not valid JSON: ") + e.what());
  }
  auto section = [&](const char* name) { return j.contains(name) && j[name].is_object() ? j[name] : j; };
  const json p = section("problem");
  if (j.contains("problem") && j["problem"].is_string()) c.problem = j["problem"].get<std::string>();
  take(p, "kind", c.problem);
  take(p, "n", c.n);
  take(p, "mu", c.mu);
  const json ig = section("integrator");
  take(ig, "rtol", c.rtol);
  take(ig, "atol", c.atol);
  take(ig, "max_s", c.max_s);
  take(ig, "max_steps", c.max_steps);
  const json s = section("search");
  take(s, "grid", c.grid);
  take(s, "lo", c.lo);
  take(s, "hi", c.hi);
  take(s, "exhaustive", c.exhaustive);
  const json o = section("output");
  take(o, "path", c.out);
  take(o, "csv", c.csv);
  take(o, "format", c.format);
  take(j, "seed", c.seed);
  take(j, "workers", c.workers);
  take(j, "omit_runtime", c.omit_runtime);
  if (j.contains("family") && j["family"].is_object()) {
    const json f = j["family"];
    take(f, "name", c.family);
    take(f, "k", c.k);
    take(f, "i", c.i);
    take(f, "j", c.j);
  } else {
    take(j, "family", c.family);
  }
  const json t = section("table");
  take(t, "which", c.which);
  take(t, "n_list", c.n_list);
  take(t, "sweep", c.sweep);
  take(t, "from", c.from);
  take(t, "to", c.to);
  take(t, "steps", c.steps);
  const json cd = section("conditions");
  take(cd, "beta", c.beta);
  take(cd, "alpha", c.alpha);
}

ProblemSpec make_problem(const RunConfig& c) {
  try {
    if (c.problem == "pyramidal") return ProblemSpec::pyramidal(c.n, c.mu);
    if (c.problem == "spatial") return ProblemSpec::spatial_double_polygon(c.n);
    if (c.problem == "planar") return ProblemSpec::planar_double_polygon(c.n);
  } catch (const Error& e) {
    fail(ErrorKind::usage, e.what());
  }
  fail(ErrorKind::usage, "unknown problem '" + c.problem + "' (pyramidal | spatial | planar)");
}

FamilySpec make_family(const RunConfig& c) {
  FamilySpec f;
  if (c.family == "B") f = FamilySpec::B(c.k);
  else if (c.family == "Z1") f = FamilySpec::Z1(c.k);
  else if (c.family == "Z2") f = FamilySpec::Z2(c.k);
  else if (c.family == "LessSymB") f = FamilySpec::LessSymB(c.i, c.j);
  else if (c.family == "ZB") f = FamilySpec::ZB(c.i, c.j);
  else if (c.family == "Z5") f = FamilySpec::Z5(c.i, c.j);
  else if (c.family == "PP") f = FamilySpec::PP(c.i, c.j);
  else fail(ErrorKind::usage, "unknown family '" + c.family + "'");
  try {
    f.validate();
  } catch (const Error& e) {
    fail(ErrorKind::usage, e.what());
  }
  return f;
}

BranchControls branch_controls(const RunConfig& c) {
  BranchControls b;
  if (c.rtol) b.rtol = *c.rtol;
  if (c.atol) b.atol = *c.atol;
  if (c.max_s) b.max_s = *c.max_s;
  return b;
}

IntegrationControls orbit_controls(const RunConfig& c) {
  IntegrationControls ic = ShotOptions::default_controls();
  if (c.rtol) ic.rtol = *c.rtol;
  if (c.atol) ic.atol = *c.atol;
  if (c.max_s) ic.max_s = *c.max_s;
  if (c.max_steps) ic.max_steps = *c.max_steps;
  return ic;
}

json sign_row(const std::map<std::string, double>& values) {
  json j = json::object();
  for (const auto& [k, v] : values) j[k] = {{"value", v}, {"sign", v > 0 ? "+" : (v < 0 ? "-" : "0")}};
  return j;
}

int cmd_conditions(const RunConfig& c, json& result) {
  const ProblemSpec p = make_problem(c);
  ConditionOptions o;
  o.beta = c.beta;
  o.g.alpha = c.alpha;
  o.branch = branch_controls(c);
  if (c.rtol) o.g.rtol = *c.rtol;
  if (c.atol) o.g.atol = *c.atol;
  const ConditionReport r = check_all(p, o);
  result = to_json(r);
  return r.overall_pass() ? exit_ok : exit_condition_fail;
}

int cmd_branches(const RunConfig& c, json& result) {
  const ProblemSpec p = make_problem(c);
  const BranchControls bc = branch_controls(c);
  json traces = json::array();
  std::map<std::string, double> values;
  for (BranchId id : {BranchId::gamma, BranchId::gamma_prime, BranchId::gamma_minus, BranchId::gamma_prime_minus,
                      BranchId::stable_L_prime_minus}) {
    try {
      const BranchTrace t = trace_branch(p, id, bc);
      traces.push_back(to_json(t));
      if (id == BranchId::gamma || id == BranchId::gamma_prime || id == BranchId::stable_L_prime_minus)
        for (const auto& [k, v] : t.landmarks) values[k] = v;
    } catch (const Error& e) {
      traces.push_back({{"branch", to_string(id)}, {"error", std::string(to_string(e.kind())) + ": " + e.what()}});
    }
  }
  result["problem"] = to_json(p);
  result["landmarks"] = sign_row(values);
  if (values.count("v2") && values.count("v3")) {
    const N4Result n4 = check_N4(values["v2"], values["v3"]);
    result["N4"] = {{"separation", n4.separation}, {"pass", n4.pass}};
  }
  result["traces"] = traces;
  return exit_ok;
}

int cmd_orbit(const RunConfig& c, json& result) {
  const ProblemSpec p = make_problem(c);
  const FamilySpec f = make_family(c);
  SearchOptions so;
  so.grid_points = c.grid;
  so.param_lo = c.lo;
  so.param_hi = c.hi;
  so.exhaustive = c.exhaustive;
  so.shot.controls = orbit_controls(c);
  const SearchResult sr = search_orbits(p, f, so);
  result["problem"] = to_json(p);
  result["family"] = f.label();
  result["range"] = {sr.lo, sr.hi};
  json rej = json::array();
  for (const auto& r : sr.rejected) rej.push_back(r);
  result["rejected_brackets"] = rej;
  if (sr.orbits.empty()) {
    json scan = json::array();
    for (const ScanPoint& s : sr.scan) scan.push_back(to_json(s));
    result["status"] = "not-found";
    result["scan"] = scan;
    return exit_not_found;
  }
  json orbits = json::array();
  for (const PeriodicOrbit& o : sr.orbits) {
    json oj = to_json(o);
    oj["periodicity"] = to_json(verify_periodicity(p, o, so.shot.controls));
    orbits.push_back(oj);
  }
  result["status"] = "found";
  result["orbits"] = orbits;
  const std::string csv_path = c.format == "csv" ? c.out : c.csv;
  if (!csv_path.empty()) {
    std::ofstream os(csv_path);
    if (!os) fail(ErrorKind::usage, "cannot write " + csv_path);
    write_csv(os, p, sr.orbits.front().reconstructed);
  }
  return exit_ok;
}

int cmd_table(const RunConfig& c, json& result) {
  json rows = json::array();
  result["which"] = c.which;
  if (c.which == "g3") {
    std::vector<int> ns = c.n_list;
    if (ns.empty()) ns = {2, 3, 4, 5, 6, 7, 8, 9};
    for (int n : ns) {
      RunConfig rc;
      rc.problem = "spatial";
      rc.n = n;
      const ProblemSpec p = make_problem(rc);
      rows.push_back({{"n", n}, {"g3_half_pi", integrate_g(p, GKind::g3).endpoint_g}});
    }
  } else if (c.which == "sn") {
    std::vector<int> ns = c.n_list;
    if (ns.empty()) ns = {47, 100, 1000};
    for (int n : ns) {
      if (n < 2) fail(ErrorKind::usage, "sn table needs n >= 2");
      const double s = csc_sum(n), a = csc_sum_asymptotic(n);
      rows.push_back({{"n", n}, {"S_n", s}, {"S_n_over_4", s / 4}, {"asymptotic", a},
                      {"relative_error", std::abs(a - s / 4) / (s / 4)}});
    }
  } else if (c.which == "landmarks-sweep") {
    if (c.steps < 1) fail(ErrorKind::usage, "steps must be >= 1");
    for (int q = 0; q < c.steps; ++q) {
      const double u = c.steps == 1 ? 0.0 : static_cast<double>(q) / (c.steps - 1);
      const double x = c.from + u * (c.to - c.from);
      RunConfig rc = c;
      if (c.sweep == "mu") rc.mu = x;
      else if (c.sweep == "n") rc.n = static_cast<int>(std::lround(x));
      else fail(ErrorKind::usage, "sweep must be mu or n");
      const ProblemSpec p = make_problem(rc);
      json row = {{c.sweep, c.sweep == "n" ? json(rc.n) : json(x)}};
      try {
        const LandmarkSet ls = landmarks(p, branch_controls(rc));
        row["landmarks"] = sign_row(ls.values);
      } catch (const Error& e) {
        row["error"] = std::string(to_string(e.kind())) + ": " + e.what();
      }
      rows.push_back(row);
    }
  } else {
    fail(ErrorKind::usage, "unknown table '" + c.which + "' (g3 | sn | landmarks-sweep)");
  }
  result["rows"] = rows;
  return exit_ok;
}

void add_common(CLI::App* sc, RunConfig& c) {
  sc->add_option("--problem", c.problem, "pyramidal | spatial | planar");
  sc->add_option("--n", c.n, "number of bodies per polygon");
  sc->add_option("--mu", c.mu, "apex mass (pyramidal)");
  sc->add_option("--rtol", c.rtol);
  sc->add_option("--atol", c.atol);
  sc->add_option("--max-s", c.max_s, "cap on rescaled time");
  sc->add_option("--max-steps", c.max_steps);
  sc->add_option("--out", c.out, "output path (default stdout)");
  sc->add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  sc->add_option("--seed", c.seed, "seed of record, echoed into the output");
  sc->add_option("--workers", c.workers, "parallel workers for scans");
  sc->add_flag("--omit-runtime", c.omit_runtime, "leave the wall-clock runtime out for byte-identical reruns");
  sc->add_option("--config", "JSON run configuration (flags override it)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    for (int a = 1; a + 1 < argc; ++a)
      if (std::strcmp(argv[a], "--config") == 0) load_config(argv[a + 1], cfg);
  } catch (const Error& e) {
    std::cerr << "symorb: " << e.what() << "\n";
    return exit_usage;
  }

  CLI::App app{"Symmetric periodic orbits in two-degree-of-freedom N-body sub-problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("symorb ") + version);

  auto* conditions = app.add_subcommand("conditions", "check the sufficient conditions");
  add_common(conditions, cfg);
  conditions->add_option("--beta", cfg.beta, "lower bound for the g3 endpoint");
  conditions->add_option("--alpha", cfg.alpha, "bound on |W'/W|");

  auto* branches = app.add_subcommand("branches", "trace collision-manifold branches");
  add_common(branches, cfg);

  auto* orbit = app.add_subcommand("orbit", "search for a periodic orbit");
  add_common(orbit, cfg);
  orbit->add_option("--family", cfg.family, "B | LessSymB | ZB | Z1 | Z5 | PP | Z2");
  orbit->add_option("--k", cfg.k);
  orbit->add_option("--i", cfg.i);
  orbit->add_option("--j", cfg.j);
  orbit->add_option("--grid", cfg.grid, "scan grid points");
  orbit->add_option("--lo", cfg.lo, "scan range start");
  orbit->add_option("--hi", cfg.hi, "scan range end");
  orbit->add_flag("--exhaustive", cfg.exhaustive, "converge every bracket on the grid");
  orbit->add_option("--csv", cfg.csv, "reconstructed trajectory CSV path");

  auto* table = app.add_subcommand("table", "reproduce a numeric table");
  add_common(table, cfg);
  table->add_option("--which", cfg.which, "g3 | sn | landmarks-sweep");
  table->add_option("--n-list", cfg.n_list, "values of n");
  table->add_option("--sweep", cfg.sweep, "mu | n");
  table->add_option("--from", cfg.from);
  table->add_option("--to", cfg.to);
  table->add_option("--steps", cfg.steps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  std::string cmd;
  for (auto* sc : {conditions, branches, orbit, table})
    if (sc->parsed()) cmd = sc->get_name();

  if (cfg.workers == 0)
    if (const char* env = std::getenv("SYMORB_WORKERS")) cfg.workers = std::atoi(env);
  if (cfg.workers > 0) kernels::set_workers(cfg.workers);

  const auto t0 = std::chrono::steady_clock::now();
  json result;
  int code = exit_ok;
  try {
    if (cmd == "conditions") code = cmd_conditions(cfg, result);
    else if (cmd == "branches") code = cmd_branches(cfg, result);
    else if (cmd == "orbit") code = cmd_orbit(cfg, result);
    else code = cmd_table(cfg, result);
  } catch (const Error& e) {
    std::cerr << "symorb: " << to_string(e.kind()) << ": " << e.what() << "\n";
    if (e.kind() == ErrorKind::usage || e.kind() == ErrorKind::domain) return exit_usage;
    if (e.kind() == ErrorKind::not_found) return exit_not_found;
    return 1;
  }
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json doc;
  doc["tool"] = "symorb";
  doc["version"] = version;
  doc["config"] = config_json(cmd, cfg);
  doc["result"] = result;
  doc["exit_code"] = code;
  if (!cfg.omit_runtime) doc["runtime_s"] = runtime;
  const std::string text = dump(doc) + "\n";
  if (cfg.out.empty() || (cmd == "orbit" && cfg.format == "csv")) {
    std::cout << text;
  } else {
    std::ofstream os(cfg.out);
    if (!os) {
      std::cerr << "symorb: cannot write " << cfg.out << "\n";
      return exit_usage;
    }
    os << text;
  }
  return code;
}
