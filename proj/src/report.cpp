#include "symorb/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace symorb {

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit(std::string& out, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string pad_close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        emit(out, it.value(), indent, depth + 1);
      }
      out += nl;
      out += pad_close;
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) {
          out += ",";
          out += nl;
        }
        out += pad;
        emit(out, j[k], indent, depth + 1);
      }
      out += nl;
      out += pad_close;
      out += "]";
      return;
    }
    case json::value_t::number_float: out += num(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

json pairs(const std::vector<std::pair<std::string, double>>& ev) {
  json j = json::object();
  for (const auto& [k, v] : ev) j[k] = v;
  return j;
}

}  // namespace

std::string dump(const json& j, int indent) {
  std::string out;
  emit(out, j, indent, 0);
  return out;
}

json to_json(const ProblemSpec& p) {
  json j;
  switch (p.kind) {
    case ProblemKind::pyramidal: j["kind"] = "pyramidal"; break;
    case ProblemKind::spatial_double_polygon: j["kind"] = "spatial"; break;
    case ProblemKind::planar_double_polygon: j["kind"] = "planar"; break;
  }
  j["n"] = p.n;
  if (p.kind == ProblemKind::pyramidal) j["mu"] = p.mu;
  j["phi_a"] = p.phi_a;
  j["phi_b"] = p.phi_b;
  j["S_n"] = p.s_n;
  return j;
}

json to_json(const State& s) {
  return json{{"chart", to_string(s.chart)}, {"r", s.r}, {"v", s.v}, {"angle", s.angle}, {"w", s.w}, {"h", s.h}};
}

json to_json(const ConditionEntry& e) {
  return json{{"status", to_string(e.status)}, {"evidence", pairs(e.evidence)}, {"method", e.method}};
}

json to_json(const ConditionReport& r) {
  json j;
  j["problem"] = to_json(r.problem);
  json entries = json::object();
  for (const auto& [k, v] : r.entries) entries[k] = to_json(v);
  j["entries"] = entries;
  j["overall_pass"] = r.overall_pass();
  return j;
}

json to_json(const BranchTrace& t) {
  json j;
  j["branch"] = to_string(t.branch);
  j["alias"] = alias(t.branch);
  j["base"] = t.base;
  j["epsilon"] = t.epsilon;
  j["eigenvalue"] = t.eigenvalue;
  j["direction"] = t.direction;
  json lm = json::object();
  for (const auto& [k, v] : t.landmarks) lm[k] = v;
  j["landmarks"] = lm;
  j["termination"] = to_string(t.termination);
  if (!t.limit_label.empty()) j["limit"] = t.limit_label;
  j["steps"] = t.trajectory.steps;
  return j;
}

json to_json(const CrossingSignature& sig) {
  json arr = json::array();
  for (const Crossing& c : sig.entries)
    arr.push_back(json{{"line", to_string(c.kind)}, {"theta_bar", c.theta_bar}, {"s", c.s}, {"v", c.v},
                       {"direction", c.direction}});
  return json{{"text", sig.str()}, {"entries", arr}};
}

json to_json(const ScanPoint& p) {
  return json{{"param", p.param}, {"outcome", to_string(p.outcome)}, {"matches", p.matches},
              {"residual", p.residual}, {"signature", p.signature}};
}

json to_json(const PeriodicOrbit& o) {
  json j;
  j["family"] = o.family.label();
  j["locus"] = to_string(o.family.locus());
  j["experimental"] = o.family.experimental();
  j["seed"] = to_json(o.seed);
  j["seed_parameter"] = o.seed_parameter;
  j["fundamental_segment"] = o.quarter ? "quarter" : "half";
  j["signature"] = to_json(o.signature);
  j["residual"] = o.residual;
  j["full_period_s"] = o.full_period_s;
  j["bracket"] = {o.bracket_lo, o.bracket_hi};
  j["euler_speed"] = o.euler_speed;
  j["bisection_steps"] = o.bisection_steps;
  j["reconstructed_samples"] = o.reconstructed.samples.size();
  return j;
}

json to_json(const PeriodicityCheck& c) {
  return json{{"closure_error", c.closure_error}, {"energy_drift", c.energy_drift}, {"max_r", c.max_r}};
}

json to_json(const GComparisonResult& g) {
  return json{{"kind", to_string(g.kind)}, {"start_phi", g.start_phi}, {"start_g", g.start_g},
              {"endpoint_phi", g.endpoint_phi}, {"endpoint_g", g.endpoint_g}, {"steps", g.steps}};
}

void write_csv(std::ostream& os, const ProblemSpec& problem, const Trajectory& traj) {
  const std::vector<double> t = physical_time(problem, traj);
  os << "s,t,r,v,theta,w\n";
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const Sample& s = traj.samples[k];
    os << num(s.s) << ',' << num(t[k]) << ',' << num(s.state.r) << ',' << num(s.state.v) << ','
       << num(s.state.angle) << ',' << num(s.state.w) << '\n';
  }
}

}  // namespace symorb
