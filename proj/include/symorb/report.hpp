#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "symorb/conditions.hpp"
#include "symorb/manifolds.hpp"
#include "symorb/orbits.hpp"

namespace symorb {

inline constexpr const char* version = "1.0.0";

using json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed as %.17g.
std::string dump(const json& j, int indent = 2);

json to_json(const ProblemSpec& p);
json to_json(const State& s);
json to_json(const ConditionEntry& e);
json to_json(const ConditionReport& r);
json to_json(const BranchTrace& t);
json to_json(const CrossingSignature& sig);
json to_json(const ScanPoint& p);
json to_json(const PeriodicOrbit& o);
json to_json(const PeriodicityCheck& c);
json to_json(const GComparisonResult& g);

/// Trajectory columns s,t,r,v,theta,w with t from physical_time.
void write_csv(std::ostream& os, const ProblemSpec& problem, const Trajectory& traj);

}  // namespace symorb
