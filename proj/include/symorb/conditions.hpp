#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symorb/manifolds.hpp"

namespace symorb {

/// Comparison ODEs for g = v / sqrt(W) along the branch gamma'' on the
/// collision manifold.
enum class GKind {
  gamma,  // the traced branch itself, continued by its own ODE to phi = pi/2
  g1,     // g' = sqrt(1/(2 cos) - g^2/4), g(0) = -sqrt 2
  g2,     // g1 field + alpha g / 2, g(pi/4) = -2^{3/4}
  g3,     // g1 field - (g/2) W'/W, g(pi/4) = -2^{3/4}
};

std::string to_string(GKind kind);

struct GOptions {
  double alpha = 0.8;
  double rtol = 1e-12;
  double atol = 1e-14;
};

struct GComparisonResult {
  GKind kind = GKind::g1;
  double start_phi = 0.0, start_g = 0.0;
  double endpoint_phi = 0.0, endpoint_g = 0.0;
  std::vector<std::pair<double, double>> samples;  // (phi, g), increasing phi
  long steps = 0;
};

/// Integrates the chosen comparison ODE to phi = pi/2. The variable
/// t = sqrt(pi/2 - phi) removes the endpoint singularity.
GComparisonResult integrate_g(const ProblemSpec& problem, GKind kind, const GOptions& options = {});

/// gamma'' expressed as (phi, g) over its w >= 0 arc, from the Devaney trace.
std::vector<std::pair<double, double>> gamma_dprime_g_curve(const ProblemSpec& problem);

struct Elliptic {
  double K = 0.0, E = 0.0;          // adaptive quadrature
  double K_agm = 0.0, E_agm = 0.0;  // arithmetic-geometric mean
};

/// Complete elliptic integrals with K(m) = int 1/sqrt(1 - m cos^2),
/// E(m) = int sqrt(1 - m sin^2), both over [0, pi/2]; m <= 1.
Elliptic elliptic(double m);
double elliptic_E(double m);
double elliptic_K(double m);

enum class Status { pass, fail, not_applicable };
std::string to_string(Status s);

struct ConditionEntry {
  Status status = Status::not_applicable;
  std::vector<std::pair<std::string, double>> evidence;
  std::string method;
};

struct ConditionOptions {
  double beta = -1.32;
  std::size_t grid = 100000;
  GOptions g;
  BranchControls branch;
};

/// which: "N1", "N2", "N3", "N3prime", "N4".
ConditionEntry check_condition(const ProblemSpec& problem, const std::string& which,
                               const ConditionOptions& options = {});

struct ConditionReport {
  ProblemSpec problem;
  std::vector<std::pair<std::string, ConditionEntry>> entries;

  const ConditionEntry* find(const std::string& name) const;
  /// N1, N2 and N4 pass or do not apply, and at least one of N3, N3prime
  /// passes unless both do not apply.
  bool overall_pass() const;
};

ConditionReport check_all(const ProblemSpec& problem, const ConditionOptions& options = {});

struct CertificateResult {
  double beta_hat = 0.0;
  double integral = 0.0;
  double lower_bound_g_at_0 = 0.0;
  bool pass = false;
};

/// beta_hat + int_0^{pi/2} sqrt(1/(2 cos phi) - beta_hat^2/4) dphi.
CertificateResult v2_certificate(double beta_hat);
/// Uses the g2 endpoint when the ratio bound holds, else the g3 endpoint.
CertificateResult v2_certificate(const ProblemSpec& problem, const ConditionOptions& options = {});

struct WprimeBound {
  double max_4Wprime = 0.0;
  double bound = 0.0;   // delta n / pi
  double h_max = 0.0;   // max of 2E(-cot^2 phi) on the grid
  bool pass = false;
};

/// 2 E(-cot^2 phi), the integral ceiling for 4|W'| in the spatial problem.
double spatial_h(double phi);
WprimeBound spatial_Wprime_bound(int n, double delta = 3.83, std::size_t grid = 10000);

}  // namespace symorb
