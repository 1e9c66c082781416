#ifndef TUBESPEC_SWEEP_HPP
#define TUBESPEC_SWEEP_HPP

#include <string>
#include <vector>

#include "tubespec/config.hpp"
#include "tubespec/geometry.hpp"

namespace tubespec {

/// One (eps, n) row of a sweep: tube eigenvalue, its two-term prediction
/// and the residual, plus diagnostics.  A failed solve leaves the row in
/// place with an error tag and NaN values.
struct SweepRecord {
  double eps = 0.0;
  int n = 0;
  double lambda = 0.0;         ///< tube eigenvalue
  double leading = 0.0;        ///< (pi/2eps)^2, (pi/eps)^2 or 0 per case
  double mu = 0.0;             ///< second-term operator eigenvalue
  double residual = 0.0;       ///< lambda - leading - mu
  double nu = 0.0;             ///< bare Laplace-Beltrami eigenvalue (matched walls)
  bool sandwich_ok = false;
  double orth_fraction = 0.0;  ///< transverse diagnostic, n = 1 only (NaN otherwise)
  double err_lambda = 0.0;     ///< discretization error estimate for lambda
  double err_mu = 0.0;
  double err_nu = 0.0;
  std::string error;           ///< nonempty = failed solve tag
};

struct StrongCouplingRow {
  double eps = 0.0;
  double eps_mu1 = 0.0;   ///< eps * mu_1(eps)
  double target = 0.0;    ///< inf kappa
  double err = 0.0;       ///< |eps*mu1 - target|
};

struct StrongCouplingDiagnostic {
  std::vector<StrongCouplingRow> rows;
  double inf_kappa = 0.0;
  double sup_kappa = 0.0;
  bool constant_kappa = false;
  bool monotone = false;
  bool final_ok = false;
  bool pass = false;
  std::string note;
};

/// Residual trend over an eps sweep for one fixed n: detects 1/eps-type
/// growth that Theorem-style two-term asymptotics forbid.
struct TrendStats {
  double max_abs = 0.0;
  double median_abs = 0.0;
  double slope = 0.0;          ///< least-squares slope of |r| against 1/eps
  double growth_ratio = 0.0;   ///< |r(eps_min)| / |r(2 eps_min)|
  bool max_ok = false;         ///< max <= 3 median + tol
  bool slope_ok = false;       ///< |slope|/eps_min <= 0.1 median + tol
  bool growth_ok = false;      ///< last halving grows < 1.6x + tol
  bool pass = false;
};

struct Provenance {
  std::string config_hash;
  std::string version;
  double wall_seconds = 0.0;
};

struct SweepReport {
  CaseKind case_kind = CaseKind::DN;
  std::string geometry_id;
  std::vector<double> eps_list;
  int n_max = 0;
  std::vector<SweepRecord> records;               ///< complete eps x n grid
  std::vector<StrongCouplingRow> strong_coupling; ///< eps*mu_1 vs inf kappa
  double kappa_norm = 0.0;                        ///< sup |kappa|
  double inf_kappa = 0.0;
  double sup_kappa = 0.0;
  std::vector<std::string> warnings;
  Provenance provenance;

  const SweepRecord& at(std::size_t eps_index, int n) const;
  /// Error-estimate based slack for trend/sandwich tests.
  double combined_tolerance() const;
};

/// Runs one case of the configured sweep: per eps, tube blocks are
/// assembled, solved through the refinement controller, merged across
/// symmetry blocks, paired with the matched effective and bare surface
/// spectra, and reduced to records.
SweepReport run_sweep_case(const Config& cfg, CaseKind kind);

/// All configured cases, in config order.
std::vector<SweepReport> run_sweep(const Config& cfg);

/// The two-sided bound |eps*mu_n - eps*nu_n| <= sup|kappa| with additive
/// slack for solver and discretization error.
bool sandwich_check(const SweepRecord& rec, double kappa_norm, double slack);

StrongCouplingDiagnostic strong_coupling_check(const SweepReport& report, const Geometry& geom);

TrendStats residual_trend(const SweepReport& report, int n, double tol);

} // namespace tubespec

#endif
