#include "tubespec/refine.hpp"

#include <cmath>
#include <limits>

namespace tubespec {

namespace {

std::vector<double> extrapolated(const std::vector<double>& coarse,
                                 const std::vector<double>& fine) {
  std::vector<double> e(std::min(coarse.size(), fine.size()));
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return e;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

} // namespace

RefinedSpectrum refine_eigenvalues(const PairFactory& make, const Resolution& base, int k,
                                   const SolveOptions& sopts, const RefineOptions& ropts) {
  RefinedSpectrum out;

  auto solve_level = [&](int factor, std::shared_ptr<OperatorPair>* keep) {
    OperatorPair pair = make(base.refined(factor));
    SolveOptions so = sopts;
    so.k = std::min(sopts.k, pair.dim());
    Spectrum s = smallest_eigenpairs(pair, so);
    if (keep) *keep = std::make_shared<OperatorPair>(std::move(pair));
    return s;
  };

  if (!ropts.extrapolate) {
    std::shared_ptr<OperatorPair> fine_pair;
    out.fine = solve_level(1, ropts.keep_fine ? &fine_pair : nullptr);
    out.fine_pair = fine_pair;
    out.values = out.fine.eigenvalues;
    out.err_estimates.assign(out.values.size(), std::numeric_limits<double>::quiet_NaN());
    out.solves = 1;
    return out;
  }

  Spectrum coarse = solve_level(1, nullptr);
  std::shared_ptr<OperatorPair> fine_pair;
  Spectrum fine = solve_level(2, ropts.keep_fine ? &fine_pair : nullptr);
  std::vector<double> prev = extrapolated(coarse.eigenvalues, fine.eigenvalues);
  std::vector<double> est(prev.size());
  for (std::size_t i = 0; i < est.size(); ++i)
    est[i] = std::abs(fine.eigenvalues[i] - coarse.eigenvalues[i]) / 3.0;
  out.solves = 2;
  out.converged = true;

  // the level-pair error estimate already bounds the next extrapolated
  // change when it is far below tolerance; otherwise keep doubling until
  // the extrapolated values settle
  auto max_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, e);
    return m;
  };
  bool settled = max_of(est) <= 0.25 * ropts.tol_disc;
  int factor = 2;
  while (!settled && out.solves < 2 + ropts.max_refine) {
    factor *= 2;
    std::shared_ptr<OperatorPair> next_pair;
    Spectrum next = solve_level(factor, ropts.keep_fine ? &next_pair : nullptr);
    ++out.solves;
    std::vector<double> cur = extrapolated(fine.eigenvalues, next.eigenvalues);
    const double delta = max_abs_diff(cur, prev);
    coarse = std::move(fine);
    fine = std::move(next);
    fine_pair = next_pair;
    for (std::size_t i = 0; i < est.size() && i < fine.eigenvalues.size(); ++i)
      est[i] = std::abs(fine.eigenvalues[i] - coarse.eigenvalues[i]) / 3.0;
    prev = std::move(cur);
    settled = delta < ropts.tol_disc || max_of(est) <= 0.25 * ropts.tol_disc;
  }
  out.converged = settled;

  out.values = std::move(prev);
  out.err_estimates = std::move(est);
  out.fine = std::move(fine);
  out.fine_pair = fine_pair;
  return out;
}

} // namespace tubespec
