#ifndef TUBESPEC_REFINE_HPP
#define TUBESPEC_REFINE_HPP

#include <functional>
#include <memory>

#include "tubespec/assembly.hpp"
#include "tubespec/eigensolve.hpp"

namespace tubespec {

struct RefineOptions {
  bool extrapolate = true;
  double tol_disc = 1e-3;  ///< absolute stop tolerance on the extrapolated values
  int max_refine = 2;      ///< extra grid doublings beyond the base (N, 2N) pair
  bool keep_fine = false;  ///< retain the finest pair for diagnostics
};

/// Eigenvalues driven through the grid-refinement ladder: second-order
/// values at (N, 2N) Richardson-extrapolate to fourth order; the
/// controller refines until the extrapolated values settle below
/// tol_disc (or the refinement budget runs out).
struct RefinedSpectrum {
  std::vector<double> values;         ///< extrapolated (or single-level) eigenvalues
  std::vector<double> err_estimates;  ///< |lambda_2N - lambda_N| / 3 at the final level
  bool converged = true;
  int solves = 1;                     ///< grid levels actually solved
  Spectrum fine;                      ///< finest-level spectrum (vectors included)
  std::shared_ptr<OperatorPair> fine_pair;  ///< set when keep_fine
};

using PairFactory = std::function<OperatorPair(const Resolution&)>;

RefinedSpectrum refine_eigenvalues(const PairFactory& make, const Resolution& base, int k,
                                   const SolveOptions& sopts, const RefineOptions& ropts);

} // namespace tubespec

#endif
