#ifndef TUBESPEC_EIGENSOLVE_HPP
#define TUBESPEC_EIGENSOLVE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tubespec/assembly.hpp"
#include "tubespec/errors.hpp"

namespace tubespec {

struct SolveOptions {
  int k = 1;                      ///< number of smallest eigenpairs
  double tol = 1e-9;              ///< residual tolerance, see Spectrum::residual_norms
  std::optional<double> shift;    ///< spectral shift; defaults to the pair's suggestion
  std::uint64_t seed = 0x5EED;    ///< starting-block seed
  int max_iter = 200;             ///< basis expansions / LOBPCG iterations
  int block_size = 0;             ///< 0 = automatic (k + 4)
  bool want_vectors = true;
  bool force_lobpcg = false;      ///< skip the factorization path
  std::int64_t factor_nnz_budget = 200000000;  ///< fill budget before LOBPCG fallback
};

struct SolverStats {
  std::string method;             ///< "shift-invert-lanczos", "lobpcg" or "dense"
  int iterations = 0;
  std::int64_t factor_nnz = 0;
  double wall_seconds = 0.0;
  double shift_used = 0.0;
  int shift_retries = 0;
};

/// Result of a symmetric generalized eigensolve A x = lambda B x.
/// Eigenvalues ascend; eigenvector columns are B-orthonormal.
/// residual_norms[i] = ||A x - lambda B x||_2 / (||x||_B * max(1, |lambda|)).
struct Spectrum {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::vector<double> residual_norms;
  SolverStats stats;
};

/// Thrown when the iteration cap is reached before every requested pair
/// meets the tolerance; carries whatever converged.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& msg, Spectrum partial)
      : Error(msg), partial_(std::move(partial)) {}
  const Spectrum& partial() const { return partial_; }

private:
  Spectrum partial_;
};

/// The k algebraically smallest eigenpairs of the pair, by shift-invert
/// block Lanczos over a sparse LDLT factorization (with an inertia check
/// that walks the shift below the spectrum), falling back to
/// preconditioned LOBPCG when the factorization exceeds the fill budget.
Spectrum smallest_eigenpairs(const OperatorPair& pair, const SolveOptions& opts = {});
Spectrum smallest_eigenpairs(const Eigen::SparseMatrix<double>& A,
                             const Eigen::SparseMatrix<double>& B, const SolveOptions& opts,
                             double default_shift = 0.0);

/// Full dense symmetric-definite eigendecomposition truncated to k;
/// a validation oracle for the sparse path.  Throws DimensionCapError
/// above dim_cap.
Spectrum dense_reference(const OperatorPair& pair, int k, int dim_cap = 4000);
Spectrum dense_reference(const Eigen::SparseMatrix<double>& A,
                         const Eigen::SparseMatrix<double>& B, int k, int dim_cap = 4000);

namespace detail {
/// Preconditioned LOBPCG on (A, B); used as the fallback path and
/// directly testable.
Spectrum lobpcg_smallest(const Eigen::SparseMatrix<double>& A,
                         const Eigen::SparseMatrix<double>& B, const SolveOptions& opts,
                         double shift_estimate);
} // namespace detail

} // namespace tubespec

#endif
