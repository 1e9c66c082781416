#include "tubespec/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace tubespec {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXd random_block(int n, int b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = gauss(rng);
  return x;
}

/// B-orthonormalizes the columns of X in place (Cholesky QR, two passes);
/// returns the number of independent columns kept (rank-deficient
/// trailing columns are dropped).
int b_orthonormalize(Eigen::MatrixXd& x, const SpMat& b) {
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::MatrixXd g = x.transpose() * (b * x);
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() == Eigen::Success) {
      // Cholesky QR: G = U^T U, replace X by X U^{-1}
      Eigen::MatrixXd xt = llt.matrixL().solve(x.transpose());
      x = xt.transpose();
      continue;
    }
    // rank deficient: fall back to modified Gram-Schmidt with column drops
    std::vector<int> keep;
    for (int j = 0; j < x.cols(); ++j) {
      Eigen::VectorXd v = x.col(j);
      for (int pass2 = 0; pass2 < 2; ++pass2)
        for (int i : keep) v -= x.col(i).dot(b * v) * x.col(i);
      double nb = std::sqrt(std::max(0.0, v.dot(b * v)));
      if (nb > 1e-10) {
        x.col(static_cast<int>(keep.size())) = v / nb;
        keep.push_back(static_cast<int>(keep.size()));
      }
    }
    x.conservativeResize(Eigen::NoChange, static_cast<int>(keep.size()));
  }
  return static_cast<int>(x.cols());
}

struct ResidualScale {
  const SpMat* A;
  const SpMat* B;
  double operator()(const Eigen::VectorXd& x, double lambda) const {
    const Eigen::VectorXd r = (*A) * x - lambda * ((*B) * x);
    const double xb = std::sqrt(std::max(1e-300, x.dot((*B) * x)));
    return r.norm() / (xb * std::max(1.0, std::abs(lambda)));
  }
};

Spectrum finalize_spectrum(std::vector<double> vals, Eigen::MatrixXd vecs, const SpMat& a,
                           const SpMat& b, bool want_vectors, SolverStats stats) {
  Spectrum s;
  ResidualScale res{&a, &b};
  s.residual_norms.resize(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    s.residual_norms[i] = res(vecs.col(static_cast<int>(i)), vals[i]);
  s.eigenvalues = std::move(vals);
  if (want_vectors) s.eigenvectors = std::move(vecs);
  s.stats = std::move(stats);
  return s;
}

} // namespace

Spectrum dense_reference(const SpMat& a, const SpMat& b, int k, int dim_cap) {
  const auto t0 = Clock::now();
  const int n = static_cast<int>(a.rows());
  if (n > dim_cap)
    throw DimensionCapError("dense reference limited to dimension " + std::to_string(dim_cap) +
                            ", got " + std::to_string(n));
  if (k < 1 || k > n) throw DomainError("requested eigenpair count out of range");
  Eigen::MatrixXd ad = Eigen::MatrixXd(a);
  Eigen::MatrixXd bd = Eigen::MatrixXd(b);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, bd,
                                                               Eigen::ComputeEigenvectors |
                                                                   Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw Error("dense generalized eigensolver failed (B not positive definite?)");
  std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + k);
  Eigen::MatrixXd vecs = es.eigenvectors().leftCols(k);
  SolverStats stats;
  stats.method = "dense";
  stats.iterations = 1;
  stats.wall_seconds = seconds_since(t0);
  return finalize_spectrum(std::move(vals), std::move(vecs), a, b, true, std::move(stats));
}

Spectrum dense_reference(const OperatorPair& pair, int k, int dim_cap) {
  return dense_reference(pair.A, pair.B, k, dim_cap);
}

Spectrum smallest_eigenpairs(const SpMat& a, const SpMat& b, const SolveOptions& opts,
                             double default_shift) {
  const auto t0 = Clock::now();
  const int n = static_cast<int>(a.rows());
  if (n < 1) throw DomainError("empty operator pair");
  if (opts.k < 1 || opts.k > n)
    throw DomainError("requested eigenpair count " + std::to_string(opts.k) +
                      " out of range for dimension " + std::to_string(n));
  const int k = opts.k;

  if (opts.force_lobpcg)
    return detail::lobpcg_smallest(a, b, opts, opts.shift.value_or(default_shift));

  SolverStats stats;
  stats.method = "shift-invert-lanczos";

  // Find a shift strictly below the spectrum: the LDLT inertia (signs of
  // D) counts eigenvalues below sigma, so walk down until none remain.
  double sigma = opts.shift.value_or(default_shift);
  Eigen::SimplicialLDLT<SpMat> ldlt;
  double step = std::max(1.0, 0.05 * std::abs(sigma));
  bool factored = false;
  for (int retry = 0; retry <= 12; ++retry) {
    SpMat c = a - sigma * b;
    ldlt.compute(c);
    if (ldlt.info() == Eigen::Success) {
      const auto& d = ldlt.vectorD();
      const double dmax = d.cwiseAbs().maxCoeff();
      if ((d.array() > 1e-14 * dmax).all()) {
        factored = true;
        break;
      }
    }
    sigma -= step;
    step *= 4.0;
    stats.shift_retries = retry + 1;
  }
  if (!factored)
    throw ShiftError("no positive-definite shift found below the spectrum (last sigma = " +
                     std::to_string(sigma) + ")");
  stats.shift_used = sigma;
  {
    const std::int64_t fill = ldlt.matrixL().nonZeros();
    stats.factor_nnz = fill;
    if (fill > opts.factor_nnz_budget) {
      Spectrum s = detail::lobpcg_smallest(a, b, opts, sigma);
      s.stats.shift_retries = stats.shift_retries;
      return s;
    }
  }

  // Block Lanczos with full reorthogonalization on T = (A - sigma B)^{-1} B,
  // which is self-adjoint and positive in the B inner product.  The basis
  // W is kept B-orthonormal; H = W^T B T W is assembled incrementally one
  // block column per expansion, and Ritz values theta map back through
  // lambda = sigma + 1/theta (largest theta = smallest lambda).
  const int block = std::min(n, opts.block_size > 0 ? opts.block_size : k + 4);
  const int max_basis = std::min(n, std::max({6 * block, 3 * k + 24, 90}));

  Eigen::MatrixXd w(n, 0);    // B-orthonormal basis
  Eigen::MatrixXd bw(n, 0);   // B * basis
  Eigen::MatrixXd h(0, 0);    // projected operator
  Eigen::MatrixXd vlast = random_block(n, block, opts.seed);
  if (b_orthonormalize(vlast, b) == 0) throw Error("starting block collapsed");

  std::vector<double> vals;
  Eigen::MatrixXd vecs;
  ResidualScale res{&a, &b};
  bool converged = false;

  auto append_block = [&](const Eigen::MatrixXd& v) {
    const int m0 = static_cast<int>(w.cols());
    const int bc = static_cast<int>(v.cols());
    w.conservativeResize(Eigen::NoChange, m0 + bc);
    bw.conservativeResize(Eigen::NoChange, m0 + bc);
    w.rightCols(bc) = v;
    bw.rightCols(bc) = b * v;
  };
  append_block(vlast);

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const int m = static_cast<int>(w.cols());
    const int bc = static_cast<int>(vlast.cols());

    // T applied to the newest block; also yields the new H column block
    Eigen::MatrixXd u(n, bc);
    for (int j = 0; j < bc; ++j) u.col(j) = ldlt.solve(bw.col(m - bc + j));

    Eigen::MatrixXd hcol = bw.transpose() * u;  // m x bc
    h.conservativeResize(m, m);
    h.block(0, m - bc, m, bc) = hcol;
    h.block(m - bc, 0, bc, m) = hcol.transpose();
    // symmetrize the trailing diagonal block
    h.block(m - bc, m - bc, bc, bc) =
        0.5 * (hcol.bottomRows(bc) + hcol.bottomRows(bc).transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hs(h);
    const int kk = std::min(k, m);
    vals.assign(kk, 0.0);
    vecs.resize(n, kk);
    // largest theta first -> ascending lambda
    for (int i = 0; i < kk; ++i) {
      const double theta = hs.eigenvalues()[m - 1 - i];
      vals[i] = sigma + 1.0 / theta;
      vecs.col(i) = w * hs.eigenvectors().col(m - 1 - i);
      const double nb = std::sqrt(std::max(1e-300, vecs.col(i).dot(b * vecs.col(i))));
      vecs.col(i) /= nb;
    }
    if (kk == k) {
      bool all_ok = true;
      for (int i = 0; i < k && all_ok; ++i) all_ok = res(vecs.col(i), vals[i]) <= opts.tol;
      if (all_ok) {
        converged = true;
        ++iter;
        break;
      }
    }
    if (m >= max_basis || m >= n) {
      if (m >= n) {
        converged = true;  // basis spans the whole space; Ritz values are exact
        ++iter;
        break;
      }
      // thick restart: keep the best Ritz vectors and continue expanding
      const int keep = std::min(m, std::max(2 * k + block, 3 * block));
      Eigen::MatrixXd wk(n, keep);
      for (int i = 0; i < keep; ++i) wk.col(i) = w * hs.eigenvectors().col(m - 1 - i);
      b_orthonormalize(wk, b);
      w.resize(n, 0);
      bw.resize(n, 0);
      h.resize(0, 0);
      // rebuild H on the restarted basis, one solve per kept column
      append_block(wk);
      const int mk = static_cast<int>(w.cols());
      Eigen::MatrixXd tu(n, mk);
      for (int j = 0; j < mk; ++j) tu.col(j) = ldlt.solve(bw.col(j));
      h = bw.transpose() * tu;
      h = 0.5 * (h + h.transpose()).eval();
      vlast = wk.rightCols(std::min(block, mk));
      continue;
    }

    // expand: orthogonalize T vlast against the basis (two passes) and append
    Eigen::MatrixXd y = u;
    for (int pass = 0; pass < 2; ++pass) y -= w * (bw.transpose() * y);
    const int kept = b_orthonormalize(y, b);
    if (kept == 0) {
      converged = true;  // invariant subspace found
      ++iter;
      break;
    }
    vlast = y;
    append_block(vlast);
  }

  stats.iterations = iter;
  stats.wall_seconds = seconds_since(t0);
  Spectrum s =
      finalize_spectrum(std::move(vals), std::move(vecs), a, b, opts.want_vectors, stats);
  s.stats.wall_seconds = seconds_since(t0);
  const bool all_ok = static_cast<int>(s.eigenvalues.size()) == k &&
                      std::all_of(s.residual_norms.begin(), s.residual_norms.end(),
                                  [&](double r) { return r <= opts.tol; });
  if (!converged || !all_ok)
    throw ConvergenceError("eigensolver did not reach tolerance " + std::to_string(opts.tol) +
                               " within " + std::to_string(opts.max_iter) + " expansions",
                           std::move(s));
  return s;
}

Spectrum smallest_eigenpairs(const OperatorPair& pair, const SolveOptions& opts) {
  return smallest_eigenpairs(pair.A, pair.B, opts, pair.meta.suggested_shift);
}

} // namespace tubespec
