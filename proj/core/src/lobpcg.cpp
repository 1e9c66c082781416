#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "tubespec/eigensolve.hpp"

namespace tubespec::detail {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Clock = std::chrono::steady_clock;

Eigen::MatrixXd seeded_block(int n, int b, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x10BC96ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = gauss(rng);
  return x;
}

/// B-orthonormalize columns, dropping dependent ones; returns kept count.
int ortho_b(Eigen::MatrixXd& x, const SpMat& b) {
  int cols = static_cast<int>(x.cols());
  std::vector<int> keep;
  for (int j = 0; j < cols; ++j) {
    Eigen::VectorXd v = x.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i : keep) v -= x.col(i).dot(b * v) * x.col(i);
    const double nb = std::sqrt(std::max(0.0, v.dot(b * v)));
    if (nb > 1e-12 * std::sqrt(double(x.rows()))) {
      x.col(static_cast<int>(keep.size())) = v / nb;
      keep.push_back(static_cast<int>(keep.size()));
    }
  }
  x.conservativeResize(Eigen::NoChange, static_cast<int>(keep.size()));
  return static_cast<int>(keep.size());
}

} // namespace

Spectrum lobpcg_smallest(const SpMat& a, const SpMat& b, const SolveOptions& opts,
                         double shift_estimate) {
  const auto t0 = Clock::now();
  const int n = static_cast<int>(a.rows());
  const int k = opts.k;
  if (k < 1 || k > n) throw DomainError("requested eigenpair count out of range");
  const int block = std::min(n, std::max(opts.block_size > 0 ? opts.block_size : k + 4, k));

  // Jacobi preconditioner on A - sigma B, clamped away from zero.
  Eigen::VectorXd diag = a.diagonal() - shift_estimate * b.diagonal();
  const double dscale = std::max(diag.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd prec(n);
  for (int i = 0; i < n; ++i) prec[i] = 1.0 / std::max(std::abs(diag[i]), 1e-10 * dscale);

  Eigen::MatrixXd x = seeded_block(n, block, opts.seed);
  if (ortho_b(x, b) < block) x.conservativeResize(Eigen::NoChange, x.cols());
  Eigen::MatrixXd p(n, 0);

  SolverStats stats;
  stats.method = "lobpcg";
  stats.shift_used = shift_estimate;

  std::vector<double> vals(k, 0.0);
  Eigen::MatrixXd vecs(n, k);
  bool converged = false;

  int iter = 0;
  for (; iter < std::max(opts.max_iter, 50); ++iter) {
    const int bc = static_cast<int>(x.cols());
    Eigen::MatrixXd ax = a * x;
    Eigen::MatrixXd bx = b * x;
    Eigen::MatrixXd rayleigh = x.transpose() * ax;  // x is B-orthonormal
    rayleigh = 0.5 * (rayleigh + rayleigh.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(rayleigh);
    // rotate the block to Ritz coordinates
    x = x * rr.eigenvectors();
    ax = ax * rr.eigenvectors();
    bx = bx * rr.eigenvectors();
    Eigen::VectorXd theta = rr.eigenvalues();

    Eigen::MatrixXd resid = ax - bx * theta.asDiagonal();
    bool all_ok = bc >= k;
    for (int i = 0; i < k && i < bc; ++i) {
      const double rn = resid.col(i).norm() / std::max(1.0, std::abs(theta[i]));
      if (rn > opts.tol) all_ok = false;
    }
    if (all_ok) {
      for (int i = 0; i < k; ++i) {
        vals[i] = theta[i];
        vecs.col(i) = x.col(i);
      }
      converged = true;
      break;
    }

    // search directions: preconditioned residuals plus previous step
    Eigen::MatrixXd w = prec.asDiagonal() * resid;
    Eigen::MatrixXd s(n, bc + w.cols() + p.cols());
    s.leftCols(bc) = x;
    s.middleCols(bc, w.cols()) = w;
    if (p.cols() > 0) s.rightCols(p.cols()) = p;
    const int sc = ortho_b(s, b);
    if (sc <= bc) {  // no usable new directions; stagnated
      for (int i = 0; i < k && i < bc; ++i) {
        vals[i] = theta[i];
        vecs.col(i) = x.col(i);
      }
      break;
    }

    Eigen::MatrixXd sa = s.transpose() * (a * s);
    sa = 0.5 * (sa + sa.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> srr(sa);
    const int nb = std::min(block, sc);
    Eigen::MatrixXd y = srr.eigenvectors().leftCols(nb);
    Eigen::MatrixXd xnew = s * y;
    // implicit P: the part of the new block outside span(X)
    Eigen::MatrixXd yp = y;
    yp.topRows(bc).setZero();
    p = s * yp;
    ortho_b(p, b);
    if (p.cols() > nb) p.conservativeResize(Eigen::NoChange, nb);
    x = xnew;
    ortho_b(x, b);
  }

  stats.iterations = iter;
  stats.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  Spectrum s;
  s.eigenvalues = vals;
  s.residual_norms.resize(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd r = a * vecs.col(i) - vals[i] * (b * vecs.col(i));
    const double xb = std::sqrt(std::max(1e-300, vecs.col(i).dot(b * vecs.col(i))));
    s.residual_norms[i] = r.norm() / (xb * std::max(1.0, std::abs(vals[i])));
  }
  if (opts.want_vectors) s.eigenvectors = vecs;
  s.stats = stats;
  if (!converged) {
    const bool ok = std::all_of(s.residual_norms.begin(), s.residual_norms.end(),
                                [&](double r) { return r <= opts.tol; });
    if (!ok)
      throw ConvergenceError("LOBPCG did not reach tolerance within iteration cap",
                             std::move(s));
  }
  return s;
}

} // namespace tubespec::detail
