#include "tubespec/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace tubespec {

namespace {

constexpr double kPi = std::numbers::pi;

double transverse_term(TubeBC bc, double eps, int j) {
  switch (bc) {
  case TubeBC::DN: return std::pow((2 * j - 1) * kPi / (2 * eps), 2);
  case TubeBC::DD: return std::pow(j * kPi / eps, 2);
  case TubeBC::NN: return std::pow((j - 1) * kPi / eps, 2);
  }
  return 0.0;
}

/// Dense second-order eigenvalues of the weighted radial problem
///   integral u' v' w(r) dr + integral (c/r^2) u v w(r) dr = lambda integral u v w(r) dr
/// on (r0, r0+eps) with w(r) = r^{dim-1}; trapezoid-lumped mass, midpoint
/// stiffness.  Returns the k smallest.
std::vector<double> radial_level(int dim, double r0, double eps, EndBC inner, EndBC outer,
                                 double c_mode, int k, int n) {
  const double dr = eps / n;
  const int nodes = n + 1;
  auto weight = [&](double r) { return dim == 2 ? r : r * r; };

  const int i0 = inner == EndBC::Dirichlet ? 1 : 0;
  const int i1 = outer == EndBC::Dirichlet ? nodes - 2 : nodes - 1;
  const int m = i1 - i0 + 1;
  if (m < 3) throw DomainError("radial oracle grid too small after eliminations");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  auto idx = [&](int i) { return i - i0; };

  for (int e = 0; e < n; ++e) {
    const double rm = r0 + dr * (e + 0.5);
    const double kk = weight(rm) / dr;
    const int ia = e, ib = e + 1;
    const bool ka = ia >= i0 && ia <= i1, kb = ib >= i0 && ib <= i1;
    if (ka) a(idx(ia), idx(ia)) += kk;
    if (kb) a(idx(ib), idx(ib)) += kk;
    if (ka && kb) {
      a(idx(ia), idx(ib)) -= kk;
      a(idx(ib), idx(ia)) -= kk;
    }
  }
  for (int i = i0; i <= i1; ++i) {
    const double r = r0 + dr * i;
    const double cell = (i == 0 || i == nodes - 1) ? 0.5 * dr : dr;
    const double w = weight(r) * cell;
    b(idx(i), idx(i)) += w;
    a(idx(i), idx(i)) += c_mode / (r * r) * w;
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw Error("radial oracle eigensolve failed");
  std::vector<double> vals(es.eigenvalues().data(),
                           es.eigenvalues().data() + std::min(k, m));
  return vals;
}

} // namespace

OracleSpectrum rectangle_spectrum(double length, double eps, TubeBC bc_t, int k,
                                  SurfaceBC side_bc) {
  if (!(length > 0) || !(eps > 0)) throw DomainError("rectangle oracle needs L, eps > 0");
  if (k < 1) throw DomainError("k must be >= 1");
  std::vector<double> sums;
  sums.reserve((k + 2) * (k + 2));
  for (int n = 1; n <= k + 2; ++n) {
    const double surf = side_bc == SurfaceBC::Dirichlet ? std::pow(n * kPi / length, 2)
                                                        : std::pow((n - 1) * kPi / length, 2);
    for (int j = 1; j <= k + 2; ++j) sums.push_back(surf + transverse_term(bc_t, eps, j));
  }
  std::sort(sums.begin(), sums.end());
  OracleSpectrum out;
  out.eigenvalues.assign(sums.begin(), sums.begin() + k);
  out.accuracy.assign(k, 0.0);
  out.source = "closed-form";
  return out;
}

OracleSpectrum radial_shell_spectrum(int dim, double inner_radius, double eps, EndBC inner_bc,
                                     EndBC outer_bc, int mode, int k, int resolution) {
  if (dim != 2 && dim != 3) throw DomainError("radial oracle supports dim 2 or 3");
  if (!(inner_radius > 0) || !(eps > 0)) throw DomainError("radial oracle needs R, eps > 0");
  if (resolution < 64) throw DomainError("radial oracle refuses resolution < 64");
  if (k < 1) throw DomainError("k must be >= 1");
  const double c_mode = dim == 2 ? double(mode) * mode : double(mode) * (mode + 1);

  const std::vector<double> coarse =
      radial_level(dim, inner_radius, eps, inner_bc, outer_bc, c_mode, k, resolution);
  const std::vector<double> fine =
      radial_level(dim, inner_radius, eps, inner_bc, outer_bc, c_mode, k, 2 * resolution);

  OracleSpectrum out;
  out.source = "radial-ode";
  const std::size_t m = std::min(coarse.size(), fine.size());
  out.eigenvalues.resize(m);
  out.accuracy.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.eigenvalues[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    out.accuracy[i] = std::abs(fine[i] - coarse[i]) / 3.0;
  }
  return out;
}

} // namespace tubespec
