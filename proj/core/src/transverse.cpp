#include "tubespec/transverse.hpp"

#include <cmath>
#include <numbers>

namespace tubespec {

double chi(int k, double t) {
  if (k < 1) throw DomainError("transverse mode index must be >= 1");
  if (t < -1e-12 || t > 1.0 + 1e-12) throw DomainError("t must lie in [0, 1]");
  const double omega = (2 * k - 1) * std::numbers::pi / 2.0;
  return std::numbers::sqrt2 * std::sin(omega * t);
}

double transverse_eigenvalue(int k) {
  if (k < 1) throw DomainError("transverse mode index must be >= 1");
  const double omega = (2 * k - 1) * std::numbers::pi / 2.0;
  return omega * omega;
}

Eigen::VectorXd simpson_weights(int nodes) {
  if (nodes < 3 || nodes % 2 == 0)
    throw DomainError("Simpson quadrature needs an odd node count >= 3");
  const double h = 1.0 / (nodes - 1);
  Eigen::VectorXd w(nodes);
  w.setZero();
  for (int i = 0; i + 2 < nodes; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  return w;
}

TransverseProjection transverse_project(const Eigen::MatrixXd& field,
                                        const Eigen::VectorXd& surface_weights) {
  const int ns = static_cast<int>(field.rows());
  const int nt = static_cast<int>(field.cols());
  if (surface_weights.size() != ns)
    throw DomainError("surface weight count does not match field rows");
  const Eigen::VectorXd tw = simpson_weights(nt);

  Eigen::VectorXd chi1(nt);
  for (int j = 0; j < nt; ++j) chi1[j] = chi(1, double(j) / (nt - 1));

  // phi(x) = integral psi(x, .) chi_1
  TransverseProjection out;
  out.phi = field * tw.cwiseProduct(chi1);

  const Eigen::MatrixXd resid = field - out.phi * chi1.transpose();
  auto product_norm2 = [&](const Eigen::MatrixXd& f) {
    // sum_ij w_surf(i) * w_t(j) * f(i,j)^2
    return surface_weights.dot((f.array().square().matrix() * tw));
  };
  const double n2 = product_norm2(field);
  if (!(n2 > 0.0)) throw ZeroFieldError("transverse projection of a zero field is undefined");
  const double r2 = product_norm2(resid);
  out.orthogonal_fraction = std::sqrt(std::max(0.0, r2) / n2);
  return out;
}

} // namespace tubespec
