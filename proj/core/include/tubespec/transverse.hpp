#ifndef TUBESPEC_TRANSVERSE_HPP
#define TUBESPEC_TRANSVERSE_HPP

#include <Eigen/Dense>

#include "tubespec/errors.hpp"

namespace tubespec {

/// k-th mode of the mixed interval problem on (0,1): Dirichlet at 0,
/// Neumann at 1.  chi(k, t) = sqrt(2) sin((2k-1) pi t / 2), k >= 1.
double chi(int k, double t);

/// Eigenvalue of the k-th mode: ((2k-1) pi / 2)^2.
double transverse_eigenvalue(int k);

/// L2-normalized quadrature weights used by the projection: composite
/// Simpson on a uniform grid of `nodes` points over [0,1]; nodes must
/// give an even number of intervals.
Eigen::VectorXd simpson_weights(int nodes);

struct TransverseProjection {
  Eigen::VectorXd phi;          ///< per-surface-node coefficient of chi_1
  double orthogonal_fraction;   ///< ||psi - phi (x) chi_1|| / ||psi||
};

/// Splits a grid field psi(x_i, t_j) into its chi_1 component and the
/// orthogonal remainder.  Rows of `field` run over surface nodes, columns
/// over a uniform t-grid spanning [0,1] (both endpoints included).
/// Norms use the product measure dSigma x dt: `surface_weights` carries
/// the dSigma quadrature weight of each surface node, the t-direction
/// uses composite Simpson.  Throws ZeroFieldError for a zero field.
TransverseProjection transverse_project(const Eigen::MatrixXd& field,
                                        const Eigen::VectorXd& surface_weights);

} // namespace tubespec

#endif
