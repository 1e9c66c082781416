#ifndef TUBESPEC_ORACLES_HPP
#define TUBESPEC_ORACLES_HPP

#include <string>
#include <vector>

#include "tubespec/assembly.hpp"  // TubeBC / SurfaceBC enums
#include "tubespec/errors.hpp"

namespace tubespec {

/// One boundary condition of the radial interval problem.
enum class EndBC { Dirichlet, Neumann };

/// Independent ground-truth spectrum: closed forms for flat tubes,
/// dense radial-ODE solves for circular/spherical shells.  These code
/// paths share nothing with the assembly module, so agreement between
/// the two is meaningful.
struct OracleSpectrum {
  std::vector<double> eigenvalues;   ///< ascending
  std::vector<double> accuracy;      ///< per-value estimate (0 = exact)
  std::string source;                ///< "closed-form" or "radial-ode"
};

/// Flat tube over a segment of length L: k smallest values of
/// (n pi / L)^2 + tau_j(eps) with Dirichlet side walls ((n >= 1); pass
/// side_bc = Neumann for ((n-1) pi / L)^2 instead).  tau_j follows the
/// transverse condition pair: DN ((2j-1)pi/2eps)^2, DD (j pi/eps)^2,
/// NN ((j-1) pi/eps)^2.
OracleSpectrum rectangle_spectrum(double length, double eps, TubeBC bc_t, int k,
                                  SurfaceBC side_bc = SurfaceBC::Dirichlet);

/// Radial shell operator -u'' - ((dim-1)/r) u' + c/r^2 u on
/// (inner_radius, inner_radius + eps), c = mode^2 (dim 2) or
/// mode*(mode+1) (dim 3), by dense second-order discretization with
/// Richardson extrapolation over (N, 2N); accuracy = |level diff| / 3.
/// For inward tubes call with inner_radius = R - eps and swapped
/// conditions.  resolution < 64 is refused.
OracleSpectrum radial_shell_spectrum(int dim, double inner_radius, double eps, EndBC inner_bc,
                                     EndBC outer_bc, int mode, int k, int resolution = 256);

} // namespace tubespec

#endif
