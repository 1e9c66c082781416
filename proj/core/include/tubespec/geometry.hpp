#ifndef TUBESPEC_GEOMETRY_HPP
#define TUBESPEC_GEOMETRY_HPP

#include <array>
#include <string>
#include <vector>

#include "tubespec/errors.hpp"

namespace tubespec {

enum class GeometryKind { Segment, Circle, Ellipse, Sphere, SurfaceOfRevolution };

/// Side on which the parallel surface (and hence the tube) is built.
/// For closed convex kinds (circle, ellipse, sphere) Outward means the
/// normal points away from the enclosed region.  For a surface of
/// revolution with arclength profile (r(s), z(s)), Outward selects the
/// normal n = (-z' cos phi, -z' sin phi, r').
enum class Orientation : int { Outward = +1, Inward = -1 };

std::string to_string(GeometryKind kind);
std::string to_string(Orientation o);

/// Principal curvatures at one surface point.  Signs follow the tube
/// Jacobian convention: the volume factor of x + eps*t*n is
/// prod_mu (1 - eps*kappa_mu*t), so flipping the orientation negates
/// every kappa_mu.
struct CurvatureSample {
  double point = 0.0;                ///< intrinsic coordinate
  std::array<double, 2> kappas{0.0, 0.0};
  int count = 1;                     ///< number of principal curvatures (d-1)
  double kappa_sum = 0.0;            ///< kappa_1 + ... + kappa_{d-1}
};

/// Diagonal metric data of the tube in Fermi coordinates at one
/// (point, t, eps).  G_diag holds the tangential coefficients
/// (1 - eps*kappa_mu*t)^2 g_mu; the transverse coefficient is eps^2.
struct FermiMetric {
  std::array<double, 2> g_diag{1.0, 0.0};
  std::array<double, 2> G_diag{1.0, 0.0};
  int count = 1;
  double tt = 0.0;           ///< transverse coefficient eps^2
  double h = 1.0;            ///< weight h_eps = prod (1 - eps*kappa_mu*t)
  double sqrt_detG = 0.0;    ///< eps * sqrt|g| * h
};

/// Curvature extrema over a sample grid (exact for constant-curvature
/// kinds).
struct KappaExtrema {
  double inf_kappa = 0.0;    ///< inf of kappa = sum of principal curvatures
  double sup_kappa = 0.0;
  std::array<double, 2> sup_abs_each{0.0, 0.0};  ///< sup |kappa_mu| per direction
  int count = 1;
  double sup_abs = 0.0;      ///< max_mu sup |kappa_mu|
  bool exact = false;        ///< true when closed-form, not grid sampled
};

/// Arclength-parameterized planar profile (r(s), z(s)) for surfaces of
/// revolution about the z axis.  Tangent and curvature samples are
/// optional; missing ones are filled by centered finite differences.
struct ProfileCurve {
  std::vector<double> s;     ///< strictly increasing arclength samples
  std::vector<double> r;     ///< distance from the axis, r >= 0
  std::vector<double> z;
  std::vector<double> dr;    ///< r'(s), optional on input
  std::vector<double> dz;    ///< z'(s), optional on input
  std::vector<double> curv;  ///< planar curvature r'z'' - r''z', optional

  /// Loads a whitespace-separated sample file with '#' comments.
  /// Three columns are read as (s, r, z); two columns as (r, z) with
  /// arclength accumulated from chord lengths.
  static ProfileCurve load(const std::string& path);
  static ProfileCurve from_rz(std::vector<double> r, std::vector<double> z);

  /// Fills dr, dz (and curv) by finite differences where not supplied,
  /// and validates the arclength parameterization.
  void finalize();

  bool closed() const;       ///< endpoints coincide in (r, z) and tangent
  std::size_t size() const { return s.size(); }
};

/// A supported hypersurface: its intrinsic parameter domain, induced
/// metric, orientation and principal curvatures, plus the Fermi-metric
/// data of the tube built over it.  All supported kinds use
/// curvature-line coordinates, so both the surface metric and the tube
/// metric are diagonal.
///
/// Intrinsic parameter u: arclength for Segment/Circle, the angle for
/// Ellipse, polar arclength R*theta for Sphere, profile arclength for
/// SurfaceOfRevolution.  Surfaces of revolution and spheres carry a
/// second (azimuthal) coordinate handled by symmetry; curvature data
/// depends on u only.
class Geometry {
public:
  static Geometry segment(double length);
  static Geometry circle(double radius, Orientation o = Orientation::Outward);
  static Geometry ellipse(double semi_a, double semi_b, Orientation o = Orientation::Outward);
  static Geometry sphere(double radius, Orientation o = Orientation::Outward);
  static Geometry surface_of_revolution(ProfileCurve profile, Orientation o = Orientation::Outward);

  GeometryKind kind() const { return kind_; }
  Orientation orientation() const { return orient_; }
  /// Returns a copy with the opposite orientation.
  Geometry flipped() const;

  int surface_dim() const;        ///< d-1: 1 for curves, 2 for surfaces
  int ambient_dim() const { return surface_dim() + 1; }
  bool has_boundary() const;
  bool periodic_param() const;    ///< u-domain wraps (closed curve / torus profile)

  double param_begin() const;
  double param_end() const;
  double param_length() const { return param_end() - param_begin(); }

  /// Short human-readable id used in operator metadata and reports.
  std::string id() const;

  /// Principal curvatures at u under the tube-Jacobian sign convention.
  CurvatureSample principal_curvatures(double u) const;

  /// Tube weight h_eps(u, t) = prod_mu (1 - eps*kappa_mu(u)*t).
  /// Throws DegenerateTubeError when the value is not positive.
  double h_eps(double u, double t, double eps) const;

  /// Full diagonal Fermi-metric data at (u, t, eps).
  FermiMetric fermi_metric(double u, double t, double eps) const;

  /// Largest eps0 such that every eps < eps0 keeps h_eps positive and
  /// the tube map injective for this kind; capped at eps_ceiling().
  double max_admissible_eps() const;

  /// Curvature extrema over `resolution` samples (resolution >= 2);
  /// closed-form (and flagged exact) for constant-curvature kinds.
  KappaExtrema kappa_extrema(int resolution = 2048) const;

  /// Surface metric coefficient g_uu at u.
  double metric_coeff(double u) const;
  /// sqrt(g_phiphi) at u: the radius of the azimuthal circle.  Only for
  /// surface_dim() == 2.
  double ring_radius(double u) const;
  /// sqrt|g| at u (area/length element density in the parameter chart).
  double sqrt_det_g(double u) const;

  double eps_ceiling() const { return eps_ceiling_; }
  Geometry& set_eps_ceiling(double cap);

  const ProfileCurve& profile() const;

  // Kind parameters (zero when not applicable).
  double length() const { return length_; }
  double radius() const { return radius_; }
  double semi_a() const { return a_; }
  double semi_b() const { return b_; }

private:
  Geometry() = default;
  double wrap_or_check(double u) const;

  GeometryKind kind_ = GeometryKind::Segment;
  Orientation orient_ = Orientation::Outward;
  double length_ = 0.0;
  double radius_ = 0.0;
  double a_ = 0.0, b_ = 0.0;
  double eps_ceiling_ = 1.0;
  ProfileCurve profile_;
  // Hermite interpolation of the profile and derived quantities.
  struct ProfileEval {
    double r, z, dr, dz, curv;
  };
  ProfileEval eval_profile(double s) const;
};

} // namespace tubespec

#endif
