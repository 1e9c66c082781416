#ifndef TUBESPEC_CONFIG_HPP
#define TUBESPEC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tubespec/assembly.hpp"
#include "tubespec/geometry.hpp"

namespace tubespec {

/// Which comparison is swept: the mixed tube against -Delta_g + kappa/eps,
/// the pure-Dirichlet tube against -Delta_g + V_eff, the pure-Neumann tube
/// against plain -Delta_g, or the surface-side operators only.
enum class CaseKind { DN, Dirichlet, Neumann, EffectiveOnly };

std::string to_string(CaseKind c);
CaseKind case_from_string(const std::string& s);

/// Declarative geometry description, buildable into a Geometry.
struct GeometrySpec {
  GeometryKind kind = GeometryKind::Circle;
  double length = 1.0;        // segment
  double radius = 1.0;        // circle / sphere
  double a = 1.0, b = 0.5;    // ellipse
  std::string profile_path;   // surface of revolution
  Orientation orientation = Orientation::Outward;
  double eps_ceiling = 1.0;

  Geometry build() const;
};

/// Flat dotted-key configuration: parsed from an ini-style text file
/// ('#' comments, `section.key = value` lines); CLI flags override file
/// keys through apply_override().
struct Config {
  GeometrySpec geometry;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  int n_max = 5;
  std::vector<CaseKind> cases{CaseKind::DN};

  Resolution base_res{64, 32};
  bool extrapolate = true;
  double tol_disc = 1e-3;
  int max_refine = 2;
  int block_cutoff = 8;       ///< harmonic-degree / azimuthal-mode cutoff

  double solver_tol = 1e-9;
  std::uint64_t seed = 0x5EED;
  int workers = 0;            ///< 0 = hardware concurrency

  std::string out_dir = "out";
  std::vector<std::string> formats{"csv"};

  static Config load(const std::string& path);
  static Config from_text(const std::string& text);
  void apply_override(const std::string& key, const std::string& value);
  /// Parses the CLI shorthand "kind:key=value,...:orientation", e.g.
  /// "circle:radius=1:outward" or "ellipse:a=1,b=0.5:inward".
  void apply_geometry_shorthand(const std::string& text);
  void validate() const;

  std::string canonical_text() const;  ///< sorted key=value lines
  std::uint64_t hash() const;          ///< FNV-1a of canonical_text()
};

} // namespace tubespec

#endif
