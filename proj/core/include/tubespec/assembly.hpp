#ifndef TUBESPEC_ASSEMBLY_HPP
#define TUBESPEC_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

#include "tubespec/geometry.hpp"

namespace tubespec {

enum class FormKind { Tube, EffectiveDN, EffectiveDirichlet, SurfaceLaplacian };

/// Boundary condition on the surface boundary (walls) for surface forms.
enum class SurfaceBC { Dirichlet, Neumann };

/// Transverse condition pair at (t = 0, t = 1).  DN is the mixed tube;
/// DD and NN are the pure comparison cases.  Side walls (when the
/// surface has a boundary) follow the case: Dirichlet for DN and DD,
/// Neumann for NN.
enum class TubeBC { DN, DD, NN };

std::string to_string(FormKind k);
std::string to_string(TubeBC bc);
std::string to_string(SurfaceBC bc);

struct Resolution {
  int n_surface = 64;  ///< cells per surface coordinate (>= 8)
  int n_t = 32;        ///< transverse cells (>= 8)
  int mode = 0;        ///< azimuthal mode m (revolution) or harmonic degree l (sphere)

  Resolution() = default;
  Resolution(int ns, int nt, int m = 0) : n_surface(ns), n_t(nt), mode(m) {}
  Resolution refined(int factor) const { return Resolution(n_surface * factor, n_t * factor, mode); }
};

/// Grid bookkeeping for one assembled operator.  Nodes are indexed
/// node = i * nt + j with i over surface nodes and j over transverse
/// nodes; eliminated (Dirichlet) nodes map to dof -1.
struct GridInfo {
  std::vector<double> u_nodes;      ///< surface nodes (single entry for per-l blocks)
  std::vector<double> t_nodes;      ///< transverse nodes ({0} for surface forms)
  std::vector<int> dof_of_node;     ///< size nu*nt, -1 where eliminated
  std::vector<int> node_of_dof;
  Eigen::VectorXd surface_weights;  ///< dSigma quadrature weight per surface node

  int nu() const { return static_cast<int>(u_nodes.size()); }
  int nt() const { return static_cast<int>(t_nodes.size()); }
  int node_index(int i, int j) const { return i * nt() + j; }
  int dofs() const { return static_cast<int>(node_of_dof.size()); }
};

struct PairMetadata {
  std::string geometry_id;
  FormKind form = FormKind::Tube;
  double eps = 0.0;            ///< 0 for eps-independent forms
  Resolution res;
  TubeBC tube_bc = TubeBC::DN;
  SurfaceBC surface_bc = SurfaceBC::Dirichlet;
  int multiplicity = 1;        ///< eigenvalue multiplicity contributed by this block
  double suggested_shift = 0.0;
};

/// Symmetric stiffness A and positive-definite mass B discretizing a
/// quadratic form pair on a tensor grid; Dirichlet nodes are eliminated,
/// Neumann boundaries are natural (no constraint rows).
struct OperatorPair {
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> B;
  GridInfo grid;
  PairMetadata meta;

  int dim() const { return static_cast<int>(A.rows()); }
};

/// Tube form Q_eps on Sigma x (0,1) with exact Fermi-metric coefficients.
/// Circle/ellipse/segment tubes are full (u, t) grids; sphere tubes are
/// per-harmonic-degree blocks (res.mode = l) on the t grid; surfaces of
/// revolution are per-azimuthal-mode (u, t) blocks (res.mode = m).
OperatorPair assemble_tube(const Geometry& geom, double eps, const Resolution& res,
                           TubeBC bc = TubeBC::DN);

/// Effective operator -Delta_g + kappa/eps with Dirichlet conditions on
/// the surface boundary.
OperatorPair assemble_effective_dn(const Geometry& geom, double eps, const Resolution& res);

/// Eps-independent Dirichlet-case operator -Delta_g + V_eff.
OperatorPair assemble_effective_dirichlet(const Geometry& geom, const Resolution& res);

/// Bare Laplace-Beltrami operator with the requested wall condition.
OperatorPair assemble_surface(const Geometry& geom, const Resolution& res, SurfaceBC bc);

/// Curvature potential -sum(kappa_mu^2)/2 + (sum kappa_mu)^2/4.
double v_eff(const Geometry& geom, double point);

/// Expands dof values back onto the full (nu x nt) tensor grid with
/// zeros at eliminated nodes.
Eigen::MatrixXd field_on_grid(const OperatorPair& pair, const Eigen::VectorXd& dof_values);

/// Writes "row col value" per entry, row-major sorted, 17 significant
/// digits.
void dump_matrix(const Eigen::SparseMatrix<double>& m, std::ostream& os);
/// Dumps A then B with '# A' / '# B' section comments.
void dump_pair(const OperatorPair& pair, std::ostream& os);

} // namespace tubespec

#endif
