#include "tubespec/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace tubespec {

namespace {

constexpr double kPi = std::numbers::pi;

struct Axis {
  int cells = 0;
  double x0 = 0.0, dx = 0.0;
  bool periodic = false;
  bool elim_left = false, elim_right = false;

  int nodes() const { return periodic ? cells : cells + 1; }
  double node(int i) const { return x0 + dx * i; }
  int edges() const { return cells; }
  std::pair<int, int> edge(int e) const {
    return periodic ? std::pair{e, (e + 1) % cells} : std::pair{e, e + 1};
  }
  double edge_mid(int e) const { return x0 + dx * (e + 0.5); }
  bool eliminated(int i) const {
    if (periodic) return false;
    return (i == 0 && elim_left) || (i == cells && elim_right);
  }
  // Dual-cell quadrature: up to two half-cell midpoints with weight dx/2.
  int quarter_points(int i, double* xs, double* ws) const {
    int n = 0;
    if (periodic || i > 0) {
      xs[n] = node(i) - 0.25 * dx;
      ws[n++] = 0.5 * dx;
    }
    if (periodic || i < cells) {
      xs[n] = node(i) + 0.25 * dx;
      ws[n++] = 0.5 * dx;
    }
    return n;
  }
};

struct Coef1 {
  double a = 0.0, pot = 0.0, w = 0.0;
};
struct Coef2 {
  double au = 0.0, at = 0.0, pot = 0.0, w = 0.0;
};

GridInfo make_grid(const Axis& ua, const Axis* ta) {
  GridInfo g;
  g.u_nodes.resize(ua.nodes());
  for (int i = 0; i < ua.nodes(); ++i) g.u_nodes[i] = ua.node(i);
  if (ta) {
    g.t_nodes.resize(ta->nodes());
    for (int j = 0; j < ta->nodes(); ++j) g.t_nodes[j] = ta->node(j);
  } else {
    g.t_nodes = {0.0};
  }
  const int nu = g.nu(), nt = g.nt();
  g.dof_of_node.assign(nu * nt, -1);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nt; ++j) {
      if (ua.eliminated(i)) continue;
      if (ta && ta->eliminated(j)) continue;
      g.dof_of_node[g.node_index(i, j)] = static_cast<int>(g.node_of_dof.size());
      g.node_of_dof.push_back(g.node_index(i, j));
    }
  return g;
}

template <class SqrtG>
Eigen::VectorXd surface_quad_weights(const Axis& ua, SqrtG&& sqrtg) {
  Eigen::VectorXd w(ua.nodes());
  double xs[2], ws[2];
  for (int i = 0; i < ua.nodes(); ++i) {
    const int nq = ua.quarter_points(i, xs, ws);
    double acc = 0.0;
    for (int q = 0; q < nq; ++q) acc += ws[q] * sqrtg(xs[q]);
    w[i] = acc;
  }
  return w;
}

template <class F>
OperatorPair assemble_1d(const Axis& ua, F&& coef, PairMetadata meta,
                         Eigen::VectorXd surface_weights) {
  GridInfo grid = make_grid(ua, nullptr);
  grid.surface_weights = std::move(surface_weights);
  const int n = grid.dofs();
  std::vector<Eigen::Triplet<double>> ta, tb;

  auto dof = [&](int i) { return grid.dof_of_node[grid.node_index(i, 0)]; };

  for (int e = 0; e < ua.edges(); ++e) {
    auto [i0, i1] = ua.edge(e);
    const Coef1 c = coef(ua.edge_mid(e));
    const double k = c.a / ua.dx;
    const int d0 = dof(i0), d1 = dof(i1);
    if (d0 >= 0) ta.emplace_back(d0, d0, k);
    if (d1 >= 0) ta.emplace_back(d1, d1, k);
    if (d0 >= 0 && d1 >= 0) {
      ta.emplace_back(d0, d1, -k);
      ta.emplace_back(d1, d0, -k);
    }
  }
  double xs[2], ws[2];
  for (int i = 0; i < ua.nodes(); ++i) {
    const int d = dof(i);
    if (d < 0) continue;
    const int nq = ua.quarter_points(i, xs, ws);
    double pot = 0.0, mass = 0.0;
    for (int q = 0; q < nq; ++q) {
      const Coef1 c = coef(xs[q]);
      pot += ws[q] * c.pot;
      mass += ws[q] * c.w;
    }
    if (pot != 0.0) ta.emplace_back(d, d, pot);
    tb.emplace_back(d, d, mass);
  }

  OperatorPair pair;
  pair.A.resize(n, n);
  pair.B.resize(n, n);
  pair.A.setFromTriplets(ta.begin(), ta.end());
  pair.B.setFromTriplets(tb.begin(), tb.end());
  pair.grid = std::move(grid);
  pair.meta = std::move(meta);
  return pair;
}

template <class F>
OperatorPair assemble_2d(const Axis& ua, const Axis& ta, F&& coef, PairMetadata meta,
                         Eigen::VectorXd surface_weights) {
  GridInfo grid = make_grid(ua, &ta);
  grid.surface_weights = std::move(surface_weights);
  const int n = grid.dofs();
  std::vector<Eigen::Triplet<double>> trA, trB;
  trA.reserve(static_cast<std::size_t>(n) * 8);
  trB.reserve(n);

  auto dof = [&](int i, int j) { return grid.dof_of_node[grid.node_index(i, j)]; };
  auto add_edge = [&](int da, int db, double k) {
    if (da >= 0) trA.emplace_back(da, da, k);
    if (db >= 0) trA.emplace_back(db, db, k);
    if (da >= 0 && db >= 0) {
      trA.emplace_back(da, db, -k);
      trA.emplace_back(db, da, -k);
    }
  };

  double xs[2], ws[2];
  // u-direction stiffness: edges in u, dual-cell quadrature in t
  for (int e = 0; e < ua.edges(); ++e) {
    auto [i0, i1] = ua.edge(e);
    const double um = ua.edge_mid(e);
    for (int j = 0; j < ta.nodes(); ++j) {
      if (ta.eliminated(j) && dof(i0, j) < 0 && dof(i1, j) < 0) continue;
      const int nq = ta.quarter_points(j, xs, ws);
      double acc = 0.0;
      for (int q = 0; q < nq; ++q) acc += ws[q] * coef(um, xs[q]).au;
      add_edge(dof(i0, j), dof(i1, j), acc / ua.dx);
    }
  }
  // t-direction stiffness: edges in t, dual-cell quadrature in u
  for (int i = 0; i < ua.nodes(); ++i) {
    const int nq = ua.quarter_points(i, xs, ws);
    for (int e = 0; e < ta.edges(); ++e) {
      auto [j0, j1] = ta.edge(e);
      const double tm = ta.edge_mid(e);
      if (dof(i, j0) < 0 && dof(i, j1) < 0) continue;
      double acc = 0.0;
      for (int q = 0; q < nq; ++q) acc += ws[q] * coef(xs[q], tm).at;
      add_edge(dof(i, j0), dof(i, j1), acc / ta.dx);
    }
  }
  // potential and mass: tensor quarter-cell rule
  double uxs[2], uws[2], txs[2], tws[2];
  for (int i = 0; i < ua.nodes(); ++i) {
    const int nqu = ua.quarter_points(i, uxs, uws);
    for (int j = 0; j < ta.nodes(); ++j) {
      const int d = dof(i, j);
      if (d < 0) continue;
      const int nqt = ta.quarter_points(j, txs, tws);
      double pot = 0.0, mass = 0.0;
      for (int qu = 0; qu < nqu; ++qu)
        for (int qt = 0; qt < nqt; ++qt) {
          const Coef2 c = coef(uxs[qu], txs[qt]);
          pot += uws[qu] * tws[qt] * c.pot;
          mass += uws[qu] * tws[qt] * c.w;
        }
      if (pot != 0.0) trA.emplace_back(d, d, pot);
      trB.emplace_back(d, d, mass);
    }
  }

  OperatorPair pair;
  pair.A.resize(n, n);
  pair.B.resize(n, n);
  pair.A.setFromTriplets(trA.begin(), trA.end());
  pair.B.setFromTriplets(trB.begin(), trB.end());
  pair.grid = std::move(grid);
  pair.meta = std::move(meta);
  return pair;
}

void require_resolution(int value, const char* what) {
  if (value < 8) throw DomainError(std::string(what) + " must be >= 8");
}

double kappa_sup_norm(const Geometry& geom) {
  const KappaExtrema e = geom.kappa_extrema(1024);
  return std::max(std::abs(e.inf_kappa), std::abs(e.sup_kappa));
}

bool axis_endpoint(const Geometry& geom, bool right) {
  if (geom.kind() != GeometryKind::SurfaceOfRevolution) return false;
  const ProfileCurve& p = geom.profile();
  const double r = right ? p.r.back() : p.r.front();
  return r <= 1e-9;
}

Axis tube_t_axis(int n_t, TubeBC bc) {
  Axis t;
  t.cells = n_t;
  t.x0 = 0.0;
  t.dx = 1.0 / n_t;
  t.elim_left = (bc == TubeBC::DN || bc == TubeBC::DD);
  t.elim_right = (bc == TubeBC::DD);
  return t;
}

Axis surface_axis(const Geometry& geom, int n_surface, bool dirichlet_walls, int mode) {
  Axis u;
  u.cells = n_surface;
  u.x0 = geom.param_begin();
  u.dx = geom.param_length() / n_surface;
  u.periodic = geom.periodic_param();
  if (!u.periodic) {
    const bool axis_l = axis_endpoint(geom, false);
    const bool axis_r = axis_endpoint(geom, true);
    // axis endpoints are coordinate singularities, not boundary: keep the
    // node for m = 0 (natural), eliminate it for m != 0
    u.elim_left = axis_l ? (mode != 0) : dirichlet_walls;
    u.elim_right = axis_r ? (mode != 0) : dirichlet_walls;
  }
  return u;
}

double tube_leading_term(TubeBC bc, double eps) {
  switch (bc) {
  case TubeBC::DN: return (kPi / (2 * eps)) * (kPi / (2 * eps));
  case TubeBC::DD: return (kPi / eps) * (kPi / eps);
  case TubeBC::NN: return 0.0;
  }
  return 0.0;
}

} // namespace

std::string to_string(FormKind k) {
  switch (k) {
  case FormKind::Tube: return "tube";
  case FormKind::EffectiveDN: return "effective_dn";
  case FormKind::EffectiveDirichlet: return "effective_dirichlet";
  case FormKind::SurfaceLaplacian: return "surface";
  }
  return "?";
}

std::string to_string(TubeBC bc) {
  switch (bc) {
  case TubeBC::DN: return "dn";
  case TubeBC::DD: return "dd";
  case TubeBC::NN: return "nn";
  }
  return "?";
}

std::string to_string(SurfaceBC bc) {
  return bc == SurfaceBC::Dirichlet ? "dirichlet" : "neumann";
}

double v_eff(const Geometry& geom, double point) {
  const CurvatureSample c = geom.principal_curvatures(point);
  double sum_sq = 0.0;
  for (int i = 0; i < c.count; ++i) sum_sq += c.kappas[i] * c.kappas[i];
  return -0.5 * sum_sq + 0.25 * c.kappa_sum * c.kappa_sum;
}

OperatorPair assemble_tube(const Geometry& geom, double eps, const Resolution& res, TubeBC bc) {
  if (!(eps > 0)) throw DomainError("tube half-width eps must be positive");
  if (!(eps < geom.max_admissible_eps()))
    throw DegenerateTubeError("eps = " + std::to_string(eps) + " >= admissible bound " +
                              std::to_string(geom.max_admissible_eps()) + " for " + geom.id());
  require_resolution(res.n_t, "n_t");

  PairMetadata meta;
  meta.geometry_id = geom.id();
  meta.form = FormKind::Tube;
  meta.eps = eps;
  meta.res = res;
  meta.tube_bc = bc;
  const double knorm = kappa_sup_norm(geom);
  meta.suggested_shift = tube_leading_term(bc, eps) - 2.0 * knorm / eps - 1.0;

  auto check_positive = [&](double f, double u, double t) {
    if (f <= 0.0)
      throw DegenerateTubeError("tube degenerates at u = " + std::to_string(u) +
                                ", t = " + std::to_string(t) + " (eps = " + std::to_string(eps) + ")");
  };

  switch (geom.kind()) {
  case GeometryKind::Segment:
  case GeometryKind::Circle:
  case GeometryKind::Ellipse: {
    require_resolution(res.n_surface, "n_surface");
    Axis ua = surface_axis(geom, res.n_surface, bc != TubeBC::NN, 0);
    Axis ta = tube_t_axis(res.n_t, bc);
    meta.multiplicity = 1;
    auto coef = [&geom, eps, &check_positive](double u, double t) {
      const CurvatureSample c = geom.principal_curvatures(u);
      const double f1 = 1.0 - eps * c.kappas[0] * t;
      check_positive(f1, u, t);
      const double sg = std::sqrt(geom.metric_coeff(u));
      Coef2 k;
      k.au = eps / (f1 * sg);
      k.at = f1 * sg / eps;
      k.pot = 0.0;
      k.w = eps * f1 * sg;
      return k;
    };
    auto sqrtg = [&geom](double u) { return std::sqrt(geom.metric_coeff(u)); };
    return assemble_2d(ua, ta, coef, std::move(meta), surface_quad_weights(ua, sqrtg));
  }
  case GeometryKind::Sphere: {
    // exact reduction onto the degree-l spherical-harmonic sector: the
    // tangential coefficient G^{munu} h cancels to the flat weight
    const int l = res.mode;
    if (l < 0) throw DomainError("harmonic degree l must be >= 0");
    const double R = geom.radius();
    const double kap = geom.principal_curvatures(0.5 * geom.param_end()).kappas[0];
    Axis ta = tube_t_axis(res.n_t, bc);
    meta.multiplicity = 2 * l + 1;
    auto coef = [eps, kap, R, l, &check_positive](double t) {
      const double f = 1.0 - eps * kap * t;
      check_positive(f, 0.0, t);
      Coef1 k;
      k.a = f * f / eps;
      k.pot = eps * double(l) * double(l + 1) / (R * R);
      k.w = eps * f * f;
      return k;
    };
    Eigen::VectorXd sw(1);
    sw[0] = 1.0;
    OperatorPair pair = assemble_1d(ta, coef, std::move(meta), sw);
    // the single "surface node" carries the whole harmonic sector; swap
    // axes so the grid reads as 1 surface node x (n_t + 1) t-nodes
    GridInfo g;
    g.u_nodes = {0.0};
    g.t_nodes = pair.grid.u_nodes;
    g.dof_of_node = pair.grid.dof_of_node;
    g.node_of_dof = pair.grid.node_of_dof;
    g.surface_weights = pair.grid.surface_weights;
    pair.grid = std::move(g);
    return pair;
  }
  case GeometryKind::SurfaceOfRevolution: {
    require_resolution(res.n_surface, "n_surface");
    const int m = res.mode;
    if (m < 0) throw DomainError("azimuthal mode m must be >= 0");
    Axis ua = surface_axis(geom, res.n_surface, bc != TubeBC::NN, m);
    Axis ta = tube_t_axis(res.n_t, bc);
    meta.multiplicity = (m == 0) ? 1 : 2;
    auto coef = [&geom, eps, m, &check_positive](double u, double t) {
      const CurvatureSample c = geom.principal_curvatures(u);
      const double f1 = 1.0 - eps * c.kappas[0] * t;
      const double f2 = 1.0 - eps * c.kappas[1] * t;
      check_positive(f1, u, t);
      check_positive(f2, u, t);
      const double r = geom.ring_radius(u);
      const double h = f1 * f2;
      Coef2 k;
      k.au = eps * h * r / (f1 * f1);
      k.at = h * r / eps;
      if (m != 0) {
        if (r <= 1e-14)
          throw DomainError("azimuthal mode m > 0 needs r > 0 at quadrature points");
        k.pot = eps * h * double(m) * double(m) / (f2 * f2 * r);
      }
      k.w = eps * h * r;
      return k;
    };
    auto sqrtg = [&geom](double u) { return geom.ring_radius(u); };
    return assemble_2d(ua, ta, coef, std::move(meta), surface_quad_weights(ua, sqrtg));
  }
  }
  throw UnsupportedGeometryError("unsupported geometry kind for tube assembly");
}

namespace {

// Shared 1D surface-operator assembly with a pointwise potential V(u).
template <class Pot>
OperatorPair assemble_surface_operator(const Geometry& geom, const Resolution& res,
                                       bool dirichlet_walls, Pot&& V, PairMetadata meta) {
  switch (geom.kind()) {
  case GeometryKind::Segment:
  case GeometryKind::Circle:
  case GeometryKind::Ellipse: {
    require_resolution(res.n_surface, "n_surface");
    Axis ua = surface_axis(geom, res.n_surface, dirichlet_walls, 0);
    meta.multiplicity = 1;
    auto coef = [&geom, &V](double u) {
      const double sg = std::sqrt(geom.metric_coeff(u));
      Coef1 k;
      k.a = 1.0 / sg;
      k.pot = V(u) * sg;
      k.w = sg;
      return k;
    };
    auto sqrtg = [&geom](double u) { return std::sqrt(geom.metric_coeff(u)); };
    return assemble_1d(ua, coef, std::move(meta), surface_quad_weights(ua, sqrtg));
  }
  case GeometryKind::Sphere: {
    // exact per-degree block: -Delta_g restricted to the Y_l sector is
    // l(l+1)/R^2 and every supported potential is constant on the sphere
    const int l = res.mode;
    if (l < 0) throw DomainError("harmonic degree l must be >= 0");
    const double R = geom.radius();
    meta.multiplicity = 2 * l + 1;
    OperatorPair pair;
    pair.A.resize(1, 1);
    pair.B.resize(1, 1);
    std::vector<Eigen::Triplet<double>> ta{{0, 0, double(l) * double(l + 1) / (R * R) +
                                                     V(0.5 * geom.param_end())}};
    std::vector<Eigen::Triplet<double>> tb{{0, 0, 1.0}};
    pair.A.setFromTriplets(ta.begin(), ta.end());
    pair.B.setFromTriplets(tb.begin(), tb.end());
    pair.grid.u_nodes = {0.5 * geom.param_end()};
    pair.grid.t_nodes = {0.0};
    pair.grid.dof_of_node = {0};
    pair.grid.node_of_dof = {0};
    pair.grid.surface_weights = Eigen::VectorXd::Ones(1);
    pair.meta = std::move(meta);
    return pair;
  }
  case GeometryKind::SurfaceOfRevolution: {
    require_resolution(res.n_surface, "n_surface");
    const int m = res.mode;
    if (m < 0) throw DomainError("azimuthal mode m must be >= 0");
    Axis ua = surface_axis(geom, res.n_surface, dirichlet_walls, m);
    meta.multiplicity = (m == 0) ? 1 : 2;
    auto coef = [&geom, &V, m](double u) {
      const double r = geom.ring_radius(u);
      Coef1 k;
      k.a = r;
      k.pot = V(u) * r;
      if (m != 0) {
        if (r <= 1e-14)
          throw DomainError("azimuthal mode m > 0 needs r > 0 at quadrature points");
        k.pot += double(m) * double(m) / r;
      }
      k.w = r;
      return k;
    };
    auto sqrtg = [&geom](double u) { return geom.ring_radius(u); };
    return assemble_1d(ua, coef, std::move(meta), surface_quad_weights(ua, sqrtg));
  }
  }
  throw UnsupportedGeometryError("unsupported geometry kind for surface assembly");
}

} // namespace

OperatorPair assemble_effective_dn(const Geometry& geom, double eps, const Resolution& res) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  PairMetadata meta;
  meta.geometry_id = geom.id();
  meta.form = FormKind::EffectiveDN;
  meta.eps = eps;
  meta.res = res;
  const KappaExtrema ext = geom.kappa_extrema(1024);
  meta.suggested_shift = ext.inf_kappa / eps - 1.0;
  auto V = [&geom, eps](double u) { return geom.principal_curvatures(u).kappa_sum / eps; };
  return assemble_surface_operator(geom, res, /*dirichlet_walls=*/true, V, std::move(meta));
}

OperatorPair assemble_effective_dirichlet(const Geometry& geom, const Resolution& res) {
  PairMetadata meta;
  meta.geometry_id = geom.id();
  meta.form = FormKind::EffectiveDirichlet;
  meta.res = res;
  double vmin = 0.0;
  {
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
      const double u = geom.param_begin() + geom.param_length() * double(i) / n;
      vmin = std::min(vmin, v_eff(geom, u));
    }
  }
  meta.suggested_shift = vmin - 1.0;
  auto V = [&geom](double u) { return v_eff(geom, u); };
  return assemble_surface_operator(geom, res, /*dirichlet_walls=*/true, V, std::move(meta));
}

OperatorPair assemble_surface(const Geometry& geom, const Resolution& res, SurfaceBC bc) {
  PairMetadata meta;
  meta.geometry_id = geom.id();
  meta.form = FormKind::SurfaceLaplacian;
  meta.res = res;
  meta.surface_bc = bc;
  meta.suggested_shift = -1.0;
  auto V = [](double) { return 0.0; };
  return assemble_surface_operator(geom, res, bc == SurfaceBC::Dirichlet, V, std::move(meta));
}

Eigen::MatrixXd field_on_grid(const OperatorPair& pair, const Eigen::VectorXd& dof_values) {
  const GridInfo& g = pair.grid;
  if (dof_values.size() != g.dofs()) throw DomainError("dof vector size mismatch");
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(g.nu(), g.nt());
  for (int d = 0; d < g.dofs(); ++d) {
    const int node = g.node_of_dof[d];
    f(node / g.nt(), node % g.nt()) = dof_values[d];
  }
  return f;
}

void dump_matrix(const Eigen::SparseMatrix<double>& m, std::ostream& os) {
  std::vector<std::tuple<int, int, double>> entries;
  entries.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      entries.emplace_back(it.row(), it.col(), it.value());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                            : std::get<1>(a) < std::get<1>(b);
  });
  char buf[64];
  for (const auto& [r, c, v] : entries) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r, c, v);
    os << buf;
  }
}

void dump_pair(const OperatorPair& pair, std::ostream& os) {
  os << "# A " << pair.A.rows() << " " << pair.A.cols() << " " << pair.A.nonZeros() << "\n";
  dump_matrix(pair.A, os);
  os << "# B " << pair.B.rows() << " " << pair.B.cols() << " " << pair.B.nonZeros() << "\n";
  dump_matrix(pair.B, os);
}

} // namespace tubespec
