#include "tubespec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace tubespec {

namespace {
constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }
} // namespace

std::string to_string(GeometryKind kind) {
  switch (kind) {
  case GeometryKind::Segment: return "segment";
  case GeometryKind::Circle: return "circle";
  case GeometryKind::Ellipse: return "ellipse";
  case GeometryKind::Sphere: return "sphere";
  case GeometryKind::SurfaceOfRevolution: return "revolution";
  }
  return "?";
}

std::string to_string(Orientation o) {
  return o == Orientation::Outward ? "outward" : "inward";
}

// ---------------------------------------------------------------------------
// ProfileCurve

ProfileCurve ProfileCurve::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file: " + path);
  std::vector<std::array<double, 3>> rows;
  int ncols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::array<double, 3> row{};
    int n = 0;
    double v;
    while (ls >> v) {
      if (n < 3) row[n] = v;
      ++n;
    }
    if (n == 0) continue;
    if (n != 2 && n != 3)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 2 or 3 columns, got " + std::to_string(n));
    if (ncols == 0) ncols = n;
    if (n != ncols)
      throw IoError(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    rows.push_back(row);
  }
  if (rows.size() < 4) throw IoError(path + ": need at least 4 profile samples");

  ProfileCurve p;
  for (const auto& row : rows) {
    if (ncols == 3) {
      p.s.push_back(row[0]);
      p.r.push_back(row[1]);
      p.z.push_back(row[2]);
    } else {
      p.r.push_back(row[0]);
      p.z.push_back(row[1]);
    }
  }
  if (ncols == 2) {
    p.s.assign(p.r.size(), 0.0);
    for (std::size_t i = 1; i < p.r.size(); ++i)
      p.s[i] = p.s[i - 1] + std::hypot(p.r[i] - p.r[i - 1], p.z[i] - p.z[i - 1]);
  }
  p.finalize();
  return p;
}

ProfileCurve ProfileCurve::from_rz(std::vector<double> r, std::vector<double> z) {
  ProfileCurve p;
  p.r = std::move(r);
  p.z = std::move(z);
  if (p.r.size() != p.z.size() || p.r.size() < 4)
    throw DomainError("profile needs >= 4 (r, z) samples");
  p.s.assign(p.r.size(), 0.0);
  for (std::size_t i = 1; i < p.r.size(); ++i)
    p.s[i] = p.s[i - 1] + std::hypot(p.r[i] - p.r[i - 1], p.z[i] - p.z[i - 1]);
  p.finalize();
  return p;
}

void ProfileCurve::finalize() {
  const std::size_t n = s.size();
  if (n < 4 || r.size() != n || z.size() != n)
    throw DomainError("profile needs >= 4 consistent (s, r, z) samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(s[i] > s[i - 1])) throw DomainError("profile arclength must be strictly increasing");
  for (std::size_t i = 0; i < n; ++i)
    if (r[i] < -1e-12) throw DomainError("profile radius must be nonnegative");

  auto fd = [&](const std::vector<double>& f, std::size_t i) {
    // centered second-order difference on a (possibly mildly nonuniform) grid
    if (i == 0) {
      double h = s[1] - s[0];
      return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    }
    if (i == n - 1) {
      double h = s[n - 1] - s[n - 2];
      return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    }
    double hl = s[i] - s[i - 1], hr = s[i + 1] - s[i];
    return (f[i + 1] * hl * hl - f[i - 1] * hr * hr + f[i] * (hr * hr - hl * hl)) /
           (hl * hr * (hl + hr));
  };

  if (dr.size() != n || dz.size() != n) {
    dr.resize(n);
    dz.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      dr[i] = fd(r, i);
      dz[i] = fd(z, i);
    }
  }
  // validate unit-speed parameterization (the curvature formulas assume it)
  for (std::size_t i = 0; i < n; ++i) {
    double speed = std::hypot(dr[i], dz[i]);
    if (std::abs(speed - 1.0) > 0.05)
      throw DomainError("profile is not arclength-parameterized (|c'| = " +
                        std::to_string(speed) + " at sample " + std::to_string(i) + ")");
    // renormalize the small residual so downstream formulas stay consistent
    dr[i] /= speed;
    dz[i] /= speed;
  }
  if (curv.size() != n) {
    curv.resize(n);
    std::vector<double> ddr(n), ddz(n);
    for (std::size_t i = 0; i < n; ++i) {
      ddr[i] = fd(dr, i);
      ddz[i] = fd(dz, i);
    }
    for (std::size_t i = 0; i < n; ++i) curv[i] = dr[i] * ddz[i] - ddr[i] * dz[i];
  }
}

bool ProfileCurve::closed() const {
  if (s.size() < 4) return false;
  const std::size_t m = s.size() - 1;
  double scale = std::max(1.0, std::abs(r[0]) + std::abs(z[0]));
  return std::hypot(r[m] - r[0], z[m] - z[0]) < 1e-9 * scale &&
         std::hypot(dr[m] - dr[0], dz[m] - dz[0]) < 1e-6;
}

// ---------------------------------------------------------------------------
// Geometry constructors

Geometry Geometry::segment(double length) {
  if (!(length > 0)) throw DomainError("segment length must be positive");
  Geometry g;
  g.kind_ = GeometryKind::Segment;
  g.length_ = length;
  return g;
}

Geometry Geometry::circle(double radius, Orientation o) {
  if (!(radius > 0)) throw DomainError("circle radius must be positive");
  Geometry g;
  g.kind_ = GeometryKind::Circle;
  g.radius_ = radius;
  g.orient_ = o;
  return g;
}

Geometry Geometry::ellipse(double semi_a, double semi_b, Orientation o) {
  if (!(semi_a > 0) || !(semi_b > 0)) throw DomainError("ellipse semi-axes must be positive");
  Geometry g;
  g.kind_ = GeometryKind::Ellipse;
  g.a_ = semi_a;
  g.b_ = semi_b;
  g.orient_ = o;
  return g;
}

Geometry Geometry::sphere(double radius, Orientation o) {
  if (!(radius > 0)) throw DomainError("sphere radius must be positive");
  Geometry g;
  g.kind_ = GeometryKind::Sphere;
  g.radius_ = radius;
  g.orient_ = o;
  return g;
}

Geometry Geometry::surface_of_revolution(ProfileCurve profile, Orientation o) {
  profile.finalize();
  Geometry g;
  g.kind_ = GeometryKind::SurfaceOfRevolution;
  g.profile_ = std::move(profile);
  g.orient_ = o;
  return g;
}

Geometry Geometry::flipped() const {
  Geometry g = *this;
  g.orient_ = (orient_ == Orientation::Outward) ? Orientation::Inward : Orientation::Outward;
  return g;
}

// ---------------------------------------------------------------------------
// Basic queries

int Geometry::surface_dim() const {
  switch (kind_) {
  case GeometryKind::Segment:
  case GeometryKind::Circle:
  case GeometryKind::Ellipse: return 1;
  case GeometryKind::Sphere:
  case GeometryKind::SurfaceOfRevolution: return 2;
  }
  return 1;
}

bool Geometry::has_boundary() const {
  switch (kind_) {
  case GeometryKind::Segment: return true;
  case GeometryKind::Circle:
  case GeometryKind::Ellipse:
  case GeometryKind::Sphere: return false;
  case GeometryKind::SurfaceOfRevolution: {
    if (profile_.closed()) return false;
    // profile endpoints on the axis close the surface (sphere-like)
    return profile_.r.front() > 1e-9 || profile_.r.back() > 1e-9;
  }
  }
  return false;
}

bool Geometry::periodic_param() const {
  switch (kind_) {
  case GeometryKind::Circle:
  case GeometryKind::Ellipse: return true;
  case GeometryKind::SurfaceOfRevolution: return profile_.closed();
  default: return false;
  }
}

double Geometry::param_begin() const {
  if (kind_ == GeometryKind::SurfaceOfRevolution) return profile_.s.front();
  return 0.0;
}

double Geometry::param_end() const {
  switch (kind_) {
  case GeometryKind::Segment: return length_;
  case GeometryKind::Circle: return 2.0 * kPi * radius_;
  case GeometryKind::Ellipse: return 2.0 * kPi;
  case GeometryKind::Sphere: return kPi * radius_;
  case GeometryKind::SurfaceOfRevolution: return profile_.s.back();
  }
  return 0.0;
}

std::string Geometry::id() const {
  std::ostringstream os;
  os << to_string(kind_);
  switch (kind_) {
  case GeometryKind::Segment: os << "(L=" << length_ << ")"; break;
  case GeometryKind::Circle: os << "(R=" << radius_ << "," << to_string(orient_) << ")"; break;
  case GeometryKind::Ellipse:
    os << "(a=" << a_ << ",b=" << b_ << "," << to_string(orient_) << ")";
    break;
  case GeometryKind::Sphere: os << "(R=" << radius_ << "," << to_string(orient_) << ")"; break;
  case GeometryKind::SurfaceOfRevolution:
    os << "(n=" << profile_.size() << "," << to_string(orient_) << ")";
    break;
  }
  return os.str();
}

Geometry& Geometry::set_eps_ceiling(double cap) {
  if (!(cap > 0)) throw DomainError("eps ceiling must be positive");
  eps_ceiling_ = cap;
  return *this;
}

const ProfileCurve& Geometry::profile() const {
  if (kind_ != GeometryKind::SurfaceOfRevolution)
    throw UnsupportedGeometryError("profile() requires a surface of revolution");
  return profile_;
}

double Geometry::wrap_or_check(double u) const {
  const double u0 = param_begin(), u1 = param_end();
  if (periodic_param()) {
    double span = u1 - u0;
    double w = std::fmod(u - u0, span);
    if (w < 0) w += span;
    return u0 + w;
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(u1 - u0));
  if (u < u0 - slack || u > u1 + slack)
    throw DomainError("point " + std::to_string(u) + " outside parameter domain [" +
                      std::to_string(u0) + ", " + std::to_string(u1) + "]");
  return std::clamp(u, u0, u1);
}

// ---------------------------------------------------------------------------
// Profile interpolation (cubic Hermite on the sample grid)

Geometry::ProfileEval Geometry::eval_profile(double s) const {
  const auto& p = profile_;
  const auto& xs = p.s;
  auto it = std::upper_bound(xs.begin(), xs.end(), s);
  std::size_t i1 = std::clamp<std::size_t>(std::size_t(it - xs.begin()), 1, xs.size() - 1);
  std::size_t i0 = i1 - 1;
  const double h = xs[i1] - xs[i0];
  const double x = (s - xs[i0]) / h;
  auto hermite = [&](double f0, double f1, double d0, double d1, double* deriv) {
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1, h10 = x3 - 2 * x2 + x;
    const double h01 = -2 * x3 + 3 * x2, h11 = x3 - x2;
    if (deriv) {
      const double g00 = (6 * x2 - 6 * x) / h, g10 = (3 * x2 - 4 * x + 1);
      const double g01 = (-6 * x2 + 6 * x) / h, g11 = (3 * x2 - 2 * x);
      *deriv = f0 * g00 + d0 * h * g10 / h + f1 * g01 + d1 * h * g11 / h;
    }
    return f0 * h00 + d0 * h * h10 + f1 * h01 + d1 * h * h11;
  };
  ProfileEval e{};
  e.r = hermite(p.r[i0], p.r[i1], p.dr[i0], p.dr[i1], &e.dr);
  e.z = hermite(p.z[i0], p.z[i1], p.dz[i0], p.dz[i1], &e.dz);
  // curvature varies slowly; linear interpolation of the sample values
  e.curv = p.curv[i0] + (p.curv[i1] - p.curv[i0]) * x;
  return e;
}

// ---------------------------------------------------------------------------
// Curvature and metric

CurvatureSample Geometry::principal_curvatures(double u) const {
  u = wrap_or_check(u);
  const double sign = static_cast<double>(orient_);
  CurvatureSample c;
  c.point = u;
  switch (kind_) {
  case GeometryKind::Segment:
    c.count = 1;
    c.kappas[0] = 0.0;
    break;
  case GeometryKind::Circle:
    c.count = 1;
    // outward normal: parallel circle has radius R + eps*t, so kappa = -1/R
    c.kappas[0] = -sign / radius_;
    break;
  case GeometryKind::Ellipse: {
    c.count = 1;
    const double D = sq(a_ * std::sin(u)) + sq(b_ * std::cos(u));
    const double inward = a_ * b_ / (D * std::sqrt(D));
    c.kappas[0] = -sign * inward;
    break;
  }
  case GeometryKind::Sphere:
    c.count = 2;
    c.kappas[0] = c.kappas[1] = -sign / radius_;
    break;
  case GeometryKind::SurfaceOfRevolution: {
    c.count = 2;
    const ProfileEval e = eval_profile(u);
    // canonical normal n0 = (-z' cos, -z' sin, r'); Outward = +n0
    const double merid = e.curv;
    double azim;
    if (e.r > 1e-12) {
      azim = e.dz / e.r;
    } else {
      // axis point: the surface is smooth only if z' -> 0 there; the
      // azimuthal curvature limit equals the meridian one
      azim = merid;
    }
    c.kappas[0] = sign * merid;
    c.kappas[1] = sign * azim;
    break;
  }
  }
  c.kappa_sum = 0.0;
  for (int i = 0; i < c.count; ++i) c.kappa_sum += c.kappas[i];
  return c;
}

double Geometry::h_eps(double u, double t, double eps) const {
  if (t < -1e-12 || t > 1.0 + 1e-12)
    throw DomainError("transverse coordinate t must lie in [0, 1]");
  const CurvatureSample c = principal_curvatures(u);
  double h = 1.0;
  for (int i = 0; i < c.count; ++i) h *= 1.0 - eps * c.kappas[i] * t;
  if (!(h > 0.0))
    throw DegenerateTubeError("tube degenerates: h_eps = " + std::to_string(h) +
                              " at u = " + std::to_string(u) + ", t = " + std::to_string(t) +
                              ", eps = " + std::to_string(eps));
  return h;
}

double Geometry::metric_coeff(double u) const {
  u = wrap_or_check(u);
  switch (kind_) {
  case GeometryKind::Segment:
  case GeometryKind::Circle:
  case GeometryKind::Sphere: return 1.0;  // arclength parameter
  case GeometryKind::Ellipse: return sq(a_ * std::sin(u)) + sq(b_ * std::cos(u));
  case GeometryKind::SurfaceOfRevolution: return 1.0;
  }
  return 1.0;
}

double Geometry::ring_radius(double u) const {
  u = wrap_or_check(u);
  switch (kind_) {
  case GeometryKind::Sphere: return radius_ * std::sin(u / radius_);
  case GeometryKind::SurfaceOfRevolution: return std::max(eval_profile(u).r, 0.0);
  default:
    throw UnsupportedGeometryError("ring_radius requires a 2-dimensional surface");
  }
}

double Geometry::sqrt_det_g(double u) const {
  if (surface_dim() == 1) return std::sqrt(metric_coeff(u));
  return std::sqrt(metric_coeff(u)) * ring_radius(u);
}

FermiMetric Geometry::fermi_metric(double u, double t, double eps) const {
  const CurvatureSample c = principal_curvatures(u);
  FermiMetric m;
  m.count = c.count;
  m.g_diag[0] = metric_coeff(u);
  if (c.count == 2) m.g_diag[1] = sq(ring_radius(u));
  m.h = 1.0;
  if (t < -1e-12 || t > 1.0 + 1e-12)
    throw DomainError("transverse coordinate t must lie in [0, 1]");
  for (int i = 0; i < c.count; ++i) {
    const double f = 1.0 - eps * c.kappas[i] * t;
    m.G_diag[i] = f * f * m.g_diag[i];
    m.h *= f;
  }
  if (!(m.h > 0.0))
    throw DegenerateTubeError("tube degenerates: h_eps = " + std::to_string(m.h));
  m.tt = eps * eps;
  double detg = m.g_diag[0];
  if (c.count == 2) detg *= m.g_diag[1];
  m.sqrt_detG = eps * std::sqrt(detg) * m.h;
  return m;
}

KappaExtrema Geometry::kappa_extrema(int resolution) const {
  if (resolution < 2) throw DomainError("kappa_extrema needs at least 2 samples");
  KappaExtrema ext;
  ext.count = surface_dim();
  const double sign = static_cast<double>(orient_);
  switch (kind_) {
  case GeometryKind::Segment:
    ext.inf_kappa = ext.sup_kappa = 0.0;
    ext.sup_abs_each = {0.0, 0.0};
    ext.exact = true;
    break;
  case GeometryKind::Circle: {
    const double k = -sign / radius_;
    ext.inf_kappa = ext.sup_kappa = k;
    ext.sup_abs_each = {std::abs(k), 0.0};
    ext.exact = true;
    break;
  }
  case GeometryKind::Sphere: {
    const double k = -sign / radius_;
    ext.inf_kappa = ext.sup_kappa = 2.0 * k;
    ext.sup_abs_each = {std::abs(k), std::abs(k)};
    ext.exact = true;
    break;
  }
  case GeometryKind::Ellipse:
  case GeometryKind::SurfaceOfRevolution: {
    const double u0 = param_begin(), u1 = param_end();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::array<double, 2> amax{0.0, 0.0};
    const int n = resolution;
    const bool per = periodic_param();
    for (int i = 0; i < n; ++i) {
      const double u = u0 + (u1 - u0) * (per ? double(i) / n : double(i) / (n - 1));
      const CurvatureSample c = principal_curvatures(u);
      lo = std::min(lo, c.kappa_sum);
      hi = std::max(hi, c.kappa_sum);
      for (int j = 0; j < c.count; ++j) amax[j] = std::max(amax[j], std::abs(c.kappas[j]));
    }
    ext.inf_kappa = lo;
    ext.sup_kappa = hi;
    ext.sup_abs_each = amax;
    ext.exact = false;
    break;
  }
  }
  ext.sup_abs = std::max(ext.sup_abs_each[0], ext.count == 2 ? ext.sup_abs_each[1] : 0.0);
  return ext;
}

double Geometry::max_admissible_eps() const {
  // h_eps > 0 for all t in [0,1] iff eps * max(kappa_mu)+ < 1.  For the
  // supported convex closed kinds this local bound coincides with the
  // injectivity radius on the chosen side; for general revolution
  // profiles it is only the local (non-degeneracy) condition.
  double sup_pos = 0.0;
  switch (kind_) {
  case GeometryKind::Segment: sup_pos = 0.0; break;
  case GeometryKind::Circle:
    sup_pos = (orient_ == Orientation::Inward) ? 1.0 / radius_ : 0.0;
    break;
  case GeometryKind::Sphere:
    sup_pos = (orient_ == Orientation::Inward) ? 1.0 / radius_ : 0.0;
    break;
  case GeometryKind::Ellipse: {
    // inward curvature range [b/a^2, a/b^2] (for a >= b)
    const double kmax = std::max(a_ / (b_ * b_), b_ / (a_ * a_));
    sup_pos = (orient_ == Orientation::Inward) ? kmax : 0.0;
    break;
  }
  case GeometryKind::SurfaceOfRevolution: {
    // need each factor 1 - eps*kappa_mu*t positive: bound by positive parts
    const int n = 4096;
    const double u0 = param_begin(), u1 = param_end();
    for (int i = 0; i <= n; ++i) {
      const double u = u0 + (u1 - u0) * double(i) / n;
      const CurvatureSample c = principal_curvatures(u);
      for (int j = 0; j < c.count; ++j) sup_pos = std::max(sup_pos, c.kappas[j]);
    }
    break;
  }
  }
  if (sup_pos <= 0.0) return eps_ceiling_;
  return std::min(eps_ceiling_, 1.0 / sup_pos);
}

} // namespace tubespec
