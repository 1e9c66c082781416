#include "tubespec/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tubespec {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long x = std::stol(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

Orientation orientation_from(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "outward" || s == "+1" || s == "1") return Orientation::Outward;
  if (s == "inward" || s == "-1") return Orientation::Inward;
  throw ConfigError("bad orientation for " + key + ": '" + v + "'");
}

GeometryKind kind_from(const std::string& v) {
  const std::string s = lower(v);
  if (s == "segment") return GeometryKind::Segment;
  if (s == "circle") return GeometryKind::Circle;
  if (s == "ellipse") return GeometryKind::Ellipse;
  if (s == "sphere") return GeometryKind::Sphere;
  if (s == "revolution" || s == "surface_of_revolution") return GeometryKind::SurfaceOfRevolution;
  throw ConfigError("unknown geometry kind '" + v + "'");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

std::string to_string(CaseKind c) {
  switch (c) {
  case CaseKind::DN: return "dn";
  case CaseKind::Dirichlet: return "dirichlet";
  case CaseKind::Neumann: return "neumann";
  case CaseKind::EffectiveOnly: return "effective";
  }
  return "?";
}

CaseKind case_from_string(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "dn") return CaseKind::DN;
  if (v == "dirichlet" || v == "d") return CaseKind::Dirichlet;
  if (v == "neumann" || v == "n") return CaseKind::Neumann;
  if (v == "effective" || v == "effective-only" || v == "effective_only")
    return CaseKind::EffectiveOnly;
  throw ConfigError("unknown case '" + s + "'");
}

Geometry GeometrySpec::build() const {
  Geometry g = [&] {
    switch (kind) {
    case GeometryKind::Segment: return Geometry::segment(length);
    case GeometryKind::Circle: return Geometry::circle(radius, orientation);
    case GeometryKind::Ellipse: return Geometry::ellipse(a, b, orientation);
    case GeometryKind::Sphere: return Geometry::sphere(radius, orientation);
    case GeometryKind::SurfaceOfRevolution:
      return Geometry::surface_of_revolution(ProfileCurve::load(profile_path), orientation);
    }
    throw ConfigError("invalid geometry kind");
  }();
  g.set_eps_ceiling(eps_ceiling);
  return g;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.apply_override(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void Config::apply_override(const std::string& key_raw, const std::string& value) {
  const std::string key = lower(trim(key_raw));
  if (key == "geometry.kind") geometry.kind = kind_from(value);
  else if (key == "geometry.length") geometry.length = to_double(key, value);
  else if (key == "geometry.radius") geometry.radius = to_double(key, value);
  else if (key == "geometry.a") geometry.a = to_double(key, value);
  else if (key == "geometry.b") geometry.b = to_double(key, value);
  else if (key == "geometry.profile") geometry.profile_path = value;
  else if (key == "geometry.orientation") geometry.orientation = orientation_from(key, value);
  else if (key == "geometry.eps_ceiling") geometry.eps_ceiling = to_double(key, value);
  else if (key == "sweep.eps") {
    eps_list.clear();
    for (const auto& tok : split_list(value)) eps_list.push_back(to_double(key, tok));
  } else if (key == "sweep.n_max") n_max = static_cast<int>(to_long(key, value));
  else if (key == "sweep.cases") {
    cases.clear();
    for (const auto& tok : split_list(value)) cases.push_back(case_from_string(tok));
  } else if (key == "grid.n_surface") base_res.n_surface = static_cast<int>(to_long(key, value));
  else if (key == "grid.n_t") base_res.n_t = static_cast<int>(to_long(key, value));
  else if (key == "grid.extrapolate") extrapolate = to_bool(key, value);
  else if (key == "grid.tol_disc") tol_disc = to_double(key, value);
  else if (key == "grid.max_refine") max_refine = static_cast<int>(to_long(key, value));
  else if (key == "blocks.cutoff") block_cutoff = static_cast<int>(to_long(key, value));
  else if (key == "solver.tol") solver_tol = to_double(key, value);
  else if (key == "solver.seed") seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "run.workers") workers = static_cast<int>(to_long(key, value));
  else if (key == "output.dir") out_dir = value;
  else if (key == "output.formats") formats = split_list(lower(value));
  else throw ConfigError("unknown config key '" + key_raw + "'");
}

void Config::apply_geometry_shorthand(const std::string& text) {
  std::vector<std::string> parts;
  {
    std::string cur;
    for (char c : text) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
  }
  if (parts.empty() || parts[0].empty()) throw ConfigError("empty geometry shorthand");
  geometry.kind = kind_from(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string part = trim(parts[i]);
    if (part.empty()) continue;
    if (lower(part) == "outward" || lower(part) == "inward") {
      geometry.orientation = orientation_from("geometry", part);
      continue;
    }
    for (const auto& kv : split_list(part)) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("geometry shorthand expects key=value, got '" + kv + "'");
      const std::string k = lower(trim(kv.substr(0, eq)));
      const std::string v = trim(kv.substr(eq + 1));
      if (k == "length" || k == "l") geometry.length = to_double(k, v);
      else if (k == "radius" || k == "r") geometry.radius = to_double(k, v);
      else if (k == "a") geometry.a = to_double(k, v);
      else if (k == "b") geometry.b = to_double(k, v);
      else if (k == "profile") geometry.profile_path = v;
      else throw ConfigError("unknown geometry parameter '" + k + "'");
    }
  }
}

void Config::validate() const {
  if (n_max < 1) throw ConfigError("sweep.n_max must be >= 1");
  if (eps_list.empty()) throw ConfigError("sweep.eps must not be empty");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ConfigError("sweep.eps must be strictly decreasing");
  if (eps_list.back() <= 0) throw ConfigError("sweep.eps must be positive");
  if (base_res.n_surface < 8 || base_res.n_t < 8)
    throw ConfigError("grid resolutions must be >= 8");
  if (block_cutoff < 0) throw ConfigError("blocks.cutoff must be >= 0");
  if (cases.empty()) throw ConfigError("sweep.cases must not be empty");
  const Geometry g = geometry.build();
  const double cap = g.max_admissible_eps();
  for (double e : eps_list)
    if (!(e < cap))
      throw ConfigError("eps = " + std::to_string(e) + " is not below the admissible bound " +
                        std::to_string(cap) + " for " + g.id());
}

std::string Config::canonical_text() const {
  std::map<std::string, std::string> kv;
  kv["geometry.kind"] = to_string(geometry.kind);
  kv["geometry.orientation"] = to_string(geometry.orientation);
  kv["geometry.eps_ceiling"] = fmt_double(geometry.eps_ceiling);
  switch (geometry.kind) {
  case GeometryKind::Segment: kv["geometry.length"] = fmt_double(geometry.length); break;
  case GeometryKind::Circle:
  case GeometryKind::Sphere: kv["geometry.radius"] = fmt_double(geometry.radius); break;
  case GeometryKind::Ellipse:
    kv["geometry.a"] = fmt_double(geometry.a);
    kv["geometry.b"] = fmt_double(geometry.b);
    break;
  case GeometryKind::SurfaceOfRevolution: kv["geometry.profile"] = geometry.profile_path; break;
  }
  {
    std::string s;
    for (double e : eps_list) s += (s.empty() ? "" : " ") + fmt_double(e);
    kv["sweep.eps"] = s;
  }
  kv["sweep.n_max"] = std::to_string(n_max);
  {
    std::string s;
    for (CaseKind c : cases) s += (s.empty() ? "" : " ") + to_string(c);
    kv["sweep.cases"] = s;
  }
  kv["grid.n_surface"] = std::to_string(base_res.n_surface);
  kv["grid.n_t"] = std::to_string(base_res.n_t);
  kv["grid.extrapolate"] = extrapolate ? "true" : "false";
  kv["grid.tol_disc"] = fmt_double(tol_disc);
  kv["grid.max_refine"] = std::to_string(max_refine);
  kv["blocks.cutoff"] = std::to_string(block_cutoff);
  kv["solver.tol"] = fmt_double(solver_tol);
  kv["solver.seed"] = std::to_string(seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t Config::hash() const {
  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace tubespec
