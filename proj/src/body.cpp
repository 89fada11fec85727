#include "symcover/body.hpp"

#include "symcover/body_json.hpp"
#include "symcover/direct_search.hpp"
#include "symcover/lp.hpp"
#include "symcover/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace symcover {

namespace detail {

struct HRep {
  Mat a;  // unit rows
  Vec b;
};

/// {from_unit·z + shift : ‖z‖_p <= 1}; p = +inf is the cube.
struct LpPart {
  double p = 2.0;
  Mat to_unit;
  Mat from_unit;
  Vec shift;
  bool shifted = false;
  double to_unit_norm = 1.0;
};

enum class Family { cube, simplex, cross, lp_ball, polygon };

struct Generator {
  Family family = Family::cube;
  double p = 2.0;
  int n = 0;
  Mat map;
  Vec shift;
  std::vector<std::array<Point2, 3>> triangles;
  std::vector<double> cumulative;
};

struct Geometry {
  int dim = 0;
  BodyStatus status = BodyStatus::full;
  std::optional<HRep> poly;
  std::vector<LpPart> balls;
  std::optional<HRep> hrep;
  std::optional<Points> vertices;
  std::optional<Generator> gen;
  std::optional<double> volume;
  std::optional<Vec> barycenter;
  std::optional<Polygon2D> polygon;
  std::optional<Vec> interior_hint;

  Vec interior;
  Vec lo, hi;
  double radius = 0.0;
  double inradius = 0.0;
  bool origin_interior = false;
  bool origin_symmetric = false;
};

}  // namespace detail

namespace {

using detail::Family;
using detail::Generator;
using detail::Geometry;
using detail::HRep;
using detail::LpPart;

constexpr double kTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxEnumeratedDim = 12;

// ---------------------------------------------------------------- spec dims

int spec_dim(const ConvexBodySpec& spec) { return spec.dim(); }

// ------------------------------------------------------------------ norms

double lp_norm(const Vec& z, double p) {
  if (std::isinf(p)) return z.cwiseAbs().maxCoeff();
  if (p == 1.0) return z.cwiseAbs().sum();
  if (p == 2.0) return z.norm();
  const double m = z.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += std::pow(std::abs(z[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

double dual_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInf;
  return p / (p - 1.0);
}

// Maximizer of <z, w> over the unit lp ball.
Vec lp_argmax(const Vec& w, double p) {
  const Eigen::Index n = w.size();
  Vec z = Vec::Zero(n);
  if (w.cwiseAbs().maxCoeff() == 0.0) return z;
  if (std::isinf(p)) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = w[i] > 0 ? 1.0 : (w[i] < 0 ? -1.0 : 0.0);
    return z;
  }
  if (p == 1.0) {
    Eigen::Index k = 0;
    w.cwiseAbs().maxCoeff(&k);
    z[k] = w[k] > 0 ? 1.0 : -1.0;
    return z;
  }
  const double q = dual_exponent(p);
  const double wq = lp_norm(w, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(w[i]) / wq;
    z[i] = std::copysign(std::pow(a, q - 1.0), w[i]);
  }
  return z;
}

// Interval {t : ‖z + t e‖_p <= 1} for ‖z‖_p <= 1.
std::pair<double, double> lp_chord(const Vec& z, const Vec& e, double p) {
  const double emax = e.cwiseAbs().maxCoeff();
  if (emax == 0.0) return {-kInf, kInf};
  if (p == 2.0) {
    const double a = e.squaredNorm();
    const double b = z.dot(e);
    const double c = z.squaredNorm() - 1.0;
    const double disc = std::max(0.0, b * b - a * c);
    const double root = std::sqrt(disc);
    return {(-b - root) / a, (-b + root) / a};
  }
  if (std::isinf(p)) {
    double lo = -kInf, hi = kInf;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (e[i] == 0.0) continue;
      double t1 = (-1.0 - z[i]) / e[i];
      double t2 = (1.0 - z[i]) / e[i];
      if (t1 > t2) std::swap(t1, t2);
      lo = std::max(lo, t1);
      hi = std::min(hi, t2);
    }
    return {lo, hi};
  }
  const double bound = (1.0 + z.cwiseAbs().maxCoeff()) / emax * (1.0 + 1e-12) + 1e-300;
  auto edge = [&](double sign) {
    double inside = 0.0, outside = bound;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (lp_norm(z + (sign * mid) * e, p) <= 1.0) inside = mid; else outside = mid;
    }
    return inside;
  };
  return {-edge(-1.0), edge(1.0)};
}

// Unit-ball inradius of the lp ball about 0.
double lp_unit_inradius(double p, int n) {
  if (p >= 2.0) return 1.0;
  return std::pow(static_cast<double>(n), 0.5 - 1.0 / p);
}

// ----------------------------------------------------------------- H-reps

HRep normalized(const Mat& a, const Vec& b) {
  std::vector<Eigen::Index> keep;
  Vec norms(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    norms[i] = a.row(i).norm();
    if (norms[i] > 1e-300) {
      keep.push_back(i);
    } else if (b[i] < -kTol) {
      throw Error(ErrorKind::EmptyBody, "halfspace 0·x <= negative offset");
    }
  }
  HRep out{Mat(static_cast<Eigen::Index>(keep.size()), a.cols()), Vec(static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Eigen::Index i = keep[k];
    out.a.row(static_cast<Eigen::Index>(k)) = a.row(i) / norms[i];
    out.b[static_cast<Eigen::Index>(k)] = b[i] / norms[i];
  }
  return out;
}

HRep stacked(const HRep& x, const HRep& y) {
  HRep out{Mat(x.a.rows() + y.a.rows(), x.a.cols()), Vec(x.b.size() + y.b.size())};
  out.a << x.a, y.a;
  out.b << x.b, y.b;
  return out;
}

struct Chebyshev {
  LpStatus status;
  Vec center;
  double radius = 0.0;
};

Chebyshev chebyshev_center(const HRep& h) {
  const Eigen::Index n = h.a.cols();
  LinearProgram lp;
  lp.objective = Vec::Zero(n + 1);
  lp.objective[n] = 1.0;
  lp.a_ub = Mat(h.a.rows() + 1, n + 1);
  lp.a_ub.topLeftCorner(h.a.rows(), n) = h.a;
  lp.a_ub.topRightCorner(h.a.rows(), 1).setOnes();  // rows are unit
  lp.a_ub.bottomRows(1).setZero();
  lp.a_ub(h.a.rows(), n) = 1.0;
  lp.b_ub = Vec(h.a.rows() + 1);
  lp.b_ub.head(h.a.rows()) = h.b;
  lp.b_ub[h.a.rows()] = 1e9;
  lp.free_vars.assign(static_cast<std::size_t>(n + 1), true);
  lp.free_vars[static_cast<std::size_t>(n)] = false;
  const LpResult r = solve_lp(lp);
  Chebyshev out{r.status, Vec(), 0.0};
  if (r.status == LpStatus::optimal) {
    out.center = r.x.head(n);
    out.radius = r.x[n];
  }
  return out;
}

double hrep_support(const HRep& h, const Vec& u, Vec* argmax = nullptr) {
  LinearProgram lp;
  lp.objective = u;
  lp.a_ub = h.a;
  lp.b_ub = h.b;
  lp.free_vars.assign(static_cast<std::size_t>(u.size()), true);
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::unbounded) return kInf;
  if (r.status == LpStatus::infeasible) return -kInf;
  if (r.status != LpStatus::optimal) throw Error(ErrorKind::SolverStall, "support LP did not converge");
  if (argmax) *argmax = r.x;
  return r.objective;
}

// Facets of conv(vertices) by checking every affinely independent n-subset.
HRep facets_of(const std::vector<Vec>& vertices) {
  const int n = static_cast<int>(vertices.front().size());
  const int k = static_cast<int>(vertices.size());
  Mat diffs(k - 1, n);
  for (int i = 1; i < k; ++i) diffs.row(i - 1) = (vertices[i] - vertices[0]).transpose();
  Eigen::FullPivLU<Mat> rank_check(diffs);
  rank_check.setThreshold(1e-10);
  if (k < n + 1 || rank_check.rank() < n) {
    throw Error(ErrorKind::InvalidSpec, "v_polytope vertices do not span a full-dimensional body");
  }
  double scale = 0.0;
  for (const auto& v : vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * (1.0 + scale);

  if (n == 1) {
    double lo = kInf, hi = -kInf;
    for (const auto& v : vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    Mat a(2, 1);
    a << 1.0, -1.0;
    Vec b(2);
    b << hi, -lo;
    return {a, b};
  }
  if (n == 2) {
    std::vector<Point2> pts;
    for (const auto& v : vertices) pts.emplace_back(v[0], v[1]);
    const Polygon2D hull = convex_hull(std::move(pts));
    const auto hp = hull.halfplanes();
    HRep out{Mat(static_cast<Eigen::Index>(hp.size()), 2), Vec(static_cast<Eigen::Index>(hp.size()))};
    for (std::size_t i = 0; i < hp.size(); ++i) {
      out.a.row(static_cast<Eigen::Index>(i)) = hp[i].normal.transpose();
      out.b[static_cast<Eigen::Index>(i)] = hp[i].offset;
    }
    return out;
  }

  double combos = 1.0;
  for (int i = 0; i < n; ++i) combos = combos * (k - i) / (i + 1);
  if (combos > 2e6) {
    throw Error(ErrorKind::UnsupportedBodyKind, "v_polytope too large for facet enumeration");
  }

  std::vector<Vec> normals;
  std::vector<double> offsets;
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Mat sub(n - 1, n);
  while (true) {
    for (int r = 1; r < n; ++r) sub.row(r - 1) = (vertices[idx[r]] - vertices[idx[0]]).transpose();
    Eigen::FullPivLU<Mat> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.rank() == n - 1) {
      Vec normal = lu.kernel().col(0);
      normal.normalize();
      double offset = normal.dot(vertices[idx[0]]);
      bool above = false, below = false;
      for (const auto& v : vertices) {
        const double s = normal.dot(v) - offset;
        if (s > tol) above = true;
        if (s < -tol) below = true;
        if (above && below) break;
      }
      if (!(above && below)) {
        if (above) {
          normal = -normal;
          offset = -offset;
        }
        bool duplicate = false;
        for (std::size_t f = 0; f < normals.size() && !duplicate; ++f) {
          duplicate = (normals[f] - normal).cwiseAbs().maxCoeff() < 1e-9 && std::abs(offsets[f] - offset) < tol;
        }
        if (!duplicate) {
          normals.push_back(normal);
          offsets.push_back(offset);
        }
      }
    }
    int pos = n - 1;
    while (pos >= 0 && idx[pos] == k - n + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int r = pos + 1; r < n; ++r) idx[r] = idx[r - 1] + 1;
  }
  HRep out{Mat(static_cast<Eigen::Index>(normals.size()), n), Vec(static_cast<Eigen::Index>(normals.size()))};
  for (std::size_t f = 0; f < normals.size(); ++f) {
    out.a.row(static_cast<Eigen::Index>(f)) = normals[f].transpose();
    out.b[static_cast<Eigen::Index>(f)] = offsets[f];
  }
  return out;
}

// ------------------------------------------------------------ primitives

Points sign_vectors(int n) {
  Points out(Eigen::Index{1} << n, n);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (int j = 0; j < n; ++j) out(r, j) = ((r >> j) & 1) ? 1.0 : -1.0;
  }
  return out;
}

LpPart unit_part(double p, int n) {
  LpPart part;
  part.p = p;
  part.to_unit = Mat::Identity(n, n);
  part.from_unit = Mat::Identity(n, n);
  part.shift = Vec::Zero(n);
  return part;
}

void require_positive_dim(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidSpec, "dimension must be at least 1");
}

Geometry make_cube(int n) {
  require_positive_dim(n);
  Geometry g;
  g.dim = n;
  g.balls.push_back(unit_part(kInf, n));
  Mat a(2 * n, n);
  a << Mat::Identity(n, n), -Mat::Identity(n, n);
  g.hrep = HRep{a, Vec::Ones(2 * n)};
  if (n <= kMaxEnumeratedDim) g.vertices = sign_vectors(n);
  g.gen = Generator{Family::cube, kInf, n, Mat::Identity(n, n), Vec::Zero(n), {}, {}};
  g.volume = std::ldexp(1.0, n);
  g.barycenter = Vec::Zero(n);
  g.interior_hint = Vec::Zero(n);
  return g;
}

Geometry make_lp_ball(double p, int n) {
  require_positive_dim(n);
  if (!(p >= 1.0) || std::isinf(p)) throw Error(ErrorKind::InvalidSpec, "lp_ball needs finite p >= 1");
  Geometry g;
  g.dim = n;
  g.balls.push_back(unit_part(p, n));
  if (p == 1.0) {
    if (n <= kMaxEnumeratedDim) {
      const Points s = sign_vectors(n);
      g.hrep = HRep{Mat(s) / std::sqrt(static_cast<double>(n)), Vec::Constant(s.rows(), 1.0 / std::sqrt(static_cast<double>(n)))};
    }
    Points v(2 * n, n);
    v << Mat::Identity(n, n), -Mat::Identity(n, n);
    g.vertices = v;
  }
  g.gen = Generator{p == 1.0 ? Family::cross : Family::lp_ball, p, n, Mat::Identity(n, n), Vec::Zero(n), {}, {}};
  g.volume = std::exp(n * std::log(2.0 * std::tgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + n / p));
  g.barycenter = Vec::Zero(n);
  g.interior_hint = Vec::Zero(n);
  return g;
}

Geometry make_simplex(int n) {
  require_positive_dim(n);
  Geometry g;
  g.dim = n;
  Mat a(n + 1, n);
  a << -Mat::Identity(n, n), Mat::Constant(1, n, 1.0);
  Vec b = Vec::Zero(n + 1);
  b[n] = 1.0;
  g.hrep = normalized(a, b);
  g.poly = g.hrep;
  Points v = Points::Zero(n + 1, n);
  v.bottomRows(n) = Mat::Identity(n, n);
  g.vertices = v;
  g.gen = Generator{Family::simplex, 1.0, n, Mat::Identity(n, n), Vec::Zero(n), {}, {}};
  g.volume = std::exp(-std::lgamma(n + 1.0));
  g.barycenter = Vec::Constant(n, 1.0 / (n + 1.0));
  g.interior_hint = g.barycenter;
  return g;
}

Geometry transformed(const Geometry& in, const Mat& m, const Vec& s) {
  const int n = in.dim;
  if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::DimMismatch, "affine matrix shape");
  if (s.size() != n) throw Error(ErrorKind::DimMismatch, "affine shift size");
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw Error(ErrorKind::InvalidSpec, "affine matrix is singular");
  const Mat minv = lu.inverse();
  const double det = m.determinant();

  Geometry g;
  g.dim = n;
  g.status = in.status;
  auto map_h = [&](const HRep& h) {
    const Mat a = h.a * minv;
    return normalized(a, h.b + a * s);
  };
  if (in.poly) g.poly = map_h(*in.poly);
  if (in.hrep) g.hrep = map_h(*in.hrep);
  for (const auto& b : in.balls) {
    LpPart part = b;
    part.from_unit = m * b.from_unit;
    part.to_unit = b.to_unit * minv;
    part.shift = m * b.shift + s;
    part.shifted = part.shift.cwiseAbs().maxCoeff() > 0.0;
    part.to_unit_norm = Eigen::JacobiSVD<Mat>(part.to_unit).singularValues()[0];
    g.balls.push_back(std::move(part));
  }
  if (in.vertices) {
    Points v = (*in.vertices) * m.transpose();
    v.rowwise() += s.transpose();
    g.vertices = std::move(v);
  }
  if (in.gen) {
    Generator gen = *in.gen;
    if (gen.family == Family::polygon) {
      for (auto& tri : gen.triangles) {
        for (auto& p : tri) p = (m * Vec(p) + s);
      }
    } else {
      gen.map = m * gen.map;
      gen.shift = m * gen.shift + s;
    }
    g.gen = std::move(gen);
  }
  if (in.volume) g.volume = *in.volume * std::abs(det);
  if (in.barycenter) g.barycenter = m * (*in.barycenter) + s;
  if (in.interior_hint) g.interior_hint = m * (*in.interior_hint) + s;
  if (in.polygon) {
    Polygon2D p;
    for (const auto& v : in.polygon->vertices) p.vertices.push_back(m * Vec(v) + s);
    if (det < 0.0) std::reverse(p.vertices.begin(), p.vertices.end());
    g.polygon = std::move(p);
  }
  return g;
}

Geometry intersected(const Geometry& x, const Geometry& y) {
  if (x.dim != y.dim) throw Error(ErrorKind::DimMismatch, "intersection of bodies of different dimension");
  Geometry g;
  g.dim = x.dim;
  if (x.poly && y.poly) g.poly = stacked(*x.poly, *y.poly);
  else if (x.poly) g.poly = x.poly;
  else if (y.poly) g.poly = y.poly;
  g.balls = x.balls;
  g.balls.insert(g.balls.end(), y.balls.begin(), y.balls.end());
  if (x.hrep && y.hrep) g.hrep = stacked(*x.hrep, *y.hrep);
  return g;
}

Geometry compile(const ConvexBodySpec& spec);

Geometry compile_kind(const kinds::HPolytope& k) {
  if (k.halfspaces.empty()) throw Error(ErrorKind::Unbounded, "h_polytope without halfspaces");
  const auto n = k.halfspaces.front().normal.size();
  Mat a(static_cast<Eigen::Index>(k.halfspaces.size()), n);
  Vec b(a.rows());
  for (std::size_t i = 0; i < k.halfspaces.size(); ++i) {
    require_dim(k.halfspaces[i].normal.size(), static_cast<int>(n), "h_polytope normal");
    a.row(static_cast<Eigen::Index>(i)) = k.halfspaces[i].normal.transpose();
    b[static_cast<Eigen::Index>(i)] = k.halfspaces[i].offset;
  }
  Geometry g;
  g.dim = static_cast<int>(n);
  require_positive_dim(g.dim);
  g.hrep = normalized(a, b);
  g.poly = g.hrep;
  return g;
}

Geometry compile_kind(const kinds::VPolytope& k) {
  if (k.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "v_polytope without vertices");
  const int n = static_cast<int>(k.vertices.front().size());
  require_positive_dim(n);
  Points v(static_cast<Eigen::Index>(k.vertices.size()), n);
  for (std::size_t i = 0; i < k.vertices.size(); ++i) {
    require_dim(k.vertices[i].size(), n, "v_polytope vertex");
    v.row(static_cast<Eigen::Index>(i)) = k.vertices[i].transpose();
  }
  Geometry g;
  g.dim = n;
  g.hrep = facets_of(k.vertices);
  g.poly = g.hrep;
  g.vertices = v;
  g.interior_hint = Vec(v.colwise().mean().transpose());
  return g;
}

Geometry compile_kind(const kinds::LpBall& k) { return make_lp_ball(k.p, k.n); }
Geometry compile_kind(const kinds::Cube& k) { return make_cube(k.n); }
Geometry compile_kind(const kinds::CrossPolytope& k) { return make_lp_ball(1.0, k.n); }

Geometry compile_kind(const kinds::Simplex& k) {
  Geometry g = make_simplex(k.n);
  if (!k.centered) return g;
  return transformed(g, Mat::Identity(k.n, k.n), -(*g.barycenter));
}

Geometry compile_kind(const kinds::AffineImage& k) {
  return transformed(compile(*k.inner), k.matrix, k.shift);
}

Geometry compile_kind(const kinds::Intersection& k) {
  return intersected(compile(*k.a), compile(*k.b));
}

Geometry compile_kind(const kinds::Reflection& k) {
  Geometry inner = compile(*k.inner);
  const int n = inner.dim;
  return transformed(inner, -Mat::Identity(n, n), Vec::Zero(n));
}

Geometry compile_kind(const kinds::Scaled& k) {
  if (!(k.lambda > 0.0)) throw Error(ErrorKind::InvalidSpec, "scale factor must be positive");
  Geometry inner = compile(*k.inner);
  const int n = inner.dim;
  return transformed(inner, k.lambda * Mat::Identity(n, n), Vec::Zero(n));
}

Geometry compile_kind(const kinds::Translated& k) {
  Geometry inner = compile(*k.inner);
  const int n = inner.dim;
  return transformed(inner, Mat::Identity(n, n), k.v);
}

Geometry compile(const ConvexBodySpec& spec) {
  return std::visit([](const auto& k) { return compile_kind(k); }, spec.kind);
}

// ----------------------------------------------------------- evaluation

bool member(const Geometry& g, const Vec& x) {
  if (g.poly) {
    const Vec slack = g.poly->a * x - g.poly->b;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      if (slack[i] > kTol * (1.0 + std::abs(g.poly->b[i]))) return false;
    }
  }
  for (const auto& part : g.balls) {
    const Vec z = part.shifted ? Vec(part.to_unit * (x - part.shift)) : Vec(part.to_unit * x);
    if (lp_norm(z, part.p) > 1.0 + kTol) return false;
  }
  return true;
}

double margin(const Geometry& g, const Vec& x) {
  double m = kInf;
  if (g.poly && g.poly->a.rows() > 0) m = (g.poly->b - g.poly->a * x).minCoeff();
  for (const auto& part : g.balls) {
    const Vec z = part.to_unit * (x - part.shift);
    m = std::min(m, (1.0 - lp_norm(z, part.p)) / part.to_unit_norm);
  }
  return m;
}

double part_support(const LpPart& part, const Vec& u) {
  return part.shift.dot(u) + lp_norm(part.from_unit.transpose() * u, dual_exponent(part.p));
}

bool exact_support_available(const Geometry& g) {
  return g.vertices.has_value() || (g.balls.size() == 1 && !g.poly) || g.hrep.has_value();
}

double exact_support(const Geometry& g, const Vec& u) {
  if (g.vertices) return (*g.vertices * u).maxCoeff();
  if (g.balls.size() == 1 && !g.poly) return part_support(g.balls.front(), u);
  if (g.hrep) return hrep_support(*g.hrep, u);
  throw Error(ErrorKind::UnsupportedBodyKind, "no exact support function for this body");
}

double support_upper(const Geometry& g, const Vec& u) {
  if (exact_support_available(g)) return exact_support(g, u);
  double s = kInf;
  for (const auto& part : g.balls) s = std::min(s, part_support(part, u));
  if (g.poly) s = std::min(s, hrep_support(*g.poly, u));
  return s;
}

Generator polygon_generator(const Polygon2D& poly) {
  Generator gen;
  gen.family = Family::polygon;
  gen.n = 2;
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < poly.vertices.size(); ++i) {
    const std::array<Point2, 3> tri{poly.vertices[0], poly.vertices[i], poly.vertices[i + 1]};
    const Point2 e1 = tri[1] - tri[0];
    const Point2 e2 = tri[2] - tri[0];
    total += 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    gen.triangles.push_back(tri);
    gen.cumulative.push_back(total);
  }
  for (auto& c : gen.cumulative) c /= total;
  gen.cumulative.back() = 1.0;
  return gen;
}

Polygon2D polygon_of(const HRep& h, double extent) {
  Polygon2D box{{Point2(-extent, -extent), Point2(extent, -extent), Point2(extent, extent), Point2(-extent, extent)}};
  for (Eigen::Index i = 0; i < h.a.rows(); ++i) {
    box = clip(box, HalfPlane{Point2(h.a(i, 0), h.a(i, 1)), h.b[i]});
    if (box.empty()) return {};
  }
  return box;
}

bool rows_symmetric(const std::optional<HRep>& h) {
  if (!h) return true;
  const double scale = 1.0 + h->b.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < h->a.rows(); ++i) {
    bool found = false;
    for (Eigen::Index j = 0; j < h->a.rows() && !found; ++j) {
      found = (h->a.row(i) + h->a.row(j)).cwiseAbs().maxCoeff() < 1e-12 && std::abs(h->b[i] - h->b[j]) < 1e-12 * scale;
    }
    if (!found) return false;
  }
  return true;
}

// Populates status, interior point, bounding box, polygon and sampler.
void finalize(Geometry& g, const std::optional<Vec>& forced_center) {
  const int n = g.dim;

  if (forced_center) {
    // Bodies symmetric about the center are nonempty iff they contain it and
    // have interior iff it is interior.
    const double m = margin(g, *forced_center);
    g.interior = *forced_center;
    if (m > kTol) g.status = BodyStatus::full;
    else if (member(g, *forced_center)) g.status = BodyStatus::degenerate;
    else g.status = BodyStatus::empty;
  } else if (g.interior_hint && margin(g, *g.interior_hint) > kTol) {
    g.interior = *g.interior_hint;
    g.status = BodyStatus::full;
  } else if (g.hrep) {
    const Chebyshev c = chebyshev_center(*g.hrep);
    if (c.status == LpStatus::infeasible) {
      g.status = BodyStatus::empty;
    } else if (c.status != LpStatus::optimal || c.radius >= 1e9 * (1.0 - 1e-12)) {
      throw Error(ErrorKind::Unbounded, "halfspaces do not bound a compact set");
    } else {
      g.interior = c.center;
      g.inradius = c.radius;
      g.status = c.radius > kTol ? BodyStatus::full : BodyStatus::degenerate;
    }
  } else {
    Vec start = g.interior_hint.value_or(Vec::Zero(n));
    for (const auto& part : g.balls) start += part.shift;
    start /= static_cast<double>(g.balls.size() + 1);
    auto objective = [&](const Vec& x) { return -margin(g, x); };
    DirectSearchOptions opts;
    opts.max_evals = 2000 * n;
    opts.initial_step = 0.25;
    const auto res = nelder_mead_minimize(objective, start, opts);
    g.interior = res.x;
    const double m = -res.value;
    g.status = m > kTol ? BodyStatus::full : (m >= -kTol ? BodyStatus::degenerate : BodyStatus::empty);
  }

  if (g.status == BodyStatus::empty) {
    g.lo = Vec::Constant(n, std::numeric_limits<double>::quiet_NaN());
    g.hi = g.lo;
    return;
  }

  g.lo.resize(n);
  g.hi.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    g.hi[i] = support_upper(g, e);
    g.lo[i] = -support_upper(g, -e);
  }
  if (!g.lo.allFinite() || !g.hi.allFinite()) throw Error(ErrorKind::Unbounded, "body has no finite bounding box");
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += std::max(g.lo[i] * g.lo[i], g.hi[i] * g.hi[i]);
  g.radius = std::sqrt(r2);

  if (n == 2 && g.hrep && !g.polygon && g.status == BodyStatus::full) {
    const double extent = 2.0 * g.radius + 1.0;
    g.polygon = polygon_of(*g.hrep, extent);
  }
  if (g.polygon && !g.polygon->empty()) {
    if (!g.vertices) {
      Points v(static_cast<Eigen::Index>(g.polygon->vertices.size()), 2);
      for (std::size_t i = 0; i < g.polygon->vertices.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = g.polygon->vertices[i].transpose();
      g.vertices = v;
    }
    g.volume = g.polygon->area();
    g.barycenter = Vec(g.polygon->centroid());
    if (!g.gen) g.gen = polygon_generator(*g.polygon);
  }

  if (g.status == BodyStatus::full && g.inradius == 0.0) {
    if (g.hrep) {
      g.inradius = chebyshev_center(*g.hrep).radius;
    } else if (g.balls.size() == 1 && !g.poly) {
      const LpPart& part = g.balls.front();
      g.inradius = lp_unit_inradius(part.p, n) / part.to_unit_norm;
    } else {
      g.inradius = std::max(0.0, margin(g, g.interior));
    }
  }
  g.origin_interior = g.status == BodyStatus::full && margin(g, Vec::Zero(n)) > kTol;
  g.origin_symmetric = rows_symmetric(g.poly) &&
                       std::all_of(g.balls.begin(), g.balls.end(), [](const LpPart& b) {
                         return b.shift.cwiseAbs().maxCoeff() == 0.0;
                       });
}

double part_gauge(const LpPart& part, const Vec& x) {
  if (!part.shifted) return lp_norm(part.to_unit * x, part.p);
  const Vec d = part.to_unit * x;
  if (d.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Vec z0 = -(part.to_unit * part.shift);
  // Largest t with ‖z0 + t d‖_p <= 1; the gauge is 1/t.
  const double t = lp_chord(z0, d, part.p).second;
  return 1.0 / t;
}

void check_nonempty(const Geometry& g) {
  if (g.status == BodyStatus::empty) throw Error(ErrorKind::EmptyBody, "operation on an empty body");
}

}  // namespace

// ====================================================================== spec

int ConvexBodySpec::dim() const {
  return std::visit(
      [](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, kinds::HPolytope>) {
          if (k.halfspaces.empty()) throw Error(ErrorKind::InvalidSpec, "h_polytope without halfspaces");
          return static_cast<int>(k.halfspaces.front().normal.size());
        } else if constexpr (std::is_same_v<T, kinds::VPolytope>) {
          if (k.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "v_polytope without vertices");
          return static_cast<int>(k.vertices.front().size());
        } else if constexpr (std::is_same_v<T, kinds::LpBall> || std::is_same_v<T, kinds::Cube> ||
                             std::is_same_v<T, kinds::Simplex> || std::is_same_v<T, kinds::CrossPolytope>) {
          return k.n;
        } else if constexpr (std::is_same_v<T, kinds::Intersection>) {
          const int a = spec_dim(*k.a);
          const int b = spec_dim(*k.b);
          if (a != b) throw Error(ErrorKind::DimMismatch, "intersection operands differ in dimension");
          return a;
        } else {
          return spec_dim(*k.inner);
        }
      },
      kind);
}

namespace shapes {

namespace {
SpecPtr wrap(ConvexBodySpec::Kind k) { return std::make_shared<const ConvexBodySpec>(ConvexBodySpec{std::move(k)}); }
}  // namespace

SpecPtr h_polytope(std::vector<Halfspace> halfspaces) { return wrap(kinds::HPolytope{std::move(halfspaces)}); }
SpecPtr v_polytope(std::vector<Vec> vertices) { return wrap(kinds::VPolytope{std::move(vertices)}); }
SpecPtr lp_ball(double p, int n) { return wrap(kinds::LpBall{p, n}); }
SpecPtr cube(int n) { return wrap(kinds::Cube{n}); }
SpecPtr simplex(int n, bool centered) { return wrap(kinds::Simplex{n, centered}); }
SpecPtr cross_polytope(int n) { return wrap(kinds::CrossPolytope{n}); }
SpecPtr affine_image(SpecPtr inner, Mat matrix, Vec shift) {
  return wrap(kinds::AffineImage{std::move(inner), std::move(matrix), std::move(shift)});
}
SpecPtr intersection(SpecPtr a, SpecPtr b) { return wrap(kinds::Intersection{std::move(a), std::move(b)}); }
SpecPtr reflection(SpecPtr inner) { return wrap(kinds::Reflection{std::move(inner)}); }
SpecPtr scaled(SpecPtr inner, double lambda) { return wrap(kinds::Scaled{std::move(inner), lambda}); }
SpecPtr translated(SpecPtr inner, Vec v) { return wrap(kinds::Translated{std::move(inner), std::move(v)}); }

SpecPtr triangle() {
  return v_polytope({Vec((Vec(2) << 1.0, 0.0).finished()), Vec((Vec(2) << 0.0, 1.0).finished()),
                     Vec((Vec(2) << -1.0, -1.0).finished())});
}

}  // namespace shapes

// ====================================================================== body

const detail::Geometry& Body::geom() const { return *geom_; }
std::uint64_t Body::id() const { return spec_hash(*spec_); }
int Body::dim() const { return geom_->dim; }
BodyStatus Body::status() const { return geom_->status; }

double Body::bounding_radius() const {
  check_nonempty(*geom_);
  return geom_->radius;
}

const Vec& Body::interior_point() const {
  check_nonempty(*geom_);
  return geom_->interior;
}

const Vec& Body::box_lo() const {
  check_nonempty(*geom_);
  return geom_->lo;
}

const Vec& Body::box_hi() const {
  check_nonempty(*geom_);
  return geom_->hi;
}

bool Body::membership(VecRef x) const {
  require_dim(x.size(), dim(), "membership");
  if (geom_->status == BodyStatus::empty) return false;
  return member(*geom_, x);
}

double Body::interior_margin(VecRef x) const {
  require_dim(x.size(), dim(), "interior_margin");
  if (geom_->status == BodyStatus::empty) return -kInf;
  return margin(*geom_, x);
}

double Body::gauge(VecRef x) const {
  require_dim(x.size(), dim(), "gauge");
  if (!geom_->origin_interior) throw Error(ErrorKind::OriginNotInterior, "gauge needs 0 in the interior");
  const Geometry& g = *geom_;
  double r = 0.0;
  if (g.poly) {
    const Vec ax = g.poly->a * x;
    for (Eigen::Index i = 0; i < ax.size(); ++i) r = std::max(r, ax[i] / g.poly->b[i]);
  }
  for (const auto& part : g.balls) r = std::max(r, part_gauge(part, x));
  return r;
}

double Body::support(VecRef u) const {
  require_dim(u.size(), dim(), "support");
  check_nonempty(*geom_);
  return exact_support(*geom_, u);
}

Vec Body::support_point(VecRef u) const {
  require_dim(u.size(), dim(), "support_point");
  check_nonempty(*geom_);
  const Geometry& g = *geom_;
  if (g.vertices) {
    Eigen::Index k = 0;
    (*g.vertices * u).maxCoeff(&k);
    return g.vertices->row(k).transpose();
  }
  if (g.balls.size() == 1 && !g.poly) {
    const LpPart& part = g.balls.front();
    return part.from_unit * lp_argmax(part.from_unit.transpose() * u, part.p) + part.shift;
  }
  if (g.hrep) {
    Vec x;
    if (!std::isfinite(hrep_support(*g.hrep, u, &x))) throw Error(ErrorKind::Unbounded, "unbounded support");
    return x;
  }
  throw Error(ErrorKind::UnsupportedBodyKind, "no support point oracle for this body");
}

std::pair<double, double> Body::chord(VecRef x, VecRef d) const {
  require_dim(x.size(), dim(), "chord");
  require_dim(d.size(), dim(), "chord");
  const Geometry& g = *geom_;
  double lo = -kInf, hi = kInf;
  if (g.poly) {
    const Vec ad = g.poly->a * d;
    const Vec slack = g.poly->b - g.poly->a * x;
    for (Eigen::Index i = 0; i < ad.size(); ++i) {
      const double s = std::max(0.0, slack[i]);
      if (ad[i] > 1e-15) hi = std::min(hi, s / ad[i]);
      else if (ad[i] < -1e-15) lo = std::max(lo, s / ad[i]);
    }
  }
  for (const auto& part : g.balls) {
    const Vec z = part.to_unit * (x - part.shift);
    const auto [a, b] = lp_chord(z, part.to_unit * d, part.p);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  return {std::min(lo, 0.0), std::max(hi, 0.0)};
}

bool Body::origin_symmetric() const { return geom_->origin_symmetric; }

bool Body::polyhedral() const { return geom_->hrep.has_value(); }

const Mat& Body::h_normals() const {
  if (!geom_->hrep) throw Error(ErrorKind::UnsupportedBodyKind, "body is not polyhedral");
  return geom_->hrep->a;
}

const Vec& Body::h_offsets() const {
  if (!geom_->hrep) throw Error(ErrorKind::UnsupportedBodyKind, "body is not polyhedral");
  return geom_->hrep->b;
}

const std::optional<Points>& Body::vertices() const { return geom_->vertices; }
const std::optional<Polygon2D>& Body::polygon() const { return geom_->polygon; }
std::optional<double> Body::exact_volume() const { return geom_->volume; }
std::optional<Vec> Body::exact_barycenter() const { return geom_->barycenter; }

double Body::inradius_estimate() const {
  check_nonempty(*geom_);
  return geom_->inradius;
}

bool Body::has_direct_sampler() const { return geom_->status == BodyStatus::full && geom_->gen.has_value(); }

void Body::sample_direct(Rng& rng, Eigen::Ref<Vec> out) const {
  if (!has_direct_sampler()) throw Error(ErrorKind::UnsupportedBodyKind, "no direct sampler for this body");
  const Generator& gen = *geom_->gen;
  if (gen.family == Family::polygon) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(gen.cumulative.begin(), gen.cumulative.end(), u);
    const auto& tri = gen.triangles[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - gen.cumulative.begin(), static_cast<std::ptrdiff_t>(gen.triangles.size()) - 1))];
    const double s = std::sqrt(rng.uniform());
    const double t = rng.uniform();
    out = (1.0 - s) * tri[0] + s * (1.0 - t) * tri[1] + s * t * tri[2];
    return;
  }
  const int n = gen.n;
  Vec z(n);
  switch (gen.family) {
    case Family::cube:
      for (int i = 0; i < n; ++i) z[i] = rng.uniform(-1.0, 1.0);
      break;
    case Family::simplex:
    case Family::cross: {
      double total = rng.exponential();
      for (int i = 0; i < n; ++i) {
        z[i] = rng.exponential();
        total += z[i];
      }
      z /= total;
      if (gen.family == Family::cross) {
        for (int i = 0; i < n; ++i) {
          if (rng.uniform() < 0.5) z[i] = -z[i];
        }
      }
      break;
    }
    case Family::lp_ball: {
      double total = rng.exponential();
      for (int i = 0; i < n; ++i) {
        const double mag = rng.gamma(1.0 / gen.p);
        total += mag;
        z[i] = std::pow(mag, 1.0 / gen.p) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      }
      z /= std::pow(total, 1.0 / gen.p);
      break;
    }
    case Family::polygon:
      break;
  }
  out = gen.map * z + gen.shift;
}

Body make_body_allow_degenerate(const SpecPtr& spec) {
  if (!spec) throw Error(ErrorKind::InvalidSpec, "null body spec");
  spec->dim();
  auto geom = std::make_shared<Geometry>(compile(*spec));
  finalize(*geom, std::nullopt);
  Body body;
  body.spec_ = spec;
  body.geom_ = std::move(geom);
  return body;
}

Body make_body(const SpecPtr& spec) {
  Body body = make_body_allow_degenerate(spec);
  if (body.status() != BodyStatus::full) throw Error(ErrorKind::EmptyBody, "spec has empty interior");
  return body;
}

Body symmetric_intersection(const Body& body, VecRef x) {
  require_dim(x.size(), body.dim(), "symmetric_intersection");
  const int n = body.dim();
  if (x.cwiseAbs().maxCoeff() == 0.0 && body.origin_symmetric()) return body;
  const Vec shift = x;
  auto geom = std::make_shared<Geometry>(
      intersected(body.geom(), transformed(body.geom(), -Mat::Identity(n, n), shift)));
  finalize(*geom, Vec(0.5 * shift));
  Body out;
  out.spec_ = shapes::intersection(body.spec_ptr(), shapes::translated(shapes::reflection(body.spec_ptr()), shift));
  out.geom_ = std::move(geom);
  return out;
}

Body scaled_body(const Body& body, double lambda) { return make_body(shapes::scaled(body.spec_ptr(), lambda)); }

// ================================================================ minkowski

namespace {

// One summand of A + B in an LP: either convex-combination weights over its
// vertices or a free point constrained by its halfspaces.
struct Summand {
  const Body* body = nullptr;
  bool use_vertices = false;
  bool usable = false;
};

Summand summand_of(const Body& b) {
  Summand s;
  s.body = &b;
  if (b.vertices() && b.vertices()->rows() <= 4096) {
    s.use_vertices = true;
    s.usable = true;
  } else if (b.polyhedral()) {
    s.usable = true;
  }
  return s;
}

// x ∈ A + B. When B is polyhedral, q = x − p is eliminated and only p ∈ A is
// a variable; otherwise both sides use vertex weights.
bool lp_minkowski(const Body& a, const Body& b, const Vec& x) {
  const int n = static_cast<int>(x.size());
  const Summand sa = summand_of(a);
  LinearProgram lp;
  if (b.polyhedral()) {
    const Mat& hb = b.h_normals();
    const Vec& ob = b.h_offsets();
    if (sa.use_vertices) {
      const Mat vt = a.vertices()->transpose();  // n × k
      const auto k = vt.cols();
      lp.objective = Vec::Zero(k);
      lp.a_ub = -hb * vt;
      lp.b_ub = ob - hb * x;
      lp.a_eq = Mat::Ones(1, k);
      lp.b_eq = Vec::Ones(1);
    } else {
      const Mat& ha = a.h_normals();
      lp.objective = Vec::Zero(n);
      lp.a_ub.resize(ha.rows() + hb.rows(), n);
      lp.a_ub << ha, -hb;
      lp.b_ub.resize(ha.rows() + hb.rows());
      lp.b_ub << a.h_offsets(), ob - hb * x;
      lp.a_eq.resize(0, n);
      lp.b_eq.resize(0);
      lp.free_vars.assign(static_cast<std::size_t>(n), true);
    }
    return lp_feasible(lp);
  }
  const Mat va = a.vertices()->transpose();
  const Mat vb = b.vertices()->transpose();
  const auto ka = va.cols();
  const auto kb = vb.cols();
  lp.objective = Vec::Zero(ka + kb);
  lp.a_ub.resize(0, ka + kb);
  lp.b_ub.resize(0);
  lp.a_eq = Mat::Zero(n + 2, ka + kb);
  lp.a_eq.topLeftCorner(n, ka) = va;
  lp.a_eq.topRightCorner(n, kb) = vb;
  lp.a_eq.block(n, 0, 1, ka).setOnes();
  lp.a_eq.block(n + 1, ka, 1, kb).setOnes();
  lp.b_eq = Vec::Zero(n + 2);
  lp.b_eq.head(n) = x;
  lp.b_eq[n] = 1.0;
  lp.b_eq[n + 1] = 1.0;
  return lp_feasible(lp);
}

// Gilbert's minimum-norm iteration on A + B − x using support points.
bool gilbert_minkowski(const Body& a, const Body& b, const Vec& x) {
  const double scale = 1.0 + a.bounding_radius() + b.bounding_radius() + x.norm();
  const double tol = 1e-8 * scale;
  auto support_pt = [&](const Vec& d) -> Vec { return a.support_point(d) + b.support_point(d) - x; };
  Vec w = a.interior_point() + b.interior_point() - x;
  for (int it = 0; it < 20000; ++it) {
    const double nw = w.norm();
    if (nw <= tol) return true;
    const Vec d = -w / nw;
    const Vec s = support_pt(d);
    const double lower = -s.dot(d);  // distance from 0 to the sum is at least this
    if (lower > tol) return false;
    const Vec step = s - w;
    const double denom = step.squaredNorm();
    if (denom == 0.0) return nw <= tol;
    const double t = std::clamp(-w.dot(step) / denom, 0.0, 1.0);
    if (t == 0.0) return lower <= tol;
    w += t * step;
  }
  return true;
}

}  // namespace

bool minkowski_membership(const Body& a, const Body& b, VecRef x) {
  require_dim(x.size(), a.dim(), "minkowski_membership");
  require_dim(b.dim(), a.dim(), "minkowski_membership");
  if (a.is_empty() || b.is_empty()) return false;
  const Summand sa = summand_of(a);
  const Summand sb = summand_of(b);
  if (sa.usable && sb.usable) {
    if (b.polyhedral() || !a.polyhedral()) return lp_minkowski(a, b, x);
    return lp_minkowski(b, a, x);
  }
  auto has_points = [](const Body& body) {
    try {
      body.support_point(Vec::Ones(body.dim()));
      return true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::UnsupportedBodyKind) return false;
      throw;
    }
  };
  if (!has_points(a) || !has_points(b)) {
    throw Error(ErrorKind::UnsupportedBodyKind, "Minkowski membership needs polytopes or lp-ball images");
  }
  return gilbert_minkowski(a, b, x);
}

}  // namespace symcover
