#include "bombieri/array_analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bombieri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dense_limit(int k) {
  if (k + 1 > kMaxDenseDim)
    throw std::length_error("array analysis: k+1 exceeds the dense solver cap of " +
                            std::to_string(kMaxDenseDim));
}

void check_analysis_ready(const MultiplicityArray& x) {
  validate_array(x, false);
  if (x.k < 1)
    throw std::domain_error("array analysis: k must be >= 1");
  check_dense_limit(x.k);
  if (x.nodes.empty())
    throw std::invalid_argument("array analysis: array has no nodes");
  for (const auto& n : x.nodes)
    if (n.multiplicity > x.k + 1)
      throw std::domain_error("array analysis: node multiplicity exceeds k+1");
}

struct Cap {
  UnitVec center;
  double radius = 0.0;  // chordal
  double dot_thr = 0.0;
};

// Disks D(lambda, (sqrt(m)+c)/sqrt(k)) lifted to caps. For c < 0, nodes
// with sqrt(m) <= |c| drop out; radii clamp to [0, 1].
std::vector<Cap> dilated_caps(const MultiplicityArray& x, double c) {
  std::vector<Cap> caps;
  caps.reserve(x.nodes.size());
  double sqrt_k = std::sqrt(double(x.k));
  for (const auto& n : x.nodes) {
    double sm = std::sqrt(double(n.multiplicity));
    if (c < 0.0 && sm <= -c) continue;
    double r = (sm + c) / sqrt_k;
    r = std::min(std::max(r, 0.0), 1.0);
    caps.push_back({lift(n.point), r, cap_dot_threshold(r)});
  }
  return caps;
}

std::vector<Cap> critical_caps(const MultiplicityArray& x) {
  std::vector<Cap> caps;
  caps.reserve(x.nodes.size());
  for (const auto& n : x.nodes) {
    double r = std::sqrt(std::min(1.0, double(n.multiplicity) / x.k));
    caps.push_back({lift(n.point), r, cap_dot_threshold(r)});
  }
  return caps;
}

// Two points where the boundary circles of two caps meet, when they do.
void boundary_intersections(const Cap& a, const Cap& b,
                            std::vector<UnitVec>& out) {
  double c = dot(a.center, b.center);
  double denom = 1.0 - c * c;
  if (denom < 1e-14) return;
  double ca = a.dot_thr, cb = b.dot_thr;
  double alpha = (ca - c * cb) / denom;
  double beta = (cb - c * ca) / denom;
  double t2 = 1.0 - (alpha * alpha + beta * beta + 2.0 * alpha * beta * c);
  if (t2 < 0.0) return;
  double t = std::sqrt(t2 / denom);
  UnitVec n{a.center.y * b.center.z - a.center.z * b.center.y,
            a.center.z * b.center.x - a.center.x * b.center.z,
            a.center.x * b.center.y - a.center.y * b.center.x};
  for (double sign : {1.0, -1.0}) {
    UnitVec u{alpha * a.center.x + beta * b.center.x + sign * t * n.x,
              alpha * a.center.y + beta * b.center.y + sign * t * n.y,
              alpha * a.center.z + beta * b.center.z + sign * t * n.z};
    double len = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
    if (len > 0.0) out.push_back({u.x / len, u.y / len, u.z / len});
  }
}

int count_at(const std::vector<Cap>& caps, const UnitVec& u) {
  int c = 0;
  for (const auto& cap : caps)
    if (dot(cap.center, u) >= cap.dot_thr - 1e-12) ++c;
  return c;
}

}  // namespace

int MultiplicityArray::total_multiplicity() const {
  int m = 0;
  for (const auto& n : nodes) m += n.multiplicity;
  return m;
}

void validate_array(const MultiplicityArray& x, bool require_distinct) {
  if (x.k < 0) throw std::domain_error("array: k must be >= 0");
  for (const auto& n : x.nodes) {
    if (!std::isfinite(n.point.real()) || !std::isfinite(n.point.imag()))
      throw std::invalid_argument("array: node coordinates must be finite");
    if (n.multiplicity < 1)
      throw std::invalid_argument("array: multiplicities must be >= 1");
  }
  if (require_distinct) {
    for (size_t i = 0; i < x.nodes.size(); ++i)
      for (size_t j = i + 1; j < x.nodes.size(); ++j)
        if (x.nodes[i].point == x.nodes[j].point)
          throw std::invalid_argument("array: nodes must be distinct");
  }
}

Eigen::MatrixXcd analysis_operator(const MultiplicityArray& x) {
  check_analysis_ready(x);
  int total = x.total_multiplicity();
  Eigen::MatrixXcd a(total, x.k + 1);
  int row = 0;
  for (const auto& n : x.nodes) {
    Eigen::MatrixXcd b = isometry_columns(n.point, x.k, n.multiplicity);
    a.middleRows(row, n.multiplicity) = b.adjoint();
    row += n.multiplicity;
  }
  return a;
}

FrameReport frame_bounds(const MultiplicityArray& x) {
  check_analysis_ready(x);
  const int dim = x.k + 1;
  // Frame operator assembled block by block in node order, so the result
  // is independent of any scheduling above this call.
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& n : x.nodes) {
    Eigen::MatrixXcd b = isometry_columns(n.point, x.k, n.multiplicity);
    s.noalias() += b * b.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("frame_bounds: eigensolver failed");
  Eigen::VectorXd eig = es.eigenvalues().cwiseMax(0.0);  // ascending

  FrameReport rep;
  rep.k = x.k;
  rep.total_multiplicity = x.total_multiplicity();
  rep.upper = eig(dim - 1);
  rep.singular_values = eig.reverse().cwiseSqrt();
  double rank_tol = dim * std::numeric_limits<double>::epsilon() * rep.upper;
  rep.rank = 0;
  for (int i = 0; i < dim; ++i)
    if (eig(i) > rank_tol) ++rep.rank;
  rep.lower = rep.rank == dim ? eig(0) : 0.0;
  rep.conditioning = rep.lower > 0.0 ? rep.upper / rep.lower : kInf;
  return rep;
}

double interpolation_constant(const MultiplicityArray& x) {
  Eigen::MatrixXcd a = analysis_operator(x);
  if (a.rows() > a.cols())
    throw std::invalid_argument(
        "interpolation_constant: total multiplicity exceeds k+1 (overdetermined)");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  double smin = sv(sv.size() - 1), smax = sv(0);
  if (!(smin > 1e-10 * smax) || smax == 0.0)
    throw std::runtime_error("interpolation_constant: analysis operator is rank deficient");
  return 1.0 / smin;
}

BombieriPolynomial min_norm_interpolant(const MultiplicityArray& x,
                                        const Eigen::VectorXcd& values) {
  Eigen::MatrixXcd a = analysis_operator(x);
  if (a.rows() > a.cols())
    throw std::invalid_argument(
        "min_norm_interpolant: total multiplicity exceeds k+1 (overdetermined)");
  if (values.size() != a.rows())
    throw std::invalid_argument("min_norm_interpolant: wrong number of values");
  const int total = int(a.rows());

  // Minimal-norm solution of a * coords = values via QR of the adjoint:
  // with a^H = Q R, coords = Q (R^H)^{-1} values.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a.adjoint());
  Eigen::MatrixXcd r =
      qr.matrixQR().topRows(total).triangularView<Eigen::Upper>();
  Eigen::VectorXcd y =
      r.adjoint().triangularView<Eigen::Lower>().solve(values);
  Eigen::MatrixXcd thin_q =
      qr.householderQ() * Eigen::MatrixXcd::Identity(x.k + 1, total);
  Eigen::VectorXcd coords = thin_q * y;

  double resid = (a * coords - values).norm();
  if (!(resid <= 1e-10 * values.norm() || values.norm() == 0.0))
    throw std::runtime_error("min_norm_interpolant: residual " +
                             std::to_string(resid) + " exceeds 1e-10 |values|");
  return make_polynomial(x.k, std::move(coords));
}

int overlap_count(const MultiplicityArray& x, int mesh_n) {
  validate_array(x, false);
  if (x.k < 1) throw std::domain_error("overlap_count: k must be >= 1");
  if (mesh_n < 1) throw std::invalid_argument("overlap_count: mesh_n must be >= 1");
  if (x.nodes.empty()) return 0;

  std::vector<Cap> caps = critical_caps(x);
  std::vector<UnitVec> probes;
  probes.reserve(caps.size() * caps.size() + mesh_n);
  for (const auto& c : caps) probes.push_back(c.center);
  for (size_t i = 0; i < caps.size(); ++i)
    for (size_t j = i + 1; j < caps.size(); ++j)
      boundary_intersections(caps[i], caps[j], probes);
  for (const auto& p : fibonacci_points(mesh_n)) probes.push_back(lift(p));

  int best = 0;
  for (const auto& u : probes) best = std::max(best, count_at(caps, u));
  return best;
}

SeparationReport separation_check(const MultiplicityArray& x, double c) {
  validate_array(x, false);
  if (x.k < 1) throw std::domain_error("separation_check: k must be >= 1");
  std::vector<Cap> caps = dilated_caps(x, c);
  if (caps.size() < 2) return {true, kInf};
  bool all = true;
  double min_margin = kInf;
  for (size_t i = 0; i < caps.size(); ++i) {
    for (size_t j = i + 1; j < caps.size(); ++j) {
      double sep = 2.0 * std::asin(std::sqrt(
                       std::max(0.0, 0.5 * (1.0 - dot(caps[i].center, caps[j].center)))));
      double margin = sep - 2.0 * std::asin(caps[i].radius) -
                      2.0 * std::asin(caps[j].radius);
      bool disjoint = margin >= 0.0 && caps[i].radius < 1.0 && caps[j].radius < 1.0;
      all = all && disjoint;
      min_margin = std::min(min_margin, margin);
    }
  }
  return {all, min_margin};
}

double uncovered_mass(const MultiplicityArray& x, double c, int mesh_n) {
  validate_array(x, false);
  if (x.k < 1) throw std::domain_error("uncovered_mass: k must be >= 1");
  if (mesh_n < 1) throw std::invalid_argument("uncovered_mass: mesh_n must be >= 1");
  std::vector<Cap> caps = dilated_caps(x, c);
  if (caps.empty()) return 1.0;
  const std::vector<PlanePoint> mesh = fibonacci_points(mesh_n);
  long uncovered = 0;
  for (const auto& p : mesh) {
    UnitVec u = lift(p);
    bool covered = false;
    for (const auto& cap : caps) {
      if (dot(cap.center, u) >= cap.dot_thr - 1e-12) {
        covered = true;
        break;
      }
    }
    if (!covered) ++uncovered;
  }
  return double(uncovered) / mesh_n;
}

double zero_array_mass_check(const MultiplicityArray& x, int mesh_n) {
  return x.k * uncovered_mass(x, 0.0, mesh_n);
}

GeometryReport geometry_report(const MultiplicityArray& x, double c,
                               int mesh_n) {
  GeometryReport rep;
  rep.k = x.k;
  rep.mesh_n = mesh_n;
  rep.c = c;
  rep.overlap = overlap_count(x, mesh_n);
  double cc = std::fabs(c);
  rep.margin_dilated = separation_check(x, cc).min_margin;
  rep.margin_contracted = separation_check(x, -cc).min_margin;
  rep.uncovered_dilated = uncovered_mass(x, cc, mesh_n);
  rep.uncovered_contracted = uncovered_mass(x, -cc, mesh_n);
  rep.k_uncovered_zero = zero_array_mass_check(x, mesh_n);
  rep.multiplicity_mass = double(x.total_multiplicity()) / x.k;
  return rep;
}

}  // namespace bombieri
