#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bombieri/geometry.hpp"
#include "bombieri/polyspace.hpp"

namespace bombieri {

struct ArrayNode {
  PlanePoint point;
  int multiplicity = 1;
};

// A node array tied to one degree bound k. The geometric predicates accept
// empty arrays and repeated points (both show up in degenerate experiments);
// the frame and interpolation operations require at least one node.
struct MultiplicityArray {
  int k = 0;
  std::vector<ArrayNode> nodes;

  int total_multiplicity() const;
};

// Checks k >= 0, finite points, multiplicities >= 1; with require_distinct,
// also that no point repeats.
void validate_array(const MultiplicityArray& x, bool require_distinct);

// Largest k+1 the dense eigen/SVD path accepts.
constexpr int kMaxDenseDim = 2049;

// Stacked sampling functionals: one row per (node, j<m) pair, row (lambda, j)
// being the conjugate of column j of the isometry matrix at lambda.
Eigen::MatrixXcd analysis_operator(const MultiplicityArray& x);

struct FrameReport {
  int k = 0;
  int total_multiplicity = 0;
  double lower = 0.0;  // A
  double upper = 0.0;  // B
  Eigen::VectorXd singular_values;  // k+1 values, descending, zeros included
  int rank = 0;
  double conditioning = 0.0;  // B / A, infinite when A = 0
};

FrameReport frame_bounds(const MultiplicityArray& x);

// 1 / sigma_min of the analysis operator. Requires total multiplicity
// <= k+1 and full row rank.
double interpolation_constant(const MultiplicityArray& x);

// Minimal-norm p matching the prescribed sampling coefficients (stacked in
// node order, j fastest). Residual checked against 1e-10 * |values|.
BombieriPolynomial min_norm_interpolant(const MultiplicityArray& x,
                                        const Eigen::VectorXcd& values);

// Max number of critical disks D(lambda, sqrt(m/k)) covering any single
// point, probed on node centers, pairwise boundary intersections, and a
// Fibonacci mesh; a certified lower bound on the true overlap.
int overlap_count(const MultiplicityArray& x, int mesh_n);

struct SeparationReport {
  bool disjoint = false;
  double min_margin = 0.0;  // +inf when fewer than two disks survive
};

// Pairwise disjointness of the disks D(lambda, (sqrt(m)+c)/sqrt(k)). For
// c < 0 nodes with sqrt(m) <= |c| are skipped; radii clamp to [0, 1].
SeparationReport separation_check(const MultiplicityArray& x, double c);

// Fraction of sphere_mesh(mesh_n) left uncovered by the same disks.
double uncovered_mass(const MultiplicityArray& x, double c, int mesh_n);

// k * uncovered_mass at c = 0: the quantity that stays bounded away from
// zero when total multiplicity does not exceed k.
double zero_array_mass_check(const MultiplicityArray& x, int mesh_n);

struct GeometryReport {
  int k = 0;
  int mesh_n = 0;
  double c = 0.0;
  int overlap = 0;
  double margin_dilated = 0.0;
  double margin_contracted = 0.0;
  double uncovered_dilated = 0.0;
  double uncovered_contracted = 0.0;
  double k_uncovered_zero = 0.0;
  double multiplicity_mass = 0.0;  // total multiplicity / k
};

GeometryReport geometry_report(const MultiplicityArray& x, double c,
                               int mesh_n);

}  // namespace bombieri
