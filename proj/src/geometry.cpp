#include "bombieri/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bombieri {

double chordal_distance(PlanePoint z, PlanePoint w) {
  double d = std::abs(z - w) /
             std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
  return d < 1.0 ? d : 1.0;
}

PlanePoint mobius(PlanePoint lambda, PlanePoint z) {
  PlanePoint den = 1.0 + std::conj(lambda) * z;
  if (std::abs(den) == 0.0)
    throw std::domain_error("mobius: z is the pole of phi_lambda");
  return (lambda - z) / den;
}

double disk_measure(double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::domain_error("disk_measure: radius outside [0, 1]");
  return r * r;
}

ChordalDisk disk_from_euclidean(PlanePoint z, double r) {
  if (!(r >= 0.0))
    throw std::domain_error("disk_from_euclidean: negative radius");
  return {z, r / std::sqrt(1.0 + r * r)};
}

namespace {

double angular_radius(double chordal) {
  if (!(chordal >= 0.0 && chordal <= 1.0))
    throw std::domain_error("caps_disjoint: radius outside [0, 1]");
  return 2.0 * std::asin(chordal);
}

}  // namespace

DisjointnessResult caps_disjoint(const ChordalDisk& a, const ChordalDisk& b) {
  double separation = 2.0 * std::asin(chordal_distance(a.center, b.center));
  double margin = separation - angular_radius(a.radius) - angular_radius(b.radius);
  // A radius-1 disk is the whole sphere, so it meets every other disk even
  // when the margin formula lands on zero.
  bool disjoint = margin >= 0.0 && a.radius < 1.0 && b.radius < 1.0;
  return {disjoint, margin};
}

std::vector<PlanePoint> fibonacci_points(int n) {
  if (n < 1) throw std::invalid_argument("fibonacci_points: n must be >= 1");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<PlanePoint> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    double h = 1.0 - (2.0 * i + 1.0) / n;  // polar height, never +-1
    double rho = std::sqrt(1.0 - h * h);
    double phi = golden_angle * i;
    pts.emplace_back(rho * std::cos(phi) / (1.0 - h),
                     rho * std::sin(phi) / (1.0 - h));
  }
  return pts;
}

SphereMesh sphere_mesh(int n) {
  return {fibonacci_points(n), 1.0 / n};
}

UnitVec lift(PlanePoint p) {
  double t = std::norm(p);
  double s = 1.0 / (1.0 + t);
  return {2.0 * p.real() * s, 2.0 * p.imag() * s, (t - 1.0) * s};
}

}  // namespace bombieri
