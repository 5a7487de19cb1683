#pragma once

#include <complex>
#include <vector>

namespace bombieri {

using PlanePoint = std::complex<double>;

// Distance on the Riemann sphere pulled back to the plane, normalized so
// that antipodal points are at distance 1; the equator corresponds to
// |z| = 1.
double chordal_distance(PlanePoint z, PlanePoint w);

// phi_lambda(z) = (lambda - z) / (1 + conj(lambda) z). Involutive, swaps
// 0 and lambda, and preserves the chordal distance. Throws when z is the
// pole of the map.
PlanePoint mobius(PlanePoint lambda, PlanePoint z);

// Normalized area of a chordal disk of radius r in [0, 1]; equals r^2.
double disk_measure(double r);

struct ChordalDisk {
  PlanePoint center;
  double radius = 0.0;  // chordal, in [0, 1]
};

// Chordal disk with the same point set as the Euclidean disk of radius r
// around z (radius r / sqrt(1 + r^2)).
ChordalDisk disk_from_euclidean(PlanePoint z, double r);

struct DisjointnessResult {
  bool disjoint = false;
  // Angular separation of the cap centers minus the sum of the angular cap
  // radii; nonnegative iff the closed caps do not cross.
  double margin = 0.0;
};

DisjointnessResult caps_disjoint(const ChordalDisk& a, const ChordalDisk& b);

// Deterministic quasi-uniform point set: spherical Fibonacci lattice pushed
// through stereographic projection. The lattice is offset by half a step so
// the projection pole is never hit.
std::vector<PlanePoint> fibonacci_points(int n);

struct SphereMesh {
  std::vector<PlanePoint> points;
  double weight = 0.0;  // common weight 1/n
};

SphereMesh sphere_mesh(int n);

// Unit vector in R^3 of the sphere point over z. The projection pole is the
// north pole (0, 0, 1).
struct UnitVec {
  double x = 0.0, y = 0.0, z = 0.0;
};

UnitVec lift(PlanePoint p);

// Inner product threshold for cap membership: chordal_distance(z, c) <= r
// iff dot(lift(z), lift(c)) >= 1 - 2 r^2.
inline double cap_dot_threshold(double chordal_radius) {
  return 1.0 - 2.0 * chordal_radius * chordal_radius;
}

inline double dot(const UnitVec& a, const UnitVec& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

}  // namespace bombieri
