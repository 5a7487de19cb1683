#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bombieri/geometry.hpp"

namespace bombieri {

using Complex = std::complex<double>;

// Polynomial of degree <= k stored in the coordinates of the orthonormal
// basis e_{k,j}(z) = binom(k,j)^{1/2} z^j; the norm of the space is the
// plain l2 norm of the coordinates.
struct BombieriPolynomial {
  int k = 0;
  Eigen::VectorXcd coords;  // size k+1
};

BombieriPolynomial make_polynomial(int k, Eigen::VectorXcd coords);

double bombieri_norm(const BombieriPolynomial& p);

// Monomial coefficients (lowest degree first, length k+1) to orthonormal
// coordinates and back; weights go through log-binomials so large k stays
// usable.
Eigen::VectorXcd monomial_to_onb(int k, const std::vector<Complex>& monomial);
std::vector<Complex> onb_to_monomial(const BombieriPolynomial& p);

// p(z) (1 + |z|^2)^{-k/2}, evaluated term by term on a log scale; safe for
// k up to several thousand, and |result| <= bombieri_norm(p).
Complex weighted_eval(const BombieriPolynomial& p, PlanePoint z);

// Reproducing kernel (1 + z conj(w))^k.
Complex kernel(PlanePoint z, PlanePoint w, int k);

// Coordinate matrix of the isometry T_lambda in the e_{k,j} basis: column j
// holds the coordinates of T_lambda e_{k,j}. A Hermitian involution, checked
// at construction (Frobenius residuals <= 1e-9).
struct IsometryMatrix {
  int k = 0;
  PlanePoint lambda;
  Eigen::MatrixXcd u;
};

IsometryMatrix isometry_matrix(PlanePoint lambda, int k);

// First m columns of the same matrix, which is all the array analysis ever
// needs; checked for column orthonormality at the same residual.
Eigen::MatrixXcd isometry_columns(PlanePoint lambda, int k, int m);

// <p, T_lambda e_{k,j}> for j = 0..m-1: the coefficients a node (lambda, m)
// reads off p.
Eigen::VectorXcd sampling_coefficients(const BombieriPolynomial& p,
                                       PlanePoint lambda, int m);

// Norm of p restricted to the chordal disk D(lambda, R), via the rotated
// coordinates and incomplete beta factors.
double local_norm(const BombieriPolynomial& p, PlanePoint lambda, double R);

}  // namespace bombieri
