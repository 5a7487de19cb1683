#pragma once

namespace bombieri {

// log of the binomial coefficient C(k, j), 0 <= j <= k.
double log_binomial(int k, int j);

// Regularized incomplete beta function I_x(a, b), continued fraction with
// the symmetry reflection; absolute accuracy around 1e-13.
double incomplete_beta_reg(double a, double b, double x);

// log I_x(a, b), finite even where I_x underflows a double.
double log_incomplete_beta_reg(double a, double b, double x);

// F_{k,m}(x) = (1+x)^{-k} sum_{j<m} C(k,j) x^j: the normalized head of the
// binomial expansion of (1+x)^k. Defined for x >= 0, 1 <= m <= k+1.
double incomplete_binomial_F(int k, int m, double x);

}  // namespace bombieri
