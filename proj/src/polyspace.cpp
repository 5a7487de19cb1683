#include "bombieri/polyspace.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "bombieri/special_functions.hpp"

namespace bombieri {

namespace {

constexpr double kResidualGate = 1e-9;

void check_degree(int k) {
  if (k < 0) throw std::domain_error("degree bound k must be >= 0");
}

// The isometries for real lambda = rho form a one-parameter family in
// beta = 2 atan(rho) after factoring off the parity involution: the family
// is exp(-i beta H) with a fixed tridiagonal Hermitian generator H. Going
// through the eigenbasis of H keeps every column orthonormal to rounding,
// where the explicit alternating coefficient sums lose all precision long
// before k reaches 100. H depends only on k, so its eigenbasis is cached.
struct SpinBasis {
  Eigen::MatrixXcd v;   // eigenvectors
  Eigen::VectorXd mu;   // eigenvalues, snapped to the half-integer ladder
};

const SpinBasis& spin_basis(int k) {
  static std::mutex lock;
  static std::map<int, SpinBasis> cache;
  std::lock_guard<std::mutex> guard(lock);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  for (int j = 0; j < k; ++j) {
    double c = 0.5 * std::sqrt(double(j + 1) * double(k - j));
    h(j + 1, j) = Complex(0.0, c);
    h(j, j + 1) = Complex(0.0, -c);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("isometry_columns: generator eigensolver failed");
  SpinBasis sb{es.eigenvectors(), es.eigenvalues()};
  for (int t = 0; t <= k; ++t) {
    double twice = 2.0 * sb.mu(t);
    if (std::fabs(twice - std::round(twice)) < 1e-3)
      sb.mu(t) = std::round(twice) / 2.0;
  }
  return cache.emplace(k, std::move(sb)).first->second;
}

}  // namespace

BombieriPolynomial make_polynomial(int k, Eigen::VectorXcd coords) {
  check_degree(k);
  if (coords.size() != k + 1)
    throw std::invalid_argument("polynomial needs exactly k+1 coordinates");
  if (!coords.allFinite())
    throw std::invalid_argument("polynomial coordinates must be finite");
  return {k, std::move(coords)};
}

double bombieri_norm(const BombieriPolynomial& p) { return p.coords.norm(); }

Eigen::VectorXcd monomial_to_onb(int k, const std::vector<Complex>& monomial) {
  check_degree(k);
  if (monomial.size() != size_t(k) + 1)
    throw std::invalid_argument("monomial vector needs exactly k+1 entries");
  Eigen::VectorXcd coords(k + 1);
  for (int j = 0; j <= k; ++j)
    coords(j) = monomial[j] * std::exp(-0.5 * log_binomial(k, j));
  return coords;
}

std::vector<Complex> onb_to_monomial(const BombieriPolynomial& p) {
  std::vector<Complex> a(p.k + 1);
  for (int j = 0; j <= p.k; ++j)
    a[j] = p.coords(j) * std::exp(0.5 * log_binomial(p.k, j));
  return a;
}

Complex weighted_eval(const BombieriPolynomial& p, PlanePoint z) {
  const int k = p.k;
  const double t = std::norm(z);
  if (t == 0.0) return p.coords(0);
  const double half_log_t = 0.5 * std::log(t);
  const double theta = std::arg(z);
  const double half_k_l1p = 0.5 * k * std::log1p(t);
  double lc = 0.0;  // ln C(k, j), advanced by recurrence
  Complex sum = 0.0;
  for (int j = 0; j <= k; ++j) {
    double w = std::exp(0.5 * lc + j * half_log_t - half_k_l1p);
    sum += p.coords(j) * std::polar(w, j * theta);
    if (j < k) lc += std::log(double(k - j) / double(j + 1));
  }
  return sum;
}

Complex kernel(PlanePoint z, PlanePoint w, int k) {
  check_degree(k);
  Complex base = 1.0 + z * std::conj(w);
  Complex r = 1.0;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) r *= base;
    base *= base;
  }
  return r;
}

Eigen::MatrixXcd isometry_columns(PlanePoint lambda, int k, int m) {
  check_degree(k);
  if (m < 1 || m > k + 1)
    throw std::domain_error("isometry_columns: need 1 <= m <= k+1");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("isometry_columns: lambda must be finite");

  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(k + 1, m);
  if (lambda == PlanePoint(0.0, 0.0)) {
    for (int j = 0; j < m; ++j) b(j, j) = (j % 2 == 0) ? 1.0 : -1.0;
    return b;
  }

  const double rho = std::abs(lambda);
  const double theta = std::arg(lambda);
  const double beta = 2.0 * std::atan(rho);
  const SpinBasis& sb = spin_basis(k);

  // U(lambda) = Phi exp(-i beta H) P Phi*, with P the parity signs and
  // Phi = diag(e^{-i theta t}). Requested columns: signed columns of V*,
  // rows spun by the eigenphases, mapped back through V, then the phases.
  Eigen::MatrixXcd w = sb.v.adjoint().leftCols(m);
  for (int j = 1; j < m; j += 2) w.col(j) = -w.col(j);
  for (int t = 0; t <= k; ++t)
    w.row(t) *= std::polar(1.0, -beta * sb.mu(t));
  b.noalias() = sb.v * w;
  for (int t = 1; t <= k; ++t)
    b.row(t) *= std::polar(1.0, -theta * t);
  for (int j = 1; j < m; ++j)
    b.col(j) *= std::polar(1.0, theta * j);

  double resid = (b.adjoint() * b - Eigen::MatrixXcd::Identity(m, m)).norm();
  if (!(resid <= kResidualGate))
    throw std::runtime_error("isometry_columns: orthonormality residual " +
                             std::to_string(resid) + " exceeds 1e-9");
  return b;
}

IsometryMatrix isometry_matrix(PlanePoint lambda, int k) {
  Eigen::MatrixXcd u = isometry_columns(lambda, k, k + 1);
  double invol =
      (u * u - Eigen::MatrixXcd::Identity(k + 1, k + 1)).norm();
  if (!(invol <= kResidualGate))
    throw std::runtime_error("isometry_matrix: involution residual " +
                             std::to_string(invol) + " exceeds 1e-9");
  return {k, lambda, std::move(u)};
}

Eigen::VectorXcd sampling_coefficients(const BombieriPolynomial& p,
                                       PlanePoint lambda, int m) {
  if (m < 1 || m > p.k + 1)
    throw std::domain_error("sampling_coefficients: need 1 <= m <= k+1");
  Eigen::MatrixXcd b = isometry_columns(lambda, p.k, m);
  return b.adjoint() * p.coords;
}

double local_norm(const BombieriPolynomial& p, PlanePoint lambda, double R) {
  if (!(R >= 0.0 && R <= 1.0))
    throw std::domain_error("local_norm: radius outside [0, 1]");
  const int k = p.k;
  Eigen::VectorXcd rotated;
  if (lambda == PlanePoint(0.0, 0.0)) {
    rotated = p.coords;  // signs do not matter below
  } else {
    rotated = isometry_columns(lambda, k, k + 1).adjoint() * p.coords;
  }
  const double x = R * R;
  double sum = 0.0, comp = 0.0;
  for (int j = 0; j <= k; ++j) {
    double term = std::norm(rotated(j)) *
                  incomplete_beta_reg(j + 1.0, k - j + 1.0, x);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::sqrt(sum);
}

}  // namespace bombieri
