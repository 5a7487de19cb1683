#include "bombieri/annex.hpp"

#include <cmath>
#include <vector>

#include "bombieri/special_functions.hpp"

namespace bombieri {

const char* to_string(AnnexInequality id) {
  switch (id) {
    case AnnexInequality::kLemma0: return "LEMMA0";
    case AnnexInequality::kTipBeta: return "TIP_BETA";
    case AnnexInequality::kEstALower: return "EST_A_LOWER";
    case AnnexInequality::kEstAUpper: return "EST_A_UPPER";
    case AnnexInequality::kIncBetaA: return "INC_BETA_A";
    case AnnexInequality::kIncBetaB: return "INC_BETA_B";
    case AnnexInequality::kBinomialFloor: return "BINOMIAL_FLOOR";
  }
  return "?";
}

AnnexInequality annex_inequality_from_string(const std::string& name) {
  for (auto id : {AnnexInequality::kLemma0, AnnexInequality::kTipBeta,
                  AnnexInequality::kEstALower, AnnexInequality::kEstAUpper,
                  AnnexInequality::kIncBetaA, AnnexInequality::kIncBetaB,
                  AnnexInequality::kBinomialFloor})
    if (name == to_string(id)) return id;
  throw std::invalid_argument("unknown inequality id: " + name);
}

const AnnexRegime& BaselineTable::require(AnnexInequality id) const {
  auto it = entries.find(to_string(id));
  if (it == entries.end())
    throw std::invalid_argument(std::string("baseline table has no entry for ") +
                                to_string(id));
  return it->second;
}

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

// Nodes and weights of the n-point Gauss-Legendre rule, Newton iteration on
// the Legendre recurrence.
GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    r.x[i] = t;
    r.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return r;
}

const GaussRule& gl15() {
  static const GaussRule rule = gauss_legendre(15);
  return rule;
}

double panel(double (*f)(double, const void*), const void* ctx, double lo,
             double hi) {
  const GaussRule& r = gl15();
  double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (size_t i = 0; i < r.x.size(); ++i)
    s += r.w[i] * f(mid + half * r.x[i], ctx);
  return s * half;
}

double adapt(double (*f)(double, const void*), const void* ctx, double lo,
             double hi, double whole, double tol, int depth) {
  double mid = 0.5 * (lo + hi);
  double left = panel(f, ctx, lo, mid);
  double right = panel(f, ctx, mid, hi);
  if (std::fabs(left + right - whole) <= tol || depth >= 40)
    return left + right;
  return adapt(f, ctx, lo, mid, left, 0.5 * tol, depth + 1) +
         adapt(f, ctx, mid, hi, right, 0.5 * tol, depth + 1);
}

// Integral over [lo, hi] of exp(m log t + (k-m) log(1-t) - peak_log),
// adaptive panels, absolute tolerance 1e-14 on the peak-normalized scale.
struct TipCtx {
  double m, km, peak_log;
};

double tip_integrand(double t, const void* ctx) {
  const TipCtx& c = *static_cast<const TipCtx*>(ctx);
  return std::exp(c.m * std::log(t) + c.km * std::log1p(-t) - c.peak_log);
}

double tip_mass_normalized(int k, int m, double lo, double hi,
                           double peak_log) {
  TipCtx ctx{double(m), double(k - m), peak_log};
  double whole = panel(tip_integrand, &ctx, lo, hi);
  return adapt(tip_integrand, &ctx, lo, hi, whole, 1e-14, 0);
}

void require(bool cond, const std::string& what) {
  if (!cond) throw RegimeError("verify_annex: " + what);
}

void check_window(const AnnexParams& p, const AnnexRegime& r) {
  require(p.k >= r.k_min, "k below the recorded validity window");
  require(p.m >= r.m_min, "m below the recorded validity window");
  require(p.m <= r.m_frac_max * p.k, "m/k above the recorded validity window");
}

double require_floor(const AnnexRegime& r, AnnexInequality id) {
  if (!r.floor || !(*r.floor > 0.0))
    throw std::invalid_argument(
        std::string("baseline table lacks a positive floor for ") +
        to_string(id));
  return *r.floor;
}

}  // namespace

MarginReport verify_annex(AnnexInequality id, const AnnexParams& p,
                          const BaselineTable& table) {
  const AnnexRegime& regime = table.require(id);
  MarginReport rep;
  rep.id = id;
  rep.params = p;
  const double k = p.k, m = p.m;

  switch (id) {
    case AnnexInequality::kLemma0: {
      check_window(p, regime);
      require(p.m <= p.k, "LEMMA0 needs m <= k");
      rep.lhs_log = m * std::log(k) + std::lgamma(k - m + 1.0) - std::lgamma(k + 1.0);
      rep.rhs_log = m + (p.m == p.k ? 0.0 : (k - m) * std::log1p(-m / k));
      break;
    }
    case AnnexInequality::kTipBeta: {
      check_window(p, regime);
      require(p.m < p.k, "TIP_BETA needs m < k");
      double floor = require_floor(regime, id);
      double lo = (m - std::sqrt(m)) / k, hi = m / k;
      double peak_log = m * std::log(hi) + (k - m) * std::log1p(-hi);
      double mass = tip_mass_normalized(p.k, p.m, lo, hi, peak_log);
      rep.lhs_log = std::log(floor) + log_beta(m + 1.0, k - m + 1.0);
      rep.rhs_log = std::log(mass) + peak_log;
      break;
    }
    case AnnexInequality::kEstALower: {
      check_window(p, regime);
      require(p.a > 0.0, "EST_A_LOWER needs a > 0");
      require(p.s > m - std::sqrt(m) && p.s < m,
              "EST_A_LOWER needs s in (m - sqrt m, m)");
      double shifted = p.s - p.a * std::sqrt(p.s);
      require(shifted > 0.0, "EST_A_LOWER needs s > a^2");
      rep.lhs_log = -3.0 * p.a * p.a + m * std::log(p.s) +
                    (k - m) * std::log1p(-p.s / k);
      rep.rhs_log = m * std::log(shifted) + (k - m) * std::log1p(-shifted / k);
      break;
    }
    case AnnexInequality::kEstAUpper: {
      check_window(p, regime);
      require(p.a > 0.0, "EST_A_UPPER needs a > 0");
      require(p.j >= p.m && p.j <= p.k, "EST_A_UPPER needs j in [m, k]");
      require(p.s > p.a * p.a && p.s <= m,
              "EST_A_UPPER needs s in (a^2, m]");
      double shifted = p.s - p.a * std::sqrt(p.s);
      double j = p.j;
      rep.lhs_log = j * std::log(shifted) + (k - j) * std::log1p(-shifted / k);
      rep.rhs_log = -0.5 * p.a * p.a + j * std::log(p.s) +
                    (k - j) * std::log1p(-p.s / k);
      break;
    }
    case AnnexInequality::kIncBetaA: {
      check_window(p, regime);
      require(p.a > 0.0, "INC_BETA_A needs a > 0");
      require(p.j >= 0 && p.j < p.m, "INC_BETA_A needs 0 <= j < m");
      double x = (m - p.a * std::sqrt(m)) / k;
      require(x > 0.0, "INC_BETA_A needs m > a^2");
      double floor = require_floor(regime, id);
      rep.lhs_log = std::log(floor);
      rep.rhs_log = log_incomplete_beta_reg(p.j + 1.0, k - p.j + 1.0, x);
      break;
    }
    case AnnexInequality::kIncBetaB: {
      check_window(p, regime);
      require(p.a > 0.0, "INC_BETA_B needs a > 0");
      require(p.j >= p.m && p.j <= p.k, "INC_BETA_B needs j in [m, k]");
      double x = (m - p.a * std::sqrt(m)) / k;
      require(x > 0.0, "INC_BETA_B needs m > a^2");
      rep.lhs_log = log_incomplete_beta_reg(p.j + 1.0, k - p.j + 1.0, x);
      rep.rhs_log = -0.5 * p.a * p.a +
                    log_incomplete_beta_reg(p.j + 1.0, k - p.j + 1.0, m / k);
      break;
    }
    case AnnexInequality::kBinomialFloor: {
      check_window(p, regime);
      require(p.m < p.k, "BINOMIAL_FLOOR needs m < k");
      double rho = m / (k - m);
      double x = std::isnan(p.x) ? rho : p.x;
      rep.params.x = x;
      require(x >= 0.0 && x <= rho * (1.0 + 1e-12),
              "BINOMIAL_FLOOR needs 0 <= x <= m/(k-m)");
      double floor = require_floor(regime, id);
      rep.lhs_log = std::log(floor);
      rep.rhs_log = std::log(incomplete_binomial_F(p.k, p.m, x));
      break;
    }
  }

  rep.margin = rep.rhs_log - rep.lhs_log;
  rep.holds = rep.margin >= 0.0;
  if (!std::isfinite(rep.lhs_log) || !std::isfinite(rep.rhs_log))
    throw std::runtime_error("verify_annex: non-finite margin evaluation");
  return rep;
}

BaselineTable default_regime_windows() {
  BaselineTable t;
  auto put = [&t](AnnexInequality id, int m_min, double m_frac_max) {
    AnnexRegime r;
    r.k_min = 50;
    r.m_min = m_min;
    r.m_frac_max = m_frac_max;
    t.entries[to_string(id)] = r;
  };
  put(AnnexInequality::kLemma0, 1, 1.0);
  put(AnnexInequality::kTipBeta, 9, 0.9);
  put(AnnexInequality::kEstALower, 9, 0.36);
  put(AnnexInequality::kEstAUpper, 9, 0.9);
  put(AnnexInequality::kIncBetaA, 9, 0.36);
  put(AnnexInequality::kIncBetaB, 9, 0.9);
  put(AnnexInequality::kBinomialFloor, 9, 0.9);
  return t;
}

}  // namespace bombieri
