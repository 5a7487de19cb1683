#pragma once

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace bombieri {

// Machine-checked inequalities behind the multiplicity estimates. Each one
// is normalized to the form lhs <= rhs on a log scale.
enum class AnnexInequality {
  kLemma0,         // k^m (k-m)!/k!  <=  e^m (1 - m/k)^{k-m}
  kTipBeta,        // mass of t^m (1-t)^{k-m} over ((m-sqrt m)/k, m/k)
                   //   >= floor * Beta(m+1, k-m+1)
  kEstALower,      // (s-a sqrt s)^m (1-(s-a sqrt s)/k)^{k-m}
                   //   >= e^{-3a^2} s^m (1-s/k)^{k-m},  s in (m-sqrt m, m)
  kEstAUpper,      // same expression with exponent j in [m, k], s in (a^2, m]:
                   //   <= e^{-a^2/2} s^j (1-s/k)^{k-j}
  kIncBetaA,       // I(j+1, k-j+1; (m-a sqrt m)/k) >= floor,  j < m
  kIncBetaB,       // I(j+1, k-j+1; (m-a sqrt m)/k)
                   //   <= e^{-a^2/2} I(j+1, k-j+1; m/k),  j in [m, k]
  kBinomialFloor,  // F_{k,m}(x) >= floor on 0 <= x <= m/(k-m)
};

const char* to_string(AnnexInequality id);
AnnexInequality annex_inequality_from_string(const std::string& name);

constexpr double kUnsetParam = std::numeric_limits<double>::quiet_NaN();

struct AnnexParams {
  int k = 0;
  int m = 0;
  int j = -1;             // -1 where the inequality has no j
  double a = kUnsetParam;
  double s = kUnsetParam;
  double x = kUnsetParam;  // kBinomialFloor evaluation point; default m/(k-m)
};

// Validity window of one inequality plus, where no closed-form constant
// exists, the recorded empirical floor.
struct AnnexRegime {
  int k_min = 50;
  int m_min = 9;
  double m_frac_max = 1.0;  // require m <= m_frac_max * k
  std::optional<double> floor;
};

struct BaselineTable {
  std::map<std::string, AnnexRegime> entries;

  static BaselineTable load(const std::string& path);  // JSON file
  void save(const std::string& path) const;

  const AnnexRegime& require(AnnexInequality id) const;
};

struct MarginReport {
  AnnexInequality id = AnnexInequality::kLemma0;
  AnnexParams params;
  double lhs_log = 0.0;
  double rhs_log = 0.0;
  double margin = 0.0;  // rhs_log - lhs_log
  bool holds = false;   // margin >= 0
};

// Parameters outside the inequality's hypotheses: a misuse of the check,
// not a falsified statement.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

MarginReport verify_annex(AnnexInequality id, const AnnexParams& params,
                          const BaselineTable& table);

// Validity windows for every inequality, with the floors left unset. Floors
// come from a committed baseline file or a fresh recompute_baseline run.
BaselineTable default_regime_windows();

}  // namespace bombieri
