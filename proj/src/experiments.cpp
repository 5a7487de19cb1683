#include "bombieri/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

#include "bombieri/io.hpp"

namespace bombieri {

namespace {

// Seed mixing and the uniform draws are pinned down explicitly so that a
// sweep file regenerates byte for byte on any platform. The standard engine
// is fully specified; the standard distributions are not.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : eng_(splitmix64(splitmix64(seed) + stream)) {}

  double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }

  int uniform_int(int lo, int hi) {
    return lo + int(eng_() % std::uint64_t(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

PlanePoint unlift(const UnitVec& u) {
  double denom = 1.0 - u.z;
  if (denom < 1e-12)
    throw std::runtime_error("unlift: point too close to the pole at infinity");
  return PlanePoint(u.x / denom, u.y / denom);
}

int multiplicity_cap(int k) { return int(std::sqrt(double(k)) + 1e-9); }

std::vector<int> draw_multiplicities(const ExperimentConfig& cfg, int k,
                                     Rng& rng) {
  int cap = multiplicity_cap(k);
  double target = cfg.density * k;
  std::vector<int> ms;
  switch (cfg.rule) {
    case MultiplicityRule::kUniform: {
      if (cfg.m_uniform > cap)
        throw std::invalid_argument(
            "generate_array: uniform multiplicity " +
            std::to_string(cfg.m_uniform) + " exceeds floor(sqrt(k)) = " +
            std::to_string(cap));
      int n = int(std::ceil(target / cfg.m_uniform));
      ms.assign(std::max(n, 1), cfg.m_uniform);
      break;
    }
    case MultiplicityRule::kSqrtK: {
      int n = int(std::ceil(target / cap));
      ms.assign(std::max(n, 1), cap);
      break;
    }
    case MultiplicityRule::kRandomBounded: {
      int hi = std::min(cfg.m_max, cap);
      double sum = 0.0;
      while (sum < target) {
        int m = rng.uniform_int(1, hi);
        ms.push_back(m);
        sum += m;
      }
      break;
    }
  }
  return ms;
}

MultiplicityArray clustered_array(const ExperimentConfig& cfg, int k) {
  int cap = multiplicity_cap(k);
  int m = cfg.rule == MultiplicityRule::kSqrtK ? cap : cfg.m_uniform;
  if (cfg.rule == MultiplicityRule::kRandomBounded)
    throw std::invalid_argument(
        "generate_array: CLUSTERED needs a fixed group size; "
        "RANDOM_BOUNDED does not provide one");
  if (m > cap)
    throw std::invalid_argument("generate_array: group size " +
                                std::to_string(m) +
                                " exceeds floor(sqrt(k)) = " +
                                std::to_string(cap));
  int n_clusters = std::max(1, int(std::ceil(cfg.density * k / m)));
  std::vector<PlanePoint> pts = fibonacci_points(n_clusters * m);
  std::vector<UnitVec> lifts;
  lifts.reserve(pts.size());
  for (const auto& p : pts) lifts.push_back(lift(p));

  std::vector<bool> used(pts.size(), false);
  MultiplicityArray arr;
  arr.k = k;
  for (size_t seed_idx = 0; seed_idx < pts.size(); ++seed_idx) {
    if (used[seed_idx]) continue;
    used[seed_idx] = true;
    std::vector<size_t> group{seed_idx};
    while (int(group.size()) < m) {
      size_t best = pts.size();
      double best_dot = -2.0;
      for (size_t j = 0; j < pts.size(); ++j) {
        if (used[j]) continue;
        double d = dot(lifts[seed_idx], lifts[j]);
        if (d > best_dot) {
          best_dot = d;
          best = j;
        }
      }
      used[best] = true;
      group.push_back(best);
    }
    UnitVec mean{0.0, 0.0, 0.0};
    for (size_t idx : group) {
      mean.x += lifts[idx].x;
      mean.y += lifts[idx].y;
      mean.z += lifts[idx].z;
    }
    double len = std::sqrt(mean.x * mean.x + mean.y * mean.y + mean.z * mean.z);
    if (len < 1e-9)
      throw std::runtime_error("generate_array: degenerate cluster centroid");
    arr.nodes.push_back({unlift({mean.x / len, mean.y / len, mean.z / len}), m});
  }
  return arr;
}

SweepRow compute_row(const ExperimentConfig& cfg, int k) {
  SweepRow row;
  row.k = k;
  auto start = std::chrono::steady_clock::now();
  try {
    MultiplicityArray arr = generate_array(cfg, k);
    row.total_multiplicity = arr.total_multiplicity();
    FrameReport frame = frame_bounds(arr);
    row.lower_frame_bound = frame.lower;
    row.upper_frame_bound = frame.upper;
    row.conditioning = frame.conditioning;
    if (row.total_multiplicity <= k + 1) {
      try {
        row.interpolation_constant = interpolation_constant(arr);
      } catch (const std::runtime_error&) {
        // rank-deficient analysis operator: leave the column blank
      }
    }
    GeometryReport geo = geometry_report(arr, cfg.c, cfg.mesh_n);
    row.overlap_count = geo.overlap;
    row.separation_margin_dilated = geo.margin_dilated;
    row.separation_margin_contracted = geo.margin_contracted;
    row.uncovered_mass_dilated = geo.uncovered_dilated;
    row.uncovered_mass_contracted = geo.uncovered_contracted;
    row.k_times_uncovered_mass = geo.k_uncovered_zero;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  auto end = std::chrono::steady_clock::now();
  row.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start)
          .count();
  return row;
}

int worker_count(size_t rows) {
  long cap = 0;
  if (const char* env = std::getenv("BOMBIERI_THREADS")) {
    char* end = nullptr;
    cap = std::strtol(env, &end, 10);
    if (end == env || cap < 1) cap = 0;
  }
  if (cap < 1) cap = long(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  return int(std::min<long>(cap, long(rows)));
}

// The shared nominal grid: m runs over perfect squares i^2 for
// 3 <= i <= floor(sqrt(k)), and each inequality adds its own s, j or x
// choices on top. Cells land in `fn` ready for verify_annex.
template <typename Fn>
void for_each_cell(AnnexInequality id, const std::vector<int>& ks,
                   const std::vector<double>& as, Fn&& fn) {
  for (int k : ks) {
    int i_max = multiplicity_cap(k);
    for (int i = 3; i <= i_max; ++i) {
      int m = i * i;
      AnnexParams base;
      base.k = k;
      base.m = m;
      switch (id) {
        case AnnexInequality::kLemma0:
        case AnnexInequality::kTipBeta:
        case AnnexInequality::kBinomialFloor:
          fn(base);
          break;
        case AnnexInequality::kEstALower:
          for (double a : as)
            for (double q : {0.25, 0.5, 0.75}) {
              AnnexParams p = base;
              p.a = a;
              p.s = m - q * std::min(a, 1.0) * std::sqrt(double(m));
              fn(p);
            }
          break;
        case AnnexInequality::kEstAUpper:
          for (double a : as)
            for (double q : {0.25, 0.5, 1.0}) {
              std::vector<int> js{m, (m + k) / 2, k};
              js.erase(std::unique(js.begin(), js.end()), js.end());
              for (int j : js) {
                AnnexParams p = base;
                p.a = a;
                p.s = a * a + q * (m - a * a);
                p.j = j;
                fn(p);
              }
            }
          break;
        case AnnexInequality::kIncBetaA:
          for (double a : as)
            for (int j : {0, m / 2, m - 1}) {
              AnnexParams p = base;
              p.a = a;
              p.j = j;
              fn(p);
            }
          break;
        case AnnexInequality::kIncBetaB:
          for (double a : as) {
            std::vector<int> js{m, (m + k) / 2, k};
            js.erase(std::unique(js.begin(), js.end()), js.end());
            for (int j : js) {
              AnnexParams p = base;
              p.a = a;
              p.j = j;
              fn(p);
            }
          }
          break;
      }
    }
  }
}

constexpr AnnexInequality kAllInequalities[] = {
    AnnexInequality::kLemma0,      AnnexInequality::kTipBeta,
    AnnexInequality::kEstALower,   AnnexInequality::kEstAUpper,
    AnnexInequality::kIncBetaA,    AnnexInequality::kIncBetaB,
    AnnexInequality::kBinomialFloor};

}  // namespace

const char* to_string(ArrayGenerator g) {
  switch (g) {
    case ArrayGenerator::kFibonacci: return "FIBONACCI";
    case ArrayGenerator::kPerturbed: return "PERTURBED";
    case ArrayGenerator::kClustered: return "CLUSTERED";
    case ArrayGenerator::kFromFile: return "FROM_FILE";
  }
  return "?";
}

const char* to_string(MultiplicityRule r) {
  switch (r) {
    case MultiplicityRule::kUniform: return "UNIFORM";
    case MultiplicityRule::kRandomBounded: return "RANDOM_BOUNDED";
    case MultiplicityRule::kSqrtK: return "SQRT_K";
  }
  return "?";
}

ArrayGenerator generator_from_string(const std::string& name) {
  if (name == "FIBONACCI") return ArrayGenerator::kFibonacci;
  if (name == "PERTURBED") return ArrayGenerator::kPerturbed;
  if (name == "CLUSTERED") return ArrayGenerator::kClustered;
  if (name == "FROM_FILE") return ArrayGenerator::kFromFile;
  throw std::invalid_argument("unknown array generator: " + name);
}

MultiplicityRule rule_from_string(const std::string& name) {
  if (name == "UNIFORM") return MultiplicityRule::kUniform;
  if (name == "RANDOM_BOUNDED") return MultiplicityRule::kRandomBounded;
  if (name == "SQRT_K") return MultiplicityRule::kSqrtK;
  throw std::invalid_argument("unknown multiplicity rule: " + name);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.k_list.empty())
    throw std::invalid_argument("config: k_list is empty");
  for (size_t i = 0; i < cfg.k_list.size(); ++i) {
    if (cfg.k_list[i] < 1)
      throw std::invalid_argument("config: k values must be >= 1");
    if (i > 0 && cfg.k_list[i] <= cfg.k_list[i - 1])
      throw std::invalid_argument("config: k_list must be strictly increasing");
  }
  if (!(cfg.density > 0.0))
    throw std::invalid_argument("config: density must be > 0");
  if (cfg.mesh_n < 1000)
    throw std::invalid_argument("config: mesh_n must be >= 1000");
  if (cfg.m_uniform < 1 || cfg.m_max < 1)
    throw std::invalid_argument("config: multiplicities must be >= 1");
  if (cfg.generator == ArrayGenerator::kFromFile && cfg.array_path.empty())
    throw std::invalid_argument("config: FROM_FILE needs an array path");
}

MultiplicityArray generate_array(const ExperimentConfig& cfg, int k) {
  if (k < 1) throw std::invalid_argument("generate_array: k must be >= 1");
  int cap = multiplicity_cap(k);

  if (cfg.generator == ArrayGenerator::kFromFile) {
    MultiplicityArray arr = load_array(cfg.array_path);
    arr.k = k;
    for (const auto& n : arr.nodes)
      if (n.multiplicity > cap)
        throw std::invalid_argument(
            "generate_array: file multiplicity " +
            std::to_string(n.multiplicity) + " exceeds floor(sqrt(k)) = " +
            std::to_string(cap));
    validate_array(arr, false);
    return arr;
  }
  if (cfg.generator == ArrayGenerator::kClustered) return clustered_array(cfg, k);

  Rng rng(cfg.seed, std::uint64_t(k));
  std::vector<int> ms = draw_multiplicities(cfg, k, rng);
  std::vector<PlanePoint> pts = fibonacci_points(int(ms.size()));

  MultiplicityArray arr;
  arr.k = k;
  arr.nodes.reserve(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    PlanePoint p = pts[i];
    if (cfg.generator == ArrayGenerator::kPerturbed) {
      // area-uniform offset within the chordal disk of radius 0.3/sqrt(k)
      double r = 0.3 * std::sqrt(rng.uniform01()) / std::sqrt(double(k));
      double theta = 2.0 * M_PI * rng.uniform01();
      PlanePoint w = std::polar(r / std::sqrt(1.0 - r * r), theta);
      p = mobius(p, w);
    }
    arr.nodes.push_back({p, ms[i]});
  }
  return arr;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<SweepRow> rows(cfg.k_list.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next.fetch_add(1); i < rows.size();
         i = next.fetch_add(1))
      rows[i] = compute_row(cfg, cfg.k_list[i]);
  };
  int workers = worker_count(rows.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rows;
}

AnnexSuiteResult run_annex_suite(const AnnexGrid& grid,
                                 const BaselineTable& table) {
  AnnexSuiteResult res;
  res.min_margin = std::numeric_limits<double>::infinity();
  for (AnnexInequality id : kAllInequalities) {
    for_each_cell(id, grid.k_values, grid.a_values, [&](const AnnexParams& p) {
      AnnexCell cell;
      cell.id = id;
      cell.params = p;
      try {
        cell.report = verify_annex(id, p, table);
        ++res.checked;
        if (cell.report.holds)
          ++res.held;
        else
          ++res.failed;
        res.min_margin = std::min(res.min_margin, cell.report.margin);
      } catch (const RegimeError& e) {
        cell.skipped = true;
        cell.skip_reason = e.what();
        ++res.skipped;
      }
      res.cells.push_back(std::move(cell));
    });
  }
  res.all_hold = res.checked > 0 && res.failed == 0;
  return res;
}

BaselineTable recompute_baseline(const BaselineTable& windows) {
  BaselineTable regen = windows;
  // Evaluate each floor-backed inequality with floor 1 so the reported
  // margin is exactly the log of the quantity the floor must undercut.
  BaselineTable probe = windows;
  std::vector<int> ks;
  for (int k = 100; k <= 1000; k += 100) ks.push_back(k);
  std::vector<double> as{0.5, 1.0, 2.0};

  for (AnnexInequality id :
       {AnnexInequality::kTipBeta, AnnexInequality::kIncBetaA,
        AnnexInequality::kBinomialFloor}) {
    probe.entries[to_string(id)].floor = 1.0;
    double ln_min = std::numeric_limits<double>::infinity();
    for_each_cell(id, ks, as, [&](const AnnexParams& p) {
      try {
        ln_min = std::min(ln_min, verify_annex(id, p, probe).margin);
      } catch (const RegimeError&) {
      }
    });
    if (!std::isfinite(ln_min))
      throw std::runtime_error("recompute_baseline: empty grid for " +
                               std::string(to_string(id)));
    double slack = 1e-9 * (1.0 + std::fabs(ln_min));
    regen.entries[to_string(id)].floor = std::exp(ln_min - slack);
  }
  return regen;
}

}  // namespace bombieri
