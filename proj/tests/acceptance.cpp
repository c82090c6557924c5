// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is the number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/expansion.hpp"
#include "expsketch/experiments.hpp"
#include "expsketch/guarantees.hpp"
#include "expsketch/hhs_decoder.hpp"
#include "expsketch/lp_decoder.hpp"
#include "expsketch/random.hpp"
#include "expsketch/serialization.hpp"
#include "expsketch/sublinear_decoder.hpp"

using namespace expsketch;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kSlack = 1e-9;               // absolute slack on every inequality
constexpr double kRecoveryTol = 1e-6;         // max-norm error that counts as exact recovery
constexpr double kRip1Minutes = 1.0;          // criterion 1 runtime budget
constexpr double kPhaseMinutes = 30.0;        // criterion 5 runtime budget for the two cells
constexpr double kPhaseHigh = 0.9;            // success floor at (0.5, 0.1)
constexpr double kPhaseLow = 0.1;             // success ceiling at (0.5, 0.8)
constexpr double kTrendTol = 0.1;             // allowed rate increase between adjacent rho cells
constexpr double kSublinearMinutes = 1.0;     // criterion 7 runtime budget
constexpr std::size_t kHhsExactNeeded = 95;   // of 100
constexpr double kCalibratedCeiling = 10.0;   // C_art reported against this ceiling
constexpr std::size_t kNullspaceScan = 300;   // extra seeds scanned when criterion 4 is inconclusive

using Clock = std::chrono::steady_clock;

double minutes_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count() / 60.0;
}

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

Vector integer_sparse(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> magnitude(1, 9);
  std::bernoulli_distribution sign(0.5);
  Vector x = Vector::Zero(static_cast<Index>(n));
  for (auto i : sample_without_replacement(std::uint32_t(n), std::uint32_t(k), rng))
    x(i) = (sign(rng) ? 1.0 : -1.0) * magnitude(rng);
  return x;
}

struct Rip1Instance {
  BipartiteGraph g;
  double eps = 0.0;
  Rip1Bounds bounds;
};

std::vector<Rip1Instance> rip1_instances;

void criterion_1() {
  const auto start = Clock::now();
  std::size_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = sample_expander(12, 8, 3, seed);
    const double eps = check_expansion_exact(g, 2).epsilon_hat;
    auto bounds = rip1_constant_exact(from_graph(g), 2);
    const double margin = (1.0 - 2.0 * eps) - bounds.lo;
    worst = std::max(worst, margin);
    if (margin > kSlack) ++violations;
    rip1_instances.push_back({std::move(g), eps, std::move(bounds)});
  }
  const double elapsed = minutes_since(start);
  verdict(1, violations == 0 && elapsed < kRip1Minutes,
          fmt("RIP-1 lower bound lo >= 1 - 2 eps on 20 seeds of (12, 8, 3), k = 2: violations = %zu, "
              "worst (1 - 2 eps) - lo = %.3g, runtime %.2f s",
              violations, worst, elapsed * 60.0));
}

void criterion_2() {
  std::size_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& inst : rip1_instances) {
    const double implied = epsilon_from_rip1_delta(inst.bounds.delta);
    const double margin = inst.eps - implied;
    worst = std::max(worst, margin);
    if (margin > kSlack) ++violations;
  }
  verdict(2, violations == 0 && !rip1_instances.empty(),
          fmt("eps_hat <= epsilon_from_rip1_delta(delta) on %zu instances: violations = %zu, "
              "worst eps_hat - implied = %.3g",
              rip1_instances.size(), violations, worst));
}

void criterion_3() {
  std::size_t violations = 0, identity = 0, instances = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < rip1_instances.size(); ++seed) {
    const auto& inst = rip1_instances[seed];
    const auto report = check_collision_mass(inst.g, 2, inst.eps, 10000, derive_seed(3, {seed}));
    violations += report.violations;
    identity += static_cast<std::size_t>(report.parameters.at("identity_failures"));
    instances += report.instances;
    worst = std::max(worst, report.worst_margin);
  }
  verdict(3, violations == 0 && identity == 0,
          fmt("collision mass <= eps d ||x||_1 over %zu integer 2-sparse vectors (10^4 per instance): "
              "violations = %zu, identity failures = %zu, worst margin = %.3g",
              instances, violations, identity, worst));
}

void criterion_4() {
  std::size_t evaluated = 0, inconclusive = 0, violations = 0, samples = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = sample_expander(24, 16, 4, seed);
    const double eps = check_expansion_exact(g, 4).epsilon_hat;
    const auto report = check_nullspace_spread(from_graph(g), 2, eps, 1000, derive_seed(4, {seed}));
    if (report.inconclusive) {
      ++inconclusive;
      continue;
    }
    ++evaluated;
    violations += report.violations;
    samples += report.instances;
    worst = std::max(worst, report.worst_margin);
  }
  // alpha(eps) needs eps < 1/2. A wider seed scan shows whether any instance of this shape meets it.
  std::size_t scanned_below = 0;
  double min_eps = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < kNullspaceScan; ++seed) {
    const double eps = check_expansion_exact(sample_expander(24, 16, 4, seed), 4).epsilon_hat;
    min_eps = std::min(min_eps, eps);
    if (eps < 0.5) ++scanned_below;
  }
  verdict(4, violations == 0 && evaluated > 0,
          fmt("null-space spread on 10 seeds of (24, 16, 4), k = 2, eps at 4: %zu evaluated "
              "(%zu kernel samples), %zu inconclusive (eps >= 1/2), violations = %zu, worst margin = %.3g; "
              "scan of %zu seeds: %zu with eps < 1/2, min eps = %.4f",
              evaluated, samples, inconclusive, violations, worst, kNullspaceScan, scanned_below, min_eps));
}

void criterion_5() {
  ExperimentConfig cfg;
  cfg.n = 200;
  cfg.d = 8;
  cfg.trials_per_cell = 50;
  cfg.decoder = DecoderKind::lp;
  cfg.seed = 5;
  bool pass = true;
  std::string detail;
  const auto start = Clock::now();
  for (Ensemble ensemble : {Ensemble::pm1, Ensemble::zero_one}) {
    cfg.ensemble = ensemble;
    const auto easy = run_cell(cfg, 0.5, 0.1);
    const auto hard = run_cell(cfg, 0.5, 0.8);
    pass = pass && easy.success_rate >= kPhaseHigh && hard.success_rate <= kPhaseLow;
    detail += fmt("%s: rate(0.5, 0.1) = %.2f, rate(0.5, 0.8) = %.2f; ", to_string(ensemble).c_str(),
                  easy.success_rate, hard.success_rate);
  }
  const double cell_minutes = minutes_since(start);
  pass = pass && cell_minutes <= kPhaseMinutes;

  // Desk preset: 8 x 8 grid, pm1, same n, d and trials.
  auto desk = cfg;
  desk.ensemble = Ensemble::pm1;
  desk.grid_delta = desk.grid_rho = 8;
  const auto cells = run_grid(desk);
  std::size_t trend_breaks = 0, corner_misses = 0;
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 8; ++b) {
      const auto& c = cells[a * 8 + b];
      if (b + 1 < 8 && cells[a * 8 + b + 1].success_rate > c.success_rate + kTrendTol) ++trend_breaks;
      if (c.rho <= 0.1 && c.delta >= 0.4 && c.success_rate < kPhaseHigh) ++corner_misses;
      if (c.rho >= 0.8 && c.success_rate > kPhaseLow) ++corner_misses;
    }
  }
  pass = pass && trend_breaks == 0 && corner_misses == 0;
  detail += fmt("two-cell runtime %.1f s; desk 8x8: rho-trend breaks (> %.1f) = %zu, corner misses = %zu",
                cell_minutes * 60.0, kTrendTol, trend_breaks, corner_misses);
  verdict(5, pass, detail);
  std::printf("  desk preset heatmap (pm1, n = 200, d = 8, 50 trials):\n%s", render_ascii(cells).c_str());
}

void criterion_6() {
  // Exhaustive eps at 2k = 8 over C(64, <= 8) subsets is out of reach; enumeration stops as soon as
  // a set with defect >= 1/4 is found, which already settles that the bound is undefined.
  ExhaustiveOptions options;
  options.stop_at = 0.25;
  options.budget = 200'000'000;
  std::size_t undefined = 0, evaluated = 0, violations = 0, unknown = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto g = sample_expander(64, 40, 6, derive_seed(6, {t}));
    double eps = 0.0;
    bool stopped = false;
    try {
      const auto report = check_expansion_exact(g, 8, options);
      eps = report.epsilon_hat;
      stopped = report.stopped_early;
    } catch (const BudgetError&) {
      ++unknown;
      continue;
    }
    if (stopped || eps >= 0.25) {
      ++undefined;
      continue;
    }
    const auto report = check_lp_guarantee(from_graph(g), 4, eps, 1, derive_seed(6, {t, 1}), 1.5);
    ++evaluated;
    violations += report.violations;
  }
  const bool pass = violations == 0 && unknown == 0;
  verdict(6, pass,
          fmt("LP guarantee at (64, 40, 6), k = 4, 100 trials: evaluated = %zu, violations = %zu, "
              "bound-undefined (eps at 8 >= 1/4) = %zu, eps unresolved within budget = %zu%s",
              evaluated, violations, undefined, unknown,
              evaluated == 0 ? " [vacuous: no trial had eps < 1/4]" : ""));
}

void criterion_7() {
  const std::size_t n = 256, k = 4, d = 8;
  const std::size_t m = expander_right_size(k, d, 1.0 / 8.0);
  const auto start = Clock::now();
  std::size_t exact = 0, halving = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto am = build_augmented(from_graph(sample_expander(n, m, d, derive_seed(7, {t}))));
    const Vector x = integer_sparse(n, k, derive_seed(7, {t, 1}));
    const Vector sketch = multiply_binary(am.phi, x);
    const auto y = reduce(am, sketch).y;
    if (count_nonzeros(Vector(x - y)) <= k / 2) ++halving;
    const auto out = recover(am, sketch, k);
    if (out.success && (out.x - x).cwiseAbs().maxCoeff() <= kRecoveryTol) ++exact;
  }
  const double elapsed = minutes_since(start);
  verdict(7, exact == 100 && halving == 100 && elapsed < kSublinearMinutes,
          fmt("sublinear decoder n = 256, k = 4, d = 8, m = %zu: exact = %zu/100, halving = %zu/100, "
              "runtime %.2f s",
              m, exact, halving, elapsed * 60.0));
}

void criterion_8() {
  const double p = hhs_norm_exponent(256);
  const auto report = check_head_bounds(256, p, 1000, 8);
  verdict(8, report.passed() && report.instances == 1000 * 8,
          fmt("head bound, n = 256, p = %.4f, 1000 vectors x t in {1..128}: instances = %zu, "
              "violations = %zu, worst margin = %.3g",
              p, report.instances, report.violations, report.worst_margin));
}

struct TailOutcome {
  Vector x;
  SpikeList spikes;
};

std::vector<TailOutcome> tail_outcomes;
double calibrated_constant = 0.0;

void criterion_9() {
  const std::size_t n = 256;
  std::vector<HhsMeasurement> measurements;
  for (std::size_t k = 1; k <= 8; ++k) measurements.push_back(build_measurement(n, k, derive_seed(9, {k})));

  std::size_t exact = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const std::size_t k = 1 + t % 8;
    const auto& hm = measurements[k - 1];
    const Vector x = integer_sparse(n, k, derive_seed(9, {t, 1}));
    const auto result = hhs_pursuit(hm, encode(hm, x), k, dynamic_range(x));
    if ((to_dense(result.spikes, n) - x).cwiseAbs().maxCoeff() <= kRecoveryTol) ++exact;
  }

  const std::size_t k = 8;
  const auto& hm = measurements[k - 1];
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Vector x = integer_sparse(n, k, derive_seed(9, {t, 2}));
    x += 0.01 * compressible_signal(n, 1.5, derive_seed(9, {t, 3}));
    const auto result = hhs_pursuit(hm, encode(hm, x), k, dynamic_range(x));
    worst = std::max(worst, error_bound_constant(x, to_dense(result.spikes, n), k, hm.p));
    tail_outcomes.push_back({x, result.spikes});
  }
  calibrated_constant = worst;
  verdict(9, exact >= kHhsExactNeeded,
          fmt("HHS n = 256, k = 1..8: exact = %zu/100 (need >= %zu); k = 8 head + tail, 50 trials: "
              "C_art = %.4g (reported, %s %.0f)",
              exact, kHhsExactNeeded, worst, worst <= kCalibratedCeiling ? "<=" : ">", kCalibratedCeiling));
}

void criterion_10() {
  std::size_t l1_violations = 0, lp_violations = 0;
  const double p = hhs_norm_exponent(256);
  for (const auto& outcome : tail_outcomes) {
    const auto [kept, report] = truncate_to_k(outcome.spikes, 8, outcome.x, calibrated_constant, p);
    if (!report.l1.satisfied) ++l1_violations;
    if (!report.lp.satisfied) ++lp_violations;
  }
  verdict(10, l1_violations == 0 && !tail_outcomes.empty(),
          fmt("truncation with eps = C_art = %.4g on %zu outputs: l1 violations = %zu, "
              "lp violations = %zu (reported)",
              calibrated_constant, tail_outcomes.size(), l1_violations, lp_violations));
}

void criterion_11() {
  const fs::path dir = fs::current_path() / "acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  bool same = true;
  for (int run = 0; run < 2; ++run) {
    const auto g = sample_expander(200, 100, 8, 1);
    write_json(dir / ("graph" + std::to_string(run) + ".json"), to_json(g));
    write_json(dir / ("matrix" + std::to_string(run) + ".json"), to_json(from_graph(g)));
    const auto hm = build_measurement(64, 2, 11);
    write_text(dir / ("hhs" + std::to_string(run) + ".txt"),
               std::to_string(hm.identification.fingerprint()) + " " +
                   std::to_string(hm.estimation.fingerprint()) + "\n");
    ExperimentConfig cfg;
    cfg.n = 60;
    cfg.grid_delta = cfg.grid_rho = 3;
    cfg.trials_per_cell = 5;
    cfg.seed = 11;
    run_grid(cfg, dir / ("grid" + std::to_string(run) + ".csv"));
  }
  for (const char* stem : {"graph", "matrix", "hhs", "grid"}) {
    const std::string ext = std::string(stem) == "grid" ? ".csv" : std::string(stem) == "hhs" ? ".txt" : ".json";
    same = same && read_text(dir / (std::string(stem) + "0" + ext)) == read_text(dir / (std::string(stem) + "1" + ext));
  }
  fs::remove_all(dir);
  verdict(11, same, "graph JSON, matrix JSON, HHS fingerprints and grid CSV byte-identical across two runs");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                    criterion_5, criterion_6, criterion_7, criterion_8,
                                                    criterion_9, criterion_10, criterion_11};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      verdict(int(i + 1), false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
