// Command-line front end: graph sampling, encoding, decoding, checkers and the
// phase-transition experiment.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/expansion.hpp"
#include "expsketch/experiments.hpp"
#include "expsketch/guarantees.hpp"
#include "expsketch/hhs_decoder.hpp"
#include "expsketch/lp_decoder.hpp"
#include "expsketch/random.hpp"
#include "expsketch/serialization.hpp"
#include "expsketch/sublinear_decoder.hpp"

namespace fs = std::filesystem;
using namespace expsketch;

namespace {

std::uint64_t hhs_fingerprint(const HhsMeasurement& hm) {
  return derive_seed(hm.identification.fingerprint(), {hm.estimation.fingerprint()});
}

void emit(const Json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(1) << '\n';
  else
    write_json(out, j);
}

void emit_signal(const Vector& x, const std::string& out) {
  if (!out.empty()) {
    write_signal_csv(out, x);
    return;
  }
  std::cout << "index,value\n";
  for (Index i = 0; i < x.size(); ++i) std::cout << i << ',' << format_double(x(i)) << '\n';
}

SparseBinaryMatrix load_matrix_or_graph(const std::string& matrix, const std::string& graph) {
  if (!matrix.empty()) return matrix_from_json(read_json(matrix));
  require(!graph.empty(), "one of --matrix or --graph is required");
  return from_graph(graph_from_json(read_json(graph)));
}

struct VerifyArgs {
  std::string checker;
  std::string graph;
  std::size_t n = 12;
  std::size_t m = 8;
  std::size_t d = 3;
  std::size_t k = 2;
  double p = 1.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  std::uint64_t budget = 10'000'000;
  std::string out;
};

double exact_defect(const BipartiteGraph& g, std::size_t k, std::uint64_t budget) {
  return check_expansion_exact(g, k, ExhaustiveOptions{budget, std::nullopt}).epsilon_hat;
}

int run_verify(const VerifyArgs& a) {
  const BipartiteGraph g = !a.graph.empty() ? graph_from_json(read_json(a.graph))
                                            : sample_expander(a.n, a.m, a.d, a.seed);
  CheckReport report;
  const std::string& c = a.checker;
  if (c == "expansion") {
    const auto e = check_expansion_exact(g, a.k, ExhaustiveOptions{a.budget, std::nullopt});
    report.name = "expansion";
    if (a.epsilon) report.record(e.epsilon_hat, *a.epsilon);
    else {
      report.hard = false;
      report.note = "no target epsilon given; defect reported only";
    }
    report.parameters = {{"k", double(e.k_tested)},
                         {"epsilon_hat", e.epsilon_hat},
                         {"subsets_examined", double(e.subsets_examined)},
                         {"clamped", e.clamped ? 1.0 : 0.0}};
  } else if (c == "rip1") {
    const double eps = exact_defect(g, a.k, a.budget);
    const auto bounds = rip1_constant_exact(from_graph(g), a.k, ExhaustiveOptions{a.budget, std::nullopt});
    report.name = "rip1";
    report.record(1.0 - 2.0 * eps, bounds.lo, 1e-9);
    report.record(eps, epsilon_from_rip1_delta(bounds.delta), 1e-9);
    report.parameters = {{"k", double(a.k)},        {"epsilon_hat", eps},
                         {"lo", bounds.lo},         {"hi", bounds.hi},
                         {"delta", bounds.delta},   {"programs", double(bounds.programs_solved)}};
  } else if (c == "rip-p") {
    report = check_rip_p(g, a.k, a.p, exact_defect(g, a.k, a.budget), a.trials, a.seed);
  } else if (c == "collision") {
    report = check_collision_mass(g, a.k, exact_defect(g, a.k, a.budget), a.trials, a.seed);
  } else if (c == "nullspace") {
    const double eps = a.epsilon ? *a.epsilon : exact_defect(g, 2 * a.k, a.budget);
    report = check_nullspace_spread(from_graph(g), a.k, eps, a.trials, a.seed);
  } else if (c == "lp-guarantee") {
    const double eps = a.epsilon ? *a.epsilon : exact_defect(g, 2 * a.k, a.budget);
    report = check_lp_guarantee(from_graph(g), a.k, eps, a.trials, a.seed);
  } else if (c == "head-bound") {
    report = check_head_bounds(a.n, a.p > 1.0 ? a.p : hhs_norm_exponent(a.n), a.trials, a.seed);
  } else if (c == "rip2-demo") {
    report = check_rip2_not_rip1_demo(a.n, a.k, a.seed);
  } else {
    throw ParameterError("unknown checker '" + c +
                         "' (expansion, rip1, rip-p, collision, nullspace, lp-guarantee, head-bound, rip2-demo)");
  }
  emit(to_json(report), a.out);
  return report.hard && report.violations > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery with expander sketches"};
  app.require_subcommand(1);

  // sample-graph
  auto* sample = app.add_subcommand("sample-graph", "Sample a random left-regular bipartite graph");
  std::size_t g_n = 0, g_m = 0, g_d = 8, g_k = 0;
  double g_eps = 0.0;
  std::uint64_t g_seed = 0;
  std::string g_out;
  sample->add_option("--n", g_n, "left vertices (signal length)")->required();
  sample->add_option("--m", g_m, "right vertices (measurements)");
  sample->add_option("--d", g_d, "left degree");
  sample->add_option("--k", g_k, "size m for a (k, eps)-expander when --m is absent");
  sample->add_option("--eps", g_eps, "target defect used with --k");
  sample->add_option("--seed", g_seed);
  sample->add_option("--out", g_out, "graph JSON (stdout when omitted)");

  // encode
  auto* enc = app.add_subcommand("encode", "Compute a sketch of a signal");
  std::string e_signal, e_graph, e_matrix, e_measurement, e_out;
  bool e_bits = false;
  enc->add_option("--signal", e_signal, "signal CSV (index,value)")->required();
  enc->add_option("--graph", e_graph);
  enc->add_option("--matrix", e_matrix);
  enc->add_option("--measurement", e_measurement, "HHS manifest");
  enc->add_flag("--bit-tests", e_bits, "augment the graph matrix with bit tests (sublinear decoder)");
  enc->add_option("--out", e_out, "sketch CSV")->required();

  // build-hhs
  auto* hhs = app.add_subcommand("build-hhs", "Build and save an HHS measurement bundle");
  std::size_t h_n = 0, h_k = 0;
  std::uint64_t h_seed = 0;
  std::optional<double> h_eps;
  std::string h_params, h_out;
  hhs->add_option("--n", h_n)->required();
  hhs->add_option("--k", h_k)->required();
  hhs->add_option("--seed", h_seed);
  hhs->add_option("--epsilon", h_eps, "output quality parameter (default 1)");
  hhs->add_option("--params", h_params, "JSON file overriding HHS constants");
  hhs->add_option("--out", h_out, "manifest path")->required();

  // decode
  auto* dec = app.add_subcommand("decode", "Recover a signal from a sketch");
  dec->require_subcommand(1);
  std::string d_graph, d_matrix, d_sketch, d_measurement, d_out;
  std::size_t d_k = 0;
  double d_range = 4294967296.0;
  auto* dec_lp = dec->add_subcommand("lp", "Basis pursuit");
  dec_lp->add_option("--graph", d_graph);
  dec_lp->add_option("--matrix", d_matrix);
  dec_lp->add_option("--sketch", d_sketch)->required();
  dec_lp->add_option("--out", d_out);
  auto* dec_sub = dec->add_subcommand("sublinear", "Voting decoder for exactly k-sparse signals");
  dec_sub->add_option("--graph", d_graph)->required();
  dec_sub->add_option("--sketch", d_sketch)->required();
  dec_sub->add_option("--k", d_k)->required();
  dec_sub->add_option("--out", d_out);
  auto* dec_hhs = dec->add_subcommand("hhs", "HHS(p) pursuit");
  dec_hhs->add_option("--measurement", d_measurement)->required();
  dec_hhs->add_option("--sketch", d_sketch)->required();
  dec_hhs->add_option("--k", d_k)->required();
  dec_hhs->add_option("--range", d_range, "dynamic range of the signal (default 2^32)");
  dec_hhs->add_option("--out", d_out);

  // verify
  auto* ver = app.add_subcommand("verify", "Run a numerical checker and print its report as JSON");
  VerifyArgs va;
  std::optional<double> v_eps;
  ver->add_option("checker", va.checker,
                  "expansion | rip1 | rip-p | collision | nullspace | lp-guarantee | head-bound | rip2-demo")
      ->required();
  ver->add_option("--graph", va.graph, "graph JSON (otherwise sampled from --n --m --d --seed)");
  ver->add_option("--n", va.n);
  ver->add_option("--m", va.m);
  ver->add_option("--d", va.d);
  ver->add_option("--k", va.k);
  ver->add_option("--p", va.p);
  ver->add_option("--trials", va.trials);
  ver->add_option("--seed", va.seed);
  ver->add_option("--epsilon", v_eps, "defect to use instead of the exhaustive estimate");
  ver->add_option("--budget", va.budget, "subset budget for exhaustive computations");
  ver->add_option("--out", va.out);

  // phase-transition
  auto* pt = app.add_subcommand("phase-transition", "Run the (delta, rho) recovery experiment");
  std::string p_config, p_out, p_heatmap, p_overlay;
  bool p_ascii = false;
  pt->add_option("--config", p_config, "experiment JSON")->required();
  pt->add_option("--out", p_out, "results CSV (resumable)");
  pt->add_option("--heatmap", p_heatmap, "SVG heatmap path");
  pt->add_option("--overlay", p_overlay, "CSV of (delta,rho) points drawn over the heatmap");
  pt->add_flag("--ascii", p_ascii, "print an ASCII heatmap to stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      std::size_t m = g_m;
      if (m == 0) {
        require(g_k > 0 && g_eps > 0.0, "give --m, or --k and --eps");
        m = expander_right_size(g_k, g_d, g_eps);
      }
      emit(to_json(sample_expander(g_n, m, g_d, g_seed)), g_out);
    } else if (*enc) {
      const Vector x = read_signal_csv(e_signal);
      Sketch sketch;
      if (!e_measurement.empty()) {
        const auto hm = load_measurement(e_measurement);
        sketch = Sketch{encode(hm, x), hhs_fingerprint(hm)};
      } else {
        auto phi = load_matrix_or_graph(e_matrix, e_graph);
        if (e_bits) phi = build_augmented(phi).phi;
        sketch = apply(phi, x);
      }
      write_sketch_csv(e_out, sketch);
    } else if (*hhs) {
      HhsParams params = h_params.empty() ? HhsParams{} : params_from_json(read_json(h_params));
      if (h_eps) params.epsilon = *h_eps;
      const auto hm = build_measurement(h_n, h_k, h_seed, params);
      save_measurement(h_out, hm);
      for (const auto& line : hm.truncated) std::cerr << "truncated block " << line << '\n';
      std::cerr << "identification rows " << hm.identification.rows() << ", estimation rows "
                << hm.estimation.rows() << ", blocks " << hm.blocks.size() << '\n';
    } else if (*dec_lp) {
      const auto phi = load_matrix_or_graph(d_matrix, d_graph);
      const auto solution = decode(phi, read_sketch_csv(d_sketch));
      std::cerr << "status " << to_string(solution.status) << ", objective " << solution.objective
                << ", residual " << solution.residual_inf << ", pivots " << solution.pivots << '\n';
      if (solution.status != LpStatus::optimal) return 1;
      emit_signal(solution.x_star, d_out);
    } else if (*dec_sub) {
      const auto am = build_augmented(from_graph(graph_from_json(read_json(d_graph))));
      const auto sketch = read_sketch_csv(d_sketch);
      require(sketch.provenance == 0 || sketch.provenance == am.phi.fingerprint(),
              "sketch was not produced by this graph with bit tests");
      const auto outcome = recover(am, sketch.values, d_k);
      std::cerr << (outcome.success ? "recovered" : "not recovered") << " after " << outcome.iterations
                << " rounds, residual " << outcome.residual_norm << '\n';
      emit_signal(outcome.x, d_out);
      if (!outcome.success) return 1;
    } else if (*dec_hhs) {
      const auto hm = load_measurement(d_measurement);
      const auto sketch = read_sketch_csv(d_sketch);
      require(sketch.provenance == 0 || sketch.provenance == hhs_fingerprint(hm),
              "sketch was not produced by this measurement");
      const auto result = hhs_pursuit(hm, sketch.values, d_k, d_range);
      std::cerr << "status " << to_string(result.status) << " after " << result.iterations.size()
                << " iterations, " << result.spikes.size() << " spikes\n";
      emit_signal(to_dense(result.spikes, hm.n), d_out);
      if (result.status == HhsStatus::estimation_diverged) return 1;
    } else if (*ver) {
      va.epsilon = v_eps;
      return run_verify(va);
    } else if (*pt) {
      const auto cfg = config_from_json(read_json(p_config));
      std::optional<fs::path> csv;
      if (!p_out.empty()) csv = p_out;
      const auto cells = run_grid(cfg, csv, &std::cerr);
      if (p_out.empty()) {
        std::cout << csv_header() << '\n';
        for (const auto& cell : cells) std::cout << csv_row(cell, cfg) << '\n';
      }
      if (!p_heatmap.empty()) {
        const auto overlay = p_overlay.empty() ? std::vector<std::pair<double, double>>{} : read_overlay(p_overlay);
        write_text(p_heatmap, render_svg(cells, overlay));
      }
      if (p_ascii) std::cout << render_ascii(cells);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
