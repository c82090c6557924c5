#include "expsketch/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/lp_decoder.hpp"
#include "expsketch/random.hpp"
#include "expsketch/sublinear_decoder.hpp"

namespace expsketch {

namespace fs = std::filesystem;

Ensemble parse_ensemble(const std::string& name) {
  if (name == "pm1") return Ensemble::pm1;
  if (name == "01") return Ensemble::zero_one;
  throw ParameterError("unknown ensemble '" + name + "' (expected pm1 or 01)");
}

DecoderKind parse_decoder(const std::string& name) {
  if (name == "lp") return DecoderKind::lp;
  if (name == "sublinear") return DecoderKind::sublinear;
  if (name == "hhs") return DecoderKind::hhs;
  throw ParameterError("unknown decoder '" + name + "' (expected lp, sublinear or hhs)");
}

std::string to_string(Ensemble e) { return e == Ensemble::pm1 ? "pm1" : "01"; }

std::string to_string(DecoderKind d) {
  switch (d) {
    case DecoderKind::lp: return "lp";
    case DecoderKind::sublinear: return "sublinear";
    case DecoderKind::hhs: return "hhs";
  }
  return "unknown";
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
    if (j.contains("d")) cfg.d = j.at("d").get<std::size_t>();
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.is_string()) {
        require(g.get<std::string>() == "desk", "grid preset must be \"desk\"");
        cfg.grid_delta = cfg.grid_rho = 8;
      } else if (g.is_array()) {
        require(g.size() == 2, "grid must be [delta_count, rho_count]");
        cfg.grid_delta = g.at(0).get<std::size_t>();
        cfg.grid_rho = g.at(1).get<std::size_t>();
      } else {
        cfg.grid_delta = cfg.grid_rho = g.get<std::size_t>();
      }
    }
    if (j.contains("trials_per_cell")) cfg.trials_per_cell = j.at("trials_per_cell").get<std::size_t>();
    if (j.contains("ensemble")) cfg.ensemble = parse_ensemble(j.at("ensemble").get<std::string>());
    if (j.contains("decoder")) cfg.decoder = parse_decoder(j.at("decoder").get<std::string>());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("success_tol")) cfg.success_tol = j.at("success_tol").get<double>();
    if (j.contains("reuse_matrix")) cfg.reuse_matrix = j.at("reuse_matrix").get<bool>();
    if (j.contains("hhs")) cfg.hhs = params_from_json(j.at("hhs"));
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed experiment config: ") + e.what());
  }
  require(cfg.n >= 1 && cfg.d >= 1, "n and d must be positive");
  require(cfg.grid_delta >= 1 && cfg.grid_rho >= 1, "grid counts must be positive");
  require(cfg.trials_per_cell >= 1, "trials_per_cell must be positive");
  require(cfg.success_tol > 0.0, "success_tol must be positive");
  return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
  return Json{{"n", cfg.n},
              {"d", cfg.d},
              {"grid", {cfg.grid_delta, cfg.grid_rho}},
              {"trials_per_cell", cfg.trials_per_cell},
              {"ensemble", to_string(cfg.ensemble)},
              {"decoder", to_string(cfg.decoder)},
              {"seed", cfg.seed},
              {"success_tol", cfg.success_tol},
              {"reuse_matrix", cfg.reuse_matrix},
              {"hhs", to_json(cfg.hhs)}};
}

Vector generate_signal(Ensemble ensemble, std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k <= n, "sparsity exceeds signal length");
  Rng rng(seed);
  Vector x = Vector::Zero(static_cast<Index>(n));
  const auto support =
      sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k), rng);
  std::bernoulli_distribution sign(0.5);
  for (auto i : support) x(i) = ensemble == Ensemble::zero_one || sign(rng) ? 1.0 : -1.0;
  return x;
}

std::vector<double> grid_axis(std::size_t count) {
  require(count >= 1, "grid axis needs at least one cell");
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i)
    axis[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
  return axis;
}

std::pair<std::size_t, std::size_t> cell_dimensions(const ExperimentConfig& cfg, double delta, double rho) {
  require(delta > 0.0 && delta <= 1.0 && rho > 0.0 && rho <= 1.0, "delta and rho must lie in (0, 1]");
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(delta * double(cfg.n))));
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rho * double(m))));
  return {m, k};
}

namespace {

std::uint64_t cell_key(double value) { return std::bit_cast<std::uint64_t>(value); }

bool decode_trial(const ExperimentConfig& cfg, std::size_t m, std::size_t k, std::size_t d,
                  std::uint64_t matrix_seed, std::uint64_t signal_seed) {
  const Vector x = generate_signal(cfg.ensemble, cfg.n, k, signal_seed);
  Vector estimate;
  switch (cfg.decoder) {
    case DecoderKind::lp: {
      const auto phi = from_graph(sample_expander(cfg.n, m, d, matrix_seed));
      const auto solution = decode(phi, apply(phi, x));
      if (solution.status != LpStatus::optimal) return false;
      estimate = solution.x_star;
      break;
    }
    case DecoderKind::sublinear: {
      const auto am = build_augmented(from_graph(sample_expander(cfg.n, m, d, matrix_seed)));
      const auto outcome = recover(am, multiply_binary(am.phi, x), k);
      estimate = outcome.x;
      break;
    }
    case DecoderKind::hhs: {
      HhsParams params = cfg.hhs;
      params.degree = d;
      const auto hm = build_measurement(cfg.n, k, matrix_seed, params);
      const auto result = hhs_pursuit(hm, encode(hm, x), k, dynamic_range(x));
      estimate = to_dense(result.spikes, cfg.n);
      break;
    }
  }
  return (estimate - x).cwiseAbs().maxCoeff() <= cfg.success_tol;
}

}  // namespace

CellResult run_cell_at(const ExperimentConfig& cfg, double delta, double rho, std::size_t m, std::size_t k) {
  require(m >= 1 && k <= cfg.n, "cell dimensions out of range");
  CellResult cell{delta, rho, m, k, cfg.trials_per_cell, 0, 0.0, 0.0};
  // The hhs row count does not follow m, so only the expander decoders clamp d to m.
  const std::size_t d = cfg.decoder == DecoderKind::hhs ? cfg.d : std::min(cfg.d, m);
  double seconds = 0.0;
  for (std::size_t t = 0; t < cfg.trials_per_cell; ++t) {
    const auto trial_seed = derive_seed(cfg.seed, {cell_key(delta), cell_key(rho), t});
    if (k == 0) {
      ++cell.successes;
      continue;
    }
    const auto matrix_seed = cfg.reuse_matrix
                                 ? derive_seed(cfg.seed, {cell_key(delta), cell_key(rho), ~std::uint64_t{0}})
                                 : derive_seed(trial_seed, {1});
    const auto start = std::chrono::steady_clock::now();
    bool success = false;
    try {
      success = decode_trial(cfg, m, k, d, matrix_seed, derive_seed(trial_seed, {2}));
    } catch (const std::exception&) {
      success = false;  // a failed decode is a miss, never an abort
    }
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (success) ++cell.successes;
  }
  cell.success_rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
  cell.mean_decode_time = seconds / static_cast<double>(cell.trials);
  return cell;
}

CellResult run_cell(const ExperimentConfig& cfg, double delta, double rho) {
  const auto [m, k] = cell_dimensions(cfg, delta, rho);
  return run_cell_at(cfg, delta, rho, m, k);
}

namespace {

std::string short_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

/// Parsed data row; nullopt for anything malformed (e.g. a torn final line).
std::optional<std::pair<CellResult, std::vector<std::string>>> parse_row(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 9) return std::nullopt;
  try {
    CellResult c;
    c.delta = std::stod(f[0]);
    c.rho = std::stod(f[1]);
    c.m = std::stoull(f[2]);
    c.k = std::stoull(f[3]);
    c.trials = std::stoull(f[6]);
    c.successes = std::stoull(f[7]);
    c.success_rate = std::stod(f[8]);
    return std::make_pair(c, f);
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string csv_header() { return "delta,rho,m,k,ensemble,decoder,trials,successes,success_rate"; }

std::string csv_row(const CellResult& c, const ExperimentConfig& cfg) {
  return short_double(c.delta) + "," + short_double(c.rho) + "," + std::to_string(c.m) + "," +
         std::to_string(c.k) + "," + to_string(cfg.ensemble) + "," + to_string(cfg.decoder) + "," +
         std::to_string(c.trials) + "," + std::to_string(c.successes) + "," + short_double(c.success_rate);
}

std::vector<CellResult> run_grid(const ExperimentConfig& cfg, const std::optional<fs::path>& csv,
                                 std::ostream* log) {
  const auto deltas = grid_axis(cfg.grid_delta);
  const auto rhos = grid_axis(cfg.grid_rho);

  // Completed rows keyed by the rendered (delta, rho) pair.
  std::map<std::pair<std::string, std::string>, std::string> done;
  if (csv && fs::exists(*csv)) {
    const auto lines = lines_of(*csv);
    // A torn final line (no trailing newline) is discarded.
    const std::string text = read_text(*csv);
    const std::size_t usable = !text.empty() && text.back() != '\n' && !lines.empty() ? lines.size() - 1
                                                                                      : lines.size();
    for (std::size_t t = 0; t < usable; ++t) {
      if (lines[t] == csv_header() || lines[t].empty()) continue;
      auto row = parse_row(lines[t]);
      if (!row) continue;
      const auto& f = row->second;
      if (f[4] != to_string(cfg.ensemble) || f[5] != to_string(cfg.decoder) ||
          row->first.trials != cfg.trials_per_cell)
        throw ParameterError(csv->string() + ": existing row for cell (" + f[0] + ", " + f[1] +
                             ") was produced by a different configuration");
      done[{f[0], f[1]}] = lines[t];
    }
  }

  std::ofstream append;
  if (csv) {
    std::string rewritten = csv_header() + "\n";
    for (const auto& [key, line] : done) rewritten += line + "\n";
    write_text(*csv, rewritten);
    append.open(*csv, std::ios::app);
    if (!append) throw std::runtime_error("cannot append to " + csv->string());
  }

  std::vector<CellResult> cells;
  std::string ordered = csv_header() + "\n";
  for (double delta : deltas) {
    for (double rho : rhos) {
      const std::pair key{short_double(delta), short_double(rho)};
      if (auto it = done.find(key); it != done.end()) {
        auto row = parse_row(it->second);
        cells.push_back(row->first);
        ordered += it->second + "\n";
        continue;
      }
      const CellResult cell = run_cell(cfg, delta, rho);
      const std::string line = csv_row(cell, cfg);
      cells.push_back(cell);
      ordered += line + "\n";
      if (csv) {
        append << line << '\n' << std::flush;
        if (!append)
          throw std::runtime_error("failed writing cell (" + key.first + ", " + key.second + ") to " +
                                   csv->string());
      }
      if (log)
        *log << "cell delta=" << key.first << " rho=" << key.second << " m=" << cell.m << " k=" << cell.k
             << " success_rate=" << short_double(cell.success_rate)
             << " mean_decode_seconds=" << cell.mean_decode_time << '\n';
    }
  }
  if (csv) {
    append.close();
    write_text(*csv, ordered);
  }
  return cells;
}

std::vector<CellResult> read_grid_csv(const fs::path& path) {
  std::vector<CellResult> cells;
  for (const auto& line : lines_of(path)) {
    if (line.empty() || line == csv_header()) continue;
    auto row = parse_row(line);
    if (!row) throw ParameterError(path.string() + ": malformed row '" + line + "'");
    cells.push_back(row->first);
  }
  return cells;
}

std::vector<std::pair<double, double>> read_overlay(const fs::path& path) {
  std::vector<std::pair<double, double>> points;
  for (const auto& line : lines_of(path)) {
    const auto f = split(line, ',');
    if (f.size() != 2) continue;
    try {
      points.emplace_back(std::stod(f[0]), std::stod(f[1]));
    } catch (const std::logic_error&) {
      if (!points.empty()) throw ParameterError(path.string() + ": malformed overlay line '" + line + "'");
    }
  }
  return points;
}

namespace {

struct Axes {
  std::vector<double> deltas;
  std::vector<double> rhos;
};

Axes axes_of(const std::vector<CellResult>& cells) {
  std::set<double> d, r;
  for (const auto& c : cells) {
    d.insert(c.delta);
    r.insert(c.rho);
  }
  return {{d.begin(), d.end()}, {r.begin(), r.end()}};
}

}  // namespace

std::string render_svg(const std::vector<CellResult>& cells,
                       const std::vector<std::pair<double, double>>& overlay) {
  constexpr double size = 480.0;
  constexpr double margin = 48.0;
  const auto axes = axes_of(cells);
  const double cw = size / static_cast<double>(std::max<std::size_t>(axes.deltas.size(), 1));
  const double ch = size / static_cast<double>(std::max<std::size_t>(axes.rhos.size(), 1));
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin << "\" height=\""
      << size + 2 * margin << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& c : cells) {
    const auto di = std::lower_bound(axes.deltas.begin(), axes.deltas.end(), c.delta) - axes.deltas.begin();
    const auto ri = std::lower_bound(axes.rhos.begin(), axes.rhos.end(), c.rho) - axes.rhos.begin();
    const int shade = static_cast<int>(std::lround(255.0 * c.success_rate));
    svg << "<rect x=\"" << margin + static_cast<double>(di) * cw << "\" y=\""
        << margin + size - static_cast<double>(ri + 1) * ch << "\" width=\"" << cw << "\" height=\"" << ch
        << "\" fill=\"rgb(" << shade << "," << shade << "," << shade << ")\"><title>delta=" << c.delta
        << " rho=" << c.rho << " rate=" << c.success_rate << "</title></rect>\n";
  }
  svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!overlay.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"3\" points=\"";
    for (const auto& [delta, rho] : overlay)
      svg << margin + delta * size << "," << margin + (1.0 - rho) * size << " ";
    svg << "\"/>\n";
  }
  svg << "<text x=\"" << margin + size / 2 << "\" y=\"" << size + 1.7 * margin
      << "\" text-anchor=\"middle\">delta = m/n</text>\n";
  svg << "<text x=\"" << margin / 3 << "\" y=\"" << margin + size / 2 << "\" transform=\"rotate(-90 "
      << margin / 3 << "," << margin + size / 2 << ")\" text-anchor=\"middle\">rho = k/m</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string render_ascii(const std::vector<CellResult>& cells) {
  static const std::string ramp = " .:-=+*#%@";
  const auto axes = axes_of(cells);
  std::map<std::pair<double, double>, double> rate;
  for (const auto& c : cells) rate[{c.delta, c.rho}] = c.success_rate;
  std::ostringstream out;
  for (auto r = axes.rhos.rbegin(); r != axes.rhos.rend(); ++r) {
    out << short_double(*r) << "\t|";
    for (double d : axes.deltas) {
      auto it = rate.find({d, *r});
      const double v = it == rate.end() ? 0.0 : it->second;
      out << ramp[static_cast<std::size_t>(std::lround(v * double(ramp.size() - 1)))];
    }
    out << "|\n";
  }
  out << "rho ^  delta ->  (' ' = 0, '@' = 1)\n";
  return out.str();
}

std::vector<std::size_t> rho_inversions(const std::vector<CellResult>& cells) {
  const auto axes = axes_of(cells);
  std::map<std::pair<double, double>, double> rate;
  for (const auto& c : cells) rate[{c.delta, c.rho}] = c.success_rate;
  std::vector<std::size_t> out;
  for (double d : axes.deltas) {
    std::size_t count = 0;
    std::optional<double> previous;
    for (double r : axes.rhos) {
      auto it = rate.find({d, r});
      if (it == rate.end()) continue;
      if (previous && it->second > *previous) ++count;
      previous = it->second;
    }
    out.push_back(count);
  }
  return out;
}

}  // namespace expsketch
