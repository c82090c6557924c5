#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expsketch/hhs_decoder.hpp"
#include "expsketch/serialization.hpp"
#include "expsketch/signal.hpp"

namespace expsketch {

enum class Ensemble { pm1, zero_one };
enum class DecoderKind { lp, sublinear, hhs };

Ensemble parse_ensemble(const std::string& name);
DecoderKind parse_decoder(const std::string& name);
std::string to_string(Ensemble e);
std::string to_string(DecoderKind d);

struct ExperimentConfig {
  std::size_t n = 200;
  std::size_t d = 8;
  std::size_t grid_delta = 40;
  std::size_t grid_rho = 40;
  std::size_t trials_per_cell = 50;
  Ensemble ensemble = Ensemble::pm1;
  DecoderKind decoder = DecoderKind::lp;
  std::uint64_t seed = 0;
  double success_tol = 1e-6;
  /// One matrix per cell instead of one per trial.
  bool reuse_matrix = false;
  /// Only consulted by the hhs decoder (its row count does not follow delta).
  HhsParams hhs;
};

/// Field names mirror ExperimentConfig; "grid" is [delta_count, rho_count], a single count,
/// or "desk" for 8 x 8. Missing fields keep their defaults.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& cfg);

/// Uniform size-k support; values +-1 equiprobable (pm1) or all +1 (zero_one).
Vector generate_signal(Ensemble ensemble, std::size_t n, std::size_t k, std::uint64_t seed);

struct CellResult {
  double delta = 0.0;
  double rho = 0.0;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_decode_time = 0.0;  // seconds; excluded from the CSV
};

/// Cell centers (i + 1/2) / count along one axis.
std::vector<double> grid_axis(std::size_t count);

/// m = round(delta n) (at least 1), k = max(1, round(rho m)).
std::pair<std::size_t, std::size_t> cell_dimensions(const ExperimentConfig& cfg, double delta, double rho);

/// Trials at explicit (m, k); k = 0 succeeds trivially. Decoder failures count as misses.
CellResult run_cell_at(const ExperimentConfig& cfg, double delta, double rho, std::size_t m, std::size_t k);
CellResult run_cell(const ExperimentConfig& cfg, double delta, double rho);

std::string csv_header();
std::string csv_row(const CellResult& cell, const ExperimentConfig& cfg);

/// Runs every cell in grid order (delta outer, rho inner). With `csv`, rows are appended as
/// cells finish and cells already present in the file are skipped; the file is rewritten in
/// grid order at the end. Timing lines go to `log` when given.
std::vector<CellResult> run_grid(const ExperimentConfig& cfg,
                                 const std::optional<std::filesystem::path>& csv = std::nullopt,
                                 std::ostream* log = nullptr);

/// Reads rows written by run_grid (any order).
std::vector<CellResult> read_grid_csv(const std::filesystem::path& path);

/// (delta, rho) polyline points; a header line is optional.
std::vector<std::pair<double, double>> read_overlay(const std::filesystem::path& path);

std::string render_svg(const std::vector<CellResult>& cells,
                       const std::vector<std::pair<double, double>>& overlay = {});
std::string render_ascii(const std::vector<CellResult>& cells);

/// Per delta column, the number of adjacent rho steps where success_rate increases.
std::vector<std::size_t> rho_inversions(const std::vector<CellResult>& cells);

}  // namespace expsketch
