#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/guarantees.hpp"
#include "expsketch/hhs_decoder.hpp"
#include "expsketch/sparse_binary_matrix.hpp"

namespace expsketch {

using Json = nlohmann::ordered_json;

/// {"n", "m", "d", "neighbors"}.
Json to_json(const BipartiteGraph& g);
BipartiteGraph graph_from_json(const Json& j);

/// {"rows", "cols", "scale", "columns"}.
Json to_json(const SparseBinaryMatrix& phi);
SparseBinaryMatrix matrix_from_json(const Json& j);

Json to_json(const CheckReport& report);
Json to_json(const HhsParams& params);
HhsParams params_from_json(const Json& j);

std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_text(const std::filesystem::path& path, const std::string& text);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

/// Fixed "%.17g" rendering; round-trips exactly and keeps CSVs byte-stable.
std::string format_double(double value);

/// "row,value" lines; a leading "# provenance <hex>" comment carries the producer fingerprint.
void write_sketch_csv(const std::filesystem::path& path, const Sketch& sketch);
Sketch read_sketch_csv(const std::filesystem::path& path);

/// "index,value" lines for every coordinate.
void write_signal_csv(const std::filesystem::path& path, const Vector& x);
Vector read_signal_csv(const std::filesystem::path& path);

/// Manifest JSON plus one matrix file per sifting factor and one for the estimation matrix,
/// written beside the manifest. Noise-reduction and bit-test factors are rebuilt on load.
void save_measurement(const std::filesystem::path& manifest, const HhsMeasurement& hm);
HhsMeasurement load_measurement(const std::filesystem::path& manifest);

}  // namespace expsketch
