#include "expsketch/serialization.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace expsketch {

namespace fs = std::filesystem;

Json to_json(const BipartiteGraph& g) {
  return Json{{"n", g.n_left()}, {"m", g.m_right()}, {"d", g.degree()}, {"neighbors", g.adjacency()}};
}

BipartiteGraph graph_from_json(const Json& j) {
  try {
    return BipartiteGraph(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>(),
                          j.at("d").get<std::size_t>(), j.at("neighbors").get<std::vector<NeighborList>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed graph JSON: ") + e.what());
  }
}

Json to_json(const SparseBinaryMatrix& phi) {
  return Json{{"rows", phi.rows()}, {"cols", phi.cols()}, {"scale", phi.scale()}, {"columns", phi.columns()}};
}

SparseBinaryMatrix matrix_from_json(const Json& j) {
  try {
    return SparseBinaryMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                              j.at("columns").get<std::vector<std::vector<RowIndex>>>(),
                              j.at("scale").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed matrix JSON: ") + e.what());
  }
}

Json to_json(const CheckReport& report) {
  Json j{{"name", report.name},
         {"instances", report.instances},
         {"violations", report.violations},
         {"worst_margin", nullptr},
         {"hard", report.hard},
         {"inconclusive", report.inconclusive},
         {"passed", report.passed()}};
  if (std::isfinite(report.worst_margin)) j["worst_margin"] = report.worst_margin;
  if (!report.note.empty()) j["note"] = report.note;
  Json params = Json::object();
  for (const auto& [key, value] : report.parameters) params[key] = value;
  j["parameters"] = params;
  return j;
}

Json to_json(const HhsParams& p) {
  return Json{{"degree", p.degree},
              {"epsilon", p.epsilon},
              {"sifting_defect", p.sifting_defect},
              {"sifting_row_factor", p.sifting_row_factor},
              {"estimation_row_factor", p.estimation_row_factor},
              {"retain_fraction", p.retain_fraction},
              {"decode_rel_tol", p.decode_rel_tol},
              {"max_block_rows", p.max_block_rows},
              {"estimation_max_iterations", p.estimation_max_iterations},
              {"estimation_tol", p.estimation_tol},
              {"divergence_window", p.divergence_window}};
}

HhsParams params_from_json(const Json& j) {
  HhsParams p;
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    take("degree", p.degree);
    take("epsilon", p.epsilon);
    take("sifting_defect", p.sifting_defect);
    take("sifting_row_factor", p.sifting_row_factor);
    take("estimation_row_factor", p.estimation_row_factor);
    take("retain_fraction", p.retain_fraction);
    take("decode_rel_tol", p.decode_rel_tol);
    take("max_block_rows", p.max_block_rows);
    take("estimation_max_iterations", p.estimation_max_iterations);
    take("estimation_tol", p.estimation_tol);
    take("divergence_window", p.divergence_window);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed HHS parameters: ") + e.what());
  }
  return p;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(1) + "\n"); }

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

/// Non-comment, non-header lines split at the single comma.
std::vector<std::pair<std::string, std::string>> read_pairs(const fs::path& path, std::string* provenance) {
  std::istringstream in(read_text(path));
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# provenance ";
      if (provenance && line.rfind(key, 0) == 0) *provenance = line.substr(key.size());
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParameterError(path.string() + ": malformed line '" + line + "'");
    out.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  return out;
}

Vector parse_indexed(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& pairs) {
  Vector v(static_cast<Index>(pairs.size()));
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    try {
      if (std::stoull(pairs[t].first) != t)
        throw ParameterError(path.string() + ": indices must run 0, 1, 2, ...");
      v(static_cast<Index>(t)) = std::stod(pairs[t].second);
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ParameterError*>(&e)) throw;
      throw ParameterError(path.string() + ": unparsable entry on data line " + std::to_string(t + 1));
    }
  }
  return v;
}

std::string indexed_csv(const char* header, const Vector& v) {
  std::string out = std::string(header) + "\n";
  for (Index i = 0; i < v.size(); ++i) out += std::to_string(i) + "," + format_double(v(i)) + "\n";
  return out;
}

}  // namespace

void write_sketch_csv(const fs::path& path, const Sketch& sketch) {
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, sketch.provenance);
  write_text(path, std::string("# provenance ") + hex + "\n" + indexed_csv("row,value", sketch.values));
}

Sketch read_sketch_csv(const fs::path& path) {
  std::string provenance;
  const auto pairs = read_pairs(path, &provenance);
  Sketch out{parse_indexed(path, pairs), 0};
  if (!provenance.empty()) out.provenance = std::stoull(provenance, nullptr, 16);
  return out;
}

void write_signal_csv(const fs::path& path, const Vector& x) { write_text(path, indexed_csv("index,value", x)); }

Vector read_signal_csv(const fs::path& path) { return parse_indexed(path, read_pairs(path, nullptr)); }

void save_measurement(const fs::path& manifest, const HhsMeasurement& hm) {
  const fs::path dir = manifest.parent_path();
  const std::string stem = manifest.stem().string();
  Json blocks = Json::array();
  std::map<std::pair<std::size_t, std::size_t>, std::string> written;
  for (const auto& block : hm.blocks) {
    auto key = std::make_pair(block.j, block.s);
    auto it = written.find(key);
    if (it == written.end()) {
      const std::string file =
          stem + ".sifting.j" + std::to_string(block.j) + ".s" + std::to_string(block.s) + ".json";
      write_json(dir / file, to_json(block.sifting));
      it = written.emplace(key, file).first;
    }
    blocks.push_back(Json{{"j", block.j}, {"r", block.r}, {"s", block.s}, {"beta", block.beta},
                          {"row_offset", block.row_offset}, {"rows", block.rows}, {"sifting", it->second}});
  }
  const std::string estimation = stem + ".estimation.json";
  write_json(dir / estimation, to_json(hm.estimation));
  write_json(manifest, Json{{"format", "hhs-measurement"},
                            {"n", hm.n},
                            {"k", hm.k},
                            {"p", hm.p},
                            {"K", hm.K},
                            {"seed", hm.seed},
                            {"identification_rows", hm.identification.rows()},
                            {"identification_fingerprint", hm.identification.fingerprint()},
                            {"params", to_json(hm.params)},
                            {"blocks", blocks},
                            {"estimation", estimation},
                            {"truncated", hm.truncated}});
}

HhsMeasurement load_measurement(const fs::path& manifest) {
  const fs::path dir = manifest.parent_path();
  const Json j = read_json(manifest);
  try {
    require(j.value("format", "") == "hhs-measurement", manifest.string() + " is not an HHS manifest");
    std::map<std::string, SparseBinaryMatrix> sifting;
    std::vector<HhsBlock> blocks;
    for (const auto& b : j.at("blocks")) {
      const auto file = b.at("sifting").get<std::string>();
      auto it = sifting.find(file);
      if (it == sifting.end()) it = sifting.emplace(file, matrix_from_json(read_json(dir / file))).first;
      blocks.push_back(HhsBlock{b.at("j").get<std::size_t>(), b.at("r").get<std::size_t>(),
                                b.at("s").get<std::size_t>(), b.at("beta").get<std::size_t>(), it->second, 0, 0});
    }
    auto hm = assemble_measurement(j.at("n").get<std::size_t>(), j.at("k").get<std::size_t>(),
                                   j.at("seed").get<std::uint64_t>(), params_from_json(j.at("params")),
                                   std::move(blocks),
                                   matrix_from_json(read_json(dir / j.at("estimation").get<std::string>())),
                                   j.at("truncated").get<std::vector<std::string>>());
    require(hm.identification.fingerprint() == j.at("identification_fingerprint").get<std::uint64_t>(),
            manifest.string() + ": rebuilt identification matrix does not match the manifest");
    return hm;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(manifest.string() + ": " + e.what());
  }
}

}  // namespace expsketch
