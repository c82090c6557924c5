#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "expsketch/serialization.hpp"

using namespace expsketch;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("expsketch_ser_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(GraphJson, RoundTripAndErrors) {
  const auto g = sample_expander(30, 12, 4, 8);
  const Json j = to_json(g);
  EXPECT_EQ(j.at("n"), 30);
  EXPECT_EQ(graph_from_json(j), g);
  EXPECT_EQ(graph_from_json(Json::parse(j.dump())), g);
  Json broken = j;
  broken["neighbors"][0][0] = 99;  // beyond m
  EXPECT_THROW(graph_from_json(broken), ParameterError);
  EXPECT_THROW(graph_from_json(Json{{"n", 1}}), ParameterError);
}

TEST(MatrixJson, RoundTripKeepsScaleAndFingerprint) {
  const auto phi = from_graph(sample_expander(20, 9, 3, 1)).with_scale(0.3);
  const auto back = matrix_from_json(Json::parse(to_json(phi).dump()));
  EXPECT_EQ(back, phi);
  EXPECT_EQ(back.fingerprint(), phi.fingerprint());
  EXPECT_THROW(matrix_from_json(Json{{"rows", 2}}), ParameterError);
}

TEST(ReportJson, NonFiniteMarginIsNull) {
  CheckReport empty;
  empty.name = "x";
  EXPECT_TRUE(to_json(empty).at("worst_margin").is_null());
  CheckReport r;
  r.name = "y";
  r.record(1.0, 2.0);
  r.parameters["k"] = 3;
  const Json j = to_json(r);
  EXPECT_EQ(j.at("worst_margin"), -1.0);
  EXPECT_EQ(j.at("parameters").at("k"), 3.0);
  EXPECT_EQ(j.at("violations"), 0);
}

TEST(ParamsJson, RoundTripAndPartial) {
  HhsParams p;
  p.degree = 10;
  p.estimation_row_factor = 3.5;
  const auto back = params_from_json(to_json(p));
  EXPECT_EQ(back.degree, 10u);
  EXPECT_EQ(back.estimation_row_factor, 3.5);
  EXPECT_EQ(to_json(back), to_json(p));
  EXPECT_EQ(params_from_json(Json{{"degree", 9}}).sifting_defect, HhsParams{}.sifting_defect);
  EXPECT_THROW(params_from_json(Json{{"degree", "eight"}}), ParameterError);
}

TEST(Text, AtomicWriteAndMissingFile) {
  TempDir dir("text");
  write_text(dir.path / "a.txt", "hello\n");
  EXPECT_EQ(read_text(dir.path / "a.txt"), "hello\n");
  write_text(dir.path / "a.txt", "bye");
  EXPECT_EQ(read_text(dir.path / "a.txt"), "bye");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir.path)) ++files;
  EXPECT_EQ(files, 1u);  // no temporary left behind
  EXPECT_THROW(read_text(dir.path / "missing.txt"), std::runtime_error);
  write_text(dir.path / "bad.json", "{not json");
  EXPECT_THROW(read_json(dir.path / "bad.json"), ParameterError);
}

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(SketchCsv, RoundTripWithProvenance) {
  TempDir dir("sketch");
  const auto phi = from_graph(sample_expander(10, 6, 2, 3));
  Vector x(10);
  for (Index i = 0; i < 10; ++i) x(i) = 0.1 * double(i) - 0.37;
  const Sketch s = apply(phi, x);
  write_sketch_csv(dir.path / "s.csv", s);
  const Sketch back = read_sketch_csv(dir.path / "s.csv");
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.provenance, phi.fingerprint());
  write_text(dir.path / "plain.csv", "row,value\n0,1.5\n1,2\n");
  const Sketch plain = read_sketch_csv(dir.path / "plain.csv");
  EXPECT_EQ(plain.provenance, 0u);
  EXPECT_EQ(plain.values.size(), 2);
}

TEST(SignalCsv, RoundTripAndErrors) {
  TempDir dir("signal");
  Vector x(4);
  x << 1.0 / 3.0, 0, -2, 1e-17;
  write_signal_csv(dir.path / "x.csv", x);
  EXPECT_EQ(read_signal_csv(dir.path / "x.csv"), x);
  write_text(dir.path / "gap.csv", "index,value\n0,1\n2,1\n");
  EXPECT_THROW(read_signal_csv(dir.path / "gap.csv"), ParameterError);
  write_text(dir.path / "junk.csv", "index,value\n0,abc\n");
  EXPECT_THROW(read_signal_csv(dir.path / "junk.csv"), ParameterError);
  write_text(dir.path / "nocomma.csv", "index,value\n0 1\n");
  EXPECT_THROW(read_signal_csv(dir.path / "nocomma.csv"), ParameterError);
}

TEST(Measurement, SaveLoadRoundTripAndTamperDetection) {
  TempDir dir("hhs");
  const auto hm = build_measurement(16, 2, 21);
  const auto manifest = dir.path / "m.json";
  save_measurement(manifest, hm);
  const auto back = load_measurement(manifest);
  EXPECT_EQ(back.identification, hm.identification);
  EXPECT_EQ(back.estimation, hm.estimation);
  EXPECT_EQ(back.truncated, hm.truncated);
  EXPECT_EQ(back.K, hm.K);
  ASSERT_EQ(back.blocks.size(), hm.blocks.size());
  for (std::size_t b = 0; b < hm.blocks.size(); ++b) {
    EXPECT_EQ(back.blocks[b].row_offset, hm.blocks[b].row_offset);
    EXPECT_EQ(back.blocks[b].sifting, hm.blocks[b].sifting);
  }
  Vector x = Vector::Zero(16);
  x(4) = 3.0;
  EXPECT_EQ(encode(back, x), encode(hm, x));

  Json j = read_json(manifest);
  j["identification_fingerprint"] = j["identification_fingerprint"].get<std::uint64_t>() + 1;
  write_json(manifest, j);
  EXPECT_THROW(load_measurement(manifest), ParameterError);

  write_json(dir.path / "other.json", Json{{"format", "graph"}});
  EXPECT_THROW(load_measurement(dir.path / "other.json"), ParameterError);
}
