#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cppdd/harness.hpp"
#include "cppdd/wire.hpp"

using namespace cppdd;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("cppdd_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("experiment config parsing") {
  auto cfg = harness::parse_experiment_config(
      R"({"experiment":"correctness","n_list":[1,2],"dim":8,"trials":3,"seed":42})");
  CHECK(cfg.experiment == "correctness");
  CHECK(cfg.n_list == std::vector<std::uint32_t>{1, 2});
  CHECK(cfg.dim == 8);
  CHECK(cfg.trials == 3);
  CHECK(cfg.seed == 42);
  CHECK(cfg.tau == 3);
  CHECK_FALSE(cfg.broadcast_lo);

  CHECK_THROWS_AS(harness::parse_experiment_config(R"({"experiment":"bogus"})"), UsageError);
  CHECK_THROWS_AS(
      harness::parse_experiment_config(R"({"experiment":"detection","wat":1})"), UsageError);
  CHECK_THROWS_AS(
      harness::parse_experiment_config(R"({"experiment":"detection","n_list":[]})"), UsageError);
}

TEST_CASE("CPPDD_SEED overrides the configured seed") {
  setenv("CPPDD_SEED", "777", 1);
  auto cfg = harness::parse_experiment_config(R"({"experiment":"correctness","seed":42})");
  CHECK(cfg.seed == 777);
  unsetenv("CPPDD_SEED");
  auto cfg2 = harness::parse_experiment_config(R"({"experiment":"correctness","seed":42})");
  CHECK(cfg2.seed == 42);
}

TEST_CASE("synthetic payloads are deterministic in the seed") {
  FixedPointCodec codec(20);
  auto a = harness::load_payloads("synthetic", 4, 6, codec, 9);
  auto b = harness::load_payloads("synthetic", 4, 6, codec, 9);
  auto c = harness::load_payloads("synthetic", 4, 6, codec, 10);
  REQUIRE(a.records.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.records[i].uuid == b.records[i].uuid);
    CHECK(a.records[i].payload == b.records[i].payload);
  }
  CHECK(a.records[0].payload != c.records[0].payload);
  // encoded values stay inside the scaled range
  for (const auto& rec : a.records) {
    for (const auto& e : rec.payload) CHECK(e.value() <= (std::uint64_t{1} << 20));
  }
}

TEST_CASE("csv ingestion validates shape and range") {
  auto dir = temp_dir("csv");
  FixedPointCodec codec(20);

  {
    std::ofstream out(dir / "good.csv");
    out << "0.25,0.5\n1.0,0.0\n0.125,0.75\n";
  }
  auto cci = harness::load_payloads((dir / "good.csv").string(), 3, 2, codec, 1);
  REQUIRE(cci.records.size() == 3);
  CHECK(cci.records[0].payload == FieldVector::from_values({262144, 524288}));

  {
    std::ofstream out(dir / "short.csv");
    out << "0.25,0.5\n";
  }
  CHECK_THROWS_AS(harness::load_payloads((dir / "short.csv").string(), 3, 2, codec, 1),
                  IngestError);

  {
    std::ofstream out(dir / "wide.csv");
    out << "0.25,0.5,0.75\n";
  }
  CHECK_THROWS_AS(harness::load_payloads((dir / "wide.csv").string(), 1, 2, codec, 1),
                  IngestError);

  {
    std::ofstream out(dir / "range.csv");
    out << "0.25,1.5\n";
  }
  CHECK_THROWS_AS(harness::load_payloads((dir / "range.csv").string(), 1, 2, codec, 1),
                  IngestError);

  {
    std::ofstream out(dir / "garbage.csv");
    out << "0.25,zebra\n";
  }
  CHECK_THROWS_AS(harness::load_payloads((dir / "garbage.csv").string(), 1, 2, codec, 1),
                  IngestError);

  CHECK_THROWS_AS(harness::load_payloads((dir / "missing.csv").string(), 1, 2, codec, 1),
                  IngestError);
  fs::remove_all(dir);
}

TEST_CASE("linear_r2 on exact and noisy lines") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{2, 4, 6, 8, 10};
  CHECK(harness::linear_r2(x, y) == doctest::Approx(1.0));
  std::vector<double> noisy{2.1, 3.9, 6.2, 7.8, 10.1};
  CHECK(harness::linear_r2(x, noisy) > 0.99);
  std::vector<double> flat{3, 3, 3, 3, 3};
  CHECK(harness::linear_r2(x, flat) == doctest::Approx(1.0));
  CHECK_THROWS_AS(harness::linear_r2({1}, {2}), UsageError);
}

TEST_CASE("correctness experiment end to end, small sizes") {
  harness::ExperimentConfig cfg;
  cfg.experiment = "correctness";
  cfg.n_list = {1, 3};
  cfg.dim = 4;
  cfg.trials = 2;
  cfg.seed = 5;
  auto rows = harness::run_correctness(cfg);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) CHECK(r.ok());
}

TEST_CASE("detection experiment flags every tamper trial and no control") {
  harness::ExperimentConfig cfg;
  cfg.experiment = "detection";
  cfg.n_list = {4};
  cfg.dim = 3;
  cfg.trials = 10;
  cfg.seed = 6;
  auto rows = harness::run_detection(cfg);
  REQUIRE(rows.size() == 20);
  for (const auto& r : rows) {
    if (r.tamper_position != 0) {
      CHECK(r.detected);
      CHECK_FALSE(r.detector.empty());
    } else {
      CHECK_FALSE(r.detected);
    }
  }
}

TEST_CASE("accounting experiment matches the closed-form op counts") {
  harness::ExperimentConfig cfg;
  cfg.experiment = "accounting";
  cfg.n_list = {2, 5};
  cfg.dim = 8;
  cfg.seed = 7;
  auto rows = harness::run_accounting(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.obfuscate == 2ULL * r.n * r.d);
    CHECK(r.deobfuscate >= 2ULL * r.n * r.d);  // plus one inverse per client
    CHECK(r.ratio >= 1.0);
    CHECK(r.ratio <= 2.0);
    CHECK(r.bytes_per_link == 45 + 8ULL * r.d);
  }
}

TEST_CASE("recovery experiment error stays under the quantization step") {
  harness::ExperimentConfig cfg;
  cfg.experiment = "recovery";
  cfg.n_list = {3};
  cfg.dim = 16;
  cfg.seed = 8;
  auto rows = harness::run_recovery(cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.max_abs_error <= 1.0 / (1 << 20));
    CHECK(r.mean_abs_error <= r.max_abs_error);
  }
}

TEST_CASE("run_experiment writes csv and returns 0") {
  auto dir = temp_dir("exp");
  harness::ExperimentConfig cfg;
  cfg.experiment = "correctness";
  cfg.n_list = {2};
  cfg.dim = 2;
  cfg.trials = 1;
  cfg.seed = 9;
  CHECK(harness::run_experiment(cfg, dir.string()) == 0);
  CHECK(fs::exists(dir / "correctness.csv"));
  fs::remove_all(dir);
}

TEST_CASE("run_setup writes a parseable packet and envelopes") {
  auto dir = temp_dir("setup");
  CHECK(harness::run_setup(R"({"n_clients":3,"dim":4,"seed":11})", dir.string()) == 0);
  REQUIRE(fs::exists(dir / "packet.bin"));
  std::ifstream in(dir / "packet.bin", std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  auto packet = parse_packet(bytes);
  CHECK(packet.params.n_clients == 3);
  CHECK(packet.params.dim == 4);
  for (int i = 1; i <= 3; ++i)
    CHECK(fs::exists(dir / ("envelope_" + std::to_string(i) + ".bin")));
  fs::remove_all(dir);
}
