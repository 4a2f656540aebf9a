#pragma once

#include <string>
#include <vector>

#include "cppdd/codec.hpp"
#include "cppdd/coordinator.hpp"
#include "cppdd/simnet.hpp"

namespace cppdd::harness {

struct ExperimentConfig {
  std::string experiment;  // correctness | detection | scalability | recovery | accounting
  std::vector<std::uint32_t> n_list{10};
  std::uint32_t dim = 784;
  std::uint32_t trials = 1;
  std::uint64_t seed = 1;
  std::string payload_source = "synthetic";  // "synthetic" or a CSV path
  std::uint32_t scale_bits = 20;
  std::uint32_t tau = 3;
  bool broadcast_lo = false;
  bool hash_full_vector = false;

  void validate() const;  // throws UsageError
};

/// Parses the JSON config document; unknown keys are rejected. The CPPDD_SEED
/// environment variable, when set, overrides the configured seed.
ExperimentConfig parse_experiment_config(const std::string& json_text);

/// Payload ingestion: CSV rows of exactly d values in [0,1], or synthetic
/// uniform draws. Synthetic payloads are deterministic in the seed.
CciMatrix load_payloads(const std::string& source, std::uint32_t n, std::uint32_t d,
                        const FixedPointCodec& codec, std::uint64_t seed);

struct Instance {
  ProtocolParams params;
  CciMatrix cci;
  PriorityMap priorities;  // random permutation of the uuids
};

Instance make_instance(const ExperimentConfig& cfg, std::uint32_t n, std::uint64_t seed);

struct CorrectnessRow {
  std::uint32_t n = 0, d = 0, trial = 0;
  bool aggregate_ok = false;     // chain output equals sum of O_i
  bool rounds_ok = false;        // N+2 scheduler rounds
  bool data_checksum_ok = false; // sigma_D all ones, sum_check = D
  bool recovery_ok = false;      // field-exact payload recovery per client
  bool ok() const { return aggregate_ok && rounds_ok && data_checksum_ok && recovery_ok; }
};
std::vector<CorrectnessRow> run_correctness(const ExperimentConfig& cfg);

struct DetectionRow {
  std::uint32_t trial = 0;
  std::uint32_t tamper_position = 0;  // 0 = honest control trial
  bool detected = false;
  std::string detector;  // "client_<i>", "board", or "" when not detected
};
/// cfg.trials tamper trials (uniform position, sum-changing delta) plus
/// cfg.trials honest controls.
std::vector<DetectionRow> run_detection(const ExperimentConfig& cfg);

struct ScalabilityRow {
  std::uint32_t n = 0;
  double total_ms = 0;       // median of setup + online over trials
  double per_client_ms = 0;  // median relay-step time
  std::uint64_t bytes_per_link = 0;
  std::uint32_t rounds = 0;
};
std::vector<ScalabilityRow> run_scalability(const ExperimentConfig& cfg);

struct AccountingRow {
  std::uint32_t n = 0, d = 0;
  std::uint64_t obfuscate = 0, aggregate = 0, encrypt = 0, decrypt = 0, deobfuscate = 0,
                verify = 0;
  std::uint64_t pipeline_total = 0;
  std::uint64_t reference_4nd = 0;
  double ratio = 0;
  std::uint64_t bytes_per_link = 0;
};
std::vector<AccountingRow> run_accounting(const ExperimentConfig& cfg);

struct RecoveryRow {
  std::uint32_t client = 0;
  double max_abs_error = 0;
  double mean_abs_error = 0;
};
/// Full pipeline on n_list[0] clients; per-client reconstruction error after
/// decoding. `value_dump`, when given, receives "client,dim,original,recovered"
/// lines for side-by-side inspection.
std::vector<RecoveryRow> run_recovery(const ExperimentConfig& cfg,
                                      std::vector<std::string>* value_dump = nullptr);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_r2(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the named experiment, writes CSV into out_dir, and evaluates the
/// experiment's own assertions. Returns 0 on success, 2 on assertion failure.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// `cppdd setup`: runs coordinator setup from a JSON config and writes
/// packet.bin plus envelope_<i>.bin into out_dir.
int run_setup(const std::string& json_text, const std::string& out_dir);

}  // namespace cppdd::harness
