#include "cppdd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "cppdd/hash.hpp"
#include "cppdd/wire.hpp"

#include "json.hpp"

namespace cppdd::harness {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::uint64_t env_seed_override(std::uint64_t fallback) {
  const char* s = std::getenv("CPPDD_SEED");
  if (!s || !*s) return fallback;
  return std::strtoull(s, nullptr, 10);
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open output file: " + path.string());
  for (const auto& l : lines) out << l << '\n';
}

ProtocolParams params_from(const ExperimentConfig& cfg, std::uint32_t n) {
  return ProtocolParams{.n_clients = n,
                        .dim = cfg.dim,
                        .modulus = kDefaultModulus,
                        .scale_bits = cfg.scale_bits,
                        .tau = cfg.tau,
                        .broadcast_lo = cfg.broadcast_lo,
                        .hash_full_vector = cfg.hash_full_vector};
}

/// Payload of the priority-i client (1-based), looked up through the bijection.
const FieldVector& payload_for_priority(const Instance& inst, std::uint32_t priority) {
  const Uuid& uuid = inst.priorities.uuid_for_priority(priority);
  for (const auto& rec : inst.cci.records) {
    if (rec.uuid == uuid) return rec.payload;
  }
  throw UsageError("priority has no payload");
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kNames{"correctness", "detection", "scalability",
                                              "recovery", "accounting"};
  if (std::find(kNames.begin(), kNames.end(), experiment) == kNames.end())
    throw UsageError("unknown experiment: " + experiment);
  if (n_list.empty()) throw UsageError("n_list must not be empty");
  for (auto n : n_list) {
    if (n < 1) throw UsageError("client counts must be >= 1");
  }
  if (dim < 1) throw UsageError("dim must be >= 1");
  if (trials < 1) throw UsageError("trials must be >= 1");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") cfg.experiment = value.get<std::string>();
    else if (key == "n_list") cfg.n_list = value.get<std::vector<std::uint32_t>>();
    else if (key == "dim") cfg.dim = value.get<std::uint32_t>();
    else if (key == "trials") cfg.trials = value.get<std::uint32_t>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "payload_source") cfg.payload_source = value.get<std::string>();
    else if (key == "scale_bits") cfg.scale_bits = value.get<std::uint32_t>();
    else if (key == "tau") cfg.tau = value.get<std::uint32_t>();
    else if (key == "broadcast_lo") cfg.broadcast_lo = value.get<bool>();
    else if (key == "hash_full_vector") cfg.hash_full_vector = value.get<bool>();
    else throw UsageError("unknown config key: " + key);
  }
  cfg.seed = env_seed_override(cfg.seed);
  cfg.validate();
  return cfg;
}

CciMatrix load_payloads(const std::string& source, std::uint32_t n, std::uint32_t d,
                        const FixedPointCodec& codec, std::uint64_t seed) {
  Sha3CtrRng uuid_rng(seed, "cppdd/uuid");
  CciMatrix cci;
  cci.records.reserve(n);

  if (source == "synthetic") {
    Sha3CtrRng data_rng(seed, "cppdd/payload");
    for (std::uint32_t i = 0; i < n; ++i) {
      std::vector<double> row(d);
      for (auto& x : row)
        x = static_cast<double>(data_rng.next_u64()) / 18446744073709551616.0;  // 2^64
      cci.records.push_back(
          CciRecord{.uuid = uuid_rng.next_bytes16(), .payload = codec.encode_vector(row)});
    }
    return cci;
  }

  std::ifstream in(source);
  if (!in) throw IngestError("cannot open payload file: " + source);
  std::string line;
  std::uint32_t row_no = 0;
  while (cci.records.size() < n && std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IngestError("row " + std::to_string(row_no) + ": malformed value '" + cell + "'");
      }
    }
    if (row.size() != d)
      throw IngestError("row " + std::to_string(row_no) + ": expected " + std::to_string(d) +
                        " columns, got " + std::to_string(row.size()));
    for (double x : row) {
      if (!(x >= 0.0 && x <= 1.0))
        throw IngestError("row " + std::to_string(row_no) + ": value outside [0,1]");
    }
    cci.records.push_back(
        CciRecord{.uuid = uuid_rng.next_bytes16(), .payload = codec.encode_vector(row)});
  }
  if (cci.records.size() < n)
    throw IngestError("payload file has fewer than " + std::to_string(n) + " rows");
  return cci;
}

Instance make_instance(const ExperimentConfig& cfg, std::uint32_t n, std::uint64_t seed) {
  Instance inst;
  inst.params = params_from(cfg, n);
  FixedPointCodec codec(cfg.scale_bits, inst.params.modulus);
  inst.cci = load_payloads(cfg.payload_source, n, cfg.dim, codec, seed);

  inst.priorities.order.reserve(n);
  for (const auto& rec : inst.cci.records) inst.priorities.order.push_back(rec.uuid);
  Sha3CtrRng perm_rng(seed, "cppdd/priority");
  for (std::uint32_t i = n; i > 1; --i)
    std::swap(inst.priorities.order[i - 1], inst.priorities.order[perm_rng.next_below(i)]);
  return inst;
}

std::vector<CorrectnessRow> run_correctness(const ExperimentConfig& cfg) {
  std::vector<CorrectnessRow> rows;
  Simulation sim;
  for (std::uint32_t n : cfg.n_list) {
    for (std::uint32_t trial = 0; trial < cfg.trials; ++trial) {
      const std::uint64_t seed = cfg.seed + trial * 1000003ULL + n;
      Instance inst = make_instance(cfg, n, seed);
      auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, seed,
                                      /*audit=*/true);
      auto t = sim.run(setup, FaultPlan{});

      CorrectnessRow row{.n = n, .d = cfg.dim, .trial = trial};
      if (t.outcome == RunOutcome::Success && t.released.has_value()) {
        row.aggregate_ok = *t.released == setup.audit->front();  // L^(N) == sum O_i
        row.rounds_ok = t.rounds_used == n + 2;
        FieldVector o_sum = FieldVector::zeros(cfg.dim, inst.params.modulus);
        for (const auto& env : setup.envelopes) vec_accumulate(o_sum, env.masked);
        row.data_checksum_ok = data_checksum(o_sum, *t.released).all_ones(cfg.dim);
        row.recovery_ok = t.recovered.size() == n;
        for (std::uint32_t i = 1; i <= n && row.recovery_ok; ++i) {
          if (t.recovered[i - 1] != payload_for_priority(inst, i)) row.recovery_ok = false;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<DetectionRow> run_detection(const ExperimentConfig& cfg) {
  std::vector<DetectionRow> rows;
  Simulation sim(SimConfig{.timeout_ticks = 10, .collect_recovered = false});
  Sha3CtrRng pick_rng(cfg.seed, "cppdd/detect");
  const std::uint32_t n = cfg.n_list.front();

  for (std::uint32_t trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t seed = cfg.seed + trial * 7919ULL;
    Instance inst = make_instance(cfg, n, seed);
    auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, seed);

    const std::uint32_t pos = 1 + static_cast<std::uint32_t>(pick_rng.next_below(n));
    std::vector<std::uint64_t> delta(cfg.dim, 0);
    delta[0] = 1 + pick_rng.next_below(inst.params.modulus - 1);  // sum-changing
    FaultPlan plan;
    plan.by_priority[pos] = ClientFault{.behavior = Behavior::TamperState, .delta = delta};

    auto t = sim.run(setup, plan);
    DetectionRow row{.trial = trial, .tamper_position = pos};
    row.detected = t.outcome == RunOutcome::Aborted;
    if (row.detected)
      row.detector = t.notice->issuer == 0 ? "board"
                                           : "client_" + std::to_string(t.notice->issuer);
    rows.push_back(row);
  }

  // honest controls
  for (std::uint32_t trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t seed = cfg.seed + 500009ULL + trial * 7919ULL;
    Instance inst = make_instance(cfg, n, seed);
    auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, seed);
    auto t = sim.run(setup, FaultPlan{});
    rows.push_back(DetectionRow{.trial = cfg.trials + trial,
                                .tamper_position = 0,
                                .detected = t.outcome == RunOutcome::Aborted,
                                .detector = ""});
  }
  return rows;
}

std::vector<ScalabilityRow> run_scalability(const ExperimentConfig& cfg) {
  Simulation sim(SimConfig{.timeout_ticks = 10, .collect_recovered = false});

  struct Acc {
    std::vector<double> totals;
    std::vector<double> trial_step_medians;
    std::uint64_t bytes_link = 0;
    std::uint32_t rounds = 0;
  };
  std::vector<Acc> accs(cfg.n_list.size());

  // warm-up pass, untimed: stabilizes caches and clocking before measurement
  {
    Instance inst = make_instance(cfg, cfg.n_list.front(), cfg.seed);
    auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, cfg.seed);
    (void)sim.run(setup, FaultPlan{});
  }

  // trials are interleaved across n so slow machine periods hit every size alike
  for (std::uint32_t trial = 0; trial < cfg.trials; ++trial) {
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
      const std::uint32_t n = cfg.n_list[i];
      const std::uint64_t seed = cfg.seed + trial * 104729ULL + n;
      Instance inst = make_instance(cfg, n, seed);
      const auto t0 = Clock::now();
      auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, seed);
      const double setup_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      auto t = sim.run(setup, FaultPlan{});
      accs[i].totals.push_back(setup_ms + t.run_ms);
      accs[i].trial_step_medians.push_back(median(t.step_ms));
      accs[i].bytes_link = t.counters.bytes_relay_link;
      accs[i].rounds = t.rounds_used;
    }
  }

  std::vector<ScalabilityRow> rows;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    // per trial: median step time; across trials: the minimum, which is the
    // least interference-inflated estimate of the fixed per-step cost
    const auto& meds = accs[i].trial_step_medians;
    rows.push_back(ScalabilityRow{.n = cfg.n_list[i],
                                  .total_ms = median(accs[i].totals),
                                  .per_client_ms =
                                      *std::min_element(meds.begin(), meds.end()),
                                  .bytes_per_link = accs[i].bytes_link,
                                  .rounds = accs[i].rounds});
  }
  return rows;
}

std::vector<AccountingRow> run_accounting(const ExperimentConfig& cfg) {
  std::vector<AccountingRow> rows;
  Simulation sim(SimConfig{.timeout_ticks = 10, .collect_recovered = true});
  for (std::uint32_t n : cfg.n_list) {
    const std::uint64_t seed = cfg.seed + n;
    Instance inst = make_instance(cfg, n, seed);
    OpCounters counters;
    {
      CountScope scope(counters, Phase::Other);
      auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, seed);
      (void)sim.run(setup, FaultPlan{}, &counters);
    }
    AccountingRow row{.n = n, .d = cfg.dim};
    row.obfuscate = counters.phase(Phase::Obfuscate).total();
    row.aggregate = counters.phase(Phase::Aggregate).total();
    row.encrypt = counters.phase(Phase::Encrypt).total();
    row.decrypt = counters.phase(Phase::Decrypt).total();
    row.deobfuscate = counters.phase(Phase::Deobfuscate).total();
    row.verify = counters.phase(Phase::Verify).total();
    row.pipeline_total = counters.pipeline_total();
    row.reference_4nd = 4ULL * n * cfg.dim;
    row.ratio = static_cast<double>(row.pipeline_total) / static_cast<double>(row.reference_4nd);
    row.bytes_per_link = counters.bytes_relay_link;
    rows.push_back(row);
  }
  return rows;
}

std::vector<RecoveryRow> run_recovery(const ExperimentConfig& cfg,
                                      std::vector<std::string>* value_dump) {
  const std::uint32_t n = cfg.n_list.front();
  Instance inst = make_instance(cfg, n, cfg.seed);
  auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, cfg.seed);
  Simulation sim;
  auto t = sim.run(setup, FaultPlan{});

  std::vector<RecoveryRow> rows;
  if (t.outcome != RunOutcome::Success) return rows;  // all-or-nothing: no rows on abort

  FixedPointCodec codec(cfg.scale_bits, inst.params.modulus);
  for (std::uint32_t i = 1; i <= n; ++i) {
    const FieldVector& original = payload_for_priority(inst, i);
    const FieldVector& recovered = t.recovered[i - 1];
    double max_err = 0, sum_err = 0;
    for (std::size_t d = 0; d < original.size(); ++d) {
      const double o = codec.decode(original[d]);
      const double r = codec.decode(recovered[d]);
      const double err = std::abs(o - r);
      max_err = std::max(max_err, err);
      sum_err += err;
      if (value_dump && d < 8) {
        value_dump->push_back(std::to_string(i) + "," + std::to_string(d) + "," +
                              std::to_string(o) + "," + std::to_string(r));
      }
    }
    rows.push_back(RecoveryRow{.client = i,
                               .max_abs_error = max_err,
                               .mean_abs_error = sum_err / original.size()});
  }
  return rows;
}

double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("linear_r2 needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 1.0;
  const double slope = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit = my + slope * (x[i] - mx);
    ss_res += (y[i] - fit) * (y[i] - fit);
  }
  return 1.0 - ss_res / syy;
}

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  bool ok = true;

  if (cfg.experiment == "correctness") {
    auto rows = run_correctness(cfg);
    std::vector<std::string> lines{"n,d,trial,aggregate_ok,rounds_ok,data_checksum_ok,recovery_ok"};
    for (const auto& r : rows) {
      lines.push_back(std::to_string(r.n) + "," + std::to_string(r.d) + "," +
                      std::to_string(r.trial) + "," + std::to_string(r.aggregate_ok) + "," +
                      std::to_string(r.rounds_ok) + "," + std::to_string(r.data_checksum_ok) +
                      "," + std::to_string(r.recovery_ok));
      ok = ok && r.ok();
    }
    write_lines(fs::path(out_dir) / "correctness.csv", lines);
  } else if (cfg.experiment == "detection") {
    auto rows = run_detection(cfg);
    std::vector<std::string> lines{"trial,tamper_position,detected,detector"};
    for (const auto& r : rows) {
      lines.push_back(std::to_string(r.trial) + "," + std::to_string(r.tamper_position) + "," +
                      std::to_string(r.detected) + "," + r.detector);
      const bool expect_detect = r.tamper_position != 0;
      ok = ok && (r.detected == expect_detect);
    }
    write_lines(fs::path(out_dir) / "detection.csv", lines);
  } else if (cfg.experiment == "scalability") {
    auto rows = run_scalability(cfg);
    std::vector<std::string> lines{"n,total_ms,per_client_ms,bytes_per_link,rounds"};
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      lines.push_back(std::to_string(r.n) + "," + std::to_string(r.total_ms) + "," +
                      std::to_string(r.per_client_ms) + "," +
                      std::to_string(r.bytes_per_link) + "," + std::to_string(r.rounds));
      xs.push_back(r.n);
      ys.push_back(r.total_ms);
      ok = ok && r.rounds == r.n + 2;
    }
    if (rows.size() >= 2) ok = ok && linear_r2(xs, ys) >= 0.98;
    write_lines(fs::path(out_dir) / "scalability.csv", lines);
  } else if (cfg.experiment == "accounting") {
    auto rows = run_accounting(cfg);
    std::vector<std::string> lines{
        "n,d,obfuscate,aggregate,encrypt,decrypt,deobfuscate,verify,pipeline_total,"
        "reference_4nd,ratio,bytes_per_link"};
    for (const auto& r : rows) {
      std::ostringstream os;
      os << r.n << ',' << r.d << ',' << r.obfuscate << ',' << r.aggregate << ',' << r.encrypt
         << ',' << r.decrypt << ',' << r.deobfuscate << ',' << r.verify << ','
         << r.pipeline_total << ',' << r.reference_4nd << ',' << r.ratio << ','
         << r.bytes_per_link;
      lines.push_back(os.str());
      ok = ok && r.obfuscate == 2ULL * r.n * r.d;
      ok = ok && r.ratio >= 1.0 && r.ratio <= 2.0;
    }
    write_lines(fs::path(out_dir) / "accounting.csv", lines);
  } else if (cfg.experiment == "recovery") {
    std::vector<std::string> dump{"client,dim,original,recovered"};
    auto rows = run_recovery(cfg, &dump);
    std::vector<std::string> lines{"client,max_abs_error,mean_abs_error"};
    const double bound = 1.0 / static_cast<double>(std::uint64_t{1} << cfg.scale_bits);
    ok = !rows.empty();
    for (const auto& r : rows) {
      lines.push_back(std::to_string(r.client) + "," + std::to_string(r.max_abs_error) + "," +
                      std::to_string(r.mean_abs_error));
      ok = ok && r.max_abs_error <= bound;
    }
    write_lines(fs::path(out_dir) / "recovery.csv", lines);
    write_lines(fs::path(out_dir) / "recovery_values.csv", dump);
  } else {
    throw UsageError("unknown experiment: " + cfg.experiment);
  }

  std::cout << "experiment " << cfg.experiment << ": " << (ok ? "ok" : "FAILED") << '\n';
  return ok ? 0 : 2;
}

int run_setup(const std::string& json_text, const std::string& out_dir) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ProtocolParams params;
  std::uint64_t seed = 1;
  std::string payload_source = "synthetic";
  for (const auto& [key, value] : j.items()) {
    if (key == "n_clients") params.n_clients = value.get<std::uint32_t>();
    else if (key == "dim") params.dim = value.get<std::uint32_t>();
    else if (key == "seed") seed = value.get<std::uint64_t>();
    else if (key == "scale_bits") params.scale_bits = value.get<std::uint32_t>();
    else if (key == "tau") params.tau = value.get<std::uint32_t>();
    else if (key == "broadcast_lo") params.broadcast_lo = value.get<bool>();
    else if (key == "hash_full_vector") params.hash_full_vector = value.get<bool>();
    else if (key == "payload_source") payload_source = value.get<std::string>();
    else throw UsageError("unknown config key: " + key);
  }
  if (params.n_clients < 1 || params.dim < 1)
    throw UsageError("setup requires n_clients >= 1 and dim >= 1");
  seed = env_seed_override(seed);

  FixedPointCodec codec(params.scale_bits, params.modulus);
  CciMatrix cci = load_payloads(payload_source, params.n_clients, params.dim, codec, seed);
  PriorityMap priorities;
  for (const auto& rec : cci.records) priorities.order.push_back(rec.uuid);

  auto setup = coordinator::setup(params, cci, priorities, seed);

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "packet.bin", std::ios::binary);
    auto bytes = serialize_packet(setup.packet);
    out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
  for (std::uint32_t i = 1; i <= params.n_clients; ++i) {
    std::ofstream out(fs::path(out_dir) / ("envelope_" + std::to_string(i) + ".bin"),
                      std::ios::binary);
    auto bytes = serialize_envelope(setup.envelopes[i - 1], params.modulus);
    out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
  std::cout << "setup: wrote packet.bin and " << params.n_clients << " envelopes to "
            << out_dir << '\n';
  return 0;
}

}  // namespace cppdd::harness
