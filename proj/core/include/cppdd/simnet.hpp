#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cppdd/client.hpp"
#include "cppdd/coordinator.hpp"
#include "cppdd/counters.hpp"
#include "cppdd/wire.hpp"

namespace cppdd {

/// Adversarial or faulty behavior assigned to one client.
enum class Behavior : std::uint8_t {
  Honest = 0,
  TamperState,       // add delta to the outgoing state at target_step
  WrongKey,          // apply the layer with a fabricated key
  WrongOp,           // apply the complementary op instead of the assigned one
  Withhold,          // never emit the relay state (or release, at priority N)
  TransientCorrupt,  // flip wire bytes on the first `count` transmissions
  WithholdOpening,   // relay honestly but never post the commitment opening
};

std::string_view behavior_name(Behavior b);

struct ClientFault {
  Behavior behavior = Behavior::Honest;
  std::vector<std::uint64_t> delta;  // TamperState: added element-wise (mod p)
  std::uint32_t target_step = 0;     // TamperState: 0 = the client's own step
  std::uint32_t count = 0;           // TransientCorrupt: corrupted transmissions
};

/// Declarative description of the behaviors to inject per client.
struct FaultPlan {
  std::map<std::uint32_t, ClientFault> by_priority;
  std::uint64_t rng_seed = 0;  // drives fabricated keys for WrongKey

  const ClientFault& fault_for(std::uint32_t priority) const;
  std::vector<std::uint32_t> corrupted() const;
};

/// Append-only public broadcast channel.
class BulletinBoard {
 public:
  struct Entry {
    std::uint32_t round = 0;
    std::uint32_t author = 0;  // 0 = board/verifier
    MsgKind kind = MsgKind::Release;
    std::vector<std::uint8_t> body;
  };

  void append(Entry e) { entries_.push_back(std::move(e)); }
  const std::vector<Entry>& entries() const { return entries_; }
  bool has_abort() const;

 private:
  std::vector<Entry> entries_;
};

struct MessageRecord {
  std::uint32_t round = 0;
  MsgKind kind = MsgKind::RelayState;
  std::uint32_t sender = 0;
  std::uint32_t receiver = 0;
  std::uint64_t seq = 0;
  std::uint64_t bytes = 0;
  bool mac_ok = true;
  bool delivered = true;
};

enum class RunOutcome { Success, Aborted };

struct RunTranscript {
  RunOutcome outcome = RunOutcome::Success;
  std::optional<AbortNotice> notice;
  std::uint32_t rounds_used = 0;
  std::uint32_t total_retries = 0;
  std::vector<MessageRecord> log;
  OpCounters counters;

  // wall-clock (excluded from the deterministic export)
  double run_ms = 0.0;
  std::vector<double> step_ms;  // per relay step, honest steps only

  // audit: populated on success when collection is enabled
  std::optional<FieldVector> released;
  std::vector<FieldVector> recovered;  // by priority (index i -> priority i+1)
};

/// One JSON object per line: every message record, then a summary record.
/// Deterministic given (setup seed, plan, config); wall-clock fields excluded.
std::string export_transcript_jsonl(const RunTranscript& t);

/// Board-side verification after release: commitment openings, sigma_S at step
/// N over the released state, and the sigma_D data checksum.
std::optional<AbortNotice> board_verify(const BroadcastPacket& packet,
                                        const FieldVector& released,
                                        const std::vector<Opening>& openings);

struct SimConfig {
  std::uint32_t timeout_ticks = 10;  // per-round virtual-tick deadline
  bool collect_recovered = true;
};

/// Deterministic in-process execution of one protocol instance under a fault
/// plan. Round 0 delivers the packet and envelopes, rounds 1..N run the relay,
/// round N+1 runs release, openings, and board verification.
class Simulation {
 public:
  explicit Simulation(SimConfig config = {}) : config_(config) {}

  RunTranscript run(const SetupOutput& setup, const FaultPlan& plan,
                    OpCounters* external_counters = nullptr);

 private:
  SimConfig config_;
};

}  // namespace cppdd
