#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace cppdd {

/// Protocol phases attributed when counting logical field operations.
enum class Phase : int {
  Obfuscate = 0,
  Aggregate,
  Encrypt,
  Decrypt,
  Deobfuscate,
  Verify,
  Other,
};

inline constexpr int kNumPhases = 7;

inline std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Obfuscate: return "obfuscate";
    case Phase::Aggregate: return "aggregate";
    case Phase::Encrypt: return "encrypt";
    case Phase::Decrypt: return "decrypt";
    case Phase::Deobfuscate: return "deobfuscate";
    case Phase::Verify: return "verify";
    case Phase::Other: return "other";
  }
  return "?";
}

struct PhaseCounters {
  std::uint64_t adds = 0;   // additions and subtractions
  std::uint64_t muls = 0;
  std::uint64_t invs = 0;

  std::uint64_t total() const { return adds + muls + invs; }
};

/// Logical field-op and byte counters for one run. Field arithmetic reports into
/// the active OpCounters (if any) under the phase set by the enclosing CountScope.
struct OpCounters {
  std::array<PhaseCounters, kNumPhases> by_phase{};
  std::uint64_t bytes_total = 0;
  std::uint64_t bytes_relay_link = 0;  // size of one RELAY_STATE message

  PhaseCounters& phase(Phase p) { return by_phase[static_cast<int>(p)]; }
  const PhaseCounters& phase(Phase p) const { return by_phase[static_cast<int>(p)]; }

  /// Ops in the aggregation pipeline; the accounting reports compare this to 4*n*d.
  std::uint64_t pipeline_total() const {
    return phase(Phase::Obfuscate).total() + phase(Phase::Aggregate).total() +
           phase(Phase::Encrypt).total() + phase(Phase::Decrypt).total() +
           phase(Phase::Deobfuscate).total();
  }
  std::uint64_t grand_total() const {
    std::uint64_t t = 0;
    for (const auto& pc : by_phase) t += pc.total();
    return t;
  }
};

namespace detail {
inline thread_local OpCounters* tl_counters = nullptr;
inline thread_local Phase tl_phase = Phase::Other;

inline void count_add() {
  if (tl_counters) ++tl_counters->phase(tl_phase).adds;
}
inline void count_mul() {
  if (tl_counters) ++tl_counters->phase(tl_phase).muls;
}
inline void count_inv() {
  if (tl_counters) ++tl_counters->phase(tl_phase).invs;
}
}  // namespace detail

/// RAII activation of op counting for the current thread.
class CountScope {
 public:
  CountScope(OpCounters& counters, Phase phase)
      : prev_counters_(detail::tl_counters), prev_phase_(detail::tl_phase) {
    detail::tl_counters = &counters;
    detail::tl_phase = phase;
  }
  ~CountScope() {
    detail::tl_counters = prev_counters_;
    detail::tl_phase = prev_phase_;
  }
  CountScope(const CountScope&) = delete;
  CountScope& operator=(const CountScope&) = delete;

 private:
  OpCounters* prev_counters_;
  Phase prev_phase_;
};

/// Re-attributes subsequent ops to another phase; no-op when counting is off.
class PhaseScope {
 public:
  explicit PhaseScope(Phase phase) : prev_(detail::tl_phase) { detail::tl_phase = phase; }
  ~PhaseScope() { detail::tl_phase = prev_; }
  PhaseScope(const PhaseScope&) = delete;
  PhaseScope& operator=(const PhaseScope&) = delete;

 private:
  Phase prev_;
};

}  // namespace cppdd
