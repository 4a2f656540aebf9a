#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cppdd/field.hpp"
#include "cppdd/hash.hpp"
#include "cppdd/opcode.hpp"

namespace cppdd {

using Uuid = std::array<std::uint8_t, 16>;

std::string uuid_hex(const Uuid& u);

/// Per-client affine mask: O = lambda * D + r, lambda in F_p^x.
struct ObfuscationKey {
  FieldElement lambda;
  FieldVector r;

  ObfuscationKey(FieldElement lambda_, FieldVector r_) : lambda(lambda_), r(std::move(r_)) {
    if (lambda.is_zero()) throw UsageError("obfuscation lambda must be nonzero");
  }
};

/// Per-client blinding layer key, bound to the op it is used with.
struct ConsensusKey {
  FieldVector k;
  OpCode bound_op;

  ConsensusKey(FieldVector k_, OpCode op) : k(std::move(k_)), bound_op(op) {
    if (is_multiplicative(op)) {
      for (const auto& e : k) {
        if (e.is_zero()) throw UsageError("multiplicative consensus key has zero element");
      }
    }
  }
};

struct StepChecksum {
  std::uint32_t index = 0;  // 1..N
  Digest32 digest{};
};

/// Final per-dimension recovery indicator; every ratio is 1 in honest runs.
struct DataChecksum {
  std::vector<FieldElement> ratios;
  FieldElement sum_check;

  bool all_ones(std::size_t d) const;
};

/// ratios_d = O_sum_d / L_final_d; zero denominators fall back to direct equality
/// (1 when both sides are zero, 0 otherwise).
DataChecksum data_checksum(const FieldVector& o_sum, const FieldVector& l_final);

struct CciRecord {
  Uuid uuid{};
  FieldVector payload;
};

struct CciMatrix {
  std::vector<CciRecord> records;
};

/// Priority -> uuid bijection; index i holds the uuid with priority i+1.
struct PriorityMap {
  std::vector<Uuid> order;

  std::size_t size() const { return order.size(); }
  const Uuid& uuid_for_priority(std::uint32_t priority) const {
    if (priority == 0 || priority > order.size()) throw UsageError("priority out of range");
    return order[priority - 1];
  }
  void validate() const;  // throws SetupError on duplicates
};

struct ProtocolParams {
  std::uint32_t n_clients = 0;
  std::uint32_t dim = 0;
  std::uint64_t modulus = kDefaultModulus;
  std::uint32_t scale_bits = 20;
  std::uint32_t tau = 3;
  bool broadcast_lo = false;
  bool hash_full_vector = false;
};

/// Public setup output: everything the coordinator broadcasts before retiring.
struct BroadcastPacket {
  FieldVector locked;                     // L_C
  std::vector<StepChecksum> sigma_s;      // indexed 1..N
  PriorityMap priorities;
  std::vector<Digest32> commitments;      // ordered by priority
  ProtocolParams params;
  std::vector<FieldVector> obfuscated;    // L_O, only when params.broadcast_lo
};

/// Private per-client setup material. The constructor checks O = lambda*D + r
/// against the payload it came from; the payload itself is not retained.
struct ClientEnvelope {
  std::uint32_t priority = 0;
  OpCode theta = OpCode::Add;
  ConsensusKey consensus;
  ObfuscationKey obf;
  FieldVector masked;  // O_i
  Salt16 salt{};
  MacKey recv_key{};   // link from predecessor (unused at priority 1)
  MacKey send_key{};   // link to successor (unused at priority N)
  MacKey board_key{};  // authenticates bulletin-board posts

  ClientEnvelope(std::uint32_t priority_, OpCode theta_, ConsensusKey consensus_,
                 ObfuscationKey obf_, FieldVector masked_, const FieldVector& payload,
                 Salt16 salt_, MacKey recv, MacKey send, MacKey board);

  /// Deserialization path: fields taken as-is, no payload to check against.
  struct Unchecked {};
  ClientEnvelope(Unchecked, std::uint32_t priority_, OpCode theta_, ConsensusKey consensus_,
                 ObfuscationKey obf_, FieldVector masked_, Salt16 salt_, MacKey recv,
                 MacKey send, MacKey board);
};

/// Current aggregate with relay provenance.
struct ChainState {
  FieldVector state;
  std::uint32_t position = 0;  // decryption layers applied so far
  std::uint32_t producer = 0;  // 0 = coordinator/packet
  std::uint32_t round = 0;
};

enum class AbortReason : std::uint8_t {
  ChecksumMismatch = 0,
  AuthFailure = 1,
  Timeout = 2,
  DataChecksumFailure = 3,
};

std::string_view abort_reason_name(AbortReason r);

/// Issuer 0 denotes board-side verification.
struct AbortNotice {
  std::uint32_t issuer = 0;
  std::uint32_t failed_step = 0;
  AbortReason reason = AbortReason::ChecksumMismatch;
  Digest32 expected{};
  Digest32 recomputed{};
};

}  // namespace cppdd
