#include "cppdd/types.hpp"

#include <algorithm>
#include <set>

namespace cppdd {

std::string uuid_hex(const Uuid& u) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(32);
  for (auto b : u) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 0xf]);
  }
  return s;
}

bool DataChecksum::all_ones(std::size_t d) const {
  if (ratios.size() != d) return false;
  const std::uint64_t p = sum_check.modulus();
  for (const auto& r : ratios) {
    if (r != FieldElement::one(p)) return false;
  }
  return sum_check == FieldElement(d % p, p);
}

DataChecksum data_checksum(const FieldVector& o_sum, const FieldVector& l_final) {
  if (o_sum.size() != l_final.size()) throw UsageError("data checksum length mismatch");
  const std::uint64_t p = o_sum.modulus();
  DataChecksum out{.ratios = {}, .sum_check = FieldElement::zero(p)};
  out.ratios.reserve(o_sum.size());
  for (std::size_t d = 0; d < o_sum.size(); ++d) {
    FieldElement ratio = FieldElement::zero(p);
    if (l_final[d].is_zero()) {
      ratio = o_sum[d].is_zero() ? FieldElement::one(p) : FieldElement::zero(p);
    } else {
      ratio = o_sum[d] * l_final[d].inverse();
    }
    out.sum_check += ratio;
    out.ratios.push_back(ratio);
  }
  return out;
}

void PriorityMap::validate() const {
  std::set<Uuid> seen(order.begin(), order.end());
  if (seen.size() != order.size()) throw SetupError("duplicate uuid in priority map");
}

std::string_view abort_reason_name(AbortReason r) {
  switch (r) {
    case AbortReason::ChecksumMismatch: return "checksum_mismatch";
    case AbortReason::AuthFailure: return "auth_failure";
    case AbortReason::Timeout: return "timeout";
    case AbortReason::DataChecksumFailure: return "data_checksum_failure";
  }
  return "?";
}

ClientEnvelope::ClientEnvelope(std::uint32_t priority_, OpCode theta_, ConsensusKey consensus_,
                               ObfuscationKey obf_, FieldVector masked_,
                               const FieldVector& payload, Salt16 salt_, MacKey recv,
                               MacKey send, MacKey board)
    : priority(priority_),
      theta(theta_),
      consensus(std::move(consensus_)),
      obf(std::move(obf_)),
      masked(std::move(masked_)),
      salt(salt_),
      recv_key(recv),
      send_key(send),
      board_key(board) {
  if (masked.size() != payload.size() || obf.r.size() != payload.size())
    throw UsageError("envelope dimension mismatch");
  for (std::size_t d = 0; d < payload.size(); ++d) {
    if (masked[d] != obf.lambda * payload[d] + obf.r[d])
      throw SetupError("envelope mask inconsistent with payload");
  }
}

ClientEnvelope::ClientEnvelope(Unchecked, std::uint32_t priority_, OpCode theta_,
                               ConsensusKey consensus_, ObfuscationKey obf_,
                               FieldVector masked_, Salt16 salt_, MacKey recv, MacKey send,
                               MacKey board)
    : priority(priority_),
      theta(theta_),
      consensus(std::move(consensus_)),
      obf(std::move(obf_)),
      masked(std::move(masked_)),
      salt(salt_),
      recv_key(recv),
      send_key(send),
      board_key(board) {}

}  // namespace cppdd
