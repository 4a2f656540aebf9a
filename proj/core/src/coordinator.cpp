#include "cppdd/coordinator.hpp"

#include <map>

#include "cppdd/counters.hpp"
#include "cppdd/hash.hpp"

namespace cppdd::coordinator {

std::vector<FieldVector> organize(const CciMatrix& cci, const PriorityMap& priorities) {
  if (cci.records.empty()) throw SetupError("empty CCI matrix");
  priorities.validate();
  if (priorities.size() != cci.records.size())
    throw SetupError("priority map does not cover the CCI matrix");

  std::map<Uuid, const FieldVector*> by_uuid;
  for (const auto& rec : cci.records) {
    if (!by_uuid.emplace(rec.uuid, &rec.payload).second)
      throw SetupError("duplicate uuid in CCI matrix");
  }
  std::vector<FieldVector> ordered;
  ordered.reserve(cci.records.size());
  for (const auto& uuid : priorities.order) {
    auto it = by_uuid.find(uuid);
    if (it == by_uuid.end()) throw SetupError("priority map references unknown uuid");
    ordered.push_back(*it->second);
  }
  return ordered;
}

KeyMaterial keygen(std::uint32_t n, std::uint32_t d, Sha3CtrRng& rng, std::uint64_t modulus) {
  if (n < 1 || d < 1) throw UsageError("keygen requires n >= 1, d >= 1");
  KeyMaterial km;
  km.obfuscation.reserve(n);
  km.consensus.reserve(n);
  km.thetas.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    FieldElement lambda = sample_element(rng, /*nonzero=*/true, modulus);
    FieldVector r = sample_vector(rng, d, /*nonzero=*/false, modulus);
    km.obfuscation.emplace_back(lambda, std::move(r));

    OpCode theta = static_cast<OpCode>(rng.next_below(4));
    FieldVector k = sample_vector(rng, d, is_multiplicative(theta), modulus);
    km.consensus.emplace_back(std::move(k), theta);
    km.thetas.push_back(theta);
  }
  return km;
}

std::vector<FieldVector> obfuscate(const std::vector<FieldVector>& payloads,
                                   const std::vector<ObfuscationKey>& keys) {
  if (payloads.size() != keys.size()) throw UsageError("obfuscate size mismatch");
  PhaseScope scope(Phase::Obfuscate);
  std::vector<FieldVector> out;
  out.reserve(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    const auto& d = payloads[i];
    const auto& key = keys[i];
    if (key.r.size() != d.size()) throw UsageError("obfuscation key dimension mismatch");
    std::vector<FieldElement> o;
    o.reserve(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) o.push_back(key.lambda * d[j] + key.r[j]);
    out.emplace_back(std::move(o));
  }
  return out;
}

EncryptResult encrypt(const std::vector<FieldVector>& obfuscated,
                      const std::vector<ConsensusKey>& consensus,
                      const std::vector<OpCode>& thetas, bool hash_full_vector) {
  const std::size_t n = obfuscated.size();
  if (n == 0 || consensus.size() != n || thetas.size() != n)
    throw UsageError("encrypt size mismatch");
  const std::size_t d = obfuscated.front().size();

  FieldVector state = FieldVector::zeros(d, obfuscated.front().modulus());
  {
    PhaseScope scope(Phase::Aggregate);
    for (const auto& o : obfuscated) vec_accumulate(state, o);
  }

  EncryptResult res;
  res.sigma_s.resize(n);
  res.states.reserve(n + 1);
  res.states.push_back(state);  // L^(0)

  PhaseScope scope(Phase::Encrypt);
  for (std::size_t i = n; i >= 1; --i) {
    res.sigma_s[i - 1] = StepChecksum{.index = static_cast<std::uint32_t>(i),
                                      .digest = step_digest(state, hash_full_vector)};
    state = vec_apply(state, consensus[i - 1].k, complement(thetas[i - 1]));
    res.states.push_back(state);
  }
  res.locked = std::move(state);
  return res;
}

SetupOutput setup(const ProtocolParams& params, const CciMatrix& cci,
                  const PriorityMap& priorities, std::uint64_t seed, bool audit) {
  const std::uint32_t n = params.n_clients;
  const std::uint32_t d = params.dim;
  if (cci.records.size() != n) throw SetupError("CCI size does not match params");
  for (const auto& rec : cci.records) {
    if (rec.payload.size() != d) throw SetupError("payload dimension mismatch");
  }

  auto payloads = organize(cci, priorities);

  Sha3CtrRng key_rng(seed, "cppdd/keygen");
  auto km = keygen(n, d, key_rng, params.modulus);
  auto obfuscated = obfuscate(payloads, km.obfuscation);
  auto enc = encrypt(obfuscated, km.consensus, km.thetas, params.hash_full_vector);

  Sha3CtrRng salt_rng(seed, "cppdd/salt");
  Sha3CtrRng mac_rng(seed, "cppdd/mac");

  // Per-link keys: link i connects priority i to i+1; board keys per client.
  std::vector<MacKey> link_keys(n + 1);
  std::vector<MacKey> board_keys(n + 1);
  for (std::uint32_t i = 0; i <= n; ++i) {
    link_keys[i] = mac_rng.next_bytes32();
    board_keys[i] = mac_rng.next_bytes32();
  }

  SetupOutput out;
  out.packet.locked = enc.locked;
  out.packet.sigma_s = enc.sigma_s;
  out.packet.priorities = priorities;
  out.packet.params = params;
  if (params.broadcast_lo) out.packet.obfuscated = obfuscated;

  PhaseScope scope(Phase::Other);  // envelope consistency checks are not pipeline ops
  out.packet.commitments.reserve(n);
  out.envelopes.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Salt16 salt = salt_rng.next_bytes16();
    out.packet.commitments.push_back(commitment_digest(obfuscated[i], salt));
    out.envelopes.emplace_back(i + 1, km.thetas[i], km.consensus[i], km.obfuscation[i],
                               obfuscated[i], payloads[i], salt,
                               /*recv=*/link_keys[i], /*send=*/link_keys[i + 1],
                               /*board=*/board_keys[i + 1]);
  }
  if (audit) out.audit = std::move(enc.states);
  return out;
}

}  // namespace cppdd::coordinator
