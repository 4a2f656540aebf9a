#pragma once

#include <optional>
#include <vector>

#include "cppdd/rng.hpp"
#include "cppdd/types.hpp"

namespace cppdd {

struct KeyMaterial {
  std::vector<ObfuscationKey> obfuscation;  // by priority
  std::vector<ConsensusKey> consensus;      // by priority
  std::vector<OpCode> thetas;               // by priority
};

struct EncryptResult {
  FieldVector locked;                  // L_C
  std::vector<StepChecksum> sigma_s;   // indexed 1..N
  std::vector<FieldVector> states;     // L^(0)..L^(N), audit only
};

/// Everything setup produces. The audit log is populated only in audit mode
/// (tests); in production mode the coordinator retires with no retained secrets.
struct SetupOutput {
  BroadcastPacket packet;
  std::vector<ClientEnvelope> envelopes;  // index i holds priority i+1
  std::optional<std::vector<FieldVector>> audit;  // intermediate states L^(0)..L^(N)
};

namespace coordinator {

/// Reorders payloads so index i-1 holds the payload of the priority-i client.
std::vector<FieldVector> organize(const CciMatrix& cci, const PriorityMap& priorities);

KeyMaterial keygen(std::uint32_t n, std::uint32_t d, Sha3CtrRng& rng,
                   std::uint64_t modulus = kDefaultModulus);

/// O_i = lambda_i * D_i + r_i, element-wise.
std::vector<FieldVector> obfuscate(const std::vector<FieldVector>& payloads,
                                   const std::vector<ObfuscationKey>& keys);

/// Aggregates L^(0) = sum O_i and applies complementary blinding layers in
/// reverse priority, recording a step digest before each layer.
EncryptResult encrypt(const std::vector<FieldVector>& obfuscated,
                      const std::vector<ConsensusKey>& consensus,
                      const std::vector<OpCode>& thetas, bool hash_full_vector = false);

/// End-to-end setup: Organize, KeyGen, Obfuscate, Encrypt, ListForm.
/// With audit set, intermediate chain states are retained for oracle checks.
SetupOutput setup(const ProtocolParams& params, const CciMatrix& cci,
                  const PriorityMap& priorities, std::uint64_t seed, bool audit = false);

}  // namespace coordinator
}  // namespace cppdd
