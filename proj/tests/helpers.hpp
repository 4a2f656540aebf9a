#pragma once

#include <cstdint>

#include "cppdd/coordinator.hpp"
#include "cppdd/rng.hpp"

namespace cppdd::testutil {

struct BuiltInstance {
  ProtocolParams params;
  CciMatrix cci;
  PriorityMap priorities;
};

/// Random but deterministic instance: uuid u has priority (u mod n)+1 reversed,
/// payloads are uniform field vectors.
inline BuiltInstance make_instance(std::uint32_t n, std::uint32_t d, std::uint64_t seed,
                                   std::uint64_t p = kDefaultModulus, bool broadcast_lo = false,
                                   bool hash_full_vector = false) {
  BuiltInstance inst;
  inst.params.n_clients = n;
  inst.params.dim = d;
  inst.params.modulus = p;
  inst.params.broadcast_lo = broadcast_lo;
  inst.params.hash_full_vector = hash_full_vector;

  Sha3CtrRng rng(seed, "test/instance");
  for (std::uint32_t i = 0; i < n; ++i) {
    Uuid u = rng.next_bytes16();
    inst.cci.records.push_back({u, sample_vector(rng, d, false, p)});
  }
  // random priority permutation
  std::vector<std::uint32_t> idx(n);
  for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
  for (std::uint32_t i = n; i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_below(i)]);
  for (std::uint32_t i = 0; i < n; ++i)
    inst.priorities.order.push_back(inst.cci.records[idx[i]].uuid);
  return inst;
}

inline SetupOutput make_setup(std::uint32_t n, std::uint32_t d, std::uint64_t seed,
                              std::uint64_t p = kDefaultModulus, bool audit = false,
                              bool broadcast_lo = false, bool hash_full_vector = false) {
  auto inst = make_instance(n, d, seed, p, broadcast_lo, hash_full_vector);
  return coordinator::setup(inst.params, inst.cci, inst.priorities, seed, audit);
}

}  // namespace cppdd::testutil
