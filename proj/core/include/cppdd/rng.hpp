#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cppdd/field.hpp"

namespace cppdd {

/// Deterministic counter-mode generator over SHA3-256: block_i = H(seed || domain || i).
/// Identical seeds yield identical byte streams on every platform.
class Sha3CtrRng {
 public:
  explicit Sha3CtrRng(std::uint64_t seed, std::string_view domain = "");

  std::uint64_t next_u64();

  /// Uniform in [0, bound) by rejection sampling (no modulo bias).
  std::uint64_t next_below(std::uint64_t bound);

  std::array<std::uint8_t, 16> next_bytes16();
  std::array<std::uint8_t, 32> next_bytes32();

  /// Child generator with an extended domain string, for independent sub-streams.
  Sha3CtrRng fork(std::string_view subdomain) const;

 private:
  void refill();

  std::vector<std::uint8_t> seed_material_;
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t offset_ = 32;  // forces refill on first draw
};

/// Uniform field element; with nonzero set, uniform over [1, p).
FieldElement sample_element(Sha3CtrRng& rng, bool nonzero = false,
                            std::uint64_t p = kDefaultModulus);

/// Length-d vector of independent uniform elements; elementwise nonzero on request.
FieldVector sample_vector(Sha3CtrRng& rng, std::size_t d, bool nonzero = false,
                          std::uint64_t p = kDefaultModulus);

}  // namespace cppdd
