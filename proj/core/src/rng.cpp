#include "cppdd/rng.hpp"

#include <cstring>

#include "cppdd/hash.hpp"

namespace cppdd {

Sha3CtrRng::Sha3CtrRng(std::uint64_t seed, std::string_view domain) {
  seed_material_.reserve(8 + domain.size());
  for (int i = 0; i < 8; ++i) seed_material_.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
  seed_material_.insert(seed_material_.end(), domain.begin(), domain.end());
}

void Sha3CtrRng::refill() {
  std::vector<std::uint8_t> buf = seed_material_;
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(counter_ >> (8 * i)));
  block_ = sha3_256(buf);
  ++counter_;
  offset_ = 0;
}

std::uint64_t Sha3CtrRng::next_u64() {
  if (offset_ + 8 > block_.size()) refill();
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out |= std::uint64_t{block_[offset_ + i]} << (8 * i);
  offset_ += 8;
  return out;
}

std::uint64_t Sha3CtrRng::next_below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("next_below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

std::array<std::uint8_t, 16> Sha3CtrRng::next_bytes16() {
  std::array<std::uint8_t, 16> out{};
  for (int i = 0; i < 2; ++i) {
    std::uint64_t v = next_u64();
    for (int j = 0; j < 8; ++j) out[8 * i + j] = static_cast<std::uint8_t>(v >> (8 * j));
  }
  return out;
}

std::array<std::uint8_t, 32> Sha3CtrRng::next_bytes32() {
  std::array<std::uint8_t, 32> out{};
  for (int i = 0; i < 4; ++i) {
    std::uint64_t v = next_u64();
    for (int j = 0; j < 8; ++j) out[8 * i + j] = static_cast<std::uint8_t>(v >> (8 * j));
  }
  return out;
}

Sha3CtrRng Sha3CtrRng::fork(std::string_view subdomain) const {
  Sha3CtrRng child(0, "");
  child.seed_material_ = seed_material_;
  child.seed_material_.push_back('/');
  child.seed_material_.insert(child.seed_material_.end(), subdomain.begin(), subdomain.end());
  return child;
}

FieldElement sample_element(Sha3CtrRng& rng, bool nonzero, std::uint64_t p) {
  std::uint64_t v = rng.next_below(p);
  while (nonzero && v == 0) v = rng.next_below(p);
  return FieldElement(v, p);
}

FieldVector sample_vector(Sha3CtrRng& rng, std::size_t d, bool nonzero, std::uint64_t p) {
  std::vector<FieldElement> es;
  es.reserve(d);
  for (std::size_t i = 0; i < d; ++i) es.push_back(sample_element(rng, nonzero, p));
  return FieldVector(std::move(es));
}

}  // namespace cppdd
