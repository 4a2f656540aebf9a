#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cppdd/field.hpp"

namespace cppdd {

using Digest32 = std::array<std::uint8_t, 32>;
using MacTag = std::array<std::uint8_t, 16>;
using MacKey = std::array<std::uint8_t, 32>;
using Salt16 = std::array<std::uint8_t, 16>;

Digest32 sha3_256(std::span<const std::uint8_t> data);

/// Canonical 8-byte little-endian encoding of a field element.
std::array<std::uint8_t, 8> encode_element(const FieldElement& e);

/// Canonical encoding: 4-byte LE count, then 8-byte LE elements.
std::vector<std::uint8_t> encode_vector(const FieldVector& v);

/// Step checksum: SHA3-256 over the canonical encoding of the scalar element sum.
/// With full_vector set, hashes the whole canonical vector instead (strictly
/// stronger; closes the equal-sum blind spot of the sum digest).
Digest32 step_digest(const FieldVector& L, bool full_vector = false);

/// Salted commitment to a masked payload: SHA3-256(salt || encode_vector(o)).
Digest32 commitment_digest(const FieldVector& o, const Salt16& salt);

/// Keyed-hash tag, truncated SHA3-256(key || sender || seq || message).
MacTag mac_tag(const MacKey& key, std::uint32_t sender, std::uint64_t seq,
               std::span<const std::uint8_t> message);

/// Constant-time-ish tag comparison; true iff the tag matches.
bool mac_verify(const MacKey& key, std::uint32_t sender, std::uint64_t seq,
                std::span<const std::uint8_t> message, const MacTag& tag);

}  // namespace cppdd
