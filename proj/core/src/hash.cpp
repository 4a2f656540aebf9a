#include "cppdd/hash.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace cppdd {

Digest32 sha3_256(std::span<const std::uint8_t> data) {
  Digest32 out{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha3_256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != 32) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA3-256 failure");
  }
  EVP_MD_CTX_free(ctx);
  return out;
}

std::array<std::uint8_t, 8> encode_element(const FieldElement& e) {
  std::array<std::uint8_t, 8> b{};
  std::uint64_t v = e.value();
  for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return b;
}

std::vector<std::uint8_t> encode_vector(const FieldVector& v) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 8 * v.size());
  std::uint32_t n = static_cast<std::uint32_t>(v.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  for (const auto& e : v) {
    auto b = encode_element(e);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

Digest32 step_digest(const FieldVector& L, bool full_vector) {
  if (L.size() == 0) throw UsageError("step digest of empty state");
  if (full_vector) {
    auto bytes = encode_vector(L);
    return sha3_256(bytes);
  }
  auto bytes = encode_element(L.sum_uncounted());
  return sha3_256(bytes);
}

Digest32 commitment_digest(const FieldVector& o, const Salt16& salt) {
  std::vector<std::uint8_t> buf(salt.begin(), salt.end());
  auto enc = encode_vector(o);
  buf.insert(buf.end(), enc.begin(), enc.end());
  return sha3_256(buf);
}

namespace {
void append_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void append_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
}  // namespace

MacTag mac_tag(const MacKey& key, std::uint32_t sender, std::uint64_t seq,
               std::span<const std::uint8_t> message) {
  std::vector<std::uint8_t> buf(key.begin(), key.end());
  append_u32(buf, sender);
  append_u64(buf, seq);
  buf.insert(buf.end(), message.begin(), message.end());
  Digest32 d = sha3_256(buf);
  MacTag t{};
  std::memcpy(t.data(), d.data(), t.size());
  return t;
}

bool mac_verify(const MacKey& key, std::uint32_t sender, std::uint64_t seq,
                std::span<const std::uint8_t> message, const MacTag& tag) {
  MacTag expect = mac_tag(key, sender, seq, message);
  unsigned diff = 0;
  for (std::size_t i = 0; i < tag.size(); ++i) diff |= expect[i] ^ tag[i];
  return diff == 0;
}

}  // namespace cppdd
