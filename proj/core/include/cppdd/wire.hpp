#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cppdd/hash.hpp"
#include "cppdd/types.hpp"

namespace cppdd {

/// Little-endian byte stream builder for the tagged binary format.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void vec(const FieldVector& v) {
    auto enc = encode_vector(v);
    bytes(enc);
  }

  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  void bytes(std::span<std::uint8_t> out);
  FieldVector vec(std::uint64_t modulus);
  bool done() const { return pos_ == data_.size(); }
  void expect_done() const;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline constexpr std::array<std::uint8_t, 4> kMagic = {'C', 'P', 'D', 'D'};
inline constexpr std::uint8_t kWireVersion = 1;

std::vector<std::uint8_t> serialize_packet(const BroadcastPacket& p);
BroadcastPacket parse_packet(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_envelope(const ClientEnvelope& e, std::uint64_t modulus);
ClientEnvelope parse_envelope(std::span<const std::uint8_t> bytes, std::uint64_t modulus);

// --- simnet message framing ---

enum class MsgKind : std::uint8_t {
  SetupEnvelope = 0,
  Packet = 1,
  RelayState = 2,
  RetryRequest = 3,
  Abort = 4,
  Release = 5,
  Opening = 6,
};

std::string_view msg_kind_name(MsgKind k);

/// Sender/receiver ids: 1..N are client priorities, 0 is the coordinator/board.
struct Message {
  MsgKind kind = MsgKind::RelayState;
  std::uint32_t sender = 0;
  std::uint32_t receiver = 0;
  std::uint64_t seq = 0;
  std::uint32_t position = 0;
  std::vector<std::uint8_t> body;
  MacTag tag{};

  /// The bytes covered by the MAC: kind || receiver || position || body.
  std::vector<std::uint8_t> auth_bytes() const;
  /// Full on-wire size in bytes (fixed 41-byte framing plus body).
  std::size_t wire_size() const { return 25 + body.size() + 16; }
};

Message make_message(MsgKind kind, std::uint32_t sender, std::uint32_t receiver,
                     std::uint64_t seq, std::uint32_t position,
                     std::vector<std::uint8_t> body, const MacKey& key);

bool verify_message(const Message& m, const MacKey& key);

std::vector<std::uint8_t> abort_body(const AbortNotice& n);
AbortNotice parse_abort_body(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> opening_body(std::uint32_t priority, const FieldVector& masked,
                                       const Salt16& salt);
struct Opening {
  std::uint32_t priority = 0;
  FieldVector masked;
  Salt16 salt{};
};
Opening parse_opening_body(std::span<const std::uint8_t> bytes, std::uint64_t modulus);

}  // namespace cppdd
