#include "cppdd/wire.hpp"

#include <cstring>

namespace cppdd {

std::uint8_t ByteReader::u8() {
  if (pos_ + 1 > data_.size()) throw WireError("truncated stream (u8)");
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  if (pos_ + 4 > data_.size()) throw WireError("truncated stream (u32)");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{data_[pos_ + i]} << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  if (pos_ + 8 > data_.size()) throw WireError("truncated stream (u64)");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
  pos_ += 8;
  return v;
}

void ByteReader::bytes(std::span<std::uint8_t> out) {
  if (pos_ + out.size() > data_.size()) throw WireError("truncated stream (bytes)");
  std::memcpy(out.data(), data_.data() + pos_, out.size());
  pos_ += out.size();
}

FieldVector ByteReader::vec(std::uint64_t modulus) {
  std::uint32_t n = u32();
  if (n == 0) throw WireError("zero-length vector");
  if (pos_ + 8ull * n > data_.size()) throw WireError("truncated stream (vector)");
  std::vector<FieldElement> es;
  es.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint64_t v = u64();
    if (v >= modulus) throw WireError("element not in canonical range");
    es.emplace_back(v, modulus);
  }
  return FieldVector(std::move(es));
}

void ByteReader::expect_done() const {
  if (pos_ != data_.size()) throw WireError("trailing bytes");
}

namespace {
void write_header(ByteWriter& w) {
  w.bytes(kMagic);
  w.u8(kWireVersion);
}
void read_header(ByteReader& r) {
  std::array<std::uint8_t, 4> magic{};
  r.bytes(magic);
  if (magic != kMagic) throw WireError("bad magic");
  if (r.u8() != kWireVersion) throw WireError("unsupported version");
}
void write_digest(ByteWriter& w, const Digest32& d) { w.bytes(d); }
Digest32 read_digest(ByteReader& r) {
  Digest32 d{};
  r.bytes(d);
  return d;
}
}  // namespace

std::vector<std::uint8_t> serialize_packet(const BroadcastPacket& p) {
  ByteWriter w;
  write_header(w);
  w.vec(p.locked);
  w.u32(static_cast<std::uint32_t>(p.sigma_s.size()));
  for (const auto& s : p.sigma_s) {
    w.u32(s.index);
    write_digest(w, s.digest);
  }
  w.u32(static_cast<std::uint32_t>(p.priorities.order.size()));
  for (const auto& u : p.priorities.order) w.bytes(u);
  w.u32(static_cast<std::uint32_t>(p.commitments.size()));
  for (const auto& c : p.commitments) write_digest(w, c);
  w.u32(p.params.n_clients);
  w.u32(p.params.dim);
  w.u64(p.params.modulus);
  w.u32(p.params.scale_bits);
  w.u32(p.params.tau);
  std::uint8_t flags = 0;
  if (p.params.broadcast_lo) flags |= 1;
  if (p.params.hash_full_vector) flags |= 2;
  w.u8(flags);
  if (p.params.broadcast_lo) {
    w.u32(static_cast<std::uint32_t>(p.obfuscated.size()));
    for (const auto& o : p.obfuscated) w.vec(o);
  }
  return w.take();
}

BroadcastPacket parse_packet(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  read_header(r);
  // L_C precedes the params block; read raw values first, range-check once
  // the modulus is known.
  std::uint32_t d = r.u32();
  if (d == 0) throw WireError("zero-length vector");
  std::vector<std::uint64_t> locked_raw(d);
  for (auto& v : locked_raw) v = r.u64();

  BroadcastPacket p;
  std::uint32_t ns = r.u32();
  p.sigma_s.resize(ns);
  for (auto& s : p.sigma_s) {
    s.index = r.u32();
    s.digest = read_digest(r);
  }
  std::uint32_t np = r.u32();
  p.priorities.order.resize(np);
  for (auto& u : p.priorities.order) r.bytes(u);
  std::uint32_t nc = r.u32();
  p.commitments.resize(nc);
  for (auto& c : p.commitments) c = read_digest(r);
  p.params.n_clients = r.u32();
  p.params.dim = r.u32();
  p.params.modulus = r.u64();
  p.params.scale_bits = r.u32();
  p.params.tau = r.u32();
  std::uint8_t flags = r.u8();
  p.params.broadcast_lo = (flags & 1) != 0;
  p.params.hash_full_vector = (flags & 2) != 0;
  if (p.params.broadcast_lo) {
    std::uint32_t no = r.u32();
    p.obfuscated.reserve(no);
    for (std::uint32_t i = 0; i < no; ++i) p.obfuscated.push_back(r.vec(p.params.modulus));
  }
  r.expect_done();

  for (auto v : locked_raw) {
    if (v >= p.params.modulus) throw WireError("element not in canonical range");
  }
  p.locked = FieldVector::from_values(locked_raw, p.params.modulus);
  if (p.params.dim != p.locked.size()) throw WireError("dim mismatch");
  return p;
}

std::vector<std::uint8_t> serialize_envelope(const ClientEnvelope& e, std::uint64_t) {
  ByteWriter w;
  write_header(w);
  w.u32(e.priority);
  w.u8(static_cast<std::uint8_t>(e.theta));
  w.vec(e.consensus.k);
  w.u64(e.obf.lambda.value());
  w.vec(e.obf.r);
  w.vec(e.masked);
  w.bytes(e.salt);
  w.bytes(e.recv_key);
  w.bytes(e.send_key);
  w.bytes(e.board_key);
  return w.take();
}

ClientEnvelope parse_envelope(std::span<const std::uint8_t> bytes, std::uint64_t modulus) {
  ByteReader r(bytes);
  read_header(r);
  std::uint32_t priority = r.u32();
  OpCode theta = opcode_from_byte(r.u8());
  FieldVector k = r.vec(modulus);
  FieldElement lambda(r.u64(), modulus);
  FieldVector rv = r.vec(modulus);
  FieldVector masked = r.vec(modulus);
  Salt16 salt{};
  r.bytes(salt);
  MacKey recv{}, send{}, board{};
  r.bytes(recv);
  r.bytes(send);
  r.bytes(board);
  r.expect_done();
  return ClientEnvelope(ClientEnvelope::Unchecked{}, priority, theta,
                        ConsensusKey(std::move(k), theta),
                        ObfuscationKey(lambda, std::move(rv)), std::move(masked), salt, recv,
                        send, board);
}

std::string_view msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::SetupEnvelope: return "SETUP_ENVELOPE";
    case MsgKind::Packet: return "PACKET";
    case MsgKind::RelayState: return "RELAY_STATE";
    case MsgKind::RetryRequest: return "RETRY_REQUEST";
    case MsgKind::Abort: return "ABORT";
    case MsgKind::Release: return "RELEASE";
    case MsgKind::Opening: return "OPENING";
  }
  return "?";
}

std::vector<std::uint8_t> Message::auth_bytes() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(kind));
  w.u32(receiver);
  w.u32(position);
  w.bytes(body);
  return w.take();
}

Message make_message(MsgKind kind, std::uint32_t sender, std::uint32_t receiver,
                     std::uint64_t seq, std::uint32_t position,
                     std::vector<std::uint8_t> body, const MacKey& key) {
  Message m{.kind = kind,
            .sender = sender,
            .receiver = receiver,
            .seq = seq,
            .position = position,
            .body = std::move(body),
            .tag = {}};
  m.tag = mac_tag(key, m.sender, m.seq, m.auth_bytes());
  return m;
}

bool verify_message(const Message& m, const MacKey& key) {
  return mac_verify(key, m.sender, m.seq, m.auth_bytes(), m.tag);
}

std::vector<std::uint8_t> abort_body(const AbortNotice& n) {
  ByteWriter w;
  w.u32(n.issuer);
  w.u32(n.failed_step);
  w.u8(static_cast<std::uint8_t>(n.reason));
  w.bytes(n.expected);
  w.bytes(n.recomputed);
  return w.take();
}

AbortNotice parse_abort_body(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  AbortNotice n;
  n.issuer = r.u32();
  n.failed_step = r.u32();
  n.reason = static_cast<AbortReason>(r.u8());
  r.bytes(n.expected);
  r.bytes(n.recomputed);
  r.expect_done();
  return n;
}

std::vector<std::uint8_t> opening_body(std::uint32_t priority, const FieldVector& masked,
                                       const Salt16& salt) {
  ByteWriter w;
  w.u32(priority);
  w.vec(masked);
  w.bytes(salt);
  return w.take();
}

Opening parse_opening_body(std::span<const std::uint8_t> bytes, std::uint64_t modulus) {
  ByteReader r(bytes);
  Opening o;
  o.priority = r.u32();
  o.masked = r.vec(modulus);
  r.bytes(o.salt);
  r.expect_done();
  return o;
}

}  // namespace cppdd
