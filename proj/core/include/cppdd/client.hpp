#pragma once

#include <memory>
#include <optional>

#include "cppdd/types.hpp"

namespace cppdd {

enum class ClientPhase {
  Idle,
  AwaitState,
  Applied,
  Validated,
  Relayed,
  Released,
  Aborted,
};

std::string_view client_phase_name(ClientPhase p);

/// Single-client relay state machine: apply one decryption layer, validate it
/// against the packet's step checksum, then relay or release. Any integrity
/// failure past the retry budget moves the node to Aborted; an aborted node
/// zeroizes its chain state and refuses to emit a payload.
class ClientNode {
 public:
  /// The packet is broadcast once and shared by every node.
  ClientNode(std::shared_ptr<const BroadcastPacket> packet, ClientEnvelope envelope);
  ClientNode(BroadcastPacket packet, ClientEnvelope envelope)
      : ClientNode(std::make_shared<const BroadcastPacket>(std::move(packet)),
                   std::move(envelope)) {}

  std::uint32_t priority() const { return envelope_.priority; }
  ClientPhase phase() const { return phase_; }
  std::uint32_t retries() const { return retries_; }
  const ClientEnvelope& envelope() const { return envelope_; }
  const BroadcastPacket& packet() const { return *packet_; }

  /// Applies this client's layer to the predecessor state (position must be
  /// priority-1). Leaves the node in Applied.
  const ChainState& decrypt_step(const ChainState& incoming);

  enum class ValidateOutcome { Validated, RequestRetry, Abort };

  /// Recomputes the step digest of the applied state against sigma_S.
  ValidateOutcome validate_step();

  /// Registers a failed delivery attempt (bad MAC / tampered wire) against the
  /// shared retry budget without applying a state.
  ValidateOutcome fail_attempt(AbortReason reason);

  /// State to relay onward (or to release, at priority N). Requires Validated.
  const ChainState& validated_state() const;

  void mark_relayed();
  void mark_released();
  void abort(const AbortNotice& notice);

  const std::optional<AbortNotice>& abort_notice() const { return notice_; }

  /// D_i = (O_i - r_i) * lambda_i^{-1}. Requires Released; throws
  /// SuppressedByAbortError after an abort.
  FieldVector deobfuscate() const;

 private:
  AbortNotice make_notice(AbortReason reason, const Digest32& expected,
                          const Digest32& recomputed) const;

  std::shared_ptr<const BroadcastPacket> packet_;
  ClientEnvelope envelope_;
  ClientPhase phase_ = ClientPhase::AwaitState;
  std::uint32_t retries_ = 0;
  std::optional<ChainState> state_;
  std::optional<AbortNotice> notice_;
  Digest32 last_recomputed_{};
};

}  // namespace cppdd
