#include "cppdd/client.hpp"

#include "cppdd/counters.hpp"
#include "cppdd/hash.hpp"

namespace cppdd {

std::string_view client_phase_name(ClientPhase p) {
  switch (p) {
    case ClientPhase::Idle: return "idle";
    case ClientPhase::AwaitState: return "await_state";
    case ClientPhase::Applied: return "applied";
    case ClientPhase::Validated: return "validated";
    case ClientPhase::Relayed: return "relayed";
    case ClientPhase::Released: return "released";
    case ClientPhase::Aborted: return "aborted";
  }
  return "?";
}

ClientNode::ClientNode(std::shared_ptr<const BroadcastPacket> packet, ClientEnvelope envelope)
    : packet_(std::move(packet)), envelope_(std::move(envelope)) {
  if (envelope_.priority == 0 || envelope_.priority > packet_->params.n_clients)
    throw UsageError("envelope priority out of range");
}

const ChainState& ClientNode::decrypt_step(const ChainState& incoming) {
  if (phase_ != ClientPhase::AwaitState)
    throw ProtocolOrderError("decrypt_step outside AwaitState");
  if (incoming.position != envelope_.priority - 1)
    throw ProtocolOrderError("chain state position mismatch");

  PhaseScope scope(Phase::Decrypt);
  ChainState next;
  next.state = vec_apply(incoming.state, envelope_.consensus.k, envelope_.theta);
  next.position = envelope_.priority;
  next.producer = envelope_.priority;
  next.round = incoming.round;
  state_ = std::move(next);
  phase_ = ClientPhase::Applied;
  return *state_;
}

ClientNode::ValidateOutcome ClientNode::validate_step() {
  if (phase_ != ClientPhase::Applied)
    throw ProtocolOrderError("validate_step outside Applied");
  const auto& expected = packet_->sigma_s.at(envelope_.priority - 1);
  last_recomputed_ = step_digest(state_->state, packet_->params.hash_full_vector);
  if (last_recomputed_ == expected.digest) {
    phase_ = ClientPhase::Validated;
    return ValidateOutcome::Validated;
  }
  state_.reset();
  if (retries_ < packet_->params.tau) {
    ++retries_;
    phase_ = ClientPhase::AwaitState;
    return ValidateOutcome::RequestRetry;
  }
  abort(make_notice(AbortReason::ChecksumMismatch, expected.digest, last_recomputed_));
  return ValidateOutcome::Abort;
}

ClientNode::ValidateOutcome ClientNode::fail_attempt(AbortReason reason) {
  if (phase_ != ClientPhase::AwaitState)
    throw ProtocolOrderError("fail_attempt outside AwaitState");
  if (retries_ < packet_->params.tau) {
    ++retries_;
    return ValidateOutcome::RequestRetry;
  }
  abort(make_notice(reason, packet_->sigma_s.at(envelope_.priority - 1).digest, Digest32{}));
  return ValidateOutcome::Abort;
}

const ChainState& ClientNode::validated_state() const {
  if (phase_ != ClientPhase::Validated)
    throw ProtocolOrderError("validated_state outside Validated");
  return *state_;
}

void ClientNode::mark_relayed() {
  if (phase_ != ClientPhase::Validated) throw ProtocolOrderError("mark_relayed outside Validated");
  phase_ = ClientPhase::Relayed;
}

void ClientNode::mark_released() {
  if (phase_ != ClientPhase::Validated && phase_ != ClientPhase::Relayed)
    throw ProtocolOrderError("mark_released before validation");
  phase_ = ClientPhase::Released;
}

void ClientNode::abort(const AbortNotice& notice) {
  notice_ = notice;
  state_.reset();  // post-abort hygiene: chain state is dropped
  phase_ = ClientPhase::Aborted;
}

FieldVector ClientNode::deobfuscate() const {
  if (phase_ == ClientPhase::Aborted) throw SuppressedByAbortError();
  if (phase_ != ClientPhase::Released)
    throw ProtocolOrderError("deobfuscate before global release");
  PhaseScope scope(Phase::Deobfuscate);
  const FieldElement lambda_inv = envelope_.obf.lambda.inverse();
  std::vector<FieldElement> out;
  out.reserve(envelope_.masked.size());
  for (std::size_t d = 0; d < envelope_.masked.size(); ++d)
    out.push_back((envelope_.masked[d] - envelope_.obf.r[d]) * lambda_inv);
  return FieldVector(std::move(out));
}

AbortNotice ClientNode::make_notice(AbortReason reason, const Digest32& expected,
                                    const Digest32& recomputed) const {
  return AbortNotice{.issuer = envelope_.priority,
                     .failed_step = envelope_.priority,
                     .reason = reason,
                     .expected = expected,
                     .recomputed = recomputed};
}

}  // namespace cppdd
