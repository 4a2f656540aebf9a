#include "cppdd/simnet.hpp"

#include <chrono>
#include <sstream>

#include "cppdd/hash.hpp"
#include "cppdd/rng.hpp"

#include "json.hpp"

namespace cppdd {

namespace {
const ClientFault kHonest{};

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
}  // namespace

std::string_view behavior_name(Behavior b) {
  switch (b) {
    case Behavior::Honest: return "honest";
    case Behavior::TamperState: return "tamper_state";
    case Behavior::WrongKey: return "wrong_key";
    case Behavior::WrongOp: return "wrong_op";
    case Behavior::Withhold: return "withhold";
    case Behavior::TransientCorrupt: return "transient_corrupt";
    case Behavior::WithholdOpening: return "withhold_opening";
  }
  return "?";
}

const ClientFault& FaultPlan::fault_for(std::uint32_t priority) const {
  auto it = by_priority.find(priority);
  return it == by_priority.end() ? kHonest : it->second;
}

std::vector<std::uint32_t> FaultPlan::corrupted() const {
  std::vector<std::uint32_t> out;
  for (const auto& [prio, f] : by_priority) {
    if (f.behavior != Behavior::Honest) out.push_back(prio);
  }
  return out;
}

bool BulletinBoard::has_abort() const {
  for (const auto& e : entries_) {
    if (e.kind == MsgKind::Abort) return true;
  }
  return false;
}

std::optional<AbortNotice> board_verify(const BroadcastPacket& packet,
                                        const FieldVector& released,
                                        const std::vector<Opening>& openings) {
  PhaseScope scope(Phase::Verify);
  const auto& params = packet.params;
  const std::uint32_t n = params.n_clients;

  // released state must match the final step checksum
  Digest32 recomputed = step_digest(released, params.hash_full_vector);
  const Digest32& expected = packet.sigma_s.at(n - 1).digest;
  if (recomputed != expected) {
    return AbortNotice{.issuer = 0,
                       .failed_step = n,
                       .reason = AbortReason::ChecksumMismatch,
                       .expected = expected,
                       .recomputed = recomputed};
  }

  FieldVector o_sum = FieldVector::zeros(params.dim, params.modulus);
  if (params.broadcast_lo) {
    if (packet.obfuscated.size() != n)
      return AbortNotice{.issuer = 0, .failed_step = n, .reason = AbortReason::Timeout};
    for (const auto& o : packet.obfuscated) vec_accumulate(o_sum, o);
  } else {
    if (openings.size() != n)
      return AbortNotice{.issuer = 0, .failed_step = n, .reason = AbortReason::Timeout};
    std::vector<bool> seen(n, false);
    for (const auto& op : openings) {
      if (op.priority == 0 || op.priority > n || seen[op.priority - 1])
        return AbortNotice{.issuer = 0, .failed_step = n, .reason = AbortReason::Timeout};
      seen[op.priority - 1] = true;
      Digest32 c = commitment_digest(op.masked, op.salt);
      if (c != packet.commitments.at(op.priority - 1)) {
        return AbortNotice{.issuer = 0,
                           .failed_step = op.priority,
                           .reason = AbortReason::ChecksumMismatch,
                           .expected = packet.commitments.at(op.priority - 1),
                           .recomputed = c};
      }
      vec_accumulate(o_sum, op.masked);
    }
  }

  DataChecksum dc = data_checksum(o_sum, released);
  if (!dc.all_ones(params.dim)) {
    return AbortNotice{.issuer = 0,
                       .failed_step = n,
                       .reason = AbortReason::DataChecksumFailure};
  }
  return std::nullopt;
}

namespace {

/// Per-run mutable context shared by the scheduler helpers.
struct RunCtx {
  const SetupOutput& setup;
  const FaultPlan& plan;
  const SimConfig& config;
  RunTranscript& t;
  OpCounters& counters;
  std::vector<ClientNode>& nodes;
  BulletinBoard board;
  Sha3CtrRng fault_rng;
  std::map<std::uint32_t, std::uint64_t> next_seq;
  std::map<std::uint32_t, std::uint64_t> last_seen;
  std::map<std::uint32_t, std::uint32_t> transmissions;  // per sender, for TransientCorrupt
  std::vector<std::optional<FieldVector>> emitted;       // index j = priority j emission

  std::uint64_t seq_for(std::uint32_t sender) { return ++next_seq[sender]; }

  void log_msg(std::uint32_t round, const Message& m, bool mac_ok, bool delivered) {
    t.log.push_back(MessageRecord{.round = round,
                                  .kind = m.kind,
                                  .sender = m.sender,
                                  .receiver = m.receiver,
                                  .seq = m.seq,
                                  .bytes = m.wire_size(),
                                  .mac_ok = mac_ok,
                                  .delivered = delivered});
    counters.bytes_total += m.wire_size();
  }

  void abort_run(std::uint32_t round, const AbortNotice& notice) {
    board.append(BulletinBoard::Entry{.round = round,
                                      .author = notice.issuer,
                                      .kind = MsgKind::Abort,
                                      .body = abort_body(notice)});
    const MacKey& key = notice.issuer == 0
                            ? MacKey{}
                            : setup.envelopes[notice.issuer - 1].board_key;
    Message m = make_message(MsgKind::Abort, notice.issuer, 0, seq_for(notice.issuer),
                             notice.failed_step, abort_body(notice), key);
    log_msg(round, m, true, true);
    for (auto& node : nodes) {
      if (node.phase() != ClientPhase::Aborted) node.abort(notice);
    }
    t.outcome = RunOutcome::Aborted;
    t.notice = notice;
    t.rounds_used = round + 1;
  }
};

FieldVector tamper_delta_apply(const FieldVector& honest, const ClientFault& fault) {
  if (fault.delta.size() != honest.size())
    throw UsageError("tamper delta dimension mismatch");
  std::vector<FieldElement> out;
  out.reserve(honest.size());
  for (std::size_t i = 0; i < honest.size(); ++i)
    out.push_back(honest[i] + FieldElement(fault.delta[i], honest.modulus()));
  return FieldVector(std::move(out));
}

/// The state a corrupted client emits for its own step.
FieldVector corrupt_emission(RunCtx& ctx, std::uint32_t priority, const FieldVector& incoming) {
  const ClientFault& fault = ctx.plan.fault_for(priority);
  const ClientEnvelope& env = ctx.setup.envelopes[priority - 1];
  switch (fault.behavior) {
    case Behavior::TamperState: {
      FieldVector honest = vec_apply(incoming, env.consensus.k, env.theta);
      const std::uint32_t target = fault.target_step == 0 ? priority : fault.target_step;
      if (target != priority) return honest;
      return tamper_delta_apply(honest, fault);
    }
    case Behavior::WrongKey: {
      FieldVector bogus = sample_vector(ctx.fault_rng, incoming.size(),
                                        is_multiplicative(env.theta), incoming.modulus());
      return vec_apply(incoming, bogus, env.theta);
    }
    case Behavior::WrongOp:
      return vec_apply(incoming, env.consensus.k, complement(env.theta));
    default:
      throw UsageError("corrupt_emission on non-corrupt behavior");
  }
}

bool is_relay_corrupt(Behavior b) {
  return b == Behavior::TamperState || b == Behavior::WrongKey || b == Behavior::WrongOp;
}

}  // namespace

std::string export_transcript_jsonl(const RunTranscript& t) {
  std::ostringstream out;
  for (const auto& r : t.log) {
    nlohmann::json j{
        {"round", r.round},       {"kind", msg_kind_name(r.kind)},
        {"sender", r.sender},     {"receiver", r.receiver},
        {"seq", r.seq},           {"bytes", r.bytes},
        {"mac_ok", r.mac_ok},     {"delivered", r.delivered},
    };
    out << j.dump() << '\n';
  }
  nlohmann::json summary{
      {"record", "summary"},
      {"outcome", t.outcome == RunOutcome::Success ? "success" : "aborted"},
      {"rounds", t.rounds_used},
      {"retries", t.total_retries},
      {"bytes_total", t.counters.bytes_total},
      {"bytes_relay_link", t.counters.bytes_relay_link},
      {"pipeline_ops", t.counters.pipeline_total()},
  };
  if (t.notice) {
    summary["abort_issuer"] = t.notice->issuer;
    summary["abort_step"] = t.notice->failed_step;
    summary["abort_reason"] = abort_reason_name(t.notice->reason);
  }
  out << summary.dump() << '\n';
  return out.str();
}

RunTranscript Simulation::run(const SetupOutput& setup, const FaultPlan& plan,
                              OpCounters* external_counters) {
  const auto& params = setup.packet.params;
  const std::uint32_t n = params.n_clients;
  if (setup.envelopes.size() != n) throw UsageError("setup/envelope count mismatch");
  for (const auto& [prio, fault] : plan.by_priority) {
    if (prio == 0 || prio > n) throw UsageError("fault plan references invalid priority");
    (void)fault;
  }

  RunTranscript t;
  OpCounters& counters = external_counters ? *external_counters : t.counters;
  CountScope count_scope(counters, Phase::Other);
  const auto t0 = Clock::now();

  std::vector<ClientNode> nodes;
  nodes.reserve(n);
  auto shared_packet = std::make_shared<const BroadcastPacket>(setup.packet);
  for (std::uint32_t i = 0; i < n; ++i) nodes.emplace_back(shared_packet, setup.envelopes[i]);

  RunCtx ctx{.setup = setup,
             .plan = plan,
             .config = config_,
             .t = t,
             .counters = counters,
             .nodes = nodes,
             .board = {},
             .fault_rng = Sha3CtrRng(plan.rng_seed, "cppdd/fault"),
             .next_seq = {},
             .last_seen = {},
             .transmissions = {},
             .emitted = std::vector<std::optional<FieldVector>>(n + 1)};

  // --- round 0: packet + envelope distribution ---
  {
    const auto packet_bytes = serialize_packet(setup.packet);
    for (std::uint32_t i = 1; i <= n; ++i) {
      const MacKey& key = setup.envelopes[i - 1].board_key;
      Message pm = make_message(MsgKind::Packet, 0, i, ctx.seq_for(0), 0, packet_bytes, key);
      ctx.log_msg(0, pm, verify_message(pm, key), true);
      auto env_bytes = serialize_envelope(setup.envelopes[i - 1], params.modulus);
      Message em = make_message(MsgKind::SetupEnvelope, 0, i, ctx.seq_for(0), 0,
                                std::move(env_bytes), key);
      ctx.log_msg(0, em, verify_message(em, key), true);
    }
  }

  // --- rounds 1..N: the relay ---
  for (std::uint32_t j = 1; j <= n; ++j) {
    const ClientFault& fault = plan.fault_for(j);
    ClientNode& node = nodes[j - 1];

    // incoming state for client j
    FieldVector incoming = j == 1 ? setup.packet.locked : FieldVector();
    if (j > 1) {
      const ClientFault& pred_fault = plan.fault_for(j - 1);
      if (pred_fault.behavior == Behavior::Withhold) {
        // predecessor never emits; the waiting client times out
        ctx.abort_run(j, AbortNotice{.issuer = j,
                                     .failed_step = j - 1,
                                     .reason = AbortReason::Timeout});
        break;
      }
      const FieldVector& pred_state = *ctx.emitted[j - 1];
      const ClientEnvelope& pred_env = setup.envelopes[j - 2];

      bool settled = false;
      std::uint32_t ticks = 0;
      while (!settled) {
        ++ticks;
        if (ticks > config_.timeout_ticks) {
          ctx.abort_run(j, AbortNotice{.issuer = j,
                                       .failed_step = j - 1,
                                       .reason = AbortReason::Timeout});
          break;
        }
        Message m = make_message(MsgKind::RelayState, j - 1, j, ctx.seq_for(j - 1), j - 1,
                                 encode_vector(pred_state), pred_env.send_key);
        // wire-level transient corruption on the predecessor's link
        std::uint32_t& sent = ctx.transmissions[j - 1];
        ++sent;
        if (pred_fault.behavior == Behavior::TransientCorrupt && sent <= pred_fault.count)
          m.body[4] ^= 0xFF;
        counters.bytes_relay_link = m.wire_size();

        const bool fresh = m.seq > ctx.last_seen[j - 1];
        const bool mac_ok = fresh && verify_message(m, node.envelope().recv_key);
        ctx.log_msg(j, m, mac_ok, mac_ok);

        if (is_relay_corrupt(fault.behavior)) {
          // a corrupted receiver performs no checks
          incoming = pred_state;
          settled = true;
          break;
        }

        ClientNode::ValidateOutcome outcome;
        if (!mac_ok) {
          outcome = node.fail_attempt(AbortReason::AuthFailure);
        } else {
          ctx.last_seen[j - 1] = m.seq;
          const auto ts = Clock::now();
          FieldVector state_vec = ByteReader(m.body).vec(params.modulus);
          node.decrypt_step(ChainState{.state = std::move(state_vec),
                                       .position = j - 1,
                                       .producer = j - 1,
                                       .round = j});
          outcome = node.validate_step();
          t.step_ms.push_back(ms_since(ts));
        }
        switch (outcome) {
          case ClientNode::ValidateOutcome::Validated:
            settled = true;
            break;
          case ClientNode::ValidateOutcome::RequestRetry: {
            ++t.total_retries;
            Message rm = make_message(MsgKind::RetryRequest, j, j - 1, ctx.seq_for(j), j - 1,
                                      {}, node.envelope().recv_key);
            ctx.log_msg(j, rm, true, true);
            break;
          }
          case ClientNode::ValidateOutcome::Abort:
            ctx.abort_run(j, *node.abort_notice());
            settled = true;
            break;
        }
      }
      if (t.outcome == RunOutcome::Aborted) break;
    } else {
      // client 1 starts from L_C in the packet; no wire delivery involved
      if (!is_relay_corrupt(fault.behavior)) {
        const auto ts = Clock::now();
        node.decrypt_step(
            ChainState{.state = incoming, .position = 0, .producer = 0, .round = 1});
        auto outcome = node.validate_step();
        t.step_ms.push_back(ms_since(ts));
        if (outcome == ClientNode::ValidateOutcome::Abort) {
          ctx.abort_run(1, *node.abort_notice());
          break;
        }
        // an honest coordinator never triggers retries here
        while (outcome == ClientNode::ValidateOutcome::RequestRetry) {
          ++t.total_retries;
          node.decrypt_step(
              ChainState{.state = incoming, .position = 0, .producer = 0, .round = 1});
          outcome = node.validate_step();
          if (outcome == ClientNode::ValidateOutcome::Abort) {
            ctx.abort_run(1, *node.abort_notice());
            break;
          }
        }
        if (t.outcome == RunOutcome::Aborted) break;
      }
    }

    // client j's own emission
    if (is_relay_corrupt(fault.behavior)) {
      ctx.emitted[j] = corrupt_emission(ctx, j, incoming);
      // keep the corrupt node's machine coherent when its emission is honest-valued
      node.decrypt_step(ChainState{.state = incoming, .position = j - 1, .producer = j - 1,
                                   .round = j});
      if (step_digest(ctx.emitted[j].value(), params.hash_full_vector) ==
          setup.packet.sigma_s[j - 1].digest) {
        (void)node.validate_step();
      }
    } else if (fault.behavior == Behavior::Withhold) {
      // processed honestly above, but nothing is emitted
      ctx.emitted[j] = std::nullopt;
      if (j < n && node.phase() == ClientPhase::Validated) node.mark_relayed();
    } else {
      ctx.emitted[j] = node.validated_state().state;
      if (j < n) node.mark_relayed();
    }
  }

  // --- round N+1: release, openings, board verification ---
  if (t.outcome != RunOutcome::Aborted) {
    const std::uint32_t release_round = n + 1;
    const ClientFault& last_fault = plan.fault_for(n);
    if (last_fault.behavior == Behavior::Withhold || !ctx.emitted[n].has_value()) {
      ctx.abort_run(release_round, AbortNotice{.issuer = 0,
                                               .failed_step = n,
                                               .reason = AbortReason::Timeout});
    } else {
      const FieldVector& released = *ctx.emitted[n];
      Message rm = make_message(MsgKind::Release, n, 0, ctx.seq_for(n), n,
                                encode_vector(released), setup.envelopes[n - 1].board_key);
      ctx.log_msg(release_round, rm, true, true);
      ctx.board.append(BulletinBoard::Entry{.round = release_round,
                                            .author = n,
                                            .kind = MsgKind::Release,
                                            .body = rm.body});

      bool opening_timeout = false;
      std::vector<Opening> openings;
      if (!params.broadcast_lo) {
        for (std::uint32_t i = 1; i <= n; ++i) {
          if (plan.fault_for(i).behavior == Behavior::WithholdOpening) {
            opening_timeout = true;
            continue;
          }
          const auto& env = setup.envelopes[i - 1];
          auto body = opening_body(i, env.masked, env.salt);
          Message om =
              make_message(MsgKind::Opening, i, 0, ctx.seq_for(i), i, body, env.board_key);
          ctx.log_msg(release_round, om, true, true);
          ctx.board.append(BulletinBoard::Entry{.round = release_round,
                                                .author = i,
                                                .kind = MsgKind::Opening,
                                                .body = std::move(body)});
          openings.push_back(Opening{.priority = i, .masked = env.masked, .salt = env.salt});
        }
      }

      if (opening_timeout) {
        ctx.abort_run(release_round, AbortNotice{.issuer = 0,
                                                 .failed_step = n,
                                                 .reason = AbortReason::Timeout});
      } else if (auto notice = board_verify(setup.packet, released, openings)) {
        ctx.abort_run(release_round, *notice);
      } else {
        t.outcome = RunOutcome::Success;
        t.rounds_used = n + 2;
        t.released = released;
        for (auto& node : nodes) {
          if (node.phase() == ClientPhase::Validated || node.phase() == ClientPhase::Relayed)
            node.mark_released();
        }
        if (config_.collect_recovered) {
          t.recovered.reserve(n);
          for (auto& node : nodes) t.recovered.push_back(node.deobfuscate());
        }
      }
    }
  }

  if (external_counters) t.counters = *external_counters;
  t.run_ms = ms_since(t0);
  return t;
}

}  // namespace cppdd
