#include "doctest.h"

#include "cppdd/client.hpp"
#include "cppdd/hash.hpp"
#include "helpers.hpp"

using namespace cppdd;

namespace {

// Two-client hand-worked instance over F_97:
//   D_1 = [10], lambda_1 = 3, r_1 = [5]  -> O_1 = [35], theta_1 = +, k_1 = [7]
//   D_2 = [5],  lambda_2 = 4, r_2 = [0]  -> O_2 = [20], theta_2 = x, k_2 = [4]
//   L^(0) = [55], after /4: [38], after -7: L_C = [31]
struct Worked {
  BroadcastPacket packet;
  ClientEnvelope env1;
  ClientEnvelope env2;

  Worked()
      : env1(1, OpCode::Add, ConsensusKey(FieldVector::from_values({7}, 97), OpCode::Add),
             ObfuscationKey(FieldElement(3, 97), FieldVector::from_values({5}, 97)),
             FieldVector::from_values({35}, 97), FieldVector::from_values({10}, 97), Salt16{},
             MacKey{}, MacKey{}, MacKey{}),
        env2(2, OpCode::Mul, ConsensusKey(FieldVector::from_values({4}, 97), OpCode::Mul),
             ObfuscationKey(FieldElement(4, 97), FieldVector::from_values({0}, 97)),
             FieldVector::from_values({20}, 97), FieldVector::from_values({5}, 97), Salt16{},
             MacKey{}, MacKey{}, MacKey{}) {
    packet.locked = FieldVector::from_values({31}, 97);
    packet.sigma_s = {{1, step_digest(FieldVector::from_values({38}, 97))},
                      {2, step_digest(FieldVector::from_values({55}, 97))}};
    packet.priorities.order = {Uuid{1}, Uuid{2}};
    packet.commitments = {commitment_digest(env1.masked, env1.salt),
                          commitment_digest(env2.masked, env2.salt)};
    packet.params = ProtocolParams{.n_clients = 2, .dim = 1, .modulus = 97};
  }
};

ChainState locked_state(const BroadcastPacket& p) {
  return ChainState{.state = p.locked, .position = 0, .producer = 0, .round = 1};
}

}  // namespace

TEST_CASE("relay chain reproduces the hand-worked states") {
  Worked w;
  ClientNode c1(w.packet, w.env1);
  ClientNode c2(w.packet, w.env2);

  const auto& s1 = c1.decrypt_step(locked_state(w.packet));
  CHECK(s1.state == FieldVector::from_values({38}, 97));  // 31 + 7
  CHECK(s1.position == 1);
  CHECK(c1.validate_step() == ClientNode::ValidateOutcome::Validated);
  const ChainState relayed = c1.validated_state();
  c1.mark_relayed();

  const auto& s2 = c2.decrypt_step(relayed);
  CHECK(s2.state == FieldVector::from_values({55}, 97));  // 38 * 4 mod 97
  CHECK(c2.validate_step() == ClientNode::ValidateOutcome::Validated);

  c1.mark_released();
  c2.mark_released();
  CHECK(c1.deobfuscate() == FieldVector::from_values({10}, 97));  // (35-5)*inv(3)
  CHECK(c2.deobfuscate() == FieldVector::from_values({5}, 97));   // (20-0)*inv(4)
}

TEST_CASE("decrypt_step enforces chain position") {
  Worked w;
  ClientNode c2(w.packet, w.env2);
  // client 2 must receive a position-1 state, not the raw locked aggregate
  CHECK_THROWS_AS(c2.decrypt_step(locked_state(w.packet)), ProtocolOrderError);
}

TEST_CASE("phase machine rejects out-of-order calls") {
  Worked w;
  ClientNode c1(w.packet, w.env1);
  CHECK_THROWS_AS(c1.validate_step(), ProtocolOrderError);
  CHECK_THROWS_AS(c1.validated_state(), ProtocolOrderError);
  CHECK_THROWS_AS(c1.mark_relayed(), ProtocolOrderError);
  CHECK_THROWS_AS(c1.deobfuscate(), ProtocolOrderError);
  c1.decrypt_step(locked_state(w.packet));
  CHECK_THROWS_AS(c1.decrypt_step(locked_state(w.packet)), ProtocolOrderError);
  c1.validate_step();
  c1.mark_released();
  CHECK_THROWS_AS(c1.mark_relayed(), ProtocolOrderError);
}

TEST_CASE("tampered state burns the retry budget then aborts") {
  Worked w;
  ClientNode c1(w.packet, w.env1);
  auto bad = locked_state(w.packet);
  bad.state = FieldVector::from_values({30}, 97);

  for (std::uint32_t attempt = 1; attempt <= 3; ++attempt) {
    c1.decrypt_step(bad);
    CHECK(c1.validate_step() == ClientNode::ValidateOutcome::RequestRetry);
    CHECK(c1.retries() == attempt);
    CHECK(c1.phase() == ClientPhase::AwaitState);
  }
  c1.decrypt_step(bad);
  CHECK(c1.validate_step() == ClientNode::ValidateOutcome::Abort);
  CHECK(c1.phase() == ClientPhase::Aborted);
  REQUIRE(c1.abort_notice().has_value());
  CHECK(c1.abort_notice()->issuer == 1);
  CHECK(c1.abort_notice()->failed_step == 1);
  CHECK(c1.abort_notice()->reason == AbortReason::ChecksumMismatch);
  CHECK_THROWS_AS(c1.deobfuscate(), SuppressedByAbortError);
}

TEST_CASE("a good delivery within the budget still validates") {
  Worked w;
  ClientNode c1(w.packet, w.env1);
  auto bad = locked_state(w.packet);
  bad.state = FieldVector::from_values({0}, 97);
  c1.decrypt_step(bad);
  CHECK(c1.validate_step() == ClientNode::ValidateOutcome::RequestRetry);
  c1.decrypt_step(locked_state(w.packet));
  CHECK(c1.validate_step() == ClientNode::ValidateOutcome::Validated);
  CHECK(c1.retries() == 1);
}

TEST_CASE("mac failures share the same retry budget") {
  Worked w;
  ClientNode c1(w.packet, w.env1);
  CHECK(c1.fail_attempt(AbortReason::AuthFailure) == ClientNode::ValidateOutcome::RequestRetry);
  CHECK(c1.fail_attempt(AbortReason::AuthFailure) == ClientNode::ValidateOutcome::RequestRetry);
  // one digest mismatch consumes the third retry
  auto bad = locked_state(w.packet);
  bad.state = FieldVector::from_values({1}, 97);
  c1.decrypt_step(bad);
  CHECK(c1.validate_step() == ClientNode::ValidateOutcome::RequestRetry);
  CHECK(c1.retries() == 3);
  CHECK(c1.fail_attempt(AbortReason::AuthFailure) == ClientNode::ValidateOutcome::Abort);
  CHECK(c1.abort_notice()->reason == AbortReason::AuthFailure);
}

TEST_CASE("deobfuscation inverts the affine mask, 1000 cases") {
  Sha3CtrRng rng(61, "test/deobf");
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t p = (i % 2) ? 97 : kDefaultModulus;
    const std::size_t d = 1 + rng.next_below(8);
    FieldVector payload = sample_vector(rng, d, false, p);
    FieldElement lambda = sample_element(rng, true, p);
    FieldVector r = sample_vector(rng, d, false, p);
    std::vector<FieldElement> masked;
    for (std::size_t j = 0; j < d; ++j) masked.push_back(lambda * payload[j] + r[j]);

    BroadcastPacket packet;
    packet.locked = FieldVector(masked);
    packet.sigma_s = {{1, step_digest(packet.locked)}};
    packet.priorities.order = {Uuid{}};
    packet.params = ProtocolParams{.n_clients = 1, .dim = static_cast<std::uint32_t>(d),
                                   .modulus = p};
    ClientEnvelope env(1, OpCode::Add,
                       ConsensusKey(FieldVector::zeros(d, p), OpCode::Add),
                       ObfuscationKey(lambda, r), FieldVector(masked), payload, Salt16{},
                       MacKey{}, MacKey{}, MacKey{});
    ClientNode node(packet, env);
    node.decrypt_step(ChainState{.state = packet.locked, .position = 0});
    REQUIRE(node.validate_step() == ClientNode::ValidateOutcome::Validated);
    node.mark_released();
    CHECK(node.deobfuscate() == payload);
  }
}
