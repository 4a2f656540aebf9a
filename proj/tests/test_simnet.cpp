#include "doctest.h"

#include "cppdd/simnet.hpp"
#include "helpers.hpp"

using namespace cppdd;

namespace {

const FieldVector& payload_for_priority(const testutil::BuiltInstance& inst, std::uint32_t pr) {
  const Uuid& u = inst.priorities.uuid_for_priority(pr);
  for (const auto& rec : inst.cci.records) {
    if (rec.uuid == u) return rec.payload;
  }
  throw std::logic_error("priority not found");
}

}  // namespace

TEST_CASE("honest run releases in n+2 rounds with exact recovery") {
  for (std::uint32_t n : {1u, 3u, 7u}) {
    auto inst = testutil::make_instance(n, 4, 100 + n);
    auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, 100 + n,
                                    /*audit=*/true);
    auto t = Simulation().run(setup, FaultPlan{});
    REQUIRE(t.outcome == RunOutcome::Success);
    CHECK(t.rounds_used == n + 2);
    CHECK(t.total_retries == 0);
    REQUIRE(t.released.has_value());
    CHECK(*t.released == setup.audit->front());  // fully unlocked aggregate
    REQUIRE(t.recovered.size() == n);
    for (std::uint32_t pr = 1; pr <= n; ++pr)
      CHECK(t.recovered[pr - 1] == payload_for_priority(inst, pr));
  }
}

TEST_CASE("relay link bytes are 45 + 8d regardless of n") {
  for (std::uint32_t n : {2u, 5u}) {
    for (std::uint32_t d : {1u, 8u, 64u}) {
      auto setup = testutil::make_setup(n, d, 7 * n + d);
      auto t = Simulation().run(setup, FaultPlan{});
      REQUIRE(t.outcome == RunOutcome::Success);
      CHECK(t.counters.bytes_relay_link == 45 + 8ull * d);
    }
  }
}

TEST_CASE("state tampering mid-chain is caught by the next client") {
  const std::uint32_t n = 6;
  for (std::uint32_t j = 1; j < n; ++j) {
    auto setup = testutil::make_setup(n, 3, 200 + j);
    FaultPlan plan;
    plan.by_priority[j] = ClientFault{.behavior = Behavior::TamperState, .delta = {1, 0, 0}};
    auto t = Simulation().run(setup, plan);
    REQUIRE(t.outcome == RunOutcome::Aborted);
    REQUIRE(t.notice.has_value());
    CHECK(t.notice->issuer == j + 1);
    CHECK(t.notice->reason == AbortReason::ChecksumMismatch);
    CHECK(t.recovered.empty());
    CHECK(t.total_retries == 3);  // full retry budget burned on the stuck state
  }
}

TEST_CASE("tampering at the last step is caught by the board") {
  const std::uint32_t n = 4;
  auto setup = testutil::make_setup(n, 2, 17);
  FaultPlan plan;
  plan.by_priority[n] = ClientFault{.behavior = Behavior::TamperState, .delta = {5, 0}};
  auto t = Simulation().run(setup, plan);
  REQUIRE(t.outcome == RunOutcome::Aborted);
  CHECK(t.notice->issuer == 0);
  CHECK(t.notice->reason == AbortReason::ChecksumMismatch);
}

TEST_CASE("wrong key and wrong op are equally detected") {
  const std::uint32_t n = 5;
  for (auto b : {Behavior::WrongKey, Behavior::WrongOp}) {
    for (std::uint32_t j = 1; j <= n; ++j) {
      auto setup = testutil::make_setup(n, 2, 300 + j);
      FaultPlan plan;
      plan.rng_seed = j;
      plan.by_priority[j] = ClientFault{.behavior = b};
      auto t = Simulation().run(setup, plan);
      REQUIRE(t.outcome == RunOutcome::Aborted);
      CHECK(t.notice->issuer == (j < n ? j + 1 : 0));
    }
  }
}

TEST_CASE("withholding the relay state times out at the successor") {
  auto setup = testutil::make_setup(4, 2, 55);
  FaultPlan plan;
  plan.by_priority[2] = ClientFault{.behavior = Behavior::Withhold};
  auto t = Simulation().run(setup, plan);
  REQUIRE(t.outcome == RunOutcome::Aborted);
  CHECK(t.notice->issuer == 3);
  CHECK(t.notice->failed_step == 2);
  CHECK(t.notice->reason == AbortReason::Timeout);
}

TEST_CASE("withholding the release times out at the board") {
  auto setup = testutil::make_setup(4, 2, 56);
  FaultPlan plan;
  plan.by_priority[4] = ClientFault{.behavior = Behavior::Withhold};
  auto t = Simulation().run(setup, plan);
  REQUIRE(t.outcome == RunOutcome::Aborted);
  CHECK(t.notice->issuer == 0);
  CHECK(t.notice->reason == AbortReason::Timeout);
}

TEST_CASE("transient corruption within the retry budget recovers") {
  for (std::uint32_t k : {1u, 2u, 3u}) {
    auto setup = testutil::make_setup(3, 2, 60 + k);
    FaultPlan plan;
    plan.by_priority[1] = ClientFault{.behavior = Behavior::TransientCorrupt, .count = k};
    auto t = Simulation().run(setup, plan);
    REQUIRE(t.outcome == RunOutcome::Success);
    CHECK(t.total_retries == k);
  }
}

TEST_CASE("transient corruption past the retry budget aborts") {
  auto setup = testutil::make_setup(3, 2, 64);
  FaultPlan plan;
  plan.by_priority[1] = ClientFault{.behavior = Behavior::TransientCorrupt, .count = 4};
  auto t = Simulation().run(setup, plan);
  REQUIRE(t.outcome == RunOutcome::Aborted);
  CHECK(t.notice->issuer == 2);
  CHECK(t.notice->reason == AbortReason::AuthFailure);
}

TEST_CASE("withheld commitment opening blocks the release") {
  auto setup = testutil::make_setup(3, 2, 70);
  FaultPlan plan;
  plan.by_priority[2] = ClientFault{.behavior = Behavior::WithholdOpening};
  auto t = Simulation().run(setup, plan);
  REQUIRE(t.outcome == RunOutcome::Aborted);
  CHECK(t.notice->issuer == 0);
  CHECK(t.notice->reason == AbortReason::Timeout);

  // with the aggregate list broadcast up front, openings are not needed
  auto setup_lo = testutil::make_setup(3, 2, 70, kDefaultModulus, false, /*broadcast_lo=*/true);
  auto t2 = Simulation().run(setup_lo, plan);
  CHECK(t2.outcome == RunOutcome::Success);
}

TEST_CASE("sum-preserving tamper slips past the sum digest but not the board") {
  // tampering the last emission keeps the element sum, so the release digest
  // matches; the per-dimension data checksum still exposes it
  auto setup = testutil::make_setup(4, 3, 80);
  const std::uint64_t p = kDefaultModulus;
  FaultPlan plan;
  plan.by_priority[4] = ClientFault{.behavior = Behavior::TamperState, .delta = {1, p - 1, 0}};
  auto t = Simulation().run(setup, plan);
  REQUIRE(t.outcome == RunOutcome::Aborted);
  CHECK(t.notice->issuer == 0);
  CHECK(t.notice->reason == AbortReason::DataChecksumFailure);
  CHECK(t.recovered.empty());

  // the full-vector digest variant catches the same change directly
  auto strict = testutil::make_setup(4, 3, 80, p, false, false, /*hash_full_vector=*/true);
  auto t2 = Simulation().run(strict, plan);
  REQUIRE(t2.outcome == RunOutcome::Aborted);
  CHECK(t2.notice->issuer == 0);
  CHECK(t2.notice->reason == AbortReason::ChecksumMismatch);
}

TEST_CASE("board rejects a forged opening") {
  auto setup = testutil::make_setup(3, 2, 90);
  auto t = Simulation().run(setup, FaultPlan{});
  REQUIRE(t.outcome == RunOutcome::Success);

  std::vector<Opening> openings;
  for (std::uint32_t i = 1; i <= 3; ++i)
    openings.push_back(Opening{.priority = i,
                               .masked = setup.envelopes[i - 1].masked,
                               .salt = setup.envelopes[i - 1].salt});
  CHECK_FALSE(board_verify(setup.packet, *t.released, openings).has_value());

  auto forged = openings;
  forged[1].masked = vec_apply(forged[1].masked, FieldVector::from_values({1, 0}), OpCode::Add);
  auto notice = board_verify(setup.packet, *t.released, forged);
  REQUIRE(notice.has_value());
  CHECK(notice->issuer == 0);
  CHECK(notice->failed_step == 2);
  CHECK(notice->reason == AbortReason::ChecksumMismatch);

  auto missing = openings;
  missing.pop_back();
  CHECK(board_verify(setup.packet, *t.released, missing).has_value());
}

TEST_CASE("transcript export is deterministic and wall-clock free") {
  auto setup = testutil::make_setup(4, 3, 99);
  FaultPlan plan;
  plan.by_priority[2] = ClientFault{.behavior = Behavior::TransientCorrupt, .count = 1};
  auto a = export_transcript_jsonl(Simulation().run(setup, plan));
  auto b = export_transcript_jsonl(Simulation().run(setup, plan));
  CHECK(a == b);
  CHECK(a.find("\"record\":\"summary\"") != std::string::npos);
  CHECK(a.find("ms") == std::string::npos);
}

TEST_CASE("1000 randomized tamper runs all abort; honest twins all succeed") {
  Sha3CtrRng rng(123, "test/sweep");
  for (int c = 0; c < 1000; ++c) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.next_below(6));
    const std::uint32_t d = 1 + static_cast<std::uint32_t>(rng.next_below(4));
    auto setup = testutil::make_setup(n, d, rng.next_u64());

    CHECK(Simulation().run(setup, FaultPlan{}).outcome == RunOutcome::Success);

    FaultPlan plan;
    const auto j = 1 + static_cast<std::uint32_t>(rng.next_below(n));
    std::vector<std::uint64_t> delta(d, 0);
    delta[rng.next_below(d)] = 1 + rng.next_below(kDefaultModulus - 1);
    plan.by_priority[j] = ClientFault{.behavior = Behavior::TamperState, .delta = delta};
    auto t = Simulation().run(setup, plan);
    CHECK(t.outcome == RunOutcome::Aborted);
    CHECK(t.recovered.empty());
  }
}
