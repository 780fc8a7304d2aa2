#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "pcn/contracts.hpp"
#include "pcn/penalty.hpp"

using namespace pcn;

namespace {

EconomicParams zero_fee() {
  EconomicParams e;
  e.base_fee = 0;
  e.fee_rate = 0;
  return e;
}

struct Fixture {
  ChannelGraph g;
  PaymentPath path;
};

// Line graph U0-U1-...-Uk with ample split balances and a payment of `amount`.
Fixture line_fixture(int kappa, std::int64_t amount, std::int64_t capacity,
                     const EconomicParams& econ, std::int64_t timeout_d = 100,
                     std::int64_t delta = 100) {
  Fixture f;
  std::vector<NodeId> ids;
  for (int i = 0; i <= kappa; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "U%02d", i);
    ids.push_back(f.g.add_node(buf));
  }
  for (int i = 0; i < kappa; ++i)
    f.g.add_channel(ids[static_cast<std::size_t>(i)],
                    ids[static_cast<std::size_t>(i + 1)], capacity,
                    BalanceMode::split);
  f.path.hops = ids;
  f.path.amounts = hop_amounts(amount, kappa, econ);
  f.path.timeouts = timeout_schedule(kappa, timeout_d, delta).t;
  return f;
}

std::int64_t wealth(const ChannelGraph& g, NodeId u) {
  std::int64_t w = 0;
  for (const auto& [peer, idx] : g.neighbors(u)) w += g.remain(u, peer);
  return w;
}

GpParams gp_basic(double gamma) {
  GpParams p;
  p.gamma = gamma;
  p.n_max = 20;
  p.confirm_delta = 100;
  return p;
}

}  // namespace

TEST_CASE("hash pair construction") {
  std::mt19937_64 rng(1);
  const HashPair hp = HashPair::make(rng);
  CHECK(hp.x != hp.r);
  CHECK(hp.payment_hash != hp.cancel_hash);
  CHECK(sha256(hp.x.data(), 32) == hp.payment_hash);
  CHECK(sha256(hp.r.data(), 32) == hp.cancel_hash);
}

TEST_CASE("preprocess blinding and penalties") {
  const auto econ = zero_fee();
  std::mt19937_64 rng(2);

  SUBCASE("psi clamps to zero on the two-hop example") {
    Fixture f = line_fixture(2, 1000, 1'000'000, econ);
    GpParams p = gp_basic(1e-4);
    p.n_max = 2;  // kappa == n_max forces phi == kappa
    const auto env = preprocess(f.path, p, rng);
    CHECK(env.phi == 2);
    CHECK(env.psi == 0.0);  // identity solves to -alpha/2, clamped
  }

  SUBCASE("gamma zero gives zero penalties") {
    Fixture f = line_fixture(3, 1000, 1'000'000, econ);
    const auto env = preprocess(f.path, gp_basic(0.0), rng);
    for (double z : env.cgp_real) CHECK(z == 0.0);
  }

  SUBCASE("terminal penalty equals gamma * alpha * sum t_j") {
    Fixture f = line_fixture(3, 1000, 1'000'000, econ);
    const double gamma = 2e-4;
    const auto env = preprocess(f.path, gp_basic(gamma), rng);
    CHECK(env.phi == 3);
    CHECK(env.psi == 0.0);
    CHECK(env.cgp_real.back() ==
          doctest::Approx(gamma * 1000 * 600).epsilon(1e-12));
  }

  SUBCASE("telescoping identity holds pre-rounding") {
    Fixture f = line_fixture(6, 2500, 1'000'000, econ);
    const double gamma = 3.7e-5;
    const auto env = preprocess(f.path, gp_basic(gamma), rng);
    for (int i = 1; i < env.kappa; ++i) {
      const double step =
          gamma * static_cast<double>(env.amounts[static_cast<std::size_t>(i)]) *
          static_cast<double>(env.timeouts[static_cast<std::size_t>(i)]);
      CHECK(env.cgp_real[static_cast<std::size_t>(i)] -
                env.cgp_real[static_cast<std::size_t>(i - 1)] ==
            doctest::Approx(step).epsilon(1e-9));
    }
    // And matches the cumulative-penalty module on the same inputs.
    std::vector<double> amounts(env.amounts.begin(), env.amounts.end());
    CHECK(env.cgp_real.back() ==
          doctest::Approx(cumulative_penalty(amounts, env.timeouts, gamma,
                                             env.kappa))
              .epsilon(1e-9));
  }

  SUBCASE("randomized phi stays in range and inflates the terminal penalty") {
    Fixture f = line_fixture(4, 1000, 1'000'000, econ);
    GpParams p = gp_basic(1e-4);
    p.n_max = 12;
    p.randomize_phi = true;
    for (int i = 0; i < 50; ++i) {
      const auto env = preprocess(f.path, p, rng);
      CHECK(env.phi >= 4);
      CHECK(env.phi <= 12);
      if (env.psi > 0) {
        // Blinding identity: gamma*phi*alpha*D == gamma*((psi+a0)t0 + sum).
        double collateral = env.psi * static_cast<double>(env.timeouts[0]);
        for (int j = 0; j < env.kappa; ++j)
          collateral +=
              static_cast<double>(env.amounts[static_cast<std::size_t>(j)]) *
              static_cast<double>(env.timeouts[static_cast<std::size_t>(j)]);
        CHECK(collateral == doctest::Approx(static_cast<double>(env.phi) * 1000 *
                                            100)
                                .epsilon(1e-9));
      }
    }
  }

  SUBCASE("path longer than n_max is rejected") {
    Fixture f = line_fixture(5, 1000, 1'000'000, econ);
    GpParams p = gp_basic(1e-4);
    p.n_max = 4;
    CHECK_THROWS(preprocess(f.path, p, rng));
  }
}

TEST_CASE("round one locks penalties payee-first and debits remains") {
  const auto econ = zero_fee();
  std::mt19937_64 rng(3);
  Fixture f = line_fixture(3, 1000, 1'000'000, econ);
  const double gamma = 1e-4;
  auto env = preprocess(f.path, gp_basic(gamma), rng);
  const auto cgp = env.cgp;
  GpSession s(f.g, f.path, std::move(env), econ, ForwardPolicy{});
  REQUIRE(!s.lock_round1());
  // U3 locked cgp_2 toward U2, U2 locked cgp_1 toward U1, U1 locked cgp_0.
  CHECK(f.g.remain(*f.g.node("U03"), *f.g.node("U02")) == 500000 - cgp[2]);
  CHECK(f.g.remain(*f.g.node("U02"), *f.g.node("U01")) == 500000 - cgp[1]);
  CHECK(f.g.remain(*f.g.node("U01"), *f.g.node("U00")) == 500000 - cgp[0]);
}

TEST_CASE("round one abort paths") {
  const auto econ = zero_fee();
  std::mt19937_64 rng(4);

  SUBCASE("minimum compensation violated") {
    Fixture f = line_fixture(3, 1000, 1'000'000, econ);
    GpParams p = gp_basic(1e-4);
    p.zeta = 0.05;  // gamma * t_i << zeta at every hop
    auto env = preprocess(f.path, p, rng);
    ForwardPolicy policy;
    policy.enforce_min_comp = true;
    const std::int64_t before = f.g.total_liquidity();
    GpSession s(f.g, f.path, std::move(env), econ, policy);
    const auto abort = s.lock_round1();
    REQUIRE(abort.has_value());
    CHECK(abort->reason == kMinCompensationViolated);
    CHECK(f.g.total_liquidity() == before);
    // Unwound: every remain back to its initial value.
    for (std::size_t i = 0; i < f.g.channel_count(); ++i)
      CHECK(f.g.channel_at(i).in_flight == 0);
  }

  SUBCASE("belief too high") {
    Fixture f = line_fixture(3, 50000, 10'000'000, econ);
    EconomicParams busy;
    busy.rate = 0.2;  // positive opportunity cost, fee from defaults
    auto env = preprocess(f.path, gp_basic(1e-4), rng);
    ForwardPolicy policy;
    policy.enforce_beliefs = true;
    policy.theta = 0.99;
    GpSession s(f.g, f.path, std::move(env), busy, policy);
    const auto abort = s.lock_round1();
    REQUIRE(abort.has_value());
    CHECK(abort->reason == kBeliefTooHigh);
  }

  SUBCASE("insufficient remain for the penalty") {
    Fixture f = line_fixture(3, 1000, 2000, econ);  // split: 1000 per side
    GpParams p = gp_basic(0.05);  // cgp_2 = 0.05*1000*600 = 30000 >> 1000
    auto env = preprocess(f.path, p, rng);
    GpSession s(f.g, f.path, std::move(env), econ, ForwardPolicy{});
    const auto abort = s.lock_round1();
    REQUIRE(abort.has_value());
    CHECK(abort->reason == kInsufficientRemain);
    CHECK(abort->hop == 3);  // the payee itself cannot fund cgp_2
  }

  SUBCASE("tampered envelope is rejected by the payee") {
    Fixture f = line_fixture(3, 1000, 1'000'000, econ);
    auto env = preprocess(f.path, gp_basic(1e-4), rng);
    env.cgp_real.back() *= 2;
    GpSession s(f.g, f.path, std::move(env), econ, ForwardPolicy{});
    const auto abort = s.lock_round1();
    REQUIRE(abort.has_value());
    CHECK(abort->reason == kEnvelopeMismatch);
  }

  SUBCASE("tampered telescoping is caught mid-chain") {
    Fixture f = line_fixture(4, 1000, 1'000'000, econ);
    auto env = preprocess(f.path, gp_basic(1e-4), rng);
    env.cgp_real[1] += 5.0;
    env.cgp[1] += 5;
    GpSession s(f.g, f.path, std::move(env), econ, ForwardPolicy{});
    const auto abort = s.lock_round1();
    REQUIRE(abort.has_value());
    CHECK(abort->reason == kTelescopeMismatch);
  }

  SUBCASE("round two refuses to start after a round-one abort") {
    Fixture f = line_fixture(3, 1000, 2000, econ);
    auto env = preprocess(f.path, gp_basic(0.05), rng);
    GpSession s(f.g, f.path, std::move(env), econ, ForwardPolicy{});
    REQUIRE(s.lock_round1().has_value());
    const auto abort2 = s.lock_round2();
    REQUIRE(abort2.has_value());
    CHECK(s.result().payment_locked.empty());
  }
}

TEST_CASE("round two locks payments with the fee recursion") {
  EconomicParams econ;  // base_fee 1, fee_rate 1e-6
  std::mt19937_64 rng(5);
  Fixture f = line_fixture(3, 10000, 1'000'000, econ);
  auto env = preprocess(f.path, gp_basic(1e-5), rng);
  GpSession s(f.g, f.path, std::move(env), econ, ForwardPolicy{});
  REQUIRE(!s.lock_round1());
  REQUIRE(!s.lock_round2());
  const auto& locked = s.result().payment_locked;
  REQUIRE(locked.size() == 3);
  CHECK(locked[2] == 10000);
  CHECK(locked[1] == 10000 + std::llround(fee(econ, 10000)));
  CHECK(locked[0] == locked[1] + std::llround(fee(econ, static_cast<double>(locked[1]))));
}

TEST_CASE("release semantics conserve liquidity") {
  const auto econ = zero_fee();

  SUBCASE("honest release: payee gains alpha, payer pays alpha, cgp returns") {
    std::mt19937_64 rng(6);
    Fixture f = line_fixture(3, 1000, 1'000'000, econ);
    const NodeId payer = *f.g.node("U00"), payee = *f.g.node("U03");
    const std::int64_t w_payer = wealth(f.g, payer);
    const std::int64_t w_payee = wealth(f.g, payee);
    const std::int64_t w_mid = wealth(f.g, *f.g.node("U01"));
    const std::int64_t total = f.g.total_liquidity();
    const RunResult r = run_gp(f.g, f.path, gp_basic(1e-4), econ,
                               ForwardPolicy{}, PayeeAction::release_x, rng);
    CHECK(r.success);
    CHECK(f.g.total_liquidity() == total);
    CHECK(wealth(f.g, payee) == w_payee + 1000);
    CHECK(wealth(f.g, payer) == w_payer - 1000);
    CHECK(wealth(f.g, *f.g.node("U01")) == w_mid);  // fee-free intermediary
  }

  SUBCASE("cancellation restores every balance") {
    std::mt19937_64 rng(7);
    Fixture f = line_fixture(4, 2500, 1'000'000, econ);
    const std::string before = snapshot_to_csv(f.g);
    std::vector<std::int64_t> remains;
    for (std::size_t i = 0; i < f.g.channel_count(); ++i) {
      remains.push_back(f.g.channel_at(i).remain_ab);
      remains.push_back(f.g.channel_at(i).remain_ba);
    }
    const RunResult r = run_gp(f.g, f.path, gp_basic(1e-4), econ,
                               ForwardPolicy{}, PayeeAction::release_r, rng);
    CHECK(!r.success);
    CHECK(!r.abort.has_value());
    std::vector<std::int64_t> after;
    for (std::size_t i = 0; i < f.g.channel_count(); ++i) {
      after.push_back(f.g.channel_at(i).remain_ab);
      after.push_back(f.g.channel_at(i).remain_ba);
    }
    CHECK(after == remains);
  }

  SUBCASE("wait-reject at the deadline transfers nothing and burns time") {
    std::mt19937_64 rng(8);
    Fixture f = line_fixture(3, 1000, 1'000'000, econ);
    std::vector<std::int64_t> remains;
    for (std::size_t i = 0; i < f.g.channel_count(); ++i) {
      remains.push_back(f.g.channel_at(i).remain_ab);
      remains.push_back(f.g.channel_at(i).remain_ba);
    }
    const RunResult r =
        run_gp(f.g, f.path, gp_basic(1e-4), econ, ForwardPolicy{},
               PayeeAction::wait_reject_at_deadline, rng);
    CHECK(!r.success);
    CHECK(f.g.clock() == 99);  // D - 1
    std::vector<std::int64_t> after;
    for (std::size_t i = 0; i < f.g.channel_count(); ++i) {
      after.push_back(f.g.channel_at(i).remain_ab);
      after.push_back(f.g.channel_at(i).remain_ba);
    }
    CHECK(after == remains);
    for (std::int64_t c : r.compensation) CHECK(c == 0);
  }

  SUBCASE("grief compensates every victim and closes the path") {
    std::mt19937_64 rng(9);
    Fixture f = line_fixture(3, 1000, 1'000'000, econ);
    const double gamma = 1e-4;
    std::vector<std::int64_t> w_before;
    for (int i = 0; i <= 3; ++i)
      w_before.push_back(wealth(f.g, static_cast<NodeId>(i)));
    const std::int64_t total = f.g.total_liquidity();
    const RunResult r = run_gp(f.g, f.path, gp_basic(gamma), econ,
                               ForwardPolicy{}, PayeeAction::grief, rng);
    CHECK(!r.success);
    CHECK(r.closures == 3);
    CHECK(r.mining_fees_paid == 3 * 154);
    CHECK(f.g.total_liquidity() == total);  // fees tracked outside channels

    // Victim U_{i-1} claims alpha_{i-1} + cgp_{i-1}; its own lock returns.
    REQUIRE(r.compensation.size() == 3);
    for (int i = 1; i <= 3; ++i)
      CHECK(r.compensation[static_cast<std::size_t>(i - 1)] ==
            r.penalty_locked[static_cast<std::size_t>(i - 1)]);
    // Net wealth: U0 +cgp_0; U1 +cgp_1-cgp_0; U2 +cgp_2-cgp_1; payee -cgp_2.
    const auto& cgp = r.penalty_locked;
    CHECK(wealth(f.g, 0) == w_before[0] + cgp[0]);
    CHECK(wealth(f.g, 1) == w_before[1] + cgp[1] - cgp[0]);
    CHECK(wealth(f.g, 2) == w_before[2] + cgp[2] - cgp[1]);
    CHECK(wealth(f.g, 3) == w_before[3] - cgp[2]);
    // The griefer's outflow telescopes to the whole chain.
    CHECK(cgp[2] == r.compensation[0] + (cgp[1] - cgp[0]) + (cgp[2] - cgp[1]));
    // Every channel on the path is closed.
    for (std::size_t i = 0; i < f.g.channel_count(); ++i)
      CHECK(!f.g.channel_at(i).open);
    // Timeout claims only after the contract timeout elapsed.
    CHECK(f.g.clock() == 300);  // t_0 of a 3-hop path with D = Delta = 100
  }
}

TEST_CASE("rational griefing dominance: cancel at the deadline costs nothing") {
  // Replaying both corrupt strategies on identical fixtures: waiting until
  // D - tick and cancelling keeps every alpha_i locked for the whole window
  // but transfers no penalty, while an actual grief forfeits the cgp chain.
  const auto econ = zero_fee();
  const double gamma = 2e-4;

  std::mt19937_64 rng1(21);
  Fixture wait_f = line_fixture(5, 20000, 50'000'000, econ);
  const NodeId payee = *wait_f.g.node("U05");
  const std::int64_t payee_before = wealth(wait_f.g, payee);
  RoutingEnvelope env1 = preprocess(wait_f.path, gp_basic(gamma), rng1);
  GpSession wait_s(wait_f.g, wait_f.path, env1, econ, ForwardPolicy{});
  REQUIRE(!wait_s.lock_round1());
  REQUIRE(!wait_s.lock_round2());
  // Until one tick before the deadline the victims' payments stay in flight.
  std::int64_t in_flight = 0;
  for (std::size_t i = 0; i < wait_f.g.channel_count(); ++i)
    in_flight += wait_f.g.channel_at(i).in_flight;
  std::int64_t expected = 0;
  for (const std::int64_t a : wait_s.result().payment_locked) expected += a;
  for (const std::int64_t z : wait_s.result().penalty_locked) expected += z;
  CHECK(in_flight == expected);
  wait_s.resolve(PayeeAction::wait_reject_at_deadline);
  CHECK(wait_f.g.clock() == 99);  // D - 1
  CHECK(wealth(wait_f.g, payee) == payee_before);  // zero penalty paid

  std::mt19937_64 rng2(21);
  Fixture grief_f = line_fixture(5, 20000, 50'000'000, econ);
  const RunResult grief_r = run_gp(grief_f.g, grief_f.path, gp_basic(gamma),
                                   econ, ForwardPolicy{}, PayeeAction::grief, rng2);
  const std::int64_t grief_delta =
      wealth(grief_f.g, *grief_f.g.node("U05")) - payee_before;
  CHECK(grief_delta == -grief_r.penalty_locked.back());
  CHECK(grief_delta < 0);
}

TEST_CASE("double resolution and bad preimages are rejected") {
  const auto econ = zero_fee();
  std::mt19937_64 rng(10);
  Fixture f = line_fixture(3, 1000, 1'000'000, econ);
  auto env = preprocess(f.path, gp_basic(1e-4), rng);
  GpSession s(f.g, f.path, std::move(env), econ, ForwardPolicy{});
  REQUIRE(!s.lock_round1());
  REQUIRE(!s.lock_round2());
  std::array<std::uint8_t, 32> junk{};
  CHECK(!s.verify_preimage(junk, true));
  CHECK(s.verify_preimage(s.envelope().hashes.x, true));
  CHECK(s.verify_preimage(s.envelope().hashes.r, false));
  s.resolve(PayeeAction::release_x);
  CHECK_THROWS(s.resolve(PayeeAction::release_x));
}

TEST_CASE("plain HTLC accept, reject and grief") {
  EconomicParams econ;  // default fees
  SUBCASE("accept credits the payee and fees accrue to intermediaries") {
    Fixture f = line_fixture(3, 10000, 1'000'000, econ);
    std::vector<std::int64_t> w;
    for (int i = 0; i <= 3; ++i) w.push_back(wealth(f.g, static_cast<NodeId>(i)));
    const RunResult r =
        run_htlc(f.g, f.path, econ, ForwardPolicy{}, PayeeAction::release_x);
    CHECK(r.success);
    CHECK(wealth(f.g, 3) == w[3] + 10000);
    CHECK(wealth(f.g, 1) - w[1] == std::llround(fee(econ, static_cast<double>(
                                       f.path.amounts[1]))));
    CHECK(wealth(f.g, 0) == w[0] - f.path.amounts[0]);
  }
  SUBCASE("reject restores everything") {
    Fixture f = line_fixture(3, 10000, 1'000'000, econ);
    std::vector<std::int64_t> w;
    for (int i = 0; i <= 3; ++i) w.push_back(wealth(f.g, static_cast<NodeId>(i)));
    const RunResult r =
        run_htlc(f.g, f.path, econ, ForwardPolicy{}, PayeeAction::release_r);
    CHECK(!r.success);
    for (int i = 0; i <= 3; ++i) CHECK(wealth(f.g, static_cast<NodeId>(i)) == w[i]);
  }
  SUBCASE("grief closes every victim channel; the griefer pays nothing") {
    Fixture f = line_fixture(3, 10000, 1'000'000, econ);
    std::vector<std::int64_t> w;
    for (int i = 0; i <= 3; ++i) w.push_back(wealth(f.g, static_cast<NodeId>(i)));
    const RunResult r =
        run_htlc(f.g, f.path, econ, ForwardPolicy{}, PayeeAction::grief);
    CHECK(!r.success);
    CHECK(r.closures == 3);
    CHECK(r.mining_fees_paid == 3 * 154);
    for (int i = 0; i <= 3; ++i) CHECK(wealth(f.g, static_cast<NodeId>(i)) == w[i]);
    for (std::size_t i = 0; i < f.g.channel_count(); ++i)
      CHECK(!f.g.channel_at(i).open);
  }
}

TEST_CASE("ledger events serialize as JSON lines") {
  const auto econ = zero_fee();
  std::mt19937_64 rng(11);
  Fixture f = line_fixture(2, 1000, 1'000'000, econ);
  const RunResult r = run_gp(f.g, f.path, gp_basic(1e-4), econ, ForwardPolicy{},
                             PayeeAction::release_x, rng);
  REQUIRE(!r.events.empty());
  const std::string line = to_json_line(r.events.front());
  CHECK(line.find("\"kind\":\"lock\"") != std::string::npos);
  CHECK(line.find("\"block\":0") != std::string::npos);
  CHECK(line.find("\"contract_id\"") != std::string::npos);
}

TEST_CASE("randomized conservation property across payee actions") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> kappa_d(1, 10);
  std::uniform_int_distribution<std::int64_t> amount_d(100, 80000);
  std::uniform_real_distribution<double> lg(-7, -3);
  const PayeeAction actions[] = {PayeeAction::release_x, PayeeAction::release_r,
                                 PayeeAction::grief,
                                 PayeeAction::wait_reject_at_deadline};
  const auto econ = zero_fee();
  int executed = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int kappa = kappa_d(rng);
    const std::int64_t amount = amount_d(rng);
    const double gamma = std::pow(10.0, lg(rng));
    Fixture f = line_fixture(kappa, amount, 50'000'000, econ);
    const std::int64_t total = f.g.total_liquidity();
    const PayeeAction action = actions[trial % 4];
    const RunResult r = run_gp(f.g, f.path, gp_basic(gamma), econ,
                               ForwardPolicy{}, action, rng);
    REQUIRE(!r.abort.has_value());
    ++executed;
    CHECK(f.g.total_liquidity() == total);
    if (action == PayeeAction::grief) {
      CHECK(r.mining_fees_paid == 154 * kappa);
      for (int i = 1; i <= kappa; ++i)
        CHECK(r.compensation[static_cast<std::size_t>(i - 1)] ==
              r.penalty_locked[static_cast<std::size_t>(i - 1)]);
    } else {
      for (std::int64_t c : r.compensation) CHECK(c == 0);
    }
  }
  CHECK(executed == 300);
}
