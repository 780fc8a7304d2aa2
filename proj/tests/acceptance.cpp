// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Tolerances are pinned in code; measured values print next
// to every verdict so a failure is diagnosable from the log alone.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pcn/attacker.hpp"
#include "pcn/contracts.hpp"
#include "pcn/economics.hpp"
#include "pcn/experiments.hpp"
#include "pcn/games.hpp"
#include "pcn/netmodel.hpp"
#include "pcn/penalty.hpp"

using namespace pcn;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void report(int criterion, bool ok, const std::string& detail, double secs,
            double budget_secs) {
  const bool in_budget = secs < budget_secs;
  if (!ok || !in_budget) ++failures;
  std::printf("criterion %d: %s — %s (%.2fs%s)\n", criterion,
              ok && in_budget ? "PASS" : "FAIL", detail.c_str(), secs,
              in_budget ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// --- criterion 1: Table 2 reproduction ------------------------------------
void criterion1() {
  Timer t;
  const auto rows = table2_grid(100, 100);
  int gamma_off = 0, len_off = 0;
  std::string offenders;
  for (const auto& r : rows) {
    if (std::abs(r.gamma - r.gamma_published) > 0.05 * r.gamma_published) {
      ++gamma_off;
      offenders += fmt(" (k=%g,zeta=%g: computed %.3e vs published %.2e)", r.k,
                       r.zeta, r.gamma, r.gamma_published);
    }
    if (r.n_max != r.n_max_published) ++len_off;
  }
  const bool ok = gamma_off == 0 && len_off == 0;
  std::string detail = fmt(
      "gamma column within 5%% for %d/27 rows, path lengths exact for %d/27",
      27 - gamma_off, 27 - len_off);
  if (!ok)
    detail += "; the published cells" + offenders +
              " contradict the rate closed form 2*zeta^2/(2*zeta*D+Delta*(k-zeta)),"
              " which the remaining 25 rows and the published anchors satisfy";
  report(1, ok, detail, t.seconds(), 1.0);
}

// --- criterion 2: Claim 1 oracle equivalence -------------------------------
void criterion2() {
  Timer t;
  double worst = 0.0;
  for (double gamma : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3})
    for (int n = 2; n <= 20; ++n) {
      const double cf = loss_percent_htlcgp(gamma, n, 100, 100);
      const double oc = loss_oracle(gamma, n, n, 100, 100);
      worst = std::max(worst, std::abs(cf - oc) / std::abs(oc));
    }
  report(2, worst <= 1e-9,
         fmt("closed form vs direct-summation oracle, worst rel err %.2e (<= 1e-9)",
             worst),
         t.seconds(), 1.0);
}

// --- criterion 3: Claim 2 oracle check -------------------------------------
void criterion3() {
  Timer t;
  double worst = 0.0;
  int points = 0;
  const auto rows = table2_grid(100, 100);
  for (const auto& r : rows) {
    if (r.n_max < 2 || r.n_max > 20) continue;
    const double oc = loss_oracle(r.gamma, r.n_max, 20, 100, 100);
    const double cf = loss_percent_gpzeta(r.gamma, r.n_max, 20, 100, 100,
                                          GpZetaVariant::derivation);
    worst = std::max(worst, std::abs(cf - oc) / std::abs(oc));
    ++points;
  }
  report(3, worst <= 1e-6 && points == 27,
         fmt("derivation-variant closed form vs oracle over %d rows, worst rel "
             "err %.2e (<= 1e-6); the statement's (2n~)Delta/3 term differs "
             "from its own derivation's (2n~-1)Delta/3 and does not match",
             points, worst),
         t.seconds(), 1.0);
}

// --- criterion 4: equilibrium cutoffs --------------------------------------
double bisect_cutoff(GameSpec spec) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    spec.theta = 0.5 * (lo + hi);
    (expected_payoff_forward(spec) > 0 ? lo : hi) = spec.theta;
  }
  return 0.5 * (lo + hi);
}

void criterion4() {
  Timer t;
  GameSpec base;  // amount 15000, M = 154, q = 0.7, D = 100, n = 20
  base.alpha = 15000;
  base.n = base.kappa = 20;
  base.mix_q = 0.7;
  base.econ.rate = 0.2;
  base.setup_cost = 100;

  GameSpec htlc = base;
  htlc.protocol = Protocol::HTLC;
  GameSpec gp = base;
  gp.protocol = Protocol::HTLC_GP;
  gp.gamma = 1e-5;

  const double c_htlc = cutoff_theta(htlc);
  const double c_gp = cutoff_theta(gp);
  const double b_htlc = bisect_cutoff(htlc);
  const double b_gp = bisect_cutoff(gp);

  const bool flips_ok = std::abs(c_htlc - 0.025) <= 0.01 &&
                        std::abs(c_gp - 0.7) <= 0.1;
  const bool roots_ok =
      std::abs(c_htlc - b_htlc) <= 1e-12 && std::abs(c_gp - b_gp) <= 1e-12;
  report(4, flips_ok && roots_ok,
         fmt("HTLC flip %.4f (0.025 +/- 0.01), HTLC-GP flip %.4f (0.7 +/- 0.1); "
             "closed form vs bisection |diff| = %.1e / %.1e (<= 1e-12)",
             c_htlc, c_gp, std::abs(c_htlc - b_htlc), std::abs(c_gp - b_gp)),
         t.seconds(), 5.0);
}

// --- criterion 5: protocol conservation properties --------------------------
void criterion5() {
  Timer t;
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> kappa_d(1, 10);
  std::uniform_int_distribution<std::int64_t> amount_d(100, 90000);
  std::uniform_real_distribution<double> lg(-7, -3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EconomicParams econ;
  econ.base_fee = 0;
  econ.fee_rate = 0;

  int runs = 0, guard_hops = 0, aborted_guard = 0;
  bool ok = true;
  std::string why;
  const PayeeAction actions[] = {PayeeAction::release_x, PayeeAction::release_r,
                                 PayeeAction::grief,
                                 PayeeAction::wait_reject_at_deadline};
  for (int trial = 0; trial < 1400 && ok; ++trial) {
    const int kappa = kappa_d(rng);
    const std::int64_t amount = amount_d(rng);
    const double gamma = std::pow(10.0, lg(rng));

    ChannelGraph g;
    std::vector<NodeId> ids;
    for (int i = 0; i <= kappa; ++i) ids.push_back(g.add_node("N" + std::to_string(i)));
    for (int i = 0; i < kappa; ++i)
      g.add_channel(ids[static_cast<std::size_t>(i)],
                    ids[static_cast<std::size_t>(i + 1)], 80'000'000,
                    BalanceMode::split);
    PaymentPath path;
    path.hops = ids;
    path.amounts = hop_amounts(amount, kappa, econ);
    path.timeouts = timeout_schedule(kappa, 100, 100).t;

    GpParams params;
    params.gamma = gamma;
    params.n_max = 20;
    params.confirm_delta = 100;
    ForwardPolicy policy;
    // Half the runs exercise the minimum-compensation guard with a random
    // zeta; gamma * t_i >= zeta must then hold on every accepted hop.
    if (unit(rng) < 0.5) {
      params.zeta = gamma * 100.0 * (0.2 + 1.3 * unit(rng));  // around gamma*D
      policy.enforce_min_comp = true;
    }

    const std::int64_t total = g.total_liquidity();
    const PayeeAction action = actions[trial % 4];
    std::mt19937_64 run_rng(rng());
    RoutingEnvelope env = preprocess(path, params, run_rng);
    GpSession session(g, path, env, econ, policy);
    auto abort = session.lock_round1();
    if (!abort) abort = session.lock_round2();
    if (!abort) session.resolve(action);
    const RunResult r = session.take_result();

    if (g.total_liquidity() != total) {
      ok = false;
      why = fmt("liquidity drifted on trial %d", trial);
      break;
    }
    if (r.abort) {
      if (r.abort->reason != std::string(kMinCompensationViolated)) {
        ok = false;
        why = fmt("unexpected abort %s on trial %d", r.abort->reason.c_str(), trial);
        break;
      }
      // The guard must genuinely be violated at some hop.
      bool violated = false;
      for (int i = 1; i < kappa; ++i)
        if (gamma * static_cast<double>(path.timeouts[static_cast<std::size_t>(i)]) <
            params.zeta)
          violated = true;
      if (kappa >= 1 && env.cgp_real[0] < params.zeta * static_cast<double>(path.amounts[0]) * (1 - 1e-9))
        violated = true;
      if (!violated) {
        ok = false;
        why = fmt("guard abort without violation on trial %d", trial);
        break;
      }
      ++aborted_guard;
      continue;
    }
    ++runs;
    // Accepted hops satisfy the guaranteed-minimum inequality.
    if (policy.enforce_min_comp)
      for (int i = 1; i < kappa; ++i) {
        ++guard_hops;
        if (gamma * static_cast<double>(path.timeouts[static_cast<std::size_t>(i)]) <
            params.zeta * (1 - 1e-9)) {
          ok = false;
          why = fmt("accepted hop below the guaranteed minimum on trial %d", trial);
        }
      }
    if (action == PayeeAction::grief) {
      // The griefer's chain transfers exactly; every victim claims its cgp.
      for (int i = 1; i <= kappa; ++i)
        if (r.compensation[static_cast<std::size_t>(i - 1)] !=
            r.penalty_locked[static_cast<std::size_t>(i - 1)]) {
          ok = false;
          why = fmt("grief compensation mismatch on trial %d", trial);
        }
      if (r.mining_fees_paid != 154 * kappa) {
        ok = false;
        why = fmt("mining fee accounting off on trial %d", trial);
      }
    } else {
      for (std::int64_t c : r.compensation)
        if (c != 0) {
          ok = false;
          why = fmt("penalty moved without grief on trial %d", trial);
        }
    }
  }
  ok = ok && runs >= 1000;
  report(5, ok,
         ok ? fmt("%d randomized runs conserved balances; %d guard-enforced hops "
                  "all met gamma*t >= zeta; %d chains aborted on the guard as "
                  "required",
                  runs, guard_hops, aborted_guard)
            : why,
         t.seconds(), 30.0);
}

// --- criterion 6: capacity-locked envelope ----------------------------------
void criterion6() {
  Timer t;
  ExperimentConfig cfg;
  cfg.snapshot = "synthetic";
  cfg.synthetic_nodes = 2000;
  cfg.seed = 42;
  cfg.jobs = 4;
  const double gamma_row = penalty_rate(0.25, 0.025, 100, 100);
  cfg.gamma_sweep = {1e-7, 1e-6, 1e-5, gamma_row, 1e-4, 1e-3};
  cfg.kz_grid = {{0.25, 0.025}};
  const auto rows = run_capacity_experiment(cfg);

  double r_1e7 = -1, r_1e3 = -1, r_gp_row = -1, r_zeta = -1;
  bool monotone = true;
  double prev = 2.0;
  for (const auto& r : rows) {
    if (r.k > 0) {
      r_zeta = r.ratio_locked;
      continue;
    }
    if (r.ratio_locked > prev + 1e-9) monotone = false;
    prev = r.ratio_locked;
    if (r.gamma == 1e-7) r_1e7 = r.ratio_locked;
    if (r.gamma == 1e-3) r_1e3 = r.ratio_locked;
    if (r.gamma == gamma_row) r_gp_row = r.ratio_locked;
  }
  const bool high_ok = r_1e7 >= 0.85;
  const bool low_ok = r_1e3 <= 0.30;
  const bool zeta_ok = r_zeta <= 0.33 + 0.07;
  const bool gp_row_ok = std::abs(r_gp_row - 0.40) <= 0.07;
  const bool ok = monotone && high_ok && low_ok && zeta_ok && gp_row_ok;
  std::string detail = fmt(
      "ratio(1e-7)=%.3f (>=0.85 %s), monotone %s, ratio(1e-3)=%.3f (<=0.30 %s), "
      "zeta-row=%.3f (<=0.40 %s), gp-at-same-gamma=%.3f (0.40+/-0.07 %s)",
      r_1e7, high_ok ? "ok" : "VIOLATED", monotone ? "ok" : "VIOLATED", r_1e3,
      low_ok ? "ok" : "VIOLATED", r_zeta, zeta_ok ? "ok" : "VIOLATED", r_gp_row,
      gp_row_ok ? "ok" : "VIOLATED");
  if (!ok)
    detail +=
        "; note: with n=20, D=Delta=100 the published loss formula caps the "
        "HTLC-GP loss at 1/3 (ratio floor 2/3) for every gamma, so the "
        "published 20-30% empirical ratios cannot be produced by a simulation "
        "that also satisfies criteria 2-3";
  report(6, ok, detail, t.seconds(), 300.0);
}

// --- criterion 7: success-rate ratio ----------------------------------------
void criterion7() {
  Timer t;
  ExperimentConfig cfg;
  cfg.snapshot = "synthetic";
  cfg.synthetic_nodes = 2000;
  cfg.seed = 42;
  cfg.jobs = 4;
  cfg.workload = 3000;
  cfg.gamma_sweep = {1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
  const auto rows = run_success_rate(cfg);
  bool monotone = true;
  double prev = 2.0;
  for (const auto& r : rows) {
    if (r.success_ratio > prev + 1e-9) monotone = false;
    prev = r.success_ratio;
  }
  const double hi = rows.front().success_ratio;
  const double lo = rows.back().success_ratio;
  report(7, monotone && hi >= 0.95 && lo <= 0.70,
         fmt("ratio(1e-7)=%.3f (>=0.95), ratio(1e-3)=%.3f (<=0.70), monotone %s",
             hi, lo, monotone ? "ok" : "VIOLATED"),
         t.seconds(), 300.0);
}

// --- criterion 8: rational-mode gating ---------------------------------------
void criterion8() {
  Timer t;
  ScalabilityConfig cfg;
  cfg.base.snapshot = "synthetic";
  cfg.base.synthetic_nodes = 1000;
  cfg.base.seed = 42;
  cfg.base.workload = 500;
  cfg.request_counts = {500};
  cfg.gamma = 1e-5;
  cfg.mode = ParticipantMode::rational;

  bool ok = true;
  std::string detail;
  cfg.theta = 0.05;
  for (const auto& r : run_scalability(cfg)) {
    if (r.protocol == "htlc" && r.completed != 0) ok = false;
    if (r.protocol == "htlc-gp" && r.completed == 0) ok = false;
    detail += fmt("%s@0.05=%d ", r.protocol.c_str(), r.completed);
  }
  for (double theta : {0.3, 0.7}) {
    cfg.theta = theta;
    for (const auto& r : run_scalability(cfg)) {
      if (r.protocol == "htlc" && r.completed != 0) ok = false;
      if (r.protocol != "htlc" && r.completed == 0) ok = false;
      if (theta == 0.7)
        detail += fmt("%s@0.7=%d ", r.protocol.c_str(), r.completed);
    }
  }
  report(8, ok, "completions: " + detail, t.seconds(), 60.0);
}

// --- criterion 9: economics unit suite ----------------------------------------
double truncated_mean_oracle(double lambda, std::int64_t trunc) {
  double mean = 0.0;
  for (std::int64_t x = 1; x <= trunc; ++x)
    mean += static_cast<double>(x) *
            std::exp(-lambda + static_cast<double>(x) * std::log(lambda) -
                     std::lgamma(static_cast<double>(x) + 1.0));
  return mean;
}

void criterion9() {
  Timer t;
  EconomicParams p;
  const double fee_per_tx = p.base_fee + p.fee_rate * 1000.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(0.01, 100.0);
  std::uniform_int_distribution<std::int64_t> trunc(1, 10000);
  double worst = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double lambda = lam(rng);
    const std::int64_t J = trunc(rng);
    const double got = opportunity_cost(lambda, 1.0, static_cast<double>(J) * 1000.0, p);
    const double want = truncated_mean_oracle(lambda, J) * fee_per_tx;
    worst = std::max(worst, std::abs(got - want) /
                                std::max(1.0, std::max(std::abs(got), std::abs(want))));
  }
  const bool zeros = opportunity_cost(0.5, 10, 0, p) == 0.0 &&
                     opportunity_cost(0.5, 0, 5000, p) == 0.0;
  const double tail = opportunity_cost(5.0, 1.0, 200'000, p) / fee_per_tx;
  const bool limit_ok = std::abs(tail - 5.0) < 1e-9;
  report(9, worst <= 1e-12 && zeros && limit_ok,
         fmt("oracle agreement worst rel err %.2e (<= 1e-12); O(.,.,0)=0 and "
             "O(.,0,.)=0 %s; truncated mean at rt=5, J=200 within %.1e of rt",
             worst, zeros ? "hold" : "VIOLATED", std::abs(tail - 5.0)),
         t.seconds(), 1.0);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
  return failures;
}
