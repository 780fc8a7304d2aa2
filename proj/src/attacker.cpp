#include "pcn/attacker.hpp"

#include <algorithm>
#include <cmath>

#include "pcn/games.hpp"
#include "pcn/penalty.hpp"

namespace pcn {

std::vector<NodeId> corrupt_candidates(const ChannelGraph& g) {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const int d = g.degree(u);
    if (d >= 1 && d <= 2) out.push_back(u);
  }
  std::sort(out.begin(), out.end(), [&](NodeId x, NodeId y) {
    const int dx = g.degree(x), dy = g.degree(y);
    if (dx != dy) return dx < dy;
    return g.name(x) < g.name(y);
  });
  return out;
}

std::int64_t instance_budget(const AttackerConfig& cfg, const EconomicParams& econ) {
  const double incentive = bribe(static_cast<double>(cfg.alpha),
                                 static_cast<double>(cfg.setup_cost),
                                 static_cast<double>(cfg.timeout_d), econ);
  if (incentive <= 0.0) return 0;
  return static_cast<std::int64_t>(
      std::floor(static_cast<double>(cfg.budget) / incentive));
}

std::vector<NodeId> select_corrupt_nodes(const ChannelGraph& g,
                                         const AttackerConfig& cfg,
                                         const EconomicParams& econ) {
  auto candidates = corrupt_candidates(g);
  const auto count = static_cast<std::size_t>(
      std::max<std::int64_t>(0, instance_budget(cfg, econ)));
  if (candidates.size() > count) candidates.resize(count);
  return candidates;
}

namespace {

struct DemandContext {
  const AttackerConfig* cfg;
  const GpParams* gp;
  const EconomicParams* econ;
};

std::int64_t attack_value_for_length(const DemandContext& c, int length) {
  if (!c.gp || c.gp->gamma == 0.0) return c.cfg->alpha;
  const double v = attack_value_exact(static_cast<double>(c.cfg->alpha),
                                      c.gp->gamma, length, c.cfg->timeout_d,
                                      c.cfg->confirm_delta, *c.econ);
  return static_cast<std::int64_t>(std::floor(v));
}

CycleDemands cycle_demands(int length, const void* ctx) {
  const auto& c = *static_cast<const DemandContext*>(ctx);
  CycleDemands d;
  const std::int64_t value = attack_value_for_length(c, length);
  if (value <= 0) {  // degenerate budget: nothing lockable
    d.forward.assign(static_cast<std::size_t>(length), 1);
    d.backward.assign(static_cast<std::size_t>(length) + 1, 0);
    return d;
  }
  const auto amounts = hop_amounts(value, length, *c.econ);
  d.forward = amounts;
  d.backward.assign(static_cast<std::size_t>(length) + 1, 0);
  if (c.gp && c.gp->gamma > 0.0) {
    const TimeoutSchedule sched =
        timeout_schedule(length, c.cfg->timeout_d, c.cfg->confirm_delta);
    double run = 0.0;  // sum_{j<=i-1} alpha_j t_j
    for (int i = 1; i <= length; ++i) {
      run += static_cast<double>(amounts[static_cast<std::size_t>(i - 1)]) *
             static_cast<double>(sched.t[static_cast<std::size_t>(i - 1)]);
      d.backward[static_cast<std::size_t>(i)] = std::llround(c.gp->gamma * run);
    }
  }
  return d;
}

}  // namespace

AttackInstance plan_attack(ChannelGraph& g, NodeId corrupt, const GpParams* gp,
                           const AttackerConfig& cfg, const EconomicParams& econ) {
  AttackInstance inst;
  inst.corrupt = corrupt;

  int target = cfg.n;
  if (gp && gp->n_max > 0)
    target = std::min<std::int64_t>(target, gp->n_max);

  if (g.degree(corrupt) < 2 && cfg.setup_cost > 0) {
    // A pendant node cannot host a simple cycle: open one channel toward the
    // highest-degree node not already adjacent, funded from C.
    bool found = false;
    NodeId peer = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
      if (u == corrupt || g.channel_between(corrupt, u)) continue;
      if (g.degree(u) == 0) continue;
      if (!found || g.degree(u) > g.degree(peer) ||
          (g.degree(u) == g.degree(peer) && g.name(u) < g.name(peer))) {
        peer = u;
        found = true;
      }
    }
    if (found) {
      g.add_channel(corrupt, peer, cfg.setup_cost, cfg.aux_mode, g.clock());
      inst.opened_aux_channel = true;
    }
  }
  if (g.degree(corrupt) < 2) return inst;

  DemandContext ctx{&cfg, gp, &econ};
  auto cycle = find_attack_cycle(g, corrupt, target, &cycle_demands, &ctx);
  if (!cycle) return inst;

  const int length = static_cast<int>(cycle->size()) - 1;
  inst.payment_value = attack_value_for_length(ctx, length);
  if (inst.payment_value <= 0) return inst;
  inst.cycle.hops = std::move(*cycle);
  inst.cycle.amounts = hop_amounts(inst.payment_value, length, econ);
  inst.cycle.timeouts = timeout_schedule(length, cfg.timeout_d, cfg.confirm_delta).t;
  inst.feasible = true;
  return inst;
}

AttackOutcome execute_attack(ChannelGraph& g, const AttackInstance& instance,
                             const GpParams* gp, const AttackerConfig& cfg,
                             const EconomicParams& econ,
                             const ForwardPolicy& policy, bool resolve,
                             std::mt19937_64& rng) {
  AttackOutcome out;
  if (!instance.feasible) return out;
  const int kappa = instance.cycle.length();
  out.cycle_length = kappa;

  const PayeeAction action = cfg.strategy == Strategy::grief
                                 ? PayeeAction::grief
                                 : PayeeAction::wait_reject_at_deadline;

  RunResult run;
  if (gp) {
    GpParams attack_params = *gp;
    attack_params.randomize_phi = false;  // the attacker minimizes its own cgp
    RoutingEnvelope env = preprocess(instance.cycle, attack_params, rng);
    GpSession session(g, instance.cycle, std::move(env), econ, policy);
    if (!session.lock_round1() && !session.lock_round2() && resolve)
      session.resolve(action);
    run = session.take_result();
  } else {
    if (resolve) {
      run = run_htlc(g, instance.cycle, econ, policy, action);
    } else {
      run = lock_htlc(g, instance.cycle, econ, policy);
    }
  }

  out.abort = run.abort;
  out.events = std::move(run.events);
  if (run.abort) return out;
  out.executed = true;
  out.channels_closed = run.closures;

  // Positions 1..kappa-1 are victims; 0 and kappa are the corrupt node.
  for (int i = 1; i < kappa; ++i)
    out.victim_payment_locked +=
        run.payment_locked[static_cast<std::size_t>(i)];
  out.griefer_locked += run.payment_locked.empty() ? 0 : run.payment_locked[0];
  if (!run.penalty_locked.empty()) {
    for (int i = 1; i < kappa; ++i)
      out.victim_penalty_locked +=
          run.penalty_locked[static_cast<std::size_t>(i - 1)];
    out.griefer_locked += run.penalty_locked[static_cast<std::size_t>(kappa - 1)];
  }
  if (resolve && action == PayeeAction::grief && !run.compensation.empty()) {
    // Net outflow: the corrupt payee's cgp chain minus the cgp_0 it reclaims
    // at the payer end of its own self-payment.
    out.penalty_transferred =
        run.penalty_locked[static_cast<std::size_t>(kappa - 1)] -
        run.compensation[0];
  }
  return out;
}

}  // namespace pcn
