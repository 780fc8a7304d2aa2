#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pcn/contracts.hpp"
#include "pcn/economics.hpp"
#include "pcn/netmodel.hpp"

namespace pcn {

enum class Strategy { grief, wait_reject_at_deadline };

struct AttackerConfig {
  std::int64_t budget = 50'000'000;   // B_EX, sat
  std::int64_t alpha = 50'000;        // per-payment budget, sat
  std::int64_t setup_cost = 200'000;  // C: routing / channel-opening reserve, sat
  std::int64_t timeout_d = 100;       // D
  std::int64_t confirm_delta = 100;   // Delta
  int n = 20;                         // maximum allowed path length
  Strategy strategy = Strategy::wait_reject_at_deadline;
  // Auxiliary channels follow the snapshot's funding convention; the penalty
  // protocols presume dual funding.
  BalanceMode aux_mode = BalanceMode::split;
};

struct AttackInstance {
  NodeId corrupt = 0;
  bool feasible = false;
  bool opened_aux_channel = false;
  PaymentPath cycle;
  std::int64_t payment_value = 0;  // alpha for HTLC, v for the GP protocols
};

struct AttackOutcome {
  bool executed = false;
  int cycle_length = 0;
  std::int64_t victim_payment_locked = 0;
  std::int64_t victim_penalty_locked = 0;
  std::int64_t griefer_locked = 0;       // coins the corrupt node itself locks
  std::int64_t penalty_transferred = 0;  // griefer -> victims, net of its own refund
  int channels_closed = 0;
  std::optional<AbortInfo> abort;
  std::vector<LedgerEvent> events;
};

/// All corruption candidates (degree 1, then degree 2) ordered by ascending
/// degree then node name.
std::vector<NodeId> corrupt_candidates(const ChannelGraph& g);

/// Cheapest corruption targets: pendant vertices first, then degree-2 nodes,
/// ordered by ascending degree then node name. The count is floor(budget / L)
/// with L the bribe per attack instance.
std::vector<NodeId> select_corrupt_nodes(const ChannelGraph& g,
                                         const AttackerConfig& cfg,
                                         const EconomicParams& econ);

/// floor(budget / L): attack instances the budget pays for.
std::int64_t instance_budget(const AttackerConfig& cfg, const EconomicParams& econ);

/// Builds the self-payment cycle for one corrupt node, opening one auxiliary
/// channel (funded from C, toward the highest-degree non-adjacent node) when
/// the corrupt node is pendant. gp == nullptr plans a plain-HTLC attack.
AttackInstance plan_attack(ChannelGraph& g, NodeId corrupt, const GpParams* gp,
                           const AttackerConfig& cfg, const EconomicParams& econ);

/// Runs the attack payment with the payee acting per cfg.strategy.
/// resolve == false leaves every lock in place so instances accumulate.
AttackOutcome execute_attack(ChannelGraph& g, const AttackInstance& instance,
                             const GpParams* gp, const AttackerConfig& cfg,
                             const EconomicParams& econ,
                             const ForwardPolicy& policy, bool resolve,
                             std::mt19937_64& rng);

}  // namespace pcn
