#pragma once

#include <cstdint>
#include <vector>

namespace pcn {

/// Fee policy and cost model shared by every protocol run.
/// Amounts are satoshi; time is measured in blocks.
struct EconomicParams {
  double base_fee = 1.0;      // flat fee per forwarded payment, sat
  double fee_rate = 1e-6;     // proportional fee rate
  std::int64_t per_tx_val = 1000;  // expected size of a routed transaction, sat
  double mining_fee = 154.0;  // on-chain fee for closing a channel (M), sat
  double rate = 0.2;          // payments a node processes per block (r_U)
};

/// Processing fee charged for forwarding `amount` sat.
double fee(const EconomicParams& p, double amount);

/// Expected fee revenue foregone while `val` sat stay locked for `t` blocks,
/// with arrivals Poisson(rate * t) truncated at J = floor(val / per_tx_val).
/// Computed with the multiplicative term recurrence, never raw factorials.
double opportunity_cost(double rate, double t, double val,
                        const EconomicParams& p);

/// Bribe an attacker must offer per attack instance:
/// L = alpha + C + 2 * O(rate, D, alpha).
double bribe(double alpha, double aux_cost, double timeout_d,
             const EconomicParams& p);

/// Per-hop HTLC timeout schedule for a path of `hops` hops:
/// t_i = D + (hops - 1 - i) * Delta, so t_{hops-1} = D and t_{i-1} = t_i + Delta.
struct TimeoutSchedule {
  std::int64_t least_timeout = 0;  // D
  std::int64_t confirm_delay = 0;  // Delta
  std::vector<std::int64_t> t;     // t_0 .. t_{hops-1}
  std::int64_t total = 0;          // sum of all t_i
};

TimeoutSchedule timeout_schedule(int hops, std::int64_t timeout_d,
                                 std::int64_t confirm_delta);

}  // namespace pcn
