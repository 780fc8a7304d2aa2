#pragma once

#include <cstdint>
#include <vector>

#include "pcn/economics.hpp"

namespace pcn {

enum class Protocol { HTLC, HTLC_GP };
enum class Nature { corrupt, uncorrupt };

/// Two-party sequential game between the forwarder U_{n-1} and the terminal
/// node U_n. The corrupt branch models a self-payment along the maximum
/// allowed path length n; the uncorrupt branch an honest transfer of alpha.
struct GameSpec {
  Protocol protocol = Protocol::HTLC;
  double alpha = 15000;      // transfer value / attacker budget per payment, sat
  int n = 20;                // maximum allowed path length
  int kappa = 20;            // actual path length (<= n)
  std::int64_t timeout_d = 100;   // D
  std::int64_t confirm_delta = 100;  // Delta
  double theta = 0.0;        // belief that the counterparty is corrupt
  double mix_q = 0.7;        // corrupt mixes Wait&Reject (q) vs Grief (1-q); HTLC only
  EconomicParams econ;
  double remain_fwd = 0.0;   // residual remain(U_{n-1}, U_n)
  double remain_bwd = 0.0;   // residual remain(U_n, U_{n-1}); 0 for corrupt HTLC
  double t_tilde = 0.0;      // channel lifetime left after the contract window
  double setup_cost = 0.0;   // attacker's auxiliary cost C
  double gamma = 0.0;        // griefing-penalty rate (HTLC_GP only)
};

struct Action {
  enum class Kind { NF, F, Ac, Rt, WaitAc, WaitRt, Gr };
  Kind kind = Kind::NF;
  std::int64_t t = 0;  // wait length in blocks for WaitAc / WaitRt

  static Action nf() { return {Kind::NF, 0}; }
  static Action fwd() { return {Kind::F, 0}; }
  static Action accept() { return {Kind::Ac, 0}; }
  static Action reject() { return {Kind::Rt, 0}; }
  static Action wait_accept(std::int64_t t) { return {Kind::WaitAc, t}; }
  static Action wait_reject(std::int64_t t) { return {Kind::WaitRt, t}; }
  static Action grief() { return {Kind::Gr, 0}; }
  bool operator==(const Action&) const = default;
};

struct PayoffPair {
  double first = 0.0;   // U_{n-1}
  double second = 0.0;  // U_n
};

/// Derived quantities shared by the payoff branches.
struct GameDerived {
  double fee_fwd = 0.0;       // f(alpha_{n-1}) for the honest forwarded amount
  double honest_fwd = 0.0;    // alpha_{n-1}
  double attack_fwd = 0.0;    // alpha_{n-1} (HTLC) or v_{n-1} (HTLC_GP)
  double attack_value = 0.0;  // alpha (HTLC) or v (HTLC_GP)
  double sum_fees = 0.0;      // fees the corrupt payee owes the intermediaries
  double penalty_honest = 0.0;  // Z locked by an uncorrupt U_n (HTLC_GP)
  double penalty_attack = 0.0;  // Z_v locked by the corrupt payee (HTLC_GP)
  double bribe = 0.0;           // L
};
GameDerived derive(const GameSpec& spec);

/// Self-payment value with exact fees: solves v_0(v) + Z_v(v) = alpha.
/// Reduces to alpha / (1 + gamma * sum t_j) when fees are zero.
double attack_value_exact(double alpha, double gamma, int hops,
                          std::int64_t timeout_d, std::int64_t confirm_delta,
                          const EconomicParams& econ);

/// Net profit of the terminal node for keeping the locked coins unutilized
/// until block t (one block tick stands in for the instant just before D).
double eta(const GameSpec& spec, std::int64_t t);

PayoffPair payoff(const GameSpec& spec, Nature nature, Action a1, Action a2);

double expected_payoff_forward(const GameSpec& spec);
double expected_payoff_noforward(const GameSpec& spec);

/// Closed-form belief threshold below which the forwarder plays F.
double cutoff_theta(const GameSpec& spec);

/// All payoff-maximizing responses of the second mover given a1 = F,
/// enumerated over {Ac, Rt, Gr} and WaitAc/WaitRt on the block grid.
std::vector<Action> best_response(const GameSpec& spec, Nature nature);

}  // namespace pcn
