#include "pcn/games.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcn/penalty.hpp"

namespace pcn {

namespace {

// Walks the fee recursion from the payee end without materializing the hop
// amounts: a_{hops-1} = delivered, a_{j-1} = a_j + fee(a_j).
struct ChainSums {
  double first_amount = 0;  // a_0
  double collateral = 0;    // sum a_j * t_j
  double fees = 0;          // sum_{j >= 1} fee(a_j)
};

ChainSums chain_sums(double delivered, int hops, std::int64_t timeout_d,
                     std::int64_t confirm_delta, const EconomicParams& econ) {
  ChainSums s;
  double a = delivered;
  for (int j = hops - 1; j >= 0; --j) {
    const double t = static_cast<double>(timeout_d) +
                     static_cast<double>(hops - 1 - j) *
                         static_cast<double>(confirm_delta);
    s.collateral += a * t;
    if (j > 0) {
      const double f = fee(econ, a);
      s.fees += f;
      a += f;
    }
  }
  s.first_amount = a;
  return s;
}

}  // namespace

double attack_value_exact(double alpha, double gamma, int hops,
                          std::int64_t timeout_d, std::int64_t confirm_delta,
                          const EconomicParams& econ) {
  if (alpha <= 0) return 0.0;
  if (gamma == 0.0 && econ.base_fee == 0.0 && econ.fee_rate == 0.0) return alpha;
  // total(v) = v_0(v) + Z_v(v) is strictly increasing in v.
  auto total = [&](double v) {
    const ChainSums s = chain_sums(v, hops, timeout_d, confirm_delta, econ);
    return s.first_amount + gamma * s.collateral;
  };
  double lo = 0.0, hi = alpha;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) <= alpha ? lo : hi) = mid;
    if (hi - lo <= 1e-12 * alpha) break;
  }
  return lo;
}

GameDerived derive(const GameSpec& spec) {
  if (spec.theta < 0 || spec.theta > 1 || spec.mix_q < 0 || spec.mix_q > 1 ||
      spec.kappa > spec.n || spec.gamma < 0)
    throw std::invalid_argument("GameSpec invariant violated");
  GameDerived d;
  d.honest_fwd = spec.alpha;  // a_{n-1} of the honest chain
  d.fee_fwd = fee(spec.econ, d.honest_fwd);
  if (spec.protocol == Protocol::HTLC) {
    d.attack_value = spec.alpha;
    d.attack_fwd = spec.alpha;
    d.sum_fees = chain_sums(spec.alpha, spec.n, spec.timeout_d,
                            spec.confirm_delta, spec.econ)
                     .fees;
  } else {
    d.attack_value = attack_value_exact(spec.alpha, spec.gamma, spec.n,
                                        spec.timeout_d, spec.confirm_delta,
                                        spec.econ);
    d.attack_fwd = d.attack_value;
    const ChainSums honest = chain_sums(spec.alpha, spec.n, spec.timeout_d,
                                        spec.confirm_delta, spec.econ);
    const ChainSums attack = chain_sums(d.attack_value, spec.n, spec.timeout_d,
                                        spec.confirm_delta, spec.econ);
    d.sum_fees = attack.fees;
    d.penalty_honest = spec.gamma * honest.collateral;
    d.penalty_attack = spec.gamma * attack.collateral;
  }
  d.bribe = bribe(spec.alpha, spec.setup_cost, static_cast<double>(spec.timeout_d),
                  spec.econ);
  return d;
}

double eta(const GameSpec& spec, std::int64_t t) {
  if (t <= 0 || t > spec.timeout_d)
    throw std::invalid_argument("eta: t out of (0, D]");
  const GameDerived d = derive(spec);
  // The corrupt payee keeps alpha_{n-1} (HTLC) or the whole budget alpha
  // (HTLC_GP, payment plus penalty) locked while it stalls.
  const double locked =
      spec.protocol == Protocol::HTLC ? d.attack_fwd : spec.alpha;
  if (t < spec.timeout_d - 1)
    return -spec.setup_cost -
           opportunity_cost(spec.econ.rate, static_cast<double>(t), locked, spec.econ);
  return d.bribe - spec.setup_cost -
         opportunity_cost(spec.econ.rate, static_cast<double>(spec.timeout_d),
                          locked, spec.econ);
}

PayoffPair payoff(const GameSpec& spec, Nature nature, Action a1, Action a2) {
  if (a1.kind == Action::Kind::NF) return {0.0, 0.0};
  if (a1.kind != Action::Kind::F)
    throw std::invalid_argument("payoff: first mover plays NF or F");
  const GameDerived d = derive(spec);
  const bool gp = spec.protocol == Protocol::HTLC_GP;
  const double rate = spec.econ.rate;
  const double mining = spec.econ.mining_fee;
  const auto ocost = [&](double t, double val) {
    return opportunity_cost(rate, t, val, spec.econ);
  };
  const double t_last = static_cast<double>(spec.timeout_d);  // t_{n-1} = D

  if (nature == Nature::uncorrupt) {
    const double a_fwd = d.honest_fwd;
    const double z = d.penalty_honest;
    switch (a2.kind) {
      case Action::Kind::Ac:
        return {d.fee_fwd, a_fwd};
      case Action::Kind::Rt:
        return {0.0, 0.0};
      case Action::Kind::WaitAc: {
        const double t = static_cast<double>(a2.t);
        return {d.fee_fwd - ocost(t, a_fwd),
                a_fwd - ocost(t, a_fwd) - (gp ? ocost(t, z) : 0.0)};
      }
      case Action::Kind::WaitRt: {
        const double t = static_cast<double>(a2.t);
        return {-ocost(t, a_fwd), -ocost(t, a_fwd) - (gp ? ocost(t, z) : 0.0)};
      }
      case Action::Kind::Gr: {
        const double first = -ocost(t_last, a_fwd) -
                             ocost(spec.t_tilde, spec.remain_fwd) - mining +
                             (gp ? z : 0.0);
        const double second = -ocost(spec.t_tilde, spec.remain_bwd) -
                              ocost(t_last, a_fwd) -
                              (gp ? ocost(t_last, z) + z : 0.0);
        return {first, second};
      }
      default:
        throw std::invalid_argument("payoff: invalid second-mover action");
    }
  }

  // Corrupt terminal node: self-payment of d.attack_value over n hops.
  const double v_fwd = d.attack_fwd;
  const double zv = d.penalty_attack;
  switch (a2.kind) {
    case Action::Kind::Ac:
      return {fee(spec.econ, v_fwd), -spec.setup_cost - d.sum_fees};
    case Action::Kind::Rt:
      return {0.0, -spec.setup_cost};
    case Action::Kind::WaitAc: {
      const double t = static_cast<double>(a2.t);
      return {fee(spec.econ, v_fwd) - ocost(t, v_fwd),
              -d.sum_fees + eta(spec, a2.t)};
    }
    case Action::Kind::WaitRt:
      return {-ocost(static_cast<double>(a2.t), v_fwd), eta(spec, a2.t)};
    case Action::Kind::Gr: {
      const double first = -ocost(t_last, v_fwd) -
                           ocost(spec.t_tilde, spec.remain_fwd) - mining +
                           (gp ? zv : 0.0);
      const double second = eta(spec, spec.timeout_d) - (gp ? zv : 0.0) -
                            ocost(spec.t_tilde, spec.remain_bwd);
      return {first, second};
    }
    default:
      throw std::invalid_argument("payoff: invalid second-mover action");
  }
}

double expected_payoff_forward(const GameSpec& spec) {
  const GameDerived d = derive(spec);
  const auto ocost = [&](double t, double val) {
    return opportunity_cost(spec.econ.rate, t, val, spec.econ);
  };
  const double t_d = static_cast<double>(spec.timeout_d);
  if (spec.protocol == Protocol::HTLC) {
    // Corrupt mixes Wait&Reject at D-delta (prob q) with Grief (prob 1-q);
    // o^{D-delta} is taken as o^{D}.
    const double corrupt_branch =
        -spec.mix_q * ocost(t_d, d.attack_fwd) +
        (1.0 - spec.mix_q) *
            (-ocost(t_d, d.attack_fwd) - ocost(spec.t_tilde, spec.remain_fwd) -
             spec.econ.mining_fee);
    return spec.theta * corrupt_branch + (1.0 - spec.theta) * d.fee_fwd;
  }
  // HTLC_GP: corrupt plays Wait&Reject at D-delta with certainty.
  return spec.theta * (-ocost(t_d, d.attack_fwd)) +
         (1.0 - spec.theta) * d.fee_fwd;
}

double expected_payoff_noforward(const GameSpec&) { return 0.0; }

double cutoff_theta(const GameSpec& spec) {
  const GameDerived d = derive(spec);
  const auto ocost = [&](double t, double val) {
    return opportunity_cost(spec.econ.rate, t, val, spec.econ);
  };
  const double t_d = static_cast<double>(spec.timeout_d);
  double denom;
  if (spec.protocol == Protocol::HTLC) {
    denom = ocost(t_d, d.attack_fwd) + d.fee_fwd +
            (1.0 - spec.mix_q) *
                (ocost(spec.t_tilde, spec.remain_fwd) + spec.econ.mining_fee);
  } else {
    denom = d.fee_fwd + ocost(t_d, d.attack_fwd);
  }
  if (denom <= 0.0) return d.fee_fwd > 0.0 ? 1.0 : 0.0;
  const double cut = d.fee_fwd / denom;
  return std::min(1.0, std::max(0.0, cut));
}

std::vector<Action> best_response(const GameSpec& spec, Nature nature) {
  std::vector<Action> actions{Action::accept(), Action::reject(), Action::grief()};
  for (std::int64_t t = 1; t <= spec.timeout_d - 1; ++t) {
    actions.push_back(Action::wait_accept(t));
    actions.push_back(Action::wait_reject(t));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const Action& a : actions)
    best = std::max(best, payoff(spec, nature, Action::fwd(), a).second);
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  std::vector<Action> arg;
  for (const Action& a : actions)
    if (payoff(spec, nature, Action::fwd(), a).second >= best - tol)
      arg.push_back(a);
  return arg;
}

}  // namespace pcn
