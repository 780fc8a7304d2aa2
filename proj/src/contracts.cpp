#include "pcn/contracts.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace pcn {

std::array<std::uint8_t, 32> sha256(const std::uint8_t* data, std::size_t len) {
  std::array<std::uint8_t, 32> out{};
  unsigned int out_len = 0;
  if (EVP_Digest(data, len, out.data(), &out_len, EVP_sha256(), nullptr) != 1 ||
      out_len != out.size())
    throw std::runtime_error("sha256 failed");
  return out;
}

HashPair HashPair::make(std::mt19937_64& rng) {
  HashPair hp;
  auto fill = [&](std::array<std::uint8_t, 32>& buf) {
    for (std::size_t i = 0; i < buf.size(); i += 8) {
      const std::uint64_t w = rng();
      for (std::size_t b = 0; b < 8; ++b)
        buf[i + b] = static_cast<std::uint8_t>(w >> (8 * b));
    }
  };
  fill(hp.x);
  do {
    fill(hp.r);
  } while (hp.r == hp.x);
  hp.payment_hash = sha256(hp.x.data(), hp.x.size());
  hp.cancel_hash = sha256(hp.r.data(), hp.r.size());
  return hp;
}

RoutingEnvelope::HopRecord RoutingEnvelope::record(int i,
                                                   const PaymentPath& path) const {
  if (i < 1 || i > kappa) throw std::invalid_argument("record: hop out of range");
  HopRecord rec{};
  rec.payment_hash = hashes.payment_hash;
  rec.cancel_hash = hashes.cancel_hash;
  const auto idx = static_cast<std::size_t>(i);
  rec.amount = i < kappa ? amounts[idx] : amounts[idx - 1];
  rec.timeout_in = timeouts[idx - 1];
  rec.cgp_in = cgp_real[idx - 1];
  if (i < kappa) rec.next = path.hops[idx + 1];
  return rec;
}

RoutingEnvelope preprocess(const PaymentPath& path, const GpParams& params,
                           std::mt19937_64& rng) {
  const int kappa = path.length();
  if (kappa < 1) throw std::invalid_argument("preprocess: empty path");
  if (kappa > params.n_max)
    throw std::invalid_argument(std::string(kPathTooLong) +
                                ": path exceeds the allowed maximum");
  RoutingEnvelope env;
  env.kappa = kappa;
  env.params = params;
  env.hashes = HashPair::make(rng);
  env.delivered = path.amounts.back();
  env.amounts = path.amounts;
  env.timeouts = path.timeouts;

  if (params.randomize_phi && params.n_max > kappa) {
    std::uniform_int_distribution<std::int64_t> dist(kappa, params.n_max);
    env.phi = dist(rng);
  } else {
    env.phi = kappa;
  }

  const double t0 = static_cast<double>(env.timeouts[0]);
  const double d_least = static_cast<double>(env.timeouts.back());
  double collateral = 0.0;  // sum alpha_j t_j
  for (int j = 0; j < kappa; ++j)
    collateral += static_cast<double>(env.amounts[static_cast<std::size_t>(j)]) *
                  static_cast<double>(env.timeouts[static_cast<std::size_t>(j)]);
  const double blinded = static_cast<double>(env.phi) *
                         static_cast<double>(env.delivered) * d_least;
  env.psi = std::max(0.0, (blinded - collateral) / t0);

  env.cgp_real.resize(static_cast<std::size_t>(kappa));
  env.cgp.resize(static_cast<std::size_t>(kappa));
  const double head = (static_cast<double>(env.amounts[0]) + env.psi) * t0;
  double tail = 0.0;  // sum_{j=1}^{i} alpha_j t_j
  for (int i = 0; i < kappa; ++i) {
    if (i > 0)
      tail += static_cast<double>(env.amounts[static_cast<std::size_t>(i)]) *
              static_cast<double>(env.timeouts[static_cast<std::size_t>(i)]);
    env.cgp_real[static_cast<std::size_t>(i)] = params.gamma * (head + tail);
    env.cgp[static_cast<std::size_t>(i)] =
        std::llround(env.cgp_real[static_cast<std::size_t>(i)]);
  }
  return env;
}

std::string to_json_line(const LedgerEvent& e) {
  static const char* kKind[] = {"lock", "release", "settle", "close"};
  nlohmann::json j{{"block", e.block},
                   {"channel", e.channel},
                   {"kind", kKind[static_cast<int>(e.kind)]},
                   {"party", e.party},
                   {"amount_sat", e.amount_sat},
                   {"contract_id", e.contract_id}};
  return j.dump();
}

// ---------------------------------------------------------------------------

namespace {

std::string channel_label(const ChannelGraph& g, NodeId u, NodeId v) {
  const std::string& a = g.name(u);
  const std::string& b = g.name(v);
  return a < b ? a + "|" + b : b + "|" + a;
}

double belief_cutoff(const EconomicParams& econ, double amount, double timeout) {
  const double f = fee(econ, amount);
  const double o = opportunity_cost(econ.rate, timeout, amount, econ);
  const double denom = f + o;
  if (denom <= 0.0) return f > 0.0 ? 1.0 : 0.0;
  return f / denom;
}

// HTLC forwarding gate: a griefed hop ends in an on-chain closure, so the
// threshold also discounts the mining fee and the stranded residual capacity.
double htlc_belief_cutoff(const EconomicParams& econ, double amount,
                          double least_timeout, double t_tilde,
                          double remain_fwd, const ForwardPolicy& policy) {
  const double f = fee(econ, amount);
  const double denom =
      opportunity_cost(econ.rate, least_timeout, amount, econ) + f +
      (1.0 - policy.mix_q) *
          (opportunity_cost(econ.rate, t_tilde, remain_fwd, econ) +
           econ.mining_fee);
  if (denom <= 0.0) return f > 0.0 ? 1.0 : 0.0;
  return std::min(1.0, std::max(0.0, f / denom));
}

// Lifetime left on a channel once a contract with `timeout` starts now:
// T - (timeout + now - opened_at).
double channel_time_left(const Channel& c, std::int64_t now, std::int64_t timeout) {
  return std::max<double>(
      0.0, static_cast<double>(c.lifetime - (timeout + now - c.opened_at)));
}

constexpr double kRealTol = 1e-6;

bool nearly(double a, double b) {
  return std::abs(a - b) <= kRealTol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

GpSession::GpSession(ChannelGraph& g, const PaymentPath& path,
                     RoutingEnvelope env, const EconomicParams& econ,
                     const ForwardPolicy& policy)
    : g_(g), path_(path), env_(std::move(env)), econ_(econ), policy_(policy) {
  result_.kappa = path_.length();
  t0_ = g_.clock();
}

void GpSession::fail(int hop, const char* reason) {
  result_.abort = AbortInfo{hop, reason};
}

void GpSession::unwind_round1(int formed) {
  // Release every cancellation lock back to its locker (free off-chain cancel).
  for (int j = 0; j < formed; ++j) {
    const auto& c = cancels_[static_cast<std::size_t>(j)];
    g_.release(c.penalty_locker, c.payer_side, c.cgp);
  }
  cancels_.clear();
  result_.penalty_locked.assign(static_cast<std::size_t>(result_.kappa), 0);
}

std::optional<AbortInfo> GpSession::lock_round1() {
  const int kappa = result_.kappa;
  const auto& hops = path_.hops;
  const auto& a = env_.amounts;
  const auto& t = env_.timeouts;
  const double gamma = env_.params.gamma;
  result_.penalty_locked.assign(static_cast<std::size_t>(kappa), 0);

  // Payee U_kappa validates its record before locking cgp_{kappa-1}.
  {
    const NodeId payee = hops.back();
    const NodeId prev = hops[static_cast<std::size_t>(kappa - 1)];
    // t' >= now + Delta, expressed with durations relative to the clock.
    if (t.back() < env_.params.confirm_delta) {
      fail(kappa, kTimeoutOrder);
      return result_.abort;
    }
    if (a.back() != env_.delivered) {
      fail(kappa, kAmountMismatch);
      return result_.abort;
    }
    if (sha256(env_.hashes.x.data(), env_.hashes.x.size()) !=
            env_.hashes.payment_hash ||
        sha256(env_.hashes.r.data(), env_.hashes.r.size()) !=
            env_.hashes.cancel_hash) {
      fail(kappa, kHashMismatch);
      return result_.abort;
    }
    // The envelope's terminal penalty must match the pre-processing identity.
    double collateral = 0.0;
    for (int j = 0; j < kappa; ++j)
      collateral += static_cast<double>(a[static_cast<std::size_t>(j)]) *
                    static_cast<double>(t[static_cast<std::size_t>(j)]);
    const double expected =
        gamma * (collateral + env_.psi * static_cast<double>(t[0]));
    if (!nearly(env_.cgp_real.back(), expected)) {
      fail(kappa, kEnvelopeMismatch);
      return result_.abort;
    }
    // Participation cap k*alpha. The rate calibration ignores fees, so the
    // payer-side amount a_0 (which bounds every hop amount) is the basis.
    if (env_.params.k_ratio > 0.0 &&
        env_.cgp_real.back() >
            env_.params.k_ratio * static_cast<double>(a[0]) * (1.0 + kRealTol)) {
      fail(kappa, kPenaltyCapExceeded);
      return result_.abort;
    }
    if (g_.remain(payee, prev) < env_.cgp.back()) {
      fail(kappa, kInsufficientRemain);
      return result_.abort;
    }
    g_.lock(payee, prev, env_.cgp.back());
    cancels_.push_back({next_id_++, prev, payee, env_.cgp.back(), t.back(), t0_,
                        ContractState::active});
    result_.penalty_locked[static_cast<std::size_t>(kappa - 1)] = env_.cgp.back();
    result_.events.push_back({t0_, channel_label(g_, prev, payee),
                              LedgerEvent::Kind::lock, g_.name(payee),
                              env_.cgp.back(), cancels_.back().id});
  }

  // Intermediaries U_{kappa-1} .. U_1, each locking cgp_{i-1} with U_{i-1}.
  for (int i = kappa - 1; i >= 1; --i) {
    const NodeId node = hops[static_cast<std::size_t>(i)];
    const NodeId up = hops[static_cast<std::size_t>(i - 1)];
    const NodeId down = hops[static_cast<std::size_t>(i + 1)];
    const double alpha_i = static_cast<double>(a[static_cast<std::size_t>(i)]);
    const double t_i = static_cast<double>(t[static_cast<std::size_t>(i)]);
    const int formed = static_cast<int>(cancels_.size());

    if (policy_.enforce_beliefs &&
        !(policy_.theta < belief_cutoff(econ_, alpha_i, t_i))) {
      unwind_round1(formed);
      fail(i, kBeliefTooHigh);
      return result_.abort;
    }
    // t' + Delta <= t_{i-1}
    if (t[static_cast<std::size_t>(i)] + env_.params.confirm_delta >
        t[static_cast<std::size_t>(i - 1)]) {
      unwind_round1(formed);
      fail(i, kTimeoutOrder);
      return result_.abort;
    }
    const double cgp_up = env_.cgp_real[static_cast<std::size_t>(i - 1)];
    const double cgp_here = env_.cgp_real[static_cast<std::size_t>(i)];
    if (!nearly(cgp_here - gamma * alpha_i * t_i, cgp_up)) {
      unwind_round1(formed);
      fail(i, kTelescopeMismatch);
      return result_.abort;
    }
    if (policy_.enforce_min_comp && env_.params.zeta > 0.0 &&
        gamma * alpha_i * t_i <
            env_.params.zeta * alpha_i * (1.0 - kRealTol)) {
      unwind_round1(formed);
      fail(i, kMinCompensationViolated);
      return result_.abort;
    }
    if (g_.remain(node, down) < a[static_cast<std::size_t>(i)] ||
        g_.remain(node, up) < env_.cgp[static_cast<std::size_t>(i - 1)]) {
      unwind_round1(formed);
      fail(i, kInsufficientRemain);
      return result_.abort;
    }
    g_.lock(node, up, env_.cgp[static_cast<std::size_t>(i - 1)]);
    cancels_.push_back({next_id_++, up, node,
                        env_.cgp[static_cast<std::size_t>(i - 1)],
                        t[static_cast<std::size_t>(i - 1)], t0_,
                        ContractState::active});
    result_.penalty_locked[static_cast<std::size_t>(i - 1)] =
        env_.cgp[static_cast<std::size_t>(i - 1)];
    result_.events.push_back({t0_, channel_label(g_, up, node),
                              LedgerEvent::Kind::lock, g_.name(node),
                              env_.cgp[static_cast<std::size_t>(i - 1)],
                              cancels_.back().id});
  }

  // Payer U_0 only validates; it locks nothing in this round.
  {
    const NodeId payer = hops[0];
    const NodeId next = hops[1];
    const double alpha_0 = static_cast<double>(a[0]);
    const double t_0 = static_cast<double>(t[0]);
    const int formed = static_cast<int>(cancels_.size());
    if (policy_.enforce_beliefs &&
        !(policy_.theta < belief_cutoff(econ_, alpha_0, t_0))) {
      unwind_round1(formed);
      fail(0, kBeliefTooHigh);
      return result_.abort;
    }
    if (policy_.enforce_min_comp && env_.params.zeta > 0.0 &&
        env_.cgp_real[0] < env_.params.zeta * alpha_0 * (1.0 - kRealTol)) {
      unwind_round1(formed);
      fail(0, kMinCompensationViolated);
      return result_.abort;
    }
    if (g_.remain(payer, next) < a[0]) {
      unwind_round1(formed);
      fail(0, kInsufficientRemain);
      return result_.abort;
    }
  }
  round1_done_ = true;
  return std::nullopt;
}

std::optional<AbortInfo> GpSession::lock_round2() {
  if (!round1_done_) {
    if (!result_.abort) fail(0, "ROUND1_INCOMPLETE");
    return result_.abort;
  }
  const int kappa = result_.kappa;
  const auto& hops = path_.hops;
  const auto& a = env_.amounts;
  const auto& t = env_.timeouts;
  result_.payment_locked.assign(static_cast<std::size_t>(kappa), 0);

  for (int i = 0; i < kappa; ++i) {
    const NodeId from = hops[static_cast<std::size_t>(i)];
    const NodeId to = hops[static_cast<std::size_t>(i + 1)];
    // Cancellation contract on this hop must be active (round-1 ordering).
    const auto& cancel = cancels_[static_cast<std::size_t>(kappa - 1 - i)];
    if (cancel.state != ContractState::active ||
        cancel.payer_side != from || cancel.penalty_locker != to) {
      fail(i, "ROUND1_CONTRACT_MISSING");
      return result_.abort;
    }
    if (i >= 1 &&
        t[static_cast<std::size_t>(i - 1)] < t[static_cast<std::size_t>(i)]) {
      fail(i, kTimeoutOrder);
      return result_.abort;
    }
    if (i >= 1) {
      // Amount recursion: a_{i-1} = a_i + fee(a_i), satoshi-rounded.
      const std::int64_t expect =
          a[static_cast<std::size_t>(i)] +
          std::llround(fee(econ_, static_cast<double>(a[static_cast<std::size_t>(i)])));
      if (a[static_cast<std::size_t>(i - 1)] != expect) {
        fail(i, kAmountMismatch);
        return result_.abort;
      }
    }
    if (g_.remain(from, to) < a[static_cast<std::size_t>(i)]) {
      fail(i, kInsufficientRemain);
      return result_.abort;
    }
    g_.lock(from, to, a[static_cast<std::size_t>(i)]);
    payments_.push_back({next_id_++, from, to, a[static_cast<std::size_t>(i)],
                         t[static_cast<std::size_t>(i)], t0_,
                         ContractState::active});
    result_.payment_locked[static_cast<std::size_t>(i)] =
        a[static_cast<std::size_t>(i)];
    result_.events.push_back({t0_, channel_label(g_, from, to),
                              LedgerEvent::Kind::lock, g_.name(from),
                              a[static_cast<std::size_t>(i)],
                              payments_.back().id});
  }
  round2_done_ = true;
  return std::nullopt;
}

bool GpSession::verify_preimage(const std::array<std::uint8_t, 32>& preimage,
                                bool payment) const {
  const auto digest = sha256(preimage.data(), preimage.size());
  return digest ==
         (payment ? env_.hashes.payment_hash : env_.hashes.cancel_hash);
}

void GpSession::resolve(PayeeAction action, std::int64_t mu) {
  if (!round1_done_ || !round2_done_)
    throw std::logic_error("resolve: both locking rounds must complete");
  if (resolved_) throw std::logic_error("resolve: contracts already resolved");
  if (mu < 0) throw std::invalid_argument("resolve: negative mu");
  resolved_ = true;

  const int kappa = result_.kappa;
  const auto& hops = path_.hops;
  result_.compensation.assign(static_cast<std::size_t>(kappa), 0);

  const bool cancel_offchain = action == PayeeAction::release_r ||
                               action == PayeeAction::wait_reject_at_deadline;
  if (action == PayeeAction::wait_reject_at_deadline)
    g_.advance_clock(t0_ + env_.timeouts.back() - 1);

  if (action == PayeeAction::release_x || cancel_offchain) {
    if (!verify_preimage(action == PayeeAction::release_x ? env_.hashes.x
                                                          : env_.hashes.r,
                         action == PayeeAction::release_x))
      throw std::logic_error("resolve: preimage does not match digest");
    for (int i = kappa; i >= 1; --i) {
      const NodeId up = hops[static_cast<std::size_t>(i - 1)];
      const NodeId node = hops[static_cast<std::size_t>(i)];
      auto& pay = payments_[static_cast<std::size_t>(i - 1)];
      auto& cancel = cancels_[static_cast<std::size_t>(kappa - i)];
      if (action == PayeeAction::release_x) {
        g_.release(node, up, pay.amount);  // payment claimed by U_i
      } else {
        g_.release(up, node, pay.amount);  // payment refunded to U_{i-1}
      }
      g_.release(node, up, cancel.cgp);  // penalty back to its locker
      pay.state = ContractState::resolved_release;
      cancel.state = ContractState::resolved_release;
      result_.events.push_back({g_.clock(), channel_label(g_, up, node),
                                LedgerEvent::Kind::release, g_.name(node),
                                pay.amount, pay.id});
      result_.events.push_back({g_.clock(), channel_label(g_, up, node),
                                LedgerEvent::Kind::release, g_.name(node),
                                cancel.cgp, cancel.id});
    }
    result_.success = action == PayeeAction::release_x;
    return;
  }

  // Grief: the payee never responds. Each victim U_{i-1} waits out its
  // timeout, goes on-chain, claims alpha_{i-1} + cgp_{i-1}, and pays M.
  const std::int64_t mining = std::llround(econ_.mining_fee);
  for (int i = kappa; i >= 1; --i) {
    const NodeId up = hops[static_cast<std::size_t>(i - 1)];
    const NodeId node = hops[static_cast<std::size_t>(i)];
    auto& pay = payments_[static_cast<std::size_t>(i - 1)];
    auto& cancel = cancels_[static_cast<std::size_t>(kappa - i)];
    g_.advance_clock(t0_ + pay.timeout);
    g_.release(up, node, pay.amount);   // unlock own coins
    g_.release(up, node, cancel.cgp);   // compensation from U_i's penalty
    pay.state = ContractState::resolved_timeout;
    cancel.state = ContractState::resolved_timeout;
    result_.compensation[static_cast<std::size_t>(i - 1)] = cancel.cgp;
    result_.mining_fees_paid += mining;
    ++result_.closures;
    result_.events.push_back({g_.clock(), channel_label(g_, up, node),
                              LedgerEvent::Kind::settle, g_.name(up),
                              pay.amount + cancel.cgp, pay.id});
    g_.close_channel(up, node);
    result_.events.push_back({g_.clock(), channel_label(g_, up, node),
                              LedgerEvent::Kind::close, g_.name(up), mining,
                              pay.id});
  }
}

RunResult run_gp(ChannelGraph& g, const PaymentPath& path, const GpParams& params,
                 const EconomicParams& econ, const ForwardPolicy& policy,
                 PayeeAction action, std::mt19937_64& rng) {
  RoutingEnvelope env = preprocess(path, params, rng);
  GpSession session(g, path, std::move(env), econ, policy);
  if (session.lock_round1()) return session.take_result();
  if (session.lock_round2()) return session.take_result();
  session.resolve(action);
  return session.take_result();
}

RunResult lock_htlc(ChannelGraph& g, const PaymentPath& path,
                    const EconomicParams& econ, const ForwardPolicy& policy) {
  RunResult result;
  const int kappa = path.length();
  result.kappa = kappa;
  result.payment_locked.assign(static_cast<std::size_t>(kappa), 0);
  result.compensation.assign(static_cast<std::size_t>(kappa), 0);
  const std::int64_t t0 = g.clock();
  int next_id = 1;

  std::vector<PaymentContract> contracts;
  for (int i = 0; i < kappa; ++i) {
    const NodeId from = path.hops[static_cast<std::size_t>(i)];
    const NodeId to = path.hops[static_cast<std::size_t>(i + 1)];
    const double alpha_i =
        static_cast<double>(path.amounts[static_cast<std::size_t>(i)]);
    // Stranded-capacity terms come from the hop's own channel: the residual
    // left after locking, stuck for what remains of the channel lifetime.
    const Channel& chan = g.channel_at(*g.channel_between(from, to));
    const double t_tilde =
        channel_time_left(chan, t0, path.timeouts[static_cast<std::size_t>(i)]);
    const double remain_after = static_cast<double>(
        g.remain(from, to) - path.amounts[static_cast<std::size_t>(i)]);
    if (policy.enforce_beliefs &&
        !(policy.theta <
          htlc_belief_cutoff(econ, alpha_i,
                             static_cast<double>(path.timeouts.back()), t_tilde,
                             std::max(0.0, remain_after), policy))) {
      for (auto& c : contracts) g.release(c.from, c.to, c.amount);
      result.payment_locked.assign(static_cast<std::size_t>(kappa), 0);
      result.abort = AbortInfo{i, kBeliefTooHigh};
      return result;
    }
    if (g.remain(from, to) < path.amounts[static_cast<std::size_t>(i)]) {
      for (auto& c : contracts) g.release(c.from, c.to, c.amount);
      result.payment_locked.assign(static_cast<std::size_t>(kappa), 0);
      result.abort = AbortInfo{i, kInsufficientRemain};
      return result;
    }
    g.lock(from, to, path.amounts[static_cast<std::size_t>(i)]);
    contracts.push_back({next_id++, from, to,
                         path.amounts[static_cast<std::size_t>(i)],
                         path.timeouts[static_cast<std::size_t>(i)], t0,
                         ContractState::active});
    result.payment_locked[static_cast<std::size_t>(i)] =
        path.amounts[static_cast<std::size_t>(i)];
    result.events.push_back({t0, channel_label(g, from, to),
                             LedgerEvent::Kind::lock, g.name(from),
                             path.amounts[static_cast<std::size_t>(i)],
                             contracts.back().id});
  }
  return result;
}

RunResult run_htlc(ChannelGraph& g, const PaymentPath& path,
                   const EconomicParams& econ, const ForwardPolicy& policy,
                   PayeeAction action) {
  RunResult result = lock_htlc(g, path, econ, policy);
  if (result.abort) return result;
  const int kappa = result.kappa;
  const std::int64_t t0 = g.clock();
  // Rebuild the contract view for resolution.
  std::vector<PaymentContract> contracts;
  int next_id = 1;
  for (int i = 0; i < kappa; ++i)
    contracts.push_back({next_id++, path.hops[static_cast<std::size_t>(i)],
                         path.hops[static_cast<std::size_t>(i + 1)],
                         path.amounts[static_cast<std::size_t>(i)],
                         path.timeouts[static_cast<std::size_t>(i)], t0,
                         ContractState::active});

  if (action == PayeeAction::release_x) {
    for (int i = kappa; i >= 1; --i) {
      auto& c = contracts[static_cast<std::size_t>(i - 1)];
      g.release(c.to, c.from, c.amount);
      c.state = ContractState::resolved_release;
      result.events.push_back({g.clock(), channel_label(g, c.from, c.to),
                               LedgerEvent::Kind::release, g.name(c.to),
                               c.amount, c.id});
    }
    result.success = true;
    return result;
  }
  if (action == PayeeAction::release_r ||
      action == PayeeAction::wait_reject_at_deadline) {
    if (action == PayeeAction::wait_reject_at_deadline)
      g.advance_clock(t0 + path.timeouts.back() - 1);
    for (int i = kappa; i >= 1; --i) {
      auto& c = contracts[static_cast<std::size_t>(i - 1)];
      g.release(c.from, c.to, c.amount);
      c.state = ContractState::resolved_release;
      result.events.push_back({g.clock(), channel_label(g, c.from, c.to),
                               LedgerEvent::Kind::release, g.name(c.from),
                               c.amount, c.id});
    }
    return result;
  }

  // Grief: every victim closes after its own timeout and pays M.
  const std::int64_t mining = std::llround(econ.mining_fee);
  for (int i = kappa; i >= 1; --i) {
    auto& c = contracts[static_cast<std::size_t>(i - 1)];
    g.advance_clock(t0 + c.timeout);
    g.release(c.from, c.to, c.amount);
    c.state = ContractState::resolved_timeout;
    result.mining_fees_paid += mining;
    ++result.closures;
    result.events.push_back({g.clock(), channel_label(g, c.from, c.to),
                             LedgerEvent::Kind::settle, g.name(c.from), c.amount,
                             c.id});
    g.close_channel(c.from, c.to);
    result.events.push_back({g.clock(), channel_label(g, c.from, c.to),
                             LedgerEvent::Kind::close, g.name(c.from), mining,
                             c.id});
  }
  return result;
}

}  // namespace pcn
