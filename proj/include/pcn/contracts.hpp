#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pcn/economics.hpp"
#include "pcn/netmodel.hpp"

namespace pcn {

/// Payment hash H = sha256(x) and cancellation hash Y = sha256(r).
struct HashPair {
  std::array<std::uint8_t, 32> x{};
  std::array<std::uint8_t, 32> r{};
  std::array<std::uint8_t, 32> payment_hash{};
  std::array<std::uint8_t, 32> cancel_hash{};

  static HashPair make(std::mt19937_64& rng);
};

std::array<std::uint8_t, 32> sha256(const std::uint8_t* data, std::size_t len);

/// Griefing-penalty protocol parameters. zeta == 0 and an unset cap give
/// plain HTLC-GP; a (k, zeta) pair gives the guaranteed-minimum variant.
struct GpParams {
  double gamma = 0.0;
  double zeta = 0.0;
  double k_ratio = 0.0;     // 0 disables the payee-side cumulative-penalty cap
  std::int64_t n_max = 20;  // maximum allowed path length
  std::int64_t confirm_delta = 100;  // worst-case on-chain confirmation time
  bool randomize_phi = false;
};

/// Per-hop belief checks. Liquidity checks always run; belief and
/// minimum-compensation guards are policy (experiments that assume
/// always-forwarding participants switch them off). The HTLC gate prices in
/// an uncompensated channel closure, so it also needs the corrupt player's
/// mixing weight and the forwarder's stranded-capacity terms.
struct ForwardPolicy {
  bool enforce_beliefs = false;
  bool enforce_min_comp = false;
  double theta = 0.0;
  double mix_q = 0.7;
};

/// Plaintext stand-in for the onion-routed per-hop records: hop i reads
/// (H, Y, alpha_i, t_{i-1}, cgp_{i-1}, next hop).
struct RoutingEnvelope {
  HashPair hashes;
  int kappa = 0;
  std::int64_t phi = 0;  // blinded path length shared with the payee
  double psi = 0.0;      // routing attempt cost, clamped at 0
  std::int64_t delivered = 0;            // alpha
  std::vector<std::int64_t> amounts;     // alpha_0 .. alpha_{kappa-1}
  std::vector<std::int64_t> timeouts;    // t_0 .. t_{kappa-1}
  std::vector<double> cgp_real;          // cgp_0 .. cgp_{kappa-1}, pre-rounding
  std::vector<std::int64_t> cgp;         // rounded half-up to satoshi
  GpParams params;

  struct HopRecord {
    std::array<std::uint8_t, 32> payment_hash;
    std::array<std::uint8_t, 32> cancel_hash;
    std::int64_t amount;      // alpha_i
    std::int64_t timeout_in;  // t_{i-1}
    double cgp_in;            // cgp_{i-1}
    std::optional<NodeId> next;
  };
  HopRecord record(int i, const PaymentPath& path) const;
};

/// Builds the routing envelope: draws phi uniformly from {kappa..n_max},
/// solves the blinding identity for psi (clamped at 0) and fills the
/// cumulative penalties cgp_i.
RoutingEnvelope preprocess(const PaymentPath& path, const GpParams& params,
                           std::mt19937_64& rng);

struct LedgerEvent {
  std::int64_t block = 0;
  std::string channel;
  enum class Kind { lock, release, settle, close } kind = Kind::lock;
  std::string party;
  std::int64_t amount_sat = 0;
  int contract_id = 0;
};
std::string to_json_line(const LedgerEvent& e);

struct AbortInfo {
  int hop = -1;
  std::string reason;
};

// Named round-1 / round-2 checks.
inline constexpr const char* kBeliefTooHigh = "BELIEF_TOO_HIGH";
inline constexpr const char* kMinCompensationViolated = "MIN_COMPENSATION_VIOLATED";
inline constexpr const char* kInsufficientRemain = "INSUFFICIENT_REMAIN";
inline constexpr const char* kTelescopeMismatch = "TELESCOPE_MISMATCH";
inline constexpr const char* kEnvelopeMismatch = "ENVELOPE_MISMATCH";
inline constexpr const char* kHashMismatch = "HASH_MISMATCH";
inline constexpr const char* kTimeoutOrder = "TIMEOUT_ORDER";
inline constexpr const char* kPenaltyCapExceeded = "PENALTY_CAP_EXCEEDED";
inline constexpr const char* kAmountMismatch = "AMOUNT_MISMATCH";
inline constexpr const char* kPathTooLong = "PATH_TOO_LONG";

enum class PayeeAction { release_x, release_r, grief, wait_reject_at_deadline };

enum class ContractState { proposed, active, resolved_release, resolved_timeout };

struct CancellationContract {
  int id = 0;
  NodeId payer_side = 0;     // U_i
  NodeId penalty_locker = 0; // U_{i+1}
  std::int64_t cgp = 0;
  std::int64_t timeout = 0;
  std::int64_t formed_at = 0;
  ContractState state = ContractState::proposed;
};

struct PaymentContract {
  int id = 0;
  NodeId from = 0;
  NodeId to = 0;
  std::int64_t amount = 0;
  std::int64_t timeout = 0;
  std::int64_t formed_at = 0;
  ContractState state = ContractState::proposed;
};

struct RunResult {
  bool success = false;  // payment completed via release of x
  std::optional<AbortInfo> abort;
  int kappa = 0;
  std::vector<std::int64_t> payment_locked;  // alpha_i while both rounds held
  std::vector<std::int64_t> penalty_locked;  // cgp_{i-1} locked by U_i, i in [1..kappa]
  std::vector<std::int64_t> compensation;    // cgp_{i-1} claimed by U_{i-1} on grief
  int closures = 0;
  std::int64_t mining_fees_paid = 0;  // debited outside channel balances
  std::vector<LedgerEvent> events;
};

/// Two-round HTLC-GP / HTLC-GP^zeta session on a borrowed graph.
class GpSession {
 public:
  GpSession(ChannelGraph& g, const PaymentPath& path, RoutingEnvelope env,
            const EconomicParams& econ, const ForwardPolicy& policy);

  /// Cancellation round, payee backward to payer. Aborts unwind every lock.
  std::optional<AbortInfo> lock_round1();
  /// Payment round, payer forward to payee. Requires round 1 complete.
  std::optional<AbortInfo> lock_round2();
  /// Resolves both contract chains. `mu` is the payee's response deadline.
  void resolve(PayeeAction action, std::int64_t mu = 1);

  bool verify_preimage(const std::array<std::uint8_t, 32>& preimage,
                       bool payment) const;

  const RunResult& result() const { return result_; }
  RunResult take_result() { return std::move(result_); }
  const RoutingEnvelope& envelope() const { return env_; }

 private:
  void unwind_round1(int formed);
  void fail(int hop, const char* reason);

  ChannelGraph& g_;
  PaymentPath path_;
  RoutingEnvelope env_;
  EconomicParams econ_;
  ForwardPolicy policy_;
  std::vector<CancellationContract> cancels_;
  std::vector<PaymentContract> payments_;
  RunResult result_;
  std::int64_t t0_ = 0;
  int next_id_ = 1;
  bool round1_done_ = false;
  bool round2_done_ = false;
  bool resolved_ = false;
};

/// Convenience wrapper: preprocess + both rounds + resolve.
RunResult run_gp(ChannelGraph& g, const PaymentPath& path, const GpParams& params,
                 const EconomicParams& econ, const ForwardPolicy& policy,
                 PayeeAction action, std::mt19937_64& rng);

/// Plain HTLC: forward lock pass, then resolve per the payee action
/// (release_x accepts, release_r rejects, grief closes every victim channel).
RunResult run_htlc(ChannelGraph& g, const PaymentPath& path,
                   const EconomicParams& econ, const ForwardPolicy& policy,
                   PayeeAction action);

/// HTLC forward locking only; the locks stay in place.
RunResult lock_htlc(ChannelGraph& g, const PaymentPath& path,
                    const EconomicParams& econ, const ForwardPolicy& policy);

}  // namespace pcn
