#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcn/attacker.hpp"
#include "pcn/contracts.hpp"
#include "pcn/economics.hpp"
#include "pcn/games.hpp"
#include "pcn/netmodel.hpp"

namespace pcn {

/// Closed-form loss percent of victim capacity under HTLC-GP versus HTLC:
/// gamma*n*(D/2 + Delta*(n-2)/6) / (1 + gamma*n*(D + (n-1)*Delta/2)).
double loss_percent_htlcgp(double gamma, int n, std::int64_t timeout_d,
                           std::int64_t confirm_delta);

/// The two published variants of one term in the guaranteed-minimum loss
/// formula: the statement carries (2*n_tilde)*Delta/3, its derivation
/// (2*n_tilde - 1)*Delta/3. Only the derivation variant matches the direct
/// summation; both are exposed for comparison.
enum class GpZetaVariant { statement, derivation };

/// Loss percent of HTLC-GP^zeta versus HTLC for max path length n_tilde <= n.
/// Shares the attack-value convention of the direct-summation oracle:
/// v = alpha / (1 + gamma~ * S(n_tilde)).
double loss_percent_gpzeta(double gamma_zk, std::int64_t n_tilde, int n,
                           std::int64_t timeout_d, std::int64_t confirm_delta,
                           GpZetaVariant variant = GpZetaVariant::derivation);

/// Independent oracle: victim-locked capacity by direct per-hop summation
/// (fees zero), no closed-form simplification. n_tilde == n covers HTLC-GP.
double loss_oracle(double gamma, std::int64_t n_tilde, int n,
                   std::int64_t timeout_d, std::int64_t confirm_delta);

struct Table2Row {
  double k = 0;
  double zeta = 0;
  double gamma = 0;          // computed
  std::int64_t n_max = 0;    // computed
  double gamma_published = 0;
  std::int64_t n_max_published = 0;
};
/// The 27-row (k, zeta) grid with published reference values.
std::vector<Table2Row> table2_grid(std::int64_t timeout_d,
                                   std::int64_t confirm_delta);

struct ExperimentConfig {
  std::string snapshot;  // path, or "synthetic" for the bundled generator
  BalanceMode balance_mode = BalanceMode::split;
  int synthetic_nodes = 2000;
  std::vector<double> gamma_sweep{1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
  std::vector<std::pair<double, double>> kz_grid;  // (k, zeta) rows for GP^zeta
  std::int64_t budget = 50'000'000;
  std::int64_t alpha = 50'000;
  std::int64_t setup_cost = 200'000;
  int n = 20;
  std::int64_t timeout_d = 100;
  std::int64_t confirm_delta = 100;
  int workload = 3000;
  std::int64_t amount_min = 10'000;
  std::int64_t amount_max = 100'000;
  int path_len_min = 5;
  int path_len_max = 20;
  double theta = 0.0;
  double mix_q = 0.7;
  EconomicParams econ;
  std::uint64_t seed = 42;
  int jobs = 1;
};

ChannelGraph experiment_graph(const ExperimentConfig& cfg);

struct CapacityPoint {
  double gamma = 0;
  double k = 0;      // 0 for plain HTLC-GP rows
  double zeta = 0;
  std::int64_t n_max = 0;
  std::int64_t locked = 0;           // victim coins locked under the protocol
  std::int64_t baseline_locked = 0;  // victim coins locked under HTLC
  double ratio_locked = 0;
  double loss_pct = 0;
  int instances = 0;
  int infeasible = 0;
};
std::vector<CapacityPoint> run_capacity_experiment(const ExperimentConfig& cfg);

struct SuccessPoint {
  double gamma = 0;
  int attempted = 0;
  int htlc_ok = 0;
  int gp_ok = 0;
  double success_ratio = 0;  // gp_ok / htlc_ok
};
std::vector<SuccessPoint> run_success_rate(const ExperimentConfig& cfg);

struct GameSweepPoint {
  double theta = 0;
  Protocol protocol = Protocol::HTLC;
  double amount = 0;
  double rate = 0;
  double e_forward = 0;
  double e_second_uncorrupt = 0;
  double e_second_corrupt = 0;
  bool forward = false;  // decision
};
struct GameSweepConfig {
  std::vector<double> thetas;
  std::vector<double> amounts{15000, 30000, 45000, 60000};
  std::vector<double> rates{0.2};
  GameSpec base;  // alpha/amount and theta fields are overwritten per point
  int jobs = 1;
};
std::vector<GameSweepPoint> run_game_sweep(const GameSweepConfig& cfg);

enum class ParticipantMode { altruistic, rational };

struct ScalabilityPoint {
  std::string protocol;
  ParticipantMode mode = ParticipantMode::altruistic;
  int requests = 0;
  int completed = 0;
  double wall_ms = 0;
};
struct ScalabilityConfig {
  ExperimentConfig base;
  std::vector<int> request_counts{100, 1000, 5000};
  double gamma = 1e-5;
  ParticipantMode mode = ParticipantMode::altruistic;
  double theta = 0.05;
};
std::vector<ScalabilityPoint> run_scalability(const ScalabilityConfig& cfg);

/// Workload shared by the success-rate and scalability experiments.
struct Transaction {
  NodeId src = 0;
  NodeId dst = 0;
  std::int64_t amount = 0;
};
std::vector<Transaction> generate_workload(const ChannelGraph& g,
                                           const ExperimentConfig& cfg,
                                           int count);

// CSV / JSON report emission. Columns use the canonical names
// gamma, k, zeta, n_max, ratio_locked, loss_pct, success_ratio, theta, e_forward.
std::string capacity_csv(const std::vector<CapacityPoint>& rows);
std::string success_csv(const std::vector<SuccessPoint>& rows);
std::string game_sweep_csv(const std::vector<GameSweepPoint>& rows);
std::string scalability_csv(const std::vector<ScalabilityPoint>& rows);
std::string table2_csv(const std::vector<Table2Row>& rows);

}  // namespace pcn
