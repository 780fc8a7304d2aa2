// griefsim: payment-channel-network griefing simulator and analysis CLI.
//
// Subcommands: snapshot-info, route, game-sweep, penalty-calc, claims-check,
// table2, capacity, success-rate, scalability, attack-trace.
// Exit codes: 0 success, 2 configuration error, 3 infeasible experiment.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcn/attacker.hpp"
#include "pcn/contracts.hpp"
#include "pcn/economics.hpp"
#include "pcn/experiments.hpp"
#include "pcn/games.hpp"
#include "pcn/netmodel.hpp"
#include "pcn/penalty.hpp"

namespace fs = std::filesystem;
using namespace pcn;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInfeasible = 3;

struct CommonOpts {
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int jobs = 1;
  std::string snapshot;
  std::string balance_mode = "split";
  int synthetic_nodes = 2000;
  EconomicParams econ;
  std::int64_t timeout_d = 100;
  std::int64_t confirm_delta = 100;
};

BalanceMode parse_mode(const std::string& s) {
  if (s == "split") return BalanceMode::split;
  if (s == "unilateral") return BalanceMode::unilateral;
  throw CLI::ValidationError("balance_mode", "must be split or unilateral");
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_seed) {
  cmd->add_option("--config", "flat key=value config file; command-line flags win");
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  auto* seed = cmd->add_option("--seed", o.seed, "RNG seed for reproducible runs");
  if (needs_seed) seed->required();
  cmd->add_option("--jobs", o.jobs, "worker threads for sweeps")->capture_default_str();
  cmd->add_option("--base-fee", o.econ.base_fee, "base_fee, sat")->capture_default_str();
  cmd->add_option("--fee-rate", o.econ.fee_rate, "fee_rate")->capture_default_str();
  cmd->add_option("--per-tx-val", o.econ.per_tx_val, "per_tx_val, sat")->capture_default_str();
  cmd->add_option("--mining-fee", o.econ.mining_fee, "mining fee M, sat")->capture_default_str();
  cmd->add_option("--rate", o.econ.rate, "transactions per block r_U")->capture_default_str();
  cmd->add_option("--D", o.timeout_d, "least HTLC timeout D, blocks")->capture_default_str();
  cmd->add_option("--delta", o.confirm_delta, "on-chain confirmation bound, blocks")
      ->capture_default_str();
}

void add_graph(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--snapshot", o.snapshot,
                  "snapshot CSV/JSON path, or 'synthetic' for the bundled graph");
  cmd->add_option("--balance-mode", o.balance_mode, "split | unilateral")
      ->capture_default_str();
  cmd->add_option("--synthetic-nodes", o.synthetic_nodes,
                  "node count for the synthetic graph")
      ->capture_default_str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// Every run records its resolved configuration next to its outputs.
void write_resolved_config(const CLI::App& cmd, const CommonOpts& o,
                           const std::string& prefix) {
  write_file(fs::path(o.out_dir) / (prefix + "-config.txt"),
             cmd.config_to_str(true, false));
}

// Flat key=value config: every key maps 1:1 to a --key flag of the invoked
// subcommand. Values already present on the command line win.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") path = args[i + 1];
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.empty() || key == "config")
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": bad key '" + key + "'");
    const std::string flag = "--" + key;
    bool overridden = false;
    for (const auto& a : args)
      if (a == flag) overridden = true;
    if (overridden) continue;
    // Multi-valued keys carry whitespace-separated entries.
    std::stringstream vs(value);
    std::string item;
    while (vs >> item) {
      args.push_back(flag);
      args.push_back(item);
    }
  }
  return args;
}

ExperimentConfig experiment_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  cfg.snapshot = o.snapshot;
  cfg.balance_mode = parse_mode(o.balance_mode);
  cfg.synthetic_nodes = o.synthetic_nodes;
  cfg.econ = o.econ;
  cfg.timeout_d = o.timeout_d;
  cfg.confirm_delta = o.confirm_delta;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  return cfg;
}

GpParams gp_params(double gamma, double zeta, double k, std::int64_t n_max,
                   std::int64_t delta, bool randomize) {
  GpParams p;
  p.gamma = gamma;
  p.zeta = zeta;
  p.k_ratio = k;
  p.n_max = n_max;
  p.confirm_delta = delta;
  p.randomize_phi = randomize;
  return p;
}

int cmd_snapshot_info(const CLI::App& app, const CommonOpts& o) {
  const ChannelGraph g = experiment_graph(experiment_config(o));
  std::int64_t capacity = 0;
  int pendant = 0;
  for (std::size_t i = 0; i < g.channel_count(); ++i)
    capacity += g.channel_at(i).capacity();
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (g.degree(u) == 1) ++pendant;
  nlohmann::json info{{"nodes", g.node_count()},
                      {"channels", g.channel_count()},
                      {"total_capacity_sat", capacity},
                      {"pendant_nodes", pendant}};
  const std::string text = info.dump(2) + "\n";
  std::cout << text;
  write_resolved_config(app, o, "snapshot-info");
  write_file(fs::path(o.out_dir) / "snapshot-info.json", text);
  return kOk;
}

int cmd_route(const CLI::App& app, const CommonOpts& o, const std::string& src,
              const std::string& dst, std::int64_t amount, int max_len) {
  const ChannelGraph g = experiment_graph(experiment_config(o));
  const auto s = g.node(src), d = g.node(dst);
  if (!s || !d) {
    std::cerr << "route: unknown node '" << (s ? dst : src) << "'\n";
    return kConfigError;
  }
  RoutingParams rp{o.econ, o.timeout_d, o.confirm_delta};
  const auto path = find_route(g, *s, *d, amount, max_len, rp);
  write_resolved_config(app, o, "route");
  if (!path) {
    std::cout << "no feasible route\n";
    return kInfeasible;
  }
  nlohmann::json out;
  for (std::size_t i = 0; i < path->hops.size(); ++i) out["hops"].push_back(g.name(path->hops[i]));
  out["amounts"] = path->amounts;
  out["timeouts"] = path->timeouts;
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  write_file(fs::path(o.out_dir) / "route.json", text);
  return kOk;
}

int cmd_game_sweep(const CLI::App& app, const CommonOpts& o,
                   std::vector<double> thetas, std::vector<double> amounts,
                   std::vector<double> rates, double gamma, double q, double C) {
  if (thetas.empty())
    for (int i = 0; i <= 200; ++i) thetas.push_back(static_cast<double>(i) / 200.0);
  GameSweepConfig cfg;
  cfg.thetas = thetas;
  cfg.amounts = amounts;
  cfg.rates = rates;
  cfg.jobs = o.jobs;
  cfg.base.econ = o.econ;
  cfg.base.timeout_d = o.timeout_d;
  cfg.base.confirm_delta = o.confirm_delta;
  cfg.base.mix_q = q;
  cfg.base.gamma = gamma;
  cfg.base.setup_cost = C;
  const auto rows = run_game_sweep(cfg);
  const std::string csv = game_sweep_csv(rows);
  write_resolved_config(app, o, "game-sweep");
  write_file(fs::path(o.out_dir) / "game-sweep.csv", csv);
  // The smallest theta at which each combination stops forwarding.
  nlohmann::json summary{{"rows", rows.size()}};
  for (const Protocol proto : {Protocol::HTLC, Protocol::HTLC_GP})
    for (const double amount : cfg.amounts)
      for (const double rate : cfg.rates) {
        double flip = 1.0;
        bool flipped = false;
        for (const auto& r : rows)
          if (r.protocol == proto && r.amount == amount && r.rate == rate &&
              !r.forward && r.theta < flip) {
            flip = r.theta;
            flipped = true;
          }
        summary["flips"].push_back(
            {{"protocol", proto == Protocol::HTLC ? "htlc" : "htlc-gp"},
             {"amount", amount},
             {"rate", rate},
             {"flip_theta", flipped ? nlohmann::json(flip) : nlohmann::json()}});
      }
  write_file(fs::path(o.out_dir) / "game-sweep-summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

int cmd_penalty_calc(const CLI::App& app, const CommonOpts& o, double k,
                     double zeta, double h, double alpha, double remain,
                     double t_tilde) {
  write_resolved_config(app, o, "penalty-calc");
  std::ostringstream out;
  const auto n_max = max_path_length(k, zeta);
  if (!n_max) {
    out << "n_max: unbounded (zeta = 0)\n";
  } else {
    const double gamma = penalty_rate(k, zeta, o.timeout_d, o.confirm_delta);
    const double gamma_len =
        penalty_rate_from_length(k, *n_max, o.timeout_d, o.confirm_delta);
    out << "gamma: " << gamma << "\n";
    out << "gamma_from_length: " << gamma_len << "\n";
    out << "n_max: " << *n_max << "\n";
  }
  if (h > 0.0) {
    const auto kmax =
        max_penalty_ratio(h, alpha, o.econ, o.timeout_d, t_tilde, remain);
    if (kmax)
      out << "k_max: " << *kmax << "\n";
    else
      out << "k_max: unbounded (h = 1)\n";
  }
  std::cout << out.str();
  write_file(fs::path(o.out_dir) / "penalty-calc.txt", out.str());
  return kOk;
}

int cmd_claims_check(const CLI::App& app, const CommonOpts& o,
                     std::vector<double> gammas, int n) {
  std::ostringstream csv;
  csv << "gamma,n,n_max,closed_form,oracle,rel_err\n";
  double worst1 = 0.0, worst2 = 0.0;
  for (const double gamma : gammas) {
    for (int len = 2; len <= n; ++len) {
      const double oracle = loss_oracle(gamma, len, len, o.timeout_d, o.confirm_delta);
      const double cf = loss_percent_htlcgp(gamma, len, o.timeout_d, o.confirm_delta);
      const double rel =
          oracle == 0.0 ? std::abs(cf) : std::abs(cf - oracle) / std::abs(oracle);
      worst1 = std::max(worst1, rel);
      csv << gamma << "," << len << "," << len << "," << cf << "," << oracle << ","
          << rel << "\n";
    }
    for (int nt = 2; nt <= n; ++nt) {
      const double oracle = loss_oracle(gamma, nt, n, o.timeout_d, o.confirm_delta);
      const double cf = loss_percent_gpzeta(gamma, nt, n, o.timeout_d,
                                            o.confirm_delta, GpZetaVariant::derivation);
      const double rel =
          oracle == 0.0 ? std::abs(cf) : std::abs(cf - oracle) / std::abs(oracle);
      worst2 = std::max(worst2, rel);
      csv << gamma << "," << nt << "," << nt << "," << cf << "," << oracle << ","
          << rel << "\n";
    }
  }
  write_resolved_config(app, o, "claims-check");
  write_file(fs::path(o.out_dir) / "claims-check.csv", csv.str());
  std::cout << "penalty-loss closed form vs oracle, worst rel err: " << worst1 << "\n"
            << "guaranteed-minimum form vs oracle, worst rel err: " << worst2 << "\n";
  return kOk;
}

int cmd_table2(const CLI::App& app, const CommonOpts& o) {
  const auto rows = table2_grid(o.timeout_d, o.confirm_delta);
  const std::string csv = table2_csv(rows);
  write_resolved_config(app, o, "table2");
  write_file(fs::path(o.out_dir) / "table2.csv", csv);
  std::cout << csv;
  return kOk;
}

int cmd_capacity(const CLI::App& app, const CommonOpts& o,
                 std::vector<double> gammas, std::vector<double> ks,
                 std::vector<double> zetas, std::int64_t budget,
                 std::int64_t alpha, std::int64_t C, int n) {
  if (o.snapshot.empty()) {
    std::cerr << "capacity: --snapshot is required (path or 'synthetic')\n";
    return kConfigError;
  }
  if (ks.size() != zetas.size()) {
    std::cerr << "capacity: --k and --zeta must pair up\n";
    return kConfigError;
  }
  ExperimentConfig cfg = experiment_config(o);
  cfg.gamma_sweep = gammas;
  for (std::size_t i = 0; i < ks.size(); ++i) cfg.kz_grid.emplace_back(ks[i], zetas[i]);
  cfg.budget = budget;
  cfg.alpha = alpha;
  cfg.setup_cost = C;
  cfg.n = n;
  const auto rows = run_capacity_experiment(cfg);
  write_resolved_config(app, o, "capacity");
  write_file(fs::path(o.out_dir) / "capacity.csv", capacity_csv(rows));
  nlohmann::json summary{{"rows", rows.size()}, {"seed", o.seed}};
  for (const auto& r : rows)
    summary["points"].push_back({{"gamma", r.gamma},
                                 {"k", r.k},
                                 {"zeta", r.zeta},
                                 {"n_max", r.n_max},
                                 {"ratio_locked", r.ratio_locked},
                                 {"loss_pct", r.loss_pct}});
  write_file(fs::path(o.out_dir) / "capacity-summary.json", summary.dump(2) + "\n");
  int executed = 0;
  for (const auto& r : rows) executed += r.instances;
  std::cout << capacity_csv(rows);
  if (executed == 0) {
    std::cerr << "capacity: no attack instance was feasible on this snapshot\n";
    return kInfeasible;
  }
  return kOk;
}

int cmd_success_rate(const CLI::App& app, const CommonOpts& o,
                     std::vector<double> gammas, int workload) {
  if (o.snapshot.empty()) {
    std::cerr << "success-rate: --snapshot is required (path or 'synthetic')\n";
    return kConfigError;
  }
  ExperimentConfig cfg = experiment_config(o);
  cfg.gamma_sweep = gammas;
  cfg.workload = workload;
  const auto rows = run_success_rate(cfg);
  write_resolved_config(app, o, "success-rate");
  write_file(fs::path(o.out_dir) / "success-rate.csv", success_csv(rows));
  nlohmann::json summary{{"rows", rows.size()}, {"seed", o.seed}};
  for (const auto& r : rows)
    summary["points"].push_back({{"gamma", r.gamma}, {"success_ratio", r.success_ratio}});
  write_file(fs::path(o.out_dir) / "success-rate-summary.json", summary.dump(2) + "\n");
  std::cout << success_csv(rows);
  for (const auto& r : rows)
    if (r.htlc_ok == 0) {
      std::cerr << "success-rate: the baseline protocol completed nothing\n";
      return kInfeasible;
    }
  return kOk;
}

int cmd_scalability(const CLI::App& app, const CommonOpts& o,
                    std::vector<int> requests, double gamma,
                    const std::string& mode, double theta) {
  if (o.snapshot.empty()) {
    std::cerr << "scalability: --snapshot is required (path or 'synthetic')\n";
    return kConfigError;
  }
  ScalabilityConfig cfg;
  cfg.base = experiment_config(o);
  cfg.base.workload = *std::max_element(requests.begin(), requests.end());
  cfg.request_counts = requests;
  cfg.gamma = gamma;
  if (mode == "altruistic") cfg.mode = ParticipantMode::altruistic;
  else if (mode == "rational") cfg.mode = ParticipantMode::rational;
  else {
    std::cerr << "scalability: --mode must be altruistic or rational\n";
    return kConfigError;
  }
  cfg.theta = theta;
  const auto rows = run_scalability(cfg);
  write_resolved_config(app, o, "scalability");
  write_file(fs::path(o.out_dir) / "scalability.csv", scalability_csv(rows));
  nlohmann::json summary{{"rows", rows.size()}, {"mode", mode}, {"seed", o.seed}};
  for (const auto& r : rows)
    summary["points"].push_back({{"protocol", r.protocol},
                                 {"requests", r.requests},
                                 {"completed", r.completed},
                                 {"wall_ms", r.wall_ms}});
  write_file(fs::path(o.out_dir) / "scalability-summary.json", summary.dump(2) + "\n");
  std::cout << scalability_csv(rows);
  return kOk;
}

int cmd_attack_trace(const CLI::App& app, const CommonOpts& o,
                     const std::string& corrupt_name, const std::string& protocol,
                     double gamma, double k, double zeta, std::int64_t budget,
                     std::int64_t alpha, std::int64_t C, int n,
                     const std::string& strategy) {
  if (o.snapshot.empty()) {
    std::cerr << "attack-trace: --snapshot is required (path or 'synthetic')\n";
    return kConfigError;
  }
  ChannelGraph g = experiment_graph(experiment_config(o));
  AttackerConfig acfg;
  acfg.budget = budget;
  acfg.alpha = alpha;
  acfg.setup_cost = C;
  acfg.timeout_d = o.timeout_d;
  acfg.confirm_delta = o.confirm_delta;
  acfg.n = n;
  acfg.aux_mode = parse_mode(o.balance_mode);
  if (strategy == "grief") acfg.strategy = Strategy::grief;
  else if (strategy == "wait-reject") acfg.strategy = Strategy::wait_reject_at_deadline;
  else {
    std::cerr << "attack-trace: --strategy must be grief or wait-reject\n";
    return kConfigError;
  }

  GpParams gp;
  const GpParams* gpp = nullptr;
  if (protocol == "htlc-gp") {
    gp = gp_params(gamma, 0.0, 0.0, n, o.confirm_delta, false);
    gpp = &gp;
  } else if (protocol == "htlc-gp-zeta") {
    const auto n_max = max_path_length(k, zeta);
    if (!n_max) {
      std::cerr << "attack-trace: zeta must be positive for htlc-gp-zeta\n";
      return kConfigError;
    }
    gp = gp_params(penalty_rate(k, zeta, o.timeout_d, o.confirm_delta), zeta, k,
                   *n_max, o.confirm_delta, false);
    gpp = &gp;
  } else if (protocol != "htlc") {
    std::cerr << "attack-trace: --protocol must be htlc, htlc-gp or htlc-gp-zeta\n";
    return kConfigError;
  }

  NodeId corrupt = 0;
  if (!corrupt_name.empty()) {
    const auto id = g.node(corrupt_name);
    if (!id) {
      std::cerr << "attack-trace: unknown node '" << corrupt_name << "'\n";
      return kConfigError;
    }
    corrupt = *id;
  } else {
    const auto candidates = corrupt_candidates(g);
    if (candidates.empty()) {
      std::cerr << "attack-trace: no corruption candidate in the snapshot\n";
      return kInfeasible;
    }
    corrupt = candidates.front();
  }

  std::mt19937_64 rng(o.seed);
  const AttackInstance inst = plan_attack(g, corrupt, gpp, acfg, o.econ);
  write_resolved_config(app, o, "attack-trace");
  if (!inst.feasible) {
    std::cerr << "attack-trace: no feasible self-payment cycle for "
              << g.name(corrupt) << "\n";
    return kInfeasible;
  }
  const AttackOutcome out =
      execute_attack(g, inst, gpp, acfg, o.econ, ForwardPolicy{}, true, rng);
  std::string lines;
  for (const auto& e : out.events) lines += to_json_line(e) + "\n";
  write_file(fs::path(o.out_dir) / "attack-trace.jsonl", lines);

  nlohmann::json summary{{"corrupt", g.name(corrupt)},
                         {"cycle_length", out.cycle_length},
                         {"payment_value", inst.payment_value},
                         {"victim_payment_locked", out.victim_payment_locked},
                         {"victim_penalty_locked", out.victim_penalty_locked},
                         {"griefer_locked", out.griefer_locked},
                         {"penalty_transferred", out.penalty_transferred},
                         {"channels_closed", out.channels_closed},
                         {"events", out.events.size()}};
  std::cout << summary.dump(2) << "\n";
  return out.executed ? kOk : kInfeasible;
}

}  // namespace

int dispatch(std::vector<std::string> args) {
  CLI::App app{"payment-channel griefing-attack simulator"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* info = app.add_subcommand("snapshot-info", "summarize a channel snapshot");
  add_common(info, o, false);
  add_graph(info, o);

  auto* route = app.add_subcommand("route", "find the cheapest feasible path");
  add_common(route, o, false);
  add_graph(route, o);
  std::string src, dst;
  std::int64_t amount = 1000;
  int max_len = 20;
  route->add_option("--src", src, "payer node id")->required();
  route->add_option("--dst", dst, "payee node id")->required();
  route->add_option("--amount", amount, "payment value, sat")->capture_default_str();
  route->add_option("--max-len", max_len, "maximum path length n")->capture_default_str();

  auto* sweep = app.add_subcommand("game-sweep", "expected payoffs over the belief grid");
  add_common(sweep, o, true);
  std::vector<double> thetas, amounts{15000, 30000, 45000, 60000}, rates{0.1, 0.2, 0.3, 0.4};
  double sweep_gamma = 1e-5, q = 0.7, setup_c = 100;
  sweep->add_option("--theta", thetas, "belief grid (default 0..1 step 0.005)");
  sweep->add_option("--amount", amounts, "transaction amounts, sat")->capture_default_str();
  sweep->add_option("--tx-rate", rates, "arrival rates to sweep")->capture_default_str();
  sweep->add_option("--gamma", sweep_gamma, "penalty rate for the HTLC-GP game")
      ->capture_default_str();
  sweep->add_option("--q", q, "corrupt mixing probability")->capture_default_str();
  sweep->add_option("--C", setup_c, "attacker setup cost")->capture_default_str();

  auto* pcalc = app.add_subcommand("penalty-calc", "penalty rate, path bound, k_max");
  pcalc->set_help_flag("--help", "print help");  // frees -h for the liveness key
  add_common(pcalc, o, false);
  double pk = 0.005, pzeta = 0.00025, ph = 0.0, palpha = 10000, premain = 0,
         pt_tilde = 0;
  pcalc->add_option("--k", pk, "cumulative penalty / payment value")->capture_default_str();
  pcalc->add_option("--zeta", pzeta, "guaranteed minimum compensation")->capture_default_str();
  pcalc->add_option("--h", ph, "payee liveness probability (enables k_max)");
  pcalc->add_option("--alpha", palpha, "payment value for k_max")->capture_default_str();
  pcalc->add_option("--remain", premain, "payee residual capacity")->capture_default_str();
  pcalc->add_option("--t-tilde", pt_tilde, "remaining channel lifetime")->capture_default_str();

  auto* claims = app.add_subcommand("claims-check", "closed-form loss vs direct summation");
  add_common(claims, o, false);
  std::vector<double> claim_gammas{1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
  int claim_n = 20;
  claims->add_option("--gamma", claim_gammas, "penalty rates to check")->capture_default_str();
  claims->add_option("--n", claim_n, "maximum path length")->capture_default_str();

  auto* table2 = app.add_subcommand("table2", "the (k, zeta) -> (gamma, n_max) grid");
  add_common(table2, o, false);

  auto* capacity = app.add_subcommand("capacity", "victim capacity locked vs the HTLC baseline");
  add_common(capacity, o, true);
  add_graph(capacity, o);
  std::vector<double> cap_gammas{1e-7, 1e-6, 1e-5, 1e-4, 1e-3}, cap_ks, cap_zetas;
  std::int64_t budget = 50'000'000, cap_alpha = 50'000, cap_c = 200'000;
  int cap_n = 20;
  capacity->add_option("--gamma", cap_gammas, "HTLC-GP penalty rates")->capture_default_str();
  capacity->add_option("--k", cap_ks, "guaranteed-minimum k values (paired with --zeta)");
  capacity->add_option("--zeta", cap_zetas, "guaranteed-minimum zeta values");
  capacity->add_option("--budget", budget, "attacker budget B_EX, sat")->capture_default_str();
  capacity->add_option("--alpha", cap_alpha, "per-payment budget, sat")->capture_default_str();
  capacity->add_option("--C", cap_c, "auxiliary cost per attack, sat")->capture_default_str();
  capacity->add_option("--n", cap_n, "maximum allowed path length")->capture_default_str();

  auto* success = app.add_subcommand("success-rate", "HTLC-GP/HTLC success ratio, no attacker");
  add_common(success, o, true);
  add_graph(success, o);
  std::vector<double> sr_gammas{1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
  int workload = 3000;
  success->add_option("--gamma", sr_gammas, "penalty rates")->capture_default_str();
  success->add_option("--workload", workload, "number of transactions")->capture_default_str();

  auto* scale = app.add_subcommand("scalability", "throughput and completion counts");
  add_common(scale, o, true);
  add_graph(scale, o);
  std::vector<int> requests{100, 1000, 5000};
  double scale_gamma = 1e-5, scale_theta = 0.05;
  std::string mode = "altruistic";
  scale->add_option("--requests", requests, "request counts")->capture_default_str();
  scale->add_option("--gamma", scale_gamma, "penalty rate")->capture_default_str();
  scale->add_option("--mode", mode, "altruistic | rational")->capture_default_str();
  scale->add_option("--theta", scale_theta, "uniform belief in rational mode")
      ->capture_default_str();

  auto* trace = app.add_subcommand("attack-trace", "one attack instance with ledger events");
  add_common(trace, o, true);
  add_graph(trace, o);
  std::string corrupt_name, protocol = "htlc-gp", strategy = "wait-reject";
  double tr_gamma = 1e-5, tr_k = 0.25, tr_zeta = 0.025;
  std::int64_t tr_budget = 50'000'000, tr_alpha = 50'000, tr_c = 200'000;
  int tr_n = 20;
  trace->add_option("--corrupt", corrupt_name, "corrupt node id (default: first candidate)");
  trace->add_option("--protocol", protocol, "htlc | htlc-gp | htlc-gp-zeta")
      ->capture_default_str();
  trace->add_option("--gamma", tr_gamma, "penalty rate (htlc-gp)")->capture_default_str();
  trace->add_option("--k", tr_k, "k (htlc-gp-zeta)")->capture_default_str();
  trace->add_option("--zeta", tr_zeta, "zeta (htlc-gp-zeta)")->capture_default_str();
  trace->add_option("--budget", tr_budget, "attacker budget, sat")->capture_default_str();
  trace->add_option("--alpha", tr_alpha, "per-payment budget, sat")->capture_default_str();
  trace->add_option("--C", tr_c, "auxiliary cost, sat")->capture_default_str();
  trace->add_option("--n", tr_n, "maximum allowed path length")->capture_default_str();
  trace->add_option("--strategy", strategy, "grief | wait-reject")->capture_default_str();

  try {
    args = apply_config_file(std::move(args));
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (info->parsed()) return cmd_snapshot_info(*info, o);
    if (route->parsed()) return cmd_route(*route, o, src, dst, amount, max_len);
    if (sweep->parsed())
      return cmd_game_sweep(*sweep, o, thetas, amounts, rates, sweep_gamma, q, setup_c);
    if (pcalc->parsed())
      return cmd_penalty_calc(*pcalc, o, pk, pzeta, ph, palpha, premain, pt_tilde);
    if (claims->parsed()) return cmd_claims_check(*claims, o, claim_gammas, claim_n);
    if (table2->parsed()) return cmd_table2(*table2, o);
    if (capacity->parsed())
      return cmd_capacity(*capacity, o, cap_gammas, cap_ks, cap_zetas, budget,
                          cap_alpha, cap_c, cap_n);
    if (success->parsed()) return cmd_success_rate(*success, o, sr_gammas, workload);
    if (scale->parsed())
      return cmd_scalability(*scale, o, requests, scale_gamma, mode, scale_theta);
    if (trace->parsed())
      return cmd_attack_trace(*trace, o, corrupt_name, protocol, tr_gamma, tr_k,
                              tr_zeta, tr_budget, tr_alpha, tr_c, tr_n, strategy);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args));
}
