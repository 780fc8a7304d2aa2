#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcn/economics.hpp"

namespace pcn {

using NodeId = std::uint32_t;

enum class BalanceMode { unilateral, split };

/// A funded payment channel. Coins in live contracts sit in `in_flight`;
/// remain_ab + remain_ba + in_flight == locked_ab + locked_ba while open.
struct Channel {
  NodeId a = 0;
  NodeId b = 0;
  std::int64_t locked_ab = 0;
  std::int64_t locked_ba = 0;
  std::int64_t remain_ab = 0;
  std::int64_t remain_ba = 0;
  std::int64_t in_flight = 0;
  std::int64_t opened_at = 0;
  std::int64_t lifetime = 1'000'000;  // default T when the snapshot has none
  bool open = true;

  std::int64_t capacity() const { return locked_ab + locked_ba; }
};

struct PaymentPath {
  std::vector<NodeId> hops;            // U_0 .. U_kappa
  std::vector<std::int64_t> amounts;   // alpha_0 .. alpha_{kappa-1}
  std::vector<std::int64_t> timeouts;  // t_0 .. t_{kappa-1}

  int length() const { return static_cast<int>(hops.size()) - 1; }
};

/// Bidirected channel graph with a block-height clock. Single-owner mutable
/// state: experiments clone one graph per independent run.
class ChannelGraph {
 public:
  NodeId add_node(const std::string& name);
  std::optional<NodeId> node(const std::string& name) const;
  const std::string& name(NodeId id) const { return names_.at(id); }
  std::size_t node_count() const { return names_.size(); }
  std::size_t channel_count() const { return channels_.size(); }

  /// Adds an undirected channel; rejects duplicates and self-loops.
  std::size_t add_channel(NodeId a, NodeId b, std::int64_t capacity,
                          BalanceMode mode, std::int64_t opened_at = 0,
                          std::int64_t lifetime = 1'000'000);
  /// Adds a channel funded entirely by `funder`.
  std::size_t add_unilateral_channel(NodeId funder, NodeId peer,
                                     std::int64_t capacity,
                                     std::int64_t opened_at = 0);

  const Channel& channel_at(std::size_t idx) const { return channels_[idx]; }
  std::optional<std::size_t> channel_between(NodeId u, NodeId v) const;
  const std::vector<std::pair<NodeId, std::size_t>>& neighbors(NodeId u) const {
    return adjacency_[u];
  }
  int degree(NodeId u) const;  // open channels only

  std::int64_t remain(NodeId from, NodeId to) const;
  /// Moves `amount` from remain(from,to) into the channel's in-flight pool.
  void lock(NodeId from, NodeId to, std::int64_t amount);
  /// Releases `amount` of in-flight coins to `side`'s balance toward the peer.
  void release(NodeId side, NodeId peer, std::int64_t amount);
  void close_channel(NodeId u, NodeId v);

  std::int64_t clock() const { return clock_; }
  void advance_clock(std::int64_t to);

  /// Σ remain + Σ in-flight over all channels (mining fees live outside).
  std::int64_t total_liquidity() const;

 private:
  Channel& mutable_channel(NodeId u, NodeId v);
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<Channel> channels_;
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> adjacency_;
  std::int64_t clock_ = 0;
};

/// Snapshot I/O. CSV header: src,dst,capacity_sat[,opened_at][,lifetime].
/// A .json file with an array of objects carrying the same keys also loads.
ChannelGraph load_snapshot(const std::string& path, BalanceMode mode);
ChannelGraph load_snapshot_csv_text(const std::string& text, BalanceMode mode);
void save_snapshot(const ChannelGraph& g, const std::string& path);
std::string snapshot_to_csv(const ChannelGraph& g);

/// Synthetic scale-free fallback graph (preferential attachment with a mix of
/// single- and double-edge arrivals, so pendant vertices exist). Deterministic
/// for a given seed.
struct SyntheticOptions {
  int nodes = 2000;
  double single_edge_fraction = 0.35;
  std::int64_t capacity_min = 100'000;
  std::int64_t capacity_max = 10'000'000;
};
ChannelGraph synthetic_graph(std::uint64_t seed, const SyntheticOptions& opt,
                             BalanceMode mode);

/// Hop amounts that deliver `amount` at the far end of a kappa-hop path:
/// a_{kappa-1} = amount, a_{i-1} = a_i + round(fee(a_i)).
std::vector<std::int64_t> hop_amounts(std::int64_t amount, int hops,
                                      const EconomicParams& econ);

struct RoutingParams {
  EconomicParams econ;
  std::int64_t timeout_d = 100;
  std::int64_t confirm_delta = 100;
};

/// Shortest feasible path by hop count; ties broken by the lexicographically
/// smallest node-name sequence. Every hop must satisfy remain >= its amount.
std::optional<PaymentPath> find_route(const ChannelGraph& g, NodeId src,
                                      NodeId dst, std::int64_t amount,
                                      int max_len, const RoutingParams& rp);

/// Positional liquidity demands of a candidate cycle of length L:
/// forward[i] is locked by U_i toward U_{i+1} (i in [0, L-1]),
/// backward[i] is locked by U_i toward U_{i-1} (i in [1, L]).
struct CycleDemands {
  std::vector<std::int64_t> forward;
  std::vector<std::int64_t> backward;
};
using CycleDemandFn = CycleDemands (*)(int length, const void* ctx);

/// Simple cycle through `corrupt` of exactly target_len hops if one exists
/// within the search budget, otherwise the longest feasible shorter cycle.
/// Deterministic: neighbors explored by descending degree, then name.
std::optional<std::vector<NodeId>> find_attack_cycle(const ChannelGraph& g,
                                                     NodeId corrupt,
                                                     int target_len,
                                                     CycleDemandFn demands,
                                                     const void* ctx,
                                                     std::size_t budget = 50'000);

}  // namespace pcn
