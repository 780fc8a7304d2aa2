#include "pcn/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pcn {

NodeId ChannelGraph::add_node(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<NodeId>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  adjacency_.emplace_back();
  return id;
}

std::optional<NodeId> ChannelGraph::node(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ChannelGraph::add_channel(NodeId a, NodeId b, std::int64_t capacity,
                                      BalanceMode mode, std::int64_t opened_at,
                                      std::int64_t lifetime) {
  if (a == b) throw std::invalid_argument("add_channel: self loop");
  if (capacity <= 0) throw std::invalid_argument("add_channel: capacity must be positive");
  if (channel_between(a, b)) throw std::invalid_argument("add_channel: duplicate edge");
  Channel c;
  c.a = a;
  c.b = b;
  c.opened_at = opened_at;
  c.lifetime = lifetime;
  if (mode == BalanceMode::split) {
    c.locked_ab = capacity / 2;
    c.locked_ba = capacity - capacity / 2;
  } else {
    c.locked_ab = capacity;
    c.locked_ba = 0;
  }
  c.remain_ab = c.locked_ab;
  c.remain_ba = c.locked_ba;
  const std::size_t idx = channels_.size();
  channels_.push_back(c);
  adjacency_[a].emplace_back(b, idx);
  adjacency_[b].emplace_back(a, idx);
  return idx;
}

std::size_t ChannelGraph::add_unilateral_channel(NodeId funder, NodeId peer,
                                                 std::int64_t capacity,
                                                 std::int64_t opened_at) {
  return add_channel(funder, peer, capacity, BalanceMode::unilateral, opened_at);
}

std::optional<std::size_t> ChannelGraph::channel_between(NodeId u, NodeId v) const {
  if (u >= adjacency_.size()) return std::nullopt;
  for (const auto& [peer, idx] : adjacency_[u])
    if (peer == v) return idx;
  return std::nullopt;
}

int ChannelGraph::degree(NodeId u) const {
  int d = 0;
  for (const auto& [peer, idx] : adjacency_[u])
    if (channels_[idx].open) ++d;
  return d;
}

Channel& ChannelGraph::mutable_channel(NodeId u, NodeId v) {
  auto idx = channel_between(u, v);
  if (!idx) throw std::invalid_argument("no channel between nodes");
  return channels_[*idx];
}

std::int64_t ChannelGraph::remain(NodeId from, NodeId to) const {
  auto idx = channel_between(from, to);
  if (!idx) return 0;
  const Channel& c = channels_[*idx];
  return c.a == from ? c.remain_ab : c.remain_ba;
}

void ChannelGraph::lock(NodeId from, NodeId to, std::int64_t amount) {
  Channel& c = mutable_channel(from, to);
  if (!c.open) throw std::logic_error("lock on closed channel");
  if (amount < 0) throw std::invalid_argument("lock: negative amount");
  std::int64_t& side = (c.a == from) ? c.remain_ab : c.remain_ba;
  if (side < amount) throw std::logic_error("lock: insufficient remain");
  side -= amount;
  c.in_flight += amount;
}

void ChannelGraph::release(NodeId side, NodeId peer, std::int64_t amount) {
  Channel& c = mutable_channel(side, peer);
  if (!c.open) throw std::logic_error("release on closed channel");
  if (amount < 0 || amount > c.in_flight)
    throw std::logic_error("release: amount not in flight");
  c.in_flight -= amount;
  (c.a == side ? c.remain_ab : c.remain_ba) += amount;
}

void ChannelGraph::close_channel(NodeId u, NodeId v) {
  Channel& c = mutable_channel(u, v);
  if (!c.open) throw std::logic_error("channel already closed");
  c.open = false;
}

void ChannelGraph::advance_clock(std::int64_t to) {
  if (to < clock_) throw std::logic_error("clock must be monotone");
  clock_ = to;
}

std::int64_t ChannelGraph::total_liquidity() const {
  std::int64_t sum = 0;
  for (const auto& c : channels_) sum += c.remain_ab + c.remain_ba + c.in_flight;
  return sum;
}

// ---------------------------------------------------------------------------
// Snapshot I/O

namespace {

struct SnapshotRow {
  std::string src, dst;
  std::int64_t capacity = 0;
  std::int64_t opened_at = 0;
  std::int64_t lifetime = 1'000'000;
  bool has_opened = false;
  bool has_lifetime = false;
};

ChannelGraph build_graph(const std::vector<SnapshotRow>& rows, BalanceMode mode) {
  ChannelGraph g;
  std::size_t line = 1;
  for (const auto& r : rows) {
    ++line;
    const NodeId a = g.add_node(r.src);
    const NodeId b = g.add_node(r.dst);
    try {
      g.add_channel(a, b, r.capacity, mode, r.opened_at, r.lifetime);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("snapshot record " + std::to_string(line) + ": " + e.what());
    }
  }
  return g;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

std::int64_t parse_int(const std::string& s, std::size_t line, const char* what) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw std::runtime_error("snapshot parse error at line " + std::to_string(line) +
                             ": bad " + std::string(what) + " '" + s + "'");
  }
}

}  // namespace

ChannelGraph load_snapshot_csv_text(const std::string& text, BalanceMode mode) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("snapshot parse error at line 1: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "src" || header[1] != "dst" ||
      header[2] != "capacity_sat")
    throw std::runtime_error(
        "snapshot parse error at line 1: expected header src,dst,capacity_sat");
  int opened_col = -1, lifetime_col = -1;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i] == "opened_at") opened_col = static_cast<int>(i);
    else if (header[i] == "lifetime") lifetime_col = static_cast<int>(i);
    else
      throw std::runtime_error("snapshot parse error at line 1: unknown column '" +
                               header[i] + "'");
  }

  std::vector<SnapshotRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw std::runtime_error("snapshot parse error at line " + std::to_string(lineno) +
                               ": expected " + std::to_string(header.size()) + " fields");
    SnapshotRow r;
    r.src = fields[0];
    r.dst = fields[1];
    r.capacity = parse_int(fields[2], lineno, "capacity_sat");
    if (opened_col >= 0) {
      r.opened_at = parse_int(fields[static_cast<std::size_t>(opened_col)], lineno, "opened_at");
      r.has_opened = true;
    }
    if (lifetime_col >= 0) {
      r.lifetime = parse_int(fields[static_cast<std::size_t>(lifetime_col)], lineno, "lifetime");
      r.has_lifetime = true;
    }
    rows.push_back(std::move(r));
  }
  return build_graph(rows, mode);
}

ChannelGraph load_snapshot(const std::string& path, BalanceMode mode) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
      throw std::runtime_error("snapshot parse error: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw std::runtime_error("snapshot parse error: expected JSON array");
    std::vector<SnapshotRow> rows;
    std::size_t i = 0;
    for (const auto& item : doc) {
      ++i;
      SnapshotRow r;
      try {
        r.src = item.at("src").get<std::string>();
        r.dst = item.at("dst").get<std::string>();
        r.capacity = item.at("capacity_sat").get<std::int64_t>();
        if (item.contains("opened_at")) r.opened_at = item["opened_at"].get<std::int64_t>();
        if (item.contains("lifetime")) r.lifetime = item["lifetime"].get<std::int64_t>();
      } catch (const std::exception& e) {
        throw std::runtime_error("snapshot parse error at record " + std::to_string(i) +
                                 ": " + e.what());
      }
      rows.push_back(std::move(r));
    }
    return build_graph(rows, mode);
  }
  return load_snapshot_csv_text(text, mode);
}

std::string snapshot_to_csv(const ChannelGraph& g) {
  std::string out = "src,dst,capacity_sat,opened_at,lifetime\n";
  for (std::size_t i = 0; i < g.channel_count(); ++i) {
    const Channel& c = g.channel_at(i);
    out += g.name(c.a) + "," + g.name(c.b) + "," + std::to_string(c.capacity()) +
           "," + std::to_string(c.opened_at) + "," + std::to_string(c.lifetime) + "\n";
  }
  return out;
}

void save_snapshot(const ChannelGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  out << snapshot_to_csv(g);
}

ChannelGraph synthetic_graph(std::uint64_t seed, const SyntheticOptions& opt,
                             BalanceMode mode) {
  if (opt.nodes < 4) throw std::invalid_argument("synthetic_graph: too few nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(static_cast<double>(opt.capacity_min));
  const double log_hi = std::log(static_cast<double>(opt.capacity_max));
  auto draw_capacity = [&]() {
    const double c = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    return static_cast<std::int64_t>(std::llround(c));
  };

  ChannelGraph g;
  auto node_name = [](int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%05d", i);
    return std::string(buf);
  };
  for (int i = 0; i < opt.nodes; ++i) g.add_node(node_name(i));

  // Degree-weighted endpoint pool for preferential attachment.
  std::vector<NodeId> pool;
  auto connect = [&](NodeId a, NodeId b) {
    g.add_channel(a, b, draw_capacity(), mode);
    pool.push_back(a);
    pool.push_back(b);
  };
  connect(0, 1);
  connect(1, 2);
  connect(2, 0);

  for (int i = 3; i < opt.nodes; ++i) {
    const NodeId me = static_cast<NodeId>(i);
    const int edges = unit(rng) < opt.single_edge_fraction ? 1 : 2;
    int added = 0;
    int tries = 0;
    while (added < edges && tries < 64) {
      ++tries;
      const NodeId target = pool[static_cast<std::size_t>(
          static_cast<double>(pool.size()) * unit(rng))];
      if (target == me || g.channel_between(me, target)) continue;
      connect(me, target);
      ++added;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Routing

std::vector<std::int64_t> hop_amounts(std::int64_t amount, int hops,
                                      const EconomicParams& econ) {
  if (hops < 1) throw std::invalid_argument("hop_amounts: hops < 1");
  if (amount <= 0) throw std::invalid_argument("hop_amounts: amount <= 0");
  std::vector<std::int64_t> a(static_cast<std::size_t>(hops));
  a[static_cast<std::size_t>(hops - 1)] = amount;
  for (int i = hops - 1; i > 0; --i) {
    const double f = fee(econ, static_cast<double>(a[static_cast<std::size_t>(i)]));
    a[static_cast<std::size_t>(i - 1)] =
        a[static_cast<std::size_t>(i)] + std::llround(f);
  }
  return a;
}

std::optional<PaymentPath> find_route(const ChannelGraph& g, NodeId src,
                                      NodeId dst, std::int64_t amount,
                                      int max_len, const RoutingParams& rp) {
  if (src == dst || amount <= 0 || max_len < 1) return std::nullopt;
  const std::size_t n = g.node_count();
  if (src >= n || dst >= n) return std::nullopt;

  // Amount carried by a hop at backward level l (l hops from the sink).
  std::vector<std::int64_t> level_amount(static_cast<std::size_t>(max_len) + 1, 0);
  level_amount[1] = amount;
  for (int l = 1; l < max_len; ++l) {
    const double f = fee(rp.econ, static_cast<double>(level_amount[static_cast<std::size_t>(l)]));
    level_amount[static_cast<std::size_t>(l + 1)] =
        level_amount[static_cast<std::size_t>(l)] + std::llround(f);
  }

  constexpr int kUnreached = -1;
  std::vector<int> dist(n, kUnreached);
  dist[dst] = 0;
  std::vector<NodeId> frontier{dst};
  int level = 0;
  while (!frontier.empty() && dist[src] == kUnreached && level < max_len) {
    ++level;
    std::vector<NodeId> next;
    for (const NodeId v : frontier) {
      for (const auto& [u, idx] : g.neighbors(v)) {
        if (dist[u] != kUnreached) continue;
        const Channel& c = g.channel_at(idx);
        if (!c.open) continue;
        const std::int64_t avail = (c.a == u) ? c.remain_ab : c.remain_ba;
        if (avail < level_amount[static_cast<std::size_t>(level)]) continue;
        dist[u] = level;
        next.push_back(u);
      }
    }
    frontier = std::move(next);
  }
  if (dist[src] == kUnreached) return std::nullopt;

  const int kappa = dist[src];
  PaymentPath path;
  path.hops.push_back(src);
  NodeId cur = src;
  int d = kappa;
  while (cur != dst) {
    bool found = false;
    NodeId best = 0;
    for (const auto& [w, idx] : g.neighbors(cur)) {
      if (dist[w] != d - 1) continue;
      const Channel& c = g.channel_at(idx);
      if (!c.open) continue;
      const std::int64_t avail = (c.a == cur) ? c.remain_ab : c.remain_ba;
      if (avail < level_amount[static_cast<std::size_t>(d)]) continue;
      if (!found || g.name(w) < g.name(best)) {
        best = w;
        found = true;
      }
    }
    if (!found) return std::nullopt;  // cannot happen with consistent labels
    path.amounts.push_back(level_amount[static_cast<std::size_t>(d)]);
    path.hops.push_back(best);
    cur = best;
    --d;
  }
  const TimeoutSchedule sched = timeout_schedule(kappa, rp.timeout_d, rp.confirm_delta);
  path.timeouts = sched.t;
  return path;
}

namespace {

struct CycleSearch {
  const ChannelGraph& g;
  NodeId corrupt;
  int length;
  const CycleDemands& demands;
  std::size_t budget;
  std::vector<char> visited;
  std::vector<NodeId> stack;
  std::vector<std::vector<NodeId>>& order;  // built lazily per expanded node
  std::vector<char>& order_built;
  const std::vector<int>& degree;
  const std::vector<int>& dist;  // hop distance back to the corrupt node

  const std::vector<NodeId>& neighbors_ordered(NodeId u) {
    if (!order_built[u]) {
      order_built[u] = 1;
      for (const auto& [w, idx] : g.neighbors(u))
        if (g.channel_at(idx).open) order[u].push_back(w);
      std::sort(order[u].begin(), order[u].end(), [&](NodeId x, NodeId y) {
        if (degree[x] != degree[y]) return degree[x] > degree[y];
        return g.name(x) < g.name(y);
      });
    }
    return order[u];
  }

  bool feasible_hop(NodeId from, NodeId to, int pos) const {
    // U_pos -> U_{pos+1}: payment lock by U_pos, penalty lock by U_{pos+1}.
    if (g.remain(from, to) < demands.forward[static_cast<std::size_t>(pos)]) return false;
    if (g.remain(to, from) < demands.backward[static_cast<std::size_t>(pos + 1)]) return false;
    return true;
  }

  bool dfs(NodeId u, int pos) {
    if (budget == 0) return false;
    --budget;
    if (pos == length - 1) {
      if (!g.channel_between(u, corrupt)) return false;
      if (!feasible_hop(u, corrupt, pos)) return false;
      stack.push_back(corrupt);
      return true;
    }
    for (const NodeId w : neighbors_ordered(u)) {
      if (visited[w] || w == corrupt) continue;
      if (dist[w] > length - pos - 1) continue;  // cannot close in time
      if (!feasible_hop(u, w, pos)) continue;
      visited[w] = 1;
      stack.push_back(w);
      if (dfs(w, pos + 1)) return true;
      stack.pop_back();
      visited[w] = 0;
      if (budget == 0) return false;
    }
    return false;
  }
};

}  // namespace

std::optional<std::vector<NodeId>> find_attack_cycle(const ChannelGraph& g,
                                                     NodeId corrupt,
                                                     int target_len,
                                                     CycleDemandFn demands,
                                                     const void* ctx,
                                                     std::size_t budget) {
  if (corrupt >= g.node_count() || target_len < 2) return std::nullopt;

  std::vector<int> degree(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) degree[u] = g.degree(u);
  std::vector<std::vector<NodeId>> order(g.node_count());
  std::vector<char> order_built(g.node_count(), 0);

  // Capacity-agnostic hop distances back to the corrupt node; an exact-length
  // cycle can pass through w only while dist[w] hops still fit.
  std::vector<int> dist(g.node_count(), std::numeric_limits<int>::max());
  dist[corrupt] = 0;
  {
    std::vector<NodeId> frontier{corrupt};
    int level = 0;
    while (!frontier.empty() && level <= target_len) {
      ++level;
      std::vector<NodeId> next;
      for (const NodeId v : frontier)
        for (const auto& [w, idx] : g.neighbors(v)) {
          if (!g.channel_at(idx).open) continue;
          if (dist[w] == std::numeric_limits<int>::max()) {
            dist[w] = level;
            next.push_back(w);
          }
        }
      frontier = std::move(next);
    }
  }

  // A 2-hop cycle would reuse the one channel in both directions; distinct
  // channels require length >= 3.
  for (int len = target_len; len >= 3; --len) {
    const CycleDemands d = demands(len, ctx);
    CycleSearch search{g,  corrupt,     len,    d,    budget,
                       {}, {},          order,  order_built, degree, dist};
    search.visited.assign(g.node_count(), 0);
    search.visited[corrupt] = 1;
    search.stack.push_back(corrupt);
    if (search.dfs(corrupt, 0)) return search.stack;
  }
  return std::nullopt;
}

}  // namespace pcn
