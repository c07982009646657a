#include "core/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

namespace wsp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void greedy_loop(WspState& st,
                 std::vector<std::pair<uint32_t, uint32_t>>* trace) {
  std::set<std::pair<uint32_t, uint32_t>> deleted;
  for (;;) {
    bool found = false;
    uint64_t best_w = 0;
    std::pair<uint32_t, uint32_t> best{};
    for (const auto& [key, w] : st.weights()) {
      if (deleted.count(key)) continue;
      if (st.locality_part(key.first, key.second) == 0) continue;
      // Map order is ascending, so on ties the lexicographically smallest
      // pair sticks.
      if (!found || w > best_w) {
        found = true;
        best_w = w;
        best = key;
      }
    }
    if (!found) break;

    auto [a, b] = best;
    if (!st.legal_merge(a, b)) {
      deleted.insert(best);
      continue;
    }

    // An edge of the contracted block stays struck only if both halves
    // had been struck before.
    uint32_t keep = std::min(a, b);
    std::set<std::pair<uint32_t, uint32_t>> next;
    std::map<uint32_t, int> struck_count;
    for (auto [p, q] : deleted) {
      bool p_in = (p == a || p == b);
      bool q_in = (q == a || q == b);
      if (p_in && q_in) continue;
      if (p_in)
        ++struck_count[q];
      else if (q_in)
        ++struck_count[p];
      else
        next.insert({p, q});
    }
    for (auto [x, cnt] : struck_count)
      if (cnt == 2) next.insert(std::minmax(keep, x));
    deleted = std::move(next);

    st.merge(a, b);
    if (trace) trace->push_back(best);
  }
}

struct UnionFind {
  std::vector<uint32_t> parent;
  explicit UnionFind(uint32_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  uint32_t find(uint32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;  // lowest index wins, keeps block ordering stable
  }
};

struct MaskSearch {
  const WspGraph* g;
  const CostModel* model;
  std::vector<std::vector<uint32_t>> items;
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // indices into items
  std::vector<uint8_t> included;
  uint64_t incumbent;
  Blocks best;
  SearchBudget budget;
  Clock::time_point t0;
  SearchStats* stats;
  bool exhausted = false;

  Blocks induced() {
    UnionFind uf(static_cast<uint32_t>(items.size()));
    for (size_t e = 0; e < edges.size(); ++e)
      if (included[e]) uf.unite(edges[e].first, edges[e].second);
    std::map<uint32_t, std::vector<uint32_t>> groups;
    for (uint32_t i = 0; i < items.size(); ++i) {
      auto& grp = groups[uf.find(i)];
      grp.insert(grp.end(), items[i].begin(), items[i].end());
    }
    Blocks out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) {
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
    }
    return out;
  }

  void dfs(size_t from) {
    if (stats->nodes >= budget.max_nodes ||
        ms_since(t0) > budget.max_seconds * 1000.0) {
      exhausted = true;
      return;
    }
    ++stats->nodes;

    Blocks p = induced();
    uint64_t c = model->evaluate(*g, p);
    if (c >= incumbent) {
      ++stats->pruned;
      return;  // clearing more bits only refines p, and refining never pays
    }
    if (is_legal_partition(*g, Partition{p})) {
      incumbent = c;
      best = std::move(p);
      return;
    }
    for (size_t j = from; j < edges.size(); ++j) {
      if (!included[j]) continue;
      included[j] = 0;
      dfs(j + 1);
      included[j] = 1;
      if (exhausted) return;
    }
  }
};

// Conflict picture used by the candidate screen. For a block x, marks(x)[c]
// says whether some simple path from x to c in the undirected union of the
// contracted dependency and forbid edges crosses a forbidden pair. Simple
// paths keep this tractable: the biconnected components between two vertices
// form a unique chain in the block-cut structure, and a simple path can be
// routed through a given edge exactly when that edge's component lies on the
// chain. One traversal of the vertex/component incidence answers every c.
struct ConflictReach {
  uint32_t n = 0;
  std::vector<std::vector<std::pair<uint32_t, bool>>> adj;  // (to, forbidden)
  std::vector<std::vector<uint32_t>> vertex_comps;
  std::vector<std::vector<uint32_t>> comp_verts;
  std::vector<uint8_t> comp_forbid;  // component contains a forbidden pair

  explicit ConflictReach(const WspState& st) : n(st.graph().n) {
    adj.assign(n, {});
    std::map<std::pair<uint32_t, uint32_t>, bool> edge;
    for (uint32_t b : st.block_ids()) {
      for (uint32_t d : st.dep_out(b)) edge[{std::min(b, d), std::max(b, d)}];
      for (uint32_t f : st.forbid(b))
        edge[{std::min(b, f), std::max(b, f)}] = true;
    }
    for (auto [key, forbidden] : edge) {
      adj[key.first].push_back({key.second, forbidden});
      adj[key.second].push_back({key.first, forbidden});
    }
    biconnect();
  }

  void biconnect() {
    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<uint32_t> parent(n, UINT32_MAX);
    vertex_comps.assign(n, {});
    int timer = 0;
    std::vector<std::tuple<uint32_t, uint32_t, bool>> pending;  // tree of edges
    for (uint32_t s = 0; s < n; ++s) {
      if (disc[s] != -1 || adj[s].empty()) continue;
      std::vector<std::pair<uint32_t, size_t>> stack{{s, 0}};
      disc[s] = low[s] = timer++;
      while (!stack.empty()) {
        auto& [u, i] = stack.back();
        if (i < adj[u].size()) {
          auto [v, forbidden] = adj[u][i++];
          if (disc[v] == -1) {
            pending.push_back({u, v, forbidden});
            parent[v] = u;
            disc[v] = low[v] = timer++;
            stack.push_back({v, 0});
          } else if (v != parent[u] && disc[v] < disc[u]) {
            pending.push_back({u, v, forbidden});
            low[u] = std::min(low[u], disc[v]);
          }
        } else {
          stack.pop_back();
          if (stack.empty()) continue;
          uint32_t p = stack.back().first;
          low[p] = std::min(low[p], low[u]);
          if (low[u] < disc[p]) continue;
          // u cannot reach above p: everything stacked since (p, u) is one
          // biconnected component.
          uint32_t id = static_cast<uint32_t>(comp_forbid.size());
          comp_forbid.push_back(0);
          comp_verts.push_back({});
          std::set<uint32_t> verts;
          while (!pending.empty()) {
            auto [a, b, forbidden] = pending.back();
            pending.pop_back();
            verts.insert(a);
            verts.insert(b);
            if (forbidden) comp_forbid[id] = 1;
            if ((a == p && b == u) || (a == u && b == p)) break;
          }
          for (uint32_t v : verts) {
            vertex_comps[v].push_back(id);
            comp_verts[id].push_back(v);
          }
        }
      }
    }
  }

  std::vector<uint8_t> marks(uint32_t x) const {
    // Alternating walk vertex -> incident components -> their vertices. The
    // structure is a tree, so the first visit fixes the chain flag.
    std::vector<uint8_t> out(n, 0), flag_v(n, 0), seen_v(n, 0);
    std::vector<uint8_t> flag_c(comp_forbid.size(), 0), seen_c(comp_forbid.size(), 0);
    seen_v[x] = 1;
    std::vector<std::pair<bool, uint32_t>> queue{{false, x}};
    for (size_t h = 0; h < queue.size(); ++h) {
      auto [is_comp, id] = queue[h];
      if (is_comp) {
        for (uint32_t v : comp_verts[id]) {
          if (seen_v[v]) continue;
          seen_v[v] = 1;
          flag_v[v] = flag_c[id];
          out[v] = flag_c[id];
          queue.push_back({false, v});
        }
      } else {
        for (uint32_t c : vertex_comps[id]) {
          if (seen_c[c]) continue;
          seen_c[c] = 1;
          flag_c[c] = static_cast<uint8_t>(flag_v[id] | comp_forbid[c]);
          queue.push_back({true, c});
        }
      }
    }
    return out;
  }

  bool equal_outside(uint32_t a, uint32_t b) const {
    std::vector<uint8_t> ma = marks(a), mb = marks(b);
    for (uint32_t c = 0; c < n; ++c)
      if (c != a && c != b && ma[c] != mb[c]) return false;
    return true;
  }
};

}  // namespace

PartitionResult singleton_partition(const WspGraph& g, const CostModel& m) {
  auto t0 = Clock::now();
  PartitionResult r;
  r.partition.blocks.resize(g.n);
  for (uint32_t i = 0; i < g.n; ++i) r.partition.blocks[i] = {i};
  r.cost = m.evaluate(g, r.partition.blocks);
  r.proven_optimal = g.n <= 1;
  r.stats.wall_ms = ms_since(t0);
  return r;
}

PartitionResult linear_partition(const WspGraph& g, const CostModel& m) {
  auto t0 = Clock::now();
  WspState st(g, m);
  PartitionResult r;
  for (uint32_t i = 1; i < g.n; ++i) {
    uint32_t prev = st.block_of(i - 1);
    if (st.legal_merge(prev, i)) {
      st.merge(prev, i);
      r.merge_trace.push_back({prev, i});
    }
  }
  r.partition = st.partition();
  r.cost = st.cost();
  r.proven_optimal = g.n <= 1;
  r.stats.merges = st.merges_applied();
  r.stats.wall_ms = ms_since(t0);
  return r;
}

PartitionResult greedy_partition(const WspGraph& g, const CostModel& m) {
  auto t0 = Clock::now();
  WspState st(g, m);
  PartitionResult r;
  greedy_loop(st, &r.merge_trace);
  r.partition = st.partition();
  r.cost = st.cost();
  r.proven_optimal = g.n <= 1;
  r.stats.merges = st.merges_applied();
  r.stats.wall_ms = ms_since(t0);
  return r;
}

std::optional<std::pair<uint32_t, uint32_t>> find_candidate(WspState& st) {
  // An edge whose merge is illegal at this state is struck from the weight
  // graph for good; later contractions will not revive it. Only surviving
  // edges count toward the pendant degree below.
  std::vector<std::pair<uint32_t, uint32_t>> dead;
  for (const auto& [key, w] : st.weights())
    if (!st.legal_merge(key.first, key.second)) dead.push_back(key);
  for (auto [a, b] : dead) st.strike(a, b);
  if (st.weights().empty()) return std::nullopt;

  std::vector<uint32_t> degree(st.graph().n, 0);
  for (const auto& [key, w] : st.weights()) {
    ++degree[key.first];
    ++degree[key.second];
  }

  // A merge is reported only when one endpoint has no other gainful partner
  // left and both endpoints show the same conflict picture to every other
  // block; committing such a pair early does not close off a cheaper
  // completion.
  //
  // Among qualifying pairs the scan prefers, in order: an edge touching the
  // block merged last (its neighborhood is the part of the graph the previous
  // step changed, so it is rescanned first), then an edge whose contraction
  // drags the fewest live edges down with it (a collapsed edge dies when its
  // other half was struck), then the smallest pair. The order is a heuristic,
  // not a safety condition, but it is fixed so runs are reproducible.
  ConflictReach reach(st);
  uint32_t last = st.last_merged();
  std::optional<std::pair<uint32_t, uint32_t>> best;
  std::tuple<int, int, std::pair<uint32_t, uint32_t>> best_rank{};
  for (const auto& [key, w] : st.weights()) {
    auto [u, v] = key;
    if (std::min(degree[u], degree[v]) >= 2) continue;
    if (!reach.equal_outside(u, v)) continue;
    int collateral = 0;
    for (const auto& [other, ow] : st.weights()) {
      auto [a, b] = other;
      if (other == key) continue;
      if (a == u || b == u) {
        uint32_t c = (a == u) ? b : a;
        if (c != v && st.struck(v, c)) ++collateral;
      } else if (a == v || b == v) {
        uint32_t c = (a == v) ? b : a;
        if (c != u && st.struck(u, c)) ++collateral;
      }
    }
    int not_touching = (last == UINT32_MAX || (u != last && v != last)) ? 1 : 0;
    std::tuple<int, int, std::pair<uint32_t, uint32_t>> rank{not_touching,
                                                             collateral, key};
    if (!best || rank < best_rank) {
      best = key;
      best_rank = rank;
    }
  }
  return best;
}

bool merge_by_mask(WspState& st, const std::vector<bool>& mask) {
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(st.weights().size());
  for (const auto& [key, w] : st.weights()) edges.push_back(key);
  if (mask.size() != edges.size())
    throw std::invalid_argument("mask covers " + std::to_string(mask.size()) +
                                " edges, state has " +
                                std::to_string(edges.size()));
  bool ok = true;
  for (size_t i = 0; i < edges.size(); ++i) {
    if (!mask[i]) continue;
    // A block id is the smallest member vertex, so an id from the snapshot
    // is still a vertex of whatever block swallowed it.
    uint32_t a = st.block_of(edges[i].first);
    uint32_t b = st.block_of(edges[i].second);
    if (a == b) continue;
    if (st.has_forbid(a, b)) ok = false;
    st.merge(a, b);
  }
  return ok;
}

PartitionResult unintrusive_partition(const WspGraph& g, const CostModel& m) {
  auto t0 = Clock::now();
  WspState st(g, m);
  PartitionResult r;
  while (auto cand = find_candidate(st)) {
    st.merge(cand->first, cand->second);
    r.merge_trace.push_back(*cand);
  }
  r.partition = st.partition();
  r.cost = st.cost();
  r.proven_optimal = g.n <= 1;
  r.stats.merges = st.merges_applied();
  r.stats.wall_ms = ms_since(t0);
  return r;
}

PartitionResult optimal_partition(const WspGraph& g, const CostModel& m,
                                  const SearchBudget& budget) {
  auto t0 = Clock::now();
  PartitionResult r;

  WspState st(g, m);
  while (auto cand = find_candidate(st)) st.merge(cand->first, cand->second);
  r.stats.merges = st.merges_applied();

  // The candidate screen strikes edges as it works, which is what keeps its
  // own merges safe, but the search wants every gainful pair of the
  // preconditioned partition on the table, including pairs that cannot merge
  // yet. A pair blocked only by a dependency path through a third block
  // becomes mergeable once that block joins one side, and some optima are
  // reachable only through such pairs, so the search alphabet must keep
  // them; each explored partition is checked for legality as a whole.
  // Replaying the blocks onto a fresh state rematerializes the full edge set
  // (forbidden pairs never materialize, which is the only permanent kind of
  // illegality).
  WspState base(g, m);
  for (uint32_t id : st.block_ids()) {
    const auto& mem = st.members(id);
    for (size_t i = 1; i < mem.size(); ++i)
      base.merge(base.block_of(mem[0]), base.block_of(mem[i]));
  }

  WspState seeded = base;
  greedy_loop(seeded, nullptr);

  MaskSearch search;
  search.g = &g;
  search.model = &m;
  auto ids = base.block_ids();
  std::vector<uint32_t> index_of(g.n == 0 ? 1 : g.n, 0);
  for (uint32_t i = 0; i < ids.size(); ++i) {
    search.items.push_back(base.members(ids[i]));
    index_of[ids[i]] = i;
  }
  for (const auto& [key, w] : base.weights())
    search.edges.push_back({index_of[key.first], index_of[key.second]});
  search.included.assign(search.edges.size(), 1);
  search.incumbent = seeded.cost();
  search.best = seeded.partition().blocks;
  search.budget = budget;
  search.t0 = t0;
  search.stats = &r.stats;
  search.dfs(0);

  r.partition.blocks = std::move(search.best);
  r.cost = search.incumbent;
  r.proven_optimal = !search.exhausted;
  r.stats.budget_exhausted = search.exhausted;
  r.merge_trace = reconstruct_trace(g, m, r.partition);
  r.stats.wall_ms = ms_since(t0);
  return r;
}

PartitionResult brute_force_partition(const WspGraph& g, const CostModel& m,
                                      uint32_t max_items,
                                      const Partition* base) {
  auto t0 = Clock::now();
  std::vector<std::vector<uint32_t>> items;
  if (base) {
    items = base->blocks;
    std::sort(items.begin(), items.end());
  } else {
    items.resize(g.n);
    for (uint32_t i = 0; i < g.n; ++i) items[i] = {i};
  }
  uint32_t k = static_cast<uint32_t>(items.size());
  if (k > max_items)
    throw std::invalid_argument("brute force over " + std::to_string(k) +
                                " items exceeds the limit of " +
                                std::to_string(max_items));

  // Forbid relation lifted to items so branches die early.
  std::vector<std::vector<uint8_t>> item_forbid(k, std::vector<uint8_t>(k, 0));
  {
    std::vector<uint32_t> item_of(g.n, 0);
    for (uint32_t i = 0; i < k; ++i)
      for (uint32_t v : items[i]) item_of[v] = i;
    for (auto [u, v] : g.forbid_edges) {
      uint32_t a = item_of[u], b = item_of[v];
      item_forbid[a][b] = item_forbid[b][a] = 1;
    }
  }

  PartitionResult r;
  bool have_best = false;
  std::vector<std::vector<uint32_t>> classes;  // item indices per class
  std::vector<uint32_t> assign(k, 0);

  auto leaf = [&]() {
    ++r.stats.nodes;
    Blocks p;
    p.reserve(classes.size());
    for (const auto& cls : classes) {
      std::vector<uint32_t> members;
      for (uint32_t item : cls)
        members.insert(members.end(), items[item].begin(), items[item].end());
      std::sort(members.begin(), members.end());
      p.push_back(std::move(members));
    }
    std::sort(p.begin(), p.end());
    if (!is_legal_partition(g, Partition{p})) return;
    uint64_t c = m.evaluate(g, p);
    if (!have_best || c < r.cost) {
      have_best = true;
      r.cost = c;
      r.partition.blocks = std::move(p);
    }
  };

  auto rec = [&](auto&& self, uint32_t item) -> void {
    if (item == k) {
      leaf();
      return;
    }
    for (uint32_t c = 0; c <= classes.size(); ++c) {
      if (c < classes.size()) {
        bool blocked = false;
        for (uint32_t member : classes[c])
          if (item_forbid[item][member]) {
            blocked = true;
            break;
          }
        if (blocked) {
          ++r.stats.pruned;
          continue;
        }
        classes[c].push_back(item);
        self(self, item + 1);
        classes[c].pop_back();
      } else {
        classes.push_back({item});
        self(self, item + 1);
        classes.pop_back();
      }
    }
  };
  rec(rec, 0);

  if (!have_best) {
    // Singletons of the base items are always legal for a well-formed input.
    r.partition.blocks = items;
    r.cost = m.evaluate(g, r.partition.blocks);
  }
  r.proven_optimal = true;
  r.merge_trace = reconstruct_trace(g, m, r.partition);
  r.stats.wall_ms = ms_since(t0);
  return r;
}

std::vector<std::pair<uint32_t, uint32_t>> reconstruct_trace(
    const WspGraph& g, const CostModel& m, const Partition& target) {
  std::vector<uint32_t> target_block(g.n, 0);
  for (uint32_t b = 0; b < target.blocks.size(); ++b)
    for (uint32_t v : target.blocks[b]) target_block[v] = b;

  WspState st(g, m);
  std::vector<std::pair<uint32_t, uint32_t>> trace;
  bool progress = true;
  while (progress) {
    progress = false;
    auto ids = st.block_ids();
    for (size_t i = 0; i < ids.size() && !progress; ++i) {
      for (size_t j = i + 1; j < ids.size() && !progress; ++j) {
        uint32_t a = ids[i], b = ids[j];
        if (target_block[a] != target_block[b]) continue;
        if (!st.legal_merge(a, b)) continue;
        st.merge(a, b);
        trace.push_back({a, b});
        progress = true;
      }
    }
  }
  return trace;
}

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {
      "singleton", "linear", "greedy", "unintrusive", "optimal", "bruteforce"};
  return names;
}

PartitionResult run_algorithm(std::string_view name, const WspGraph& g,
                              const CostModel& m, const SearchBudget& budget) {
  if (name == "singleton") return singleton_partition(g, m);
  if (name == "linear") return linear_partition(g, m);
  if (name == "greedy") return greedy_partition(g, m);
  if (name == "unintrusive") return unintrusive_partition(g, m);
  if (name == "optimal") return optimal_partition(g, m, budget);
  if (name == "bruteforce") return brute_force_partition(g, m);
  throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

}  // namespace wsp
