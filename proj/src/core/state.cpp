#include "core/state.hpp"

#include <algorithm>
#include <cassert>

namespace wsp {

bool is_legal_partition(const WspGraph& g, const Partition& p) {
  std::vector<uint32_t> block_of(g.n, UINT32_MAX);
  for (uint32_t b = 0; b < p.blocks.size(); ++b)
    for (uint32_t v : p.blocks[b]) block_of[v] = b;
  for (auto [u, v] : g.forbid_edges)
    if (block_of[u] == block_of[v]) return false;

  // Cycle check on the block quotient.
  uint32_t nb = static_cast<uint32_t>(p.blocks.size());
  std::vector<std::vector<uint32_t>> adj(nb);
  for (auto [u, v] : g.dep_edges)
    if (block_of[u] != block_of[v]) adj[block_of[u]].push_back(block_of[v]);
  std::vector<uint8_t> state(nb, 0);  // 0 new, 1 open, 2 done
  std::vector<std::pair<uint32_t, size_t>> stack;
  for (uint32_t s = 0; s < nb; ++s) {
    if (state[s]) continue;
    stack.push_back({s, 0});
    state[s] = 1;
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      if (idx < adj[node].size()) {
        uint32_t next = adj[node][idx++];
        if (state[next] == 1) return false;
        if (state[next] == 0) {
          state[next] = 1;
          stack.push_back({next, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

WspState::WspState(const WspGraph& g, const CostModel& m) : g_(&g), model_(&m) {
  blocks_.resize(g.n);
  alive_.assign(g.n, true);
  vertex_block_.resize(g.n);
  alive_count_ = g.n;

  for (uint32_t i = 0; i < g.n; ++i) {
    vertex_block_[i] = i;
    BlockData& b = blocks_[i];
    b.members = {i};
    if (g.program) {
      b.access = block_access(*g.program, b.members);
      for (uint32_t v : set_union(b.access.sets.reads, b.access.sets.writes))
        b.touched.push_back(g.program->view(v).base);
      b.touched = set_union(b.touched, b.access.sets.news);
      b.touched = set_union(b.touched, b.access.sets.dels);
      std::sort(b.touched.begin(), b.touched.end());
      b.touched.erase(std::unique(b.touched.begin(), b.touched.end()),
                      b.touched.end());
    }
    b.dep_out = g.dep_out[i];
    b.dep_in = g.dep_in[i];
    b.forbid = g.forbid_adj[i];
  }

  Blocks bl;
  bl.reserve(g.n);
  for (uint32_t i = 0; i < g.n; ++i) bl.push_back({i});
  cost_ = model_->evaluate(g, bl);

  for (uint32_t i = 0; i < g.n; ++i) derive_weights_for(i);
}

uint64_t WspState::saving_blocks(const BlockData& a, const BlockData& b) const {
  if (g_->program && !sets_intersect(a.touched, b.touched)) {
    // No shared base: the program models can only save through shared bases.
    // Robinson still saves its block-count term, so it skips this shortcut.
    if (model_->name() != "robinson") return 0;
  }
  return model_->saving(*g_, a.members, g_->program ? &a.access : nullptr,
                        b.members, g_->program ? &b.access : nullptr);
}

void WspState::derive_weights_for(uint32_t id) {
  const BlockData& b = blocks_[id];
  for (uint32_t other = 0; other < blocks_.size(); ++other) {
    if (other == id || !alive_[other]) continue;
    auto key = std::minmax(id, other);
    if (set_contains(b.forbid, other)) continue;
    uint64_t s = saving_blocks(b, blocks_[other]);
    if (s > 0) weights_[{key.first, key.second}] = s;
  }
}

bool WspState::has_forbid(uint32_t a, uint32_t b) const {
  return set_contains(blocks_[a].forbid, b);
}

std::vector<uint32_t> WspState::block_ids() const {
  std::vector<uint32_t> ids;
  ids.reserve(alive_count_);
  for (uint32_t i = 0; i < blocks_.size(); ++i)
    if (alive_[i]) ids.push_back(i);
  return ids;
}

Partition WspState::partition() const {
  Partition p;
  for (uint32_t i = 0; i < blocks_.size(); ++i)
    if (alive_[i]) p.blocks.push_back(blocks_[i].members);
  return p;
}

uint64_t WspState::weight(uint32_t a, uint32_t b) const {
  auto key = std::minmax(a, b);
  auto it = weights_.find({key.first, key.second});
  return it == weights_.end() ? 0 : it->second;
}

void WspState::strike(uint32_t a, uint32_t b) {
  auto key = std::minmax(a, b);
  weights_.erase({key.first, key.second});
  struck_.insert({key.first, key.second});
}

bool WspState::struck(uint32_t a, uint32_t b) const {
  auto key = std::minmax(a, b);
  return struck_.count({key.first, key.second}) != 0;
}

uint64_t WspState::saving(uint32_t a, uint32_t b) const {
  return saving_blocks(blocks_[a], blocks_[b]);
}

uint64_t WspState::locality_part(uint32_t a, uint32_t b) const {
  const BlockData& ba = blocks_[a];
  const BlockData& bb = blocks_[b];
  if (g_->program && !sets_intersect(ba.touched, bb.touched) &&
      model_->name() != "robinson")
    return 0;
  return model_->locality_part(*g_, ba.members, g_->program ? &ba.access : nullptr,
                               bb.members, g_->program ? &bb.access : nullptr);
}

bool WspState::reaches(uint32_t from, uint32_t to) const {
  if (from == to) return true;
  std::vector<uint32_t> stack = {from};
  std::vector<bool> seen(blocks_.size(), false);
  seen[from] = true;
  while (!stack.empty()) {
    uint32_t cur = stack.back();
    stack.pop_back();
    for (uint32_t next : blocks_[cur].dep_out) {
      if (next == to) return true;
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return false;
}

bool WspState::legal_merge(uint32_t b1, uint32_t b2) const {
  assert(alive_[b1] && alive_[b2] && b1 != b2);
  if (set_contains(blocks_[b1].forbid, b2)) return false;
  // A dependency path of length >= 2 between the blocks (either direction)
  // would close a cycle after the merge.
  for (uint32_t x : blocks_[b1].dep_out)
    if (x != b2 && reaches(x, b2)) return false;
  for (uint32_t x : blocks_[b2].dep_out)
    if (x != b1 && reaches(x, b1)) return false;
  return true;
}

bool WspState::quotient_acyclic() const {
  std::vector<uint8_t> state(blocks_.size(), 0);
  std::vector<std::pair<uint32_t, size_t>> stack;
  for (uint32_t s = 0; s < blocks_.size(); ++s) {
    if (!alive_[s] || state[s]) continue;
    stack.push_back({s, 0});
    state[s] = 1;
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      if (idx < blocks_[node].dep_out.size()) {
        uint32_t next = blocks_[node].dep_out[idx++];
        if (state[next] == 1) return false;
        if (state[next] == 0) {
          state[next] = 1;
          stack.push_back({next, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

namespace {

void replace_id(std::vector<uint32_t>& v, uint32_t from, uint32_t to) {
  v.erase(std::remove(v.begin(), v.end(), from), v.end());
  if (!std::binary_search(v.begin(), v.end(), to)) {
    v.insert(std::upper_bound(v.begin(), v.end(), to), to);
  }
}

void drop_id(std::vector<uint32_t>& v, uint32_t id) {
  v.erase(std::remove(v.begin(), v.end(), id), v.end());
}

}  // namespace

uint32_t WspState::merge(uint32_t b1, uint32_t b2) {
  assert(alive_[b1] && alive_[b2] && b1 != b2);
  uint32_t keep = std::min(b1, b2);
  uint32_t gone = std::max(b1, b2);
  BlockData& k = blocks_[keep];
  BlockData& d = blocks_[gone];

  uint64_t s = saving_blocks(k, d);
  if (set_contains(k.forbid, gone)) poisoned_ = true;

  k.members = set_union(k.members, d.members);
  if (g_->program) {
    k.access = merge_access(*g_->program, k.access, d.access);
    k.touched = set_union(k.touched, d.touched);
  }

  // Contract adjacency. Parallel edges collapse; the internal edge vanishes.
  k.dep_out = set_union(k.dep_out, d.dep_out);
  k.dep_in = set_union(k.dep_in, d.dep_in);
  k.forbid = set_union(k.forbid, d.forbid);
  drop_id(k.dep_out, keep);
  drop_id(k.dep_out, gone);
  drop_id(k.dep_in, keep);
  drop_id(k.dep_in, gone);
  drop_id(k.forbid, keep);
  drop_id(k.forbid, gone);

  for (uint32_t x : k.dep_out) replace_id(blocks_[x].dep_in, gone, keep);
  for (uint32_t x : k.dep_in) replace_id(blocks_[x].dep_out, gone, keep);
  for (uint32_t x : k.forbid) replace_id(blocks_[x].forbid, gone, keep);
  // Neighbors that referenced only `gone` still hold stale ids when the
  // contracted edge was dropped above; sweep the survivors of d's lists too.
  for (uint32_t x : d.dep_out)
    if (x != keep && x != gone) replace_id(blocks_[x].dep_in, gone, keep);
  for (uint32_t x : d.dep_in)
    if (x != keep && x != gone) replace_id(blocks_[x].dep_out, gone, keep);
  for (uint32_t x : d.forbid)
    if (x != keep && x != gone) replace_id(blocks_[x].forbid, gone, keep);

  for (uint32_t v : d.members) vertex_block_[v] = keep;
  d = BlockData{};
  alive_[gone] = false;
  --alive_count_;
  ++merges_;
  cost_ -= s;

  // Weight edges incident to either endpoint collapse into edges of the
  // merged block, recomputed from scratch so the stored weight stays exact.
  // A neighbor receives an edge only when it had one to a half before the
  // merge; an edge struck earlier stays dead and drags the collapsed edge
  // down with it. (No model can turn two zero-saving pairs into a positive
  // one by merging the far side, so nothing appears for other neighbors.)
  std::vector<uint32_t> carriers;
  for (auto it = weights_.begin(); it != weights_.end();) {
    auto [a, b] = it->first;
    if (a == keep || b == keep || a == gone || b == gone) {
      uint32_t other = (a == keep || a == gone) ? b : a;
      if (other != keep && other != gone) carriers.push_back(other);
      it = weights_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(carriers.begin(), carriers.end());
  carriers.erase(std::unique(carriers.begin(), carriers.end()), carriers.end());
  if (!struck_.empty()) {
    std::set<std::pair<uint32_t, uint32_t>> rekeyed;
    for (auto [a, b] : struck_) {
      if (a == gone) a = keep;
      if (b == gone) b = keep;
      if (a != b) rekeyed.insert(std::minmax(a, b));
    }
    struck_ = std::move(rekeyed);
  }
  for (uint32_t x : carriers) {
    if (set_contains(k.forbid, x)) continue;
    if (struck_.count(std::minmax(keep, x))) continue;
    uint64_t w = saving_blocks(k, blocks_[x]);
    if (w > 0) weights_[{std::min(keep, x), std::max(keep, x)}] = w;
  }
  last_merged_ = keep;
  return keep;
}

std::string dot_export(const WspState& s) {
  const WspGraph& g = s.graph();

  // Canonical serialization lists declarations first, then one instruction
  // per line in program order; slice that once for the node labels.
  std::vector<std::string> ins_text;
  if (g.program) {
    std::string text = serialize_program(*g.program);
    size_t pos = 0;
    uint32_t skip = static_cast<uint32_t>(g.program->bases.size());
    for (uint32_t l = 0; l < skip; ++l) pos = text.find('\n', pos) + 1;
    while (pos < text.size()) {
      size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      ins_text.push_back(text.substr(pos, end - pos));
      pos = end + 1;
    }
  }

  std::string out = "digraph wsp {\n  node [shape=record];\n";
  auto ids = s.block_ids();
  for (uint32_t id : ids) {
    out += "  b" + std::to_string(id) + " [label=\"{block " + std::to_string(id);
    for (uint32_t v : s.members(id)) {
      out += "|";
      std::string line = std::to_string(v);
      if (v < ins_text.size()) line += ": " + ins_text[v];
      for (char c : line) {
        if (c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == '"')
          out += '\\';
        out += c;
      }
    }
    out += "}\"];\n";
  }
  for (uint32_t id : ids)
    for (uint32_t to : s.dep_out(id))
      out += "  b" + std::to_string(id) + " -> b" + std::to_string(to) + ";\n";
  for (uint32_t id : ids)
    for (uint32_t to : s.forbid(id))
      if (id < to)
        out += "  b" + std::to_string(id) + " -> b" + std::to_string(to) +
               " [style=dashed, dir=none, constraint=false];\n";
  for (const auto& [key, w] : s.weights())
    out += "  b" + std::to_string(key.first) + " -> b" + std::to_string(key.second) +
           " [style=dotted, dir=none, constraint=false, label=\"" +
           std::to_string(w) + "\"];\n";
  out += "}\n";
  return out;
}

}  // namespace wsp
