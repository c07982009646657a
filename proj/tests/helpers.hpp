#pragma once

// Test-side oracles. Every cost model is recomputed here from its definition
// with plain std::set bookkeeping and no reuse of the library's access
// summaries or incremental weights, so an agreement between the two sides
// actually means something. Also: a partition enumerator, an independent
// legality check, and a brute-force multiway-cut solver.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/generate.hpp"
#include "core/graph.hpp"
#include "core/program.hpp"

namespace oracle {

using wsp::Blocks;
using wsp::Program;

inline uint64_t view_bytes(const Program& p, uint32_t v) {
  const wsp::ArrayView& a = p.view(v);
  return a.elem_count() * p.bases[a.base].dtype.size;
}

// First instruction index where each base appears in any role, recomputed
// from the raw instruction list.
inline std::vector<uint32_t> first_appearance(const Program& p) {
  std::vector<uint32_t> first(p.bases.size(), UINT32_MAX);
  auto note = [&](uint32_t base, uint32_t at) {
    if (first[base] == UINT32_MAX) first[base] = at;
  };
  for (uint32_t i = 0; i < p.instructions.size(); ++i) {
    const wsp::Instruction& ins = p.instructions[i];
    if (wsp::is_elementwise(ins.opcode)) {
      for (const wsp::Operand& op : ins.operands)
        if (op.kind == wsp::Operand::Kind::view) note(p.view(op.view).base, i);
    } else {
      note(ins.base, i);
    }
  }
  return first;
}

inline std::vector<uint32_t> del_position(const Program& p) {
  std::vector<uint32_t> del(p.bases.size(), UINT32_MAX);
  for (uint32_t i = 0; i < p.instructions.size(); ++i)
    if (p.instructions[i].opcode == wsp::Opcode::DEL)
      del[p.instructions[i].base] = i;
  return del;
}

// Sum over blocks of the externally visible access bytes: reads of bases not
// created in the block plus writes of bases not deleted in the block, with
// reads and writes kept as separate distinct-view sets.
inline uint64_t bohrium(const Program& p, const Blocks& blocks) {
  std::vector<uint32_t> first = first_appearance(p);
  uint64_t total = 0;
  for (const std::vector<uint32_t>& block : blocks) {
    std::set<uint32_t> reads, writes, news, dels;
    for (uint32_t i : block) {
      const wsp::Instruction& ins = p.instructions[i];
      if (wsp::is_elementwise(ins.opcode)) {
        for (size_t k = 0; k < ins.operands.size(); ++k) {
          const wsp::Operand& op = ins.operands[k];
          if (op.kind != wsp::Operand::Kind::view) continue;
          (k == 0 ? writes : reads).insert(op.view);
        }
      } else if (ins.opcode == wsp::Opcode::DEL) {
        dels.insert(ins.base);
      }
      for (uint32_t b = 0; b < p.bases.size(); ++b)
        if (first[b] == i) news.insert(b);
    }
    for (uint32_t v : reads)
      if (!news.count(p.view(v).base)) total += view_bytes(p, v);
    for (uint32_t v : writes)
      if (!dels.count(p.view(v).base)) total += view_bytes(p, v);
  }
  return total;
}

// Number of bases that appear at all, minus those whose construction and
// deletion land in the same block.
inline uint64_t max_contract(const Program& p, const Blocks& blocks) {
  std::vector<uint32_t> first = first_appearance(p);
  std::vector<uint32_t> del = del_position(p);
  std::vector<uint32_t> block_of(p.instructions.size(), UINT32_MAX);
  for (uint32_t b = 0; b < blocks.size(); ++b)
    for (uint32_t i : blocks[b]) block_of[i] = b;
  uint64_t cost = 0;
  for (uint32_t b = 0; b < p.bases.size(); ++b) {
    if (first[b] == UINT32_MAX) continue;
    bool contracted =
        del[b] != UINT32_MAX && block_of[first[b]] == block_of[del[b]];
    if (!contracted) ++cost;
  }
  return cost;
}

// Per-instruction access multiplicity of a view: 1 for a read, 1 for a
// write, so 2 when an instruction both reads and writes it.
inline std::map<uint32_t, uint32_t> view_multiplicity(const Program& p,
                                                      uint32_t i) {
  std::map<uint32_t, uint32_t> mult;
  const wsp::Instruction& ins = p.instructions[i];
  if (!wsp::is_elementwise(ins.opcode)) return mult;
  std::set<uint32_t> reads, writes;
  for (size_t k = 0; k < ins.operands.size(); ++k)
    if (ins.operands[k].kind == wsp::Operand::Kind::view)
      (k == 0 ? writes : reads).insert(ins.operands[k].view);
  for (uint32_t v : reads) mult[v] += 1;
  for (uint32_t v : writes) mult[v] += 1;
  return mult;
}

// Cross-block pair count over identical views.
inline uint64_t max_locality(const Program& p, const Blocks& blocks) {
  uint32_t n = static_cast<uint32_t>(p.instructions.size());
  std::vector<uint32_t> block_of(n, UINT32_MAX);
  for (uint32_t b = 0; b < blocks.size(); ++b)
    for (uint32_t i : blocks[b]) block_of[i] = b;
  std::vector<std::map<uint32_t, uint32_t>> mult(n);
  for (uint32_t i = 0; i < n; ++i) mult[i] = view_multiplicity(p, i);
  uint64_t total = 0;
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j) {
      if (block_of[i] == block_of[j]) continue;
      for (const auto& [v, m] : mult[i]) {
        auto it = mult[j].find(v);
        if (it != mult[j].end()) total += uint64_t(m) * it->second;
      }
    }
  return total;
}

inline uint64_t distinct_views(const Program& p) {
  std::set<uint32_t> seen;
  for (const wsp::Instruction& ins : p.instructions) {
    if (!wsp::is_elementwise(ins.opcode)) continue;
    for (const wsp::Operand& op : ins.operands)
      if (op.kind == wsp::Operand::Kind::view) seen.insert(op.view);
  }
  return seen.size();
}

inline uint64_t robinson(const Program& p, const Blocks& blocks) {
  uint64_t n = distinct_views(p);
  return blocks.size() + n * max_contract(p, blocks) +
         n * n * max_locality(p, blocks);
}

inline uint64_t model_cost(const std::string& model, const Program& p,
                           const Blocks& blocks) {
  if (model == "bohrium") return bohrium(p, blocks);
  if (model == "max-contract") return max_contract(p, blocks);
  if (model == "max-locality") return max_locality(p, blocks);
  return robinson(p, blocks);
}

// Forbidden pairs separated and the block quotient acyclic, checked with a
// plain Kahn pass over contracted dependency edges.
inline bool legal(const wsp::WspGraph& g, const Blocks& blocks) {
  std::vector<uint32_t> block_of(g.n, UINT32_MAX);
  for (uint32_t b = 0; b < blocks.size(); ++b)
    for (uint32_t v : blocks[b]) block_of[v] = b;
  for (auto [a, b] : g.forbid_edges)
    if (block_of[a] == block_of[b]) return false;
  uint32_t nb = static_cast<uint32_t>(blocks.size());
  std::set<std::pair<uint32_t, uint32_t>> q;
  for (auto [a, b] : g.dep_edges)
    if (block_of[a] != block_of[b]) q.insert({block_of[a], block_of[b]});
  std::vector<uint32_t> indeg(nb, 0);
  std::vector<std::vector<uint32_t>> out(nb);
  for (auto [a, b] : q) {
    out[a].push_back(b);
    ++indeg[b];
  }
  std::vector<uint32_t> ready;
  for (uint32_t b = 0; b < nb; ++b)
    if (indeg[b] == 0) ready.push_back(b);
  uint32_t done = 0;
  while (!ready.empty()) {
    uint32_t b = ready.back();
    ready.pop_back();
    ++done;
    for (uint32_t c : out[b])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return done == nb;
}

// Every partition of {0..n-1}, in restricted-growth order, as sorted blocks
// ordered by smallest member. The callback returns false to stop early.
inline void each_partition(uint32_t n,
                           const std::function<bool(const Blocks&)>& fn) {
  if (n == 0) {
    fn({});
    return;
  }
  std::vector<uint32_t> label(n, 0);
  std::function<bool(uint32_t, uint32_t)> rec = [&](uint32_t i,
                                                    uint32_t used) -> bool {
    if (i == n) {
      Blocks blocks(used);
      for (uint32_t v = 0; v < n; ++v) blocks[label[v]].push_back(v);
      return fn(blocks);
    }
    for (uint32_t l = 0; l <= used && l < n; ++l) {
      label[i] = l;
      if (!rec(i + 1, std::max(used, l + 1))) return false;
    }
    return true;
  };
  rec(0, 0);
}

struct BruteBest {
  uint64_t cost = UINT64_MAX;
  Blocks blocks;
  uint64_t legal_count = 0;
};

// Exhaustive legal minimum of an arbitrary partition cost.
inline BruteBest brute_min(
    const wsp::WspGraph& g,
    const std::function<uint64_t(const Blocks&)>& cost) {
  BruteBest best;
  each_partition(g.n, [&](const Blocks& blocks) {
    if (!legal(g, blocks)) return true;
    ++best.legal_count;
    uint64_t c = cost(blocks);
    if (c < best.cost) {
      best.cost = c;
      best.blocks = blocks;
    }
    return true;
  });
  return best;
}

// Direct multiway-cut minimum: every non-terminal vertex tries every
// terminal's side, 3^(n-k) labelings.
inline uint64_t mwc_min(const wsp::MwcInstance& m) {
  std::vector<uint32_t> label(m.n, UINT32_MAX);
  std::vector<uint32_t> free_vertices;
  for (uint32_t t = 0; t < m.terminals.size(); ++t)
    label[m.terminals[t]] = t;
  for (uint32_t v = 0; v < m.n; ++v)
    if (label[v] == UINT32_MAX) free_vertices.push_back(v);
  uint64_t best = UINT64_MAX;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == free_vertices.size()) {
      uint64_t cut = 0;
      for (const auto& e : m.edges)
        if (label[e.u] != label[e.v]) cut += e.w;
      best = std::min(best, cut);
      return;
    }
    for (uint32_t t = 0; t < m.terminals.size(); ++t) {
      label[free_vertices[i]] = t;
      rec(i + 1);
    }
    label[free_vertices[i]] = UINT32_MAX;
  };
  rec(0);
  return best;
}

}  // namespace oracle
