#include "core/graph.hpp"

#include <algorithm>
#include <cassert>

#include "core/access.hpp"

namespace wsp {

void WspGraph::build_adjacency() {
  dep_out.assign(n, {});
  dep_in.assign(n, {});
  forbid_adj.assign(n, {});
  for (auto [i, j] : dep_edges) {
    dep_out[i].push_back(j);
    dep_in[j].push_back(i);
  }
  for (auto [i, j] : forbid_edges) {
    forbid_adj[i].push_back(j);
    forbid_adj[j].push_back(i);
  }
  for (auto& v : dep_out) std::sort(v.begin(), v.end());
  for (auto& v : dep_in) std::sort(v.begin(), v.end());
  for (auto& v : forbid_adj) std::sort(v.begin(), v.end());
}

bool WspGraph::has_forbid(uint32_t a, uint32_t b) const {
  return std::binary_search(forbid_adj[a].begin(), forbid_adj[a].end(), b);
}

namespace {

bool views_conflict(const Program& p, std::span<const uint32_t> a,
                    std::span<const uint32_t> b) {
  for (uint32_t va : a)
    for (uint32_t vb : b)
      if (p.views_overlap(va, vb)) return true;
  return false;
}

}  // namespace

bool depends(const Program& p, uint32_t i, uint32_t j) {
  assert(i < j);
  const Instruction& a = p.instructions[i];
  const Instruction& b = p.instructions[j];

  if (!is_elementwise(a.opcode) || !is_elementwise(b.opcode)) {
    // DEL/SYNC order against every access of the same base.
    auto touches = [&](const Instruction& ins, uint32_t base) {
      if (!is_elementwise(ins.opcode)) return ins.base == base;
      for (const Operand& op : ins.operands)
        if (op.kind == Operand::Kind::view && p.view(op.view).base == base)
          return true;
      return false;
    };
    if (!is_elementwise(a.opcode) && touches(b, a.base)) return true;
    if (!is_elementwise(b.opcode) && touches(a, b.base)) return true;
    return false;
  }

  AccessSets sa = instruction_access(p, i);
  AccessSets sb = instruction_access(p, j);
  if (views_conflict(p, sa.writes, sb.writes)) return true;
  if (views_conflict(p, sa.writes, sb.reads)) return true;
  if (views_conflict(p, sa.reads, sb.writes)) return true;
  return false;
}

bool fusible(const Program& p, uint32_t i, uint32_t j) {
  const Instruction& a = p.instructions[i];
  const Instruction& b = p.instructions[j];
  if (!is_elementwise(a.opcode) || !is_elementwise(b.opcode)) return true;

  AccessSets sa = instruction_access(p, i);
  AccessSets sb = instruction_access(p, j);
  const ArrayView& out_a = p.view(sa.writes[0]);
  const ArrayView& out_b = p.view(sb.writes[0]);
  if (out_a.elem_count() != out_b.elem_count()) return false;
  if (out_a.shape.size() != out_b.shape.size()) return false;

  auto clean = [&](std::span<const uint32_t> xs, std::span<const uint32_t> ys) {
    for (uint32_t x : xs)
      for (uint32_t y : ys)
        if (p.views_overlap(x, y) && x != y) return false;
    return true;
  };
  // (in', out), (out', out), (out', in): overlapping pairs must be identical.
  return clean(sb.reads, sa.writes) && clean(sb.writes, sa.writes) &&
         clean(sb.writes, sa.reads);
}

WspGraph build_wsp(const Program& p) {
  assert(p.finalized());
  WspGraph g;
  g.program = &p;
  g.n = static_cast<uint32_t>(p.instructions.size());
  for (uint32_t i = 0; i < g.n; ++i) {
    for (uint32_t j = i + 1; j < g.n; ++j) {
      if (depends(p, i, j)) g.dep_edges.emplace_back(i, j);
      if (!fusible(p, i, j)) g.forbid_edges.emplace_back(i, j);
    }
  }
  g.build_adjacency();
  return g;
}

WspGraph mwc_graph(const MwcInstance& m) {
  WspGraph g;
  g.program = nullptr;
  g.n = m.n;
  for (size_t i = 0; i < m.terminals.size(); ++i)
    for (size_t j = i + 1; j < m.terminals.size(); ++j) {
      uint32_t a = m.terminals[i], b = m.terminals[j];
      g.forbid_edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  g.build_adjacency();
  return g;
}

}  // namespace wsp
