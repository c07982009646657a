#include "core/cost.hpp"

#include <algorithm>
#include <cassert>

namespace wsp {

namespace {

uint64_t restricted_bytes(const Program& p, std::span<const uint32_t> views,
                          std::span<const uint32_t> bases) {
  // Bytes of the views whose base lies in `bases`.
  uint64_t total = 0;
  for (uint32_t v : views)
    if (set_contains(bases, p.view(v).base)) total += p.view_bytes(v);
  return total;
}

uint64_t intersect_bytes(const Program& p, std::span<const uint32_t> a,
                         std::span<const uint32_t> b) {
  uint64_t total = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else {
      total += p.view_bytes(a[i]);
      ++i;
      ++j;
    }
  }
  return total;
}

uint64_t bohrium_saving_access(const Program& p, const BlockAccess& a,
                               const BlockAccess& b) {
  uint64_t s = intersect_bytes(p, a.ext_reads, b.ext_reads) +
               intersect_bytes(p, a.ext_writes, b.ext_writes);
  s += restricted_bytes(p, b.sets.reads, a.sets.news);
  s += restricted_bytes(p, a.sets.reads, b.sets.news);
  s += restricted_bytes(p, a.sets.writes, b.sets.dels);
  s += restricted_bytes(p, b.sets.writes, a.sets.dels);
  return s;
}

class BohriumCost final : public CostModel {
 public:
  std::string_view name() const override { return "bohrium"; }

  uint64_t evaluate(const WspGraph& g, const Blocks& blocks) const override {
    assert(g.program);
    uint64_t total = 0;
    for (const auto& b : blocks) total += ext_bytes(*g.program, block_access(*g.program, b));
    return total;
  }

  uint64_t saving(const WspGraph& g, const std::vector<uint32_t>& m1,
                  const BlockAccess* a1, const std::vector<uint32_t>& m2,
                  const BlockAccess* a2) const override {
    assert(g.program);
    BlockAccess t1, t2;
    if (!a1) {
      t1 = block_access(*g.program, m1);
      a1 = &t1;
    }
    if (!a2) {
      t2 = block_access(*g.program, m2);
      a2 = &t2;
    }
    return bohrium_saving_access(*g.program, *a1, *a2);
  }

  uint64_t locality_part(const WspGraph& g, const std::vector<uint32_t>& m1,
                         const BlockAccess* a1, const std::vector<uint32_t>& m2,
                         const BlockAccess* a2) const override {
    assert(g.program);
    BlockAccess t1, t2;
    if (!a1) {
      t1 = block_access(*g.program, m1);
      a1 = &t1;
    }
    if (!a2) {
      t2 = block_access(*g.program, m2);
      a2 = &t2;
    }
    return intersect_bytes(*g.program, a1->ext_reads, a2->ext_reads) +
           intersect_bytes(*g.program, a1->ext_writes, a2->ext_writes);
  }
};

class MaxContractCost final : public CostModel {
 public:
  std::string_view name() const override { return "max-contract"; }

  uint64_t evaluate(const WspGraph& g, const Blocks& blocks) const override {
    assert(g.program);
    const Program& p = *g.program;
    uint64_t total_news = 0;
    for (uint32_t fe : p.first_encounter())
      if (fe != UINT32_MAX) ++total_news;
    uint64_t contracted = 0;
    for (const auto& b : blocks) {
      BlockAccess a = block_access(p, b);
      contracted += set_intersect(a.sets.news, a.sets.dels).size();
    }
    return total_news - contracted;
  }

  uint64_t saving(const WspGraph& g, const std::vector<uint32_t>& m1,
                  const BlockAccess* a1, const std::vector<uint32_t>& m2,
                  const BlockAccess* a2) const override {
    assert(g.program);
    BlockAccess t1, t2;
    if (!a1) {
      t1 = block_access(*g.program, m1);
      a1 = &t1;
    }
    if (!a2) {
      t2 = block_access(*g.program, m2);
      a2 = &t2;
    }
    return set_intersect(a1->sets.news, a2->sets.dels).size() +
           set_intersect(a2->sets.news, a1->sets.dels).size();
  }
};

class MaxLocalityCost final : public CostModel {
 public:
  std::string_view name() const override { return "max-locality"; }

  uint64_t evaluate(const WspGraph& g, const Blocks& blocks) const override {
    assert(g.program);
    const Program& p = *g.program;
    std::vector<uint32_t> block_of(g.n, UINT32_MAX);
    for (uint32_t b = 0; b < blocks.size(); ++b)
      for (uint32_t v : blocks[b]) block_of[v] = b;
    uint64_t total = 0;
    for (uint32_t i = 0; i < g.n; ++i)
      for (uint32_t j = i + 1; j < g.n; ++j)
        if (block_of[i] != block_of[j]) total += locality_pair_count(p, i, j);
    return total;
  }

  uint64_t saving(const WspGraph& g, const std::vector<uint32_t>& m1,
                  const BlockAccess*, const std::vector<uint32_t>& m2,
                  const BlockAccess*) const override {
    assert(g.program);
    uint64_t s = 0;
    for (uint32_t i : m1)
      for (uint32_t j : m2) s += locality_pair_count(*g.program, i, j);
    return s;
  }
};

class RobinsonCost final : public CostModel {
 public:
  std::string_view name() const override { return "robinson"; }

  uint64_t evaluate(const WspGraph& g, const Blocks& blocks) const override {
    assert(g.program);
    uint64_t n = distinct_accessed_views(*g.program);
    return blocks.size() + n * MaxContractCost{}.evaluate(g, blocks) +
           n * n * MaxLocalityCost{}.evaluate(g, blocks);
  }

  uint64_t saving(const WspGraph& g, const std::vector<uint32_t>& m1,
                  const BlockAccess* a1, const std::vector<uint32_t>& m2,
                  const BlockAccess* a2) const override {
    assert(g.program);
    uint64_t n = distinct_accessed_views(*g.program);
    return 1 + n * MaxContractCost{}.saving(g, m1, a1, m2, a2) +
           n * n * MaxLocalityCost{}.saving(g, m1, a1, m2, a2);
  }
};

class CutWeightCost final : public CostModel {
 public:
  explicit CutWeightCost(MwcInstance m) : m_(std::move(m)) {}

  std::string_view name() const override { return "cut-weight"; }
  bool needs_program() const override { return false; }

  uint64_t evaluate(const WspGraph& g, const Blocks& blocks) const override {
    std::vector<uint32_t> block_of(g.n, UINT32_MAX);
    for (uint32_t b = 0; b < blocks.size(); ++b)
      for (uint32_t v : blocks[b]) block_of[v] = b;
    uint64_t total = 0;
    for (const auto& e : m_.edges)
      if (block_of[e.u] != block_of[e.v]) total += e.w;
    return total;
  }

  uint64_t saving(const WspGraph&, const std::vector<uint32_t>& m1,
                  const BlockAccess*, const std::vector<uint32_t>& m2,
                  const BlockAccess*) const override {
    uint64_t s = 0;
    for (const auto& e : m_.edges) {
      bool u1 = set_contains(m1, e.u), u2 = set_contains(m2, e.u);
      bool v1 = set_contains(m1, e.v), v2 = set_contains(m2, e.v);
      if ((u1 && v2) || (u2 && v1)) s += e.w;
    }
    return s;
  }

 private:
  MwcInstance m_;
};

}  // namespace

std::unique_ptr<CostModel> make_cost_model(std::string_view name) {
  if (name == "bohrium") return std::make_unique<BohriumCost>();
  if (name == "max-contract") return std::make_unique<MaxContractCost>();
  if (name == "max-locality") return std::make_unique<MaxLocalityCost>();
  if (name == "robinson") return std::make_unique<RobinsonCost>();
  return nullptr;
}

std::unique_ptr<CostModel> make_cut_weight_model(MwcInstance m) {
  return std::make_unique<CutWeightCost>(std::move(m));
}

std::pair<WspGraph, std::unique_ptr<CostModel>> mwc_to_wsp(const MwcInstance& m) {
  return {mwc_graph(m), make_cut_weight_model(m)};
}

namespace {

uint64_t model_cost(const Program& p, const Blocks& blocks, const CostModel& m) {
  WspGraph g;
  g.program = &p;
  g.n = static_cast<uint32_t>(p.instructions.size());
  g.build_adjacency();
  return m.evaluate(g, blocks);
}

}  // namespace

uint64_t bohrium_cost(const Program& p, const Blocks& blocks) {
  return model_cost(p, blocks, BohriumCost{});
}

uint64_t bohrium_saving(const Program& p, const std::vector<uint32_t>& b1,
                        const std::vector<uint32_t>& b2) {
  BlockAccess a1 = block_access(p, b1);
  BlockAccess a2 = block_access(p, b2);
  return bohrium_saving_access(p, a1, a2);
}

uint64_t max_contract_cost(const Program& p, const Blocks& blocks) {
  return model_cost(p, blocks, MaxContractCost{});
}

uint64_t max_locality_cost(const Program& p, const Blocks& blocks) {
  return model_cost(p, blocks, MaxLocalityCost{});
}

uint64_t robinson_cost(const Program& p, const Blocks& blocks) {
  return model_cost(p, blocks, RobinsonCost{});
}

uint64_t locality_pair_count(const Program& p, uint32_t f, uint32_t f2) {
  AccessSets a = instruction_access(p, f);
  AccessSets b = instruction_access(p, f2);
  auto mult = [](const AccessSets& s, uint32_t v) -> uint64_t {
    return (set_contains(s.reads, v) ? 1 : 0) + (set_contains(s.writes, v) ? 1 : 0);
  };
  std::vector<uint32_t> shared = set_union(a.reads, a.writes);
  uint64_t total = 0;
  for (uint32_t v : shared) total += mult(a, v) * mult(b, v);
  return total;
}

uint64_t distinct_accessed_views(const Program& p) {
  std::vector<uint32_t> seen;
  for (const Instruction& ins : p.instructions)
    if (is_elementwise(ins.opcode))
      for (const Operand& op : ins.operands)
        if (op.kind == Operand::Kind::view) seen.push_back(op.view);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  return seen.size();
}

}  // namespace wsp
