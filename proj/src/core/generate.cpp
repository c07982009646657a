#include "core/generate.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "core/cost.hpp"
#include "core/state.hpp"

namespace wsp {

namespace {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  uint64_t next(uint64_t bound) { return bound ? eng_() % bound : 0; }
  bool chance(uint32_t pct) { return next(100) < pct; }

 private:
  std::mt19937_64 eng_;
};

uint64_t mix(uint64_t seed, uint64_t round) {
  return seed * 0x9E3779B97F4A7C15ull + round * 0x165667B19E3779F9ull + 1;
}

struct Builder {
  Program p;

  uint32_t add_base(uint64_t nelem, const DType& dt) {
    uint32_t id = static_cast<uint32_t>(p.bases.size());
    p.bases.push_back({"a" + std::to_string(id), nelem, dt});
    return id;
  }

  uint32_t slice(uint32_t base, int64_t offset, int64_t count, int64_t stride) {
    ArrayView v;
    v.base = base;
    v.offset = offset;
    v.shape = {count};
    v.strides = {stride};
    return p.intern_view(v);
  }

  uint32_t full(uint32_t base) {
    return slice(base, 0, static_cast<int64_t>(p.bases[base].nelem), 1);
  }

  void elementwise(Opcode op, uint32_t out_view, std::vector<Operand> inputs) {
    Instruction ins;
    ins.opcode = op;
    ins.operands.push_back(Operand::make_view(out_view));
    for (auto& in : inputs) ins.operands.push_back(in);
    ins.line = static_cast<uint32_t>(p.instructions.size()) + 1;
    p.instructions.push_back(std::move(ins));
  }

  void del(uint32_t base) {
    Instruction ins;
    ins.opcode = Opcode::DEL;
    ins.base = base;
    ins.line = static_cast<uint32_t>(p.instructions.size()) + 1;
    p.instructions.push_back(std::move(ins));
  }
};

DType pick_dtype(Rng& rng) {
  static const char* names[] = {"u8", "f32", "f64"};
  return *dtype_from_name(names[rng.next(3)]);
}

Opcode pick_binary(Rng& rng) {
  static const Opcode ops[] = {Opcode::ADD, Opcode::MUL, Opcode::MAX,
                               Opcode::MIN, Opcode::SUB, Opcode::DIV};
  return ops[rng.next(6)];
}

Program gen_ssa(uint32_t total_ops, Rng& rng, uint64_t base_nelem) {
  Builder b;
  uint32_t dels = rng.chance(35) && total_ops >= 4
                      ? 1 + static_cast<uint32_t>(rng.next(
                                std::min<uint32_t>(3, total_ops - 3)))
                      : 0;
  uint32_t compute = total_ops - dels;

  const int64_t n0 = base_nelem ? static_cast<int64_t>(base_nelem) : 4;
  const int64_t counts[] = {n0, n0 + 2, n0 + 4};
  for (uint32_t i = 0; i < compute; ++i) {
    int64_t count = counts[rng.next(3)];

    uint64_t nelem = static_cast<uint64_t>(count);
    int64_t out_offset = 0;
    if (rng.chance(25)) {  // partial first write
      nelem += 1 + rng.next(3);
      out_offset = static_cast<int64_t>(rng.next(nelem - count + 1));
    }
    uint32_t out_base = b.add_base(nelem, pick_dtype(rng));
    uint32_t out_view = b.slice(out_base, out_offset, count, 1);

    Opcode op = (i == 0 || rng.chance(30)) ? Opcode::COPY : pick_binary(rng);
    uint32_t arity = op == Opcode::COPY ? 1 : 2;

    std::vector<uint32_t> sources;
    for (uint32_t base = 0; base < out_base; ++base)
      if (b.p.bases[base].nelem >= static_cast<uint64_t>(count))
        sources.push_back(base);

    std::vector<Operand> inputs;
    for (uint32_t a = 0; a < arity; ++a) {
      if (sources.empty() || rng.chance(15)) {
        inputs.push_back(Operand::make_literal(
            static_cast<double>(rng.next(16))));
        continue;
      }
      uint32_t src = sources[rng.next(sources.size())];
      int64_t n = static_cast<int64_t>(b.p.bases[src].nelem);
      int64_t stride = 1;
      if ((count - 1) * 2 + 1 <= n && rng.chance(30)) stride = 2;
      int64_t span = (count - 1) * stride + 1;
      int64_t offset = static_cast<int64_t>(rng.next(n - span + 1));
      inputs.push_back(Operand::make_view(b.slice(src, offset, count, stride)));
    }
    b.elementwise(op, out_view, std::move(inputs));
  }

  std::vector<uint32_t> candidates(b.p.bases.size());
  for (uint32_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
  for (uint32_t d = 0; d < dels && !candidates.empty(); ++d) {
    size_t pick = rng.next(candidates.size());
    b.del(candidates[pick]);
    candidates.erase(candidates.begin() + pick);
  }

  b.p.finalize();
  return std::move(b.p);
}

Program gen_chain(uint32_t total_ops, uint64_t base_nelem) {
  Builder b;
  const int64_t kCount = base_nelem ? static_cast<int64_t>(base_nelem) : 8;
  const DType u8 = *dtype_from_name("u8");
  std::vector<uint32_t> views;
  for (uint32_t i = 0; i < total_ops; ++i) {
    uint32_t base = b.add_base(kCount, u8);
    uint32_t out = b.full(base);
    if (i == 0) {
      b.elementwise(Opcode::COPY, out, {Operand::make_literal(0)});
    } else if (i == 1) {
      b.elementwise(Opcode::ADD, out,
                    {Operand::make_view(views[0]), Operand::make_view(views[0])});
    } else {
      b.elementwise(Opcode::ADD, out,
                    {Operand::make_view(views[i - 1]),
                     Operand::make_view(views[i - 2])});
    }
    views.push_back(out);
  }
  b.p.finalize();
  return std::move(b.p);
}

Program gen_stencil(uint32_t total_ops, Rng& rng, uint64_t base_nelem) {
  Builder b;
  const int64_t kGrid = base_nelem ? std::max<int64_t>(base_nelem, 4) : 18;
  const int64_t kWindow = kGrid - 2;
  const DType dt = pick_dtype(rng);
  uint32_t grid = b.add_base(kGrid, dt);
  b.elementwise(Opcode::COPY, b.full(grid), {Operand::make_literal(0)});
  for (uint32_t i = 1; i < total_ops; ++i) {
    uint32_t out_base = b.add_base(kWindow, dt);
    int64_t shift = 1 + static_cast<int64_t>(i % 2);
    b.elementwise(pick_binary(rng), b.full(out_base),
                  {Operand::make_view(b.slice(grid, 0, kWindow, 1)),
                   Operand::make_view(b.slice(grid, shift, kWindow, 1))});
  }
  b.p.finalize();
  return std::move(b.p);
}

Program gen_fanio(uint32_t total_ops, Rng& rng, uint64_t base_nelem) {
  Builder b;
  const int64_t kCount = base_nelem ? static_cast<int64_t>(base_nelem) : 8;
  uint32_t producers = std::max<uint32_t>(1, total_ops / 3);
  uint32_t dels = total_ops >= 6 ? total_ops / 5 : 0;
  uint32_t combiners = total_ops - producers - dels;

  const DType dt = pick_dtype(rng);
  for (uint32_t i = 0; i < producers; ++i) {
    uint32_t base = b.add_base(kCount, dt);
    b.elementwise(Opcode::COPY, b.full(base),
                  {Operand::make_literal(static_cast<double>(i))});
  }
  for (uint32_t i = 0; i < combiners; ++i) {
    uint32_t nbases = static_cast<uint32_t>(b.p.bases.size());
    uint32_t x = static_cast<uint32_t>(rng.next(nbases));
    uint32_t y = static_cast<uint32_t>(rng.next(nbases));
    uint32_t base = b.add_base(kCount, dt);
    b.elementwise(pick_binary(rng), b.full(base),
                  {Operand::make_view(b.full(x)), Operand::make_view(b.full(y))});
  }
  std::vector<uint32_t> candidates(b.p.bases.size());
  for (uint32_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
  for (uint32_t d = 0; d < dels && !candidates.empty(); ++d) {
    size_t pick = rng.next(candidates.size());
    b.del(candidates[pick]);
    candidates.erase(candidates.begin() + pick);
  }
  b.p.finalize();
  return std::move(b.p);
}

uint64_t max_weight_edge_count(const Program& p) {
  WspGraph g = build_wsp(p);
  static const char* models[] = {"bohrium", "max-contract", "max-locality",
                                 "robinson"};
  uint64_t worst = 0;
  for (const char* name : models) {
    auto model = make_cost_model(name);
    WspState st(g, *model);
    worst = std::max<uint64_t>(worst, st.weights().size());
  }
  return worst;
}

}  // namespace

Program generate_program(const GenOptions& opt) {
  if (opt.ops == 0) throw std::invalid_argument("generator needs ops >= 1");

  if (opt.kind == "chain") return gen_chain(opt.ops, opt.nelem);
  if (opt.kind == "stencil") {
    Rng rng(mix(opt.seed, 0));
    return gen_stencil(opt.ops, rng, opt.nelem);
  }
  if (opt.kind == "fanio") {
    Rng rng(mix(opt.seed, 0));
    return gen_fanio(opt.ops, rng, opt.nelem);
  }
  if (opt.kind != "random-dag")
    throw std::invalid_argument("unknown generator kind: " + opt.kind);

  uint32_t total = std::max<uint32_t>(2, opt.ops);
  Program p;
  for (uint64_t round = 0; round < 4096; ++round) {
    Rng rng(mix(opt.seed, round));
    p = gen_ssa(total, rng, opt.nelem);
    if (opt.max_weight_edges == 0 ||
        max_weight_edge_count(p) <= opt.max_weight_edges)
      break;
  }
  return p;
}

MwcInstance generate_mwc(uint64_t seed, uint32_t max_vertices,
                         uint64_t max_weight) {
  if (max_vertices < 4)
    throw std::invalid_argument("multiway-cut instances need >= 4 vertices");
  Rng rng(mix(seed, 17));
  MwcInstance m;
  m.n = 4 + static_cast<uint32_t>(rng.next(max_vertices - 3));
  m.terminals = {0, 1, 2};
  for (uint32_t i = 0; i < m.n; ++i)
    for (uint32_t j = i + 1; j < m.n; ++j)
      if (rng.chance(55))
        m.edges.push_back({i, j, 1 + rng.next(max_weight)});
  return m;
}

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names = {"random-dag", "chain", "stencil",
                                                 "fanio"};
  return names;
}

}  // namespace wsp
