#include "core/access.hpp"

#include <algorithm>
#include <cassert>

namespace wsp {

std::vector<uint32_t> set_union(std::span<const uint32_t> a,
                                std::span<const uint32_t> b) {
  std::vector<uint32_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<uint32_t> set_intersect(std::span<const uint32_t> a,
                                    std::span<const uint32_t> b) {
  std::vector<uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

bool sets_intersect(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else
      return true;
  }
  return false;
}

bool set_contains(std::span<const uint32_t> s, uint32_t v) {
  return std::binary_search(s.begin(), s.end(), v);
}

namespace {

void sort_unique(std::vector<uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void compute_ext(const Program& p, BlockAccess& b) {
  b.ext_reads.clear();
  b.ext_writes.clear();
  for (uint32_t v : b.sets.reads)
    if (!set_contains(b.sets.news, p.view(v).base)) b.ext_reads.push_back(v);
  for (uint32_t v : b.sets.writes)
    if (!set_contains(b.sets.dels, p.view(v).base)) b.ext_writes.push_back(v);
}

}  // namespace

AccessSets instruction_access(const Program& p, uint32_t index) {
  assert(p.finalized());
  const Instruction& ins = p.instructions[index];
  AccessSets a;
  if (is_elementwise(ins.opcode)) {
    for (size_t k = 0; k < ins.operands.size(); ++k) {
      const Operand& op = ins.operands[k];
      if (op.kind != Operand::Kind::view) continue;
      (k == 0 ? a.writes : a.reads).push_back(op.view);
    }
    sort_unique(a.reads);
    sort_unique(a.writes);
  } else if (ins.opcode == Opcode::DEL) {
    a.dels.push_back(ins.base);
  }
  // news: bases whose first encounter is this instruction.
  const auto& fe = p.first_encounter();
  for (uint32_t b = 0; b < fe.size(); ++b)
    if (fe[b] == index) a.news.push_back(b);
  return a;
}

BlockAccess block_access(const Program& p, std::span<const uint32_t> block) {
  BlockAccess b;
  for (uint32_t i : block) {
    AccessSets a = instruction_access(p, i);
    b.sets.reads = set_union(b.sets.reads, a.reads);
    b.sets.writes = set_union(b.sets.writes, a.writes);
    b.sets.news = set_union(b.sets.news, a.news);
    b.sets.dels = set_union(b.sets.dels, a.dels);
  }
  compute_ext(p, b);
  return b;
}

BlockAccess merge_access(const Program& p, const BlockAccess& a, const BlockAccess& b) {
  BlockAccess out;
  out.sets.reads = set_union(a.sets.reads, b.sets.reads);
  out.sets.writes = set_union(a.sets.writes, b.sets.writes);
  out.sets.news = set_union(a.sets.news, b.sets.news);
  out.sets.dels = set_union(a.sets.dels, b.sets.dels);
  compute_ext(p, out);
  return out;
}

uint64_t byte_count(const Program& p, std::span<const uint32_t> views) {
  uint64_t total = 0;
  for (uint32_t v : views) total += p.view_bytes(v);
  return total;
}

}  // namespace wsp
