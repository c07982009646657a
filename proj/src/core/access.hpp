#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/program.hpp"

namespace wsp {

// Sorted unique id vectors; views for reads/writes, base ids for news/dels.
struct AccessSets {
  std::vector<uint32_t> reads;
  std::vector<uint32_t> writes;
  std::vector<uint32_t> news;
  std::vector<uint32_t> dels;
};

// Access summary of a block, with the externally visible part:
// ext_reads = reads whose base is not in news, ext_writes = writes whose base
// is not in dels. Reads and writes stay separate components (a view that is
// both read and written externally counts twice).
struct BlockAccess {
  AccessSets sets;
  std::vector<uint32_t> ext_reads;
  std::vector<uint32_t> ext_writes;
};

AccessSets instruction_access(const Program& p, uint32_t index);

BlockAccess block_access(const Program& p, std::span<const uint32_t> block);

// Union of two summaries (disjoint blocks).
BlockAccess merge_access(const Program& p, const BlockAccess& a, const BlockAccess& b);

uint64_t byte_count(const Program& p, std::span<const uint32_t> views);

inline uint64_t ext_bytes(const Program& p, const BlockAccess& b) {
  return byte_count(p, b.ext_reads) + byte_count(p, b.ext_writes);
}

// Sorted-vector set helpers shared by the cost and state code.
std::vector<uint32_t> set_union(std::span<const uint32_t> a, std::span<const uint32_t> b);
std::vector<uint32_t> set_intersect(std::span<const uint32_t> a, std::span<const uint32_t> b);
bool sets_intersect(std::span<const uint32_t> a, std::span<const uint32_t> b);
bool set_contains(std::span<const uint32_t> s, uint32_t v);

}  // namespace wsp
