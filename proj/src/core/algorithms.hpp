#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/state.hpp"

namespace wsp {

struct SearchBudget {
  uint64_t max_nodes = 10'000'000;
  double max_seconds = 60.0;
};

struct SearchStats {
  uint64_t merges = 0;
  uint64_t nodes = 0;
  uint64_t pruned = 0;
  double wall_ms = 0.0;
  bool budget_exhausted = false;
};

struct PartitionResult {
  Partition partition;
  uint64_t cost = 0;
  bool proven_optimal = false;
  SearchStats stats;
  std::vector<std::pair<uint32_t, uint32_t>> merge_trace;
};

PartitionResult singleton_partition(const WspGraph& g, const CostModel& m);

// Scans instructions in order and folds each one into the block of its
// predecessor whenever that merge is legal.
PartitionResult linear_partition(const WspGraph& g, const CostModel& m);

// Repeatedly merges the heaviest candidate edge; candidates are weight edges
// whose locality component is positive. An edge whose merge is illegal is
// struck from the candidate list for good.
PartitionResult greedy_partition(const WspGraph& g, const CostModel& m);

// Applies only merges that provably cannot exclude a best partition.
PartitionResult unintrusive_partition(const WspGraph& g, const CostModel& m);

// Unintrusive preprocessing, a greedy incumbent, then branch and bound over
// merge masks. proven_optimal is false when the budget ran out first.
PartitionResult optimal_partition(const WspGraph& g, const CostModel& m,
                                  const SearchBudget& budget = {});

// Enumerates every partition (of singletons, or of base's blocks when given)
// and keeps the cheapest legal one. Refuses more than max_items items.
PartitionResult brute_force_partition(const WspGraph& g, const CostModel& m,
                                      uint32_t max_items = 12,
                                      const Partition* base = nullptr);

// Next safe early merge, or nothing when no block pair qualifies. Weight
// edges that cannot be merged at st are struck from the state for good as a
// side effect; the returned pair, when present, is a surviving edge with a
// pendant endpoint whose two blocks show the same conflicts to the rest of
// the graph.
std::optional<std::pair<uint32_t, uint32_t>> find_candidate(WspState& st);

// Applies, in edge-index order over st's current weight edges, every merge
// whose mask bit is set. Endpoints are chased through earlier contractions;
// merging an already-joined pair is a no-op. Returns false when some applied
// merge united forbidden blocks (st is then poisoned). The caller still has
// to check that the quotient stayed acyclic. Throws when the mask length
// does not match the weight edge count.
bool merge_by_mask(WspState& st, const std::vector<bool>& mask);

const std::vector<std::string>& algorithm_names();
PartitionResult run_algorithm(std::string_view name, const WspGraph& g,
                              const CostModel& m, const SearchBudget& budget = {});

// Rebuilds a merge sequence that reaches `target` from the singleton
// partition through legal merges only.
std::vector<std::pair<uint32_t, uint32_t>> reconstruct_trace(
    const WspGraph& g, const CostModel& m, const Partition& target);

}  // namespace wsp
