#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/cost.hpp"

namespace wsp {

struct Partition {
  Blocks blocks;  // members sorted; blocks ordered by first member
};

bool is_legal_partition(const WspGraph& g, const Partition& p);

// Quotient of the WSP graph under a partition: blocks (id = smallest member
// vertex), contracted dependency/forbidden edges, derived weight edges
// (every non-forbidden block pair whose exact merge saving is positive), and
// the running cost. Merging a forbidden pair poisons the state permanently.
class WspState {
 public:
  WspState(const WspGraph& g, const CostModel& m);

  const WspGraph& graph() const { return *g_; }
  const CostModel& model() const { return *model_; }

  uint64_t cost() const { return cost_; }
  bool poisoned() const { return poisoned_; }
  uint32_t block_count() const { return alive_count_; }
  uint64_t merges_applied() const { return merges_; }

  bool alive(uint32_t id) const { return alive_[id]; }
  uint32_t block_of(uint32_t vertex) const { return vertex_block_[vertex]; }
  const std::vector<uint32_t>& members(uint32_t id) const { return blocks_[id].members; }
  const BlockAccess& access(uint32_t id) const { return blocks_[id].access; }
  const std::vector<uint32_t>& dep_out(uint32_t id) const { return blocks_[id].dep_out; }
  const std::vector<uint32_t>& dep_in(uint32_t id) const { return blocks_[id].dep_in; }
  const std::vector<uint32_t>& forbid(uint32_t id) const { return blocks_[id].forbid; }
  bool has_forbid(uint32_t a, uint32_t b) const;

  std::vector<uint32_t> block_ids() const;
  Partition partition() const;

  // Weight edges keyed by (smaller id, larger id), weight > 0.
  const std::map<std::pair<uint32_t, uint32_t>, uint64_t>& weights() const {
    return weights_;
  }
  uint64_t weight(uint32_t a, uint32_t b) const;  // 0 when absent

  // Permanently removes the weight edge (a, b). The removal survives
  // contraction and infects it: once a block's edge to some neighbor was
  // struck, no block that later swallows either side regains an edge between
  // the two, even if the other half still carried one.
  void strike(uint32_t a, uint32_t b);
  bool struck(uint32_t a, uint32_t b) const;

  // Surviving block id of the most recent merge; UINT32_MAX before the first.
  uint32_t last_merged() const { return last_merged_; }

  // Exact saving of merging the two blocks now (model-evaluated).
  uint64_t saving(uint32_t a, uint32_t b) const;
  uint64_t locality_part(uint32_t a, uint32_t b) const;

  // Lemma test: no forbidden edge between the blocks and no dependency path
  // of two or more edges between them in either direction.
  bool legal_merge(uint32_t b1, uint32_t b2) const;

  // Directed reachability in the contracted dependency graph.
  bool reaches(uint32_t from, uint32_t to) const;

  bool quotient_acyclic() const;

  // Contracts b2 into b1 (the surviving id is the smaller one; returned).
  // Legality is NOT required; merging a forbidden pair poisons the state.
  uint32_t merge(uint32_t b1, uint32_t b2);

 private:
  struct BlockData {
    std::vector<uint32_t> members;
    BlockAccess access;
    std::vector<uint32_t> touched;  // bases referenced by the block
    std::vector<uint32_t> dep_out, dep_in, forbid;  // sorted block ids
  };

  void derive_weights_for(uint32_t id);
  uint64_t saving_blocks(const BlockData& a, const BlockData& b) const;

  const WspGraph* g_;
  const CostModel* model_;
  std::vector<BlockData> blocks_;
  std::vector<bool> alive_;
  std::vector<uint32_t> vertex_block_;
  std::map<std::pair<uint32_t, uint32_t>, uint64_t> weights_;
  std::set<std::pair<uint32_t, uint32_t>> struck_;
  uint64_t cost_ = 0;
  uint32_t alive_count_ = 0;
  uint64_t merges_ = 0;
  uint32_t last_merged_ = UINT32_MAX;
  bool poisoned_ = false;
};

// Deterministic DOT rendering: record nodes per block, solid directed
// dependency edges, dashed forbidden edges, dotted weight edges with labels.
std::string dot_export(const WspState& s);

}  // namespace wsp
