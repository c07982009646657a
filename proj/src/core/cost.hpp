#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "core/access.hpp"
#include "core/graph.hpp"

namespace wsp {

using Blocks = std::vector<std::vector<uint32_t>>;

// Monotone partition cost. evaluate() is the from-scratch definition;
// saving() must equal evaluate(P) - evaluate(P with b1,b2 merged) exactly,
// for any disjoint block pair (the weight-edge invariant). Summaries may be
// null only for models that do not need them (cut-weight).
class CostModel {
 public:
  virtual ~CostModel() = default;
  virtual std::string_view name() const = 0;

  virtual uint64_t evaluate(const WspGraph& g, const Blocks& blocks) const = 0;

  virtual uint64_t saving(const WspGraph& g, const std::vector<uint32_t>& m1,
                          const BlockAccess* a1, const std::vector<uint32_t>& m2,
                          const BlockAccess* a2) const = 0;

  // The shared-external-access component of the saving, used by greedy to
  // rank merge candidates. Models without such a component report the full
  // saving, which makes the filter a no-op.
  virtual uint64_t locality_part(const WspGraph& g, const std::vector<uint32_t>& m1,
                                 const BlockAccess* a1, const std::vector<uint32_t>& m2,
                                 const BlockAccess* a2) const {
    return saving(g, m1, a1, m2, a2);
  }

  virtual bool needs_program() const { return true; }
};

// Factory for the program models: "bohrium", "max-contract", "max-locality",
// "robinson". Returns null for unknown names.
std::unique_ptr<CostModel> make_cost_model(std::string_view name);

std::unique_ptr<CostModel> make_cut_weight_model(MwcInstance m);

std::pair<WspGraph, std::unique_ptr<CostModel>> mwc_to_wsp(const MwcInstance& m);

// Direct entry points (tests, oracles).
uint64_t bohrium_cost(const Program& p, const Blocks& blocks);
uint64_t bohrium_saving(const Program& p, const std::vector<uint32_t>& b1,
                        const std::vector<uint32_t>& b2);
uint64_t max_contract_cost(const Program& p, const Blocks& blocks);
uint64_t max_locality_cost(const Program& p, const Blocks& blocks);
uint64_t robinson_cost(const Program& p, const Blocks& blocks);

// Max Locality pair weight between two instructions: matching identical views
// of io[f] x io[f'], counting read+write multiplicity on both sides.
uint64_t locality_pair_count(const Program& p, uint32_t f, uint32_t f2);

// Distinct views accessed anywhere in the program (Robinson's N).
uint64_t distinct_accessed_views(const Program& p);

}  // namespace wsp
