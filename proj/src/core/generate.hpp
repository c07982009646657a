#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/program.hpp"

namespace wsp {

struct GenOptions {
  std::string kind = "random-dag";  // random-dag, chain, stencil, fanio
  uint32_t ops = 10;
  uint64_t seed = 0;
  // Elements per generated base (the stencil grid is nelem wide); 0 keeps
  // each kind's default size.
  uint64_t nelem = 0;
  // random-dag only: regenerate (deterministically, next internal seed) while any
  // cost model yields more weight edges than this at the singleton
  // partition. 0 disables the cap.
  uint32_t max_weight_edges = 20;
};

// Deterministic: the same options always produce the same program.
//   random-dag  every base written once, at its creation; strided reads of
//           earlier bases; some bases deleted at the end
//   chain   two-back dependency chain, one fresh base per instruction
//   stencil one shared grid read through shifted windows by every stage
//   fanio   a layer of producers followed by random combiners
Program generate_program(const GenOptions& opt);

MwcInstance generate_mwc(uint64_t seed, uint32_t max_vertices = 8,
                         uint64_t max_weight = 10);

const std::vector<std::string>& generator_names();

}  // namespace wsp
