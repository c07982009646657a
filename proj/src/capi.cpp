#include "wsp.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include "core/algorithms.hpp"
#include "core/cache.hpp"
#include "core/cost.hpp"
#include "core/generate.hpp"
#include "core/graph.hpp"
#include "core/program.hpp"
#include "core/state.hpp"

struct wsp_program {
  wsp::Program prog;
  wsp::WspGraph graph;
};

struct wsp_result {
  wsp::PartitionResult res;
  int cache_hit = 0;
};

struct wsp_cache {
  wsp::ResultCache cache;
  std::string dir_text;
};

namespace {

thread_local std::string t_last_error = "no error";

wsp_status fail(wsp_status s, std::string msg) {
  t_last_error = std::move(msg);
  return s;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

wsp_program* wrap_program(wsp::Program&& p) {
  auto* h = new wsp_program{std::move(p), {}};
  h->graph = wsp::build_wsp(h->prog);
  return h;
}

wsp::SearchBudget to_budget(const wsp_budget* b) {
  wsp::SearchBudget out;
  if (b) {
    out.max_nodes = b->max_nodes;
    out.max_seconds = b->max_seconds;
  }
  return out;
}

constexpr const char* kStatNames[] = {"merges", "nodes",
                                      "pruned", "wall_ms",
                                      "budget_exhausted", "cache_hit"};
constexpr uint32_t kStatCount = 6;

}  // namespace

extern "C" {

const char* wsp_last_error(void) { return t_last_error.c_str(); }

void wsp_string_free(char* s) { std::free(s); }

wsp_status wsp_program_parse(const char* text, wsp_program** out) {
  if (!text || !out) return fail(WSP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    wsp::Program p = wsp::parse_program(text);
    *out = wrap_program(std::move(p));
    return WSP_OK;
  } catch (const wsp::ParseError& e) {
    return fail(WSP_ERR_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(WSP_ERR_INTERNAL, e.what());
  }
}

wsp_status wsp_program_from_file(const char* path, wsp_program** out) {
  if (!path || !out) return fail(WSP_ERR_INVALID_ARGUMENT, "null argument");
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return fail(WSP_ERR_IO, "cannot read " + std::string(path));
  std::ostringstream text;
  text << in.rdbuf();
  return wsp_program_parse(text.str().c_str(), out);
}

wsp_status wsp_program_generate(const char* kind, uint32_t ops, uint64_t seed,
                                uint64_t nelem, wsp_program** out) {
  if (!kind || !out) return fail(WSP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    wsp::GenOptions opt;
    opt.kind = kind;
    opt.ops = ops;
    opt.seed = seed;
    opt.nelem = nelem;
    wsp::Program p = wsp::generate_program(opt);
    *out = wrap_program(std::move(p));
    return WSP_OK;
  } catch (const std::invalid_argument& e) {
    return fail(WSP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(WSP_ERR_INTERNAL, e.what());
  }
}

void wsp_program_free(wsp_program* p) { delete p; }

wsp_status wsp_program_serialize(const wsp_program* p, char** out_text) {
  if (!p || !out_text) return fail(WSP_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out_text = dup_string(wsp::serialize_program(p->prog));
    return *out_text ? WSP_OK : fail(WSP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WSP_ERR_INTERNAL, e.what());
  }
}

uint32_t wsp_program_instruction_count(const wsp_program* p) {
  return p ? static_cast<uint32_t>(p->prog.instructions.size()) : 0;
}

static wsp_status partition_impl(const wsp_program* p, const char* algorithm,
                                 const char* model, const wsp_budget* budget,
                                 wsp_cache* cache, int* cache_hit,
                                 wsp_result** out) {
  if (!p || !algorithm || !model || !out)
    return fail(WSP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto cost_model = wsp::make_cost_model(model);
    if (!cost_model)
      return fail(WSP_ERR_INVALID_ARGUMENT,
                  "unknown cost model '" + std::string(model) + "'");
    auto result = std::make_unique<wsp_result>();
    bool hit = false;
    result->res = wsp::partition_cached(p->graph, *cost_model, algorithm,
                                        to_budget(budget),
                                        cache ? &cache->cache : nullptr, &hit);
    result->cache_hit = hit ? 1 : 0;
    if (cache_hit) *cache_hit = result->cache_hit;
    *out = result.release();
    return WSP_OK;
  } catch (const std::invalid_argument& e) {
    return fail(WSP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(WSP_ERR_INTERNAL, e.what());
  }
}

wsp_status wsp_partition(const wsp_program* p, const char* algorithm,
                         const char* model, const wsp_budget* budget,
                         wsp_result** out) {
  return partition_impl(p, algorithm, model, budget, nullptr, nullptr, out);
}

wsp_status wsp_partition_cached(const wsp_program* p, const char* algorithm,
                                const char* model, const wsp_budget* budget,
                                wsp_cache* cache, int* cache_hit,
                                wsp_result** out) {
  return partition_impl(p, algorithm, model, budget, cache, cache_hit, out);
}

void wsp_result_free(wsp_result* r) { delete r; }

uint64_t wsp_result_cost(const wsp_result* r) { return r ? r->res.cost : 0; }

int wsp_result_proven(const wsp_result* r) {
  return r && r->res.proven_optimal ? 1 : 0;
}

uint32_t wsp_result_block_count(const wsp_result* r) {
  return r ? static_cast<uint32_t>(r->res.partition.blocks.size()) : 0;
}

uint32_t wsp_result_block_size(const wsp_result* r, uint32_t block) {
  if (!r || block >= r->res.partition.blocks.size()) return 0;
  return static_cast<uint32_t>(r->res.partition.blocks[block].size());
}

uint32_t wsp_result_block_member(const wsp_result* r, uint32_t block,
                                 uint32_t i) {
  if (!r || block >= r->res.partition.blocks.size()) return UINT32_MAX;
  const auto& members = r->res.partition.blocks[block];
  if (i >= members.size()) return UINT32_MAX;
  return members[i];
}

uint32_t wsp_result_stat_count(const wsp_result* r) {
  return r ? kStatCount : 0;
}

const char* wsp_result_stat_name(const wsp_result* r, uint32_t i) {
  (void)r;
  return i < kStatCount ? kStatNames[i] : nullptr;
}

double wsp_result_stat_value(const wsp_result* r, uint32_t i) {
  if (!r) return 0.0;
  switch (i) {
    case 0: return static_cast<double>(r->res.stats.merges);
    case 1: return static_cast<double>(r->res.stats.nodes);
    case 2: return static_cast<double>(r->res.stats.pruned);
    case 3: return r->res.stats.wall_ms;
    case 4: return r->res.stats.budget_exhausted ? 1.0 : 0.0;
    case 5: return static_cast<double>(r->cache_hit);
    default: return 0.0;
  }
}

uint32_t wsp_result_trace_length(const wsp_result* r) {
  return r ? static_cast<uint32_t>(r->res.merge_trace.size()) : 0;
}

wsp_status wsp_result_trace_step(const wsp_result* r, uint32_t i, uint32_t* a,
                                 uint32_t* b) {
  if (!r || !a || !b || i >= r->res.merge_trace.size())
    return fail(WSP_ERR_INVALID_ARGUMENT, "trace index out of range");
  *a = r->res.merge_trace[i].first;
  *b = r->res.merge_trace[i].second;
  return WSP_OK;
}

wsp_status wsp_export_dot(const wsp_program* p, const char* algorithm,
                          const char* model, const wsp_budget* budget,
                          char** out_text) {
  if (!p || !model || !out_text)
    return fail(WSP_ERR_INVALID_ARGUMENT, "null argument");
  *out_text = nullptr;
  try {
    auto cost_model = wsp::make_cost_model(model);
    if (!cost_model)
      return fail(WSP_ERR_INVALID_ARGUMENT,
                  "unknown cost model '" + std::string(model) + "'");
    wsp::WspState state(p->graph, *cost_model);
    if (algorithm && std::string_view(algorithm) != "singleton") {
      wsp::PartitionResult res = wsp::run_algorithm(
          algorithm, p->graph, *cost_model, to_budget(budget));
      for (const auto& block : res.partition.blocks)
        for (size_t i = 1; i < block.size(); ++i)
          state.merge(state.block_of(block[0]), state.block_of(block[i]));
    }
    *out_text = dup_string(wsp::dot_export(state));
    return *out_text ? WSP_OK : fail(WSP_ERR_INTERNAL, "out of memory");
  } catch (const std::invalid_argument& e) {
    return fail(WSP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(WSP_ERR_INTERNAL, e.what());
  }
}

wsp_cache* wsp_cache_open(const char* dir) {
  try {
    std::filesystem::path path =
        dir && *dir ? std::filesystem::path(dir) : wsp::ResultCache::default_dir();
    auto* c = new wsp_cache{wsp::ResultCache(path), path.string()};
    return c;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return nullptr;
  }
}

void wsp_cache_close(wsp_cache* c) { delete c; }

const char* wsp_cache_dir(const wsp_cache* c) {
  return c ? c->dir_text.c_str() : "";
}

wsp_status wsp_cache_clear(wsp_cache* c, uint64_t* removed) {
  if (!c) return fail(WSP_ERR_INVALID_ARGUMENT, "null cache");
  try {
    uint64_t n = c->cache.clear();
    if (removed) *removed = n;
    return WSP_OK;
  } catch (const std::exception& e) {
    return fail(WSP_ERR_IO, e.what());
  }
}

wsp_status wsp_cache_stats(const wsp_cache* c, uint64_t* entries,
                           uint64_t* bytes) {
  if (!c) return fail(WSP_ERR_INVALID_ARGUMENT, "null cache");
  try {
    auto s = c->cache.stats();
    if (entries) *entries = s.entries;
    if (bytes) *bytes = s.bytes;
    return WSP_OK;
  } catch (const std::exception& e) {
    return fail(WSP_ERR_IO, e.what());
  }
}

uint64_t wsp_cache_computations(const wsp_cache* c) {
  return c ? c->cache.computations() : 0;
}

}  // extern "C"
