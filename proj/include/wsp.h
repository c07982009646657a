#ifndef WSP_H
#define WSP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Array-bytecode partitioning library.
 *
 * All functions that can fail return a wsp_status; on failure the out
 * parameters are untouched and wsp_last_error() describes the problem for
 * the calling thread. Handles are opaque; free them with the matching
 * *_free/_close function. Strings returned through char** out parameters
 * are heap copies owned by the caller, released with wsp_string_free.
 */

typedef enum wsp_status {
  WSP_OK = 0,
  WSP_ERR_PARSE = 1,            /* program text rejected; see wsp_last_error */
  WSP_ERR_INVALID_ARGUMENT = 2, /* bad name, null handle, out-of-range index */
  WSP_ERR_IO = 3,               /* file could not be read */
  WSP_ERR_INTERNAL = 4
} wsp_status;

typedef struct wsp_program wsp_program;
typedef struct wsp_result wsp_result;
typedef struct wsp_cache wsp_cache;

typedef struct wsp_budget {
  uint64_t max_nodes;  /* search nodes before giving up */
  double max_seconds;  /* wall clock before giving up */
} wsp_budget;

/* Message for the most recent failure on this thread. Never NULL. */
const char* wsp_last_error(void);

void wsp_string_free(char* s);

/* ---- programs ---- */

wsp_status wsp_program_parse(const char* text, wsp_program** out);
wsp_status wsp_program_from_file(const char* path, wsp_program** out);

/* Deterministic random program. Kinds: random-dag, chain, stencil, fanio.
 * nelem sets the element count of generated bases (0 keeps the kind's
 * default). */
wsp_status wsp_program_generate(const char* kind, uint32_t ops, uint64_t seed,
                                uint64_t nelem, wsp_program** out);

void wsp_program_free(wsp_program* p);

/* Canonical text form (parsing it back gives an identical program). */
wsp_status wsp_program_serialize(const wsp_program* p, char** out_text);

uint32_t wsp_program_instruction_count(const wsp_program* p);

/* ---- partitioning ----
 *
 * Algorithms: singleton, linear, greedy, unintrusive, optimal, bruteforce.
 * Models: bohrium, max-contract, max-locality, robinson.
 * budget may be NULL for the defaults (10^7 nodes, 60 s); it only matters
 * to optimal. Running out of budget is not an error: the call returns
 * WSP_OK with proven = 0.
 */

wsp_status wsp_partition(const wsp_program* p, const char* algorithm,
                         const char* model, const wsp_budget* budget,
                         wsp_result** out);

/* Same, but consults `cache` first (cache may be NULL to bypass). cache_hit
 * (optional) reports whether the result came from disk. */
wsp_status wsp_partition_cached(const wsp_program* p, const char* algorithm,
                                const char* model, const wsp_budget* budget,
                                wsp_cache* cache, int* cache_hit,
                                wsp_result** out);

void wsp_result_free(wsp_result* r);

uint64_t wsp_result_cost(const wsp_result* r);
int wsp_result_proven(const wsp_result* r);

uint32_t wsp_result_block_count(const wsp_result* r);
uint32_t wsp_result_block_size(const wsp_result* r, uint32_t block);
/* Instruction index of member i of a block (blocks ordered by first member,
 * members ascending). Returns UINT32_MAX when out of range. */
uint32_t wsp_result_block_member(const wsp_result* r, uint32_t block,
                                 uint32_t i);

/* Search statistics as name/value pairs (merges, nodes, pruned, wall_ms,
 * budget_exhausted, cache_hit). */
uint32_t wsp_result_stat_count(const wsp_result* r);
const char* wsp_result_stat_name(const wsp_result* r, uint32_t i);
double wsp_result_stat_value(const wsp_result* r, uint32_t i);

/* Merge sequence reaching the result's partition from singletons. Each step
 * names two block ids (a block id is its smallest instruction index). */
uint32_t wsp_result_trace_length(const wsp_result* r);
wsp_status wsp_result_trace_step(const wsp_result* r, uint32_t i, uint32_t* a,
                                 uint32_t* b);

/* ---- graph export ---- */

/* GraphViz rendering of the program's partition graph after running
 * `algorithm` (NULL means singleton: the unmerged graph). Deterministic:
 * the same inputs give byte-identical output. */
wsp_status wsp_export_dot(const wsp_program* p, const char* algorithm,
                          const char* model, const wsp_budget* budget,
                          char** out_text);

/* ---- result cache ---- */

/* dir == NULL selects $WSP_CACHE_DIR, falling back to a per-user default. */
wsp_cache* wsp_cache_open(const char* dir);
void wsp_cache_close(wsp_cache* c);

const char* wsp_cache_dir(const wsp_cache* c);
wsp_status wsp_cache_clear(wsp_cache* c, uint64_t* removed);
wsp_status wsp_cache_stats(const wsp_cache* c, uint64_t* entries,
                           uint64_t* bytes);
/* Results actually computed (not served from disk) through this handle. */
uint64_t wsp_cache_computations(const wsp_cache* c);

#ifdef __cplusplus
}
#endif

#endif /* WSP_H */
