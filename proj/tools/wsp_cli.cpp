// Command-line front end for the partitioning library. Parses or generates
// array bytecode, runs the partitioner matrix, and reports costs, traces,
// DOT renderings, and benchmark CSV. Talks to the library exclusively
// through the public C interface.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsp.h"

namespace {

const std::vector<std::string> kAllAlgorithms = {
    "singleton", "linear", "greedy", "unintrusive", "optimal", "bruteforce"};
const std::vector<std::string> kDefaultAlgorithms = {
    "singleton", "linear", "greedy", "unintrusive", "optimal"};
const std::vector<std::string> kModels = {"bohrium", "max-contract",
                                          "max-locality", "robinson"};
const std::vector<std::string> kGenerators = {"random-dag", "chain", "stencil",
                                              "fanio"};

enum class CacheMode { warm, cold, none };

struct ProgramHandle {
  wsp_program* p = nullptr;
  ~ProgramHandle() { wsp_program_free(p); }
};

struct ResultHandle {
  wsp_result* r = nullptr;
  ~ResultHandle() { wsp_result_free(r); }
  void reset(wsp_result* next) {
    wsp_result_free(r);
    r = next;
  }
};

double stat_value(const wsp_result* r, const char* name) {
  for (uint32_t i = 0; i < wsp_result_stat_count(r); ++i)
    if (std::string_view(wsp_result_stat_name(r, i)) == name)
      return wsp_result_stat_value(r, i);
  return 0.0;
}

struct RunRow {
  std::string source;  // file path, or generator for bench rows
  uint64_t seed = 0;
  uint32_t ops = 0;
  std::string algorithm;
  std::string model;
  uint64_t cost = 0;
  uint32_t blocks = 0;
  bool proven = false;
  uint64_t nodes = 0;
  uint64_t pruned = 0;
  double ms_mean = 0.0;
  double ms_2sd = 0.0;
};

struct CacheSetup {
  wsp_cache* handle = nullptr;
  CacheMode mode = CacheMode::none;
  std::filesystem::path scratch;  // cold mode only

  ~CacheSetup() {
    if (handle) wsp_cache_close(handle);
    if (!scratch.empty()) {
      std::error_code ec;
      std::filesystem::remove_all(scratch, ec);
    }
  }
};

// warm: the configured directory, hits welcome. cold: a throwaway directory
// cleared between repetitions, so every run pays the miss + store path.
// none: the cache is never consulted.
bool open_cache(CacheSetup& setup, CacheMode mode, const std::string& dir) {
  setup.mode = mode;
  if (mode == CacheMode::none) return true;
  if (mode == CacheMode::cold) {
    std::error_code ec;
    auto base = std::filesystem::temp_directory_path(ec);
    if (ec) base = ".";
    std::random_device rd;
    setup.scratch =
        base / ("wsp-cold-" + std::to_string(rd()) + "-" +
                std::to_string(static_cast<unsigned>(::getpid())));
    setup.handle = wsp_cache_open(setup.scratch.string().c_str());
  } else {
    setup.handle = wsp_cache_open(dir.empty() ? nullptr : dir.c_str());
  }
  if (!setup.handle) {
    fprintf(stderr, "error: cannot open cache: %s\n", wsp_last_error());
    return false;
  }
  return true;
}

// Runs one (program, algorithm, model) cell `repeat` times, fills row timing
// with mean and twice the standard deviation, and keeps the last result.
// Re-runs must agree with the first; a mismatch is a reported failure.
bool run_cell(const wsp_program* p, const std::string& algorithm,
              const std::string& model, const wsp_budget& budget,
              uint32_t repeat, CacheSetup& cache, RunRow& row,
              ResultHandle& keep) {
  std::vector<double> times;
  times.reserve(repeat);
  uint64_t first_cost = 0;
  uint32_t first_blocks = 0;
  for (uint32_t rep = 0; rep < repeat; ++rep) {
    if (cache.mode == CacheMode::cold) wsp_cache_clear(cache.handle, nullptr);
    wsp_result* r = nullptr;
    auto t0 = std::chrono::steady_clock::now();
    wsp_status st =
        cache.mode == CacheMode::none
            ? wsp_partition(p, algorithm.c_str(), model.c_str(), &budget, &r)
            : wsp_partition_cached(p, algorithm.c_str(), model.c_str(),
                                   &budget, cache.handle, nullptr, &r);
    auto t1 = std::chrono::steady_clock::now();
    if (st != WSP_OK) {
      fprintf(stderr, "error: %s/%s: %s\n", algorithm.c_str(), model.c_str(),
              wsp_last_error());
      return false;
    }
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (rep == 0) {
      first_cost = wsp_result_cost(r);
      first_blocks = wsp_result_block_count(r);
    } else if (wsp_result_cost(r) != first_cost ||
               wsp_result_block_count(r) != first_blocks) {
      fprintf(stderr,
              "error: %s/%s: repetition %u disagrees with the first run "
              "(cost %llu vs %llu)\n",
              algorithm.c_str(), model.c_str(), rep,
              (unsigned long long)wsp_result_cost(r),
              (unsigned long long)first_cost);
      wsp_result_free(r);
      return false;
    }
    keep.reset(r);
  }

  double mean = 0.0;
  for (double t : times) mean += t;
  mean /= static_cast<double>(times.size());
  double var = 0.0;
  for (double t : times) var += (t - mean) * (t - mean);
  var /= static_cast<double>(times.size());

  row.algorithm = algorithm;
  row.model = model;
  row.cost = wsp_result_cost(keep.r);
  row.blocks = wsp_result_block_count(keep.r);
  row.proven = wsp_result_proven(keep.r) != 0;
  row.nodes = static_cast<uint64_t>(stat_value(keep.r, "nodes"));
  row.pruned = static_cast<uint64_t>(stat_value(keep.r, "pruned"));
  row.ms_mean = mean;
  row.ms_2sd = 2.0 * std::sqrt(var);
  return true;
}

// Cheapest-first sanity: merging never makes a monotone model worse, so no
// algorithm may beat the singleton baseline, and a proven optimal result
// must be at least as cheap as everything else on the same instance.
bool check_dominance(const std::vector<RunRow>& rows) {
  bool ok = true;
  auto key = [](const RunRow& r) {
    return std::make_tuple(r.source, r.seed, r.ops, r.model);
  };
  for (const RunRow& r : rows) {
    for (const RunRow& s : rows) {
      if (key(r) != key(s)) continue;
      if (s.algorithm == "singleton" && r.cost > s.cost) {
        fprintf(stderr,
                "dominance violation: %s (%llu) above singleton (%llu) on "
                "%s model=%s\n",
                r.algorithm.c_str(), (unsigned long long)r.cost,
                (unsigned long long)s.cost, r.source.c_str(), r.model.c_str());
        ok = false;
      }
      if (s.algorithm == "optimal" && s.proven && r.cost < s.cost) {
        fprintf(stderr,
                "dominance violation: %s (%llu) below proven optimal (%llu) "
                "on %s model=%s\n",
                r.algorithm.c_str(), (unsigned long long)r.cost,
                (unsigned long long)s.cost, r.source.c_str(), r.model.c_str());
        ok = false;
      }
    }
  }
  return ok;
}

void print_table(const std::vector<RunRow>& rows) {
  printf("%-28s %-12s %-13s %10s %7s %7s %10s %10s %11s %9s\n", "input",
         "algorithm", "model", "cost", "blocks", "proven", "nodes", "pruned",
         "ms_mean", "ms_2sd");
  for (const RunRow& r : rows)
    printf("%-28s %-12s %-13s %10llu %7u %7s %10llu %10llu %11.3f %9.3f\n",
           r.source.c_str(), r.algorithm.c_str(), r.model.c_str(),
           (unsigned long long)r.cost, r.blocks, r.proven ? "yes" : "no",
           (unsigned long long)r.nodes, (unsigned long long)r.pruned, r.ms_mean,
           r.ms_2sd);
}

void print_partition_csv(const std::vector<RunRow>& rows, FILE* out) {
  fprintf(out, "file,ops,algorithm,model,cost,blocks,proven,nodes,pruned,"
               "ms_mean,ms_2sd\n");
  for (const RunRow& r : rows)
    fprintf(out, "%s,%u,%s,%s,%llu,%u,%d,%llu,%llu,%.3f,%.3f\n",
            r.source.c_str(), r.ops, r.algorithm.c_str(), r.model.c_str(),
            (unsigned long long)r.cost, r.blocks, r.proven ? 1 : 0,
            (unsigned long long)r.nodes, (unsigned long long)r.pruned,
            r.ms_mean, r.ms_2sd);
}

void print_bench_csv(const std::vector<RunRow>& rows, FILE* out) {
  fprintf(out, "seed,generator,ops,algorithm,model,cost,blocks,proven,nodes,"
               "pruned,ms_mean,ms_2sd\n");
  for (const RunRow& r : rows)
    fprintf(out, "%llu,%s,%u,%s,%s,%llu,%u,%d,%llu,%llu,%.3f,%.3f\n",
            (unsigned long long)r.seed, r.source.c_str(), r.ops,
            r.algorithm.c_str(), r.model.c_str(), (unsigned long long)r.cost,
            r.blocks, r.proven ? 1 : 0, (unsigned long long)r.nodes,
            (unsigned long long)r.pruned, r.ms_mean, r.ms_2sd);
}

void print_trace(const wsp_program* p, const RunRow& row,
                 const ResultHandle& res) {
  char* text = nullptr;
  (void)p;
  printf("# input=%s algorithm=%s model=%s cost=%llu blocks=%u proven=%d\n",
         row.source.c_str(), row.algorithm.c_str(), row.model.c_str(),
         (unsigned long long)row.cost, row.blocks, row.proven ? 1 : 0);
  for (uint32_t i = 0; i < wsp_result_trace_length(res.r); ++i) {
    uint32_t a = 0, b = 0;
    if (wsp_result_trace_step(res.r, i, &a, &b) == WSP_OK)
      printf("%u %u\n", a, b);
  }
  if (text) wsp_string_free(text);
}

struct CommonOpts {
  std::vector<std::string> algorithms;
  std::vector<std::string> models;
  wsp_budget budget{10000000, 60.0};
  uint32_t repeat = 1;
  std::string cache_dir;
  bool warm = false, cold = false, none = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, CacheMode default_mode) {
  cmd->add_option("-a,--algorithm", o.algorithms, "partitioner(s) to run")
      ->check(CLI::IsMember(kAllAlgorithms));
  cmd->add_option("-m,--model", o.models, "cost model(s) to run")
      ->check(CLI::IsMember(kModels));
  cmd->add_option("--max-nodes", o.budget.max_nodes,
                  "search node budget for optimal");
  cmd->add_option("--max-seconds", o.budget.max_seconds,
                  "wall-clock budget for optimal");
  cmd->add_option("-r,--repeat", o.repeat, "timing repetitions per run")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cache-dir", o.cache_dir,
                  "result cache directory (default: WSP_CACHE_DIR or the "
                  "per-user cache)");
  auto* warm = cmd->add_flag("--warm-cache", o.warm,
                             "reuse cached results across runs");
  auto* cold = cmd->add_flag(
      "--cold-cache", o.cold,
      "run against an empty throwaway cache, paying the store cost");
  auto* none = cmd->add_flag("--no-cache", o.none, "never touch the cache");
  warm->excludes(cold)->excludes(none);
  cold->excludes(none);
  switch (default_mode) {
    case CacheMode::warm: cmd->parse_complete_callback([&o] {
        if (!o.cold && !o.none) o.warm = true;
      });
      break;
    default: cmd->parse_complete_callback([&o] {
        if (!o.warm && !o.cold) o.none = true;
      });
      break;
  }
}

CacheMode mode_of(const CommonOpts& o) {
  if (o.cold) return CacheMode::cold;
  if (o.none) return CacheMode::none;
  return CacheMode::warm;
}

int cmd_partition(const std::vector<std::string>& files, CommonOpts& o,
                  const std::string& format) {
  std::vector<std::string> algorithms =
      o.algorithms.empty() ? kDefaultAlgorithms : o.algorithms;
  std::vector<std::string> models =
      o.models.empty() ? std::vector<std::string>{"bohrium"} : o.models;

  if (format == "dot" &&
      (files.size() != 1 || algorithms.size() != 1 || models.size() != 1)) {
    fprintf(stderr,
            "error: dot output needs exactly one input, algorithm, and "
            "model\n");
    return 1;
  }

  CacheSetup cache;
  if (!open_cache(cache, mode_of(o), o.cache_dir)) return 1;

  std::vector<RunRow> rows;
  bool ok = true;
  for (const std::string& file : files) {
    ProgramHandle prog;
    if (wsp_program_from_file(file.c_str(), &prog.p) != WSP_OK) {
      fprintf(stderr, "error: %s: %s\n", file.c_str(), wsp_last_error());
      ok = false;
      continue;
    }
    for (const std::string& alg : algorithms) {
      for (const std::string& model : models) {
        RunRow row;
        row.source = file;
        row.ops = wsp_program_instruction_count(prog.p);
        ResultHandle res;
        if (!run_cell(prog.p, alg, model, o.budget, o.repeat, cache, row,
                      res)) {
          ok = false;
          continue;
        }
        if (format == "trace") print_trace(prog.p, row, res);
        rows.push_back(row);
      }
    }
    if (format == "dot") {
      char* text = nullptr;
      if (wsp_export_dot(prog.p, algorithms[0].c_str(), models[0].c_str(),
                         &o.budget, &text) != WSP_OK) {
        fprintf(stderr, "error: %s\n", wsp_last_error());
        ok = false;
      } else {
        fputs(text, stdout);
        wsp_string_free(text);
      }
    }
  }

  if (format == "table") print_table(rows);
  if (format == "csv") print_partition_csv(rows, stdout);
  if (!check_dominance(rows)) ok = false;
  return ok ? 0 : 1;
}

int cmd_dot(const std::string& file, const std::string& algorithm,
            const std::string& model, const wsp_budget& budget,
            const std::string& out_path) {
  ProgramHandle prog;
  if (wsp_program_from_file(file.c_str(), &prog.p) != WSP_OK) {
    fprintf(stderr, "error: %s: %s\n", file.c_str(), wsp_last_error());
    return 1;
  }
  char* text = nullptr;
  if (wsp_export_dot(prog.p, algorithm.c_str(), model.c_str(), &budget,
                     &text) != WSP_OK) {
    fprintf(stderr, "error: %s\n", wsp_last_error());
    return 1;
  }
  int rc = 0;
  if (out_path.empty()) {
    fputs(text, stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
    if (!out) {
      fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
      rc = 1;
    }
  }
  wsp_string_free(text);
  return rc;
}

int cmd_bench(const std::vector<std::string>& generators, uint32_t ops,
              uint64_t nelem, uint64_t seed0, uint32_t seeds, CommonOpts& o,
              const std::string& out_path) {
  std::vector<std::string> algorithms =
      o.algorithms.empty() ? kDefaultAlgorithms : o.algorithms;
  std::vector<std::string> models =
      o.models.empty() ? std::vector<std::string>{"bohrium"} : o.models;

  CacheSetup cache;
  if (!open_cache(cache, mode_of(o), o.cache_dir)) return 1;

  std::vector<RunRow> rows;
  bool ok = true;
  for (const std::string& gen : generators) {
    for (uint32_t s = 0; s < seeds; ++s) {
      uint64_t seed = seed0 + s;
      ProgramHandle prog;
      if (wsp_program_generate(gen.c_str(), ops, seed, nelem, &prog.p) !=
          WSP_OK) {
        fprintf(stderr, "error: generator %s: %s\n", gen.c_str(),
                wsp_last_error());
        ok = false;
        continue;
      }
      for (const std::string& alg : algorithms) {
        for (const std::string& model : models) {
          RunRow row;
          row.source = gen;
          row.seed = seed;
          row.ops = wsp_program_instruction_count(prog.p);
          ResultHandle res;
          if (!run_cell(prog.p, alg, model, o.budget, o.repeat, cache, row,
                        res)) {
            ok = false;
            continue;
          }
          rows.push_back(row);
        }
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
    return std::tie(a.source, a.ops, a.seed, a.algorithm, a.model) <
           std::tie(b.source, b.ops, b.seed, b.algorithm, b.model);
  });

  if (out_path.empty()) {
    print_bench_csv(rows, stdout);
  } else {
    FILE* f = fopen(out_path.c_str(), "w");
    if (!f) {
      fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
      ok = false;
    } else {
      print_bench_csv(rows, f);
      fclose(f);
    }
  }

  if (!check_dominance(rows)) ok = false;
  return ok ? 0 : 1;
}

int cmd_cache_clear(const std::string& dir) {
  wsp_cache* c = wsp_cache_open(dir.empty() ? nullptr : dir.c_str());
  if (!c) {
    fprintf(stderr, "error: %s\n", wsp_last_error());
    return 1;
  }
  uint64_t removed = 0;
  int rc = 0;
  if (wsp_cache_clear(c, &removed) != WSP_OK) {
    fprintf(stderr, "error: %s\n", wsp_last_error());
    rc = 1;
  } else {
    printf("removed %llu entries from %s\n", (unsigned long long)removed,
           wsp_cache_dir(c));
  }
  wsp_cache_close(c);
  return rc;
}

int cmd_cache_stats(const std::string& dir) {
  wsp_cache* c = wsp_cache_open(dir.empty() ? nullptr : dir.c_str());
  if (!c) {
    fprintf(stderr, "error: %s\n", wsp_last_error());
    return 1;
  }
  uint64_t entries = 0, bytes = 0;
  int rc = 0;
  if (wsp_cache_stats(c, &entries, &bytes) != WSP_OK) {
    fprintf(stderr, "error: %s\n", wsp_last_error());
    rc = 1;
  } else {
    printf("directory %s\nentries   %llu\nbytes     %llu\n", wsp_cache_dir(c),
           (unsigned long long)entries, (unsigned long long)bytes);
  }
  wsp_cache_close(c);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted partitioning of array bytecode"};
  app.require_subcommand(1);
  app.set_config("--config", "", "options file (key=value, sections per "
                                 "subcommand)");

  // partition
  auto* part = app.add_subcommand("partition",
                                  "partition programs and report costs");
  std::vector<std::string> part_files;
  part->add_option("files", part_files, "program file(s)")
      ->required()
      ->check(CLI::ExistingFile);
  CommonOpts part_opts;
  add_common(part, part_opts, CacheMode::warm);
  std::string part_format = "table";
  part->add_option("-f,--format", part_format, "table, csv, dot, or trace")
      ->check(CLI::IsMember({"table", "csv", "dot", "trace"}));

  // dot
  auto* dot = app.add_subcommand("dot", "export the partition graph");
  std::string dot_file, dot_alg = "singleton", dot_model = "bohrium",
              dot_out;
  dot->add_option("file", dot_file, "program file")
      ->required()
      ->check(CLI::ExistingFile);
  dot->add_option("-a,--algorithm", dot_alg,
                  "state to render: singleton for the initial graph, or an "
                  "algorithm's final state")
      ->check(CLI::IsMember(kAllAlgorithms));
  dot->add_option("-m,--model", dot_model, "cost model for weight edges")
      ->check(CLI::IsMember(kModels));
  wsp_budget dot_budget{10000000, 60.0};
  dot->add_option("--max-nodes", dot_budget.max_nodes,
                  "search node budget for optimal");
  dot->add_option("--max-seconds", dot_budget.max_seconds,
                  "wall-clock budget for optimal");
  dot->add_option("-o,--output", dot_out, "write here instead of stdout");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "generate synthetic programs and sweep the matrix");
  std::vector<std::string> bench_gens = kGenerators;
  bench->add_option("-g,--generator", bench_gens, "program generator(s)")
      ->check(CLI::IsMember(kGenerators));
  uint32_t bench_ops = 10;
  bench->add_option("--ops", bench_ops, "instructions per program")
      ->check(CLI::PositiveNumber);
  uint64_t bench_nelem = 0;
  bench->add_option("--nelem", bench_nelem,
                    "elements per generated base (0: generator default)");
  uint64_t bench_seed = 0;
  bench->add_option("--seed", bench_seed, "first seed");
  uint32_t bench_seeds = 5;
  bench->add_option("--seeds", bench_seeds, "number of consecutive seeds")
      ->check(CLI::PositiveNumber);
  CommonOpts bench_opts;
  add_common(bench, bench_opts, CacheMode::none);
  std::string bench_out;
  bench->add_option("-o,--output", bench_out, "CSV file instead of stdout");

  // cache
  auto* cache = app.add_subcommand("cache", "inspect the result cache");
  cache->require_subcommand(1);
  std::string cache_dir;
  cache->add_option("--cache-dir", cache_dir,
                    "cache directory (default: WSP_CACHE_DIR or the per-user "
                    "cache)");
  auto* cache_clear = cache->add_subcommand("clear", "remove every entry");
  auto* cache_stats = cache->add_subcommand("stats", "entry count and size");

  CLI11_PARSE(app, argc, argv);

  if (part->parsed())
    return cmd_partition(part_files, part_opts, part_format);
  if (dot->parsed())
    return cmd_dot(dot_file, dot_alg, dot_model, dot_budget, dot_out);
  if (bench->parsed())
    return cmd_bench(bench_gens, bench_ops, bench_nelem, bench_seed,
                     bench_seeds, bench_opts, bench_out);
  if (cache_clear->parsed()) return cmd_cache_clear(cache_dir);
  if (cache_stats->parsed()) return cmd_cache_stats(cache_dir);
  return 0;
}
