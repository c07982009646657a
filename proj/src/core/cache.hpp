#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "core/algorithms.hpp"

namespace wsp {

std::string sha256_hex(std::string_view data);

struct CacheEntry {
  std::string key;
  std::string algorithm;
  std::string model;
  std::string budget;
  uint64_t cost = 0;
  bool proven = false;
  std::string created_at;  // UTC, e.g. 2026-08-22T10:00:00Z
  Blocks blocks;
};

// One file per entry, named <key>.wspc, in a flat directory. Entries carry a
// payload checksum; a corrupt file is reported to stderr and treated as a
// miss. Writes go through a temp file and a rename, so concurrent writers
// settle on last-write-wins without torn files. There is no eviction, only
// a warning once the entry count passes max_entries.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir);

  // WSP_CACHE_DIR when set, otherwise a per-user cache directory.
  static std::filesystem::path default_dir();

  const std::filesystem::path& dir() const { return dir_; }

  // Keyed on the renamed canonical program text plus the run parameters, so
  // programs differing only in base names share entries.
  static std::string make_key(const Program& p, std::string_view algorithm,
                              std::string_view model, std::string_view budget);
  static std::string budget_descriptor(const SearchBudget& b);

  std::optional<CacheEntry> load(const std::string& key) const;
  void store(const CacheEntry& e) const;

  uint64_t clear() const;

  struct Stats {
    uint64_t entries = 0;
    uint64_t bytes = 0;
  };
  Stats stats() const;

  // How many results this process actually computed (cache misses).
  uint64_t computations() const { return computed_; }
  void count_computation() const { ++computed_; }

  size_t max_entries = 4096;

 private:
  std::filesystem::path dir_;
  mutable uint64_t computed_ = 0;
};

// Runs `algorithm` on g (which must wrap a program), consulting the cache
// first when one is given. cache_hit, when non-null, reports whether the
// result was served from disk. A cached result's merge trace is re-derived
// from its partition.
PartitionResult partition_cached(const WspGraph& g, const CostModel& m,
                                 std::string_view algorithm,
                                 const SearchBudget& budget, ResultCache* cache,
                                 bool* cache_hit);

}  // namespace wsp
