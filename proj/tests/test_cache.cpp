#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "core/algorithms.hpp"
#include "core/cache.hpp"
#include "core/generate.hpp"
#include "doctest.h"

using namespace wsp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() /
           ("wsp-test-" + std::to_string(rd()) + std::to_string(rd() % 1000));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

Program small_program() {
  return parse_program(
      "array A 4 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "ADD B, B, A\n"
      "DEL A\n");
}

}  // namespace

TEST_CASE("cache keys track content, not presentation") {
  SearchBudget budget;
  std::string b = ResultCache::budget_descriptor(budget);
  Program base = small_program();
  std::string k0 = ResultCache::make_key(base, "greedy", "bohrium", b);

  // Renamed bases and reflowed whitespace produce the same key.
  Program renamed = parse_program(
      "array left 4 u8\narray right 4 u8\n"
      "COPY   left,  0\n"
      "COPY right, left\n"
      "# comment\n"
      "ADD right, right, left\n"
      "DEL left\n");
  CHECK(ResultCache::make_key(renamed, "greedy", "bohrium", b) == k0);

  // Anything semantic changes it.
  Program reordered = parse_program(
      "array A 4 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "DEL A\n"
      "ADD B, B, B\n");
  CHECK(ResultCache::make_key(reordered, "greedy", "bohrium", b) != k0);

  Program opcode_change = parse_program(
      "array A 4 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "MUL B, B, A\n"
      "DEL A\n");
  CHECK(ResultCache::make_key(opcode_change, "greedy", "bohrium", b) != k0);

  Program view_change = parse_program(
      "array A 8 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A[0:4]\n"
      "ADD B, B, A[0:4]\n"
      "DEL A\n");
  CHECK(ResultCache::make_key(view_change, "greedy", "bohrium", b) != k0);

  Program dtype_change = parse_program(
      "array A 4 f32\narray B 4 f32\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "ADD B, B, A\n"
      "DEL A\n");
  CHECK(ResultCache::make_key(dtype_change, "greedy", "bohrium", b) != k0);

  CHECK(ResultCache::make_key(base, "optimal", "bohrium", b) != k0);
  CHECK(ResultCache::make_key(base, "greedy", "max-locality", b) != k0);

  SearchBudget other;
  other.max_nodes = 17;
  CHECK(ResultCache::make_key(base, "greedy", "bohrium",
                              ResultCache::budget_descriptor(other)) != k0);
}

TEST_CASE("store and load round trip") {
  TempDir dir;
  ResultCache cache(dir.path);

  CacheEntry e;
  e.key = "0123456789abcdef";
  e.algorithm = "greedy";
  e.model = "bohrium";
  e.budget = "n10000000s60";
  e.cost = 42;
  e.proven = true;
  e.created_at = "2026-08-22T10:00:00Z";
  e.blocks = {{0, 2}, {1}, {3, 4, 5}};
  cache.store(e);

  auto back = cache.load(e.key);
  REQUIRE(back.has_value());
  CHECK(back->cost == 42);
  CHECK(back->proven);
  CHECK(back->blocks == e.blocks);
  CHECK(back->algorithm == "greedy");
  CHECK(back->model == "bohrium");

  CHECK_FALSE(cache.load("ffffffffffffffff").has_value());
}

TEST_CASE("corrupt entries are treated as misses") {
  TempDir dir;
  ResultCache cache(dir.path);

  CacheEntry e;
  e.key = "deadbeefdeadbeef";
  e.algorithm = "greedy";
  e.model = "bohrium";
  e.budget = "b";
  e.cost = 7;
  e.blocks = {{0}, {1}};
  cache.store(e);
  REQUIRE(cache.load(e.key).has_value());

  // Flip one payload byte on disk.
  fs::path file;
  for (const auto& entry : fs::directory_iterator(dir.path)) file = entry.path();
  REQUIRE(!file.empty());
  std::fstream io(file, std::ios::in | std::ios::out | std::ios::binary);
  io.seekg(0, std::ios::end);
  auto size = io.tellg();
  io.seekg(static_cast<std::streamoff>(size) / 2);
  char c = static_cast<char>(io.get());
  io.seekp(static_cast<std::streamoff>(size) / 2);
  io.put(c == '~' ? '!' : '~');
  io.close();

  CHECK_FALSE(cache.load(e.key).has_value());
}

TEST_CASE("clear and stats") {
  TempDir dir;
  ResultCache cache(dir.path);
  for (int i = 0; i < 3; ++i) {
    CacheEntry e;
    e.key = "key" + std::to_string(i);
    e.algorithm = "greedy";
    e.model = "bohrium";
    e.budget = "b";
    e.cost = i;
    e.blocks = {{0}};
    cache.store(e);
  }
  ResultCache::Stats s = cache.stats();
  CHECK(s.entries == 3);
  CHECK(s.bytes > 0);
  CHECK(cache.clear() == 3);
  s = cache.stats();
  CHECK(s.entries == 0);
  CHECK(s.bytes == 0);
}

TEST_CASE("no temp residue after stores") {
  TempDir dir;
  ResultCache cache(dir.path);
  for (int i = 0; i < 8; ++i) {
    CacheEntry e;
    e.key = "res" + std::to_string(i);
    e.algorithm = "linear";
    e.model = "bohrium";
    e.budget = "b";
    e.blocks = {{0}};
    cache.store(e);
  }
  uint64_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    CHECK(entry.path().extension() == ".wspc");
    ++files;
  }
  CHECK(files == 8);
}

TEST_CASE("entries past the soft limit stay resident") {
  TempDir dir;
  ResultCache cache(dir.path);
  cache.max_entries = 2;
  for (int i = 0; i < 4; ++i) {
    CacheEntry e;
    e.key = "lim" + std::to_string(i);
    e.algorithm = "linear";
    e.model = "bohrium";
    e.budget = "b";
    e.blocks = {{0}};
    cache.store(e);
  }
  CHECK(cache.stats().entries == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(cache.load("lim" + std::to_string(i)).has_value());
}

TEST_CASE("cached partition runs compute once and stay identical") {
  TempDir dir;
  ResultCache cache(dir.path);
  Program p = small_program();
  WspGraph g = build_wsp(p);
  auto m = make_cost_model("bohrium");
  SearchBudget budget;

  bool hit = true;
  PartitionResult first =
      partition_cached(g, *m, "optimal", budget, &cache, &hit);
  CHECK_FALSE(hit);
  CHECK(cache.computations() == 1);

  for (int i = 0; i < 5; ++i) {
    PartitionResult again =
        partition_cached(g, *m, "optimal", budget, &cache, &hit);
    CHECK(hit);
    CHECK(again.cost == first.cost);
    CHECK(again.proven_optimal == first.proven_optimal);
    CHECK(again.partition.blocks == first.partition.blocks);
  }
  CHECK(cache.computations() == 1);

  // A fresh cache object over the same directory still hits.
  ResultCache other(dir.path);
  PartitionResult warm =
      partition_cached(g, *m, "optimal", budget, &other, &hit);
  CHECK(hit);
  CHECK(other.computations() == 0);
  CHECK(warm.partition.blocks == first.partition.blocks);

  // The replayed trace must be usable even though it came from disk.
  WspState st(g, *m);
  for (auto [a, b] : warm.merge_trace) {
    REQUIRE(st.legal_merge(a, b));
    st.merge(a, b);
  }
  CHECK(st.partition().blocks == warm.partition.blocks);
}

TEST_CASE("renamed program hits the same entry") {
  TempDir dir;
  ResultCache cache(dir.path);
  auto m = make_cost_model("bohrium");
  SearchBudget budget;

  Program p = small_program();
  WspGraph g = build_wsp(p);
  bool hit = true;
  partition_cached(g, *m, "greedy", budget, &cache, &hit);
  CHECK_FALSE(hit);

  Program q = parse_program(
      "array u 4 u8\narray v 4 u8\n"
      "COPY u, 0\n"
      "COPY v, u\n"
      "ADD v, v, u\n"
      "DEL u\n");
  WspGraph h = build_wsp(q);
  partition_cached(h, *m, "greedy", budget, &cache, &hit);
  CHECK(hit);
  CHECK(cache.computations() == 1);
}

TEST_CASE("corrupt cached result falls back to recomputation") {
  TempDir dir;
  ResultCache cache(dir.path);
  Program p = small_program();
  WspGraph g = build_wsp(p);
  auto m = make_cost_model("bohrium");
  SearchBudget budget;

  bool hit = false;
  PartitionResult first =
      partition_cached(g, *m, "greedy", budget, &cache, &hit);

  for (const auto& entry : fs::directory_iterator(dir.path)) {
    std::ofstream out(entry.path(), std::ios::binary | std::ios::trunc);
    out << "not a cache file";
  }

  PartitionResult again =
      partition_cached(g, *m, "greedy", budget, &cache, &hit);
  CHECK_FALSE(hit);
  CHECK(again.cost == first.cost);
  CHECK(again.partition.blocks == first.partition.blocks);
  CHECK(cache.computations() == 2);
}
