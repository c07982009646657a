#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "wsp.h"

namespace fs = std::filesystem;

namespace {

const char* kSmall =
    "array A 4 u8\n"
    "array B 4 u8\n"
    "COPY A, 0\n"
    "COPY B, A\n"
    "ADD B, B, A\n"
    "DEL A\n";

struct Prog {
  wsp_program* p = nullptr;
  ~Prog() { wsp_program_free(p); }
};

struct Res {
  wsp_result* r = nullptr;
  ~Res() { wsp_result_free(r); }
};

}  // namespace

TEST_CASE("parse, partition, and inspect through the C surface") {
  Prog prog;
  REQUIRE(wsp_program_parse(kSmall, &prog.p) == WSP_OK);
  CHECK(wsp_program_instruction_count(prog.p) == 4);

  wsp_budget budget{1000000, 30.0};
  Res res;
  REQUIRE(wsp_partition(prog.p, "optimal", "bohrium", &budget, &res.r) ==
          WSP_OK);
  CHECK(wsp_result_proven(res.r) == 1);
  CHECK(wsp_result_block_count(res.r) >= 1);

  uint32_t seen = 0;
  for (uint32_t b = 0; b < wsp_result_block_count(res.r); ++b) {
    uint32_t sz = wsp_result_block_size(res.r, b);
    REQUIRE(sz >= 1);
    for (uint32_t i = 0; i < sz; ++i) {
      uint32_t member = wsp_result_block_member(res.r, b, i);
      CHECK(member < 4);
      ++seen;
    }
    CHECK(wsp_result_block_member(res.r, b, sz) == UINT32_MAX);
  }
  CHECK(seen == 4);

  bool found_nodes = false;
  for (uint32_t i = 0; i < wsp_result_stat_count(res.r); ++i) {
    if (std::strcmp(wsp_result_stat_name(res.r, i), "nodes") == 0)
      found_nodes = true;
  }
  CHECK(found_nodes);

  for (uint32_t i = 0; i < wsp_result_trace_length(res.r); ++i) {
    uint32_t a = 0, b = 0;
    CHECK(wsp_result_trace_step(res.r, i, &a, &b) == WSP_OK);
    CHECK(a < 4);
    CHECK(b < 4);
  }
}

TEST_CASE("parse failures surface a message and no handle") {
  wsp_program* p = reinterpret_cast<wsp_program*>(0x1);
  CHECK(wsp_program_parse("array A 4 u8\nFROB A\n", &p) == WSP_ERR_PARSE);
  CHECK(p == nullptr);
  CHECK(wsp_last_error()[0] != '\0');
}

TEST_CASE("null arguments are rejected not crashed") {
  CHECK(wsp_program_parse(nullptr, nullptr) == WSP_ERR_INVALID_ARGUMENT);
  CHECK(wsp_partition(nullptr, "greedy", "bohrium", nullptr, nullptr) ==
        WSP_ERR_INVALID_ARGUMENT);
  Prog prog;
  REQUIRE(wsp_program_parse(kSmall, &prog.p) == WSP_OK);
  Res res;
  CHECK(wsp_partition(prog.p, "nope", "bohrium", nullptr, &res.r) ==
        WSP_ERR_INVALID_ARGUMENT);
  CHECK(wsp_partition(prog.p, "greedy", "nope", nullptr, &res.r) ==
        WSP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("serialize round trips") {
  Prog prog;
  REQUIRE(wsp_program_parse(kSmall, &prog.p) == WSP_OK);
  char* text = nullptr;
  REQUIRE(wsp_program_serialize(prog.p, &text) == WSP_OK);
  REQUIRE(text != nullptr);

  Prog again;
  REQUIRE(wsp_program_parse(text, &again.p) == WSP_OK);
  char* text2 = nullptr;
  REQUIRE(wsp_program_serialize(again.p, &text2) == WSP_OK);
  CHECK(std::strcmp(text, text2) == 0);
  wsp_string_free(text);
  wsp_string_free(text2);
}

TEST_CASE("file loading matches in-memory parsing") {
  fs::path tmp = fs::temp_directory_path() / "wsp_capi_prog.wsp";
  {
    FILE* f = fopen(tmp.string().c_str(), "w");
    REQUIRE(f);
    fputs(kSmall, f);
    fclose(f);
  }
  Prog a, b;
  REQUIRE(wsp_program_from_file(tmp.string().c_str(), &a.p) == WSP_OK);
  REQUIRE(wsp_program_parse(kSmall, &b.p) == WSP_OK);
  char *ta = nullptr, *tb = nullptr;
  wsp_program_serialize(a.p, &ta);
  wsp_program_serialize(b.p, &tb);
  CHECK(std::strcmp(ta, tb) == 0);
  wsp_string_free(ta);
  wsp_string_free(tb);
  fs::remove(tmp);

  wsp_program* missing = nullptr;
  CHECK(wsp_program_from_file("/definitely/not/here.wsp", &missing) ==
        WSP_ERR_IO);
}

TEST_CASE("generators are deterministic per seed") {
  for (const char* kind : {"random-dag", "chain", "stencil", "fanio"}) {
    Prog a, b, c;
    REQUIRE(wsp_program_generate(kind, 9, 5, 0, &a.p) == WSP_OK);
    REQUIRE(wsp_program_generate(kind, 9, 5, 0, &b.p) == WSP_OK);
    REQUIRE(wsp_program_generate(kind, 9, 6, 0, &c.p) == WSP_OK);
    char *ta = nullptr, *tb = nullptr, *tc = nullptr;
    wsp_program_serialize(a.p, &ta);
    wsp_program_serialize(b.p, &tb);
    wsp_program_serialize(c.p, &tc);
    CHECK(std::strcmp(ta, tb) == 0);
    CHECK(std::strcmp(ta, tc) != 0);
    wsp_string_free(ta);
    wsp_string_free(tb);
    wsp_string_free(tc);
  }
  wsp_program* p = nullptr;
  CHECK(wsp_program_generate("bogus", 5, 0, 0, &p) ==
        WSP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("dot export is stable") {
  Prog prog;
  REQUIRE(wsp_program_parse(kSmall, &prog.p) == WSP_OK);
  char *a = nullptr, *b = nullptr;
  REQUIRE(wsp_export_dot(prog.p, nullptr, "bohrium", nullptr, &a) == WSP_OK);
  REQUIRE(wsp_export_dot(prog.p, nullptr, "bohrium", nullptr, &b) == WSP_OK);
  CHECK(std::strcmp(a, b) == 0);
  CHECK(std::strstr(a, "digraph") != nullptr);
  wsp_string_free(a);
  wsp_string_free(b);
}

TEST_CASE("cache round trip through the C surface") {
  std::random_device rd;
  fs::path dir = fs::temp_directory_path() /
                 ("wsp-capi-cache-" + std::to_string(rd()));
  wsp_cache* cache = wsp_cache_open(dir.string().c_str());
  REQUIRE(cache != nullptr);
  CHECK(std::strcmp(wsp_cache_dir(cache), dir.string().c_str()) == 0);

  Prog prog;
  REQUIRE(wsp_program_parse(kSmall, &prog.p) == WSP_OK);

  int hit = 1;
  Res first;
  REQUIRE(wsp_partition_cached(prog.p, "greedy", "bohrium", nullptr, cache,
                               &hit, &first.r) == WSP_OK);
  CHECK(hit == 0);
  CHECK(wsp_cache_computations(cache) == 1);

  Res second;
  REQUIRE(wsp_partition_cached(prog.p, "greedy", "bohrium", nullptr, cache,
                               &hit, &second.r) == WSP_OK);
  CHECK(hit == 1);
  CHECK(wsp_cache_computations(cache) == 1);
  CHECK(wsp_result_cost(first.r) == wsp_result_cost(second.r));

  uint64_t entries = 0, bytes = 0;
  REQUIRE(wsp_cache_stats(cache, &entries, &bytes) == WSP_OK);
  CHECK(entries == 1);
  CHECK(bytes > 0);

  uint64_t removed = 0;
  REQUIRE(wsp_cache_clear(cache, &removed) == WSP_OK);
  CHECK(removed == 1);

  wsp_cache_close(cache);
  std::error_code ec;
  fs::remove_all(dir, ec);
}
