#include <memory>
#include <string>

#include "core/cost.hpp"
#include "core/generate.hpp"
#include "core/graph.hpp"
#include "core/program.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace wsp;

namespace {

// The four-array pipeline scaled to n elements per printed array.
std::string pipeline_text(uint32_t n) {
  std::string dn = std::to_string(n);
  std::string wn = std::to_string(n - 1);
  std::string nn = std::to_string(n);
  return "array A " + wn + " u8\n" +
         "array B " + wn + " u8\n" +
         "array D " + dn + " u8\n" +
         "array E " + dn + " u8\n" +
         "array T " + wn + " u8\n" +
         "COPY A, 0\n"
         "COPY B, 0\n"
         "COPY D, 0\n"
         "COPY E, 0\n"
         "ADD A, A, D[:-1]\n"
         "COPY A, D[:-1]\n"
         "ADD B, B, E[:-1]\n"
         "COPY B, E[:-1]\n"
         "MUL T, A, B\n"
         "MAX D[1:], T, E[1:]\n"
         "MIN E[1:], T, D[1:]\n"
         "DEL A\n"
         "DEL B\n"
         "DEL E\n"
         "DEL T\n"
         "SYNC D\n"
         "DEL D\n";
}

Blocks singletons(uint32_t n) {
  Blocks b(n);
  for (uint32_t i = 0; i < n; ++i) b[i] = {i};
  return b;
}

}  // namespace

TEST_CASE("pipeline singleton bytes follow 23n-21") {
  for (uint32_t n = 2; n <= 8; ++n) {
    Program p = parse_program(pipeline_text(n));
    Blocks bot = singletons(static_cast<uint32_t>(p.instructions.size()));
    uint64_t expect = 23ull * n - 21;
    CHECK(oracle::bohrium(p, bot) == expect);
    CHECK(bohrium_cost(p, bot) == expect);
  }
}

TEST_CASE("byte cost of simple blocks by hand") {
  Program p = parse_program(
      "array A 4 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "DEL A\n");
  WspGraph g = build_wsp(p);
  auto m = make_cost_model("bohrium");

  // Singletons: op0 writes A (4, A not deleted here); op1 reads A (4) and
  // writes B (4); DEL contributes nothing.
  CHECK(m->evaluate(g, {{0}, {1}, {2}}) == 12);
  // 0+1 fused: A created inside, so the read is internal; A's write is still
  // external because DEL sits outside.
  CHECK(m->evaluate(g, {{0, 1}, {2}}) == 8);
  // All fused: A fully internal, only B's write remains.
  CHECK(m->evaluate(g, {{0, 1, 2}}) == 4);

  for (const Blocks& b :
       {Blocks{{0}, {1}, {2}}, Blocks{{0, 1}, {2}}, Blocks{{0, 1, 2}}})
    CHECK(m->evaluate(g, b) == oracle::bohrium(p, b));
}

TEST_CASE("contract counts arrays finished where they start") {
  Program p = parse_program(
      "array A 4 u8\narray B 4 u8\narray C 4 u8\n"
      "COPY A, 0\n"   // 0
      "COPY B, A\n"   // 1
      "COPY C, B\n"   // 2
      "DEL A\n"       // 3
      "DEL B\n");     // 4
  WspGraph g = build_wsp(p);
  auto m = make_cost_model("max-contract");

  // Three live arrays, none contracted.
  CHECK(m->evaluate(g, singletons(5)) == 3);
  // A created at 0 and deleted at 3 in one block.
  CHECK(m->evaluate(g, {{0, 3}, {1}, {2}, {4}}) == 2);
  // A and B both contracted; C has no DEL and never contracts.
  CHECK(m->evaluate(g, {{0, 3}, {1, 4}, {2}}) == 1);
  CHECK(m->evaluate(g, {{0, 1, 2, 3, 4}}) == 1);

  for (const Blocks& b : {Blocks{{0, 3}, {1}, {2}, {4}}, Blocks{{0, 3}, {1, 4}, {2}}})
    CHECK(m->evaluate(g, b) == oracle::max_contract(p, b));
}

TEST_CASE("locality counts cross-block identical-view pairs") {
  // Four consumers of one shared view, plus its producer.
  Program p = parse_program(
      "array S 4 u8\narray W 4 u8\narray X 4 u8\narray Y 4 u8\narray Z 4 u8\n"
      "COPY S, 7\n"
      "ADD W, S, 1\n"
      "ADD X, S, 2\n"
      "ADD Y, S, 3\n"
      "ADD Z, S, 4\n");
  WspGraph g = build_wsp(p);
  auto m = make_cost_model("max-locality");

  // Ten cross pairs all share S exactly once on each side.
  CHECK(m->evaluate(g, singletons(5)) == 10);
  // Fusing the four consumers hides their six mutual pairs.
  CHECK(m->evaluate(g, {{0}, {1, 2, 3, 4}}) == 4);
  CHECK(m->evaluate(g, {{0, 1, 2, 3, 4}}) == 0);

  CHECK(oracle::max_locality(p, singletons(5)) == 10);
  CHECK(oracle::max_locality(p, {{0}, {1, 2, 3, 4}}) == 4);

  // An instruction that reads and writes the same view counts it twice.
  Program q = parse_program(
      "array A 4 u8\n"
      "COPY A, 0\n"
      "ADD A, A, 1\n");
  CHECK(locality_pair_count(q, 0, 1) == 2);
  CHECK(oracle::max_locality(q, singletons(2)) == 2);
}

TEST_CASE("combined model weighs locality over contraction over blocks") {
  Program p = parse_program(
      "array A 4 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "DEL A\n");
  WspGraph g = build_wsp(p);
  auto m = make_cost_model("robinson");
  uint64_t n = distinct_accessed_views(p);
  CHECK(n == oracle::distinct_views(p));
  for (const Blocks& b :
       {Blocks{{0}, {1}, {2}}, Blocks{{0, 1}, {2}}, Blocks{{0, 1, 2}}}) {
    CHECK(m->evaluate(g, b) ==
          b.size() + n * max_contract_cost(p, b) +
              n * n * max_locality_cost(p, b));
    CHECK(m->evaluate(g, b) == oracle::robinson(p, b));
  }
}

TEST_CASE("savings equal evaluation differences on generated programs") {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    GenOptions opt;
    opt.kind = generator_names()[seed % generator_names().size()];
    opt.ops = 8;
    opt.seed = seed;
    Program p = generate_program(opt);
    WspGraph g = build_wsp(p);
    uint32_t n = g.n;
    for (const char* name :
         {"bohrium", "max-contract", "max-locality", "robinson"}) {
      auto m = make_cost_model(name);
      Blocks bot = singletons(n);
      uint64_t base = m->evaluate(g, bot);
      CHECK(base == oracle::model_cost(name, p, bot));
      for (uint32_t i = 0; i < n; ++i) {
        for (uint32_t j = i + 1; j < n; ++j) {
          Blocks merged;
          merged.push_back({i, j});
          for (uint32_t v = 0; v < n; ++v)
            if (v != i && v != j) merged.push_back({v});
          uint64_t after = m->evaluate(g, merged);
          REQUIRE(after <= base);
          CHECK(m->saving(g, {i}, nullptr, {j}, nullptr) == base - after);
          CHECK(oracle::model_cost(name, p, merged) == after);
        }
      }
    }
  }
}

TEST_CASE("cut weight model prices crossing edges") {
  MwcInstance m;
  m.n = 4;
  m.edges = {{0, 3, 5}, {1, 3, 2}, {2, 3, 7}, {0, 1, 1}};
  m.terminals = {0, 1, 2};
  auto [g, model] = mwc_to_wsp(m);
  CHECK(model->name() == "cut-weight");
  CHECK_FALSE(model->needs_program());
  CHECK(model->evaluate(g, {{0}, {1}, {2}, {3}}) == 15);
  CHECK(model->evaluate(g, {{0}, {1}, {2, 3}}) == 8);
  CHECK(model->saving(g, {2}, nullptr, {3}, nullptr) == 7);
  CHECK(model->saving(g, {0}, nullptr, {1}, nullptr) == 1);
}

TEST_CASE("unknown model name yields null") {
  CHECK(make_cost_model("bohrium") != nullptr);
  CHECK(make_cost_model("nope") == nullptr);
}
