#include <algorithm>
#include <fstream>
#include <sstream>

#include "core/graph.hpp"
#include "core/program.hpp"
#include "doctest.h"

using namespace wsp;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_edge(const std::vector<std::pair<uint32_t, uint32_t>>& edges,
              uint32_t a, uint32_t b) {
  return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) !=
         edges.end();
}

}  // namespace

TEST_CASE("dependence directions") {
  Program p = parse_program(
      "array A 4 u8\narray B 4 u8\narray C 4 u8\n"
      "COPY A, 0\n"   // 0
      "COPY B, A\n"   // 1  read after write on A
      "COPY A, 7\n"   // 2  write after read (1) and write (0)
      "COPY C, 9\n"   // 3  unrelated
      "DEL A\n"       // 4
      "SYNC B\n");    // 5
  CHECK(depends(p, 0, 1));
  CHECK(depends(p, 1, 2));
  CHECK(depends(p, 0, 2));
  CHECK_FALSE(depends(p, 0, 3));
  CHECK_FALSE(depends(p, 1, 3));
  CHECK(depends(p, 2, 4));   // DEL follows the last write
  CHECK(depends(p, 1, 4));   // and the last read
  CHECK(depends(p, 1, 5));   // SYNC follows B's write
  CHECK_FALSE(depends(p, 3, 4));
}

TEST_CASE("disjoint windows carry no dependence") {
  Program p = parse_program(
      "array D 10 u8\n"
      "COPY D, 0\n"
      "COPY D[0:5], 1\n"
      "COPY D[5:10], 2\n");
  CHECK(depends(p, 0, 1));
  CHECK(depends(p, 0, 2));
  CHECK_FALSE(depends(p, 1, 2));
}

TEST_CASE("fusibility rules") {
  Program p = parse_program(
      "array S 8 u8\narray T 8 u8\narray U 4 u8\n"
      "COPY S, 0\n"          // 0
      "COPY T, S\n"          // 1  identical full views: fusible
      "COPY T[0:4], S[1:5]\n"  // 2  shifted read of S
      "COPY U, S[0:4]\n"     // 3  output shape 4
      "DEL S\n");            // 4
  CHECK(fusible(p, 0, 1));
  // 0 writes S fully, 2 reads S[1:5]: overlapping but not identical.
  CHECK_FALSE(fusible(p, 0, 2));
  // 1 and 3 share no views at all but output shapes differ (8 vs 4).
  CHECK_FALSE(fusible(p, 1, 3));
  // 2 and 3 read overlapping windows of S, but reads never conflict with
  // reads, and the output shapes agree (4 and 4).
  CHECK(fusible(p, 2, 3));
  // DEL has no shape and conflicts with nothing.
  CHECK(fusible(p, 0, 4));
  CHECK(fusible(p, 2, 4));
}

TEST_CASE("write-write partial overlap forbids fusion") {
  Program p = parse_program(
      "array W 6 u8\narray X 4 u8\n"
      "COPY X, 3\n"         // 0
      "COPY W[0:4], X\n"    // 1
      "COPY W[2:6], X\n");  // 2
  CHECK_FALSE(fusible(p, 1, 2));
  WspGraph g = build_wsp(p);
  CHECK(has_edge(g.forbid_edges, 1, 2));
}

TEST_CASE("graph over a three-op pipeline") {
  Program p = parse_program(
      "array A 4 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "DEL A\n");
  WspGraph g = build_wsp(p);
  CHECK(g.n == 3);
  CHECK(has_edge(g.dep_edges, 0, 1));
  CHECK(has_edge(g.dep_edges, 1, 2));
  CHECK(g.forbid_edges.empty());
  CHECK(g.has_forbid(0, 1) == false);
}

TEST_CASE("shifted stencil pair is forbidden") {
  Program p = parse_program(
      "array D 6 u8\narray R 4 u8\n"
      "COPY D, 0\n"            // 0
      "ADD R, D[0:4], D[1:5]\n"  // 1 ok: reads may overlap each other
      "COPY D[1:5], R\n");     // 2 writes a window 1 also reads
  WspGraph g = build_wsp(p);
  // 0 writes all of D; 1 reads two strict windows: overlap, not identical.
  CHECK(has_edge(g.forbid_edges, 0, 1));
  CHECK(has_edge(g.forbid_edges, 1, 2));
  CHECK(has_edge(g.dep_edges, 0, 1));
  CHECK(has_edge(g.dep_edges, 1, 2));
}

TEST_CASE("adjacency mirrors the edge lists") {
  Program p = parse_program(
      "array A 4 u8\narray B 4 u8\n"
      "COPY A, 0\n"
      "COPY B, A\n"
      "ADD B, B, A\n"
      "DEL A\n");
  WspGraph g = build_wsp(p);
  for (auto [a, b] : g.dep_edges) {
    CHECK(std::find(g.dep_out[a].begin(), g.dep_out[a].end(), b) !=
          g.dep_out[a].end());
    CHECK(std::find(g.dep_in[b].begin(), g.dep_in[b].end(), a) !=
          g.dep_in[b].end());
  }
  for (auto [a, b] : g.forbid_edges) {
    CHECK(g.has_forbid(a, b));
    CHECK(g.has_forbid(b, a));
  }
}

TEST_CASE("reference fixture graph shape") {
  Program p = parse_program(read_file(std::string(WSP_FIXTURE_DIR) +
                                      "/reference_pipeline.wsp"));
  WspGraph g = build_wsp(p);
  CHECK(g.n == 17);
  CHECK(p.bases.size() == 5);
  CHECK(p.view_count() == 9);
  CHECK(g.dep_edges.size() == 54);
  CHECK(g.forbid_edges.size() == 22);
}

TEST_CASE("multiway cut graph carries only terminal forbids") {
  MwcInstance m;
  m.n = 5;
  m.edges = {{0, 3, 2}, {1, 3, 1}, {2, 4, 4}, {3, 4, 5}};
  m.terminals = {0, 1, 2};
  WspGraph g = mwc_graph(m);
  CHECK(g.n == 5);
  CHECK(g.dep_edges.empty());
  CHECK(g.forbid_edges.size() == 3);
  CHECK(g.has_forbid(0, 1));
  CHECK(g.has_forbid(0, 2));
  CHECK(g.has_forbid(1, 2));
}
