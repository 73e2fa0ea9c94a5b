#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "regnbhd/pretree.hpp"

using namespace regnbhd;

namespace {

std::vector<std::pair<int, int>> random_tree(std::mt19937& rng, int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.push_back({static_cast<int>(rng() % i), i});
  return edges;
}

// Brute-force maximal cliques of the adjacency relation.
std::vector<std::vector<int>> clique_oracle(const Pretree& p) {
  std::vector<std::vector<int>> cliques;
  int n = p.n;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> mem;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) mem.push_back(i);
    if (mem.size() < 2) continue;
    bool clique = true;
    for (size_t i = 0; i < mem.size() && clique; ++i)
      for (size_t j = i + 1; j < mem.size() && clique; ++j) clique = adjacent(p, mem[i], mem[j]);
    if (!clique) continue;
    bool maximal = true;
    for (int w = 0; w < n && maximal; ++w) {
      if (mask & (1 << w)) continue;
      bool all = true;
      for (int m : mem) all = all && adjacent(p, w, m);
      maximal = !all;
    }
    if (maximal) cliques.push_back(mem);
  }
  std::sort(cliques.begin(), cliques.end());
  return cliques;
}

}  // namespace

TEST_CASE("axioms on a path pretree") {
  Pretree p;
  p.n = 3;
  p.add(0, 1, 2);
  REQUIRE(check_axioms(p).ok);
}

TEST_CASE("T2 violation is caught") {
  Pretree p;
  p.n = 3;
  p.add(0, 1, 2);
  p.add(0, 2, 1);
  auto rep = check_axioms(p);
  REQUIRE_FALSE(rep.ok);
  REQUIRE(rep.axiom == "T2");
}

TEST_CASE("T1 violation is caught") {
  Pretree p;
  p.n = 3;
  p.between.insert({0, 1, 2});  // missing the reversal
  auto rep = check_axioms(p);
  REQUIRE_FALSE(rep.ok);
  REQUIRE(rep.axiom == "T1");
}

TEST_CASE("T0 violation is caught") {
  Pretree p;
  p.n = 2;
  p.between.insert({0, 1, 0});
  REQUIRE(check_axioms(p).axiom == "T0");
}

TEST_CASE("pretree of a random 50-node tree passes the axioms") {
  std::mt19937 rng(42);
  auto edges = random_tree(rng, 50);
  Pretree p = vertex_pretree(50, edges);
  REQUIRE(check_axioms(p).ok);
  REQUIRE(is_discrete(p));
}

TEST_CASE("stars of a path") {
  Pretree p = vertex_pretree(3, {{0, 1}, {1, 2}});
  auto s = stars(p);
  REQUIRE(s == std::vector<std::vector<int>>{{0, 1}, {1, 2}});
}

TEST_CASE("stars of an antichain of mutually adjacent points") {
  Pretree p;  // no betweenness at all: every pair adjacent
  p.n = 5;
  auto s = stars(p);
  REQUIRE(s == std::vector<std::vector<int>>{{0, 1, 2, 3, 4}});
}

TEST_CASE("stars of K_{1,4} match the clique oracle") {
  Pretree p = vertex_pretree(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  REQUIRE(stars(p) == clique_oracle(p));
}

TEST_CASE("realize_tree subdivides: 3-edge path") {
  // T' = path on 4 vertices; T should be T' with every edge split in two
  Pretree p = vertex_pretree(4, {{0, 1}, {1, 2}, {2, 3}});
  RealizedTree t = realize_tree(p);
  REQUIRE(t.n_points == 4);
  REQUIRE(t.star_members.size() == 3);
  REQUIRE(t.edges.size() == 6);
  REQUIRE(points_betweenness(t).between == p.between);
}

TEST_CASE("single point realizes as a lone V0 vertex") {
  Pretree p;
  p.n = 1;
  RealizedTree t = realize_tree(p);
  REQUIRE(t.n_points == 1);
  REQUIRE(t.star_members.empty());
  REQUIRE(t.edges.empty());
}

TEST_CASE("subdivision law on random trees") {
  std::mt19937 rng(2024);
  for (int it = 0; it < 100; ++it) {
    int n = 2 + static_cast<int>(rng() % 59);
    auto edges = random_tree(rng, n);
    Pretree p = vertex_pretree(n, edges);
    RealizedTree t = realize_tree(p);
    // edge-doubling subdivision: one star per edge of the original tree,
    // hence twice as many edges, and betweenness among points is preserved
    REQUIRE(t.star_members.size() == edges.size());
    REQUIRE(t.edges.size() == 2 * edges.size());
    REQUIRE(t.vertices() == n + static_cast<int>(edges.size()));
    REQUIRE(points_betweenness(t).between == p.between);
  }
}

TEST_CASE("equivariance: betweenness-preserving permutations act on stars") {
  std::mt19937 rng(7);
  // a symmetric example: K_{1,4} has automorphisms permuting the leaves
  Pretree p = vertex_pretree(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  std::vector<int> perm = {0, 2, 3, 4, 1};  // rotate the leaves
  Pretree q;
  q.n = p.n;
  for (auto [x, y, z] : p.between) q.between.insert({perm[x], perm[y], perm[z]});
  REQUIRE(check_axioms(q).ok);
  auto s1 = stars(p);
  std::vector<std::vector<int>> mapped;
  for (auto s : s1) {
    for (int& x : s) x = perm[x];
    std::sort(s.begin(), s.end());
    mapped.push_back(s);
  }
  std::sort(mapped.begin(), mapped.end());
  REQUIRE(stars(q) == mapped);
  (void)rng;
}

TEST_CASE("realized tree is acyclic and connected with |E| = |V| - 1") {
  std::mt19937 rng(11);
  for (int it = 0; it < 30; ++it) {
    int n = 2 + static_cast<int>(rng() % 20);
    Pretree p = vertex_pretree(n, random_tree(rng, n));
    RealizedTree t = realize_tree(p);  // realize_tree itself verifies both
    REQUIRE(static_cast<int>(t.edges.size()) == t.vertices() - 1);
  }
}
