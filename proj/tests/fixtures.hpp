#pragma once

// Shared gallery presentations for the test suites.

#include <random>

#include "regnbhd/ball.hpp"
#include "regnbhd/gog.hpp"
#include "regnbhd/normal_form.hpp"

namespace fixtures {

using namespace regnbhd;

// Single vertex F2, no edges.
inline GraphOfGroups f2() {
  GraphOfGroups g;
  g.add_vertex("F2", VertexGroupDesc::free_group({"a1", "a2"}));
  return g;
}

// G1: F2 *_{a1 = b1} F2 (edge group infinite cyclic, free-factor on both sides).
inline GraphOfGroups g1() {
  GraphOfGroups g;
  int a = g.add_vertex("A", VertexGroupDesc::free_group({"a1", "a2"}));
  int b = g.add_vertex("B", VertexGroupDesc::free_group({"b1", "b2"}));
  g.add_edge("e0", a, b, VertexGroupDesc::inf_cyclic("c"), EdgeInclusion::onto_free_factor({0}),
             EdgeInclusion::onto_free_factor({0}));
  return g;
}

// G2: F2 *_{a1 = b1^6} F2.
inline GraphOfGroups g2() {
  GraphOfGroups g;
  int a = g.add_vertex("A", VertexGroupDesc::free_group({"a1", "a2"}));
  int b = g.add_vertex("B", VertexGroupDesc::free_group({"b1", "b2"}));
  g.add_edge("e0", a, b, VertexGroupDesc::inf_cyclic("c"), EdgeInclusion::onto_free_factor({0}),
             EdgeInclusion::onto_power(g.vgroup(b), 0, 6));
  return g;
}

// G_{p,q}: Z *_{a^p = b^q} Z.
inline GraphOfGroups gpq(int p, int q) {
  GraphOfGroups g;
  int a = g.add_vertex("A", VertexGroupDesc::inf_cyclic("a"));
  int b = g.add_vertex("B", VertexGroupDesc::inf_cyclic("b"));
  g.add_edge("e0", a, b, VertexGroupDesc::inf_cyclic("c"), EdgeInclusion::onto_power(g.vgroup(a), 0, p),
             EdgeInclusion::onto_power(g.vgroup(b), 0, q));
  return g;
}

// G3: star with centre L0 = F4 = <a,b,d,e> and four leaves Gi = F3; the edge
// group Li is the free factor of L0 on two of its generators and a free
// factor of the leaf.
inline GraphOfGroups g3() {
  GraphOfGroups g;
  int l0 = g.add_vertex("L0", VertexGroupDesc::free_group({"a", "b", "d", "e"}));
  const std::vector<std::pair<int, int>> pairs = {{0, 2}, {2, 1}, {1, 3}, {3, 0}};  // (a,d),(d,b),(b,e),(e,a)
  for (int i = 0; i < 4; ++i) {
    std::string si = std::to_string(i + 1);
    int gi = g.add_vertex("G" + si, VertexGroupDesc::free_group({"p" + si, "q" + si, "r" + si}));
    std::vector<int> basis = {pairs[i].first, pairs[i].second};
    g.add_edge("e" + si, l0, gi, VertexGroupDesc::free_group({"x" + si, "y" + si}),
               EdgeInclusion::onto_free_factor(basis), EdgeInclusion::onto_free_factor({0, 1}));
  }
  return g;
}

// Random based word for property tests: a token string over the gog.
inline std::string random_word(const Pi1& pi, std::mt19937& rng, int len) {
  const GraphOfGroups& g = pi.gog();
  std::string s;
  int cur = pi.base();
  std::vector<std::pair<int, bool>> pending;  // edges to unwind so the word is a loop
  for (int i = 0; i < len; ++i) {
    const auto& vg = g.vgroup(cur);
    auto inc = g.incident(cur);
    bool do_edge = !inc.empty() && rng() % 3 == 0;
    if (do_edge) {
      auto [e, at_u] = inc[rng() % inc.size()];
      s += (s.empty() ? "" : ".") + g.edges[e].name + (at_u ? "" : "^-1");
      pending.push_back({e, at_u});
      cur = at_u ? g.edges[e].v : g.edges[e].u;
    } else if (vg.ngens() > 0) {
      int gen = static_cast<int>(rng() % vg.ngens());
      int exp = 1 + static_cast<int>(rng() % 2);
      if (rng() % 2) exp = -exp;
      s += (s.empty() ? "" : ".") + vg.gens[gen] + "^" + std::to_string(exp);
    }
  }
  while (!pending.empty()) {
    auto [e, was_fwd] = pending.back();
    pending.pop_back();
    if ((was_fwd ? g.edges[e].v : g.edges[e].u) == cur) {
      s += (s.empty() ? "" : ".") + g.edges[e].name + (was_fwd ? "^-1" : "");
      cur = was_fwd ? g.edges[e].u : g.edges[e].v;
    }
  }
  return s;
}

inline NormalForm random_element(const Pi1& pi, std::mt19937& rng, int len) {
  return pi.parse(random_word(pi, rng, len), pi.base());
}

}  // namespace fixtures
