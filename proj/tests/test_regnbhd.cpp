#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "gallery_specs.hpp"
#include "regnbhd/enclosing.hpp"

using namespace regnbhd;

TEST_CASE("g4a: regular neighbourhood of the single splitting of G_{3,2}") {
  auto g = fixtures::gpq(3, 2);
  auto sides = gallery::splitting_sides(g);
  RegnbhdOutput out = build_regnbhd(g, sides, {3, 4});
  REQUIRE(out.cert.stabilized);
  INFO("output gog: " << out.gog.gog.verts.size() << " vertices, " << out.gog.gog.edges.size() << " edges");
  // the bipartite answer: one V0 vertex carrying B, one V1 vertex carrying A,
  // a single edge carrying C (the B-side fibres of the tree are empty, so the
  // halfspace pairs slide across them)
  REQUIRE(out.gog.gog.verts.size() == 2);
  REQUIRE(out.gog.gog.edges.size() == 1);
  REQUIRE(is_minimal(out.gog.gog));
}

TEST_CASE("g1: subdivision law for a single splitting of F2 *_<a1> F2") {
  auto g = fixtures::g1();
  auto sides = gallery::splitting_sides(g);
  RegnbhdOutput out = build_regnbhd(g, sides, {3, 4});
  REQUIRE(out.cert.stabilized);
  // expected: A --C-- (C) --C-- B with the middle V0 vertex carrying C
  GraphOfGroups golden;
  int a = golden.add_vertex("A", VertexGroupDesc::free_group({"a1", "a2"}));
  int c = golden.add_vertex("C", VertexGroupDesc::inf_cyclic("c"));
  int b = golden.add_vertex("B", VertexGroupDesc::free_group({"b1", "b2"}));
  golden.add_edge("e1", a, c, VertexGroupDesc::inf_cyclic("x"), EdgeInclusion::onto_free_factor({0}),
                  EdgeInclusion::whole_of(golden.vgroup(c)));
  golden.add_edge("e2", c, b, VertexGroupDesc::inf_cyclic("y"), EdgeInclusion::whole_of(golden.vgroup(c)),
                  EdgeInclusion::onto_free_factor({0}));
  golden.bipartite = {1, 0, 1};
  INFO("got " << out.gog.gog.verts.size() << " vertices, " << out.gog.gog.edges.size() << " edges");
  for (size_t i = 0; i < out.gog.gog.verts.size(); ++i)
    INFO("vertex " << out.gog.gog.verts[i].name << ": " << group_str(out.gog.gog.vgroup(i)) << " bip "
                   << out.gog.gog.bipartite[i]);
  REQUIRE(gog_isomorphic(out.gog.gog, golden).isomorphic);
}
