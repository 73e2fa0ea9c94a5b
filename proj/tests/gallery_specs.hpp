#pragma once

// Side specifications for the gallery presentations (shared by tests; the
// CLI-facing gallery lives in the library's scenario header).

#include "fixtures.hpp"
#include "regnbhd/window.hpp"

namespace gallery {

using namespace regnbhd;

// The standard halfspace of a one-edge presentation: the base edge oriented
// away from the base vertex (Y = the far side).
inline SideSpec splitting_halfspace(const Pi1& pi, int edge = 0, const std::string& name = "Z") {
  SideSpec s;
  s.name = name;
  NormalForm child = pi.identity(pi.base());
  child.steps.push_back(Step{edge, true, {}});
  const GogEdge& e = pi.gog().edges[edge];
  s.stab = SubgroupHandle{pi.base(), e.inc_u.image, pi.identity(pi.base())};
  s.terms.push_back({pi.identity(pi.base()), {child, true}});
  return s;
}

inline std::vector<SideSpec> splitting_sides(const GraphOfGroups& g) {
  Pi1 pi(g);
  return {splitting_halfspace(pi)};
}

// g2: Z2 = Z u d^2 Z u d^4 Z over 2D and Z3 = Z u d^3 Z over 3D, where
// Z is the base halfspace containing the A side and d = b1.
inline std::vector<SideSpec> g2_sides(const Pi1& pi) {
  NormalForm epath = pi.parse("e0", 0);
  auto dpow = [&](int k) { return pi.parse("e0.b1^" + std::to_string(k) + ".e0^-1", 0); };
  NormalForm child = pi.identity(0);
  child.steps.push_back(Step{0, true, {}});
  EdgeName toward_base{child, false};  // Y contains the base A vertex
  SideSpec z2, z3;
  z2.name = "Z2";
  z2.stab = SubgroupHandle::at(pi, 1, SubgroupDesc::cyclic_power(0, 2), epath);
  for (int k : {0, 2, 4}) z2.terms.push_back({dpow(k), toward_base});
  z3.name = "Z3";
  z3.stab = SubgroupHandle::at(pi, 1, SubgroupDesc::cyclic_power(0, 3), epath);
  for (int k : {0, 3}) z3.terms.push_back({dpow(k), toward_base});
  return {z2, z3};
}

// g3: the two layered sides sigma (over <a,b>) and tau (over <d,e>) of the
// star presentation, given by local splittings of L0 = <a,b,d,e>.
inline std::vector<SideSpec> g3_sides(const Pi1& pi) {
  SideSpec sigma, tau;
  sigma.name = "sigma";
  sigma.stab = SubgroupHandle::based(pi, 0, SubgroupDesc::free_factor({0, 1}));  // <a,b>
  sigma.local = LocalLayer{SplitData{SubgroupDesc::free_factor({0, 1, 2}),      // P = <a,b,d>
                                     SubgroupDesc::free_factor({0, 1, 3}),      // Q = <a,b,e>
                                     SubgroupDesc::free_factor({0, 1})},        // H = <a,b>
                           true};
  tau.name = "tau";
  tau.stab = SubgroupHandle::based(pi, 0, SubgroupDesc::free_factor({2, 3}));  // <d,e>
  tau.local = LocalLayer{SplitData{SubgroupDesc::free_factor({2, 3, 0}),       // <d,e,a>
                                   SubgroupDesc::free_factor({2, 3, 1}),       // <d,e,b>
                                   SubgroupDesc::free_factor({2, 3})},         // <d,e>
                         true};
  return {sigma, tau};
}

}  // namespace gallery
