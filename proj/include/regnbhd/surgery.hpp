#pragma once

// Surgery moves on graphs of groups: collapse, subdivide, redundant-vertex
// removal, refinement at a vertex, edge-splitting extraction, minimality,
// and structural isomorphism.

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "regnbhd/common.hpp"
#include "regnbhd/gog.hpp"

namespace regnbhd {

/// Is the inclusion onto the whole endpoint group?
inline bool inclusion_surjective(const VertexGroupDesc& amb, const EdgeInclusion& inc) {
  if (!amb.computable()) return false;
  switch (inc.image.kind) {
    case SubKind::Whole:
      return true;
    case SubKind::Trivial:
      return amb.trivial();
    case SubKind::FreeFactor:
      return static_cast<int>(inc.image.basis.size()) == amb.ngens();
    case SubKind::CyclicPower:
      return detail::eff_mod(amb, inc.image) == 1;
  }
  return false;
}

inline int valence(const GraphOfGroups& g, int v) {
  int n = 0;
  for (const GogEdge& e : g.edges) n += (e.u == v) + (e.v == v);
  return n;
}

inline bool has_loop_at(const GraphOfGroups& g, int v) {
  return std::any_of(g.edges.begin(), g.edges.end(), [v](const GogEdge& e) { return e.u == v && e.v == v; });
}

/// Iterated valence-one pruning test: minimal iff no valence-one vertex whose
/// unique incident edge includes onto the vertex group.
inline bool is_minimal(const GraphOfGroups& g) {
  if (g.verts.size() == 1 && g.edges.empty()) return true;
  for (int v = 0; v < static_cast<int>(g.verts.size()); ++v) {
    if (valence(g, v) != 1) continue;
    for (const GogEdge& e : g.edges) {
      if (e.u == v && inclusion_surjective(g.vgroup(v), e.inc_u)) return false;
      if (e.v == v && inclusion_surjective(g.vgroup(v), e.inc_v)) return false;
    }
  }
  return true;
}

/// Redundant: valence at most two, not on a loop, and every incident edge
/// group includes by an isomorphism.
inline bool is_redundant_vertex(const GraphOfGroups& g, int v) {
  if (has_loop_at(g, v) || valence(g, v) > 2 || valence(g, v) == 0) return false;
  for (const GogEdge& e : g.edges) {
    if (e.u == v && !inclusion_surjective(g.vgroup(v), e.inc_u)) return false;
    if (e.v == v && !inclusion_surjective(g.vgroup(v), e.inc_v)) return false;
  }
  return true;
}

// Try to express a list of generator images as a supported inclusion.
inline std::optional<EdgeInclusion> build_inclusion(const VertexGroupDesc& edge_g, const VertexGroupDesc& amb,
                                                    const std::vector<VWord>& images) {
  if (static_cast<int>(images.size()) != edge_g.ngens()) return std::nullopt;
  EdgeInclusion inc;
  inc.gen_images = images;
  if (edge_g.trivial()) {
    inc.image = SubgroupDesc::trivial();
    return inc;
  }
  bool singles = std::all_of(images.begin(), images.end(), [](const VWord& w) { return w.size() == 1; });
  if (singles && (edge_g.kind == GroupKind::Free || edge_g.kind == GroupKind::InfiniteCyclic)) {
    std::vector<int> basis;
    for (const VWord& w : images) basis.push_back(letter_gen(w[0]));
    std::vector<int> sorted = basis;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
      if (static_cast<int>(sorted.size()) == amb.ngens() && amb.kind == edge_g.kind && amb.order == edge_g.order &&
          std::all_of(images.begin(), images.end(), [&](const VWord& w) { return w[0] > 0; })) {
        bool ident = true;
        for (int i = 0; i < edge_g.ngens(); ++i) ident &= images[i] == VWord{static_cast<int32_t>(i + 1)};
        if (ident) {
          inc.image = SubgroupDesc::whole();
          return inc;
        }
      }
      inc.image = SubgroupDesc::free_factor(sorted);
      return inc;
    }
  }
  if (edge_g.ngens() == 1 && !images[0].empty()) {
    int gen = letter_gen(images[0][0]);
    bool single_gen = std::all_of(images[0].begin(), images[0].end(), [&](int32_t l) { return letter_gen(l) == gen; });
    if (single_gen) {
      long long m = std::llabs(vexp(images[0]));
      if (m >= 1) {
        inc.image = SubgroupDesc::cyclic_power(gen, static_cast<int>(m));
        // order compatibility is re-checked by validate_gog
        return inc;
      }
    }
  }
  return std::nullopt;
}

struct Subgraph {
  std::vector<int> edges;
  std::vector<int> vertices;  // isolated vertices to collapse as singleton components
};

namespace detail {

// Contraction of a component along edges that include onto a valence-one
// endpoint.  On success the component's pi1 is the surviving vertex group and
// every component vertex gets a portal: the chain of iso edges through which
// outside inclusions are rewritten.
struct Contraction {
  bool ok = false;
  int final_vertex = -1;  // index into the component gog
  // portal[v] = (edge group, inclusion at v (surjective), ambient at v,
  //              inclusion at keep, ambient at keep, keep vertex)
  struct Hop {
    VertexGroupDesc eg;
    EdgeInclusion at_dead;
    VertexGroupDesc amb_dead;
    EdgeInclusion at_keep;
    VertexGroupDesc amb_keep;
    int keep;
  };
  std::map<int, Hop> portal;
};

inline Contraction contract_component(const GraphOfGroups& comp) {
  Contraction c;
  std::vector<bool> alive(comp.verts.size(), true);
  std::vector<bool> edge_alive(comp.edges.size(), true);
  auto live_valence = [&](int v) {
    int n = 0;
    for (size_t e = 0; e < comp.edges.size(); ++e)
      if (edge_alive[e]) n += (comp.edges[e].u == v) + (comp.edges[e].v == v);
    return n;
  };
  for (;;) {
    bool progressed = false;
    for (size_t e = 0; e < comp.edges.size() && !progressed; ++e) {
      if (!edge_alive[e]) continue;
      const GogEdge& ed = comp.edges[e];
      if (ed.u == ed.v) continue;
      for (bool side_u : {true, false}) {
        int dead = side_u ? ed.u : ed.v;
        int keep = side_u ? ed.v : ed.u;
        if (live_valence(dead) != 1) continue;
        if (!inclusion_surjective(comp.vgroup(dead), side_u ? ed.inc_u : ed.inc_v)) continue;
        c.portal[dead] = {ed.group, side_u ? ed.inc_u : ed.inc_v, comp.vgroup(dead),
                          side_u ? ed.inc_v : ed.inc_u, comp.vgroup(keep), keep};
        alive[dead] = false;
        edge_alive[e] = false;
        progressed = true;
        break;
      }
    }
    if (!progressed) break;
  }
  int live = 0, last = -1;
  for (int v = 0; v < static_cast<int>(comp.verts.size()); ++v)
    if (alive[v]) {
      ++live;
      last = v;
    }
  bool edges_left = std::any_of(edge_alive.begin(), edge_alive.end(), [](bool b) { return b; });
  if (live == 1 && !edges_left) {
    c.ok = true;
    c.final_vertex = last;
  }
  return c;
}

// Rewrite an inclusion into component vertex v as an inclusion into the
// contraction's final vertex.  nullopt when the composite leaves the class.
inline std::optional<EdgeInclusion> portal_transport(const Contraction& c, const VertexGroupDesc& eg,
                                                     EdgeInclusion inc, int v) {
  while (v != c.final_vertex) {
    auto it = c.portal.find(v);
    if (it == c.portal.end()) return std::nullopt;
    const Contraction::Hop& h = it->second;
    std::vector<VWord> images;
    for (const VWord& w : inc.gen_images)
      images.push_back(inc_apply(h.eg, h.amb_keep, h.at_keep, inc_pullback(h.eg, h.amb_dead, h.at_dead, w)));
    auto built = build_inclusion(eg, h.amb_keep, images);
    if (!built) return std::nullopt;
    inc = *built;
    v = h.keep;
  }
  return inc;
}

inline std::string pi1_label(const GraphOfGroups& comp) {
  if (comp.verts.size() == 1 && comp.edges.empty()) return group_str(comp.verts[0].group);
  std::string s = "pi1(";
  for (size_t i = 0; i < comp.verts.size(); ++i) s += (i ? "," : "") + group_str(comp.verts[i].group);
  s += ";";
  for (size_t i = 0; i < comp.edges.size(); ++i) s += (i ? "," : "") + group_str(comp.edges[i].group);
  return s + ")";
}

}  // namespace detail

/// Collapse each component of the subgraph to a vertex carrying its pi1
/// (recognized where possible, symbolic composite otherwise).
inline GraphOfGroups collapse(const GraphOfGroups& g, const Subgraph& sub) {
  for (int e : sub.edges) check(e >= 0 && e < static_cast<int>(g.edges.size()), Err::NotASubgraph, "bad edge index");
  for (int v : sub.vertices) check(v >= 0 && v < static_cast<int>(g.verts.size()), Err::NotASubgraph, "bad vertex index");
  std::set<int> sub_edges(sub.edges.begin(), sub.edges.end());
  std::set<int> sub_verts(sub.vertices.begin(), sub.vertices.end());
  for (int e : sub_edges) {
    sub_verts.insert(g.edges[e].u);
    sub_verts.insert(g.edges[e].v);
  }
  // components of the subgraph
  std::map<int, int> comp_of;  // subgraph vertex -> component id
  int ncomp = 0;
  for (int v : sub_verts) {
    if (comp_of.count(v)) continue;
    std::vector<int> stack = {v};
    comp_of[v] = ncomp;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int e : sub_edges) {
        for (int y : {g.edges[e].u, g.edges[e].v}) {
          if ((g.edges[e].u == x || g.edges[e].v == x) && !comp_of.count(y)) {
            comp_of[y] = ncomp;
            stack.push_back(y);
          }
        }
      }
    }
    ++ncomp;
  }
  // build component sub-gogs
  std::vector<GraphOfGroups> comps(ncomp);
  std::vector<std::map<int, int>> cremap(ncomp);
  for (auto [v, c] : comp_of) cremap[c][v] = comps[c].add_vertex(g.verts[v].name, g.verts[v].group);
  for (int e : sub_edges) {
    int c = comp_of.at(g.edges[e].u);
    comps[c].add_edge(g.edges[e].name, cremap[c].at(g.edges[e].u), cremap[c].at(g.edges[e].v), g.edges[e].group,
                      g.edges[e].inc_u, g.edges[e].inc_v);
  }
  // Decide per component: contracted (pi1 carried by one original vertex,
  // outside inclusions rewritten through the contraction) or composite.
  std::vector<detail::Contraction> contr(ncomp);
  std::vector<bool> contracted(ncomp, false);
  for (int c = 0; c < ncomp; ++c) {
    contr[c] = detail::contract_component(comps[c]);
    contracted[c] = contr[c].ok;
  }
  // Tentatively rewrite outside inclusions; a failure reverts the component
  // to a composite label carrying the original inclusion.
  struct Rewritten {
    bool done = false;
    EdgeInclusion inc;
  };
  std::map<std::pair<int, bool>, Rewritten> rewritten;  // (edge id, at_u)
  for (size_t e = 0; e < g.edges.size(); ++e) {
    if (sub_edges.count(static_cast<int>(e))) continue;
    const GogEdge& ed = g.edges[e];
    for (bool at_u : {true, false}) {
      int v = at_u ? ed.u : ed.v;
      auto it = comp_of.find(v);
      if (it == comp_of.end()) continue;
      int c = it->second;
      if (!contracted[c]) continue;
      auto moved = detail::portal_transport(contr[c], ed.group, at_u ? ed.inc_u : ed.inc_v, cremap[c].at(v));
      if (moved)
        rewritten[{static_cast<int>(e), at_u}] = {true, *moved};
      else
        contracted[c] = false;
    }
  }
  GraphOfGroups out;
  std::vector<int> vmap(g.verts.size(), -1);
  std::vector<int> comp_vertex(ncomp, -1);
  for (int v = 0; v < static_cast<int>(g.verts.size()); ++v) {
    auto it = comp_of.find(v);
    if (it == comp_of.end()) {
      vmap[v] = out.add_vertex(g.verts[v].name, g.verts[v].group);
    } else if (comp_vertex[it->second] < 0) {
      int c = it->second;
      const GraphOfGroups& cg = comps[c];
      VertexGroupDesc vg =
          contracted[c]
              ? cg.verts[contr[c].final_vertex].group
              : VertexGroupDesc::composite(detail::pi1_label(cg), std::make_shared<const GraphOfGroups>(cg));
      std::string name = contracted[c] ? cg.verts[contr[c].final_vertex].name : "K" + std::to_string(c);
      comp_vertex[c] = out.add_vertex(name, vg);
    }
    if (it != comp_of.end()) vmap[v] = comp_vertex[it->second];
  }
  for (size_t e = 0; e < g.edges.size(); ++e) {
    if (sub_edges.count(static_cast<int>(e))) continue;
    const GogEdge& ed = g.edges[e];
    EdgeInclusion iu = ed.inc_u, iv = ed.inc_v;
    auto cu = comp_of.find(ed.u);
    auto cv = comp_of.find(ed.v);
    if (cu != comp_of.end() && contracted[cu->second]) iu = rewritten.at({static_cast<int>(e), true}).inc;
    if (cv != comp_of.end() && contracted[cv->second]) iv = rewritten.at({static_cast<int>(e), false}).inc;
    out.add_edge(ed.name, vmap[ed.u], vmap[ed.v], ed.group, iu, iv);
  }
  check(out.connected(), Err::Internal, "collapse disconnected the graph");
  return out;
}

inline GraphOfGroups subdivide(const GraphOfGroups& g, int edge) {
  check(edge >= 0 && edge < static_cast<int>(g.edges.size()), Err::NotASubgraph, "bad edge index");
  GraphOfGroups out = g;
  GogEdge e = out.edges[edge];
  int w = out.add_vertex(e.name + "_mid", e.group);
  out.edges.erase(out.edges.begin() + edge);
  out.add_edge(e.name + "_a", e.u, w, e.group, e.inc_u, EdgeInclusion::whole_of(e.group));
  out.add_edge(e.name + "_b", w, e.v, e.group, EdgeInclusion::whole_of(e.group), e.inc_v);
  if (!out.bipartite.empty()) out.bipartite.push_back(-1);
  return out;
}

/// Compose inclusion f (edge -> G(v), an isomorphism onto G(v)) with g (edge2 <- G(v) -> G(b)):
/// returns the inclusion of f's edge group into G(b) through the redundant vertex.
inline EdgeInclusion compose_through(const VertexGroupDesc& eg1, const VertexGroupDesc& mid, const EdgeInclusion& into_mid,
                                     const VertexGroupDesc& eg2, const EdgeInclusion& from_mid_image,
                                     const VertexGroupDesc& target, const EdgeInclusion& into_target) {
  std::vector<VWord> images;
  for (int i = 0; i < eg1.ngens(); ++i) {
    VWord at_mid = into_mid.gen_images[i];
    VWord in_e2 = inc_pullback(eg2, mid, from_mid_image, at_mid);
    images.push_back(inc_apply(eg2, target, into_target, in_e2));
  }
  auto inc = build_inclusion(eg1, target, images);
  check(inc.has_value(), Err::Internal, "composite inclusion left the supported class");
  return *inc;
}

/// Amalgamate away redundant vertices until none remain.
inline GraphOfGroups remove_redundant(const GraphOfGroups& g) {
  GraphOfGroups cur = g;
  for (;;) {
    int v = -1;
    for (int i = 0; i < static_cast<int>(cur.verts.size()); ++i)
      if (is_redundant_vertex(cur, i)) {
        v = i;
        break;
      }
    if (v < 0) return cur;
    std::vector<std::pair<int, bool>> inc = cur.incident(v);
    if (inc.size() == 1) {
      // valence one with iso inclusion: the edge carries no information
      auto [e, at_u] = inc[0];
      GraphOfGroups out;
      std::vector<int> remap(cur.verts.size(), -1);
      for (int i = 0; i < static_cast<int>(cur.verts.size()); ++i)
        if (i != v) remap[i] = out.add_vertex(cur.verts[i].name, cur.verts[i].group);
      for (int j = 0; j < static_cast<int>(cur.edges.size()); ++j) {
        if (j == e) continue;
        const GogEdge& f = cur.edges[j];
        out.add_edge(f.name, remap[f.u], remap[f.v], f.group, f.inc_u, f.inc_v);
      }
      cur = out;
      continue;
    }
    auto [e1, v_is_u1] = inc[0];
    auto [e2, v_is_u2] = inc[1];
    const GogEdge f1 = cur.edges[e1];
    const GogEdge f2 = cur.edges[e2];
    int a = v_is_u1 ? f1.v : f1.u;
    int b = v_is_u2 ? f2.v : f2.u;
    const EdgeInclusion& f1_at_v = v_is_u1 ? f1.inc_u : f1.inc_v;
    const EdgeInclusion& f1_at_a = v_is_u1 ? f1.inc_v : f1.inc_u;
    const EdgeInclusion& f2_at_v = v_is_u2 ? f2.inc_u : f2.inc_v;
    const EdgeInclusion& f2_at_b = v_is_u2 ? f2.inc_v : f2.inc_u;
    EdgeInclusion new_b = compose_through(f1.group, cur.vgroup(v), f1_at_v, f2.group, f2_at_v, cur.vgroup(b), f2_at_b);
    GraphOfGroups out;
    std::vector<int> remap(cur.verts.size(), -1);
    for (int i = 0; i < static_cast<int>(cur.verts.size()); ++i)
      if (i != v) remap[i] = out.add_vertex(cur.verts[i].name, cur.verts[i].group);
    out.add_edge(f1.name, remap[a], remap[b], f1.group, f1_at_a, new_b);
    for (int j = 0; j < static_cast<int>(cur.edges.size()); ++j) {
      if (j == e1 || j == e2) continue;
      const GogEdge& f = cur.edges[j];
      out.add_edge(f.name, remap[f.u], remap[f.v], f.group, f.inc_u, f.inc_v);
    }
    cur = out;
  }
}

// -- refinement --------------------------------------------------------------

/// One-edge splitting of a vertex group, given by subgroup descriptors.
struct SplitData {
  SubgroupDesc left, right, edge;
};

struct RefineResult {
  GraphOfGroups gog;
  int new_edge = -1;
  int v_left = -1, v_right = -1;
  bool creates_redundant = false;
};

namespace detail {

inline VertexGroupDesc desc_as_group(const VertexGroupDesc& amb, const SubgroupDesc& d) {
  switch (d.kind) {
    case SubKind::Whole:
      return amb;
    case SubKind::Trivial:
      return VertexGroupDesc::free_group({});
    case SubKind::FreeFactor: {
      std::vector<std::string> names;
      for (int b : d.basis) names.push_back(amb.gens[b]);
      if (names.size() == 1 && amb.kind != GroupKind::FiniteCyclic) return VertexGroupDesc::inf_cyclic(names[0]);
      if (amb.kind == GroupKind::FiniteCyclic) return amb;
      return VertexGroupDesc::free_group(names);
    }
    case SubKind::CyclicPower: {
      long long m = eff_mod(amb, d);
      std::string name = amb.gens[d.gen] + "^" + std::to_string(m);
      if (amb.kind == GroupKind::FiniteCyclic) return VertexGroupDesc::fin_cyclic(name, static_cast<int>(amb.order / m));
      return VertexGroupDesc::inf_cyclic(name);
    }
  }
  fail(Err::Internal, "desc_as_group");
}

// Rewrite a subgroup descriptor of the ambient relative to an enclosing
// subgroup L (viewed as a group in its own right).
inline SubgroupDesc desc_relative(const VertexGroupDesc& amb, const SubgroupDesc& L, const SubgroupDesc& d) {
  check(sub_contains_sub(amb, L, d), Err::Internal, "desc_relative: not contained");
  switch (L.kind) {
    case SubKind::Whole:
      return d;
    case SubKind::Trivial:
      return SubgroupDesc::trivial();
    case SubKind::FreeFactor: {
      auto pos = [&](int gen) {
        auto it = std::lower_bound(L.basis.begin(), L.basis.end(), gen);
        return static_cast<int>(it - L.basis.begin());
      };
      if (d.kind == SubKind::Trivial) return d;
      if (d.kind == SubKind::FreeFactor) {
        std::vector<int> nb;
        for (int b : d.basis) nb.push_back(pos(b));
        if (nb.size() == L.basis.size()) return SubgroupDesc::whole();
        return SubgroupDesc::free_factor(nb);
      }
      if (d.kind == SubKind::CyclicPower) return SubgroupDesc::cyclic_power(pos(d.gen), d.exponent);
      return SubgroupDesc::whole();  // d Whole means L == whole, handled above
    }
    case SubKind::CyclicPower: {
      if (d.kind == SubKind::Trivial) return d;
      check(d.kind == SubKind::CyclicPower && d.gen == L.gen, Err::Internal, "desc_relative: cyclic mismatch");
      long long k = eff_mod(amb, L), m = eff_mod(amb, d);
      check(m % k == 0, Err::Internal, "desc_relative: exponent not divisible");
      if (m == k) return SubgroupDesc::whole();
      return SubgroupDesc::cyclic_power(0, static_cast<int>(m / k));
    }
  }
  fail(Err::Internal, "desc_relative");
}

// Rewrite a word of the ambient lying in L as a word of L-as-group.
inline VWord word_relative(const VertexGroupDesc& amb, const SubgroupDesc& L, const VWord& w) {
  switch (L.kind) {
    case SubKind::Whole:
      return w;
    case SubKind::Trivial:
      return {};
    case SubKind::FreeFactor: {
      VWord out;
      for (int32_t l : w) {
        auto it = std::lower_bound(L.basis.begin(), L.basis.end(), letter_gen(l));
        int p = static_cast<int>(it - L.basis.begin());
        out.push_back(l > 0 ? p + 1 : -(p + 1));
      }
      return out;
    }
    case SubKind::CyclicPower: {
      long long m = eff_mod(amb, L);
      long long t = vexp(w);
      check(t % m == 0, Err::Internal, "word_relative: outside cyclic subgroup");
      VWord out;
      long long k = t / m;
      for (long long i = 0; i < std::llabs(k); ++i) out.push_back(k > 0 ? 1 : -1);
      return out;
    }
  }
  fail(Err::Internal, "word_relative");
}

}  // namespace detail

/// Refine at a vertex: replace v by the one-edge splitting of its group, with
/// each incident edge re-anchored to the side containing its image.
inline RefineResult refine_at_vertex(const GraphOfGroups& g, int v, const SplitData& sd) {
  const VertexGroupDesc& amb = g.vgroup(v);
  check(amb.computable(), Err::UndecidableForDesc, "cannot refine a composite vertex");
  validate_subgroup(amb, sd.left);
  validate_subgroup(amb, sd.right);
  validate_subgroup(amb, sd.edge);
  check(sub_contains_sub(amb, sd.left, sd.edge) && sub_contains_sub(amb, sd.right, sd.edge), Err::SchemaError,
        "split edge group must lie in both sides");

  RefineResult res;
  GraphOfGroups& out = res.gog;
  std::vector<int> vmap(g.verts.size(), -1);
  for (int i = 0; i < static_cast<int>(g.verts.size()); ++i) {
    if (i == v) continue;
    vmap[i] = out.add_vertex(g.verts[i].name, g.verts[i].group);
  }
  VertexGroupDesc gl = detail::desc_as_group(amb, sd.left);
  VertexGroupDesc gr = detail::desc_as_group(amb, sd.right);
  res.v_left = out.add_vertex(g.verts[v].name + "_L", gl);
  res.v_right = out.add_vertex(g.verts[v].name + "_R", gr);

  for (size_t e = 0; e < g.edges.size(); ++e) {
    GogEdge ed = g.edges[e];
    auto re_anchor = [&](const EdgeInclusion& inc) -> std::pair<int, EdgeInclusion> {
      bool in_left = sub_contains_sub(amb, sd.left, inc.image);
      bool in_right = sub_contains_sub(amb, sd.right, inc.image);
      check(in_left || in_right, Err::EdgeGroupNotElliptic,
            "incident edge group lies in neither side of the splitting");
      const SubgroupDesc& side = in_left ? sd.left : sd.right;
      EdgeInclusion ni;
      ni.image = detail::desc_relative(amb, side, inc.image);
      for (const VWord& w : inc.gen_images) ni.gen_images.push_back(detail::word_relative(amb, side, w));
      return {in_left ? res.v_left : res.v_right, ni};
    };
    if (ed.u == v) {
      auto [nv, ni] = re_anchor(ed.inc_u);
      ed.u = nv;
      ed.inc_u = ni;
    } else {
      ed.u = vmap[ed.u];
    }
    if (ed.v == v) {
      auto [nv, ni] = re_anchor(ed.inc_v);
      ed.v = nv;
      ed.inc_v = ni;
    } else {
      ed.v = vmap[ed.v];
    }
    out.edges.push_back(ed);
  }
  VertexGroupDesc eg = detail::desc_as_group(amb, sd.edge);
  EdgeInclusion inc_l, inc_r;
  inc_l.image = detail::desc_relative(amb, sd.left, sd.edge);
  inc_r.image = detail::desc_relative(amb, sd.right, sd.edge);
  for (const VWord& w : sub_generators(amb, sd.edge)) {
    inc_l.gen_images.push_back(detail::word_relative(amb, sd.left, w));
    inc_r.gen_images.push_back(detail::word_relative(amb, sd.right, w));
  }
  res.new_edge = out.add_edge(g.verts[v].name + "_split", res.v_left, res.v_right, eg, inc_l, inc_r);
  validate_gog(out);
  for (int i = 0; i < static_cast<int>(out.verts.size()); ++i) res.creates_redundant |= is_redundant_vertex(out, i);
  return res;
}

/// One-edge graph of groups obtained by collapsing the complement of the
/// interior of an edge.
inline GraphOfGroups edge_splitting(const GraphOfGroups& g, int edge) {
  check(is_minimal(g), Err::NotMinimal, "edge splittings are extracted from minimal graphs only");
  Subgraph sub;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
    if (e != edge) sub.edges.push_back(e);
  for (int v = 0; v < static_cast<int>(g.verts.size()); ++v) sub.vertices.push_back(v);
  return collapse(g, sub);
}

// -- isomorphism --------------------------------------------------------------

namespace detail {

inline std::string vertex_sig(const GraphOfGroups& g, int v, bool use_bip) {
  const VertexGroupDesc& d = g.vgroup(v);
  std::string s;
  switch (d.kind) {
    case GroupKind::Free:
      s = "F" + std::to_string(d.rank);
      break;
    case GroupKind::InfiniteCyclic:
      s = "Z";
      break;
    case GroupKind::FiniteCyclic:
      s = "Z/" + std::to_string(d.order);
      break;
    case GroupKind::Composite:
      s = "C[" + d.display + "]";
      break;
  }
  s += "|d" + std::to_string(valence(g, v));
  if (use_bip) s += "|b" + std::to_string(g.bipartite[v]);
  return s;
}

inline std::string inc_sig(const VertexGroupDesc& amb, const EdgeInclusion& inc) {
  switch (inc.image.kind) {
    case SubKind::Trivial:
      return "t";
    case SubKind::Whole:
      return "w";
    case SubKind::FreeFactor:
      return "f" + std::to_string(inc.image.basis.size()) + (inclusion_surjective(amb, inc) ? "s" : "");
    case SubKind::CyclicPower:
      return "p" + std::to_string(amb.computable() ? eff_mod(amb, inc.image) : inc.image.exponent);
  }
  return "?";
}

inline std::string edge_sig(const GraphOfGroups& g, const GogEdge& e) {
  std::string ga;
  switch (e.group.kind) {
    case GroupKind::Free:
      ga = "F" + std::to_string(e.group.rank);
      break;
    case GroupKind::InfiniteCyclic:
      ga = "Z";
      break;
    case GroupKind::FiniteCyclic:
      ga = "Z/" + std::to_string(e.group.order);
      break;
    case GroupKind::Composite:
      ga = "C[" + e.group.display + "]";
      break;
  }
  std::string a = inc_sig(g.vgroup(e.u), e.inc_u), b = inc_sig(g.vgroup(e.v), e.inc_v);
  return ga + ":" + a + ":" + b;  // oriented; matching tries both orientations
}

inline std::string edge_sig_rev(const GraphOfGroups& g, const GogEdge& e) {
  GogEdge r = e;
  std::swap(r.u, r.v);
  std::swap(r.inc_u, r.inc_v);
  return edge_sig(g, r);
}

}  // namespace detail

struct GogIso {
  bool isomorphic = false;
  std::vector<int> vertex_map;  // g1 vertex -> g2 vertex
};

/// Structural isomorphism up to generator renaming (and bipartite labels when
/// both sides carry them).
inline GogIso gog_isomorphic(const GraphOfGroups& g1, const GraphOfGroups& g2) {
  if (g1.verts.size() != g2.verts.size() || g1.edges.size() != g2.edges.size()) return {};
  bool use_bip = !g1.bipartite.empty() && !g2.bipartite.empty();
  std::vector<std::string> sig1, sig2;
  for (int v = 0; v < static_cast<int>(g1.verts.size()); ++v) sig1.push_back(detail::vertex_sig(g1, v, use_bip));
  for (int v = 0; v < static_cast<int>(g2.verts.size()); ++v) sig2.push_back(detail::vertex_sig(g2, v, use_bip));
  {
    auto m1 = sig1, m2 = sig2;
    std::sort(m1.begin(), m1.end());
    std::sort(m2.begin(), m2.end());
    if (m1 != m2) return {};
  }
  int n = static_cast<int>(g1.verts.size());
  std::vector<int> map(n, -1), used(n, 0);

  // adjacency with edge signatures
  auto edges_between = [](const GraphOfGroups& g, int a, int b) {
    std::vector<std::string> sigs;
    for (const GogEdge& e : g.edges) {
      if (e.u == a && e.v == b) sigs.push_back(detail::edge_sig(g, e));
      if (e.v == a && e.u == b && !(a == b)) sigs.push_back(detail::edge_sig_rev(g, e));
    }
    std::sort(sigs.begin(), sigs.end());
    return sigs;
  };

  std::function<bool(int)> rec = [&](int v) -> bool {
    if (v == n) return true;
    for (int w = 0; w < n; ++w) {
      if (used[w] || sig1[v] != sig2[w]) continue;
      bool ok = true;
      for (int p = 0; p < v && ok; ++p) ok = edges_between(g1, p, v) == edges_between(g2, map[p], w);
      ok = ok && edges_between(g1, v, v) == edges_between(g2, w, w);
      if (!ok) continue;
      map[v] = w;
      used[w] = 1;
      if (rec(v + 1)) return true;
      used[w] = 0;
      map[v] = -1;
    }
    return false;
  };
  if (!rec(0)) return {};
  return {true, map};
}

}  // namespace regnbhd
