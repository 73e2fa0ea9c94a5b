#pragma once

// Graphs of groups over the supported vertex-group class.  Edge groups embed
// into their endpoint groups through inclusions whose images are describable
// subgroups; inclusions are invertible on their image, which is what the
// normal-form machinery needs to push syllables across edges.

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "regnbhd/common.hpp"
#include "regnbhd/groupcore.hpp"

namespace regnbhd {

/// Injective homomorphism from an edge group into an endpoint vertex group.
struct EdgeInclusion {
  SubgroupDesc image;             // image subgroup of the endpoint group
  std::vector<VWord> gen_images;  // image of each edge-group generator

  bool operator==(const EdgeInclusion&) const = default;

  static EdgeInclusion whole_of(const VertexGroupDesc& amb) {
    EdgeInclusion inc;
    inc.image = SubgroupDesc::whole();
    for (int i = 0; i < amb.ngens(); ++i) inc.gen_images.push_back({static_cast<int32_t>(i + 1)});
    return inc;
  }
  static EdgeInclusion onto_free_factor(std::vector<int> basis) {
    EdgeInclusion inc;
    inc.image = SubgroupDesc::free_factor(basis);
    for (int b : inc.image.basis) inc.gen_images.push_back({static_cast<int32_t>(b + 1)});
    return inc;
  }
  static EdgeInclusion onto_power(const VertexGroupDesc& amb, int gen, int m) {
    EdgeInclusion inc;
    inc.image = SubgroupDesc::cyclic_power(gen, m);
    inc.gen_images.push_back(vpow_gen(amb, gen, m));
    return inc;
  }
  static EdgeInclusion trivial() {
    EdgeInclusion inc;
    inc.image = SubgroupDesc::trivial();
    return inc;
  }
};

struct GogVertex {
  std::string name;
  VertexGroupDesc group;
};

struct GogEdge {
  std::string name;
  int u = 0, v = 0;  // endpoints (may coincide: loop)
  VertexGroupDesc group;
  EdgeInclusion inc_u, inc_v;
};

struct GraphOfGroups {
  std::vector<GogVertex> verts;
  std::vector<GogEdge> edges;
  std::vector<int> bipartite;  // per-vertex label 0 (V0) / 1 (V1); empty if unlabelled

  int add_vertex(std::string name, VertexGroupDesc g) {
    verts.push_back({std::move(name), std::move(g)});
    return static_cast<int>(verts.size()) - 1;
  }
  int add_edge(std::string name, int u, int v, VertexGroupDesc g, EdgeInclusion iu, EdgeInclusion iv) {
    edges.push_back({std::move(name), u, v, std::move(g), std::move(iu), std::move(iv)});
    return static_cast<int>(edges.size()) - 1;
  }

  const VertexGroupDesc& vgroup(int v) const { return verts.at(v).group; }

  std::vector<std::pair<int, bool>> incident(int v) const {
    // (edge id, true = v is the u-endpoint).  Loops appear twice.
    std::vector<std::pair<int, bool>> out;
    for (size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].u == v) out.push_back({static_cast<int>(e), true});
      if (edges[e].v == v) out.push_back({static_cast<int>(e), false});
    }
    return out;
  }

  bool connected() const {
    if (verts.empty()) return false;
    std::vector<bool> seen(verts.size(), false);
    std::vector<int> stack = {0};
    seen[0] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [e, at_u] : incident(v)) {
        int w = at_u ? edges[e].v : edges[e].u;
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }
};

namespace detail {

inline void validate_inclusion(const VertexGroupDesc& edge_g, const VertexGroupDesc& amb, const EdgeInclusion& inc) {
  validate_subgroup(amb, inc.image);
  check(static_cast<int>(inc.gen_images.size()) == edge_g.ngens(), Err::SchemaError,
        "inclusion must map every edge-group generator");
  switch (inc.image.kind) {
    case SubKind::Trivial:
      check(edge_g.trivial(), Err::SchemaError, "only a trivial edge group can include trivially");
      return;
    case SubKind::Whole:
      check(edge_g.kind == amb.kind && edge_g.ngens() == amb.ngens() && edge_g.order == amb.order && edge_g.rank == amb.rank,
            Err::SchemaError, "whole-image inclusion must match the ambient group");
      for (int i = 0; i < edge_g.ngens(); ++i)
        check(inc.gen_images[i] == VWord{static_cast<int32_t>(i + 1)}, Err::SchemaError,
              "whole-image inclusion must be the identity map");
      return;
    case SubKind::FreeFactor: {
      check((edge_g.kind == GroupKind::Free || edge_g.kind == GroupKind::InfiniteCyclic) &&
                edge_g.ngens() == static_cast<int>(inc.image.basis.size()),
            Err::SchemaError, "free-factor image needs a free edge group of matching rank");
      std::vector<int> seen;
      for (int i = 0; i < edge_g.ngens(); ++i) {
        const VWord& w = inc.gen_images[i];
        check(w.size() == 1, Err::SchemaError, "free-factor inclusion must send generators to (inverses of) generators");
        seen.push_back(letter_gen(w[0]));
      }
      std::sort(seen.begin(), seen.end());
      check(seen == inc.image.basis, Err::SchemaError, "free-factor inclusion images must cover the basis");
      return;
    }
    case SubKind::CyclicPower: {
      check(edge_g.ngens() == 1, Err::SchemaError, "cyclic-power image needs a cyclic edge group");
      check(inc.gen_images[0] == vpow_gen(amb, inc.image.gen, inc.image.exponent) ||
                inc.gen_images[0] == vpow_gen(amb, inc.image.gen, -static_cast<long long>(inc.image.exponent)),
            Err::SchemaError, "cyclic-power inclusion must send the generator to the declared power");
      if (amb.kind == GroupKind::FiniteCyclic) {
        long long d = std::gcd(static_cast<long long>(inc.image.exponent), static_cast<long long>(amb.order));
        long long image_order = amb.order / d;
        check(edge_g.kind == GroupKind::FiniteCyclic && edge_g.order == image_order, Err::SchemaError,
              "edge group order must equal the image order");
      } else {
        check(edge_g.kind == GroupKind::InfiniteCyclic || (edge_g.kind == GroupKind::Free && edge_g.rank == 1),
              Err::SchemaError, "edge group must be infinite cyclic");
      }
      return;
    }
  }
}

// Modular inverse for the finite-cyclic pullback.
inline long long mod_inverse(long long a, long long n) {
  long long t = 0, newt = 1, r = n, newr = ((a % n) + n) % n;
  while (newr != 0) {
    long long q = r / newr;
    t = std::exchange(newt, t - q * newt);
    r = std::exchange(newr, r - q * newr);
  }
  check(r == 1, Err::Internal, "mod_inverse of non-unit");
  return ((t % n) + n) % n;
}

}  // namespace detail

inline void validate_gog(const GraphOfGroups& g) {
  check(!g.verts.empty(), Err::SchemaError, "graph of groups needs at least one vertex");
  check(g.connected(), Err::SchemaError, "graph of groups must be connected");
  for (const GogEdge& e : g.edges) {
    check(e.u >= 0 && e.u < static_cast<int>(g.verts.size()) && e.v >= 0 && e.v < static_cast<int>(g.verts.size()),
          Err::SchemaError, "edge endpoint out of range");
    if (g.vgroup(e.u).computable()) detail::validate_inclusion(e.group, g.vgroup(e.u), e.inc_u);
    if (g.vgroup(e.v).computable()) detail::validate_inclusion(e.group, g.vgroup(e.v), e.inc_v);
  }
  if (!g.bipartite.empty()) {
    check(g.bipartite.size() == g.verts.size(), Err::SchemaError, "bipartite labels must cover all vertices");
    for (const GogEdge& e : g.edges)
      check(g.bipartite[e.u] != g.bipartite[e.v], Err::SchemaError, "bipartite edge joins two same-label vertices");
  }
}

/// Apply the inclusion to an edge-group word.
inline VWord inc_apply(const VertexGroupDesc& edge_g, const VertexGroupDesc& amb, const EdgeInclusion& inc,
                       const VWord& w) {
  VWord raw;
  for (int32_t l : w) {
    const VWord& img = inc.gen_images[letter_gen(l)];
    if (l > 0)
      raw.insert(raw.end(), img.begin(), img.end());
    else {
      VWord iv = vinv(amb, img);
      raw.insert(raw.end(), iv.begin(), iv.end());
    }
  }
  return vreduce(amb, raw);
}

/// Invert the inclusion on its image.  Precondition: w lies in inc.image.
inline VWord inc_pullback(const VertexGroupDesc& edge_g, const VertexGroupDesc& amb, const EdgeInclusion& inc,
                          const VWord& w) {
  check(sub_contains(amb, inc.image, w), Err::Internal, "pullback of element outside the image");
  switch (inc.image.kind) {
    case SubKind::Trivial:
      return {};
    case SubKind::Whole:
      return w;
    case SubKind::FreeFactor: {
      std::vector<int> back(amb.ngens(), 0);
      for (int i = 0; i < edge_g.ngens(); ++i) {
        int32_t img = inc.gen_images[i][0];
        back[letter_gen(img)] = img > 0 ? i + 1 : -(i + 1);
      }
      VWord out;
      for (int32_t l : w) {
        int32_t eg = back[letter_gen(l)];
        out.push_back(l > 0 ? eg : -eg);
      }
      return vreduce(edge_g, out);
    }
    case SubKind::CyclicPower: {
      long long m = vexp(inc.gen_images[0]);  // signed exponent of the image of the generator
      if (amb.kind == GroupKind::FiniteCyclic) {
        long long n = amb.order;
        long long d = std::gcd(std::llabs(m), static_cast<long long>(n));
        long long t = ((vexp(w) % n) + n) % n;
        check(t % d == 0, Err::Internal, "pullback outside cyclic image");
        long long nd = n / d;
        long long k = nd == 1 ? 0 : ((t / d) % nd) * detail::mod_inverse(m / d, nd) % nd;
        return vreduce(edge_g, vpow_gen(edge_g, 0, k));
      }
      long long t = vexp(w);
      check(m != 0 && t % m == 0, Err::Internal, "pullback outside cyclic image");
      return vpow_gen(edge_g, 0, t / m);
    }
  }
  fail(Err::Internal, "inc_pullback");
}

/// Move an element of one inclusion image to the other side of the edge.
inline VWord edge_transport(const GraphOfGroups& g, const GogEdge& e, bool from_u, const VWord& w) {
  const EdgeInclusion& in = from_u ? e.inc_u : e.inc_v;
  const EdgeInclusion& out = from_u ? e.inc_v : e.inc_u;
  const VertexGroupDesc& amb_in = from_u ? g.vgroup(e.u) : g.vgroup(e.v);
  const VertexGroupDesc& amb_out = from_u ? g.vgroup(e.v) : g.vgroup(e.u);
  return inc_apply(e.group, amb_out, out, inc_pullback(e.group, amb_in, in, w));
}

}  // namespace regnbhd
