#pragma once

// Element balls of pi1(gog) under the declared length convention, subgroup
// handles (a describable subgroup of a vertex group, conjugated by a path),
// and coset queries with canonical representatives.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "regnbhd/common.hpp"
#include "regnbhd/normal_form.hpp"

namespace regnbhd {

inline long long ball_cap_from_env(long long fallback = 2'000'000) {
  if (const char* s = std::getenv("REGNBHD_BALL_CAP")) {
    long long v = std::atoll(s);
    if (v > 0) return v;
  }
  return fallback;
}

/// All elements of pi1(gog, base) with length <= radius, sorted by
/// (length, structure).  Contains the identity and is closed under inversion.
inline std::vector<NormalForm> enumerate_ball(const Pi1& pi, int radius, long long cap = -1) {
  check(radius >= 0, Err::MalformedWord, "radius must be >= 0");
  if (cap < 0) cap = ball_cap_from_env();
  const GraphOfGroups& g = pi.gog();
  std::vector<NormalForm> out;

  std::function<void(NormalForm&, int)> extend = [&](NormalForm& chain, int budget) {
    int cur = pi.end_vertex(chain);
    if (cur == pi.base()) {
      enum_elements(g.vgroup(cur), budget, [&](const VWord& w) {
        NormalForm n = chain;
        n.tail = w;
        out.push_back(std::move(n));
        check(static_cast<long long>(out.size()) <= cap, Err::BallTooLarge, "element ball exceeds cap");
      });
    }
    if (budget < 1) return;
    for (auto [e, at_u] : g.incident(cur)) {
      const GogEdge& ed = g.edges[e];
      bool fwd = at_u;
      const EdgeInclusion& inc = fwd ? ed.inc_u : ed.inc_v;
      for (const VWord& rep : enum_left_coset_reps(g.vgroup(cur), inc.image, budget - 1)) {
        if (rep.empty() && !chain.steps.empty() && chain.steps.back().edge == e && chain.steps.back().fwd != fwd)
          continue;  // would backtrack
        chain.steps.push_back(Step{e, fwd, rep});
        extend(chain, budget - 1 - vlen(rep));
        chain.steps.pop_back();
      }
    }
  };

  NormalForm seed = pi.identity(pi.base());
  extend(seed, radius);
  std::sort(out.begin(), out.end(), [&](const NormalForm& a, const NormalForm& b) { return pi.less(a, b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Subgroup handles

/// H = conj . D . conj^-1 where D is a describable subgroup of the vertex
/// group at `vertex` and conj is a path base -> vertex.
struct SubgroupHandle {
  int vertex = 0;
  SubgroupDesc desc;
  NormalForm conj;  // path from base to vertex (identity when vertex == base)

  static SubgroupHandle at(const Pi1& pi, int vertex, SubgroupDesc d, NormalForm c) {
    check(pi.end_vertex(c) == vertex && c.start == pi.base(), Err::SchemaError,
          "subgroup conjugator must be a path from base to the subgroup's vertex");
    validate_subgroup(pi.gog().vgroup(vertex), d);
    return {vertex, std::move(d), std::move(c)};
  }
  static SubgroupHandle based(const Pi1& pi, int vertex, SubgroupDesc d) {
    check(vertex == pi.base(), Err::SchemaError, "use at() with an explicit path for non-base subgroups");
    return at(pi, vertex, std::move(d), pi.identity(vertex));
  }
};

inline bool sub_member(const Pi1& pi, const SubgroupHandle& h, const NormalForm& g) {
  NormalForm x = pi.mul(pi.mul(pi.inv(h.conj), g), h.conj);
  if (!x.steps.empty() || x.start != h.vertex) return false;
  return sub_contains(pi.gog().vgroup(h.vertex), h.desc, x.tail);
}

/// Conjugated handle g H g^-1.
inline SubgroupHandle sub_conjugate(const Pi1& pi, const NormalForm& g, const SubgroupHandle& h) {
  return {h.vertex, h.desc, pi.mul(g, h.conj)};
}

/// Generators of H as based elements (conjugated vertex words).
inline std::vector<NormalForm> sub_handle_generators(const Pi1& pi, const SubgroupHandle& h) {
  std::vector<NormalForm> out;
  for (const VWord& w : sub_generators(pi.gog().vgroup(h.vertex), h.desc))
    out.push_back(pi.mul(pi.mul(h.conj, pi.vertex_element(h.vertex, w)), pi.inv(h.conj)));
  return out;
}

namespace detail {

// Greedy prefix strip of D from a path y starting at D's vertex.  Exact when
// no element of D can flow through the first edge crossing after the strip;
// returns nullopt when such flow-through is possible.
inline std::optional<NormalForm> strip_prefix_exact(const Pi1& pi, const SubgroupDesc& d, NormalForm y) {
  const GraphOfGroups& g = pi.gog();
  const VertexGroupDesc& vg = g.vgroup(y.start);
  if (y.steps.empty()) {
    y.tail = factor_right(vg, d, y.tail).rep;
    return y;
  }
  if (d.kind == SubKind::Trivial) return y;
  RightFactor f = factor_right(vg, d, y.steps[0].rep);
  const GogEdge& e = g.edges[y.steps[0].edge];
  const EdgeInclusion& inc = y.steps[0].fwd ? e.inc_u : e.inc_v;
  if (inc.image.kind == SubKind::Trivial) {
    y.steps[0].rep = f.rep;
    return y;
  }
  if (d.kind == SubKind::CyclicPower && vg.kind == GroupKind::Free) {
    VWord d0 = vpow_gen(vg, d.gen, d.exponent);
    VWord w = vmul(vg, vmul(vg, vinv(vg, f.rep), d0), f.rep);
    // Some power of w lies in the image iff w is itself a power of a single
    // generator supported by the image (free factors and generator powers are
    // root-closed in a free group).
    bool single = !w.empty() && std::all_of(w.begin(), w.end(), [&](int32_t l) { return letter_gen(l) == letter_gen(w[0]); });
    bool flow = false;
    if (single) {
      int wg = letter_gen(w[0]);
      flow = (inc.image.kind == SubKind::Whole) || (inc.image.kind == SubKind::CyclicPower && inc.image.gen == wg) ||
             (inc.image.kind == SubKind::FreeFactor && in_basis(inc.image, wg));
    }
    if (!flow) {
      y.steps[0].rep = f.rep;
      return y;
    }
  }
  return std::nullopt;
}

// Enumerate subgroup elements with vertex-word length <= bound (free-factor
// subgroups of rank >= 2 grow exponentially; cap guards against abuse).
inline void enum_sub_elements(const VertexGroupDesc& g, const SubgroupDesc& d, int bound, long long cap,
                              const std::function<void(const VWord&)>& fn) {
  switch (d.kind) {
    case SubKind::Trivial:
      fn({});
      return;
    case SubKind::Whole:
      enum_elements(g, bound, fn);
      return;
    case SubKind::CyclicPower: {
      for (long long k = 0;; ++k) {
        VWord w = vpow_gen(g, d.gen, k * d.exponent);
        if (k > 0 && (vlen(w) > bound || vlen(w) == 0)) break;
        fn(w);
        if (k > 0) fn(vinv(g, w));
        if (g.kind == GroupKind::FiniteCyclic && k >= g.order) break;
      }
      return;
    }
    case SubKind::FreeFactor: {
      long long count = 0;
      std::function<void(VWord&)> rec = [&](VWord& w) {
        fn(w);
        check(++count <= cap, Err::BallTooLarge, "subgroup enumeration exceeded cap");
        if (vlen(w) >= bound) return;
        for (int b : d.basis)
          for (int32_t l : {static_cast<int32_t>(b + 1), static_cast<int32_t>(-(b + 1))}) {
            if (!w.empty() && w.back() == letter_inv(l)) continue;
            w.push_back(l);
            rec(w);
            w.pop_back();
          }
      };
      VWord w;
      rec(w);
      return;
    }
  }
}

}  // namespace detail

struct CosetQueryResult {
  bool in_subgroup = false;
  NormalForm representative;
};

enum class CosetSide { Left, Right };  // left coset gH, right coset Hg

/// Canonical representative of the coset of g: the (length, structure)-least
/// element.  Exact by structural stripping when possible, otherwise by
/// bounded subgroup enumeration.
inline CosetQueryResult coset_query(const Pi1& pi, const SubgroupHandle& h, const NormalForm& g, CosetSide side,
                                    long long search_cap = 200000) {
  check(g.start == pi.base() && pi.is_loop(g), Err::MalformedWord, "coset_query expects a based group element");
  if (sub_member(pi, h, g)) return {true, pi.identity(pi.base())};
  bool right = side == CosetSide::Right;

  // H.g = conj . D . (conj^-1 g); strip the D-prefix of y = conj^-1 g.
  // g.H = (g conj) . D . conj^-1; strip the D-suffix via y = (g conj)^-1.
  NormalForm y = right ? pi.mul(pi.inv(h.conj), g) : pi.inv(pi.mul(g, h.conj));
  if (auto stripped = detail::strip_prefix_exact(pi, h.desc, y)) {
    NormalForm rep = right ? pi.mul(h.conj, *stripped) : pi.mul(pi.inv(*stripped), pi.inv(h.conj));
    return {false, rep};
  }

  // Exact fallback: the least element of the coset is d.g (or g.d) with the
  // vertex length of d bounded by 2 len(g) + 2 len(conj) + 2.
  int bound = 2 * pi.length(g) + 2 * pi.length(h.conj) + 2;
  NormalForm best = g;
  detail::enum_sub_elements(pi.gog().vgroup(h.vertex), h.desc, bound, search_cap, [&](const VWord& w) {
    NormalForm d = pi.mul(pi.mul(h.conj, pi.vertex_element(h.vertex, w)), pi.inv(h.conj));
    NormalForm cand = right ? pi.mul(d, g) : pi.mul(g, d);
    if (pi.less(cand, best)) best = cand;
  });
  return {false, best};
}

}  // namespace regnbhd
