#pragma once

// Bass-Serre normal forms for elements of the fundamental groupoid of a graph
// of groups: a path is written c1.e1.c2.e2...cn.en.x where each ci is the
// canonical left-coset representative of the edge image it crosses and x is a
// terminal vertex-group element.  Reduced forms are unique, so equality is
// structural.  Elements of pi1(gog, v) are the loops at v.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regnbhd/common.hpp"
#include "regnbhd/gog.hpp"
#include "regnbhd/groupcore.hpp"

namespace regnbhd {

struct Step {
  int edge = 0;
  bool fwd = true;  // true: traverse u -> v
  VWord rep;        // canonical left-coset rep of the crossed image, in the start-side group

  bool operator==(const Step&) const = default;
  bool operator<(const Step& o) const {
    if (edge != o.edge) return edge < o.edge;
    if (fwd != o.fwd) return fwd && !o.fwd;  // fwd sorts first
    return shortlex_less(rep, o.rep);
  }
};

/// A reduced groupoid path.  Group elements are loops (start == end vertex).
struct NormalForm {
  int start = 0;
  std::vector<Step> steps;
  VWord tail;

  bool operator==(const NormalForm&) const = default;

  bool is_identity() const { return steps.empty() && tail.empty(); }
};

class Pi1 {
 public:
  explicit Pi1(const GraphOfGroups& g, int base = 0) : gog_(&g), base_(base) {
    validate_gog(g);
    check(base >= 0 && base < static_cast<int>(g.verts.size()), Err::SchemaError, "base vertex out of range");
    for (const GogVertex& v : g.verts)
      check(v.group.computable(), Err::UndecidableForDesc, "pi1 machinery needs computable vertex groups");
  }

  const GraphOfGroups& gog() const { return *gog_; }
  int base() const { return base_; }

  int step_source(const Step& s) const { return s.fwd ? gog_->edges[s.edge].u : gog_->edges[s.edge].v; }
  int step_target(const Step& s) const { return s.fwd ? gog_->edges[s.edge].v : gog_->edges[s.edge].u; }

  int end_vertex(const NormalForm& n) const {
    return n.steps.empty() ? n.start : step_target(n.steps.back());
  }

  NormalForm identity(int at) const { return NormalForm{at, {}, {}}; }

  NormalForm vertex_element(int at, VWord w) const {
    return NormalForm{at, {}, vreduce(gog_->vgroup(at), std::move(w))};
  }

  /// Word length: vertex-syllable lengths plus one per edge traversal.
  int length(const NormalForm& n) const {
    int l = vlen(n.tail);
    for (const Step& s : n.steps) l += vlen(s.rep) + 1;
    return l;
  }

  // -- reduction -----------------------------------------------------------

  /// Append one edge traversal (entered with the extra vertex element `r`).
  void absorb_step(NormalForm& n, int edge, bool fwd, const VWord& r) const {
    const GogEdge& e = gog_->edges.at(edge);
    int cur = end_vertex(n);
    check(cur == (fwd ? e.u : e.v), Err::MalformedWord,
          "edge token " + e.name + " does not start at the current vertex");
    const VertexGroupDesc& gcur = gog_->vgroup(cur);
    const EdgeInclusion& inc_in = fwd ? e.inc_u : e.inc_v;
    VWord y = vmul(gcur, n.tail, r);
    LeftFactor f = factor_left(gcur, inc_in.image, y);
    if (f.rep.empty() && !n.steps.empty() && n.steps.back().edge == edge && n.steps.back().fwd != fwd) {
      // backtrack: e(!fwd) . y . e(fwd) with y in the image collapses
      VWord carried = edge_transport(*gog_, e, fwd, f.h);
      VWord c_prev = n.steps.back().rep;
      n.steps.pop_back();
      int back_at = end_vertex(n);
      n.tail = vmul(gog_->vgroup(back_at), c_prev, carried);
      return;
    }
    n.steps.push_back(Step{edge, fwd, f.rep});
    n.tail = edge_transport(*gog_, e, fwd, f.h);
  }

  void absorb_vertex(NormalForm& n, const VWord& w) const {
    n.tail = vmul(gog_->vgroup(end_vertex(n)), n.tail, w);
  }

  NormalForm mul(const NormalForm& a, const NormalForm& b) const {
    check(end_vertex(a) == b.start, Err::MixedPresentations, "path composition endpoint mismatch");
    NormalForm n = a;
    for (const Step& s : b.steps) absorb_step(n, s.edge, s.fwd, s.rep);
    absorb_vertex(n, b.tail);
    return n;
  }

  NormalForm inv(const NormalForm& a) const {
    NormalForm n = identity(end_vertex(a));
    n.tail = vinv(gog_->vgroup(end_vertex(a)), a.tail);
    for (auto it = a.steps.rbegin(); it != a.steps.rend(); ++it) {
      absorb_step(n, it->edge, !it->fwd, {});
      absorb_vertex(n, vinv(gog_->vgroup(step_source(*it)), it->rep));
    }
    return n;
  }

  NormalForm conj(const NormalForm& g, const NormalForm& x) const {  // g x g^-1
    return mul(mul(g, x), inv(g));
  }

  bool is_loop(const NormalForm& n) const { return end_vertex(n) == n.start; }

  // -- parsing and printing ------------------------------------------------

  struct Token {
    bool is_edge = false;
    int index = 0;  // vertex generator (global) or edge id
    bool fwd = true;
    long long exp = 1;
  };

  /// Parse a dotted word like "a1.e0.b1^-6.e0^-1" into a based element.
  /// Vertex letters are resolved by generator name at the current vertex;
  /// edge letters by edge name (direction inferred, ^-1 reverses).
  NormalForm parse(const std::string& text, int at) const {
    NormalForm n = identity(at);
    size_t i = 0;
    while (i < text.size()) {
      size_t j = text.find('.', i);
      if (j == std::string::npos) j = text.size();
      std::string tok = text.substr(i, j - i);
      i = j + 1;
      if (tok.empty() || tok == "1") continue;
      long long exp = 1;
      if (size_t c = tok.find('^'); c != std::string::npos) {
        exp = std::stoll(tok.substr(c + 1));
        tok = tok.substr(0, c);
      }
      int cur = end_vertex(n);
      const VertexGroupDesc& vg = gog_->vgroup(cur);
      auto gi = std::find(vg.gens.begin(), vg.gens.end(), tok);
      if (gi != vg.gens.end()) {
        absorb_vertex(n, vpow_gen(vg, static_cast<int>(gi - vg.gens.begin()), exp));
        continue;
      }
      int eid = -1;
      for (size_t e = 0; e < gog_->edges.size(); ++e)
        if (gog_->edges[e].name == tok) eid = static_cast<int>(e);
      check(eid >= 0, Err::UnknownGenerator, "unknown letter '" + tok + "'");
      check(exp == 1 || exp == -1, Err::MalformedWord, "edge letters take exponent +-1 only");
      const GogEdge& e = gog_->edges[eid];
      bool fwd = exp == 1;  // e: u -> v, e^-1: v -> u
      check(cur == (fwd ? e.u : e.v), Err::MalformedWord,
            "edge token " + tok + (fwd ? "" : "^-1") + " does not start at the current vertex");
      absorb_step(n, eid, fwd, {});
    }
    return n;
  }

  std::string str(const NormalForm& n) const {
    std::string s;
    for (const Step& st : n.steps) {
      const GogEdge& e = gog_->edges[st.edge];
      if (!st.rep.empty()) s += word_str(gog_->vgroup(step_source(st)), st.rep) + ".";
      s += e.name + (st.fwd ? "" : "^-1") + ".";
    }
    s += word_str(gog_->vgroup(end_vertex(n)), n.tail);
    return s;
  }

  /// Deterministic total order (length, then structure) for canonical choices.
  bool less(const NormalForm& a, const NormalForm& b) const {
    int la = length(a), lb = length(b);
    if (la != lb) return la < lb;
    if (a.steps.size() != b.steps.size()) return a.steps.size() < b.steps.size();
    for (size_t i = 0; i < a.steps.size(); ++i) {
      if (!(a.steps[i] == b.steps[i])) return a.steps[i] < b.steps[i];
    }
    return shortlex_less(a.tail, b.tail);
  }

 private:
  const GraphOfGroups* gog_;
  int base_;
};

inline std::size_t nf_hash(const NormalForm& n) {
  std::size_t h = std::hash<int>()(n.start);
  for (const Step& s : n.steps) {
    hash_mix(h, std::hash<int>()(s.edge * 2 + (s.fwd ? 1 : 0)));
    for (int32_t l : s.rep) hash_mix(h, std::hash<int32_t>()(l));
    hash_mix(h, 0x5bd1u);
  }
  for (int32_t l : n.tail) hash_mix(h, std::hash<int32_t>()(l));
  return h;
}

struct NfHash {
  std::size_t operator()(const NormalForm& n) const { return nf_hash(n); }
};

}  // namespace regnbhd
