#pragma once

// Finite balls of the Bass-Serre tree of a graph of groups.  Vertices are
// canonical coset chains (step sequences of normal forms); the G-action is by
// left multiplication on chains and is partial: it is defined exactly when
// the image chain lies inside the ball.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "regnbhd/ball.hpp"
#include "regnbhd/common.hpp"
#include "regnbhd/normal_form.hpp"

namespace regnbhd {

/// Oriented edge of a tree ball: the unoriented edge is (parent(child), child);
/// toward_child selects the subtree at child as the halfspace Y_s.
struct HalfspaceRef {
  int child = 0;
  bool toward_child = true;

  bool operator==(const HalfspaceRef&) const = default;
  HalfspaceRef reversed() const { return {child, !toward_child}; }
};

struct TreeBallOptions {
  int step_radius = 4;
  int weight_cap = -1;      // total chain weight (rep lengths + 1 per step); -1 = uncapped
  long long vertex_cap = -1;  // defaults to REGNBHD_BALL_CAP
  bool allow_infinite_index = true;
};

enum class EdgeOrder { Equal, LessEq, GreaterEq, OppositeNested, Incomparable };

class TreeBall {
 public:
  struct Vertex {
    NormalForm chain;  // steps-only normal form from the base
    int gog_vertex = 0;
    int parent = -1;   // tree vertex id, -1 for the root
    int depth = 0;
    int weight = 0;
    bool complete = true;  // every neighbouring coset enumerated within the caps
    int tin = 0, tout = 0;
    std::vector<int> children;
  };

  TreeBall(const Pi1& pi, TreeBallOptions opt) : pi_(&pi), opt_(opt) {
    long long cap = opt_.vertex_cap > 0 ? opt_.vertex_cap : ball_cap_from_env();
    const GraphOfGroups& g = pi.gog();
    if (!opt_.allow_infinite_index && opt_.weight_cap < 0 && opt_.step_radius >= 1) {
      for (const GogEdge& e : g.edges) {
        check(sub_index(g.vgroup(e.u), e.inc_u.image).has_value() &&
                  sub_index(g.vgroup(e.v), e.inc_v.image).has_value(),
              Err::InfiniteValence, "edge inclusion of infinite index needs a configured cap");
      }
    }
    Vertex root;
    root.chain = pi.identity(pi.base());
    root.gog_vertex = pi.base();
    verts_.push_back(root);
    index_[root.chain] = 0;
    // breadth-first expansion
    for (size_t qi = 0; qi < verts_.size(); ++qi) {
      Vertex v = verts_[qi];  // copy: verts_ may reallocate
      if (v.depth >= opt_.step_radius) {
        verts_[qi].complete = false;
        continue;
      }
      int budget = opt_.weight_cap < 0 ? -1 : opt_.weight_cap - v.weight - 1;
      if (opt_.weight_cap >= 0 && budget < 0) {
        verts_[qi].complete = false;
        continue;
      }
      bool complete = true;
      for (auto [e, at_u] : g.incident(v.gog_vertex)) {
        const GogEdge& ed = g.edges[e];
        bool fwd = at_u;
        const EdgeInclusion& inc = fwd ? ed.inc_u : ed.inc_v;
        auto idx = sub_index(g.vgroup(v.gog_vertex), inc.image);
        std::vector<VWord> reps;
        if (budget >= 0) {
          reps = enum_left_coset_reps(g.vgroup(v.gog_vertex), inc.image, budget);
          if (!idx.has_value() || static_cast<long long>(reps.size()) < *idx) complete = false;
        } else {
          // uncapped mode: all edge inclusions have finite index (checked above)
          int len = 2;
          for (;;) {
            reps = enum_left_coset_reps(g.vgroup(v.gog_vertex), inc.image, len);
            if (static_cast<long long>(reps.size()) >= *idx) break;
            check(len < 1 << 20, Err::Internal, "transversal enumeration did not terminate");
            len *= 2;
          }
        }
        for (const VWord& rep : reps) {
          if (rep.empty() && !v.chain.steps.empty() && v.chain.steps.back().edge == e &&
              v.chain.steps.back().fwd != fwd)
            continue;  // the edge back toward the parent
          Vertex c;
          c.chain = v.chain;
          c.chain.steps.push_back(Step{e, fwd, rep});
          c.gog_vertex = fwd ? ed.v : ed.u;
          c.parent = static_cast<int>(qi);
          c.depth = v.depth + 1;
          c.weight = v.weight + 1 + vlen(rep);
          check(static_cast<long long>(verts_.size()) < cap, Err::BallTooLarge, "tree ball exceeds cap");
          int id = static_cast<int>(verts_.size());
          verts_.push_back(std::move(c));
          index_[verts_[id].chain] = id;
          verts_[qi].children.push_back(id);
        }
      }
      if (!complete) verts_[qi].complete = false;
    }
    recompute_euler();
  }

  /// Intern a chain (and its ancestors) into the ball, marking inserted
  /// vertices incomplete.  Callers must recompute_euler() before relying on
  /// subtree tests again.
  int ensure_chain(const NormalForm& chain) {
    auto have = find(chain);
    if (have) return *have;
    NormalForm walk = pi_->identity(pi_->base());
    int cur = 0;
    for (const Step& st : chain.steps) {
      walk.steps.push_back(st);
      auto id = find(walk);
      if (id) {
        cur = *id;
        continue;
      }
      Vertex v;
      v.chain = walk;
      v.gog_vertex = st.fwd ? pi_->gog().edges[st.edge].v : pi_->gog().edges[st.edge].u;
      v.parent = cur;
      v.depth = verts_[cur].depth + 1;
      v.weight = verts_[cur].weight + 1 + vlen(st.rep);
      v.complete = false;
      verts_[cur].complete = false;
      int nid = static_cast<int>(verts_.size());
      verts_.push_back(std::move(v));
      index_[verts_[nid].chain] = nid;
      verts_[cur].children.push_back(nid);
      cur = nid;
    }
    return cur;
  }

  void recompute_euler() {
    int clock = 0;
    std::vector<std::pair<int, size_t>> stack = {{0, 0}};
    verts_[0].tin = clock++;
    while (!stack.empty()) {
      auto& [v, ci] = stack.back();
      if (ci < verts_[v].children.size()) {
        int c = verts_[v].children[ci++];
        verts_[c].tin = clock++;
        stack.push_back({c, 0});
      } else {
        verts_[v].tout = clock;
        stack.pop_back();
      }
    }
  }

  const Pi1& pi() const { return *pi_; }
  const TreeBallOptions& options() const { return opt_; }
  int size() const { return static_cast<int>(verts_.size()); }
  const Vertex& vertex(int id) const { return verts_.at(id); }
  int root() const { return 0; }

  std::optional<int> find(const NormalForm& chain) const {
    auto it = index_.find(chain);
    return it == index_.end() ? std::nullopt : std::optional<int>(it->second);
  }

  /// Chain of g . base_vertex; nullopt when it leaves the ball.
  std::optional<int> act_on_base(const NormalForm& g) const {
    NormalForm n = g;
    n.tail.clear();
    return find(n);
  }

  /// Image of a ball vertex under left multiplication, when inside the ball.
  std::optional<int> act(const NormalForm& g, int v) const {
    NormalForm n = pi_->mul(g, verts_[v].chain);
    n.tail.clear();
    return find(n);
  }

  bool in_subtree(int v, int top) const {
    return verts_[top].tin <= verts_[v].tin && verts_[v].tin < verts_[top].tout;
  }

  /// Does the ball vertex v lie in Y_s?
  bool side_contains(const HalfspaceRef& s, int v) const {
    return in_subtree(v, s.child) == s.toward_child;
  }

  int edge_parent(const HalfspaceRef& s) const { return verts_[s.child].parent; }
  int terminal_vertex(const HalfspaceRef& s) const { return s.toward_child ? s.child : edge_parent(s); }

  /// g . s, when both endpoints map into the ball.
  std::optional<HalfspaceRef> translate(const NormalForm& g, const HalfspaceRef& s) const {
    auto pc = act(g, edge_parent(s));
    auto cc = act(g, s.child);
    if (!pc || !cc) return std::nullopt;
    int nchild, terminal = s.toward_child ? *cc : *pc;
    if (verts_[*cc].parent == *pc)
      nchild = *cc;
    else if (verts_[*pc].parent == *cc)
      nchild = *pc;
    else
      return std::nullopt;  // action did not preserve adjacency: out of window
    return HalfspaceRef{nchild, terminal == nchild};
  }

  /// Stabilizer of the (unoriented) edge s as a subgroup handle: the edge
  /// image conjugated by the path from the base to the edge's top endpoint.
  SubgroupHandle edge_stabilizer(const HalfspaceRef& s) const {
    const Vertex& c = verts_[s.child];
    const Step& st = c.chain.steps.back();
    const GogEdge& e = pi_->gog().edges[st.edge];
    NormalForm path = verts_[c.parent].chain;         // base -> parent
    const VertexGroupDesc& vg = pi_->gog().vgroup(verts_[c.parent].gog_vertex);
    NormalForm conj = pi_->mul(path, pi_->vertex_element(verts_[c.parent].gog_vertex, st.rep));
    const EdgeInclusion& inc = st.fwd ? e.inc_u : e.inc_v;
    return SubgroupHandle{verts_[c.parent].gog_vertex, inc.image, conj};
  }

  /// Vertex stabilizer Stab(v) = chain . G(type v) . chain^-1.
  SubgroupHandle vertex_stabilizer(int v) const {
    return SubgroupHandle{verts_[v].gog_vertex, SubgroupDesc::whole(), verts_[v].chain};
  }

  /// All oriented edges of the ball (both orientations).
  std::vector<HalfspaceRef> all_halfspaces() const {
    std::vector<HalfspaceRef> out;
    for (int v = 1; v < size(); ++v) {
      out.push_back({v, true});
      out.push_back({v, false});
    }
    return out;
  }

  std::vector<int> incomplete_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < size(); ++v)
      if (!verts_[v].complete) out.push_back(v);
    return out;
  }

  /// Vertices at tree distance d from the root.
  int count_at_depth(int d) const {
    int n = 0;
    for (const Vertex& v : verts_) n += v.depth == d;
    return n;
  }

  /// Sum over incident edges of [G(v) : image], when every index is finite.
  std::optional<long long> expected_valence(int gog_vertex) const {
    long long total = 0;
    for (auto [e, at_u] : pi_->gog().incident(gog_vertex)) {
      const GogEdge& ed = pi_->gog().edges[e];
      auto idx = sub_index(pi_->gog().vgroup(gog_vertex), at_u ? ed.inc_u.image : ed.inc_v.image);
      if (!idx) return std::nullopt;
      total += *idx;
    }
    return total;
  }

 private:
  const Pi1* pi_;
  TreeBallOptions opt_;
  std::vector<Vertex> verts_;
  std::unordered_map<NormalForm, int, NfHash> index_;
};

/// Spec operation: the radius-R ball of the Bass-Serre tree.
inline TreeBall universal_ball(const Pi1& pi, int radius, TreeBallOptions opt = {}) {
  opt.step_radius = radius;
  opt.allow_infinite_index = opt.weight_cap >= 0;
  return TreeBall(pi, opt);
}

/// Membership of g . base in Y_s; nullopt = OutOfWindow.
inline std::optional<bool> halfspace_membership(const TreeBall& t, const HalfspaceRef& s, const NormalForm& g) {
  auto v = t.act_on_base(g);
  if (!v) return std::nullopt;
  return t.side_contains(s, *v);
}

inline EdgeOrder edge_order(const TreeBall& t, const HalfspaceRef& s, const HalfspaceRef& u) {
  if (s == u) return EdgeOrder::Equal;
  if (s.child == u.child) return EdgeOrder::OppositeNested;  // same edge, opposite orientations
  bool s_below_u = t.in_subtree(s.child, u.child);
  bool u_below_s = t.in_subtree(u.child, s.child);
  // Subtree containment between the child-side halves decides all four cases.
  if (u_below_s) {
    // subtree(u.child) inside subtree(s.child)
    if (s.toward_child && u.toward_child) return EdgeOrder::GreaterEq;   // Y_u subset Y_s
    if (s.toward_child && !u.toward_child) return EdgeOrder::OppositeNested;
    if (!s.toward_child && u.toward_child) return EdgeOrder::OppositeNested;
    return EdgeOrder::LessEq;
  }
  if (s_below_u) {
    if (s.toward_child && u.toward_child) return EdgeOrder::LessEq;  // Y_s subset Y_u
    if (s.toward_child && !u.toward_child) return EdgeOrder::OppositeNested;
    if (!s.toward_child && u.toward_child) return EdgeOrder::OppositeNested;
    return EdgeOrder::GreaterEq;
  }
  // Disjoint subtrees.
  if (s.toward_child && u.toward_child) return EdgeOrder::OppositeNested;
  if (s.toward_child && !u.toward_child) return EdgeOrder::LessEq;      // Y_s subset Y_u (= complement of subtree u)
  if (!s.toward_child && u.toward_child) return EdgeOrder::GreaterEq;
  return EdgeOrder::OppositeNested;  // the two complements cover the tree
}

}  // namespace regnbhd
