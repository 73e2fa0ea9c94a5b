#pragma once

// Windows: an element ball of pi1 together with a weight-capped tree ball,
// and the symbolic side specifications (almost-invariant sets) evaluated over
// them.  A side is a union of halfspace translates, optionally layered with a
// local splitting of the base vertex group (the X cap phi^-1(v) part), or the
// complement of such a union.
//
// Halfspace membership is a chain-prefix test: a tree vertex lies in the
// subtree below an edge iff the edge's child chain is a prefix of its chain.
// Evaluation therefore works for arbitrary translates, inside or outside the
// enumerated ball.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "regnbhd/ball.hpp"
#include "regnbhd/surgery.hpp"
#include "regnbhd/tree.hpp"

namespace regnbhd {

/// A halfspace of the tree named stably across windows: the chain of the
/// child endpoint plus the orientation (true = the subtree at the child).
struct EdgeName {
  NormalForm child_chain;  // steps-only path from the base
  bool toward_child = true;

  bool operator==(const EdgeName&) const = default;
};

struct GlobalTerm {
  NormalForm g;  // translate: the term denotes g . Z_edge
  EdgeName edge;
};

/// Local layer at the base vertex: a one-edge splitting of G(base) by
/// free-factor descriptors.  X meets the base fibre in one local halfspace,
/// and whole branches at the base are assigned by the local position of their
/// first coset syllable.
struct LocalLayer {
  SplitData split;
  bool left_side = true;
};

/// Materialized local piece for normalized (B-form) outputs: explicit window
/// elements of X cap phi^-1(v).  Elements beyond the window count as outside.
struct MaterializedLocal {
  NormalForm vertex_chain;
  std::vector<NormalForm> members;
};

struct SideSpec {
  std::string name;
  SubgroupHandle stab;
  bool complement = false;
  std::vector<GlobalTerm> terms;
  std::optional<LocalLayer> local;
  std::optional<MaterializedLocal> mat_local;
};

inline bool chain_prefix(const NormalForm& shorter, const NormalForm& longer) {
  if (shorter.steps.size() > longer.steps.size()) return false;
  for (size_t i = 0; i < shorter.steps.size(); ++i)
    if (!(shorter.steps[i] == longer.steps[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Local splitting machinery (chain-prefix based, no tree ball needed)

class LocalSplitting {
 public:
  LocalSplitting(const VertexGroupDesc& amb, const SplitData& sd) : amb_(amb), sd_(sd) {
    check(amb.kind == GroupKind::Free || amb.kind == GroupKind::InfiniteCyclic, Err::UndecidableForDesc,
          "local splittings are supported over free vertex groups");
    auto factor_like = [](const SubgroupDesc& d) {
      return d.kind == SubKind::FreeFactor || d.kind == SubKind::Whole || d.kind == SubKind::Trivial;
    };
    check(factor_like(sd.left) && factor_like(sd.right) && factor_like(sd.edge), Err::UndecidableForDesc,
          "local splitting sides must be free factors");
    gog_.add_vertex("P", detail::desc_as_group(amb, sd.left));
    gog_.add_vertex("Q", detail::desc_as_group(amb, sd.right));
    EdgeInclusion il, ir;
    il.image = detail::desc_relative(amb, sd.left, sd.edge);
    ir.image = detail::desc_relative(amb, sd.right, sd.edge);
    for (const VWord& w : sub_generators(amb, sd.edge)) {
      il.gen_images.push_back(detail::word_relative(amb, sd.left, w));
      ir.gen_images.push_back(detail::word_relative(amb, sd.right, w));
    }
    gog_.add_edge("s", 0, 1, detail::desc_as_group(amb, sd.edge), il, ir);
    pi_ = std::make_unique<Pi1>(gog_, 0);
    cross_ = pi_->identity(0);
    cross_.steps.push_back(Step{0, true, {}});
  }

  /// Rewrite an ambient word as an element of pi1(P *_R Q, P).
  NormalForm thread(const VWord& w) const {
    NormalForm n = pi_->identity(0);
    int cur = 0;  // 0 = P, 1 = Q
    auto in_side = [&](int side, int gen) {
      const SubgroupDesc& d = side == 0 ? sd_.left : sd_.right;
      if (d.kind == SubKind::Whole) return true;
      if (d.kind == SubKind::Trivial) return false;
      return std::binary_search(d.basis.begin(), d.basis.end(), gen);
    };
    for (int32_t l : w) {
      int gen = letter_gen(l);
      if (!in_side(cur, gen)) {
        check(in_side(1 - cur, gen), Err::MalformedWord, "letter lies in neither side of the local splitting");
        pi_->absorb_step(n, 0, cur == 0, {});
        cur = 1 - cur;
      }
      pi_->absorb_vertex(n, detail::word_relative(amb_, cur == 0 ? sd_.left : sd_.right, {l}));
    }
    if (cur == 1) pi_->absorb_step(n, 0, false, {});
    return n;
  }

  /// Side of x . v_P in the local tree: true = P side (the complement of the
  /// subtree below the trivial crossing edge).
  bool side_of(const VWord& x) const {
    NormalForm n = thread(x);
    return !chain_prefix(cross_, n);
  }

  /// Side of x . v_loc, where v_loc is the P vertex (left) or Q vertex.
  bool side_of_at(const VWord& x, bool left) const {
    NormalForm n = thread(x);
    if (!left) n = pi_->mul(n, cross_);
    return !chain_prefix(cross_, n);
  }

  const Pi1& pi() const { return *pi_; }

 private:
  VertexGroupDesc amb_;
  SplitData sd_;
  GraphOfGroups gog_;
  std::unique_ptr<Pi1> pi_;
  NormalForm cross_;
};

// ---------------------------------------------------------------------------
// Resolved sides: evaluation of a spec (or its translate) at paths/elements

/// Side value at a tree position: 0/1, or Fibre when the position is the
/// vertex whose fibre the local layer splits.
enum class SideAt : int8_t { Out = 0, In = 1, Fibre = -1 };

class ResolvedSide {
 public:
  ResolvedSide() = default;
  ResolvedSide(const Pi1& pi, SideSpec spec, std::shared_ptr<const LocalSplitting> ls)
      : pi_(&pi), spec_(std::move(spec)), ls_(std::move(ls)) {
    for (const GlobalTerm& t : spec_.terms) {
      NormalForm child = t.edge.child_chain;
      check(!child.steps.empty(), Err::SchemaError, "halfspace edge must name a non-root child chain");
      NormalForm parent = child;
      parent.steps.pop_back();
      NormalForm gc = pi.mul(t.g, child);
      NormalForm gp = pi.mul(t.g, parent);
      gc.tail.clear();
      gp.tail.clear();
      bool child_is_gc = gc.steps.size() == gp.steps.size() + 1;
      NormalForm new_child = child_is_gc ? gc : gp;
      NormalForm terminal = t.edge.toward_child ? gc : gp;
      atoms_.push_back({new_child, terminal.steps.size() == new_child.steps.size() &&
                                       chain_prefix(new_child, terminal)});
    }
    if (spec_.mat_local) {
      mat_vertex_ = spec_.mat_local->vertex_chain;
      mat_vertex_.tail.clear();
    }
  }

  const SideSpec& spec() const { return spec_; }

  /// Side of the tree vertex at the end of `path` (a steps-only chain).
  SideAt at_vertex(const NormalForm& path) const {
    bool hit = false;
    for (const Atom& a : atoms_)
      if (chain_prefix(a.child, path) == a.toward) {
        hit = true;
        break;
      }
    if (hit) return flip(SideAt::In);
    if (spec_.local) {
      if (path.steps.empty()) return SideAt::Fibre;
      return flip(branch_side(path.steps[0]) ? SideAt::In : SideAt::Out);
    }
    if (spec_.mat_local && path.steps.size() == mat_vertex_.steps.size() && chain_prefix(mat_vertex_, path))
      return SideAt::Fibre;
    return flip(SideAt::Out);
  }

  /// Value on the branches hanging strictly below the end of `path`:
  /// In / Out when constant there, Fibre when it varies (an atom edge or the
  /// split fibre lies inside the branch).
  SideAt at_branch(const NormalForm& path) const {
    bool fuzzy = false;
    bool hit = false;
    for (const Atom& a : atoms_) {
      if (a.child.steps.size() > path.steps.size() && chain_prefix(path, a.child)) {
        fuzzy = true;  // the atom edge hangs inside the branch
        continue;
      }
      if (chain_prefix(a.child, path) == a.toward) hit = true;
    }
    if (hit) return flip(SideAt::In);
    if (fuzzy) return SideAt::Fibre;
    if (spec_.local) {
      if (path.steps.empty()) return SideAt::Fibre;  // branch assignment varies with the first syllable
      return flip(branch_side(path.steps[0]) ? SideAt::In : SideAt::Out);
    }
    // a materialized fibre does not extend beyond its vertex
    return flip(SideAt::Out);
  }

  /// Membership of a group element (given as z = translate^-1 . h when
  /// evaluating a translate).  mat_local members beyond the stored window
  /// count as outside.
  bool member(const NormalForm& z) const {
    NormalForm path = z;
    path.tail.clear();
    SideAt v = at_vertex(path);
    if (v != SideAt::Fibre) return v == SideAt::In;
    if (spec_.local) return flip(ls_->side_of(z.tail) == spec_.local->left_side ? SideAt::In : SideAt::Out) == SideAt::In;
    bool in = std::find(spec_.mat_local->members.begin(), spec_.mat_local->members.end(), z) !=
              spec_.mat_local->members.end();
    return flip(in ? SideAt::In : SideAt::Out) == SideAt::In;
  }

 private:
  struct Atom {
    NormalForm child;
    bool toward;
  };

  SideAt flip(SideAt s) const {
    if (!spec_.complement || s == SideAt::Fibre) return s;
    return s == SideAt::In ? SideAt::Out : SideAt::In;
  }

  // Branch below the base: assigned by the local position of the first
  // syllable, at the P or Q vertex owning the crossed edge group.
  bool branch_side(const Step& st) const {
    const GraphOfGroups& g = pi_->gog();
    const GogEdge& e = g.edges[st.edge];
    const EdgeInclusion& inc = st.fwd ? e.inc_u : e.inc_v;
    const VertexGroupDesc& amb = g.vgroup(pi_->base());
    bool img_left = sub_contains_sub(amb, spec_.local->split.left, inc.image);
    bool img_right = sub_contains_sub(amb, spec_.local->split.right, inc.image);
    check(img_left || img_right, Err::UndecidableForDesc,
          "base edge group lies in neither side of the local splitting");
    bool side = ls_->side_of_at(st.rep, img_left);
    return spec_.local->left_side ? side : !side;
  }

  const Pi1* pi_ = nullptr;
  SideSpec spec_;
  std::shared_ptr<const LocalSplitting> ls_;
  std::vector<Atom> atoms_;
  NormalForm mat_vertex_;
};

// ---------------------------------------------------------------------------
// Window

class Window {
 public:
  Window(const GraphOfGroups& gog, int r_small, int r_big, int extra_tree_slack = 2)
      : gog_(gog), pi_(gog_, 0), r_small_(r_small), r_big_(r_big) {
    check(0 <= r_small && r_small < r_big, Err::SchemaError, "window needs two radii r_small < r_big");
    elems_ = enumerate_ball(pi_, r_big);
    TreeBallOptions opt;
    opt.step_radius = r_big + extra_tree_slack;
    opt.weight_cap = r_big + extra_tree_slack;
    tree_ = std::make_unique<TreeBall>(pi_, opt);
    for (int i = 0; i < static_cast<int>(elems_.size()); ++i) {
      elem_idx_[elems_[i]] = i;
      auto v = tree_->act_on_base(elems_[i]);
      check(v.has_value(), Err::Internal, "window element fell outside the tree ball");
      elem_vertex_.push_back(*v);
      elem_len_.push_back(pi_.length(elems_[i]));
    }
  }

  const Pi1& pi() const { return pi_; }
  const GraphOfGroups& gog() const { return gog_; }
  const TreeBall& tree() const { return *tree_; }
  int r_small() const { return r_small_; }
  int r_big() const { return r_big_; }
  const std::vector<NormalForm>& elems() const { return elems_; }
  int n_elems() const { return static_cast<int>(elems_.size()); }
  int elem_vertex(int i) const { return elem_vertex_[i]; }
  int elem_len(int i) const { return elem_len_[i]; }
  std::optional<int> elem_index(const NormalForm& g) const {
    auto it = elem_idx_.find(g);
    return it == elem_idx_.end() ? std::nullopt : std::optional<int>(it->second);
  }

  /// Intern the atom chains of every window translate of the spec, so that
  /// rim evaluation sees them.  Call before building a corner engine.
  void pin_spec_atoms(const SideSpec& spec, int translate_radius = -1) {
    if (translate_radius < 0) translate_radius = r_big_;
    for (const NormalForm& g : elems_) {
      if (pi_.length(g) > translate_radius) break;
      for (const GlobalTerm& term : spec.terms) {
        NormalForm child = term.edge.child_chain;
        NormalForm parent = child;
        parent.steps.pop_back();
        for (const NormalForm* c : {&child, &parent}) {
          NormalForm gc = pi_.mul(pi_.mul(g, term.g), *c);
          gc.tail.clear();
          tree_->ensure_chain(gc);
        }
      }
    }
    tree_->recompute_euler();
  }

  std::shared_ptr<const LocalSplitting> local_splitting(const SplitData& sd) const {
    const VertexGroupDesc& amb = gog_.vgroup(pi_.base());
    std::string key = sub_str(amb, sd.left) + "|" + sub_str(amb, sd.right) + "|" + sub_str(amb, sd.edge);
    auto it = locals_.find(key);
    if (it == locals_.end()) it = locals_.emplace(key, std::make_shared<LocalSplitting>(amb, sd)).first;
    return it->second;
  }

  ResolvedSide resolve(const SideSpec& spec) const {
    std::shared_ptr<const LocalSplitting> ls;
    if (spec.local) ls = local_splitting(spec.local->split);
    return ResolvedSide(pi_, spec, ls);
  }

  /// Coset classes of the window elements under left translation by H: a
  /// conservative refinement of the true partition into cosets Hg (it never
  /// merges distinct cosets; merging is witnessed inside the window).
  const std::vector<int>& coset_classes(const SubgroupHandle& h) const {
    std::string key = std::to_string(h.vertex) + "|" + sub_str(gog_.vgroup(h.vertex), h.desc) + "|" + pi_.str(h.conj);
    auto it = classes_.find(key);
    if (it != classes_.end()) return it->second;
    std::vector<int> uf(elems_.size());
    for (size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    for (const NormalForm& d : sub_handle_generators(pi_, h)) {
      for (int i = 0; i < static_cast<int>(elems_.size()); ++i) {
        auto j = elem_index(pi_.mul(d, elems_[i]));
        if (j) uf[find(i)] = find(*j);
      }
    }
    std::vector<int> out(elems_.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = find(static_cast<int>(i));
    return classes_.emplace(key, std::move(out)).first->second;
  }

 private:
  GraphOfGroups gog_;
  Pi1 pi_;
  int r_small_, r_big_;
  std::vector<NormalForm> elems_;
  std::unordered_map<NormalForm, int, NfHash> elem_idx_;
  std::vector<int> elem_vertex_;
  std::vector<int> elem_len_;
  std::unique_ptr<TreeBall> tree_;
  // pin_spec_atoms mutates the tree before engines snapshot it
  mutable std::map<std::string, std::shared_ptr<LocalSplitting>> locals_;
  mutable std::map<std::string, std::vector<int>> classes_;
};

}  // namespace regnbhd
