#pragma once

// The corner calculus on a finite windowed family: classify the four corners
// X^(*) cap Y^(*) as Empty / SmallNonEmpty / Large / Unknown with two-radius
// stabilization certificates, and the order-theoretic layer on top (the
// partial order, Condition (*), good-enough position, isolation,
// discreteness).
//
// Soundness shape: Empty is certified only when no window element lies in the
// corner and no missing branch can (over-approximate reachability); Large by
// a full contained branch (under-approximate certainty) or by coset-class
// growth across the two radii.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "regnbhd/window.hpp"

namespace regnbhd {

enum class Corner { Empty, Small, Large, Unknown };

struct CornerClass {
  Corner kind = Corner::Unknown;
  int radius = 0;  // certificate radius (Unknown: the exhausted radius)

  bool operator==(const CornerClass&) const = default;
};

enum class Strength { NotCrossing, Weak, Strong, Unknown };

inline std::string corner_str(Corner c) {
  switch (c) {
    case Corner::Empty:
      return "Empty";
    case Corner::Small:
      return "SmallNonEmpty";
    case Corner::Large:
      return "Large";
    case Corner::Unknown:
      return "Unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Bit rows

struct BitRow {
  std::vector<uint64_t> w;
  explicit BitRow(int n = 0) : w((n + 63) / 64, 0) {}
  void set(int i) { w[i >> 6] |= 1ull << (i & 63); }
  bool get(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  BitRow operator&(const BitRow& o) const {
    BitRow r(0);
    r.w.resize(w.size());
    for (size_t i = 0; i < w.size(); ++i) r.w[i] = w[i] & o.w[i];
    return r;
  }
  BitRow operator~() const {
    BitRow r(0);
    r.w.resize(w.size());
    for (size_t i = 0; i < w.size(); ++i) r.w[i] = ~w[i];
    return r;
  }
  bool any() const {
    for (uint64_t x : w)
      if (x) return true;
    return false;
  }
  bool any_and(const BitRow& o) const {
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i] & o.w[i]) return true;
    return false;
  }
};

// ---------------------------------------------------------------------------
// Windowed family member

struct FamilyMember {
  std::string label;
  int base_index = 0;  // which input side this translates
  NormalForm g;        // the translate
  SubgroupHandle stab;
  ResolvedSide side;   // of the base spec; evaluate at z = g^-1 h
  // materialized over the window
  BitRow mem;             // element membership of g.X
  BitRow mem_small;       // restricted to len <= r_small
  std::vector<int8_t> vertex_side;  // 0/1/-1(fibre) per window tree vertex
  // rim masks over incomplete tree vertices (slot order of the engine)
  BitRow rim_may, rim_must;
};

class CornerEngine {
 public:
  CornerEngine(const Window& w, long long small_cap = -1) : w_(&w), small_cap_(small_cap) {
    for (int v : w.tree().incomplete_vertices()) slots_.push_back(v);
    all_mask_ = BitRow(w.n_elems());
    small_mask_ = BitRow(w.n_elems());
    for (int e = 0; e < w.n_elems(); ++e) {
      all_mask_.set(e);
      if (w.elem_len(e) <= w.r_small()) small_mask_.set(e);
    }
    slot_mask_ = BitRow(static_cast<int>(slots_.size()));
    for (size_t i = 0; i < slots_.size(); ++i) slot_mask_.set(static_cast<int>(i));
  }

  const Window& window() const { return *w_; }
  int size() const { return static_cast<int>(members_.size()); }
  const FamilyMember& member(int i) const { return members_.at(i); }
  const std::vector<FamilyMember>& members() const { return members_; }

  /// Materialize (the translate g of) a side spec as a family member.
  /// Purely atomic specs (unions of halfspaces) use tree subtree tests; sides
  /// with a local layer evaluate through z = g^-1 h.
  int add_member(const SideSpec& spec, const NormalForm& g, const std::string& label) {
    const Pi1& pi = w_->pi();
    const TreeBall& t = w_->tree();
    FamilyMember m;
    m.label = label;
    m.g = g;
    m.stab = sub_conjugate(pi, g, spec.stab);
    m.side = w_->resolve(spec);
    int n = w_->n_elems();
    int ns = static_cast<int>(slots_.size());
    m.mem = BitRow(n);
    m.mem_small = BitRow(n);
    m.vertex_side.resize(t.size());
    m.rim_may = BitRow(ns);
    m.rim_must = BitRow(ns);
    bool atomic = !spec.local && !spec.mat_local;
    if (atomic) {
      // translated atoms: child chain + orientation; tree id when interned
      struct TAtom {
        NormalForm child;
        bool toward;
        int tree_id;  // -1: beyond the tree ball (no window chain reaches below it)
      };
      std::vector<TAtom> atoms;
      for (const GlobalTerm& term : spec.terms) {
        NormalForm child = term.edge.child_chain;
        NormalForm parent = child;
        parent.steps.pop_back();
        NormalForm gc = pi.mul(pi.mul(g, term.g), child);
        NormalForm gp = pi.mul(pi.mul(g, term.g), parent);
        gc.tail.clear();
        gp.tail.clear();
        bool child_is_gc = gc.steps.size() == gp.steps.size() + 1;
        TAtom a;
        a.child = child_is_gc ? gc : gp;
        a.toward = term.edge.toward_child == child_is_gc;
        auto id = t.find(a.child);
        a.tree_id = id ? *id : -1;
        atoms.push_back(std::move(a));
      }
      auto vertex_value = [&](int v) {
        bool in = false;
        for (const TAtom& a : atoms) {
          bool inside = a.tree_id >= 0 && t.in_subtree(v, a.tree_id);
          if (inside == a.toward) {
            in = true;
            break;
          }
        }
        return spec.complement ? !in : in;
      };
      for (int i = 0; i < n; ++i) {
        if (!vertex_value(w_->elem_vertex(i))) continue;
        m.mem.set(i);
        if (w_->elem_len(i) <= w_->r_small()) m.mem_small.set(i);
      }
      for (int v = 0; v < t.size(); ++v) m.vertex_side[v] = vertex_value(v) ? 1 : 0;
      for (int si = 0; si < ns; ++si) {
        int v = slots_[si];
        const NormalForm& vc = t.vertex(v).chain;
        bool fuzzy = false, in = false;
        for (const TAtom& a : atoms) {
          if (a.tree_id < 0) {
            // off-ball atom: it affects branches below a slot it hangs under
            if (chain_prefix(vc, a.child))
              fuzzy = true;
            // otherwise no window branch lies below it: membership constant,
            // inside == false
            continue;
          }
          if (t.in_subtree(v, a.tree_id) == a.toward) in = true;
        }
        bool umust = in;          // the union certainly covers the branch
        bool umay = in || fuzzy;  // or might, through an off-ball atom
        if (spec.complement ? !umust : umay) m.rim_may.set(si);
        if (spec.complement ? !umay : umust) m.rim_must.set(si);
      }
    } else {
      NormalForm gi = pi.inv(g);
      for (int i = 0; i < n; ++i) {
        if (!m.side.member(pi.mul(gi, w_->elems()[i]))) continue;
        m.mem.set(i);
        if (w_->elem_len(i) <= w_->r_small()) m.mem_small.set(i);
      }
      for (int v = 0; v < t.size(); ++v) {
        NormalForm p = pi.mul(gi, t.vertex(v).chain);
        p.tail.clear();
        SideAt s = m.side.at_vertex(p);
        m.vertex_side[v] = s == SideAt::Fibre ? -1 : (s == SideAt::In ? 1 : 0);
      }
      for (int si = 0; si < ns; ++si) {
        NormalForm p = pi.mul(gi, t.vertex(slots_[si]).chain);
        p.tail.clear();
        SideAt s = m.side.at_branch(p);
        if (s != SideAt::Out) m.rim_may.set(si);
        if (s == SideAt::In) m.rim_must.set(si);
      }
    }
    members_.push_back(std::move(m));
    return static_cast<int>(members_.size()) - 1;
  }

  void drop_last() { members_.pop_back(); }

  /// The spec's decision procedure for one corner X_i^(ci) cap X_j^(cj).
  CornerClass classify(int i, bool ci, int j, bool cj) const {
    const FamilyMember& a = members_[i];
    const FamilyMember& b = members_[j];
    if (i == j) {
      if (ci != cj) return {Corner::Empty, w_->r_big()};  // the set against its own complement
      // X cap X = X: classify the side itself
      return classify_side(i, ci);
    }
    BitRow region = pick(a.mem, ci) & pick(b.mem, cj);
    BitRow region_small = pick(a.mem_small, ci, true) & pick(b.mem_small, cj, true);
    auto [may_a, must_a] = rim_of(a, ci);
    auto [may_b, must_b] = rim_of(b, cj);
    bool rim_may = may_a.any_and(may_b);
    bool rim_must = must_a.any_and(must_b);
    bool has_member = region.any();
    if (!has_member && !rim_may) return {Corner::Empty, w_->r_big()};
    if (rim_must) return {Corner::Large, w_->r_big()};
    if (!has_member) return {Corner::Unknown, w_->r_big()};
    // coset-representative counting under Stab(X_i)
    std::set<int> keys_small = class_keys(region_small, a.stab);
    std::set<int> keys_big = class_keys(region, a.stab);
    if (keys_small.empty()) return {Corner::Unknown, w_->r_big()};
    if (keys_small == keys_big) {
      if (small_cap_ > 0 && static_cast<long long>(keys_big.size()) > small_cap_) return {Corner::Large, w_->r_big()};
      return {Corner::Small, w_->r_big()};
    }
    return {Corner::Large, w_->r_big()};
  }

  /// Triviality of a single side on the window: trivial when it or its
  /// complement is H-small.
  CornerClass classify_side(int i, bool ci) const {
    const FamilyMember& a = members_[i];
    BitRow region = pick(a.mem, ci);
    BitRow region_small = pick(a.mem_small, ci, true);
    auto [may, must] = rim_of(a, ci);
    if (!region.any() && !may.any()) return {Corner::Empty, w_->r_big()};
    if (must.any()) return {Corner::Large, w_->r_big()};
    if (!region.any()) return {Corner::Unknown, w_->r_big()};
    std::set<int> ks = class_keys(region_small, a.stab);
    std::set<int> kb = class_keys(region, a.stab);
    if (ks.empty()) return {Corner::Unknown, w_->r_big()};
    return ks == kb ? CornerClass{Corner::Small, w_->r_big()} : CornerClass{Corner::Large, w_->r_big()};
  }

  bool nontrivial(int i) const {
    return classify_side(i, false).kind == Corner::Large && classify_side(i, true).kind == Corner::Large;
  }

  /// Windowed set equality of two oriented sides: identical element
  /// membership and identical rim behaviour.  (Tree vertices with empty
  /// fibres may disagree without the element sets differing.)
  bool same_set(int i, bool ci, int j, bool cj) const {
    const FamilyMember& a = members_[i];
    const FamilyMember& b = members_[j];
    if (!(pick(a.mem, ci).w == pick(b.mem, cj).w)) return false;
    auto [ma, sa] = rim_of(a, ci);
    auto [mb, sb] = rim_of(b, cj);
    return ma.w == mb.w && sa.w == sb.w;
  }

  /// X_i equal to X_j or X_j* as windowed sets (the unordered-pair identity).
  bool same_pair(int i, int j) const { return same_set(i, false, j, false) || same_set(i, false, j, true); }

  /// Strength of "X_j crosses X_i" per the boundary-projection test.
  Strength strength(int i, int j) const {
    const FamilyMember& a = members_[i];
    const FamilyMember& b = members_[j];
    // boundary vertices of X_j: endpoints of side-crossing ball edges
    const TreeBall& t = w_->tree();
    std::vector<bool> bdry(t.size(), false);
    for (int v = 1; v < t.size(); ++v) {
      int p = t.vertex(v).parent;
      int8_t sv = b.vertex_side[v], sp = b.vertex_side[p];
      if (sv == -1 || sp == -1 || sv != sp) {
        bdry[v] = true;
        bdry[p] = true;
      }
    }
    int n = w_->n_elems();
    BitRow delta(n);
    for (int e = 0; e < n; ++e)
      if (bdry[w_->elem_vertex(e)]) delta.set(e);
    auto grows = [&](bool ci) {
      BitRow big = delta & pick(a.mem, ci);
      BitRow small(n);
      for (int e = 0; e < n; ++e)
        if (big.get(e) && w_->elem_len(e) <= w_->r_small()) small.set(e);
      std::set<int> ks = class_keys(small, a.stab), kb = class_keys(big, a.stab);
      return ks != kb;
    };
    bool in_grows = grows(false), out_grows = grows(true);
    if (in_grows && out_grows) return Strength::Strong;
    return Strength::Weak;  // caller established crossing before asking
  }

 private:
  BitRow pick(const BitRow& r, bool compl_, bool mask_small = false) const {
    if (!compl_) return r;
    return (~r) & (mask_small ? small_mask_ : all_mask_);
  }

  std::pair<BitRow, BitRow> rim_of(const FamilyMember& m, bool compl_) const {
    if (!compl_) return {m.rim_may, m.rim_must};
    return {(~m.rim_must) & slot_mask_, (~m.rim_may) & slot_mask_};
  }

  SideAt branch_beyond(const ResolvedSide& side, const NormalForm& path) const {
    // like at_vertex, but a materialized fibre does not extend beyond the rim
    SideAt s = side.at_vertex(path);
    if (s == SideAt::Fibre && side.spec().mat_local) return side.spec().complement ? SideAt::In : SideAt::Out;
    return s;
  }

  std::set<int> class_keys(const BitRow& region, const SubgroupHandle& stab) const {
    const std::vector<int>& cls = w_->coset_classes(stab);
    std::set<int> out;
    for (int e = 0; e < w_->n_elems(); ++e)
      if (region.get(e)) out.insert(cls[e]);
    return out;
  }

  const Window* w_;
  long long small_cap_;
  std::vector<int> slots_;
  BitRow all_mask_, small_mask_, slot_mask_;
  std::vector<FamilyMember> members_;
};

// ---------------------------------------------------------------------------
// Corner table (computed or direct) and the order-theoretic layer

struct CornerTable {
  enum class Provenance { Computed, Direct };
  Provenance provenance = Provenance::Computed;
  int n = 0;
  std::vector<std::string> names;
  std::vector<CornerClass> data;  // flat (i, ci, j, cj)
  std::vector<uint8_t> present;
  std::map<std::array<int, 4>, Strength> strengths;  // (i, ci, j, cj): does j cross i strongly

  void init(int size) {
    n = size;
    data.assign(4 * n * n, {});
    present.assign(4 * n * n, 0);
  }
  int idx(int i, bool ci, int j, bool cj) const { return ((i * n + j) << 2) | (ci << 1) | static_cast<int>(cj); }
  const CornerClass& at(int i, bool ci, int j, bool cj) const {
    int k = idx(i, ci, j, cj);
    check(present[k], Err::UnresolvedCorners, "corner table entry missing");
    return data[k];
  }
  void put(int i, bool ci, int j, bool cj, CornerClass c) {
    data[idx(i, ci, j, cj)] = c;
    present[idx(i, ci, j, cj)] = 1;
    data[idx(j, cj, i, ci)] = c;  // smallness of the intersection is symmetric
    present[idx(j, cj, i, ci)] = 1;
  }
};

/// Fill the full table over a windowed family.
inline CornerTable compute_corner_table(const CornerEngine& eng, int workers = 1) {
  CornerTable t;
  t.init(eng.size());
  for (int i = 0; i < t.n; ++i) t.names.push_back(eng.member(i).label);
  std::vector<std::array<int, 2>> pairs;
  for (int i = 0; i < t.n; ++i)
    for (int j = i; j < t.n; ++j) pairs.push_back({i, j});
  std::vector<std::map<std::array<int, 4>, CornerClass>> partial(std::max(1, workers));
  auto work = [&](int wid) {
    for (size_t p = wid; p < pairs.size(); p += std::max(1, workers)) {
      auto [i, j] = pairs[p];
      for (bool ci : {false, true})
        for (bool cj : {false, true}) partial[wid][{i, ci, j, cj}] = eng.classify(i, ci, j, cj);
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> th;
    for (int wdx = 0; wdx < workers; ++wdx) th.emplace_back(work, wdx);
    for (auto& x : th) x.join();
  }
  for (auto& part : partial)
    for (auto& [k, v] : part) t.put(k[0], k[1], k[2], k[3], v);
  return t;
}

/// U <= V iff U cap V* is empty, or is the only small corner of the pair.
/// nullopt = Undefined (two small corners, neither empty: Condition (*)
/// failure for this pair) or unresolved.
inline std::optional<bool> leq(const CornerTable& t, int i, bool ci, int j, bool cj) {
  if (i == j && ci == cj) return true;
  auto small_ish = [](Corner c) { return c == Corner::Empty || c == Corner::Small; };
  CornerClass uv = t.at(i, ci, j, !cj);  // U cap V*
  std::array<CornerClass, 4> all = {t.at(i, ci, j, cj), t.at(i, ci, j, !cj), t.at(i, !ci, j, cj),
                                    t.at(i, !ci, j, !cj)};
  for (const CornerClass& c : all)
    if (c.kind == Corner::Unknown) return std::nullopt;
  int small_count = 0, empty_count = 0;
  for (const CornerClass& c : all) {
    small_count += small_ish(c.kind);
    empty_count += c.kind == Corner::Empty;
  }
  if (small_count >= 2 && empty_count == 0) return std::nullopt;  // Undefined
  if (uv.kind == Corner::Empty) return true;
  if (uv.kind == Corner::Small && small_count == 1) return true;
  return false;
}

struct StarViolation {
  int i, j;
};

/// Condition (*): whenever two corners of a pair are small, one is empty.
inline std::vector<StarViolation> check_condition_star(const CornerTable& t) {
  std::vector<StarViolation> out;
  for (int i = 0; i < t.n; ++i)
    for (int j = i + 1; j < t.n; ++j) {
      int small_cnt = 0, empty_cnt = 0;
      bool unknown = false;
      for (bool ci : {false, true})
        for (bool cj : {false, true}) {
          Corner c = t.at(i, ci, j, cj).kind;
          unknown |= c == Corner::Unknown;
          small_cnt += c == Corner::Small || c == Corner::Empty;
          empty_cnt += c == Corner::Empty;
        }
      if (unknown) continue;
      if (small_cnt >= 2 && empty_cnt == 0) out.push_back({i, j});
    }
  return out;
}

inline std::optional<bool> crosses(const CornerTable& t, int i, int j) {
  if (i == j) return false;
  bool unknown = false;
  for (bool ci : {false, true})
    for (bool cj : {false, true}) {
      Corner c = t.at(i, ci, j, cj).kind;
      if (c == Corner::Unknown) unknown = true;
      else if (c != Corner::Large)
        return false;
    }
  if (unknown) return std::nullopt;
  return true;
}

inline bool is_isolated(const CornerTable& t, int i) {
  for (int j = 0; j < t.n; ++j) {
    if (j == i) continue;
    auto c = crosses(t, i, j);
    if (!c.has_value() || *c) return false;
  }
  return true;
}

/// Comparable: some orientation inequality between the two sides holds.
inline bool comparable(const CornerTable& t, int i, bool ci, int j, bool cj) {
  auto a = leq(t, i, ci, j, cj);
  auto b = leq(t, j, cj, i, ci);
  return (a.has_value() && *a) || (b.has_value() && *b);
}

/// Good-enough position: whenever U, V are incomparable (in all orientations
/// of V) and do not cross, some family element crosses them.
inline bool good_enough_position(const CornerTable& t) {
  for (int i = 0; i < t.n; ++i)
    for (int j = i + 1; j < t.n; ++j) {
      auto cr = crosses(t, i, j);
      if (!cr.has_value()) return false;
      if (*cr) continue;
      bool cmp = comparable(t, i, false, j, false) || comparable(t, i, false, j, true);
      if (cmp) continue;
      bool saved = false;
      for (int k = 0; k < t.n && !saved; ++k) {
        if (k == i || k == j) continue;
        auto c1 = crosses(t, k, i);
        auto c2 = crosses(t, k, j);
        saved = c1.has_value() && *c1 && c2.has_value() && *c2;
      }
      if (!saved) return false;
    }
  return true;
}

/// Windowed discreteness: the number of family members strictly between U
/// and V is the same whether counted among the small stratum or the whole
/// family (members are tagged by translate length).
inline bool is_discrete_window(const CornerTable& t, const std::vector<int>& member_len, int r_small) {
  check(static_cast<int>(member_len.size()) == t.n, Err::SchemaError, "member length vector mismatch");
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) {
      if (i == j) continue;
      for (bool ci : {false, true})
        for (bool cj : {false, true}) {
          int all = 0, small = 0;
          for (int z = 0; z < t.n; ++z) {
            if (z == i || z == j) continue;
            for (bool cz : {false, true}) {
              auto a = leq(t, i, ci, z, cz);
              auto b = leq(t, z, cz, j, cj);
              if (a.has_value() && *a && b.has_value() && *b) {
                ++all;
                if (member_len[z] <= r_small) ++small;
                break;
              }
            }
          }
          if (all != small) return false;
        }
    }
  return true;
}

}  // namespace regnbhd
