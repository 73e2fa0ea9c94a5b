#pragma once

// Vertex groups of the supported decidable class (free, infinite cyclic,
// finite cyclic), their elements as reduced words, and subgroup descriptors
// with computable membership, factorization and canonical coset
// representatives.  Canonical choices are shortlex-least under the fixed
// generator order g0 < g0^-1 < g1 < g1^-1 < ...

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "regnbhd/common.hpp"

namespace regnbhd {

struct GraphOfGroups;  // for composite labels, defined in gog.hpp

enum class GroupKind { Free, InfiniteCyclic, FiniteCyclic, Composite };

/// Descriptor of a vertex (or edge) group.
struct VertexGroupDesc {
  GroupKind kind = GroupKind::Free;
  int rank = 0;   // Free: rank; cyclic kinds: always 1 generator
  int order = 0;  // FiniteCyclic only, order >= 1 (order 1 = trivial group)
  std::vector<std::string> gens;
  // Composite: symbolic label produced by collapse(); not computable.
  std::string display;
  std::shared_ptr<const GraphOfGroups> sub;

  int ngens() const { return kind == GroupKind::Composite ? 0 : static_cast<int>(gens.size()); }
  bool computable() const { return kind != GroupKind::Composite; }
  bool trivial() const { return (kind == GroupKind::Free && rank == 0) || (kind == GroupKind::FiniteCyclic && order == 1); }

  static VertexGroupDesc free_group(std::vector<std::string> names) {
    VertexGroupDesc d;
    d.kind = GroupKind::Free;
    d.rank = static_cast<int>(names.size());
    d.gens = std::move(names);
    return d;
  }
  static VertexGroupDesc inf_cyclic(std::string name) {
    VertexGroupDesc d;
    d.kind = GroupKind::InfiniteCyclic;
    d.rank = 1;
    d.gens = {std::move(name)};
    return d;
  }
  static VertexGroupDesc fin_cyclic(std::string name, int order) {
    check(order >= 1, Err::SchemaError, "finite cyclic order must be >= 1");
    VertexGroupDesc d;
    d.kind = GroupKind::FiniteCyclic;
    d.order = order;
    d.gens = {std::move(name)};
    return d;
  }
  static VertexGroupDesc composite(std::string display, std::shared_ptr<const GraphOfGroups> sub = nullptr) {
    VertexGroupDesc d;
    d.kind = GroupKind::Composite;
    d.display = std::move(display);
    d.sub = std::move(sub);
    return d;
  }
};

// A vertex-group element: reduced word over the group's generators.
// Letter encoding: +(i+1) = generator i, -(i+1) = its inverse.
using VWord = std::vector<int32_t>;

inline int letter_gen(int32_t l) { return std::abs(l) - 1; }
inline int32_t letter_inv(int32_t l) { return -l; }

// Order key used by all shortlex comparisons: gi < gi^-1 < g(i+1) < ...
inline int letter_key(int32_t l) { return 2 * letter_gen(l) + (l < 0 ? 1 : 0); }

inline bool shortlex_less(const VWord& a, const VWord& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return letter_key(a[i]) < letter_key(b[i]);
  return false;
}

namespace detail {

inline long long exp_sum(const VWord& w) {
  long long e = 0;
  for (int32_t l : w) e += (l > 0 ? 1 : -1);
  return e;
}

// Canonical word for a cyclic group element with exponent e.
inline VWord cyclic_word(const VertexGroupDesc& g, long long e) {
  if (g.kind == GroupKind::FiniteCyclic) {
    long long n = g.order;
    e = ((e % n) + n) % n;
    if (2 * e > n) e -= n;  // shorter representative; ties go positive
  }
  VWord w;
  const int32_t l = e >= 0 ? 1 : -1;
  for (long long i = 0; i < std::llabs(e); ++i) w.push_back(l);
  return w;
}

}  // namespace detail

/// Reduce a raw letter sequence to the canonical element word.
inline VWord vreduce(const VertexGroupDesc& g, const VWord& raw) {
  check(g.computable(), Err::UndecidableForDesc, "composite vertex group has no word arithmetic");
  for (int32_t l : raw)
    check(letter_gen(l) >= 0 && letter_gen(l) < g.ngens(), Err::UnknownGenerator, "letter out of range");
  if (g.kind != GroupKind::Free) return detail::cyclic_word(g, detail::exp_sum(raw));
  VWord out;
  for (int32_t l : raw) {
    if (!out.empty() && out.back() == letter_inv(l))
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

inline VWord vmul(const VertexGroupDesc& g, const VWord& a, const VWord& b) {
  VWord raw = a;
  raw.insert(raw.end(), b.begin(), b.end());
  return vreduce(g, raw);
}

inline VWord vinv(const VertexGroupDesc& g, const VWord& a) {
  VWord raw;
  for (auto it = a.rbegin(); it != a.rend(); ++it) raw.push_back(letter_inv(*it));
  return vreduce(g, raw);
}

inline int vlen(const VWord& a) { return static_cast<int>(a.size()); }

/// Element exponent for cyclic groups (canonical representative exponent).
inline long long vexp(const VWord& a) { return detail::exp_sum(a); }

inline VWord vpow_gen(const VertexGroupDesc& g, int gen, long long e) {
  VWord raw;
  int32_t l = e >= 0 ? (gen + 1) : -(gen + 1);
  for (long long i = 0; i < std::llabs(e); ++i) raw.push_back(l);
  return vreduce(g, raw);
}

// ---------------------------------------------------------------------------
// Subgroup descriptors

enum class SubKind { Trivial, Whole, FreeFactor, CyclicPower };

/// A subgroup of a vertex group that the artifact can compute with.
/// FreeFactor: generated by a subset of the ambient generators.
/// CyclicPower: generated by the m-th power of a single ambient generator;
/// on free ambients the generator must be a basis element.
struct SubgroupDesc {
  SubKind kind = SubKind::Whole;
  std::vector<int> basis;  // FreeFactor: sorted distinct generator indices
  int gen = 0;             // CyclicPower
  int exponent = 1;        // CyclicPower, m >= 1

  static SubgroupDesc trivial() { return {SubKind::Trivial, {}, 0, 1}; }
  static SubgroupDesc whole() { return {SubKind::Whole, {}, 0, 1}; }
  static SubgroupDesc free_factor(std::vector<int> b) {
    std::sort(b.begin(), b.end());
    check(std::adjacent_find(b.begin(), b.end()) == b.end(), Err::SchemaError, "free factor basis repeats a generator");
    return {SubKind::FreeFactor, std::move(b), 0, 1};
  }
  static SubgroupDesc cyclic_power(int gen, int m) {
    check(m >= 1, Err::SchemaError, "cyclic power exponent must be >= 1");
    return {SubKind::CyclicPower, {}, gen, m};
  }

  bool operator==(const SubgroupDesc&) const = default;
};

inline void validate_subgroup(const VertexGroupDesc& g, const SubgroupDesc& h) {
  check(g.computable(), Err::UndecidableForDesc, "subgroup of composite label");
  switch (h.kind) {
    case SubKind::Trivial:
    case SubKind::Whole:
      return;
    case SubKind::FreeFactor:
      for (int b : h.basis) check(b >= 0 && b < g.ngens(), Err::UnknownGenerator, "free factor basis out of range");
      return;
    case SubKind::CyclicPower:
      check(h.gen >= 0 && h.gen < g.ngens(), Err::UnknownGenerator, "cyclic power generator out of range");
      return;
  }
}

namespace detail {

inline bool in_basis(const SubgroupDesc& h, int gen) {
  return std::binary_search(h.basis.begin(), h.basis.end(), gen);
}

// Effective modulus of <g^m> inside its ambient (gcd with the order when finite).
inline long long eff_mod(const VertexGroupDesc& g, const SubgroupDesc& h) {
  if (g.kind == GroupKind::FiniteCyclic) return std::gcd(static_cast<long long>(h.exponent), static_cast<long long>(g.order));
  return h.exponent;
}

// Canonical residue of e mod m: value in (-m/2, m/2], realized as word exponent.
inline long long canon_residue(long long e, long long m) {
  long long r = ((e % m) + m) % m;
  if (2 * r > m) r -= m;
  return r;
}

}  // namespace detail

inline bool sub_contains(const VertexGroupDesc& g, const SubgroupDesc& h, const VWord& w) {
  switch (h.kind) {
    case SubKind::Trivial:
      return w.empty();
    case SubKind::Whole:
      return true;
    case SubKind::FreeFactor:
      return std::all_of(w.begin(), w.end(), [&](int32_t l) { return detail::in_basis(h, letter_gen(l)); });
    case SubKind::CyclicPower: {
      long long m = detail::eff_mod(g, h);
      if (g.kind != GroupKind::Free) return vexp(w) % m == 0;
      if (!std::all_of(w.begin(), w.end(), [&](int32_t l) { return letter_gen(l) == h.gen; })) return false;
      return detail::exp_sum(w) % m == 0;
    }
  }
  return false;
}

struct LeftFactor {
  VWord rep;  // canonical representative of the coset y*H
  VWord h;    // element of H with y = rep * h
};
struct RightFactor {
  VWord h;    // element of H with y = h * rep
  VWord rep;  // canonical representative of the coset H*y
};

/// y = rep * h with h in H; rep is the shortlex-least element of yH.
inline LeftFactor factor_left(const VertexGroupDesc& g, const SubgroupDesc& h, const VWord& y) {
  switch (h.kind) {
    case SubKind::Trivial:
      return {y, {}};
    case SubKind::Whole:
      return {{}, y};
    case SubKind::FreeFactor: {
      size_t cut = y.size();
      while (cut > 0 && detail::in_basis(h, letter_gen(y[cut - 1]))) --cut;
      VWord rep(y.begin(), y.begin() + cut);
      VWord tail(y.begin() + cut, y.end());
      return {rep, tail};
    }
    case SubKind::CyclicPower: {
      long long m = detail::eff_mod(g, h);
      if (g.kind != GroupKind::Free) {
        long long e = vexp(y);
        long long r = detail::canon_residue(e, m);
        VWord rep = detail::cyclic_word(g, r);
        VWord tail = vmul(g, vinv(g, rep), y);
        return {rep, tail};
      }
      size_t cut = y.size();
      while (cut > 0 && letter_gen(y[cut - 1]) == h.gen) --cut;
      long long t = 0;
      for (size_t i = cut; i < y.size(); ++i) t += y[i] > 0 ? 1 : -1;
      long long r = detail::canon_residue(t, m);
      VWord rep(y.begin(), y.begin() + cut);
      VWord rp = vmul(g, rep, vpow_gen(g, h.gen, r));
      VWord tail = vpow_gen(g, h.gen, t - r);
      return {rp, tail};
    }
  }
  fail(Err::Internal, "factor_left");
}

/// y = h * rep with h in H; rep is the shortlex-least element of Hy.
inline RightFactor factor_right(const VertexGroupDesc& g, const SubgroupDesc& h, const VWord& y) {
  // Mirror of factor_left through inversion.
  LeftFactor lf = factor_left(g, h, vinv(g, y));
  return {vinv(g, lf.h), vinv(g, lf.rep)};
}

inline VWord left_coset_rep(const VertexGroupDesc& g, const SubgroupDesc& h, const VWord& y) {
  return factor_left(g, h, y).rep;
}
inline VWord right_coset_rep(const VertexGroupDesc& g, const SubgroupDesc& h, const VWord& y) {
  return factor_right(g, h, y).rep;
}

/// Generating set of the subgroup, as ambient words.
inline std::vector<VWord> sub_generators(const VertexGroupDesc& g, const SubgroupDesc& h) {
  switch (h.kind) {
    case SubKind::Trivial:
      return {};
    case SubKind::Whole: {
      std::vector<VWord> r;
      for (int i = 0; i < g.ngens(); ++i) r.push_back({static_cast<int32_t>(i + 1)});
      return r;
    }
    case SubKind::FreeFactor: {
      std::vector<VWord> r;
      for (int b : h.basis) r.push_back({static_cast<int32_t>(b + 1)});
      return r;
    }
    case SubKind::CyclicPower:
      return {vpow_gen(g, h.gen, h.exponent)};
  }
  return {};
}

/// Index of H in the ambient group, when finite.
inline std::optional<long long> sub_index(const VertexGroupDesc& g, const SubgroupDesc& h) {
  switch (h.kind) {
    case SubKind::Whole:
      return 1;
    case SubKind::Trivial:
      if (g.trivial()) return 1;
      if (g.kind == GroupKind::FiniteCyclic) return g.order;
      return std::nullopt;
    case SubKind::FreeFactor:
      if (g.trivial()) return 1;
      if (h.basis.empty()) return sub_index(g, SubgroupDesc::trivial());
      if (static_cast<int>(h.basis.size()) == g.ngens()) return 1;  // basis covers all generators
      if (g.kind == GroupKind::FiniteCyclic) return 1;
      return std::nullopt;
    case SubKind::CyclicPower: {
      long long m = detail::eff_mod(g, h);
      if (g.kind == GroupKind::InfiniteCyclic) return m;
      if (g.kind == GroupKind::FiniteCyclic) return m;
      if (g.kind == GroupKind::Free && g.rank == 1) return m;
      return std::nullopt;  // <g^m> in a free group of rank >= 2
    }
  }
  return std::nullopt;
}

/// Enumerate all reduced words of the group with length <= maxLen, shortlex order.
inline void enum_elements(const VertexGroupDesc& g, int maxLen, const std::function<void(const VWord&)>& fn) {
  check(g.computable(), Err::UndecidableForDesc, "cannot enumerate composite label");
  if (g.kind != GroupKind::Free) {
    std::vector<VWord> out;
    if (g.kind == GroupKind::InfiniteCyclic) {
      for (long long e = -maxLen; e <= maxLen; ++e) out.push_back(detail::cyclic_word(g, e));
    } else {
      for (long long e = 0; e < g.order; ++e) {
        VWord w = detail::cyclic_word(g, e);
        if (vlen(w) <= maxLen) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end(), shortlex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (auto& w : out) fn(w);
    return;
  }
  // Free group: BFS by length, letters in shortlex order.
  std::vector<VWord> layer = {{}};
  fn({});
  std::vector<int32_t> letters;
  for (int i = 0; i < g.ngens(); ++i) {
    letters.push_back(i + 1);
    letters.push_back(-(i + 1));
  }
  for (int len = 1; len <= maxLen; ++len) {
    std::vector<VWord> next;
    for (const VWord& w : layer)
      for (int32_t l : letters) {
        if (!w.empty() && w.back() == letter_inv(l)) continue;
        VWord x = w;
        x.push_back(l);
        next.push_back(x);
      }
    std::sort(next.begin(), next.end(), shortlex_less);
    for (auto& w : next) fn(w);
    layer = std::move(next);
  }
}

/// Enumerate canonical left-coset representatives of H with length <= maxLen,
/// in shortlex order.
inline std::vector<VWord> enum_left_coset_reps(const VertexGroupDesc& g, const SubgroupDesc& h, int maxLen) {
  std::vector<VWord> out;
  enum_elements(g, maxLen, [&](const VWord& w) {
    if (left_coset_rep(g, h, w) == w) out.push_back(w);
  });
  return out;
}

/// Does sub1 contain sub2 (as subgroups of the same ambient)?
inline bool sub_contains_sub(const VertexGroupDesc& g, const SubgroupDesc& h1, const SubgroupDesc& h2) {
  for (const VWord& w : sub_generators(g, h2))
    if (!sub_contains(g, h1, w)) return false;
  return true;
}

/// Recognize the subgroup generated by the given ambient words, when it has a
/// supported descriptor.  Returns nullopt when the generated subgroup is not
/// expressible (or not recognizably so) in the descriptor class.
inline std::optional<SubgroupDesc> recognize_subgroup(const VertexGroupDesc& g, const std::vector<VWord>& gens) {
  std::vector<VWord> ws;
  for (const auto& w : gens)
    if (!w.empty()) ws.push_back(w);
  if (ws.empty()) return SubgroupDesc::trivial();
  if (g.kind != GroupKind::Free || g.rank == 1) {
    // cyclic ambient: subgroup generated by powers is <g^gcd>
    long long d = 0;
    for (const auto& w : ws) d = std::gcd(d, std::llabs(vexp(w)));
    if (g.kind == GroupKind::FiniteCyclic) d = std::gcd(d, static_cast<long long>(g.order));
    if (d == 0) return SubgroupDesc::trivial();
    if (d == 1) return SubgroupDesc::whole();
    return SubgroupDesc::cyclic_power(0, static_cast<int>(d));
  }
  // Free ambient.  (a) If the single-letter generators cover every letter any
  // word uses, the subgroup is the free factor on those letters.  (b) All
  // words powers of one generator: a cyclic power.
  std::vector<int> singles;
  for (const auto& w : ws)
    if (w.size() == 1) singles.push_back(letter_gen(w[0]));
  std::sort(singles.begin(), singles.end());
  singles.erase(std::unique(singles.begin(), singles.end()), singles.end());
  bool covered = std::all_of(ws.begin(), ws.end(), [&](const VWord& w) {
    return std::all_of(w.begin(), w.end(),
                       [&](int32_t l) { return std::binary_search(singles.begin(), singles.end(), letter_gen(l)); });
  });
  if (covered) {
    if (static_cast<int>(singles.size()) == g.rank) return SubgroupDesc::whole();
    return SubgroupDesc::free_factor(singles);
  }
  int gen = -1;
  long long d = 0;
  for (const auto& w : ws) {
    for (int32_t l : w) {
      if (gen == -1) gen = letter_gen(l);
      if (letter_gen(l) != gen) return std::nullopt;
    }
    d = std::gcd(d, std::llabs(vexp(w)));
  }
  if (d == 0) return SubgroupDesc::trivial();
  if (d == 1) return SubgroupDesc::free_factor({gen});
  return SubgroupDesc::cyclic_power(gen, static_cast<int>(d));
}

// Pretty printing -----------------------------------------------------------

inline std::string word_str(const VertexGroupDesc& g, const VWord& w) {
  if (w.empty()) return "1";
  std::string s;
  size_t i = 0;
  while (i < w.size()) {
    size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long long e = static_cast<long long>(j - i) * (w[i] > 0 ? 1 : -1);
    if (!s.empty()) s += ".";
    s += g.gens[letter_gen(w[i])];
    if (e != 1) s += "^" + std::to_string(e);
    i = j;
  }
  return s;
}

inline std::string group_str(const VertexGroupDesc& g) {
  switch (g.kind) {
    case GroupKind::Free:
      return g.rank == 0 ? "1" : "F" + std::to_string(g.rank);
    case GroupKind::InfiniteCyclic:
      return "Z<" + g.gens[0] + ">";
    case GroupKind::FiniteCyclic:
      return g.order == 1 ? "1" : "Z/" + std::to_string(g.order) + "<" + g.gens[0] + ">";
    case GroupKind::Composite:
      return g.display.empty() ? "pi1(...)" : g.display;
  }
  return "?";
}

inline std::string sub_str(const VertexGroupDesc& g, const SubgroupDesc& h) {
  switch (h.kind) {
    case SubKind::Trivial:
      return "1";
    case SubKind::Whole:
      return "whole";
    case SubKind::FreeFactor: {
      std::string s = "<";
      for (size_t i = 0; i < h.basis.size(); ++i) s += (i ? "," : "") + g.gens[h.basis[i]];
      return s + ">";
    }
    case SubKind::CyclicPower:
      return "<" + g.gens[h.gen] + "^" + std::to_string(h.exponent) + ">";
  }
  return "?";
}

}  // namespace regnbhd
