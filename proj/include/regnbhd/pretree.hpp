#pragma once

// Finite pretrees: a point set with a strict betweenness relation satisfying
// T0-T3, stars (maximal sets of mutually adjacent points), and the
// realization as a bipartite tree with V0 = points and V1 = stars.

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "regnbhd/common.hpp"

namespace regnbhd {

struct Pretree {
  int n = 0;                                 // points are 0..n-1
  std::set<std::array<int, 3>> between;      // (x,y,z): y strictly between x and z

  bool has(int x, int y, int z) const { return between.count({x, y, z}) > 0; }
  void add(int x, int y, int z) {
    between.insert({x, y, z});
    between.insert({z, y, x});
  }
};

struct AxiomReport {
  bool ok = true;
  std::string axiom;         // first violated axiom, "T0".."T3"
  std::array<int, 4> witness{-1, -1, -1, -1};
};

inline AxiomReport check_axioms(const Pretree& p) {
  for (const auto& t : p.between) {
    auto [x, y, z] = t;
    if (x < 0 || y < 0 || z < 0 || x >= p.n || y >= p.n || z >= p.n)
      return {false, "T0", {x, y, z, -1}};
    if (x == z) return {false, "T0", {x, y, z, -1}};
    if (!p.has(z, y, x)) return {false, "T1", {x, y, z, -1}};
    if (p.has(x, z, y)) return {false, "T2", {x, y, z, -1}};
    for (int w = 0; w < p.n; ++w) {
      if (w == y) continue;
      if (!p.has(x, y, w) && !p.has(w, y, z)) return {false, "T3", {x, y, z, w}};
    }
  }
  return {};
}

/// Finite pretrees are discrete by definition; the windowed-infinite variant
/// lives in the corner calculus (is_discrete_window).
inline bool is_discrete(const Pretree&) { return true; }

inline bool adjacent(const Pretree& p, int x, int y) {
  if (x == y) return false;
  for (int z = 0; z < p.n; ++z)
    if (p.has(x, z, y)) return false;
  return true;
}

/// Maximal cliques of an adjacency matrix.
inline std::vector<std::vector<int>> stars_from_adjacency(int n, const std::vector<std::vector<bool>>& adj) {
  std::vector<std::vector<int>> out;
  // Bron-Kerbosch with pivoting
  std::function<void(std::vector<int>&, std::vector<int>, std::vector<int>)> bk =
      [&](std::vector<int>& r, std::vector<int> cand, std::vector<int> excl) {
        if (cand.empty() && excl.empty()) {
          if (r.size() >= 2 || n == 1) out.push_back(r);
          return;
        }
        int pivot = -1, best = -1;
        for (int u : cand) {
          int deg = 0;
          for (int v : cand) deg += adj[u][v];
          if (deg > best) best = deg, pivot = u;
        }
        for (int u : excl) {
          int deg = 0;
          for (int v : cand) deg += adj[u][v];
          if (deg > best) best = deg, pivot = u;
        }
        std::vector<int> branch;
        for (int v : cand)
          if (pivot < 0 || !adj[pivot][v]) branch.push_back(v);
        for (int v : branch) {
          std::vector<int> nc, ne;
          for (int u : cand)
            if (adj[u][v]) nc.push_back(u);
          for (int u : excl)
            if (adj[u][v]) ne.push_back(u);
          r.push_back(v);
          bk(r, nc, ne);
          r.pop_back();
          cand.erase(std::remove(cand.begin(), cand.end(), v), cand.end());
          excl.push_back(v);
        }
      };
  std::vector<int> r, cand, excl;
  for (int i = 0; i < n; ++i) cand.push_back(i);
  bk(r, cand, excl);
  for (auto& s : out) std::sort(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// Stars: maximal cliques of the adjacency relation.
inline std::vector<std::vector<int>> stars(const Pretree& p) {
  AxiomReport rep = check_axioms(p);
  check(rep.ok, Err::AxiomsFail, "pretree axioms fail at " + rep.axiom);
  std::vector<std::vector<bool>> adj(p.n, std::vector<bool>(p.n, false));
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) adj[i][j] = adjacent(p, i, j);
  return stars_from_adjacency(p.n, adj);
}

/// Bipartite tree produced by the star construction.
struct RealizedTree {
  int n_points = 0;
  std::vector<std::vector<int>> star_members;    // V1 vertices
  std::vector<std::pair<int, int>> edges;        // (point, star index)
  int vertices() const { return n_points + static_cast<int>(star_members.size()); }
};

inline RealizedTree realize_from_stars(int n_points, std::vector<std::vector<int>> star_members) {
  RealizedTree t;
  t.n_points = n_points;
  if (n_points <= 1) return t;  // a single point realizes as a lone V0 vertex
  t.star_members = std::move(star_members);
  for (int s = 0; s < static_cast<int>(t.star_members.size()); ++s)
    for (int x : t.star_members[s]) t.edges.push_back({x, s});
  // The construction yields a tree exactly when the axioms hold; verify.
  int n = t.n_points;
  int V = t.vertices();
  check(static_cast<int>(t.edges.size()) == V - 1, Err::AxiomsFail, "star construction did not produce a tree");
  std::vector<std::vector<int>> adj(V);
  for (auto [x, s] : t.edges) {
    adj[x].push_back(n + s);
    adj[n + s].push_back(x);
  }
  std::vector<bool> seen(V, false);
  std::vector<int> stack = {0};
  seen[0] = true;
  int cnt = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        ++cnt;
        stack.push_back(w);
      }
  }
  check(cnt == V, Err::AxiomsFail, "star construction did not produce a connected graph");
  return t;
}

inline RealizedTree realize_tree(const Pretree& p) { return realize_from_stars(p.n, p.n <= 1 ? std::vector<std::vector<int>>{} : stars(p)); }

/// Betweenness of the vertex set of a finite tree (edge list on 0..n-1).
inline Pretree vertex_pretree(int n, const std::vector<std::pair<int, int>>& edges) {
  Pretree p;
  p.n = n;
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  // BFS parents from every source; y between x and z iff y is interior to the path
  for (int x = 0; x < n; ++x) {
    std::vector<int> par(n, -2);
    std::vector<int> stack = {x};
    par[x] = -1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (par[w] == -2) {
          par[w] = v;
          stack.push_back(w);
        }
    }
    for (int z = 0; z < n; ++z) {
      if (z == x || par[z] == -2) continue;
      for (int y = par[z]; y != -1 && y != x; y = par[y]) p.add(x, y, z);
    }
  }
  return p;
}

/// Betweenness among the V0 vertices (points) of a realized tree.
inline Pretree points_betweenness(const RealizedTree& t) {
  std::vector<std::pair<int, int>> edges;
  for (auto [x, s] : t.edges) edges.push_back({x, t.n_points + s});
  Pretree full = vertex_pretree(t.vertices(), edges);
  Pretree p;
  p.n = t.n_points;
  for (const auto& tr : full.between) {
    auto [x, y, z] = tr;
    if (x < p.n && y < p.n && z < p.n) p.between.insert(tr);
  }
  return p;
}

}  // namespace regnbhd
