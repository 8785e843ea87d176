// Exact solvers for the discrete transport linear program.
//
// solve_transportation: successive shortest paths with Johnson potentials on
// the dense bipartite graph, followed by support-cycle cancellation so the
// returned coupling is a vertex of the transport polytope (forest support,
// at most m+n-1 positive entries).
//
// max_flow_thresholded: Dinic's algorithm on the arcs admitted by a distance
// threshold; used for the bottleneck (p = inf) feasibility test.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "orbit_transport/errors.hpp"

namespace ot::detail {

inline constexpr double kMassEps = 1e-15;

// Minimize sum c_ij f_ij over couplings of (supplies, demands).
// Costs must be nonnegative and finite; callers normalize them into [0, 1].
inline std::vector<double> solve_transportation(const std::vector<double>& costs,
                                                const std::vector<double>& supplies,
                                                const std::vector<double>& demands) {
  const std::size_t m = supplies.size();
  const std::size_t n = demands.size();
  const std::size_t nodes = m + n;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> flow(m * n, 0.0);
  std::vector<double> rem_s = supplies;
  std::vector<double> rem_d = demands;
  std::vector<double> pot(nodes, 0.0);

  std::vector<double> dist(nodes);
  std::vector<int> prev(nodes);  // predecessor node, -1 for roots
  std::vector<char> done(nodes);

  double remaining = 0.0;
  for (double s : rem_s) remaining += s;

  const std::size_t max_rounds = 64 * nodes * nodes + 1024;
  for (std::size_t round = 0; remaining > 16 * kMassEps * static_cast<double>(m); ++round) {
    require(round < max_rounds, errc::solver_failure,
            "transportation solver exceeded its augmentation budget");

    // Multi-source Dijkstra over reduced costs (dense graph, O(nodes^2)).
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < m; ++i)
      if (rem_s[i] > kMassEps) dist[i] = 0.0;

    for (;;) {
      std::size_t u = nodes;
      double best = inf;
      for (std::size_t v = 0; v < nodes; ++v)
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      if (u == nodes) break;
      done[u] = 1;
      if (u < m) {
        for (std::size_t j = 0; j < n; ++j) {
          double rc = costs[u * n + j] + pot[u] - pot[m + j];
          if (rc < 0.0) rc = 0.0;  // clip fp drift in the invariant
          if (dist[u] + rc < dist[m + j]) {
            dist[m + j] = dist[u] + rc;
            prev[m + j] = static_cast<int>(u);
          }
        }
      } else {
        std::size_t j = u - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (flow[i * n + j] <= kMassEps) continue;
          double rc = -costs[i * n + j] + pot[m + j] - pot[i];
          if (rc < 0.0) rc = 0.0;
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            prev[i] = static_cast<int>(u);
          }
        }
      }
    }

    std::size_t sink = nodes;
    double best = inf;
    for (std::size_t j = 0; j < n; ++j)
      if (rem_d[j] > kMassEps && dist[m + j] < best) {
        best = dist[m + j];
        sink = m + j;
      }
    require(sink != nodes, errc::solver_failure,
            "no augmenting path although supply remains (inconsistent marginals)");

    // Walk back to the path root and find the augmentation amount.
    double delta = rem_d[sink - m];
    std::size_t v = sink;
    while (prev[v] != -1) {
      std::size_t u = static_cast<std::size_t>(prev[v]);
      if (v >= m) {
        // forward arc u -> v, unconstrained
      } else {
        delta = std::min(delta, flow[v * n + (u - m)]);  // backward arc
      }
      v = u;
    }
    delta = std::min(delta, rem_s[v]);

    std::size_t root = v;
    v = sink;
    while (prev[v] != -1) {
      std::size_t u = static_cast<std::size_t>(prev[v]);
      if (v >= m) {
        flow[u * n + (v - m)] += delta;
      } else {
        double& f = flow[v * n + (u - m)];
        f -= delta;
        if (f < kMassEps) f = 0.0;
      }
      v = u;
    }
    rem_s[root] -= delta;
    rem_d[sink - m] -= delta;
    if (rem_s[root] < kMassEps) rem_s[root] = 0.0;
    if (rem_d[sink - m] < kMassEps) rem_d[sink - m] = 0.0;
    remaining -= delta;

    double cap = dist[sink];
    for (std::size_t w = 0; w < nodes; ++w) pot[w] += std::min(dist[w], cap);
  }

  return flow;
}

// Cancels undirected cycles in the support graph. On an optimal coupling all
// support arcs have zero reduced cost, so cancellation never changes the
// objective; we still pick the non-increasing direction to absorb roundoff.
inline void cancel_support_cycles(std::vector<double>& flow, std::size_t m, std::size_t n,
                                  const std::vector<double>& costs) {
  const std::size_t nodes = m + n;
  for (std::size_t pass = 0; pass <= m * n + 8; ++pass) {
    // DFS for a cycle in the bipartite support graph.
    std::vector<int> parent(nodes, -2);  // -2 unvisited, -1 root
    std::vector<std::size_t> cyc;
    bool found = false;

    for (std::size_t start = 0; start < nodes && !found; ++start) {
      if (parent[start] != -2) continue;
      std::vector<std::size_t> stack{start};
      parent[start] = -1;
      while (!stack.empty() && !found) {
        std::size_t u = stack.back();
        stack.pop_back();
        if (u < m) {
          for (std::size_t j = 0; j < n && !found; ++j) {
            if (flow[u * n + j] <= 0.0) continue;
            std::size_t v = m + j;
            if (parent[v] == -2) {
              parent[v] = static_cast<int>(u);
              stack.push_back(v);
            } else if (parent[u] != static_cast<int>(v)) {
              found = true;
              // cycle = path(u) up to lca with path(v); both are tree paths
              std::vector<std::size_t> pu{u}, pv{v};
              for (int w = parent[u]; w >= 0; w = parent[static_cast<std::size_t>(w)])
                pu.push_back(static_cast<std::size_t>(w));
              for (int w = parent[v]; w >= 0; w = parent[static_cast<std::size_t>(w)])
                pv.push_back(static_cast<std::size_t>(w));
              // trim to the lowest common ancestor
              std::vector<char> on_pu(nodes, 0);
              for (std::size_t w : pu) on_pu[w] = 1;
              std::size_t lca = pv[0];
              for (std::size_t w : pv) {
                if (on_pu[w]) {
                  lca = w;
                  break;
                }
              }
              cyc.clear();
              for (std::size_t w : pu) {
                cyc.push_back(w);
                if (w == lca) break;
              }
              std::vector<std::size_t> tail;
              for (std::size_t w : pv) {
                if (w == lca) break;
                tail.push_back(w);
              }
              std::reverse(tail.begin(), tail.end());
              for (std::size_t w : tail) cyc.push_back(w);
            }
          }
        } else {
          std::size_t j = u - m;
          for (std::size_t i = 0; i < m && !found; ++i) {
            if (flow[i * n + j] <= 0.0) continue;
            std::size_t v = i;
            if (parent[v] == -2) {
              parent[v] = static_cast<int>(u);
              stack.push_back(v);
            } else if (parent[u] != static_cast<int>(v)) {
              found = true;
              std::vector<std::size_t> pu{u}, pv{v};
              for (int w = parent[u]; w >= 0; w = parent[static_cast<std::size_t>(w)])
                pu.push_back(static_cast<std::size_t>(w));
              for (int w = parent[v]; w >= 0; w = parent[static_cast<std::size_t>(w)])
                pv.push_back(static_cast<std::size_t>(w));
              std::vector<char> on_pu(nodes, 0);
              for (std::size_t w : pu) on_pu[w] = 1;
              std::size_t lca = pv[0];
              for (std::size_t w : pv) {
                if (on_pu[w]) {
                  lca = w;
                  break;
                }
              }
              cyc.clear();
              for (std::size_t w : pu) {
                cyc.push_back(w);
                if (w == lca) break;
              }
              std::vector<std::size_t> tail;
              for (std::size_t w : pv) {
                if (w == lca) break;
                tail.push_back(w);
              }
              std::reverse(tail.begin(), tail.end());
              for (std::size_t w : tail) cyc.push_back(w);
            }
          }
        }
      }
    }
    if (!found) return;

    // cyc alternates source/sink nodes; close it and cancel.
    const std::size_t len = cyc.size();
    double dcost = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      std::size_t a = cyc[k];
      std::size_t b = cyc[(k + 1) % len];
      std::size_t i = std::min(a, b);
      std::size_t j = std::max(a, b) - m;
      double sgn = (k % 2 == 0) ? +1.0 : -1.0;
      dcost += sgn * costs[i * n + j];
    }
    double parity = (dcost > 0.0) ? -1.0 : +1.0;  // never increase the objective
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < len; ++k) {
      std::size_t a = cyc[k];
      std::size_t b = cyc[(k + 1) % len];
      std::size_t i = std::min(a, b);
      std::size_t j = std::max(a, b) - m;
      double sgn = parity * ((k % 2 == 0) ? +1.0 : -1.0);
      if (sgn < 0.0) delta = std::min(delta, flow[i * n + j]);
    }
    for (std::size_t k = 0; k < len; ++k) {
      std::size_t a = cyc[k];
      std::size_t b = cyc[(k + 1) % len];
      std::size_t i = std::min(a, b);
      std::size_t j = std::max(a, b) - m;
      double sgn = parity * ((k % 2 == 0) ? +1.0 : -1.0);
      double& f = flow[i * n + j];
      f += sgn * delta;
      if (f <= kMassEps) f = 0.0;
    }
  }
  fail(errc::solver_failure, "support-cycle cancellation did not reach a forest");
}

// Dinic max flow on source -> i -> j -> sink with arcs (i, j) admitted by
// `allowed`. Returns the routed mass and the bipartite flows.
inline double max_flow_thresholded(const std::vector<double>& supplies,
                                   const std::vector<double>& demands,
                                   const std::vector<char>& allowed,
                                   std::vector<double>& flow_out) {
  const std::size_t m = supplies.size();
  const std::size_t n = demands.size();
  const std::size_t S = m + n, T = m + n + 1, nodes = m + n + 2;
  const double inf = std::numeric_limits<double>::infinity();

  struct Arc {
    std::size_t to;
    double cap;
    std::size_t rev;
  };
  std::vector<std::vector<Arc>> g(nodes);
  auto add_arc = [&](std::size_t a, std::size_t b, double cap) {
    g[a].push_back({b, cap, g[b].size()});
    g[b].push_back({a, 0.0, g[a].size() - 1});
  };
  for (std::size_t i = 0; i < m; ++i) add_arc(S, i, supplies[i]);
  for (std::size_t j = 0; j < n; ++j) add_arc(m + j, T, demands[j]);
  std::vector<std::pair<std::size_t, std::size_t>> arc_of(m * n,
                                                          {std::size_t(-1), std::size_t(-1)});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (allowed[i * n + j]) {
        arc_of[i * n + j] = {i, g[i].size()};
        add_arc(i, m + j, inf);
      }

  std::vector<int> level(nodes);
  std::vector<std::size_t> iter(nodes);
  auto bfs = [&]() {
    std::fill(level.begin(), level.end(), -1);
    std::queue<std::size_t> q;
    level[S] = 0;
    q.push(S);
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (const Arc& a : g[u])
        if (a.cap > kMassEps && level[a.to] < 0) {
          level[a.to] = level[u] + 1;
          q.push(a.to);
        }
    }
    return level[T] >= 0;
  };
  std::function<double(std::size_t, double)> dfs = [&](std::size_t u, double f) -> double {
    if (u == T) return f;
    for (std::size_t& it = iter[u]; it < g[u].size(); ++it) {
      Arc& a = g[u][it];
      if (a.cap > kMassEps && level[a.to] == level[u] + 1) {
        double d = dfs(a.to, std::min(f, a.cap));
        if (d > 0.0) {
          a.cap -= d;
          g[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  };

  double total = 0.0;
  while (bfs()) {
    std::fill(iter.begin(), iter.end(), 0);
    for (double f; (f = dfs(S, inf)) > 0.0;) total += f;
  }

  flow_out.assign(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto [node, idx] = arc_of[i * n + j];
      if (node != std::size_t(-1)) {
        const Arc& a = g[node][idx];
        flow_out[i * n + j] = g[a.to][a.rev].cap;  // routed mass sits on the reverse arc
      }
    }
  return total;
}

}  // namespace ot::detail
