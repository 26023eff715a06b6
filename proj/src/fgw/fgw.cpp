#include "geoknit/fgw/fgw.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "geoknit/assign/hungarian.hpp"
#include "geoknit/error.hpp"
#include "geoknit/simd/kernels.hpp"

namespace geoknit {

BoxFeatures box_features(const BoxSet& boxes) {
  if (boxes.count == 0) throw Error("empty-set", "box_features of an empty set");
  if (boxes.dim != 6) throw Error("invalid-argument", "box_features needs 6 values per row");
  BoxFeatures f;
  const std::size_t n = boxes.count;
  Point3 centroid;
  for (std::size_t i = 0; i < n; ++i) {
    f.centers.push_back(boxes.center(i));
    centroid += f.centers.back();
  }
  centroid = (1.0 / static_cast<double>(n)) * centroid;
  double ms = 0.0;
  for (auto& c : f.centers) {
    c -= centroid;
    ms += squared_norm(c);
  }
  const double rms = std::sqrt(ms / static_cast<double>(n));
  const double scale = rms < 1e-12 ? 1.0 : 1.0 / rms;
  for (auto& c : f.centers) c = scale * c;
  for (std::size_t i = 0; i < n; ++i) {
    Point3 d = boxes.dims(i);
    for (int k = 0; k < 3; ++k) d[k] = std::max(std::abs(d[k]), 1e-9);
    f.ratios.push_back((1.0 / norm(d)) * d);
  }
  return f;
}

namespace {

using Matrix = std::vector<double>;

Matrix pairwise(const std::vector<Point3>& c) {
  const std::size_t n = c.size();
  Matrix d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = distance(c[i], c[j]);
  return d;
}

// out[n x m] = A[n x n] * X[n x m] * B[m x m]
void sandwich(const Matrix& a, const Matrix& x, const Matrix& b, std::size_t n, std::size_t m, Matrix& tmp,
              Matrix& out) {
  const auto& k = simd::kernels();
  tmp.assign(n * m, 0.0);
  k.gemm_acc(n, n, m, a.data(), n, x.data(), m, tmp.data(), m);
  out.assign(n * m, 0.0);
  k.gemm_acc(n, m, m, tmp.data(), m, b.data(), m, out.data(), m);
}

double inner(const Matrix& x, const Matrix& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

struct Problem {
  std::size_t n, m;
  Matrix a, b, a2, b2, feat;  // a2/b2: element-wise squares
  double lambda;
};

double objective(const Problem& pr, const Matrix& t, const Matrix& atb) {
  std::vector<double> p(pr.n, 0.0), q(pr.m, 0.0);
  for (std::size_t i = 0; i < pr.n; ++i)
    for (std::size_t j = 0; j < pr.m; ++j) {
      p[i] += t[i * pr.m + j];
      q[j] += t[i * pr.m + j];
    }
  double pa = 0.0, qb = 0.0;
  for (std::size_t i = 0; i < pr.n; ++i)
    for (std::size_t k = 0; k < pr.n; ++k) pa += p[i] * pr.a2[i * pr.n + k] * p[k];
  for (std::size_t j = 0; j < pr.m; ++j)
    for (std::size_t l = 0; l < pr.m; ++l) qb += q[j] * pr.b2[j * pr.m + l] * q[l];
  const double gw = std::max(0.0, pa + qb - 2.0 * inner(atb, t));
  return (1.0 - pr.lambda) * gw + pr.lambda * inner(pr.feat, t);
}

double marginal_error(const Matrix& t, std::size_t n, std::size_t m) {
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += t[i * m + j];
    err = std::max(err, std::abs(s - 1.0 / static_cast<double>(n)));
  }
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += t[i * m + j];
    err = std::max(err, std::abs(s - 1.0 / static_cast<double>(m)));
  }
  return err;
}

// Transportation LP with supplies m per row and demands n per column, solved
// by successive shortest paths (Bellman-Ford queue). Returns flow / (n*m).
Matrix transport_vertex(const Matrix& cost, std::size_t n, std::size_t m) {
  struct Edge {
    int to;
    long long cap;
    double cost;
  };
  const int src = static_cast<int>(n + m), dst = src + 1, nodes = dst + 1;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  auto add = [&](int u, int v, long long cap, double c) {
    adj[static_cast<std::size_t>(u)].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, cap, c});
    adj[static_cast<std::size_t>(v)].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, 0, -c});
  };
  const auto ln = static_cast<long long>(n), lm = static_cast<long long>(m);
  for (std::size_t i = 0; i < n; ++i) add(src, static_cast<int>(i), lm, 0.0);
  std::vector<int> cell_edge(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      cell_edge[i * m + j] = static_cast<int>(edges.size());
      add(static_cast<int>(i), static_cast<int>(n + j), std::min(ln, lm), cost[i * m + j]);
    }
  for (std::size_t j = 0; j < m; ++j) add(static_cast<int>(n + j), dst, ln, 0.0);

  long long remaining = ln * lm;
  const double inf = std::numeric_limits<double>::infinity();
  while (remaining > 0) {
    std::vector<double> dist(static_cast<std::size_t>(nodes), inf);
    std::vector<int> via(static_cast<std::size_t>(nodes), -1);
    std::vector<char> queued(static_cast<std::size_t>(nodes), 0);
    std::deque<int> queue{src};
    dist[static_cast<std::size_t>(src)] = 0.0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      queued[static_cast<std::size_t>(u)] = 0;
      for (int e : adj[static_cast<std::size_t>(u)]) {
        const Edge& ed = edges[static_cast<std::size_t>(e)];
        if (ed.cap <= 0) continue;
        const double nd = dist[static_cast<std::size_t>(u)] + ed.cost;
        // Relative slack keeps zero-cost cycles from looping on rounding.
        if (nd < dist[static_cast<std::size_t>(ed.to)] - 1e-14 * (1.0 + std::abs(nd))) {
          dist[static_cast<std::size_t>(ed.to)] = nd;
          via[static_cast<std::size_t>(ed.to)] = e;
          if (!queued[static_cast<std::size_t>(ed.to)]) {
            queued[static_cast<std::size_t>(ed.to)] = 1;
            queue.push_back(ed.to);
          }
        }
      }
    }
    if (via[static_cast<std::size_t>(dst)] < 0) throw Error("solver-failure", "transport LP infeasible");
    long long push = remaining;
    for (int v = dst; v != src; v = edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to)
      push = std::min(push, edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])].cap);
    for (int v = dst; v != src; v = edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to) {
      const auto e = static_cast<std::size_t>(via[static_cast<std::size_t>(v)]);
      edges[e].cap -= push;
      edges[e ^ 1].cap += push;
    }
    remaining -= push;
  }
  Matrix s(n * m);
  const double unit = 1.0 / static_cast<double>(n * m);
  for (std::size_t k = 0; k < n * m; ++k)
    s[k] = static_cast<double>(edges[static_cast<std::size_t>(cell_edge[k]) ^ 1].cap) * unit;
  return s;
}

Matrix linear_vertex(const Matrix& grad, std::size_t n, std::size_t m) {
  if (n != m) return transport_vertex(grad, n, m);
  CostMatrix c(n, m);
  c.data = grad;
  const Assignment as = hungarian(c, TieBreak::any);
  Matrix s(n * m, 0.0);
  for (auto [i, j] : as.pairs) s[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)] = 1.0 / static_cast<double>(n);
  return s;
}

}  // namespace

FgwResult fgw_distance(const BoxFeatures& fa, const BoxFeatures& fb, double lambda, const FgwOptions& options) {
  if (fa.size() == 0 || fb.size() == 0) throw Error("empty-set", "fgw_distance of an empty set");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("invalid-argument", "lambda must lie in [0, 1]");
  Problem pr;
  pr.n = fa.size();
  pr.m = fb.size();
  pr.lambda = lambda;
  pr.a = pairwise(fa.centers);
  pr.b = pairwise(fb.centers);
  pr.a2 = pr.a;
  pr.b2 = pr.b;
  for (double& x : pr.a2) x *= x;
  for (double& x : pr.b2) x *= x;
  pr.feat.resize(pr.n * pr.m);
  for (std::size_t i = 0; i < pr.n; ++i)
    for (std::size_t j = 0; j < pr.m; ++j) pr.feat[i * pr.m + j] = squared_norm(fa.ratios[i] - fb.ratios[j]);

  const std::size_t n = pr.n, m = pr.m;
  Matrix t(n * m, 1.0 / static_cast<double>(n * m));
  Matrix tmp, atb, adb, grad(n * m), dir(n * m);
  sandwich(pr.a, t, pr.b, n, m, tmp, atb);
  double f = objective(pr, t, atb);

  FgwResult res;
  res.objective.push_back(f);
  res.marginal_error.push_back(marginal_error(t, n, m));
  const double gw_weight = 1.0 - lambda;
  for (int it = 0; it < options.max_iterations; ++it) {
    for (std::size_t k = 0; k < n * m; ++k) grad[k] = -4.0 * gw_weight * atb[k] + lambda * pr.feat[k];
    const Matrix s = linear_vertex(grad, n, m);
    for (std::size_t k = 0; k < n * m; ++k) dir[k] = s[k] - t[k];
    sandwich(pr.a, dir, pr.b, n, m, tmp, adb);
    const double qa = -2.0 * gw_weight * inner(adb, dir);
    const double qb = inner(grad, dir);
    double gamma;
    if (qa > 0.0)
      gamma = std::clamp(-qb / (2.0 * qa), 0.0, 1.0);
    else
      gamma = qa + qb < 0.0 ? 1.0 : 0.0;
    res.iterations = it + 1;
    if (gamma <= 0.0) break;

    Matrix next(n * m);
    for (std::size_t k = 0; k < n * m; ++k) next[k] = t[k] + gamma * dir[k];
    Matrix next_atb;
    sandwich(pr.a, next, pr.b, n, m, tmp, next_atb);
    const double fn = objective(pr, next, next_atb);
    if (fn > f) break;  // rounding only; keep the better plan
    const double decrease = f - fn;
    t = std::move(next);
    atb = std::move(next_atb);
    f = fn;
    res.objective.push_back(f);
    res.marginal_error.push_back(marginal_error(t, n, m));
    if (f <= 0.0 || decrease <= options.relative_tolerance * std::abs(f + decrease)) break;
  }
  res.distance = f;
  res.plan = {n, m, std::move(t)};
  return res;
}

double fgw_objective(const BoxFeatures& a, const BoxFeatures& b, double lambda, const TransportPlan& plan) {
  const std::size_t n = a.size(), m = b.size();
  double gw = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double tij = plan(i, j);
      lin += squared_norm(a.ratios[i] - b.ratios[j]) * tij;
      if (tij == 0.0) continue;
      for (std::size_t i2 = 0; i2 < n; ++i2)
        for (std::size_t j2 = 0; j2 < m; ++j2) {
          const double w = distance(a.centers[i], a.centers[i2]) - distance(b.centers[j], b.centers[j2]);
          gw += w * w * tij * plan(i2, j2);
        }
    }
  return (1.0 - lambda) * gw + lambda * lin;
}

double d_reg(const BoxSet& candidate, const BoxSet& reference, double lambda) {
  return fgw_distance(box_features(candidate), box_features(reference), lambda).distance;
}

}  // namespace geoknit
