// SPDX-License-Identifier: Apache-2.0
//
// Test-side reference implementations, written independently of the
// library code they check (plain loops, no shared helpers).

#ifndef MSRL_TESTS_ORACLES_HPP_
#define MSRL_TESTS_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

struct Edge {
  int a, b;
  double w;
};

// Minimum over all simple paths by exhaustive DFS; +inf if unreachable.
inline double brute_shortest(int n, const std::vector<Edge>& edges, int src, int dst) {
  if (src == dst) return 0.0;
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : edges) {
    adj[e.a].push_back({e.b, e.w});
    adj[e.b].push_back({e.a, e.w});
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> seen(n, false);
  std::function<void(int, double)> dfs = [&](int u, double len) {
    if (u == dst) {
      best = std::min(best, len);
      return;
    }
    seen[u] = true;
    for (auto [v, w] : adj[u])
      if (!seen[v]) dfs(v, len + w);
    seen[u] = false;
  };
  dfs(src, 0.0);
  return best;
}

// Gaussian KDE density by a plain loop.
inline double naive_density(const std::vector<double>& xs, const std::vector<double>& ys,
                            double h, double qx, double qy) {
  const double pi = 3.14159265358979323846;
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = qx - xs[i], dy = qy - ys[i];
    s += std::exp(-(dx * dx + dy * dy) / (2.0 * h * h)) / (2.0 * pi * h * h);
  }
  return s / static_cast<double>(xs.size());
}

// qhat_t = Q_t + sum_{k>=t} (gamma lam)^(k-t) delta_k, by a double loop.
inline std::vector<double> direct_qhat(const std::vector<double>& r, const std::vector<double>& q,
                                       double gamma, double lam) {
  const std::size_t n = r.size();
  std::vector<double> delta(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? q[t + 1] : 0.0;
    delta[t] = r[t] + gamma * next - q[t];
  }
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    double s = 0.0;
    for (std::size_t k = t; k < n; ++k) s += std::pow(gamma * lam, static_cast<double>(k - t)) * delta[k];
    out[t] = q[t] + s;
  }
  return out;
}

// Whole-slot latency from raw inputs, one vehicle, following the system
// model formulas directly.
struct LatencyInputs {
  double dist_serving, dist_target;
  double bw_up, bw_down_serving, bw_down_target, noise, power;
  double gain_coeff, carrier, light_speed;
  double request_bits, result_bits, alpha;
  double load_serving, load_target, compute_serving, compute_target, cycles_per_bit;
  double xi_serving, xi_target, migrated_bits, backhaul;
  bool same;
};

inline double reference_total_latency(const LatencyInputs& in) {
  const double pi = 3.14159265358979323846;
  auto h = [&](double d) {
    const double r = in.light_speed / (4 * pi * in.carrier * d);
    return in.gain_coeff * r * r;
  };
  auto rate = [&](double bw, double d) { return bw * std::log2(1 + in.power * h(d) / in.noise); };
  const double tu = in.request_bits / rate(in.bw_up, in.dist_serving);
  double td;
  if (in.same) {
    td = in.result_bits / rate(in.bw_down_serving, in.dist_serving);
  } else {
    td = (1 - in.alpha) * in.result_bits / rate(in.bw_down_serving, in.dist_serving) +
         in.alpha * in.result_bits / rate(in.bw_down_target, in.dist_target);
  }
  const double tm = in.same ? 0.0 : in.migrated_bits / in.backhaul;
  const double tpe = (in.load_serving + in.xi_serving * in.cycles_per_bit) / in.compute_serving;
  const double tpm = (in.load_target + in.xi_target * in.cycles_per_bit) / in.compute_target;
  const double tp = std::max(tpe, tpm + tm);
  return tu + tp + td;
}

}  // namespace oracle

#endif  // MSRL_TESTS_ORACLES_HPP_
