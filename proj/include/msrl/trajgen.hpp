// SPDX-License-Identifier: Apache-2.0
//
// Spatio-temporal trajectory synthesis over a road network: cleaning and
// segmentation, per-hour Gaussian KDE entry/exit models, shortest-path
// routes, speed-profile timing, uniform time interpolation and road
// correction.

#ifndef MSRL_TRAJGEN_HPP_
#define MSRL_TRAJGEN_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "msrl/common.hpp"
#include "msrl/io.hpp"
#include "msrl/roadnet.hpp"

namespace msrl {

inline constexpr int kHoursPerDay = 24;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kPi = 3.14159265358979323846;

struct TrajectoryPoint {
  double t = 0.0;  // seconds since epoch
  GeoPoint pos;
  std::optional<double> speed;  // m/s, raw input only
};

struct Trajectory {
  std::int64_t vehicle_id = 0;
  std::vector<TrajectoryPoint> points;
};

inline int hour_of(double t) {
  double s = std::fmod(t, kSecondsPerDay);
  if (s < 0) s += kSecondsPerDay;
  return std::clamp(static_cast<int>(s / 3600.0), 0, kHoursPerDay - 1);
}

struct GenConfig {
  double delta_t = 30.0;      // interpolation interval, s
  double bandwidth = 60.0;    // KDE bandwidth h, m
  double per_hour_count_scale = 1.0;
  double max_speed = 60.0;    // anomaly threshold, m/s
  double min_speed = 0.5;     // speeds below this are stationary, not samples
  double gap_split = 300.0;   // segmentation gap, s
  double day_start = 1201910400.0;  // midnight of the generated day
  std::uint64_t seed = 1;

  void validate() const {
    if (!(delta_t > 0)) throw ConfigError("gen.delta_t must be > 0");
    if (!(bandwidth > 0)) throw ConfigError("gen.bandwidth must be > 0");
    if (!(max_speed > 0)) throw ConfigError("gen.max_speed must be > 0");
    if (!(gap_split > 0)) throw ConfigError("gen.gap_split must be > 0");
    if (per_hour_count_scale < 0)
      throw ConfigError("gen.count_scale must be >= 0");
  }

  static GenConfig from(const KeyValueConfig& kv) {
    GenConfig c;
    c.delta_t = kv.get_double("gen.delta_t", c.delta_t);
    c.bandwidth = kv.get_double("gen.bandwidth", c.bandwidth);
    c.per_hour_count_scale = kv.get_double("gen.count_scale", c.per_hour_count_scale);
    c.max_speed = kv.get_double("gen.max_speed", c.max_speed);
    c.min_speed = kv.get_double("gen.min_speed", c.min_speed);
    c.gap_split = kv.get_double("gen.gap_split", c.gap_split);
    c.day_start = kv.get_double("gen.day_start", c.day_start);
    c.seed = static_cast<std::uint64_t>(kv.get_int("gen.seed", static_cast<long long>(c.seed)));
    c.validate();
    return c;
  }
};

// -- cleaning and map matching -- //

// Drops duplicate/non-increasing timestamps and points implying a speed above
// cfg.max_speed relative to the last kept point; splits at gaps longer than
// cfg.gap_split; discards segments shorter than two points.
inline std::vector<Trajectory> clean_and_segment(const Trajectory& raw,
                                                 const GenConfig& cfg) {
  std::vector<Trajectory> out;
  Trajectory cur{raw.vehicle_id, {}};
  auto flush = [&] {
    if (cur.points.size() >= 2) out.push_back(cur);
    cur.points.clear();
  };
  for (const auto& p : raw.points) {
    if (!std::isfinite(p.t) || !is_finite(p.pos)) continue;
    if (cur.points.empty()) {
      cur.points.push_back(p);
      continue;
    }
    const auto& last = cur.points.back();
    const double dt = p.t - last.t;
    if (dt <= 0.0) continue;
    if (dt > cfg.gap_split) {
      flush();
      cur.points.push_back(p);
      continue;
    }
    if (distance(last.pos, p.pos) / dt > cfg.max_speed) continue;
    cur.points.push_back(p);
  }
  flush();
  return out;
}

inline Trajectory map_to_roads(const Trajectory& traj, const RoadNetwork& net) {
  if (net.edges().empty()) throw NoEdgesError();
  Trajectory out = traj;
  for (auto& p : out.points) p.pos = map_match(net, p.pos).point;
  return out;
}

// -- kernel density model -- //

struct KdeModel {
  std::vector<GeoPoint> samples;
  double bandwidth = 1.0;
};

inline KdeModel fit_kde(std::vector<GeoPoint> points, double h) {
  if (points.empty()) throw ValidationError("fit_kde: empty point set");
  if (!(h > 0.0)) throw ValidationError("fit_kde: bandwidth must be > 0");
  return {std::move(points), h};
}

// f(x) = (1/n) sum_i K_h(x - x_i), K_h(d) = exp(-|d|^2 / 2h^2) / (2 pi h^2).
inline double density(const KdeModel& m, const GeoPoint& x) {
  const double h2 = m.bandwidth * m.bandwidth;
  const double norm = 1.0 / (2.0 * kPi * h2);
  double sum = 0.0;
  for (const auto& s : m.samples) {
    const double dx = x.x - s.x;
    const double dy = x.y - s.y;
    sum += std::exp(-(dx * dx + dy * dy) / (2.0 * h2));
  }
  return norm * sum / static_cast<double>(m.samples.size());
}

// Exact mixture sampler: a uniformly chosen data point plus isotropic
// Gaussian noise with standard deviation h.
inline std::vector<GeoPoint> sample_kde(const KdeModel& m, std::size_t count,
                                        Rng& rng) {
  std::vector<GeoPoint> out;
  out.reserve(count);
  std::normal_distribution<double> noise(0.0, m.bandwidth);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& c = m.samples[uniform_index(rng, m.samples.size())];
    const double dx = noise(rng);
    const double dy = noise(rng);
    out.push_back({c.x + dx, c.y + dy});
  }
  return out;
}

// -- mobility profile -- //

struct MobilityProfile {
  std::array<double, kHoursPerDay> hour_histogram{};
  std::array<std::vector<double>, kHoursPerDay> speed_samples;
  std::array<KdeModel, kHoursPerDay> entry_kde;
  std::array<KdeModel, kHoursPerDay> exit_kde;
  // Hours whose entry/exit (or speed) buckets were empty and fell back to the
  // all-day model.
  std::array<bool, kHoursPerDay> entry_fallback{};
  std::array<bool, kHoursPerDay> exit_fallback{};
  std::array<bool, kHoursPerDay> speed_fallback{};
};

// Hour histogram counts every point; speed samples come from consecutive
// point pairs (bucketed by the first point's hour); entry and exit models are
// fit on segment first/last points, both bucketed by the segment start hour.
// Empty buckets reuse the all-day model.
inline MobilityProfile build_profile(const std::vector<Trajectory>& segments,
                                     const GenConfig& cfg) {
  if (segments.empty()) throw ValidationError("build_profile: no segments");
  MobilityProfile prof;
  std::array<double, kHoursPerDay> counts{};
  std::array<std::vector<GeoPoint>, kHoursPerDay> entries, exits;
  std::vector<GeoPoint> all_entries, all_exits;
  std::vector<double> all_speeds;
  double total = 0.0;

  for (const auto& seg : segments) {
    if (seg.points.empty()) continue;
    for (std::size_t i = 0; i < seg.points.size(); ++i) {
      const auto& p = seg.points[i];
      counts[hour_of(p.t)] += 1.0;
      total += 1.0;
      if (i + 1 < seg.points.size()) {
        const auto& q = seg.points[i + 1];
        const double dt = q.t - p.t;
        if (dt > 0.0) {
          const double v = distance(p.pos, q.pos) / dt;
          if (v >= cfg.min_speed && v > 0.0) {
            prof.speed_samples[hour_of(p.t)].push_back(v);
            all_speeds.push_back(v);
          }
        }
      }
    }
    const int h = hour_of(seg.points.front().t);
    entries[h].push_back(seg.points.front().pos);
    exits[h].push_back(seg.points.back().pos);
    all_entries.push_back(seg.points.front().pos);
    all_exits.push_back(seg.points.back().pos);
  }
  if (total == 0.0) throw ValidationError("build_profile: no points");
  if (all_speeds.empty()) {
    throw ValidationError("build_profile: no positive speed samples");
  }
  for (int h = 0; h < kHoursPerDay; ++h) prof.hour_histogram[h] = counts[h] / total;

  const auto all_entry = fit_kde(all_entries, cfg.bandwidth);
  const auto all_exit = fit_kde(all_exits, cfg.bandwidth);
  for (int h = 0; h < kHoursPerDay; ++h) {
    prof.entry_fallback[h] = entries[h].empty();
    prof.exit_fallback[h] = exits[h].empty();
    prof.entry_kde[h] = entries[h].empty() ? all_entry : fit_kde(entries[h], cfg.bandwidth);
    prof.exit_kde[h] = exits[h].empty() ? all_exit : fit_kde(exits[h], cfg.bandwidth);
    if (prof.speed_samples[h].empty()) {
      prof.speed_fallback[h] = true;
      prof.speed_samples[h] = all_speeds;
    }
  }
  return prof;
}

// -- generation phases -- //

struct EntryExit {
  std::vector<GeoPoint> entries;
  std::vector<GeoPoint> exits;
};

inline constexpr double kEntryExitMinSeparation = 10.0;
inline constexpr int kExitResampleRetries = 10;
inline constexpr int kRouteRetries = 20;

inline EntryExit generate_entry_exit(const MobilityProfile& profile, int hour,
                                     std::size_t n, Rng& rng) {
  if (hour < 0 || hour >= kHoursPerDay) throw ContractError("hour out of range");
  EntryExit out;
  out.entries = sample_kde(profile.entry_kde[hour], n, rng);
  out.exits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    GeoPoint ex = sample_kde(profile.exit_kde[hour], 1, rng).front();
    for (int r = 0; r < kExitResampleRetries &&
                    distance(ex, out.entries[i]) < kEntryExitMinSeparation;
         ++r) {
      ex = sample_kde(profile.exit_kde[hour], 1, rng).front();
    }
    out.exits.push_back(ex);
  }
  return out;
}

// Node nearest to `p` among the endpoints of its matched edge.
inline NodeId nearest_node_via_edge(const RoadNetwork& net, const GeoPoint& p) {
  const auto proj = map_match(net, p);
  const auto& e = net.edges()[proj.edge_id];
  const double da = distance(proj.point, net.node(e.from_node).pos);
  const double db = distance(proj.point, net.node(e.to_node).pos);
  return db < da ? e.to_node : e.from_node;
}

inline Path generate_route(const GeoPoint& entry, const GeoPoint& exit,
                           const RoadNetwork& net) {
  return shortest_path(net, nearest_node_via_edge(net, entry),
                       nearest_node_via_edge(net, exit));
}

// t_{i+1} = t_i + d(TP_i, TP_{i+1}) / v_i with v_i drawn from the hour's
// empirical speed samples. Consecutive duplicate points are collapsed first.
inline Trajectory assign_times(const std::vector<GeoPoint>& path_points,
                               double start_t, const MobilityProfile& profile,
                               int hour, Rng& rng) {
  if (hour < 0 || hour >= kHoursPerDay) throw ContractError("hour out of range");
  const auto& speeds = profile.speed_samples[hour];
  if (speeds.empty()) throw ContractError("assign_times: no speed samples");
  std::vector<GeoPoint> pts;
  for (const auto& p : path_points) {
    if (pts.empty() || distance(pts.back(), p) > 0.0) pts.push_back(p);
  }
  if (pts.size() < 2) {
    throw ContractError("assign_times: fewer than two distinct points");
  }
  Trajectory out;
  double t = start_t;
  out.points.push_back({t, pts[0], std::nullopt});
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double v = speeds[uniform_index(rng, speeds.size())];
    t += distance(pts[i], pts[i + 1]) / v;
    out.points.push_back({t, pts[i + 1], std::nullopt});
  }
  return out;
}

// Resamples on the grid t_1 + j*dt (j = 0, 1, ...) up to the last original
// timestamp by linear interpolation between bracketing originals; the last
// original point is appended when it is off the grid.
inline Trajectory interpolate(const Trajectory& traj, double delta_t) {
  if (traj.points.size() < 2) throw ContractError("interpolate: need >= 2 points");
  if (!(delta_t > 0.0)) throw ContractError("interpolate: delta_t must be > 0");
  Trajectory out{traj.vehicle_id, {}};
  const auto& pts = traj.points;
  const double t0 = pts.front().t;
  const double t_end = pts.back().t;
  std::size_t i = 0;
  for (std::size_t j = 0;; ++j) {
    const double tj = t0 + static_cast<double>(j) * delta_t;
    if (tj > t_end) break;
    while (i + 2 < pts.size() && pts[i + 1].t <= tj) ++i;
    const auto& a = pts[i];
    const auto& b = pts[i + 1];
    const double s = (tj - a.t) / (b.t - a.t);
    GeoPoint p{a.pos.x + s * (b.pos.x - a.pos.x), a.pos.y + s * (b.pos.y - a.pos.y)};
    if (tj == b.t) p = b.pos;
    out.points.push_back({tj, p, std::nullopt});
  }
  if (out.points.back().t < t_end) {
    out.points.push_back({t_end, pts.back().pos, std::nullopt});
  }
  return out;
}

inline Trajectory correct(const Trajectory& traj, const RoadNetwork& net) {
  return map_to_roads(traj, net);
}

struct Dataset {
  std::vector<Trajectory> trajectories;
  std::size_t requested = 0;
  std::size_t skipped = 0;
};

// Per-hour counts round(total_count * weight * count_scale). Trajectory k
// draws from its own stream make_stream(seed, k), so the output does not
// depend on generation order.
inline Dataset generate_dataset(const MobilityProfile& profile,
                                const RoadNetwork& net, const GenConfig& cfg,
                                std::size_t total_count, std::uint64_t seed) {
  Dataset ds;
  std::int64_t k = 0;
  for (int hour = 0; hour < kHoursPerDay; ++hour) {
    const auto n = static_cast<std::size_t>(std::llround(
        static_cast<double>(total_count) * profile.hour_histogram[hour] *
        cfg.per_hour_count_scale));
    for (std::size_t i = 0; i < n; ++i, ++k) {
      ++ds.requested;
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(k));
      std::optional<Path> route;
      for (int attempt = 0; attempt < kRouteRetries && !route; ++attempt) {
        auto ee = generate_entry_exit(profile, hour, 1, rng);
        try {
          auto p = generate_route(ee.entries[0], ee.exits[0], net);
          if (p.nodes.size() >= 2) route = std::move(p);
        } catch (const UnreachableError&) {
        }
      }
      if (!route) {
        ++ds.skipped;
        continue;
      }
      std::vector<GeoPoint> pts;
      pts.reserve(route->nodes.size());
      for (auto id : route->nodes) pts.push_back(net.node(id).pos);
      const double start = cfg.day_start + hour * 3600.0 + 3600.0 * uniform01(rng);
      auto timed = assign_times(pts, start, profile, hour, rng);
      auto traj = correct(interpolate(timed, cfg.delta_t), net);
      traj.vehicle_id = k;
      ds.trajectories.push_back(std::move(traj));
    }
  }
  return ds;
}

// -- synthetic ground truth -- //

struct Hotspot {
  GeoPoint center;
  double sigma = 100.0;
  double weight = 1.0;
};

// Knobs for the synthetic "real" dataset used when no recorded trajectories
// are available.
struct SyntheticSource {
  std::array<double, kHoursPerDay> hour_weights{};
  std::array<double, kHoursPerDay> mean_speed{};  // m/s
  std::vector<Hotspot> hotspots;
  double sample_interval = 60.0;
  double gps_noise = 5.0;
  double day_start = 1201910400.0;
};

// Two commuter peaks over a low night-time floor; speeds dip at the peaks.
inline SyntheticSource default_synthetic_source(const RoadNetwork& net) {
  SyntheticSource src;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double am = std::exp(-0.5 * std::pow((h - 8.0) / 1.5, 2));
    const double pm = std::exp(-0.5 * std::pow((h - 18.0) / 2.0, 2));
    const double day = (h >= 6 && h <= 22) ? 0.35 : 0.0;
    src.hour_weights[h] = 0.05 + day + am + 0.8 * pm;
    src.mean_speed[h] = 14.0 - 6.0 * (am + 0.8 * pm) / 1.0;
  }
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const auto& n : net.nodes()) {
    min_x = std::min(min_x, n.pos.x);
    min_y = std::min(min_y, n.pos.y);
    max_x = std::max(max_x, n.pos.x);
    max_y = std::max(max_y, n.pos.y);
  }
  const double w = max_x - min_x;
  const double hgt = max_y - min_y;
  const double s = 0.08 * std::max(w, hgt);
  src.hotspots = {
      {{min_x + 0.50 * w, min_y + 0.50 * hgt}, s, 3.0},
      {{min_x + 0.20 * w, min_y + 0.75 * hgt}, s, 1.5},
      {{min_x + 0.80 * w, min_y + 0.25 * hgt}, s, 1.0},
      {{min_x + 0.75 * w, min_y + 0.80 * hgt}, s, 0.7},
  };
  return src;
}

inline std::size_t pick_weighted(Rng& rng, const double* w, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += w[i];
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < n; ++i) {
    if (u < w[i]) return i;
    u -= w[i];
  }
  return n - 1;
}

// Raw trips between hotspot-distributed endpoints, sampled every
// `sample_interval` seconds with Gaussian GPS noise.
inline std::vector<Trajectory> synthesize_source_trajectories(
    const RoadNetwork& net, const SyntheticSource& src, std::size_t count,
    std::uint64_t seed) {
  std::vector<Trajectory> out;
  std::vector<double> hw;
  for (const auto& h : src.hotspots) hw.push_back(h.weight);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng = make_stream(seed, k);
    const int hour = static_cast<int>(
        pick_weighted(rng, src.hour_weights.data(), src.hour_weights.size()));
    auto endpoint = [&] {
      const auto& hs = src.hotspots[pick_weighted(rng, hw.data(), hw.size())];
      std::normal_distribution<double> g(0.0, hs.sigma);
      const double dx = g(rng);
      const double dy = g(rng);
      return GeoPoint{hs.center.x + dx, hs.center.y + dy};
    };
    std::optional<Path> route;
    for (int attempt = 0; attempt < kRouteRetries && !route; ++attempt) {
      const GeoPoint a = endpoint();
      const GeoPoint b = endpoint();
      try {
        auto p = generate_route(a, b, net);
        if (p.nodes.size() >= 3) route = std::move(p);
      } catch (const UnreachableError&) {
      }
    }
    if (!route) continue;
    std::vector<GeoPoint> pts;
    for (auto id : route->nodes) pts.push_back(net.node(id).pos);
    Trajectory timed;
    double t = src.day_start + hour * 3600.0 + 3600.0 * uniform01(rng);
    std::lognormal_distribution<double> jitter(0.0, 0.2);
    timed.points.push_back({t, pts[0], std::nullopt});
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double v = src.mean_speed[hour] * jitter(rng);
      t += distance(pts[i], pts[i + 1]) / v;
      timed.points.push_back({t, pts[i + 1], std::nullopt});
    }
    auto sampled = interpolate(timed, src.sample_interval);
    std::normal_distribution<double> noise(0.0, src.gps_noise);
    for (auto& p : sampled.points) {
      const double dx = noise(rng);
      const double dy = noise(rng);
      p.pos.x += dx;
      p.pos.y += dy;
    }
    sampled.vehicle_id = static_cast<std::int64_t>(k);
    out.push_back(std::move(sampled));
  }
  return out;
}

// Full preparation: clean/segment every raw trajectory, then map-match.
inline std::vector<Trajectory> prepare_segments(const std::vector<Trajectory>& raw,
                                                const RoadNetwork& net,
                                                const GenConfig& cfg) {
  std::vector<Trajectory> segs;
  for (const auto& r : raw) {
    if (r.points.empty()) continue;
    for (auto& s : clean_and_segment(r, cfg)) segs.push_back(map_to_roads(s, net));
  }
  return segs;
}

// -- trajectory CSV and density grids -- //

inline std::vector<Trajectory> read_trajectories(std::istream& in) {
  CsvReader csv(in, {"vehicle_id", "t", "x", "y"});
  std::map<std::int64_t, Trajectory> by_id;
  std::vector<std::string> f;
  while (csv.next(f)) {
    const auto id = csv.integer(f[0], "vehicle_id");
    auto& tr = by_id[id];
    tr.vehicle_id = id;
    tr.points.push_back({csv.number(f[1], "t"),
                         {csv.number(f[2], "x"), csv.number(f[3], "y")},
                         std::nullopt});
  }
  std::vector<Trajectory> out;
  for (auto& [id, tr] : by_id) {
    std::stable_sort(tr.points.begin(), tr.points.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    out.push_back(std::move(tr));
  }
  return out;
}

inline std::string trajectories_csv(const std::vector<Trajectory>& trajs) {
  std::string out = "vehicle_id,t,x,y\n";
  for (const auto& tr : trajs) {
    for (const auto& p : tr.points) {
      out += std::to_string(tr.vehicle_id) + ',' + fmt_double(p.t) + ',' +
             fmt_double(p.pos.x) + ',' + fmt_double(p.pos.y) + '\n';
    }
  }
  return out;
}

struct DensityGrid {
  GeoPoint origin;
  double cell = 100.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> counts;  // row-major, index cy * nx + cx

  static DensityGrid covering(const RoadNetwork& net, double cell) {
    if (!(cell > 0)) throw ContractError("grid cell must be > 0");
    DensityGrid g;
    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    for (const auto& n : net.nodes()) {
      min_x = std::min(min_x, n.pos.x);
      min_y = std::min(min_y, n.pos.y);
      max_x = std::max(max_x, n.pos.x);
      max_y = std::max(max_y, n.pos.y);
    }
    g.origin = {min_x, min_y};
    g.cell = cell;
    g.nx = static_cast<int>(std::floor((max_x - min_x) / cell)) + 1;
    g.ny = static_cast<int>(std::floor((max_y - min_y) / cell)) + 1;
    g.counts.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
    return g;
  }

  void add(const GeoPoint& p) {
    const int cx = static_cast<int>(std::floor((p.x - origin.x) / cell));
    const int cy = static_cast<int>(std::floor((p.y - origin.y) / cell));
    if (cx < 0 || cy < 0 || cx >= nx || cy >= ny) return;
    counts[static_cast<std::size_t>(cy) * nx + cx] += 1.0;
  }

  void add(const std::vector<Trajectory>& trajs) {
    for (const auto& t : trajs)
      for (const auto& p : t.points) add(p.pos);
  }

  std::string csv() const {
    std::string out = "cell_x,cell_y,count\n";
    for (int cy = 0; cy < ny; ++cy) {
      for (int cx = 0; cx < nx; ++cx) {
        out += std::to_string(cx) + ',' + std::to_string(cy) + ',' +
               fmt_double(counts[static_cast<std::size_t>(cy) * nx + cx]) + '\n';
      }
    }
    return out;
  }
};

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw ContractError("pearson: size mismatch");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

inline std::array<double, kHoursPerDay> start_hour_histogram(
    const std::vector<Trajectory>& trajs) {
  std::array<double, kHoursPerDay> h{};
  double n = 0;
  for (const auto& t : trajs) {
    if (t.points.empty()) continue;
    h[hour_of(t.points.front().t)] += 1.0;
    n += 1.0;
  }
  if (n > 0)
    for (auto& v : h) v /= n;
  return h;
}

inline double total_variation(const std::array<double, kHoursPerDay>& a,
                              const std::array<double, kHoursPerDay>& b) {
  double s = 0;
  for (int i = 0; i < kHoursPerDay; ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace msrl

#endif  // MSRL_TRAJGEN_HPP_
