// SPDX-License-Identifier: Apache-2.0
//
// Small hand-built scenarios for tests.

#ifndef MSRL_TESTS_TEST_UTIL_HPP_
#define MSRL_TESTS_TEST_UTIL_HPP_

#include <limits>
#include <memory>
#include <vector>

#include "msrl/envsim.hpp"

namespace testutil {

inline msrl::Trajectory parked(msrl::GeoPoint p) {
  msrl::Trajectory t;
  t.points.push_back({0.0, p, std::nullopt});
  return t;
}

inline msrl::Trajectory straight(msrl::GeoPoint a, msrl::GeoPoint b, double duration) {
  msrl::Trajectory t;
  t.points.push_back({0.0, a, std::nullopt});
  t.points.push_back({duration, b, std::nullopt});
  return t;
}

// RSUs at `rsu_pos`, vehicles parked at `veh_pos`, no background traffic.
inline msrl::Scenario scenario(const std::vector<msrl::GeoPoint>& rsu_pos,
                               const std::vector<msrl::GeoPoint>& veh_pos,
                               double backhaul = 1e9) {
  msrl::Scenario s;
  for (std::size_t i = 0; i < rsu_pos.size(); ++i) {
    msrl::RsuSpec r;
    r.id = static_cast<int>(i);
    r.pos = rsu_pos[i];
    s.rsus.push_back(r);
  }
  const auto e = rsu_pos.size();
  s.backhaul.assign(e, std::vector<double>(e, backhaul));
  for (std::size_t i = 0; i < e; ++i) s.backhaul[i][i] = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < veh_pos.size(); ++v) {
    msrl::VehicleSpec vs;
    vs.id = static_cast<int>(v);
    vs.trajectory = parked(veh_pos[v]);
    s.vehicles.push_back(vs);
  }
  s.env.horizon = 10;
  s.env.latency_scale = 1.0;
  return s;
}

inline std::shared_ptr<const msrl::Scenario> shared(msrl::Scenario s) {
  return std::make_shared<const msrl::Scenario>(std::move(s));
}

}  // namespace testutil

#endif  // MSRL_TESTS_TEST_UTIL_HPP_
