// SPDX-License-Identifier: Apache-2.0
//
// Shared primitives: planar points, error types and seeded RNG streams.

#ifndef MSRL_COMMON_HPP_
#define MSRL_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace msrl {

// Planar position in meters (x east, y north).
struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline double distance(const GeoPoint& a, const GeoPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool is_finite(const GeoPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

// Converts degrees to a local equirectangular plane anchored at `origin`
// (lon/lat in degrees). Good to well under a meter across a city.
inline GeoPoint equirectangular(double lon_deg, double lat_deg,
                                double origin_lon_deg, double origin_lat_deg) {
  constexpr double kEarthRadius = 6371008.8;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double cos_lat = std::cos(origin_lat_deg * kDeg);
  return {(lon_deg - origin_lon_deg) * kDeg * kEarthRadius * cos_lat,
          (lat_deg - origin_lat_deg) * kDeg * kEarthRadius};
}

// -- errors -- //

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed tabular or config input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NoEdgesError : public Error {
 public:
  NoEdgesError() : Error("road network has no edges") {}
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (bad dimensions, action range...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A loss or metric became NaN during training.
class NanAbort : public Error {
 public:
  using Error::Error;
};

// -- random streams -- //

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic child stream `stream` of `seed`. Streams with different ids
// are statistically independent for practical purposes.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x5851F42D4C957F2DULL)));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace msrl

#endif  // MSRL_COMMON_HPP_
