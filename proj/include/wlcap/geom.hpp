#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "wlcap/errors.hpp"

namespace wlcap {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using NodeId = std::uint32_t;

/// Random generator used for every stochastic quantity in the library.
///
/// Reproducibility contract (PRNG scheme "mt19937_64/v1"): a stream is a
/// std::mt19937_64 seeded with `derive_seed(seed, stream)`, and a uniform
/// double in [0,1) is `(engine() >> 11) * 2^-53`. Both the engine and this
/// conversion are fully specified, so instances are bit-identical across
/// standard libraries. std::uniform_real_distribution is deliberately not
/// used because its output is implementation-defined.
using Rng = std::mt19937_64;

/// splitmix64 finalizer over (seed, stream); gives independent substreams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection (no modulo bias).
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// n nodes in the unit square plus the seed that produced them.
class NetworkInstance {
 public:
  NetworkInstance() = default;
  /// Wraps explicit positions; every point must lie in [0,1]^2.
  explicit NetworkInstance(std::vector<Point> points, std::uint64_t seed = 0);

  std::size_t size() const noexcept { return points_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const Point> points() const noexcept { return points_; }
  const Point& operator[](NodeId id) const { return points_[id]; }
  const Point& at(NodeId id) const;

 private:
  std::vector<Point> points_;
  std::uint64_t seed_ = 0;
};

/// Common transmission range, T(n) in MPT/MPR modes and r(n) for point-to-point.
class CommRange {
 public:
  explicit CommRange(double t);
  double t() const noexcept { return t_; }
  double r() const noexcept { return t_; }

 private:
  double t_;
};

NetworkInstance generate_network(std::size_t n, std::uint64_t seed);

inline double distance_sq(const Point& p, const Point& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

double distance(const Point& p, const Point& q);

/// c * sqrt(ln n / n); natural log.
double connectivity_range(std::size_t n, double c = 1.0);

/// Ids of all nodes with |X_i - center| <= radius, ascending. The disk is
/// implicitly clipped by the unit square since no node lies outside it.
std::vector<NodeId> nodes_in_disk(const NetworkInstance& net, const Point& center,
                                  double radius);

/// Area of the union of equal-radius disks intersected with the unit square,
/// estimated on a resolution x resolution midpoint raster. The per-axis error is
/// O(1/resolution).
double union_of_disks_area(std::span<const Point> centers, double radius, int resolution);

/// Uniform bucket grid over the unit square for fixed-radius neighbour queries.
class SpatialIndex {
 public:
  SpatialIndex(const NetworkInstance& net, double bucket_side);

  /// Calls fn(id) for every node within `radius` of `center` (inclusive).
  template <typename Fn>
  void for_each_within(const Point& center, double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    const int i0 = clamp_bucket(center.x - radius);
    const int i1 = clamp_bucket(center.x + radius);
    const int j0 = clamp_bucket(center.y - radius);
    const int j1 = clamp_bucket(center.y + radius);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const auto b = static_cast<std::size_t>(j) * dim_ + static_cast<std::size_t>(i);
        for (std::uint32_t k = start_[b]; k < start_[b + 1]; ++k) {
          const NodeId id = ids_[k];
          if (distance_sq((*points_)[id], center) <= r2) fn(id);
        }
      }
    }
  }

  std::vector<NodeId> within(const Point& center, double radius) const;

 private:
  int clamp_bucket(double v) const;

  const NetworkInstance* points_;
  double side_;
  std::size_t dim_;
  std::vector<std::uint32_t> start_;
  std::vector<NodeId> ids_;
};

/// `node_id,x,y` with 12 significant digits.
void write_network_csv(std::ostream& out, const NetworkInstance& net);
NetworkInstance read_network_csv(std::istream& in);

}  // namespace wlcap
