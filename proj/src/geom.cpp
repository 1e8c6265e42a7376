#include "wlcap/geom.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace wlcap {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidParameter("uniform_index: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

NetworkInstance::NetworkInstance(std::vector<Point> points, std::uint64_t seed)
    : points_(std::move(points)), seed_(seed) {
  for (const auto& p : points_) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw InvalidParameter("NetworkInstance: point outside the unit square");
    }
  }
}

const Point& NetworkInstance::at(NodeId id) const {
  if (id >= points_.size()) throw InvalidParameter("unknown NodeId " + std::to_string(id));
  return points_[id];
}

CommRange::CommRange(double t) : t_(t) {
  if (!(t > 0.0 && t <= std::sqrt(2.0))) {
    throw InvalidParameter("CommRange: t must lie in (0, sqrt(2)]");
  }
}

NetworkInstance generate_network(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidParameter("generate_network: n must be >= 1");
  Rng rng = make_rng(seed, 0);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  return NetworkInstance(std::move(pts), seed);
}

double distance(const Point& p, const Point& q) { return std::sqrt(distance_sq(p, q)); }

double connectivity_range(std::size_t n, double c) {
  if (n < 2) throw InvalidParameter("connectivity_range: n must be >= 2");
  const double nn = static_cast<double>(n);
  return c * std::sqrt(std::log(nn) / nn);
}

std::vector<NodeId> nodes_in_disk(const NetworkInstance& net, const Point& center,
                                  double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("nodes_in_disk: radius must be positive");
  std::vector<NodeId> out;
  const double r2 = radius * radius;
  const auto pts = net.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (distance_sq(pts[i], center) <= r2) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

double union_of_disks_area(std::span<const Point> centers, double radius, int resolution) {
  if (resolution < 100) throw InvalidParameter("union_of_disks_area: resolution must be >= 100");
  if (centers.empty() || !(radius > 0.0)) return 0.0;
  const auto res = static_cast<std::size_t>(resolution);
  const double h = 1.0 / resolution;
  const double r2 = radius * radius;
  std::vector<std::uint8_t> covered(res * res, 0);
  auto to_index = [&](double v) {
    return std::clamp(static_cast<long>(std::floor(v * resolution)), 0L,
                      static_cast<long>(resolution) - 1);
  };
  for (const auto& c : centers) {
    const long i0 = to_index(c.x - radius), i1 = to_index(c.x + radius);
    const long j0 = to_index(c.y - radius), j1 = to_index(c.y + radius);
    for (long j = j0; j <= j1; ++j) {
      const double y = (static_cast<double>(j) + 0.5) * h;
      const double dy2 = (y - c.y) * (y - c.y);
      if (dy2 > r2) continue;
      auto* row = &covered[static_cast<std::size_t>(j) * res];
      for (long i = i0; i <= i1; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * h;
        if ((x - c.x) * (x - c.x) + dy2 <= r2) row[i] = 1;
      }
    }
  }
  const auto hits = std::count(covered.begin(), covered.end(), std::uint8_t{1});
  return static_cast<double>(hits) * h * h;
}

SpatialIndex::SpatialIndex(const NetworkInstance& net, double bucket_side)
    : points_(&net),
      side_(bucket_side),
      dim_(static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / bucket_side)))) {
  if (!(bucket_side > 0.0)) throw InvalidParameter("SpatialIndex: bucket side must be positive");
  // Cap the bucket count so tiny radii on big instances do not blow up memory.
  dim_ = std::min<std::size_t>(dim_, 2048);
  side_ = 1.0 / static_cast<double>(dim_);
  std::vector<std::uint32_t> count(dim_ * dim_ + 1, 0);
  std::vector<std::size_t> bucket(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto p = net[static_cast<NodeId>(i)];
    const auto b = static_cast<std::size_t>(clamp_bucket(p.y)) * dim_ +
                   static_cast<std::size_t>(clamp_bucket(p.x));
    bucket[i] = b;
    ++count[b + 1];
  }
  for (std::size_t b = 1; b < count.size(); ++b) count[b] += count[b - 1];
  start_ = count;
  ids_.resize(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) ids_[count[bucket[i]]++] = static_cast<NodeId>(i);
}

int SpatialIndex::clamp_bucket(double v) const {
  const long b = static_cast<long>(std::floor(v / side_));
  return static_cast<int>(std::clamp(b, 0L, static_cast<long>(dim_) - 1));
}

std::vector<NodeId> SpatialIndex::within(const Point& center, double radius) const {
  std::vector<NodeId> out;
  for_each_within(center, radius, [&](NodeId id) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

void write_network_csv(std::ostream& out, const NetworkInstance& net) {
  const auto old_precision = out.precision(12);
  out << "node_id,x,y\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& p = net[static_cast<NodeId>(i)];
    out << i << ',' << p.x << ',' << p.y << '\n';
  }
  out.precision(old_precision);
}

NetworkInstance read_network_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "node_id,x,y") {
    throw InvalidData("network CSV: expected header node_id,x,y");
  }
  std::vector<Point> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, x, y;
    if (!std::getline(row, id, ',') || !std::getline(row, x, ',') || !std::getline(row, y)) {
      throw InvalidData("network CSV: malformed row '" + line + "'");
    }
    if (std::stoul(id) != pts.size()) throw InvalidData("network CSV: node ids must be 0..n-1 in order");
    pts.push_back({std::stod(x), std::stod(y)});
  }
  return NetworkInstance(std::move(pts));
}

}  // namespace wlcap
