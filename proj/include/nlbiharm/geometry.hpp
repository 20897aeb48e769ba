#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nlbiharm {

/// Node classification by signed distance to the domain boundary:
/// interior2d is Ω_2δ, the two collars partition Ω_δ\Ω_2δ and Ω\Ω_δ.
enum class RegionLabel : std::uint8_t {
  interior2d = 0,    // dist > 2δ
  collar_inner = 1,  // δ < dist <= 2δ
  collar_outer = 2,  // 0 < dist <= δ
  exterior = 3,      // dist <= 0
};

std::string to_string(RegionLabel label);

/// Bitmask over region labels, for selecting node subsets.
using RegionMask = unsigned;
constexpr RegionMask region_bit(RegionLabel label) {
  return 1u << static_cast<unsigned>(label);
}
constexpr RegionMask kRegionInterior2d = region_bit(RegionLabel::interior2d);
constexpr RegionMask kRegionCollarInner = region_bit(RegionLabel::collar_inner);
constexpr RegionMask kRegionCollarOuter = region_bit(RegionLabel::collar_outer);
constexpr RegionMask kRegionInDomain =
    kRegionInterior2d | kRegionCollarInner | kRegionCollarOuter;

struct Domain {
  enum class Shape { rectangle, disk };

  Shape shape;
  // rectangle
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  // disk
  double cx = 0, cy = 0, radius = 0;

  static Domain rectangle(double x0, double y0, double x1, double y1);
  static Domain disk(double cx, double cy, double radius);
  static Domain unit_square() { return rectangle(0, 0, 1, 1); }

  /// Analytic signed distance to ∂Ω: positive inside, negative outside,
  /// zero on the boundary. Rectangle uses the minimum of face distances.
  double signed_distance(double px, double py) const;

  /// Axis-aligned bounding box {x0, y0, x1, y1}.
  std::array<double, 4> bounding_box() const;
};

struct Node {
  int ix, iy;         // lattice coordinates in the bounding-box grid
  double x, y;        // cell-center position
  RegionLabel label;  // never exterior for stored nodes
};

/// Uniform cell-centered grid over the bounding box of a domain. Only
/// in-domain nodes (signed distance > 0) are stored and indexed; they are
/// ordered row-major by lattice index, which makes rebuilds bit-reproducible.
/// Immutable after construction.
class Discretization {
 public:
  static std::shared_ptr<const Discretization> build(const Domain& domain,
                                                     double h, double delta);

  const Domain& domain() const { return domain_; }
  double h() const { return h_; }
  double delta() const { return delta_; }
  int m() const { return m_; }  // round(delta / h)
  double cell_volume() const { return h_ * h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int i) const { return nodes_[i]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// In-domain node index at lattice position, or -1.
  int node_at(int ix, int iy) const {
    if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
    return lattice_to_node_[static_cast<std::size_t>(iy) * nx_ + ix];
  }

  int count(RegionLabel label) const {
    return label_counts_[static_cast<int>(label)];
  }

  /// All in-domain j != i with |x_j - x_i| < delta, sorted by j, with exact
  /// Euclidean distances (computed from integer lattice offsets).
  std::vector<std::pair<int, double>> neighbors_within_horizon(int i) const;

  /// CSV dump `index,x,y,label`, one row per in-domain node.
  void dump_nodes(std::ostream& os) const;

 private:
  Domain domain_;
  double h_ = 0, delta_ = 0;
  int m_ = 0, nx_ = 0, ny_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> lattice_to_node_;
  std::array<int, 4> label_counts_{};
};

}  // namespace nlbiharm
