#include "nlbiharm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nlbiharm/errors.hpp"

namespace nlbiharm {

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::interior2d: return "interior2d";
    case RegionLabel::collar_inner: return "collar_inner";
    case RegionLabel::collar_outer: return "collar_outer";
    case RegionLabel::exterior: return "exterior";
  }
  return "?";
}

Domain Domain::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) {
    throw config_error("rectangle domain requires x1 > x0 and y1 > y0");
  }
  Domain d;
  d.shape = Shape::rectangle;
  d.x0 = x0;
  d.y0 = y0;
  d.x1 = x1;
  d.y1 = y1;
  return d;
}

Domain Domain::disk(double cx, double cy, double radius) {
  if (!(radius > 0)) throw config_error("disk domain requires radius > 0");
  Domain d;
  d.shape = Shape::disk;
  d.cx = cx;
  d.cy = cy;
  d.radius = radius;
  return d;
}

double Domain::signed_distance(double px, double py) const {
  if (shape == Shape::rectangle) {
    return std::min(std::min(px - x0, x1 - px), std::min(py - y0, y1 - py));
  }
  return radius - std::hypot(px - cx, py - cy);
}

std::array<double, 4> Domain::bounding_box() const {
  if (shape == Shape::rectangle) return {x0, y0, x1, y1};
  return {cx - radius, cy - radius, cx + radius, cy + radius};
}

namespace {

RegionLabel classify(double dist, double delta) {
  if (dist <= 0.0) return RegionLabel::exterior;
  if (dist > 2.0 * delta) return RegionLabel::interior2d;
  if (dist > delta) return RegionLabel::collar_inner;
  return RegionLabel::collar_outer;
}

}  // namespace

std::shared_ptr<const Discretization> Discretization::build(
    const Domain& domain, double h, double delta) {
  if (!(h > 0)) throw config_error("grid spacing h must be > 0");
  if (delta < 3.0 * h - 1e-12 * delta) {
    throw config_error("horizon under-resolved: delta >= 3h required");
  }
  auto disc = std::make_shared<Discretization>();
  disc->domain_ = domain;
  disc->h_ = h;
  disc->delta_ = delta;
  disc->m_ = static_cast<int>(std::lround(delta / h));

  const auto box = domain.bounding_box();
  const double wx = box[2] - box[0];
  const double wy = box[3] - box[1];
  disc->nx_ = static_cast<int>(std::lround(wx / h));
  disc->ny_ = static_cast<int>(std::lround(wy / h));
  if (std::abs(disc->nx_ * h - wx) > 1e-9 * std::max(1.0, wx) ||
      std::abs(disc->ny_ * h - wy) > 1e-9 * std::max(1.0, wy)) {
    throw config_error("h does not divide the domain bounding box");
  }

  disc->lattice_to_node_.assign(
      static_cast<std::size_t>(disc->nx_) * disc->ny_, -1);
  for (int iy = 0; iy < disc->ny_; ++iy) {
    for (int ix = 0; ix < disc->nx_; ++ix) {
      const double x = box[0] + (ix + 0.5) * h;
      const double y = box[1] + (iy + 0.5) * h;
      const RegionLabel label = classify(domain.signed_distance(x, y), delta);
      disc->label_counts_[static_cast<int>(label)]++;
      if (label == RegionLabel::exterior) continue;
      disc->lattice_to_node_[static_cast<std::size_t>(iy) * disc->nx_ + ix] =
          static_cast<std::int32_t>(disc->nodes_.size());
      disc->nodes_.push_back(Node{ix, iy, x, y, label});
    }
  }
  if (disc->nodes_.empty()) throw config_error("grid has no in-domain nodes");
  return disc;
}

std::vector<std::pair<int, double>> Discretization::neighbors_within_horizon(
    int i) const {
  const Node& n = nodes_.at(i);
  std::vector<std::pair<int, double>> out;
  const int reach = m_;  // offsets beyond round(delta/h) cannot satisfy r < delta
  const double q_max = (delta_ / h_) * (delta_ / h_);
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const int q = dx * dx + dy * dy;
      if (q == 0 || static_cast<double>(q) >= q_max) continue;
      const int j = node_at(n.ix + dx, n.iy + dy);
      if (j >= 0) out.emplace_back(j, h_ * std::sqrt(static_cast<double>(q)));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Discretization::dump_nodes(std::ostream& os) const {
  os << "index,x,y,label\n";
  for (int i = 0; i < node_count(); ++i) {
    const Node& n = nodes_[i];
    os << i << ',' << n.x << ',' << n.y << ',' << to_string(n.label) << '\n';
  }
}

}  // namespace nlbiharm
