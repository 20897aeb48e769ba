#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>

#include "nlbiharm/geometry.hpp"

namespace nlbiharm {

/// Node-indexed scalar values over the in-domain nodes of one discretization.
/// Value-semantic; the discretization is shared and immutable.
struct Field {
  std::shared_ptr<const Discretization> disc;
  Eigen::VectorXd values;

  Field() = default;
  explicit Field(std::shared_ptr<const Discretization> d)
      : disc(std::move(d)), values(Eigen::VectorXd::Zero(disc->node_count())) {}
  Field(std::shared_ptr<const Discretization> d, Eigen::VectorXd v)
      : disc(std::move(d)), values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

/// Samples an analytic function at the in-domain nodes.
Field sample(std::shared_ptr<const Discretization> disc,
             const std::function<double(double, double)>& f);

/// Throws unless both fields live on the same discretization object.
void require_same_disc(const Field& a, const Field& b);
void require_disc(const Field& a,
                  const std::shared_ptr<const Discretization>& disc);

}  // namespace nlbiharm
