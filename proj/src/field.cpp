#include "nlbiharm/field.hpp"

#include "nlbiharm/errors.hpp"

namespace nlbiharm {

Field sample(std::shared_ptr<const Discretization> disc,
             const std::function<double(double, double)>& f) {
  Field out(disc);
  for (int i = 0; i < disc->node_count(); ++i) {
    out.values[i] = f(disc->node(i).x, disc->node(i).y);
  }
  return out;
}

void require_same_disc(const Field& a, const Field& b) {
  if (a.disc != b.disc || a.values.size() != b.values.size()) {
    throw config_error("fields live on different discretizations");
  }
}

void require_disc(const Field& a,
                  const std::shared_ptr<const Discretization>& disc) {
  if (a.disc != disc) {
    throw config_error("field does not belong to this operator's grid");
  }
  if (a.values.size() != disc->node_count()) {
    throw config_error("field length does not match node count");
  }
}

}  // namespace nlbiharm
