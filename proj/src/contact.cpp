#include "vic/contact.hpp"

#include <algorithm>
#include <cmath>

#include "vic/errors.hpp"

namespace vic {

void TableModel::validate() const {
  if (stiffness < 0.0 || damping < 0.0 || friction < 0.0 || viscous < 0.0)
    throw ConfigError("table stiffness, damping and friction must be non-negative");
}

ContactForce contact_force(const TableModel& table, const TaskVec& x, const TaskVec& xdot, double offset,
                           double offset_rate) {
  const auto m = x.size();
  const auto v = m - 1;
  ContactForce c;
  c.on_robot = TaskVec::Zero(m);
  c.penetration = table.height + offset - x(v);
  if (c.penetration <= 0.0) return c;
  c.in_contact = true;
  const double pen_rate = offset_rate - xdot(v);
  c.normal = std::max(0.0, table.stiffness * c.penetration + table.damping * pen_rate);
  c.on_robot(v) = c.normal;
  if (m > 1) {
    TaskVec ft = -table.viscous * xdot.head(v);
    const double cap = table.friction * c.normal;
    const double mag = ft.norm();
    if (mag > cap) ft *= cap / mag;
    c.on_robot.head(v) = ft;
  }
  return c;
}

}  // namespace vic
