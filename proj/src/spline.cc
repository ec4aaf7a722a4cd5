/*
 * spline.cc
 */

#include "symctl/spline.hh"

#include <cmath>
#include <string>

namespace symctl {

SplineBasis::SplineBasis(int N, double a, double b) : N_(N), a_(a), b_(b) {
  if (N < 0)
    throw Error("spline basis: N must be >= 0");
  if (b < a)
    throw Error("spline basis: need a <= b");
  h_ = (b - a) / (N + 1);
}

double SplineBasis::value(std::size_t j, double t) const {
  if (j >= size())
    return 0.0;
  if (h_ == 0.0)
    return j == 0 ? 1.0 : 0.0;
  if (t < a_ || t > b_)
    return 0.0;
  const double s = 1.0 - std::fabs(t - knot(j)) / h_;
  return s > 0.0 ? s : 0.0;
}

std::vector<std::size_t> SplineBasis::active(double t) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < size(); ++j)
    if (value(j, t) != 0.0)
      out.push_back(j);
  return out;
}

Tube psi2(const Segment& x, const Partition& partition, const SplineBasis& basis) {
  Tube tube;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    Vec p = x.at(basis.knot(j));
    auto id = partition.locate(p);
    if (!id)
      throw Error("psi2: sample " + format_vec(p) + " at t = " + std::to_string(basis.knot(j)) +
                  " lies outside the state box");
    tube.knots.push_back(*id);
  }
  return tube;
}

} // namespace symctl
