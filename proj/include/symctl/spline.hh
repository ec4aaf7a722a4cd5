/*
 * spline.hh
 *
 * Piecewise-linear hat functions on [a, b] and the operator that maps a
 * sampled state curve to its spline tube (knot cells).
 */

#ifndef SYMCTL_SPLINE_HH_
#define SYMCTL_SPLINE_HH_

#include <vector>

#include "symctl/abstraction.hh"

namespace symctl {

/*
 * class: SplineBasis
 *
 * N+2 hats s_0..s_{N+1} with knots a + j*h, h = (b-a)/(N+1). s_j is 1 at
 * its knot and falls linearly to 0 at the neighbouring knots. a == b is
 * allowed and collapses every knot onto a.
 */
class SplineBasis {
public:
  SplineBasis(int N, double a, double b);

  int N() const { return N_; }
  std::size_t size() const { return static_cast<std::size_t>(N_) + 2; }
  double a() const { return a_; }
  double b() const { return b_; }
  double h() const { return h_; }
  double knot(std::size_t j) const { return a_ + j * h_; }

  double value(std::size_t j, double t) const;
  /* indices j with s_j(t) != 0 */
  std::vector<std::size_t> active(double t) const;

private:
  int N_;
  double a_, b_, h_;
};

/* knot j of the tube is F(x(a + j h)); throws if a knot sample leaves X */
Tube psi2(const Segment& x, const Partition& partition, const SplineBasis& basis);

} // namespace symctl

#endif
