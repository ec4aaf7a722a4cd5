/*
 * types.hh
 *
 * Shared vocabulary: state/input vectors, axis-aligned boxes and the
 * exception hierarchy used across the library.
 */

#ifndef SYMCTL_TYPES_HH_
#define SYMCTL_TYPES_HH_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symctl {

using Vec = std::vector<double>;
using StateId = std::size_t;
using InputId = std::size_t;

/* domain errors: invalid parameters, infeasible requests (CLI exit code 1) */
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/* file-level failures (CLI exit code 2) */
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/* non-finite derivative or state hit during integration */
class NumericalError : public Error {
public:
  using Error::Error;
};

/*
 * class: Box
 *
 * closed axis-aligned box [lower, upper] in R^n
 */
struct Box {
  Vec lower;
  Vec upper;

  Box() = default;
  Box(Vec lo, Vec hi);

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x, double eps = 0.0) const;
  bool intersects(const Box& other) const;
  /* componentwise intersection; may be empty (lower > upper somewhere) */
  Box intersection(const Box& other) const;
  bool empty() const;
  double width(std::size_t i) const { return upper[i] - lower[i]; }
  Vec center() const;
};

std::string format_vec(std::span<const double> v, int precision = 9);

} // namespace symctl

#endif
