/*
 * quantizers.hh
 *
 * Logarithmic (static) and zoom (dynamic) scalar quantizers, their
 * per-coordinate quantization bands, and the boxes ("cells") obtained as
 * products of bands clipped to a state box.
 */

#ifndef SYMCTL_QUANTIZERS_HH_
#define SYMCTL_QUANTIZERS_HH_

#include <optional>
#include <span>
#include <vector>

#include "symctl/types.hh"

namespace symctl {

/*
 * Base:    levels z_i = rho^(1-i) d, deadzone |z| <= d/(1+eta)
 * Shifted: levels (1+eta)^(k+1) d / (1-eta)^k, deadzone |z| <= d
 *
 * Both share the region shape [z/(1+eta), z/(1-eta)] around a level z;
 * they differ only in where the first level sits.
 */
enum class LogVariant { Base, Shifted };

struct LogQuantizerParams {
  double eta = 0.2;
  double d = 0.4;
  LogVariant variant = LogVariant::Shifted;

  void validate() const;
  double rho() const { return (1.0 - eta) / (1.0 + eta); }
  /* smallest positive level */
  double first_level() const;
  /* half-width of the deadzone */
  double deadzone() const { return first_level() / (1.0 + eta); }
  /* positive level number i >= 1 */
  double level(int i) const;
};

double log_quantize(double z, const LogQuantizerParams& p);

struct ZoomQuantizerParams {
  int M = 10;
  double Lambda = 1.0;
  double delta = 0.1;

  void validate() const;
  /* bin width Lambda*delta */
  double step() const { return Lambda * delta; }
  double range() const { return M * step(); }
  double error_bound() const { return step(); }
};

/* throws Error when delta == 0 */
double zoom_quantize(double z, const ZoomQuantizerParams& p);

/*
 * struct: Band
 *
 * one coordinate's quantization interval clipped to the box, plus the
 * level q owning it. Adjacent bands share endpoints.
 */
struct Band {
  double lower;
  double upper;
  double q;
};

/*
 * bands of the logarithmic quantizer over [lo, hi]. Regions whose level
 * falls outside [lo, hi] are merged into their inward neighbour.
 */
std::vector<Band> log_bands(double lo, double hi, const LogQuantizerParams& p);

/* bands of the zoom quantizer over [lo, hi]; same merge rule */
std::vector<Band> zoom_bands(double lo, double hi, const ZoomQuantizerParams& p);

/*
 * index of the band containing z; on a shared endpoint the band whose level
 * has the smaller magnitude wins. nullopt if z lies outside all bands.
 */
std::optional<std::size_t> locate_band(std::span<const Band> bands, double z);

/*
 * struct: Cell
 *
 * box region of the state set with the lattice point owning it. q need not
 * be the box center and, after boundary merging, need not lie in the box.
 */
struct Cell {
  Vec lower;
  Vec upper;
  Vec q;
  StateId id = 0;
  /* index of the logarithmic cell this one was cut from */
  std::size_t parent = 0;
  /* Lambda*delta of the zoom refinement that produced it; 0 if unrefined */
  double zoom_step = 0.0;

  Box box() const { return Box(lower, upper); }
};

/* product of per-coordinate log bands; row-major, coordinate 1 slowest */
std::vector<Cell> log_lattice(const Box& box, std::span<const LogQuantizerParams> per_coord);
std::vector<Cell> log_lattice(const Box& box, const LogQuantizerParams& p);

/* zoom refinement of one cell; delta == 0 returns the cell unchanged */
std::vector<Cell> zoom_lattice(const Cell& cell, const ZoomQuantizerParams& p);

} // namespace symctl

#endif
