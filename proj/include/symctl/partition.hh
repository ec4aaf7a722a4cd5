/*
 * partition.hh
 *
 * Cover of the state box by logarithmic cells, optionally refined per cell
 * by a zoom quantizer. Owns the point-location map (the quantizer F).
 */

#ifndef SYMCTL_PARTITION_HH_
#define SYMCTL_PARTITION_HH_

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "symctl/quantizers.hh"

namespace symctl {

/* log cell index -> zoom parameters; delta == 0 keeps the cell */
using ZoomAssignments = std::map<std::size_t, ZoomQuantizerParams>;

class Partition {
public:
  Partition() = default;
  Partition(const Box& domain, std::vector<LogQuantizerParams> per_coord);

  /*
   * replace the assigned log cells by their zoom lattices. Cell ids are
   * reassigned in log-cell order; unrefined cells keep their relative order.
   */
  Partition refined(const ZoomAssignments& assignments) const;

  const Box& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim(); }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(StateId id) const { return cells_.at(id); }
  std::size_t size() const { return cells_.size(); }

  std::size_t log_cell_count() const { return log_ids_.size(); }
  /* ids of the cells cut from log cell k */
  std::span<const StateId> cells_of_log(std::size_t k) const { return log_ids_.at(k); }
  bool is_refined(std::size_t k) const { return zoom_.at(k).has_value(); }
  const ZoomAssignments& assignments() const { return assignments_; }

  /* log cell containing x (tie-break on shared faces) */
  std::optional<std::size_t> locate_log(std::span<const double> x) const;
  /* F(x): id of the cell containing x; nullopt outside the domain */
  std::optional<StateId> locate(std::span<const double> x) const;

  /* sorted ids of all cells meeting the closed box (touching counts) */
  std::vector<StateId> cells_intersecting(const Box& box) const;

private:
  struct ZoomGrid {
    ZoomQuantizerParams params;
    std::vector<std::vector<Band>> bands;
  };

  void rebuild_cells();

  Box domain_;
  std::vector<LogQuantizerParams> quantizers_;
  std::vector<std::vector<Band>> log_bands_;
  std::vector<std::optional<ZoomGrid>> zoom_;
  ZoomAssignments assignments_;
  std::vector<Cell> cells_;
  std::vector<std::vector<StateId>> log_ids_;
};

} // namespace symctl

#endif
