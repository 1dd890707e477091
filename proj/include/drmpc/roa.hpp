#pragma once

// Feasible-set (region of attraction) estimation on a grid, plus the
// realization experiment over random nominal parameter paths.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "drmpc/ftocp.hpp"

namespace drmpc {

struct GridSpec {
  Vec lower;
  Vec upper;
  std::vector<int> resolution;  // points per axis, >= 2

  static GridSpec over(const PolytopeH& box_of, int points_per_axis);
  int dim() const { return static_cast<int>(lower.size()); }
  std::size_t size() const;
  double spacing(int axis) const { return (upper(axis) - lower(axis)) / (resolution[axis] - 1); }
  double cell_volume() const;
  // Axis 0 varies fastest.
  Vec point(std::size_t index) const;
};

enum class SweepMethod { pointwise, row_interval };

struct SweepOptions {
  SweepMethod method = SweepMethod::pointwise;
  int threads = 1;
};

struct RoaResult {
  GridSpec grid;
  std::vector<char> feasible_mask;  // same indexing as GridSpec::point
  double area = 0.0;                // cells: count * cell volume
  std::optional<PolytopeV> hull_vertices;

  std::size_t feasible_count() const;
  std::vector<Vec> feasible_points() const;
};

RoaResult sweep(const CondensedFtocp& ftocp, const GridSpec& grid, const SweepOptions& opt = {});

enum class AreaMethod { cells, hull };
double area(const RoaResult& result, AreaMethod method);

struct RincRow {
  double mean_area = 0, min_area = 0, max_area = 0, r_avmin = 0, r_avmax = 0;
};

struct RincStat {
  double mean = 0, stddev = 0;
};

struct RincTable {
  double delta_max = 0;
  int realizations = 0;
  int resampled = 0;
  std::map<int, RincRow> per_n;
  std::map<int, RincStat> r_inc;  // key N: increase from N to N + 1 in percent
  std::vector<std::map<int, double>> areas;  // per realization
};

struct RincOptions {
  GainPolicy gain_policy = GainPolicy::shared;
  GridSpec grid;  // empty lower: bounding box of X at 121 points per axis
  SweepOptions sweep;
};

// model is used as given except Theta_Delta = [-delta_max, delta_max]^p.
RincTable rinc_experiment(const LpvModel& model, const StageCost& cost, int horizon_m, const std::vector<int>& n_list,
                          double delta_max, int realizations, std::uint64_t seed, const RincOptions& opt = {});

// FTOCP for one RoA evaluation; initial states restricted to the first-step
// tightened state set (X - D robust, X - W lpv).
FtocpSpec roa_spec(const LpvModel& model, Mode mode, const NominalSchedule& schedule,
                   const std::vector<DeadbeatPolicy>& policies, const StageCost& cost, int horizon_n,
                   const Terminal& terminal = {});

void write_mask_csv(std::ostream& os, const RoaResult& r);
// Feasible points, then a blank line, then the closed hull polyline.
void write_point_file(std::ostream& os, const RoaResult& r);

}  // namespace drmpc
