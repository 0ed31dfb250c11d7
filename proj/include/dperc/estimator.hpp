#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dperc/convolution.hpp"

namespace dperc {

/// Canonical curves for several box sizes on one shared grid.
struct CrossingFamily {
    std::vector<int> sizes;    // L values, strictly increasing
    std::vector<double> grid;  // shared sigma (or p) grid
    std::vector<std::vector<double>> values;  // values[i][j]: size i at grid[j]
    std::optional<double> p;
    std::uint64_t realizations = 0;

    /// Checks shapes and ordering; throws std::invalid_argument.
    void validate() const;
    CrossingFamily without_smallest() const;
};

/// Sorts by L and checks shared grid, d, s, kind and p. Unless `force`,
/// also requires a shared seed, generator and realization count.
CrossingFamily make_family(std::vector<CanonicalCurve> curves, bool force = false);

/// Sum over ordered pairs (L, K) of (Q_L - Q_K)^2 at grid index j.
double e_squared(const CrossingFamily& family, std::size_t j);
std::vector<double> e_squared_profile(const CrossingFamily& family);

/// Location of the narrowest waist of one family.
struct WaistEstimate {
    double location = 0.0;
    double e2_min = 0.0;
    double half_width_2x = 0.0;  // stat error: half-width where E^2 <= 2 E^2_min
    double left_2x = 0.0, right_2x = 0.0;
    double left_4x = 0.0, right_4x = 0.0;
    bool clipped = false;        // a level interval ran into the grid edge
    bool multiple_minima = false;
};

/// Throws std::domain_error("grid too narrow") if the minimum sits on the grid edge.
WaistEstimate locate_waist(const CrossingFamily& family);

struct CriticalEstimate {
    double sigma_star = 0.0;
    double stat_err = 0.0;
    double sys_err = 0.0;
    double combined_err = 0.0;
    double e2_min = 0.0;
    WaistEstimate all_sizes;       // every L
    WaistEstimate drop_smallest;   // smallest L removed; the headline estimate
    std::optional<WaistEstimate> drop_two;  // two smallest removed, when >= 2 remain
    std::vector<int> sizes;
    std::optional<double> p;
    std::uint64_t realizations = 0;
    std::vector<std::string> warnings;
};

/**
 * Headline value and statistical error come from the family with its smallest
 * L removed; the systematic error is twice the shift relative to the estimate
 * over all L. Needs at least three box sizes.
 */
CriticalEstimate estimate_sigma_star(const CrossingFamily& family);

/// Percolation thresholds used for bound checks (0 if unknown).
double bond_threshold(int dim);

struct CurveTableRow {
    double p = 0.0;
    CriticalEstimate estimate;
    std::vector<std::string> flags;
};

struct CurveTable {
    int d = 0;
    int s = 0;
    std::vector<CurveTableRow> rows;  // sorted by p
    bool clean() const;
};

/// Flags rows violating p_c(d) <= sigma* <= p_c(s) beyond the combined error,
/// and consecutive rows where sigma* increases with p beyond the errors.
CurveTable curve_table(int d, int s, std::vector<CriticalEstimate> estimates);

std::string curve_table_csv(const CurveTable& table);

}  // namespace dperc
