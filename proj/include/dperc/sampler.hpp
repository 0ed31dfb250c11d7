#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dperc/disjoint_set.hpp"
#include "dperc/lattice.hpp"

namespace dperc {

enum class SweepKind : std::uint8_t { inhomogeneous, homogeneous };

std::string to_string(SweepKind k);
SweepKind parse_sweep_kind(const std::string& text);

/// Run metadata shared by microcanonical and canonical curves.
struct CurveMeta {
    LatticeSpec spec;
    SweepKind kind = SweepKind::inhomogeneous;
    std::optional<double> p;  // bulk density; absent for homogeneous sweeps
    std::uint64_t seed = 0;
    std::string rng;
    std::uint64_t realizations = 0;
    int face_pairs = 1;

    bool operator==(const CurveMeta&) const = default;
};

/**
 * Integer crossing counts indexed by the number of inserted edges.
 *
 * Each realization contributes `face_pairs` indicator trials. The threshold
 * histogram has S+2 bins; bin S+1 holds "never crossed". After finalize(),
 * counts[s] is the number of trials whose threshold is <= s.
 */
class MicrocanonicalCurve {
public:
    MicrocanonicalCurve() = default;
    MicrocanonicalCurve(CurveMeta meta, std::size_t edge_slots);

    /// Records one trial; threshold in 0..S, or S+1 for never crossed.
    void accumulate(std::uint32_t threshold);
    /// Adds another curve's histogram; metadata must agree except for realizations.
    void merge(const MicrocanonicalCurve& other);
    void finalize();

    bool finalized() const noexcept { return finalized_; }
    std::size_t edge_slots() const noexcept { return hist_.size() - 2; }  // S
    std::uint64_t trials() const noexcept { return trials_; }
    const std::vector<std::uint64_t>& threshold_histogram() const noexcept { return hist_; }
    /// Throws std::logic_error if not finalized.
    const std::vector<std::uint64_t>& counts() const;
    double fraction(std::size_t s) const;

    CurveMeta meta;

    /// Rebuilds a finalized curve from persisted counts.
    static MicrocanonicalCurve from_counts(CurveMeta meta, std::vector<std::uint64_t> counts,
                                           std::uint64_t trials);

private:
    std::vector<std::uint64_t> hist_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t trials_ = 0;
    bool finalized_ = false;
};

/// Face masks for the crossing indicator between A_k and A_-k, k = 1..pairs.
struct CrossingGeometry {
    std::vector<FaceMask> vertex_masks;
    int pairs = 1;
};

CrossingGeometry make_crossing_geometry(const LatticeSpec& spec, int face_pairs);

/// Immutable per-box state for the sweep kernels.
struct SweepSetup {
    LatticeSpec spec;
    EdgeTable table;
    CrossingGeometry geometry;
    std::vector<std::uint32_t> bulk_edges;    // indices into table.edges
    std::vector<std::uint32_t> defect_edges;  // indices into table.edges

    SweepSetup(const LatticeSpec& spec, int face_pairs, bool homogeneous = false);
};

/// Per-worker scratch space.
struct SweepWorkspace {
    DisjointSetForest forest;
    std::vector<std::uint32_t> order;
};

/**
 * One inhomogeneous realization: bulk edges open iff their uniform draw is
 * below p; then defect edges are inserted in a uniformly random order. The
 * result for pair k is the number of defect edges inserted when A_k and A_-k
 * first connect (0 if the bulk alone connects them), or S+1 if they never do.
 *
 * Bulk draw for edge e is stream position e; the permutation consumes
 * positions from E_tot on. The draws do not depend on p, so runs at
 * different p with the same key are coupled.
 */
void run_realization(const SweepSetup& setup, double p, std::uint64_t key, SweepWorkspace& ws,
                     std::span<std::uint32_t> thresholds);

/// Same as run_realization with an explicit defect insertion order
/// (a permutation of 0..S-1 indexing setup.defect_edges).
void replay_realization(const SweepSetup& setup, double p, std::uint64_t key,
                        std::span<const std::uint32_t> defect_order, SweepWorkspace& ws,
                        std::span<std::uint32_t> thresholds);

/// All E_tot edges in one random order; threshold in edge count.
void run_homogeneous_realization(const SweepSetup& setup, std::uint64_t key, SweepWorkspace& ws,
                                 std::span<std::uint32_t> thresholds);

struct SweepConfig {
    LatticeSpec spec;
    SweepKind kind = SweepKind::inhomogeneous;
    double p = 0.0;  // ignored for homogeneous sweeps
    std::uint64_t realizations = 0;
    std::uint64_t seed = 0;
    int face_pairs = 1;
};

/// Reference implementation: one thread, realizations in index order.
MicrocanonicalCurve sweep_serial(const SweepConfig& config);

/// OpenMP driver. Realization r uses stream_key(seed, r) and its own forest,
/// so the finalized counts are identical to sweep_serial for any worker count.
MicrocanonicalCurve sweep(const SweepConfig& config, int workers);

}  // namespace dperc
