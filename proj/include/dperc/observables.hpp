#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dperc/lattice.hpp"

namespace dperc {

/// Origin cluster as grown in B(N). Sizes are as-of-stop when the growth
/// reached the box boundary.
struct ClusterSample {
    std::uint64_t vertices = 0;  // |C|
    std::uint64_t edges = 0;     // ||C||
    bool touched_boundary = false;
};

/// Precomputed per-vertex flags for a free-boundary box B(N).
class ClusterBox {
public:
    explicit ClusterBox(const LatticeSpec& spec);

    const LatticeSpec& spec() const noexcept { return spec_; }
    VertexId origin() const noexcept { return origin_; }
    std::size_t vertex_count() const noexcept { return flags_.size(); }
    std::int64_t stride(int axis) const noexcept { return stride_[axis]; }
    bool on_boundary(VertexId v) const noexcept { return flags_[v] & kBoundary; }
    bool in_plane(VertexId v) const noexcept { return flags_[v] & kPlane; }

private:
    static constexpr std::uint8_t kBoundary = 1;
    static constexpr std::uint8_t kPlane = 2;
    LatticeSpec spec_;
    VertexId origin_ = 0;
    std::vector<std::int64_t> stride_;
    std::vector<std::uint8_t> flags_;
};

/// Scratch buffers reused across samples by one worker.
struct ClusterWorkspace {
    std::vector<std::uint32_t> seen;
    std::vector<std::uint32_t> done;
    std::vector<VertexId> queue;
    std::uint32_t epoch = 0;
};

/**
 * Grows the origin cluster breadth-first, deciding each edge on first touch:
 * the edge with id (lower vertex * d + axis) is open iff uniform_at(key, id)
 * is below sigma (defect edge) or p (bulk edge). Edge states are a function
 * of (key, id) alone, so clusters for different (p, sigma) under one key are
 * nested.
 */
ClusterSample sample_origin_cluster(const ClusterBox& box, double p, double sigma, std::uint64_t key,
                                    ClusterWorkspace& ws);

struct ClusterConfig {
    LatticeSpec spec;  // spec.L is the box half-side N
    double p = 0.0;
    double sigma = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// Integer histograms of |C| and ||C|| over samples that did not reach the boundary.
struct ClusterDistribution {
    LatticeSpec spec;
    double p = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string rng;
    std::vector<std::uint64_t> hist_v;
    std::vector<std::uint64_t> hist_e;
    std::uint64_t boundary_count = 0;
    std::uint64_t samples = 0;

    void add(const ClusterSample& s);
    void merge(const ClusterDistribution& other);
    double prob_vertices(std::size_t n) const;  // P(|C| = n), finite clusters
    double prob_edges(std::size_t n) const;
    double boundary_fraction() const;
};

/// Sample i uses stream_key(seed, i); indices [begin, end) are drawn.
ClusterDistribution sample_distribution_serial(const ClusterConfig& config);
ClusterDistribution sample_distribution(const ClusterConfig& config, int workers);
ClusterDistribution sample_distribution_range(const ClusterConfig& config, std::uint64_t begin,
                                              std::uint64_t end, int workers);

/// 1 - sum_n (1-gamma)^n P(|C|=n); boundary-touching samples count as infinite.
double ghost_theta(const ClusterDistribution& dist, double gamma);
/// sum_n n (1-gamma)^n P(|C|=n); gamma = 0 gives the finite-cluster susceptibility.
double ghost_chi(const ClusterDistribution& dist, double gamma);

struct DecayCandidate {
    double alpha = 0.0;
    double rate = 0.0;       // c in log P(|C|>=n) ~ a - c n^alpha
    double intercept = 0.0;  // a
    double rss = 0.0;        // residual sum of squares
};

struct DecayFit {
    bool conclusive = false;
    std::string note;
    std::size_t window_lo = 0;
    std::size_t window_hi = 0;
    std::size_t points = 0;
    std::vector<DecayCandidate> candidates;
    double selected_alpha = 0.0;
};

/// {1, (d-1)/d, (s-1)/s}: exponential, bulk-supercritical, surface-supercritical.
std::vector<double> regime_exponents(int d, int s);

/**
 * Fits log P(|C| >= n) (finite clusters) against a - c n^alpha for each
 * alpha, over every n from the 75th percentile of the size distribution up
 * to the last n with at least 300 finite samples at or beyond it, by
 * ordinary least squares. Fewer
 * than 10 populated bins in the window gives an inconclusive result.
 */
DecayFit decay_fit(std::span<const std::uint64_t> hist, std::uint64_t samples,
                   std::span<const double> exponents);
DecayFit decay_fit(const ClusterDistribution& dist, std::span<const double> exponents);

struct AuditConfig {
    LatticeSpec spec;  // spec.L is N
    double p = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    double h = 0.02;
    std::uint64_t samples_per_point = 0;
    std::uint64_t seed = 0;
    int blocks = 20;  // jackknife blocks
};

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;   // rhs - lhs
    double stderr_ = 0.0; // jackknife over sample blocks
    bool pass = false;    // slack >= -3 stderr
};

struct AuditReport {
    AuditConfig config;
    double theta = 0.0;
    double dtheta_dp = 0.0;
    double dtheta_dsigma = 0.0;
    double dtheta_dgamma = 0.0;
    double chi_homogeneous = 0.0;
    InequalityCheck first;   // q . grad theta <= 2d (1-gamma) chi^H theta dtheta/dgamma
    InequalityCheck second;  // theta <= gamma dtheta/dgamma + theta^2 + chi^H theta (p . grad theta)
    bool pass = false;
};

/// Central-difference audit of the two ghost-field differential inequalities
/// at (p, sigma, gamma); requires p <= sigma.
AuditReport inequality_audit(const AuditConfig& config, int workers);

}  // namespace dperc
