#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dperc/estimator.hpp"

namespace dperc {

/// $DPERC_OUT_DIR if set, else the current directory.
std::filesystem::path default_output_dir();
int default_workers();

struct SweepOptions {
    int d = 3;
    int s = 2;
    std::vector<int> sizes;
    std::vector<double> p_values;
    std::uint64_t realizations = 0;
    std::uint64_t seed = 1;
    int workers = 1;
    int face_pairs = 1;
    std::filesystem::path out_dir;
};

/// One microcanonical curve file per (p, L); returns the paths written.
std::vector<std::filesystem::path> cmd_sweep(const SweepOptions& opt);

struct ConvolveOptions {
    std::vector<std::filesystem::path> inputs;
    std::vector<double> grid;
    std::string format = "json";  // json | csv
    std::filesystem::path out_dir;
};

std::vector<std::filesystem::path> cmd_convolve(const ConvolveOptions& opt);

struct EstimateOptions {
    std::vector<std::filesystem::path> inputs;  // canonical curve files
    bool force = false;
    std::filesystem::path out_dir;
    std::string name = "estimate";
};

/// Groups inputs by p and estimates each group. Writes <name>.json with every
/// estimate and, for inhomogeneous groups, the <name>.csv curve table.
std::vector<CriticalEstimate> cmd_estimate(const EstimateOptions& opt);

struct ClusterDistOptions {
    int d = 3;
    int s = 2;
    int N = 10;
    double p = 0.1;
    double sigma = 0.1;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string format = "json";
    std::filesystem::path out_dir;
};

/// Writes the distribution and its decay-fit report; returns the fit's selected alpha (if conclusive).
std::optional<double> cmd_cluster_dist(const ClusterDistOptions& opt);

struct MeanFieldOptions {
    int d = 3;
    int s = 2;
    std::optional<double> sigma_c;
    std::vector<double> p_grid;
    std::filesystem::path out;  // empty: stdout
};

/// CSV columns p,sigma_mf,sigma_mf_cubic,within_validity.
std::string cmd_meanfield(const MeanFieldOptions& opt);

struct AnimalsOptions {
    int d = 3;
    int s = 2;
    std::optional<int> max_edges;
    int workers = 1;
    bool force = false;
    std::filesystem::path out_dir;
};

/// Writes census CSV and an audit JSON; returns true if every identity held.
bool cmd_animals(const AnimalsOptions& opt);

struct AuditOptions {
    int d = 3;
    int s = 2;
    int N = 10;
    double p = 0.05;
    double sigma = 0.2;
    double gamma = 0.1;
    double h = 0.02;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    int workers = 1;
    std::filesystem::path out_dir;
};

bool cmd_audit_inequalities(const AuditOptions& opt);

struct HomogOptions {
    int d = 3;
    std::vector<int> sizes;
    std::vector<double> grid;
    std::uint64_t realizations = 0;
    std::uint64_t seed = 1;
    int workers = 1;
    std::filesystem::path out_dir;
};

/// Homogeneous sweeps (defect plane ignored), canonical curves in p and a crossing estimate.
CriticalEstimate cmd_homog(const HomogOptions& opt);

}  // namespace dperc
