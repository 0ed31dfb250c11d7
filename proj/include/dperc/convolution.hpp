#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dperc/sampler.hpp"

namespace dperc {

/// Binomial(n, x) probabilities for k = first .. first + weights.size() - 1.
/// Terms outside the stored window are below double resolution of the sum.
struct BinomialWeights {
    std::size_t first = 0;
    std::vector<double> weights;
};

/// Built by the multiplicative recurrence outward from the mode, then
/// renormalized. For n > 10^4 the window is cut at 8 standard deviations.
BinomialWeights binomial_weights(std::size_t n, double x);

struct CanonicalPoint {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// sum_s Binom(S, s; x) counts[s] / trials, with a binomial-proportion error.
CanonicalPoint convolve(const MicrocanonicalCurve& curve, double x);

/// Canonical crossing curve on a grid of densities. For inhomogeneous
/// sweeps the variable is the defect density sigma; for homogeneous sweeps
/// it is the bulk density p.
struct CanonicalCurve {
    CurveMeta meta;
    std::size_t edge_slots = 0;
    std::uint64_t trials = 0;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> stderrs;

    std::string variable() const { return meta.kind == SweepKind::homogeneous ? "p" : "sigma"; }
};

CanonicalCurve canonical_curve(const MicrocanonicalCurve& curve, std::span<const double> grid);

/// Inclusive arithmetic grid start, start+step, ..., stop.
std::vector<double> make_grid(double start, double stop, double step);

/// Parses "start:stop:step" or a comma-separated list of values.
std::vector<double> parse_grid(const std::string& text);

}  // namespace dperc
