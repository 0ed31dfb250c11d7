#pragma once

namespace dperc {

/// Bridge approximation for the surface-critical curve at small bulk density.
struct MeanFieldInput {
    double p = 0.0;
    int d = 3;
    int s = 2;
    double sigma_c = 0.5;  // critical density of the s-dimensional defect lattice

    void validate() const;
};

struct MeanFieldResult {
    double value = 0.0;
    bool within_validity = true;  // false: formula went non-positive, value clamped to 0
};

/// sigma* ~ (sigma_c + (1-p^3)^{2(d-s)} - 1) / (1-p^3)^{2(d-s)}
MeanFieldResult sigma_star_mf(const MeanFieldInput& in);

/// sigma_c - 2(d-s)(1-sigma_c) p^3
double sigma_star_mf_cubic(const MeanFieldInput& in);

/// Default sigma_c: 1/2 for s = 2; other s must be supplied (returns 0).
double default_sigma_c(int s);

}  // namespace dperc
