#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "dperc/meanfield.hpp"

using namespace dperc;

namespace {

// Rearranged closed form: 1 - (1 - sigma_c) / (1 - p^3)^{2(d-s)}, in long double.
long double oracle(long double p, int d, int s, long double sc) {
    long double bridge = 1.0L;
    for (int i = 0; i < 2 * (d - s); ++i) bridge *= 1.0L - p * p * p;
    return 1.0L - (1.0L - sc) / bridge;
}

MeanFieldInput in(double p, int d = 3, int s = 2, double sc = 0.5) { return {p, d, s, sc}; }

}  // namespace

TEST_CASE("values") {
    CHECK(sigma_star_mf(in(0.0)).value == 0.5);
    CHECK(sigma_star_mf_cubic(in(0.0)) == 0.5);
    CHECK(std::abs(sigma_star_mf(in(0.1)).value - 0.498999) <= 1e-6);
    CHECK(sigma_star_mf(in(0.1)).value == doctest::Approx(static_cast<double>(oracle(0.1L, 3, 2, 0.5L))).epsilon(1e-14));
    CHECK(sigma_star_mf(in(0.2)).value == doctest::Approx(static_cast<double>(oracle(0.2L, 3, 2, 0.5L))).epsilon(1e-14));
    CHECK(std::abs(sigma_star_mf(in(0.2)).value - 0.491903) <= 1e-6);
    CHECK(sigma_star_mf_cubic(in(0.1)) == doctest::Approx(0.499));
}

TEST_CASE("shape on (0, 0.3]") {
    double prev = 1.0;
    double worst = 0.0;
    for (int i = 1; i <= 300; ++i) {
        const double p = 0.001 * i;
        const double full = sigma_star_mf(in(p)).value;
        const double cubic = sigma_star_mf_cubic(in(p));
        CHECK(full <= prev);
        // Bernoulli's inequality gives full <= cubic, i.e. a p^3 drop with A = 2(d-s)(1-sigma_c).
        CHECK(full <= cubic + 1e-15);
        // Next term: -(2k)(2k+1)/2 (1-sigma_c) p^6 = -1.5 p^6 for k = 1. Tiny p is all rounding.
        if (p >= 0.05) worst = std::max(worst, (cubic - full) / std::pow(p, 6));
        prev = full;
    }
    CHECK(worst >= 1.5);
    CHECK(worst < 1.6);
}

TEST_CASE("validity and inputs") {
    const MeanFieldResult r = sigma_star_mf(in(0.9, 5, 2, 0.1));
    CHECK_FALSE(r.within_validity);
    CHECK(r.value == 0.0);
    CHECK_THROWS(sigma_star_mf(in(0.1, 3, 3)));
    CHECK_THROWS(sigma_star_mf(in(-0.1)));
    CHECK_THROWS(sigma_star_mf(in(0.1, 3, 2, 1.0)));
    CHECK(default_sigma_c(2) == 0.5);
    CHECK(default_sigma_c(3) == 0.0);
}
