#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "dperc/observables.hpp"
#include "dperc/rng.hpp"

using namespace dperc;

namespace {

ClusterDistribution hand_distribution(std::vector<std::uint64_t> hist_v, std::uint64_t boundary = 0) {
    ClusterDistribution d;
    d.hist_v = std::move(hist_v);
    d.boundary_count = boundary;
    for (auto c : d.hist_v) d.samples += c;
    d.samples += boundary;
    return d;
}

// Expected counts from a survival function G(n) = P(|C| >= n), G(1) = 1.
std::vector<std::uint64_t> histogram_from_survival(double (*G)(double), std::uint64_t samples) {
    std::vector<std::uint64_t> h(1, 0);
    for (int n = 1; n < 10000; ++n) {
        const double mass = G(n) - G(n + 1);
        const auto c = static_cast<std::uint64_t>(std::llround(mass * static_cast<double>(samples)));
        if (c == 0 && G(n) * samples < 1) break;
        h.push_back(c);
    }
    return h;
}

}  // namespace

TEST_CASE("trivial clusters") {
    const ClusterBox box({3, 2, 4, Boundary::free});
    ClusterWorkspace ws;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const ClusterSample c = sample_origin_cluster(box, 0.0, 0.0, stream_key(1, k), ws);
        CHECK(c.vertices == 1);
        CHECK(c.edges == 0);
        CHECK_FALSE(c.touched_boundary);
        CHECK(sample_origin_cluster(box, 1.0, 0.3, stream_key(1, k), ws).touched_boundary);
    }
}

TEST_CASE("size bounds hold for every finite sample") {
    const ClusterBox box({3, 2, 8, Boundary::free});
    ClusterWorkspace ws;
    for (std::uint64_t k = 0; k < 20000; ++k) {
        const ClusterSample c = sample_origin_cluster(box, 0.2, 0.45, stream_key(4, k), ws);
        if (c.touched_boundary) continue;
        CHECK(c.edges <= 3 * c.vertices);
        CHECK(c.vertices <= c.edges + 1);
    }
}

TEST_CASE("isolated origin frequency") {
    ClusterConfig cfg;
    cfg.spec = {3, 2, 6, Boundary::free};
    cfg.p = 0.1;
    cfg.sigma = 0.1;
    cfg.samples = 100000;
    cfg.seed = 17;
    const ClusterDistribution dist = sample_distribution(cfg, 2);
    const double exact = std::pow(0.9, 6);
    CHECK(exact == doctest::Approx(0.531441));
    const double se = std::sqrt(exact * (1 - exact) / cfg.samples);
    CHECK(std::abs(dist.prob_vertices(1) - exact) <= 3 * se);

    // Inhomogeneous split (1-p)^{2(d-s)} (1-sigma)^{2s}.
    cfg.spec = {4, 2, 5, Boundary::free};
    cfg.p = 0.2;
    cfg.sigma = 0.35;
    const ClusterDistribution d4 = sample_distribution(cfg, 2);
    const double e4 = std::pow(0.8, 4) * std::pow(0.65, 4);
    CHECK(std::abs(d4.prob_vertices(1) - e4) <= 3 * std::sqrt(e4 * (1 - e4) / cfg.samples));
}

TEST_CASE("serial and parallel sampling agree exactly") {
    ClusterConfig cfg;
    cfg.spec = {3, 2, 6, Boundary::free};
    cfg.p = 0.15;
    cfg.sigma = 0.4;
    cfg.samples = 20000;
    cfg.seed = 8;
    const ClusterDistribution ref = sample_distribution_serial(cfg);
    std::uint64_t total = ref.boundary_count;
    for (auto c : ref.hist_v) total += c;
    CHECK(total == ref.samples);
    for (int w : {1, 3, 8}) {
        const ClusterDistribution par = sample_distribution(cfg, w);
        CHECK(par.hist_v == ref.hist_v);
        CHECK(par.hist_e == ref.hist_e);
        CHECK(par.boundary_count == ref.boundary_count);
    }
}

TEST_CASE("coupled clusters are nested in p and sigma") {
    const ClusterBox box({3, 2, 6, Boundary::free});
    ClusterWorkspace ws;
    for (std::uint64_t k = 0; k < 5000; ++k) {
        const std::uint64_t key = stream_key(31, k);
        const ClusterSample a = sample_origin_cluster(box, 0.1, 0.3, key, ws);
        const ClusterSample b = sample_origin_cluster(box, 0.15, 0.3, key, ws);
        const ClusterSample c = sample_origin_cluster(box, 0.15, 0.45, key, ws);
        if (a.touched_boundary) CHECK(b.touched_boundary);
        if (b.touched_boundary) CHECK(c.touched_boundary);
        if (!b.touched_boundary) CHECK(a.vertices <= b.vertices);
        if (!c.touched_boundary) CHECK(b.vertices <= c.vertices);
    }
}

TEST_CASE("boundary fraction and theta increase along coupled grids") {
    ClusterConfig cfg;
    cfg.spec = {3, 2, 6, Boundary::free};
    cfg.p = 0.1;
    cfg.samples = 20000;
    cfg.seed = 2;
    double prev_frac = -1.0, prev_theta = -1.0;
    for (double sigma : {0.2, 0.3, 0.4, 0.5, 0.6}) {
        cfg.sigma = sigma;
        const ClusterDistribution d = sample_distribution(cfg, 2);
        CHECK(d.boundary_fraction() >= prev_frac);
        const double th = ghost_theta(d, 0.1);
        CHECK(th >= prev_theta);
        prev_frac = d.boundary_fraction();
        prev_theta = th;
        double g_prev = -1.0;
        for (double g : {0.05, 0.1, 0.3, 0.6, 0.9}) {
            CHECK(ghost_theta(d, g) >= g_prev);
            g_prev = ghost_theta(d, g);
        }
    }
}

TEST_CASE("ghost-field hand sums") {
    const auto one = hand_distribution({0, 4});
    CHECK(ghost_theta(one, 0.5) == doctest::Approx(0.5));
    CHECK(ghost_chi(one, 0.0) == doctest::Approx(1.0));
    CHECK(ghost_theta(one, 0.999999) == doctest::Approx(1.0).epsilon(1e-5));

    const auto two = hand_distribution({0, 1, 1});
    CHECK(ghost_theta(two, 0.5) == doctest::Approx(1.0 - (0.5 * 0.5 + 0.5 * 0.25)));
    CHECK(ghost_theta(two, 0.5) == doctest::Approx(0.625));
    CHECK(ghost_chi(two, 0.0) == doctest::Approx(1.5));
    CHECK(ghost_chi(two, 0.5) == doctest::Approx(0.5));

    // Boundary samples count toward theta only.
    const auto mixed = hand_distribution({0, 1}, 1);
    CHECK(ghost_theta(mixed, 0.5) == doctest::Approx(0.75));
    CHECK(ghost_chi(mixed, 0.0) == doctest::Approx(0.5));

    CHECK_THROWS(ghost_theta(two, 0.0));
    CHECK_THROWS(ghost_theta(two, 1.0));
    CHECK_THROWS(ghost_chi(two, 1.0));
}

TEST_CASE("chi equals (1-gamma) dtheta/dgamma") {
    ClusterConfig cfg;
    cfg.spec = {3, 2, 6, Boundary::free};
    cfg.p = 0.12;
    cfg.sigma = 0.35;
    cfg.samples = 20000;
    cfg.seed = 5;
    const ClusterDistribution d = sample_distribution(cfg, 2);
    for (double g : {0.1, 0.3, 0.5}) {
        const double h = 1e-4;
        const double fd = (ghost_theta(d, g + h) - ghost_theta(d, g - h)) / (2 * h);
        CHECK((1 - g) * fd == doctest::Approx(ghost_chi(d, g)).epsilon(1e-6));
    }
}

TEST_CASE("decay fit on synthetic tails") {
    const auto exps = regime_exponents(3, 2);
    REQUIRE(exps.size() == 3);
    CHECK(exps[0] == 1.0);
    CHECK(exps[1] == doctest::Approx(2.0 / 3.0));
    CHECK(exps[2] == doctest::Approx(0.5));

    SUBCASE("exponential") {
        const auto h = histogram_from_survival([](double n) { return std::exp(-0.3 * (n - 1)); }, 100000);
        const DecayFit fit = decay_fit(h, 100000, exps);
        REQUIRE(fit.conclusive);
        CHECK(fit.selected_alpha == 1.0);
        CHECK(std::abs(fit.candidates[0].rate - 0.3) <= 0.01);
    }
    SUBCASE("stretched, two thirds") {
        const auto h =
            histogram_from_survival([](double n) { return std::exp(-(std::pow(n, 2.0 / 3.0) - 1.0)); }, 100000);
        const DecayFit fit = decay_fit(h, 100000, exps);
        REQUIRE(fit.conclusive);
        CHECK(fit.selected_alpha == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("flat") {
        std::vector<std::uint64_t> h(11, 1000);
        h[0] = 0;
        const DecayFit fit = decay_fit(h, 10000, exps);
        CHECK_FALSE(fit.conclusive);
        CHECK_FALSE(fit.note.empty());
    }
}

TEST_CASE("inequality audit") {
    AuditConfig cfg;
    cfg.spec = {3, 2, 10, Boundary::free};
    cfg.p = 0.05;
    cfg.sigma = 0.05;
    cfg.gamma = 0.05;
    cfg.samples_per_point = 40000;
    cfg.seed = 3;
    const AuditReport r = inequality_audit(cfg, 2);
    CHECK(r.pass);
    CHECK(r.first.slack > 0);
    CHECK(r.second.slack > 0);
    CHECK(r.first.slack == doctest::Approx(r.first.rhs - r.first.lhs));
    CHECK(r.theta > 0.0);
    CHECK(r.theta < 1.0);

    AuditConfig bad = cfg;
    bad.p = 0.3;
    bad.sigma = 0.2;
    CHECK_THROWS(inequality_audit(bad, 1));
    bad = cfg;
    bad.gamma = 0.01;
    CHECK_THROWS(inequality_audit(bad, 1));
}
