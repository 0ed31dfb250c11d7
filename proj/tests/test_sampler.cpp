#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dperc/convolution.hpp"
#include "dperc/rng.hpp"
#include "dperc/sampler.hpp"

using namespace dperc;

namespace {

SweepConfig config(int d, int s, int L, double p, std::uint64_t R, std::uint64_t seed) {
    SweepConfig c;
    c.spec = {d, s, L, Boundary::free};
    c.p = p;
    c.realizations = R;
    c.seed = seed;
    return c;
}

// Label propagation: recomputes components from scratch after each union.
std::vector<int> naive_components(std::size_t n, const std::vector<std::pair<int, int>>& links) {
    std::vector<int> label(n);
    std::iota(label.begin(), label.end(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto [a, b] : links) {
            const int m = std::min(label[a], label[b]);
            if (label[a] != m || label[b] != m) {
                label[a] = label[b] = m;
                changed = true;
            }
        }
    }
    return label;
}

}  // namespace

TEST_CASE("disjoint set forest agrees with label propagation") {
    std::mt19937_64 gen(11);
    const std::size_t n = 200;
    DisjointSetForest f(n);
    std::vector<std::pair<int, int>> links;
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int step = 0; step < 300; ++step) {
        const int a = pick(gen), b = pick(gen);
        f.unite(a, b);
        links.push_back({a, b});
        CHECK(f.total_root_size() == n);
        if (step % 50 == 0) {
            const auto label = naive_components(n, links);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; j += 7)
                    CHECK((f.find(i) == f.find(j)) == (label[i] == label[j]));
        }
    }
    const auto label = naive_components(n, links);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(f.set_size(i) == std::count(label.begin(), label.end(), label[i]));
}

TEST_CASE("face masks merge by OR") {
    std::vector<FaceMask> masks = {1, 0, 2, 0};
    DisjointSetForest f;
    f.reset(masks);
    CHECK(f.unite(0, 1) == 1);
    CHECK(f.unite(2, 3) == 2);
    CHECK(f.unite(1, 3) == 3);
    CHECK(f.mask(0) == pair_bits(0));
}

TEST_CASE("counter stream bounds and reproducibility") {
    CounterStream a(stream_key(5, 3)), b(stream_key(5, 3));
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.below(7);
        CHECK(x < 7);
        CHECK(x == b.below(7));
    }
    CHECK(stream_key(5, 3) != stream_key(5, 4));
    CHECK(stream_key(5, 3) != stream_key(6, 3));
    for (std::uint64_t c = 0; c < 1000; ++c) {
        const double u = uniform_at(99, c);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("accumulate builds suffix counts") {
    CurveMeta meta;
    meta.spec = {3, 2, 1, Boundary::free};
    SUBCASE("thresholds 2 and never, S = 3") {
        MicrocanonicalCurve c(meta, 3);
        c.accumulate(2);
        c.accumulate(4);
        c.finalize();
        CHECK(c.counts() == std::vector<std::uint64_t>{0, 0, 1, 1});
    }
    SUBCASE("single trial crossing at 0") {
        MicrocanonicalCurve c(meta, 5);
        c.accumulate(0);
        c.finalize();
        for (std::size_t s = 0; s <= 5; ++s) CHECK(c.fraction(s) == 1.0);
    }
    SUBCASE("single trial never crossing") {
        MicrocanonicalCurve c(meta, 5);
        c.accumulate(6);
        c.finalize();
        for (std::size_t s = 0; s <= 5; ++s) CHECK(c.fraction(s) == 0.0);
    }
    SUBCASE("unfinalized access and mismatched merge fail") {
        MicrocanonicalCurve c(meta, 3);
        CHECK_THROWS(c.counts());
        CurveMeta other = meta;
        other.p = 0.3;
        MicrocanonicalCurve d(other, 3);
        CHECK_THROWS(c.merge(d));
    }
}

TEST_CASE("fully open bulk crosses before any defect edge") {
    const MicrocanonicalCurve c = sweep_serial(config(3, 2, 3, 1.0, 50, 1));
    for (auto v : c.counts()) CHECK(v == 50);
}

TEST_CASE("hand-built defect order crosses after two edges") {
    const LatticeSpec spec{3, 2, 1, Boundary::free};
    const SweepSetup setup(spec, 1);
    const std::vector<int> left{-1, 0, 0}, centre{0, 0, 0}, right{1, 0, 0};
    const VertexId a = spec.index_of(left), o = spec.index_of(centre), b = spec.index_of(right);
    std::vector<std::uint32_t> order;
    for (std::uint32_t i = 0; i < setup.defect_edges.size(); ++i) {
        const Edge& e = setup.table.edges[setup.defect_edges[i]];
        if ((e.u == a && e.v == o) || (e.u == o && e.v == b)) order.push_back(i);
    }
    REQUIRE(order.size() == 2);
    for (std::uint32_t i = 0; i < setup.defect_edges.size(); ++i)
        if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
    SweepWorkspace ws;
    std::uint32_t threshold = 0;
    replay_realization(setup, 0.0, 42, order, ws, std::span<std::uint32_t>(&threshold, 1));
    CHECK(threshold == 2);

    // Reversing the two path edges to the end: no crossing until late.
    std::rotate(order.begin(), order.begin() + 2, order.end());
    replay_realization(setup, 0.0, 42, order, ws, std::span<std::uint32_t>(&threshold, 1));
    CHECK(threshold > 2);
}

TEST_CASE("counts are monotone and bounded on every run") {
    for (double p : {0.0, 0.1, 0.25, 0.4}) {
        const MicrocanonicalCurve c = sweep_serial(config(3, 2, 3, p, 300, 9));
        const auto& k = c.counts();
        for (std::size_t s = 1; s < k.size(); ++s) CHECK(k[s] >= k[s - 1]);
        CHECK(k.back() <= c.trials());
    }
}

TEST_CASE("coupled sweeps dominate in p") {
    const MicrocanonicalCurve lo = sweep_serial(config(3, 2, 3, 0.1, 400, 21));
    const MicrocanonicalCurve hi = sweep_serial(config(3, 2, 3, 0.2, 400, 21));
    for (std::size_t s = 0; s < lo.counts().size(); ++s) CHECK(hi.counts()[s] >= lo.counts()[s]);
}

TEST_CASE("parallel sweep is identical to the serial reference") {
    const SweepConfig c = config(3, 2, 4, 0.15, 500, 77);
    const MicrocanonicalCurve ref = sweep_serial(c);
    for (int workers : {1, 2, 4, 8}) {
        const MicrocanonicalCurve par = sweep(c, workers);
        CHECK(par.counts() == ref.counts());
        CHECK(par.meta == ref.meta);
    }
}

TEST_CASE("face-pair averaging multiplies the trial count") {
    SweepConfig c = config(3, 2, 3, 0.1, 100, 3);
    c.face_pairs = 2;
    const MicrocanonicalCurve curve = sweep(c, 2);
    CHECK(curve.trials() == 200);
    CHECK(curve.meta.realizations == 100);
    CHECK(sweep_serial(c).counts() == curve.counts());
}

TEST_CASE("p = 0 defect sweep matches a standalone 2d homogeneous sweep") {
    // With the bulk closed, the defect plane is an isolated 2d box; compare laws.
    const int L = 4;
    const std::uint64_t R = 4000;
    const MicrocanonicalCurve plane = sweep_serial(config(3, 2, L, 0.0, R, 5));
    SweepConfig flat = config(2, 2, L, 0.0, R, 6);
    flat.kind = SweepKind::homogeneous;
    const MicrocanonicalCurve grid = sweep_serial(flat);
    REQUIRE(plane.edge_slots() == grid.edge_slots());
    for (double x : {0.4, 0.45, 0.5, 0.55, 0.6}) {
        const auto a = convolve(plane, x);
        const auto b = convolve(grid, x);
        const double se = std::hypot(a.stderr_, b.stderr_);
        CHECK(std::abs(a.value - b.value) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("homogeneous sweeps: endpoints and 2d crossing near one half") {
    SweepConfig c = config(2, 2, 4, 0.0, 3000, 13);
    c.kind = SweepKind::homogeneous;
    const MicrocanonicalCurve small = sweep(c, 2);
    c.spec.L = 8;
    const MicrocanonicalCurve large = sweep(c, 2);
    CHECK(convolve(small, 0.0).value == 0.0);
    CHECK(convolve(large, 1.0).value == 1.0);

    // Crossing of the two curves on a fine grid.
    double crossing = -1.0;
    double prev = 0.0;
    for (double x = 0.40; x <= 0.60; x += 0.0005) {
        const double diff = convolve(large, x).value - convolve(small, x).value;
        if (x > 0.40 && prev < 0.0 && diff >= 0.0) crossing = x;
        prev = diff;
    }
    CHECK(std::abs(crossing - 0.5) <= 0.02);
}

TEST_CASE("invalid sweep configurations") {
    CHECK_THROWS(sweep_serial(config(3, 2, 2, 0.1, 0, 1)));
    CHECK_THROWS(sweep_serial(config(3, 2, 2, 1.5, 10, 1)));
    CHECK_THROWS(sweep(config(3, 2, 2, 0.1, 10, 1), 0));
    SweepConfig periodic = config(3, 2, 2, 0.1, 10, 1);
    periodic.spec.boundary = Boundary::periodic;
    CHECK_THROWS(sweep_serial(periodic));
}
