#include <doctest.h>

#include <stdexcept>

#include <set>
#include <tuple>

#include "dperc/lattice.hpp"

using namespace dperc;

namespace {

// Independent count: edges along each axis of a free box, by brute force over coordinates.
std::tuple<std::size_t, std::size_t> count_edges(int d, int s, int L) {
    std::size_t total = 0, defect = 0;
    std::vector<int> x(d, -L);
    while (true) {
        for (int a = 0; a < d; ++a) {
            if (x[a] == L) continue;
            ++total;
            bool plane = a < s;
            for (int k = s; k < d; ++k) plane = plane && x[k] == 0;
            defect += plane;
        }
        int k = d - 1;
        while (k >= 0 && ++x[k] > L) x[k--] = -L;
        if (k < 0) break;
    }
    return {total, defect};
}

}  // namespace

TEST_CASE("edge table of the smallest 3d box") {
    const LatticeSpec spec{3, 2, 1, Boundary::free};
    CHECK(spec.vertex_count() == 27);
    const EdgeTable t = build_edge_table(spec);
    CHECK(t.defect_count == 12);
    CHECK(t.total() == 54);
    CHECK(t.bulk_count() == 42);
}

TEST_CASE("edge counts match a brute-force enumeration") {
    for (auto [d, s, L] : {std::tuple{3, 2, 1}, {3, 2, 3}, {4, 2, 2}, {4, 3, 1}, {2, 2, 4}}) {
        const LatticeSpec spec{d, s, L, Boundary::free};
        const EdgeTable t = build_edge_table(spec, s == d);
        const auto [total, defect] = count_edges(d, s, L);
        CHECK(t.total() == total);
        CHECK(t.defect_count == defect);
    }
}

TEST_CASE("defect count depends on s and L only") {
    for (int L : {1, 2, 5}) {
        const std::size_t expect = 2u * (2 * L) * (2 * L + 1);
        CHECK(build_edge_table({3, 2, L, Boundary::free}).defect_count == expect);
        CHECK(build_edge_table({4, 2, L, Boundary::free}).defect_count == expect);
        CHECK(build_edge_table({5, 2, L, Boundary::free}).defect_count == expect);
    }
}

TEST_CASE("edges are ordered, unique and correctly classified") {
    const LatticeSpec spec{4, 2, 2, Boundary::free};
    const EdgeTable t = build_edge_table(spec);
    std::set<std::pair<VertexId, VertexId>> seen;
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
        const Edge& e = t.edges[i];
        REQUIRE(e.u < spec.vertex_count());
        REQUIRE(e.v < spec.vertex_count());
        CHECK(seen.insert({e.u, e.v}).second);
        if (i > 0) {
            const Edge& f = t.edges[i - 1];
            CHECK(std::tie(f.u, f.axis) < std::tie(e.u, e.axis));
        }
        const auto cu = spec.coordinates(e.u);
        const auto cv = spec.coordinates(e.v);
        int diff = 0;
        for (int k = 0; k < spec.d; ++k) diff += std::abs(cu[k] - cv[k]);
        CHECK(diff == 1);
        const bool both_in_plane = spec.in_defect_plane(e.u) && spec.in_defect_plane(e.v);
        CHECK((e.cls == EdgeClass::defect) == both_in_plane);
    }
}

TEST_CASE("edge table is a pure function of the lattice parameters") {
    const LatticeSpec spec{3, 2, 3, Boundary::free};
    const EdgeTable a = build_edge_table(spec);
    const EdgeTable b = build_edge_table(spec);
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].u == b.edges[i].u);
        CHECK(a.edges[i].v == b.edges[i].v);
        CHECK(a.edges[i].cls == b.edges[i].cls);
    }
}

TEST_CASE("coordinates and indices are inverse") {
    const LatticeSpec spec{3, 2, 2, Boundary::free};
    for (VertexId v = 0; v < spec.vertex_count(); ++v) CHECK(spec.index_of(spec.coordinates(v)) == v);
}

TEST_CASE("periodic box vertex count and wrap") {
    const LatticeSpec spec{3, 2, 2, Boundary::periodic};
    CHECK(spec.vertex_count() == 64);
    const EdgeTable t = build_edge_table(spec);
    CHECK(t.total() == 3 * 64);
    CHECK(t.defect_count == 2 * 16);
}

TEST_CASE("vertical faces") {
    CHECK(face_vertices({3, 2, 1, Boundary::free}, 1, +1).size() == 9);
    CHECK(face_vertices({3, 2, 2, Boundary::free}, 2, -1).size() == 25);
    CHECK(face_vertices({4, 2, 1, Boundary::free}, 1, +1).size() == 27);
    const LatticeSpec spec{3, 2, 2, Boundary::free};
    for (VertexId v : face_vertices(spec, 2, -1)) CHECK(spec.coordinates(v)[1] == -2);
    CHECK_THROWS(face_vertices(spec, 3, +1));
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS(LatticeSpec{3, 4, 1, Boundary::free}.validate());
    CHECK_THROWS(LatticeSpec{3, 2, 0, Boundary::free}.validate());
    CHECK_THROWS(LatticeSpec{3, 3, 2, Boundary::free}.validate());
    CHECK_NOTHROW(LatticeSpec{3, 3, 2, Boundary::free}.validate(true));
    CHECK_THROWS(build_edge_table({3, 4, 1, Boundary::free}));
}
