#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>

namespace dperc {

/// Census key: v vertices, n edges of which m lie in the defect plane,
/// perimeter with t bulk edges and r defect-plane edges.
struct AnimalKey {
    int v = 0;
    int n = 0;
    int m = 0;
    int t = 0;
    int r = 0;
    auto operator<=>(const AnimalKey&) const = default;
};

/// Exact counts A_{v,n,m}(t,r) of edge animals containing the origin.
struct AnimalCensus {
    int d = 3;
    int s = 2;
    int max_edges = 0;
    std::map<AnimalKey, std::uint64_t> entries;

    std::uint64_t animals_with_edges(int n) const;
    /// a_n(t_total) with t_total = t + r (the defect plane forgotten).
    std::map<int, std::uint64_t> homogeneous_marginal(int n) const;
};

/// Cycle-contact census a_n(c, k).
struct CycleContactKey {
    int n = 0;
    int c = 0;
    int k = 0;
    auto operator<=>(const CycleContactKey&) const = default;
};

struct CycleContactCensus {
    int d = 3;
    std::map<CycleContactKey, std::uint64_t> entries;
};

/// Per-animal checks made during enumeration. Cyclomatic index comes from a
/// union-find pass over the animal's edges; perimeter and contacts from a
/// scan of incident lattice edges.
struct IdentityAudit {
    std::uint64_t animals = 0;
    std::uint64_t not_rooted_or_connected = 0;
    std::uint64_t euler_violations = 0;      // c != n - v + 1
    std::uint64_t incidence_violations = 0;  // 2d v != 2n + t_total + k
    std::uint64_t perimeter_violations = 0;  // t_total != 2d + 2(d-1)n - k - 2d c

    bool clean() const noexcept {
        return not_rooted_or_connected == 0 && euler_violations == 0 && incidence_violations == 0 &&
               perimeter_violations == 0;
    }
};

struct Enumeration {
    AnimalCensus census;
    CycleContactCensus cycles;
    IdentityAudit audit;
};

int default_edge_cap(int d);
/// Rough number of rooted animals with at most `max_edges` edges.
double estimated_animal_count(int d, int max_edges);

/**
 * Every connected edge set of Z^d whose vertex set contains the origin, with
 * at most max_edges edges, each exactly once (the origin alone included).
 * Growth follows Redelmeier's scheme on the edge adjacency graph with a
 * virtual root adjacent to the 2d edges at the origin; branches below the
 * root are distributed over workers. Throws std::length_error when the
 * estimated count exceeds the guard and `force` is not set.
 */
Enumeration enumerate_animals(int d, int s, int max_edges, int workers = 1, bool force = false);

/// Reference census by breadth-first growth over explicit sorted edge sets (small caps only).
AnimalCensus enumerate_animals_naive(int d, int s, int max_edges);

/// P(||C|| = n) = sum count * p^{n-m} sigma^m q^t tau^r, q = 1-p, tau = 1-sigma.
long double exact_edge_pmf(const AnimalCensus& census, double p, double sigma, int n);

/// Largest edge count of any v-vertex animal is at most floor(v/2 log2 v).
int max_edges_for_vertices(int v);

/// P(|C| = v); refuses v whose animals may exceed the census cap.
long double exact_vertex_pmf(const AnimalCensus& census, double p, double sigma, int v);

/// Z_n(x,y,z) = sum a_{n,m}(t,r) x^t y^r z^m
long double partition_z(const AnimalCensus& census, int n, long double x, long double y, long double z);
/// Y_v(a,x,y,z) = sum A_{v,n,m}(t,r) a^n x^t y^r z^m
long double partition_y(const AnimalCensus& census, int v, long double a, long double x, long double y,
                        long double z);

struct SupermultiplicativityCheck {
    long double lhs = 0;
    long double rhs = 0;
    bool holds = false;
};

/// lambda(x,y,z) = phi(x,y) (x^2 + xy/z + y^2/z^2), phi = sum_{i<=2d-2, j<=2s} x^-i y^-j
long double concatenation_lambda(int d, int s, long double x, long double y, long double z);

/// Z_{n1} Z_{n2} <= (n1+n2+1)^2 (n1+n2+3) lambda Z_{n1+n2+2}
SupermultiplicativityCheck supermult_audit(const AnimalCensus& census, long double x, long double y,
                                           long double z, int n1, int n2);

/// Sorted CSV (v,n,m,t,r,count) with '#' metadata lines.
std::string census_csv(const AnimalCensus& census);
AnimalCensus parse_census_csv(const std::string& text);

}  // namespace dperc
