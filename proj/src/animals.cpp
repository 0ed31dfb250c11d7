#include "dperc/animals.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace dperc {

std::uint64_t AnimalCensus::animals_with_edges(int n) const {
    std::uint64_t total = 0;
    for (const auto& [key, count] : entries)
        if (key.n == n) total += count;
    return total;
}

std::map<int, std::uint64_t> AnimalCensus::homogeneous_marginal(int n) const {
    std::map<int, std::uint64_t> out;
    for (const auto& [key, count] : entries)
        if (key.n == n) out[key.t + key.r] += count;
    return out;
}

int default_edge_cap(int d) {
    if (d <= 2) return 12;
    if (d == 3) return 8;
    if (d == 4) return 6;
    return 5;
}

double estimated_animal_count(int d, int max_edges) {
    double total = 0.0;
    for (int n = 0; n <= max_edges; ++n) total += 2.0 * (n + 1) * std::pow(2.0 * d - 1.0, n);
    return total;
}

namespace {

constexpr double kEnumerationGuard = 3e8;

// Box [-(cap+1), cap+1]^d: every vertex of an animal with <= cap edges and
// all of its incident edges fit inside. Edge id = lower vertex * d + axis.
class AnimalBox {
public:
    AnimalBox(int d, int s, int cap) : d_(d), s_(s), half_(cap + 1), width_(2 * cap + 3) {
        stride_.assign(d_, 0);
        std::int64_t st = 1;
        for (int k = d_ - 1; k >= 0; --k) {
            stride_[k] = st;
            st *= width_;
        }
        vertex_count_ = static_cast<std::size_t>(st);
        incident_.assign(vertex_count_ * 2 * d_, -1);
        plane_.assign(vertex_count_, 0);
        std::vector<int> digit(d_, 0);
        for (std::size_t x = 0; x < vertex_count_; ++x) {
            bool plane = true;
            for (int k = s_; k < d_; ++k) plane = plane && digit[k] == half_;
            plane_[x] = plane;
            for (int a = 0; a < d_; ++a) {
                if (digit[a] + 1 < width_) incident_[x * 2 * d_ + 2 * a] = static_cast<std::int64_t>(x) * d_ + a;
                if (digit[a] > 0)
                    incident_[x * 2 * d_ + 2 * a + 1] = (static_cast<std::int64_t>(x) - stride_[a]) * d_ + a;
            }
            for (int k = d_ - 1; k >= 0; --k) {
                if (++digit[k] < width_) break;
                digit[k] = 0;
            }
        }
        origin_ = 0;
        for (int k = 0; k < d_; ++k) origin_ += static_cast<std::size_t>(half_ * stride_[k]);
    }

    int d() const { return d_; }
    std::size_t vertex_count() const { return vertex_count_; }
    std::size_t edge_slots() const { return vertex_count_ * d_; }
    std::size_t origin() const { return origin_; }

    std::size_t tail(std::int64_t e) const { return static_cast<std::size_t>(e / d_); }
    std::size_t head(std::int64_t e) const {
        return static_cast<std::size_t>(e / d_ + stride_[static_cast<std::size_t>(e % d_)]);
    }
    std::size_t other_end(std::int64_t e, std::size_t x) const { return tail(e) == x ? head(e) : tail(e); }
    bool is_defect(std::int64_t e) const { return (e % d_) < s_ && plane_[tail(e)]; }

    /// 2d incident edge ids of x (-1 where the edge leaves the box).
    const std::int64_t* incident(std::size_t x) const { return &incident_[x * 2 * d_]; }

private:
    int d_, s_, half_, width_;
    std::vector<std::int64_t> stride_;
    std::size_t vertex_count_ = 0;
    std::size_t origin_ = 0;
    std::vector<std::int64_t> incident_;
    std::vector<std::uint8_t> plane_;
};

constexpr std::uint64_t pack_animal(int v, int n, int m, int t, int r) {
    return (static_cast<std::uint64_t>(v) << 48) | (static_cast<std::uint64_t>(n) << 40) |
           (static_cast<std::uint64_t>(m) << 32) | (static_cast<std::uint64_t>(t) << 16) |
           static_cast<std::uint64_t>(r);
}

constexpr std::uint64_t pack_cycle(int n, int c, int k) {
    return (static_cast<std::uint64_t>(n) << 40) | (static_cast<std::uint64_t>(c) << 20) |
           static_cast<std::uint64_t>(k);
}

class Grower {
public:
    Grower(const AnimalBox& box, int cap)
        : box_(box), cap_(cap), marked_(box.edge_slots(), 0), in_animal_(box.edge_slots(), 0),
          degree_(box.vertex_count(), 0), uf_(box.vertex_count(), 0) {
        vertices_.push_back(box.origin());
    }

    void mark(std::int64_t e) { marked_[static_cast<std::size_t>(e)] = 1; }

    /// Places `first`, records it, and grows everything reachable with `untried` still open.
    void grow_branch(std::int64_t first, std::vector<std::int64_t> untried) {
        place(first);
        record();
        if (static_cast<int>(edges_.size()) < cap_) {
            std::vector<std::int64_t> fresh;
            extend(first, untried, fresh);
            grow(std::move(untried));
            for (auto e : fresh) marked_[static_cast<std::size_t>(e)] = 0;
        }
        unplace(first);
    }

    void record();

    std::unordered_map<std::uint64_t, std::uint64_t> census;
    std::unordered_map<std::uint64_t, std::uint64_t> cycles;
    IdentityAudit audit;

private:
    void grow(std::vector<std::int64_t> untried) {
        while (!untried.empty()) {
            const std::int64_t c = untried.back();
            untried.pop_back();
            place(c);
            record();
            if (static_cast<int>(edges_.size()) < cap_) {
                std::vector<std::int64_t> next = untried;
                std::vector<std::int64_t> fresh;
                extend(c, next, fresh);
                grow(std::move(next));
                for (auto e : fresh) marked_[static_cast<std::size_t>(e)] = 0;
            }
            unplace(c);
        }
    }

    // Appends unmarked edges adjacent to c, marking them.
    void extend(std::int64_t c, std::vector<std::int64_t>& untried, std::vector<std::int64_t>& fresh) {
        for (std::size_t end : {box_.tail(c), box_.head(c)}) {
            const std::int64_t* inc = box_.incident(end);
            for (int i = 0; i < 2 * box_.d(); ++i) {
                const std::int64_t e = inc[i];
                if (e < 0 || marked_[static_cast<std::size_t>(e)]) continue;
                marked_[static_cast<std::size_t>(e)] = 1;
                untried.push_back(e);
                fresh.push_back(e);
            }
        }
    }

    void touch(std::size_t x) {
        if (degree_[x]++ == 0 && x != box_.origin()) vertices_.push_back(x);
    }
    void untouch(std::size_t x) {
        if (--degree_[x] == 0 && x != box_.origin()) vertices_.pop_back();
    }

    void place(std::int64_t e) {
        in_animal_[static_cast<std::size_t>(e)] = 1;
        edges_.push_back(e);
        if (box_.is_defect(e)) ++defect_edges_;
        touch(box_.tail(e));
        touch(box_.head(e));
    }

    void unplace(std::int64_t e) {
        untouch(box_.head(e));
        untouch(box_.tail(e));
        if (box_.is_defect(e)) --defect_edges_;
        edges_.pop_back();
        in_animal_[static_cast<std::size_t>(e)] = 0;
    }

    bool contains_vertex(std::size_t x) const { return degree_[x] > 0 || x == box_.origin(); }

    std::size_t find(std::size_t x) {
        while (uf_[x] != x) {
            uf_[x] = uf_[uf_[x]];
            x = uf_[x];
        }
        return x;
    }

    const AnimalBox& box_;
    int cap_;
    std::vector<std::uint8_t> marked_;
    std::vector<std::uint8_t> in_animal_;
    std::vector<std::uint16_t> degree_;
    std::vector<std::size_t> uf_;
    std::vector<std::size_t> vertices_;  // origin first
    std::vector<std::int64_t> edges_;
    int defect_edges_ = 0;
};

void Grower::record() {
    const int d = box_.d();
    const int v = static_cast<int>(vertices_.size());
    const int n = static_cast<int>(edges_.size());
    const int m = defect_edges_;

    // Perimeter and contacts from the incident edges of every vertex.
    int t = 0, r = 0, k = 0;
    for (std::size_t x : vertices_) {
        const std::int64_t* inc = box_.incident(x);
        for (int i = 0; i < 2 * d; ++i) {
            const std::int64_t e = inc[i];
            if (in_animal_[static_cast<std::size_t>(e)]) continue;
            const std::size_t y = box_.other_end(e, x);
            if (contains_vertex(y)) {
                if (y < x) continue;  // contact seen from its other end
                ++k;
            }
            (box_.is_defect(e) ? r : t) += 1;
        }
    }

    // Cycle rank and connectivity from a spanning forest.
    for (std::size_t x : vertices_) uf_[x] = x;
    int c = 0;
    for (std::int64_t e : edges_) {
        const std::size_t a = find(box_.tail(e));
        const std::size_t b = find(box_.head(e));
        if (a == b) {
            ++c;
        } else {
            uf_[a] = b;
        }
    }
    int components = 0;
    for (std::size_t x : vertices_)
        if (find(x) == x) ++components;

    const int t_total = t + r;
    ++audit.animals;
    if (components != 1 || (n > 0 && degree_[box_.origin()] == 0)) ++audit.not_rooted_or_connected;
    if (c != n - v + 1) ++audit.euler_violations;
    if (2 * d * v != 2 * n + t_total + k) ++audit.incidence_violations;
    if (t_total != 2 * d + 2 * (d - 1) * n - k - 2 * d * c) ++audit.perimeter_violations;

    ++census[pack_animal(v, n, m, t, r)];
    ++cycles[pack_cycle(n, c, k)];
}

}  // namespace

Enumeration enumerate_animals(int d, int s, int max_edges, int workers, bool force) {
    if (d < 2 || s < 1 || s > d) throw std::invalid_argument("animal census needs d >= 2 and 1 <= s <= d");
    if (max_edges < 0 || max_edges > 60) throw std::invalid_argument("edge cap must lie in 0..60");
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
    const double estimate = estimated_animal_count(d, max_edges);
    if (!force && estimate > kEnumerationGuard) {
        std::ostringstream msg;
        msg << "edge cap " << max_edges << " in d=" << d << " would enumerate roughly " << estimate
            << " animals; lower the cap or force the run";
        throw std::length_error(msg.str());
    }

    const AnimalBox box(d, s, max_edges);
    std::vector<std::int64_t> root_edges(box.incident(box.origin()), box.incident(box.origin()) + 2 * d);

    Enumeration out;
    out.census.d = out.cycles.d = d;
    out.census.s = s;
    out.census.max_edges = max_edges;

    auto absorb = [&](Grower& g) {
        for (const auto& [key, count] : g.census) {
            AnimalKey k{static_cast<int>(key >> 48), static_cast<int>((key >> 40) & 0xff),
                        static_cast<int>((key >> 32) & 0xff), static_cast<int>((key >> 16) & 0xffff),
                        static_cast<int>(key & 0xffff)};
            out.census.entries[k] += count;
        }
        for (const auto& [key, count] : g.cycles) {
            CycleContactKey k{static_cast<int>(key >> 40), static_cast<int>((key >> 20) & 0xfffff),
                              static_cast<int>(key & 0xfffff)};
            out.cycles.entries[k] += count;
        }
        out.audit.animals += g.audit.animals;
        out.audit.not_rooted_or_connected += g.audit.not_rooted_or_connected;
        out.audit.euler_violations += g.audit.euler_violations;
        out.audit.incidence_violations += g.audit.incidence_violations;
        out.audit.perimeter_violations += g.audit.perimeter_violations;
    };

    {
        Grower lone(box, max_edges);
        lone.record();
        absorb(lone);
    }
    if (max_edges == 0) return out;

    const int branches = 2 * d;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (int i = 0; i < branches; ++i) {
        Grower g(box, max_edges);
        for (auto e : root_edges) g.mark(e);
        std::vector<std::int64_t> untried(root_edges.begin(), root_edges.begin() + i);
        g.grow_branch(root_edges[static_cast<std::size_t>(i)], std::move(untried));
#pragma omp critical(dperc_animals_merge)
        absorb(g);
    }
    return out;
}

namespace {

using Point = std::vector<int>;
using Bond = std::vector<int>;  // lower endpoint coordinates followed by the axis

Bond make_bond(const Point& lower, int axis) {
    Bond b = lower;
    b.push_back(axis);
    return b;
}

}  // namespace

AnimalCensus enumerate_animals_naive(int d, int s, int max_edges) {
    if (max_edges > 6) throw std::length_error("naive enumeration is limited to 6 edges");
    AnimalCensus census;
    census.d = d;
    census.s = s;
    census.max_edges = max_edges;
    const Point origin(d, 0);

    auto vertices_of = [&](const std::vector<Bond>& bonds) {
        std::set<Point> vs{origin};
        for (const auto& b : bonds) {
            Point lo(b.begin(), b.end() - 1);
            Point hi = lo;
            ++hi[b.back()];
            vs.insert(lo);
            vs.insert(hi);
        }
        return vs;
    };
    auto bond_is_defect = [&](const Bond& b) {
        if (b.back() >= s) return false;
        for (int k = s; k < d; ++k)
            if (b[k] != 0) return false;
        return true;
    };

    std::set<std::vector<Bond>> level{{}};
    for (int n = 0; n <= max_edges; ++n) {
        std::set<std::vector<Bond>> next;
        for (const auto& bonds : level) {
            const std::set<Point> vs = vertices_of(bonds);
            const std::set<Bond> own(bonds.begin(), bonds.end());
            std::set<Bond> perimeter;
            for (const auto& x : vs) {
                for (int a = 0; a < d; ++a) {
                    Point below = x;
                    --below[a];
                    for (const Bond& b : {make_bond(x, a), make_bond(below, a)}) {
                        if (!own.count(b)) perimeter.insert(b);
                    }
                }
            }
            AnimalKey key{static_cast<int>(vs.size()), n, 0, 0, 0};
            for (const auto& b : bonds) key.m += bond_is_defect(b);
            for (const auto& b : perimeter) (bond_is_defect(b) ? key.r : key.t) += 1;
            ++census.entries[key];

            if (n == max_edges) continue;
            for (const auto& b : perimeter) {
                std::vector<Bond> grown = bonds;
                grown.insert(std::lower_bound(grown.begin(), grown.end(), b), b);
                next.insert(std::move(grown));
            }
        }
        level = std::move(next);
    }
    return census;
}

long double exact_edge_pmf(const AnimalCensus& census, double p, double sigma, int n) {
    if (n < 0 || n > census.max_edges) throw std::out_of_range("edge count beyond the census cap");
    const long double P = p, S = sigma, q = 1.0L - P, tau = 1.0L - S;
    long double sum = 0;
    for (const auto& [k, count] : census.entries) {
        if (k.n != n) continue;
        sum += static_cast<long double>(count) * std::pow(P, k.n - k.m) * std::pow(S, k.m) * std::pow(q, k.t) *
               std::pow(tau, k.r);
    }
    return sum;
}

int max_edges_for_vertices(int v) {
    if (v < 1) throw std::invalid_argument("vertex count must be >= 1");
    return static_cast<int>(std::floor(0.5 * v * std::log2(static_cast<double>(v)) + 1e-9));
}

long double exact_vertex_pmf(const AnimalCensus& census, double p, double sigma, int v) {
    if (max_edges_for_vertices(v) > census.max_edges)
        throw std::out_of_range("census cap does not cover every animal with this many vertices");
    const long double P = p, S = sigma, q = 1.0L - P, tau = 1.0L - S;
    long double sum = 0;
    for (const auto& [k, count] : census.entries) {
        if (k.v != v) continue;
        sum += static_cast<long double>(count) * std::pow(P, k.n - k.m) * std::pow(S, k.m) * std::pow(q, k.t) *
               std::pow(tau, k.r);
    }
    return sum;
}

long double partition_z(const AnimalCensus& census, int n, long double x, long double y, long double z) {
    if (n < 0 || n > census.max_edges) throw std::out_of_range("edge count beyond the census cap");
    long double sum = 0;
    for (const auto& [k, count] : census.entries) {
        if (k.n != n) continue;
        sum += static_cast<long double>(count) * std::pow(x, k.t) * std::pow(y, k.r) * std::pow(z, k.m);
    }
    return sum;
}

long double partition_y(const AnimalCensus& census, int v, long double a, long double x, long double y,
                        long double z) {
    if (max_edges_for_vertices(v) > census.max_edges)
        throw std::out_of_range("census cap does not cover every animal with this many vertices");
    long double sum = 0;
    for (const auto& [k, count] : census.entries) {
        if (k.v != v) continue;
        sum += static_cast<long double>(count) * std::pow(a, k.n) * std::pow(x, k.t) * std::pow(y, k.r) *
               std::pow(z, k.m);
    }
    return sum;
}

long double concatenation_lambda(int d, int s, long double x, long double y, long double z) {
    long double phi = 0;
    for (int i = 0; i <= 2 * d - 2; ++i)
        for (int j = 0; j <= 2 * s; ++j) phi += std::pow(x, -i) * std::pow(y, -j);
    return phi * (x * x + x * y / z + y * y / (z * z));
}

SupermultiplicativityCheck supermult_audit(const AnimalCensus& census, long double x, long double y,
                                           long double z, int n1, int n2) {
    if (n1 < 0 || n2 < 0) throw std::invalid_argument("edge counts must be non-negative");
    if (n1 + n2 + 2 > census.max_edges) throw std::out_of_range("n1 + n2 + 2 exceeds the census cap");
    if (!(x > 0 && y > 0 && z > 0)) throw std::invalid_argument("activities must be positive");
    const long double total = n1 + n2;
    SupermultiplicativityCheck out;
    out.lhs = partition_z(census, n1, x, y, z) * partition_z(census, n2, x, y, z);
    out.rhs = (total + 1) * (total + 1) * (total + 3) * concatenation_lambda(census.d, census.s, x, y, z) *
              partition_z(census, n1 + n2 + 2, x, y, z);
    out.holds = out.lhs <= out.rhs;
    return out;
}

std::string census_csv(const AnimalCensus& census) {
    std::ostringstream out;
    out << "# format=dperc-census/1\n";
    out << "# d=" << census.d << ",s=" << census.s << ",max_edges=" << census.max_edges << '\n';
    out << "v,n,m,t,r,count\n";
    for (const auto& [k, count] : census.entries)
        out << k.v << ',' << k.n << ',' << k.m << ',' << k.t << ',' << k.r << ',' << count << '\n';
    return out.str();
}

AnimalCensus parse_census_csv(const std::string& text) {
    AnimalCensus census;
    std::istringstream in(text);
    std::string line;
    bool have_meta = false;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (std::sscanf(line.c_str(), "# d=%d,s=%d,max_edges=%d", &census.d, &census.s, &census.max_edges) == 3)
                have_meta = true;
            continue;
        }
        if (!have_header) {
            if (line != "v,n,m,t,r,count") throw std::invalid_argument("unexpected census header: " + line);
            have_header = true;
            continue;
        }
        AnimalKey k;
        unsigned long long count = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%d,%llu", &k.v, &k.n, &k.m, &k.t, &k.r, &count) != 6)
            throw std::invalid_argument("malformed census row: " + line);
        census.entries[k] += count;
    }
    if (!have_meta || !have_header) throw std::invalid_argument("census CSV lacks metadata or header");
    return census;
}

}  // namespace dperc
