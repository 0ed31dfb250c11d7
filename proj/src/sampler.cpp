#include "dperc/sampler.hpp"

#include <omp.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dperc/rng.hpp"

namespace dperc {

std::string to_string(SweepKind k) {
    return k == SweepKind::inhomogeneous ? "inhomogeneous" : "homogeneous";
}

SweepKind parse_sweep_kind(const std::string& text) {
    if (text == "inhomogeneous") return SweepKind::inhomogeneous;
    if (text == "homogeneous") return SweepKind::homogeneous;
    throw std::invalid_argument("unknown sweep kind '" + text + "'");
}

MicrocanonicalCurve::MicrocanonicalCurve(CurveMeta m, std::size_t edge_slots)
    : meta(std::move(m)), hist_(edge_slots + 2, 0) {}

void MicrocanonicalCurve::accumulate(std::uint32_t threshold) {
    if (finalized_) throw std::logic_error("cannot accumulate into a finalized curve");
    if (threshold >= hist_.size())
        throw std::out_of_range("crossing threshold exceeds S+1 for this curve");
    ++hist_[threshold];
    ++trials_;
}

void MicrocanonicalCurve::merge(const MicrocanonicalCurve& other) {
    if (finalized_ || other.finalized_) throw std::logic_error("merge requires unfinalized curves");
    CurveMeta a = meta;
    CurveMeta b = other.meta;
    a.realizations = b.realizations = 0;
    if (!(a == b) || hist_.size() != other.hist_.size())
        throw std::invalid_argument("cannot merge curves with mismatched metadata");
    for (std::size_t i = 0; i < hist_.size(); ++i) hist_[i] += other.hist_[i];
    trials_ += other.trials_;
    meta.realizations += other.meta.realizations;
}

void MicrocanonicalCurve::finalize() {
    if (finalized_) return;
    counts_.assign(edge_slots() + 1, 0);
    std::uint64_t running = 0;
    for (std::size_t s = 0; s < counts_.size(); ++s) {
        running += hist_[s];
        counts_[s] = running;
    }
    finalized_ = true;
}

const std::vector<std::uint64_t>& MicrocanonicalCurve::counts() const {
    if (!finalized_) throw std::logic_error("curve is not finalized");
    return counts_;
}

double MicrocanonicalCurve::fraction(std::size_t s) const {
    const auto& c = counts();
    if (trials_ == 0) throw std::logic_error("curve has no trials");
    return static_cast<double>(c.at(s)) / static_cast<double>(trials_);
}

MicrocanonicalCurve MicrocanonicalCurve::from_counts(CurveMeta m, std::vector<std::uint64_t> counts,
                                                     std::uint64_t trials) {
    if (counts.empty()) throw std::invalid_argument("counts array is empty");
    MicrocanonicalCurve c(std::move(m), counts.size() - 1);
    std::uint64_t prev = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts[s] < prev || counts[s] > trials)
            throw std::invalid_argument("counts must be non-decreasing and bounded by the trial count");
        c.hist_[s] = counts[s] - prev;
        prev = counts[s];
    }
    c.hist_.back() = trials - prev;
    c.trials_ = trials;
    c.counts_ = std::move(counts);
    c.finalized_ = true;
    return c;
}

CrossingGeometry make_crossing_geometry(const LatticeSpec& spec, int face_pairs) {
    if (face_pairs < 1 || face_pairs > spec.s || face_pairs > kMaxFacePairs)
        throw std::invalid_argument("face pair count must be in 1..s");
    CrossingGeometry g;
    g.pairs = face_pairs;
    g.vertex_masks.assign(spec.vertex_count(), 0);
    for (int k = 0; k < face_pairs; ++k) {
        for (VertexId v : face_vertices(spec, k + 1, +1))
            g.vertex_masks[v] |= static_cast<FaceMask>(1u << (2 * k));
        for (VertexId v : face_vertices(spec, k + 1, -1))
            g.vertex_masks[v] |= static_cast<FaceMask>(1u << (2 * k + 1));
    }
    return g;
}

SweepSetup::SweepSetup(const LatticeSpec& s, int face_pairs, bool homogeneous)
    : spec(s), table(build_edge_table(s, homogeneous)), geometry(make_crossing_geometry(s, face_pairs)) {
    if (spec.boundary != Boundary::free)
        throw std::invalid_argument("crossing sweeps require a free boundary");
    bulk_edges.reserve(table.bulk_count());
    defect_edges.reserve(table.defect_count);
    for (std::uint32_t e = 0; e < table.total(); ++e) {
        (table.edges[e].cls == EdgeClass::defect ? defect_edges : bulk_edges).push_back(e);
    }
}

namespace {

constexpr std::uint32_t kPending = 0xffffffffu;

// Records the step at which each still-pending pair becomes connected.
// Returns true once every pair has crossed.
bool observe(FaceMask root_mask, std::uint32_t step, std::span<std::uint32_t> thresholds,
             int& remaining) {
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        const FaceMask both = pair_bits(static_cast<int>(k));
        if (thresholds[k] == kPending && (root_mask & both) == both) {
            thresholds[k] = step;
            --remaining;
        }
    }
    return remaining == 0;
}

void check_outputs(const SweepSetup& setup, std::span<std::uint32_t> thresholds) {
    if (static_cast<int>(thresholds.size()) != setup.geometry.pairs)
        throw std::invalid_argument("threshold buffer size must equal the face pair count");
}

void shuffle(std::vector<std::uint32_t>& order, CounterStream& stream) {
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(stream.below(i));
        std::swap(order[i - 1], order[j]);
    }
}

void insert_defects(const SweepSetup& setup, double p, std::uint64_t key,
                    std::span<const std::uint32_t> defect_order, SweepWorkspace& ws,
                    std::span<std::uint32_t> thresholds) {
    const auto& edges = setup.table.edges;
    const auto S = static_cast<std::uint32_t>(setup.defect_edges.size());
    ws.forest.reset(setup.geometry.vertex_masks);
    std::fill(thresholds.begin(), thresholds.end(), kPending);
    int remaining = static_cast<int>(thresholds.size());

    bool done = false;
    for (std::uint32_t e : setup.bulk_edges) {
        if (uniform_at(key, e) < p) {
            const FaceMask m = ws.forest.unite(edges[e].u, edges[e].v);
            if (observe(m, 0, thresholds, remaining)) {
                done = true;
                break;
            }
        }
    }
    for (std::uint32_t step = 0; !done && step < S; ++step) {
        const Edge& edge = edges[setup.defect_edges[defect_order[step]]];
        const FaceMask m = ws.forest.unite(edge.u, edge.v);
        done = observe(m, step + 1, thresholds, remaining);
    }
    for (auto& t : thresholds)
        if (t == kPending) t = S + 1;
}

}  // namespace

void replay_realization(const SweepSetup& setup, double p, std::uint64_t key,
                        std::span<const std::uint32_t> defect_order, SweepWorkspace& ws,
                        std::span<std::uint32_t> thresholds) {
    check_outputs(setup, thresholds);
    if (defect_order.size() != setup.defect_edges.size())
        throw std::invalid_argument("defect order must be a permutation of all defect edges");
    insert_defects(setup, p, key, defect_order, ws, thresholds);
}

void run_realization(const SweepSetup& setup, double p, std::uint64_t key, SweepWorkspace& ws,
                     std::span<std::uint32_t> thresholds) {
    check_outputs(setup, thresholds);
    ws.order.resize(setup.defect_edges.size());
    std::iota(ws.order.begin(), ws.order.end(), 0u);
    CounterStream stream(key, setup.table.total());
    shuffle(ws.order, stream);
    insert_defects(setup, p, key, ws.order, ws, thresholds);
}

void run_homogeneous_realization(const SweepSetup& setup, std::uint64_t key, SweepWorkspace& ws,
                                 std::span<std::uint32_t> thresholds) {
    check_outputs(setup, thresholds);
    const auto& edges = setup.table.edges;
    const auto E = static_cast<std::uint32_t>(edges.size());
    ws.order.resize(E);
    std::iota(ws.order.begin(), ws.order.end(), 0u);
    CounterStream stream(key, 0);
    shuffle(ws.order, stream);

    ws.forest.reset(setup.geometry.vertex_masks);
    std::fill(thresholds.begin(), thresholds.end(), kPending);
    int remaining = static_cast<int>(thresholds.size());
    for (std::uint32_t step = 0; step < E; ++step) {
        const Edge& edge = edges[ws.order[step]];
        if (observe(ws.forest.unite(edge.u, edge.v), step + 1, thresholds, remaining)) break;
    }
    for (auto& t : thresholds)
        if (t == kPending) t = E + 1;
}

namespace {

void validate(const SweepConfig& config) {
    const bool homogeneous = config.kind == SweepKind::homogeneous;
    config.spec.validate(homogeneous);
    if (config.realizations == 0) throw std::invalid_argument("realizations must be >= 1");
    if (!homogeneous && !(config.p >= 0.0 && config.p <= 1.0))
        throw std::invalid_argument("bulk density p must lie in [0, 1]");
}

CurveMeta make_meta(const SweepConfig& config) {
    CurveMeta m;
    m.spec = config.spec;
    m.kind = config.kind;
    if (config.kind == SweepKind::inhomogeneous) m.p = config.p;
    m.seed = config.seed;
    m.rng = std::string(kRngName);
    m.face_pairs = config.face_pairs;
    return m;
}

std::size_t slots(const SweepConfig& config, const SweepSetup& setup) {
    return config.kind == SweepKind::homogeneous ? setup.table.total() : setup.defect_edges.size();
}

void run_one(const SweepConfig& config, const SweepSetup& setup, std::uint64_t r, SweepWorkspace& ws,
             std::span<std::uint32_t> thresholds, MicrocanonicalCurve& into) {
    const std::uint64_t key = stream_key(config.seed, r);
    if (config.kind == SweepKind::homogeneous) {
        run_homogeneous_realization(setup, key, ws, thresholds);
    } else {
        run_realization(setup, config.p, key, ws, thresholds);
    }
    for (std::uint32_t t : thresholds) into.accumulate(t);
}

}  // namespace

MicrocanonicalCurve sweep_serial(const SweepConfig& config) {
    validate(config);
    const SweepSetup setup(config.spec, config.face_pairs, config.kind == SweepKind::homogeneous);
    MicrocanonicalCurve curve(make_meta(config), slots(config, setup));
    SweepWorkspace ws;
    std::vector<std::uint32_t> thresholds(config.face_pairs);
    for (std::uint64_t r = 0; r < config.realizations; ++r) run_one(config, setup, r, ws, thresholds, curve);
    curve.meta.realizations = config.realizations;
    curve.finalize();
    return curve;
}

MicrocanonicalCurve sweep(const SweepConfig& config, int workers) {
    validate(config);
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
    const SweepSetup setup(config.spec, config.face_pairs, config.kind == SweepKind::homogeneous);
    const CurveMeta meta = make_meta(config);
    MicrocanonicalCurve total(meta, slots(config, setup));
    const auto R = static_cast<std::int64_t>(config.realizations);

#pragma omp parallel num_threads(workers)
    {
        MicrocanonicalCurve local(meta, slots(config, setup));
        SweepWorkspace ws;
        std::vector<std::uint32_t> thresholds(config.face_pairs);
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t r = 0; r < R; ++r) {
            run_one(config, setup, static_cast<std::uint64_t>(r), ws, thresholds, local);
        }
#pragma omp critical(dperc_sweep_merge)
        total.merge(local);
    }
    total.meta.realizations = config.realizations;
    total.finalize();
    return total;
}

}  // namespace dperc
