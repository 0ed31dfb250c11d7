#include "dperc/observables.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dperc/rng.hpp"

namespace dperc {

ClusterBox::ClusterBox(const LatticeSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.boundary != Boundary::free)
        throw std::invalid_argument("origin-cluster sampling uses a free-boundary box");
    const int w = spec_.side();
    stride_.assign(spec_.d, 0);
    std::int64_t st = 1;
    for (int k = spec_.d - 1; k >= 0; --k) {
        stride_[k] = st;
        st *= w;
    }
    flags_.assign(spec_.vertex_count(), 0);
    std::vector<int> digit(spec_.d, 0);
    for (std::size_t v = 0; v < flags_.size(); ++v) {
        std::uint8_t f = 0;
        bool plane = true;
        for (int k = 0; k < spec_.d; ++k) {
            if (digit[k] == 0 || digit[k] == w - 1) f |= kBoundary;
            if (k >= spec_.s && digit[k] != spec_.L) plane = false;
        }
        if (plane) f |= kPlane;
        flags_[v] = f;
        for (int k = spec_.d - 1; k >= 0; --k) {
            if (++digit[k] < w) break;
            digit[k] = 0;
        }
    }
    std::vector<int> zero(spec_.d, 0);
    origin_ = spec_.index_of(zero);
}

ClusterSample sample_origin_cluster(const ClusterBox& box, double p, double sigma, std::uint64_t key,
                                    ClusterWorkspace& ws) {
    const std::size_t n = box.vertex_count();
    if (ws.seen.size() != n) {
        ws.seen.assign(n, 0);
        ws.done.assign(n, 0);
        ws.epoch = 0;
    }
    if (++ws.epoch == 0) {
        std::fill(ws.seen.begin(), ws.seen.end(), 0);
        std::fill(ws.done.begin(), ws.done.end(), 0);
        ws.epoch = 1;
    }
    const std::uint32_t epoch = ws.epoch;
    const int d = box.spec().d;
    const int s = box.spec().s;

    ClusterSample out;
    ws.queue.clear();
    ws.queue.push_back(box.origin());
    ws.seen[box.origin()] = epoch;
    out.vertices = 1;

    for (std::size_t head = 0; head < ws.queue.size(); ++head) {
        const VertexId u = ws.queue[head];
        ws.done[u] = epoch;
        const bool u_plane = box.in_plane(u);
        for (int axis = 0; axis < d; ++axis) {
            const double prob = (axis < s && u_plane) ? sigma : p;
            for (int dir = 0; dir < 2; ++dir) {
                const auto w = static_cast<VertexId>(dir == 0 ? u + box.stride(axis) : u - box.stride(axis));
                const std::uint64_t edge_id =
                    static_cast<std::uint64_t>(dir == 0 ? u : w) * static_cast<std::uint64_t>(d) +
                    static_cast<std::uint64_t>(axis);
                if (!(uniform_at(key, edge_id) < prob)) continue;
                if (ws.done[w] == epoch) continue;  // counted from the other end
                ++out.edges;
                if (ws.seen[w] == epoch) continue;
                ws.seen[w] = epoch;
                ++out.vertices;
                if (box.on_boundary(w)) {
                    out.touched_boundary = true;
                    return out;
                }
                ws.queue.push_back(w);
            }
        }
    }
    return out;
}

void ClusterDistribution::add(const ClusterSample& s) {
    ++samples;
    if (s.touched_boundary) {
        ++boundary_count;
        return;
    }
    if (hist_v.size() <= s.vertices) hist_v.resize(s.vertices + 1, 0);
    if (hist_e.size() <= s.edges) hist_e.resize(s.edges + 1, 0);
    ++hist_v[s.vertices];
    ++hist_e[s.edges];
}

void ClusterDistribution::merge(const ClusterDistribution& other) {
    if (!(spec == other.spec) || p != other.p || sigma != other.sigma || seed != other.seed)
        throw std::invalid_argument("cannot merge cluster distributions with different parameters");
    if (hist_v.size() < other.hist_v.size()) hist_v.resize(other.hist_v.size(), 0);
    if (hist_e.size() < other.hist_e.size()) hist_e.resize(other.hist_e.size(), 0);
    for (std::size_t i = 0; i < other.hist_v.size(); ++i) hist_v[i] += other.hist_v[i];
    for (std::size_t i = 0; i < other.hist_e.size(); ++i) hist_e[i] += other.hist_e[i];
    boundary_count += other.boundary_count;
    samples += other.samples;
}

double ClusterDistribution::prob_vertices(std::size_t n) const {
    if (samples == 0) return 0.0;
    return n < hist_v.size() ? static_cast<double>(hist_v[n]) / static_cast<double>(samples) : 0.0;
}

double ClusterDistribution::prob_edges(std::size_t n) const {
    if (samples == 0) return 0.0;
    return n < hist_e.size() ? static_cast<double>(hist_e[n]) / static_cast<double>(samples) : 0.0;
}

double ClusterDistribution::boundary_fraction() const {
    return samples == 0 ? 0.0 : static_cast<double>(boundary_count) / static_cast<double>(samples);
}

namespace {

void check_config(const ClusterConfig& c) {
    c.spec.validate();
    if (!(c.p >= 0.0 && c.p <= 1.0) || !(c.sigma >= 0.0 && c.sigma <= 1.0))
        throw std::invalid_argument("densities must lie in [0, 1]");
}

ClusterDistribution empty_distribution(const ClusterConfig& c) {
    ClusterDistribution d;
    d.spec = c.spec;
    d.p = c.p;
    d.sigma = c.sigma;
    d.seed = c.seed;
    d.rng = std::string(kRngName);
    return d;
}

}  // namespace

ClusterDistribution sample_distribution_serial(const ClusterConfig& config) {
    check_config(config);
    const ClusterBox box(config.spec);
    ClusterWorkspace ws;
    ClusterDistribution dist = empty_distribution(config);
    for (std::uint64_t i = 0; i < config.samples; ++i)
        dist.add(sample_origin_cluster(box, config.p, config.sigma, stream_key(config.seed, i), ws));
    return dist;
}

ClusterDistribution sample_distribution_range(const ClusterConfig& config, std::uint64_t begin,
                                              std::uint64_t end, int workers) {
    check_config(config);
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
    const ClusterBox box(config.spec);
    ClusterDistribution total = empty_distribution(config);
    const auto lo = static_cast<std::int64_t>(begin);
    const auto hi = static_cast<std::int64_t>(end);

#pragma omp parallel num_threads(workers)
    {
        ClusterWorkspace ws;
        ClusterDistribution local = empty_distribution(config);
#pragma omp for schedule(dynamic, 1024)
        for (std::int64_t i = lo; i < hi; ++i) {
            local.add(sample_origin_cluster(box, config.p, config.sigma,
                                            stream_key(config.seed, static_cast<std::uint64_t>(i)), ws));
        }
#pragma omp critical(dperc_cluster_merge)
        total.merge(local);
    }
    return total;
}

ClusterDistribution sample_distribution(const ClusterConfig& config, int workers) {
    return sample_distribution_range(config, 0, config.samples, workers);
}

double ghost_theta(const ClusterDistribution& dist, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("ghost field gamma must lie in (0, 1)");
    if (dist.samples == 0) throw std::invalid_argument("empty cluster distribution");
    double sum = 0.0;
    double weight = 1.0;
    for (std::size_t n = 1; n < dist.hist_v.size(); ++n) {
        weight *= 1.0 - gamma;
        sum += weight * static_cast<double>(dist.hist_v[n]);
    }
    return 1.0 - sum / static_cast<double>(dist.samples);
}

double ghost_chi(const ClusterDistribution& dist, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("ghost field gamma must lie in [0, 1)");
    if (dist.samples == 0) throw std::invalid_argument("empty cluster distribution");
    double sum = 0.0;
    double weight = 1.0;
    for (std::size_t n = 1; n < dist.hist_v.size(); ++n) {
        weight *= 1.0 - gamma;
        sum += static_cast<double>(n) * weight * static_cast<double>(dist.hist_v[n]);
    }
    return sum / static_cast<double>(dist.samples);
}

std::vector<double> regime_exponents(int d, int s) {
    return {1.0, static_cast<double>(d - 1) / d, static_cast<double>(s - 1) / s};
}

DecayFit decay_fit(std::span<const std::uint64_t> hist, std::uint64_t samples,
                   std::span<const double> exponents) {
    // The window opens at the 75th percentile, where polynomial prefactors
    // have mostly flattened out, and closes where fewer than 300 finite
    // samples remain beyond n, so log P(>= n) carries under ~6% noise.
    constexpr double kWindowQuantile = 0.75;
    constexpr std::uint64_t kMinTailCount = 300;
    constexpr std::size_t kMinBins = 10;

    DecayFit fit;
    std::uint64_t finite = 0;
    for (auto c : hist) finite += c;
    if (finite == 0 || samples == 0) {
        fit.note = "no finite clusters";
        return fit;
    }

    // tail[n] = number of finite samples with size >= n
    std::vector<std::uint64_t> tail(hist.size() + 1, 0);
    for (std::size_t n = hist.size(); n-- > 0;) tail[n] = tail[n + 1] + hist[n];

    std::size_t lo = 0;
    {
        std::uint64_t below = 0;
        const auto cut = static_cast<std::uint64_t>(std::ceil(kWindowQuantile * static_cast<double>(finite)));
        for (std::size_t n = 0; n < hist.size(); ++n) {
            below += hist[n];
            if (below >= cut) {
                lo = n;
                break;
            }
        }
    }
    lo = std::max<std::size_t>(lo, 1);
    std::size_t hi = 0;
    for (std::size_t n = 0; n < hist.size(); ++n)
        if (tail[n] >= kMinTailCount) hi = n;
    fit.window_lo = lo;
    fit.window_hi = hi;

    std::vector<double> xs_n;
    std::vector<double> ys;
    std::size_t populated = 0;
    for (std::size_t n = lo; n <= hi; ++n) {
        populated += hist[n] > 0;
        xs_n.push_back(static_cast<double>(n));
        ys.push_back(std::log(static_cast<double>(tail[n]) / static_cast<double>(samples)));
    }
    fit.points = xs_n.size();
    if (populated < kMinBins) {
        fit.note = "insufficient tail data";
        return fit;
    }

    // Ordinary least squares: inverse-variance weights would hand the fit to
    // the first few bins, where polynomial prefactors still bend the curve.
    const auto m = static_cast<double>(xs_n.size());
    double best = std::numeric_limits<double>::infinity();
    for (double alpha : exponents) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs_n.size(); ++i) {
            const double x = std::pow(xs_n[i], alpha);
            sx += x;
            sy += ys[i];
            sxx += x * x;
            sxy += x * ys[i];
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / m;
        double rss = 0.0;
        for (std::size_t i = 0; i < xs_n.size(); ++i) {
            const double r = ys[i] - intercept - slope * std::pow(xs_n[i], alpha);
            rss += r * r;
        }
        fit.candidates.push_back({alpha, -slope, intercept, rss});
        if (rss < best) {
            best = rss;
            fit.selected_alpha = alpha;
        }
    }
    const auto& chosen = *std::find_if(fit.candidates.begin(), fit.candidates.end(),
                                       [&](const DecayCandidate& c) { return c.alpha == fit.selected_alpha; });
    if (!(chosen.rate > 0.0)) {
        fit.note = "tail does not decay";
        return fit;
    }
    fit.conclusive = true;
    return fit;
}

DecayFit decay_fit(const ClusterDistribution& dist, std::span<const double> exponents) {
    return decay_fit(dist.hist_v, dist.samples, exponents);
}

namespace {

struct StencilEstimate {
    double theta, dp, ds, dg, chi_h;
    double lhs1, rhs1, lhs2, rhs2;
};

// Stencil order: center, p+h, p-h, sigma+h, sigma-h, homogeneous at p.
StencilEstimate evaluate_stencil(const std::vector<ClusterDistribution>& st, const AuditConfig& c) {
    const double h = c.h;
    StencilEstimate e{};
    e.theta = ghost_theta(st[0], c.gamma);
    e.dp = (ghost_theta(st[1], c.gamma) - ghost_theta(st[2], c.gamma)) / (2 * h);
    e.ds = (ghost_theta(st[3], c.gamma) - ghost_theta(st[4], c.gamma)) / (2 * h);
    e.dg = (ghost_theta(st[0], c.gamma + h) - ghost_theta(st[0], c.gamma - h)) / (2 * h);
    e.chi_h = ghost_chi(st[5], 0.0);
    const double d = c.spec.d;
    e.lhs1 = (1 - c.p) * e.dp + (1 - c.sigma) * e.ds;
    e.rhs1 = 2 * d * (1 - c.gamma) * e.chi_h * e.theta * e.dg;
    e.lhs2 = e.theta;
    e.rhs2 = c.gamma * e.dg + e.theta * e.theta + e.chi_h * e.theta * (c.p * e.dp + c.sigma * e.ds);
    return e;
}

}  // namespace

AuditReport inequality_audit(const AuditConfig& config, int workers) {
    config.spec.validate();
    if (config.p > config.sigma)
        throw std::invalid_argument("inequality audit requires p <= sigma");
    const double h = config.h;
    auto inside = [](double x) { return x > 0.0 && x < 1.0; };
    if (!(h > 0.0) || !inside(config.p - h) || !inside(config.p + h) || !inside(config.sigma - h) ||
        !inside(config.sigma + h) || !inside(config.gamma - h) || !inside(config.gamma + h))
        throw std::invalid_argument("stencil step leaves (0, 1) for p, sigma or gamma");
    if (config.blocks < 2) throw std::invalid_argument("jackknife needs at least 2 blocks");
    if (config.samples_per_point < static_cast<std::uint64_t>(config.blocks))
        throw std::invalid_argument("fewer samples than jackknife blocks");

    const std::uint64_t homog_seed = mix64(config.seed ^ 0x5bd1e995u);
    const std::vector<ClusterConfig> points = {
        {config.spec, config.p, config.sigma, config.samples_per_point, config.seed},
        {config.spec, config.p + h, config.sigma, config.samples_per_point, config.seed},
        {config.spec, config.p - h, config.sigma, config.samples_per_point, config.seed},
        {config.spec, config.p, config.sigma + h, config.samples_per_point, config.seed},
        {config.spec, config.p, config.sigma - h, config.samples_per_point, config.seed},
        {config.spec, config.p, config.p, config.samples_per_point, homog_seed},
    };

    // blocks[b][k]: stencil point k restricted to sample block b
    const auto B = static_cast<std::uint64_t>(config.blocks);
    std::vector<std::vector<ClusterDistribution>> blocks(B);
    for (std::uint64_t b = 0; b < B; ++b) {
        const std::uint64_t begin = b * config.samples_per_point / B;
        const std::uint64_t end = (b + 1) * config.samples_per_point / B;
        for (const auto& pt : points) blocks[b].push_back(sample_distribution_range(pt, begin, end, workers));
    }

    auto combine = [&](std::uint64_t skip) {
        std::vector<ClusterDistribution> st = blocks[skip == 0 ? 1 : 0];
        for (std::uint64_t b = 0; b < B; ++b) {
            if (b == skip || b == (skip == 0 ? 1u : 0u)) continue;
            for (std::size_t k = 0; k < st.size(); ++k) st[k].merge(blocks[b][k]);
        }
        return st;
    };
    std::vector<ClusterDistribution> full = blocks[0];
    for (std::uint64_t b = 1; b < B; ++b)
        for (std::size_t k = 0; k < full.size(); ++k) full[k].merge(blocks[b][k]);

    const StencilEstimate all = evaluate_stencil(full, config);
    double mean1 = 0, mean2 = 0;
    std::vector<double> jk1(B), jk2(B);
    for (std::uint64_t b = 0; b < B; ++b) {
        const StencilEstimate e = evaluate_stencil(combine(b), config);
        jk1[b] = e.rhs1 - e.lhs1;
        jk2[b] = e.rhs2 - e.lhs2;
        mean1 += jk1[b] / static_cast<double>(B);
        mean2 += jk2[b] / static_cast<double>(B);
    }
    double var1 = 0, var2 = 0;
    for (std::uint64_t b = 0; b < B; ++b) {
        var1 += (jk1[b] - mean1) * (jk1[b] - mean1);
        var2 += (jk2[b] - mean2) * (jk2[b] - mean2);
    }
    const double scale = static_cast<double>(B - 1) / static_cast<double>(B);

    AuditReport r;
    r.config = config;
    r.theta = all.theta;
    r.dtheta_dp = all.dp;
    r.dtheta_dsigma = all.ds;
    r.dtheta_dgamma = all.dg;
    r.chi_homogeneous = all.chi_h;
    r.first = {all.lhs1, all.rhs1, all.rhs1 - all.lhs1, std::sqrt(scale * var1), false};
    r.second = {all.lhs2, all.rhs2, all.rhs2 - all.lhs2, std::sqrt(scale * var2), false};
    r.first.pass = r.first.slack >= -3.0 * r.first.stderr_;
    r.second.pass = r.second.slack >= -3.0 * r.second.stderr_;
    r.pass = r.first.pass && r.second.pass;
    return r;
}

}  // namespace dperc
