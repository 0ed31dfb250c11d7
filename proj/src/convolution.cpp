#include "dperc/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dperc {

BinomialWeights binomial_weights(std::size_t n, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("binomial probability must lie in [0, 1]");
    BinomialWeights out;
    if (x == 0.0) {
        out.first = 0;
        out.weights = {1.0};
        return out;
    }
    if (x == 1.0) {
        out.first = n;
        out.weights = {1.0};
        return out;
    }

    const double nd = static_cast<double>(n);
    const auto mode = std::min(n, static_cast<std::size_t>(std::floor((nd + 1.0) * x)));
    std::size_t lo = 0;
    std::size_t hi = n;
    if (n > 10000) {
        const double reach = 8.0 * std::sqrt(nd * x * (1.0 - x)) + 1.0;
        const double mean = nd * x;
        lo = static_cast<std::size_t>(std::max(0.0, std::floor(mean - reach)));
        hi = static_cast<std::size_t>(std::min(nd, std::ceil(mean + reach)));
    }

    // Relative to the modal term; anything below 1e-300 has underflowed anyway.
    constexpr double kFloor = 1e-300;
    const double odds = x / (1.0 - x);
    std::vector<double> up;
    std::vector<double> down;
    double w = 1.0;
    for (std::size_t k = mode; k < hi; ++k) {
        w *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
        if (w < kFloor) break;
        up.push_back(w);
    }
    w = 1.0;
    for (std::size_t k = mode; k > lo; --k) {
        w *= static_cast<double>(k) / (odds * static_cast<double>(n - k + 1));
        if (w < kFloor) break;
        down.push_back(w);
    }

    out.first = mode - down.size();
    out.weights.reserve(down.size() + 1 + up.size());
    out.weights.insert(out.weights.end(), down.rbegin(), down.rend());
    out.weights.push_back(1.0);
    out.weights.insert(out.weights.end(), up.begin(), up.end());

    // Sum smallest-first for a tighter normalization.
    std::vector<double> sorted = out.weights;
    std::sort(sorted.begin(), sorted.end());
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    for (double& v : out.weights) v /= total;
    return out;
}

CanonicalPoint convolve(const MicrocanonicalCurve& curve, double x) {
    if (!curve.finalized()) throw std::logic_error("convolution requires a finalized curve");
    if (curve.trials() == 0) throw std::logic_error("curve has no trials");
    const auto& counts = curve.counts();
    const BinomialWeights bw = binomial_weights(curve.edge_slots(), x);

    double acc = 0.0;
    for (std::size_t i = 0; i < bw.weights.size(); ++i)
        acc += bw.weights[i] * static_cast<double>(counts[bw.first + i]);
    const double trials = static_cast<double>(curve.trials());
    CanonicalPoint out;
    out.value = std::clamp(acc / trials, 0.0, 1.0);
    out.stderr_ = std::sqrt(out.value * (1.0 - out.value) / trials);
    return out;
}

CanonicalCurve canonical_curve(const MicrocanonicalCurve& curve, std::span<const double> grid) {
    CanonicalCurve out;
    out.meta = curve.meta;
    out.edge_slots = curve.edge_slots();
    out.trials = curve.trials();
    out.grid.assign(grid.begin(), grid.end());
    out.values.reserve(grid.size());
    out.stderrs.reserve(grid.size());
    for (double x : grid) {
        const CanonicalPoint pt = convolve(curve, x);
        out.values.push_back(pt.value);
        out.stderrs.push_back(pt.stderr_);
    }
    return out;
}

std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (stop < start) throw std::invalid_argument("grid stop precedes start");
    const auto n = static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = start + static_cast<double>(i) * step;
    g.back() = std::min(g.back(), stop);
    return g;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
        if (parts.size() != 3) throw std::invalid_argument("grid range must be start:stop:step");
        out = make_grid(parts[0], parts[1], parts[2]);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty grid");
    if (!std::is_sorted(out.begin(), out.end()) ||
        std::adjacent_find(out.begin(), out.end()) != out.end())
        throw std::invalid_argument("grid must be strictly increasing");
    return out;
}

}  // namespace dperc
