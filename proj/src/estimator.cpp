#include "dperc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dperc {

void CrossingFamily::validate() const {
    if (sizes.size() != values.size()) throw std::invalid_argument("one value row per box size expected");
    if (sizes.empty()) throw std::invalid_argument("empty crossing family");
    if (grid.size() < 3) throw std::invalid_argument("grid needs at least three points");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (values[i].size() != grid.size()) throw std::invalid_argument("curve length differs from grid");
        if (i > 0 && sizes[i] <= sizes[i - 1]) throw std::invalid_argument("box sizes must strictly increase");
    }
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (!(grid[j] > grid[j - 1])) throw std::invalid_argument("grid must strictly increase");
}

CrossingFamily CrossingFamily::without_smallest() const {
    CrossingFamily out = *this;
    out.sizes.erase(out.sizes.begin());
    out.values.erase(out.values.begin());
    return out;
}

CrossingFamily make_family(std::vector<CanonicalCurve> curves, bool force) {
    if (curves.empty()) throw std::invalid_argument("no curves given");
    std::sort(curves.begin(), curves.end(),
              [](const CanonicalCurve& a, const CanonicalCurve& b) { return a.meta.spec.L < b.meta.spec.L; });
    const CanonicalCurve& ref = curves.front();
    CrossingFamily fam;
    fam.grid = ref.grid;
    fam.p = ref.meta.p;
    fam.realizations = ref.meta.realizations;
    for (const auto& c : curves) {
        const auto& a = c.meta;
        const auto& b = ref.meta;
        if (a.spec.d != b.spec.d || a.spec.s != b.spec.s) throw std::invalid_argument("curves differ in d or s");
        if (a.kind != b.kind) throw std::invalid_argument("curves mix homogeneous and inhomogeneous sweeps");
        if (a.p != b.p) throw std::invalid_argument("curves differ in bulk density p");
        if (c.grid != ref.grid) throw std::invalid_argument("curves do not share one grid");
        if (!force && (a.seed != b.seed || a.rng != b.rng || a.realizations != b.realizations ||
                       a.face_pairs != b.face_pairs))
            throw std::invalid_argument(
                "curves have mixed provenance (seed, generator, realizations or face pairs); use --force");
        if (!fam.sizes.empty() && fam.sizes.back() == a.spec.L)
            throw std::invalid_argument("duplicate box size L=" + std::to_string(a.spec.L));
        fam.sizes.push_back(a.spec.L);
        fam.values.push_back(c.values);
        fam.realizations = std::min(fam.realizations, a.realizations);
    }
    fam.validate();
    return fam;
}

double e_squared(const CrossingFamily& family, std::size_t j) {
    double sum = 0.0;
    for (const auto& a : family.values)
        for (const auto& b : family.values) {
            const double diff = a.at(j) - b.at(j);
            sum += diff * diff;
        }
    return sum;
}

std::vector<double> e_squared_profile(const CrossingFamily& family) {
    std::vector<double> out(family.grid.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = e_squared(family, j);
    return out;
}

namespace {

// Edges of the contiguous region around `at` where e2 <= level.
std::pair<double, double> level_interval(const std::vector<double>& x, const std::vector<double>& e2,
                                         std::size_t at, double level, bool& clipped) {
    std::size_t j = at;
    while (j > 0 && e2[j - 1] <= level) --j;
    double left;
    if (j == 0) {
        left = x.front();
        clipped = true;
    } else {
        const double t = (e2[j - 1] - level) / (e2[j - 1] - e2[j]);
        left = x[j - 1] + t * (x[j] - x[j - 1]);
    }
    std::size_t k = at;
    while (k + 1 < x.size() && e2[k + 1] <= level) ++k;
    double right;
    if (k + 1 == x.size()) {
        right = x.back();
        clipped = true;
    } else {
        const double t = (e2[k + 1] - level) / (e2[k + 1] - e2[k]);
        right = x[k + 1] + t * (x[k] - x[k + 1]);
    }
    return {left, right};
}

}  // namespace

WaistEstimate locate_waist(const CrossingFamily& family) {
    family.validate();
    const auto& x = family.grid;
    const std::vector<double> e2 = e_squared_profile(family);

    std::size_t imin = 0;
    for (std::size_t j = 1; j < e2.size(); ++j)
        if (e2[j] < e2[imin]) imin = j;
    WaistEstimate w;
    w.multiple_minima = std::count(e2.begin(), e2.end(), e2[imin]) > 1;
    if (imin == 0 || imin + 1 == x.size())
        throw std::domain_error("grid too narrow: E^2 minimum lies on the grid boundary");

    // Vertex of the parabola through the minimum and its neighbours.
    const double x0 = x[imin - 1], x1 = x[imin], x2 = x[imin + 1];
    const double y0 = e2[imin - 1], y1 = e2[imin], y2 = e2[imin + 1];
    const double f01 = (y1 - y0) / (x1 - x0);
    const double f12 = (y2 - y1) / (x2 - x1);
    const double curvature = (f12 - f01) / (x2 - x0);
    w.location = x1;
    if (curvature > 0.0) w.location = std::clamp(0.5 * (x0 + x1) - f01 / (2.0 * curvature), x0, x2);

    w.e2_min = y1;
    bool clipped = false;
    std::tie(w.left_2x, w.right_2x) = level_interval(x, e2, imin, 2.0 * y1, clipped);
    std::tie(w.left_4x, w.right_4x) = level_interval(x, e2, imin, 4.0 * y1, clipped);
    w.clipped = clipped;
    w.half_width_2x = 0.5 * (w.right_2x - w.left_2x);
    return w;
}

CriticalEstimate estimate_sigma_star(const CrossingFamily& family) {
    family.validate();
    if (family.sizes.size() < 3)
        throw std::invalid_argument("need >= 3 L values for the systematic error protocol");

    CriticalEstimate est;
    est.sizes = family.sizes;
    est.p = family.p;
    est.realizations = family.realizations;
    est.all_sizes = locate_waist(family);
    const CrossingFamily reduced = family.without_smallest();
    est.drop_smallest = locate_waist(reduced);
    if (reduced.sizes.size() >= 3) {
        try {
            est.drop_two = locate_waist(reduced.without_smallest());
        } catch (const std::domain_error&) {
            est.warnings.push_back("two-drop diagnostic: minimum on grid boundary");
        }
    }

    est.sigma_star = est.drop_smallest.location;
    est.stat_err = est.drop_smallest.half_width_2x;
    // Two curves cross exactly, so E^2 touches zero and the 2x interval collapses.
    if (reduced.sizes.size() == 2) {
        est.stat_err = std::max(est.stat_err, est.all_sizes.half_width_2x);
        est.warnings.push_back("headline family has two curves; stat_err floored at the all-L half-width");
    }
    est.sys_err = 2.0 * std::abs(est.all_sizes.location - est.drop_smallest.location);
    est.combined_err = est.stat_err + est.sys_err;
    est.e2_min = est.drop_smallest.e2_min;

    if (est.all_sizes.multiple_minima || est.drop_smallest.multiple_minima)
        est.warnings.push_back("E^2 has several grid minima; smallest location taken");
    if (est.all_sizes.clipped || est.drop_smallest.clipped)
        est.warnings.push_back("error interval clipped at the grid edge");
    return est;
}

double bond_threshold(int dim) {
    switch (dim) {
        case 2: return 0.5;
        case 3: return 0.24881182;
        case 4: return 0.160130;
        default: return 0.0;
    }
}

bool CurveTable::clean() const {
    return std::all_of(rows.begin(), rows.end(), [](const CurveTableRow& r) { return r.flags.empty(); });
}

CurveTable curve_table(int d, int s, std::vector<CriticalEstimate> estimates) {
    CurveTable table;
    table.d = d;
    table.s = s;
    for (auto& e : estimates) {
        if (!e.p) throw std::invalid_argument("curve table rows need a bulk density p");
        table.rows.push_back({*e.p, std::move(e), {}});
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const CurveTableRow& a, const CurveTableRow& b) { return a.p < b.p; });

    const double lower = bond_threshold(d);
    const double upper = bond_threshold(s);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto& row = table.rows[i];
        const double v = row.estimate.sigma_star;
        const double err = row.estimate.combined_err;
        if (lower > 0.0 && row.p <= lower && v + err < lower) row.flags.push_back("below_pc_d");
        if (upper > 0.0 && v - err > upper) row.flags.push_back("above_pc_s");
        if (i > 0) {
            const auto& prev = table.rows[i - 1];
            if (v - prev.estimate.sigma_star > err + prev.estimate.combined_err)
                row.flags.push_back("not_decreasing");
        }
    }
    return table;
}

std::string curve_table_csv(const CurveTable& table) {
    std::ostringstream out;
    out << "p,sigma_star,stat_err,sys_err,combined_err,L_list,realizations,flags\n";
    out << std::setprecision(10);
    for (const auto& row : table.rows) {
        const auto& e = row.estimate;
        out << row.p << ',' << e.sigma_star << ',' << e.stat_err << ',' << e.sys_err << ',' << e.combined_err
            << ',';
        for (std::size_t i = 0; i < e.sizes.size(); ++i) out << (i ? ";" : "") << e.sizes[i];
        out << ',' << e.realizations << ',';
        for (std::size_t i = 0; i < row.flags.size(); ++i) out << (i ? ";" : "") << row.flags[i];
        out << '\n';
    }
    return out.str();
}

}  // namespace dperc
