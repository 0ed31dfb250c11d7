#include "dperc/commands.hpp"

#include <omp.h>

#include <cstdlib>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dperc/animals.hpp"
#include "dperc/meanfield.hpp"
#include "dperc/observables.hpp"
#include "dperc/persistence.hpp"

namespace dperc {

namespace fs = std::filesystem;

fs::path default_output_dir() {
    if (const char* env = std::getenv("DPERC_OUT_DIR"); env && *env) return fs::path(env);
    return fs::current_path();
}

int default_workers() { return std::max(1, omp_get_num_procs()); }

namespace {

std::string num(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

fs::path out_dir_or_default(const fs::path& dir) { return dir.empty() ? default_output_dir() : dir; }

RunInfo run_info(int workers) { return {workers, utc_timestamp()}; }

void require_workers(int workers) {
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
}

}  // namespace

std::vector<fs::path> cmd_sweep(const SweepOptions& opt) {
    if (opt.realizations == 0) throw std::invalid_argument("realizations must be >= 1");
    if (opt.sizes.empty()) throw std::invalid_argument("at least one L is required");
    if (opt.p_values.empty()) throw std::invalid_argument("at least one p is required");
    require_workers(opt.workers);
    const fs::path dir = out_dir_or_default(opt.out_dir);
    std::vector<fs::path> written;
    for (double p : opt.p_values) {
        for (int L : opt.sizes) {
            SweepConfig cfg;
            cfg.spec = {opt.d, opt.s, L, Boundary::free};
            cfg.p = p;
            cfg.realizations = opt.realizations;
            cfg.seed = opt.seed;
            cfg.face_pairs = opt.face_pairs;
            const MicrocanonicalCurve curve = sweep(cfg, opt.workers);
            const fs::path path =
                dir / ("curve_d" + num(opt.d) + "_s" + num(opt.s) + "_L" + num(L) + "_p" + num(p) + ".json");
            write_json(path, curve_to_json(curve, run_info(opt.workers)));
            written.push_back(path);
        }
    }
    return written;
}

std::vector<fs::path> cmd_convolve(const ConvolveOptions& opt) {
    if (opt.inputs.empty()) throw std::invalid_argument("no curve files given");
    if (opt.grid.empty()) throw std::invalid_argument("empty grid");
    if (opt.format != "json" && opt.format != "csv") throw std::invalid_argument("format must be json or csv");
    const fs::path dir = out_dir_or_default(opt.out_dir);
    std::vector<fs::path> written;
    for (const auto& in : opt.inputs) {
        MicrocanonicalCurve curve;
        try {
            curve = curve_from_json(read_json(in));
        } catch (const std::exception& e) {
            throw std::runtime_error(in.string() + ": " + e.what());
        }
        const CanonicalCurve canon = canonical_curve(curve, opt.grid);
        std::string stem = in.stem().string();
        if (stem.rfind("curve_", 0) == 0) stem = stem.substr(6);
        const fs::path path = dir / ("canonical_" + stem + "." + opt.format);
        if (opt.format == "json") {
            write_json(path, canonical_to_json(canon));
        } else {
            write_text(path, canonical_csv(canon));
        }
        written.push_back(path);
    }
    return written;
}

std::vector<CriticalEstimate> cmd_estimate(const EstimateOptions& opt) {
    if (opt.inputs.empty()) throw std::invalid_argument("no canonical curve files given");
    std::map<std::optional<double>, std::vector<CanonicalCurve>> groups;
    std::map<std::optional<double>, std::vector<std::string>> hashes;
    for (const auto& in : opt.inputs) {
        const Json j = read_json(in);
        CanonicalCurve c;
        try {
            c = canonical_from_json(j);
        } catch (const std::exception& e) {
            throw std::runtime_error(in.string() + ": " + e.what());
        }
        hashes[c.meta.p].push_back(j.value("config_hash", std::string()));
        groups[c.meta.p].push_back(std::move(c));
    }

    std::vector<CriticalEstimate> estimates;
    Json doc = {{"format", kEstimateFormat}, {"estimates", Json::array()}};
    for (auto& [p, curves] : groups) {
        const CurveMeta meta = curves.front().meta;
        const CrossingFamily family = make_family(curves, opt.force);
        CriticalEstimate est = estimate_sigma_star(family);
        Json entry = estimate_to_json(est);
        entry.erase("format");
        entry["d"] = meta.spec.d;
        entry["s"] = meta.spec.s;
        entry["kind"] = to_string(meta.kind);
        entry["inputs"] = hashes[p];
        entry["forced"] = opt.force;
        doc["estimates"].push_back(entry);
        estimates.push_back(std::move(est));
    }
    const fs::path dir = out_dir_or_default(opt.out_dir);
    write_json(dir / (opt.name + ".json"), doc);

    std::vector<CriticalEstimate> with_p;
    for (const auto& e : estimates)
        if (e.p) with_p.push_back(e);
    if (!with_p.empty()) {
        const auto& any = groups.begin()->second.front().meta.spec;
        write_text(dir / (opt.name + ".csv"), curve_table_csv(curve_table(any.d, any.s, with_p)));
    }
    return estimates;
}

std::optional<double> cmd_cluster_dist(const ClusterDistOptions& opt) {
    if (opt.samples == 0) throw std::invalid_argument("samples must be >= 1");
    if (opt.format != "json" && opt.format != "csv") throw std::invalid_argument("format must be json or csv");
    require_workers(opt.workers);
    ClusterConfig cfg;
    cfg.spec = {opt.d, opt.s, opt.N, Boundary::free};
    cfg.p = opt.p;
    cfg.sigma = opt.sigma;
    cfg.samples = opt.samples;
    cfg.seed = opt.seed;
    const ClusterDistribution dist = sample_distribution(cfg, opt.workers);
    const DecayFit fit = decay_fit(dist, regime_exponents(opt.d, opt.s));

    const std::string stem = "cluster_d" + num(opt.d) + "_s" + num(opt.s) + "_N" + num(opt.N) + "_p" +
                             num(opt.p) + "_sigma" + num(opt.sigma);
    const fs::path dir = out_dir_or_default(opt.out_dir);
    if (opt.format == "json") {
        write_json(dir / (stem + ".json"), distribution_to_json(dist, run_info(opt.workers)));
    } else {
        write_text(dir / (stem + ".csv"), distribution_csv(dist));
    }
    Json report = decay_fit_to_json(fit);
    report["source"] = distribution_to_json(dist, {}).at("config_hash");
    report["boundary_fraction"] = dist.boundary_fraction();
    report["chi_finite"] = ghost_chi(dist, 0.0);
    write_json(dir / (stem + "_decay.json"), report);
    if (!fit.conclusive) return std::nullopt;
    return fit.selected_alpha;
}

std::string cmd_meanfield(const MeanFieldOptions& opt) {
    if (opt.p_grid.empty()) throw std::invalid_argument("empty p grid");
    MeanFieldInput in;
    in.d = opt.d;
    in.s = opt.s;
    in.sigma_c = opt.sigma_c ? *opt.sigma_c : default_sigma_c(opt.s);
    if (in.sigma_c <= 0.0) throw std::invalid_argument("no default sigma_c for this s; pass --sigma-c");
    std::ostringstream out;
    out << "p,sigma_mf,sigma_mf_cubic,within_validity\n" << std::setprecision(12);
    for (double p : opt.p_grid) {
        in.p = p;
        in.validate();
        const MeanFieldResult r = sigma_star_mf(in);
        out << p << ',' << r.value << ',' << sigma_star_mf_cubic(in) << ',' << (r.within_validity ? 1 : 0) << '\n';
    }
    if (!opt.out.empty()) write_text(opt.out, out.str());
    return out.str();
}

bool cmd_animals(const AnimalsOptions& opt) {
    require_workers(opt.workers);
    const int cap = opt.max_edges ? *opt.max_edges : default_edge_cap(opt.d);
    const Enumeration en = enumerate_animals(opt.d, opt.s, cap, opt.workers, opt.force);

    Json cycles = Json::array();
    for (const auto& [k, count] : en.cycles.entries)
        cycles.push_back({{"n", k.n}, {"c", k.c}, {"k", k.k}, {"count", count}});

    // Supermultiplicativity on the grid {0.5, 1, 2}^3 for every admissible (n1, n2).
    const long double axis[] = {0.5L, 1.0L, 2.0L};
    std::uint64_t checked = 0, failed = 0;
    for (int n1 = 0; n1 + 2 <= cap; ++n1)
        for (int n2 = 0; n1 + n2 + 2 <= cap; ++n2)
            for (auto x : axis)
                for (auto y : axis)
                    for (auto z : axis) {
                        ++checked;
                        if (!supermult_audit(en.census, x, y, z, n1, n2).holds) ++failed;
                    }

    Json totals = Json::object();
    for (int n = 0; n <= cap; ++n) totals[std::to_string(n)] = en.census.animals_with_edges(n);

    const Json report = {{"format", kAnimalsFormat},
                         {"d", opt.d},
                         {"s", opt.s},
                         {"max_edges", cap},
                         {"animals_by_edges", totals},
                         {"identities", identity_audit_to_json(en.audit)},
                         {"cycle_contact_census", cycles},
                         {"supermultiplicativity", {{"checked", checked}, {"failed", failed}}}};
    const std::string stem = "animals_d" + num(opt.d) + "_s" + num(opt.s) + "_n" + num(cap);
    const fs::path dir = out_dir_or_default(opt.out_dir);
    write_text(dir / (stem + ".csv"), census_csv(en.census));
    write_json(dir / (stem + "_audit.json"), report);
    return en.audit.clean() && failed == 0;
}

bool cmd_audit_inequalities(const AuditOptions& opt) {
    if (opt.samples == 0) throw std::invalid_argument("samples must be >= 1");
    require_workers(opt.workers);
    AuditConfig cfg;
    cfg.spec = {opt.d, opt.s, opt.N, Boundary::free};
    cfg.p = opt.p;
    cfg.sigma = opt.sigma;
    cfg.gamma = opt.gamma;
    cfg.h = opt.h;
    cfg.samples_per_point = opt.samples;
    cfg.seed = opt.seed;
    const AuditReport report = inequality_audit(cfg, opt.workers);
    const fs::path dir = out_dir_or_default(opt.out_dir);
    write_json(dir / ("audit_d" + num(opt.d) + "_s" + num(opt.s) + "_p" + num(opt.p) + "_sigma" +
                      num(opt.sigma) + "_gamma" + num(opt.gamma) + ".json"),
               audit_to_json(report));
    return report.pass;
}

CriticalEstimate cmd_homog(const HomogOptions& opt) {
    if (opt.realizations == 0) throw std::invalid_argument("realizations must be >= 1");
    if (opt.sizes.size() < 3) throw std::invalid_argument("need >= 3 L values for the systematic error protocol");
    if (opt.grid.empty()) throw std::invalid_argument("empty p grid");
    require_workers(opt.workers);
    const fs::path dir = out_dir_or_default(opt.out_dir);
    std::vector<CanonicalCurve> canon;
    for (int L : opt.sizes) {
        SweepConfig cfg;
        cfg.spec = {opt.d, opt.d, L, Boundary::free};
        cfg.kind = SweepKind::homogeneous;
        cfg.realizations = opt.realizations;
        cfg.seed = opt.seed;
        const MicrocanonicalCurve curve = sweep(cfg, opt.workers);
        const std::string tag = "homog_d" + num(opt.d) + "_L" + num(L);
        write_json(dir / ("curve_" + tag + ".json"), curve_to_json(curve, run_info(opt.workers)));
        canon.push_back(canonical_curve(curve, opt.grid));
        write_json(dir / ("canonical_" + tag + ".json"), canonical_to_json(canon.back()));
    }
    const CriticalEstimate est = estimate_sigma_star(make_family(canon));
    Json j = estimate_to_json(est);
    j["d"] = opt.d;
    j["kind"] = "homogeneous";
    j["variable"] = "p";
    write_json(dir / ("estimate_homog_d" + num(opt.d) + ".json"), j);
    return est;
}

}  // namespace dperc
