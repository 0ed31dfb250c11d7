#include "dperc/persistence.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dperc {

namespace {

void expect_format(const Json& j, const char* format) {
    if (!j.is_object() || !j.contains("format") || j.at("format") != format)
        throw std::invalid_argument(std::string("expected a ") + format + " document");
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

Json spec_to_json(const LatticeSpec& spec) {
    return {{"d", spec.d}, {"s", spec.s}, {"L", spec.L}, {"boundary", to_string(spec.boundary)}};
}

LatticeSpec spec_from_json(const Json& j) {
    LatticeSpec spec;
    spec.d = j.at("d").get<int>();
    spec.s = j.at("s").get<int>();
    spec.L = j.at("L").get<int>();
    spec.boundary = parse_boundary(j.value("boundary", std::string("free")));
    return spec;
}

Json meta_to_json(const CurveMeta& meta) {
    Json j = spec_to_json(meta.spec);
    j["kind"] = to_string(meta.kind);
    j["p"] = optional_number(meta.p);
    j["seed"] = meta.seed;
    j["rng"] = meta.rng;
    j["realizations"] = meta.realizations;
    j["face_pairs"] = meta.face_pairs;
    return j;
}

CurveMeta meta_from_json(const Json& j) {
    CurveMeta m;
    m.spec = spec_from_json(j);
    m.kind = parse_sweep_kind(j.at("kind").get<std::string>());
    if (!j.at("p").is_null()) m.p = j.at("p").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.rng = j.at("rng").get<std::string>();
    m.realizations = j.at("realizations").get<std::uint64_t>();
    m.face_pairs = j.value("face_pairs", 1);
    return m;
}

std::string config_hash(const Json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

Json curve_to_json(const MicrocanonicalCurve& curve, const RunInfo& run) {
    const Json meta = meta_to_json(curve.meta);
    return {{"format", kCurveFormat},
            {"meta", meta},
            {"config_hash", config_hash(meta)},
            {"edge_slots", curve.edge_slots()},
            {"trials", curve.trials()},
            {"counts", curve.counts()},
            {"run", {{"workers", run.workers}, {"timestamp", run.timestamp}}}};
}

MicrocanonicalCurve curve_from_json(const Json& j, RunInfo* run) {
    expect_format(j, kCurveFormat);
    CurveMeta meta = meta_from_json(j.at("meta"));
    auto counts = j.at("counts").get<std::vector<std::uint64_t>>();
    if (j.contains("edge_slots") && counts.size() != j.at("edge_slots").get<std::size_t>() + 1)
        throw std::invalid_argument("counts length does not match edge_slots + 1");
    if (run && j.contains("run")) {
        run->workers = j.at("run").value("workers", 1);
        run->timestamp = j.at("run").value("timestamp", std::string());
    }
    return MicrocanonicalCurve::from_counts(std::move(meta), std::move(counts), j.at("trials").get<std::uint64_t>());
}

Json canonical_to_json(const CanonicalCurve& curve) {
    const Json meta = meta_to_json(curve.meta);
    return {{"format", kCanonicalFormat},
            {"meta", meta},
            {"config_hash", config_hash(meta)},
            {"edge_slots", curve.edge_slots},
            {"trials", curve.trials},
            {"variable", curve.variable()},
            {"grid", curve.grid},
            {"values", curve.values},
            {"stderr", curve.stderrs}};
}

CanonicalCurve canonical_from_json(const Json& j) {
    expect_format(j, kCanonicalFormat);
    CanonicalCurve c;
    c.meta = meta_from_json(j.at("meta"));
    c.edge_slots = j.at("edge_slots").get<std::size_t>();
    c.trials = j.at("trials").get<std::uint64_t>();
    c.grid = j.at("grid").get<std::vector<double>>();
    c.values = j.at("values").get<std::vector<double>>();
    c.stderrs = j.at("stderr").get<std::vector<double>>();
    if (c.values.size() != c.grid.size() || c.stderrs.size() != c.grid.size())
        throw std::invalid_argument("canonical curve arrays differ in length");
    return c;
}

std::string canonical_csv(const CanonicalCurve& curve) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << curve.variable() << ",Q,stderr\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << curve.grid[i] << ',' << curve.values[i] << ',' << curve.stderrs[i] << '\n';
    return out.str();
}

Json waist_to_json(const WaistEstimate& w) {
    return {{"location", w.location},
            {"e2_min", w.e2_min},
            {"half_width_2x", w.half_width_2x},
            {"interval_2x", {w.left_2x, w.right_2x}},
            {"interval_4x", {w.left_4x, w.right_4x}},
            {"clipped", w.clipped},
            {"multiple_minima", w.multiple_minima}};
}

Json estimate_to_json(const CriticalEstimate& e) {
    Json j = {{"format", kEstimateFormat},
              {"sigma_star", e.sigma_star},
              {"stat_err", e.stat_err},
              {"sys_err", e.sys_err},
              {"combined_err", e.combined_err},
              {"e2_min", e.e2_min},
              {"p", optional_number(e.p)},
              {"L_list", e.sizes},
              {"realizations", e.realizations},
              {"all_sizes", waist_to_json(e.all_sizes)},
              {"drop_smallest", waist_to_json(e.drop_smallest)},
              {"drop_two", e.drop_two ? waist_to_json(*e.drop_two) : Json(nullptr)},
              {"warnings", e.warnings}};
    return j;
}

Json distribution_to_json(const ClusterDistribution& dist, const RunInfo& run) {
    Json meta = spec_to_json(dist.spec);
    meta.erase("L");
    meta["N"] = dist.spec.L;
    meta["p"] = dist.p;
    meta["sigma"] = dist.sigma;
    meta["seed"] = dist.seed;
    meta["rng"] = dist.rng;
    meta["samples"] = dist.samples;
    return {{"format", kClusterFormat},
            {"meta", meta},
            {"config_hash", config_hash(meta)},
            {"hist_v", dist.hist_v},
            {"hist_e", dist.hist_e},
            {"boundary_count", dist.boundary_count},
            {"run", {{"workers", run.workers}, {"timestamp", run.timestamp}}}};
}

ClusterDistribution distribution_from_json(const Json& j) {
    expect_format(j, kClusterFormat);
    const Json& m = j.at("meta");
    ClusterDistribution dist;
    dist.spec.d = m.at("d").get<int>();
    dist.spec.s = m.at("s").get<int>();
    dist.spec.L = m.at("N").get<int>();
    dist.spec.boundary = parse_boundary(m.value("boundary", std::string("free")));
    dist.p = m.at("p").get<double>();
    dist.sigma = m.at("sigma").get<double>();
    dist.seed = m.at("seed").get<std::uint64_t>();
    dist.rng = m.at("rng").get<std::string>();
    dist.samples = m.at("samples").get<std::uint64_t>();
    dist.hist_v = j.at("hist_v").get<std::vector<std::uint64_t>>();
    dist.hist_e = j.at("hist_e").get<std::vector<std::uint64_t>>();
    dist.boundary_count = j.at("boundary_count").get<std::uint64_t>();
    std::uint64_t total = dist.boundary_count;
    for (auto c : dist.hist_v) total += c;
    if (total != dist.samples) throw std::invalid_argument("histogram does not add up to the sample count");
    return dist;
}

std::string distribution_csv(const ClusterDistribution& dist) {
    std::ostringstream out;
    out << "n,count_vertices,count_edges\n";
    const std::size_t n = std::max(dist.hist_v.size(), dist.hist_e.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = i < dist.hist_v.size() ? dist.hist_v[i] : 0;
        const auto e = i < dist.hist_e.size() ? dist.hist_e[i] : 0;
        if (v || e) out << i << ',' << v << ',' << e << '\n';
    }
    return out.str();
}

Json decay_fit_to_json(const DecayFit& fit) {
    Json candidates = Json::array();
    for (const auto& c : fit.candidates)
        candidates.push_back({{"alpha", c.alpha}, {"rate", c.rate}, {"intercept", c.intercept}, {"rss", c.rss}});
    return {{"format", kDecayFormat},
            {"conclusive", fit.conclusive},
            {"note", fit.note},
            {"window", {fit.window_lo, fit.window_hi}},
            {"points", fit.points},
            {"candidates", candidates},
            {"selected_alpha", fit.conclusive ? Json(fit.selected_alpha) : Json(nullptr)}};
}

namespace {

Json check_to_json(const InequalityCheck& c) {
    return {{"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"stderr", c.stderr_}, {"pass", c.pass}};
}

}  // namespace

Json audit_to_json(const AuditReport& r) {
    const auto& c = r.config;
    Json config = spec_to_json(c.spec);
    config.erase("L");
    config["N"] = c.spec.L;
    config["p"] = c.p;
    config["sigma"] = c.sigma;
    config["gamma"] = c.gamma;
    config["h"] = c.h;
    config["samples_per_point"] = c.samples_per_point;
    config["seed"] = c.seed;
    config["blocks"] = c.blocks;
    return {{"format", kAuditFormat},
            {"config", config},
            {"theta", r.theta},
            {"dtheta_dp", r.dtheta_dp},
            {"dtheta_dsigma", r.dtheta_dsigma},
            {"dtheta_dgamma", r.dtheta_dgamma},
            {"chi_homogeneous", r.chi_homogeneous},
            {"first", check_to_json(r.first)},
            {"second", check_to_json(r.second)},
            {"pass", r.pass}};
}

Json identity_audit_to_json(const IdentityAudit& a) {
    return {{"animals", a.animals},
            {"not_rooted_or_connected", a.not_rooted_or_connected},
            {"euler_violations", a.euler_violations},
            {"incidence_violations", a.incidence_violations},
            {"perimeter_violations", a.perimeter_violations},
            {"clean", a.clean()}};
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Json read_json(const std::filesystem::path& path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace dperc
