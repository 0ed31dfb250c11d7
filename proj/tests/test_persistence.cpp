#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <filesystem>

#include "dperc/commands.hpp"
#include "dperc/persistence.hpp"

using namespace dperc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dperc_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

MicrocanonicalCurve small_curve(std::uint64_t seed = 4) {
    SweepConfig c;
    c.spec = {3, 2, 2, Boundary::free};
    c.p = 0.1;
    c.realizations = 200;
    c.seed = seed;
    return sweep(c, 2);
}

Json without_run(Json j) {
    j.erase("run");
    return j;
}

}  // namespace

TEST_CASE("curve JSON round trip is idempotent") {
    const MicrocanonicalCurve curve = small_curve();
    const Json first = curve_to_json(curve, {3, "2026-01-01T00:00:00Z"});
    RunInfo run;
    const MicrocanonicalCurve back = curve_from_json(Json::parse(first.dump()), &run);
    CHECK(back.counts() == curve.counts());
    CHECK(back.meta == curve.meta);
    CHECK(run.workers == 3);
    const Json second = curve_to_json(back, run);
    CHECK(second.dump(2) == first.dump(2));
}

TEST_CASE("config hash ignores execution details") {
    const MicrocanonicalCurve curve = small_curve();
    const Json a = curve_to_json(curve, {1, "t1"});
    const Json b = curve_to_json(curve, {8, "t2"});
    CHECK(a.at("config_hash") == b.at("config_hash"));
    CHECK(without_run(a) == without_run(b));
    const Json c = curve_to_json(small_curve(5), {1, "t1"});
    CHECK(a.at("config_hash") != c.at("config_hash"));
}

TEST_CASE("corrupt documents are refused") {
    Json j = curve_to_json(small_curve(), {1, ""});
    Json bad = j;
    bad["format"] = "something-else";
    CHECK_THROWS(curve_from_json(bad));
    bad = j;
    bad["counts"][3] = 0;
    bad["counts"][2] = 5;
    CHECK_THROWS(curve_from_json(bad));
    bad = j;
    bad["counts"].erase(0);
    CHECK_THROWS(curve_from_json(bad));
}

TEST_CASE("canonical and cluster documents round trip") {
    const CanonicalCurve cc = canonical_curve(small_curve(), make_grid(0.3, 0.7, 0.1));
    const CanonicalCurve back = canonical_from_json(canonical_to_json(cc));
    CHECK(back.values == cc.values);
    CHECK(back.grid == cc.grid);
    CHECK(back.meta == cc.meta);

    ClusterConfig cfg;
    cfg.spec = {3, 2, 5, Boundary::free};
    cfg.p = 0.1;
    cfg.sigma = 0.4;
    cfg.samples = 2000;
    cfg.seed = 1;
    const ClusterDistribution d = sample_distribution(cfg, 1);
    const ClusterDistribution e = distribution_from_json(distribution_to_json(d, {1, ""}));
    CHECK(e.hist_v == d.hist_v);
    CHECK(e.hist_e == d.hist_e);
    CHECK(e.boundary_count == d.boundary_count);
    CHECK(e.spec == d.spec);
}

TEST_CASE("sweep, convolve and estimate commands") {
    const fs::path dir = scratch("pipeline");
    SweepOptions sw;
    sw.sizes = {4, 6, 8};
    sw.p_values = {0.0};
    sw.realizations = 1000;
    sw.seed = 7;
    sw.workers = 2;
    sw.out_dir = dir;
    const auto curves = cmd_sweep(sw);
    REQUIRE(curves.size() == 3);

    // Same config, different worker count: identical apart from the run block.
    SweepOptions again = sw;
    again.workers = 1;
    again.out_dir = dir / "again";
    const auto rerun = cmd_sweep(again);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(without_run(read_json(curves[i])).dump() == without_run(read_json(rerun[i])).dump());

    ConvolveOptions cv;
    cv.inputs = curves;
    cv.grid = {0.0, 0.5, 1.0};
    cv.out_dir = dir;
    const auto canon = cmd_convolve(cv);
    for (std::size_t i = 0; i < 3; ++i) {
        const MicrocanonicalCurve m = curve_from_json(read_json(curves[i]));
        const CanonicalCurve c = canonical_from_json(read_json(canon[i]));
        CHECK(c.values.front() == m.fraction(0));
        CHECK(c.values.back() == m.fraction(m.edge_slots()));
    }

    cv.grid = make_grid(0.4, 0.6, 0.002);
    cv.format = "csv";
    const auto csv = cmd_convolve(cv);
    CHECK(read_text(csv[0]).rfind("sigma,Q,stderr\n", 0) == 0);

    cv.format = "json";
    const auto fine = cmd_convolve(cv);
    EstimateOptions es;
    es.inputs = {fine[0], fine[1]};
    es.out_dir = dir;
    CHECK_THROWS_WITH(cmd_estimate(es), doctest::Contains("need >= 3 L values"));
    es.inputs = fine;
    const auto est = cmd_estimate(es);
    REQUIRE(est.size() == 1);
    CHECK(fs::exists(dir / "estimate.json"));
    CHECK(read_text(dir / "estimate.csv").find("4;6;8") != std::string::npos);
}

TEST_CASE("zero realizations and the output-directory variable") {
    SweepOptions sw;
    sw.sizes = {2};
    sw.p_values = {0.1};
    sw.realizations = 0;
    CHECK_THROWS(cmd_sweep(sw));

    const fs::path dir = scratch("envdir");
    setenv("DPERC_OUT_DIR", dir.c_str(), 1);
    CHECK(default_output_dir() == dir);
    MeanFieldOptions mf;
    mf.p_grid = {0.0, 0.1};
    const std::string csv = cmd_meanfield(mf);
    CHECK(csv.find("0.1,0.498998") != std::string::npos);
    sw.realizations = 20;
    const auto written = cmd_sweep(sw);
    CHECK(written.at(0).parent_path() == dir);
    unsetenv("DPERC_OUT_DIR");
}

TEST_CASE("cluster, animals, audit and homog commands write their reports") {
    const fs::path dir = scratch("others");
    ClusterDistOptions cd;
    cd.N = 6;
    cd.samples = 20000;
    cd.out_dir = dir;
    cmd_cluster_dist(cd);
    CHECK(fs::exists(dir / "cluster_d3_s2_N6_p0.1_sigma0.1.json"));
    CHECK(read_json(dir / "cluster_d3_s2_N6_p0.1_sigma0.1_decay.json").at("format") == kDecayFormat);

    AnimalsOptions an;
    an.max_edges = 4;
    an.out_dir = dir;
    CHECK(cmd_animals(an));
    CHECK(parse_census_csv(read_text(dir / "animals_d3_s2_n4.csv")).animals_with_edges(1) == 6);

    AuditOptions au;
    au.samples = 5000;
    au.out_dir = dir;
    au.N = 6;
    CHECK(cmd_audit_inequalities(au));

    HomogOptions hg;
    hg.d = 2;
    hg.sizes = {3, 5, 7};
    hg.grid = make_grid(0.40, 0.60, 0.005);
    hg.realizations = 500;
    hg.out_dir = dir;
    const CriticalEstimate e = cmd_homog(hg);
    CHECK(std::abs(e.sigma_star - 0.5) < 0.05);
    CHECK(fs::exists(dir / "estimate_homog_d2.json"));
}
