#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "agb/grid_ops.hpp"
#include "agb/manifest.hpp"
#include "agb/pipeline.hpp"

using namespace agb;
namespace fs = std::filesystem;

namespace {

SynthWorldSpec tinySpec() {
    SynthWorldSpec spec;
    spec.nrows = 60;
    spec.ncols = 60;
    spec.year_start = 2001;
    spec.year_end = 2003;
    spec.n_plots = 120;
    spec.seed = 99;
    DisturbanceEvent d;
    d.year = 2002;
    d.cx = 900.0;
    d.cy = 900.0;
    d.radius = 250.0;
    d.magnitude = 50.0;
    d.recovery_rate = 10.0;
    spec.disturbances.push_back(d);
    return spec;
}

std::uint64_t dir_hash(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& f : files) {
        h ^= fnv1a64_file(f);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

TEST_CASE("synth world: deterministic, zero-noise plot identity, disturbance contract") {
    const auto base = fs::temp_directory_path() / "agb_synth_test";
    fs::remove_all(base);

    SynthWorldSpec spec = tinySpec();
    spec.predictor_noise_sd = 0.0;
    const auto w1 = synth_generate(spec, base / "w1");
    const auto w2 = synth_generate(spec, base / "w2");
    CHECK(dir_hash(base / "w1") == dir_hash(base / "w2"));

    // plot AGB equals the footprint-weighted truth extraction exactly
    const auto plots = read_plots_csv(w1.plots_path());
    REQUIRE(plots.size() == 120);
    std::map<int, Grid> truth;
    for (int y : w1.years) truth.emplace(y, read_grid(w1.truth_path(y)));
    for (const auto& p : plots) {
        const auto cov = build_footprint(p).coverage(truth.at(p.year).geo);
        CHECK(p.agb == doctest::Approx(weighted_extract(cov, truth.at(p.year))).epsilon(1e-12));
        if (p.true_zero) CHECK(p.agb == 0.0);
    }

    // disturbance: truth drops by exactly the magnitude at the event center
    const auto& d = spec.disturbances[0];
    const auto& before = truth.at(d.year - 1);
    const auto& at = truth.at(d.year);
    const int row = before.geo.row_of(d.cy);
    const int col = before.geo.col_of(d.cx);
    const float pre = before.at(row, col);
    if (pre > d.magnitude)  // clamp-free case
        CHECK(at.at(row, col) == doctest::Approx(pre - d.magnitude).epsilon(1e-6));
    CHECK(at.at(row, col) <= pre);

    // recovery year moves back toward the undisturbed trajectory
    const auto& after = truth.at(d.year + 1);
    CHECK(after.at(row, col) >= at.at(row, col));

    fs::remove_all(base);
}

TEST_CASE("synth world: lidar surface is nodata off the vegetated mask") {
    const auto base = fs::temp_directory_path() / "agb_synth_lidar";
    fs::remove_all(base);
    const auto w = synth_generate(tinySpec(), base);
    const Grid lidar = read_grid(w.lidar_path());
    const ClassGrid cls = read_class_grid(w.class_path(w.lidar_year));
    for (std::size_t i = 0; i < lidar.values.size(); ++i) {
        if (lcmap::vegetated(cls.codes[i]))
            CHECK(lidar.values[i] != lidar.nodata);
        else
            CHECK(lidar.values[i] == lidar.nodata);
    }
    fs::remove_all(base);
}

TEST_CASE("run_pipeline: artifacts, ensemble identity, manifest completeness") {
    const auto base = fs::temp_directory_path() / "agb_pipe_test";
    fs::remove_all(base);
    synth_generate(tinySpec(), base / "world");

    RunConfig cfg;
    cfg.world_dir = base / "world";
    cfg.approach = "ensemble";
    cfg.seed = 31;
    cfg.threads = 2;
    cfg.sample_strata = 8;
    cfg.sample_per_stratum = 30;
    cfg.direct.components = {
        {"rf", {{"num_trees", 12}, {"min_node_size", 2}, {"sample_fraction", 0.9}}},
        {"gbm",
         {{"num_rounds", 15}, {"num_leaves", 6}, {"min_data_in_leaf", 3},
          {"min_data_in_bin", 2}, {"learning_rate", 0.15}}}};
    cfg.indirect.components = {
        {"rf", {{"num_trees", 12}, {"min_node_size", 3}, {"replace", false}}},
        {"gbm",
         {{"num_rounds", 20}, {"num_leaves", 8}, {"min_data_in_leaf", 3},
          {"min_data_in_bin", 2}}}};
    cfg.indirect.oof_folds = 4;
    cfg.scales_m = {500.0, 900.0};
    cfg.residual_spacing_m = 900.0;
    cfg.boot_iters = 80;

    const auto res = run_pipeline(cfg, base / "out");
    CHECK(res.approaches_run.size() == 3);

    // required artifacts
    for (const char* f :
         {"models/direct.json", "models/indirect.json", "models/averaged.json",
          "agreement_ensemble.csv", "agreement_direct.csv", "agreement_indirect.csv",
          "series_ensemble.csv", "test_metrics.csv", "manifest.json", "samples.csv"})
        CHECK(fs::exists(base / "out" / f));

    // ensemble surface is the cellwise mean of the member surfaces
    const Grid d = read_grid(base / "out/surfaces/agb_direct_2002");
    const Grid i = read_grid(base / "out/surfaces/agb_indirect_2002");
    const Grid e = read_grid(base / "out/surfaces/agb_ensemble_2002");
    for (std::size_t k = 0; k < e.values.size(); ++k)
        CHECK(e.values[k] == (d.values[k] + i.values[k]) / 2.0f);

    // manifest lists every output file with its hash
    std::ifstream mf(base / "out/manifest.json");
    nlohmann::json manifest;
    mf >> manifest;
    CHECK(manifest.at("complete").get<bool>());
    std::size_t fileCount = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "out"))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
            ++fileCount;
    CHECK(manifest.at("outputs").size() == fileCount);
    for (const auto& o : manifest.at("outputs")) {
        const auto p = base / "out" / o.at("path").get<std::string>();
        CHECK(fs::exists(p));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(p)));
        CHECK(o.at("fnv1a64").get<std::string>() == buf);
    }

    fs::remove_all(base);
}

TEST_CASE("run_pipeline: config validation failures") {
    RunConfig cfg;
    cfg.world_dir = "/nonexistent/world/dir";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    RunConfig bad;
    bad.world_dir = fs::temp_directory_path();
    bad.approach = "both";
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    RunConfig noComps;
    noComps.world_dir = fs::temp_directory_path();
    noComps.approach = "direct";
    CHECK_THROWS_AS(noComps.validate(), ConfigError);
}
