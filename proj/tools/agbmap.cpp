// agbmap: forest aboveground-biomass modeling and map-agreement toolkit.
//
// Subcommands cover the full pipeline (synth-gen, sample, assemble, tune,
// train, predict, mask, diff, series, trajectory, assess, small-area,
// report, run). Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric
// failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "agb/csv.hpp"
#include "agb/manifest.hpp"
#include "agb/pipeline.hpp"
#include "agb/report_csv.hpp"
#include "agb/report_svg.hpp"
#include "agb/rng.hpp"
#include "agb/surface.hpp"
#include "agb/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw agb::ConfigError("cannot open: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw agb::ConfigError("bad json " + path.string() + ": " + e.what());
    }
    return j;
}

std::vector<int> parse_years(const std::string& span) {
    const auto colon = span.find(':');
    if (colon == std::string::npos)
        return {std::stoi(span)};
    const int a = std::stoi(span.substr(0, colon));
    const int b = std::stoi(span.substr(colon + 1));
    if (b < a) throw agb::ConfigError("years: end before start in '" + span + "'");
    std::vector<int> years;
    for (int y = a; y <= b; ++y) years.push_back(y);
    return years;
}

std::map<int, agb::Grid> load_surfaces(const std::string& prefix, const std::vector<int>& years) {
    std::map<int, agb::Grid> out;
    for (int y : years) out.emplace(y, agb::read_grid(prefix + std::to_string(y)));
    return out;
}

std::map<int, agb::ClassGrid> load_classes(const std::string& prefix,
                                           const std::vector<int>& years) {
    std::map<int, agb::ClassGrid> out;
    for (int y : years) out.emplace(y, agb::read_class_grid(prefix + std::to_string(y)));
    return out;
}

// Models saved by `train` are either a stacked ensemble or the averaged
// pair; predict handles both.
agb::Grid predict_any(const fs::path& modelPath, const agb::PredictorStack& stack,
                      int threads) {
    const json j = load_json(modelPath);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "stacked")
        return agb::predict_surface(agb::StackedEnsemble::from_json(j), stack, threads);
    if (kind == "averaged")
        return agb::predict_surface(agb::AveragedEnsemble::from_json(j), stack, threads);
    return agb::predict_surface(*agb::model_from_json(j), stack, threads);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"forest AGB mapping and map-agreement toolkit"};
    app.require_subcommand(1);

    // ---- synth-gen ----------------------------------------------------------
    auto* synth = app.add_subcommand("synth-gen", "generate a synthetic world");
    std::string synthSpecPath, synthOut;
    std::uint64_t seedOverride = 0;
    bool haveSeed = false;
    synth->add_option("--spec", synthSpecPath, "synth world spec JSON");
    synth->add_option("--out", synthOut, "output directory")->required();
    synth->add_option("--seed", seedOverride, "override the spec seed")
        ->each([&](const std::string&) { haveSeed = true; });
    synth->callback([&] {
        agb::SynthWorldSpec spec;
        if (!synthSpecPath.empty()) spec = agb::SynthWorldSpec::load(synthSpecPath);
        if (haveSeed) spec.seed = seedOverride;
        const auto world = agb::synth_generate(spec, synthOut);
        std::cout << "world written to " << world.dir.string() << " (" << world.years.size()
                  << " years, lidar year " << world.lidar_year << ")\n";
    });

    // ---- sample -------------------------------------------------------------
    auto* sample = app.add_subcommand("sample", "stratified sample of an AGB surface");
    std::string sampleGrid, sampleOut, onUnderfill = "take-all";
    agb::StratifiedSampleSpec sspec;
    int sampleYear = 0;
    double sampleUpper = 0.0;
    bool haveUpper = false;
    sample->add_option("--agb", sampleGrid, "AGB grid base path")->required();
    sample->add_option("--strata", sspec.n_strata, "number of equal-width strata");
    sample->add_option("--per-stratum", sspec.per_stratum, "samples per stratum");
    sample->add_option("--seed", sspec.seed, "sampling seed");
    sample->add_option("--lower", sspec.lower, "lower AGB bound");
    sample->add_option("--upper", sampleUpper, "upper AGB bound (default: max mapped)")
        ->each([&](const std::string&) { haveUpper = true; });
    sample->add_option("--year", sampleYear, "surface vintage stamped into the CSV")
        ->required();
    sample->add_option("--on-underfill", onUnderfill, "take-all | fail")
        ->check(CLI::IsMember({"take-all", "fail"}));
    sample->add_option("--out", sampleOut, "output CSV")->required();
    sample->callback([&] {
        sspec.fail_on_underfill = onUnderfill == "fail";
        if (haveUpper) sspec.upper = sampleUpper;
        const auto grid = agb::read_grid(sampleGrid);
        const auto res = agb::stratified_sample(grid, sspec);
        agb::write_samples_csv(sampleOut, res, sampleYear);
        for (const auto& u : res.underfilled)
            std::cerr << "warning: stratum " << u.stratum << " underfilled (" << u.available
                      << " available)\n";
        std::cout << res.samples.size() << " samples -> " << sampleOut << "\n";
    });

    // ---- assemble -------------------------------------------------------------
    auto* assemble = app.add_subcommand("assemble", "build a training table");
    std::string asmPlots, asmPixels, asmStackDir, asmSchema, asmOut, asmDropped;
    assemble->add_option("--plots", asmPlots, "plots CSV (footprint rows)");
    assemble->add_option("--pixels", asmPixels, "lidar sample CSV (pixel rows)");
    assemble->add_option("--stack-dir", asmStackDir, "directory with <year>/<NAME> grids")
        ->required();
    assemble->add_option("--schema", asmSchema, "predictor schema JSON")->required();
    assemble->add_option("--out", asmOut, "output table CSV")->required();
    assemble->add_option("--dropped", asmDropped, "dropped-row report CSV");
    assemble->callback([&] {
        if (asmPlots.empty() == asmPixels.empty())
            throw agb::ConfigError("assemble: exactly one of --plots / --pixels required");
        const auto schema = agb::PredictorSchema::load(asmSchema);

        std::vector<int> years;
        std::vector<agb::PlotRecord> plots;
        std::vector<agb::LidarSample> pixels;
        if (!asmPlots.empty()) {
            plots = agb::read_plots_csv(asmPlots);
            for (const auto& p : plots) years.push_back(p.year);
        } else {
            pixels = agb::read_lidar_csv(asmPixels);
            for (const auto& s : pixels) years.push_back(s.year);
        }
        std::sort(years.begin(), years.end());
        years.erase(std::unique(years.begin(), years.end()), years.end());
        std::map<int, agb::PredictorStack> stacks;
        for (int y : years)
            stacks.emplace(y, agb::load_stack(fs::path(asmStackDir) / std::to_string(y), schema));

        const auto res = !asmPlots.empty() ? agb::assemble_plots(plots, stacks, schema)
                                           : agb::assemble_pixels(pixels, stacks, schema);
        agb::write_table_csv(asmOut, res.table);
        if (!asmDropped.empty()) agb::write_dropped_csv(asmDropped, res.dropped);
        for (const auto& d : res.dropped)
            std::cerr << "dropped " << d.id << ": " << d.reason << "\n";
        std::cout << res.table.rows() << " rows -> " << asmOut << " (" << res.dropped.size()
                  << " dropped)\n";
    });

    // ---- tune -----------------------------------------------------------------
    auto* tune = app.add_subcommand("tune", "grid-search hyperparameters by 5-fold CV");
    std::string tuneTable, tuneKind, tuneGridPath, tuneOut, tuneBase;
    std::uint64_t tuneSeed = 0;
    int tuneThreads = 1;
    tune->add_option("--table", tuneTable, "training table CSV")->required();
    tune->add_option("--component", tuneKind, "rf | gbm | svr")->required();
    tune->add_option("--grid", tuneGridPath, "grid JSON {axes, folds, refine_rounds}")
        ->required();
    tune->add_option("--base", tuneBase, "base params JSON");
    tune->add_option("--seed", tuneSeed, "fold/tuning seed");
    tune->add_option("--threads", tuneThreads, "thread budget");
    tune->add_option("--out", tuneOut, "CV table CSV")->required();
    tune->callback([&] {
        const auto table = agb::read_table_csv(tuneTable);
        const json jg = load_json(tuneGridPath);
        agb::TuneGrid grid;
        grid.axes =
            jg.at("axes").get<std::map<std::string, std::vector<double>>>();
        grid.folds = jg.value("folds", 5);
        grid.refine_rounds = jg.value("refine_rounds", 0);
        grid.seed = tuneSeed;
        const json base = tuneBase.empty() ? json::object() : load_json(tuneBase);
        const auto res = agb::grid_search(table, grid, tuneKind, base, tuneThreads);
        agb::write_tuning_csv(tuneOut, tuneKind, res.table);
        std::cout << res.best_params.dump() << "\n";
    });

    // ---- train ------------------------------------------------------------------
    auto* train = app.add_subcommand("train", "fit a LOO stacked ensemble");
    std::string trainTable, trainComps, trainOut;
    std::uint64_t trainSeed = 0;
    int trainOof = 0, trainThreads = 1;
    train->add_option("--table", trainTable, "training table CSV")->required();
    train->add_option("--components", trainComps,
                      "components JSON [{kind, params}, ...]")->required();
    train->add_option("--seed", trainSeed, "stacking seed");
    train->add_option("--oof-folds", trainOof,
                      "0 = exact LOO; k >= 2 = k-fold out-of-fold approximation "
                      "(non-paper behavior for large tables)");
    train->add_option("--threads", trainThreads, "thread budget");
    train->add_option("--out", trainOut, "ensemble JSON")->required();
    train->callback([&] {
        const auto table = agb::read_table_csv(trainTable);
        std::vector<agb::Component> comps;
        for (const auto& jc : load_json(trainComps))
            comps.push_back(agb::make_component(
                {jc.at("kind").get<std::string>(), jc.value("params", json::object())},
                trainThreads));
        agb::StackOptions opts;
        opts.oof_folds = trainOof;
        opts.threads = trainThreads;
        const auto e = agb::loo_stack(table, comps, trainSeed, opts);
        std::ofstream out(trainOut);
        out << e.to_json().dump() << '\n';
        std::cout << "ensemble (beta:";
        for (double b : e.beta) std::cout << " " << b;
        std::cout << ") -> " << trainOut << "\n";
    });

    // ---- predict ------------------------------------------------------------------
    auto* predict = app.add_subcommand("predict", "predict an AGB surface for one year");
    std::string predModel, predStackDir, predSchema, predOut;
    int predYear = 0, predThreads = 1;
    predict->add_option("--model", predModel, "model / ensemble JSON")->required();
    predict->add_option("--stack-dir", predStackDir, "directory with <year>/<NAME> grids")
        ->required();
    predict->add_option("--schema", predSchema, "predictor schema JSON")->required();
    predict->add_option("--year", predYear, "prediction year")->required();
    predict->add_option("--threads", predThreads, "thread budget");
    predict->add_option("--out", predOut, "output grid base path")->required();
    predict->callback([&] {
        const auto schema = agb::PredictorSchema::load(predSchema);
        const auto stack =
            agb::load_stack(fs::path(predStackDir) / std::to_string(predYear), schema);
        const auto surface = predict_any(predModel, stack, predThreads);
        agb::write_grid(predOut, surface);
        std::cout << "surface -> " << predOut << ".bin\n";
    });

    // ---- mask ------------------------------------------------------------------
    auto* mask = app.add_subcommand("mask", "remove nonvegetated cells from a surface");
    std::string maskAgb, maskClasses, maskOut;
    mask->add_option("--agb", maskAgb, "AGB grid base path")->required();
    mask->add_option("--classes", maskClasses, "LCMAP class grid base path")->required();
    mask->add_option("--out", maskOut, "output grid base path")->required();
    mask->callback([&] {
        const auto agbGrid = agb::read_grid(maskAgb);
        const auto classes = agb::read_class_grid(maskClasses);
        agb::write_grid(maskOut, agb::mask_nonvegetated(agbGrid, classes));
        std::cout << "masked surface -> " << maskOut << ".bin\n";
    });

    // ---- diff ------------------------------------------------------------------
    auto* diff = app.add_subcommand("diff", "stock change (later minus earlier)");
    std::string diffA, diffB, diffOut, diffPrefix;
    diff->add_option("--a", diffA, "earlier AGB grid base path (or year with --surface-prefix)")
        ->required();
    diff->add_option("--b", diffB, "later AGB grid base path (or year)")->required();
    diff->add_option("--surface-prefix", diffPrefix,
                     "prefix turning --a/--b years into grid paths");
    diff->add_option("--out", diffOut, "output grid base path")->required();
    diff->callback([&] {
        const auto a = agb::read_grid(diffPrefix + diffA);
        const auto b = agb::read_grid(diffPrefix + diffB);
        agb::write_grid(diffOut, agb::subtract(b, a));
        std::cout << "stock-change surface -> " << diffOut << ".bin\n";
    });

    // ---- summarize -----------------------------------------------------------
    auto* summarize = app.add_subcommand("summarize", "per-class mean AGB of one surface");
    std::string sumAgb, sumClasses, sumOut;
    summarize->add_option("--agb", sumAgb, "AGB grid base path")->required();
    summarize->add_option("--classes", sumClasses, "class grid base path")->required();
    summarize->add_option("--out", sumOut, "output CSV (class,mean_agb,cell_count)")
        ->required();
    summarize->callback([&] {
        const auto agbGrid = agb::read_grid(sumAgb);
        const auto classes = agb::read_class_grid(sumClasses);
        agb::CsvWriter w(sumOut);
        w.row({"class", "mean_agb", "cell_count"});
        for (const auto& [cls, stat] : agb::class_summary(agbGrid, classes))
            w.row({std::to_string(cls), agb::fmt_fixed(stat.mean),
                   std::to_string(stat.count)});
        std::cout << "class summary -> " << sumOut << "\n";
    });

    // ---- series ------------------------------------------------------------------
    auto* series = app.add_subcommand("series", "annual per-class AGB summaries");
    std::string serSurfPrefix, serClassPrefix, serYears, serOut;
    series->add_option("--surface-prefix", serSurfPrefix,
                       "surface base-path prefix, year appended")->required();
    series->add_option("--classes-prefix", serClassPrefix,
                       "class grid base-path prefix, year appended")->required();
    series->add_option("--years", serYears, "year span A:B")->required();
    series->add_option("--out", serOut, "output CSV")->required();
    series->callback([&] {
        const auto years = parse_years(serYears);
        const auto surfaces = load_surfaces(serSurfPrefix, years);
        const auto classes = load_classes(serClassPrefix, years);
        agb::write_series_csv(serOut, agb::annual_series(surfaces, classes));
        std::cout << "series -> " << serOut << "\n";
    });

    // ---- trajectory -----------------------------------------------------------------
    auto* traj = app.add_subcommand("trajectory", "polygon mean-AGB trajectories");
    std::string trajPolys, trajSurfPrefix, trajYears, trajOut;
    traj->add_option("--polygons", trajPolys, "polygons CSV (poly_id,ring,x,y)")->required();
    traj->add_option("--surface-prefix", trajSurfPrefix, "surface prefix, year appended")
        ->required();
    traj->add_option("--years", trajYears, "year span A:B")->required();
    traj->add_option("--out", trajOut, "output CSV")->required();
    traj->callback([&] {
        const auto years = parse_years(trajYears);
        const auto surfaces = load_surfaces(trajSurfPrefix, years);
        std::map<std::string, std::vector<agb::TrajectoryRow>> rows;
        for (const auto& [id, poly] : agb::read_polygons_csv(trajPolys))
            rows.emplace(id, agb::polygon_trajectory(poly, surfaces));
        agb::write_trajectory_csv(trajOut, rows);
        std::cout << "trajectories -> " << trajOut << "\n";
    });

    // ---- assess -----------------------------------------------------------------
    auto* assess = app.add_subcommand("assess", "multi-scale map agreement assessment");
    std::string assPlots, assSurfPrefix, assClassPrefix, assScales = "20000,50000";
    std::string assOutDir, assLabel = "model", assOrient = "flat", assOrigin;
    std::uint64_t assSeed = 0;
    int assBoot = 1000;
    double assResidSpacing = 50000.0;
    assess->add_option("--plots", assPlots, "assessment plots CSV")->required();
    assess->add_option("--surface-prefix", assSurfPrefix, "masked surface prefix")->required();
    assess->add_option("--classes-prefix", assClassPrefix, "class grid prefix")->required();
    assess->add_option("--scales", assScales, "comma-separated hexagon spacings (m)");
    assess->add_option("--boot", assBoot, "bootstrap iterations");
    assess->add_option("--seed", assSeed, "bootstrap seed");
    assess->add_option("--residual-spacing", assResidSpacing,
                       "per-hex residual summary spacing (m)");
    assess->add_option("--hex-orientation", assOrient, "flat | pointy")
        ->check(CLI::IsMember({"flat", "pointy"}));
    assess->add_option("--hex-origin", assOrigin,
                       "x,y origin (default: plot bounding-box lower-left)");
    assess->add_option("--label", assLabel, "model label in reports");
    assess->add_option("--out-dir", assOutDir, "output directory")->required();
    assess->callback([&] {
        const auto plots = agb::read_plots_csv(assPlots);
        std::vector<int> years;
        for (const auto& p : plots) years.push_back(p.year);
        std::sort(years.begin(), years.end());
        years.erase(std::unique(years.begin(), years.end()), years.end());
        const auto surfaces = load_surfaces(assSurfPrefix, years);
        const auto classes = load_classes(assClassPrefix, years);

        std::vector<double> scales;
        for (const auto& tok : agb::csv_split(assScales)) scales.push_back(std::stod(tok));

        agb::RiemannOptions opts;
        opts.model_label = assLabel;
        opts.boot_iters = assBoot;
        opts.seed = assSeed;
        opts.residual_spacing_m = assResidSpacing;
        opts.hex_orientation = assOrient == "pointy" ? agb::HexOrientation::PointyTop
                                                     : agb::HexOrientation::FlatTop;
        if (!assOrigin.empty()) {
            const auto parts = agb::csv_split(assOrigin);
            if (parts.size() != 2)
                throw agb::ConfigError("--hex-origin expects \"x,y\"");
            opts.hex_origin = agb::Vec2{std::stod(parts[0]), std::stod(parts[1])};
        }
        const auto rep = agb::riemann_assessment(plots, surfaces, classes, scales, opts);

        fs::create_directories(assOutDir);
        const fs::path base = fs::path(assOutDir) / ("agreement_" + assLabel);
        agb::write_agreement_csv(base.string() + ".csv", rep);
        agb::write_by_class_csv(base.string() + "_by_class.csv", rep);
        agb::write_hex_residuals_csv(base.string() + "_hex_residuals.csv", rep);
        agb::write_dropped_csv(base.string() + "_skipped_plots.csv", rep.skipped_plots);
        for (const auto& s : rep.scales) {
            agb::CsvWriter w(fs::path(assOutDir) /
                             ("pairs_" + assLabel + "_" +
                              (s.spacing_m > 0 ? std::to_string(static_cast<int>(s.spacing_m))
                                               : std::string("plot_pixel")) +
                              ".csv"));
            w.row({"ref", "pred"});
            for (std::size_t i = 0; i < s.pairs.n(); ++i)
                w.row({agb::fmt_exact(s.pairs.ref[i]), agb::fmt_exact(s.pairs.pred[i])});
        }
        std::cout << "agreement reports -> " << assOutDir << "\n";
    });

    // ---- small-area ------------------------------------------------------------
    auto* smallArea = app.add_subcommand("small-area", "FIA small-area estimate comparison");
    std::string saSurface, saClasses, saHexes, saOut, saOrient = "flat";
    double saSpacing = 27185.0;  // hex area approx 64,000 ha
    smallArea->add_option("--surface", saSurface, "masked AGB grid base path")->required();
    smallArea->add_option("--classes", saClasses, "class grid base path")->required();
    smallArea->add_option("--hexes", saHexes,
                          "hex CSV (hex_id,cx,cy,fia_estimate,ci_low,ci_high)")->required();
    smallArea->add_option("--spacing", saSpacing, "hexagon spacing (m)");
    smallArea->add_option("--hex-orientation", saOrient, "flat | pointy")
        ->check(CLI::IsMember({"flat", "pointy"}));
    smallArea->add_option("--out", saOut, "output CSV")->required();
    smallArea->callback([&] {
        const auto surface = agb::read_grid(saSurface);
        const auto classes = agb::read_class_grid(saClasses);
        const auto hexes = agb::read_small_area_csv(saHexes);
        const auto res = agb::small_area_comparison(
            surface, classes, hexes, saSpacing,
            saOrient == "pointy" ? agb::HexOrientation::PointyTop
                                 : agb::HexOrientation::FlatTop);
        agb::write_small_area_csv(saOut, res);
        for (const auto& s : res.skipped)
            std::cerr << "skipped " << s.id << ": " << s.reason << "\n";
        std::cout << res.rows.size() << " hexes, " << agb::fmt_fixed(res.pct_inside_ci, 2)
                  << "% inside CI -> " << saOut << "\n";
    });

    // ---- report ------------------------------------------------------------------
    auto* report = app.add_subcommand("report", "scatter SVG from an assessment pair CSV");
    std::string repPairs, repOut, repTitle = "reference vs predicted";
    double repCap = 0.0;
    bool repHaveCap = false;
    report->add_option("--pairs", repPairs, "pairs CSV (ref,pred)")->required();
    report->add_option("--out", repOut, "output SVG")->required();
    report->add_option("--title", repTitle, "plot title");
    report->add_option("--cap", repCap, "display cap (Mg/ha), render-time only")
        ->each([&](const std::string&) { repHaveCap = true; });
    report->callback([&] {
        const auto csv = agb::read_csv(repPairs);
        const auto cr = csv.col("ref"), cp = csv.col("pred");
        agb::EvalPairs pairs;
        for (const auto& r : csv.rows) pairs.push(std::stod(r[cr]), std::stod(r[cp]));
        agb::GmfrLine line{};
        bool ok = false;
        try {
            line = agb::gmfr(pairs);
            ok = true;
        } catch (const agb::DegenerateInput&) {
        }
        agb::ScatterOptions so;
        so.title = repTitle;
        if (repHaveCap) so.cap = repCap;
        agb::write_scatter_svg(repOut, pairs, line, ok, so);
        std::cout << "scatter -> " << repOut << "\n";
    });

    // ---- run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "full pipeline from a run config");
    std::string runConfigPath, runOut;
    std::uint64_t runSeed = 0;
    bool runHaveSeed = false;
    int runThreads = 0;
    run->add_option("--config", runConfigPath, "run config JSON")->required();
    run->add_option("--out", runOut, "output directory")->required();
    run->add_option("--seed", runSeed, "override the config seed")
        ->each([&](const std::string&) { runHaveSeed = true; });
    run->add_option("--threads", runThreads, "override the config thread budget");
    run->callback([&] {
        agb::RunConfig cfg = agb::RunConfig::load(runConfigPath);
        if (runHaveSeed) cfg.seed = runSeed;
        if (runThreads > 0) cfg.threads = runThreads;
        const auto res = agb::run_pipeline(cfg, runOut);
        std::cout << "pipeline complete (";
        for (std::size_t i = 0; i < res.approaches_run.size(); ++i)
            std::cout << (i ? ", " : "") << res.approaches_run[i];
        std::cout << ") -> " << runOut << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const agb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const agb::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const agb::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
