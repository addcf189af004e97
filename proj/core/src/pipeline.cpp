#include <fstream>

#include "agb/csv.hpp"
#include "agb/manifest.hpp"
#include "agb/pipeline.hpp"
#include "agb/report_csv.hpp"
#include "agb/report_svg.hpp"
#include "agb/rng.hpp"
#include "agb/surface.hpp"

namespace agb {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (approach != "direct" && approach != "indirect" && approach != "ensemble")
        throw ConfigError("run: approach must be direct, indirect or ensemble");
    if (!fs::exists(world_dir))
        throw ConfigError("run: world_dir does not exist: " + world_dir.string());
    const bool needDirect = approach != "indirect";
    const bool needIndirect = approach != "direct";
    if (needDirect && direct.components.empty())
        throw ConfigError("run: approach requires direct components");
    if (needIndirect && indirect.components.empty())
        throw ConfigError("run: approach requires indirect components");
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("run: train_fraction must be in (0,1)");
    if (threads < 1) throw ConfigError("run: threads must be >= 1");
    if (scales_m.empty()) throw ConfigError("run: scales_m must not be empty");
}

namespace {

nlohmann::json components_json(const ApproachConfig& a) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : a.components) comps.push_back({{"kind", c.kind}, {"params", c.params}});
    return {{"oof_folds", a.oof_folds}, {"components", comps}};
}

ApproachConfig components_from_json(const nlohmann::json& j) {
    ApproachConfig a;
    a.oof_folds = j.value("oof_folds", 0);
    if (j.contains("components"))
        for (const auto& jc : j.at("components"))
            a.components.push_back(
                {jc.at("kind").get<std::string>(), jc.value("params", nlohmann::json::object())});
    return a;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j = {{"world_dir", world_dir.generic_string()},
                        {"approach", approach},
                        {"seed", seed},
                        {"threads", threads},
                        {"sample", {{"strata", sample_strata},
                                    {"per_stratum", sample_per_stratum},
                                    {"fail_on_underfill", sample_fail_on_underfill}}},
                        {"split", {{"train_fraction", train_fraction}}},
                        {"direct", components_json(direct)},
                        {"indirect", components_json(indirect)},
                        {"svr_row_cap", svr_row_cap},
                        {"scales_m", scales_m},
                        {"residual_spacing_m", residual_spacing_m},
                        {"boot_iters", boot_iters}};
    if (assessment_panel) j["split"]["assessment_panel"] = *assessment_panel;
    if (cap_display) j["cap_display"] = *cap_display;
    if (tune_enabled) {
        j["tune"] = {{"enabled", true},
                     {"folds", tune_folds},
                     {"refine_rounds", tune_refine_rounds},
                     {"axes", tune_axes}};
    }
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    c.world_dir = j.at("world_dir").get<std::string>();
    c.approach = j.value("approach", c.approach);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    if (j.contains("sample")) {
        const auto& js = j.at("sample");
        c.sample_strata = js.value("strata", c.sample_strata);
        c.sample_per_stratum = js.value("per_stratum", c.sample_per_stratum);
        c.sample_fail_on_underfill = js.value("fail_on_underfill", false);
    }
    if (j.contains("split")) {
        const auto& js = j.at("split");
        c.train_fraction = js.value("train_fraction", c.train_fraction);
        if (js.contains("assessment_panel") && !js.at("assessment_panel").is_null())
            c.assessment_panel = js.at("assessment_panel").get<int>();
    }
    if (j.contains("direct")) c.direct = components_from_json(j.at("direct"));
    if (j.contains("indirect")) c.indirect = components_from_json(j.at("indirect"));
    c.svr_row_cap = j.value("svr_row_cap", c.svr_row_cap);
    if (j.contains("scales_m")) c.scales_m = j.at("scales_m").get<std::vector<double>>();
    c.residual_spacing_m = j.value("residual_spacing_m", c.residual_spacing_m);
    c.boot_iters = j.value("boot_iters", c.boot_iters);
    if (j.contains("cap_display") && !j.at("cap_display").is_null())
        c.cap_display = j.at("cap_display").get<double>();
    if (j.contains("tune")) {
        const auto& jt = j.at("tune");
        c.tune_enabled = jt.value("enabled", false);
        c.tune_folds = jt.value("folds", c.tune_folds);
        c.tune_refine_rounds = jt.value("refine_rounds", c.tune_refine_rounds);
        if (jt.contains("axes"))
            c.tune_axes = jt.at("axes")
                              .get<std::map<std::string, std::map<std::string, std::vector<double>>>>();
    }
    return c;
}

RunConfig RunConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open run config: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad run config json: ") + e.what());
    }
    return from_json(j);
}

namespace {

struct Stage {
    Manifest& manifest;
    std::string name;

    void operator()(const std::function<void()>& body) const {
        try {
            body();
        } catch (...) {
            manifest.set_failed_stage(name);
            throw;
        }
    }
};

// Per-approach training artifacts kept in memory across stages.
struct TrainedApproach {
    std::string label;
    StackedEnsemble ensemble;
    TrainingTable test;
};

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    fs::create_directories(out_dir / "models");
    fs::create_directories(out_dir / "surfaces");
    fs::create_directories(out_dir / "report");

    Manifest manifest(out_dir);
    {
        // The thread budget is an execution resource, not part of the
        // experiment: outputs are thread-count invariant and so is the hash.
        nlohmann::json canonical = cfg.to_json();
        canonical.erase("threads");
        manifest.set_config(canonical, cfg.seed);
    }
    const auto manifestPath = out_dir / "manifest.json";

    const bool wantDirect = cfg.approach != "indirect";
    const bool wantIndirect = cfg.approach != "direct";
    const bool wantEnsemble = cfg.approach == "ensemble";

    PipelineResult result;
    result.manifest_path = manifestPath;

    try {
        const SynthWorld world = open_world(cfg.world_dir);
        std::map<int, PredictorStack> stacks;
        std::map<int, ClassGrid> classGrids;
        for (int y : world.years) {
            stacks.emplace(y, load_stack(world.stack_dir(y), world.schema));
            classGrids.emplace(y, read_class_grid(world.class_path(y)));
        }
        const auto plots = read_plots_csv(world.plots_path());

        // ---- partition plots -------------------------------------------------
        SplitSpec panelSpec;
        panelSpec.assessment_panel = cfg.assessment_panel;
        panelSpec.train_fraction = cfg.train_fraction;
        panelSpec.seed = derive_seed(cfg.seed, "panel");
        const PanelPartition part = partition_panels(plots, panelSpec);
        if (part.model_dev.empty())
            throw DataError("run: model development set is empty after panel filtering");

        // ---- stratified lidar sample ----------------------------------------
        std::vector<LidarSample> lidarSamples;
        Stage{manifest, "sample"}([&] {
            if (!wantIndirect) return;
            const Grid lidar = read_grid(world.lidar_path());
            StratifiedSampleSpec s;
            s.n_strata = cfg.sample_strata;
            s.per_stratum = cfg.sample_per_stratum;
            s.fail_on_underfill = cfg.sample_fail_on_underfill;
            s.seed = derive_seed(cfg.seed, "sample");
            const auto res = stratified_sample(lidar, s);
            write_samples_csv(out_dir / "samples.csv", res, world.lidar_year);
            manifest.add(out_dir / "samples.csv");
            lidarSamples = read_lidar_csv(out_dir / "samples.csv");
        });

        // ---- assemble tables -------------------------------------------------
        TrainingTable directTable, indirectTable;
        Stage{manifest, "assemble"}([&] {
            std::vector<DroppedRow> dropped;
            if (wantDirect) {
                auto res = assemble_plots(part.model_dev, stacks, world.schema);
                directTable = std::move(res.table);
                dropped.insert(dropped.end(), res.dropped.begin(), res.dropped.end());
                write_table_csv(out_dir / "table_direct.csv", directTable);
                manifest.add(out_dir / "table_direct.csv");
            }
            if (wantIndirect) {
                auto res = assemble_pixels(lidarSamples, stacks, world.schema);
                indirectTable = std::move(res.table);
                dropped.insert(dropped.end(), res.dropped.begin(), res.dropped.end());
                write_table_csv(out_dir / "table_indirect.csv", indirectTable);
                manifest.add(out_dir / "table_indirect.csv");
            }
            write_dropped_csv(out_dir / "assembly_dropped.csv", dropped);
            manifest.add(out_dir / "assembly_dropped.csv");
        });

        // ---- optional tuning -------------------------------------------------
        auto tuned_components = [&](const ApproachConfig& ac, const TrainingTable& table,
                                    const std::string& label) {
            std::vector<ComponentSpec> specs = ac.components;
            if (!cfg.tune_enabled) return specs;
            for (auto& spec : specs) {
                const auto axes = cfg.tune_axes.find(spec.kind);
                if (axes == cfg.tune_axes.end()) continue;
                TuneGrid grid;
                grid.axes = axes->second;
                grid.folds = cfg.tune_folds;
                grid.refine_rounds = cfg.tune_refine_rounds;
                grid.seed = derive_seed(cfg.seed, "tune:" + label + ":" + spec.kind);
                const TuneResult t =
                    grid_search(table, grid, spec.kind, spec.params, cfg.threads);
                spec.params = t.best_params;
                const auto path = out_dir / ("tuning_" + label + "_" + spec.kind + ".csv");
                write_tuning_csv(path, spec.kind, t.table);
                manifest.add(path);
            }
            return specs;
        };

        // ---- train stacked ensembles ------------------------------------------
        std::vector<TrainedApproach> trained;
        auto train_one = [&](const ApproachConfig& ac, const TrainingTable& table,
                             const std::string& label) {
            SplitSpec split;
            split.train_fraction = cfg.train_fraction;
            split.seed = derive_seed(cfg.seed, "split:" + label);
            const auto tt = train_test_split(table.rows(), split);
            const TrainingTable trainT = subset(table, tt.train);
            const TrainingTable testT = subset(table, tt.test);

            std::vector<Component> comps;
            for (const auto& spec : tuned_components(ac, trainT, label)) {
                ComponentSpec adjusted = spec;
                if (spec.kind == "svr") adjusted.params["row_cap"] = cfg.svr_row_cap;
                comps.push_back(make_component(adjusted, cfg.threads));
            }
            StackOptions opts;
            opts.oof_folds = ac.oof_folds;
            opts.threads = cfg.threads;
            TrainedApproach ta;
            ta.label = label;
            ta.ensemble = loo_stack(trainT, comps, derive_seed(cfg.seed, "stack:" + label), opts);
            ta.test = testT;

            std::ofstream mf(out_dir / "models" / (label + ".json"));
            mf << ta.ensemble.to_json().dump() << '\n';
            mf.close();
            manifest.add(out_dir / "models" / (label + ".json"));
            return ta;
        };

        Stage{manifest, "train"}([&] {
            if (wantDirect) trained.push_back(train_one(cfg.direct, directTable, "direct"));
            if (wantIndirect)
                trained.push_back(train_one(cfg.indirect, indirectTable, "indirect"));
        });

        // Test-partition performance for every approach (including the
        // averaged ensemble on the direct test rows).
        Stage{manifest, "test-metrics"}([&] {
            std::vector<std::pair<std::string, MetricSet>> rows;
            std::vector<std::size_t> ns;
            for (const auto& ta : trained) {
                EvalPairs p;
                const auto pred = ta.ensemble.predict(ta.test);
                for (std::size_t i = 0; i < pred.size(); ++i)
                    p.push(ta.test.response[i], pred[i]);
                rows.emplace_back(ta.label, point_metrics(p));
                ns.push_back(p.n());
            }
            if (wantEnsemble) {
                AveragedEnsemble avg;
                // cheap copies via JSON round-trip keep ownership simple
                avg.direct = StackedEnsemble::from_json(trained[0].ensemble.to_json());
                avg.indirect = StackedEnsemble::from_json(trained[1].ensemble.to_json());
                EvalPairs p;
                const auto pred = predict_averaged(avg, trained[0].test);
                for (std::size_t i = 0; i < pred.size(); ++i)
                    p.push(trained[0].test.response[i], pred[i]);
                rows.emplace_back("ensemble", point_metrics(p));
                ns.push_back(p.n());

                std::ofstream af(out_dir / "models" / "averaged.json");
                af << avg.to_json().dump() << '\n';
                af.close();
                manifest.add(out_dir / "models" / "averaged.json");
            }
            write_test_metrics_csv(out_dir / "test_metrics.csv", rows, ns);
            manifest.add(out_dir / "test_metrics.csv");
        });

        // ---- predict + mask surfaces ------------------------------------------
        // label -> year -> masked surface
        std::map<std::string, std::map<int, Grid>> masked;
        Stage{manifest, "predict"}([&] {
            auto write_pair = [&](const fs::path& base, const Grid& g) {
                write_grid(base, g);
                manifest.add(base.string() + ".bin");
                manifest.add(base.string() + ".json");
            };
            for (int y : world.years) {
                const auto& stack = stacks.at(y);
                std::map<std::string, Grid> raw;
                for (const auto& ta : trained)
                    raw.emplace(ta.label, predict_surface(ta.ensemble, stack, cfg.threads));
                if (wantEnsemble) {
                    // Eq.-style average of the two member surfaces, cellwise.
                    const Grid& d = raw.at("direct");
                    const Grid& i = raw.at("indirect");
                    Grid avg = d;
                    for (std::size_t k = 0; k < avg.values.size(); ++k) {
                        if (d.is_nodata(d.values[k]) || i.is_nodata(i.values[k]))
                            avg.values[k] = avg.nodata;
                        else
                            avg.values[k] = (d.values[k] + i.values[k]) / 2.0f;
                    }
                    raw.emplace("ensemble", std::move(avg));
                }
                for (auto& [label, surf] : raw) {
                    const auto base =
                        out_dir / "surfaces" / ("agb_" + label + "_" + std::to_string(y));
                    write_pair(base, surf);
                    Grid m = mask_nonvegetated(surf, classGrids.at(y));
                    const auto mbase = out_dir / "surfaces" /
                                       ("agb_" + label + "_" + std::to_string(y) + "_masked");
                    write_pair(mbase, m);
                    masked[label].emplace(y, std::move(m));
                }
            }
        });

        for (const auto& [label, surfs] : masked) result.approaches_run.push_back(label);

        // ---- annual series + stock change --------------------------------------
        Stage{manifest, "series"}([&] {
            for (const auto& [label, surfs] : masked) {
                const auto rows = annual_series(surfs, classGrids);
                const auto path = out_dir / ("series_" + label + ".csv");
                write_series_csv(path, rows);
                manifest.add(path);

                if (world.years.size() >= 2) {
                    const Grid diff =
                        stock_change(world.years.front(), world.years.back(), surfs);
                    const auto base =
                        out_dir / "surfaces" /
                        ("diff_" + label + "_" + std::to_string(world.years.front()) + "_" +
                         std::to_string(world.years.back()));
                    write_grid(base, diff);
                    manifest.add(base.string() + ".bin");
                    manifest.add(base.string() + ".json");
                }
            }
        });

        // ---- map agreement assessment ------------------------------------------
        Stage{manifest, "assess"}([&] {
            for (const auto& [label, surfs] : masked) {
                RiemannOptions opts;
                opts.model_label = label;
                opts.boot_iters = cfg.boot_iters;
                opts.seed = derive_seed(cfg.seed, "assess:" + label);
                opts.residual_spacing_m = cfg.residual_spacing_m;
                const AgreementReport rep = riemann_assessment(
                    part.map_assessment, surfs, classGrids, cfg.scales_m, opts);

                const auto base = out_dir / ("agreement_" + label);
                write_agreement_csv(base.string() + ".csv", rep);
                manifest.add(base.string() + ".csv");
                write_by_class_csv(base.string() + "_by_class.csv", rep);
                manifest.add(base.string() + "_by_class.csv");
                write_hex_residuals_csv(base.string() + "_hex_residuals.csv", rep);
                manifest.add(base.string() + "_hex_residuals.csv");
                write_dropped_csv(base.string() + "_skipped_plots.csv", rep.skipped_plots);
                manifest.add(base.string() + "_skipped_plots.csv");

                for (const auto& s : rep.scales) {
                    ScatterOptions so;
                    so.title = label + " " + s.label;
                    if (cfg.cap_display) so.cap = *cfg.cap_display;
                    std::string scaleTag = s.label;
                    for (auto& ch : scaleTag)
                        if (ch == ':' || ch == ' ') ch = '_';
                    const auto svg =
                        out_dir / "report" / ("scatter_" + label + "_" + scaleTag + ".svg");
                    write_scatter_svg(svg, s.pairs, s.gmfr, s.gmfr_ok, so);
                    manifest.add(svg);
                }
            }
        });

        manifest.write(manifestPath);
    } catch (...) {
        manifest.write(manifestPath);
        throw;
    }
    return result;
}

}  // namespace agb
