#include <algorithm>
#include <cmath>
#include <fstream>

#include "agb/grid_ops.hpp"
#include "agb/rng.hpp"
#include "agb/synth.hpp"

namespace agb {

void SynthWorldSpec::validate() const {
    if (nrows <= 0 || ncols <= 0 || cellsize <= 0.0)
        throw ConfigError("synth: bad grid shape");
    if (year_start < 1990 || year_end > 2019 || year_end < year_start)
        throw ConfigError("synth: years must lie within 1990..2019");
    if (agb_max <= 0.0) throw ConfigError("synth: agb_max must be > 0");
    if (n_bumps < 1) throw ConfigError("synth: n_bumps must be >= 1");
    if (predictor_noise_sd < 0.0 || lidar_noise_sd < 0.0)
        throw ConfigError("synth: noise sds must be >= 0");
    if (n_plots < 1) throw ConfigError("synth: n_plots must be >= 1");
    for (const auto& d : disturbances) {
        if (d.year <= year_start || d.year > year_end)
            throw ConfigError("synth: disturbance year must be in (year_start, year_end]");
        if (d.magnitude < 0.0 || d.radius <= 0.0 || d.recovery_rate < 0.0)
            throw ConfigError("synth: bad disturbance parameters");
    }
    if (lidar_year != 0 && (lidar_year < year_start || lidar_year > year_end))
        throw ConfigError("synth: lidar_year outside the year span");
}

nlohmann::json SynthWorldSpec::to_json() const {
    nlohmann::json dist = nlohmann::json::array();
    for (const auto& d : disturbances)
        dist.push_back({{"year", d.year},
                        {"cx", d.cx},
                        {"cy", d.cy},
                        {"radius", d.radius},
                        {"magnitude", d.magnitude},
                        {"recovery_rate", d.recovery_rate}});
    return {{"nrows", nrows},
            {"ncols", ncols},
            {"cellsize", cellsize},
            {"xll", xll},
            {"yll", yll},
            {"crs_tag", crs_tag},
            {"year_start", year_start},
            {"year_end", year_end},
            {"agb_max", agb_max},
            {"n_bumps", n_bumps},
            {"growth_rate", growth_rate},
            {"disturbances", dist},
            {"predictor_noise_sd", predictor_noise_sd},
            {"lidar_noise_sd", lidar_noise_sd},
            {"lidar_year", lidar_year},
            {"n_plots", n_plots},
            {"seed", seed},
            {"water_threshold", water_threshold},
            {"developed_threshold", developed_threshold},
            {"cropland_threshold", cropland_threshold},
            {"barren_threshold", barren_threshold},
            {"wetland_low", wetland_low},
            {"tree_min_agb", tree_min_agb}};
}

SynthWorldSpec SynthWorldSpec::from_json(const nlohmann::json& j) {
    SynthWorldSpec s;
    s.nrows = j.value("nrows", s.nrows);
    s.ncols = j.value("ncols", s.ncols);
    s.cellsize = j.value("cellsize", s.cellsize);
    s.xll = j.value("xll", s.xll);
    s.yll = j.value("yll", s.yll);
    s.crs_tag = j.value("crs_tag", s.crs_tag);
    s.year_start = j.value("year_start", s.year_start);
    s.year_end = j.value("year_end", s.year_end);
    s.agb_max = j.value("agb_max", s.agb_max);
    s.n_bumps = j.value("n_bumps", s.n_bumps);
    s.growth_rate = j.value("growth_rate", s.growth_rate);
    if (j.contains("disturbances"))
        for (const auto& jd : j.at("disturbances")) {
            DisturbanceEvent d;
            d.year = jd.at("year").get<int>();
            d.cx = jd.at("cx").get<double>();
            d.cy = jd.at("cy").get<double>();
            d.radius = jd.at("radius").get<double>();
            d.magnitude = jd.at("magnitude").get<double>();
            d.recovery_rate = jd.value("recovery_rate", d.recovery_rate);
            s.disturbances.push_back(d);
        }
    s.predictor_noise_sd = j.value("predictor_noise_sd", s.predictor_noise_sd);
    s.lidar_noise_sd = j.value("lidar_noise_sd", s.lidar_noise_sd);
    s.lidar_year = j.value("lidar_year", s.lidar_year);
    s.n_plots = j.value("n_plots", s.n_plots);
    s.seed = j.value("seed", s.seed);
    s.water_threshold = j.value("water_threshold", s.water_threshold);
    s.developed_threshold = j.value("developed_threshold", s.developed_threshold);
    s.cropland_threshold = j.value("cropland_threshold", s.cropland_threshold);
    s.barren_threshold = j.value("barren_threshold", s.barren_threshold);
    s.wetland_low = j.value("wetland_low", s.wetland_low);
    s.tree_min_agb = j.value("tree_min_agb", s.tree_min_agb);
    s.validate();
    return s;
}

SynthWorldSpec SynthWorldSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synth spec: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad synth spec json: ") + e.what());
    }
    return from_json(j);
}

std::filesystem::path SynthWorld::stack_dir(int year) const {
    return dir / "stacks" / std::to_string(year);
}
std::filesystem::path SynthWorld::truth_path(int year) const {
    return dir / "truth" / ("agb_" + std::to_string(year));
}
std::filesystem::path SynthWorld::class_path(int year) const {
    return dir / "classes" / ("LCPRI_" + std::to_string(year));
}
std::filesystem::path SynthWorld::lidar_path() const { return dir / "lidar" / "agb_lidar"; }
std::filesystem::path SynthWorld::plots_path() const { return dir / "plots.csv"; }
std::filesystem::path SynthWorld::schema_path() const { return dir / "schema.json"; }

namespace {

/// Smooth [0,1] field built from seeded Gaussian bumps.
struct BumpField {
    struct Bump {
        double cx, cy, amp, sigma;
    };
    std::vector<Bump> bumps;

    static BumpField make(Rng& rng, int count, double width, double height) {
        BumpField f;
        for (int i = 0; i < count; ++i) {
            Bump b;
            b.cx = rng.uniform(0.0, width);
            b.cy = rng.uniform(0.0, height);
            b.amp = rng.uniform(0.4, 1.0);
            b.sigma = rng.uniform(0.08, 0.25) * std::max(width, height);
            f.bumps.push_back(b);
        }
        return f;
    }

    double eval(double x, double y) const {
        double v = 0.0;
        for (const auto& b : bumps) {
            const double dx = x - b.cx;
            const double dy = y - b.cy;
            v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
        }
        return v;
    }
};

Grid normalized_field(const GridGeoref& geo, const BumpField& f) {
    Grid g = Grid::filled(geo, 0.0f);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> raw(geo.size());
    for (int r = 0; r < geo.nrows; ++r)
        for (int c = 0; c < geo.ncols; ++c) {
            const double v = f.eval(geo.cell_x(c), geo.cell_y(r));
            raw[static_cast<std::size_t>(r) * geo.ncols + c] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t i = 0; i < raw.size(); ++i)
        g.values[i] = static_cast<float>((raw[i] - lo) / span);
    return g;
}

double saturating(double agb, double offset, double gain, double half) {
    return offset + gain * agb / (agb + half);
}

}  // namespace

SynthWorld synth_generate(const SynthWorldSpec& spec, const std::filesystem::path& dir) {
    spec.validate();
    namespace fs = std::filesystem;
    fs::create_directories(dir / "truth");
    fs::create_directories(dir / "lidar");
    fs::create_directories(dir / "classes");

    GridGeoref geo;
    geo.nrows = spec.nrows;
    geo.ncols = spec.ncols;
    geo.cellsize = spec.cellsize;
    geo.xll = spec.xll;
    geo.yll = spec.yll;
    geo.crs_tag = spec.crs_tag;
    const double width = geo.ncols * geo.cellsize;
    const double height = geo.nrows * geo.cellsize;

    // Latent fields.
    Rng bumpRng(derive_seed(spec.seed, "bumps"));
    Rng wetRng(derive_seed(spec.seed, "wetness"));
    Rng devRng(derive_seed(spec.seed, "development"));
    Rng elevRng(derive_seed(spec.seed, "elevation"));
    Rng precipRng(derive_seed(spec.seed, "precip"));
    const Grid base = normalized_field(geo, BumpField::make(bumpRng, spec.n_bumps, width, height));
    const Grid wet = normalized_field(geo, BumpField::make(wetRng, 6, width, height));
    const Grid dev = normalized_field(geo, BumpField::make(devRng, 5, width, height));
    const Grid elev = normalized_field(geo, BumpField::make(elevRng, 8, width, height));
    const Grid precip = normalized_field(geo, BumpField::make(precipRng, 4, width, height));

    const int t0 = spec.year_start;
    const int nYears = spec.year_end - spec.year_start + 1;

    // Static nonvegetated classes from the latent fields.
    enum Static : std::uint8_t { kVeg = 0 };
    std::vector<std::uint8_t> staticClass(geo.size(), kVeg);
    for (std::size_t i = 0; i < geo.size(); ++i) {
        if (wet.values[i] > spec.water_threshold)
            staticClass[i] = lcmap::kWater;
        else if (dev.values[i] > spec.developed_threshold)
            staticClass[i] = lcmap::kDeveloped;
        else if (dev.values[i] > spec.cropland_threshold)
            staticClass[i] = lcmap::kCropland;
        else if (elev.values[i] > spec.barren_threshold)
            staticClass[i] = lcmap::kBarren;
    }

    // Undisturbed AGB trajectory; vegetated cells grow linearly, capped.
    auto undisturbed = [&](std::size_t i, int year) {
        if (staticClass[i] != kVeg) return 0.0;
        const double b = base.values[i] * spec.agb_max * 0.9;
        if (b < 5.0) return b;  // sparse ground stays sparse
        return std::min(b + spec.growth_rate * (year - t0), spec.agb_max);
    };

    // Truth surfaces with disturbance recurrence applied year over year.
    std::vector<Grid> truth(nYears);
    for (int yi = 0; yi < nYears; ++yi) {
        truth[yi] = Grid::filled(geo, 0.0f);
        for (std::size_t i = 0; i < geo.size(); ++i)
            truth[yi].values[i] = static_cast<float>(undisturbed(i, t0 + yi));
    }
    for (const auto& d : spec.disturbances) {
        for (int r = 0; r < geo.nrows; ++r) {
            for (int c = 0; c < geo.ncols; ++c) {
                const double dx = geo.cell_x(c) - d.cx;
                const double dy = geo.cell_y(r) - d.cy;
                if (dx * dx + dy * dy > d.radius * d.radius) continue;
                const std::size_t i = static_cast<std::size_t>(r) * geo.ncols + c;
                for (int year = d.year; year <= spec.year_end; ++year) {
                    const int yi = year - t0;
                    const double prev = truth[yi - 1].values[i];
                    if (year == d.year)
                        truth[yi].values[i] = static_cast<float>(std::max(0.0, prev - d.magnitude));
                    else
                        truth[yi].values[i] = static_cast<float>(
                            std::min(undisturbed(i, year), prev + d.recovery_rate));
                }
            }
        }
    }

    // Annual landcover: static classes plus the tree/grass split on AGB,
    // wetland where the wetness field is high.
    std::vector<ClassGrid> classes(nYears);
    for (int yi = 0; yi < nYears; ++yi) {
        classes[yi] = ClassGrid::filled(geo, lcmap::kGrassShrub);
        for (std::size_t i = 0; i < geo.size(); ++i) {
            if (staticClass[i] != kVeg) {
                classes[yi].codes[i] = staticClass[i];
            } else if (wet.values[i] > spec.wetland_low) {
                classes[yi].codes[i] = lcmap::kWetland;
            } else {
                classes[yi].codes[i] = truth[yi].values[i] >= spec.tree_min_agb
                                           ? lcmap::kTreeCover
                                           : lcmap::kGrassShrub;
            }
        }
        write_class_grid(dir / "classes" / ("LCPRI_" + std::to_string(t0 + yi)), classes[yi]);
    }

    // Reduced predictor schema (same kinds as the full reference schema).
    PredictorSchema schema;
    schema.predictors = {
        {"NBR", Predictor::Kind::Continuous, {}},
        {"NDVI", Predictor::Kind::Continuous, {}},
        {"TCW", Predictor::Kind::Continuous, {}},
        {"DELTA_NBR", Predictor::Kind::Continuous, {}},
        {"ELEVATION", Predictor::Kind::Continuous, {}},
        {"PRECIP", Predictor::Kind::Continuous, {}},
        {"LCPRI", Predictor::Kind::Categorical, {1, 2, 3, 4, 5, 6, 7}},
        {"ECOZONE", Predictor::Kind::Categorical, {1, 2, 3}},
    };
    schema.validate();
    schema.save(dir / "schema.json");

    // Static predictor grids.
    Grid elevation = Grid::filled(geo, 0.0f);
    Grid precipitation = Grid::filled(geo, 0.0f);
    for (std::size_t i = 0; i < geo.size(); ++i) {
        elevation.values[i] = static_cast<float>(50.0 + 900.0 * elev.values[i]);
        precipitation.values[i] = static_cast<float>(700.0 + 500.0 * precip.values[i]);
    }
    ClassGrid ecozone = ClassGrid::filled(geo, 1);
    for (int r = 0; r < geo.nrows; ++r)
        for (int c = 0; c < geo.ncols; ++c)
            ecozone.at(r, c) = static_cast<std::uint8_t>(1 + (3 * c) / geo.ncols);

    // Spectral predictors: saturating links on AGB plus seeded noise.
    auto spectral = [&](const Grid& agb, const char* name, int year, double offset,
                        double gain, double half, double wetGain) {
        Grid g = Grid::filled(geo, 0.0f);
        Rng rng(derive_seed(spec.seed, std::string("pred:") + name,
                            static_cast<std::uint64_t>(year)));
        for (std::size_t i = 0; i < geo.size(); ++i) {
            const double a = agb.values[i];
            const double v = saturating(a, offset, gain, half) + wetGain * wet.values[i] +
                             rng.normal(0.0, spec.predictor_noise_sd);
            g.values[i] = static_cast<float>(v);
        }
        return g;
    };

    // Year before the span anchors the first delta.
    Grid prevNbr;
    {
        Grid preTruth = Grid::filled(geo, 0.0f);
        for (std::size_t i = 0; i < geo.size(); ++i)
            preTruth.values[i] = static_cast<float>(undisturbed(i, t0 - 1));
        prevNbr = spectral(preTruth, "NBR", t0 - 1, 0.05, 0.85, 120.0, 0.0);
    }

    for (int yi = 0; yi < nYears; ++yi) {
        const int year = t0 + yi;
        const fs::path sdir = dir / "stacks" / std::to_string(year);
        fs::create_directories(sdir);

        Grid nbr = spectral(truth[yi], "NBR", year, 0.05, 0.85, 120.0, 0.0);
        Grid ndvi = spectral(truth[yi], "NDVI", year, 0.15, 0.75, 90.0, 0.0);
        Grid tcw = spectral(truth[yi], "TCW", year, -0.2, 0.7, 150.0, 0.3);
        Grid delta = Grid::filled(geo, 0.0f);
        for (std::size_t i = 0; i < geo.size(); ++i)
            delta.values[i] = nbr.values[i] - prevNbr.values[i];

        write_grid(sdir / "NBR", nbr);
        write_grid(sdir / "NDVI", ndvi);
        write_grid(sdir / "TCW", tcw);
        write_grid(sdir / "DELTA_NBR", delta);
        write_grid(sdir / "ELEVATION", elevation);
        write_grid(sdir / "PRECIP", precipitation);
        write_class_grid(sdir / "LCPRI", classes[yi]);
        write_class_grid(sdir / "ECOZONE", ecozone);
        write_grid(dir / "truth" / ("agb_" + std::to_string(year)), truth[yi]);
        prevNbr = std::move(nbr);
    }

    // LiDAR-style AGB surface: truth of the lidar year plus noise over the
    // vegetated mask, nodata elsewhere.
    const int lidarYear = spec.lidar_year != 0 ? spec.lidar_year : t0 + nYears / 2;
    {
        const Grid& t = truth[lidarYear - t0];
        const ClassGrid& cls = classes[lidarYear - t0];
        Grid lidar = Grid::filled(geo, 0.0f);
        Rng rng(derive_seed(spec.seed, "lidar"));
        for (std::size_t i = 0; i < geo.size(); ++i) {
            const double noise = rng.normal(0.0, spec.lidar_noise_sd);
            if (lcmap::vegetated(cls.codes[i]))
                lidar.values[i] =
                    static_cast<float>(std::max(0.0, t.values[i] + noise));
            else
                lidar.values[i] = lidar.nodata;
        }
        write_grid(dir / "lidar" / "agb_lidar", lidar);
    }

    // Plots: uniform locations away from the border, footprint-extracted
    // truth AGB, uniformly drawn panel assignments.
    {
        Rng rng(derive_seed(spec.seed, "plots"));
        const double margin = 2.5 * geo.cellsize;
        std::vector<PlotRecord> plots;
        plots.reserve(spec.n_plots);
        for (int k = 0; k < spec.n_plots; ++k) {
            PlotRecord p;
            char id[32];
            std::snprintf(id, sizeof(id), "P%05d", k);
            p.plot_id = id;
            p.year = t0 + static_cast<int>(rng.below(static_cast<std::uint64_t>(nYears)));
            p.x = rng.uniform(geo.xll + margin, geo.xmax() - margin);
            p.y = rng.uniform(geo.yll + margin, geo.ymax() - margin);
            p.panel = 1 + static_cast<int>(rng.below(5));

            const auto w = build_footprint(p).coverage(geo);
            const int yi = p.year - t0;
            p.agb = weighted_extract(w, truth[yi]);
            bool allTree = true;
            for (const auto& e : w.entries)
                if (classes[yi].at(e.row, e.col) != lcmap::kTreeCover) {
                    allTree = false;
                    break;
                }
            p.fully_forested = allTree;
            p.true_zero = !allTree && p.agb == 0.0;
            plots.push_back(std::move(p));
        }
        write_plots_csv(dir / "plots.csv", plots);
    }

    nlohmann::json worldMeta = {{"year_start", t0},
                                {"year_end", spec.year_end},
                                {"lidar_year", lidarYear},
                                {"spec", spec.to_json()}};
    std::ofstream out(dir / "world.json");
    out << worldMeta.dump(2) << '\n';

    SynthWorld w;
    w.dir = dir;
    w.schema = schema;
    for (int y = t0; y <= spec.year_end; ++y) w.years.push_back(y);
    w.lidar_year = lidarYear;
    return w;
}

SynthWorld open_world(const std::filesystem::path& dir) {
    std::ifstream in(dir / "world.json");
    if (!in) throw IoError("not a synthetic world directory: " + dir.string());
    nlohmann::json j;
    in >> j;
    SynthWorld w;
    w.dir = dir;
    w.schema = PredictorSchema::load(dir / "schema.json");
    const int y0 = j.at("year_start").get<int>();
    const int y1 = j.at("year_end").get<int>();
    for (int y = y0; y <= y1; ++y) w.years.push_back(y);
    w.lidar_year = j.at("lidar_year").get<int>();
    return w;
}

}  // namespace agb
