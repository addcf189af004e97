#pragma once

#include <filesystem>

#include "agb/plots.hpp"
#include "agb/sampling.hpp"
#include "agb/table.hpp"

namespace agb {

/// One synthetic disturbance: a circular step drop of `magnitude` Mg/ha in
/// `year`, followed by a linear recovery ramp toward the undisturbed
/// trajectory.
struct DisturbanceEvent {
    int year = 0;
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double magnitude = 0.0;       // Mg/ha dropped between year-1 and year
    double recovery_rate = 5.0;   // Mg/ha regained per year afterwards
};

/// Deterministic synthetic world standing in for the FIA / Landsat / LiDAR
/// inputs. Everything derives from `seed`.
struct SynthWorldSpec {
    int nrows = 200;
    int ncols = 200;
    double cellsize = 30.0;
    double xll = 0.0;
    double yll = 0.0;
    std::string crs_tag = "synthetic-local-m";

    int year_start = 2001;
    int year_end = 2006;

    double agb_max = 300.0;
    int n_bumps = 12;            // Gaussian bumps in the latent AGB field
    double growth_rate = 1.5;    // Mg/ha per year on vegetated cells
    std::vector<DisturbanceEvent> disturbances;

    double predictor_noise_sd = 0.02;
    double lidar_noise_sd = 8.0;
    int lidar_year = 0;          // 0 = middle of the span

    int n_plots = 300;
    std::uint64_t seed = 42;

    // landcover rule thresholds on the latent fields
    double water_threshold = 0.93;     // wetness field quantile-ish cutoff
    double developed_threshold = 0.96; // development field cutoff
    double cropland_threshold = 0.92;
    double barren_threshold = 0.985;   // elevation field cutoff
    double wetland_low = 0.80;
    double tree_min_agb = 60.0;

    void validate() const;
    nlohmann::json to_json() const;
    static SynthWorldSpec from_json(const nlohmann::json& j);
    static SynthWorldSpec load(const std::filesystem::path& path);
};

/// Paths of the generated world, all under the output directory:
///   schema.json, plots.csv, truth/agb_<year>, lidar/agb_lidar,
///   stacks/<year>/<NAME>, classes/LCPRI_<year>.
struct SynthWorld {
    std::filesystem::path dir;
    PredictorSchema schema;
    std::vector<int> years;
    int lidar_year = 0;

    std::filesystem::path stack_dir(int year) const;
    std::filesystem::path truth_path(int year) const;
    std::filesystem::path class_path(int year) const;
    std::filesystem::path lidar_path() const;
    std::filesystem::path plots_path() const;
    std::filesystem::path schema_path() const;
};

/// Writes the full world to `dir` (created if absent). Plot AGB is the
/// footprint-weighted extraction of the truth surface, so a zero-noise
/// spec reproduces truth exactly at plots.
SynthWorld synth_generate(const SynthWorldSpec& spec, const std::filesystem::path& dir);

/// Reopen a previously generated world directory.
SynthWorld open_world(const std::filesystem::path& dir);

}  // namespace agb
