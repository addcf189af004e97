#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "agb/grid.hpp"
#include "agb/plots.hpp"
#include "agb/schema.hpp"

namespace agb {

/// Assembled model-training rows: response plus indicator-expanded features.
/// Rows never contain missing values; assembly drops (and reports) records
/// it cannot complete.
struct TrainingTable {
    std::vector<std::string> feature_names;
    std::vector<double> response;
    std::vector<double> features;  // row-major, rows() x width()
    std::vector<std::string> source;  // "plot" | "lidar_pixel"
    std::vector<int> year;
    std::vector<double> x;
    std::vector<double> y;

    std::size_t rows() const { return response.size(); }
    std::size_t width() const { return feature_names.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * width(), width()};
    }
    std::string schema_hash() const { return feature_names_hash(feature_names); }

    void push_row(double resp, std::span<const double> feats, const std::string& src,
                  int yr, double px, double py);
};

/// Row subset in index order (used by LOO stacking and CV folds).
TrainingTable subset(const TrainingTable& t, std::span<const std::size_t> idx);

// Table CSV: response,source,year,x,y,<expanded feature names...>.
// Numeric fields use exact round-trip formatting.
void write_table_csv(const std::filesystem::path& path, const TrainingTable& t);
TrainingTable read_table_csv(const std::filesystem::path& path);

/// Aligned predictor rasters for one year. Continuous predictors are real
/// grids, categorical predictors are class grids.
struct PredictorStack {
    PredictorSchema schema;
    GridGeoref geo;
    std::map<std::string, Grid> continuous;
    std::map<std::string, ClassGrid> categorical;

    void validate() const;  // complete vs schema, all grids aligned
};

/// Load `<dir>/<NAME>.bin/.json` for every predictor in the schema.
PredictorStack load_stack(const std::filesystem::path& dir, const PredictorSchema& schema);

/// Expand one cell of a stack into feature columns. Returns false (with a
/// reason) when any predictor is nodata at that cell.
bool cell_features(const PredictorStack& stack, int row, int col, std::vector<double>& out,
                   std::string& why);

struct LidarSample {
    std::string sample_id;
    int year = 0;
    double x = 0.0;
    double y = 0.0;
    double agb = 0.0;
};

/// Reads any CSV containing sample_id,year,x,y,agb_mg_ha columns (extra
/// columns such as `stratum` are ignored).
std::vector<LidarSample> read_lidar_csv(const std::filesystem::path& path);

struct DroppedRow {
    std::string id;
    std::string reason;
};

struct AssembleResult {
    TrainingTable table;
    std::vector<DroppedRow> dropped;
};

/// Plot rows: footprint-weighted extraction over all four subplots jointly;
/// categorical predictors take the coverage-weighted majority class.
/// Throws MissingYearStack when a plot's year has no stack.
AssembleResult assemble_plots(const std::vector<PlotRecord>& plots,
                              const std::map<int, PredictorStack>& stacks,
                              const PredictorSchema& schema);

/// Pixel rows: the single containing cell's values.
AssembleResult assemble_pixels(const std::vector<LidarSample>& samples,
                               const std::map<int, PredictorStack>& stacks,
                               const PredictorSchema& schema);

}  // namespace agb
