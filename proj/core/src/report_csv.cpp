#include <cmath>

#include "agb/csv.hpp"
#include "agb/report_csv.hpp"

namespace agb {

namespace {

std::string num(double v, int decimals = 6) {
    if (std::isnan(v)) return "";
    return fmt_fixed(v, decimals);
}

}  // namespace

void write_agreement_csv(const std::filesystem::path& path, const AgreementReport& rep) {
    CsvWriter w(path);
    w.row({"scale", "model", "n", "pph", "mae", "pmae", "rmse", "prmse", "me", "r2",
           "se_mae", "se_rmse", "se_me", "se_r2", "gmfr_slope", "gmfr_intercept"});
    for (const auto& s : rep.scales) {
        const MetricSet& m = s.metrics;
        w.row({s.label, rep.model_label, std::to_string(s.n),
               s.spacing_m > 0.0 ? num(s.pph, 2) : "", num(m.mae), num(m.pmae), num(m.rmse),
               num(m.prmse), num(m.me), num(m.r2), num(m.se_mae), num(m.se_rmse),
               num(m.se_me), num(m.se_r2), s.gmfr_ok ? num(s.gmfr.slope) : "",
               s.gmfr_ok ? num(s.gmfr.intercept) : ""});
    }
}

void write_by_class_csv(const std::filesystem::path& path, const AgreementReport& rep) {
    CsvWriter w(path);
    w.row({"class", "model", "n", "mae", "pmae", "rmse", "prmse", "me", "r2", "se_mae",
           "se_rmse", "se_me", "se_r2"});
    for (const auto& c : rep.per_class) {
        const MetricSet& m = c.metrics;
        w.row({std::to_string(c.landcover), rep.model_label, std::to_string(c.n),
               num(m.mae), num(m.pmae), num(m.rmse), num(m.prmse), num(m.me), num(m.r2),
               num(m.se_mae), num(m.se_rmse), num(m.se_me), num(m.se_r2)});
    }
}

void write_hex_residuals_csv(const std::filesystem::path& path, const AgreementReport& rep) {
    CsvWriter w(path);
    w.row({"hex_q", "hex_r", "count", "mean_ref", "mae", "prmse", "me"});
    for (const auto& h : rep.hex_residuals)
        w.row({std::to_string(h.id.q), std::to_string(h.id.r), std::to_string(h.count),
               num(h.mean_ref), num(h.mae), num(h.prmse), num(h.me)});
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<AnnualClassRow>& rows) {
    CsvWriter w(path);
    w.row({"year", "class", "mean_agb", "cell_count"});
    for (const auto& r : rows)
        w.row({std::to_string(r.year), std::to_string(r.landcover), num(r.mean_agb),
               std::to_string(r.cell_count)});
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::map<std::string, std::vector<TrajectoryRow>>& rows) {
    CsvWriter w(path);
    w.row({"poly_id", "year", "mean_agb"});
    for (const auto& [id, traj] : rows)
        for (const auto& r : traj)
            w.row({id, std::to_string(r.year), num(r.mean_agb)});
}

void write_small_area_csv(const std::filesystem::path& path, const SmallAreaResult& res) {
    CsvWriter w(path);
    w.row({"hex_id", "mapped_mean", "veg_fraction", "adj_estimate", "adj_ci_low",
           "adj_ci_high", "inside_ci"});
    for (const auto& r : res.rows)
        w.row({r.hex_id, num(r.mapped_mean), num(r.veg_fraction), num(r.adj_estimate),
               num(r.adj_ci_low), num(r.adj_ci_high), r.inside_ci ? "true" : "false"});
}

void write_dropped_csv(const std::filesystem::path& path,
                       const std::vector<DroppedRow>& dropped) {
    CsvWriter w(path);
    w.row({"id", "reason"});
    for (const auto& d : dropped) w.row({d.id, d.reason});
}

void write_test_metrics_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, MetricSet>>& rows,
                            const std::vector<std::size_t>& ns) {
    CsvWriter w(path);
    w.row({"model", "n", "rmse", "prmse", "mae", "pmae", "me", "r2"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [label, m] = rows[i];
        w.row({label, std::to_string(ns[i]), num(m.rmse), num(m.prmse), num(m.mae),
               num(m.pmae), num(m.me), num(m.r2)});
    }
}

}  // namespace agb
