#pragma once

#include "agb/assessment.hpp"
#include "agb/surface.hpp"

namespace agb {

// Agreement CSV columns mirror the paper-style results table:
// scale,model,n,pph,mae,pmae,rmse,prmse,me,r2,se_mae,se_rmse,se_me,se_r2,
// gmfr_slope,gmfr_intercept
void write_agreement_csv(const std::filesystem::path& path, const AgreementReport& rep);

// class,model,n,mae,pmae,rmse,prmse,me,r2,se_mae,se_rmse,se_me,se_r2
void write_by_class_csv(const std::filesystem::path& path, const AgreementReport& rep);

// hex_q,hex_r,count,mean_ref,mae,prmse,me
void write_hex_residuals_csv(const std::filesystem::path& path, const AgreementReport& rep);

// year,class,mean_agb,cell_count
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<AnnualClassRow>& rows);

// poly_id,year,mean_agb
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::map<std::string, std::vector<TrajectoryRow>>& rows);

// hex_id,mapped_mean,veg_fraction,adj_estimate,adj_ci_low,adj_ci_high,inside_ci
void write_small_area_csv(const std::filesystem::path& path, const SmallAreaResult& res);

// id,reason
void write_dropped_csv(const std::filesystem::path& path,
                       const std::vector<DroppedRow>& dropped);

// model,n,rmse,prmse,mae,pmae,me,r2  (test-partition performance)
void write_test_metrics_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, MetricSet>>& rows,
                            const std::vector<std::size_t>& ns);

}  // namespace agb
