#pragma once

#include "dhc/cia/dhc_series.hpp"
#include "dhc/common/time.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace dhc::econ {

/// A scalar series on its own time base (PV in kW, MOER in gCO2/kWh, ...).
struct TimeSeries {
    std::vector<Timestamp> timestamps;
    std::vector<double> values;

    std::size_t size() const { return timestamps.size(); }
};

inline constexpr double kGramsPerPound = 453.59237;

/// lb/MWh to g/kWh.
inline double lb_per_mwh_to_g_per_kwh(double v) { return v * kGramsPerPound / 1000.0; }

struct StaticLimits {
    std::vector<int> bus_ids;
    Eigen::VectorXd l_pv_mw;         ///< minimum upper HC over the solved steps
    std::vector<int> zero_bus_ids;   ///< nodes whose static limit is zero (no base PV possible)
    std::size_t solved_steps = 0;
    std::size_t failed_steps = 0;    ///< daytime steps without a solution, counted as zero HC
};

/// Minimum of p+ over the daytime steps. A failed daytime step counts as zero
/// hosting capacity. `nodes` selects a subset (all generators when empty).
/// Throws InputError when a requested node is absent or no daytime step exists.
StaticLimits static_limits(const cia::DhcSeries& dhc, const std::vector<int>& nodes = {});

/// The DHC upper bound laid onto the PV time base. A DHC series covering a
/// single day is matched by time of day (one representative day for the whole
/// PV horizon); longer series are matched by timestamp.
struct Alignment {
    std::vector<int> bus_ids;
    std::vector<Timestamp> timestamps;  ///< PV time base
    double dt_hours = 0.0;
    Eigen::VectorXd pv_kw;              ///< reference PV, zero at excluded steps
    std::vector<int> dhc_step;          ///< row of hc_mw per PV step, -1 when excluded
    Eigen::MatrixXd hc_mw;              ///< DHC steps x nodes, p+ (0 for failed steps)
    std::size_t excluded_pv_steps = 0;  ///< PV steps with output but no daytime DHC step
    double excluded_pv_kwh = 0.0;

    std::size_t steps() const { return timestamps.size(); }
};

/// Throws InputError when the PV step differs from the DHC step, a daytime PV
/// step has no DHC counterpart, or a value is negative or non-finite.
Alignment align_pv(const cia::DhcSeries& dhc, const TimeSeries& pv);

/// Base PV scaled to the static limits.
struct BaseProfile {
    std::vector<int> bus_ids;
    Eigen::VectorXd l_pv_mw;
    double pv_peak_kw = 0.0;
    Eigen::MatrixXd p_base_mw;  ///< PV steps x nodes
    Eigen::VectorXd e_base_mwh;

    double e_base_total_mwh() const { return e_base_mwh.sum(); }
};

/// P_base = L_pv * P_pv / max P_pv, E_base = dt * sum P_base. Throws InputError
/// for an all-zero PV shape or mismatched node sets.
BaseProfile base_profile(const StaticLimits& limits, const Alignment& aligned);

struct CurvePoint {
    double dc = 0.0;
    Eigen::VectorXd e_new_mwh, e_curt_mwh, e_add_mwh;  ///< per node, E_add against the node's own base
    double e_new_total = 0.0;
    double e_curt_total = 0.0;
    double e_add_total = 0.0;
    double e_add_common = 0.0;  ///< sum(E_new - E_curt) minus the common base
    double e_add_pct = 0.0;     ///< against this scenario's aggregate base
    double e_curt_pct = 0.0;
    double e_add_pct_common = 0.0;  ///< against the common base
    double e_curt_pct_common = 0.0;
};

struct CurtailmentCurves {
    std::string scenario;
    std::vector<int> bus_ids;
    Eigen::VectorXd e_base_mwh;
    Eigen::VectorXd asymptote_mwh;  ///< limit of E_add per node as dc grows
    double common_base_mwh = 0.0;
    std::vector<CurvePoint> points;
};

/// The common base is the minimum aggregate E_base over a set of scenarios.
double common_base(const std::vector<BaseProfile>& bases);

/// Curtailment and added energy on a sorted, nonnegative dc grid. Throws
/// InputError on a bad grid or when base and alignment disagree.
CurtailmentCurves curtailment_curves(const Alignment& aligned, const BaseProfile& base, const std::vector<double>& dc_grid,
                                     double common_base_mwh, const std::string& scenario = {});

struct CarbonParams {
    double lambda_curt = 0.20;  ///< $/kWh
    double lambda_co2 = 100.0;  ///< $/tCO2
    double m_pv = 40.0;         ///< gCO2/kWh
};

struct EconomicsPoint {
    double dc = 0.0;
    Eigen::VectorXd a_co2_t;  ///< avoided emissions per node
    double a_co2_total_t = 0.0;
    double c_rev = 0.0;   ///< $
    double c_curt = 0.0;  ///< $
    double np = 0.0;      ///< $
};

struct EconomicsReport {
    std::string scenario;
    CarbonParams params;
    CurtailmentCurves curves;
    std::vector<EconomicsPoint> points;
    std::size_t best_index = 0;  ///< argmax NP over the grid (first on ties)
    std::size_t moer_gaps = 0;   ///< PV steps with added output but no MOER sample

    double best_dc() const { return points.at(best_index).dc; }
};

/// Avoided tonnes of CO2 for power in MW held over `hours` with intensities in gCO2/kWh.
inline double avoided_tonnes(double mw, double hours, double m_grid, double m_pv) {
    return mw * 1000.0 * hours * (m_grid - m_pv) / 1e6;
}

/// Carbon revenue, curtailment cost and net profit for every point of the
/// curves. MOER (gCO2/kWh) is matched to the PV time base by timestamp; steps
/// without a sample are excluded from the avoided emissions and counted.
/// Throws InputError for negative prices or an empty MOER series.
EconomicsReport carbon_and_profit(const Alignment& aligned, const BaseProfile& base, const CurtailmentCurves& curves,
                                  const TimeSeries& moer_g_per_kwh, const CarbonParams& params);

/// Reference-grid default, 0 to 100 % in 5 % steps.
std::vector<double> default_dc_grid();

}  // namespace dhc::econ
