#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pdlink/link.hpp"

namespace pdlink {

struct SweepPoint {
    std::vector<double> axis;  // values in axis_names order
    std::string label;         // series tag, e.g. "proposed" / "baseline"
    MetricsReport report;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::vector<std::string> axis_names;
    std::vector<SweepPoint> points;
    LinkConfig base;
    std::string base_digest;
};

// Each grid point runs with seed mix_seed(base.seed, sweep_point + index),
// so results are independent of evaluation order and thread count. Per-point
// failures are recorded and the sweep continues.
SweepResult sweep_er_grid(const LinkConfig& base, const std::vector<double>& er_i_db,
                          const std::vector<double>& er_o_db, bool dpd_enabled, int threads = 1);

SweepResult sweep_phase_deviation(const LinkConfig& base, const std::vector<double>& delta_theta_deg,
                                  int threads = 1);

SweepResult sweep_phase_deviation_2d(const LinkConfig& base, const std::vector<double>& delta1_deg,
                                     const std::vector<double>& delta2_deg, int threads = 1);

// BER vs received power; optionally overlays the coherent baseline (same
// channel realization, predistortion off) at every point.
SweepResult sweep_rop(const LinkConfig& base, const std::vector<double>& rop_dbm,
                      bool include_baseline, int threads = 1);

struct AlphaSearch {
    double best_alpha = 0.0;
    double best_global_snr_db = 0.0;
    bool unimodal = true;
    SweepResult curve;
};

// Grid search of Global-SNR over the offset-correction factor. Every
// evaluation reuses base.seed so alpha = 0 reproduces the plain run exactly.
AlphaSearch optimize_alpha(const LinkConfig& base, double alpha_lo, double alpha_hi, int points,
                           int threads = 1);

nlohmann::json report_to_json(const MetricsReport& r);

// Writes <prefix>.csv (fixed column order, one row per point) and
// <prefix>_manifest.json (config echo, seed, digest, tool version).
void emit_report(const SweepResult& result, const std::string& out_prefix);

}  // namespace pdlink
