#include "pdlink/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "pdlink/config_io.hpp"
#include "pdlink/rng.hpp"

namespace pdlink {

namespace {

struct Job {
    std::vector<double> axis;
    std::string label;
    LinkConfig cfg;
    bool baseline = false;
};

SweepResult run_jobs(const LinkConfig& base, std::vector<std::string> axis_names, std::vector<Job> jobs,
                     int threads) {
    SweepResult out;
    out.axis_names = std::move(axis_names);
    out.base = base;
    out.base_digest = config_digest(base);
    out.points.resize(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) break;
            SweepPoint p;
            p.axis = jobs[k].axis;
            p.label = jobs[k].label;
            try {
                p.report = jobs[k].baseline ? run_coherent_baseline(jobs[k].cfg) : run_link(jobs[k].cfg);
            } catch (const std::exception& e) {
                p.failed = true;
                p.error = e.what();
            }
            out.points[k] = std::move(p);
        }
    };

    threads = std::max(1, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

std::uint64_t point_seed(const LinkConfig& base, std::size_t index) {
    return mix_seed(base.seed, stream::sweep_point + index);
}

}  // namespace

SweepResult sweep_er_grid(const LinkConfig& base, const std::vector<double>& er_i_db,
                          const std::vector<double>& er_o_db, bool dpd_enabled, int threads) {
    if (er_i_db.empty() || er_o_db.empty())
        throw std::invalid_argument("sweep_er_grid: empty extinction-ratio grid");
    std::vector<Job> jobs;
    std::size_t index = 0;
    for (double ei : er_i_db)
        for (double eo : er_o_db) {
            Job j;
            j.axis = {ei, eo};
            j.label = dpd_enabled ? "dpd_on" : "dpd_off";
            j.cfg = base;
            j.cfg.seed = point_seed(base, index++);
            j.cfg.use_er_shorthand = true;
            j.cfg.er_i_db = ei;
            j.cfg.er_o_db = eo;
            j.cfg.dpd.enabled = dpd_enabled;
            jobs.push_back(std::move(j));
        }
    return run_jobs(base, {"er_i_db", "er_o_db"}, std::move(jobs), threads);
}

SweepResult sweep_phase_deviation(const LinkConfig& base, const std::vector<double>& delta_theta_deg,
                                  int threads) {
    if (delta_theta_deg.empty()) throw std::invalid_argument("sweep_phase_deviation: empty grid");
    std::vector<Job> jobs;
    std::size_t index = 0;
    for (double d : delta_theta_deg) {
        Job j;
        j.axis = {d};
        j.label = "proposed";
        j.cfg = base;
        j.cfg.seed = point_seed(base, index++);
        j.cfg.receiver.delta_theta = d * std::numbers::pi / 180.0;
        jobs.push_back(std::move(j));
    }
    return run_jobs(base, {"delta_theta_deg"}, std::move(jobs), threads);
}

SweepResult sweep_phase_deviation_2d(const LinkConfig& base, const std::vector<double>& delta1_deg,
                                     const std::vector<double>& delta2_deg, int threads) {
    if (delta1_deg.empty() || delta2_deg.empty())
        throw std::invalid_argument("sweep_phase_deviation_2d: empty grid");
    std::vector<Job> jobs;
    std::size_t index = 0;
    for (double d1 : delta1_deg)
        for (double d2 : delta2_deg) {
            Job j;
            j.axis = {d1, d2};
            j.label = "proposed";
            j.cfg = base;
            j.cfg.seed = point_seed(base, index++);
            j.cfg.receiver.delta_theta_1 = d1 * std::numbers::pi / 180.0;
            j.cfg.receiver.delta_theta_2 = d2 * std::numbers::pi / 180.0;
            jobs.push_back(std::move(j));
        }
    return run_jobs(base, {"delta_theta_1_deg", "delta_theta_2_deg"}, std::move(jobs), threads);
}

SweepResult sweep_rop(const LinkConfig& base, const std::vector<double>& rop_dbm, bool include_baseline,
                      int threads) {
    if (rop_dbm.empty()) throw std::invalid_argument("sweep_rop: empty power list");
    std::vector<Job> jobs;
    std::size_t index = 0;
    for (double rop : rop_dbm) {
        Job j;
        j.axis = {rop};
        j.label = "proposed";
        j.cfg = base;
        j.cfg.seed = point_seed(base, index);
        j.cfg.rop_dbm = rop;
        jobs.push_back(j);
        if (include_baseline) {
            Job b = j;  // same per-point seed: identical channel realization
            b.label = "baseline";
            b.baseline = true;
            b.cfg.dpd.enabled = false;
            jobs.push_back(std::move(b));
        }
        ++index;
    }
    return run_jobs(base, {"rop_dbm"}, std::move(jobs), threads);
}

AlphaSearch optimize_alpha(const LinkConfig& base, double alpha_lo, double alpha_hi, int points,
                           int threads) {
    if (points < 2 || alpha_hi < alpha_lo) throw std::invalid_argument("optimize_alpha: bad search range");
    std::vector<Job> jobs;
    for (int k = 0; k < points; ++k) {
        const double a = alpha_lo + (alpha_hi - alpha_lo) * double(k) / double(points - 1);
        Job j;
        j.axis = {a};
        j.label = "alpha_scan";
        j.cfg = base;  // deliberately the same seed everywhere
        j.cfg.dpd.alpha = a;
        jobs.push_back(std::move(j));
    }
    AlphaSearch out;
    out.curve = run_jobs(base, {"alpha"}, std::move(jobs), threads);

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> snrs;
    for (const auto& p : out.curve.points) {
        const double s = p.failed ? -std::numeric_limits<double>::infinity() : p.report.global_snr_db;
        snrs.push_back(s);
        if (s > best) {
            best = s;
            out.best_alpha = p.axis[0];
            out.best_global_snr_db = s;
        }
    }
    // A curve is flagged multi-modal if more than one strict interior local
    // maximum exceeds its neighbours by a noise margin.
    const double margin = 0.05;
    int maxima = 0;
    for (std::size_t k = 0; k < snrs.size(); ++k) {
        const double left = k ? snrs[k - 1] : -std::numeric_limits<double>::infinity();
        const double right = k + 1 < snrs.size() ? snrs[k + 1] : -std::numeric_limits<double>::infinity();
        if (snrs[k] > left + margin && snrs[k] > right + margin) ++maxima;
    }
    out.unimodal = maxima <= 1;
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string sanitize(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace

nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["global_snr_db"] = r.global_snr_db;
    j["per_subcarrier_snr_db"] = r.per_subcarrier_snr_db;
    j["ber"] = r.ber;
    j["per_subcarrier_ber"] = r.per_subcarrier_ber;
    j["ber_censored"] = r.ber_censored;
    j["cspr_db"] = r.cspr_db;
    j["evm_db"] = r.evm_db;
    j["carrier_scale"] = r.carrier_scale;
    j["saturation_fraction"] = r.saturation_fraction;
    j["clip_fraction"] = r.clip_fraction;
    j["sync_quality"] = r.sync_quality;
    j["bit_errors"] = r.bit_errors;
    j["bits_total"] = r.bits_total;
    j["samples_used"] = r.samples_used;
    j["config_digest"] = r.config_digest;
    return j;
}

void emit_report(const SweepResult& result, const std::string& out_prefix) {
    const std::filesystem::path prefix(out_prefix);
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());

    const int bands = result.base.tx.plan.n_bands;
    std::ofstream csv(out_prefix + ".csv");
    if (!csv) throw std::runtime_error("emit_report: cannot write " + out_prefix + ".csv");

    for (const auto& a : result.axis_names) csv << a << ",";
    csv << "label,global_snr_db";
    for (int b = 0; b < bands; ++b) csv << ",snr_db_band" << b;
    csv << ",ber";
    for (int b = 0; b < bands; ++b) csv << ",ber_band" << b;
    csv << ",ber_censored,cspr_db,evm_db,carrier_scale,saturation_fraction,clip_fraction,"
           "sync_quality,bit_errors,bits_total,samples_used,config_digest,failed,error\n";

    for (const auto& p : result.points) {
        for (double a : p.axis) csv << fmt(a) << ",";
        csv << p.label << ",";
        const auto& r = p.report;
        csv << fmt(r.global_snr_db);
        for (int b = 0; b < bands; ++b)
            csv << "," << (b < int(r.per_subcarrier_snr_db.size()) ? fmt(r.per_subcarrier_snr_db[b]) : "");
        csv << "," << fmt(r.ber);
        for (int b = 0; b < bands; ++b)
            csv << "," << (b < int(r.per_subcarrier_ber.size()) ? fmt(r.per_subcarrier_ber[b]) : "");
        csv << "," << (r.ber_censored ? 1 : 0) << "," << fmt(r.cspr_db) << "," << fmt(r.evm_db) << ","
            << fmt(r.carrier_scale) << "," << fmt(r.saturation_fraction) << "," << fmt(r.clip_fraction)
            << "," << fmt(r.sync_quality) << "," << r.bit_errors << "," << r.bits_total << ","
            << r.samples_used << "," << r.config_digest << "," << (p.failed ? 1 : 0) << ","
            << sanitize(p.error) << "\n";
    }
    csv.close();

    nlohmann::json manifest;
    manifest["schema_version"] = kConfigSchemaVersion;
    manifest["tool_version"] = kToolVersion;
    manifest["config"] = config_to_json(result.base);
    manifest["config_digest"] = result.base_digest;
    manifest["axis_names"] = result.axis_names;
    manifest["n_points"] = result.points.size();
    std::ofstream mf(out_prefix + "_manifest.json");
    if (!mf) throw std::runtime_error("emit_report: cannot write " + out_prefix + "_manifest.json");
    mf << manifest.dump(2) << "\n";
}

}  // namespace pdlink
