#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdlink/config_io.hpp"
#include "pdlink/sweeps.hpp"

namespace {

using pdlink::LinkConfig;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_prefix;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::string& default_out) {
    cmd->add_option("--config", o.config_path, "JSON config file (defaults used when omitted)");
    cmd->add_option("--set", o.overrides, "override a config field, dotted.path=value (repeatable)");
    cmd->add_option("--out", o.out_prefix, "output prefix for CSV / manifest")->default_val(default_out);
    cmd->add_option("--threads", o.threads, "worker threads for sweeps")->default_val(1);
}

LinkConfig build_config(const CommonOpts& o) {
    nlohmann::json j = pdlink::config_to_json(LinkConfig{});
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw std::runtime_error("cannot open config " + o.config_path);
        nlohmann::json file_json;
        in >> file_json;
        // File contents land on top of the defaults so partial configs work.
        j.merge_patch(file_json);
    }
    for (const auto& ov : o.overrides) pdlink::apply_override(j, ov);
    return pdlink::config_from_json(j);
}

std::vector<double> parse_axis(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double start = 0.0, stop = 0.0, step = 0.0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0)
            throw std::runtime_error("range must be start:stop:step with positive step: " + text);
        for (double v = start; v <= stop + 1e-9 * step; v += step) out.push_back(v);
    } else {
        std::istringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) out.push_back(std::stod(tok));
        }
    }
    if (out.empty()) throw std::runtime_error("empty axis: " + text);
    return out;
}

void print_report(const pdlink::MetricsReport& r) { std::cout << pdlink::report_to_json(r).dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-diverse direct-detection link simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, base_o, er_o, phase_o, rop_o, alpha_o, print_o;

    auto* run_cmd = app.add_subcommand("run", "single end-to-end run");
    add_common(run_cmd, run_o, "out/run");

    auto* base_cmd = app.add_subcommand("baseline", "single coherent-baseline run");
    add_common(base_cmd, base_o, "out/baseline");

    auto* er_cmd = app.add_subcommand("sweep-er", "Global-SNR over the (ER_i, ER_o) grid");
    add_common(er_cmd, er_o, "out/sweep_er");
    std::string er_i_text = "4:10:1", er_o_text = "25", er_dpd = "both";
    er_cmd->add_option("--er-i", er_i_text, "inner ER axis, dB (list or start:stop:step)");
    er_cmd->add_option("--er-o", er_o_text, "outer ER axis, dB");
    er_cmd->add_option("--dpd", er_dpd, "on | off | both")->check(CLI::IsMember({"on", "off", "both"}));

    auto* phase_cmd = app.add_subcommand("sweep-phase", "Global-SNR over receiver phase deviation");
    add_common(phase_cmd, phase_o, "out/sweep_phase");
    std::string dtheta_text = "-40:40:5", d1_text, d2_text;
    phase_cmd->add_option("--dtheta", dtheta_text, "common deviation axis, degrees");
    phase_cmd->add_option("--dtheta1", d1_text, "branch-1 deviation axis, degrees (with --dtheta2: 2-D map)");
    phase_cmd->add_option("--dtheta2", d2_text, "branch-3 deviation axis, degrees");

    auto* rop_cmd = app.add_subcommand("sweep-rop", "BER versus received optical power");
    add_common(rop_cmd, rop_o, "out/sweep_rop");
    std::string rop_text = "-12:-2:1";
    bool with_baseline = true;
    rop_cmd->add_option("--rop", rop_text, "received power axis, dBm");
    rop_cmd->add_flag("--baseline,!--no-baseline", with_baseline, "overlay the coherent baseline");

    auto* alpha_cmd = app.add_subcommand("optimize-alpha", "search the offset-correction factor");
    add_common(alpha_cmd, alpha_o, "out/alpha");
    double alpha_lo = 0.0, alpha_hi = 0.15;
    int alpha_points = 16;
    alpha_cmd->add_option("--alpha-lo", alpha_lo, "search lower bound");
    alpha_cmd->add_option("--alpha-hi", alpha_hi, "search upper bound");
    alpha_cmd->add_option("--points", alpha_points, "grid points");

    auto* print_cmd = app.add_subcommand("print-config", "print the effective config as JSON");
    add_common(print_cmd, print_o, "out/config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto cfg = build_config(run_o);
            print_report(pdlink::run_link(cfg));
        } else if (base_cmd->parsed()) {
            const auto cfg = build_config(base_o);
            print_report(pdlink::run_coherent_baseline(cfg));
        } else if (er_cmd->parsed()) {
            const auto cfg = build_config(er_o);
            const auto ei = parse_axis(er_i_text);
            const auto eo = parse_axis(er_o_text);
            pdlink::SweepResult all;
            if (er_dpd == "on" || er_dpd == "both") all = pdlink::sweep_er_grid(cfg, ei, eo, true, er_o.threads);
            if (er_dpd == "off" || er_dpd == "both") {
                auto off = pdlink::sweep_er_grid(cfg, ei, eo, false, er_o.threads);
                if (all.points.empty())
                    all = std::move(off);
                else
                    all.points.insert(all.points.end(), off.points.begin(), off.points.end());
            }
            pdlink::emit_report(all, er_o.out_prefix);
            std::cout << "wrote " << er_o.out_prefix << ".csv (" << all.points.size() << " points)\n";
        } else if (phase_cmd->parsed()) {
            const auto cfg = build_config(phase_o);
            pdlink::SweepResult res;
            if (!d1_text.empty() && !d2_text.empty())
                res = pdlink::sweep_phase_deviation_2d(cfg, parse_axis(d1_text), parse_axis(d2_text),
                                                       phase_o.threads);
            else
                res = pdlink::sweep_phase_deviation(cfg, parse_axis(dtheta_text), phase_o.threads);
            pdlink::emit_report(res, phase_o.out_prefix);
            std::cout << "wrote " << phase_o.out_prefix << ".csv (" << res.points.size() << " points)\n";
        } else if (rop_cmd->parsed()) {
            const auto cfg = build_config(rop_o);
            const auto res = pdlink::sweep_rop(cfg, parse_axis(rop_text), with_baseline, rop_o.threads);
            pdlink::emit_report(res, rop_o.out_prefix);
            std::cout << "wrote " << rop_o.out_prefix << ".csv (" << res.points.size() << " points)\n";
        } else if (alpha_cmd->parsed()) {
            const auto cfg = build_config(alpha_o);
            const auto res = pdlink::optimize_alpha(cfg, alpha_lo, alpha_hi, alpha_points, alpha_o.threads);
            pdlink::emit_report(res.curve, alpha_o.out_prefix);
            nlohmann::json best;
            best["best_alpha"] = res.best_alpha;
            best["best_global_snr_db"] = res.best_global_snr_db;
            best["unimodal"] = res.unimodal;
            std::cout << best.dump(2) << "\n";
        } else if (print_cmd->parsed()) {
            const auto cfg = build_config(print_o);
            std::cout << pdlink::config_to_json(cfg).dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
