#include "pdlink/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdlink {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument(std::string("config: ") + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::invalid_argument(std::string("config: unknown key '") + it.key() + "' in " + where);
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::string offset_mode_name(OffsetMode m) { return m == OffsetMode::literal ? "literal" : "mean"; }
OffsetMode offset_mode_from(const std::string& s) {
    if (s == "literal") return OffsetMode::literal;
    if (s == "mean") return OffsetMode::mean;
    throw std::invalid_argument("config: offset_mode must be 'literal' or 'mean'");
}

std::string awgn_name(AwgnLocation l) {
    switch (l) {
        case AwgnLocation::drive: return "drive";
        case AwgnLocation::optical: return "optical";
        default: return "off";
    }
}
AwgnLocation awgn_from(const std::string& s) {
    if (s == "drive") return AwgnLocation::drive;
    if (s == "optical") return AwgnLocation::optical;
    if (s == "off") return AwgnLocation::off;
    throw std::invalid_argument("config: awgn.location must be 'drive', 'optical' or 'off'");
}

std::string path_name(RxPath p) { return p == RxPath::analytic ? "analytic" : "lms"; }
RxPath path_from(const std::string& s) {
    if (s == "analytic") return RxPath::analytic;
    if (s == "lms") return RxPath::lms;
    throw std::invalid_argument("config: rx.path must be 'analytic' or 'lms'");
}

std::string lms_mode_name(LmsConfig::Mode m) {
    return m == LmsConfig::Mode::train_then_track ? "train_then_track" : "train_only";
}
LmsConfig::Mode lms_mode_from(const std::string& s) {
    if (s == "train_then_track") return LmsConfig::Mode::train_then_track;
    if (s == "train_only") return LmsConfig::Mode::train_only;
    throw std::invalid_argument("config: rx.lms_mode must be 'train_then_track' or 'train_only'");
}

}  // namespace

json config_to_json(const LinkConfig& c) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["seed"] = c.seed;
    j["laser"] = {{"power_dbm", c.laser.power_dbm},
                  {"linewidth_hz", c.laser.linewidth_hz},
                  {"rin_db_per_hz", c.laser.rin_db_per_hz}};
    json mod = {{"v_pi_i_volt", c.modulator.v_pi_i},   {"v_pi_q_volt", c.modulator.v_pi_q},
                {"v_pi_p_volt", c.modulator.v_pi_p},   {"v_bias_i_volt", c.modulator.v_bias_i},
                {"v_bias_q_volt", c.modulator.v_bias_q}, {"v_p_volt", c.modulator.v_p},
                {"er_i_db", c.er_i_db},                {"er_o_db", c.er_o_db}};
    if (!c.use_er_shorthand) {
        mod["g_i"] = c.modulator.imbalance.g_i;
        mod["g_q"] = c.modulator.imbalance.g_q;
        mod["g_p"] = c.modulator.imbalance.g_p;
    }
    j["modulator"] = mod;
    j["dpd"] = {{"enabled", c.dpd.enabled},
                {"alpha", c.dpd.alpha},
                {"offset_mode", offset_mode_name(c.dpd.offset_mode)},
                {"drive_scale", c.dpd.drive_scale}};
    j["tx"] = {{"n_bands", c.tx.plan.n_bands},
               {"symbol_rate_hz", c.tx.plan.symbol_rate_hz},
               {"rrc_beta", c.tx.plan.rrc_beta},
               {"guard_hz", c.tx.plan.guard_hz},
               {"sample_rate_hz", c.tx.plan.out_rate_hz},
               {"rrc_span_symbols", c.tx.rrc_span_symbols},
               {"payload_symbols", c.tx.payload_symbols},
               {"preamble_symbols", c.tx.preamble_symbols},
               {"clip_ratio_db", c.tx.clip_ratio_db},
               {"dac_enob", c.tx.dac_enob},
               {"response_bw_hz", c.tx.response.bw_hz},
               {"response_order", c.tx.response.order},
               {"pre_emphasis_max_db", c.tx.pre_emphasis_max_db}};
    j["awgn"] = {{"location", awgn_name(c.awgn_location)}, {"snr_db", c.awgn_snr_db}};
    j["fiber"] = {{"enabled", c.fiber_enabled},
                  {"length_km", c.fiber.length_km},
                  {"loss_db_per_km", c.fiber.loss_db_per_km},
                  {"dispersion_ps_nm_km", c.fiber.dispersion_ps_nm_km},
                  {"wavelength_nm", c.fiber.wavelength_nm}};
    j["rop_dbm"] = c.rop_dbm;
    j["receiver"] = {{"theta_rad", c.receiver.theta},
                     {"delta_theta_rad", c.receiver.delta_theta},
                     {"delta_theta_1_rad", c.receiver.delta_theta_1},
                     {"delta_theta_2_rad", c.receiver.delta_theta_2},
                     {"carrier_filter_bw_hz", c.receiver.carrier_filter_bw_hz},
                     {"split_scale", c.receiver.split_scale}};
    j["pd"] = {{"responsivity_a_per_w", c.pd.responsivity_a_per_w},
               {"dark_current_a", c.pd.dark_current_a},
               {"thermal_pa_per_rt_hz", c.pd.thermal_pa_per_rt_hz}};
    j["adc_enob"] = c.adc_enob;
    j["rx"] = {{"path", path_name(c.rx_path)},
               {"lms_taps_per_branch", c.lms.taps_per_branch},
               {"lms_step_size", c.lms.step_size},
               {"lms_train_symbols", c.lms.train_symbols},
               {"lms_mode", lms_mode_name(c.lms.mode)}};
    j["baseline"] = {{"lo_power_dbm", c.lo_power_dbm}};
    return j;
}

LinkConfig config_from_json(const json& j) {
    check_keys(j, "root",
               {"schema_version", "seed", "laser", "modulator", "dpd", "tx", "awgn", "fiber", "rop_dbm",
                "receiver", "pd", "adc_enob", "rx", "baseline"});
    LinkConfig c;
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion)
        throw std::invalid_argument("config: unsupported schema_version");
    get_if(j, "seed", c.seed);
    if (j.contains("laser")) {
        const auto& l = j.at("laser");
        check_keys(l, "laser", {"power_dbm", "linewidth_hz", "rin_db_per_hz"});
        get_if(l, "power_dbm", c.laser.power_dbm);
        get_if(l, "linewidth_hz", c.laser.linewidth_hz);
        get_if(l, "rin_db_per_hz", c.laser.rin_db_per_hz);
    }
    if (j.contains("modulator")) {
        const auto& m = j.at("modulator");
        check_keys(m, "modulator",
                   {"v_pi_i_volt", "v_pi_q_volt", "v_pi_p_volt", "v_bias_i_volt", "v_bias_q_volt",
                    "v_p_volt", "er_i_db", "er_o_db", "g_i", "g_q", "g_p"});
        get_if(m, "v_pi_i_volt", c.modulator.v_pi_i);
        get_if(m, "v_pi_q_volt", c.modulator.v_pi_q);
        get_if(m, "v_pi_p_volt", c.modulator.v_pi_p);
        get_if(m, "v_bias_i_volt", c.modulator.v_bias_i);
        get_if(m, "v_bias_q_volt", c.modulator.v_bias_q);
        get_if(m, "v_p_volt", c.modulator.v_p);
        get_if(m, "er_i_db", c.er_i_db);
        get_if(m, "er_o_db", c.er_o_db);
        if (m.contains("g_i") || m.contains("g_q") || m.contains("g_p")) {
            if (!(m.contains("g_i") && m.contains("g_q") && m.contains("g_p")))
                throw std::invalid_argument("config: g_i, g_q, g_p must be given together");
            c.use_er_shorthand = false;
            c.modulator.imbalance.g_i = m.at("g_i").get<double>();
            c.modulator.imbalance.g_q = m.at("g_q").get<double>();
            c.modulator.imbalance.g_p = m.at("g_p").get<double>();
        }
    }
    if (j.contains("dpd")) {
        const auto& d = j.at("dpd");
        check_keys(d, "dpd", {"enabled", "alpha", "offset_mode", "drive_scale"});
        get_if(d, "enabled", c.dpd.enabled);
        get_if(d, "alpha", c.dpd.alpha);
        if (d.contains("offset_mode")) c.dpd.offset_mode = offset_mode_from(d.at("offset_mode").get<std::string>());
        get_if(d, "drive_scale", c.dpd.drive_scale);
    }
    if (j.contains("tx")) {
        const auto& t = j.at("tx");
        check_keys(t, "tx",
                   {"n_bands", "symbol_rate_hz", "rrc_beta", "guard_hz", "sample_rate_hz",
                    "rrc_span_symbols", "payload_symbols", "preamble_symbols", "clip_ratio_db",
                    "dac_enob", "response_bw_hz", "response_order", "pre_emphasis_max_db"});
        get_if(t, "n_bands", c.tx.plan.n_bands);
        get_if(t, "symbol_rate_hz", c.tx.plan.symbol_rate_hz);
        get_if(t, "rrc_beta", c.tx.plan.rrc_beta);
        get_if(t, "guard_hz", c.tx.plan.guard_hz);
        get_if(t, "sample_rate_hz", c.tx.plan.out_rate_hz);
        get_if(t, "rrc_span_symbols", c.tx.rrc_span_symbols);
        get_if(t, "payload_symbols", c.tx.payload_symbols);
        get_if(t, "preamble_symbols", c.tx.preamble_symbols);
        get_if(t, "clip_ratio_db", c.tx.clip_ratio_db);
        get_if(t, "dac_enob", c.tx.dac_enob);
        get_if(t, "response_bw_hz", c.tx.response.bw_hz);
        get_if(t, "response_order", c.tx.response.order);
        get_if(t, "pre_emphasis_max_db", c.tx.pre_emphasis_max_db);
    }
    if (j.contains("awgn")) {
        const auto& a = j.at("awgn");
        check_keys(a, "awgn", {"location", "snr_db"});
        if (a.contains("location")) c.awgn_location = awgn_from(a.at("location").get<std::string>());
        get_if(a, "snr_db", c.awgn_snr_db);
    }
    if (j.contains("fiber")) {
        const auto& f = j.at("fiber");
        check_keys(f, "fiber", {"enabled", "length_km", "loss_db_per_km", "dispersion_ps_nm_km", "wavelength_nm"});
        get_if(f, "enabled", c.fiber_enabled);
        get_if(f, "length_km", c.fiber.length_km);
        get_if(f, "loss_db_per_km", c.fiber.loss_db_per_km);
        get_if(f, "dispersion_ps_nm_km", c.fiber.dispersion_ps_nm_km);
        get_if(f, "wavelength_nm", c.fiber.wavelength_nm);
    }
    get_if(j, "rop_dbm", c.rop_dbm);
    if (j.contains("receiver")) {
        const auto& r = j.at("receiver");
        check_keys(r, "receiver",
                   {"theta_rad", "delta_theta_rad", "delta_theta_1_rad", "delta_theta_2_rad",
                    "carrier_filter_bw_hz", "split_scale"});
        get_if(r, "theta_rad", c.receiver.theta);
        get_if(r, "delta_theta_rad", c.receiver.delta_theta);
        get_if(r, "delta_theta_1_rad", c.receiver.delta_theta_1);
        get_if(r, "delta_theta_2_rad", c.receiver.delta_theta_2);
        get_if(r, "carrier_filter_bw_hz", c.receiver.carrier_filter_bw_hz);
        get_if(r, "split_scale", c.receiver.split_scale);
    }
    if (j.contains("pd")) {
        const auto& p = j.at("pd");
        check_keys(p, "pd", {"responsivity_a_per_w", "dark_current_a", "thermal_pa_per_rt_hz"});
        get_if(p, "responsivity_a_per_w", c.pd.responsivity_a_per_w);
        get_if(p, "dark_current_a", c.pd.dark_current_a);
        get_if(p, "thermal_pa_per_rt_hz", c.pd.thermal_pa_per_rt_hz);
    }
    get_if(j, "adc_enob", c.adc_enob);
    if (j.contains("rx")) {
        const auto& r = j.at("rx");
        check_keys(r, "rx", {"path", "lms_taps_per_branch", "lms_step_size", "lms_train_symbols", "lms_mode"});
        if (r.contains("path")) c.rx_path = path_from(r.at("path").get<std::string>());
        get_if(r, "lms_taps_per_branch", c.lms.taps_per_branch);
        get_if(r, "lms_step_size", c.lms.step_size);
        get_if(r, "lms_train_symbols", c.lms.train_symbols);
        if (r.contains("lms_mode")) c.lms.mode = lms_mode_from(r.at("lms_mode").get<std::string>());
    }
    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        check_keys(b, "baseline", {"lo_power_dbm"});
        get_if(b, "lo_power_dbm", c.lo_power_dbm);
    }
    return c;
}

LinkConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json j;
    in >> j;
    return config_from_json(j);
}

void save_config(const LinkConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot write " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("override must look like dotted.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json* cur = &j;
    std::istringstream toks(path);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(toks, tok, '.')) parts.push_back(tok);
    if (parts.empty()) throw std::invalid_argument("override has an empty path: " + assignment);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) cur = &((*cur)[parts[i]]);

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare strings (e.g. offset_mode=mean) need no quotes
    }
    (*cur)[parts.back()] = parsed;
}

std::string config_digest(const LinkConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace pdlink
