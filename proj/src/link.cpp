#include "pdlink/link.hpp"

#include <cmath>
#include <stdexcept>

#include "pdlink/config_io.hpp"
#include "pdlink/qam.hpp"
#include "pdlink/rng.hpp"

namespace pdlink {

ImbalanceSet LinkConfig::resolved_imbalance() const {
    if (!use_er_shorthand) return modulator.imbalance;
    ImbalanceSet g;
    g.g_i = er_db_to_imbalance(er_i_db);
    g.g_q = g.g_i;
    g.g_p = er_db_to_imbalance(er_o_db);
    return g;
}

void LinkConfig::validate() const {
    tx.plan.validate();
    lms.validate();
    if (receiver.theta <= 0.0 || receiver.theta >= 3.14159265358979324)
        throw std::invalid_argument("config: receiver theta must lie in (0, pi)");
    if (receiver.carrier_filter_bw_hz > tx.plan.guard_hz)
        throw std::invalid_argument("config: carrier filter width exceeds the guard band");
    if (tx.payload_symbols < 1 || tx.preamble_symbols < 16)
        throw std::invalid_argument("config: need payload symbols and a preamble of at least 16");
    if (dpd.drive_scale <= 0.0) throw std::invalid_argument("config: drive scale must be positive");
    if (dpd.alpha < 0.0) throw std::invalid_argument("config: alpha must be non-negative");
    if (tx.dac_enob < 1 || adc_enob < 1) throw std::invalid_argument("config: enob must be >= 1");
    if (use_er_shorthand && (er_i_db <= 0.0 || er_o_db <= 0.0))
        throw std::invalid_argument("config: extinction ratios must be > 0 dB");
}

namespace {

template <typename F>
auto stage(const char* name, const std::string& digest, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + name + ": " + e.what() + " [config " + digest + "]");
    }
}

struct TxResult {
    std::vector<QamFrame> frames;
    Waveform reference;  // clean unit-RMS composite, the data-aided yardstick
    Waveform field;      // modulated optical output
    double cspr_db = 0.0;
    double saturation_fraction = 0.0;
    double clip_fraction = 0.0;
};

TxResult run_transmitter(const LinkConfig& cfg, const std::string& digest) {
    const auto& plan = cfg.tx.plan;
    TxResult tx;

    stage("framing", digest, [&] {
        for (int b = 0; b < plan.n_bands; ++b) {
            auto bits = random_bits(cfg.tx.payload_symbols * kQamBitsPerSymbol, cfg.seed,
                                    stream::bits + std::uint64_t(b));
            tx.frames.push_back(build_frame(bits, cfg.tx.preamble_symbols, cfg.seed, unsigned(b)));
        }
        return 0;
    });

    Waveform composite =
        stage("shaping", digest, [&] { return shape_and_mux(tx.frames, plan, cfg.tx.rrc_span_symbols); });
    tx.reference = composite;

    stage("noise loading", digest, [&] {
        if (cfg.awgn_location == AwgnLocation::drive) {
            auto rng = make_rng(mix_seed(cfg.seed, stream::drive_awgn));
            const double var = mean_power(composite.samples) / db_to_lin(cfg.awgn_snr_db);
            add_cgauss(composite.samples, var, rng);
        }
        return 0;
    });

    for (auto& v : composite.samples) v *= cfg.dpd.drive_scale;

    Waveform drive;
    drive.sample_rate = composite.sample_rate;
    stage("drive mapping", digest, [&] {
        ModulatorParams m = cfg.modulator;
        DriveSignals d;
        if (cfg.dpd.enabled) {
            const auto coeff = compute_dpd_coefficients(cfg.resolved_imbalance());
            d = predistort(composite.samples, coeff, m.v_pi_i, m.v_pi_q, m.v_bias_i, m.v_bias_q);
            offset_correct(d.v_i, cfg.dpd.alpha, cfg.dpd.offset_mode);
            offset_correct(d.v_q, cfg.dpd.alpha, cfg.dpd.offset_mode);
        } else {
            d = linear_drive(composite.samples, m.v_pi_i, m.v_pi_q, m.v_bias_i, m.v_bias_q);
        }
        tx.saturation_fraction = d.saturation_fraction;
        drive.samples.resize(d.v_i.size());
        for (std::size_t k = 0; k < d.v_i.size(); ++k) drive.samples[k] = cplx(d.v_i[k], d.v_q[k]);
        return 0;
    });

    stage("dac", digest, [&] {
        // The amplitude response is even in frequency, so running both rails
        // through one complex pass applies the same real filter to each.
        drive = pre_emphasis(drive, cfg.tx.response, cfg.tx.pre_emphasis_max_db);
        const cplx dc = mean(drive.samples);
        for (auto& v : drive.samples) v -= dc;
        drive = clip(drive, cfg.tx.clip_ratio_db, &tx.clip_fraction);
        for (auto& v : drive.samples) v += dc;
        drive = quantize(drive, cfg.tx.dac_enob);
        drive = apply_response(drive, cfg.tx.response);
        return 0;
    });

    stage("modulator", digest, [&] {
        ModulatorParams m = cfg.modulator;
        m.imbalance = cfg.resolved_imbalance();
        std::vector<double> vi(drive.size()), vq(drive.size());
        for (std::size_t k = 0; k < drive.size(); ++k) {
            vi[k] = drive.samples[k].real() + m.v_bias_i;
            vq[k] = drive.samples[k].imag() + m.v_bias_q;
        }
        Waveform laser = laser_field(cfg.laser, drive.size(), drive.sample_rate,
                                     mix_seed(cfg.seed, stream::laser));
        tx.field = iq_modulate(laser, vi, vq, m);
        if (cfg.awgn_location == AwgnLocation::optical) {
            auto rng = make_rng(mix_seed(cfg.seed, stream::optical_awgn));
            const double var = mean_power(tx.field.samples) / db_to_lin(cfg.awgn_snr_db);
            add_cgauss(tx.field.samples, var, rng);
        }
        tx.cspr_db = measure_cspr(tx.field, cfg.receiver.carrier_filter_bw_hz);
        return 0;
    });

    return tx;
}

Waveform channel(const LinkConfig& cfg, const Waveform& field, const std::string& digest) {
    Waveform out = field;
    if (cfg.fiber_enabled) out = stage("fiber", digest, [&] { return fiber_propagate(out, cfg.fiber); });
    return stage("attenuator", digest, [&] { return set_rop(out, cfg.rop_dbm); });
}

// Demux, matched filter, synchronize, downsample, one complex tap from the
// preamble, then score the payload. Shared by both receivers.
void score_bands(const LinkConfig& cfg, const Waveform& composite, const std::vector<QamFrame>& frames,
                 const std::string& digest, MetricsReport& report) {
    const auto& plan = cfg.tx.plan;
    const auto taps = rrc_taps(cfg.tx.rrc());
    const std::size_t n_sym = cfg.tx.preamble_symbols + cfg.tx.payload_symbols;

    std::vector<double> snrs_linear;
    report.sync_quality = std::numeric_limits<double>::infinity();
    for (int b = 0; b < plan.n_bands; ++b) {
        const std::string label = "band " + std::to_string(b);
        Waveform symbols_wf = stage(("demux " + label).c_str(), digest, [&] {
            Waveform band = demux_subcarrier(composite, plan, b);
            return fir_filter(band, taps);
        });
        SyncResult sync = stage(("sync " + label).c_str(), digest,
                                [&] { return synchronize(symbols_wf, frames[b].preamble, 2); });
        report.sync_quality = std::min(report.sync_quality, sync.peak_quality);

        std::vector<cplx> symbols(n_sym);
        if (sync.aligned.size() < 2 * n_sym)
            throw std::runtime_error("stage downsample: record shorter than the frame [config " + digest + "]");
        for (std::size_t k = 0; k < n_sym; ++k) symbols[k] = sync.aligned.samples[2 * k];

        std::vector<cplx> preamble_rx(symbols.begin(), symbols.begin() + cfg.tx.preamble_symbols);
        std::vector<cplx> payload_rx(symbols.begin() + cfg.tx.preamble_symbols, symbols.end());
        const cplx gain = stage(("scale " + label).c_str(), digest,
                                [&] { return fit_one_tap(preamble_rx, frames[b].preamble); });
        if (b == 0) report.carrier_scale = std::abs(gain);
        for (auto& v : payload_rx) v /= gain;

        const ScoreResult score = stage(("score " + label).c_str(), digest,
                                        [&] { return decide_and_score(payload_rx, frames[b]); });
        report.per_subcarrier_snr_db.push_back(score.snr_db);
        report.per_subcarrier_ber.push_back(score.ber);
        snrs_linear.push_back(db_to_lin(score.snr_db));
        report.bit_errors += score.bit_errors;
        report.bits_total += score.bits_total;
    }
    report.global_snr_db = lin_to_db(global_snr(snrs_linear));
    report.evm_db = -report.global_snr_db;
    if (report.bit_errors == 0) {
        report.ber = report.bits_total ? 1.0 / double(report.bits_total) : 0.0;
        report.ber_censored = true;
    } else {
        report.ber = double(report.bit_errors) / double(report.bits_total);
        report.ber_censored = report.bit_errors < 5;
    }
}

}  // namespace

MetricsReport run_link(const LinkConfig& cfg) {
    const std::string digest = config_digest(cfg);
    stage("validate", digest, [&] {
        cfg.validate();
        return 0;
    });

    TxResult tx = run_transmitter(cfg, digest);
    const Waveform received = channel(cfg, tx.field, digest);

    BranchCurrents currents = stage("receiver", digest, [&] {
        BranchFields branches = split_and_shift(received, cfg.receiver);
        return detect_branches(branches, cfg.pd, cfg.seed);
    });
    stage("adc", digest, [&] {
        for (auto& i : currents.i) i = quantize_real(i, cfg.adc_enob);
        return 0;
    });

    Waveform composite;
    if (cfg.rx_path == RxPath::analytic) {
        composite = stage("reconstruct", digest,
                          [&] { return reconstruct(currents, 1.0, cfg.receiver.theta); });
        if (cfg.fiber_enabled)
            composite = stage("cd compensation", digest, [&] { return cd_compensate(composite, cfg.fiber); });
    } else {
        composite = stage("lms", digest, [&] {
            std::array<Waveform, 3> branches;
            for (int k = 0; k < 3; ++k) {
                branches[k].sample_rate = currents.sample_rate;
                branches[k].samples.assign(currents.i[k].begin(), currents.i[k].end());
                if (cfg.fiber_enabled) branches[k] = cd_compensate(branches[k], cfg.fiber);
            }
            const int sps = int(std::lround(cfg.tx.plan.out_rate_hz / cfg.tx.plan.symbol_rate_hz));
            return lms_equalize_3x1(branches, cfg.lms, tx.reference, sps).output;
        });
    }

    MetricsReport report;
    report.config_digest = digest;
    report.cspr_db = tx.cspr_db;
    report.saturation_fraction = tx.saturation_fraction;
    report.clip_fraction = tx.clip_fraction;
    report.samples_used = composite.size();
    score_bands(cfg, composite, tx.frames, digest, report);
    return report;
}

MetricsReport run_coherent_baseline(const LinkConfig& cfg) {
    const std::string digest = config_digest(cfg);
    stage("validate", digest, [&] {
        cfg.validate();
        return 0;
    });

    TxResult tx = run_transmitter(cfg, digest);
    const Waveform received = channel(cfg, tx.field, digest);

    Waveform composite = stage("homodyne", digest, [&] {
        Waveform laser = laser_field(cfg.laser, received.size(), received.sample_rate,
                                     mix_seed(cfg.seed, stream::laser));
        const double lo_amp = std::sqrt(dbm_to_watt(cfg.lo_power_dbm));
        Waveform y;
        y.sample_rate = received.sample_rate;
        y.samples.resize(received.size());
        for (std::size_t k = 0; k < received.size(); ++k) {
            const cplx ref = laser.samples[k] / std::abs(laser.samples[k]);
            y.samples[k] = cfg.pd.responsivity_a_per_w * lo_amp * received.samples[k] * std::conj(ref);
        }
        auto rng = make_rng(mix_seed(cfg.seed, stream::baseline_noise));
        add_cgauss(y.samples, cfg.pd.noise_variance(y.sample_rate), rng);
        return quantize(y, cfg.adc_enob);
    });
    if (cfg.fiber_enabled)
        composite = stage("cd compensation", digest, [&] { return cd_compensate(composite, cfg.fiber); });

    MetricsReport report;
    report.config_digest = digest;
    report.cspr_db = tx.cspr_db;
    report.saturation_fraction = tx.saturation_fraction;
    report.clip_fraction = tx.clip_fraction;
    report.samples_used = composite.size();
    score_bands(cfg, composite, tx.frames, digest, report);
    return report;
}

}  // namespace pdlink
