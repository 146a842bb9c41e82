#include "pdlink/rxdsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pdlink/fft.hpp"
#include "pdlink/qam.hpp"

namespace pdlink {

Waveform cd_compensate(const Waveform& s, const FiberParams& f) {
    const std::size_t n = s.size();
    Waveform out;
    out.sample_rate = s.sample_rate;
    if (n == 0) return out;
    const double length_m = f.length_km * 1e3;
    const double beta2 = f.beta2_s2_per_m();
    auto spec = s.samples;
    fft_forward(spec);
    for (std::size_t k = 0; k < n; ++k) {
        const double omega = 2.0 * std::numbers::pi * bin_freq(k, n, s.sample_rate);
        const double phase = -0.5 * beta2 * omega * omega * length_m;
        spec[k] *= cplx(std::cos(phase), std::sin(phase));
    }
    fft_inverse(spec);
    out.samples = std::move(spec);
    return out;
}

void LmsConfig::validate() const {
    if (taps_per_branch < 1 || taps_per_branch % 2 == 0)
        throw std::invalid_argument("lms config: taps_per_branch must be odd and >= 1");
    if (!(step_size > 0.0 && step_size < 1.0))
        throw std::invalid_argument("lms config: step_size must lie in (0, 1)");
    if (train_symbols < 1) throw std::invalid_argument("lms config: train_symbols must be positive");
}

LmsResult lms_equalize_3x1(const BranchCurrents& b, const LmsConfig& cfg, const Waveform& reference,
                           int samples_per_symbol) {
    std::array<Waveform, 3> branches;
    for (int k = 0; k < 3; ++k) {
        branches[k].sample_rate = b.sample_rate;
        branches[k].samples.assign(b.i[k].begin(), b.i[k].end());
    }
    return lms_equalize_3x1(branches, cfg, reference, samples_per_symbol);
}

LmsResult lms_equalize_3x1(const std::array<Waveform, 3>& branches, const LmsConfig& cfg,
                           const Waveform& reference, int samples_per_symbol) {
    cfg.validate();
    if (samples_per_symbol < 1) throw std::invalid_argument("lms_equalize_3x1: bad samples_per_symbol");
    const std::size_t n = branches[0].size();
    if (branches[1].size() != n || branches[2].size() != n)
        throw std::invalid_argument("lms_equalize_3x1: branch lengths differ");
    if (reference.size() != n)
        throw std::invalid_argument("lms_equalize_3x1: reference length must match the currents");

    // Mean-removed inputs under one common scale so tap ratios stay physical.
    std::array<std::vector<cplx>, 3> x;
    double power = 0.0;
    for (int k = 0; k < 3; ++k) {
        x[k] = branches[k].samples;
        const cplx m = mean(x[k]);
        for (auto& v : x[k]) v -= m;
        for (const auto& v : x[k]) power += std::norm(v);
    }
    const double in_scale = power > 0.0 ? 1.0 / std::sqrt(power / double(3 * n)) : 1.0;
    for (auto& xi : x)
        for (auto& v : xi) v *= in_scale;

    std::vector<cplx> d = reference.samples;
    const double ref_rms = std::sqrt(mean_power(d));
    if (ref_rms > 0.0)
        for (auto& v : d) v /= ref_rms;

    const int t = cfg.taps_per_branch;
    const int half = t / 2;
    const std::size_t train_end =
        std::min<std::size_t>(n, std::size_t(cfg.train_symbols) * std::size_t(samples_per_symbol));

    LmsResult res;
    for (auto& w : res.taps) w.assign(std::size_t(t), cplx(0.0, 0.0));
    res.output.sample_rate = branches[0].sample_rate;
    res.output.samples.resize(n);

    const auto filter_at = [&](std::size_t k) {
        cplx y(0.0, 0.0);
        for (int br = 0; br < 3; ++br)
            for (int tap = 0; tap < t; ++tap) {
                const std::ptrdiff_t idx = std::ptrdiff_t(k) - tap + half;
                if (idx >= 0 && idx < std::ptrdiff_t(n))
                    y += std::conj(res.taps[br][std::size_t(tap)]) * x[br][std::size_t(idx)];
            }
        return y;
    };
    const auto adapt_at = [&](std::size_t k, cplx y) {
        const cplx e = d[k] - y;
        const cplx g = cfg.step_size * std::conj(e);
        for (int br = 0; br < 3; ++br)
            for (int tap = 0; tap < t; ++tap) {
                const std::ptrdiff_t idx = std::ptrdiff_t(k) - tap + half;
                if (idx >= 0 && idx < std::ptrdiff_t(n))
                    res.taps[br][std::size_t(tap)] += g * x[br][std::size_t(idx)];
            }
        return std::norm(e);
    };

    // Training pass: adapt over the training prefix only, output discarded.
    double first_block = -1.0;
    double block_acc = 0.0;
    std::size_t block_cnt = 0;
    const std::size_t block = 4096;
    for (std::size_t k = 0; k < train_end; ++k) {
        block_acc += adapt_at(k, filter_at(k));
        ++block_cnt;
        if (block_cnt == block || k + 1 == train_end) {
            const double mse = block_acc / double(block_cnt);
            if (first_block < 0.0) first_block = mse;
            res.training_mse = mse;
            block_acc = 0.0;
            block_cnt = 0;
        }
    }

    // Output pass with converged taps; tracking keeps adapting, train_only freezes.
    for (std::size_t k = 0; k < n; ++k) {
        const cplx y = filter_at(k);
        res.output.samples[k] = y;
        if (cfg.mode == LmsConfig::Mode::train_then_track) adapt_at(k, y);
    }
    if (!std::isfinite(res.training_mse) || (res.training_mse > 2.0 && res.training_mse > 2.0 * first_block))
        throw std::runtime_error("lms_equalize_3x1: diverged (training MSE " +
                                 std::to_string(res.training_mse) + " from " + std::to_string(first_block) + ")");
    return res;
}

Waveform demux_subcarrier(const Waveform& s, const SubcarrierPlan& plan, int band_index) {
    plan.validate();
    if (band_index < 0 || band_index >= plan.n_bands)
        throw std::invalid_argument("demux_subcarrier: band index out of range");
    Waveform centered = frequency_shift(s, -plan.center_hz(band_index));
    Waveform filtered = brickwall_lowpass(centered, 0.5 * plan.occupied_hz());
    return resample(filtered, 2.0 * plan.symbol_rate_hz);
}

SyncResult synchronize(const Waveform& s, const std::vector<cplx>& preamble, int samples_per_symbol,
                       double min_peak_quality) {
    if (preamble.empty()) throw std::invalid_argument("synchronize: empty preamble");
    const std::size_t n = s.size();
    if (n < preamble.size() * std::size_t(samples_per_symbol))
        throw std::invalid_argument("synchronize: record shorter than the preamble");

    // Symbol-spaced template; correlation peaks where the preamble starts.
    std::vector<cplx> tmpl(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < preamble.size(); ++k)
        tmpl[k * std::size_t(samples_per_symbol)] = preamble[k];

    auto sf = s.samples;
    fft_forward(sf);
    fft_forward(tmpl);
    for (std::size_t k = 0; k < n; ++k) sf[k] *= std::conj(tmpl[k]);
    fft_inverse(sf);
    const auto& corr = sf;

    std::size_t best = 0;
    double best_mag = -1.0;
    double sum_mag = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double m = std::abs(corr[k]);
        sum_mag += m;
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    const double off_peak = (sum_mag - best_mag) / double(n - 1);
    const double quality = off_peak > 0.0 ? best_mag / off_peak : std::numeric_limits<double>::infinity();
    if (quality < min_peak_quality)
        throw std::runtime_error("synchronize: correlation peak quality " + std::to_string(quality) +
                                 " below threshold " + std::to_string(min_peak_quality));

    SyncResult out;
    out.offset = best;
    out.peak_quality = quality;
    out.aligned.sample_rate = s.sample_rate;
    out.aligned.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.aligned.samples[k] = s.samples[(k + best) % n];
    return out;
}

double constant_phase_rotate(std::vector<cplx>& x, const std::vector<cplx>& reference) {
    const std::size_t n = std::min(x.size(), reference.size());
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) acc += std::conj(reference[k]) * x[k];
    if (n == 0 || std::abs(acc) == 0.0)
        throw std::invalid_argument("constant_phase_rotate: estimation window has no energy");
    const double phi = std::arg(acc);
    const cplx rot(std::cos(phi), -std::sin(phi));
    for (auto& v : x) v *= rot;
    return phi;
}

cplx fit_one_tap(const std::vector<cplx>& x, const std::vector<cplx>& reference) {
    const std::size_t n = std::min(x.size(), reference.size());
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        num += std::conj(reference[k]) * x[k];
        den += std::norm(reference[k]);
    }
    if (den <= 0.0) throw std::invalid_argument("fit_one_tap: reference window has no energy");
    return num / den;
}

ScoreResult decide_and_score(const std::vector<cplx>& symbols, const QamFrame& frame) {
    if (symbols.size() != frame.payload.size())
        throw std::invalid_argument("decide_and_score: symbol count does not match the payload");
    ScoreResult out;
    out.bits_total = frame.payload_bits.size();
    double sig = 0.0;
    double err = 0.0;
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        sig += std::norm(frame.payload[k]);
        err += std::norm(symbols[k] - frame.payload[k]);
        const std::uint32_t hat = qam32_decide(symbols[k]);
        for (int b = 0; b < kQamBitsPerSymbol; ++b) {
            const std::uint8_t bit = (hat >> (kQamBitsPerSymbol - 1 - b)) & 1u;
            out.bit_errors += bit != frame.payload_bits[k * std::size_t(kQamBitsPerSymbol) + std::size_t(b)];
        }
    }
    const double snr = err > 0.0 ? sig / err : 0.0;
    out.snr_db = err > 0.0 ? std::min(lin_to_db(snr), kSnrCapDb) : kSnrCapDb;
    out.evm_db = -out.snr_db;
    if (out.bit_errors == 0) {
        out.ber = out.bits_total ? 1.0 / double(out.bits_total) : 0.0;
        out.censored = true;
    } else {
        out.ber = double(out.bit_errors) / double(out.bits_total);
        out.censored = out.bit_errors < 5;
    }
    return out;
}

double global_snr(const std::vector<double>& snrs_linear) {
    if (snrs_linear.empty()) throw std::invalid_argument("global_snr: empty SNR list");
    if (snrs_linear.size() == 1) {
        if (snrs_linear[0] < 0.0) throw std::invalid_argument("global_snr: negative SNR");
        return snrs_linear[0];
    }
    double acc = 0.0;
    for (double s : snrs_linear) {
        if (s < 0.0) throw std::invalid_argument("global_snr: negative SNR");
        acc += std::log1p(s);
    }
    return std::expm1(acc / double(snrs_linear.size()));
}

}  // namespace pdlink
