#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pdlink/optics.hpp"
#include "pdlink/receiver.hpp"
#include "pdlink/txdsp.hpp"
#include "pdlink/waveform.hpp"

namespace pdlink {

// Exact inverse of fiber_propagate's dispersion transfer; attenuation is a
// scalar and is left alone.
Waveform cd_compensate(const Waveform& s, const FiberParams& f);

struct LmsConfig {
    int taps_per_branch = 15;
    double step_size = 1e-3;
    int train_symbols = 8192;
    enum class Mode { train_then_track, train_only };
    Mode mode = Mode::train_then_track;

    void validate() const;
};

struct LmsResult {
    Waveform output;
    std::array<std::vector<cplx>, 3> taps;
    double training_mse = 0.0;
};

// 3x1 complex FIR equalizer on the branch currents, trained data-aided
// against the known composite reference: y[k] = sum_b w_b^H x_b[k]. In
// train_then_track mode the taps keep adapting over the full record; in
// train_only they freeze after train_symbols * samples_per_symbol samples.
// Inputs and reference are mean-removed and commonly scaled internally, so
// the output carries an arbitrary complex gain (absorbed downstream).
LmsResult lms_equalize_3x1(const BranchCurrents& b, const LmsConfig& cfg, const Waveform& reference,
                           int samples_per_symbol);

// Same equalizer on complex-valued branch inputs (e.g. currents that were
// dispersion-precompensated per branch).
LmsResult lms_equalize_3x1(const std::array<Waveform, 3>& branches, const LmsConfig& cfg,
                           const Waveform& reference, int samples_per_symbol);

// Shift one band to DC, reject the neighbors, land at 2 samples/symbol.
Waveform demux_subcarrier(const Waveform& s, const SubcarrierPlan& plan, int band_index);

struct SyncResult {
    Waveform aligned;
    std::size_t offset = 0;
    double peak_quality = 0.0;  // correlation peak over mean off-peak level
};

// Locates the preamble by circular cross-correlation against the
// symbol-spaced preamble template and rotates the record so the frame starts
// at sample zero.
SyncResult synchronize(const Waveform& s, const std::vector<cplx>& preamble, int samples_per_symbol,
                       double min_peak_quality = 4.0);

// Single rotation e^{-j phi} with phi = arg sum(conj(ref) * x) over the
// shared window; returns phi.
double constant_phase_rotate(std::vector<cplx>& x, const std::vector<cplx>& reference);

// Complex least-squares gain fitting x ~ gain * reference; magnitude is the
// carrier-scale estimate, phase the residual rotation.
cplx fit_one_tap(const std::vector<cplx>& x, const std::vector<cplx>& reference);

struct ScoreResult {
    double ber = 0.0;
    double snr_db = 0.0;
    double evm_db = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits_total = 0;
    bool censored = false;  // too few errors for a trustworthy BER point
};

inline constexpr double kSnrCapDb = 200.0;

// Minimum-distance decisions against the payload, data-aided SNR, and
// EVM = -SNR in dB.
ScoreResult decide_and_score(const std::vector<cplx>& symbols, const QamFrame& frame);

// Geometric-mean capacity combining of per-subcarrier SNRs:
// prod(1 + snr_n)^(1/N) - 1, all quantities linear.
double global_snr(const std::vector<double>& snrs_linear);

struct MetricsReport {
    std::vector<double> per_subcarrier_snr_db;
    std::vector<double> per_subcarrier_ber;
    double global_snr_db = 0.0;
    double ber = 0.0;
    double cspr_db = 0.0;
    double evm_db = 0.0;
    double saturation_fraction = 0.0;
    double clip_fraction = 0.0;
    double carrier_scale = 0.0;
    double sync_quality = 0.0;
    std::size_t samples_used = 0;
    std::size_t bit_errors = 0;
    std::size_t bits_total = 0;
    bool ber_censored = false;
    std::string config_digest;
};

}  // namespace pdlink
