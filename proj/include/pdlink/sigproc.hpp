#pragma once

#include <cstdint>
#include <vector>

#include "pdlink/waveform.hpp"

namespace pdlink {

// Root-raised-cosine pulse specification. Taps are sampled at sps samples per
// symbol over +-span/2 symbol durations and normalized to unit energy.
struct RrcSpec {
    double beta = 0.01;     // roll-off in [0, 1]
    int span_symbols = 32;  // total span, even
    int sps = 2;            // samples per symbol
};

std::vector<double> rrc_taps(const RrcSpec& spec);

// Zero-padded linear convolution with real taps; group delay (taps odd) is
// removed so output length and alignment match the input.
Waveform fir_filter(const Waveform& w, const std::vector<double>& taps);

// Band-limited rate conversion via spectral resize. The implied output length
// n * new_rate / old_rate must be integral (all chain ratios are rational and
// exact); spectrum is preserved for signals inside the narrower Nyquist band.
Waveform resample(const Waveform& w, double new_rate);

// Multiplies by exp(+j 2 pi offset t). |offset| must stay below Nyquist.
Waveform frequency_shift(const Waveform& w, double offset_hz);

// Symmetric per-rail clipping. The level per rail is rail_rms * 10^(ratio/20),
// matching clipping ratio (dB) = 20 log10(clip_level / RMS). Samples beyond
// +-level are replaced by +-level. clipped_fraction (if given) receives the
// fraction of rail samples that were clipped.
Waveform clip(const Waveform& w, double ratio_db, double* clipped_fraction = nullptr);

// Per-rail range for the mid-rise quantizer, frozen to observed min/max.
struct QuantRange {
    double lo_i = 0, hi_i = 0, lo_q = 0, hi_q = 0;
};
QuantRange quant_range_of(const Waveform& w);

// Mid-rise uniform quantizer with 2^enob levels per rail over the given range
// (input min/max when omitted). Quantizing an already-quantized signal at the
// same range is the identity.
Waveform quantize(const Waveform& w, int enob, const QuantRange* range = nullptr);

// Real-vector variant used for the receiver-side converters.
std::vector<double> quantize_real(const std::vector<double>& x, int enob);

// Power spectrum split at +-bw/2 around DC; used for carrier/signal ratios.
struct BandPower {
    double inside = 0, outside = 0;
};
BandPower band_power_split(const Waveform& w, double bw_hz);

// Brickwall low-pass: zeroes all bins with |f| > cutoff_hz.
Waveform brickwall_lowpass(const Waveform& w, double cutoff_hz);

}  // namespace pdlink
