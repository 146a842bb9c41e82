#pragma once

#include <cstdint>
#include <vector>

#include "pdlink/sigproc.hpp"
#include "pdlink/waveform.hpp"

namespace pdlink {

// One subcarrier's symbol stream: sync preamble followed by payload.
struct QamFrame {
    std::vector<cplx> preamble;
    std::vector<cplx> payload;
    std::vector<std::uint8_t> payload_bits;

    std::vector<cplx> symbols() const;
    std::size_t size() const { return preamble.size() + payload.size(); }
};

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t master_seed, std::uint64_t stream);

// Constant-amplitude preamble: a Zadoff-Chu phase ramp quantized onto the
// constellation's QPSK ring (+-3 +-3j points), then scrambled by a seeded
// QPSK sequence so different bands stay uncorrelated. Deterministic in
// (seed, band, length).
std::vector<cplx> make_preamble(std::size_t length, std::uint64_t seed, unsigned band);

QamFrame build_frame(const std::vector<std::uint8_t>& payload_bits, std::size_t preamble_length,
                     std::uint64_t seed, unsigned band);

// Subcarrier multiplex layout. Band centers are spaced by occupied + guard
// and placed symmetrically around DC: for two bands at 40 GBd, beta 0.01 and
// a 4 GHz guard the centers sit at +-22.2 GHz.
struct SubcarrierPlan {
    int n_bands = 2;
    double symbol_rate_hz = 40e9;
    double rrc_beta = 0.01;
    double guard_hz = 4e9;
    double out_rate_hz = 160e9;

    double occupied_hz() const { return symbol_rate_hz * (1.0 + rrc_beta); }
    double center_hz(int band) const {
        return (double(band) - 0.5 * double(n_bands - 1)) * (occupied_hz() + guard_hz);
    }
    double total_span_hz() const {
        return double(n_bands) * occupied_hz() + double(n_bands - 1) * guard_hz;
    }
    void validate() const;
};

// Upsamples symbols to spec.sps and applies the RRC shaping filter. Output
// rate is sps * symbol_rate.
Waveform shape_symbols(const std::vector<cplx>& symbols, const RrcSpec& spec, double symbol_rate_hz);

// Shapes every frame at 2 samples/symbol, resamples to the composite rate,
// shifts each band to its center and sums. The composite is normalized to
// unit RMS power. rrc_span_symbols must match the receive matched filter.
Waveform shape_and_mux(const std::vector<QamFrame>& frames, const SubcarrierPlan& plan,
                       int rrc_span_symbols = 32);

// Parametric stand-in for the analog transmitter chain: order-n Gaussian
// low-pass, |H(f)|^2 = exp(-ln2 (f/bw)^(2 order)), so bw is the 3 dB point.
struct TxResponse {
    double bw_hz = 35e9;
    int order = 5;

    double amplitude(double f_hz) const;
};

Waveform apply_response(const Waveform& w, const TxResponse& resp);

// Zero-forcing pre-emphasis against resp, with the boost capped at
// max_boost_db so out-of-band bins are not amplified without bound.
Waveform pre_emphasis(const Waveform& w, const TxResponse& resp, double max_boost_db);

}  // namespace pdlink
