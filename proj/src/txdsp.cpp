#include "pdlink/txdsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdlink/fft.hpp"
#include "pdlink/qam.hpp"
#include "pdlink/rng.hpp"

namespace pdlink {

std::vector<cplx> QamFrame::symbols() const {
    std::vector<cplx> out;
    out.reserve(size());
    out.insert(out.end(), preamble.begin(), preamble.end());
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t master_seed, std::uint64_t stream) {
    auto rng = make_rng(mix_seed(master_seed, stream));
    std::vector<std::uint8_t> bits(n);
    std::uint64_t word = 0;
    int avail = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (avail == 0) {
            word = rng();
            avail = 64;
        }
        bits[i] = static_cast<std::uint8_t>(word & 1u);
        word >>= 1;
        --avail;
    }
    return bits;
}

std::vector<cplx> make_preamble(std::size_t length, std::uint64_t seed, unsigned band) {
    if (length == 0) throw std::invalid_argument("make_preamble: length must be positive");
    const double amp = 3.0 * std::numbers::sqrt2 / std::sqrt(20.0);
    auto rng = make_rng(mix_seed(seed, stream::scramble + band));
    std::vector<cplx> out(length);
    for (std::size_t n = 0; n < length; ++n) {
        const double phase = -std::numbers::pi * double(n) * double(n) / double(length);
        // Snap the chirp phase onto the QPSK grid, then apply a random
        // quadrant rotation as scrambling.
        const int quad = static_cast<int>(std::floor(phase / (std::numbers::pi / 2.0) + 0.5)) & 3;
        const int scram = static_cast<int>(rng() & 3u);
        const double q = (std::numbers::pi / 2.0) * double((quad + scram) & 3) + std::numbers::pi / 4.0;
        out[n] = amp * cplx(std::cos(q), std::sin(q));
    }
    return out;
}

QamFrame build_frame(const std::vector<std::uint8_t>& payload_bits, std::size_t preamble_length,
                     std::uint64_t seed, unsigned band) {
    if (payload_bits.size() % kQamBitsPerSymbol != 0)
        throw std::invalid_argument("build_frame: bit count must be a multiple of the symbol size");
    QamFrame frame;
    frame.preamble = make_preamble(preamble_length, seed, band);
    frame.payload = map_bits_to_qam(payload_bits);
    frame.payload_bits = payload_bits;
    return frame;
}

void SubcarrierPlan::validate() const {
    if (n_bands < 1) throw std::invalid_argument("subcarrier plan: need at least one band");
    if (symbol_rate_hz <= 0 || out_rate_hz <= 0) throw std::invalid_argument("subcarrier plan: rates must be positive");
    if (guard_hz < 0) throw std::invalid_argument("subcarrier plan: guard must be non-negative");
    if (total_span_hz() > out_rate_hz)
        throw std::invalid_argument("subcarrier plan: band layout exceeds the composite rate");
}

Waveform shape_symbols(const std::vector<cplx>& symbols, const RrcSpec& spec, double symbol_rate_hz) {
    Waveform up;
    up.sample_rate = symbol_rate_hz * spec.sps;
    up.samples.assign(symbols.size() * spec.sps, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < symbols.size(); ++i) up.samples[i * spec.sps] = symbols[i];
    return fir_filter(up, rrc_taps(spec));
}

Waveform shape_and_mux(const std::vector<QamFrame>& frames, const SubcarrierPlan& plan,
                       int rrc_span_symbols) {
    plan.validate();
    if (frames.size() != static_cast<std::size_t>(plan.n_bands))
        throw std::invalid_argument("shape_and_mux: frame count must match the plan");
    for (const auto& f : frames)
        if (f.size() != frames[0].size())
            throw std::invalid_argument("shape_and_mux: all frames must have equal length");

    RrcSpec spec;
    spec.beta = plan.rrc_beta;
    spec.span_symbols = rrc_span_symbols;
    spec.sps = 2;
    Waveform composite;
    for (int b = 0; b < plan.n_bands; ++b) {
        Waveform shaped = shape_symbols(frames[b].symbols(), spec, plan.symbol_rate_hz);
        Waveform at_rate = resample(shaped, plan.out_rate_hz);
        Waveform shifted = frequency_shift(at_rate, plan.center_hz(b));
        if (b == 0) {
            composite = std::move(shifted);
        } else {
            for (std::size_t i = 0; i < composite.size(); ++i) composite.samples[i] += shifted.samples[i];
        }
    }
    const double p = mean_power(composite.samples);
    if (p <= 0.0) throw std::runtime_error("shape_and_mux: composite has no power");
    const double scale = 1.0 / std::sqrt(p);
    for (auto& v : composite.samples) v *= scale;
    return composite;
}

double TxResponse::amplitude(double f_hz) const {
    const double x = f_hz / bw_hz;
    return std::exp(-0.5 * std::numbers::ln2 * std::pow(x * x, order));
}

Waveform apply_response(const Waveform& w, const TxResponse& resp) {
    const std::size_t n = w.size();
    if (n == 0) return w;
    auto spec = w.samples;
    fft_forward(spec);
    for (std::size_t k = 0; k < n; ++k) spec[k] *= resp.amplitude(bin_freq(k, n, w.sample_rate));
    fft_inverse(spec);
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples = std::move(spec);
    return out;
}

Waveform pre_emphasis(const Waveform& w, const TxResponse& resp, double max_boost_db) {
    const std::size_t n = w.size();
    if (n == 0) return w;
    const double max_gain = db_to_lin(max_boost_db / 2.0);  // amplitude cap from a power ratio
    auto spec = w.samples;
    fft_forward(spec);
    for (std::size_t k = 0; k < n; ++k) {
        const double h = resp.amplitude(bin_freq(k, n, w.sample_rate));
        const double gain = std::min(1.0 / h, max_gain);
        spec[k] *= gain;
    }
    fft_inverse(spec);
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples = std::move(spec);
    return out;
}

}  // namespace pdlink
