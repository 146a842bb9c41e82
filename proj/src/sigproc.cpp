#include "pdlink/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdlink/fft.hpp"

namespace pdlink {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<double> rrc_taps(const RrcSpec& spec) {
    if (spec.beta < 0.0 || spec.beta > 1.0) throw std::invalid_argument("rrc beta outside [0,1]");
    if (spec.span_symbols <= 0 || spec.span_symbols % 2 != 0)
        throw std::invalid_argument("rrc span must be positive and even");
    if (spec.sps < 1) throw std::invalid_argument("rrc sps must be >= 1");

    const int n = spec.span_symbols * spec.sps + 1;
    const int mid = (n - 1) / 2;
    const double b = spec.beta;
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) {
        const double t = double(i - mid) / double(spec.sps);  // in symbol durations
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 + b * (4.0 / kPi - 1.0);
        } else if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
            const double a = kPi / (4.0 * b);
            v = (b / std::sqrt(2.0)) *
                ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
        } else {
            const double num = std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b));
            const double den = kPi * t * (1.0 - (4.0 * b * t) * (4.0 * b * t));
            v = num / den;
        }
        h[i] = v;
    }
    double energy = 0.0;
    for (double v : h) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= scale;
    return h;
}

Waveform fir_filter(const Waveform& w, const std::vector<double>& taps) {
    if (taps.empty()) throw std::invalid_argument("fir_filter: empty taps");
    if (w.empty()) return w;
    const std::size_t n = w.size();
    const std::size_t t = taps.size();
    const std::size_t full = n + t - 1;
    const std::size_t m = next_pow2(full);

    std::vector<cplx> x(m, cplx{0.0, 0.0});
    std::copy(w.samples.begin(), w.samples.end(), x.begin());
    std::vector<cplx> hh(m, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < t; ++i) hh[i] = cplx(taps[i], 0.0);

    fft_forward(x);
    fft_forward(hh);
    for (std::size_t i = 0; i < m; ++i) x[i] *= hh[i];
    fft_inverse(x);

    const std::size_t delay = (t - 1) / 2;
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples.assign(x.begin() + long(delay), x.begin() + long(delay + n));
    return out;
}

Waveform resample(const Waveform& w, double new_rate) {
    if (new_rate <= 0.0) throw std::invalid_argument("resample: new_rate must be positive");
    if (w.sample_rate <= 0.0) throw std::invalid_argument("resample: input rate unset");
    Waveform out;
    out.sample_rate = new_rate;
    if (w.empty()) return out;
    if (new_rate == w.sample_rate) {
        out.samples = w.samples;
        return out;
    }
    const std::size_t n = w.size();
    const long double ratio = (long double)new_rate / (long double)w.sample_rate;
    const long double mf = ratio * (long double)n;
    const std::size_t m = std::size_t(llroundl(mf));
    if (m == 0) throw std::invalid_argument("resample: output would be empty");
    if (std::abs((long double)m - mf) > 1e-6L)
        throw std::invalid_argument("resample: rate change must map the block to an integer sample count");

    std::vector<cplx> X = w.samples;
    fft_forward(X);
    std::vector<cplx> Y(m, cplx{0.0, 0.0});
    const std::size_t keep = std::min(n, m);
    const std::size_t pos = (keep - 1) / 2;  // strictly positive bins to copy
    Y[0] = X[0];
    for (std::size_t k = 1; k <= pos; ++k) {
        Y[k] = X[k];
        Y[m - k] = X[n - k];
    }
    if (keep % 2 == 0) {
        const std::size_t kn = keep / 2;
        if (m > n) {
            // upsample: the shared Nyquist bin splits across +-kn
            Y[kn] = X[kn] * 0.5;
            Y[m - kn] = X[kn] * 0.5;
        } else {
            // downsample: +-kn of the source fold onto the target Nyquist bin
            Y[kn] = X[kn] + X[n - kn];
        }
    }
    const double scale = double(m) / double(n);
    for (auto& v : Y) v *= scale;
    fft_inverse(Y);
    out.samples = std::move(Y);
    return out;
}

Waveform frequency_shift(const Waveform& w, double offset_hz) {
    if (w.sample_rate <= 0.0) throw std::invalid_argument("frequency_shift: input rate unset");
    if (std::abs(offset_hz) >= w.sample_rate / 2.0)
        throw std::invalid_argument("frequency_shift: offset at or beyond Nyquist");
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples.resize(w.size());
    // Snap the offset to an integer number of cycles over the record so the
    // shifted waveform stays circular; the grid is rate/n, a few MHz at
    // realistic record lengths.
    double offset = offset_hz;
    if (!w.empty()) offset = std::round(offset_hz * double(w.size()) / w.sample_rate) * w.sample_rate / double(w.size());
    const double step = 2.0 * kPi * offset / w.sample_rate;
    // Block-wise phase recurrence with periodic exact refresh keeps the cost
    // at one sin/cos pair per 1k samples without accumulating rounding drift.
    const std::size_t block = 1024;
    for (std::size_t start = 0; start < w.size(); start += block) {
        const std::size_t end = std::min(w.size(), start + block);
        cplx ph = std::polar(1.0, step * double(start));
        const cplx rot = std::polar(1.0, step);
        for (std::size_t i = start; i < end; ++i) {
            out.samples[i] = w.samples[i] * ph;
            ph *= rot;
        }
    }
    return out;
}

Waveform clip(const Waveform& w, double ratio_db, double* clipped_fraction) {
    Waveform out = w;
    if (w.empty()) {
        if (clipped_fraction) *clipped_fraction = 0.0;
        return out;
    }
    double acc_i = 0.0, acc_q = 0.0;
    for (const auto& v : w.samples) {
        acc_i += v.real() * v.real();
        acc_q += v.imag() * v.imag();
    }
    const double n = double(w.size());
    const double lin = std::pow(10.0, ratio_db / 20.0);
    const double lvl_i = std::sqrt(acc_i / n) * lin;
    const double lvl_q = std::sqrt(acc_q / n) * lin;
    std::size_t clipped = 0;
    for (auto& v : out.samples) {
        double re = v.real(), im = v.imag();
        if (lvl_i > 0.0 && std::abs(re) > lvl_i) {
            re = std::copysign(lvl_i, re);
            ++clipped;
        }
        if (lvl_q > 0.0 && std::abs(im) > lvl_q) {
            im = std::copysign(lvl_q, im);
            ++clipped;
        }
        v = cplx(re, im);
    }
    if (clipped_fraction) *clipped_fraction = double(clipped) / (2.0 * n);
    return out;
}

QuantRange quant_range_of(const Waveform& w) {
    QuantRange r;
    if (w.empty()) return r;
    r.lo_i = r.hi_i = w.samples[0].real();
    r.lo_q = r.hi_q = w.samples[0].imag();
    for (const auto& v : w.samples) {
        r.lo_i = std::min(r.lo_i, v.real());
        r.hi_i = std::max(r.hi_i, v.real());
        r.lo_q = std::min(r.lo_q, v.imag());
        r.hi_q = std::max(r.hi_q, v.imag());
    }
    return r;
}

namespace {
double quantize_scalar(double x, double lo, double hi, long levels) {
    if (hi <= lo) return lo;  // degenerate rail: constant input
    const double step = (hi - lo) / double(levels);
    long idx = long(std::floor((x - lo) / step));
    idx = std::clamp(idx, 0L, levels - 1);
    return lo + (double(idx) + 0.5) * step;
}
}  // namespace

Waveform quantize(const Waveform& w, int enob, const QuantRange* range) {
    if (enob < 1 || enob > 16) throw std::invalid_argument("quantize: enob outside [1,16]");
    QuantRange r = range ? *range : quant_range_of(w);
    const long levels = 1L << enob;
    Waveform out = w;
    for (auto& v : out.samples)
        v = cplx(quantize_scalar(v.real(), r.lo_i, r.hi_i, levels),
                 quantize_scalar(v.imag(), r.lo_q, r.hi_q, levels));
    return out;
}

std::vector<double> quantize_real(const std::vector<double>& x, int enob) {
    if (enob < 1 || enob > 16) throw std::invalid_argument("quantize: enob outside [1,16]");
    if (x.empty()) return x;
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it, hi = *hi_it;
    const long levels = 1L << enob;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = quantize_scalar(x[i], lo, hi, levels);
    return out;
}

BandPower band_power_split(const Waveform& w, double bw_hz) {
    if (w.sample_rate <= 0.0) throw std::invalid_argument("band_power_split: input rate unset");
    if (bw_hz <= 0.0) throw std::invalid_argument("band_power_split: bandwidth must be positive");
    std::vector<cplx> X = w.samples;
    fft_forward(X);
    BandPower bp;
    const std::size_t n = X.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double f = bin_freq(k, n, w.sample_rate);
        const double p = std::norm(X[k]);
        if (std::abs(f) <= bw_hz / 2.0)
            bp.inside += p;
        else
            bp.outside += p;
    }
    const double scale = 1.0 / double(n == 0 ? 1 : n);
    bp.inside *= scale;
    bp.outside *= scale;
    return bp;
}

Waveform brickwall_lowpass(const Waveform& w, double cutoff_hz) {
    if (w.sample_rate <= 0.0) throw std::invalid_argument("brickwall_lowpass: input rate unset");
    if (cutoff_hz <= 0.0) throw std::invalid_argument("brickwall_lowpass: cutoff must be positive");
    Waveform out;
    out.sample_rate = w.sample_rate;
    std::vector<cplx> X = w.samples;
    fft_forward(X);
    const std::size_t n = X.size();
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(bin_freq(k, n, w.sample_rate)) > cutoff_hz) X[k] = cplx{0.0, 0.0};
    fft_inverse(X);
    out.samples = std::move(X);
    return out;
}

}  // namespace pdlink
