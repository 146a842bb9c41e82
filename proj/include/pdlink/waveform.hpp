#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pdlink {

using cplx = std::complex<double>;

// Complex baseband waveform on a uniform time grid.
struct Waveform {
    std::vector<cplx> samples;
    double sample_rate = 0.0;  // Hz

    Waveform() = default;
    Waveform(std::vector<cplx> s, double rate) : samples(std::move(s)), sample_rate(rate) {}

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const { return sample_rate > 0.0 ? double(samples.size()) / sample_rate : 0.0; }
};

inline double mean_power(const std::vector<cplx>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return acc / double(x.size());
}

inline double mean_power(const Waveform& w) { return mean_power(w.samples); }

inline cplx mean(const std::vector<cplx>& x) {
    if (x.empty()) return {0.0, 0.0};
    cplx acc{0.0, 0.0};
    for (const auto& v : x) acc += v;
    return acc / double(x.size());
}

inline double mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / double(x.size());
}

inline double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / double(x.size()));
}

inline bool all_finite(const std::vector<cplx>& x) {
    for (const auto& v : x)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

inline bool all_finite(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

// dB / dBm conversions (power quantities).
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

}  // namespace pdlink
