#include "pdlink/receiver.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdlink/fft.hpp"
#include "pdlink/rng.hpp"
#include "pdlink/sigproc.hpp"

namespace pdlink {

BranchFields split_and_shift(const Waveform& field, const ReceiverParams& r) {
    if (r.theta <= 0.0 || r.theta >= std::numbers::pi)
        throw std::invalid_argument("split_and_shift: theta must lie in (0, pi)");
    if (r.carrier_filter_bw_hz <= 0.0)
        throw std::invalid_argument("split_and_shift: carrier filter width must be positive");

    const double shift1 = r.theta + r.delta_theta + r.delta_theta_1;
    const double shift3 = -(r.theta + r.delta_theta + r.delta_theta_2);
    const std::size_t n = field.size();
    auto spec = field.samples;
    fft_forward(spec);

    BranchFields out;
    for (int b = 0; b < 3; ++b) {
        const double shift = (b == 0) ? shift1 : (b == 2) ? shift3 : 0.0;
        const cplx rot(std::cos(shift), std::sin(shift));
        auto branch_spec = spec;
        for (std::size_t k = 0; k < n; ++k) {
            const bool carrier = std::abs(bin_freq(k, n, field.sample_rate)) <= 0.5 * r.carrier_filter_bw_hz;
            branch_spec[k] *= r.split_scale * (carrier ? rot : cplx(1.0, 0.0));
        }
        fft_inverse(branch_spec);
        out.field[b].sample_rate = field.sample_rate;
        out.field[b].samples = std::move(branch_spec);
    }
    return out;
}

BranchCurrents detect_branches(const BranchFields& b, const PdParams& pd, std::uint64_t seed) {
    if (b.field[0].size() != b.field[1].size() || b.field[0].size() != b.field[2].size())
        throw std::invalid_argument("detect_branches: branch lengths differ");
    BranchCurrents out;
    out.sample_rate = b.field[0].sample_rate;
    for (int k = 0; k < 3; ++k)
        out.i[k] = photodiode(b.field[k], pd, mix_seed(seed, stream::pd + std::uint64_t(k)));
    return out;
}

Waveform reconstruct(const BranchCurrents& b, double c_amp, double theta) {
    const double den_i = std::cos(theta) - 1.0;
    const double den_q = std::sin(theta);
    if (c_amp <= 0.0) throw std::invalid_argument("reconstruct: carrier amplitude must be positive");
    if (std::abs(den_i) < 1e-12 || std::abs(den_q) < 1e-12)
        throw std::invalid_argument("reconstruct: theta at a reconstruction singularity (0 or pi)");
    if (b.i[0].size() != b.i[1].size() || b.i[0].size() != b.i[2].size())
        throw std::invalid_argument("reconstruct: branch lengths differ");

    const std::size_t n = b.i[0].size();
    const double m1 = n ? mean(b.i[0]) : 0.0;
    const double m2 = n ? mean(b.i[1]) : 0.0;
    const double m3 = n ? mean(b.i[2]) : 0.0;
    const double ki = 1.0 / (4.0 * c_amp * den_i);
    const double kq = 1.0 / (4.0 * c_amp * den_q);

    Waveform out;
    out.sample_rate = b.sample_rate;
    out.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double i1 = b.i[0][k] - m1;
        const double i2 = b.i[1][k] - m2;
        const double i3 = b.i[2][k] - m3;
        out.samples[k] = cplx((i1 + i3 - 2.0 * i2) * ki, (i1 - i3) * kq);
    }
    return out;
}

double reconstructed_noise_var_i(double theta, double c_amp, double delta2) {
    const double den = std::cos(theta) - 1.0;
    return 3.0 * delta2 / (8.0 * c_amp * c_amp * den * den);
}

double reconstructed_noise_var_q(double theta, double c_amp, double delta2) {
    const double s = std::sin(theta);
    return delta2 / (8.0 * c_amp * c_amp * s * s);
}

QuadratureSnr theoretical_snr(double p_s, double c_amp, double delta, double theta) {
    if (delta <= 0.0) throw std::invalid_argument("theoretical_snr: delta must be positive");
    const double den = std::cos(theta) - 1.0;
    const double s = std::sin(theta);
    QuadratureSnr out;
    out.snr_i = 4.0 * p_s * c_amp * c_amp * den * den / (3.0 * delta * delta);
    out.snr_q = 4.0 * p_s * c_amp * c_amp * s * s / (delta * delta);
    return out;
}

double balance_residual(double theta) {
    const double s = std::sin(theta);
    const double d = std::cos(theta) - 1.0;
    return 3.0 * s * s - d * d;
}

double optimal_theta() {
    // balance_residual is positive just above 0 and negative at pi; bisect
    // the single sign change.
    double lo = 1e-9;
    double hi = std::numbers::pi - 1e-9;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (balance_residual(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double estimate_carrier_scale(const BranchCurrents& b, const std::vector<cplx>& reference,
                              double theta) {
    if (reference.empty() || mean_power(reference) <= 0.0)
        throw std::invalid_argument("estimate_carrier_scale: reference window has no energy");
    if (reference.size() > b.size())
        throw std::invalid_argument("estimate_carrier_scale: reference longer than the record");

    const Waveform r = reconstruct(b, 1.0, theta);
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        num += std::conj(reference[k]) * r.samples[k];
        den += std::norm(reference[k]);
    }
    return std::abs(num) / den;
}

}  // namespace pdlink
