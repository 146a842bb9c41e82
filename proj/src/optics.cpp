#include "pdlink/optics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pdlink/fft.hpp"
#include "pdlink/rng.hpp"
#include "pdlink/sigproc.hpp"

namespace pdlink {

Waveform laser_field(const LaserParams& p, std::size_t n, double sample_rate, std::uint64_t seed) {
    if (sample_rate <= 0.0) throw std::invalid_argument("laser_field: sample rate must be positive");
    const double amp = std::sqrt(dbm_to_watt(p.power_dbm));
    const double phase_step_std = std::sqrt(2.0 * std::numbers::pi * p.linewidth_hz / sample_rate);
    // RIN is the one-sided PSD of dP/P; integrated over the simulation
    // bandwidth it gives the variance of the relative power fluctuation.
    const double rel_power_std = std::sqrt(db_to_lin(p.rin_db_per_hz) * 0.5 * sample_rate);

    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Waveform out;
    out.sample_rate = sample_rate;
    out.samples.resize(n);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        phase += phase_step_std * gauss(rng);
        const double rel = 1.0 + 0.5 * rel_power_std * gauss(rng);
        out.samples[i] = amp * rel * cplx(std::cos(phase), std::sin(phase));
    }
    return out;
}

namespace {

inline void coupler_weights(double g, double& w, double& wbar) {
    w = std::sqrt(g / (1.0 + g));
    wbar = std::sqrt(1.0 / (1.0 + g));
}

}  // namespace

Waveform iq_modulate(const Waveform& laser, const std::vector<double>& v_i_total,
                     const std::vector<double>& v_q_total, const ModulatorParams& m) {
    if (laser.size() != v_i_total.size() || laser.size() != v_q_total.size())
        throw std::invalid_argument("iq_modulate: drive and field lengths differ");
    for (double vpi : {m.v_pi_i, m.v_pi_q, m.v_pi_p})
        if (vpi <= 0.0) throw std::invalid_argument("iq_modulate: v_pi must be positive");

    double w_i, wbar_i, w_q, wbar_q, w_p, wbar_p;
    coupler_weights(m.imbalance.g_i, w_i, wbar_i);
    coupler_weights(m.imbalance.g_q, w_q, wbar_q);
    coupler_weights(m.imbalance.g_p, w_p, wbar_p);

    const double psi = std::numbers::pi * m.v_p / (2.0 * m.v_pi_p);
    const cplx rot_i = cplx(std::cos(psi), -std::sin(psi));
    const cplx rot_q = std::conj(rot_i);

    Waveform out;
    out.sample_rate = laser.sample_rate;
    out.samples.resize(laser.size());
    for (std::size_t n = 0; n < laser.size(); ++n) {
        const double phi_i = std::numbers::pi * v_i_total[n] / m.v_pi_i;
        const double phi_q = std::numbers::pi * v_q_total[n] / m.v_pi_q;
        const cplx e_i = cplx(std::cos(phi_i), std::sin(phi_i));
        const cplx e_q = cplx(std::cos(phi_q), std::sin(phi_q));
        const cplx f_i = w_i * e_i + wbar_i * std::conj(e_i);
        const cplx f_q = w_q * e_q + wbar_q * std::conj(e_q);
        out.samples[n] = 0.5 * laser.samples[n] * (w_p * f_i * rot_i + wbar_p * f_q * rot_q);
    }
    return out;
}

double measure_cspr(const Waveform& field, double carrier_bw_hz) {
    const BandPower p = band_power_split(field, carrier_bw_hz);
    if (p.outside <= 0.0) return std::numeric_limits<double>::infinity();
    if (p.inside <= 0.0) return -std::numeric_limits<double>::infinity();
    return lin_to_db(p.inside / p.outside);
}

double FiberParams::beta2_s2_per_m() const {
    const double c = 299792458.0;
    const double lambda_m = wavelength_nm * 1e-9;
    const double d_s_per_m2 = dispersion_ps_nm_km * 1e-6;
    return -d_s_per_m2 * lambda_m * lambda_m / (2.0 * std::numbers::pi * c);
}

Waveform fiber_propagate(const Waveform& field, const FiberParams& f) {
    if (f.length_km < 0.0) throw std::invalid_argument("fiber_propagate: length must be non-negative");
    const std::size_t n = field.size();
    Waveform out;
    out.sample_rate = field.sample_rate;
    if (n == 0) return out;

    const double length_m = f.length_km * 1e3;
    const double beta2 = f.beta2_s2_per_m();
    const double amp = db_to_lin(-f.loss_db_per_km * f.length_km / 2.0);
    auto spec = field.samples;
    fft_forward(spec);
    for (std::size_t k = 0; k < n; ++k) {
        const double omega = 2.0 * std::numbers::pi * bin_freq(k, n, field.sample_rate);
        const double phase = 0.5 * beta2 * omega * omega * length_m;
        spec[k] *= amp * cplx(std::cos(phase), std::sin(phase));
    }
    fft_inverse(spec);
    out.samples = std::move(spec);
    return out;
}

Waveform set_rop(const Waveform& field, double rop_dbm) {
    const double p = mean_power(field.samples);
    if (p <= 0.0) throw std::invalid_argument("set_rop: field has no power");
    const double scale = std::sqrt(dbm_to_watt(rop_dbm) / p);
    Waveform out = field;
    for (auto& v : out.samples) v *= scale;
    return out;
}

double PdParams::noise_variance(double sample_rate) const {
    const double psd = thermal_pa_per_rt_hz * 1e-12;
    return psd * psd * 0.5 * sample_rate;
}

std::vector<double> photodiode(const Waveform& field, const PdParams& p, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(p.noise_variance(field.sample_rate)));
    std::vector<double> current(field.size());
    for (std::size_t n = 0; n < field.size(); ++n) {
        const double power = std::norm(field.samples[n]);
        current[n] = p.responsivity_a_per_w * power + p.dark_current_a + gauss(rng);
    }
    return current;
}

}  // namespace pdlink
