#pragma once

#include <cstdint>
#include <vector>

#include "pdlink/dpd.hpp"
#include "pdlink/waveform.hpp"

namespace pdlink {

struct LaserParams {
    double power_dbm = 16.0;
    double linewidth_hz = 100e3;   // Lorentzian FWHM of the Wiener phase walk
    double rin_db_per_hz = -150.0;
};

// Baseband-equivalent CW field with phase noise and RIN, mean power
// dbm_to_watt(power_dbm). Deterministic in (params, n, rate, seed).
Waveform laser_field(const LaserParams& p, std::size_t n, double sample_rate, std::uint64_t seed);

struct ModulatorParams {
    double v_pi_i = 4.0;
    double v_pi_q = 4.0;
    double v_pi_p = 4.0;
    double v_bias_i = 2.0;  // added on top of the DAC drive, per rail
    double v_bias_q = 2.0;
    double v_p = 2.0;       // parent phase-section drive; v_pi_p / 2 puts the rails in quadrature
    ImbalanceSet imbalance;
};

// Dual-nested Mach-Zehnder with finite-extinction couplers. v_i_total and
// v_q_total are the rail voltages including bias; each child interferometer
// contributes w e^{j phi} + wbar e^{-j phi} with phi = pi v / v_pi and
// w = sqrt(g/(1+g)), wbar = sqrt(1/(1+g)). The parent combines the children
// with +-pi v_p / (2 v_pi_p) phase offsets. Normalization keeps the device
// passive for every imbalance value.
Waveform iq_modulate(const Waveform& laser, const std::vector<double>& v_i_total,
                     const std::vector<double>& v_q_total, const ModulatorParams& m);

// Carrier-to-signal power ratio in dB: power within +-carrier_bw/2 of DC
// against everything outside. Returns +inf for an unmodulated line.
double measure_cspr(const Waveform& field, double carrier_bw_hz);

struct FiberParams {
    double length_km = 100.0;
    double loss_db_per_km = 0.2;
    double dispersion_ps_nm_km = 17.0;
    double wavelength_nm = 1550.0;

    double beta2_s2_per_m() const;
};

// Single-mode fiber: frequency-domain quadratic phase (circular convolution)
// plus scalar loss.
Waveform fiber_propagate(const Waveform& field, const FiberParams& f);

// Rescales the field so its mean power equals the requested received optical
// power.
Waveform set_rop(const Waveform& field, double rop_dbm);

struct PdParams {
    double responsivity_a_per_w = 0.8;
    double dark_current_a = 5e-9;
    double thermal_pa_per_rt_hz = 10.0;  // input-referred current noise density, pA/sqrt(Hz)

    double noise_variance(double sample_rate) const;
};

// Square-law detection: R |e|^2 + dark current + thermal Gaussian noise with
// variance psd^2 * rate / 2.
std::vector<double> photodiode(const Waveform& field, const PdParams& p, std::uint64_t seed);

}  // namespace pdlink
