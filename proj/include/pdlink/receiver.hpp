#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pdlink/optics.hpp"
#include "pdlink/waveform.hpp"

namespace pdlink {

struct ReceiverParams {
    double theta = 2.0943951023931953;  // 2 pi / 3, the balanced operating point
    double delta_theta = 0.0;           // deviation common to both shifted branches
    double delta_theta_1 = 0.0;         // extra deviation of branch 1
    double delta_theta_2 = 0.0;         // extra deviation of branch 3
    double carrier_filter_bw_hz = 1e9;  // width of the carrier-only phase-shift mask
    double split_scale = 0.5773502691896258;  // per-branch amplitude of the 3-way split
};

struct BranchFields {
    std::array<Waveform, 3> field;
};

// 3-way split where branches 1 and 3 phase-shift only the spectral content
// within +-carrier_filter_bw/2 of DC, by +(theta + dtheta + dtheta1) and
// -(theta + dtheta + dtheta2). The modulated sidebands pass unchanged, so an
// isolated carrier C and signal s become C e^{j theta'} + s, C + s,
// C e^{-j theta''} + s.
BranchFields split_and_shift(const Waveform& field, const ReceiverParams& r);

struct BranchCurrents {
    std::array<std::vector<double>, 3> i;
    double sample_rate = 0.0;

    std::size_t size() const { return i[0].size(); }
};

// Three independent photodiodes with seeds derived from (seed, branch).
BranchCurrents detect_branches(const BranchFields& b, const PdParams& pd, std::uint64_t seed);

// Analytic SSBI-free recovery:
//   s_i = (i1 + i3 - 2 i2) / (4 c (cos theta - 1))
//   s_q = (i1 - i3) / (4 c sin theta)
// Both combinations have zero-sum coefficients, so per-branch DC (dark
// current, |C|^2, |s|^2 common terms) cancels structurally. Each branch is
// additionally mean-subtracted first to guard against gain mismatch.
Waveform reconstruct(const BranchCurrents& b, double c_amp, double theta);

// Thermal-noise variances of the two reconstructed quadratures when each
// branch carries i.i.d. noise of variance delta^2.
double reconstructed_noise_var_i(double theta, double c_amp, double delta2);
double reconstructed_noise_var_q(double theta, double c_amp, double delta2);

struct QuadratureSnr {
    double snr_i = 0.0;
    double snr_q = 0.0;
};

// Post-reconstruction SNR of each quadrature for total signal power p_s
// (split evenly between quadratures), carrier amplitude c and per-branch
// noise delta: snr_x = (p_s / 2) / reconstructed_noise_var_x.
QuadratureSnr theoretical_snr(double p_s, double c_amp, double delta, double theta);

// Residual of the quadrature SNR balance condition, zero where
// snr_i == snr_q.
double balance_residual(double theta);

// Unique root of balance_residual in (0, pi): 2 pi / 3.
double optimal_theta();

// Least-squares magnitude fit of reconstruct(b, 1, theta) against a known
// reference over the first reference.size() samples. The phase of the same
// fit belongs to the downstream constant rotation.
double estimate_carrier_scale(const BranchCurrents& b, const std::vector<cplx>& reference,
                              double theta);

}  // namespace pdlink
