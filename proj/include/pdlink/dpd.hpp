#pragma once

#include <vector>

#include "pdlink/waveform.hpp"

namespace pdlink {

// Field-amplitude imbalance g in (0, 1] of a 2x2 coupler pair; g = 1 is
// ideal. Related to the extinction ratio of the embedding interferometer by
// ER = ((1 + g)/(1 - g))^2.
double er_db_to_imbalance(double er_db);
double imbalance_to_er_db(double g);

struct ImbalanceSet {
    double g_i = 1.0;  // in-phase child interferometer
    double g_q = 1.0;  // quadrature child interferometer
    double g_p = 1.0;  // parent combiner
};

// Closed-form predistortion coefficients. theta_i and theta_q are the
// normalized arm targets:
//   theta_i = a_i s_i + b_i s_q^2 + d_i s_q + c_i
//   theta_q = a_q s_q + b_q s_i^2 + d_q s_i + c_q
// The cross terms (b, d) cancel the quadrature leakage that a finite
// extinction ratio injects from the opposite rail; c recenters the residual
// carrier component. All ideal couplers give a = 1, b = c = d = 0.
struct DpdCoefficients {
    double a_i = 1.0, b_i = 0.0, c_i = 0.0, d_i = 0.0;
    double a_q = 1.0, b_q = 0.0, c_q = 0.0, d_q = 0.0;
};

DpdCoefficients compute_dpd_coefficients(const ImbalanceSet& g);

struct DriveSignals {
    std::vector<double> v_i;
    std::vector<double> v_q;
    // Fraction of rail samples whose arm target exceeded |theta| = 1 and was
    // clamped before the arcsine mapping.
    double saturation_fraction = 0.0;
};

// Maps symbols-domain samples to DAC voltages through the predistorter and
// the arcsine drive transfer. The modulator later adds v_bias back, so the
// emitted voltages are centered near -v_pi/2 - v_bias.
DriveSignals predistort(const std::vector<cplx>& s, const DpdCoefficients& k, double v_pi_i,
                        double v_pi_q, double v_bias_i, double v_bias_q);

// Plain linear drive (predistortion off): each rail swings v_pi/2 around the
// transmission null, reproducing the usual sine compression.
DriveSignals linear_drive(const std::vector<cplx>& s, double v_pi_i, double v_pi_q,
                          double v_bias_i, double v_bias_q);

enum class OffsetMode {
    literal,  // v - alpha * |mean(v)|: a fixed shift away from the null
    mean,     // v - alpha * mean(v): proportional pull toward zero
};

// Applies the drive offset correction in place and returns the constant that
// was subtracted. alpha = 0 leaves the signal untouched.
double offset_correct(std::vector<double>& v, double alpha, OffsetMode mode);

}  // namespace pdlink
