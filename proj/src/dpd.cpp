#include "pdlink/dpd.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pdlink {

double er_db_to_imbalance(double er_db) {
    if (er_db <= 0.0) throw std::invalid_argument("er_db_to_imbalance: extinction ratio must be > 0 dB");
    const double root = std::sqrt(db_to_lin(er_db));
    return (root - 1.0) / (root + 1.0);
}

double imbalance_to_er_db(double g) {
    if (g <= 0.0 || g > 1.0) throw std::invalid_argument("imbalance_to_er_db: g must lie in (0, 1]");
    if (g == 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * lin_to_db((1.0 + g) / (1.0 - g));
}

DpdCoefficients compute_dpd_coefficients(const ImbalanceSet& g) {
    for (double v : {g.g_i, g.g_q, g.g_p})
        if (v <= 0.0 || v > 1.0) throw std::invalid_argument("compute_dpd_coefficients: g must lie in (0, 1]");

    const double si = std::sqrt(g.g_i);
    const double sq = std::sqrt(g.g_q);
    const double sp = std::sqrt(g.g_p);
    const double npi = std::sqrt((1.0 + g.g_p) * (1.0 + g.g_i));
    const double npq = std::sqrt((1.0 + g.g_p) * (1.0 + g.g_q));

    DpdCoefficients k;
    k.a_i = npi / (sp * (1.0 + si));
    k.a_q = npq / (1.0 + sq);

    // Each child interferometer leaks a sqrt(1 - theta^2) term from the
    // opposite quadrature.  lam_* is the leak amplitude relative to the
    // in-quadrature linear gain; expanding the square root around the
    // recentring constant c (not around zero) kills the leak to first
    // order for any imbalance, leaving only O(drive^2) residue.
    const double lam_i = k.a_i * (1.0 - sq) / npq;
    const double lam_q = k.a_q * sp * (1.0 - si) / npi;

    // Recentring constants: fixed point of c_i = lam_i*sqrt(1-c_q^2),
    // c_q = -lam_q*sqrt(1-c_i^2).  The map is a contraction for g in (0,1].
    double ci = lam_i;
    double cq = -lam_q;
    for (int it = 0; it < 200; ++it) {
        const double ni = lam_i * std::sqrt(1.0 - cq * cq);
        const double nq = -lam_q * std::sqrt(1.0 - ci * ci);
        const double delta = std::abs(ni - ci) + std::abs(nq - cq);
        ci = ni;
        cq = nq;
        if (delta < 1e-16) break;
    }
    const double u0i = std::sqrt(1.0 - ci * ci);
    const double u0q = std::sqrt(1.0 - cq * cq);

    k.c_i = ci;
    k.c_q = cq;
    k.b_i = -lam_i * k.a_q * k.a_q / (2.0 * u0q * u0q * u0q);
    k.d_i = -lam_i * k.a_q * cq / u0q;
    k.b_q = lam_q * k.a_i * k.a_i / (2.0 * u0i * u0i * u0i);
    k.d_q = lam_q * k.a_i * ci / u0i;
    return k;
}

namespace {

double theta_to_voltage(double theta, double v_pi, double v_bias, std::size_t& clamped) {
    if (theta > 1.0) {
        theta = 1.0;
        ++clamped;
    } else if (theta < -1.0) {
        theta = -1.0;
        ++clamped;
    }
    return (v_pi / std::numbers::pi) * (std::asin(theta) - std::numbers::pi / 2.0) - v_bias;
}

}  // namespace

DriveSignals predistort(const std::vector<cplx>& s, const DpdCoefficients& k, double v_pi_i,
                        double v_pi_q, double v_bias_i, double v_bias_q) {
    DriveSignals out;
    out.v_i.resize(s.size());
    out.v_q.resize(s.size());
    std::size_t clamped = 0;
    for (std::size_t n = 0; n < s.size(); ++n) {
        const double s_i = s[n].real();
        const double s_q = s[n].imag();
        const double th_i = k.a_i * s_i + k.b_i * s_q * s_q + k.d_i * s_q + k.c_i;
        const double th_q = k.a_q * s_q + k.b_q * s_i * s_i + k.d_q * s_i + k.c_q;
        out.v_i[n] = theta_to_voltage(th_i, v_pi_i, v_bias_i, clamped);
        out.v_q[n] = theta_to_voltage(th_q, v_pi_q, v_bias_q, clamped);
    }
    if (!s.empty()) out.saturation_fraction = double(clamped) / double(2 * s.size());
    return out;
}

DriveSignals linear_drive(const std::vector<cplx>& s, double v_pi_i, double v_pi_q,
                          double v_bias_i, double v_bias_q) {
    DriveSignals out;
    out.v_i.resize(s.size());
    out.v_q.resize(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        out.v_i[n] = 0.5 * v_pi_i * (s[n].real() - 1.0) - v_bias_i;
        out.v_q[n] = 0.5 * v_pi_q * (s[n].imag() - 1.0) - v_bias_q;
    }
    return out;
}

double offset_correct(std::vector<double>& v, double alpha, OffsetMode mode) {
    if (v.empty() || alpha == 0.0) return 0.0;
    const double m = mean(v);
    const double shift = (mode == OffsetMode::literal) ? alpha * std::abs(m) : alpha * m;
    for (auto& x : v) x -= shift;
    return shift;
}

}  // namespace pdlink
