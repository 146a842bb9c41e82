#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "pdlink/dpd.hpp"
#include "pdlink/optics.hpp"
#include "pdlink/waveform.hpp"

using namespace pdlink;

namespace {

// Drive the full modulator with the predistorted voltages for symbol stream s
// and return the normalized output field (unit laser, no noise).
std::vector<cplx> modulate_predistorted(const std::vector<cplx>& s, double er_i_db, double er_o_db,
                                        double scale, double* saturation = nullptr) {
    ModulatorParams m;
    m.imbalance.g_i = er_db_to_imbalance(er_i_db);
    m.imbalance.g_q = er_db_to_imbalance(er_i_db);
    m.imbalance.g_p = er_db_to_imbalance(er_o_db);
    const DpdCoefficients k = compute_dpd_coefficients(m.imbalance);

    std::vector<cplx> in(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) in[n] = scale * s[n];
    DriveSignals d = predistort(in, k, m.v_pi_i, m.v_pi_q, m.v_bias_i, m.v_bias_q);
    if (saturation) *saturation = d.saturation_fraction;

    Waveform laser;
    laser.sample_rate = 1.0;
    laser.samples.assign(s.size(), cplx{1.0, 0.0});
    std::vector<double> vi(d.v_i), vq(d.v_q);
    for (auto& v : vi) v += m.v_bias_i;
    for (auto& v : vq) v += m.v_bias_q;
    const Waveform field = iq_modulate(laser, vi, vq, m);
    return field.samples;
}

// Least-squares affine fit out ~ gain * s + offset, returning the residual
// RMS relative to the RMS of gain * s.
double affine_residual(const std::vector<cplx>& out, const std::vector<cplx>& s) {
    const std::size_t n = s.size();
    cplx ms{0, 0}, mo{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        ms += s[i];
        mo += out[i];
    }
    ms /= double(n);
    mo /= double(n);
    cplx num{0, 0};
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::conj(s[i] - ms) * (out[i] - mo);
        den += std::norm(s[i] - ms);
    }
    const cplx gain = num / den;
    double err = 0.0, sig = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        err += std::norm(out[i] - mo - gain * (s[i] - ms));
        sig += std::norm(gain * (s[i] - ms));
    }
    return std::sqrt(err / sig);
}

// Bounded symbols on [-1, 1]^2 so a scaled drive has an exact zero
// saturation fraction.
std::vector<cplx> uniform_symbols(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> s(n);
    for (auto& v : s) v = cplx(u(rng), u(rng));
    return s;
}

}  // namespace

TEST_CASE("extinction ratio to field imbalance: anchors and round trip") {
    // g = (sqrt(ER) - 1)/(sqrt(ER) + 1), ER linear
    CHECK(er_db_to_imbalance(7.0) == doctest::Approx(0.3824696).epsilon(1e-5));
    CHECK(er_db_to_imbalance(25.0) == doctest::Approx(0.8935236).epsilon(1e-5));
    CHECK(er_db_to_imbalance(6.0) == doctest::Approx(0.3322788).epsilon(1e-5));
    CHECK(er_db_to_imbalance(4.0) == doctest::Approx(0.2262736).epsilon(1e-5));
    for (double er : {4.0, 6.0, 7.0, 15.0, 25.0, 40.0}) {
        CHECK(imbalance_to_er_db(er_db_to_imbalance(er)) == doctest::Approx(er).epsilon(1e-10));
    }
    CHECK(imbalance_to_er_db(1.0) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS((void)er_db_to_imbalance(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)imbalance_to_er_db(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)imbalance_to_er_db(1.5), std::invalid_argument);
}

TEST_CASE("dpd coefficients: ideal couplers give the identity mapping") {
    const DpdCoefficients k = compute_dpd_coefficients(ImbalanceSet{});
    CHECK(k.a_i == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.a_q == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(k.b_i) < 1e-15);
    CHECK(std::abs(k.c_i) < 1e-15);
    CHECK(std::abs(k.d_i) < 1e-15);
    CHECK(std::abs(k.b_q) < 1e-15);
    CHECK(std::abs(k.c_q) < 1e-15);
    CHECK(std::abs(k.d_q) < 1e-15);
}

TEST_CASE("dpd coefficients: internal structural identities") {
    // Each child interferometer leaks lam * sqrt(1 - theta^2) of the opposite
    // quadrature; the coefficients are the expansion of that leak around the
    // recentring constant c.  Everything is locked to (a, c):
    //   u0 = sqrt(1 - c^2), lam_i = c_i / u0q, lam_q = -c_q / u0i
    //   b_i = -lam_i a_q^2 / (2 u0q^3), d_i = -lam_i a_q c_q / u0q (and i<->q)
    for (double er_i : {4.0, 7.0, 12.0})
        for (double er_o : {4.0, 15.0, 25.0}) {
            ImbalanceSet g;
            g.g_i = er_db_to_imbalance(er_i);
            g.g_q = er_db_to_imbalance(er_i);
            g.g_p = er_db_to_imbalance(er_o);
            const DpdCoefficients k = compute_dpd_coefficients(g);

            const double u0i = std::sqrt(1.0 - k.c_i * k.c_i);
            const double u0q = std::sqrt(1.0 - k.c_q * k.c_q);
            const double lam_i = k.c_i / u0q;
            const double lam_q = -k.c_q / u0i;

            CHECK(k.b_i == doctest::Approx(-lam_i * k.a_q * k.a_q / (2.0 * u0q * u0q * u0q)).epsilon(1e-12));
            CHECK(k.d_i == doctest::Approx(-lam_i * k.a_q * k.c_q / u0q).epsilon(1e-12));
            CHECK(k.b_q == doctest::Approx(lam_q * k.a_i * k.a_i / (2.0 * u0i * u0i * u0i)).epsilon(1e-12));
            CHECK(k.d_q == doctest::Approx(lam_q * k.a_i * k.c_i / u0i).epsilon(1e-12));
            CHECK(k.d_i == doctest::Approx(2.0 * k.b_i * k.c_q * u0q * u0q / k.a_q).epsilon(1e-12));
            CHECK(k.d_q == doctest::Approx(2.0 * k.b_q * k.c_i * u0i * u0i / k.a_i).epsilon(1e-12));

            // The leak amplitudes are fixed by the coupler imbalances alone.
            const double si = std::sqrt(g.g_i), sq = std::sqrt(g.g_q), sp = std::sqrt(g.g_p);
            const double npi = std::sqrt((1.0 + g.g_p) * (1.0 + g.g_i));
            const double npq = std::sqrt((1.0 + g.g_p) * (1.0 + g.g_q));
            CHECK(lam_i == doctest::Approx(k.a_i * (1.0 - sq) / npq).epsilon(1e-12));
            CHECK(lam_q == doctest::Approx(k.a_q * sp * (1.0 - si) / npi).epsilon(1e-12));

            // signs: c_i > 0 (quadrature child is the weaker leak source),
            // c_q < 0 at these operating points
            CHECK(k.c_i > 0.0);
            CHECK(k.c_q < 0.0);
            CHECK(k.b_i < 0.0);
            CHECK(k.b_q > 0.0);
            CHECK(k.d_i > 0.0);
            CHECK(k.d_q > 0.0);
        }
}

TEST_CASE("predistortion linearizes the finite-extinction modulator") {
    const auto s = uniform_symbols(4096, 5);

    SUBCASE("ideal modulator: arcsine inverts the sine exactly") {
        double sat = 1.0;
        const auto out = modulate_predistorted(s, 300.0, 300.0, 0.3, &sat);
        CHECK(sat == 0.0);
        CHECK(affine_residual(out, s) < 1e-6);
    }

    SUBCASE("(7, 25) dB: residual under 1e-4 with zero saturation") {
        double sat = 1.0;
        const auto out = modulate_predistorted(s, 7.0, 25.0, 0.005, &sat);
        CHECK(sat == 0.0);
        CHECK(affine_residual(out, s) < 1e-4);
    }

    SUBCASE("holds across the supported extinction grid at small drive") {
        for (double er_i : {4.0, 6.0, 9.0})
            for (double er_o : {4.0, 15.0, 25.0}) {
                double sat = 1.0;
                const auto out = modulate_predistorted(s, er_i, er_o, 5e-4, &sat);
                CHECK(sat == 0.0);
                CHECK(affine_residual(out, s) < 1e-4);
            }
    }

    SUBCASE("residual is second order in the drive amplitude") {
        // The quadratic expansion leaves a bilinear I*Q residue, so the
        // relative residual shrinks proportionally with the drive scale.
        double r_prev = 1.0;
        for (double scale : {0.04, 0.02, 0.01, 0.005}) {
            double sat = 1.0;
            const auto out = modulate_predistorted(s, 7.0, 25.0, scale, &sat);
            CHECK(sat == 0.0);
            const double r = affine_residual(out, s);
            CHECK(r < 0.65 * r_prev);
            r_prev = r;
        }
    }

    SUBCASE("without predistortion the same operating point is visibly nonlinear") {
        ModulatorParams m;
        m.imbalance.g_i = er_db_to_imbalance(7.0);
        m.imbalance.g_q = er_db_to_imbalance(7.0);
        m.imbalance.g_p = er_db_to_imbalance(25.0);
        std::vector<cplx> in(s.size());
        for (std::size_t n = 0; n < s.size(); ++n) in[n] = 0.25 * s[n];
        DriveSignals d = linear_drive(in, m.v_pi_i, m.v_pi_q, m.v_bias_i, m.v_bias_q);
        Waveform laser;
        laser.sample_rate = 1.0;
        laser.samples.assign(s.size(), cplx{1.0, 0.0});
        std::vector<double> vi(d.v_i), vq(d.v_q);
        for (auto& v : vi) v += m.v_bias_i;
        for (auto& v : vq) v += m.v_bias_q;
        const Waveform field = iq_modulate(laser, vi, vq, m);
        CHECK(affine_residual(field.samples, s) > 1e-2);
    }
}

TEST_CASE("predistortion saturation accounting") {
    // theta_i = s_i at ideal couplers: drive a known share of samples past 1
    std::vector<cplx> s = {cplx(0.5, 0.0), cplx(1.5, 0.0), cplx(-2.0, 0.0), cplx(0.0, 0.3)};
    const DpdCoefficients k = compute_dpd_coefficients(ImbalanceSet{});
    const DriveSignals d = predistort(s, k, 4.0, 4.0, 2.0, 2.0);
    // 2 of the 8 rail samples clamp
    CHECK(d.saturation_fraction == doctest::Approx(0.25));
    // clamped entries land exactly at the arcsine rail edges
    CHECK(d.v_i[1] == doctest::Approx((4.0 / std::numbers::pi) * (std::asin(1.0) - std::numbers::pi / 2) - 2.0));
    CHECK(d.v_i[2] == doctest::Approx((4.0 / std::numbers::pi) * (std::asin(-1.0) - std::numbers::pi / 2) - 2.0));
}

TEST_CASE("linear drive swings v_pi/2 around the null") {
    std::vector<cplx> s = {cplx(1.0, -1.0), cplx(0.0, 0.0), cplx(-1.0, 1.0)};
    const DriveSignals d = linear_drive(s, 4.0, 4.0, 2.0, 2.0);
    CHECK(d.v_i[0] == doctest::Approx(-2.0));        // s=+1: at the bias point
    CHECK(d.v_i[1] == doctest::Approx(-4.0));        // s=0: half swing down
    CHECK(d.v_i[2] == doctest::Approx(-6.0));        // s=-1: full swing
    CHECK(d.v_q[0] == doctest::Approx(-6.0));
    CHECK(d.v_q[2] == doctest::Approx(-2.0));
    CHECK(d.saturation_fraction == 0.0);
}

TEST_CASE("offset correction: literal and mean laws") {
    std::vector<double> v = {-3.0, -5.0, -4.0, -4.0};  // mean -4

    SUBCASE("literal mode subtracts alpha times |mean|") {
        auto w = v;
        const double shift = offset_correct(w, 0.05, OffsetMode::literal);
        CHECK(shift == doctest::Approx(0.05 * 4.0));
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == doctest::Approx(v[i] - 0.2));
    }

    SUBCASE("mean mode subtracts alpha times the signed mean") {
        auto w = v;
        const double shift = offset_correct(w, 0.05, OffsetMode::mean);
        CHECK(shift == doctest::Approx(-0.2));
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == doctest::Approx(v[i] + 0.2));
    }

    SUBCASE("alpha zero is a no-op") {
        auto w = v;
        CHECK(offset_correct(w, 0.0, OffsetMode::literal) == 0.0);
        CHECK(w == v);
    }

    SUBCASE("modes agree when the mean is positive") {
        std::vector<double> a = {1.0, 3.0};
        auto b = a;
        const double s1 = offset_correct(a, 0.1, OffsetMode::literal);
        const double s2 = offset_correct(b, 0.1, OffsetMode::mean);
        CHECK(s1 == doctest::Approx(s2));
        CHECK(a[0] == doctest::Approx(b[0]));
    }
}
