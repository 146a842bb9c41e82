#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "pdlink/fft.hpp"
#include "pdlink/optics.hpp"
#include "pdlink/qam.hpp"
#include "pdlink/rxdsp.hpp"
#include "pdlink/sigproc.hpp"
#include "pdlink/txdsp.hpp"

using namespace pdlink;

namespace {

constexpr double kPi = std::numbers::pi;

Waveform random_bandlimited(std::size_t n, double rate, double occupied_fraction,
                            std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Waveform w;
    w.sample_rate = rate;
    w.samples.assign(n, cplx(0.0, 0.0));
    const std::size_t kmax = std::size_t(occupied_fraction * 0.5 * double(n));
    for (std::size_t k = 1; k <= kmax; ++k) {
        w.samples[k] = cplx(g(gen), g(gen));
        w.samples[n - k] = cplx(g(gen), g(gen));
    }
    fft_inverse(w.samples);
    const double s = 1.0 / std::sqrt(mean_power(w.samples));
    for (auto& v : w.samples) v *= s;
    return w;
}

std::vector<cplx> random_symbols(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<cplx> s(n);
    for (auto& v : s) v = cplx(g(gen), g(gen));
    const cplx m = mean(s);
    for (auto& v : s) v -= m;
    return s;
}

}  // namespace

TEST_CASE("dispersion compensation inverts the fiber exactly") {
    const std::size_t n = 1 << 16;
    const auto in = random_bandlimited(n, 160e9, 0.6, 12345);

    SUBCASE("lossless 100 km round trip") {
        FiberParams f;
        f.loss_db_per_km = 0.0;
        const auto back = cd_compensate(fiber_propagate(in, f), f);
        double err = 0.0;
        for (std::size_t k = 0; k < n; ++k) err += std::norm(back.samples[k] - in.samples[k]);
        err = std::sqrt(err / double(n) / mean_power(in.samples));
        CHECK(err < 1e-9);
    }

    SUBCASE("attenuation is preserved, dispersion removed") {
        FiberParams f;
        const auto back = cd_compensate(fiber_propagate(in, f), f);
        const double amp = std::pow(10.0, -f.loss_db_per_km * f.length_km / 20.0);
        double err = 0.0;
        for (std::size_t k = 0; k < n; ++k) err += std::norm(back.samples[k] - amp * in.samples[k]);
        err = std::sqrt(err / double(n) / (amp * amp * mean_power(in.samples)));
        CHECK(err < 1e-9);
    }

    SUBCASE("compensation alone applies the conjugate phase") {
        FiberParams f;
        f.loss_db_per_km = 0.0;
        const auto once = cd_compensate(in, f);
        CHECK(mean_power(once.samples) == doctest::Approx(mean_power(in.samples)).epsilon(1e-12));
        const auto twice = fiber_propagate(once, f);
        double err = 0.0;
        for (std::size_t k = 0; k < n; ++k) err += std::norm(twice.samples[k] - in.samples[k]);
        CHECK(std::sqrt(err / double(n)) < 1e-9);
    }
}

TEST_CASE("lms converges to the analytic reconstruction weights") {
    // Branch currents built from the physical model around carrier C with the
    // branch phases (+theta, 0, -theta): the zero-forcing combiner is
    // gamma_1 = mu + nu, gamma_2 = -2 mu, gamma_3 = mu - nu with
    // mu = 1/(4C(cos theta - 1)), nu = j/(4C sin theta). The equalizer applies
    // conj(taps), so converged taps match conj(gamma) up to one common
    // complex scale.
    const std::size_t n = 1 << 16;
    const double carrier = 1.2;
    const double theta = 2.0 * kPi / 3.0 + 0.13;
    const auto s = random_symbols(n, 777);

    BranchCurrents b;
    b.sample_rate = 40e9;
    const double phases[3] = {theta, 0.0, -theta};
    for (int br = 0; br < 3; ++br) {
        b.i[br].resize(n);
        const cplx rot(std::cos(phases[br]), std::sin(phases[br]));
        for (std::size_t k = 0; k < n; ++k) {
            const cplx f = carrier * rot + s[k];
            b.i[br][k] = std::norm(f);
        }
    }

    Waveform ref;
    ref.sample_rate = b.sample_rate;
    ref.samples = s;

    LmsConfig cfg;
    cfg.taps_per_branch = 1;
    cfg.step_size = 2e-3;
    cfg.train_symbols = int(n);
    const auto res = lms_equalize_3x1(b, cfg, ref, 1);

    const cplx mu(1.0 / (4.0 * carrier * (std::cos(theta) - 1.0)), 0.0);
    const cplx nu(0.0, 1.0 / (4.0 * carrier * std::sin(theta)));
    const cplx want[3] = {std::conj(mu + nu), std::conj(-2.0 * mu), std::conj(mu - nu)};

    const cplx scale = res.taps[1][0] / want[1];
    for (int br = 0; br < 3; ++br) {
        CAPTURE(br);
        CHECK(std::abs(res.taps[br][0] - scale * want[br]) < 0.02 * std::abs(scale * want[br]));
    }

    SUBCASE("equalized output reproduces the reference up to one gain") {
        const auto g = fit_one_tap(res.output.samples, ref.samples);
        double err = 0.0;
        for (std::size_t k = n / 2; k < n; ++k)
            err += std::norm(res.output.samples[k] - g * ref.samples[k]);
        err /= (double(n) / 2.0) * std::norm(g) * mean_power(ref.samples);
        CHECK(err < 1e-3);
    }
}

TEST_CASE("lms guards its configuration and detects divergence") {
    LmsConfig cfg;
    cfg.taps_per_branch = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.taps_per_branch = 15;
    cfg.step_size = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.step_size = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.step_size = 1e-3;
    cfg.train_symbols = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    const std::size_t n = 8192;
    BranchCurrents b;
    b.sample_rate = 1.0;
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < 3; ++k) {
        b.i[k].resize(n);
        for (auto& v : b.i[k]) v = g(gen);
    }
    Waveform ref;
    ref.sample_rate = 1.0;
    ref.samples.resize(n);
    for (auto& v : ref.samples) v = cplx(g(gen), g(gen));

    SUBCASE("oversized step size diverges loudly") {
        LmsConfig hot;
        hot.taps_per_branch = 15;
        hot.step_size = 0.99;
        hot.train_symbols = int(n);
        CHECK_THROWS_AS(lms_equalize_3x1(b, hot, ref, 1), std::runtime_error);
    }

    SUBCASE("length mismatches are rejected") {
        LmsConfig ok;
        ok.train_symbols = int(n);
        auto short_ref = ref;
        short_ref.samples.pop_back();
        CHECK_THROWS_AS(lms_equalize_3x1(b, ok, short_ref, 1), std::invalid_argument);
        auto bad = b;
        bad.i[2].pop_back();
        CHECK_THROWS_AS(lms_equalize_3x1(bad, ok, ref, 1), std::invalid_argument);
        CHECK_THROWS_AS(lms_equalize_3x1(b, ok, ref, 0), std::invalid_argument);
    }
}

TEST_CASE("subcarrier demux isolates one band") {
    SubcarrierPlan plan;
    // 32000 samples at 160 GHz put the bin grid at 5 MHz, which divides the
    // band centers (+-22.2 GHz), the tone offsets and the output grid
    // (16000 samples at 80 GHz), so every tone stays exactly on one bin
    // through the shift, the brickwall and the resampler.
    const std::size_t n = 32000;
    Waveform comp;
    comp.sample_rate = plan.out_rate_hz;
    comp.samples.assign(n, cplx(0.0, 0.0));

    const double off0 = 3e9;
    const double off1 = -5e9;
    const double f_in_band0 = plan.center_hz(0) + off0;
    const double f_in_band1 = plan.center_hz(1) + off1;
    const auto add_tone = [&](double f, cplx a) {
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = 2.0 * kPi * f * double(k) / comp.sample_rate;
            comp.samples[k] += a * cplx(std::cos(ph), std::sin(ph));
        }
    };
    add_tone(f_in_band0, cplx(1.0, 0.0));
    add_tone(f_in_band1, cplx(0.0, 1.0));

    const auto b0 = demux_subcarrier(comp, plan, 0);
    const auto b1 = demux_subcarrier(comp, plan, 1);
    CHECK(b0.sample_rate == doctest::Approx(2.0 * plan.symbol_rate_hz));

    // After the shift the surviving tone sits at (f - center); the foreign
    // tone is outside the brickwall and must vanish.
    const auto tone_power = [](const Waveform& w, double f) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double ph = -2.0 * kPi * f * double(k) / w.sample_rate;
            acc += w.samples[k] * cplx(std::cos(ph), std::sin(ph));
        }
        return std::norm(acc / double(w.size()));
    };
    CHECK(tone_power(b0, off0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tone_power(b0, plan.center_hz(1) - plan.center_hz(0) + off1) < 1e-12);
    CHECK(tone_power(b1, off1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tone_power(b1, plan.center_hz(0) - plan.center_hz(1) + off0) < 1e-12);

    CHECK_THROWS_AS(demux_subcarrier(comp, plan, -1), std::invalid_argument);
    CHECK_THROWS_AS(demux_subcarrier(comp, plan, 2), std::invalid_argument);
}

TEST_CASE("frame synchronization finds the exact circular offset") {
    const int sps = 2;
    const std::size_t n = 1 << 13;
    const auto preamble = make_preamble(128, 42, 0);

    Waveform rec;
    rec.sample_rate = 80e9;
    rec.samples.assign(n, cplx(0.0, 0.0));
    std::mt19937_64 gen(9);
    std::normal_distribution<double> g(0.0, 0.05);
    for (auto& v : rec.samples) v = cplx(g(gen), g(gen));
    const std::size_t offset = 1234;
    for (std::size_t k = 0; k < preamble.size(); ++k)
        rec.samples[(offset + k * sps) % n] += preamble[k];

    const auto sync = synchronize(rec, preamble, sps);
    CHECK(sync.offset == offset);
    CHECK(sync.peak_quality > 4.0);
    CHECK(std::abs(sync.aligned.samples[0] - rec.samples[offset]) < 1e-12);
    CHECK(std::abs(sync.aligned.samples[n - 1] - rec.samples[offset - 1]) < 1e-12);

    SUBCASE("zero offset is recovered as zero") {
        Waveform at_zero;
        at_zero.sample_rate = rec.sample_rate;
        at_zero.samples.assign(n, cplx(0.0, 0.0));
        for (std::size_t k = 0; k < preamble.size(); ++k) at_zero.samples[k * sps] = preamble[k];
        CHECK(synchronize(at_zero, preamble, sps).offset == 0);
    }

    SUBCASE("a record without the preamble fails the quality gate") {
        Waveform noise;
        noise.sample_rate = rec.sample_rate;
        noise.samples.assign(n, cplx(0.0, 0.0));
        for (auto& v : noise.samples) v = cplx(g(gen), g(gen));
        CHECK_THROWS_AS(synchronize(noise, preamble, sps, 50.0), std::runtime_error);
    }

    SUBCASE("degenerate inputs are rejected") {
        CHECK_THROWS_AS(synchronize(rec, {}, sps), std::invalid_argument);
        Waveform tiny;
        tiny.sample_rate = 1.0;
        tiny.samples.assign(16, cplx(1.0, 0.0));
        CHECK_THROWS_AS(synchronize(tiny, preamble, sps), std::invalid_argument);
    }
}

TEST_CASE("single-tap fits undo constant gain and rotation") {
    const auto ref = random_symbols(4096, 31);
    const cplx gain = 0.37 * cplx(std::cos(1.1), std::sin(1.1));
    std::vector<cplx> x(ref.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = gain * ref[k];

    SUBCASE("fit_one_tap recovers the complex gain") {
        const cplx g = fit_one_tap(x, ref);
        CHECK(std::abs(g - gain) < 1e-12);
        CHECK_THROWS_AS(fit_one_tap(x, std::vector<cplx>(x.size(), cplx(0.0, 0.0))),
                        std::invalid_argument);
    }

    SUBCASE("constant_phase_rotate removes exactly the fitted phase") {
        auto y = x;
        const double phi = constant_phase_rotate(y, ref);
        CHECK(phi == doctest::Approx(1.1).epsilon(1e-12));
        for (std::size_t k = 0; k < y.size(); k += 199)
            CHECK(std::abs(y[k] - std::abs(gain) * ref[k]) < 1e-12);
        std::vector<cplx> empty;
        CHECK_THROWS_AS(constant_phase_rotate(empty, ref), std::invalid_argument);
    }
}

TEST_CASE("decision scoring counts bit errors against the frame") {
    const auto bits = random_bits(5 * 2000, 17, 0);
    const auto frame = build_frame(bits, 64, 17, 0);
    REQUIRE(frame.payload.size() == 2000);

    SUBCASE("perfect symbols score as censored zero-error") {
        const auto r = decide_and_score(frame.payload, frame);
        CHECK(r.bit_errors == 0);
        CHECK(r.censored);
        CHECK(r.ber == doctest::Approx(1.0 / double(r.bits_total)));
        CHECK(r.snr_db == doctest::Approx(kSnrCapDb));
        CHECK(r.evm_db == doctest::Approx(-kSnrCapDb));
    }

    SUBCASE("one forced symbol error produces the exact Hamming count") {
        auto sym = frame.payload;
        const std::uint32_t truth = qam32_decide(sym[7]);
        const std::uint32_t wrong = truth ^ 0x3u;  // differs in exactly two bits
        sym[7] = qam32_point(wrong);
        const auto r = decide_and_score(sym, frame);
        CHECK(r.bit_errors == 2);
        CHECK(r.censored);  // still below the 5-error confidence floor
        CHECK(r.ber == doctest::Approx(2.0 / double(r.bits_total)));
    }

    SUBCASE("snr is the data-aided power ratio") {
        auto sym = frame.payload;
        std::mt19937_64 gen(3);
        std::normal_distribution<double> g(0.0, 0.05);
        double sig = 0.0, err = 0.0;
        for (auto& v : sym) {
            const cplx e(g(gen), g(gen));
            err += std::norm(e);
            v += e;
        }
        for (const auto& v : frame.payload) sig += std::norm(v);
        const auto r = decide_and_score(sym, frame);
        CHECK(r.snr_db == doctest::Approx(lin_to_db(sig / err)).epsilon(1e-12));
        CHECK(r.evm_db == doctest::Approx(-r.snr_db));
    }

    SUBCASE("size mismatch is rejected") {
        auto sym = frame.payload;
        sym.pop_back();
        CHECK_THROWS_AS(decide_and_score(sym, frame), std::invalid_argument);
    }
}

TEST_CASE("global snr combining") {
    SUBCASE("two branches at 1 and 0 give sqrt(2) - 1") {
        CHECK(global_snr({1.0, 0.0}) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    }

    SUBCASE("single branch passes through unchanged") {
        for (double s : {0.0, 0.3, 1.0, 17.5, 1e6}) CHECK(global_snr({s}) == doctest::Approx(s).epsilon(1e-15));
    }

    SUBCASE("equal branches pass through unchanged") {
        CHECK(global_snr({5.0, 5.0, 5.0}) == doctest::Approx(5.0).epsilon(1e-12));
    }

    SUBCASE("permutation invariance over random lists") {
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> u(0.0, 100.0);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> s(2 + trial % 7);
            for (auto& v : s) v = u(gen);
            const double a = global_snr(s);
            std::shuffle(s.begin(), s.end(), gen);
            const double b = global_snr(s);
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(global_snr({}), std::invalid_argument);
        CHECK_THROWS_AS(global_snr({-0.1}), std::invalid_argument);
        CHECK_THROWS_AS(global_snr({1.0, -0.1}), std::invalid_argument);
    }
}
