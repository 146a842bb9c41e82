#pragma once

#include <cstdint>
#include <string>

#include "pdlink/dpd.hpp"
#include "pdlink/optics.hpp"
#include "pdlink/receiver.hpp"
#include "pdlink/rxdsp.hpp"
#include "pdlink/txdsp.hpp"

namespace pdlink {

struct DpdConfig {
    bool enabled = true;
    double alpha = 0.06;                        // offset-correction factor
    OffsetMode offset_mode = OffsetMode::literal;
    double drive_scale = 0.53;                  // RMS of the composite fed to the drive mapping
};

struct TxConfig {
    SubcarrierPlan plan;
    int rrc_span_symbols = 64;
    std::size_t payload_symbols = 16384;  // per band
    std::size_t preamble_symbols = 512;
    double clip_ratio_db = 12.0;
    int dac_enob = 6;
    TxResponse response;
    double pre_emphasis_max_db = 18.0;

    RrcSpec rrc() const {
        RrcSpec s;
        s.beta = plan.rrc_beta;
        s.span_symbols = rrc_span_symbols;
        s.sps = 2;
        return s;
    }
};

enum class AwgnLocation { drive, optical, off };
enum class RxPath { analytic, lms };

struct LinkConfig {
    std::uint64_t seed = 1;
    LaserParams laser;
    ModulatorParams modulator;  // imbalance here is overwritten by the ER shorthand unless overridden
    double er_i_db = 7.0;       // inner interferometers, g_i = g_q
    double er_o_db = 25.0;      // outer combiner, g_p
    bool use_er_shorthand = true;
    DpdConfig dpd;
    TxConfig tx;
    AwgnLocation awgn_location = AwgnLocation::drive;
    double awgn_snr_db = 26.0;
    FiberParams fiber;
    bool fiber_enabled = true;
    double rop_dbm = -1.0;
    ReceiverParams receiver;
    PdParams pd;
    int adc_enob = 6;
    RxPath rx_path = RxPath::analytic;
    LmsConfig lms;
    double lo_power_dbm = 0.0;  // coherent-baseline local oscillator

    ImbalanceSet resolved_imbalance() const;
    void validate() const;
};

// Full chain: framing, shaping and multiplexing, drive noise loading,
// predistortion and offset correction (or linear drive), pre-emphasis,
// clipping, DAC quantization, analog response, modulator, fiber, attenuation
// to the target received power, 3-branch receiver, photodiodes, ADC, and the
// selected reconstruction path with per-subcarrier scoring.
MetricsReport run_link(const LinkConfig& cfg);

// Same transmitter and fiber; detection replaced by an ideal self-homodyne
// front end (full complex field against the transmit laser as phase
// reference, plus Gaussian noise of the per-branch thermal variance).
MetricsReport run_coherent_baseline(const LinkConfig& cfg);

}  // namespace pdlink
