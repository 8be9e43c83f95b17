#pragma once

#include <cstdint>
#include <vector>

#include "lungbench/dataset/audio.hpp"
#include "lungbench/dataset/labels.hpp"

namespace lungbench::dataset {

// Parameters of the desk-scale generator. Breath phases are band-limited
// noise bursts (inhalation higher and louder than exhalation), CAS are tonal
// chirps between 100 and 1000 Hz, DAS are trains of short damped transients.
struct SynthesisParams {
    int min_breaths = 3;
    int max_breaths = 5;

    double inhale_mean = 0.93;
    double inhale_sd = 0.12;
    double exhale_mean = 0.96;
    double exhale_sd = 0.12;
    double min_pause_after_inhale = 0.15;
    double min_pause_after_exhale = 0.30;
    double edge_margin = 0.10;

    double inhale_band_lo = 300.0, inhale_band_hi = 900.0;
    double exhale_band_lo = 100.0, exhale_band_hi = 280.0;
    double inhale_rms = 0.10;
    double exhale_rms = 0.05;

    double cas_rate = 0.3;  // probability that a recording carries CAS
    double das_rate = 0.3;  // probability that a recording carries DAS
    int max_cas_events = 2;
    int max_das_events = 2;
    double cas_mean = 0.83, cas_sd = 0.15;
    double das_mean = 0.89, das_sd = 0.15;
    double cas_rms = 0.04;
    double das_peak = 0.12;

    // Breath-to-background ratio, relative to inhale_rms.
    double snr_db = 20.0;
    double heartbeat_amplitude = 0.05;
    double hum_amplitude = 0.01;
};

struct SyntheticRecording {
    AudioClip clip;
    std::vector<LabelEvent> labels;  // raw classes, sorted by start within each class
};

// Deterministic in (params, seed). Throws if max_breaths breaths of the
// longest allowed durations cannot fit into 15 s.
SyntheticRecording synthesize_recording(const SynthesisParams& params, std::uint64_t seed);

void validate(const SynthesisParams& params);

}  // namespace lungbench::dataset
