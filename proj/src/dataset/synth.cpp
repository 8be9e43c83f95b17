#include "lungbench/dataset/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lungbench/common/error.hpp"
#include "lungbench/common/random.hpp"

namespace lungbench::dataset {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClampSd = 2.5;

// RBJ cookbook second-order sections, Q = 1/sqrt(2).
struct Biquad {
    double b0, b1, b2, a1, a2;
    double z1 = 0.0, z2 = 0.0;

    double step(double x) {
        const double y = b0 * x + z1;
        z1 = b1 * x - a1 * y + z2;
        z2 = b2 * x - a2 * y;
        return y;
    }
};

Biquad make_biquad(double freq, bool highpass) {
    const double w0 = 2.0 * kPi * freq / kSampleRate;
    const double alpha = std::sin(w0) / std::numbers::sqrt2;  // sin(w0) / (2Q)
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    if (highpass) {
        return {(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0, -2.0 * cw / a0, (1.0 - alpha) / a0};
    }
    return {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0, -2.0 * cw / a0, (1.0 - alpha) / a0};
}

double clamped_normal(Rng& rng, double mean, double sd) {
    return std::clamp(rng.normal(mean, sd), mean - kClampSd * sd, mean + kClampSd * sd);
}

// Raised-cosine fade over `taper` of the length at each end.
double envelope(std::size_t i, std::size_t n, double taper) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    if (x < taper) return 0.5 - 0.5 * std::cos(kPi * x / taper);
    if (x > 1.0 - taper) return 0.5 - 0.5 * std::cos(kPi * (1.0 - x) / taper);
    return 1.0;
}

std::size_t to_sample(double seconds) {
    return static_cast<std::size_t>(std::llround(seconds * kSampleRate));
}

void add_band_noise(std::vector<double>& out, Rng& rng, double start, double end, double lo, double hi,
                    double rms) {
    const std::size_t s0 = to_sample(start), s1 = std::min(to_sample(end), out.size());
    if (s1 <= s0) return;
    const std::size_t n = s1 - s0;
    // Run the filters over a lead-in so the burst starts in steady state.
    const std::size_t lead = 400;
    std::vector<Biquad> chain = {make_biquad(lo, true), make_biquad(lo, true), make_biquad(hi, false),
                                 make_biquad(hi, false)};
    std::vector<double> burst(n);
    for (std::size_t i = 0; i < lead + n; ++i) {
        double x = rng.normal();
        for (auto& bq : chain) x = bq.step(x);
        if (i >= lead) burst[i - lead] = x;
    }
    double energy = 0.0;
    for (double x : burst) energy += x * x;
    const double scale = energy > 0.0 ? rms / std::sqrt(energy / static_cast<double>(n)) : 0.0;
    for (std::size_t i = 0; i < n; ++i) out[s0 + i] += scale * burst[i] * envelope(i, n, 0.15);
}

void add_chirp(std::vector<double>& out, Rng& rng, double start, double end, double f_lo, double f_hi,
               double rms) {
    const std::size_t s0 = to_sample(start), s1 = std::min(to_sample(end), out.size());
    if (s1 <= s0) return;
    const std::size_t n = s1 - s0;
    const double f0 = rng.uniform(f_lo, f_hi);
    const double f1 = std::clamp(f0 * rng.uniform(0.8, 1.25), 100.0, 1000.0);
    const double harmonic = 0.3;
    const double amp = rms * std::numbers::sqrt2 / std::sqrt(1.0 + harmonic * harmonic);
    double phase = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n);
        const double f = f0 + (f1 - f0) * frac;
        phase += 2.0 * kPi * f / kSampleRate;
        double v = std::sin(phase);
        if (2.0 * f < 0.5 * kSampleRate) v += harmonic * std::sin(2.0 * phase);
        out[s0 + i] += amp * v * envelope(i, n, 0.1);
    }
}

void add_crackles(std::vector<double>& out, Rng& rng, double start, double end, double peak) {
    double t = start + rng.uniform(0.005, 0.02);
    while (t < end - 0.015) {
        const std::size_t s0 = to_sample(t);
        const double freq = rng.uniform(250.0, 1200.0);
        const double tau = rng.uniform(0.002, 0.004);
        const double amp = peak * rng.uniform(0.6, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        const std::size_t len = to_sample(0.015);
        for (std::size_t i = 0; i < len && s0 + i < out.size(); ++i) {
            const double dt = static_cast<double>(i) / kSampleRate;
            out[s0 + i] += amp * std::exp(-dt / tau) * std::sin(2.0 * kPi * freq * dt);
        }
        t += rng.uniform(0.02, 0.08);
    }
}

// Places up to `count` non-overlapping intervals of random duration.
std::vector<std::pair<double, double>> place_intervals(Rng& rng, int count, double mean, double sd) {
    std::vector<std::pair<double, double>> placed;
    for (int e = 0; e < count; ++e) {
        const double dur = std::max(0.2, clamped_normal(rng, mean, sd));
        for (int attempt = 0; attempt < 50; ++attempt) {
            const double start = rng.uniform(0.2, kClipSeconds - 0.2 - dur);
            const double end = start + dur;
            const bool clear = std::none_of(placed.begin(), placed.end(), [&](const auto& p) {
                return start < p.second + 0.1 && p.first < end + 0.1;
            });
            if (clear) {
                placed.emplace_back(start, end);
                break;
            }
        }
    }
    std::sort(placed.begin(), placed.end());
    return placed;
}

}  // namespace

void validate(const SynthesisParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error("synth.params", std::string("invalid synthesis parameters: ") + what);
    };
    require(p.min_breaths >= 1 && p.max_breaths >= p.min_breaths, "breath range");
    require(p.inhale_mean > 0 && p.exhale_mean > 0 && p.inhale_sd >= 0 && p.exhale_sd >= 0, "durations");
    require(p.inhale_mean - kClampSd * p.inhale_sd > 0.05 && p.exhale_mean - kClampSd * p.exhale_sd > 0.05,
            "duration spread too wide");
    require(p.cas_rate >= 0 && p.cas_rate <= 1 && p.das_rate >= 0 && p.das_rate <= 1, "event rates");
    require(p.inhale_band_lo > 0 && p.inhale_band_hi < kSampleRate / 2.0 && p.inhale_band_lo < p.inhale_band_hi,
            "inhalation band");
    require(p.exhale_band_lo > 0 && p.exhale_band_hi < kSampleRate / 2.0 && p.exhale_band_lo < p.exhale_band_hi,
            "exhalation band");
    require(p.cas_mean > 0 && p.das_mean > 0 && p.cas_mean + kClampSd * p.cas_sd < kClipSeconds / 2 &&
                p.das_mean + kClampSd * p.das_sd < kClipSeconds / 2,
            "adventitious durations");

    const double longest_cycle = p.inhale_mean + kClampSd * p.inhale_sd + p.exhale_mean + kClampSd * p.exhale_sd +
                                 p.min_pause_after_inhale + p.min_pause_after_exhale;
    const double needed = p.max_breaths * longest_cycle - p.min_pause_after_exhale + 2.0 * p.edge_margin;
    if (needed > kClipSeconds) {
        throw Error("synth.infeasible", "infeasible synthesis parameters: " + std::to_string(p.max_breaths) +
                                            " breaths may need " + std::to_string(needed) + " s > 15 s");
    }
}

SyntheticRecording synthesize_recording(const SynthesisParams& p, std::uint64_t seed) {
    validate(p);
    Rng rng(mix_seed(seed, 0x5EED));
    SyntheticRecording rec;
    std::vector<double> signal(kClipSamples, 0.0);

    // Breath layout: lead, then (I, pause, E, pause) per breath, tail.
    const int n = rng.uniform_int(p.min_breaths, p.max_breaths);
    std::vector<double> d_in(n), d_ex(n);
    double fixed = 2.0 * p.edge_margin + (n - 1) * p.min_pause_after_exhale + n * p.min_pause_after_inhale;
    for (int b = 0; b < n; ++b) {
        d_in[b] = clamped_normal(rng, p.inhale_mean, p.inhale_sd);
        d_ex[b] = clamped_normal(rng, p.exhale_mean, p.exhale_sd);
        fixed += d_in[b] + d_ex[b];
    }
    const double slack = kClipSeconds - fixed;  // >= 0 by validate()
    std::vector<double> weights(2 * n + 1);
    double wsum = 0.0;
    for (double& w : weights) wsum += (w = rng.uniform(0.3, 1.0));

    const double gain = rng.uniform(0.75, 1.25);
    double t = p.edge_margin + slack * weights[0] / wsum;
    for (int b = 0; b < n; ++b) {
        rec.labels.push_back({EventClass::I, t, t + d_in[b]});
        add_band_noise(signal, rng, t, t + d_in[b], p.inhale_band_lo, p.inhale_band_hi, gain * p.inhale_rms);
        t += d_in[b] + p.min_pause_after_inhale + slack * weights[2 * b + 1] / wsum;
        rec.labels.push_back({EventClass::E, t, t + d_ex[b]});
        add_band_noise(signal, rng, t, t + d_ex[b], p.exhale_band_lo, p.exhale_band_hi, gain * p.exhale_rms);
        t += d_ex[b];
        if (b + 1 < n) t += p.min_pause_after_exhale + slack * weights[2 * b + 2] / wsum;
    }

    if (rng.uniform() < p.cas_rate) {
        const int count = rng.uniform_int(1, std::max(1, p.max_cas_events));
        for (const auto& [start, end] : place_intervals(rng, count, p.cas_mean, p.cas_sd)) {
            // Class mix follows the wheeze/stridor/rhonchus label counts.
            const double u = rng.uniform() * (8457.0 + 686.0 + 4740.0);
            EventClass klass = EventClass::W;
            double lo = 300.0, hi = 900.0;
            if (u >= 8457.0 + 686.0) {
                klass = EventClass::R;
                lo = 100.0, hi = 250.0;
            } else if (u >= 8457.0) {
                klass = EventClass::S;
                lo = 500.0, hi = 1000.0;
            }
            rec.labels.push_back({klass, start, end});
            add_chirp(signal, rng, start, end, lo, hi, p.cas_rms);
        }
    }

    if (rng.uniform() < p.das_rate) {
        const int count = rng.uniform_int(1, std::max(1, p.max_das_events));
        for (const auto& [start, end] : place_intervals(rng, count, p.das_mean, p.das_sd)) {
            rec.labels.push_back({EventClass::D, start, end});
            add_crackles(signal, rng, start, end, p.das_peak);
        }
    }

    // Background: white noise, heartbeat thumps, mains hum.
    const double noise_rms = p.inhale_rms / std::pow(10.0, p.snr_db / 20.0);
    const double beat_period = 60.0 / rng.uniform(60.0, 90.0);
    const double hum_phase = rng.uniform(0.0, 2.0 * kPi);
    for (double beat = rng.uniform(0.0, beat_period); beat < kClipSeconds; beat += beat_period) {
        for (const auto& [offset, scale] : {std::pair{0.0, 1.0}, std::pair{0.3, 0.6}}) {
            const std::size_t s0 = to_sample(beat + offset);
            for (std::size_t i = 0; i < to_sample(0.08) && s0 + i < signal.size(); ++i) {
                const double dt = static_cast<double>(i) / kSampleRate;
                signal[s0 + i] += scale * p.heartbeat_amplitude * std::exp(-dt / 0.02) * std::sin(2.0 * kPi * 40.0 * dt);
            }
        }
    }
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const double ts = static_cast<double>(i) / kSampleRate;
        signal[i] += noise_rms * rng.normal() + p.hum_amplitude * std::sin(2.0 * kPi * 60.0 * ts + hum_phase);
    }

    for (double& x : signal) x = std::clamp(x, -1.0, 32767.0 / 32768.0);
    quantize_pcm16(signal);

    std::stable_sort(rec.labels.begin(), rec.labels.end(), [](const LabelEvent& a, const LabelEvent& b) {
        return a.start < b.start;
    });
    rec.clip.samples = std::move(signal);
    rec.clip.sample_rate = kSampleRate;
    rec.clip.device = DeviceTag::steth;
    rec.clip.source_id = "synthetic_" + std::to_string(seed);
    return rec;
}

}  // namespace lungbench::dataset
