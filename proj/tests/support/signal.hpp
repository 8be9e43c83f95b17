#pragma once

// Test signals and closed-form filter responses shared by the unit and
// acceptance suites. All signals are at 4 kHz.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace signal_oracle {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> sine(double freq, std::size_t n, double amplitude = 1.0, double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = amplitude * std::sin(2.0 * kPi * freq * static_cast<double>(i) / 4000.0 + phase);
    }
    return x;
}

// Amplitude of the `freq` component over the last second (least-squares
// projection on sin/cos; the window is a whole number of periods).
inline double tail_amplitude(const std::vector<double>& y, double freq) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = y.size() - 4000; i < y.size(); ++i) {
        const double w = 2.0 * kPi * freq * static_cast<double>(i) / 4000.0;
        s += y[i] * std::sin(w);
        c += y[i] * std::cos(w);
    }
    return 2.0 * std::hypot(s, c) / 4000.0;
}

inline double tail_peak(const std::vector<double>& y) {
    double peak = 0.0;
    for (std::size_t i = y.size() - 4000; i < y.size(); ++i) peak = std::max(peak, std::abs(y[i]));
    return peak;
}

// Butterworth magnitude after the bilinear transform with prewarping:
// |H(f)| = 1 / sqrt(1 + (tan(pi fc / fs) / tan(pi f / fs))^(2N)).
inline double butterworth_highpass_gain(double f, double fc, int order) {
    const double ratio = std::tan(kPi * fc / 4000.0) / std::tan(kPi * f / 4000.0);
    return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2.0 * order));
}

}  // namespace signal_oracle
