#include "lungbench/dsp/filter.hpp"

#include <cmath>
#include <numbers>

#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"

namespace lungbench::dsp {

std::vector<double> SosFilter::apply(std::span<const double> input) const {
    std::vector<double> signal(input.begin(), input.end());
    for (const auto& s : sections_) {
        double z1 = 0.0, z2 = 0.0;
        for (double& x : signal) {
            const double y = s.b0 * x + z1;
            z1 = s.b1 * x - s.a1 * y + z2;
            z2 = s.b2 * x - s.a2 * y;
            x = y;
        }
    }
    return signal;
}

std::complex<double> SosFilter::response(double freq_hz, double sample_rate) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h = 1.0;
    for (const auto& s : sections_) {
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return h;
}

SosFilter design_butterworth_highpass(int order, double cutoff_hz, double sample_rate) {
    if (order < 2 || order % 2 != 0) throw Error("filter.order", "Butterworth order must be even and >= 2");
    if (cutoff_hz <= 0.0 || cutoff_hz >= sample_rate / 2.0) {
        throw Error("filter.cutoff", "cutoff must lie strictly between 0 and Nyquist");
    }
    // Prototype pole pair k has damping sin((2k+1) pi / 2N). After s -> wc/s
    // each section is s^2 / (s^2 + 2 zeta wc s + wc^2); bilinear with
    // prewarping puts K = tan(pi fc / fs) in place of wc / 2fs.
    const double K = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
    const double K2 = K * K;
    std::vector<SecondOrderSection> sections;
    for (int k = 0; k < order / 2; ++k) {
        const double zeta = std::sin(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order));
        const double a0 = 1.0 + 2.0 * zeta * K + K2;
        sections.push_back({1.0 / a0, -2.0 / a0, 1.0 / a0, (2.0 * K2 - 2.0) / a0, (1.0 - 2.0 * zeta * K + K2) / a0});
    }
    return SosFilter(std::move(sections));
}

const SosFilter& preprocessing_highpass() {
    static const SosFilter filter = design_butterworth_highpass(10, 80.0, kSampleRate);
    return filter;
}

std::vector<double> highpass_filter(std::span<const double> samples) {
    return preprocessing_highpass().apply(samples);
}

}  // namespace lungbench::dsp
