#pragma once

#include <complex>
#include <span>
#include <vector>

namespace lungbench::dsp {

// Normalized second-order section, a0 == 1.
struct SecondOrderSection {
    double b0, b1, b2;
    double a1, a2;
};

// Cascade of second-order sections, run causally from a zero state in
// transposed direct form II.
class SosFilter {
public:
    SosFilter() = default;
    explicit SosFilter(std::vector<SecondOrderSection> sections) : sections_(std::move(sections)) {}

    std::vector<double> apply(std::span<const double> input) const;

    // H(e^{j 2 pi f / fs}).
    std::complex<double> response(double freq_hz, double sample_rate) const;

    const std::vector<SecondOrderSection>& sections() const { return sections_; }

private:
    std::vector<SecondOrderSection> sections_;
};

// Digital Butterworth high-pass of even `order`: analog prototype,
// low-to-high-pass transform, prewarped bilinear transform.
SosFilter design_butterworth_highpass(int order, double cutoff_hz, double sample_rate);

// The preprocessing filter: order 10, -3 dB at 80 Hz, 4 kHz.
const SosFilter& preprocessing_highpass();
std::vector<double> highpass_filter(std::span<const double> samples);

}  // namespace lungbench::dsp
