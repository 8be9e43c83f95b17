#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/common/random.hpp"
#include "lungbench/dataset/synth.hpp"
#include "lungbench/dsp/features.hpp"
#include "lungbench/dsp/filter.hpp"
#include "lungbench/dsp/mfcc.hpp"
#include "lungbench/dsp/spectrogram.hpp"
#include "support/signal.hpp"

using namespace lungbench;
using namespace lungbench::dsp;
using namespace signal_oracle;

namespace {

std::vector<double> noise(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-0.5, 0.5);
    return x;
}

}  // namespace

TEST_CASE("high-pass frequency response oracle") {
    const auto& filter = preprocessing_highpass();
    CHECK(filter.sections().size() == 5);
    for (double f : {20.0, 40.0, 60.0, 79.0, 80.0, 81.0, 100.0, 200.0, 500.0, 1000.0, 1999.0}) {
        CAPTURE(f);
        CHECK(std::abs(filter.response(f, 4000.0)) == doctest::Approx(butterworth_highpass_gain(f, 80.0, 10)).epsilon(1e-9));
    }
    CHECK(20.0 * std::log10(std::abs(filter.response(80.0, 4000.0))) == doctest::Approx(-3.0103).epsilon(1e-4));
}

TEST_CASE("high-pass steady-state behaviour") {
    const std::vector<double> dc(40000, 1.0);
    CHECK(tail_peak(highpass_filter(dc)) < 1e-6);

    const double g60 = tail_amplitude(highpass_filter(sine(60.0, 40000)), 60.0);
    CHECK(20.0 * std::log10(g60) <= -20.0);
    CHECK(g60 == doctest::Approx(butterworth_highpass_gain(60.0, 80.0, 10)).epsilon(1e-3));

    const double g500 = tail_amplitude(highpass_filter(sine(500.0, 40000)), 500.0);
    CHECK(std::abs(20.0 * std::log10(g500)) <= 1.0);
    CHECK(g500 == doctest::Approx(butterworth_highpass_gain(500.0, 80.0, 10)).epsilon(1e-3));

    CHECK(highpass_filter(dc).size() == dc.size());
}

TEST_CASE("high-pass is linear") {
    Rng rng(3);
    const auto x = noise(rng, 60000);
    const auto y = noise(rng, 60000);
    const double a = 0.7, b = -1.9;
    std::vector<double> mix(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * y[i];
    const auto fx = highpass_filter(x), fy = highpass_filter(y), fm = highpass_filter(mix);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        err = std::max(err, std::abs(fm[i] - (a * fx[i] + b * fy[i])));
        scale = std::max(scale, std::abs(fm[i]));
    }
    CHECK(err <= 1e-9 * scale);
}

TEST_CASE("stft shapes and simple signals") {
    const auto spec = stft(std::vector<double>(60000, 0.0));
    CHECK(spec.magnitudes.rows() == 938);
    CHECK(spec.magnitudes.cols() == 129);
    CHECK(spec.magnitudes.maxCoeff() == 0.0);
    CHECK(spec.frame_times.size() == 938);
    CHECK(spec.frame_times[1] == doctest::Approx(0.016));
    CHECK(spec.bin_freqs[128] == 2000.0);

    // A mirrored sinusoid is continuous at no more than one clip edge, so
    // frames 0 and 937 (half made of the reflection) can split the peak.
    // Frames whose window lies fully inside the clip must all peak at bin 64;
    // with cosine phase the reflection at the start is seamless as well.
    const auto tone = stft(sine(1000.0, 60000, 1.0, kPi / 2.0));
    CHECK(tone.magnitudes.minCoeff() >= 0.0);
    for (Eigen::Index k = 0; k < 936; ++k) {
        Eigen::Index arg;
        tone.magnitudes.row(k).maxCoeff(&arg);
        CHECK(arg == 64);
    }
    const auto sine_phase = stft(sine(1000.0, 60000));
    for (Eigen::Index k = 2; k < 936; ++k) {
        Eigen::Index arg;
        sine_phase.magnitudes.row(k).maxCoeff(&arg);
        CHECK(arg == 64);
    }
    CHECK_THROWS_AS(stft(std::vector<double>(59999, 0.0)), Error);
}

TEST_CASE("stft energy scaling and shift") {
    Rng rng(4);
    const auto x = noise(rng, 60000 + 64);
    const std::vector<double> base(x.begin(), x.begin() + 60000);
    std::vector<double> doubled(base);
    for (auto& v : doubled) v *= 2.0;
    const double e1 = stft(base).magnitudes.array().square().sum();
    const double e2 = stft(doubled).magnitudes.array().square().sum();
    CHECK(std::abs(e2 / e1 - 4.0) <= 4e-9);

    const std::vector<double> shifted(x.begin() + 64, x.end());
    const auto a = stft(base).magnitudes;
    const auto b = stft(shifted).magnitudes;
    double err = 0.0;
    for (Eigen::Index k = 2; k < 934; ++k) err = std::max(err, (b.row(k) - a.row(k + 1)).cwiseAbs().maxCoeff());
    CHECK(err <= 1e-9);
}

TEST_CASE("mel filterbank") {
    CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
    CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
    const auto fb = mel_filterbank();
    REQUIRE(fb.rows() == 40);
    REQUIRE(fb.cols() == 256);
    CHECK(fb.minCoeff() >= 0.0);
    for (Eigen::Index r = 0; r < 40; ++r) CHECK(fb.row(r).sum() > 0.0);
    // Band edges sit at 0 Hz and 4000 Hz: the first triangle starts at bin 0.
    CHECK(fb(0, 0) == 0.0);
    CHECK(fb(0, 1) > 0.0);
    CHECK(fb(39, 255) > 0.0);
    CHECK(fb(39, 128) == 0.0);
}

TEST_CASE("delta regression") {
    RowMatrixD ramp(30, 2);
    for (int t = 0; t < 30; ++t) {
        ramp(t, 0) = 0.25 * t;
        ramp(t, 1) = 3.0 - 1.5 * t;
    }
    const auto d = delta(ramp);
    for (int t = 4; t < 26; ++t) {
        CHECK(d(t, 0) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(d(t, 1) == doctest::Approx(-1.5).epsilon(1e-12));
    }
    // Replicate padding at the first frame: sum n (c[n] - c[0]) / 60 = 0.25 * 30 / 60.
    CHECK(d(0, 0) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("mfcc block") {
    Rng rng(5);
    const auto m = mfcc_block(highpass_filter(noise(rng, 60000)));
    CHECK(m.rows() == 938);
    CHECK(m.cols() == 60);
    for (double level : {0.0, 0.3}) {
        const auto c = mfcc_block(std::vector<double>(60000, level));
        CHECK(c.rightCols(40).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(mfcc_block(std::vector<double>(100, 0.0)), Error);
}

TEST_CASE("band energy") {
    const auto zero = band_energy(stft(std::vector<double>(60000, 0.0)));
    CHECK(zero.rows() == 938);
    CHECK(zero.cols() == 4);
    CHECK(zero.maxCoeff() == 0.0);

    const auto tone = band_energy(stft(sine(300.0, 60000)));
    for (Eigen::Index k = 2; k < 936; ++k) {  // frames clear of the edge reflection
        const double low3 = tone(k, 0) + tone(k, 1) + tone(k, 2);
        CHECK(tone(k, 1) > 0.9 * low3);
        CHECK(tone(k, 3) >= tone(k, 1));
    }
    Rng rng(6);
    const auto any = band_energy(stft(noise(rng, 60000)));
    for (Eigen::Index k = 0; k < 938; ++k) {
        for (int c = 0; c < 3; ++c) CHECK(any(k, 3) >= any(k, c));
    }
}

TEST_CASE("feature matrix") {
    const auto rec = dataset::synthesize_recording({}, 7);
    const auto t0 = std::chrono::steady_clock::now();
    const auto f = build_feature_matrix(rec.clip);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(seconds < 1.0);
    REQUIRE(f.values.rows() == 938);
    REQUIRE(f.values.cols() == 193);
    CHECK(f.values.minCoeff() >= 0.0f);
    CHECK(f.values.maxCoeff() <= 1.0f);
    for (Eigen::Index c = 0; c < 193; ++c) {
        const float lo = f.values.col(c).minCoeff(), hi = f.values.col(c).maxCoeff();
        CAPTURE(c);
        CHECK(lo == 0.0f);
        CHECK((hi == 1.0f || hi == 0.0f));
    }

    RowMatrixD m(4, 3);
    m << 1, 5, 2, 2, 5, 4, 3, 5, 6, 4, 5, 8;
    minmax_normalize(m);
    CHECK(m.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m(0, 0) == 0.0);
    CHECK(m(3, 0) == 1.0);
    CHECK(m(1, 2) == doctest::Approx(1.0 / 3.0));

    dataset::AudioClip silent;
    silent.samples.assign(60000, 0.0);
    const auto s = build_feature_matrix(silent);
    CHECK(s.values.maxCoeff() == 0.0f);
}
