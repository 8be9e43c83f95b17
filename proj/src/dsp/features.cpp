#include "lungbench/dsp/features.hpp"

#include <cmath>

#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/dsp/filter.hpp"
#include "lungbench/dsp/mfcc.hpp"

namespace lungbench::dsp {

double floored_log(double x) { return std::log(x + kLogFloor); }

RowMatrixD band_energy(const Spectrogram& spec) {
    const auto frames = spec.magnitudes.rows();
    RowMatrixD out = RowMatrixD::Zero(frames, static_cast<Eigen::Index>(kEnergyBands.size()));
    for (std::size_t j = 0; j < kEnergyBands.size(); ++j) {
        for (Eigen::Index b = 0; b < spec.magnitudes.cols(); ++b) {
            const double f = spec.bin_freqs[b];
            if (f >= kEnergyBands[j].lo_hz && f < kEnergyBands[j].hi_hz) {
                out.col(j) += spec.magnitudes.col(b).cwiseAbs2();
            }
        }
    }
    return out;
}

void minmax_normalize(RowMatrixD& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double lo = m.col(c).minCoeff();
        const double hi = m.col(c).maxCoeff();
        if (hi > lo) {
            m.col(c) = (m.col(c).array() - lo) / (hi - lo);
        } else {
            m.col(c).setZero();
        }
    }
}

FeatureResult extract_features(const dataset::AudioClip& clip) {
    if (clip.sample_rate != kSampleRate) throw Error("dsp.rate", "sample rate mismatch");
    const auto filtered = highpass_filter(clip.samples);
    FeatureResult result;
    result.spectrogram = stft(filtered);
    const auto& mag = result.spectrogram.magnitudes;

    RowMatrixD all(kFrames, kFeatureColumns);
    all.leftCols(kSpectrogramColumns) = mag.unaryExpr(&floored_log);
    all.middleCols(kMfccOffset, 60) = mfcc_block(filtered);
    all.rightCols(4) = band_energy(result.spectrogram);
    minmax_normalize(all);
    result.features.values = all.cast<float>();
    return result;
}

FeatureMatrix build_feature_matrix(const dataset::AudioClip& clip) {
    return extract_features(clip).features;
}

}  // namespace lungbench::dsp
