#include "respire/features_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace respire {

namespace {

constexpr double kLogFloor = 1e-10;

double sign_of(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
}

}  // namespace

FeatureSeries rmse(const FrameMatrix& frames) {
    FeatureSeries out{"rmse", Matrix(frames.n_frames(), 1)};
    for (std::size_t i = 0; i < frames.n_frames(); ++i) {
        const auto row = frames.frames.row(i);
        double acc = 0.0;
        for (const double s : row) {
            acc += s * s;
        }
        out.values(i, 0) = std::sqrt(acc / static_cast<double>(row.size()));
    }
    return out;
}

FeatureSeries zcr(const FrameMatrix& frames) {
    FeatureSeries out{"zcr", Matrix(frames.n_frames(), 1)};
    const std::size_t flen = frames.frames.cols();
    for (std::size_t i = 0; i < frames.n_frames(); ++i) {
        if (flen < 2) {
            out.values(i, 0) = 0.0;
            continue;
        }
        const auto row = frames.frames.row(i);
        double acc = 0.0;
        for (std::size_t n = 1; n < flen; ++n) {
            acc += std::abs(sign_of(row[n]) - sign_of(row[n - 1]));
        }
        out.values(i, 0) = 0.5 * acc / static_cast<double>(flen - 1);
    }
    return out;
}

FeatureSeries spectral_centroid(const Spectrogram& mag) {
    FeatureSeries out{"s_cent", Matrix(mag.n_frames(), 1)};
    for (std::size_t i = 0; i < mag.n_frames(); ++i) {
        const auto row = mag.values.row(i);
        double total = 0.0;
        double weighted = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            total += row[k];
            weighted += row[k] * mag.bin_freqs_hz[k];
        }
        out.values(i, 0) = total > 0.0 ? weighted / total : 0.0;
    }
    return out;
}

FeatureSeries spectral_bandwidth(const Spectrogram& mag) {
    FeatureSeries out{"s_bw", Matrix(mag.n_frames(), 1)};
    for (std::size_t i = 0; i < mag.n_frames(); ++i) {
        const auto row = mag.values.row(i);
        double total = 0.0;
        double weighted = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            total += row[k];
            weighted += row[k] * mag.bin_freqs_hz[k];
        }
        if (total <= 0.0) {
            out.values(i, 0) = 0.0;
            continue;
        }
        const double centroid = weighted / total;
        double var = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            const double d = mag.bin_freqs_hz[k] - centroid;
            var += row[k] / total * d * d;
        }
        out.values(i, 0) = std::sqrt(var);
    }
    return out;
}

FeatureSeries spectral_contrast(const Spectrogram& mag, const SpectralParams& params) {
    if (params.n_contrast_bands < 1 || params.contrast_fmin_hz <= 0.0 ||
        params.contrast_alpha <= 0.0) {
        throw ParameterError("invalid spectral contrast parameters");
    }

    // Band edges: [0, fmin), then octave bands [fmin*2^k, fmin*2^(k+1)),
    // the last one closed at Nyquist.
    const int n_bands = params.n_contrast_bands + 1;
    std::vector<double> edges(static_cast<std::size_t>(n_bands) + 1);
    edges[0] = 0.0;
    for (int b = 0; b <= params.n_contrast_bands; ++b) {
        edges[static_cast<std::size_t>(b) + 1] =
            params.contrast_fmin_hz * std::pow(2.0, b);
    }

    std::vector<std::pair<std::size_t, std::size_t>> band_bins(
        static_cast<std::size_t>(n_bands));
    for (int b = 0; b < n_bands; ++b) {
        std::size_t lo = mag.n_bins();
        std::size_t hi = 0;
        for (std::size_t k = 0; k < mag.n_bins(); ++k) {
            const double f = mag.bin_freqs_hz[k];
            const bool in_band = b + 1 == n_bands
                                     ? f >= edges[static_cast<std::size_t>(b)]
                                     : f >= edges[static_cast<std::size_t>(b)] &&
                                           f < edges[static_cast<std::size_t>(b) + 1];
            if (in_band) {
                lo = std::min(lo, k);
                hi = std::max(hi, k + 1);
            }
        }
        if (lo >= hi) {
            throw ParameterError("spectral contrast band " + std::to_string(b) +
                                 " covers no bins");
        }
        band_bins[static_cast<std::size_t>(b)] = {lo, hi};
    }

    FeatureSeries out{"s_cont", Matrix(mag.n_frames(), static_cast<std::size_t>(n_bands))};
    std::vector<double> band;
    for (std::size_t i = 0; i < mag.n_frames(); ++i) {
        const auto row = mag.values.row(i);
        for (int b = 0; b < n_bands; ++b) {
            const auto [lo, hi] = band_bins[static_cast<std::size_t>(b)];
            band.assign(row.begin() + static_cast<std::ptrdiff_t>(lo),
                        row.begin() + static_cast<std::ptrdiff_t>(hi));
            std::sort(band.begin(), band.end(), std::greater<>());
            const auto n_edge = std::max<std::size_t>(
                1, static_cast<std::size_t>(
                       std::llround(params.contrast_alpha *
                                    static_cast<double>(band.size()))));
            double peak = 0.0;
            double valley = 0.0;
            for (std::size_t k = 0; k < n_edge; ++k) {
                peak += band[k];
                valley += band[band.size() - 1 - k];
            }
            peak = std::log(std::max(peak / static_cast<double>(n_edge), kLogFloor));
            valley =
                std::log(std::max(valley / static_cast<double>(n_edge), kLogFloor));
            out.values(i, static_cast<std::size_t>(b)) = peak - valley;
        }
    }
    return out;
}

FeatureSeries spectral_flatness(const Spectrogram& power) {
    FeatureSeries out{"s_flat", Matrix(power.n_frames(), 1)};
    for (std::size_t i = 0; i < power.n_frames(); ++i) {
        const auto row = power.values.row(i);
        double log_acc = 0.0;
        double lin_acc = 0.0;
        for (const double v : row) {
            const double p = std::max(v, kLogFloor);
            log_acc += std::log(p);
            lin_acc += p;
        }
        const double n = static_cast<double>(row.size());
        const double gm = std::exp(log_acc / n);
        const double am = lin_acc / n;
        out.values(i, 0) = std::clamp(gm / am, 0.0, 1.0);
    }
    return out;
}

FeatureSeries spectral_flux(const Spectrogram& mag) {
    const std::size_t n_frames = mag.n_frames();
    FeatureSeries out{"s_flux", Matrix(n_frames, 1)};

    std::vector<double> prev(mag.n_bins(), 0.0);
    std::vector<double> cur(mag.n_bins(), 0.0);
    for (std::size_t i = 0; i < n_frames; ++i) {
        const auto row = mag.values.row(i);
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        for (std::size_t k = 0; k < row.size(); ++k) {
            cur[k] = total > 0.0 ? row[k] / total : 0.0;
        }
        if (i == 0) {
            out.values(i, 0) = 0.0;
        } else {
            double acc = 0.0;
            for (std::size_t k = 0; k < cur.size(); ++k) {
                const double d = cur[k] - prev[k];
                acc += d * d;
            }
            out.values(i, 0) = acc;
        }
        std::swap(prev, cur);
    }
    return out;
}

FeatureSeries spectral_rolloff(const Spectrogram& mag, const SpectralParams& params) {
    if (params.rolloff_fraction <= 0.0 || params.rolloff_fraction > 1.0) {
        throw ParameterError("rolloff fraction must lie in (0, 1]");
    }
    FeatureSeries out{"s_roll", Matrix(mag.n_frames(), 1)};
    for (std::size_t i = 0; i < mag.n_frames(); ++i) {
        const auto row = mag.values.row(i);
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        if (total <= 0.0) {
            out.values(i, 0) = 0.0;
            continue;
        }
        const double target = params.rolloff_fraction * total;
        const double slack = 1e-12 * total;
        double cum = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            cum += row[k];
            if (cum + slack >= target) {
                out.values(i, 0) = mag.bin_freqs_hz[k];
                break;
            }
        }
    }
    return out;
}

}  // namespace respire
