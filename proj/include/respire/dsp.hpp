#pragma once

#include <complex>
#include <span>
#include <vector>

#include "respire/audio.hpp"
#include "respire/matrix.hpp"

namespace respire {

// Frames of a signal, one per row. Final short signals are zero-padded so
// every clip yields at least one frame; beyond that, n_frames follows
// 1 + floor((len - frame_len)/hop_len).
struct FrameMatrix {
    Matrix frames;
    int frame_len = 0;
    int hop_len = 0;
    int sample_rate_hz = 0;

    std::size_t n_frames() const { return frames.rows(); }
};

enum class SpecKind { magnitude, power, log_power, mel };

struct Spectrogram {
    Matrix values;  // n_frames x n_bins
    std::vector<double> bin_freqs_hz;
    SpecKind kind = SpecKind::magnitude;
    int sample_rate_hz = 0;

    std::size_t n_frames() const { return values.rows(); }
    std::size_t n_bins() const { return values.cols(); }
};

// Triangular mel filters; weights is n_mels x n_bins with one contiguous
// support per row.
struct MelFilterbank {
    Matrix weights;
    std::vector<double> center_freqs_hz;
};

enum class Window { hann };

FrameMatrix frame_signal(const AudioClip& clip, int frame_len, int hop_len);

// Periodic Hann window of length n.
std::vector<double> hann_periodic(int n);

// Symmetric Hann window (used for smoothing and CQT kernels).
std::vector<double> hann_symmetric(int n);

// Forward DFT of a real frame. Inputs whose length is a power of two go
// through the radix-2 FFT directly; anything else is zero-padded up to the
// next power of two first. Returns the first floor(N/2)+1 bins of the
// (possibly padded) length-N transform, without normalization.
std::vector<std::complex<double>> dft(std::span<const double> frame);

// Per-frame windowed DFT magnitudes; bin_freqs = k*sr/frame_len.
Spectrogram stft(const FrameMatrix& frames, Window window = Window::hann);

// Elementwise square of a magnitude spectrogram.
Spectrogram to_power(const Spectrogram& spec);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

MelFilterbank mel_filterbank(int n_mels, int n_bins, int sample_rate_hz,
                             double fmin_hz, double fmax_hz);

// power (n_frames x n_bins) -> mel energies (n_frames x n_mels).
Matrix apply_filterbank(const MelFilterbank& fb, const Spectrogram& power);

// Orthonormal DCT-II of the input, truncated to n_out coefficients.
std::vector<double> dct_ii(std::span<const double> input, int n_out);

struct CqtParams {
    int bins_per_octave = 12;
    int n_octaves = 7;
    double fmin_hz = 32.703;  // C1
};

double cqt_q_factor(int bins_per_octave);

// Constant-Q magnitudes on geometrically spaced bins f_j = fmin*2^(j/B),
// computed by direct windowed-kernel correlation around each frame center.
// Frame centers follow the same frame/hop grid as frame_signal.
Spectrogram cqt(const AudioClip& clip, const CqtParams& params = {},
                int frame_len = 2048, int hop_len = 512);

}  // namespace respire
