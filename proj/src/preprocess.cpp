#include "tofgr/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace tofgr {

namespace {

// All stage arithmetic accumulates in double and rounds to float at stage
// outputs, which keeps results exactly reproducible by an independent
// double-precision reference.

int clamp_index(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

GestureSequence resample_to_fps(const GestureSequence& seq, int target_fps) {
    if (target_fps <= 0) throw DataError("target fps must be positive");
    if (seq.frames.empty()) throw DegenerateInputError("cannot resample an empty sequence");
    if (seq.fps <= static_cast<float>(target_fps)) return seq;

    GestureSequence out;
    out.fps = static_cast<float>(target_fps);
    out.label = seq.label;
    out.participant = seq.participant;

    const double step_ms = 1000.0 / target_fps;
    const double last_ts = static_cast<double>(seq.frames.back().timestamp_ms);
    std::size_t next = 0;  // first not-yet-used source frame
    for (int k = 0;; ++k) {
        const double grid = k * step_ms;
        if (grid > last_ts) break;
        if (next >= seq.frames.size()) break;
        // timestamps increase, so distance to the grid point is V-shaped:
        // walk forward while strictly improving (ties keep the earlier frame)
        std::size_t j = next;
        while (j + 1 < seq.frames.size() &&
               std::abs(static_cast<double>(seq.frames[j + 1].timestamp_ms) - grid) <
                   std::abs(static_cast<double>(seq.frames[j].timestamp_ms) - grid)) {
            ++j;
        }
        out.frames.push_back(seq.frames[j]);
        next = j + 1;
    }
    return out;
}

GestureSequence truncate(GestureSequence seq, int max_len) {
    if (max_len < 0) throw DataError("truncate length must be non-negative");
    if (static_cast<int>(seq.frames.size()) > max_len) {
        seq.frames.resize(static_cast<std::size_t>(max_len));
    }
    return seq;
}

DepthFrame clamp_roi(DepthFrame frame, float min_cm, float max_cm) {
    for (float& d : frame.depth) {
        if (d < min_cm || d > max_cm) d = 0.0f;
    }
    return frame;
}

GestureSequence standardize(const GestureSequence& seq) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (const DepthFrame& f : seq.frames) {
        for (float d : f.depth) {
            if (d != 0.0f) {
                sum += static_cast<double>(d);
                ++count;
            }
        }
    }
    if (count == 0) {
        throw DegenerateInputError("standardize: sequence has no valid pixels");
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (const DepthFrame& f : seq.frames) {
        for (float d : f.depth) {
            if (d != 0.0f) {
                const double diff = static_cast<double>(d) - mean;
                sq += diff * diff;
            }
        }
    }
    const double sd = std::sqrt(sq / static_cast<double>(count));

    GestureSequence out = seq;
    for (DepthFrame& f : out.frames) {
        for (float& d : f.depth) {
            if (d != 0.0f) {
                d = sd < 1e-6 ? 0.0f
                              : static_cast<float>((static_cast<double>(d) - mean) / sd);
            }
        }
    }
    return out;
}

DepthFrame gaussian_blur(const DepthFrame& frame) {
    // 5x5, sigma 1, normalized. Computed on the fly: cheap, and keeps the
    // constant in one place for the reference implementation to mirror.
    double kernel[5][5];
    double norm = 0.0;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / 2.0);
            kernel[dy + 2][dx + 2] = v;
            norm += v;
        }
    }
    for (auto& row : kernel) {
        for (double& v : row) v /= norm;
    }

    DepthFrame out = frame;
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            double acc = 0.0;
            for (int dy = -2; dy <= 2; ++dy) {
                const int sy = clamp_index(y + dy, 0, frame.height - 1);
                for (int dx = -2; dx <= 2; ++dx) {
                    const int sx = clamp_index(x + dx, 0, frame.width - 1);
                    acc += kernel[dy + 2][dx + 2] * static_cast<double>(frame.at(sy, sx));
                }
            }
            out.at(y, x) = static_cast<float>(acc);
        }
    }
    return out;
}

DepthFrame downscale(const DepthFrame& frame) {
    if (frame.width % 4 != 0 || frame.height % 4 != 0) {
        throw DataError("downscale requires dimensions divisible by 4, got " +
                        std::to_string(frame.width) + "x" + std::to_string(frame.height));
    }
    DepthFrame out;
    out.width = frame.width / 4;
    out.height = frame.height / 4;
    out.timestamp_ms = frame.timestamp_ms;
    out.depth.resize(static_cast<std::size_t>(out.width) * out.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            double acc = 0.0;
            for (int dy = 0; dy < 4; ++dy) {
                for (int dx = 0; dx < 4; ++dx) {
                    acc += static_cast<double>(frame.at(4 * y + dy, 4 * x + dx));
                }
            }
            out.at(y, x) = static_cast<float>(acc / 16.0);
        }
    }
    return out;
}

GestureSequence subtract_background(const GestureSequence& seq, int n_bg) {
    const int n = static_cast<int>(seq.frames.size());
    if (n <= n_bg) {
        throw DegenerateInputError("subtract_background: need more than " +
                                   std::to_string(n_bg) + " frames, got " + std::to_string(n));
    }
    const std::size_t pixels = seq.frames.front().depth.size();
    std::vector<double> bg(pixels, 0.0);
    for (int i = 0; i < n_bg; ++i) {
        const DepthFrame& f = seq.frames[static_cast<std::size_t>(i)];
        for (std::size_t p = 0; p < pixels; ++p) bg[p] += static_cast<double>(f.depth[p]);
    }
    for (double& v : bg) v /= static_cast<double>(n_bg);

    GestureSequence out;
    out.fps = seq.fps;
    out.label = seq.label;
    out.participant = seq.participant;
    out.frames.reserve(static_cast<std::size_t>(n - n_bg));
    for (int i = n_bg; i < n; ++i) {
        DepthFrame f = seq.frames[static_cast<std::size_t>(i)];
        for (std::size_t p = 0; p < pixels; ++p) {
            f.depth[p] = static_cast<float>(std::abs(static_cast<double>(f.depth[p]) - bg[p]));
        }
        out.frames.push_back(std::move(f));
    }
    return out;
}

PreprocessedSequence zero_pad(const GestureSequence& seq, int target_len) {
    if (target_len != PreprocessedSequence::kFrames) {
        throw DataError("zero_pad target must be the model frame count");
    }
    const int n = static_cast<int>(seq.frames.size());
    if (n > target_len) {
        throw DataError("zero_pad: sequence longer than target (" + std::to_string(n) + ")");
    }
    PreprocessedSequence out;
    out.valid_frames = n;
    for (int t = 0; t < n; ++t) {
        const DepthFrame& f = seq.frames[static_cast<std::size_t>(t)];
        if (f.width != PreprocessedSequence::kWidth || f.height != PreprocessedSequence::kHeight) {
            throw ShapeError("zero_pad expects 60x80 frames, got " + std::to_string(f.height) +
                             "x" + std::to_string(f.width));
        }
        std::copy(f.depth.begin(), f.depth.end(),
                  out.data.begin() + static_cast<std::size_t>(t) * f.depth.size());
    }
    return out;
}

PreprocessedSequence preprocess_pipeline(const GestureSequence& raw) {
    const char* stage = "resample";
    try {
        GestureSequence seq = resample_to_fps(raw, kTargetFps);
        stage = "truncate";
        seq = truncate(std::move(seq), kTruncateBound);
        stage = "clamp_roi";
        for (DepthFrame& f : seq.frames) f = clamp_roi(std::move(f));
        stage = "standardize";
        seq = standardize(seq);
        stage = "gaussian_blur";
        for (DepthFrame& f : seq.frames) f = gaussian_blur(f);
        stage = "downscale";
        for (DepthFrame& f : seq.frames) f = downscale(f);
        stage = "subtract_background";
        seq = subtract_background(seq, kBackgroundFrames);
        stage = "zero_pad";
        return zero_pad(seq, kMaxModelFrames);
    } catch (const DegenerateInputError& e) {
        throw DegenerateInputError("preprocess[" + std::string(stage) + "]: " + e.what());
    } catch (const DataError& e) {
        throw DataError("preprocess[" + std::string(stage) + "]: " + e.what());
    }
}

}  // namespace tofgr
