#pragma once

#include "tofgr/gesture.hpp"

namespace tofgr {

// Raw -> model-input transformation. Stages run in this order:
//   resample_to_fps(12) -> truncate(76) -> clamp_roi -> standardize ->
//   gaussian_blur -> downscale -> subtract_background(6) -> zero_pad(70)
// The truncation bound is 76 so that dropping the 6 background frames
// leaves at most 70. Padding happens last so zero frames never enter the
// background estimate or the sequence statistics.

inline constexpr int kTargetFps = 12;
inline constexpr int kMaxModelFrames = 70;
inline constexpr int kBackgroundFrames = 6;
inline constexpr int kTruncateBound = kMaxModelFrames + kBackgroundFrames;
inline constexpr float kRoiMinCm = 12.0f;
inline constexpr float kRoiMaxCm = 500.0f;

/// Keeps the frames nearest to the uniform grid k/target_fps, each source
/// frame used at most once. Sequences whose nominal rate is already at or
/// below the target pass through unchanged.
GestureSequence resample_to_fps(const GestureSequence& seq, int target_fps = kTargetFps);

/// Keeps the first min(len, max_len) frames.
GestureSequence truncate(GestureSequence seq, int max_len);

/// Pixels outside [min_cm, max_cm] become 0 (invalid).
DepthFrame clamp_roi(DepthFrame frame, float min_cm = kRoiMinCm, float max_cm = kRoiMaxCm);

/// Z-scores every valid (non-zero) pixel with mean/stddev taken over all
/// valid pixels of the whole sequence. Invalid pixels stay 0. A sequence
/// with no valid pixel is a degenerate input.
GestureSequence standardize(const GestureSequence& seq);

/// 5x5 Gaussian, sigma 1, kernel normalized to sum 1, edges replicated.
DepthFrame gaussian_blur(const DepthFrame& frame);

/// Each output pixel is the mean of its 4x4 source block.
DepthFrame downscale(const DepthFrame& frame);

/// Background = per-pixel mean of the first n_bg frames; the remaining
/// frames become |frame - background|. Output is n_bg frames shorter.
GestureSequence subtract_background(const GestureSequence& seq, int n_bg = kBackgroundFrames);

/// Appends all-zero frames up to the model length and records the count of
/// real frames.
PreprocessedSequence zero_pad(const GestureSequence& seq, int target_len = kMaxModelFrames);

/// Runs the full stage chain. Errors carry the failing stage's name.
PreprocessedSequence preprocess_pipeline(const GestureSequence& raw);

}  // namespace tofgr
