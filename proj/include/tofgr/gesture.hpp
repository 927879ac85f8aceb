#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tofgr/errors.hpp"

namespace tofgr {

/// The six gesture classes, encoded 0..5 in this order everywhere
/// (files, labels, confusion matrices).
enum class GestureClass : std::uint8_t {
    pointing = 0,
    two_fingers = 1,
    rotate_cw = 2,
    rotate_ccw = 3,
    swipe_left = 4,
    swipe_right = 5,
};

inline constexpr int kNumClasses = 6;

const char* to_string(GestureClass c);
GestureClass gesture_class_from_string(const std::string& name);
GestureClass gesture_class_from_index(int idx);

/// One depth image. Depth is centimeters; 0 marks an invalid pixel
/// (sensor no-return or out-of-range). Mid-pipeline the same container
/// holds transformed values that are no longer distances.
struct DepthFrame {
    int width = 0;
    int height = 0;
    std::uint32_t timestamp_ms = 0;
    std::vector<float> depth;  // height*width, row-major

    float at(int y, int x) const { return depth[static_cast<std::size_t>(y) * width + x]; }
    float& at(int y, int x) { return depth[static_cast<std::size_t>(y) * width + x]; }
};

/// An ordered recording of depth frames; the unit of classification.
struct GestureSequence {
    std::vector<DepthFrame> frames;
    float fps = 0.0f;
    std::optional<GestureClass> label;
    int participant = -1;
};

/// Fixed-size model input: 70 frames of 60x80, zero-padded at the end.
struct PreprocessedSequence {
    static constexpr int kFrames = 70;
    static constexpr int kHeight = 60;
    static constexpr int kWidth = 80;

    std::vector<float> data;  // kFrames*kHeight*kWidth, row-major [t][y][x]
    int valid_frames = 0;

    PreprocessedSequence()
        : data(static_cast<std::size_t>(kFrames) * kHeight * kWidth, 0.0f) {}

    float at(int t, int y, int x) const {
        return data[(static_cast<std::size_t>(t) * kHeight + y) * kWidth + x];
    }
    float& at(int t, int y, int x) {
        return data[(static_cast<std::size_t>(t) * kHeight + y) * kWidth + x];
    }
};

}  // namespace tofgr
