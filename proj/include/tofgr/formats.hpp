#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tofgr/gesture.hpp"

namespace tofgr {

// Raw sequence container ("TOFG"), little-endian:
//   'T' 'O' 'F' 'G', version u16 = 1, width u16, height u16, fps f32,
//   frame_count u16, label u8 (0..5, 255 = unlabeled), participant u16,
//   then per frame: timestamp u32 (ms), width*height u16 depths in mm.
// Depths are stored in millimeters and converted to centimeter floats on
// load; writing quantizes to the nearest millimeter.
void write_tofg(const std::filesystem::path& path, const GestureSequence& seq);
GestureSequence read_tofg(const std::filesystem::path& path);

// Preprocessed tensor container ("TOFP"): eight little-endian u32 values
//   [packed magic 'TOFP', version = 1, ndims = 3, dim0, dim1, dim2,
//    valid_frames, reserved 0]
// followed by dim0*dim1*dim2 f32 values.
void write_tofp(const std::filesystem::path& path, const PreprocessedSequence& seq);
PreprocessedSequence read_tofp(const std::filesystem::path& path);

/// FNV-1a 64-bit over a byte range.
std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

std::uint64_t file_checksum(const std::filesystem::path& path);

/// Quantizes a centimeter depth to the millimeter grid the TOFG container
/// stores, so in-memory sequences match their file round-trip bit-exactly.
float quantize_depth_cm(float cm);

}  // namespace tofgr
