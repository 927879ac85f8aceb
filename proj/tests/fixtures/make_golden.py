#!/usr/bin/env python3
"""Reference implementation of the preprocessing chain.

Generates the committed golden pair for the pipeline test:
  golden_raw.tofg  -- a deterministic synthetic 320x240 depth recording
  golden_pre.tofp  -- the preprocessed 70x60x80 tensor produced by THIS script

The script is an independent reimplementation of the pipeline, written to the
same arithmetic contract (double accumulation in the documented order, float32
at stage outputs), so the library must match its output bit for bit.

Run from the repository root:  python3 tests/fixtures/make_golden.py
"""

import math
import os
import struct

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))

W, H = 320, 240
FPS = 24.0
N_FRAMES = 48
MOTION_START = 14  # raw index; resampled index 7, after the 6 background frames

TARGET_FPS = 12
TRUNCATE = 76
N_BG = 6
ROI_MIN, ROI_MAX = 12.0, 500.0


# ---------------------------------------------------------------------------
# raw sequence construction (depths in u16 millimeters)
# ---------------------------------------------------------------------------

def build_raw_frames():
    frames = []
    yy, xx = np.mgrid[0:H, 0:W]
    for i in range(N_FRAMES):
        # static background at ~60 cm with a deterministic speckle pattern
        speckle = ((7 * xx + 13 * yy + 31 * i) % 11).astype(np.int64) - 5
        depth = 600 + speckle  # mm
        # fixed out-of-range strips exercising the ROI clamp
        depth[:, 0:3] = 8000   # 800 cm, beyond the ROI
        depth[0:2, :] = 50     # 5 cm, in front of the ROI
        if i >= MOTION_START:
            k = i - MOTION_START
            cx = 60 + 6 * k
            cy = 120 + (k % 5) - 2
            depth[cy - 22:cy + 22, cx:cx + 46] = 330 + (k % 7)  # hand-like block at ~33 cm
            depth[cy - 40:cy - 28, cx + 10:cx + 20] = 325       # a protruding finger
        frames.append(depth.astype(np.uint16))
    return frames


def timestamps():
    return [int(round(i * 1000.0 / FPS)) for i in range(N_FRAMES)]


def write_tofg(path, frames, ts, label, participant):
    with open(path, "wb") as f:
        f.write(b"TOFG")
        f.write(struct.pack("<HHH", 1, W, H))
        f.write(struct.pack("<f", FPS))
        f.write(struct.pack("<HBH", len(frames), label, participant))
        for i, frame in enumerate(frames):
            f.write(struct.pack("<I", ts[i]))
            f.write(frame.astype("<u2").tobytes())


# ---------------------------------------------------------------------------
# reference pipeline
# ---------------------------------------------------------------------------

def load_cm(frames):
    # u16 mm -> float32 cm, same rounding as the loader
    return [(frame.astype(np.float32) / np.float32(10.0)) for frame in frames]


def resample(frames, ts):
    step = 1000.0 / TARGET_FPS
    last = float(ts[-1])
    out = []
    nxt = 0
    k = 0
    while True:
        grid = k * step
        if grid > last or nxt >= len(frames):
            break
        j = nxt
        while j + 1 < len(frames) and abs(float(ts[j + 1]) - grid) < abs(float(ts[j]) - grid):
            j += 1
        out.append(frames[j])
        nxt = j + 1
        k += 1
    return out


def clamp_roi(frames):
    out = []
    for f in frames:
        g = f.copy()
        g[(g < np.float32(ROI_MIN)) | (g > np.float32(ROI_MAX))] = np.float32(0.0)
        out.append(g)
    return out


def standardize(frames):
    # sequential double accumulation in frame order, row-major within a frame
    total = 0.0
    count = 0
    for f in frames:
        for v in f.reshape(-1).tolist():
            if v != 0.0:
                total += v
                count += 1
    assert count > 0
    mean = total / count
    sq = 0.0
    for f in frames:
        for v in f.reshape(-1).tolist():
            if v != 0.0:
                d = v - mean
                sq += d * d
    sd = math.sqrt(sq / count)
    out = []
    for f in frames:
        g64 = f.astype(np.float64)
        valid = f != np.float32(0.0)
        if sd < 1e-6:
            z = np.zeros_like(g64)
        else:
            z = (g64 - mean) / sd
        g = np.where(valid, z.astype(np.float32), np.float32(0.0))
        out.append(g)
    return out


def blur_kernel():
    k = [[0.0] * 5 for _ in range(5)]
    norm = 0.0
    for dy in range(-2, 3):
        for dx in range(-2, 3):
            v = math.exp(-(dx * dx + dy * dy) / 2.0)
            k[dy + 2][dx + 2] = v
            norm += v
    for row in range(5):
        for col in range(5):
            k[row][col] /= norm
    return k


def gaussian_blur(frames):
    kern = blur_kernel()
    out = []
    for f in frames:
        padded = np.pad(f, 2, mode="edge").astype(np.float64)
        acc = np.zeros((f.shape[0], f.shape[1]), dtype=np.float64)
        # accumulate taps in the same (dy, dx) order as the library
        for dy in range(5):
            for dx in range(5):
                acc = acc + kern[dy][dx] * padded[dy:dy + f.shape[0], dx:dx + f.shape[1]]
        out.append(acc.astype(np.float32))
    return out


def downscale(frames):
    out = []
    for f in frames:
        h2, w2 = f.shape[0] // 4, f.shape[1] // 4
        acc = np.zeros((h2, w2), dtype=np.float64)
        for dy in range(4):
            for dx in range(4):
                acc = acc + f[dy::4, dx::4].astype(np.float64)
        out.append((acc / 16.0).astype(np.float32))
    return out


def subtract_background(frames):
    bg = np.zeros_like(frames[0], dtype=np.float64)
    for i in range(N_BG):
        bg = bg + frames[i].astype(np.float64)
    bg = bg / float(N_BG)
    out = []
    for f in frames[N_BG:]:
        out.append(np.abs(f.astype(np.float64) - bg).astype(np.float32))
    return out


def zero_pad(frames):
    tensor = np.zeros((70, 60, 80), dtype=np.float32)
    for t, f in enumerate(frames):
        tensor[t] = f
    return tensor, len(frames)


def write_tofp(path, tensor, valid):
    with open(path, "wb") as f:
        f.write(struct.pack("<8I", 0x50464F54, 1, 3, 70, 60, 80, valid, 0))
        f.write(tensor.astype("<f4").tobytes())


def main():
    raw = build_raw_frames()
    ts = timestamps()
    write_tofg(os.path.join(HERE, "golden_raw.tofg"), raw, ts, label=4, participant=3)

    frames = load_cm(raw)
    frames = resample(frames, ts)
    frames = frames[:TRUNCATE]
    frames = clamp_roi(frames)
    frames = standardize(frames)
    frames = gaussian_blur(frames)
    frames = downscale(frames)
    frames = subtract_background(frames)
    tensor, valid = zero_pad(frames)
    write_tofp(os.path.join(HERE, "golden_pre.tofp"), tensor, valid)
    print(f"golden_raw.tofg: {len(raw)} frames; golden_pre.tofp: valid={valid}")


if __name__ == "__main__":
    main()
