#include "tofgr/formats.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace tofgr {

namespace {

constexpr std::uint16_t kTofgVersion = 1;
constexpr std::uint32_t kTofpVersion = 1;
constexpr std::uint8_t kUnlabeled = 255;

void put_bytes(std::string& buf, const void* p, std::size_t n) {
    buf.append(static_cast<const char*>(p), n);
}

template <typename T>
void put(std::string& buf, T v) {
    put_bytes(buf, &v, sizeof(v));
}

class Reader {
public:
    Reader(const std::filesystem::path& path) : path_(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open '" + path_ + "'");
        data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > data_.size()) {
            throw DataError("'" + path_ + "' is truncated");
        }
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    void get_raw(void* dst, std::size_t n) {
        if (pos_ + n > data_.size()) throw DataError("'" + path_ + "' is truncated");
        std::memcpy(dst, data_.data() + pos_, n);
        pos_ += n;
    }

    bool exhausted() const { return pos_ == data_.size(); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string data_;
    std::size_t pos_ = 0;
};

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to '" + path.string() + "'");
}

}  // namespace

float quantize_depth_cm(float cm) {
    float mm = std::round(cm * 10.0f);
    if (mm < 0.0f) mm = 0.0f;
    if (mm > 65535.0f) mm = 65535.0f;
    return mm / 10.0f;
}

void write_tofg(const std::filesystem::path& path, const GestureSequence& seq) {
    if (seq.frames.empty()) throw DataError("refusing to write an empty sequence");
    const int w = seq.frames.front().width;
    const int h = seq.frames.front().height;
    if (w <= 0 || h <= 0 || w > 65535 || h > 65535) throw DataError("bad frame size");
    if (seq.frames.size() > 65535) throw DataError("too many frames for the container");

    std::string buf;
    buf.reserve(19 + seq.frames.size() * (4 + static_cast<std::size_t>(w) * h * 2));
    put_bytes(buf, "TOFG", 4);
    put<std::uint16_t>(buf, kTofgVersion);
    put<std::uint16_t>(buf, static_cast<std::uint16_t>(w));
    put<std::uint16_t>(buf, static_cast<std::uint16_t>(h));
    put<float>(buf, seq.fps);
    put<std::uint16_t>(buf, static_cast<std::uint16_t>(seq.frames.size()));
    put<std::uint8_t>(buf, seq.label ? static_cast<std::uint8_t>(*seq.label) : kUnlabeled);
    put<std::uint16_t>(buf, static_cast<std::uint16_t>(seq.participant));

    for (const DepthFrame& f : seq.frames) {
        if (f.width != w || f.height != h) {
            throw DataError("frame size changes within the sequence");
        }
        put<std::uint32_t>(buf, f.timestamp_ms);
        for (float cm : f.depth) {
            float mm = std::round(cm * 10.0f);
            if (mm < 0.0f) mm = 0.0f;
            if (mm > 65535.0f) mm = 65535.0f;
            put<std::uint16_t>(buf, static_cast<std::uint16_t>(mm));
        }
    }
    write_file(path, buf);
}

GestureSequence read_tofg(const std::filesystem::path& path) {
    Reader r(path);
    char magic[4];
    r.get_raw(magic, 4);
    if (std::memcmp(magic, "TOFG", 4) != 0) {
        throw DataError("'" + r.path() + "': not a TOFG file (bad magic)");
    }
    const auto version = r.get<std::uint16_t>();
    if (version != kTofgVersion) {
        throw DataError("'" + r.path() + "': unsupported TOFG version " + std::to_string(version));
    }
    const int w = r.get<std::uint16_t>();
    const int h = r.get<std::uint16_t>();
    GestureSequence seq;
    seq.fps = r.get<float>();
    const int n = r.get<std::uint16_t>();
    const auto label = r.get<std::uint8_t>();
    if (label != kUnlabeled) {
        if (label >= kNumClasses) {
            throw DataError("'" + r.path() + "': label byte " + std::to_string(label) +
                            " out of range");
        }
        seq.label = static_cast<GestureClass>(label);
    }
    seq.participant = r.get<std::uint16_t>();
    if (w == 0 || h == 0) throw DataError("'" + r.path() + "': zero frame dimensions");

    seq.frames.resize(static_cast<std::size_t>(n));
    std::vector<std::uint16_t> mm(static_cast<std::size_t>(w) * h);
    std::uint32_t prev_ts = 0;
    for (int i = 0; i < n; ++i) {
        DepthFrame& f = seq.frames[static_cast<std::size_t>(i)];
        f.width = w;
        f.height = h;
        f.timestamp_ms = r.get<std::uint32_t>();
        if (i > 0 && f.timestamp_ms <= prev_ts) {
            throw DataError("'" + r.path() + "': timestamps not strictly increasing");
        }
        prev_ts = f.timestamp_ms;
        r.get_raw(mm.data(), mm.size() * 2);
        f.depth.resize(mm.size());
        for (std::size_t p = 0; p < mm.size(); ++p) {
            f.depth[p] = static_cast<float>(mm[p]) / 10.0f;
        }
    }
    if (!r.exhausted()) throw DataError("'" + r.path() + "': trailing bytes");
    return seq;
}

void write_tofp(const std::filesystem::path& path, const PreprocessedSequence& seq) {
    std::string buf;
    const std::uint32_t header[8] = {
        0x50464F54u,  // 'TOFP' packed little-endian
        kTofpVersion,
        3,
        PreprocessedSequence::kFrames,
        PreprocessedSequence::kHeight,
        PreprocessedSequence::kWidth,
        static_cast<std::uint32_t>(seq.valid_frames),
        0,
    };
    put_bytes(buf, header, sizeof(header));
    put_bytes(buf, seq.data.data(), seq.data.size() * sizeof(float));
    write_file(path, buf);
}

PreprocessedSequence read_tofp(const std::filesystem::path& path) {
    Reader r(path);
    std::uint32_t header[8];
    r.get_raw(header, sizeof(header));
    if (header[0] != 0x50464F54u) {
        throw DataError("'" + r.path() + "': not a TOFP file (bad magic)");
    }
    if (header[1] != kTofpVersion) {
        throw DataError("'" + r.path() + "': unsupported TOFP version");
    }
    if (header[2] != 3 || header[3] != PreprocessedSequence::kFrames ||
        header[4] != PreprocessedSequence::kHeight || header[5] != PreprocessedSequence::kWidth) {
        throw DataError("'" + r.path() + "': unexpected tensor dimensions");
    }
    PreprocessedSequence seq;
    if (header[6] > PreprocessedSequence::kFrames) {
        throw DataError("'" + r.path() + "': valid_frames exceeds frame count");
    }
    seq.valid_frames = static_cast<int>(header[6]);
    r.get_raw(seq.data.data(), seq.data.size() * sizeof(float));
    if (!r.exhausted()) throw DataError("'" + r.path() + "': trailing bytes");
    return seq;
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for checksum");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    }
    return h;
}

const char* to_string(GestureClass c) {
    switch (c) {
        case GestureClass::pointing: return "pointing";
        case GestureClass::two_fingers: return "two_fingers";
        case GestureClass::rotate_cw: return "rotate_cw";
        case GestureClass::rotate_ccw: return "rotate_ccw";
        case GestureClass::swipe_left: return "swipe_left";
        case GestureClass::swipe_right: return "swipe_right";
    }
    return "?";
}

GestureClass gesture_class_from_string(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i) {
        const auto c = static_cast<GestureClass>(i);
        if (name == to_string(c)) return c;
    }
    throw DataError("unknown gesture class '" + name + "'");
}

GestureClass gesture_class_from_index(int idx) {
    if (idx < 0 || idx >= kNumClasses) {
        throw DataError("gesture class index " + std::to_string(idx) + " out of range");
    }
    return static_cast<GestureClass>(idx);
}

}  // namespace tofgr
