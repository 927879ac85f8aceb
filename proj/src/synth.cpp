#include "tofgr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tofgr/formats.hpp"

namespace tofgr {

namespace {

constexpr int kRawWidth = 320;
constexpr int kRawHeight = 240;
constexpr double kRawFps = 24.0;
constexpr float kBackgroundCm = 60.0f;

struct HandPose {
    double cx = 0.0;
    double cy = 0.0;
    int fingers = 0;        // capsules extending up from the palm
    double finger_spread = 0.0;
};

double lerp(double a, double b, double s) { return a + (b - a) * s; }

void paint_ellipse(DepthFrame& f, double cx, double cy, double rx, double ry, float depth) {
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
    const int y1 = std::min(f.height - 1, static_cast<int>(std::ceil(cy + ry)));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
    const int x1 = std::min(f.width - 1, static_cast<int>(std::ceil(cx + rx)));
    for (int y = y0; y <= y1; ++y) {
        const double dy = (y - cy) / ry;
        for (int x = x0; x <= x1; ++x) {
            const double dx = (x - cx) / rx;
            if (dx * dx + dy * dy <= 1.0 && depth < f.at(y, x)) f.at(y, x) = depth;
        }
    }
}

void paint_capsule(DepthFrame& f, double x0, double y0, double x1, double y1, double radius,
                   float depth) {
    const int by0 = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - radius)));
    const int by1 = std::min(f.height - 1, static_cast<int>(std::ceil(std::max(y0, y1) + radius)));
    const int bx0 = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - radius)));
    const int bx1 = std::min(f.width - 1, static_cast<int>(std::ceil(std::max(x0, x1) + radius)));
    const double vx = x1 - x0;
    const double vy = y1 - y0;
    const double len2 = vx * vx + vy * vy;
    for (int y = by0; y <= by1; ++y) {
        for (int x = bx0; x <= bx1; ++x) {
            double t = len2 > 0.0 ? ((x - x0) * vx + (y - y0) * vy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double px = x0 + t * vx;
            const double py = y0 + t * vy;
            const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
            if (d2 <= radius * radius && depth < f.at(y, x)) f.at(y, x) = depth;
        }
    }
}

/// Paints forearm, palm and fingers at the given pose. Fingers point up
/// (toward -y); the forearm runs from the palm to below the bottom edge.
void paint_hand(DepthFrame& f, const HandPose& pose, const ParticipantStyle& style) {
    const double s = style.hand_scale;
    const float palm_depth = style.hover_depth;
    const float finger_depth = style.hover_depth - 1.5f;
    const float arm_depth = style.hover_depth + 4.0f;

    paint_capsule(f, pose.cx, pose.cy + 20.0 * s, pose.cx, f.height + 40.0, 13.0 * s, arm_depth);
    paint_ellipse(f, pose.cx, pose.cy, 26.0 * s, 30.0 * s, palm_depth);
    if (pose.fingers >= 1) {
        const double base_y = pose.cy - 24.0 * s;
        const double len = 32.0 * s;
        for (int i = 0; i < pose.fingers; ++i) {
            const double ang = pose.fingers == 1
                                   ? pose.finger_spread
                                   : pose.finger_spread + (i == 0 ? -0.28 : 0.28);
            const double base_x = pose.cx + std::sin(ang) * 8.0 * s;
            const double tip_x = base_x + std::sin(ang) * len;
            const double tip_y = base_y - std::cos(ang) * len;
            paint_capsule(f, base_x, base_y, tip_x, tip_y, 6.0 * s, finger_depth);
        }
    }
}

void mirror_horizontal(DepthFrame& f) {
    for (int y = 0; y < f.height; ++y) {
        float* row = f.depth.data() + static_cast<std::size_t>(y) * f.width;
        std::reverse(row, row + f.width);
    }
}

}  // namespace

ParticipantProfile make_participant(int id, std::uint64_t seed) {
    RngStream rng = RngStream(seed).derive("participant", static_cast<std::uint64_t>(id));
    ParticipantProfile p;
    p.id = id;
    p.style.hand_scale = rng.uniform_f(0.7f, 1.3f);
    p.style.speed = rng.uniform_f(0.6f, 1.5f);
    p.style.start_dx = rng.uniform_f(-20.0f, 20.0f);
    p.style.start_dy = rng.uniform_f(-20.0f, 20.0f);
    p.style.path_tilt = rng.uniform_f(-0.3f, 0.3f);
    p.style.depth_noise_sd = rng.uniform_f(0.5f, 3.0f);
    p.style.hover_depth = rng.uniform_f(25.0f, 45.0f);
    return p;
}

GestureSequence synth_sequence(const ParticipantProfile& profile, GestureClass gesture,
                               std::uint64_t seed, const SynthOptions& opts) {
    const ParticipantStyle& style = profile.style;

    // Directional pairs share one randomness stream keyed by the canonical
    // class: swipe_right is then the exact horizontal mirror of the same-seed
    // swipe_left, and the rotations trace time-reversed paths.
    const bool mirrored = gesture == GestureClass::swipe_right;
    const GestureClass rendered = mirrored ? GestureClass::swipe_left : gesture;
    const GestureClass canonical =
        gesture == GestureClass::rotate_ccw ? GestureClass::rotate_cw : rendered;
    RngStream rng = RngStream(seed).derive("sequence", static_cast<std::uint64_t>(profile.id),
                                           static_cast<std::uint64_t>(canonical));

    const double lead_in_s = 0.55 + 0.15 * rng.uniform();
    const double active_s = (1.0 + rng.uniform()) / style.speed;
    const double total_s = lead_in_s + active_s;
    const int n_frames = std::max(8, static_cast<int>(std::lround(total_s * kRawFps)));

    // gesture geometry
    const double jx = rng.uniform(-6.0, 6.0);
    const double jy = rng.uniform(-6.0, 6.0);
    const double cx0 = kRawWidth / 2.0 + style.start_dx + jx;
    const double cy0 = kRawHeight / 2.0 + 8.0 + style.start_dy + jy;
    const double tilt = style.path_tilt;
    const double cos_t = std::cos(tilt);
    const double sin_t = std::sin(tilt);
    const double theta0 = rng.uniform(0.0, 6.283185307179586);
    const double wobble_phase = rng.uniform(0.0, 6.283185307179586);
    const double radius = 26.0 * (0.85 + 0.3 * rng.uniform()) * style.hand_scale;
    const double sweep = 150.0 + 40.0 * rng.uniform();

    // path offset relative to (cx0, cy0) during the gesture phase, before tilt
    auto gesture_offset = [&](double s, HandPose& pose) {
        double ox = 0.0;
        double oy = 0.0;
        switch (rendered) {
            case GestureClass::pointing:
            case GestureClass::two_fingers: {
                ox = 4.0 * std::sin(2.0 * 6.2831853 * s + wobble_phase);
                oy = 3.0 * std::sin(1.5 * 6.2831853 * s + 2.0 * wobble_phase);
                pose.fingers = rendered == GestureClass::pointing ? 1 : 2;
                break;
            }
            case GestureClass::rotate_cw:
            case GestureClass::rotate_ccw: {
                const double dir = rendered == GestureClass::rotate_cw ? 1.0 : -1.0;
                const double th = theta0 + dir * 6.283185307179586 * s;
                ox = radius * std::cos(th);
                oy = radius * std::sin(th);
                pose.fingers = 0;  // closed fist circling
                break;
            }
            case GestureClass::swipe_left:
            case GestureClass::swipe_right: {
                ox = sweep * (0.5 - s);  // right to left
                oy = 0.0;
                pose.fingers = 0;
                break;
            }
        }
        pose.cx = cx0 + cos_t * ox - sin_t * oy;
        pose.cy = cy0 + sin_t * ox + cos_t * oy;
    };

    GestureSequence seq;
    seq.fps = static_cast<float>(kRawFps);
    seq.label = gesture;
    seq.participant = profile.id;
    seq.frames.reserve(static_cast<std::size_t>(n_frames));

    const double enter_frac = 0.18;
    const double exit_frac = 0.18;
    for (int i = 0; i < n_frames; ++i) {
        const double t = i / kRawFps;
        DepthFrame f;
        f.width = kRawWidth;
        f.height = kRawHeight;
        f.timestamp_ms = static_cast<std::uint32_t>(std::lround(i * 1000.0 / kRawFps));
        f.depth.assign(static_cast<std::size_t>(kRawWidth) * kRawHeight, kBackgroundCm);

        if (t >= lead_in_s) {
            const double a = std::min(1.0, (t - lead_in_s) / active_s);
            HandPose pose;
            if (a < enter_frac) {
                HandPose target;
                gesture_offset(0.0, target);
                const double rise = a / enter_frac;
                pose = target;
                pose.cy = lerp(kRawHeight + 60.0, target.cy, rise);
                pose.cx = lerp(target.cx, target.cx, rise);
            } else if (a > 1.0 - exit_frac) {
                HandPose last;
                gesture_offset(1.0, last);
                const double sink = (a - (1.0 - exit_frac)) / exit_frac;
                pose = last;
                pose.cy = lerp(last.cy, kRawHeight + 60.0, sink);
            } else {
                const double s = (a - enter_frac) / (1.0 - enter_frac - exit_frac);
                gesture_offset(s, pose);
            }
            pose.finger_spread = tilt * 0.5;
            paint_hand(f, pose, style);
        }

        if (opts.noise) {
            RngStream noise = rng.derive("noise", static_cast<std::uint64_t>(i));
            for (float& d : f.depth) {
                d += static_cast<float>(noise.normal(0.0, style.depth_noise_sd));
            }
        }
        if (mirrored) mirror_horizontal(f);
        for (float& d : f.depth) d = quantize_depth_cm(d);
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

// ---------------------------------------------------------------------------
// dataset assembly
// ---------------------------------------------------------------------------

const char* to_string(SplitSet s) {
    switch (s) {
        case SplitSet::train: return "train";
        case SplitSet::validation: return "validation";
        case SplitSet::adaptation: return "adaptation";
        case SplitSet::adapt_val: return "adapt_val";
        case SplitSet::evaluation: return "evaluation";
        case SplitSet::extended: return "extended";
    }
    return "?";
}

SplitSet split_set_from_string(const std::string& name) {
    for (SplitSet s : {SplitSet::train, SplitSet::validation, SplitSet::adaptation,
                       SplitSet::adapt_val, SplitSet::evaluation, SplitSet::extended}) {
        if (name == to_string(s)) return s;
    }
    throw DataError("unknown split set '" + name + "'");
}

std::vector<int> DatasetSplit::ubm_ids() const {
    std::vector<int> out;
    for (const auto& p : participants) {
        if (p.group == ParticipantGroup::UBM) out.push_back(p.id);
    }
    return out;
}

std::vector<int> DatasetSplit::as_ids() const {
    std::vector<int> out;
    for (const auto& p : participants) {
        if (p.group == ParticipantGroup::AS) out.push_back(p.id);
    }
    return out;
}

const ParticipantProfile& DatasetSplit::profile(int participant) const {
    for (const auto& p : participants) {
        if (p.id == participant) return p;
    }
    throw DataError("unknown participant " + std::to_string(participant));
}

std::vector<SeqRef> DatasetSplit::ubm_train_refs() const {
    std::vector<SeqRef> out;
    for (int id : ubm_ids()) {
        const auto& s = by_participant.at(id).train;
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

std::vector<SeqRef> DatasetSplit::ubm_validation_refs() const {
    std::vector<SeqRef> out;
    for (int id : ubm_ids()) {
        const auto& s = by_participant.at(id).validation;
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

DatasetSplit build_dataset(int n_ubm, int n_as, int gestures_per_class, std::uint64_t seed) {
    if (n_ubm < 1 || n_as < 0 || gestures_per_class < 1) {
        throw DataError("build_dataset: counts must be at least 1 (n_as may be 0)");
    }
    DatasetSplit split;
    split.seed = seed;
    split.gestures_per_class = gestures_per_class;

    const int g = gestures_per_class;
    const int n_val = static_cast<int>(std::floor(g * 0.2));
    const int n_train = g - n_val;
    const int n_adapt_val = static_cast<int>(std::floor(g * 0.2));
    const int n_eval = static_cast<int>(std::floor(g * 0.3));
    const int n_adapt = g - n_adapt_val - n_eval;  // remainder goes to the largest set

    for (int id = 0; id < n_ubm + n_as; ++id) {
        ParticipantProfile p = make_participant(id, seed);
        p.group = id < n_ubm ? ParticipantGroup::UBM : ParticipantGroup::AS;
        split.participants.push_back(p);
        ParticipantSplit ps;
        for (int cls = 0; cls < kNumClasses; ++cls) {
            const auto gc = static_cast<GestureClass>(cls);
            for (int idx = 0; idx < g; ++idx) {
                const SeqRef ref{id, gc, idx};
                if (p.group == ParticipantGroup::UBM) {
                    (idx < n_train ? ps.train : ps.validation).push_back(ref);
                } else if (idx < n_adapt) {
                    ps.adaptation.push_back(ref);
                } else if (idx < n_adapt + n_adapt_val) {
                    ps.adapt_val.push_back(ref);
                } else {
                    ps.evaluation.push_back(ref);
                }
            }
        }
        split.by_participant.emplace(id, std::move(ps));
    }
    return split;
}

void add_extended_pool(DatasetSplit& split, int per_class) {
    if (per_class < 1) throw DataError("extended pool size must be at least 1");
    for (const auto& p : split.participants) {
        if (p.group != ParticipantGroup::AS) continue;
        auto& ps = split.by_participant.at(p.id);
        ps.extended.clear();
        for (int cls = 0; cls < kNumClasses; ++cls) {
            for (int idx = 0; idx < per_class; ++idx) {
                ps.extended.push_back(
                    SeqRef{p.id, static_cast<GestureClass>(cls), split.gestures_per_class + idx});
            }
        }
    }
}

std::uint64_t sequence_seed(std::uint64_t dataset_seed, const SeqRef& ref) {
    return RngStream(dataset_seed)
        .derive("seq", static_cast<std::uint64_t>(ref.participant),
                static_cast<std::uint64_t>(ref.label), static_cast<std::uint64_t>(ref.index))
        .next_u64();
}

GestureSequence render_ref(const DatasetSplit& split, const SeqRef& ref,
                           const SynthOptions& opts) {
    return synth_sequence(split.profile(ref.participant), ref.label,
                          sequence_seed(split.seed, ref), opts);
}

std::vector<GestureSequence> extended_pool(const ParticipantProfile& profile, int per_class,
                                           std::uint64_t dataset_seed, int base_count) {
    std::vector<GestureSequence> out;
    out.reserve(static_cast<std::size_t>(per_class) * kNumClasses);
    for (int cls = 0; cls < kNumClasses; ++cls) {
        for (int idx = 0; idx < per_class; ++idx) {
            const SeqRef ref{profile.id, static_cast<GestureClass>(cls), base_count + idx};
            out.push_back(synth_sequence(profile, ref.label, sequence_seed(dataset_seed, ref)));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// on-disk layout
// ---------------------------------------------------------------------------

std::filesystem::path tofg_path(const std::filesystem::path& root, const SeqRef& ref) {
    return root / std::to_string(ref.participant) / to_string(ref.label) /
           (std::to_string(ref.index) + ".tofg");
}

std::filesystem::path tofp_path(const std::filesystem::path& root, const SeqRef& ref) {
    return root / std::to_string(ref.participant) / to_string(ref.label) /
           (std::to_string(ref.index) + ".tofp");
}

void write_split_manifest(const std::filesystem::path& path, const DatasetSplit& split) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
    out << "participant,class,index,set\n";
    for (const auto& p : split.participants) {
        const ParticipantSplit& ps = split.by_participant.at(p.id);
        auto dump = [&](const std::vector<SeqRef>& refs, SplitSet set) {
            for (const SeqRef& r : refs) {
                out << r.participant << ',' << to_string(r.label) << ',' << r.index << ','
                    << to_string(set) << '\n';
            }
        };
        dump(ps.train, SplitSet::train);
        dump(ps.validation, SplitSet::validation);
        dump(ps.adaptation, SplitSet::adaptation);
        dump(ps.adapt_val, SplitSet::adapt_val);
        dump(ps.evaluation, SplitSet::evaluation);
        dump(ps.extended, SplitSet::extended);
    }
    if (!out) throw DataError("short write to manifest '" + path.string() + "'");
}

std::vector<ManifestRow> read_split_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "participant,class,index,set") {
        throw DataError("manifest '" + path.string() + "' has an unexpected header");
    }
    std::vector<ManifestRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string pid, cls, idx, set;
        if (!std::getline(ls, pid, ',') || !std::getline(ls, cls, ',') ||
            !std::getline(ls, idx, ',') || !std::getline(ls, set)) {
            throw DataError("manifest '" + path.string() + "': bad row '" + line + "'");
        }
        ManifestRow row;
        row.ref.participant = std::stoi(pid);
        row.ref.label = gesture_class_from_string(cls);
        row.ref.index = std::stoi(idx);
        row.set = split_set_from_string(set);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tofgr
