#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tofgr/gesture.hpp"
#include "tofgr/rng.hpp"

namespace tofgr {

// Procedural depth-gesture renderer plus dataset assembly. Sequences are
// 320x240 at 24 fps: a background plane at ~60 cm and a hand (forearm +
// palm + finger capsules) hovering nearer, following a class-specific
// trajectory that enters from and exits to the bottom edge. Every draw is
// keyed by (participant profile, class, sequence seed), so datasets are
// reproducible from a single root seed.

enum class ParticipantGroup { UBM, AS };

struct ParticipantStyle {
    float hand_scale;      // 0.7 .. 1.3
    float speed;           // 0.6 .. 1.5
    float start_dx;        // -20 .. 20 px
    float start_dy;        // -20 .. 20 px
    float path_tilt;       // -0.3 .. 0.3 rad
    float depth_noise_sd;  // 0.5 .. 3.0 cm
    float hover_depth;     // 25 .. 45 cm
};

struct ParticipantProfile {
    int id = -1;
    ParticipantStyle style{};
    ParticipantGroup group = ParticipantGroup::UBM;
};

ParticipantProfile make_participant(int id, std::uint64_t seed);

struct SynthOptions {
    bool noise = true;  // per-pixel depth noise; tests disable it for geometry checks
};

GestureSequence synth_sequence(const ParticipantProfile& profile, GestureClass gesture,
                               std::uint64_t seed, const SynthOptions& opts = {});

// ---------------------------------------------------------------------------
// dataset assembly
// ---------------------------------------------------------------------------

/// Reference to one generated sequence; (dataset seed, participant, class,
/// index) fully determines its pixels.
struct SeqRef {
    int participant = -1;
    GestureClass label = GestureClass::pointing;
    int index = -1;

    friend bool operator==(const SeqRef&, const SeqRef&) = default;
    friend auto operator<=>(const SeqRef&, const SeqRef&) = default;
};

enum class SplitSet { train, validation, adaptation, adapt_val, evaluation, extended };

const char* to_string(SplitSet s);
SplitSet split_set_from_string(const std::string& name);

struct ParticipantSplit {
    std::vector<SeqRef> train;
    std::vector<SeqRef> validation;
    std::vector<SeqRef> adaptation;
    std::vector<SeqRef> adapt_val;
    std::vector<SeqRef> evaluation;
    std::vector<SeqRef> extended;
};

struct DatasetSplit {
    std::uint64_t seed = 0;
    int gestures_per_class = 0;
    std::vector<ParticipantProfile> participants;  // UBM block first, then AS
    std::map<int, ParticipantSplit> by_participant;

    std::vector<int> ubm_ids() const;
    std::vector<int> as_ids() const;
    const ParticipantProfile& profile(int participant) const;

    /// All train (resp. validation) refs of UBM participants, participant-major.
    std::vector<SeqRef> ubm_train_refs() const;
    std::vector<SeqRef> ubm_validation_refs() const;
};

/// Generates profiles and the per-participant split references. UBM
/// participants carry train/validation (80/20); AS participants carry
/// adaptation/adapt_val/evaluation (50/20/30). Rounding: floor for the
/// smaller sets, remainder to the largest set. No rendering happens here.
DatasetSplit build_dataset(int n_ubm, int n_as, int gestures_per_class, std::uint64_t seed);

/// Adds `per_class` extra sequences per class to the given AS participants,
/// with indices (and therefore seeds) disjoint from the base pool.
void add_extended_pool(DatasetSplit& split, int per_class);

/// Renders extra labeled sequences for incremental experiments.
std::vector<GestureSequence> extended_pool(const ParticipantProfile& profile, int per_class,
                                           std::uint64_t dataset_seed, int base_count);

/// Deterministic per-sequence seed.
std::uint64_t sequence_seed(std::uint64_t dataset_seed, const SeqRef& ref);

/// Renders one referenced sequence.
GestureSequence render_ref(const DatasetSplit& split, const SeqRef& ref,
                           const SynthOptions& opts = {});

// ---------------------------------------------------------------------------
// on-disk layout
// ---------------------------------------------------------------------------

/// data/<participant>/<class>/<index>.tofg
std::filesystem::path tofg_path(const std::filesystem::path& root, const SeqRef& ref);
std::filesystem::path tofp_path(const std::filesystem::path& root, const SeqRef& ref);

/// One line per sequence: participant,class,index,set
void write_split_manifest(const std::filesystem::path& path, const DatasetSplit& split);

struct ManifestRow {
    SeqRef ref;
    SplitSet set = SplitSet::train;
};

std::vector<ManifestRow> read_split_manifest(const std::filesystem::path& path);

}  // namespace tofgr
