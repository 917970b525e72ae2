#pragma once

#include "fgvc/dataset_io.hpp"
#include "fgvc/detection_record.hpp"
#include "fgvc/features.hpp"
#include "fgvc/region_gen.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace fgvc {

struct SynthConfig {
    int num_classes = 4;
    int images_per_class = 10;
    /// Image width; height is round(0.75 * width).
    int image_size = 200;
    double jitter_px = 0.0;
    double score_noise = 0.0;
    /// Probability that all keypoints of a part are invisible in an image.
    double part_dropout = 0.0;
    /// Per-part overrides of part_dropout; values may be 1.
    PartMap<double> part_dropout_override;
    int feature_dim = 16;
    std::vector<Group> signal_groups{Group::Head, Group::Wing};
    std::uint64_t seed = 0;

    double dropout_for(PartKind kind) const;
    void validate() const;
};

/// Template bird layout, one pose per image: random scale and translation plus
/// +-1 template-unit keypoint jitter, rounded to 0.1 px. Draws come from
/// Rng(derive_seed(seed, "dataset")) in image order, a fixed number per image.
Dataset make_synth_dataset(const SynthConfig& cfg);

/// make_synth_dataset written in the dataset_io layout.
void synth_dataset(const SynthConfig& cfg, const std::filesystem::path& root);

struct SynthDetectionConfig {
    double jitter_px = 0.0;
    double score_noise = 0.0;
    /// Horizontal translation as a fraction of each box's width, applied before jitter.
    double shift_fraction = 0.0;
    /// When set, one extra detection per region at this score, displaced by one box width.
    std::optional<double> distractor_score;
    std::uint64_t seed = 0;
};

/// One detection per ground-truth region: corners perturbed independently by
/// uniform(-jitter, +jitter), score = clamp(1 - uniform(0, score_noise), 0, 1).
/// A corner pair that would invert keeps its unperturbed values.
std::vector<Detection> synth_detections(std::span<const PartRegionSet> region_sets, const SynthDetectionConfig& cfg);

/// Features for every image: original and cropped always, part groups only
/// where the part has a region. Each component is uniform(-0.1, 0.1); signal
/// groups add 2.0 at index (class rank mod D).
FeatureStore synth_features(const Dataset& dataset, std::span<const PartRegionSet> region_sets,
                            const SynthConfig& cfg);

} // namespace fgvc
