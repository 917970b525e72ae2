#pragma once

#include "fgvc/dataset_io.hpp"
#include "fgvc/detection.hpp"
#include "fgvc/experiment.hpp"
#include "fgvc/features.hpp"
#include "fgvc/region_gen.hpp"
#include "fgvc/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace fgvc {

/// Everything a subcommand can be tuned with.
///
/// All randomness derives from `seed`: consumers take
/// derive_seed(seed, "<label>") with the labels "tie", "split", "svm",
/// "synth" and "synth-detections".
struct Config {
    RegionConfig region;
    Thresholds thresholds;
    double pcp_iou_threshold = 0.5;
    double svm_c = 10.0;
    int svm_epochs = 50;
    bool l2_normalize = false;
    std::size_t feature_dim = kDefaultFeatureDim;
    GroupOrder group_order = kCanonicalGroups;
    SplitRatios split;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    SynthConfig synth;
    SynthDetectionConfig synth_detections;

    /// Sub-seeds pushed into the nested configs.
    RegionConfig region_config() const;
    ClassifierParams classifier_params() const;
    SynthConfig synth_config() const;
    SynthDetectionConfig synth_detection_config() const;
    std::uint64_t split_seed() const;

    /// ConfigError naming the first out-of-range value.
    void validate() const;
};

/// `key = value` lines; `#` starts a comment. Unknown or repeated keys and
/// unparsable values raise ConfigError. Unset keys keep their defaults.
Config parse_config(std::string_view content, const std::string& source_name);
Config load_config(const std::filesystem::path& path);

} // namespace fgvc
