#pragma once

#include "fgvc/detection_record.hpp"
#include "fgvc/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fgvc {

struct ImageRecord {
    int image_id = 0;
    std::string relative_path;
    int class_id = 0;
    int width = 0;
    int height = 0;

    Box bounds() const { return Box(0.0, 0.0, width, height); }

    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct KeyPoint {
    int image_id = 0;
    int part_id = 0;
    double x = 0.0;
    double y = 0.0;
    bool visible = false;

    Point point() const noexcept { return {x, y}; }

    friend bool operator==(const KeyPoint&, const KeyPoint&) = default;
};

/// A fully cross-referenced CUB-style dataset. Images are ordered by id and
/// keypoints by (image_id, part_id), so the keypoints of one image are
/// contiguous.
struct Dataset {
    std::vector<ImageRecord> images;
    std::vector<KeyPoint> keypoints;
    std::map<int, std::string> class_names;
    std::map<int, std::string> part_names;

    const ImageRecord* find_image(int image_id) const;
    std::span<const KeyPoint> keypoints_of(int image_id) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Reads images.txt, image_class_labels.txt, classes.txt, parts/parts.txt,
/// parts/part_locs.txt and the image_sizes.txt sidecar under `root`.
///
/// Malformed input is rejected, never repaired: MissingFile,
/// MalformedLine(file:line), DanglingReference and DuplicateId.
Dataset parse_dataset(const std::filesystem::path& root);

/// Writes the same six files; parse_dataset(write_dataset(d)) == d.
void write_dataset(const std::filesystem::path& root, const Dataset& dataset);

/// Sorts and cross-checks an in-memory dataset with the same rules the parser
/// applies.
void canonicalize_and_check(Dataset& dataset);

enum class Split : int { Train = 0, Validation = 1, Test = 2 };

struct SplitAssignment {
    int image_id = 0;
    Split split = Split::Train;

    friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

struct SplitRatios {
    double train = 0.5;
    double validation = 0.2;
    double test = 0.3;
};

/// Largest-remainder allocation of `n` items over the three ratios. Remainders
/// closer than 1e-9 count as equal and are resolved train, validation, test.
std::array<std::size_t, 3> largest_remainder(std::size_t n, const SplitRatios& ratios);

/// Stratified split. Within each class, image ids are sorted, shuffled with a
/// Fisher-Yates pass seeded by derive_seed(seed, class_id), and the first
/// counts[0] go to train, the next counts[1] to validation, the rest to test.
/// Result is ordered by image_id. BadRatios unless all ratios are positive
/// and sum to 1 within 1e-9.
std::vector<SplitAssignment> split_dataset(const Dataset& dataset, const SplitRatios& ratios, std::uint64_t seed);

std::string format_split(std::span<const SplitAssignment> split);
std::vector<SplitAssignment> parse_split_file(const std::filesystem::path& path);

/// image_class_labels.txt style `<image_id> <class_id>` map.
std::map<int, int> parse_labels_file(const std::filesystem::path& path);

/// `<image_id> <part_name> <score> <x1> <y1> <x2> <y2>` per line.
std::vector<Detection> parse_detections(const std::filesystem::path& path);
std::vector<Detection> parse_detections_text(std::string_view content, const std::string& source_name);
std::string format_detections(std::span<const Detection> detections);

} // namespace fgvc
