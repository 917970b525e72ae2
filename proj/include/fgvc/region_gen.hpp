#pragma once

#include "fgvc/dataset_io.hpp"
#include "fgvc/geometry.hpp"
#include "fgvc/parts.hpp"
#include "fgvc/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fgvc {

/// Sizing parameters for ground-truth part regions.
struct RegionConfig {
    /// Head padding: W = (1 + lambda_w) * W_mini, H = (1 + lambda_h) * H_mini.
    double lambda_w = 0.2;
    double lambda_h = 0.2;
    /// Breast uses the same padding rule with its own factors.
    double breast_lambda_w = 0.2;
    double breast_lambda_h = 0.2;
    /// Envelope side as a multiple of max(W_head, H_head).
    double rho_tail = 1.0;
    double rho_wing = 1.0;
    double rho_leg = 0.6;
    /// Side of the fallback square, as a fraction of min(image W, H).
    double head_fallback_fraction = 0.1;
    double center_crop_fraction = 0.875;
    std::uint64_t tie_seed = 0;

    double rho(PartKind kind) const;

    /// Throws ConfigError naming the first out-of-range field.
    void validate() const;
};

struct PartRegionSet {
    int image_id = 0;
    PartMap<Box> regions;

    friend bool operator==(const PartRegionSet&, const PartRegionSet&) = default;
};

/// Visible keypoints of `kind` (per the part-to-keypoint mapping) among an image's keypoints.
std::vector<Point> visible_points(std::span<const KeyPoint> keypoints, PartKind kind);

/// Pre-clip minimal-rectangle region for Head or Breast.
///
/// The minimal rectangle of the visible keypoints is scaled about its centre
/// by (1 + lambda). A degenerate rectangle (one point, or collinear points)
/// is replaced by a square of side max(fallback_fraction * min(W, H), extent)
/// centred on the extent, without padding. nullopt if nothing is visible.
std::optional<Box> minimal_region_unclipped(PartKind kind, std::span<const KeyPoint> keypoints,
                                            const Box& image_bounds, const RegionConfig& cfg);

std::optional<Box> head_region(std::span<const KeyPoint> keypoints, const Box& image_bounds, const RegionConfig& cfg);
std::optional<Box> breast_region(std::span<const KeyPoint> keypoints, const Box& image_bounds,
                                 const RegionConfig& cfg);

/// rho(kind) * max(W_head, H_head), or rho(kind) * fallback_fraction * min(W, H)
/// when there is no head region.
double envelope_side(PartKind kind, const std::optional<Box>& head_box, const Box& image_bounds,
                     const RegionConfig& cfg);

/// One pre-clip square per visible keypoint of a Tail, Wing or Leg part.
std::vector<Box> envelope_candidates_unclipped(PartKind kind, std::span<const KeyPoint> keypoints,
                                               const std::optional<Box>& head_box, const Box& image_bounds,
                                               const RegionConfig& cfg);

/// Clipped candidates; squares that clip to nothing are dropped.
std::vector<Box> envelope_region(PartKind kind, std::span<const KeyPoint> keypoints, const std::optional<Box>& head_box,
                                 const Box& image_bounds, const RegionConfig& cfg);

/// Picks the candidate with the smallest IoU against the union of the regions
/// already fixed for the image. Exact ties draw once from `tie_rng`.
/// EmptyCandidates for an empty list; a single candidate passes through
/// without consuming a draw.
Box eliminate_redundant(std::span<const Box> candidates, std::span<const Box> other_regions, Rng& tie_rng);

/// All five regions of one image, fixed in the order Head, Breast, Tail,
/// Wing, Leg. Ties draw from Rng(derive_seed(cfg.tie_seed, image_id)), so
/// each image is independent of the others.
PartRegionSet generate_region_set(const ImageRecord& image, std::span<const KeyPoint> keypoints,
                                  const RegionConfig& cfg);

/// generate_region_set over the whole dataset, ordered by image_id. The
/// output does not depend on `threads`.
std::vector<PartRegionSet> generate_region_sets(const Dataset& dataset, const RegionConfig& cfg,
                                                unsigned threads = 1);

/// Centred square of side center_crop_fraction * min(W, H).
Box center_crop(const ImageRecord& image, const RegionConfig& cfg);

/// `<image_id> <part> <x1> <y1> <x2> <y2>` lines, two decimals.
std::string format_region_sets(std::span<const PartRegionSet> sets);
std::vector<PartRegionSet> parse_region_sets(const std::filesystem::path& path);
std::vector<PartRegionSet> parse_region_sets_text(std::string_view content, const std::string& source_name);

/// Region-set format extended with `original` and `cropped` rows per image.
std::string format_crop_manifest(std::span<const ImageRecord> images, std::span<const PartRegionSet> sets,
                                 const RegionConfig& cfg);

struct YoloLabel {
    int class_index = 0;
    double x_center = 0.0;
    double y_center = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// One `<class> <xc/W> <yc/H> <w/W> <h/H>` line per present region, six decimals.
std::string format_yolo_labels(const PartRegionSet& set, const ImageRecord& image);
std::vector<YoloLabel> parse_yolo_labels(std::string_view content);
Box denormalize(const YoloLabel& label, int width, int height);

/// Label file path for an image: relative_path with its extension replaced by .txt.
std::filesystem::path yolo_label_path(const std::filesystem::path& out_dir, const ImageRecord& image);

/// Writes one label file per image (empty when no region is present).
void export_yolo_labels(std::span<const PartRegionSet> sets, const Dataset& dataset,
                        const std::filesystem::path& out_dir);

} // namespace fgvc
