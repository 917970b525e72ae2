#pragma once

#include "fgvc/detection_record.hpp"
#include "fgvc/region_gen.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace fgvc {

struct Thresholds {
    /// Training side: minimum IoU with ground truth for a predicted box to be kept.
    double tau1 = 0.6;
    /// Test side: a detection is valid only if its score is strictly greater.
    double tau2 = 0.3;

    void validate() const;
};

/// Per kind, the highest-scoring detection with score > tau2. Equal scores
/// prefer the smaller box, then the lexicographically smaller (x1, y1, x2, y2).
PartMap<Detection> select_valid_parts(std::span<const Detection> detections, double tau2);

/// select_valid_parts applied per image; images without detections are absent.
std::map<int, PartMap<Detection>> select_valid_parts_by_image(std::span<const Detection> detections, double tau2);

/// Keeps detections whose IoU with the same-kind ground-truth region is >= tau1.
std::vector<Detection> filter_training_boxes(std::span<const Detection> predicted, const PartRegionSet& ground_truth,
                                             double tau1);

struct PcpRow {
    PartKind kind = PartKind::Head;
    std::size_t localized = 0;
    std::size_t visible = 0;
    double pcp = 0.0;
};

/// Rows only for kinds with at least one ground-truth region, in PartKind order.
struct PcpReport {
    std::vector<PcpRow> rows;
    double iou_threshold = 0.5;

    const PcpRow* row(PartKind kind) const;
};

/// A ground-truth part counts as localized iff a selected detection of that
/// kind exists and its IoU with the ground truth is >= iou_threshold. The
/// denominator is every image where the ground-truth part exists, detected or
/// not. InvalidArgument unless 0 < iou_threshold < 1.
PcpReport compute_pcp(const std::map<int, PartMap<Detection>>& selected, std::span<const PartRegionSet> ground_truth,
                      double iou_threshold);

/// `#iou_threshold=<t>` then `part<TAB>localized<TAB>visible<TAB>pcp` rows.
std::string format_pcp_report(const PcpReport& report);

} // namespace fgvc
