#include "fgvc/detection.hpp"

#include "fgvc/error.hpp"
#include "fgvc/text.hpp"

#include <cmath>

namespace fgvc {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

// Strict weak "a is preferred over b" for selection among equal kinds.
bool preferred(const Detection& a, const Detection& b)
{
    if (a.score != b.score)
        return a.score > b.score;
    if (a.box.area() != b.box.area())
        return a.box.area() < b.box.area();
    return lex_less(a.box, b.box);
}

} // namespace

void Thresholds::validate() const
{
    if (!in_unit(tau1))
        raise(ErrorKind::ConfigError, "tau1 must be in [0, 1]");
    if (!in_unit(tau2))
        raise(ErrorKind::ConfigError, "tau2 must be in [0, 1]");
}

PartMap<Detection> select_valid_parts(std::span<const Detection> detections, double tau2)
{
    PartMap<Detection> best;
    for (const Detection& d : detections) {
        if (!(d.score > tau2))
            continue;
        auto& slot = best[d.kind];
        if (!slot || preferred(d, *slot))
            slot = d;
    }
    return best;
}

std::map<int, PartMap<Detection>> select_valid_parts_by_image(std::span<const Detection> detections, double tau2)
{
    std::map<int, std::vector<Detection>> grouped;
    for (const Detection& d : detections)
        grouped[d.image_id].push_back(d);
    std::map<int, PartMap<Detection>> out;
    for (const auto& [id, dets] : grouped)
        out.emplace(id, select_valid_parts(dets, tau2));
    return out;
}

std::vector<Detection> filter_training_boxes(std::span<const Detection> predicted, const PartRegionSet& ground_truth,
                                             double tau1)
{
    std::vector<Detection> kept;
    for (const Detection& d : predicted) {
        const auto& gt = ground_truth.regions[d.kind];
        if (gt && iou(d.box, *gt) >= tau1)
            kept.push_back(d);
    }
    return kept;
}

const PcpRow* PcpReport::row(PartKind kind) const
{
    for (const auto& r : rows)
        if (r.kind == kind)
            return &r;
    return nullptr;
}

PcpReport compute_pcp(const std::map<int, PartMap<Detection>>& selected, std::span<const PartRegionSet> ground_truth,
                      double iou_threshold)
{
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
        raise(ErrorKind::InvalidArgument, "iou_threshold must be in (0, 1)");
    std::array<std::size_t, kNumPartKinds> localized{};
    std::array<std::size_t, kNumPartKinds> visible{};
    for (const PartRegionSet& gt : ground_truth) {
        const auto it = selected.find(gt.image_id);
        for (const PartKind k : kAllPartKinds) {
            const auto& truth = gt.regions[k];
            if (!truth)
                continue;
            ++visible[index_of(k)];
            if (it == selected.end())
                continue;
            const auto& det = it->second[k];
            if (det && iou(det->box, *truth) >= iou_threshold)
                ++localized[index_of(k)];
        }
    }
    PcpReport report;
    report.iou_threshold = iou_threshold;
    for (const PartKind k : kAllPartKinds) {
        const std::size_t v = visible[index_of(k)];
        if (v == 0)
            continue;
        const std::size_t l = localized[index_of(k)];
        report.rows.push_back({k, l, v, static_cast<double>(l) / static_cast<double>(v)});
    }
    return report;
}

std::string format_pcp_report(const PcpReport& report)
{
    std::string out = "#iou_threshold=" + text::format_shortest(report.iou_threshold) + "\n";
    for (const auto& r : report.rows) {
        out += name_of(r.kind);
        out += '\t' + std::to_string(r.localized) + '\t' + std::to_string(r.visible) + '\t'
            + text::format_fixed(r.pcp, 4) + '\n';
    }
    return out;
}

} // namespace fgvc
