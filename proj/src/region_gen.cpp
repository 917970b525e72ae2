#include "fgvc/region_gen.hpp"

#include "fgvc/error.hpp"
#include "fgvc/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

namespace fgvc {

namespace {

void require(bool ok, const char* field, const char* range)
{
    if (!ok)
        raise(ErrorKind::ConfigError, std::string(field) + " must be " + range);
}

// Sets are produced and parsed in image_id order.
const PartRegionSet* find_set(std::span<const PartRegionSet> sets, int image_id)
{
    const auto it = std::lower_bound(sets.begin(), sets.end(), image_id,
                                     [](const PartRegionSet& s, int id) { return s.image_id < id; });
    return (it != sets.end() && it->image_id == image_id) ? &*it : nullptr;
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }
bool unit_interval_open_closed(double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; }

std::string region_line(int image_id, std::string_view name, const Box& b)
{
    std::string line = std::to_string(image_id);
    line += ' ';
    line += name;
    for (const double v : {b.x1(), b.y1(), b.x2(), b.y2()}) {
        line += ' ';
        line += text::format_fixed(v, 2);
    }
    line += '\n';
    return line;
}

} // namespace

double RegionConfig::rho(PartKind kind) const
{
    switch (kind) {
    case PartKind::Tail: return rho_tail;
    case PartKind::Wing: return rho_wing;
    case PartKind::Leg: return rho_leg;
    case PartKind::Head:
    case PartKind::Breast: break;
    }
    raise(ErrorKind::InvalidArgument, "rho is defined for tail, wing and leg only");
}

void RegionConfig::validate() const
{
    require(finite_nonneg(lambda_w), "lambda_w", ">= 0");
    require(finite_nonneg(lambda_h), "lambda_h", ">= 0");
    require(finite_nonneg(breast_lambda_w), "breast_lambda_w", ">= 0");
    require(finite_nonneg(breast_lambda_h), "breast_lambda_h", ">= 0");
    require(finite_pos(rho_tail), "rho_tail", "> 0");
    require(finite_pos(rho_wing), "rho_wing", "> 0");
    require(finite_pos(rho_leg), "rho_leg", "> 0");
    require(unit_interval_open_closed(head_fallback_fraction), "head_fallback_fraction", "in (0, 1]");
    require(unit_interval_open_closed(center_crop_fraction), "center_crop_fraction", "in (0, 1]");
}

std::vector<Point> visible_points(std::span<const KeyPoint> keypoints, PartKind kind)
{
    const auto ids = keypoint_ids(kind);
    std::vector<Point> out;
    for (const KeyPoint& kp : keypoints)
        if (kp.visible && std::find(ids.begin(), ids.end(), kp.part_id) != ids.end())
            out.push_back(kp.point());
    return out;
}

std::optional<Box> minimal_region_unclipped(PartKind kind, std::span<const KeyPoint> keypoints,
                                            const Box& image_bounds, const RegionConfig& cfg)
{
    if (kind != PartKind::Head && kind != PartKind::Breast)
        raise(ErrorKind::InvalidArgument, "minimal-rectangle regions are head and breast only");
    const auto points = visible_points(keypoints, kind);
    if (points.empty())
        return std::nullopt;
    const double lw = kind == PartKind::Head ? cfg.lambda_w : cfg.breast_lambda_w;
    const double lh = kind == PartKind::Head ? cfg.lambda_h : cfg.breast_lambda_h;
    try {
        return scale_about_center(minimal_rect(points), 1.0 + lw, 1.0 + lh);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegeneratePointSet)
            throw;
    }
    double x1 = points.front().x, x2 = x1, y1 = points.front().y, y2 = y1;
    for (const Point& p : points) {
        x1 = std::min(x1, p.x);
        x2 = std::max(x2, p.x);
        y1 = std::min(y1, p.y);
        y2 = std::max(y2, p.y);
    }
    const double fallback = cfg.head_fallback_fraction * std::min(image_bounds.width(), image_bounds.height());
    const double side = std::max({fallback, x2 - x1, y2 - y1});
    return centered_square({(x1 + x2) / 2.0, (y1 + y2) / 2.0}, side);
}

std::optional<Box> head_region(std::span<const KeyPoint> keypoints, const Box& image_bounds, const RegionConfig& cfg)
{
    const auto raw = minimal_region_unclipped(PartKind::Head, keypoints, image_bounds, cfg);
    return raw ? clip(*raw, image_bounds) : std::nullopt;
}

std::optional<Box> breast_region(std::span<const KeyPoint> keypoints, const Box& image_bounds,
                                 const RegionConfig& cfg)
{
    const auto raw = minimal_region_unclipped(PartKind::Breast, keypoints, image_bounds, cfg);
    return raw ? clip(*raw, image_bounds) : std::nullopt;
}

double envelope_side(PartKind kind, const std::optional<Box>& head_box, const Box& image_bounds,
                     const RegionConfig& cfg)
{
    const double reference = head_box
        ? std::max(head_box->width(), head_box->height())
        : cfg.head_fallback_fraction * std::min(image_bounds.width(), image_bounds.height());
    return cfg.rho(kind) * reference;
}

std::vector<Box> envelope_candidates_unclipped(PartKind kind, std::span<const KeyPoint> keypoints,
                                               const std::optional<Box>& head_box, const Box& image_bounds,
                                               const RegionConfig& cfg)
{
    const double side = envelope_side(kind, head_box, image_bounds, cfg);
    std::vector<Box> out;
    for (const Point& p : visible_points(keypoints, kind))
        out.push_back(centered_square(p, side));
    return out;
}

std::vector<Box> envelope_region(PartKind kind, std::span<const KeyPoint> keypoints, const std::optional<Box>& head_box,
                                 const Box& image_bounds, const RegionConfig& cfg)
{
    std::vector<Box> out;
    for (const Box& b : envelope_candidates_unclipped(kind, keypoints, head_box, image_bounds, cfg))
        if (auto c = clip(b, image_bounds))
            out.push_back(*c);
    return out;
}

Box eliminate_redundant(std::span<const Box> candidates, std::span<const Box> other_regions, Rng& tie_rng)
{
    if (candidates.empty())
        raise(ErrorKind::EmptyCandidates, "no candidate regions");
    if (candidates.size() == 1)
        return candidates.front();

    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const Box& c : candidates)
        scores.push_back(iou_against_union(c, other_regions));
    const double best = *std::min_element(scores.begin(), scores.end());
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] == best)
            tied.push_back(i);
    if (tied.size() == 1)
        return candidates[tied.front()];
    return candidates[tied[static_cast<std::size_t>(tie_rng.below(tied.size()))]];
}

PartRegionSet generate_region_set(const ImageRecord& image, std::span<const KeyPoint> keypoints,
                                  const RegionConfig& cfg)
{
    const Box bounds = image.bounds();
    Rng tie_rng(derive_seed(cfg.tie_seed, static_cast<std::uint64_t>(image.image_id)));

    PartRegionSet set;
    set.image_id = image.image_id;
    std::vector<Box> fixed;

    set.regions[PartKind::Head] = head_region(keypoints, bounds, cfg);
    if (set.regions.has(PartKind::Head))
        fixed.push_back(*set.regions[PartKind::Head]);

    set.regions[PartKind::Breast] = breast_region(keypoints, bounds, cfg);
    if (set.regions.has(PartKind::Breast))
        fixed.push_back(*set.regions[PartKind::Breast]);

    for (const PartKind kind : {PartKind::Tail, PartKind::Wing, PartKind::Leg}) {
        const auto candidates = envelope_region(kind, keypoints, set.regions[PartKind::Head], bounds, cfg);
        if (candidates.empty())
            continue;
        const Box chosen = eliminate_redundant(candidates, fixed, tie_rng);
        set.regions[kind] = chosen;
        fixed.push_back(chosen);
    }
    return set;
}

std::vector<PartRegionSet> generate_region_sets(const Dataset& dataset, const RegionConfig& cfg, unsigned threads)
{
    cfg.validate();
    const std::size_t n = dataset.images.size();
    std::vector<PartRegionSet> out(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& img = dataset.images[i];
            out[i] = generate_region_set(img, dataset.keypoints_of(img.image_id), cfg);
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin < end)
                pool.emplace_back(work, begin, end);
        }
    }
    // dataset.images is id-ordered; keep that order even if the caller built
    // the dataset by hand.
    std::sort(out.begin(), out.end(),
              [](const PartRegionSet& a, const PartRegionSet& b) { return a.image_id < b.image_id; });
    return out;
}

Box center_crop(const ImageRecord& image, const RegionConfig& cfg)
{
    const double side = cfg.center_crop_fraction * std::min(image.width, image.height);
    return centered_square({image.width / 2.0, image.height / 2.0}, side);
}

std::string format_region_sets(std::span<const PartRegionSet> sets)
{
    std::string out;
    for (const auto& s : sets)
        for (const PartKind k : kAllPartKinds)
            if (const auto& b = s.regions[k])
                out += region_line(s.image_id, name_of(k), *b);
    return out;
}

std::vector<PartRegionSet> parse_region_sets_text(std::string_view content, const std::string& name)
{
    std::map<int, PartRegionSet> by_image;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos)
            end = content.size();
        const std::string_view line = content.substr(start, end - start);
        start = end + 1;
        ++line_no;

        const auto tokens = text::split_fields(line);
        if (tokens.size() != 6)
            raise_malformed(name, line_no, "expected '<image_id> <part> <x1> <y1> <x2> <y2>'");
        const auto id = text::parse_int(tokens[0]);
        if (!id || *id <= 0)
            raise_malformed(name, line_no, "bad image id");
        const auto kind = parse_part_kind(tokens[1]);
        if (!kind)
            raise_malformed(name, line_no, "unknown part name '" + std::string(tokens[1]) + "'");
        std::array<double, 4> v{};
        for (std::size_t k = 0; k < 4; ++k) {
            const auto d = text::parse_double(tokens[2 + k]);
            if (!d)
                raise_malformed(name, line_no, "bad coordinate");
            v[k] = *d;
        }
        if (!is_valid_box(v[0], v[1], v[2], v[3]))
            raise(ErrorKind::InvertedBox, name + ":" + std::to_string(line_no) + ": need x1 < x2 and y1 < y2");

        const int image_id = static_cast<int>(*id);
        PartRegionSet& set = by_image[image_id];
        set.image_id = image_id;
        if (set.regions.has(*kind))
            raise(ErrorKind::DuplicateKey, name + ":" + std::to_string(line_no) + ": duplicate region");
        set.regions[*kind] = Box(v[0], v[1], v[2], v[3]);
    }
    std::vector<PartRegionSet> out;
    out.reserve(by_image.size());
    for (auto& [id, set] : by_image)
        out.push_back(std::move(set));
    return out;
}

std::vector<PartRegionSet> parse_region_sets(const std::filesystem::path& path)
{
    return parse_region_sets_text(text::read_file(path), path.filename().string());
}

std::string format_crop_manifest(std::span<const ImageRecord> images, std::span<const PartRegionSet> sets,
                                 const RegionConfig& cfg)
{
    std::string out;
    for (const ImageRecord& img : images) {
        out += region_line(img.image_id, name_of(Group::Original), img.bounds());
        out += region_line(img.image_id, name_of(Group::Cropped), center_crop(img, cfg));
        const PartRegionSet* set = find_set(sets, img.image_id);
        if (!set)
            continue;
        for (const PartKind k : kAllPartKinds)
            if (const auto& b = set->regions[k])
                out += region_line(img.image_id, name_of(k), *b);
    }
    return out;
}

std::string format_yolo_labels(const PartRegionSet& set, const ImageRecord& image)
{
    const double w = image.width;
    const double h = image.height;
    std::string out;
    for (const PartKind k : kAllPartKinds) {
        const auto& b = set.regions[k];
        if (!b)
            continue;
        const Point c = b->center();
        out += std::to_string(index_of(k));
        for (const double v : {c.x / w, c.y / h, b->width() / w, b->height() / h}) {
            out += ' ';
            out += text::format_fixed(v, 6);
        }
        out += '\n';
    }
    return out;
}

std::vector<YoloLabel> parse_yolo_labels(std::string_view content)
{
    std::vector<YoloLabel> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos)
            end = content.size();
        const auto tokens = text::split_fields(content.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (tokens.size() != 5)
            raise_malformed("yolo label", line_no, "expected 5 fields");
        const auto cls = text::parse_int(tokens[0]);
        if (!cls || *cls < 0 || *cls >= static_cast<std::int64_t>(kNumPartKinds))
            raise_malformed("yolo label", line_no, "bad class index");
        YoloLabel l;
        l.class_index = static_cast<int>(*cls);
        double* fields[] = {&l.x_center, &l.y_center, &l.width, &l.height};
        for (std::size_t k = 0; k < 4; ++k) {
            const auto v = text::parse_double(tokens[1 + k]);
            if (!v || *v < 0.0 || *v > 1.0)
                raise_malformed("yolo label", line_no, "value outside [0, 1]");
            *fields[k] = *v;
        }
        out.push_back(l);
    }
    return out;
}

Box denormalize(const YoloLabel& label, int width, int height)
{
    const double cx = label.x_center * width;
    const double cy = label.y_center * height;
    const double hw = label.width * width / 2.0;
    const double hh = label.height * height / 2.0;
    return Box(cx - hw, cy - hh, cx + hw, cy + hh);
}

std::filesystem::path yolo_label_path(const std::filesystem::path& out_dir, const ImageRecord& image)
{
    std::filesystem::path rel(image.relative_path);
    rel.replace_extension(".txt");
    return out_dir / rel;
}

void export_yolo_labels(std::span<const PartRegionSet> sets, const Dataset& dataset,
                        const std::filesystem::path& out_dir)
{
    for (const ImageRecord& img : dataset.images) {
        const PartRegionSet* set = find_set(sets, img.image_id);
        const std::string content = set ? format_yolo_labels(*set, img) : std::string{};
        text::write_file(yolo_label_path(out_dir, img), content);
    }
}

} // namespace fgvc
