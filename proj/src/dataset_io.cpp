#include "fgvc/dataset_io.hpp"

#include "fgvc/error.hpp"
#include "fgvc/parts.hpp"
#include "fgvc/rng.hpp"
#include "fgvc/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace fgvc {

namespace fs = std::filesystem;

namespace {

constexpr const char* kImages = "images.txt";
constexpr const char* kLabels = "image_class_labels.txt";
constexpr const char* kClasses = "classes.txt";
constexpr const char* kParts = "parts/parts.txt";
constexpr const char* kPartLocs = "parts/part_locs.txt";
constexpr const char* kSizes = "image_sizes.txt";

struct LineSource {
    std::string name;
    std::vector<std::string> lines;
};

LineSource load(const fs::path& root, const char* rel)
{
    const fs::path path = root / rel;
    if (!fs::exists(path))
        raise(ErrorKind::MissingFile, path.string());
    return {rel, text::read_lines(path)};
}

int positive_id(std::string_view token, const std::string& file, std::size_t line_no, const char* what)
{
    const auto v = text::parse_int(token);
    if (!v || *v <= 0 || *v > std::numeric_limits<int>::max())
        raise_malformed(file, line_no, std::string("expected positive integer ") + what + ", got '"
                                           + std::string(token) + "'");
    return static_cast<int>(*v);
}

[[noreturn]] void dangling(const std::string& kind, int id, const std::string& where)
{
    raise(ErrorKind::DanglingReference, kind + " " + std::to_string(id) + " (" + where + ")");
}

[[noreturn]] void duplicate(const std::string& kind, int id, const std::string& where)
{
    raise(ErrorKind::DuplicateId, kind + " " + std::to_string(id) + " (" + where + ")");
}

std::string where(const std::string& file, std::size_t line_no)
{
    return file + ":" + std::to_string(line_no);
}

// "<id> <rest>" files: classes, parts, images.
std::vector<std::pair<int, std::string>> parse_id_text(const LineSource& src, const char* what)
{
    std::vector<std::pair<int, std::string>> out;
    for (std::size_t i = 0; i < src.lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto parts = text::split_first(src.lines[i]);
        if (!parts)
            raise_malformed(src.name, line_no, "expected '<id> <text>'");
        out.emplace_back(positive_id(parts->first, src.name, line_no, what), std::string(parts->second));
    }
    return out;
}

// "<id> <int> [<int>]" files: labels and sizes.
std::vector<std::vector<int>> parse_int_rows(const LineSource& src, std::size_t fields)
{
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < src.lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto tokens = text::split_fields(src.lines[i]);
        if (tokens.size() != fields)
            raise_malformed(src.name, line_no, "expected " + std::to_string(fields) + " fields");
        std::vector<int> row;
        for (const auto tok : tokens)
            row.push_back(positive_id(tok, src.name, line_no, "field"));
        out.push_back(std::move(row));
    }
    return out;
}

bool keypoint_less(const KeyPoint& a, const KeyPoint& b)
{
    return a.image_id != b.image_id ? a.image_id < b.image_id : a.part_id < b.part_id;
}

void check_keypoint(const KeyPoint& kp, const ImageRecord& img, const std::string& at)
{
    if (kp.x < 0.0 || kp.y < 0.0)
        raise(ErrorKind::MalformedLine, at + ": negative keypoint coordinate");
    if (kp.visible && (kp.x > img.width || kp.y > img.height))
        raise(ErrorKind::MalformedLine, at + ": visible keypoint outside the image");
}

} // namespace

const ImageRecord* Dataset::find_image(int image_id) const
{
    const auto it = std::lower_bound(images.begin(), images.end(), image_id,
                                     [](const ImageRecord& r, int id) { return r.image_id < id; });
    return (it != images.end() && it->image_id == image_id) ? &*it : nullptr;
}

std::span<const KeyPoint> Dataset::keypoints_of(int image_id) const
{
    const auto lo = std::lower_bound(keypoints.begin(), keypoints.end(), image_id,
                                     [](const KeyPoint& k, int id) { return k.image_id < id; });
    auto hi = lo;
    while (hi != keypoints.end() && hi->image_id == image_id)
        ++hi;
    return {lo, hi};
}

Dataset parse_dataset(const fs::path& root)
{
    // Load everything first so a missing file is reported before content errors.
    const LineSource classes_src = load(root, kClasses);
    const LineSource images_src = load(root, kImages);
    const LineSource labels_src = load(root, kLabels);
    const LineSource sizes_src = load(root, kSizes);
    const LineSource parts_src = load(root, kParts);
    const LineSource locs_src = load(root, kPartLocs);

    Dataset ds;

    const auto classes = parse_id_text(classes_src, "class id");
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (!ds.class_names.emplace(classes[i].first, classes[i].second).second)
            duplicate("class", classes[i].first, where(kClasses, i + 1));

    const auto parts = parse_id_text(parts_src, "part id");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const int id = parts[i].first;
        if (id > cub::kNumKeypoints)
            raise_malformed(kParts, i + 1, "part id must be in 1..15");
        if (!ds.part_names.emplace(id, parts[i].second).second)
            duplicate("part", id, where(kParts, i + 1));
    }
    if (ds.part_names.size() != cub::kNumKeypoints)
        raise_malformed(kParts, parts.size(), "expected 15 part definitions, found " + std::to_string(parts.size()));

    std::map<int, ImageRecord> images;
    const auto image_rows = parse_id_text(images_src, "image id");
    for (std::size_t i = 0; i < image_rows.size(); ++i) {
        const auto& [id, path] = image_rows[i];
        ImageRecord rec;
        rec.image_id = id;
        rec.relative_path = path;
        if (!images.emplace(id, rec).second)
            duplicate("image", id, where(kImages, i + 1));
    }

    std::set<int> labelled;
    const auto label_rows = parse_int_rows(labels_src, 2);
    for (std::size_t i = 0; i < label_rows.size(); ++i) {
        const int id = label_rows[i][0];
        const int cls = label_rows[i][1];
        const auto it = images.find(id);
        if (it == images.end())
            dangling("image", id, where(kLabels, i + 1));
        if (!ds.class_names.contains(cls))
            dangling("class", cls, where(kLabels, i + 1));
        if (!labelled.insert(id).second)
            duplicate("image label", id, where(kLabels, i + 1));
        it->second.class_id = cls;
    }

    std::set<int> sized;
    const auto size_rows = parse_int_rows(sizes_src, 3);
    for (std::size_t i = 0; i < size_rows.size(); ++i) {
        const int id = size_rows[i][0];
        const auto it = images.find(id);
        if (it == images.end())
            dangling("image", id, where(kSizes, i + 1));
        if (!sized.insert(id).second)
            duplicate("image size", id, where(kSizes, i + 1));
        it->second.width = size_rows[i][1];
        it->second.height = size_rows[i][2];
    }

    for (const auto& [id, rec] : images) {
        if (!labelled.contains(id))
            dangling("image without class label", id, kLabels);
        if (!sized.contains(id))
            dangling("image without size", id, kSizes);
        ds.images.push_back(rec);
    }

    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < locs_src.lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto tokens = text::split_fields(locs_src.lines[i]);
        if (tokens.size() != 5)
            raise_malformed(kPartLocs, line_no, "expected '<image_id> <part_id> <x> <y> <visible>'");
        KeyPoint kp;
        kp.image_id = positive_id(tokens[0], kPartLocs, line_no, "image id");
        kp.part_id = positive_id(tokens[1], kPartLocs, line_no, "part id");
        const auto x = text::parse_double(tokens[2]);
        const auto y = text::parse_double(tokens[3]);
        if (!x || !y)
            raise_malformed(kPartLocs, line_no, "bad coordinate");
        kp.x = *x;
        kp.y = *y;
        if (tokens[4] == "1")
            kp.visible = true;
        else if (tokens[4] != "0")
            raise_malformed(kPartLocs, line_no, "visible must be 0 or 1");

        const auto img = images.find(kp.image_id);
        if (img == images.end())
            dangling("image", kp.image_id, where(kPartLocs, line_no));
        if (!ds.part_names.contains(kp.part_id))
            dangling("part", kp.part_id, where(kPartLocs, line_no));
        if (!seen.emplace(kp.image_id, kp.part_id).second)
            duplicate("keypoint for image", kp.image_id, where(kPartLocs, line_no));
        check_keypoint(kp, img->second, where(kPartLocs, line_no));
        ds.keypoints.push_back(kp);
    }
    std::sort(ds.keypoints.begin(), ds.keypoints.end(), keypoint_less);
    return ds;
}

void canonicalize_and_check(Dataset& ds)
{
    std::sort(ds.images.begin(), ds.images.end(),
              [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
        const auto& img = ds.images[i];
        if (i > 0 && ds.images[i - 1].image_id == img.image_id)
            duplicate("image", img.image_id, "in-memory dataset");
        if (img.image_id <= 0 || img.width <= 0 || img.height <= 0)
            raise(ErrorKind::InvalidArgument, "image " + std::to_string(img.image_id) + " has invalid id or size");
        if (!ds.class_names.contains(img.class_id))
            dangling("class", img.class_id, "in-memory dataset");
    }
    std::sort(ds.keypoints.begin(), ds.keypoints.end(), keypoint_less);
    for (std::size_t i = 0; i < ds.keypoints.size(); ++i) {
        const auto& kp = ds.keypoints[i];
        if (i > 0 && !keypoint_less(ds.keypoints[i - 1], kp))
            duplicate("keypoint for image", kp.image_id, "in-memory dataset");
        const ImageRecord* img = ds.find_image(kp.image_id);
        if (!img)
            dangling("image", kp.image_id, "in-memory dataset");
        if (!ds.part_names.contains(kp.part_id))
            dangling("part", kp.part_id, "in-memory dataset");
        check_keypoint(kp, *img, "in-memory dataset");
    }
}

void write_dataset(const fs::path& root, const Dataset& ds)
{
    std::string classes, images, labels, sizes, parts, locs;
    for (const auto& [id, name] : ds.class_names)
        classes += std::to_string(id) + " " + name + "\n";
    for (const auto& [id, name] : ds.part_names)
        parts += std::to_string(id) + " " + name + "\n";
    for (const auto& img : ds.images) {
        const std::string id = std::to_string(img.image_id);
        images += id + " " + img.relative_path + "\n";
        labels += id + " " + std::to_string(img.class_id) + "\n";
        sizes += id + " " + std::to_string(img.width) + " " + std::to_string(img.height) + "\n";
    }
    for (const auto& kp : ds.keypoints) {
        locs += std::to_string(kp.image_id) + " " + std::to_string(kp.part_id) + " " + text::format_shortest(kp.x)
            + " " + text::format_shortest(kp.y) + " " + (kp.visible ? "1" : "0") + "\n";
    }
    text::write_file(root / kClasses, classes);
    text::write_file(root / kImages, images);
    text::write_file(root / kLabels, labels);
    text::write_file(root / kSizes, sizes);
    text::write_file(root / kParts, parts);
    text::write_file(root / kPartLocs, locs);
}

std::array<std::size_t, 3> largest_remainder(std::size_t n, const SplitRatios& ratios)
{
    constexpr double kEps = 1e-9;
    const std::array<double, 3> r{ratios.train, ratios.validation, ratios.test};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double quota = static_cast<double>(n) * r[i];
        const double fl = std::floor(quota + kEps);
        counts[i] = static_cast<std::size_t>(fl);
        rem[i] = std::max(0.0, quota - fl);
        assigned += counts[i];
    }
    // Stable selection: larger remainder first, then train < validation < test.
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + kEps; });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
        ++counts[order[k]];
        ++assigned;
    }
    while (assigned > n) {
        // Only reachable through accumulated rounding in the floors.
        for (std::size_t i = 3; i-- > 0 && assigned > n;)
            if (counts[i] > 0) {
                --counts[i];
                --assigned;
            }
    }
    return counts;
}

std::vector<SplitAssignment> split_dataset(const Dataset& dataset, const SplitRatios& ratios, std::uint64_t seed)
{
    const double sum = ratios.train + ratios.validation + ratios.test;
    if (!(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0) || std::abs(sum - 1.0) > 1e-9)
        raise(ErrorKind::BadRatios, "ratios must be positive and sum to 1");

    std::map<int, std::vector<int>> by_class;
    for (const auto& img : dataset.images)
        by_class[img.class_id].push_back(img.image_id);

    std::vector<SplitAssignment> out;
    out.reserve(dataset.images.size());
    for (auto& [class_id, ids] : by_class) {
        std::sort(ids.begin(), ids.end());
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(class_id)));
        rng.shuffle(std::span<int>(ids));
        const auto counts = largest_remainder(ids.size(), ratios);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const Split s = i < counts[0]               ? Split::Train
                : i < counts[0] + counts[1] ? Split::Validation
                                            : Split::Test;
            out.push_back({ids[i], s});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const SplitAssignment& a, const SplitAssignment& b) { return a.image_id < b.image_id; });
    return out;
}

std::string format_split(std::span<const SplitAssignment> split)
{
    std::string out;
    for (const auto& s : split)
        out += std::to_string(s.image_id) + " " + std::to_string(static_cast<int>(s.split)) + "\n";
    return out;
}

std::vector<SplitAssignment> parse_split_file(const fs::path& path)
{
    const auto lines = text::read_lines(path);
    const std::string name = path.filename().string();
    std::vector<SplitAssignment> out;
    std::set<int> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tokens = text::split_fields(lines[i]);
        if (tokens.size() != 2)
            raise_malformed(name, i + 1, "expected '<image_id> <0|1|2>'");
        const int id = positive_id(tokens[0], name, i + 1, "image id");
        const auto s = text::parse_int(tokens[1]);
        if (!s || *s < 0 || *s > 2)
            raise_malformed(name, i + 1, "split must be 0, 1 or 2");
        if (!seen.insert(id).second)
            duplicate("image", id, where(name, i + 1));
        out.push_back({id, static_cast<Split>(*s)});
    }
    return out;
}

std::map<int, int> parse_labels_file(const fs::path& path)
{
    const std::string name = path.filename().string();
    const auto rows = parse_int_rows({name, text::read_lines(path)}, 2);
    std::map<int, int> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!out.emplace(rows[i][0], rows[i][1]).second)
            duplicate("image", rows[i][0], where(name, i + 1));
    return out;
}

std::vector<Detection> parse_detections_text(std::string_view content, const std::string& name)
{
    std::vector<Detection> out;
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
        if (tokens.size() != 7)
            raise_malformed(name, line_no, "expected '<image_id> <part> <score> <x1> <y1> <x2> <y2>'");
        Detection det;
        det.image_id = positive_id(tokens[0], name, line_no, "image id");
        const auto kind = parse_part_kind(tokens[1]);
        if (!kind)
            raise_malformed(name, line_no, "unknown part name '" + std::string(tokens[1]) + "'");
        det.kind = *kind;
        std::array<double, 5> v{};
        for (std::size_t k = 0; k < 5; ++k) {
            const auto d = text::parse_double(tokens[2 + k]);
            if (!d)
                raise_malformed(name, line_no, "bad number '" + std::string(tokens[2 + k]) + "'");
            v[k] = *d;
        }
        if (v[0] < 0.0 || v[0] > 1.0)
            raise(ErrorKind::ScoreOutOfRange, where(name, line_no) + ": score " + std::string(tokens[2]));
        if (!is_valid_box(v[1], v[2], v[3], v[4]))
            raise(ErrorKind::InvertedBox, where(name, line_no) + ": need x1 < x2 and y1 < y2");
        det.score = v[0];
        det.box = Box(v[1], v[2], v[3], v[4]);
        out.push_back(det);
    }
    return out;
}

std::vector<Detection> parse_detections(const fs::path& path)
{
    return parse_detections_text(text::read_file(path), path.filename().string());
}

std::string format_detections(std::span<const Detection> detections)
{
    std::string out;
    for (const auto& d : detections) {
        out += std::to_string(d.image_id);
        out += ' ';
        out += name_of(d.kind);
        for (const double v : {d.score, d.box.x1(), d.box.y1(), d.box.x2(), d.box.y2()}) {
            out += ' ';
            out += text::format_shortest(v);
        }
        out += '\n';
    }
    return out;
}

} // namespace fgvc
