#include "fgvc/synth.hpp"

#include "fgvc/error.hpp"
#include "fgvc/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

namespace fgvc {

namespace {

// Keypoints of a side-on bird facing left, in a 100 x 100 template frame,
// indexed by CUB part id - 1.
constexpr std::array<Point, cub::kNumKeypoints> kTemplate{{
    {55.0, 35.0}, // back
    {15.0, 30.0}, // beak
    {50.0, 62.0}, // belly
    {35.0, 50.0}, // breast
    {28.0, 20.0}, // crown
    {22.0, 23.0}, // forehead
    {25.0, 27.0}, // left eye
    {45.0, 80.0}, // left leg
    {55.0, 45.0}, // left wing
    {35.0, 25.0}, // nape
    {27.0, 28.0}, // right eye
    {52.0, 82.0}, // right leg
    {62.0, 50.0}, // right wing
    {85.0, 60.0}, // tail
    {25.0, 38.0}, // throat
}};

constexpr double kSignal = 2.0;
constexpr double kNoise = 0.1;

double round_tenth(double v) { return std::round(v * 10.0) / 10.0; }

bool in_unit_half_open(double v) { return std::isfinite(v) && v >= 0.0 && v < 1.0; }

} // namespace

double SynthConfig::dropout_for(PartKind kind) const
{
    const auto& o = part_dropout_override[kind];
    return o ? *o : part_dropout;
}

void SynthConfig::validate() const
{
    auto fail = [](const char* what) { raise(ErrorKind::ConfigError, what); };
    if (num_classes < 2)
        fail("num_classes must be >= 2");
    if (images_per_class < 1)
        fail("images_per_class must be >= 1");
    if (image_size < 8)
        fail("image_size must be >= 8");
    if (!(std::isfinite(jitter_px) && jitter_px >= 0.0))
        fail("jitter_px must be >= 0");
    if (!in_unit_half_open(score_noise))
        fail("score_noise must be in [0, 1)");
    if (!in_unit_half_open(part_dropout))
        fail("part_dropout must be in [0, 1)");
    for (const PartKind k : kAllPartKinds)
        if (const auto& o = part_dropout_override[k]; o && !(*o >= 0.0 && *o <= 1.0))
            fail("part dropout overrides must be in [0, 1]");
    if (feature_dim < 1)
        fail("feature_dim must be >= 1");
    if (!signal_groups.empty() && feature_dim < num_classes)
        fail("feature_dim must be >= num_classes when signal groups are set");
}

Dataset make_synth_dataset(const SynthConfig& cfg)
{
    cfg.validate();
    Dataset ds;
    for (int id = 1; id <= cub::kNumKeypoints; ++id)
        ds.part_names.emplace(id, std::string(cub::keypoint_name(id)));
    char buf[64];
    for (int c = 1; c <= cfg.num_classes; ++c) {
        std::snprintf(buf, sizeof buf, "%03d.synthetic_class_%03d", c, c);
        ds.class_names.emplace(c, buf);
    }

    const int width = cfg.image_size;
    const int height = static_cast<int>(std::lround(0.75 * cfg.image_size));
    const double frame = std::min(width, height);
    Rng rng(derive_seed(cfg.seed, "dataset"));

    int image_id = 0;
    for (int c = 1; c <= cfg.num_classes; ++c) {
        for (int i = 0; i < cfg.images_per_class; ++i) {
            ++image_id;
            ImageRecord img;
            img.image_id = image_id;
            img.class_id = c;
            img.width = width;
            img.height = height;
            std::snprintf(buf, sizeof buf, "/synth_%06d.jpg", image_id);
            img.relative_path = ds.class_names.at(c) + buf;
            ds.images.push_back(img);

            const double scale = rng.uniform(0.6, 0.9) * frame / 100.0;
            const double tx = rng.uniform(0.0, width - 100.0 * scale);
            const double ty = rng.uniform(0.0, height - 100.0 * scale);
            std::array<bool, kNumPartKinds> dropped{};
            for (const PartKind k : kAllPartKinds)
                dropped[index_of(k)] = rng.uniform01() < cfg.dropout_for(k);

            for (int pid = 1; pid <= cub::kNumKeypoints; ++pid) {
                const Point t = kTemplate[static_cast<std::size_t>(pid - 1)];
                const double jx = rng.uniform(-1.0, 1.0);
                const double jy = rng.uniform(-1.0, 1.0);
                const auto part = part_for_keypoint(pid);
                KeyPoint kp;
                kp.image_id = image_id;
                kp.part_id = pid;
                kp.visible = !(part && dropped[index_of(*part)]);
                if (kp.visible) {
                    kp.x = std::clamp(round_tenth(tx + scale * (t.x + jx)), 0.0, static_cast<double>(width));
                    kp.y = std::clamp(round_tenth(ty + scale * (t.y + jy)), 0.0, static_cast<double>(height));
                }
                ds.keypoints.push_back(kp);
            }
        }
    }
    canonicalize_and_check(ds);
    return ds;
}

void synth_dataset(const SynthConfig& cfg, const std::filesystem::path& root)
{
    write_dataset(root, make_synth_dataset(cfg));
}

std::vector<Detection> synth_detections(std::span<const PartRegionSet> region_sets, const SynthDetectionConfig& cfg)
{
    if (!(std::isfinite(cfg.jitter_px) && cfg.jitter_px >= 0.0) || !in_unit_half_open(cfg.score_noise)
        || !std::isfinite(cfg.shift_fraction))
        raise(ErrorKind::ConfigError, "bad synthetic detection parameters");
    if (cfg.distractor_score && !(*cfg.distractor_score >= 0.0 && *cfg.distractor_score <= 1.0))
        raise(ErrorKind::ConfigError, "distractor score must be in [0, 1]");

    Rng rng(derive_seed(cfg.seed, "detections"));
    const double j = cfg.jitter_px;
    std::vector<Detection> out;
    for (const PartRegionSet& set : region_sets) {
        for (const PartKind k : kAllPartKinds) {
            const auto& gt = set.regions[k];
            if (!gt)
                continue;
            const double dx = cfg.shift_fraction * gt->width();
            double x1 = gt->x1() + dx, y1 = gt->y1(), x2 = gt->x2() + dx, y2 = gt->y2();
            const double jx1 = rng.uniform(-j, j), jy1 = rng.uniform(-j, j);
            const double jx2 = rng.uniform(-j, j), jy2 = rng.uniform(-j, j);
            if (x1 + jx1 < x2 + jx2) {
                x1 += jx1;
                x2 += jx2;
            }
            if (y1 + jy1 < y2 + jy2) {
                y1 += jy1;
                y2 += jy2;
            }
            const double score = std::clamp(1.0 - rng.uniform(0.0, cfg.score_noise), 0.0, 1.0);
            out.push_back({set.image_id, k, score, Box(x1, y1, x2, y2)});
            if (cfg.distractor_score) {
                const double w = gt->width();
                out.push_back({set.image_id, k, *cfg.distractor_score,
                               Box(gt->x1() + w, gt->y1(), gt->x2() + w, gt->y2())});
            }
        }
    }
    return out;
}

FeatureStore synth_features(const Dataset& dataset, std::span<const PartRegionSet> region_sets,
                            const SynthConfig& cfg)
{
    cfg.validate();
    std::map<int, std::size_t> class_rank;
    for (const auto& [id, name] : dataset.class_names)
        class_rank.emplace(id, class_rank.size());
    std::map<int, const PartRegionSet*> regions;
    for (const auto& s : region_sets)
        regions.emplace(s.image_id, &s);

    const auto dim = static_cast<std::size_t>(cfg.feature_dim);
    FeatureStore store(dim);
    Rng rng(derive_seed(cfg.seed, "features"));
    for (const ImageRecord& img : dataset.images) {
        const auto it = regions.find(img.image_id);
        for (const Group g : kCanonicalGroups) {
            if (const auto part = part_of(g)) {
                if (it == regions.end() || !it->second->regions.has(*part))
                    continue;
            }
            std::vector<double> v(dim);
            for (double& e : v)
                e = rng.uniform(-kNoise, kNoise);
            if (std::find(cfg.signal_groups.begin(), cfg.signal_groups.end(), g) != cfg.signal_groups.end())
                v[class_rank.at(img.class_id) % dim] += kSignal;
            store.add(img.image_id, g, std::move(v));
        }
    }
    return store;
}

} // namespace fgvc
