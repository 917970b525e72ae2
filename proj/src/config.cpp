#include "fgvc/config.hpp"

#include "fgvc/error.hpp"
#include "fgvc/rng.hpp"
#include "fgvc/text.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace fgvc {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value)
{
    raise(ErrorKind::ConfigError, "bad value '" + std::string(value) + "' for " + std::string(key));
}

double as_double(std::string_view key, std::string_view v)
{
    const auto d = text::parse_double(v);
    if (!d)
        bad_value(key, v);
    return *d;
}

std::int64_t as_int(std::string_view key, std::string_view v)
{
    const auto i = text::parse_int(v);
    if (!i)
        bad_value(key, v);
    return *i;
}

std::uint64_t as_u64(std::string_view key, std::string_view v)
{
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        bad_value(key, v);
    return out;
}

bool as_bool(std::string_view key, std::string_view v)
{
    if (v == "1" || v == "true")
        return true;
    if (v == "0" || v == "false")
        return false;
    bad_value(key, v);
}

std::vector<Group> as_groups(std::string_view key, std::string_view v)
{
    if (v == "none" || v.empty())
        return {};
    try {
        return CombinationSpec::parse(v).groups();
    } catch (const Error&) {
        bad_value(key, v);
    }
}

using Setter = std::function<void(Config&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto dbl = [&t](const char* key, auto member) {
            t.emplace(key, [member](Config& c, std::string_view k, std::string_view v) { member(c) = as_double(k, v); });
        };
        dbl("lambda_w", [](Config& c) -> double& { return c.region.lambda_w; });
        dbl("lambda_h", [](Config& c) -> double& { return c.region.lambda_h; });
        dbl("breast_lambda_w", [](Config& c) -> double& { return c.region.breast_lambda_w; });
        dbl("breast_lambda_h", [](Config& c) -> double& { return c.region.breast_lambda_h; });
        dbl("rho_tail", [](Config& c) -> double& { return c.region.rho_tail; });
        dbl("rho_wing", [](Config& c) -> double& { return c.region.rho_wing; });
        dbl("rho_leg", [](Config& c) -> double& { return c.region.rho_leg; });
        dbl("head_fallback_fraction", [](Config& c) -> double& { return c.region.head_fallback_fraction; });
        dbl("center_crop_fraction", [](Config& c) -> double& { return c.region.center_crop_fraction; });
        dbl("tau1", [](Config& c) -> double& { return c.thresholds.tau1; });
        dbl("tau2", [](Config& c) -> double& { return c.thresholds.tau2; });
        dbl("pcp_iou_threshold", [](Config& c) -> double& { return c.pcp_iou_threshold; });
        dbl("svm_c", [](Config& c) -> double& { return c.svm_c; });
        dbl("split_train", [](Config& c) -> double& { return c.split.train; });
        dbl("split_validation", [](Config& c) -> double& { return c.split.validation; });
        dbl("split_test", [](Config& c) -> double& { return c.split.test; });
        dbl("synth_jitter_px", [](Config& c) -> double& { return c.synth_detections.jitter_px; });
        dbl("synth_score_noise", [](Config& c) -> double& { return c.synth_detections.score_noise; });
        dbl("synth_shift_fraction", [](Config& c) -> double& { return c.synth_detections.shift_fraction; });
        dbl("synth_part_dropout", [](Config& c) -> double& { return c.synth.part_dropout; });

        auto integer = [&t](const char* key, auto member, std::int64_t lo, std::int64_t hi) {
            t.emplace(key, [member, lo, hi](Config& c, std::string_view k, std::string_view v) {
                const auto i = as_int(k, v);
                if (i < lo || i > hi)
                    bad_value(k, v);
                member(c, i);
            });
        };
        integer("svm_epochs", [](Config& c, std::int64_t i) { c.svm_epochs = static_cast<int>(i); }, 1, 1000000);
        integer("threads", [](Config& c, std::int64_t i) { c.threads = static_cast<unsigned>(i); }, 1, 1024);
        integer("feature_dim", [](Config& c, std::int64_t i) { c.feature_dim = static_cast<std::size_t>(i); }, 1,
                1 << 24);
        integer("synth_num_classes", [](Config& c, std::int64_t i) { c.synth.num_classes = static_cast<int>(i); }, 2,
                100000);
        integer("synth_images_per_class",
                [](Config& c, std::int64_t i) { c.synth.images_per_class = static_cast<int>(i); }, 1, 100000);
        integer("synth_image_size", [](Config& c, std::int64_t i) { c.synth.image_size = static_cast<int>(i); }, 8,
                100000);

        t.emplace("seed", [](Config& c, std::string_view k, std::string_view v) { c.seed = as_u64(k, v); });
        t.emplace("l2_normalize",
                  [](Config& c, std::string_view k, std::string_view v) { c.l2_normalize = as_bool(k, v); });
        t.emplace("group_order", [](Config& c, std::string_view k, std::string_view v) {
            try {
                c.group_order = parse_group_order(v);
            } catch (const Error&) {
                bad_value(k, v);
            }
        });
        t.emplace("synth_signal_groups",
                  [](Config& c, std::string_view k, std::string_view v) { c.synth.signal_groups = as_groups(k, v); });
        t.emplace("synth_distractor_score", [](Config& c, std::string_view k, std::string_view v) {
            if (v == "none")
                c.synth_detections.distractor_score.reset();
            else
                c.synth_detections.distractor_score = as_double(k, v);
        });
        for (const PartKind kind : kAllPartKinds) {
            t.emplace("synth_dropout_" + std::string(name_of(kind)),
                      [kind](Config& c, std::string_view k, std::string_view v) {
                          c.synth.part_dropout_override[kind] = as_double(k, v);
                      });
        }
        return t;
    }();
    return table;
}

void check(bool ok, const char* what)
{
    if (!ok)
        raise(ErrorKind::ConfigError, what);
}

} // namespace

RegionConfig Config::region_config() const
{
    RegionConfig r = region;
    r.tie_seed = derive_seed(seed, "tie");
    return r;
}

ClassifierParams Config::classifier_params() const
{
    ClassifierParams p;
    p.svm.c = svm_c;
    p.svm.epochs = svm_epochs;
    p.svm.seed = derive_seed(seed, "svm");
    p.svm.threads = threads;
    p.l2_normalize = l2_normalize;
    p.group_order = group_order;
    return p;
}

SynthConfig Config::synth_config() const
{
    SynthConfig s = synth;
    s.feature_dim = static_cast<int>(feature_dim);
    s.seed = derive_seed(seed, "synth");
    return s;
}

SynthDetectionConfig Config::synth_detection_config() const
{
    SynthDetectionConfig d = synth_detections;
    d.seed = derive_seed(seed, "synth-detections");
    return d;
}

std::uint64_t Config::split_seed() const { return derive_seed(seed, "split"); }

void Config::validate() const
{
    region.validate();
    thresholds.validate();
    check(pcp_iou_threshold > 0.0 && pcp_iou_threshold < 1.0, "pcp_iou_threshold must be in (0, 1)");
    check(std::isfinite(svm_c) && svm_c > 0.0, "svm_c must be positive");
    check(split.train > 0.0 && split.validation > 0.0 && split.test > 0.0
              && std::abs(split.train + split.validation + split.test - 1.0) <= 1e-9,
          "split ratios must be positive and sum to 1");
    check(feature_dim <= static_cast<std::size_t>(std::numeric_limits<int>::max()), "feature_dim too large");
    synth_config().validate();
    const auto d = synth_detection_config();
    check(std::isfinite(d.jitter_px) && d.jitter_px >= 0.0, "synth_jitter_px must be >= 0");
    check(d.score_noise >= 0.0 && d.score_noise < 1.0, "synth_score_noise must be in [0, 1)");
    check(std::isfinite(d.shift_fraction), "synth_shift_fraction must be finite");
    check(!d.distractor_score || (*d.distractor_score >= 0.0 && *d.distractor_score <= 1.0),
          "synth_distractor_score must be in [0, 1]");
}

Config parse_config(std::string_view content, const std::string& name)
{
    Config cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    for (std::size_t start = 0; start < content.size();) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos)
            end = content.size();
        std::string_view line = content.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = name + ":" + std::to_string(line_no);
        if (eq == std::string_view::npos)
            raise(ErrorKind::ConfigError, where + ": expected key=value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            raise(ErrorKind::ConfigError, where + ": unknown key '" + std::string(key) + "'");
        if (!seen.emplace(key).second)
            raise(ErrorKind::ConfigError, where + ": repeated key '" + std::string(key) + "'");
        try {
            it->second(cfg, key, value);
        } catch (const Error& e) {
            raise(ErrorKind::ConfigError, where + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

Config load_config(const std::filesystem::path& path)
{
    std::string content;
    try {
        content = text::read_file(path);
    } catch (const Error& e) {
        raise(ErrorKind::ConfigError, std::string("cannot read config: ") + e.what());
    }
    return parse_config(content, path.filename().string());
}

} // namespace fgvc
