#include "fgvc/cli.hpp"

#include "fgvc/config.hpp"
#include "fgvc/dataset_io.hpp"
#include "fgvc/detection.hpp"
#include "fgvc/error.hpp"
#include "fgvc/experiment.hpp"
#include "fgvc/region_gen.hpp"
#include "fgvc/svm.hpp"
#include "fgvc/synth.hpp"
#include "fgvc/text.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <vector>

namespace fgvc::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out_dir;
    std::string root;
    std::string regions;
    std::string detections;
    std::string features;
    std::string labels;
    std::string split;
    std::string spec = "all";
};

Config resolve_config(const Options& opt)
{
    Config cfg = opt.config_path.empty() ? Config{} : load_config(opt.config_path);
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.threads)
        cfg.threads = *opt.threads;
    cfg.validate();
    return cfg;
}

fs::path require_out(const Options& opt)
{
    if (opt.out_dir.empty())
        raise(ErrorKind::ConfigError, "--out is required");
    return opt.out_dir;
}

int cmd_validate(const Options& opt, std::ostream& out)
{
    const Dataset ds = parse_dataset(opt.root);
    out << "images=" << ds.images.size() << " keypoints=" << ds.keypoints.size() << "\n";
    return kExitOk;
}

int cmd_split(const Options& opt, const Config& cfg, std::ostream& out)
{
    const fs::path dir = require_out(opt);
    const Dataset ds = parse_dataset(opt.root);
    const auto split = split_dataset(ds, cfg.split, cfg.split_seed());
    text::write_file(dir / "split.txt", format_split(split));
    out << "images=" << split.size() << "\n";
    return kExitOk;
}

int cmd_gen_regions(const Options& opt, const Config& cfg, std::ostream& out)
{
    const fs::path dir = require_out(opt);
    const Dataset ds = parse_dataset(opt.root);
    const RegionConfig rc = cfg.region_config();
    const auto sets = generate_region_sets(ds, rc, cfg.threads);
    text::write_file(dir / "regions.txt", format_region_sets(sets));
    text::write_file(dir / "crops.txt", format_crop_manifest(ds.images, sets, rc));
    export_yolo_labels(sets, ds, dir / "labels");
    std::size_t regions = 0;
    for (const auto& s : sets)
        regions += s.regions.count();
    out << "images=" << sets.size() << " regions=" << regions << "\n";
    return kExitOk;
}

int cmd_export_yolo(const Options& opt, const Config& cfg, std::ostream& out)
{
    const fs::path dir = require_out(opt);
    const Dataset ds = parse_dataset(opt.root);
    const auto sets = generate_region_sets(ds, cfg.region_config(), cfg.threads);
    export_yolo_labels(sets, ds, dir / "labels");
    out << "label_files=" << ds.images.size() << "\n";
    return kExitOk;
}

int cmd_eval_pcp(const Options& opt, const Config& cfg, std::ostream& out)
{
    const auto gt = parse_region_sets(opt.regions);
    const auto dets = parse_detections(opt.detections);
    const auto selected = select_valid_parts_by_image(dets, cfg.thresholds.tau2);
    const std::string report = format_pcp_report(compute_pcp(selected, gt, cfg.pcp_iou_threshold));
    if (!opt.out_dir.empty())
        text::write_file(fs::path(opt.out_dir) / "pcp.tsv", report);
    out << report;
    return kExitOk;
}

struct ClassifyInputs {
    FeatureStore store;
    std::map<int, int> labels;
    std::vector<SplitAssignment> split;
};

ClassifyInputs load_classify_inputs(const Options& opt, const Config& cfg)
{
    return {load_feature_store(opt.features, cfg.feature_dim), parse_labels_file(opt.labels),
            parse_split_file(opt.split)};
}

int cmd_classify(const Options& opt, const Config& cfg, std::ostream& out)
{
    CombinationSpec spec;
    try {
        spec = CombinationSpec::parse(opt.spec);
    } catch (const Error& e) {
        raise(ErrorKind::ConfigError, e.what());
    }
    const auto in = load_classify_inputs(opt, cfg);
    const auto result = run_classification(in.store, in.labels, in.split, spec, cfg.classifier_params());
    if (!opt.out_dir.empty())
        save_model(fs::path(opt.out_dir) / "model.txt", result.model);
    out << "spec=" << spec.to_string() << " accuracy=" << text::format_fixed(result.test_accuracy, 4) << "\n";
    return kExitOk;
}

int cmd_combination(const Options& opt, const Config& cfg, std::ostream& out)
{
    const auto in = load_classify_inputs(opt, cfg);
    const auto result = run_combination_experiment(in.store, in.labels, in.split, cfg.classifier_params());
    const std::string table = format_experiment_table(result);
    if (!opt.out_dir.empty())
        text::write_file(fs::path(opt.out_dir) / "combination.tsv", table);
    out << table;
    return kExitOk;
}

int cmd_synth(const Options& opt, const Config& cfg, std::ostream& out)
{
    const fs::path dir = require_out(opt);
    const Dataset ds = make_synth_dataset(cfg.synth_config());
    write_dataset(dir / "dataset", ds);
    const auto split = split_dataset(ds, cfg.split, cfg.split_seed());
    text::write_file(dir / "split.txt", format_split(split));
    const RegionConfig rc = cfg.region_config();
    const auto sets = generate_region_sets(ds, rc, cfg.threads);
    text::write_file(dir / "regions.txt", format_region_sets(sets));
    text::write_file(dir / "crops.txt", format_crop_manifest(ds.images, sets, rc));
    text::write_file(dir / "detections.txt", format_detections(synth_detections(sets, cfg.synth_detection_config())));
    text::write_file(dir / "features.tsv", format_feature_store(synth_features(ds, sets, cfg.synth_config())));
    out << "images=" << ds.images.size() << " keypoints=" << ds.keypoints.size() << "\n";
    return kExitOk;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Part-based fine-grained recognition toolkit", "fgvc"};
    app.require_subcommand(1);
    app.add_option("--config", opt.config_path, "key=value config file");
    app.add_option("--seed", opt.seed, "Overrides the config seed");
    app.add_option("--threads", opt.threads, "Worker threads (output does not depend on it)");
    app.add_option("--out", opt.out_dir, "Output directory");

    auto* validate = app.add_subcommand("validate", "Parse and cross-check a dataset tree");
    validate->add_option("root", opt.root)->required();
    auto* split = app.add_subcommand("split", "Write a stratified train/validation/test split");
    split->add_option("root", opt.root)->required();
    auto* gen = app.add_subcommand("gen-regions", "Ground-truth part regions, crop manifest and YOLO labels");
    gen->add_option("root", opt.root)->required();
    auto* yolo = app.add_subcommand("export-yolo", "YOLO label files only");
    yolo->add_option("root", opt.root)->required();
    auto* pcp = app.add_subcommand("eval-pcp", "Select detections and compute PCP");
    pcp->add_option("--regions", opt.regions, "Ground-truth region file")->required();
    pcp->add_option("--detections", opt.detections, "Detection file")->required();
    auto* classify = app.add_subcommand("classify", "Train and test a fused-feature SVM");
    auto* combo = app.add_subcommand("combination", "Incremental part-combination experiment");
    for (auto* sub : {classify, combo}) {
        sub->add_option("--features", opt.features, "Feature TSV")->required();
        sub->add_option("--labels", opt.labels, "image_class_labels.txt")->required();
        sub->add_option("--split", opt.split, "Split file")->required();
    }
    classify->add_option("--spec", opt.spec, "Comma-separated groups, 'baseline' or 'all'");
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        const Config cfg = resolve_config(opt);
        if (validate->parsed())
            return cmd_validate(opt, out);
        if (split->parsed())
            return cmd_split(opt, cfg, out);
        if (gen->parsed())
            return cmd_gen_regions(opt, cfg, out);
        if (yolo->parsed())
            return cmd_export_yolo(opt, cfg, out);
        if (pcp->parsed())
            return cmd_eval_pcp(opt, cfg, out);
        if (classify->parsed())
            return cmd_classify(opt, cfg, out);
        if (combo->parsed())
            return cmd_combination(opt, cfg, out);
        if (synth->parsed())
            return cmd_synth(opt, cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::ConfigError ? kExitConfigError : kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitConfigError;
}

} // namespace fgvc::cli
