#include "fgvc/experiment.hpp"

#include "fgvc/error.hpp"
#include "fgvc/text.hpp"

#include <algorithm>

namespace fgvc {

std::vector<LabeledVector> build_samples(const FeatureStore& store, const std::map<int, int>& labels,
                                         std::span<const SplitAssignment> split, Split which,
                                         const CombinationSpec& spec, const ClassifierParams& params)
{
    std::vector<LabeledVector> out;
    for (const SplitAssignment& a : split) {
        if (a.split != which)
            continue;
        const auto label = labels.find(a.image_id);
        if (label == labels.end())
            raise(ErrorKind::UnknownImage, "no class label for image " + std::to_string(a.image_id));
        FusedVector fused = fuse(store, a.image_id, spec, params.group_order);
        if (params.l2_normalize)
            l2_normalize(fused.values);
        out.push_back({a.image_id, label->second, std::move(fused.values)});
    }
    return out;
}

ClassificationResult run_classification(const FeatureStore& store, const std::map<int, int>& labels,
                                        std::span<const SplitAssignment> split, const CombinationSpec& spec,
                                        const ClassifierParams& params)
{
    const auto train = build_samples(store, labels, split, Split::Train, spec, params);
    const auto test = build_samples(store, labels, split, Split::Test, spec, params);
    SvmModel model = train_svm(train, params.svm);
    const double acc = evaluate_accuracy(model, test);
    return {std::move(model), acc};
}

ExperimentResult run_combination_experiment(const FeatureStore& store, const std::map<int, int>& labels,
                                            std::span<const SplitAssignment> split, const ClassifierParams& params)
{
    const bool has_validation = std::any_of(split.begin(), split.end(),
                                            [](const SplitAssignment& a) { return a.split == Split::Validation; });
    const Split ranking_split = has_validation ? Split::Validation : Split::Test;

    std::vector<std::pair<Group, double>> ranking;
    for (const Group g : params.group_order) {
        if (!part_of(g))
            continue;
        const CombinationSpec single{g};
        const auto train = build_samples(store, labels, split, Split::Train, single, params);
        const auto held_out = build_samples(store, labels, split, ranking_split, single, params);
        const SvmModel model = train_svm(train, params.svm);
        ranking.emplace_back(g, evaluate_accuracy(model, held_out));
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    ExperimentResult result;
    result.ranking = ranking;
    CombinationSpec spec = CombinationSpec::baseline();
    result.rows.push_back({spec, run_classification(store, labels, split, spec, params).test_accuracy});
    for (const auto& [g, acc] : ranking) {
        spec = spec.with(g);
        result.rows.push_back({spec, run_classification(store, labels, split, spec, params).test_accuracy});
    }
    return result;
}

std::string format_experiment_table(const ExperimentResult& result)
{
    std::string out = "seq";
    for (const Group g : kCanonicalGroups) {
        out += '\t';
        out += name_of(g);
    }
    out += "\taccuracy\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        out += std::to_string(i + 1);
        for (const Group g : kCanonicalGroups)
            out += result.rows[i].spec.contains(g) ? "\t1" : "\t0";
        out += '\t' + text::format_fixed(result.rows[i].accuracy, 4) + '\n';
    }
    return out;
}

} // namespace fgvc
