#pragma once

#include "fgvc/dataset_io.hpp"
#include "fgvc/features.hpp"
#include "fgvc/svm.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fgvc {

struct ClassifierParams {
    SvmParams svm;
    bool l2_normalize = false;
    GroupOrder group_order = kCanonicalGroups;
};

/// Fused, labelled samples for every image assigned to `which`.
/// UnknownImage when such an image has no features or no label.
std::vector<LabeledVector> build_samples(const FeatureStore& store, const std::map<int, int>& labels,
                                         std::span<const SplitAssignment> split, Split which,
                                         const CombinationSpec& spec, const ClassifierParams& params);

struct ClassificationResult {
    SvmModel model;
    double test_accuracy = 0.0;
};

/// Trains on the train split and scores the test split.
ClassificationResult run_classification(const FeatureStore& store, const std::map<int, int>& labels,
                                        std::span<const SplitAssignment> split, const CombinationSpec& spec,
                                        const ClassifierParams& params);

struct ExperimentRow {
    CombinationSpec spec;
    double accuracy = 0.0;
};

struct ExperimentResult {
    /// Part groups with their single-group accuracy, in the order they were added.
    std::vector<std::pair<Group, double>> ranking;
    /// Baseline first, then one row per added part group.
    std::vector<ExperimentRow> rows;
};

/// Incremental combination run.
///
/// Each part group is first scored alone (train split, scored on the
/// validation split, or on the test split when validation is empty). Parts
/// are then appended to the {original, cropped} baseline in descending
/// single-group accuracy, ties in canonical order, and every cumulative
/// combination is trained on train and scored on test. Ties keep
/// `params.group_order`.
ExperimentResult run_combination_experiment(const FeatureStore& store, const std::map<int, int>& labels,
                                            std::span<const SplitAssignment> split, const ClassifierParams& params);

/// `seq original cropped head wing breast leg tail accuracy` TSV with 0/1
/// flags and four-decimal accuracies.
std::string format_experiment_table(const ExperimentResult& result);

} // namespace fgvc
