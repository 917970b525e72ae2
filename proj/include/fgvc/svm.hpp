#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fgvc {

struct SvmParams {
    double c = 10.0;
    int epochs = 50;
    std::uint64_t seed = 0;
    /// Worker threads for the independent one-vs-rest problems; does not
    /// affect the result.
    unsigned threads = 1;

    void validate() const;

    /// Thread count is not part of a model's identity.
    friend bool operator==(const SvmParams& a, const SvmParams& b)
    {
        return a.c == b.c && a.epochs == b.epochs && a.seed == b.seed;
    }
};

struct LabeledVector {
    int image_id = 0;
    int label = 0;
    std::vector<double> values;
};

/// One-vs-rest linear SVM: one weight vector and bias per class, classes in
/// ascending id order.
class SvmModel {
public:
    SvmModel(std::vector<int> classes, std::size_t dim, SvmParams params);

    const std::vector<int>& classes() const noexcept { return classes_; }
    std::size_t dim() const noexcept { return dim_; }
    const SvmParams& params() const noexcept { return params_; }

    std::span<const double> weights(std::size_t class_index) const;
    std::span<double> weights(std::size_t class_index);
    double bias(std::size_t class_index) const { return bias_.at(class_index); }
    void set_bias(std::size_t class_index, double value) { bias_.at(class_index) = value; }

    /// w_k . x + b_k for every class.
    std::vector<double> scores(std::span<const double> x) const;

    /// Argmax of scores; exact ties go to the smallest class id.
    /// DimensionMismatch if x has the wrong length.
    int predict(std::span<const double> x) const;

    friend bool operator==(const SvmModel&, const SvmModel&) = default;

private:
    std::vector<int> classes_;
    std::size_t dim_;
    SvmParams params_;
    std::vector<double> weights_; // classes_.size() x dim_, row major
    std::vector<double> bias_;
};

/// Trains K binary hinge-loss problems, minimising
///   lambda/2 * (|w|^2 + b^2) + mean_i max(0, 1 - y_i (w.x_i + b)),  lambda = 1/(C n)
/// by stochastic subgradient steps with eta_t = 1/(lambda t) and projection
/// onto the ball of radius 1/sqrt(lambda). Samples are sorted by image_id
/// before every seeded shuffle, so input order never matters. Final weights
/// are rounded to nine significant digits, which makes the model file an
/// exact serialisation.
///
/// EmptyTrainingSet, SingleClass, DimensionMismatch.
SvmModel train_svm(std::span<const LabeledVector> samples, const SvmParams& params);

/// Fraction of exact label matches. EmptyTestSet for no samples.
double evaluate_accuracy(const SvmModel& model, std::span<const LabeledVector> samples);

/// Header `svm v1 <classes> <dim> <C> <epochs> <seed>`, then one
/// `<class_id> <bias> <w1> ... <wdim>` line per class, nine significant digits.
std::string format_model(const SvmModel& model);
SvmModel parse_model(std::string_view content, const std::string& source_name);
void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

} // namespace fgvc
