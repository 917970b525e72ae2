#include "fgvc/svm.hpp"

#include "fgvc/error.hpp"
#include "fgvc/rng.hpp"
#include "fgvc/text.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

namespace fgvc {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double round_to_model_precision(double v)
{
    return *text::parse_double(text::format_general(v, 9));
}

// Pegasos on one binary problem. The weight vector is kept as scale * v so
// the per-step shrink is O(1); v is only touched on margin violations.
void train_binary(std::span<const LabeledVector* const> samples, int positive_class, const SvmParams& params,
                  std::span<double> w_out, double& b_out)
{
    const std::size_t n = samples.size();
    const std::size_t dim = w_out.size();
    const double lambda = 1.0 / (params.c * static_cast<double>(n));
    const double radius_sq = 1.0 / lambda;

    std::vector<double> x_norm_sq(n);
    for (std::size_t i = 0; i < n; ++i)
        x_norm_sq[i] = dot(samples[i]->values, samples[i]->values) + 1.0;

    std::vector<double> v(dim, 0.0);
    double vb = 0.0;
    double v_norm_sq = 0.0;
    double scale = 1.0;

    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(static_cast<std::uint32_t>(positive_class))));
    std::vector<std::size_t> order(n);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        for (const std::size_t i : order) {
            ++t;
            const LabeledVector& s = *samples[i];
            const double y = s.label == positive_class ? 1.0 : -1.0;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            double raw = dot(v, s.values) + vb;
            const double margin = y * scale * raw;

            scale *= 1.0 - 1.0 / static_cast<double>(t);
            if (scale == 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                vb = 0.0;
                v_norm_sq = 0.0;
                raw = 0.0;
                scale = 1.0;
            }
            if (margin < 1.0) {
                const double a = eta * y / scale;
                for (std::size_t k = 0; k < dim; ++k)
                    v[k] += a * s.values[k];
                vb += a;
                v_norm_sq += 2.0 * a * raw + a * a * x_norm_sq[i];
            }
            const double w_norm_sq = scale * scale * v_norm_sq;
            if (w_norm_sq > radius_sq)
                scale *= std::sqrt(radius_sq / w_norm_sq);
            if (scale < 1e-8) {
                for (double& e : v)
                    e *= scale;
                vb *= scale;
                v_norm_sq *= scale * scale;
                scale = 1.0;
            }
        }
        // Drop drift in the incrementally maintained norm.
        v_norm_sq = dot(v, v) + vb * vb;
    }
    for (std::size_t k = 0; k < dim; ++k)
        w_out[k] = round_to_model_precision(scale * v[k]);
    b_out = round_to_model_precision(scale * vb);
}

} // namespace

void SvmParams::validate() const
{
    if (!(std::isfinite(c) && c > 0.0))
        raise(ErrorKind::ConfigError, "svm C must be positive");
    if (epochs < 1)
        raise(ErrorKind::ConfigError, "svm epochs must be at least 1");
}

SvmModel::SvmModel(std::vector<int> classes, std::size_t dim, SvmParams params)
    : classes_(std::move(classes)), dim_(dim), params_(params), weights_(classes_.size() * dim, 0.0),
      bias_(classes_.size(), 0.0)
{
    if (!std::is_sorted(classes_.begin(), classes_.end())
        || std::adjacent_find(classes_.begin(), classes_.end()) != classes_.end())
        raise(ErrorKind::InvalidArgument, "model classes must be strictly ascending");
}

std::span<const double> SvmModel::weights(std::size_t k) const
{
    return std::span<const double>(weights_).subspan(k * dim_, dim_);
}

std::span<double> SvmModel::weights(std::size_t k)
{
    return std::span<double>(weights_).subspan(k * dim_, dim_);
}

std::vector<double> SvmModel::scores(std::span<const double> x) const
{
    if (x.size() != dim_)
        raise(ErrorKind::DimensionMismatch,
              "model expects " + std::to_string(dim_) + " values, got " + std::to_string(x.size()));
    std::vector<double> out(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k)
        out[k] = dot(weights(k), x) + bias_[k];
    return out;
}

int SvmModel::predict(std::span<const double> x) const
{
    const auto s = scores(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k] > s[best])
            best = k;
    return classes_.at(best);
}

SvmModel train_svm(std::span<const LabeledVector> samples, const SvmParams& params)
{
    params.validate();
    if (samples.empty())
        raise(ErrorKind::EmptyTrainingSet, "no training samples");
    const std::size_t dim = samples.front().values.size();
    std::set<int> class_set;
    std::vector<const LabeledVector*> sorted;
    sorted.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.values.size() != dim)
            raise(ErrorKind::DimensionMismatch, "training vectors differ in length");
        class_set.insert(s.label);
        sorted.push_back(&s);
    }
    if (class_set.size() < 2)
        raise(ErrorKind::SingleClass, "training data has a single class");
    std::stable_sort(sorted.begin(), sorted.end(), [](const LabeledVector* a, const LabeledVector* b) {
        if (a->image_id != b->image_id)
            return a->image_id < b->image_id;
        if (a->label != b->label)
            return a->label < b->label;
        return a->values < b->values;
    });

    SvmModel model(std::vector<int>(class_set.begin(), class_set.end()), dim, params);
    const std::size_t k_total = model.classes().size();
    std::vector<double> biases(k_total, 0.0);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < k_total; k = next++)
            train_binary(sorted, model.classes()[k], params, model.weights(k), biases[k]);
    };
    const unsigned workers = std::clamp<unsigned>(params.threads, 1, static_cast<unsigned>(k_total));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i)
            pool.emplace_back(worker);
    }
    for (std::size_t k = 0; k < k_total; ++k)
        model.set_bias(k, biases[k]);
    return model;
}

double evaluate_accuracy(const SvmModel& model, std::span<const LabeledVector> samples)
{
    if (samples.empty())
        raise(ErrorKind::EmptyTestSet, "no test samples");
    std::size_t correct = 0;
    for (const auto& s : samples)
        correct += model.predict(s.values) == s.label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

std::string format_model(const SvmModel& model)
{
    const auto& p = model.params();
    std::string out = "svm v1 " + std::to_string(model.classes().size()) + " " + std::to_string(model.dim()) + " "
        + text::format_general(p.c, 9) + " " + std::to_string(p.epochs) + " " + std::to_string(p.seed) + "\n";
    for (std::size_t k = 0; k < model.classes().size(); ++k) {
        out += std::to_string(model.classes()[k]);
        out += ' ';
        out += text::format_general(model.bias(k), 9);
        for (const double w : model.weights(k)) {
            out += ' ';
            out += text::format_general(w, 9);
        }
        out += '\n';
    }
    return out;
}

SvmModel parse_model(std::string_view content, const std::string& name)
{
    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start < content.size();) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos)
            end = content.size();
        lines.push_back(content.substr(start, end - start));
        start = end + 1;
    }
    if (lines.empty())
        raise_malformed(name, 1, "empty model file");
    const auto header = text::split_fields(lines[0]);
    if (header.size() != 7 || header[0] != "svm" || header[1] != "v1")
        raise_malformed(name, 1, "expected 'svm v1 <classes> <dim> <C> <epochs> <seed>'");
    const auto k = text::parse_int(header[2]);
    const auto dim = text::parse_int(header[3]);
    const auto c = text::parse_double(header[4]);
    const auto epochs = text::parse_int(header[5]);
    std::uint64_t seed = 0;
    const auto seed_tok = header[6];
    const auto [ptr, ec] = std::from_chars(seed_tok.data(), seed_tok.data() + seed_tok.size(), seed);
    if (!k || *k < 1 || !dim || *dim < 1 || !c || !epochs || ec != std::errc{}
        || ptr != seed_tok.data() + seed_tok.size())
        raise_malformed(name, 1, "bad header values");
    if (lines.size() != static_cast<std::size_t>(*k) + 1)
        raise_malformed(name, lines.size(), "expected one line per class");

    SvmParams params;
    params.c = *c;
    params.epochs = static_cast<int>(*epochs);
    params.seed = seed;

    std::vector<int> classes;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto tokens = text::split_fields(lines[i]);
        if (tokens.size() != static_cast<std::size_t>(*dim) + 2)
            raise(ErrorKind::DimensionMismatch, name + ":" + std::to_string(i + 1) + ": wrong number of weights");
        const auto cls = text::parse_int(tokens[0]);
        if (!cls)
            raise_malformed(name, i + 1, "bad class id");
        classes.push_back(static_cast<int>(*cls));
        std::vector<double> row;
        for (std::size_t j = 1; j < tokens.size(); ++j) {
            const auto v = text::parse_double(tokens[j]);
            if (!v)
                raise_malformed(name, i + 1, "bad weight");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    SvmModel model(classes, static_cast<std::size_t>(*dim), params);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        model.set_bias(i, rows[i][0]);
        std::copy(rows[i].begin() + 1, rows[i].end(), model.weights(i).begin());
    }
    return model;
}

void save_model(const std::filesystem::path& path, const SvmModel& model)
{
    text::write_file(path, format_model(model));
}

SvmModel load_model(const std::filesystem::path& path)
{
    return parse_model(text::read_file(path), path.filename().string());
}

} // namespace fgvc
