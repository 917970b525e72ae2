#include "fgvc/experiment.hpp"
#include "fgvc/svm.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using fgvc::CombinationSpec;
using fgvc::ErrorKind;
using fgvc::Group;
using fgvc::LabeledVector;
using fgvc::SvmParams;
using testutil::error_kind;

namespace {

// Class k sits at 3 * e_k plus a small deterministic offset: margin well above 1.
std::vector<LabeledVector> clusters(int classes, int per_class, std::size_t dim, std::uint64_t seed)
{
    fgvc::Rng rng(seed);
    std::vector<LabeledVector> out;
    int id = 1;
    for (int k = 0; k < classes; ++k)
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> v(dim);
            for (auto& x : v)
                x = rng.uniform(-0.2, 0.2);
            v[static_cast<std::size_t>(k) % dim] += 3.0;
            out.push_back({id++, 10 + k, v});
        }
    return out;
}

std::size_t brute_correct(const fgvc::SvmModel& m, const std::vector<LabeledVector>& s)
{
    std::size_t n = 0;
    for (const auto& x : s) {
        const auto sc = m.scores(x.values);
        std::size_t best = 0;
        for (std::size_t k = 1; k < sc.size(); ++k)
            if (sc[k] > sc[best])
                best = k;
        n += m.classes()[best] == x.label ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_CASE("two separable points")
{
    const std::vector<LabeledVector> s{{1, 1, {1, 0}}, {2, 2, {0, 1}}};
    const auto model = fgvc::train_svm(s, {});
    CHECK(model.classes() == std::vector<int>{1, 2});
    CHECK(model.predict(s[0].values) == 1);
    CHECK(model.predict(s[1].values) == 2);
}

TEST_CASE("four clusters are learned exactly")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = clusters(4, 20, 8, seed);
        SvmParams p;
        p.seed = seed;
        const auto model = fgvc::train_svm(s, p);
        CHECK(fgvc::evaluate_accuracy(model, s) == 1.0);
    }
}

TEST_CASE("training preconditions")
{
    CHECK(error_kind([] { fgvc::train_svm({}, {}); }) == ErrorKind::EmptyTrainingSet);
    const std::vector<LabeledVector> one{{1, 3, {1, 0}}, {2, 3, {0, 1}}};
    CHECK(error_kind([&] { fgvc::train_svm(one, {}); }) == ErrorKind::SingleClass);
    const std::vector<LabeledVector> ragged{{1, 1, {1, 0}}, {2, 2, {0, 1, 2}}};
    CHECK(error_kind([&] { fgvc::train_svm(ragged, {}); }) == ErrorKind::DimensionMismatch);
    SvmParams bad;
    bad.c = 0;
    CHECK(error_kind([&] { bad.validate(); }) == ErrorKind::ConfigError);
}

TEST_CASE("predict on a hand-built model")
{
    fgvc::SvmModel m({2, 5, 9}, 3, {});
    m.set_bias(0, 0.5);
    m.set_bias(1, 1.5);
    m.set_bias(2, 1.5);
    const std::vector<double> zero(3, 0.0);
    CHECK(m.predict(zero) == 5);
    m.set_bias(0, 1.5);
    CHECK(m.predict(zero) == 2);
    m.weights(2)[1] = 1.0;
    CHECK(m.predict(std::vector<double>{0, 1, 0}) == 9);
    CHECK(error_kind([&] { m.predict(std::vector<double>{0, 1}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("evaluate_accuracy")
{
    fgvc::SvmModel m({1, 2}, 1, {});
    m.weights(1)[0] = 1.0;
    // Positive first component predicts class 2, otherwise class 1.
    const std::vector<LabeledVector> s{{1, 2, {1}}, {2, 2, {2}}, {3, 1, {-1}}, {4, 2, {-1}}};
    CHECK(fgvc::evaluate_accuracy(m, s) == 0.75);
    CHECK(error_kind([&] { fgvc::evaluate_accuracy(m, {}); }) == ErrorKind::EmptyTestSet);

    fgvc::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LabeledVector> t;
        const auto n = 1 + rng.below(20);
        for (std::uint64_t i = 0; i < n; ++i)
            t.push_back({static_cast<int>(i), 1 + static_cast<int>(rng.below(2)), {rng.uniform(-1, 1)}});
        CHECK(fgvc::evaluate_accuracy(m, t) == static_cast<double>(brute_correct(m, t)) / static_cast<double>(n));
    }
}

TEST_CASE("training is pure in the data, not its order or thread count")
{
    auto s = clusters(3, 12, 5, 8);
    SvmParams p;
    p.seed = 4;
    p.epochs = 10;
    const auto model = fgvc::train_svm(s, p);
    std::reverse(s.begin(), s.end());
    CHECK(fgvc::train_svm(s, p) == model);
    fgvc::Rng rng(5);
    rng.shuffle(std::span<LabeledVector>(s));
    p.threads = 3;
    CHECK(fgvc::train_svm(s, p) == model);
    p.seed = 5;
    CHECK_FALSE(fgvc::train_svm(s, p) == model);
}

TEST_CASE("all-zero feature blocks keep zero weights")
{
    const auto s = clusters(3, 10, 4, 2);
    auto padded = s;
    for (auto& x : padded)
        x.values.insert(x.values.end(), 4, 0.0);
    const auto small = fgvc::train_svm(s, {});
    const auto big = fgvc::train_svm(padded, {});
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t j = 4; j < 8; ++j)
            CHECK(big.weights(k)[j] == 0.0);
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(big.weights(k)[j] == small.weights(k)[j]);
    }
    fgvc::Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x(4);
        for (auto& v : x)
            v = rng.uniform(-3, 3);
        auto px = x;
        px.insert(px.end(), 4, 0.0);
        CHECK(small.predict(x) == big.predict(px));
    }
}

TEST_CASE("model file round trip")
{
    SvmParams p;
    p.seed = 11;
    p.c = 2.5;
    p.epochs = 7;
    const auto model = fgvc::train_svm(clusters(4, 5, 6, 1), p);
    const auto text = fgvc::format_model(model);
    CHECK(text.rfind("svm v1 4 6 2.5 7 11\n", 0) == 0);
    const auto back = fgvc::parse_model(text, "m");
    CHECK(back == model);
    CHECK(fgvc::format_model(back) == text);

    CHECK(error_kind([] { fgvc::parse_model("svm v2 2 1 1 1 1\n1 0 0\n2 0 0\n", "m"); }) == ErrorKind::MalformedLine);
    CHECK(error_kind([] { fgvc::parse_model("svm v1 2 2 1 1 1\n1 0 0\n2 0 0\n", "m"); }) == ErrorKind::DimensionMismatch);
    CHECK(error_kind([] { fgvc::parse_model("svm v1 2 1 1 1 1\n1 0 0\n", "m"); }) == ErrorKind::MalformedLine);
}

namespace {

struct Corpus {
    fgvc::FeatureStore store{4};
    std::map<int, int> labels;
    std::vector<fgvc::SplitAssignment> split;
};

// 3 classes x 10 images; only `signal` groups carry the class.
Corpus make_corpus(const std::vector<Group>& signal, std::uint64_t seed, bool include_tail = true)
{
    Corpus c;
    fgvc::Rng rng(seed);
    int id = 1;
    for (int cls = 1; cls <= 3; ++cls)
        for (int i = 0; i < 10; ++i, ++id) {
            c.labels[id] = cls;
            c.split.push_back({id, i < 5 ? fgvc::Split::Train : (i < 7 ? fgvc::Split::Validation : fgvc::Split::Test)});
            for (Group g : fgvc::kCanonicalGroups) {
                if (g == Group::Tail && !include_tail)
                    continue;
                std::vector<double> v(4);
                for (auto& x : v)
                    x = rng.uniform(-0.1, 0.1);
                if (std::find(signal.begin(), signal.end(), g) != signal.end())
                    v[static_cast<std::size_t>(cls)] += 2.0;
                c.store.add(id, g, v);
            }
        }
    return c;
}

} // namespace

TEST_CASE("build_samples")
{
    auto c = make_corpus({Group::Head}, 1);
    const fgvc::ClassifierParams params;
    const auto train = fgvc::build_samples(c.store, c.labels, c.split, fgvc::Split::Train, CombinationSpec::baseline(), params);
    CHECK(train.size() == 15);
    CHECK(train[0].values.size() == 8);
    c.labels.erase(3);
    CHECK(error_kind([&] {
              fgvc::build_samples(c.store, c.labels, c.split, fgvc::Split::Train, CombinationSpec::baseline(), params);
          })
          == ErrorKind::UnknownImage);

    fgvc::ClassifierParams norm;
    norm.l2_normalize = true;
    const auto unit = fgvc::build_samples(c.store, c.labels, c.split, fgvc::Split::Test, CombinationSpec::all(), norm);
    for (const auto& s : unit) {
        double sq = 0;
        for (double v : s.values)
            sq += v * v;
        CHECK(sq == doctest::Approx(1.0));
    }
}

TEST_CASE("classification on signal and noise")
{
    const auto c = make_corpus({Group::Head}, 2);
    const fgvc::ClassifierParams params;
    CHECK(fgvc::run_classification(c.store, c.labels, c.split, CombinationSpec{Group::Head}, params).test_accuracy == 1.0);
    const auto repeat = fgvc::run_classification(c.store, c.labels, c.split, CombinationSpec{Group::Head}, params);
    CHECK(fgvc::format_model(repeat.model)
          == fgvc::format_model(
              fgvc::run_classification(c.store, c.labels, c.split, CombinationSpec{Group::Head}, params).model));
}

TEST_CASE("combination experiment")
{
    const auto c = make_corpus({Group::Head, Group::Wing}, 3);
    const auto result = fgvc::run_combination_experiment(c.store, c.labels, c.split, {});
    REQUIRE(result.rows.size() == 6);
    REQUIRE(result.ranking.size() == 5);
    CHECK(result.rows[0].spec == CombinationSpec::baseline());
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        CHECK(result.rows[i].spec == result.rows[i - 1].spec.with(result.ranking[i - 1].first));
        CHECK(result.rows[i].spec.includes_baseline());
    }
    // The two signal groups lead, in canonical order when their scores tie.
    CHECK(result.ranking[0].first == Group::Head);
    CHECK(result.ranking[1].first == Group::Wing);
    for (std::size_t i = 1; i < result.ranking.size(); ++i)
        CHECK(result.ranking[i - 1].second >= result.ranking[i].second);
    CHECK(result.rows[1].accuracy == 1.0);

    // Every row matches a direct run of its spec.
    for (const auto& row : result.rows)
        CHECK(row.accuracy == fgvc::run_classification(c.store, c.labels, c.split, row.spec, {}).test_accuracy);

    const auto table = fgvc::format_experiment_table(result);
    CHECK(table.rfind("seq\toriginal\tcropped\thead\twing\tbreast\tleg\ttail\taccuracy\n", 0) == 0);
    CHECK(table.find("\n2\t1\t1\t1\t0\t0\t0\t0\t1.0000\n") != std::string::npos);
    CHECK(std::count(table.begin(), table.end(), '\n') == 7);
}

TEST_CASE("groups missing everywhere are zero blocks")
{
    const auto c = make_corpus({Group::Head}, 4, false);
    const auto result = fgvc::run_combination_experiment(c.store, c.labels, c.split, {});
    CHECK(result.rows.size() == 6);
    CHECK(result.rows.back().accuracy == 1.0);
}
