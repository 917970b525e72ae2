#include "fgvc/features.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using fgvc::CombinationSpec;
using fgvc::ErrorKind;
using fgvc::FeatureStore;
using fgvc::Group;
using testutil::error_kind;

namespace {

// Component j of group g on image i; distinct everywhere, never zero.
double value_at(int image, Group g, std::size_t j)
{
    return image * 100.0 + static_cast<double>(fgvc::index_of(g)) * 10.0 + static_cast<double>(j) + 1.0;
}

std::vector<double> vector_for(int image, Group g, std::size_t dim)
{
    std::vector<double> v(dim);
    for (std::size_t j = 0; j < dim; ++j)
        v[j] = value_at(image, g, j);
    return v;
}

std::string tsv_line(int image, Group g, std::size_t dim)
{
    std::string line = std::to_string(image) + "\t" + std::string(fgvc::name_of(g)) + "\t";
    for (std::size_t j = 0; j < dim; ++j)
        line += (j ? " " : "") + fgvc::text::format_shortest(value_at(image, g, j));
    return line + "\n";
}

} // namespace

TEST_CASE("feature TSV loading")
{
    std::string text;
    for (int image : {1, 2})
        for (Group g : fgvc::kCanonicalGroups)
            text += tsv_line(image, g, 4);
    const FeatureStore store = fgvc::parse_feature_store(text, "f");
    CHECK(store.size() == 14);
    CHECK(store.dim() == 4);
    CHECK(*store.find(2, Group::Leg) == vector_for(2, Group::Leg, 4));
    CHECK(store.find(3, Group::Leg) == nullptr);
    CHECK(store.image_ids() == std::vector<int>{1, 2});
    CHECK(fgvc::format_feature_store(store) == text);

    CHECK(error_kind([&] { fgvc::parse_feature_store(text + tsv_line(3, Group::Head, 3), "f"); })
          == ErrorKind::DimensionMismatch);
    CHECK(error_kind([&] { fgvc::parse_feature_store(text + tsv_line(1, Group::Head, 4), "f"); })
          == ErrorKind::DuplicateKey);
    CHECK(error_kind([&] { fgvc::parse_feature_store(text, "f", 5); }) == ErrorKind::DimensionMismatch);
    CHECK(error_kind([] { fgvc::parse_feature_store("1\tbeak\t1 2\n", "f"); }) == ErrorKind::MalformedLine);
    CHECK(error_kind([] { fgvc::parse_feature_store("1\thead\t1 nan\n", "f"); }) == ErrorKind::MalformedLine);
}

TEST_CASE("stored floats survive a round trip")
{
    fgvc::Rng rng(6);
    FeatureStore store(8);
    for (int id = 1; id <= 10; ++id)
        for (Group g : fgvc::kCanonicalGroups) {
            std::vector<double> v(8);
            for (auto& x : v)
                x = rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-8, 8));
            store.add(id, g, v);
        }
    const FeatureStore back = fgvc::parse_feature_store(fgvc::format_feature_store(store), "f");
    for (int id = 1; id <= 10; ++id)
        for (Group g : fgvc::kCanonicalGroups)
            CHECK(*back.find(id, g) == *store.find(id, g));
    CHECK(error_kind([&] { store.add(11, Group::Head, {1.0, INFINITY, 0, 0, 0, 0, 0, 0}); })
          == ErrorKind::InvalidArgument);
}

TEST_CASE("combination spec")
{
    CHECK(CombinationSpec::baseline().size() == 2);
    CHECK(CombinationSpec::baseline().includes_baseline());
    CHECK(CombinationSpec::all().size() == 7);
    CHECK(CombinationSpec::parse("baseline,head") == CombinationSpec{Group::Original, Group::Cropped, Group::Head});
    CHECK(CombinationSpec::parse("tail,head").groups() == std::vector<Group>{Group::Head, Group::Tail});
    CHECK(CombinationSpec::parse("all") == CombinationSpec::all());
    CHECK(CombinationSpec::parse("head,tail").to_string() == "head,tail");
    CHECK(error_kind([] { CombinationSpec::parse("head,beak"); }) == ErrorKind::InvalidArgument);
    // Overlapping names are a set union; the constructor is the strict form.
    CHECK(CombinationSpec::parse("baseline,original") == CombinationSpec::baseline());
    CHECK(error_kind([] { CombinationSpec({Group::Head, Group::Head}); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([] { CombinationSpec::parse(""); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("fuse layout")
{
    FeatureStore store(4);
    for (Group g : fgvc::kCanonicalGroups)
        if (g != Group::Breast && g != Group::Tail)
            store.add(1, g, vector_for(1, g, 4));

    const auto fused = fgvc::fuse(store, 1, CombinationSpec::all());
    REQUIRE(fused.values.size() == 28);
    for (std::size_t i = 16; i < 20; ++i)
        CHECK(fused.values[i] == 0.0);
    for (std::size_t i = 24; i < 28; ++i)
        CHECK(fused.values[i] == 0.0);
    CHECK(fused.values[8] == value_at(1, Group::Head, 0));
    CHECK(fused.values[12] == value_at(1, Group::Wing, 0));
    CHECK_FALSE(fused.present.test(fgvc::index_of(Group::Breast)));
    CHECK(fused.present.test(fgvc::index_of(Group::Leg)));

    CHECK(fgvc::fuse(store, 1, CombinationSpec::baseline()).values.size() == 8);
    CHECK(error_kind([&] { fgvc::fuse(store, 2, CombinationSpec::baseline()); }) == ErrorKind::UnknownImage);
    CHECK(error_kind([&] { fgvc::fuse(store, 1, CombinationSpec{}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("fuse is offset exact for every spec and presence pattern")
{
    constexpr std::size_t dim = 3;
    for (unsigned presence = 0; presence < 32; ++presence) {
        FeatureStore store(dim);
        store.add(1, Group::Original, vector_for(1, Group::Original, dim));
        store.add(1, Group::Cropped, vector_for(1, Group::Cropped, dim));
        for (std::size_t p = 0; p < 5; ++p)
            if (presence & (1u << p))
                store.add(1, fgvc::kCanonicalGroups[2 + p], vector_for(1, fgvc::kCanonicalGroups[2 + p], dim));
        for (unsigned mask = 1; mask < 128; ++mask) {
            std::vector<Group> groups;
            for (std::size_t g = 0; g < 7; ++g)
                if (mask & (1u << g))
                    groups.push_back(fgvc::kCanonicalGroups[g]);
            const CombinationSpec spec(groups);
            const auto fused = fgvc::fuse(store, 1, spec);
            REQUIRE(fused.values.size() == groups.size() * dim);
            for (std::size_t b = 0; b < groups.size(); ++b) {
                const Group g = groups[b];
                CHECK(fgvc::block_offset(spec, g, dim) == b * dim);
                const auto* stored = store.find(1, g);
                for (std::size_t j = 0; j < dim; ++j)
                    CHECK(fused.values[b * dim + j] == (stored ? (*stored)[j] : 0.0));
            }
        }
    }
}

TEST_CASE("custom group order")
{
    const auto order = fgvc::parse_group_order("tail,leg,breast,wing,head,cropped,original");
    FeatureStore store(2);
    for (Group g : fgvc::kCanonicalGroups)
        store.add(1, g, vector_for(1, g, 2));
    const auto fused = fgvc::fuse(store, 1, CombinationSpec::all(), order);
    CHECK(fused.values[0] == value_at(1, Group::Tail, 0));
    CHECK(fused.values[12] == value_at(1, Group::Original, 0));
    CHECK(error_kind([] { fgvc::parse_group_order("tail,leg"); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([] { fgvc::parse_group_order("tail,tail,breast,wing,head,cropped,original"); })
          == ErrorKind::InvalidArgument);
}

TEST_CASE("full-size fused length")
{
    FeatureStore store(fgvc::kDefaultFeatureDim);
    store.add(1, Group::Original, std::vector<double>(fgvc::kDefaultFeatureDim, 0.5));
    CHECK(fgvc::fuse(store, 1, CombinationSpec::all()).values.size() == 14336);
}

TEST_CASE("l2 normalisation")
{
    std::vector<double> v{3, 4};
    fgvc::l2_normalize(v);
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(v[1] == doctest::Approx(0.8));
    std::vector<double> z{0, 0};
    fgvc::l2_normalize(z);
    CHECK(z == std::vector<double>{0, 0});
}
