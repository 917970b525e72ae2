#include "fgvc/dataset_io.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using fgvc::ErrorKind;
using fgvc::Split;
using testutil::error_kind;
using testutil::TempDir;

namespace {

// Three images, every keypoint at a distinct position.
void write_toy_tree(const testutil::fs::path& root)
{
    fgvc::write_dataset(root, testutil::toy_dataset(3));
}

std::string replace_line(const std::string& text, std::size_t index, const std::string& line)
{
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    lines.at(index) = line;
    std::string out;
    for (const auto& l : lines)
        out += l + "\n";
    return out;
}

} // namespace

TEST_CASE("toy tree parses")
{
    TempDir dir;
    write_toy_tree(dir.path());
    const auto ds = fgvc::parse_dataset(dir.path());
    CHECK(ds.images.size() == 3);
    CHECK(ds.keypoints.size() == 45);
    CHECK(ds.part_names.at(2) == "beak");
    CHECK(ds.keypoints_of(2).size() == 15);
    CHECK(ds.find_image(3)->class_id == 1);
    CHECK(ds.find_image(4) == nullptr);
}

TEST_CASE("part_locs fields map directly")
{
    TempDir dir;
    fgvc::Dataset ds = testutil::toy_dataset(5);
    fgvc::write_dataset(dir.path(), ds);
    const auto locs = fgvc::text::read_file(dir / "parts/part_locs.txt");
    // Zero-based line 4 * 15 + 1 holds image 5, part 2.
    testutil::write_text(dir / "parts/part_locs.txt", replace_line(locs, 61, "5 2 60.0 41.0 1"));
    const auto parsed = fgvc::parse_dataset(dir.path());
    const auto kps = parsed.keypoints_of(5);
    const auto it = std::find_if(kps.begin(), kps.end(), [](const fgvc::KeyPoint& k) { return k.part_id == 2; });
    REQUIRE(it != kps.end());
    CHECK(*it == fgvc::KeyPoint{5, 2, 60.0, 41.0, true});
}

TEST_CASE("rejected inputs")
{
    TempDir dir;
    write_toy_tree(dir.path());
    const auto locs = fgvc::text::read_file(dir / "parts/part_locs.txt");

    SUBCASE("dangling image id")
    {
        testutil::write_text(dir / "parts/part_locs.txt", locs + "99 1 1.0 1.0 1\n");
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::DanglingReference);
    }
    SUBCASE("dangling class id")
    {
        testutil::write_text(dir / "image_class_labels.txt", "1 1\n2 2\n3 7\n");
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::DanglingReference);
    }
    SUBCASE("duplicate keypoint")
    {
        testutil::write_text(dir / "parts/part_locs.txt", locs + "1 1 1.0 1.0 1\n");
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::DuplicateId);
    }
    SUBCASE("duplicate image")
    {
        testutil::write_text(dir / "images.txt", fgvc::text::read_file(dir / "images.txt") + "2 x/y.jpg\n");
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::DuplicateId);
    }
    SUBCASE("bad visibility token")
    {
        testutil::write_text(dir / "parts/part_locs.txt", replace_line(locs, 0, "1 1 20.0 41.0 2"));
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::MalformedLine);
    }
    SUBCASE("short line")
    {
        testutil::write_text(dir / "parts/part_locs.txt", replace_line(locs, 0, "1 1 20.0"));
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::MalformedLine);
    }
    SUBCASE("visible keypoint outside the image")
    {
        testutil::write_text(dir / "parts/part_locs.txt", replace_line(locs, 0, "1 1 250.0 41.0 1"));
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::MalformedLine);
    }
    SUBCASE("non-positive size")
    {
        testutil::write_text(dir / "image_sizes.txt", "1 200 160\n2 0 160\n3 200 160\n");
        CHECK(error_kind([&] { fgvc::parse_dataset(dir.path()); }) == ErrorKind::MalformedLine);
    }
    SUBCASE("missing file")
    {
        testutil::fs::remove(dir / "image_sizes.txt");
        try {
            fgvc::parse_dataset(dir.path());
            FAIL("expected MissingFile");
        } catch (const fgvc::Error& e) {
            CHECK(e.kind() == ErrorKind::MissingFile);
            CHECK(std::string(e.what()).find("image_sizes.txt") != std::string::npos);
        }
    }
    SUBCASE("malformed line names file and line")
    {
        testutil::write_text(dir / "images.txt", "1 a.jpg\n2 b.jpg\nthree c.jpg\n");
        try {
            fgvc::parse_dataset(dir.path());
            FAIL("expected MalformedLine");
        } catch (const fgvc::Error& e) {
            CHECK(e.kind() == ErrorKind::MalformedLine);
            CHECK(std::string(e.what()).find("images.txt:3") != std::string::npos);
        }
    }
}

TEST_CASE("write then parse is the identity")
{
    fgvc::Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        fgvc::Dataset ds = testutil::toy_dataset(1 + static_cast<int>(rng.below(6)));
        for (auto& k : ds.keypoints) {
            k.visible = rng.below(3) != 0;
            k.x = k.visible ? rng.uniform(0.0, 200.0) : 0.0;
            k.y = k.visible ? rng.uniform(0.0, 160.0) : 0.0;
        }
        TempDir dir;
        fgvc::write_dataset(dir.path(), ds);
        CHECK(fgvc::parse_dataset(dir.path()) == ds);
    }
}

TEST_CASE("largest remainder allocation")
{
    using Counts = std::array<std::size_t, 3>;
    const fgvc::SplitRatios r;
    CHECK(fgvc::largest_remainder(10, r) == Counts{5, 2, 3});
    // 0.5, 0.2, 0.3 of one: the floors are all zero, train has the largest remainder.
    CHECK(fgvc::largest_remainder(1, r) == Counts{1, 0, 0});
    // 1.5, 0.6, 0.9: floors sum to 1, the two leftovers go to test then validation.
    CHECK(fgvc::largest_remainder(3, r) == Counts{1, 1, 1});
    // 3.5, 1.4, 2.1: train wins the single leftover.
    CHECK(fgvc::largest_remainder(7, r) == Counts{4, 1, 2});

    for (std::size_t n = 0; n < 200; ++n) {
        const auto c = fgvc::largest_remainder(n, r);
        CHECK(c[0] + c[1] + c[2] == n);
        const std::array<double, 3> exact{n * 0.5, n * 0.2, n * 0.3};
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(static_cast<double>(c[i]) - exact[i]) < 1.0);
    }
}

TEST_CASE("split_dataset")
{
    fgvc::Dataset ds = testutil::toy_dataset(10);
    for (auto& im : ds.images)
        im.class_id = 1;

    const auto split = fgvc::split_dataset(ds, {}, 7);
    REQUIRE(split.size() == 10);
    std::array<int, 3> counts{};
    for (const auto& a : split)
        ++counts[static_cast<int>(a.split)];
    CHECK(counts == std::array<int, 3>{5, 2, 3});

    SUBCASE("input order does not matter")
    {
        fgvc::Dataset shuffled = ds;
        std::reverse(shuffled.images.begin(), shuffled.images.end());
        CHECK(fgvc::split_dataset(shuffled, {}, 7) == split);
    }
    SUBCASE("single image")
    {
        fgvc::Dataset one = testutil::toy_dataset(1);
        const auto s = fgvc::split_dataset(one, {}, 7);
        REQUIRE(s.size() == 1);
        CHECK(s[0].split == Split::Train);
    }
    SUBCASE("bad ratios")
    {
        CHECK(error_kind([&] { fgvc::split_dataset(ds, {0.5, 0.5, 0.5}, 1); }) == ErrorKind::BadRatios);
        CHECK(error_kind([&] { fgvc::split_dataset(ds, {1.0, 0.0, 0.0}, 1); }) == ErrorKind::BadRatios);
    }
    SUBCASE("other seeds still respect the counts")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            std::array<int, 3> c{};
            for (const auto& a : fgvc::split_dataset(ds, {}, seed))
                ++c[static_cast<int>(a.split)];
            CHECK(c == std::array<int, 3>{5, 2, 3});
        }
    }
}

TEST_CASE("split is stratified per class")
{
    fgvc::Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(40));
        fgvc::Dataset ds = testutil::toy_dataset(n);
        std::map<int, int> class_size;
        for (auto& im : ds.images) {
            im.class_id = 1 + static_cast<int>(rng.below(2));
            ++class_size[im.class_id];
        }
        const auto split = fgvc::split_dataset(ds, {}, rng.next());
        CHECK(split.size() == ds.images.size());
        std::map<int, std::array<std::size_t, 3>> per_class;
        for (const auto& a : split)
            ++per_class[ds.find_image(a.image_id)->class_id][static_cast<int>(a.split)];
        for (const auto& [cls, counts] : per_class)
            CHECK(counts == fgvc::largest_remainder(static_cast<std::size_t>(class_size[cls]), {}));
    }
}

TEST_CASE("split file round trip")
{
    const auto split = fgvc::split_dataset(testutil::toy_dataset(12), {}, 3);
    TempDir dir;
    testutil::write_text(dir / "split.txt", fgvc::format_split(split));
    CHECK(fgvc::parse_split_file(dir / "split.txt") == split);

    testutil::write_text(dir / "bad.txt", "1 3\n");
    CHECK(error_kind([&] { fgvc::parse_split_file(dir / "bad.txt"); }) == ErrorKind::MalformedLine);
}

TEST_CASE("detections")
{
    const auto d = fgvc::parse_detections_text("12 head 0.91 10.0 5.0 40.0 35.0\n", "d");
    REQUIRE(d.size() == 1);
    CHECK(d[0] == fgvc::Detection{12, fgvc::PartKind::Head, 0.91, fgvc::Box(10, 5, 40, 35)});

    CHECK(error_kind([] { fgvc::parse_detections_text("1 head 1.2 0 0 1 1\n", "d"); })
          == ErrorKind::ScoreOutOfRange);
    CHECK(error_kind([] { fgvc::parse_detections_text("1 head -0.1 0 0 1 1\n", "d"); })
          == ErrorKind::ScoreOutOfRange);
    CHECK(error_kind([] { fgvc::parse_detections_text("1 head 0.5 3 0 3 1\n", "d"); }) == ErrorKind::InvertedBox);
    CHECK(error_kind([] { fgvc::parse_detections_text("1 back 0.5 0 0 1 1\n", "d"); })
          == ErrorKind::MalformedLine);
    CHECK(error_kind([] { fgvc::parse_detections_text("1 head 0.5 0 0 1\n", "d"); }) == ErrorKind::MalformedLine);

    std::vector<fgvc::Detection> many;
    fgvc::Rng rng(2);
    for (int i = 0; i < 50; ++i)
        many.push_back({1 + i, fgvc::kAllPartKinds[rng.below(5)], rng.uniform01(), testutil::random_box(rng)});
    CHECK(fgvc::parse_detections_text(fgvc::format_detections(many), "d") == many);
}
