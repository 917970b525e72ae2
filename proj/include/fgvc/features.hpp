#pragma once

#include "fgvc/parts.hpp"

#include <array>
#include <bitset>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fgvc {

inline constexpr std::size_t kDefaultFeatureDim = 2048;

/// A permutation of all seven groups giving the block order of fused vectors.
using GroupOrder = std::array<Group, kNumGroups>;

/// InvalidArgument unless `order` lists every group exactly once.
void check_group_order(const GroupOrder& order);

/// Comma-separated list of all seven group names.
GroupOrder parse_group_order(std::string_view text);

/// Fixed-dimension feature vectors keyed by (image, group). Read-only once
/// built, so it may be shared between threads.
class FeatureStore {
public:
    explicit FeatureStore(std::size_t dim) : dim_(dim) {}

    /// DimensionMismatch on a wrong length, DuplicateKey on a repeated key,
    /// InvalidArgument on non-finite components.
    void add(int image_id, Group group, std::vector<double> vector);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return records_.size(); }

    const std::vector<double>* find(int image_id, Group group) const;
    bool has_image(int image_id) const;
    std::vector<int> image_ids() const;

private:
    std::size_t dim_;
    std::map<std::pair<int, Group>, std::vector<double>> records_;
};

/// Parses `<image_id>\t<group>\t<v1> ... <vD>` lines. D is taken from the
/// first record unless `expected_dim` is non-zero.
FeatureStore load_feature_store(const std::filesystem::path& path, std::size_t expected_dim = 0);
FeatureStore parse_feature_store(std::string_view content, const std::string& source_name,
                                 std::size_t expected_dim = 0);
std::string format_feature_store(const FeatureStore& store);

/// A set of groups. Blocks are always laid out in canonical order
/// (original, cropped, head, wing, breast, leg, tail) whatever order the
/// groups were listed in.
class CombinationSpec {
public:
    CombinationSpec() = default;
    CombinationSpec(std::initializer_list<Group> groups);
    explicit CombinationSpec(std::span<const Group> groups);

    static CombinationSpec baseline() { return {Group::Original, Group::Cropped}; }
    static CombinationSpec all();

    /// Comma-separated group names; `baseline` and `all` expand to their sets.
    static CombinationSpec parse(std::string_view text);

    CombinationSpec with(Group group) const;
    bool contains(Group group) const noexcept { return mask_.test(index_of(group)); }
    bool includes_baseline() const noexcept { return contains(Group::Original) && contains(Group::Cropped); }
    std::size_t size() const noexcept { return mask_.count(); }
    bool empty() const noexcept { return mask_.none(); }
    /// Member groups in `order` (canonical by default).
    std::vector<Group> groups(const GroupOrder& order = kCanonicalGroups) const;
    std::string to_string() const;

    friend bool operator==(const CombinationSpec&, const CombinationSpec&) = default;

private:
    std::bitset<kNumGroups> mask_;
};

struct FusedVector {
    int image_id = 0;
    std::vector<double> values;
    /// Indexed by canonical group index; set iff the group had a stored vector.
    std::bitset<kNumGroups> present;
};

/// Concatenates the spec's groups in `order`. Groups in the spec with no
/// stored vector become exact-zero blocks; groups outside the spec are
/// omitted. UnknownImage if the store holds nothing for `image_id`;
/// InvalidArgument for an empty spec.
FusedVector fuse(const FeatureStore& store, int image_id, const CombinationSpec& spec,
                 const GroupOrder& order = kCanonicalGroups);

/// Offset of `group`'s block in a vector fused with `spec`; the group must be in the spec.
std::size_t block_offset(const CombinationSpec& spec, Group group, std::size_t dim,
                         const GroupOrder& order = kCanonicalGroups);

/// Scales to unit Euclidean norm; all-zero vectors are left as they are.
void l2_normalize(std::span<double> values);

} // namespace fgvc
