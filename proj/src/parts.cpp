#include "fgvc/parts.hpp"

namespace fgvc {

namespace {

constexpr std::array<std::string_view, kNumPartKinds> kPartNames{"head", "breast", "tail", "wing", "leg"};
constexpr std::array<std::string_view, kNumGroups> kGroupNames{
    "original", "cropped", "head", "wing", "breast", "leg", "tail"};

constexpr std::array<std::string_view, cub::kNumKeypoints> kKeypointNames{
    "back", "beak", "belly", "breast", "crown", "forehead", "left eye", "left leg",
    "left wing", "nape", "right eye", "right leg", "right wing", "tail", "throat"};

constexpr std::array<int, 7> kHeadIds{
    cub::kBeak, cub::kCrown, cub::kForehead, cub::kLeftEye, cub::kNape, cub::kRightEye, cub::kThroat};
constexpr std::array<int, 2> kBreastIds{cub::kBelly, cub::kBreast};
constexpr std::array<int, 1> kTailIds{cub::kTail};
constexpr std::array<int, 2> kWingIds{cub::kLeftWing, cub::kRightWing};
constexpr std::array<int, 2> kLegIds{cub::kLeftLeg, cub::kRightLeg};

} // namespace

Group group_of(PartKind kind) noexcept
{
    switch (kind) {
    case PartKind::Head: return Group::Head;
    case PartKind::Breast: return Group::Breast;
    case PartKind::Tail: return Group::Tail;
    case PartKind::Wing: return Group::Wing;
    case PartKind::Leg: return Group::Leg;
    }
    return Group::Head;
}

std::optional<PartKind> part_of(Group group) noexcept
{
    switch (group) {
    case Group::Head: return PartKind::Head;
    case Group::Breast: return PartKind::Breast;
    case Group::Tail: return PartKind::Tail;
    case Group::Wing: return PartKind::Wing;
    case Group::Leg: return PartKind::Leg;
    case Group::Original:
    case Group::Cropped: return std::nullopt;
    }
    return std::nullopt;
}

std::string_view name_of(PartKind kind) noexcept { return kPartNames[index_of(kind)]; }
std::string_view name_of(Group group) noexcept { return kGroupNames[index_of(group)]; }

std::optional<PartKind> parse_part_kind(std::string_view name) noexcept
{
    for (const PartKind k : kAllPartKinds)
        if (name_of(k) == name)
            return k;
    return std::nullopt;
}

std::optional<Group> parse_group(std::string_view name) noexcept
{
    for (const Group g : kCanonicalGroups)
        if (name_of(g) == name)
            return g;
    return std::nullopt;
}

std::string_view cub::keypoint_name(int part_id) noexcept
{
    if (part_id < 1 || part_id > kNumKeypoints)
        return {};
    return kKeypointNames[static_cast<std::size_t>(part_id - 1)];
}

std::span<const int> keypoint_ids(PartKind kind) noexcept
{
    switch (kind) {
    case PartKind::Head: return kHeadIds;
    case PartKind::Breast: return kBreastIds;
    case PartKind::Tail: return kTailIds;
    case PartKind::Wing: return kWingIds;
    case PartKind::Leg: return kLegIds;
    }
    return {};
}

std::optional<PartKind> part_for_keypoint(int part_id) noexcept
{
    for (const PartKind k : kAllPartKinds)
        for (const int id : keypoint_ids(k))
            if (id == part_id)
                return k;
    return std::nullopt;
}

} // namespace fgvc
