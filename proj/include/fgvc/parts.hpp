#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace fgvc {

/// The five part regions, in region-generation order. The underlying value is
/// also the YOLO class index.
enum class PartKind { Head = 0, Breast = 1, Tail = 2, Wing = 3, Leg = 4 };

inline constexpr std::size_t kNumPartKinds = 5;
inline constexpr std::array<PartKind, kNumPartKinds> kAllPartKinds{
    PartKind::Head, PartKind::Breast, PartKind::Tail, PartKind::Wing, PartKind::Leg};

/// The seven image groups whose features are fused, in canonical block order.
enum class Group { Original = 0, Cropped = 1, Head = 2, Wing = 3, Breast = 4, Leg = 5, Tail = 6 };

inline constexpr std::size_t kNumGroups = 7;
inline constexpr std::array<Group, kNumGroups> kCanonicalGroups{
    Group::Original, Group::Cropped, Group::Head, Group::Wing, Group::Breast, Group::Leg, Group::Tail};

constexpr std::size_t index_of(PartKind kind) noexcept { return static_cast<std::size_t>(kind); }
constexpr std::size_t index_of(Group group) noexcept { return static_cast<std::size_t>(group); }

Group group_of(PartKind kind) noexcept;
std::optional<PartKind> part_of(Group group) noexcept;

/// Lower-case file-format names: head, breast, tail, wing, leg.
std::string_view name_of(PartKind kind) noexcept;
/// Lower-case file-format names: original, cropped, head, ...
std::string_view name_of(Group group) noexcept;

std::optional<PartKind> parse_part_kind(std::string_view name) noexcept;
std::optional<Group> parse_group(std::string_view name) noexcept;

/// CUB-200-2011 keypoint ids (parts/parts.txt).
namespace cub {
inline constexpr int kBack = 1;
inline constexpr int kBeak = 2;
inline constexpr int kBelly = 3;
inline constexpr int kBreast = 4;
inline constexpr int kCrown = 5;
inline constexpr int kForehead = 6;
inline constexpr int kLeftEye = 7;
inline constexpr int kLeftLeg = 8;
inline constexpr int kLeftWing = 9;
inline constexpr int kNape = 10;
inline constexpr int kRightEye = 11;
inline constexpr int kRightLeg = 12;
inline constexpr int kRightWing = 13;
inline constexpr int kTail = 14;
inline constexpr int kThroat = 15;
inline constexpr int kNumKeypoints = 15;

/// Canonical names as they appear in parts/parts.txt, indexed by id - 1.
std::string_view keypoint_name(int part_id) noexcept;
} // namespace cub

/// Keypoint ids that make up each part region.
std::span<const int> keypoint_ids(PartKind kind) noexcept;

/// The part a keypoint id belongs to; nullopt for the unused `back` point.
std::optional<PartKind> part_for_keypoint(int part_id) noexcept;

/// Fixed-size optional slot per PartKind.
template <typename T>
class PartMap {
public:
    std::optional<T>& operator[](PartKind kind) noexcept { return slots_[index_of(kind)]; }
    const std::optional<T>& operator[](PartKind kind) const noexcept { return slots_[index_of(kind)]; }

    bool has(PartKind kind) const noexcept { return slots_[index_of(kind)].has_value(); }

    std::size_t count() const noexcept
    {
        std::size_t n = 0;
        for (const auto& s : slots_)
            n += s.has_value() ? 1 : 0;
        return n;
    }

    friend bool operator==(const PartMap&, const PartMap&) = default;

private:
    std::array<std::optional<T>, kNumPartKinds> slots_{};
};

} // namespace fgvc
