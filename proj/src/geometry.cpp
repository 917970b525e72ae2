#include "fgvc/geometry.hpp"

#include "fgvc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fgvc {

namespace {

std::string describe(double x1, double y1, double x2, double y2)
{
    return "(" + std::to_string(x1) + ", " + std::to_string(y1) + ", " + std::to_string(x2) + ", "
        + std::to_string(y2) + ")";
}

constexpr std::size_t kMaxUnionBoxes = 16;

// Signed inclusion-exclusion sum over all non-empty subsets of boxes[from..],
// each intersected with `running`. Subsets whose intersection is already empty
// contribute nothing and are pruned.
double inclusion_exclusion(std::span<const Box> boxes, std::size_t from, const Box& running, int depth)
{
    double total = 0.0;
    for (std::size_t i = from; i < boxes.size(); ++i) {
        const auto next = intersection(running, boxes[i]);
        if (!next)
            continue;
        const double sign = (depth % 2 == 0) ? -1.0 : 1.0;
        total += sign * next->area();
        total += inclusion_exclusion(boxes, i + 1, *next, depth + 1);
    }
    return total;
}

} // namespace

Box::Box(double x1, double y1, double x2, double y2) : x1_(x1), y1_(y1), x2_(x2), y2_(y2)
{
    if (!is_valid_box(x1, y1, x2, y2))
        raise(ErrorKind::InvalidBox, "box " + describe(x1, y1, x2, y2) + " has no positive area");
}

bool is_valid_box(double x1, double y1, double x2, double y2) noexcept
{
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) && x1 < x2
        && y1 < y2;
}

bool lex_less(const Box& a, const Box& b) noexcept
{
    if (a.x1() != b.x1())
        return a.x1() < b.x1();
    if (a.y1() != b.y1())
        return a.y1() < b.y1();
    if (a.x2() != b.x2())
        return a.x2() < b.x2();
    return a.y2() < b.y2();
}

bool contains(const Box& box, Point p) noexcept
{
    return p.x >= box.x1() && p.x <= box.x2() && p.y >= box.y1() && p.y <= box.y2();
}

bool contains(const Box& outer, const Box& inner) noexcept
{
    return inner.x1() >= outer.x1() && inner.x2() <= outer.x2() && inner.y1() >= outer.y1()
        && inner.y2() <= outer.y2();
}

std::optional<Box> intersection(const Box& a, const Box& b) noexcept
{
    const double x1 = std::max(a.x1(), b.x1());
    const double y1 = std::max(a.y1(), b.y1());
    const double x2 = std::min(a.x2(), b.x2());
    const double y2 = std::min(a.y2(), b.y2());
    if (!(x1 < x2 && y1 < y2))
        return std::nullopt;
    return Box(x1, y1, x2, y2);
}

double intersection_area(const Box& a, const Box& b) noexcept
{
    const auto inter = intersection(a, b);
    return inter ? inter->area() : 0.0;
}

double iou(const Box& a, const Box& b) noexcept
{
    const double inter = intersection_area(a, b);
    if (inter == 0.0)
        return 0.0;
    const double uni = a.area() + b.area() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

Box minimal_rect(std::span<const Point> points)
{
    if (points.empty())
        raise(ErrorKind::InvalidArgument, "minimal_rect of an empty point set");
    double x1 = points.front().x;
    double y1 = points.front().y;
    double x2 = x1;
    double y2 = y1;
    for (const Point& p : points) {
        x1 = std::min(x1, p.x);
        y1 = std::min(y1, p.y);
        x2 = std::max(x2, p.x);
        y2 = std::max(y2, p.y);
    }
    if (!(x1 < x2 && y1 < y2))
        raise(ErrorKind::DegeneratePointSet, "point extent " + describe(x1, y1, x2, y2) + " has zero area");
    return Box(x1, y1, x2, y2);
}

Box centered_square(Point center, double side)
{
    if (!(side > 0.0) || !std::isfinite(side))
        raise(ErrorKind::NonPositiveSide, "square side must be positive, got " + std::to_string(side));
    const double half = side / 2.0;
    return Box(center.x - half, center.y - half, center.x + half, center.y + half);
}

Box scale_about_center(const Box& box, double width_factor, double height_factor)
{
    const Point c = box.center();
    const double half_w = box.width() * width_factor / 2.0;
    const double half_h = box.height() * height_factor / 2.0;
    return Box(c.x - half_w, c.y - half_h, c.x + half_w, c.y + half_h);
}

std::optional<Box> clip(const Box& box, const Box& bounds) noexcept
{
    return intersection(box, bounds);
}

double union_area(std::span<const Box> boxes)
{
    if (boxes.size() > kMaxUnionBoxes)
        raise(ErrorKind::InvalidArgument, "union_area supports at most 16 boxes");
    std::vector<Box> sorted(boxes.begin(), boxes.end());
    std::sort(sorted.begin(), sorted.end(), lex_less);
    double total = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        total += sorted[i].area();
        total += inclusion_exclusion(sorted, i + 1, sorted[i], 0);
    }
    return total;
}

double iou_against_union(const Box& candidate, std::span<const Box> others)
{
    if (others.empty())
        return 0.0;
    std::vector<Box> clipped;
    clipped.reserve(others.size());
    for (const Box& o : others) {
        if (auto inter = intersection(candidate, o))
            clipped.push_back(*inter);
    }
    if (clipped.empty())
        return 0.0;
    // |c ∩ U| = |∪ (c ∩ o_i)|, and |c ∪ U| = |c| + |U| - |c ∩ U|.
    const double inter = union_area(clipped);
    const double uni = candidate.area() + union_area(others) - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

} // namespace fgvc
