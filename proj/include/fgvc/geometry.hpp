#pragma once

#include <optional>
#include <span>

namespace fgvc {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle in continuous pixel coordinates.
///
/// Always has positive area: the constructor rejects x1 >= x2, y1 >= y2 and
/// non-finite corners with ErrorKind::InvalidBox. Area is (x2-x1)*(y2-y1);
/// there is no inclusive-pixel +1.
class Box {
public:
    Box(double x1, double y1, double x2, double y2);

    double x1() const noexcept { return x1_; }
    double y1() const noexcept { return y1_; }
    double x2() const noexcept { return x2_; }
    double y2() const noexcept { return y2_; }

    double width() const noexcept { return x2_ - x1_; }
    double height() const noexcept { return y2_ - y1_; }
    double area() const noexcept { return width() * height(); }
    Point center() const noexcept { return {(x1_ + x2_) / 2.0, (y1_ + y2_) / 2.0}; }

    friend bool operator==(const Box&, const Box&) = default;

private:
    double x1_;
    double y1_;
    double x2_;
    double y2_;
};

/// True when (x1, y1, x2, y2) would form a valid Box.
bool is_valid_box(double x1, double y1, double x2, double y2) noexcept;

/// Lexicographic (x1, y1, x2, y2) ordering.
bool lex_less(const Box& a, const Box& b) noexcept;

/// Closed containment: points on the boundary are inside.
bool contains(const Box& box, Point p) noexcept;
bool contains(const Box& outer, const Box& inner) noexcept;

/// Positive-area intersection, or nullopt when the interiors are disjoint.
std::optional<Box> intersection(const Box& a, const Box& b) noexcept;

double intersection_area(const Box& a, const Box& b) noexcept;

/// Intersection over union in [0, 1]; symmetric, exactly 1 for identical boxes.
double iou(const Box& a, const Box& b) noexcept;

/// Smallest box containing every point. Throws DegeneratePointSet when the
/// extent has zero width or height and InvalidArgument for an empty set.
Box minimal_rect(std::span<const Point> points);

/// Square of the given side centred on `center`; NonPositiveSide unless side > 0.
Box centered_square(Point center, double side);

/// Scales width and height about the box centre.
Box scale_about_center(const Box& box, double width_factor, double height_factor);

/// Intersection with `bounds`; nullopt if it has zero area.
std::optional<Box> clip(const Box& box, const Box& bounds) noexcept;

/// Exact area of the union of up to 16 boxes by inclusion-exclusion.
/// Inputs are canonically ordered first, so the result does not depend on
/// their order.
double union_area(std::span<const Box> boxes);

/// |candidate ∩ U| / |candidate ∪ U| where U is the geometric union of
/// `others`. Zero when `others` is empty.
double iou_against_union(const Box& candidate, std::span<const Box> others);

} // namespace fgvc
