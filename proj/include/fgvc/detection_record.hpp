#pragma once

#include "fgvc/geometry.hpp"
#include "fgvc/parts.hpp"

namespace fgvc {

/// A scored candidate box for one part kind on one image.
struct Detection {
    int image_id = 0;
    PartKind kind = PartKind::Head;
    double score = 0.0;
    Box box{0.0, 0.0, 1.0, 1.0};

    friend bool operator==(const Detection&, const Detection&) = default;
};

} // namespace fgvc
