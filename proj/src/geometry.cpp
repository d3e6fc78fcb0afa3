#include "spx/geometry.hpp"

#include <cmath>

namespace spx {

bool is_finite(const AffineState& s)
{
    return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.theta) &&
           std::isfinite(s.scale) && std::isfinite(s.aspect) && std::isfinite(s.skew);
}

// Pixel i covers [i - 0.5, i + 0.5), so a box whose left pixel is x and which
// spans w pixels is centered at x + w/2 - 0.5.
AffineState state_from_box(const BoundingBox& box, int template_w, int template_h)
{
    AffineState s;
    s.x = box.x + box.w / 2.0 - 0.5;
    s.y = box.y + box.h / 2.0 - 0.5;
    s.scale = std::sqrt(box.w * box.h / (static_cast<double>(template_w) * template_h));
    s.aspect = (box.w * template_h) / (box.h * template_w);
    return s;
}

BoundingBox box_from_state(const AffineState& state, int template_w, int template_h)
{
    const double root = std::sqrt(state.aspect);
    BoundingBox box;
    box.w = template_w * state.scale * root;
    box.h = template_h * state.scale / root;
    box.x = state.x - box.w / 2.0 + 0.5;
    box.y = state.y - box.h / 2.0 + 0.5;
    return box;
}

} // namespace spx
