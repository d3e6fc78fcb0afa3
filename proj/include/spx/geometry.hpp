#pragma once

namespace spx {

// Axis-aligned box in pixel units, (x, y) being the top-left corner.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double center_x() const { return x + w / 2.0; }
    double center_y() const { return y + h / 2.0; }
    double area() const { return w * h; }

    bool operator==(const BoundingBox&) const = default;
};

// Six-parameter affine target pose. (x, y) is the template center in pixel
// coordinates, scale is an area scale and aspect a pure width/height ratio,
// so a template of n1 x n2 samples covers n1*scale*sqrt(aspect) by
// n2*scale/sqrt(aspect) frame pixels before rotation and skew.
struct AffineState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double scale = 1.0;
    double aspect = 1.0;
    double skew = 0.0;

    bool operator==(const AffineState&) const = default;
};

bool is_finite(const AffineState& s);

// Box <-> state mapping for a template of template_w x template_h samples.
// Rotation and skew are dropped when going back to an axis-aligned box.
AffineState state_from_box(const BoundingBox& box, int template_w, int template_h);
BoundingBox box_from_state(const AffineState& state, int template_w, int template_h);

} // namespace spx
