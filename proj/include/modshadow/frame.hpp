#pragma once

#include <array>

namespace modshadow {

// A point of the upper half-plane (im > 0).
struct HalfPlanePoint {
    double re = 0.0;
    double im = 1.0;
};

// A unit tangent vector over the half-plane; angle in [0, 2*pi), measured
// counterclockwise from the positive real direction. The vertical-up
// reference direction is angle = pi/2.
struct UnitTangent {
    HalfPlanePoint base;
    double angle = 0.0;
};

// Unit-determinant 2x2 real matrix up to sign, sign-normalized so that the
// first entry of (m11, m12, m21) exceeding 1e-14 in magnitude is positive.
// These are the unit tangent frames of the hyperbolic plane: the identity
// frame sits at i pointing vertically up.
struct FrameElement {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

    FrameElement() = default;
    // Normalizes determinant (scales by 1/sqrt(det)) and sign.
    FrameElement(double a, double b, double c, double d);

    static FrameElement identity() { return FrameElement(); }
    static FrameElement from_raw(const double m[4]) {
        return FrameElement(m[0], m[1], m[2], m[3]);
    }

    double det() const { return m11 * m22 - m12 * m21; }
    std::array<double, 4> entries() const { return {m11, m12, m21, m22}; }
};

FrameElement compose(const FrameElement& g, const FrameElement& h);
FrameElement inverse(const FrameElement& g);

HalfPlanePoint mobius_act(const FrameElement& g, const HalfPlanePoint& z);

UnitTangent frame_to_tangent(const FrameElement& g);
FrameElement tangent_to_frame(const UnitTangent& u);

// Left-invariant chart distance: min over relative sign of the Frobenius
// norm of inverse(g)*h -+ I. Zero iff g = +-h.
double chart_dist(const FrameElement& g, const FrameElement& h);

// chart_dist computed with compensated (double-double) products; use when g
// or h carries large entries that cancel, e.g. frames flowed for a long time
// against their aligning deck image.
double chart_dist_precise(const FrameElement& g, const FrameElement& h);

}  // namespace modshadow
