#include "modshadow/frame.hpp"

#include <cmath>
#include <stdexcept>

#include "modshadow/dd.hpp"

namespace modshadow {

namespace {

constexpr double kSignTol = 1e-14;

void sign_normalize(double m[4]) {
    for (double v : {m[0], m[1], m[2]}) {
        if (std::fabs(v) > kSignTol) {
            if (v < 0.0)
                for (int i = 0; i < 4; ++i) m[i] = -m[i];
            return;
        }
    }
}

}  // namespace

FrameElement::FrameElement(double a, double b, double c, double d) {
    double det = a * d - b * c;
    if (!(det > 0.0) || !std::isfinite(det))
        throw std::invalid_argument("FrameElement: determinant must be positive and finite");
    double s = 1.0 / std::sqrt(det);
    double m[4] = {a * s, b * s, c * s, d * s};
    sign_normalize(m);
    m11 = m[0];
    m12 = m[1];
    m21 = m[2];
    m22 = m[3];
}

FrameElement compose(const FrameElement& g, const FrameElement& h) {
    return FrameElement(g.m11 * h.m11 + g.m12 * h.m21, g.m11 * h.m12 + g.m12 * h.m22,
                        g.m21 * h.m11 + g.m22 * h.m21, g.m21 * h.m12 + g.m22 * h.m22);
}

FrameElement inverse(const FrameElement& g) {
    return FrameElement(g.m22, -g.m12, -g.m21, g.m11);
}

HalfPlanePoint mobius_act(const FrameElement& g, const HalfPlanePoint& z) {
    // (m11 z + m12) / (m21 z + m22); with det 1 the imaginary part maps to
    // im / |m21 z + m22|^2 > 0.
    double ur = g.m11 * z.re + g.m12, ui = g.m11 * z.im;
    double vr = g.m21 * z.re + g.m22, vi = g.m21 * z.im;
    double n = vr * vr + vi * vi;
    return HalfPlanePoint{(ur * vr + ui * vi) / n, (ui * vr - ur * vi) / n};
}

UnitTangent frame_to_tangent(const FrameElement& g) {
    HalfPlanePoint z = mobius_act(g, HalfPlanePoint{0.0, 1.0});
    // Derivative of the Mobius map at i is 1/(m21 i + m22)^2; the vertical
    // unit vector i at the base point i pushes forward with argument
    // pi/2 - 2 arg(m21 i + m22).
    double ang = M_PI / 2 - 2.0 * std::atan2(g.m21, g.m22);
    ang = std::fmod(ang, 2.0 * M_PI);
    if (ang < 0.0) ang += 2.0 * M_PI;
    return UnitTangent{z, ang};
}

FrameElement tangent_to_frame(const UnitTangent& u) {
    if (!(u.base.im > 0.0)) throw std::invalid_argument("tangent_to_frame: im must be positive");
    double sy = std::sqrt(u.base.im);
    // b(z) moves i to the base point keeping the vertical direction, then a
    // rotation about i turns the direction: k(phi) rotates the tangent by
    // -2 phi, so phi = (pi/2 - angle)/2.
    double phi = (M_PI / 2 - u.angle) / 2.0;
    double c = std::cos(phi), s = std::sin(phi);
    double x = u.base.re;
    return FrameElement(sy * c + (x / sy) * s, -sy * s + (x / sy) * c, s / sy, c / sy);
}

namespace {

double norm_min_sign(const double m[4]) {
    double dp = 0.0, dm = 0.0;
    const double id[4] = {1.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        double a = m[i] - id[i];
        double b = m[i] + id[i];
        dp += a * a;
        dm += b * b;
    }
    return std::sqrt(dp < dm ? dp : dm);
}

}  // namespace

double chart_dist(const FrameElement& g, const FrameElement& h) {
    FrameElement gi = inverse(g);
    double m[4] = {gi.m11 * h.m11 + gi.m12 * h.m21, gi.m11 * h.m12 + gi.m12 * h.m22,
                   gi.m21 * h.m11 + gi.m22 * h.m21, gi.m21 * h.m12 + gi.m22 * h.m22};
    return norm_min_sign(m);
}

double chart_dist_precise(const FrameElement& g, const FrameElement& h) {
    // inverse(g) via adjugate (det is already 1 to rounding).
    double gi[4] = {g.m22, -g.m12, -g.m21, g.m11};
    double hm[4] = {h.m11, h.m12, h.m21, h.m22};
    DDMat p = dd_matmul(DDMat::from(gi), DDMat::from(hm));
    double m[4];
    p.to(m);
    return norm_min_sign(m);
}

}  // namespace modshadow
