#pragma once

#include <cmath>

#include "modshadow/flow.hpp"
#include "modshadow/frame.hpp"
#include "modshadow/rng.hpp"

namespace testutil {

using namespace modshadow;

inline FrameElement random_frame(Rng& rng, double im_lo = 1.0, double im_hi = 2.0) {
    UnitTangent u;
    u.base.re = rng.uniform(-0.5, 0.5);
    u.base.im = rng.uniform(im_lo, im_hi);
    u.angle = rng.uniform(0.0, 2.0 * M_PI);
    return tangent_to_frame(u);
}

inline FrameElement frame_at(double re, double im, double angle = M_PI / 2) {
    return tangent_to_frame(UnitTangent{HalfPlanePoint{re, im}, angle});
}

inline double frob_diff(const FrameElement& a, const FrameElement& b) {
    double dp = 0.0, dm = 0.0;
    auto ea = a.entries(), eb = b.entries();
    for (int i = 0; i < 4; ++i) {
        dp += (ea[i] - eb[i]) * (ea[i] - eb[i]);
        dm += (ea[i] + eb[i]) * (ea[i] + eb[i]);
    }
    return std::sqrt(std::min(dp, dm));
}

}  // namespace testutil
