#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "modshadow/frame.hpp"
#include "modshadow/lattice.hpp"

namespace modshadow {

// Hyperbolicity constants of the flow. For this model the leaf parameter
// contracts exactly like e^{-t}; C = 2 absorbs chart distortion.
struct AnosovConstants {
    double C = 2.0;
    double lambda = 0.36787944117144233;  // e^{-1}

    void validate() const;
};

// Tangent directions at a frame spanning stable / unstable / flow lines,
// given as right-translated one-parameter subgroup generators (row-major).
struct SplittingBasis {
    std::array<double, 4> e_s, e_u, e_c;
};
SplittingBasis splitting_basis(const FrameElement& g);

FrameElement geodesic_flow(const FrameElement& g, double t);
FrameElement stable_move(const FrameElement& g, double s);
FrameElement unstable_move(const FrameElement& g, double u);
FrameElement center_unstable_point(const FrameElement& g, double tau, double u);
FrameElement center_stable_point(const FrameElement& g, double tau, double s);

// The flip v -> -v; conjugates the geodesic flow to its time reversal and
// swaps stable and unstable horocycles.
FrameElement time_reverse(const FrameElement& g);

enum class LeafKind { StrongStable, StrongUnstable, CenterStable, CenterUnstable };

struct LocalManifoldPatch {
    FrameElement base;
    LeafKind kind;
    double size = 0.0;  // leaf parameter range
    std::vector<FrameElement> samples;
};

LocalManifoldPatch local_manifold(const FrameElement& g, LeafKind kind, int n_samples);

// Sampling window over the quotient (shared with the experiments module).
struct Window {
    double re_lo = -0.5, re_hi = 0.5;
    double im_lo = 1.0, im_hi = 4.0;
    int angle_grid = 64;
    int sample_count = 500;

    void validate() const;
};

FrameElement sample_window_frame(const Window& w, class Rng& rng);

struct AnosovReport {
    double max_normalized_ratio = 0.0;      // max over samples,t of d_t / (C lambda^t d_0)
    double max_parameter_deviation = 0.0;   // conjugation-identity residual
    double unstable_forward_max_ratio = 0.0;  // negative control, expected > 1
    std::size_t samples = 0;
};

AnosovReport verify_anosov_bounds(const Window& window, const AnosovConstants& constants,
                                  const std::vector<double>& t_grid, std::size_t n_samples,
                                  std::uint64_t seed, double displacement = 1e-3,
                                  int threads = 1);

}  // namespace modshadow
