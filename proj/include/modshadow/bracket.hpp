#pragma once

#include "modshadow/frame.hpp"
#include "modshadow/lattice.hpp"

namespace modshadow {

// Factorization coordinates for the product chart h = n+(sigma) n-(nu) a(c):
// sigma is the stable parameter, nu the unstable one and c the center time.
struct BracketParams {
    double sigma = 0.0;
    double nu = 0.0;
    double c = 0.0;

    double max_abs() const;
};

struct BracketResult {
    FrameElement w;
    BracketParams params;
    DeckElement deck;       // identity for the chart-level bracket
    double residual = 0.0;  // max of the two leaf-membership residuals
};

// h = n+(sigma) n-(nu) a(c) with sigma = h12/h22, nu = h21*h22,
// c = -2 ln h22 on the sign representative with h22 > 0. Throws
// OutsideChartError when |h22| <= 1e-8.
BracketParams nak_decompose(const FrameElement& h);

// Mirrored chart h = n-(nu) n+(sigma) a(c), used by the W^{cs}/W^{uu}
// bracket orientation; fails when |h11| <= 1e-8.
BracketParams nak_decompose_mirrored(const FrameElement& h);

FrameElement nak_recompose(const BracketParams& p);
FrameElement nak_recompose_mirrored(const BracketParams& p);

// w = W_eta^{cu}(y) int W_eta^{ss}(z) (or the mirrored W^{cs}/W^{uu} pair).
// Throws EtaExceededError when any coordinate magnitude exceeds eta.
BracketResult bowen_bracket(const FrameElement& y, const FrameElement& z, double eta,
                            bool mirrored = false);

// Quotient version: aligns y next to z with the deck minimizing chart
// distance, then brackets; the deck is recorded in the result.
BracketResult bracket_in_quotient(const FrameElement& y, const FrameElement& z, double eta,
                                  bool mirrored = false);

struct LocalProductConstants {
    double delta = 0.0;
    double eta = 0.0;
};

// delta = eps/8 and eta = eps/4, both scaled by inj(x)/r0. Requires
// eps <= injectivity_radius(x).
LocalProductConstants local_product_constants(const FrameElement& x, double eps);

}  // namespace modshadow
