#include "modshadow/bracket.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modshadow/errors.hpp"
#include "modshadow/flow.hpp"

namespace modshadow {

namespace {

constexpr double kChartFloor = 1e-8;

}  // namespace

double BracketParams::max_abs() const {
    return std::max({std::fabs(sigma), std::fabs(nu), std::fabs(c)});
}

BracketParams nak_decompose(const FrameElement& h) {
    double h12 = h.m12, h21 = h.m21, h22 = h.m22;
    if (std::fabs(h22) <= kChartFloor) throw OutsideChartError();
    if (h22 < 0.0) {
        h12 = -h12;
        h21 = -h21;
        h22 = -h22;
    }
    BracketParams p;
    p.sigma = h12 / h22;
    p.nu = h21 * h22;
    p.c = -2.0 * std::log(h22);
    return p;
}

BracketParams nak_decompose_mirrored(const FrameElement& h) {
    double h11 = h.m11, h12 = h.m12, h21 = h.m21;
    if (std::fabs(h11) <= kChartFloor) throw OutsideChartError();
    if (h11 < 0.0) {
        h11 = -h11;
        h12 = -h12;
        h21 = -h21;
    }
    BracketParams p;
    p.sigma = h12 * h11;
    p.nu = h21 / h11;
    p.c = 2.0 * std::log(h11);
    return p;
}

FrameElement nak_recompose(const BracketParams& p) {
    double e = std::exp(p.c / 2.0);
    return FrameElement((1.0 + p.sigma * p.nu) * e, p.sigma / e, p.nu * e, 1.0 / e);
}

FrameElement nak_recompose_mirrored(const BracketParams& p) {
    double e = std::exp(p.c / 2.0);
    return FrameElement(e, p.sigma / e, p.nu * e, (1.0 + p.sigma * p.nu) / e);
}

namespace {

BracketResult bracket_core(const FrameElement& y, const FrameElement& z, double eta,
                           bool mirrored) {
    FrameElement h = compose(inverse(z), y);
    BracketParams p = mirrored ? nak_decompose_mirrored(h) : nak_decompose(h);
    if (p.max_abs() > eta) throw EtaExceededError(p.sigma, p.nu, p.c, eta);
    BracketResult r;
    r.params = p;
    r.deck = DeckElement::identity();
    if (!mirrored) {
        // w on the stable leaf of z; equals y a(-c) n-(-nu) on W^{cu}(y).
        r.w = stable_move(z, p.sigma);
        double rec = chart_dist(compose(z, nak_recompose(p)), y);
        double leaf = chart_dist(unstable_move(geodesic_flow(y, -p.c), -p.nu), r.w);
        r.residual = std::max(rec, leaf);
    } else {
        r.w = unstable_move(z, p.nu);
        double rec = chart_dist(compose(z, nak_recompose_mirrored(p)), y);
        double leaf = chart_dist(stable_move(geodesic_flow(y, -p.c), -p.sigma), r.w);
        r.residual = std::max(rec, leaf);
    }
    return r;
}

}  // namespace

BracketResult bowen_bracket(const FrameElement& y, const FrameElement& z, double eta,
                            bool mirrored) {
    if (!(eta > 0.0)) throw std::invalid_argument("bowen_bracket: eta must be positive");
    return bracket_core(y, z, eta, mirrored);
}

BracketResult bracket_in_quotient(const FrameElement& y, const FrameElement& z, double eta,
                                  bool mirrored) {
    if (!(eta > 0.0)) throw std::invalid_argument("bracket_in_quotient: eta must be positive");
    AlignedDist al = quotient_dist_aligned(y, z);
    BracketResult r = bracket_core(deck_apply(al.deck, y, true), z, eta, mirrored);
    r.deck = al.deck;
    return r;
}

LocalProductConstants local_product_constants(const FrameElement& x, double eps) {
    double inj = injectivity_radius(x);
    if (!(eps > 0.0) || eps > inj + 1e-12)
        throw std::invalid_argument("local_product_constants: eps must lie in (0, inj(x)]");
    double scale = inj / kInjBulk;
    return LocalProductConstants{eps / 8.0 * scale, eps / 4.0 * scale};
}

}  // namespace modshadow
