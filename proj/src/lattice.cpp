#include "modshadow/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>

#include "modshadow/dd.hpp"
#include "modshadow/errors.hpp"

namespace modshadow {

namespace {

constexpr size_t kMaxWordLetters = 4096;

void deck_sign_normalize(DeckElement& g) {
    for (int128 v : {g.a, g.b, g.c}) {
        if (v != 0) {
            if (v < 0) {
                g.a = -g.a;
                g.b = -g.b;
                g.c = -g.c;
                g.d = -g.d;
            }
            return;
        }
    }
}

int128 checked_entry(int128 v) {
    if (v > kDeckEntryLimit || v < -kDeckEntryLimit) throw DeckOverflowError();
    return v;
}

std::optional<std::string> concat_words(const std::optional<std::string>& x,
                                        const std::optional<std::string>& y) {
    if (!x || !y) return std::nullopt;
    if (x->size() + y->size() > kMaxWordLetters) return std::nullopt;
    return *x + *y;
}

// Wordless generators for the reduction hot path.
DeckElement s_nw() {
    DeckElement e;
    e.a = 0;
    e.b = 1;
    e.c = -1;
    e.d = 0;  // sign-normalized form of S
    return e;
}

DeckElement t_nw(long long n) {
    DeckElement e;
    e.b = n;
    deck_sign_normalize(e);
    return e;
}

}  // namespace

DeckElement DeckElement::S() {
    DeckElement e = s_nw();
    e.word = "S";
    return e;
}

DeckElement DeckElement::T(long long n) {
    DeckElement e = t_nw(n);
    size_t len = static_cast<size_t>(std::llabs(n));
    if (len <= kMaxWordLetters) e.word = std::string(len, n >= 0 ? 'T' : 't');
    return e;
}

long long DeckElement::trace_ll() const {
    int128 t = trace();
    if (t > kDeckEntryLimit || t < -kDeckEntryLimit) throw DeckOverflowError();
    return static_cast<long long>(t);
}

DeckElement compose_deck(const DeckElement& g, const DeckElement& h) {
    DeckElement r;
    r.a = checked_entry(g.a * h.a + g.b * h.c);
    r.b = checked_entry(g.a * h.b + g.b * h.d);
    r.c = checked_entry(g.c * h.a + g.d * h.c);
    r.d = checked_entry(g.c * h.b + g.d * h.d);
    r.word = concat_words(g.word, h.word);
    deck_sign_normalize(r);
    return r;
}

DeckElement inverse_deck(const DeckElement& g) {
    DeckElement r;
    r.a = g.d;
    r.b = -g.b;
    r.c = -g.c;
    r.d = g.a;
    if (g.word) {
        std::string w;
        w.reserve(g.word->size());
        for (auto it = g.word->rbegin(); it != g.word->rend(); ++it) {
            switch (*it) {
                case 'S': w += 'S'; break;  // S^-1 = S in PSL(2,Z)
                case 'T': w += 't'; break;
                case 't': w += 'T'; break;
                default: break;
            }
        }
        r.word = std::move(w);
    }
    deck_sign_normalize(r);
    return r;
}

FrameElement deck_apply(const DeckElement& k, const FrameElement& g, bool precise) {
    double ka = static_cast<double>(k.a), kb = static_cast<double>(k.b);
    double kc = static_cast<double>(k.c), kd = static_cast<double>(k.d);
    if (!precise) {
        return FrameElement(ka * g.m11 + kb * g.m21, ka * g.m12 + kb * g.m22,
                            kc * g.m11 + kd * g.m21, kc * g.m12 + kd * g.m22);
    }
    double km[4] = {ka, kb, kc, kd};
    double gm[4] = {g.m11, g.m12, g.m21, g.m22};
    DDMat p = dd_matmul(DDMat::from(km), DDMat::from(gm));
    double out[4];
    p.to(out);
    return FrameElement(out[0], out[1], out[2], out[3]);
}

HalfPlanePoint deck_apply(const DeckElement& k, const HalfPlanePoint& z) {
    FrameElement f(static_cast<double>(k.a), static_cast<double>(k.b),
                   static_cast<double>(k.c), static_cast<double>(k.d));
    return mobius_act(f, z);
}

std::pair<HalfPlanePoint, DeckElement> reduce_point(const HalfPlanePoint& z0) {
    if (!(z0.im > 0.0)) throw std::invalid_argument("reduce_point: im must be positive");
    if (!(std::fabs(z0.re) < 4e18)) throw std::invalid_argument("reduce_point: re out of range");
    double x = z0.re, y = z0.im;
    DeckElement deck;  // wordless identity
    for (int step = 0; step < 400; ++step) {
        long long n = static_cast<long long>(std::floor(x + 0.5));
        if (n != 0) {
            x -= static_cast<double>(n);
            deck = compose_deck(t_nw(-n), deck);
        }
        double r2 = x * x + y * y;
        if (r2 < 1.0 - 1e-15) {
            x = -x / r2;
            y = y / r2;
            deck = compose_deck(s_nw(), deck);
            continue;
        }
        // Circle-boundary tie: |z| = 1 reduces to re <= 0.
        if (r2 <= 1.0 + 1e-15 && x > 1e-15) {
            x = -x / r2;
            y = y / r2;
            deck = compose_deck(s_nw(), deck);
        }
        return {HalfPlanePoint{x, y}, deck};
    }
    throw Error("reduce_point: reduction did not terminate");
}

ReducedFrame reduce_frame(const FrameElement& g) {
    HalfPlanePoint z = mobius_act(g, HalfPlanePoint{0.0, 1.0});
    auto [zr, deck] = reduce_point(z);
    (void)zr;
    // The deck and frame entries both grow like e^{t/2} along flowed frames
    // while the reduced result is order one, so the product needs
    // compensated arithmetic.
    return ReducedFrame{deck_apply(deck, g, true), deck};
}

const std::vector<DeckElement>& candidate_decks() {
    static const std::vector<DeckElement> ball = [] {
        std::map<std::array<long long, 4>, DeckElement> seen;
        auto key = [](const DeckElement& m) {
            return std::array<long long, 4>{static_cast<long long>(m.a),
                                            static_cast<long long>(m.b),
                                            static_cast<long long>(m.c),
                                            static_cast<long long>(m.d)};
        };
        std::vector<DeckElement> frontier{DeckElement::identity()};
        seen[key(frontier[0])] = frontier[0];
        const DeckElement gens[3] = {DeckElement::S(), DeckElement::T(1), DeckElement::T(-1)};
        for (int depth = 0; depth < 6; ++depth) {
            std::vector<DeckElement> next;
            for (const auto& f : frontier)
                for (const auto& g : gens) {
                    DeckElement m = compose_deck(g, f);
                    if (seen.emplace(key(m), m).second) next.push_back(m);
                }
            frontier = std::move(next);
        }
        // Extra cusp translations so pairs high in the cusp still align.
        for (long long n = 2; n <= 12; ++n)
            for (long long v : {n, -n}) {
                DeckElement m = DeckElement::T(v);
                seen.emplace(key(m), m);
            }
        std::vector<DeckElement> out;
        out.reserve(seen.size());
        for (auto& [k, v] : seen) out.push_back(v);
        return out;
    }();
    return ball;
}

AlignedDist quotient_dist_aligned(const FrameElement& g, const FrameElement& h) {
    ReducedFrame gr = reduce_frame(g);
    ReducedFrame hr = reduce_frame(h);
    double best = std::numeric_limits<double>::infinity();
    const DeckElement* best_cand = nullptr;
    for (const auto& cand : candidate_decks()) {
        double d = chart_dist(deck_apply(cand, gr.frame), hr.frame);
        if (d < best) {
            best = d;
            best_cand = &cand;
        }
    }
    if (!best_cand) throw NoCandidateDeckError();
    DeckElement total = compose_deck(inverse_deck(hr.deck), compose_deck(*best_cand, gr.deck));
    // Recompute the winning distance with compensated products; the plain
    // double pass only selects the candidate.
    double precise = chart_dist_precise(deck_apply(total, g, true), h);
    return AlignedDist{precise, total};
}

double quotient_dist(const FrameElement& g, const FrameElement& h) {
    return quotient_dist_aligned(g, h).dist;
}

ElementType classify(const DeckElement& g) {
    if (g.is_identity()) return ElementType::Identity;
    int128 t = g.trace();
    if (t < 0) t = -t;
    if (t < 2) return ElementType::Elliptic;
    if (t == 2) return ElementType::Parabolic;
    return ElementType::Hyperbolic;
}

double translation_length(const DeckElement& g) {
    if (classify(g) != ElementType::Hyperbolic) throw std::domain_error("no closed geodesic");
    double ht = std::fabs(static_cast<double>(g.trace())) / 2.0;
    return 2.0 * std::acosh(ht);
}

namespace {

AxisFrame axis_frame_real(double a, double b, double c, double d) {
    double tr = a + d;
    double sign = tr >= 0 ? 1.0 : -1.0;
    a *= sign;
    b *= sign;
    c *= sign;
    d *= sign;
    tr *= sign;
    double disc = std::sqrt(tr * tr - 4.0);
    double mu = (tr + disc) / 2.0;  // expanding eigenvalue, > 1
    double mu2 = 1.0 / mu;
    auto eigvec = [&](double lam, double& vx, double& vy) {
        double r1 = std::hypot(a - lam, b);
        double r2 = std::hypot(c, d - lam);
        if (r1 >= r2) {
            vx = -b;
            vy = a - lam;
        } else {
            vx = -(d - lam);
            vy = c;
        }
    };
    double ux, uy, vx, vy;
    eigvec(mu, ux, uy);
    eigvec(mu2, vx, vy);
    double det = ux * vy - uy * vx;
    if (det < 0) {
        vx = -vx;
        vy = -vy;
        det = -det;
    }
    if (!(det > 0.0)) throw std::domain_error("axis_frame: degenerate eigenvectors");
    FrameElement f(ux, vx, uy, vy);
    return AxisFrame{f, 2.0 * std::log(mu)};
}

}  // namespace

AxisFrame axis_frame(const DeckElement& g) {
    if (classify(g) != ElementType::Hyperbolic) throw std::domain_error("no closed geodesic");
    return axis_frame_real(static_cast<double>(g.a), static_cast<double>(g.b),
                           static_cast<double>(g.c), static_cast<double>(g.d));
}

AxisFrame axis_frame(const FrameElement& g) {
    if (!(std::fabs(g.m11 + g.m22) > 2.0))
        throw std::domain_error("no closed geodesic");
    return axis_frame_real(g.m11, g.m12, g.m21, g.m22);
}

double injectivity_radius(const FrameElement& g) {
    ReducedFrame r = reduce_frame(g);
    HalfPlanePoint z = mobius_act(r.frame, HalfPlanePoint{0.0, 1.0});
    return std::min(kInjBulk, kInjCuspCoef / z.im);
}

double epsilon_policy(const FrameElement& g) { return injectivity_radius(g) / 4.0; }

}  // namespace modshadow
