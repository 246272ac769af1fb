#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modshadow/frame.hpp"

namespace modshadow {

using int128 = __int128;

// Largest deck entry magnitude for which onward integer composition stays
// exact; compose_deck raises DeckOverflowError past it.
constexpr int128 kDeckEntryLimit = int128(1) << 62;

enum class ElementType { Identity, Elliptic, Parabolic, Hyperbolic };

// Modular group element: integer unit-determinant 2x2 matrix up to sign,
// optionally carrying a generator word over {S, T, T^-1} (letters 'S', 'T',
// 't'). Sign canonicalized like FrameElement.
struct DeckElement {
    int128 a = 1, b = 0, c = 0, d = 1;
    std::optional<std::string> word;

    static DeckElement identity() {
        DeckElement e;
        e.word = "";
        return e;
    }
    static DeckElement S();
    static DeckElement T(long long n = 1);  // T^n

    bool is_identity() const { return b == 0 && c == 0 && a == d && (a == 1 || a == -1); }
    int128 trace() const { return a + d; }
    long long trace_ll() const;
    bool operator==(const DeckElement& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
};

DeckElement compose_deck(const DeckElement& g, const DeckElement& h);
DeckElement inverse_deck(const DeckElement& g);

// Left action of a deck element on a frame. `precise` uses double-double
// products (needed when entries are large and the result cancels).
FrameElement deck_apply(const DeckElement& k, const FrameElement& g, bool precise = false);
HalfPlanePoint deck_apply(const DeckElement& k, const HalfPlanePoint& z);

struct ReducedFrame {
    FrameElement frame;
    DeckElement deck;  // deck * (original frame) = +-frame
};

// Reduction into the closed standard fundamental domain |re| <= 1/2,
// |z| >= 1 with the boundary convention re = -1/2 and re <= 0 on |z| = 1.
std::pair<HalfPlanePoint, DeckElement> reduce_point(const HalfPlanePoint& z);
ReducedFrame reduce_frame(const FrameElement& g);

// Distance on the quotient: min over a candidate deck set of
// chart_dist(k * g, h). Exact for pairs within chart distance ~0.5 in the
// window im <= 10 (candidate words of length <= 6 plus cusp translations).
double quotient_dist(const FrameElement& g, const FrameElement& h);

struct AlignedDist {
    double dist;
    DeckElement deck;  // chart_dist(deck * g, h) == dist
};
AlignedDist quotient_dist_aligned(const FrameElement& g, const FrameElement& h);

// The candidate deck set used by quotient_dist, relative to reduced frames.
const std::vector<DeckElement>& candidate_decks();

ElementType classify(const DeckElement& g);

// 2*arccosh(|trace|/2); throws for non-hyperbolic input.
double translation_length(const DeckElement& g);

struct AxisFrame {
    FrameElement frame;  // inverse(frame)*g*frame = +-diag(e^{T/2}, e^{-T/2})
    double period;
};
AxisFrame axis_frame(const DeckElement& g);
// Real hyperbolic matrices (|trace| > 2) diagonalize the same way.
AxisFrame axis_frame(const FrameElement& g);

// Point-dependent chart sizes. The bulk value r0 and the cusp coefficient
// give inj(x) = min(r0, c_cusp / y) at reduced height y; local invariant
// manifolds are sized from epsilon_policy(x) = inj(x) / 4.
constexpr double kInjBulk = 0.2;
constexpr double kInjCuspCoef = 0.5;

double injectivity_radius(const FrameElement& g);
double epsilon_policy(const FrameElement& g);

}  // namespace modshadow
