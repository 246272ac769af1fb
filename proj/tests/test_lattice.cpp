#include <doctest.h>

#include <cmath>

#include "modshadow/errors.hpp"
#include "modshadow/flow.hpp"
#include "modshadow/lattice.hpp"
#include "modshadow/rng.hpp"
#include "test_util.hpp"

using namespace modshadow;
using testutil::frame_at;
using testutil::frob_diff;
using testutil::random_frame;

namespace {

bool in_domain(const HalfPlanePoint& z) {
    return std::fabs(z.re) <= 0.5 + 1e-9 && z.re * z.re + z.im * z.im >= 1.0 - 1e-9;
}

}  // namespace

TEST_CASE("reduce_point: examples and boundary conventions") {
    auto [zi, di] = reduce_point(HalfPlanePoint{0, 1});
    CHECK(zi.re == doctest::Approx(0).epsilon(1e-15));
    CHECK(zi.im == doctest::Approx(1).epsilon(1e-15));
    CHECK(di.is_identity());

    auto [z1, d1] = reduce_point(HalfPlanePoint{1.7, 0.5});
    CHECK(in_domain(z1));
    CHECK(deck_apply(d1, HalfPlanePoint{1.7, 0.5}).im == doctest::Approx(z1.im).epsilon(1e-12));

    // z and z + 1 reduce to the same point, decks differing by T.
    HalfPlanePoint z{0.37, 1.21};
    auto [ra, da] = reduce_point(z);
    auto [rb, db] = reduce_point(HalfPlanePoint{z.re + 1.0, z.im});
    CHECK(std::fabs(ra.re - rb.re) < 1e-12);
    CHECK(std::fabs(ra.im - rb.im) < 1e-12);
    DeckElement diff = compose_deck(inverse_deck(da), db);
    CHECK(diff == DeckElement::T(-1));

    // |re| = 1/2 lands on the -1/2 wall; |z| = 1 lands on re <= 0.
    auto [zw, dw] = reduce_point(HalfPlanePoint{0.5, 2.0});
    CHECK(zw.re == doctest::Approx(-0.5).epsilon(1e-12));
    (void)dw;
    double cx = 0.3;
    auto [zc, dc] = reduce_point(HalfPlanePoint{cx, std::sqrt(1.0 - cx * cx)});
    CHECK(zc.re <= 1e-12);
    (void)dc;
}

TEST_CASE("reduce_point terminates over the sampling range") {
    Rng rng(23);
    for (int i = 0; i < 100000; ++i) {
        HalfPlanePoint z{rng.uniform(-1000, 1000),
                         std::exp(rng.uniform(std::log(1e-3), std::log(1e3)))};
        auto [r, d] = reduce_point(z);
        CHECK(in_domain(r));
        (void)d;
    }
}

TEST_CASE("reduce_frame: base in domain, deck consistency, orbit invariance") {
    FrameElement over_i = frame_at(0, 1, 1.1);
    ReducedFrame r = reduce_frame(over_i);
    CHECK(frob_diff(r.frame, over_i) < 1e-12);
    CHECK(r.deck.is_identity());

    FrameElement g = frame_at(1.7, 0.5, 2.3);
    ReducedFrame rg = reduce_frame(g);
    CHECK(in_domain(mobius_act(rg.frame, HalfPlanePoint{0, 1})));
    CHECK(frob_diff(deck_apply(rg.deck, g), rg.frame) < 1e-12);

    Rng rng(31);
    const auto& ball = candidate_decks();
    for (int i = 0; i < 100; ++i) {
        FrameElement h = random_frame(rng, 1.05, 1.9);  // interior, away from walls
        const DeckElement& deck = ball[rng.next_below(ball.size())];
        FrameElement moved = deck_apply(deck, h);
        CHECK(frob_diff(reduce_frame(moved).frame, reduce_frame(h).frame) < 1e-10);
    }
}

TEST_CASE("quotient_dist: invariance, cusp loops, local isometry") {
    Rng rng(37);
    const auto& ball = candidate_decks();
    for (int i = 0; i < 50; ++i) {
        FrameElement g = random_frame(rng);
        const DeckElement& deck = ball[rng.next_below(ball.size())];
        CHECK(quotient_dist(g, deck_apply(deck, g)) < 1e-12);
    }

    // High in the cusp the z -> z+1 loop is short: the deck image of a frame
    // at height y sits at chart distance ~1/y, and the quotient cannot see
    // the difference at all.
    FrameElement high = frame_at(0.2, 10.0, 0.7);
    FrameElement moved = deck_apply(DeckElement::T(1), high);
    double loop = chart_dist(high, moved);
    CHECK(loop < 0.25);
    CHECK(loop > 0.01);
    CHECK(quotient_dist(high, moved) < 1e-12);

    // Quotient distance agrees with the chart for nearby identity-deck pairs.
    for (int i = 0; i < 50; ++i) {
        FrameElement g = random_frame(rng, 1.05, 1.8);
        FrameElement h = stable_move(unstable_move(g, rng.uniform(-0.03, 0.03)),
                                     rng.uniform(-0.03, 0.03));
        if (chart_dist(g, h) > 0.1) continue;
        CHECK(std::fabs(quotient_dist(g, h) - chart_dist(g, h)) < 1e-10);
        CHECK(std::fabs(quotient_dist(g, h) - quotient_dist(h, g)) < 1e-12);
    }
}

TEST_CASE("classify by trace") {
    DeckElement t = DeckElement::T(1);
    CHECK(classify(t) == ElementType::Parabolic);
    DeckElement h;
    h.a = 2;
    h.b = 1;
    h.c = 1;
    h.d = 1;
    CHECK(classify(h) == ElementType::Hyperbolic);
    CHECK(classify(DeckElement::S()) == ElementType::Elliptic);
    CHECK(classify(DeckElement::identity()) == ElementType::Identity);
}

TEST_CASE("translation_length: values, invariance, errors") {
    DeckElement rl;
    rl.a = 2;
    rl.b = 1;
    rl.c = 1;
    rl.d = 1;
    CHECK(translation_length(rl) == doctest::Approx(1.9248473).epsilon(1e-7));

    DeckElement rrl;
    rrl.a = 3;
    rrl.b = 1;
    rrl.c = 2;
    rrl.d = 1;
    CHECK(translation_length(rrl) == doctest::Approx(2.6339158).epsilon(1e-7));

    const auto& ball = candidate_decks();
    Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        const DeckElement& k = ball[rng.next_below(ball.size())];
        DeckElement conj = compose_deck(compose_deck(k, rl), inverse_deck(k));
        CHECK(std::fabs(translation_length(conj) - translation_length(rl)) < 1e-12);
    }

    CHECK_THROWS_WITH_AS(translation_length(DeckElement::T(1)), "no closed geodesic",
                         std::domain_error);
}

TEST_CASE("axis_frame: conjugation residual and closed-orbit identity") {
    // Real diagonal matrix: identity frame, period 2 ln 2.
    AxisFrame diag = axis_frame(FrameElement(2.0, 0.0, 0.0, 0.5));
    CHECK(frob_diff(diag.frame, FrameElement::identity()) < 1e-13);
    CHECK(diag.period == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));

    // Over integer matrices with |trace| <= 20.
    for (long long tr = 3; tr <= 20; ++tr) {
        for (long long a = -20; a <= 20; ++a) {
            long long d = tr - a;
            for (long long b : {1ll, -1ll, 2ll, 3ll}) {
                long long num = a * d - 1;
                if (num % b != 0) continue;
                DeckElement g;
                g.a = a;
                g.b = b;
                g.c = num / b;
                g.d = d;
                AxisFrame ax = axis_frame(g);
                double t_len = translation_length(g);
                CHECK(std::fabs(ax.period - t_len) < 1e-10);
                double e = std::exp(ax.period / 2);
                FrameElement want(e, 0, 0, 1 / e);
                FrameElement got = compose(inverse(ax.frame),
                                           compose(deck_apply(g, FrameElement::identity()),
                                                   ax.frame));
                CHECK(frob_diff(got, want) < 1e-12 * std::max(1.0, e));
                CHECK(quotient_dist(geodesic_flow(ax.frame, ax.period), ax.frame) < 1e-10);
            }
        }
    }

    CHECK_THROWS_AS(axis_frame(DeckElement::T(2)), std::domain_error);
}

TEST_CASE("injectivity radius: bulk value, cusp decay, monotonicity") {
    CHECK(injectivity_radius(frame_at(0, 1)) == doctest::Approx(kInjBulk));
    CHECK(injectivity_radius(frame_at(0.1, 10)) == doctest::Approx(kInjCuspCoef / 10.0));
    double prev = injectivity_radius(frame_at(0.2, 2));
    for (double y = 2.5; y <= 100.0; y += 2.5) {
        double cur = injectivity_radius(frame_at(0.2, y));
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
    // Over a compact window the infimum is attained at the maximal height.
    Rng rng(43);
    double inf_seen = 1e9;
    for (int i = 0; i < 500; ++i)
        inf_seen = std::min(inf_seen, injectivity_radius(random_frame(rng, 1.0, 4.0)));
    CHECK(inf_seen >= kInjCuspCoef / 4.0 - 1e-12);
    CHECK(epsilon_policy(frame_at(0, 1)) == doctest::Approx(kInjBulk / 4.0));
}

TEST_CASE("deck arithmetic guards") {
    DeckElement big;
    big.a = 2;
    big.b = 1;
    big.c = 1;
    big.d = 1;
    CHECK_THROWS_AS(
        [&] {
            DeckElement acc = big;
            for (int i = 0; i < 200; ++i) acc = compose_deck(acc, acc);
            return acc;
        }(),
        DeckOverflowError);

    // Word bookkeeping: the word's product equals the matrix.
    DeckElement w = compose_deck(DeckElement::S(), DeckElement::T(3));
    REQUIRE(w.word.has_value());
    DeckElement prod = DeckElement::identity();
    for (char ch : *w.word) {
        DeckElement gen = ch == 'S' ? DeckElement::S() : DeckElement::T(ch == 'T' ? 1 : -1);
        prod = compose_deck(prod, gen);
    }
    CHECK(prod == w);
}
