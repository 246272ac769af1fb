#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "modshadow/errors.hpp"
#include "modshadow/oracle.hpp"
#include "modshadow/rng.hpp"
#include "test_util.hpp"

using namespace modshadow;

namespace {

DeckElement deck_of(long long a, long long b, long long c, long long d) {
    DeckElement g;
    g.a = a;
    g.b = b;
    g.c = c;
    g.d = d;
    return g;
}

// Integer conjugacy test independent of the word machinery: search X with
// X M1 = M2 X and det X = 1. Writing M2 = [[p,q],[r,s]], a hyperbolic
// integer matrix always has q != 0 (q = 0 forces trace +-2), so the top row
// of the commutation equations determines x3, x4 from x1, x2:
//   q x3 = x1 (a - p) + x2 c,   q x4 = x1 b + x2 (d - p).
bool conjugate_in_psl(const DeckElement& m1, const DeckElement& m2) {
    using I = __int128;
    I a = m1.a, b = m1.b, c = m1.c, d = m1.d;
    I p = m2.a, q = m2.b, r = m2.c, s = m2.d;
    if (q == 0) return false;
    const long long N = 400;
    for (long long x1 = -N; x1 <= N; ++x1) {
        for (long long x2 = -N; x2 <= N; ++x2) {
            I n3 = x1 * (a - p) + x2 * c;
            I n4 = x1 * b + x2 * (d - p);
            if (n3 % q != 0 || n4 % q != 0) continue;
            I x3 = n3 / q, x4 = n4 / q;
            if (x1 * x4 - x2 * x3 != 1) continue;
            // Verify the untouched bottom-row equations exactly.
            if (x3 * a + x4 * c != r * x1 + s * x3) continue;
            if (x3 * b + x4 * d != r * x2 + s * x4) continue;
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("enumeration: smallest classes match the hand computation") {
    auto c3 = enumerate_classes(3);
    REQUIRE(c3.size() == 1);
    CHECK(c3[0].word == "RL");
    CHECK(c3[0].trace == 3);
    CHECK(c3[0].length == doctest::Approx(1.9248473).epsilon(1e-7));
    CHECK(c3[0].representative == deck_of(2, 1, 1, 1));

    auto c4 = enumerate_classes(4);
    REQUIRE(c4.size() == 3);
    CHECK(c4[1].word == "RRL");
    CHECK(c4[2].word == "RLL");
    CHECK(c4[1].length == doctest::Approx(2.6339158).epsilon(1e-7));

    // Counts are nondecreasing in the bound; words are pairwise distinct.
    size_t prev = 0;
    for (long long tmax = 3; tmax <= 20; ++tmax) {
        auto cl = enumerate_classes(tmax);
        CHECK(cl.size() >= prev);
        prev = cl.size();
        std::set<std::string> words;
        for (auto& c : cl) words.insert(c.word);
        CHECK(words.size() == cl.size());
    }
}

TEST_CASE("every representative is hyperbolic with a tight axis closure") {
    for (const auto& c : enumerate_classes(30)) {
        CHECK(classify(c.representative) == ElementType::Hyperbolic);
        AxisFrame ax = axis_frame(c.representative);
        CHECK(std::fabs(ax.period - c.length) < 1e-12);
        CHECK(quotient_dist(geodesic_flow(ax.frame, ax.period), ax.frame) < 1e-10);
    }
}

TEST_CASE("canonical_word: base values and conjugation invariance") {
    CHECK(canonical_word(deck_of(2, 1, 1, 1)) == "RL");
    CHECK(canonical_word(deck_of(3, 2, 1, 1)) == "RRL");
    CHECK(canonical_word(deck_of(3, 1, 2, 1)) == "RLL");

    Rng rng(50);
    const auto& ball = candidate_decks();
    auto classes = enumerate_classes(12);
    for (const auto& c : classes) {
        std::string w = canonical_word(c.representative);
        CHECK(w == c.word);
        for (int i = 0; i < 12; ++i) {
            DeckElement k = ball[rng.next_below(ball.size())];
            for (int reps = 0; reps < 3; ++reps)
                k = compose_deck(k, ball[rng.next_below(ball.size())]);
            DeckElement conj = compose_deck(compose_deck(k, c.representative),
                                            inverse_deck(k));
            CHECK(canonical_word(conj) == c.word);
        }
    }
    CHECK_THROWS_AS(canonical_word(DeckElement::T(3)), std::domain_error);
}

TEST_CASE("inverse classes: reversal-swap stays in the table with equal length") {
    auto classes = enumerate_classes(20);
    std::map<std::string, double> by_word;
    for (auto& c : classes) by_word[c.word] = c.length;
    for (auto& c : classes) {
        std::string inv = inverse_class_word(c.word);
        REQUIRE(by_word.count(inv));
        CHECK(by_word[inv] == doctest::Approx(c.length).epsilon(1e-15));
    }
    CHECK(inverse_class_word("RL") == "RL");
    CHECK(inverse_class_word("RRL") == "RLL");
}

TEST_CASE("brute force over bounded integer matrices agrees with enumeration") {
    const long long bound = 200, trace_cap = 12;
    std::map<long long, std::set<std::string>> brute_words;
    std::vector<DeckElement> sample_pool;
    for (long long tr = 3; tr <= trace_cap; ++tr) {
        for (long long a = -bound; a <= bound; ++a) {
            long long d = tr - a;
            if (d < -bound || d > bound) continue;
            for (long long b = -bound; b <= bound; ++b) {
                if (b == 0) continue;
                long long num = a * d - 1;
                if (num % b != 0) continue;
                long long c = num / b;
                if (c < -bound || c > bound) continue;
                DeckElement m = deck_of(a, b, c, d);
                brute_words[tr].insert(canonical_word(m));
                if (sample_pool.size() < 4000 && (a + 2 * b + 3 * c) % 97 == 0)
                    sample_pool.push_back(m);
            }
        }
    }
    std::map<long long, std::set<std::string>> enum_words;
    for (const auto& c : enumerate_classes(trace_cap)) enum_words[c.trace].insert(c.word);
    for (long long tr = 3; tr <= trace_cap; ++tr) {
        CHECK(brute_words[tr] == enum_words[tr]);
    }

    // The word classifier against the independent linear-algebra conjugacy
    // test, both directions.
    Rng rng(60);
    auto classes = enumerate_classes(trace_cap);
    int same_checked = 0, diff_checked = 0;
    for (const auto& m : sample_pool) {
        if (same_checked >= 60 && diff_checked >= 60) break;
        std::string w = canonical_word(m);
        for (const auto& c : classes) {
            if (c.trace != m.trace()) continue;
            bool conj = conjugate_in_psl(m, c.representative);
            if (c.word == w) {
                CHECK(conj);
                ++same_checked;
            } else if (diff_checked < 60) {
                CHECK_FALSE(conj);
                ++diff_checked;
            }
        }
    }
    CHECK(same_checked >= 60);
    CHECK(diff_checked >= 60);
}

TEST_CASE("match_orbit: value, range and tolerance semantics") {
    auto classes = enumerate_classes(12);
    PeriodicOrbitResult r;
    r.T = 2.0 * std::acosh(1.5);
    r.gamma = deck_of(2, 1, 1, 1);
    auto m = match_orbit(r, classes, 1e-8);
    REQUIRE(m.has_value());
    CHECK(m->word == "RL");

    // Conjugated gamma still matches through the canonical word.
    const auto& ball = candidate_decks();
    r.gamma = compose_deck(compose_deck(ball[11], r.gamma), inverse_deck(ball[11]));
    m = match_orbit(r, classes, 1e-8);
    REQUIRE(m.has_value());
    CHECK(m->word == "RL");

    // Out of table.
    PeriodicOrbitResult big;
    big.T = 2.0 * std::acosh(50.0);
    big.gamma = deck_of(99, 98, 1, 1);
    CHECK_FALSE(match_orbit(big, classes, 1e-8).has_value());

    // Perturbed length with a tight tolerance.
    r.T += 1e-3;
    CHECK_FALSE(match_orbit(r, classes, 1e-8).has_value());
}

TEST_CASE("spectrum csv: fixed formatting, sorted") {
    std::ostringstream os;
    spectrum_csv(enumerate_classes(4), os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "trace,word,length");
    std::getline(is, line);
    CHECK(line == "3,RL,1.92484730023841");
    std::getline(is, line);
    CHECK(line == "4,RRL,2.63391579384963");
}
