#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "modshadow/lattice.hpp"
#include "modshadow/shadowing.hpp"

namespace modshadow {

// Hyperbolic conjugacy class of the modular group, indexed by its cyclic
// word over R = [[1,1],[0,1]] and L = [[1,0],[1,1]]. The stored word is the
// lexicographically least cyclic rotation under R < L; inverse classes stay
// distinct (oriented geodesics).
struct ConjClass {
    DeckElement representative;
    long long trace = 0;
    double length = 0.0;
    std::string word;
};

// All classes with 3 <= trace <= trace_max, each exactly once, sorted by
// (trace, word).
std::vector<ConjClass> enumerate_classes(long long trace_max);

// Canonical cyclic R/L word of a hyperbolic deck element (entry reduction,
// then the peel-and-rotate cycle). Throws for non-hyperbolic input or traces
// too large for word extraction.
std::string canonical_word(const DeckElement& g);

// Word of the inverse class: reverse the blocks and swap the letters.
std::string inverse_class_word(const std::string& word);

std::optional<ConjClass> match_orbit(const PeriodicOrbitResult& result,
                                     const std::vector<ConjClass>& classes, double tol);

// CSV columns (trace, word, length) at 15 significant digits.
void spectrum_csv(const std::vector<ConjClass>& classes, std::ostream& os);

}  // namespace modshadow
