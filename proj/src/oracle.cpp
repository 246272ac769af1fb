#include "modshadow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "modshadow/errors.hpp"

namespace modshadow {

namespace {

using Blocks = std::vector<std::pair<char, long long>>;  // alternating ('R', n), ('L', m)

std::string expand(const Blocks& blocks) {
    std::string w;
    for (auto& [ch, n] : blocks) w.append(static_cast<size_t>(n), ch);
    return w;
}

// Lexicographically least cyclic rotation with R < L. Candidate start points
// are the block boundaries beginning an R run (any L-start rotation is
// dominated by an R start).
Blocks canonical_rotation(const Blocks& blocks) {
    if (blocks.size() <= 1) return blocks;
    std::vector<size_t> starts;
    for (size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].first == 'R') starts.push_back(i);
    if (starts.empty()) return blocks;
    auto rotate = [&](size_t s) {
        Blocks r(blocks.begin() + static_cast<long>(s), blocks.end());
        r.insert(r.end(), blocks.begin(), blocks.begin() + static_cast<long>(s));
        return r;
    };
    auto letter_less = [](char a, char b) {
        if (a == b) return false;
        return a == 'R';  // R < L
    };
    Blocks best = rotate(starts[0]);
    std::string best_s = expand(best);
    for (size_t i = 1; i < starts.size(); ++i) {
        Blocks cand = rotate(starts[i]);
        std::string cand_s = expand(cand);
        bool less = std::lexicographical_compare(cand_s.begin(), cand_s.end(), best_s.begin(),
                                                 best_s.end(), letter_less);
        if (less) {
            best = std::move(cand);
            best_s = std::move(cand_s);
        }
    }
    return best;
}

struct IMat {
    int128 a = 1, b = 0, c = 0, d = 1;

    IMat mul_R(long long n) const {  // M * R^n
        return IMat{a, b + a * n, c, d + c * n};
    }
    IMat mul_L(long long n) const {  // M * L^n
        return IMat{a + b * n, b, c + d * n, d};
    }
    int128 trace() const { return a + d; }
};

void enumerate_rec(const IMat& m, Blocks& blocks, long long trace_max,
                   std::vector<std::pair<Blocks, IMat>>& out) {
    // Closed word so far ends with an L block; m is its product. Extend with
    // R^a L^b; trace(M R^a L^b) = tr + a*m21 + b*(M R^a)_12 grows with both
    // exponents, so the loops stop on their own.
    for (long long a = 1;; ++a) {
        IMat mr = m.mul_R(a);
        bool any_b = false;
        for (long long b = 1;; ++b) {
            IMat mrl = mr.mul_L(b);
            if (mrl.trace() > trace_max) break;
            any_b = true;
            blocks.emplace_back('R', a);
            blocks.emplace_back('L', b);
            out.emplace_back(blocks, mrl);
            enumerate_rec(mrl, blocks, trace_max, out);
            blocks.pop_back();
            blocks.pop_back();
        }
        // The minimal closing trace grows with the R exponent, so once no L
        // exponent closes below the bound, larger a cannot either.
        if (!any_b) break;
    }
}

DeckElement deck_from_imat(const IMat& m) {
    DeckElement d;
    d.a = m.a;
    d.b = m.b;
    d.c = m.c;
    d.d = m.d;
    return d;
}

constexpr long long kWordTraceCap = 1ll << 40;

}  // namespace

std::vector<ConjClass> enumerate_classes(long long trace_max) {
    if (trace_max < 3 || trace_max > 10000)
        throw std::invalid_argument("enumerate_classes: trace_max must lie in [3, 10^4]");
    std::vector<std::pair<Blocks, IMat>> words;
    Blocks blocks;
    enumerate_rec(IMat{}, blocks, trace_max, words);
    std::vector<ConjClass> classes;
    for (auto& [blk, m] : words) {
        if (m.trace() < 3) continue;
        Blocks canon = canonical_rotation(blk);
        if (canon != blk) continue;  // keep each cyclic class once
        ConjClass c;
        c.representative = deck_from_imat(m);
        c.trace = static_cast<long long>(m.trace());
        c.length = 2.0 * std::acosh(static_cast<double>(c.trace) / 2.0);
        c.word = expand(canon);
        classes.push_back(std::move(c));
    }
    auto letter_less = [](char a, char b) {
        if (a == b) return false;
        return a == 'R';
    };
    std::sort(classes.begin(), classes.end(), [&](const ConjClass& x, const ConjClass& y) {
        if (x.trace != y.trace) return x.trace < y.trace;
        return std::lexicographical_compare(x.word.begin(), x.word.end(), y.word.begin(),
                                            y.word.end(), letter_less);
    });
    return classes;
}

namespace {

struct WMat {
    int128 a, b, c, d;
    bool operator==(const WMat& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
    bool operator<(const WMat& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        if (c != o.c) return c < o.c;
        return d < o.d;
    }
};

WMat psl_normalize(WMat m) {
    for (int128 v : {m.a, m.b, m.c}) {
        if (v != 0) {
            if (v < 0) {
                m.a = -m.a;
                m.b = -m.b;
                m.c = -m.c;
                m.d = -m.d;
            }
            break;
        }
    }
    return m;
}

WMat conj(const WMat& m, int128 ga, int128 gb, int128 gc, int128 gd) {
    // g^-1 m g with det(g) = 1
    int128 ia = gd, ib = -gb, ic = -gc, id = ga;
    int128 p = ia * m.a + ib * m.c, q = ia * m.b + ib * m.d;
    int128 r = ic * m.a + id * m.c, s = ic * m.b + id * m.d;
    return psl_normalize(WMat{p * ga + q * gc, p * gb + q * gd, r * ga + s * gc,
                              r * gb + s * gd});
}

bool totally_nonneg(const WMat& m) { return m.a >= 0 && m.b >= 0 && m.c >= 0 && m.d >= 0; }

WMat trace_pos(WMat m) {
    if (m.a + m.d < 0) return WMat{-m.a, -m.b, -m.c, -m.d};
    return m;
}

unsigned __int128 iabs128(int128 v) {
    return v < 0 ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
}

// 256-bit product compare: a1*b1 vs a2*b2 with 128-bit unsigned operands.
int cmp_prod256(unsigned __int128 a1, unsigned __int128 b1, unsigned __int128 a2,
                unsigned __int128 b2) {
    auto mul = [](unsigned __int128 x, unsigned __int128 y, unsigned __int128& hi,
                  unsigned __int128& lo) {
        unsigned __int128 xl = static_cast<std::uint64_t>(x), xh = x >> 64;
        unsigned __int128 yl = static_cast<std::uint64_t>(y), yh = y >> 64;
        unsigned __int128 ll = xl * yl;
        unsigned __int128 lh = xl * yh;
        unsigned __int128 hl = xh * yl;
        unsigned __int128 hh = xh * yh;
        unsigned __int128 mid = lh + hl;
        unsigned __int128 carry_mid = (mid < lh) ? (static_cast<unsigned __int128>(1) << 64)
                                                 : 0;
        lo = ll + (mid << 64);
        unsigned __int128 carry_lo = (lo < ll) ? 1 : 0;
        hi = hh + (mid >> 64) + carry_mid + carry_lo;
    };
    unsigned __int128 h1, l1, h2, l2;
    mul(a1, b1, h1, l1);
    mul(a2, b2, h2, l2);
    if (h1 != h2) return h1 < h2 ? -1 : 1;
    if (l1 != l2) return l1 < l2 ? -1 : 1;
    return 0;
}

unsigned __int128 isqrt128(unsigned __int128 n) {
    if (n == 0) return 0;
    unsigned __int128 x = static_cast<unsigned __int128>(
        std::sqrt(static_cast<double>(static_cast<std::uint64_t>(n >> 64)) * 1.8446744073709552e19 +
                  static_cast<double>(static_cast<std::uint64_t>(n))));
    for (int i = 0; i < 64; ++i) {
        if (x == 0) break;
        unsigned __int128 nx = (x + n / x) / 2;
        if (nx >= x) break;
        x = nx;
    }
    while (x * x > n) --x;
    while ((x + 1) * (x + 1) <= n) ++x;
    return x;
}

// Exact floor of (p + sqrt(D)) / q for non-square D > 0.
int128 floor_surd_plus(int128 p, int128 D, int128 q) {
    if (q < 0) return -floor_surd_plus(p, D, -q) - 1;
    int128 s = static_cast<int128>(isqrt128(static_cast<unsigned __int128>(D)));
    int128 fl = (p + s) / q;
    if ((p + s) % q != 0 && (p + s) < 0) --fl;  // floor division toward -inf
    for (;;) {
        int128 u = q * (fl + 1) - p;
        if (u <= 0 || (u <= (s + 2) && u * u < D)) ++fl;
        else break;
    }
    for (;;) {
        int128 u = q * fl - p;
        if (u > 0 && (u > (s + 2) || u * u > D)) --fl;
        else break;
    }
    return fl;
}

// Reduce to a totally nonnegative conjugate by following the slow
// continued-fraction expansion of the attracting fixed point
// x+ = ((a - d) + sqrt(D)) / (2c)  (c x+ + d = (tr + sqrt(D))/2 > 1 for
// positive trace, so this root is always the attracting one).
WMat reduce_to_nonneg(WMat m) {
    m = trace_pos(m);
    for (int block = 0; block < 4096; ++block) {
        if (totally_nonneg(m)) return m;
        if (m.c == 0) throw Error("canonical_word: parabolic structure in reduction");
        int128 t = m.a + m.d;
        int128 D = t * t - 4;
        int128 p = m.a - m.d, q = 2 * m.c;
        int128 n = floor_surd_plus(p, D, q);
        if (n != 0) {
            // T^{-n} m T^{n}: shifts both fixed points by -n.
            m = trace_pos(WMat{m.a - n * m.c, m.b + n * (m.a - m.d) - n * n * m.c, m.c,
                               m.d + n * m.c});
            continue;
        }
        // x+ in (0, 1): an L-block of length floor(1 / x+). Binary search
        // with the exact predicate  x+ <= 1/m  <=>  m (p + sqrt(D)) <=> q.
        unsigned __int128 uD = static_cast<unsigned __int128>(D);
        auto le_inv = [&](int128 mm) {
            int128 w = q - mm * p;
            if (q > 0) {
                if (w < 0) return false;
                return cmp_prod256(iabs128(mm) * iabs128(mm), uD, iabs128(w), iabs128(w)) <= 0;
            }
            if (w <= 0) return true;
            return cmp_prod256(iabs128(mm) * iabs128(mm), uD, iabs128(w), iabs128(w)) >= 0;
        };
        int128 lo = 1, hi = int128(1) << 62;
        if (!le_inv(1)) throw Error("canonical_word: reduction step failed");
        while (lo < hi) {
            int128 mid = lo + (hi - lo + 1) / 2;
            if (le_inv(mid))
                lo = mid;
            else
                hi = mid - 1;
        }
        int128 mm = lo;
        // L^{-m} m L^{m}
        m = trace_pos(WMat{m.a + mm * m.b, m.b, m.c + mm * (m.d - m.a) - mm * mm * m.b,
                           m.d - mm * m.b});
    }
    throw Error("canonical_word: reduction did not terminate");
}

}  // namespace

std::string canonical_word(const DeckElement& g) {
    if (classify(g) != ElementType::Hyperbolic)
        throw std::domain_error("canonical_word: not hyperbolic");
    WMat m = trace_pos(WMat{g.a, g.b, g.c, g.d});
    if (m.a + m.d > kWordTraceCap) throw Error("canonical_word: trace too large");
    m = reduce_to_nonneg(m);

    // Peel letters with rotation: emit X, replace m by X^-1 m X. The cycle
    // closes when the emitted product equals the start matrix; checking the
    // state alone would stop early on powers of a shorter word.
    const WMat start = m;
    WMat prod{1, 0, 0, 1};
    Blocks blocks;
    long long guard = static_cast<long long>(m.a + m.d) * 4 + 64;
    for (long long i = 0; i < guard; ++i) {
        bool r_ok = m.a >= m.c && m.b >= m.d;
        char letter = r_ok ? 'R' : 'L';
        if (!blocks.empty() && blocks.back().first == letter)
            blocks.back().second++;
        else
            blocks.emplace_back(letter, 1);
        if (r_ok)
            prod = WMat{prod.a, prod.a + prod.b, prod.c, prod.c + prod.d};  // prod * R
        else
            prod = WMat{prod.a + prod.b, prod.b, prod.c + prod.d, prod.d};  // prod * L
        m = r_ok ? conj(m, 1, 1, 0, 1) : conj(m, 1, 0, 1, 1);
        if (!totally_nonneg(m)) throw Error("canonical_word: peel left the positive cone");
        if (m == start && prod == start) break;
        if (i + 1 == guard) throw Error("canonical_word: peel did not close");
    }
    return expand(canonical_rotation(blocks));
}

std::string inverse_class_word(const std::string& word) {
    Blocks blocks;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        char swapped = *it == 'R' ? 'L' : 'R';
        if (!blocks.empty() && blocks.back().first == swapped)
            blocks.back().second++;
        else
            blocks.emplace_back(swapped, 1);
    }
    return expand(canonical_rotation(blocks));
}

std::optional<ConjClass> match_orbit(const PeriodicOrbitResult& result,
                                     const std::vector<ConjClass>& classes, double tol) {
    if (classes.empty()) return std::nullopt;
    long long max_trace = 0;
    for (const auto& c : classes) max_trace = std::max(max_trace, c.trace);
    long long tr;
    try {
        tr = std::llabs(result.gamma.trace_ll());
    } catch (const DeckOverflowError&) {
        return std::nullopt;
    }
    if (tr > max_trace) return std::nullopt;
    std::vector<const ConjClass*> by_length;
    for (const auto& c : classes)
        if (std::fabs(c.length - result.T) <= tol) by_length.push_back(&c);
    if (by_length.empty()) return std::nullopt;
    std::string w = canonical_word(result.gamma);
    std::vector<const ConjClass*> matches;
    for (const auto* c : by_length)
        if (c->word == w) matches.push_back(c);
    if (matches.size() > 1) throw AmbiguousMatchError();
    if (matches.empty()) return std::nullopt;
    return *matches.front();
}

void spectrum_csv(const std::vector<ConjClass>& classes, std::ostream& os) {
    os << "trace,word,length\n";
    for (const auto& c : classes) {
        std::ostringstream len;
        len << std::setprecision(15) << c.length;
        os << c.trace << ',' << c.word << ',' << len.str() << '\n';
    }
}

}  // namespace modshadow
