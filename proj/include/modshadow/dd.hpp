#pragma once

#include <cmath>

namespace modshadow {

// Minimal double-double arithmetic (error-free transformations via FMA).
// Used where products of large-entry deck matrices against frames cancel to
// order-one results: the conjugated return matrix and reduced-frame residual
// evaluations at flow times well beyond the plain double range.
struct DD {
    double hi = 0.0, lo = 0.0;

    DD() = default;
    DD(double h) : hi(h), lo(0.0) {}
    DD(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return DD(s, err);
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    double err = std::fma(a, b, -p);
    return DD(p, err);
}

inline DD dd_add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    DD r = two_sum(s.hi, lo);
    return r;
}

inline DD dd_sub(DD a, DD b) { return dd_add(a, DD(-b.hi, -b.lo)); }

inline DD dd_mul(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return two_sum(p.hi, p.lo);
}

inline DD dd_mul(DD a, double b) { return dd_mul(a, DD(b)); }

inline DD dd_div(DD a, DD b) {
    double q1 = a.hi / b.hi;
    DD r = dd_sub(a, dd_mul(b, DD(q1)));
    double q2 = r.value() / b.hi;
    return two_sum(q1, q2);
}

// 2x2 matrices in double-double, row-major.
struct DDMat {
    DD e[4];

    static DDMat from(const double m[4]) {
        DDMat r;
        for (int i = 0; i < 4; ++i) r.e[i] = DD(m[i]);
        return r;
    }

    void to(double out[4]) const {
        for (int i = 0; i < 4; ++i) out[i] = e[i].value();
    }
};

inline DDMat dd_matmul(const DDMat& a, const DDMat& b) {
    DDMat r;
    r.e[0] = dd_add(dd_mul(a.e[0], b.e[0]), dd_mul(a.e[1], b.e[2]));
    r.e[1] = dd_add(dd_mul(a.e[0], b.e[1]), dd_mul(a.e[1], b.e[3]));
    r.e[2] = dd_add(dd_mul(a.e[2], b.e[0]), dd_mul(a.e[3], b.e[2]));
    r.e[3] = dd_add(dd_mul(a.e[2], b.e[1]), dd_mul(a.e[3], b.e[3]));
    return r;
}

inline DD dd_det(const DDMat& m) {
    return dd_sub(dd_mul(m.e[0], m.e[3]), dd_mul(m.e[1], m.e[2]));
}

}  // namespace modshadow
