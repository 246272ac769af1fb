#include <doctest.h>
#include <stdexcept>

#include <cmath>

#include "modshadow/flow.hpp"
#include "modshadow/rng.hpp"
#include "test_util.hpp"

using namespace modshadow;
using testutil::frame_at;
using testutil::frob_diff;
using testutil::random_frame;

TEST_CASE("geodesic flow: endpoint values and the group law") {
    Rng rng(2);
    FrameElement g = random_frame(rng);
    CHECK(frob_diff(geodesic_flow(g, 0.0), g) < 1e-15);

    FrameElement a = geodesic_flow(FrameElement::identity(), 2.0 * std::log(2.0));
    CHECK(frob_diff(a, FrameElement(2, 0, 0, 0.5)) < 1e-14);

    for (int i = 0; i < 1000; ++i) {
        FrameElement h = random_frame(rng);
        double s = rng.uniform(-20, 20), t = rng.uniform(-20, 20);
        FrameElement lhs = geodesic_flow(geodesic_flow(h, s), t);
        FrameElement rhs = geodesic_flow(h, s + t);
        double scale = 0.0;
        for (double v : rhs.entries()) scale = std::max(scale, std::fabs(v));
        CHECK(frob_diff(lhs, rhs) / std::max(1.0, scale) < 1e-11);
    }
    CHECK_THROWS_AS(geodesic_flow(g, 701.0), std::range_error);
}

TEST_CASE("horocycle moves: conjugation identities are exact") {
    Rng rng(9);
    FrameElement g = random_frame(rng);
    CHECK(frob_diff(stable_move(g, 0.0), g) < 1e-15);
    CHECK(frob_diff(unstable_move(g, 0.0), g) < 1e-15);

    for (int i = 0; i < 1000; ++i) {
        FrameElement h = random_frame(rng);
        double s = rng.uniform(-0.5, 0.5), t = rng.uniform(-5, 5);
        CHECK(frob_diff(geodesic_flow(stable_move(h, s), t),
                        stable_move(geodesic_flow(h, t), s * std::exp(-t))) < 1e-13);
        CHECK(frob_diff(geodesic_flow(unstable_move(h, s), t),
                        unstable_move(geodesic_flow(h, t), s * std::exp(t))) < 1e-12);
    }

    // One time unit contracts the stable parameter by exactly e^{-1}.
    FrameElement h = random_frame(rng);
    double d = chart_dist(geodesic_flow(h, 1.0), geodesic_flow(stable_move(h, 0.5), 1.0));
    CHECK(d == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(d == doctest::Approx(0.1839397).epsilon(1e-6));
}

TEST_CASE("center leaf points") {
    Rng rng(21);
    FrameElement g = random_frame(rng);
    CHECK(frob_diff(center_unstable_point(g, 0, 0), g) < 1e-15);
    CHECK(frob_diff(center_unstable_point(g, 0.7, 0), geodesic_flow(g, 0.7)) < 1e-14);
    CHECK(frob_diff(center_stable_point(g, -0.4, 0), geodesic_flow(g, -0.4)) < 1e-14);

    // Backward distance to the matching flow point decreases: cu-membership.
    FrameElement w = center_unstable_point(g, 0.3, 0.05);
    double prev = 1e9;
    for (double t = 0; t <= 10.0; t += 1.0) {
        double d = chart_dist(geodesic_flow(w, -t), geodesic_flow(geodesic_flow(g, 0.3), -t));
        CHECK(d < prev * (1.0 + 1e-9));
        prev = d;
    }
}

TEST_CASE("time reversal conjugates the flow and swaps the horocycles") {
    Rng rng(33);
    for (int i = 0; i < 50; ++i) {
        FrameElement g = random_frame(rng);
        CHECK(frob_diff(time_reverse(time_reverse(g)), g) < 1e-14);
        double t = rng.uniform(-3, 3), s = rng.uniform(-0.4, 0.4);
        CHECK(frob_diff(time_reverse(geodesic_flow(g, t)),
                        geodesic_flow(time_reverse(g), -t)) < 1e-13);
        CHECK(frob_diff(time_reverse(stable_move(g, s)),
                        unstable_move(time_reverse(g), -s)) < 1e-13);
    }
}

TEST_CASE("splitting basis spans the tangent space") {
    Rng rng(39);
    FrameElement g = random_frame(rng);
    SplittingBasis b = splitting_basis(g);
    // Rank of the 3x4 matrix of flattened directions must be 3.
    double m[3][4];
    for (int j = 0; j < 4; ++j) {
        m[0][j] = b.e_s[j];
        m[1][j] = b.e_u[j];
        m[2][j] = b.e_c[j];
    }
    int rank = 0;
    for (int col = 0, row = 0; col < 4 && row < 3; ++col) {
        int piv = -1;
        double best = 1e-9;
        for (int r = row; r < 3; ++r)
            if (std::fabs(m[r][col]) > best) {
                best = std::fabs(m[r][col]);
                piv = r;
            }
        if (piv < 0) continue;
        std::swap(m[piv], m[row]);
        for (int r = row + 1; r < 3; ++r) {
            double f = m[r][col] / m[row][col];
            for (int j = col; j < 4; ++j) m[r][j] -= f * m[row][j];
        }
        ++row;
        ++rank;
    }
    CHECK(rank == 3);
}

TEST_CASE("local manifolds: sizes and leaf membership") {
    FrameElement bulk = frame_at(0, 1, 0.4);
    LocalManifoldPatch p = local_manifold(bulk, LeafKind::StrongStable, 9);
    CHECK(p.size == doctest::Approx(kInjBulk / 16.0));  // 0.0125
    CHECK(p.samples.size() == 9);

    FrameElement cusp = frame_at(0.1, 10, 1.2);
    LocalManifoldPatch pc = local_manifold(cusp, LeafKind::StrongUnstable, 5);
    CHECK(pc.size == doctest::Approx(injectivity_radius(cusp) / 16.0));
    CHECK(pc.size < p.size);

    for (auto kind : {LeafKind::StrongStable, LeafKind::StrongUnstable,
                      LeafKind::CenterStable, LeafKind::CenterUnstable}) {
        LocalManifoldPatch patch = local_manifold(bulk, kind, 12);
        for (const auto& s : patch.samples)
            CHECK(quotient_dist(s, bulk) <= epsilon_policy(bulk) + 1e-12);
    }

    // Strong-stable samples satisfy the contraction identity and converge.
    LocalManifoldPatch ss = local_manifold(bulk, LeafKind::StrongStable, 7);
    for (const auto& s : ss.samples) {
        double d0 = chart_dist(s, bulk);
        double prev = d0;
        for (double t = 1.0; t <= 10.0; t += 1.0) {
            double d = quotient_dist(geodesic_flow(s, t), geodesic_flow(bulk, t));
            CHECK(d <= prev + 1e-12);
            CHECK(std::fabs(d - d0 * std::exp(-t)) < 1e-10);
            prev = d;
        }
        CHECK(quotient_dist(geodesic_flow(s, 20.0), geodesic_flow(bulk, 20.0)) < 1e-6);
    }
}

TEST_CASE("anosov bounds: certified ratio, exact identity, negative control") {
    Window w;
    w.im_hi = 4.0;
    AnosovConstants constants;
    std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    AnosovReport rep = verify_anosov_bounds(w, constants, grid, 500, 99);
    CHECK(rep.samples == 500);
    CHECK(rep.max_normalized_ratio <= 1.0);
    CHECK(rep.max_parameter_deviation <= 1e-12);
    CHECK(rep.unstable_forward_max_ratio > 1.0);  // expansion direction
}
