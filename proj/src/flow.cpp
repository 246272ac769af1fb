#include "modshadow/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "modshadow/errors.hpp"
#include "modshadow/rng.hpp"

namespace modshadow {

void AnosovConstants::validate() const {
    if (!(C >= 1.0)) throw std::invalid_argument("AnosovConstants: C must be >= 1");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("AnosovConstants: lambda must lie in (0,1)");
}

SplittingBasis splitting_basis(const FrameElement& g) {
    // Right translation of the generators n+' , n-' , a' by g.
    auto push = [&](double x11, double x12, double x21, double x22) {
        return std::array<double, 4>{g.m11 * x11 + g.m12 * x21, g.m11 * x12 + g.m12 * x22,
                                     g.m21 * x11 + g.m22 * x21, g.m21 * x12 + g.m22 * x22};
    };
    SplittingBasis b;
    b.e_s = push(0, 1, 0, 0);
    b.e_u = push(0, 0, 1, 0);
    b.e_c = push(0.5, 0, 0, -0.5);
    return b;
}

FrameElement geodesic_flow(const FrameElement& g, double t) {
    if (!(std::fabs(t) <= 700.0)) throw std::range_error("geodesic_flow: |t| > 700");
    double e = std::exp(t / 2.0);
    return FrameElement(g.m11 * e, g.m12 / e, g.m21 * e, g.m22 / e);
}

FrameElement stable_move(const FrameElement& g, double s) {
    return FrameElement(g.m11, g.m11 * s + g.m12, g.m21, g.m21 * s + g.m22);
}

FrameElement unstable_move(const FrameElement& g, double u) {
    return FrameElement(g.m11 + g.m12 * u, g.m12, g.m21 + g.m22 * u, g.m22);
}

FrameElement center_unstable_point(const FrameElement& g, double tau, double u) {
    return unstable_move(geodesic_flow(g, tau), u);
}

FrameElement center_stable_point(const FrameElement& g, double tau, double s) {
    return stable_move(geodesic_flow(g, tau), s);
}

FrameElement time_reverse(const FrameElement& g) {
    // g * [[0,1],[-1,0]]
    return FrameElement(-g.m12, g.m11, -g.m22, g.m21);
}

LocalManifoldPatch local_manifold(const FrameElement& g, LeafKind kind, int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("local_manifold: n_samples >= 1");
    LocalManifoldPatch patch;
    patch.base = g;
    patch.kind = kind;
    patch.size = epsilon_policy(g) / 4.0;
    patch.samples.reserve(static_cast<size_t>(n_samples));
    auto leaf_point = [&](double p, double tau) {
        switch (kind) {
            case LeafKind::StrongStable: return stable_move(g, p);
            case LeafKind::StrongUnstable: return unstable_move(g, p);
            case LeafKind::CenterStable: return center_stable_point(g, tau, p);
            case LeafKind::CenterUnstable: return center_unstable_point(g, tau, p);
        }
        return g;
    };
    bool center = kind == LeafKind::CenterStable || kind == LeafKind::CenterUnstable;
    if (!center) {
        for (int i = 0; i < n_samples; ++i) {
            double p = n_samples == 1
                           ? 0.0
                           : -patch.size + 2.0 * patch.size * i / (n_samples - 1);
            patch.samples.push_back(leaf_point(p, 0.0));
        }
    } else {
        int rows = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_samples))));
        for (int i = 0; i < n_samples; ++i) {
            int r = i / rows, q = i % rows;
            double tau = rows == 1 ? 0.0 : -patch.size + 2.0 * patch.size * r / (rows - 1);
            double p = rows == 1 ? 0.0 : -patch.size + 2.0 * patch.size * q / (rows - 1);
            patch.samples.push_back(leaf_point(p, tau));
        }
    }
    return patch;
}

void Window::validate() const {
    if (!(im_lo >= 1.0)) throw std::invalid_argument("Window: im_lo must be >= 1");
    if (!(im_hi > im_lo)) throw std::invalid_argument("Window: im_hi must exceed im_lo");
    if (!(re_lo < re_hi)) throw std::invalid_argument("Window: empty re range");
    if (sample_count < 1) throw std::invalid_argument("Window: sample_count >= 1");
}

FrameElement sample_window_frame(const Window& w, Rng& rng) {
    UnitTangent u;
    u.base.re = rng.uniform(w.re_lo, w.re_hi);
    u.base.im = rng.uniform(w.im_lo, w.im_hi);
    u.angle = rng.uniform(0.0, 2.0 * M_PI);
    return tangent_to_frame(u);
}

AnosovReport verify_anosov_bounds(const Window& window, const AnosovConstants& constants,
                                  const std::vector<double>& t_grid, std::size_t n_samples,
                                  std::uint64_t seed, double displacement, int threads) {
    constants.validate();
    std::vector<AnosovReport> partial(static_cast<size_t>(std::max(threads, 1)));
    auto work = [&](int w_idx, std::size_t lo, std::size_t hi) {
        AnosovReport rep;
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng = Rng::for_sample(seed, i);
            FrameElement g = sample_window_frame(window, rng);
            FrameElement gs = stable_move(g, displacement);
            FrameElement gu = unstable_move(g, displacement);
            double d0s = quotient_dist(g, gs);
            double d0u = quotient_dist(g, gu);
            for (double t : t_grid) {
                if (t < 0) continue;
                double bound = constants.C * std::pow(constants.lambda, t);
                if (t > 0) {
                    double ds = quotient_dist(geodesic_flow(g, t), geodesic_flow(gs, t));
                    rep.max_normalized_ratio =
                        std::max(rep.max_normalized_ratio, ds / (bound * d0s));
                    // Backward contraction of the unstable direction.
                    double du = quotient_dist(geodesic_flow(g, -t), geodesic_flow(gu, -t));
                    rep.max_normalized_ratio =
                        std::max(rep.max_normalized_ratio, du / (bound * d0u));
                    double duf = quotient_dist(geodesic_flow(g, t), geodesic_flow(gu, t));
                    rep.unstable_forward_max_ratio =
                        std::max(rep.unstable_forward_max_ratio, duf / (bound * d0u));
                }
            }
            // Exact conjugation identity at the parameter level, audited on
            // its own short horizon where 1e-13 is meaningful for doubles
            // (entries grow like e^{t/2} and the identity residual is pure
            // rounding noise of that scale).
            for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
                double res = chart_dist_precise(geodesic_flow(gs, t),
                                                stable_move(geodesic_flow(g, t),
                                                            displacement * std::exp(-t)));
                rep.max_parameter_deviation = std::max(rep.max_parameter_deviation, res);
            }
            rep.samples++;
        }
        partial[static_cast<size_t>(w_idx)] = rep;
    };
    int nthreads = std::max(threads, 1);
    if (nthreads == 1) {
        work(0, 0, n_samples);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (n_samples + nthreads - 1) / nthreads;
        for (int w_idx = 0; w_idx < nthreads; ++w_idx) {
            std::size_t lo = std::min(n_samples, w_idx * chunk);
            std::size_t hi = std::min(n_samples, lo + chunk);
            pool.emplace_back(work, w_idx, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    AnosovReport out;
    for (const auto& rep : partial) {
        out.max_normalized_ratio = std::max(out.max_normalized_ratio, rep.max_normalized_ratio);
        out.max_parameter_deviation =
            std::max(out.max_parameter_deviation, rep.max_parameter_deviation);
        out.unstable_forward_max_ratio =
            std::max(out.unstable_forward_max_ratio, rep.unstable_forward_max_ratio);
        out.samples += rep.samples;
    }
    return out;
}

}  // namespace modshadow
