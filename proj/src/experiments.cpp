#include "modshadow/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "modshadow/errors.hpp"
#include "modshadow/rng.hpp"

namespace modshadow {

namespace {

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Independent re-check of a finder result; returns an empty string on pass.
std::string revalidate(const PeriodicOrbitResult& r, const FrameElement& x0, double epsilon) {
    if (classify(r.gamma) != ElementType::Hyperbolic) return "validation: gamma not hyperbolic";
    double tl = translation_length(r.gamma);
    if (std::fabs(r.T - tl) > 1e-8) return "validation: period mismatch with trace formula";
    double closure = quotient_dist(geodesic_flow(r.y, r.T), r.y);
    if (closure > 1e-9) return "validation: closure residual " + std::to_string(closure);
    double sd = quotient_dist(r.y, x0);
    if (sd > epsilon) return "validation: start distance " + std::to_string(sd);
    return {};
}

}  // namespace

DensityReport density_experiment(const Window& window, double epsilon,
                                 const ExperimentBudget& budget) {
    window.validate();
    auto t_start = std::chrono::steady_clock::now();
    DensityReport report;
    report.epsilon = epsilon;
    report.samples = static_cast<std::size_t>(window.sample_count);

    struct Slot {
        bool ok = false;
        PeriodicOrbitResult result;
        std::string failure;
    };
    std::vector<Slot> slots(report.samples);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng = Rng::for_sample(budget.seed, i);
            FrameElement x0 = sample_window_frame(window, rng);
            Slot& slot = slots[i];
            try {
                PeriodicOrbitResult r = find_periodic_orbit(x0, epsilon, budget.finder);
                std::string issue = revalidate(r, x0, epsilon);
                if (!issue.empty()) {
                    slot.failure = issue;
                } else {
                    slot.ok = true;
                    slot.result = std::move(r);
                }
            } catch (const std::exception& e) {
                slot.failure = e.what();
            }
        }
    };
    int threads = std::max(budget.threads, 1);
    if (threads == 1) {
        work(0, report.samples);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (report.samples + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            std::size_t lo = std::min(report.samples, static_cast<std::size_t>(w) * chunk);
            std::size_t hi = std::min(report.samples, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].ok) {
            report.successes++;
            report.max_start_distance =
                std::max(report.max_start_distance, slots[i].result.start_distance);
            report.orbits.emplace_back(i, std::move(slots[i].result));
        } else {
            report.failures.push_back(FailureDiag{i, slots[i].failure});
        }
    }
    report.coverage =
        report.samples ? static_cast<double>(report.successes) / report.samples : 0.0;
    report.wall_seconds = elapsed_since(t_start);
    return report;
}

namespace {

struct NetPoint {
    FrameElement frame;
    double re, im, angle;
};

struct CellKey {
    long long x, y, a;
    bool operator==(const CellKey& o) const { return x == o.x && y == o.y && a == o.a; }
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::size_t h = static_cast<std::size_t>(k.x) * 0x9e3779b97f4a7c15ull;
        h ^= static_cast<std::size_t>(k.y) * 0xbf58476d1ce4e5b9ull + (h << 6);
        h ^= static_cast<std::size_t>(k.a) * 0x94d049bb133111ebull + (h >> 2);
        return h;
    }
};

struct SampleIndex {
    double cell = 0.1;
    double acell = 0.2;
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> cells;
    std::vector<FrameElement> frames;

    CellKey key(double re, double im, double angle) const {
        return CellKey{static_cast<long long>(std::floor(re / cell)),
                       static_cast<long long>(std::floor(std::log(im) / cell)),
                       static_cast<long long>(std::floor(angle / acell))};
    }

    void insert(const FrameElement& reduced) {
        UnitTangent u = frame_to_tangent(reduced);
        frames.push_back(reduced);
        auto idx = static_cast<std::uint32_t>(frames.size() - 1);
        cells[key(u.base.re, u.base.im, u.angle)].push_back(idx);
    }

    // Frames in the 3x3x3 cell neighborhood, with the re +- 1 cusp wrap.
    template <typename F>
    void for_near(double re, double im, double angle, F&& fn) const {
        for (double rshift : {0.0, -1.0, 1.0}) {
            CellKey base = key(re + rshift, im, angle);
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy)
                    for (long long da = -1; da <= 1; ++da) {
                        auto it = cells.find(CellKey{base.x + dx, base.y + dy, base.a + da});
                        if (it == cells.end()) continue;
                        for (auto idx : it->second)
                            if (fn(frames[idx])) return;
                    }
        }
    }
};

std::vector<NetPoint> build_net(const Window& window, double eps) {
    std::vector<NetPoint> net;
    double astep = eps / 2.0 / M_SQRT2;
    int n_ang = std::max(4, static_cast<int>(std::ceil(2.0 * M_PI / astep)));
    double im = window.im_lo;
    while (im <= window.im_hi + 1e-12) {
        double h = eps / 3.0 * im;  // chart distance ~ euclidean/im
        for (double re = window.re_lo; re <= window.re_hi + 1e-12; re += h) {
            if (re * re + im * im < 1.0) continue;  // below the domain floor
            for (int k = 0; k < n_ang; ++k) {
                double ang = 2.0 * M_PI * k / n_ang;
                UnitTangent u{HalfPlanePoint{re, im}, ang};
                net.push_back(NetPoint{tangent_to_frame(u), re, im, ang});
            }
        }
        im += eps / 3.0 * im;
    }
    return net;
}

}  // namespace

LeafDensityReport leaf_density_experiment(const FrameElement& x, const Window& window,
                                          double epsilon, const LeafRanges& ranges) {
    window.validate();
    auto t_start = std::chrono::steady_clock::now();
    LeafDensityReport report;
    report.epsilon = epsilon;

    SampleIndex index;
    index.cell = epsilon / 2.0;
    index.acell = epsilon / 2.0;
    double dtau = epsilon / 3.0;
    for (double tau = ranges.tau_min; tau <= ranges.tau_max + 1e-12; tau += dtau) {
        // The flow stretches the unstable parameter by e^tau, so the sample
        // spacing shrinks accordingly, capped per row.
        double spacing = epsilon / 3.0 * std::exp(-tau);
        auto want = static_cast<std::size_t>(2.0 * ranges.v_range / spacing) + 1;
        std::size_t count = std::min(want, ranges.row_cap);
        for (std::size_t i = 0; i < count; ++i) {
            double v = -ranges.v_range +
                       2.0 * ranges.v_range * static_cast<double>(i) /
                           static_cast<double>(std::max<std::size_t>(count - 1, 1));
            // The stable leaf spreads under the reversed flow.
            FrameElement leaf_pt = ranges.mirrored
                                       ? geodesic_flow(stable_move(x, v), -tau)
                                       : geodesic_flow(unstable_move(x, v), tau);
            index.insert(reduce_frame(leaf_pt).frame);
            report.leaf_samples++;
        }
    }

    std::vector<NetPoint> net = build_net(window, epsilon);
    report.net_points = net.size();
    for (std::size_t i = 0; i < net.size(); ++i) {
        bool covered = false;
        index.for_near(net[i].re, net[i].im, net[i].angle, [&](const FrameElement& f) {
            if (quotient_dist(f, net[i].frame) <= epsilon) {
                covered = true;
                return true;
            }
            return false;
        });
        if (covered) {
            report.covered++;
            report.covered_indices.push_back(i);
        } else if (report.uncovered.size() < 32) {
            report.uncovered.push_back(FailureDiag{i, "uncovered"});
        }
    }
    report.coverage =
        report.net_points ? static_cast<double>(report.covered) / report.net_points : 0.0;
    report.wall_seconds = elapsed_since(t_start);
    return report;
}

HittingRecord transitivity_experiment(const FrameElement& u_center,
                                      const FrameElement& v_center, double radius,
                                      const TransitivityBudget& budget) {
    if (!(radius > 0.0)) throw std::invalid_argument("transitivity: radius must be positive");
    auto verify = [&](double v, double tau) {
        HittingRecord rec;
        rec.p = unstable_move(u_center, v);
        rec.t = tau;
        rec.dist_u = quotient_dist(rec.p, u_center);
        rec.dist_v = quotient_dist(geodesic_flow(rec.p, tau), v_center);
        rec.replay_ok = rec.dist_u <= radius && rec.dist_v <= radius;
        return rec;
    };
    double v_max = 0.8 * radius;
    for (double tau = 0.0; tau <= budget.t_max + 1e-12; tau += budget.dtau) {
        double stretch = std::exp(tau);
        double w_range = v_max * stretch;
        auto want = static_cast<std::size_t>(2.0 * w_range / (radius / 2.0)) + 1;
        std::size_t count = std::min(want, budget.row_cap);
        for (std::size_t i = 0; i < count; ++i) {
            double w = count == 1 ? 0.0
                                  : -w_range + 2.0 * w_range * static_cast<double>(i) /
                                                   static_cast<double>(count - 1);
            double v = w / stretch;
            FrameElement probe = geodesic_flow(unstable_move(u_center, v), tau);
            if (quotient_dist(probe, v_center) > 0.9 * radius) continue;
            // Local refinement over (v, tau) before the honest replay.
            double bv = v, bt = tau;
            double best = quotient_dist(geodesic_flow(unstable_move(u_center, bv), bt),
                                        v_center);
            double hv = std::max(std::fabs(v) * 0.1, 1e-6 / stretch), ht = budget.dtau;
            for (int it = 0; it < 40 && best > 1e-3 * radius; ++it) {
                bool improved = false;
                for (auto [dv, dt] : {std::pair{hv, 0.0}, {-hv, 0.0}, {0.0, ht}, {0.0, -ht}}) {
                    double cv = bv + dv, ct = bt + dt;
                    if (ct < 0) continue;
                    double d = quotient_dist(geodesic_flow(unstable_move(u_center, cv), ct),
                                             v_center);
                    if (d < best && std::fabs(cv) <= v_max) {
                        best = d;
                        bv = cv;
                        bt = ct;
                        improved = true;
                    }
                }
                if (!improved) {
                    hv /= 2;
                    ht /= 2;
                }
            }
            HittingRecord rec = verify(bv, bt);
            if (rec.replay_ok) return rec;
        }
    }
    throw Error("budget exhausted");
}

}  // namespace modshadow
