#include "modshadow/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "modshadow/dd.hpp"
#include "modshadow/errors.hpp"
#include "modshadow/rng.hpp"

namespace modshadow {

namespace {

std::string invariant_msg(const char* name, double lhs, double rhs) {
    std::ostringstream os;
    os << "ShadowParameters: violated " << name << " (" << lhs << " vs " << rhs << ")";
    return os.str();
}

}  // namespace

void ShadowParameters::validate() const {
    anosov.validate();
    if (!(epsilon > 0.0 && delta > 0.0 && eta > 0.0 && t0 > 0.0) || l < 1)
        throw std::invalid_argument("ShadowParameters: fields must be positive");
    if (!(t0 > 2.0 * eta)) throw std::invalid_argument(invariant_msg("t0 > 2 eta", t0, 2 * eta));
    double ck = anosov.C * K * eta;
    if (!(ck <= epsilon / 3.0 + 1e-15))
        throw std::invalid_argument(invariant_msg("C K eta <= eps/3", ck, epsilon / 3.0));
    double cl = anosov.C * std::pow(anosov.lambda, t0) * eta;
    if (!(cl < delta / 3.0))
        throw std::invalid_argument(invariant_msg("C lambda^t0 eta < delta/3", cl, delta / 3.0));
    if (!(delta / 3.0 < epsilon))
        throw std::invalid_argument(invariant_msg("delta/3 < eps", delta / 3.0, epsilon));
    if (!(eta / l < delta))
        throw std::invalid_argument(invariant_msg("eta/l < delta", eta / l, delta));
    double k_expect = lemma_bound_K(t0, anosov.lambda);
    if (!(std::fabs(K - k_expect) <= 1e-12 * std::max(1.0, k_expect)))
        throw std::invalid_argument(invariant_msg("K = 2 + l^{t0/2}/(1-l^{t0/2})", K, k_expect));
}

double p_function(double t, double t0, double lambda, std::span<const double> c_seq,
                  std::size_t m) {
    if (!(t >= 0.0 && t <= t0)) throw std::invalid_argument("p_function: t must lie in [0, t0]");
    double p = std::pow(lambda, t) + std::pow(lambda, t0 - t);
    double csum = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        double cj = j <= c_seq.size() ? c_seq[j - 1] : 0.0;
        csum += cj;
        p += std::pow(lambda, t + static_cast<double>(j) * t0 + csum);
    }
    return p;
}

double lemma_bound_K(double t0, double lambda) {
    if (!(t0 > 0.0)) throw std::invalid_argument("lemma_bound_K: t0 must be positive");
    double q = std::pow(lambda, t0 / 2.0);
    return 2.0 + q / (1.0 - q);
}

LemmaAudit lemma_l1n_audit(double t0, double lambda, double eta, std::size_t trials,
                           std::size_t m_max, std::uint64_t seed) {
    if (!(t0 > 2.0 * eta)) throw std::invalid_argument("lemma_l1n_audit: requires t0 > 2 eta");
    LemmaAudit audit;
    audit.bound = lemma_bound_K(t0, lambda);
    audit.trials = trials;
    Rng rng(seed);
    std::vector<double> c;
    for (std::size_t i = 0; i < trials; ++i) {
        double t = rng.uniform(0.0, t0);
        std::size_t m = rng.next_below(m_max + 1);
        c.resize(m);
        for (auto& v : c) v = rng.uniform(-eta, eta);
        audit.max_p = std::max(audit.max_p, p_function(t, t0, lambda, c, m));
    }
    audit.pass = audit.max_p <= audit.bound + 1e-12;
    return audit;
}

ShadowParameters select_parameters(double epsilon, const FrameElement& x0, double t0_hint) {
    double inj = injectivity_radius(x0);
    if (!(epsilon > 0.0) || epsilon > inj + 1e-12)
        throw std::invalid_argument("epsilon too large for this base point");
    ShadowParameters p;
    p.epsilon = epsilon;
    LocalProductConstants lpc = local_product_constants(x0, epsilon);
    p.delta = lpc.delta;
    p.t0 = std::max(t0_hint, 1.0);
    p.K = lemma_bound_K(p.t0, p.anosov.lambda);
    double eta = std::min(lpc.eta, epsilon / (3.0 * p.anosov.C * p.K));
    double cusp_room = 0.99 * p.delta / (3.0 * p.anosov.C * std::pow(p.anosov.lambda, p.t0));
    p.eta = std::min(eta, cusp_room);
    if (!(p.t0 > 2.0 * p.eta + 0.1))
        p.t0 = 2.0 * p.eta + 0.1;  // keeps the lemma hypothesis with margin
    // l from ceil(eta/delta) + 1, then enlarged until the flow-continuity
    // bound d(flow(z,r), flow(w,r)) <= eta holds for sampled z, w in the
    // eta/l ball and |r| <= 3 eta.
    p.l = static_cast<int>(std::ceil(p.eta / p.delta)) + 1;
    Rng rng(0x9d2c5680u);
    for (; p.l <= 64; ++p.l) {
        bool ok = true;
        for (int trial = 0; trial < 64 && ok; ++trial) {
            double r = rng.uniform(-3.0 * p.eta, 3.0 * p.eta);
            double b = p.eta / p.l / 2.0;
            FrameElement z = stable_move(unstable_move(geodesic_flow(x0, rng.uniform(-b, b)),
                                                       rng.uniform(-b, b)),
                                         rng.uniform(-b, b));
            FrameElement w = stable_move(unstable_move(geodesic_flow(x0, rng.uniform(-b, b)),
                                                       rng.uniform(-b, b)),
                                         rng.uniform(-b, b));
            if (chart_dist(geodesic_flow(z, r), geodesic_flow(w, r)) > p.eta) ok = false;
        }
        if (ok) break;
    }
    p.validate();
    return p;
}

namespace {

double orbit_self_dist(const FrameElement& x0, double t) {
    return quotient_dist(geodesic_flow(x0, t), x0);
}

double golden_refine(const FrameElement& x0, double lo, double hi, int iters = 48) {
    const double phi = 0.6180339887498949;
    for (int i = 0; i < iters; ++i) {
        double m1 = hi - phi * (hi - lo);
        double m2 = lo + phi * (hi - lo);
        if (orbit_self_dist(x0, m1) < orbit_self_dist(x0, m2))
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<RecurrenceHit> scan_recurrence_dips(const FrameElement& x0, double t_lo,
                                                double t_max, double dt, double cap) {
    std::vector<RecurrenceHit> hits;
    if (!(dt > 0.0) || !(t_max > t_lo)) return hits;
    double prev2 = std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();
    double t = t_lo;
    std::vector<double> dip_times;
    for (; t <= t_max + 1e-12; t += dt) {
        double d = orbit_self_dist(x0, t);
        if (std::isfinite(prev2) && prev <= prev2 && prev < d && prev < cap)
            dip_times.push_back(t - dt);
        prev2 = prev;
        prev = d;
    }
    if (std::isfinite(prev2) && prev <= prev2 && prev < cap) dip_times.push_back(t - dt);
    for (double td : dip_times) {
        double tstar = golden_refine(x0, std::max(t_lo, td - dt), std::min(t_max, td + dt));
        AlignedDist al = quotient_dist_aligned(geodesic_flow(x0, tstar), x0);
        if (al.dist < cap) hits.push_back(RecurrenceHit{tstar, al.deck, al.dist});
    }
    return hits;
}

RecurrenceHit detect_recurrence(const FrameElement& x0, double delta, double t_max, double dt) {
    if (!(delta > 0.0)) throw std::invalid_argument("detect_recurrence: delta must be positive");
    double t_lo = std::max(dt, 0.1);
    bool left_ball = false;  // the orbit must first leave the delta/3 ball
    for (double t = t_lo; t <= t_max + 1e-12; t += dt) {
        double d = orbit_self_dist(x0, t);
        if (!left_ball) {
            left_ball = d >= delta / 3.0;
            continue;
        }
        if (d < delta / 3.0) {
            // Walk to the bottom of the dip before refining.
            double t2 = t, d2 = d;
            while (t2 + dt <= t_max) {
                double dn = orbit_self_dist(x0, t2 + dt);
                if (dn >= d2) break;
                t2 += dt;
                d2 = dn;
            }
            double tstar = golden_refine(x0, t2 - dt, t2 + dt);
            AlignedDist al = quotient_dist_aligned(geodesic_flow(x0, tstar), x0);
            if (al.dist < delta / 3.0) return RecurrenceHit{tstar, al.deck, al.dist};
        }
    }
    throw NoRecurrenceError();
}

namespace {

struct ReturnMatrix {
    double e[4];  // E = x0^{-1} kappa x0 a(t0), det-normalized, e[3] > 0
};

// Compensated evaluation: the factors carry e^{t0/2}-sized entries that
// cancel to an order-one result.
ReturnMatrix conjugated_return_matrix(const FrameElement& x0, const DeckElement& kappa,
                                      double t0) {
    double km[4] = {static_cast<double>(kappa.a), static_cast<double>(kappa.b),
                    static_cast<double>(kappa.c), static_cast<double>(kappa.d)};
    double xm[4] = {x0.m11, x0.m12, x0.m21, x0.m22};
    double xadj[4] = {x0.m22, -x0.m12, -x0.m21, x0.m11};
    DDMat kx = dd_matmul(DDMat::from(km), DDMat::from(xm));
    double eh = std::exp(t0 / 2.0);
    DDMat at;
    at.e[0] = DD(eh);
    at.e[1] = DD(0.0);
    at.e[2] = DD(0.0);
    at.e[3] = DD(1.0 / eh);
    DDMat prod = dd_matmul(dd_matmul(DDMat::from(xadj), kx), at);
    DD det = dd_det(prod);
    double dv = det.value();
    if (!(std::fabs(dv) > 1e-300)) throw std::runtime_error("return matrix degenerate");
    double scale = 1.0 / std::sqrt(std::fabs(dv));
    ReturnMatrix r;
    for (int i = 0; i < 4; ++i) r.e[i] = prod.e[i].value() * scale;
    if (dv < 0)
        throw std::runtime_error("return matrix has negative determinant");
    if (r.e[3] < 0)
        for (auto& v : r.e) v = -v;
    return r;
}

}  // namespace

ShadowRun shadow_iteration(const FrameElement& x0, const ShadowParameters& params, int n_steps,
                           const std::optional<FrameElement>& y0_override) {
    params.validate();
    if (n_steps < 1) throw std::invalid_argument("shadow_iteration: n_steps >= 1");
    ShadowRun run;
    run.x0 = x0;
    run.t0 = params.t0;
    AlignedDist al = quotient_dist_aligned(geodesic_flow(x0, params.t0), x0);
    run.kappa = al.deck;
    run.recurrence_dist = al.dist;
    if (al.dist > params.delta / 3.0 + 1e-12)
        throw Error("iterate left the delta-ball: recurrence return exceeds delta/3");
    ReturnMatrix E = conjugated_return_matrix(x0, al.deck, params.t0);
    FrameElement x1_near(E.e[0], E.e[1], E.e[2], E.e[3]);
    x1_near = compose(x0, x1_near);

    FrameElement y = y0_override.value_or(x0);
    if (y0_override && quotient_dist(y, x0) > params.delta)
        throw Error("iterate left the delta-ball: y0 override outside the delta ball");
    const double lam_t0 = std::pow(params.anosov.lambda, params.t0);
    double u_prev = 0.0;
    for (int n = 1; n <= n_steps; ++n) {
        BracketResult br = bracket_in_quotient(x1_near, y, params.eta);
        FrameElement x1_aligned = deck_apply(br.deck, x1_near, true);
        ShadowIterate it;
        it.n = n;
        it.params = br.params;
        it.z = br.w;
        it.s = -br.params.c;
        it.theta = unstable_move(x1_aligned, -br.params.nu * std::exp(br.params.c));
        double u_n = -br.params.nu * std::exp(br.params.c - params.t0);
        it.y = unstable_move(x0, u_n);
        it.gap = std::fabs(u_n - u_prev);
        // Induction-hypothesis membership: the iterate stays in the delta/3 ball.
        double d0 = chart_dist(it.y, x0);
        if (d0 > params.delta / 3.0 + 1e-12)
            throw Error("iterate left the delta-ball");
        // (ec11)-style audit on a coarse grid: d(flow(y_n,t), flow(x0,t))
        // against C lambda^{t0-t} eta.
        for (double t : {0.0, params.t0 / 4, params.t0 / 2, 3 * params.t0 / 4, params.t0}) {
            double dist = std::fabs(u_n) * std::exp(t);  // exact on the unstable leaf
            double bound = params.anosov.C * std::pow(params.anosov.lambda, params.t0 - t) *
                           params.eta;
            run.ec11_max_ratio = std::max(run.ec11_max_ratio, dist / bound);
        }
        u_prev = u_n;
        y = it.y;
        run.iterates.push_back(std::move(it));
        if (n >= 2 && run.iterates.back().gap < 1e-12) {
            run.converged = true;
            break;
        }
        // Safety: geometric convergence means the gap should shrink by
        // ~lambda^{t0}; bail out if it blows up instead.
        if (n >= 8 && run.iterates.back().gap >
                          run.iterates[run.iterates.size() - 2].gap / (lam_t0 + 0.9))
            throw Error("iterate left the delta-ball: iteration diverging");
    }
    if (run.ec11_max_ratio > 1.0 + 1e-9)
        throw Error("iterate left the delta-ball: (ec11) bound violated");
    return run;
}

std::vector<double> default_t_grid(double t0, int points) {
    std::vector<double> g(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<size_t>(i)] = t0 * static_cast<double>(i) / (points - 1);
    return g;
}

ShadowOrbit shadow_limit(const ShadowRun& run, const ShadowParameters& params, int k_max) {
    if (run.iterates.empty() || !run.converged || run.last().gap >= 1e-12)
        throw Error("shadow_limit: iterates not converged");
    ShadowOrbit orbit;
    orbit.y = run.last().y;
    orbit.s = run.last().s;
    orbit.k_max = k_max;
    double T = params.t0 + orbit.s;
    double sigma = run.last().params.sigma;
    // One-period link of the converged fixed point: flowing by t0 + s lands
    // back on the stable leaf of y at parameter sigma. The k-period points
    // then follow by exact group algebra (powers of the aligning deck), so
    // the profile below carries no iterated flow noise.
    double link = quotient_dist(geodesic_flow(orbit.y, T), stable_move(orbit.y, sigma));
    if (link > 1e-9)
        throw Error("shadow_limit: fixed-point identity residual " + std::to_string(link));
    std::vector<double> grid = default_t_grid(params.t0);
    double decay = std::exp(-T);
    for (int k = 0; k <= k_max; ++k) {
        double sigma_k =
            decay == 1.0 ? sigma * k : sigma * (1.0 - std::pow(decay, k)) / (1.0 - decay);
        FrameElement q = stable_move(orbit.y, sigma_k);
        double worst = 0.0, worst_t = 0.0;
        for (double t : grid) {
            double d = quotient_dist(geodesic_flow(q, t), geodesic_flow(run.x0, t));
            if (d > worst) {
                worst = d;
                worst_t = t;
            }
        }
        orbit.residual_profile.emplace_back(k, worst);
        if (worst > params.epsilon / 3.0 + 1e-9) {
            std::ostringstream os;
            os << "verification failed at (k=" << k << ", t=" << worst_t
               << "): residual=" << worst << " > eps/3=" << params.epsilon / 3.0;
            throw VerificationError(os.str());
        }
    }
    return orbit;
}

ShadowReport verify_piecewise_shadow(const FrameElement& y, const FrameElement& x0, double t0,
                                     std::span<const double> transitions, double eps,
                                     int k_max, std::span<const double> t_grid,
                                     bool backward) {
    ShadowReport rep;
    rep.pass = true;
    double dir = backward ? -1.0 : 1.0;
    FrameElement q = y;
    FrameElement base = x0;
    for (int k = 0; k <= k_max; ++k) {
        for (double t : t_grid) {
            double d = quotient_dist(geodesic_flow(q, dir * t), geodesic_flow(base, dir * t));
            rep.max_residual = std::max(rep.max_residual, d);
            if (d > eps && rep.first_fail_k < 0) {
                rep.pass = false;
                rep.first_fail_k = k;
                rep.first_fail_t = t;
            }
        }
        double s_k = transitions.empty() ? 0.0 : transitions[k % transitions.size()];
        q = reduce_frame(geodesic_flow(q, dir * (t0 + s_k))).frame;
    }
    return rep;
}

ShadowParameters scaled_parameters(double t0, double recurrence_dist, double eta_floor) {
    ShadowParameters p;
    p.t0 = t0;
    p.K = lemma_bound_K(t0, p.anosov.lambda);
    p.eta = std::max({eta_floor, 1.5 * recurrence_dist, 1e-9});
    // Past this scale the chart distortion absorbed by C = 2 no longer
    // covers the bracket moves; the eta-disciplined run is meaningless.
    if (p.eta > 0.25)
        throw Error("recurrence too coarse for the product chart (eta would be " +
                    std::to_string(p.eta) + ")");
    p.delta = std::max(3.0 * recurrence_dist * 1.1,
                       6.0 * p.anosov.C * std::pow(p.anosov.lambda, t0) * p.eta) +
              1e-12;
    p.epsilon = 3.0 * p.anosov.C * p.K * p.eta;
    p.l = static_cast<int>(std::ceil(p.eta / p.delta)) + 1;
    p.validate();
    return p;
}

namespace {

struct TrialOutcome {
    PeriodicOrbitResult result;
    bool ok = false;
    bool non_hyperbolic = false;
};

struct DirectLimit {
    double u = 0.0, sigma = 0.0, s = 0.0;
    int iterations = 0;
    bool converged = false;
};

// The shadowing recurrence in closed form on the unstable parameter of x0:
// the same map the bracket iteration induces, usable when the dip is too
// coarse for the eta-disciplined machinery.
DirectLimit direct_refine(const ReturnMatrix& E, double t0, int max_iterations) {
    DirectLimit lim;
    double u = 0.0;
    double decay = std::exp(-t0);
    for (int n = 1; n <= max_iterations; ++n) {
        double h22 = E.e[3] - u * E.e[1];
        if (!(h22 > 1e-8)) return lim;
        double un = -decay * (E.e[2] - u * E.e[0]) / h22;
        lim.iterations = n;
        if (std::fabs(un - u) < 1e-15 * std::max(1.0, std::fabs(un))) {
            u = un;
            lim.converged = true;
            break;
        }
        u = un;
    }
    if (!lim.converged) return lim;
    double h22 = E.e[3] - u * E.e[1];
    lim.u = u;
    lim.sigma = E.e[1] / h22;
    lim.s = 2.0 * std::log(h22);
    return lim;
}

TrialOutcome try_periodic_from_hit(const FrameElement& x0_dir, const FrameElement& x0_orig,
                                   bool reversed, const RecurrenceHit& hit, double epsilon,
                                   const FinderBudget& budget, double eta_floor,
                                   const ShadowParameters& paper_params) {
    TrialOutcome out;
    {
        DeckElement g0 = reversed ? hit.deck : inverse_deck(hit.deck);
        if (classify(g0) != ElementType::Hyperbolic) {
            out.non_hyperbolic = true;
            return out;
        }
    }
    // Center the return time so the flow component of the return matrix
    // vanishes: t0 <- t* + 2 ln E22; re-align once in case the deck shifts.
    double t0 = hit.t0;
    DeckElement kappa = hit.deck;
    double rec_dist = hit.dist;
    for (int pass = 0; pass < 2; ++pass) {
        ReturnMatrix E0 = conjugated_return_matrix(x0_dir, kappa, t0);
        if (!(E0.e[3] > 0.05)) return out;
        double shift = 2.0 * std::log(E0.e[3]);
        t0 += shift;
        if (!(t0 > 0.2) || t0 > 700.0) return out;
        AlignedDist al = quotient_dist_aligned(geodesic_flow(x0_dir, t0), x0_dir);
        rec_dist = al.dist;
        if (al.deck == kappa) break;
        kappa = al.deck;
        if (pass == 1) return out;
    }

    PeriodicOrbitResult res;
    res.reversed = reversed;
    res.recurrence_dist = rec_dist;
    res.t0 = t0;
    res.params = paper_params;

    FrameElement y_limit;
    bool have_limit = false;
    if (!budget.strict) {
        try {
            ShadowParameters params = scaled_parameters(t0, rec_dist, eta_floor);
            ShadowRun run = shadow_iteration(x0_dir, params, budget.max_iterations);
            if (run.converged) {
                kappa = run.kappa;
                res.params = params;
                res.s = run.last().s;
                res.sigma = run.last().params.sigma;
                res.iterations = static_cast<int>(run.iterates.size());
                y_limit = run.last().y;
                have_limit = true;
            }
        } catch (const std::exception&) {
            have_limit = false;
        }
    } else {
        try {
            ShadowParameters params =
                select_parameters(paper_params.epsilon, x0_dir, t0);
            ShadowRun run = shadow_iteration(x0_dir, params, budget.max_iterations);
            if (!run.converged) return out;
            kappa = run.kappa;
            res.params = params;
            res.s = run.last().s;
            res.sigma = run.last().params.sigma;
            res.iterations = static_cast<int>(run.iterates.size());
            y_limit = run.last().y;
            have_limit = true;
        } catch (const std::exception&) {
            return out;
        }
    }
    try {
        if (!have_limit) {
            ReturnMatrix E = conjugated_return_matrix(x0_dir, kappa, t0);
            DirectLimit lim = direct_refine(E, t0, budget.max_iterations);
            if (!lim.converged || !std::isfinite(lim.u) || std::fabs(lim.u) > 1.0) return out;
            res.s = lim.s;
            res.sigma = lim.sigma;
            res.iterations = lim.iterations;
            y_limit = unstable_move(x0_dir, lim.u);
        }

        DeckElement gamma = reversed ? kappa : inverse_deck(kappa);
        if (classify(gamma) != ElementType::Hyperbolic) {
            out.non_hyperbolic = true;
            return out;
        }
        res.gamma = gamma;
        res.T = t0 + res.s;
        if (!(res.T > 0.1)) return out;
        // Exact projection onto the axis of gamma: the limit sits at stable
        // coordinate sigma/(1 - e^{-T}) from the periodic point.
        double xi = res.sigma / (1.0 - std::exp(-res.T));
        if (!std::isfinite(xi) || std::fabs(xi) > 1.0) return out;
        FrameElement p = stable_move(y_limit, xi);
        res.y = reversed ? time_reverse(p) : p;
        res.oracle_period = translation_length(gamma);
        res.closure_residual = quotient_dist(geodesic_flow(res.y, res.T), res.y);
        res.start_distance = quotient_dist(res.y, x0_orig);
        if (std::fabs(res.T - res.oracle_period) > 1e-8) return out;
        if (res.closure_residual > 1e-9) return out;
        if (res.start_distance > epsilon) return out;
        out.result = std::move(res);
        out.ok = true;
    } catch (const std::exception&) {
        out.ok = false;
    }
    return out;
}

}  // namespace

PeriodicOrbitResult find_periodic_orbit(const FrameElement& x0, double epsilon,
                                        const FinderBudget& budget) {
    double inj = injectivity_radius(x0);
    if (!(epsilon > 0.0) || epsilon > inj + 1e-12)
        throw std::invalid_argument("epsilon too large for this base point");
    // Paper-chain parameters at this base point; their eta also floors the
    // desk-scale bracket cap.
    ShadowParameters paper = select_parameters(epsilon, x0, 2.0);

    std::vector<std::pair<bool, RecurrenceHit>> hits;
    for (int pass = 0; pass < (budget.both_directions ? 2 : 1); ++pass) {
        bool reversed = pass == 1;
        FrameElement g = reversed ? time_reverse(x0) : x0;
        for (auto& h :
             scan_recurrence_dips(g, budget.t_min, budget.t_max, budget.dt, budget.dip_cap))
            hits.emplace_back(reversed, h);
    }
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.second.t0 < b.second.t0; });

    std::optional<PeriodicOrbitResult> best;
    bool saw_non_hyperbolic = false;
    for (const auto& [reversed, hit] : hits) {
        if (best && hit.t0 > best->T + 0.2) break;  // later dips cannot yield shorter orbits
        FrameElement g = reversed ? time_reverse(x0) : x0;
        TrialOutcome out =
            try_periodic_from_hit(g, x0, reversed, hit, epsilon, budget, paper.eta, paper);
        saw_non_hyperbolic = saw_non_hyperbolic || out.non_hyperbolic;
        if (!out.ok) continue;
        if (!best || out.result.T < best->T - 1e-9 ||
            (std::fabs(out.result.T - best->T) <= 1e-9 &&
             out.result.start_distance < best->start_distance))
            best = std::move(out.result);
    }
    if (best) return *best;
    if (saw_non_hyperbolic) throw NonHyperbolicReturnError();
    throw RecurrenceBudgetError();
}

UniquenessResult uniqueness_check(const FrameElement& y1, const FrameElement& y2,
                                  const ShadowParameters& params, double t0,
                                  std::span<const double> transitions1,
                                  std::span<const double> transitions2,
                                  std::span<const double> t_grid) {
    UniquenessResult res;
    int k_max = 8;
    FrameElement q1 = y1, q2 = y2;
    for (int k = 0; k <= k_max; ++k) {
        for (double t : t_grid)
            res.max_forward = std::max(
                res.max_forward, quotient_dist(geodesic_flow(q1, t), geodesic_flow(q2, t)));
        double s1 = transitions1.empty() ? 0.0 : transitions1[k % transitions1.size()];
        double s2 = transitions2.empty() ? 0.0 : transitions2[k % transitions2.size()];
        q1 = reduce_frame(geodesic_flow(q1, t0 + s1)).frame;
        q2 = reduce_frame(geodesic_flow(q2, t0 + s2)).frame;
    }
    // Backward horizon capped where the initial separation, expanded by the
    // reversed flow, would exceed eta anyway.
    double d0 = std::max(quotient_dist(y1, y2), 1e-15);
    double horizon = std::min(static_cast<double>(k_max) * t0,
                              std::log(params.eta / d0) * 0.9);
    q1 = y1;
    q2 = y2;
    double advanced = 0.0;
    while (advanced < horizon) {
        for (double t : t_grid) {
            if (advanced + t > horizon) break;
            res.max_backward = std::max(
                res.max_backward, quotient_dist(geodesic_flow(q1, -t), geodesic_flow(q2, -t)));
        }
        q1 = reduce_frame(geodesic_flow(q1, -t0)).frame;
        q2 = reduce_frame(geodesic_flow(q2, -t0)).frame;
        advanced += t0;
    }
    bool bounds_ok = res.max_forward <= params.eta && res.max_backward <= params.eta;
    res.dist = quotient_dist(y1, y2);
    BracketResult br = bracket_in_quotient(y1, y2, params.eta);
    res.bracket = br.params;
    res.unique = bounds_ok && res.bracket.max_abs() <= 1e-9 && res.dist <= 1e-9;
    return res;
}

}  // namespace modshadow
