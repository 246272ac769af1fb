#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "modshadow/bracket.hpp"
#include "modshadow/flow.hpp"
#include "modshadow/frame.hpp"
#include "modshadow/lattice.hpp"

namespace modshadow {

// Parameter tuple for a shadowing run. validate() enforces
//   t0 > 2 eta,
//   C K eta <= epsilon / 3,
//   C lambda^{t0} eta < delta / 3,  delta / 3 < epsilon,
//   eta / l < delta,
//   K = 2 + lambda^{t0/2} / (1 - lambda^{t0/2}).
struct ShadowParameters {
    double epsilon = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    double t0 = 0.0;
    AnosovConstants anosov;
    double K = 0.0;
    int l = 1;

    void validate() const;
};

// P_{m,c}(t) = lambda^t + lambda^{t0 - t} + sum_{j=1..m} lambda^{t + j t0 + c_1 + .. + c_j}.
double p_function(double t, double t0, double lambda, std::span<const double> c_seq,
                  std::size_t m);

// K = 2 + lambda^{t0/2} / (1 - lambda^{t0/2}).
double lemma_bound_K(double t0, double lambda);

struct LemmaAudit {
    double max_p = 0.0;
    double bound = 0.0;
    std::size_t trials = 0;
    bool pass = false;
};

// Randomized audit of the uniform bound: admissible (t, m, c) with
// |c_i| < eta and t0 > 2 eta never push P past K.
LemmaAudit lemma_l1n_audit(double t0, double lambda, double eta, std::size_t trials,
                           std::size_t m_max, std::uint64_t seed);

ShadowParameters select_parameters(double epsilon, const FrameElement& x0, double t0_hint);

// Parameter set consistent with the chain at a coarser, measured recurrence
// scale (its epsilon is 3 C K eta for the scaled eta). Used when a run
// works from a return too wide for the point's paper-chain parameters.
ShadowParameters scaled_parameters(double t0, double recurrence_dist, double eta_floor);

struct RecurrenceHit {
    double t0 = 0.0;
    DeckElement deck;  // chart_dist(deck * flow(x0, t0), x0) = dist
    double dist = 0.0;
};

RecurrenceHit detect_recurrence(const FrameElement& x0, double delta, double t_max, double dt);

// All refined local minima of t -> quotient_dist(flow(x0,t), x0) on
// [t_lo, t_max] below `cap`, ordered by time. detect_recurrence returns the
// first one below its threshold.
std::vector<RecurrenceHit> scan_recurrence_dips(const FrameElement& x0, double t_lo,
                                                double t_max, double dt, double cap);

struct ShadowIterate {
    int n = 0;
    FrameElement y;      // quotient representative chart-close to x0
    FrameElement theta;  // unstable-leaf representative with flow(theta, s) = z
    FrameElement z;
    double s = 0.0;
    BracketParams params;
    double gap = 0.0;  // chart_dist to the previous iterate
};

struct ShadowRun {
    FrameElement x0;
    DeckElement kappa;  // aligning deck of the recurrence
    double t0 = 0.0;
    double recurrence_dist = 0.0;
    std::vector<ShadowIterate> iterates;
    bool converged = false;
    double ec11_max_ratio = 0.0;  // max residual / (C lambda^{t0-t} eta)

    const ShadowIterate& last() const { return iterates.back(); }
};

ShadowRun shadow_iteration(const FrameElement& x0, const ShadowParameters& params,
                           int n_steps,
                           const std::optional<FrameElement>& y0_override = std::nullopt);

struct ShadowOrbit {
    FrameElement y;
    double s = 0.0;
    int k_max = 0;
    std::vector<std::pair<int, double>> residual_profile;
};

ShadowOrbit shadow_limit(const ShadowRun& run, const ShadowParameters& params, int k_max);

struct ShadowReport {
    bool pass = false;
    double max_residual = 0.0;
    int first_fail_k = -1;
    double first_fail_t = 0.0;
};

// Piecewise shadowing check: d(flow(advance_k(y), t), flow(x0, t)) <= eps for
// grid t in [0, t0] and k <= k_max, where advance_k steps y by t0 + s_i per
// period (transitions reused cyclically if shorter than k_max). backward
// runs the time-reversed variant.
ShadowReport verify_piecewise_shadow(const FrameElement& y, const FrameElement& x0, double t0,
                                     std::span<const double> transitions, double eps,
                                     int k_max, std::span<const double> t_grid,
                                     bool backward = false);

struct PeriodicOrbitResult {
    FrameElement y;
    double T = 0.0;
    DeckElement gamma;
    double closure_residual = 0.0;
    double oracle_period = 0.0;
    double start_distance = 0.0;
    double s = 0.0;
    double sigma = 0.0;         // stable coordinate consumed by the axis projection
    double recurrence_dist = 0.0;
    double t0 = 0.0;
    int iterations = 0;
    bool reversed = false;  // found along the time-reversed flow
    ShadowParameters params;
};

struct FinderBudget {
    double t_min = 0.6;
    double t_max = 46.0;
    double dt = 0.02;
    double dip_cap = 0.9;
    int max_iterations = 400;
    bool both_directions = true;
    bool strict = false;  // bracket at the paper-chain eta instead of the run scale
};

PeriodicOrbitResult find_periodic_orbit(const FrameElement& x0, double epsilon,
                                        const FinderBudget& budget = {});

struct UniquenessResult {
    bool unique = false;
    double max_forward = 0.0;
    double max_backward = 0.0;
    BracketParams bracket;
    double dist = 0.0;
};

UniquenessResult uniqueness_check(const FrameElement& y1, const FrameElement& y2,
                                  const ShadowParameters& params, double t0,
                                  std::span<const double> transitions1,
                                  std::span<const double> transitions2,
                                  std::span<const double> t_grid);

// 32 equispaced points in [0, t0].
std::vector<double> default_t_grid(double t0, int points = 32);

}  // namespace modshadow
