#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modshadow/flow.hpp"
#include "modshadow/shadowing.hpp"

namespace modshadow {

struct FailureDiag {
    std::size_t index = 0;
    std::string reason;
};

struct DensityReport {
    double epsilon = 0.0;
    std::size_t samples = 0;
    std::size_t successes = 0;
    double coverage = 0.0;
    double max_start_distance = 0.0;
    std::vector<FailureDiag> failures;
    double wall_seconds = 0.0;
    // Successful orbits with their sample index, ordered by index.
    std::vector<std::pair<std::size_t, PeriodicOrbitResult>> orbits;
};

struct ExperimentBudget {
    std::uint64_t seed = 0;
    int threads = 1;
    FinderBudget finder;
};

// Samples frames from the window, runs the periodic-orbit finder on each and
// independently re-validates every success (closure, period against the
// trace formula, start distance). Failures are recorded, never thrown.
DensityReport density_experiment(const Window& window, double epsilon,
                                 const ExperimentBudget& budget);

struct LeafRanges {
    double tau_min = 0.0;
    double tau_max = 30.0;
    double v_range = 1.2;        // unstable parameter window at tau = 0
    std::size_t row_cap = 4000;  // max samples per tau row
    bool mirrored = false;       // center-stable leaf instead
};

struct LeafDensityReport {
    double epsilon = 0.0;
    std::size_t net_points = 0;
    std::size_t covered = 0;
    double coverage = 0.0;
    std::size_t leaf_samples = 0;
    double wall_seconds = 0.0;
    std::vector<std::size_t> covered_indices;  // indices into the net
    std::vector<FailureDiag> uncovered;        // first few uncovered net points
};

// Covers an epsilon-net of the window with samples of the center-unstable
// (or center-stable) leaf through x, reduced to the quotient.
LeafDensityReport leaf_density_experiment(const FrameElement& x, const Window& window,
                                          double epsilon, const LeafRanges& ranges);

struct HittingRecord {
    FrameElement p;
    double t = 0.0;
    double dist_u = 0.0;
    double dist_v = 0.0;
    bool replay_ok = false;
};

struct TransitivityBudget {
    double t_max = 200.0;
    double dtau = 0.05;
    std::size_t row_cap = 20000;
};

// Finds p near U whose forward orbit passes near V by searching along the
// unstable leaf through U_center.
HittingRecord transitivity_experiment(const FrameElement& u_center,
                                      const FrameElement& v_center, double radius,
                                      const TransitivityBudget& budget = {});

}  // namespace modshadow
