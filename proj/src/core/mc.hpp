// Monte-Carlo price bracketing: a primal lower bound from running a policy
// forward, and a dual upper bound from a per-path optimization with a
// martingale penalty read off the solved surface.
#pragma once

#include <string>
#include <vector>

#include "policy.hpp"
#include "solver.hpp"

namespace swing {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

enum class MapKind { Optimal, Zero };

std::string to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& s);

// Node index per step, driven by draws (seed, path, step).  Reproducible and
// independent across paths.
std::vector<int> sample_path(const LatticeModel& model, uint64_t seed, uint64_t path);

// Runs the policy forward along sampled paths, accruing L*dt*X per exercised
// step; unbiased estimate of the policy's value (a lower bound on the
// optimum).  Aggregation is in fixed path order, so results are
// reproducible.  Requires n_paths >= 2; volume overdraft is an internal
// invariant violation.
Estimate simulate_primal(const LatticeModel& model, const VolumeGrid& vgrid,
                         const PolicyTable& policy, int start_level, long long n_paths,
                         uint64_t seed);

struct DualEstimate {
    Estimate estimate;
    double max_path_value = 0.0;
    MapKind map = MapKind::Optimal;
};

// Per path, maximizes over all volume-feasible deterministic step controls
// (an inner DP over step x remaining level) the penalized reward
//   sum_i [ c_i*L*dt*X(i) - dM(i, j - c_i) ]
// where, for the optimal map, dM(i, j') = J(i+1, realized node, j') -
// E_i J(i+1, ., j') is the innovation of the value surface at the
// post-action level (zero-mean given step i, so the mean of the per-path
// maxima is an upper bound for every adapted policy's value).  Built from
// the exact lattice surface this penalty removes all variance: every
// per-path maximum equals J(0, root, start level).  The zero map drops the
// penalty and gives the anticipative perfect-foresight bound.
DualEstimate dual_bound(const LatticeModel& model, const VolumeGrid& vgrid,
                        const SurfaceBundle& bundle, int start_level, long long n_paths,
                        uint64_t seed, MapKind map);

struct PriceResult {
    PolicyTable policy;
    int start_level = 0;
    Estimate primal;
    DualEstimate dual;
    double gap = 0.0; // dual mean - primal mean
};

// Pipeline on a solved surface: extract the policy, estimate the primal
// bound, and compute the optimal-map dual bound on the same paths (common
// random numbers).
PriceResult price(const LatticeModel& model, const VolumeGrid& vgrid,
                  const SurfaceBundle& bundle, PolicyRule rule, double eps_switch, double y0,
                  long long n_paths, uint64_t seed);

} // namespace swing
