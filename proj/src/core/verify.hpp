// Checks that the solved surfaces satisfy the identities the pricing rests
// on: the marginal-price recursion, boundary pins, shape properties, the
// pathwise chain-rule reconstruction, and the sign of the optimality gap.
// Tiny models are also priced by exhaustive policy enumeration.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "solver.hpp"

namespace swing {

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    long long cells = 0;
    bool pass = false;
};

inline CheckResult make_check(std::string name, double max_r, double mean_r, double tol,
                              long long cells) {
    return CheckResult{std::move(name), max_r, mean_r, tol, cells, max_r <= tol};
}

// Rebuilds the value surface from the stored marginal, level by level:
//   R(N,.) = 0,  R(i,n) = L*dt*max(X(i,n) + D(i,n,j), 0) + E_i R(i+1,.)
// with the level j held fixed along the sweep, and reports |R - J| over all
// cells with j <= min(M, N) (the volume-constrained region).  First-order
// accurate: the maximum shrinks like dt under grid refinement.
CheckResult bspde_residual(const LatticeModel& model, const VolumeGrid& vgrid,
                           const SurfaceBundle& bundle, double tolerance);

// Three pins at the edges of the volume grid:
//   empty_level_value_zero     J(i,n,0) == 0 exactly,
//   empty_level_no_exercise    max(X(i,n) + D(i,n,0), 0) <= 1e-10 for i < N,
//   exhaustion_marginal_zero   D(i,n,N-i) == 0 exactly (levels within grid).
std::vector<CheckResult> boundary_checks(const LatticeModel& model, const VolumeGrid& vgrid,
                                         const SurfaceBundle& bundle);

// Exercise decision per cell: 1 = take the full rate for this step.
// Layout matches Surface rows ([step][node*(M+1)+level]); level 0 must be 0.
using Control = std::vector<std::vector<uint8_t>>;

Control zero_control(const LatticeModel& model, const VolumeGrid& vgrid);
Control dp_argmax_control(const LatticeModel& model, const VolumeGrid& vgrid, const Surface& J);
// Independent fair coin per cell from the (seed, control index, cell rank)
// stream; level 0 forced to 0.
Control random_control(const LatticeModel& model, const VolumeGrid& vgrid, uint64_t seed,
                       uint64_t index);

// Pathwise reconstruction of the value under a control c.  With the one-step
// decision marginal Deff(i,n,j) = (E_i J(i+1,.,j-1) - E_i J(i+1,.,j)) / dy,
//   C(i,n,j) = dt*[ L*(X+Deff)+ - c*L*(X+Deff) ] + c*L*dt*X + E_i C(i+1,.,j-c)
// (gain terms absent at level 0, where the control is forced to 0) equals J
// at every cell for EVERY feasible control.  Reports the worst |C - J|
// across the supplied controls.
CheckResult chain_rule_check(const LatticeModel& model, const VolumeGrid& vgrid, const Surface& J,
                             const std::vector<Control>& controls, double tolerance);

// Expected shortfall of a control against the optimal policy, accumulated
// backward from the per-cell integrand
//   g = dt*[ L*(X+Deff)+ - c*L*(X+Deff) ]  (0 at level 0),
// which is nonnegative cell by cell.  gap(0, root, j) = J(0, root, j) minus
// the control's expected reward from level j.
Surface optimality_gap_surface(const LatticeModel& model, const VolumeGrid& vgrid,
                               const Surface& J, const Control& control);

// Gap statistics for one control: max/mean over all cells; passes iff the
// worst gap is within `tolerance` (0 residual <=> the control is optimal).
CheckResult optimality_residual(const LatticeModel& model, const VolumeGrid& vgrid,
                                const Surface& J, const Control& control, double tolerance,
                                const std::string& label);

// Three facts about the gap: it vanishes identically for the argmax policy,
// it is nonnegative cell by cell for seeded random controls, and for the
// never-exercise control it reproduces the value itself at the start cell.
std::vector<CheckResult> optimality_gap_checks(const LatticeModel& model, const VolumeGrid& vgrid,
                                               const Surface& J, int start_level, uint64_t seed,
                                               int n_random);

// Shape and consistency facts that hold with zero or near-zero slack:
// terminal zeros, nonnegativity, monotonicity/concavity in the volume level,
// the payoff Lipschitz bound, marginal sign/monotonicity/submartingale,
// value supermartingale in time, agreement with the unconstrained value on
// j >= N-i together with full rate being optimal there, and D/W being
// recomputable from J bit for bit.
std::vector<CheckResult> structural_checks(const LatticeModel& model, const VolumeGrid& vgrid,
                                           const SurfaceBundle& bundle);

struct OracleValue {
    double value = 0.0;
    std::string provenance; // "closed-form" | "brute-force"
    std::string formula;
};

// Closed-form indicator-model values at time t, consumed volume y, full rate
// L.  Deterministic cutoff: min(1-y, L*max(tstar-t, 0)).  Exponential,
// alive: (L/lambda)*(1 - exp(-lambda*min((1-y)/L, T-t))); dead: 0.
OracleValue analytic_indicator_value(const ModelParams& params, double rate_cap, double t,
                                     double y, bool alive);

// Optimal values at step 0 for every start level, found by enumerating all
// 2^k cell controls (k = decision cells with level >= 1 at steps i < N).
// Refuses lattices with k > max_cells.
std::vector<double> brute_force_values(const LatticeModel& model, const VolumeGrid& vgrid,
                                       int max_cells = 24);

// Start-of-horizon, full-capacity (y = 0) brute-force price.
OracleValue brute_force_value(const LatticeModel& model, const VolumeGrid& vgrid,
                              int max_cells = 24);

CheckResult brute_force_check(const LatticeModel& model, const VolumeGrid& vgrid, const Surface& J,
                              double tolerance, int max_cells = 24);

} // namespace swing
