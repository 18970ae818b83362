// Backward-induction value surfaces over (step, node, volume level).
//
// Storage layout: one row of M+1 doubles per node, so surface[i][n*(M+1)+j]
// is the value at step i, node n, level j (y_j = 1 - j*dy).
#pragma once

#include <iosfwd>
#include <vector>

#include "grids.hpp"
#include "lattice.hpp"

namespace swing {

using Surface = std::vector<std::vector<double>>;     // [step][node*(M+1)+j]
using NodeField = std::vector<std::vector<double>>;   // [step][node]

// Optimal exercise value under the one-step-per-cell volume budget:
//   J(N,.,.) = 0,  J(i,n,0) = 0,
//   J(i,n,j) = max( E_i J(i+1,.,j),  L*dt*X(i,n) + E_i J(i+1,.,j-1) ),
// ties resolved toward exercising.  Requires dy == L*dt.
Surface solve_dp(const LatticeModel& model, const VolumeGrid& vgrid);

// One-sided volume slope D(i,n,j) = (J(i,n,j-1) - J(i,n,j)) / dy; the j=0
// entry reuses the (y_1, y_0) slope.  On levels at or below the exhaustion
// diagonal (j >= N-i) the value no longer depends on y and the slope is
// pinned to exactly 0.
Surface marginal_left(const Surface& J, const LatticeModel& model, const VolumeGrid& vgrid);

// Value of exercising at the full rate forever, ignoring the volume budget:
// W(i,n) = L*dt*X(i,n) + E_i W(i+1,.).  Coincides with J on j >= N-i.
NodeField unconstrained_values(const LatticeModel& model, const VolumeGrid& vgrid);

// Conditional expectation of the running payoff maximum,
// Z(i,n) = E_i max(X(i,n), Z(i+1,.)), Z(N,n) = X(N,n).  Dominates the value
// surface's volume increments: J(i,n,j+1) - J(i,n,j) <= dy * Z(i,n).
NodeField forward_payoff_bound(const LatticeModel& model);

struct SurfaceBundle {
    TimeGrid tgrid;
    VolumeGrid vgrid;
    std::string model_id;
    Surface J;
    Surface D;
    NodeField W;
    NodeField Z;

    double j_at(int i, int n, int j) const { return J[i][n * (vgrid.M + 1) + j]; }
    double d_at(int i, int n, int j) const { return D[i][n * (vgrid.M + 1) + j]; }
};

SurfaceBundle solve_all(const LatticeModel& model, const VolumeGrid& vgrid);

// Level index for a start volume y0; y0 must sit on the grid within 1e-9 of
// a level and inside [y_M, 1].
int level_of(const VolumeGrid& vgrid, double y0);

// CSV surface exchange.  Header: i,t,node,state,j,y,J,D,W; rows ordered by
// step, then node, then level; values printed with 17 significant digits.
void export_csv(const SurfaceBundle& bundle, const LatticeModel& model, std::ostream& out);
SurfaceBundle import_csv(const LatticeModel& model, const VolumeGrid& vgrid, std::istream& in);

// Bilinear off-grid query at (t, y) conditioned on a step-floor(t/dt) node:
// linear in y between bracketing levels (volume-independent W below y_M),
// linear in t between the node value and its one-step conditional
// expectation.  Approximation only; every check in the verifier is on-grid.
double interp_value(const SurfaceBundle& bundle, const LatticeModel& model, double t, int node, double y);

} // namespace swing
