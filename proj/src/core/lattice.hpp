// Finite Markov-chain payoff lattices: a node per observable state at each
// time step, one exercise-rate payoff X >= 0 per node, and transition arcs
// whose probabilities sum to one.
#pragma once

#include <string>
#include <vector>

#include "grids.hpp"

namespace swing {

enum class ModelKind { GbmCall, IndicatorDeterministic, IndicatorExponential, Constant };

const char* to_string(ModelKind kind);

struct ModelParams {
    ModelKind kind = ModelKind::Constant;
    double T = 1.0;
    int N = 1;
    // gbm-call
    double S0 = 0.0;
    double K = 0.0;
    double sigma = 0.0;
    double r = 0.0;
    // indicator-exponential
    double lambda = 0.0;
    // indicator-deterministic
    double tstar = 0.0;
    // constant
    double value = 0.0;
};

struct Arc {
    int to;
    double p;
};

struct LatticeNode {
    double payoff;           // exercise rate payoff X(t_i, state), nonnegative
    double state;            // spot level, alive flag, or constant level
    std::vector<Arc> arcs;   // empty only at the final step
};

struct LatticeModel {
    TimeGrid tgrid;
    ModelKind kind;
    std::string id;                               // short human-readable summary
    std::vector<std::vector<LatticeNode>> steps;  // steps[i], i = 0..N

    int nodes(int i) const { return static_cast<int>(steps[i].size()); }
    std::string state_label(int i, int n) const;
};

// Recombining binomial tree for geometric Brownian motion with strike payoff
// X = exp(-r t) * (S - K)_+.  Up factor exp(sigma*sqrt(dt)); the one-period
// risk-neutral up-probability must land strictly inside (0, 1).
LatticeModel build_gbm_lattice(const ModelParams& params);

// Two-state alive/dead indicator chains, X = 1 on alive nodes.  Deterministic
// kill moves to dead at the first step index with t_i >= tstar; exponential
// kill applies a per-step death probability 1 - exp(-lambda*dt), lambda > 0.
LatticeModel build_indicator_lattice(const ModelParams& params);

// Single-node chain with X identically equal to a nonnegative constant.
LatticeModel build_constant_lattice(const ModelParams& params);

LatticeModel build_lattice(const ModelParams& params);

// Structural diagnostics: nonnegative payoffs, per-node transition
// probabilities in [0,1] summing to 1 within 1e-12, arcs targeting existing
// nodes, exactly one step-0 node.  Empty result means the lattice is valid.
std::vector<std::string> validate(const LatticeModel& model);

} // namespace swing
