// Time and volume discretizations shared by the solver, verifier and simulator.
#pragma once

#include <stdexcept>

namespace swing {

// Uniform partition of [0, T] into N steps, t_i = i * dt.
struct TimeGrid {
    double T;
    int N;
    double dt;

    TimeGrid(double horizon, int steps) : T(horizon), N(steps) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
        if (N < 1) throw std::invalid_argument("TimeGrid: N must be at least 1");
        dt = T / N;
    }

    double t(int i) const { return i * dt; }
};

// Consumed-volume levels y_j = 1 - j*dy, j = 0..M, with dy = L*dt so that one
// full-rate step moves the state down exactly one level.  j counts remaining
// volume cells: j = 0 means the budget is exhausted (y = 1).  The grid must
// reach the t=0 exhaustion diagonal, i.e. M >= N; the default M = N+1 keeps
// one level below it.
struct VolumeGrid {
    double L;
    double dy;
    int M;

    VolumeGrid(double rate_cap, const TimeGrid& tg, int levels = -1)
        : L(rate_cap), dy(rate_cap * tg.dt), M(levels < 0 ? tg.N + 1 : levels) {
        if (!(L > 0.0)) throw std::invalid_argument("VolumeGrid: L must be positive");
        if (M < tg.N)
            throw std::invalid_argument("VolumeGrid: M must be at least N so the grid spans the constrained region");
    }

    double y(int j) const { return 1.0 - j * dy; }
};

} // namespace swing
