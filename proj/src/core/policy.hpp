// Bang-bang exercise policies read off the solved surfaces.
#pragma once

#include <string>

#include "solver.hpp"

namespace swing {

enum class PolicyRule { DpArgmax, MarginalRule };

std::string to_string(PolicyRule rule);
PolicyRule policy_rule_from_string(const std::string& s);

// action[i][node*(M+1)+j] = 1 means exercise at the full rate for step i.
struct PolicyTable {
    PolicyRule rule = PolicyRule::DpArgmax;
    double eps_switch = 1e-9;
    std::vector<std::vector<uint8_t>> action;

    uint8_t at(int i, int n, int j, int M) const {
        return action[i][static_cast<size_t>(n) * (M + 1) + j];
    }
};

// dp-argmax replays the DP comparison (ties resolved to exercising);
// marginal-rule exercises iff X(i,n) + D(i,n,j) >= -eps_switch (the dead band
// |X+D| <= eps_switch resolves to the full rate).  Level 0 is forced to 0
// under both rules.  The rules agree wherever |X + D| > eps_switch and the
// stored marginal matches the one-step decision marginal.
PolicyTable extract_policy(const LatticeModel& model, const VolumeGrid& vgrid,
                           const SurfaceBundle& bundle, PolicyRule rule,
                           double eps_switch = 1e-9);

} // namespace swing
