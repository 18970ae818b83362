#include "policy.hpp"

#include <stdexcept>

namespace swing {

std::string to_string(PolicyRule rule) {
    return rule == PolicyRule::DpArgmax ? "dp-argmax" : "marginal-rule";
}

PolicyRule policy_rule_from_string(const std::string& s) {
    if (s == "dp-argmax") return PolicyRule::DpArgmax;
    if (s == "marginal-rule") return PolicyRule::MarginalRule;
    throw std::invalid_argument("unknown policy rule: " + s);
}

PolicyTable extract_policy(const LatticeModel& model, const VolumeGrid& vgrid,
                           const SurfaceBundle& bundle, PolicyRule rule, double eps_switch) {
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;
    const double gain_scale = vgrid.L * model.tgrid.dt;

    PolicyTable table;
    table.rule = rule;
    table.eps_switch = eps_switch;
    table.action.resize(N + 1);
    for (int i = 0; i <= N; ++i)
        table.action[i].assign(static_cast<size_t>(model.nodes(i)) * W, 0);

    std::vector<double> cont(W);
    for (int i = 0; i < N; ++i) {
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = model.steps[i][n];
            uint8_t* row = &table.action[i][static_cast<size_t>(n) * W];
            if (rule == PolicyRule::DpArgmax) {
                for (int j = 0; j < W; ++j) {
                    double c = 0.0;
                    for (const Arc& a : node.arcs)
                        c += a.p * bundle.J[i + 1][static_cast<size_t>(a.to) * W + j];
                    cont[j] = c;
                }
                const double gain = gain_scale * node.payoff;
                for (int j = 1; j < W; ++j)
                    row[j] = (gain + cont[j - 1] >= cont[j]) ? 1 : 0;
            } else {
                for (int j = 1; j < W; ++j)
                    row[j] = (node.payoff + bundle.d_at(i, n, j) >= -eps_switch) ? 1 : 0;
            }
        }
    }
    return table;
}

} // namespace swing
