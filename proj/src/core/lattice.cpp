#include "lattice.hpp"

#include <cmath>
#include <cstdio>

namespace swing {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::GbmCall: return "gbm-call";
        case ModelKind::IndicatorDeterministic: return "indicator-deterministic";
        case ModelKind::IndicatorExponential: return "indicator-exponential";
        case ModelKind::Constant: return "constant";
    }
    return "?";
}

std::string LatticeModel::state_label(int i, int n) const {
    const LatticeNode& node = steps[i][n];
    if (kind == ModelKind::IndicatorDeterministic || kind == ModelKind::IndicatorExponential)
        return node.state > 0.5 ? "alive" : "dead";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", node.state);
    return buf;
}

LatticeModel build_gbm_lattice(const ModelParams& params) {
    if (!(params.S0 > 0.0)) throw std::invalid_argument("gbm-call: S0 must be positive");
    if (!(params.K >= 0.0)) throw std::invalid_argument("gbm-call: K must be nonnegative");
    if (!(params.sigma > 0.0)) throw std::invalid_argument("gbm-call: sigma must be positive");
    if (!std::isfinite(params.r)) throw std::invalid_argument("gbm-call: r must be finite");

    TimeGrid tg(params.T, params.N);
    const double up = std::exp(params.sigma * std::sqrt(tg.dt));
    const double down = 1.0 / up;
    const double p = (std::exp(params.r * tg.dt) - down) / (up - down);
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("gbm-call: risk-neutral up-probability outside (0,1); refine the grid");

    LatticeModel m{tg, ModelKind::GbmCall, {}, {}};
    char id[160];
    std::snprintf(id, sizeof id, "gbm-call S0=%g K=%g sigma=%g r=%g T=%g N=%d",
                  params.S0, params.K, params.sigma, params.r, params.T, params.N);
    m.id = id;

    m.steps.resize(tg.N + 1);
    for (int i = 0; i <= tg.N; ++i) {
        m.steps[i].resize(i + 1);
        const double disc = std::exp(-params.r * tg.t(i));
        for (int k = 0; k <= i; ++k) {
            // k up-moves out of i: S = S0 * up^k * down^(i-k) = S0 * up^(2k-i)
            const double spot = params.S0 * std::exp(params.sigma * std::sqrt(tg.dt) * (2 * k - i));
            LatticeNode& node = m.steps[i][k];
            node.state = spot;
            node.payoff = disc * std::max(spot - params.K, 0.0);
            if (i < tg.N) node.arcs = {{k, 1.0 - p}, {k + 1, p}};
        }
    }
    return m;
}

LatticeModel build_indicator_lattice(const ModelParams& params) {
    TimeGrid tg(params.T, params.N);
    LatticeModel m{tg, params.kind, {}, {}};
    char id[160];

    auto alive_node = [](bool last) {
        LatticeNode n;
        n.payoff = 1.0;
        n.state = 1.0;
        (void)last;
        return n;
    };
    auto dead_node = []() {
        LatticeNode n;
        n.payoff = 0.0;
        n.state = 0.0;
        return n;
    };

    if (params.kind == ModelKind::IndicatorDeterministic) {
        if (!(params.tstar >= 0.0 && params.tstar <= params.T))
            throw std::invalid_argument("indicator-deterministic: tstar must lie in [0, T]");
        // istar = first step index with t_i >= tstar, robust to t_i = tstar
        // landing a hair above or below an integer multiple of dt.
        const double q = params.tstar / tg.dt;
        const double rounded = std::round(q);
        int istar = (std::abs(q - rounded) <= 1e-9 * std::max(1.0, std::abs(q)))
                        ? static_cast<int>(rounded)
                        : static_cast<int>(std::ceil(q));
        if (istar > tg.N) istar = tg.N;

        std::snprintf(id, sizeof id, "indicator-deterministic tstar=%g T=%g N=%d", params.tstar, params.T, params.N);
        m.id = id;
        m.steps.resize(tg.N + 1);
        for (int i = 0; i <= tg.N; ++i) {
            m.steps[i].push_back(i < istar ? alive_node(false) : dead_node());
            if (i > 0) m.steps[i - 1][0].arcs = {{0, 1.0}};
        }
        return m;
    }

    if (params.kind == ModelKind::IndicatorExponential) {
        if (!(params.lambda > 0.0))
            throw std::invalid_argument("indicator-exponential: lambda must be positive");
        const double pdie = 1.0 - std::exp(-params.lambda * tg.dt);

        std::snprintf(id, sizeof id, "indicator-exponential lambda=%g T=%g N=%d", params.lambda, params.T, params.N);
        m.id = id;
        m.steps.resize(tg.N + 1);
        m.steps[0].push_back(alive_node(false));
        for (int i = 1; i <= tg.N; ++i) {
            m.steps[i].push_back(alive_node(false)); // node 0: alive
            m.steps[i].push_back(dead_node());       // node 1: dead (absorbing)
        }
        for (int i = 0; i < tg.N; ++i) {
            m.steps[i][0].arcs = {{0, 1.0 - pdie}, {1, pdie}};
            if (i > 0) m.steps[i][1].arcs = {{1, 1.0}};
        }
        return m;
    }

    throw std::invalid_argument("build_indicator_lattice: kind must be an indicator model");
}

LatticeModel build_constant_lattice(const ModelParams& params) {
    if (!(params.value >= 0.0)) throw std::invalid_argument("constant: value must be nonnegative");
    TimeGrid tg(params.T, params.N);
    LatticeModel m{tg, ModelKind::Constant, {}, {}};
    char id[120];
    std::snprintf(id, sizeof id, "constant value=%g T=%g N=%d", params.value, params.T, params.N);
    m.id = id;
    m.steps.resize(tg.N + 1);
    for (int i = 0; i <= tg.N; ++i) {
        LatticeNode n;
        n.payoff = params.value;
        n.state = params.value;
        if (i < tg.N) n.arcs = {{0, 1.0}};
        m.steps[i].push_back(n);
    }
    return m;
}

LatticeModel build_lattice(const ModelParams& params) {
    switch (params.kind) {
        case ModelKind::GbmCall: return build_gbm_lattice(params);
        case ModelKind::IndicatorDeterministic:
        case ModelKind::IndicatorExponential: return build_indicator_lattice(params);
        case ModelKind::Constant: return build_constant_lattice(params);
    }
    throw std::invalid_argument("build_lattice: unknown model kind");
}

std::vector<std::string> validate(const LatticeModel& model) {
    std::vector<std::string> issues;
    char buf[200];
    const int N = model.tgrid.N;

    if (static_cast<int>(model.steps.size()) != N + 1) {
        issues.push_back("step count does not match the time grid");
        return issues;
    }
    if (model.nodes(0) != 1) issues.push_back("step 0 must have exactly one node");

    for (int i = 0; i <= N; ++i) {
        if (model.nodes(i) == 0) {
            std::snprintf(buf, sizeof buf, "step %d has no nodes", i);
            issues.push_back(buf);
            continue;
        }
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = model.steps[i][n];
            if (!(node.payoff >= 0.0) || !std::isfinite(node.payoff)) {
                std::snprintf(buf, sizeof buf, "negative or non-finite payoff at step %d node %d", i, n);
                issues.push_back(buf);
            }
            if (i == N) {
                if (!node.arcs.empty()) {
                    std::snprintf(buf, sizeof buf, "terminal node %d at step %d has outgoing arcs", n, i);
                    issues.push_back(buf);
                }
                continue;
            }
            if (node.arcs.empty()) {
                std::snprintf(buf, sizeof buf, "node %d at step %d has no outgoing arcs", n, i);
                issues.push_back(buf);
                continue;
            }
            double total = 0.0;
            for (const Arc& a : node.arcs) {
                if (a.to < 0 || a.to >= model.nodes(i + 1)) {
                    std::snprintf(buf, sizeof buf, "arc from step %d node %d targets missing node %d", i, n, a.to);
                    issues.push_back(buf);
                }
                if (!(a.p >= 0.0 && a.p <= 1.0)) {
                    std::snprintf(buf, sizeof buf, "arc probability %.17g out of [0,1] at step %d node %d", a.p, i, n);
                    issues.push_back(buf);
                }
                total += a.p;
            }
            if (std::abs(total - 1.0) > 1e-12) {
                std::snprintf(buf, sizeof buf, "transition probabilities sum to %.17g at step %d node %d", total, i, n);
                issues.push_back(buf);
            }
        }
    }
    return issues;
}

} // namespace swing
