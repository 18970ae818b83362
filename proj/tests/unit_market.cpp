// Lattice builders, time/volume grids, and the counter-based generator.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "core/grids.hpp"
#include "core/lattice.hpp"
#include "core/rng.hpp"

using namespace swing;

namespace {

ModelParams gbm_params(double S0, double K, double sigma, double r, double T, int N) {
    ModelParams p;
    p.kind = ModelKind::GbmCall;
    p.S0 = S0;
    p.K = K;
    p.sigma = sigma;
    p.r = r;
    p.T = T;
    p.N = N;
    return p;
}

bool contains(const std::vector<std::string>& issues, const std::string& needle) {
    for (const std::string& s : issues)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("counter generator reproduces the published reference blocks") {
    const auto zeros = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(zeros[0] == 0x6627e8d5u);
    CHECK(zeros[1] == 0xe169c58du);
    CHECK(zeros[2] == 0xbc57ac4cu);
    CHECK(zeros[3] == 0x9b00dbd8u);

    const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("draw streams are pure functions of (seed, path, index)") {
    CHECK(draw_u64(1, 2, 3) == draw_u64(1, 2, 3));
    CHECK(draw_u64(1, 2, 3) != draw_u64(1, 2, 4));
    CHECK(draw_u64(1, 2, 3) != draw_u64(1, 3, 3));
    CHECK(draw_u64(2, 2, 3) != draw_u64(1, 2, 3));

    int out_of_range = 0;
    double sum = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        const double u = draw_unit(42, 7, static_cast<uint64_t>(k));
        if (!(u >= 0.0 && u < 1.0)) ++out_of_range;
        sum += u;
    }
    CHECK(out_of_range == 0);
    CHECK(std::abs(sum / n - 0.5) < 0.01); // 5 standard errors of the mean
}

TEST_CASE("time grid is uniform and validated") {
    TimeGrid tg(1.0, 4);
    CHECK(tg.dt == 0.25);
    CHECK(tg.t(3) == 0.75);
    CHECK(tg.t(4) == 1.0);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(-1.0, 4), std::invalid_argument);
}

TEST_CASE("volume grid ties the level size to one full-rate step") {
    TimeGrid tg(1.0, 4);
    VolumeGrid vg(2.0, tg);
    CHECK(vg.dy == 2.0 * tg.dt);
    CHECK(vg.M == 5); // default keeps one level below the t=0 exhaustion diagonal
    CHECK(vg.y(0) == 1.0);
    CHECK(vg.y(2) == 1.0 - 2.0 * vg.dy);
    CHECK(VolumeGrid(2.0, tg, 4).M == 4);
    CHECK_THROWS_AS(VolumeGrid(2.0, tg, 3), std::invalid_argument);
    CHECK_THROWS_AS(VolumeGrid(0.0, tg), std::invalid_argument);
}

TEST_CASE("binomial tree: recombination, probabilities, discounted payoffs") {
    // S0 = K = 100, sigma = 0.2, r = 0, T = 1, two steps.
    const LatticeModel m = build_gbm_lattice(gbm_params(100, 100, 0.2, 0.0, 1.0, 2));
    REQUIRE(m.steps.size() == 3);
    CHECK(m.nodes(0) == 1);
    CHECK(m.nodes(1) == 2);
    CHECK(m.nodes(2) == 3);

    CHECK(m.steps[1][1].state == doctest::Approx(115.19099102).epsilon(1e-10));
    CHECK(m.steps[1][1].payoff == doctest::Approx(15.1909910169).epsilon(1e-10));
    CHECK(m.steps[1][0].payoff == 0.0); // down node is out of the money

    REQUIRE(m.steps[0][0].arcs.size() == 2);
    const Arc down = m.steps[0][0].arcs[0];
    const Arc up = m.steps[0][0].arcs[1];
    CHECK(up.to == 1);
    CHECK(down.to == 0);
    CHECK(up.p == doctest::Approx(0.4647034689).epsilon(1e-9));
    CHECK(up.p + down.p == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(validate(m).empty());
}

TEST_CASE("binomial tree: interest discounts the payoff, not the tree") {
    const LatticeModel m = build_gbm_lattice(gbm_params(100, 100, 0.2, 0.05, 1.0, 2));
    const double spot = m.steps[1][1].state;
    CHECK(spot == doctest::Approx(115.19099102).epsilon(1e-10)); // CRR moves ignore drift
    CHECK(m.steps[1][1].payoff ==
          doctest::Approx(std::exp(-0.05 * 0.5) * (spot - 100.0)).epsilon(1e-14));
    // Larger drift raises the up probability.
    const double p0 = build_gbm_lattice(gbm_params(100, 100, 0.2, 0.0, 1.0, 2)).steps[0][0].arcs[1].p;
    const double p5 = m.steps[0][0].arcs[1].p;
    CHECK(p5 > p0);
}

TEST_CASE("binomial tree rejects drifts the step cannot carry") {
    // exp(r dt) above the up factor pushes the up probability past 1.
    CHECK_THROWS_WITH_AS(build_gbm_lattice(gbm_params(100, 100, 0.05, 1.0, 1.0, 2)),
                         doctest::Contains("up-probability"), std::invalid_argument);
    CHECK_THROWS_AS(build_gbm_lattice(gbm_params(-1, 100, 0.2, 0.0, 1.0, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_gbm_lattice(gbm_params(100, 100, 0.0, 0.0, 1.0, 2)),
                    std::invalid_argument);
}

TEST_CASE("deterministic cutoff chain dies at the first grid time past the cutoff") {
    ModelParams p;
    p.kind = ModelKind::IndicatorDeterministic;
    p.T = 1.0;
    p.N = 4;

    p.tstar = 0.5; // aligned: t_2 = 0.5 is the first dead step
    LatticeModel m = build_indicator_lattice(p);
    for (int i = 0; i <= 4; ++i) {
        REQUIRE(m.nodes(i) == 1);
        CHECK(m.steps[i][0].payoff == (i < 2 ? 1.0 : 0.0));
        CHECK(m.state_label(i, 0) == (i < 2 ? "alive" : "dead"));
    }
    CHECK(validate(m).empty());

    p.tstar = 0.6; // off the grid: ceil to t_3 = 0.75
    m = build_indicator_lattice(p);
    for (int i = 0; i <= 4; ++i) CHECK(m.steps[i][0].payoff == (i < 3 ? 1.0 : 0.0));

    p.tstar = 0.0; // dead from the start
    m = build_indicator_lattice(p);
    for (int i = 0; i <= 4; ++i) CHECK(m.steps[i][0].payoff == 0.0);

    p.tstar = 1.0; // alive through every decision step
    m = build_indicator_lattice(p);
    for (int i = 0; i <= 4; ++i) CHECK(m.steps[i][0].payoff == (i < 4 ? 1.0 : 0.0));

    p.tstar = 1.5;
    CHECK_THROWS_WITH_AS(build_indicator_lattice(p), doctest::Contains("tstar"),
                         std::invalid_argument);
    p.tstar = -0.1;
    CHECK_THROWS_AS(build_indicator_lattice(p), std::invalid_argument);
}

TEST_CASE("exponential kill chain: survival matches the continuous law on the grid") {
    ModelParams p;
    p.kind = ModelKind::IndicatorExponential;
    p.T = 1.0;
    p.N = 10;
    p.lambda = 1.0;
    const LatticeModel m = build_indicator_lattice(p);

    CHECK(m.nodes(0) == 1);
    for (int i = 1; i <= 10; ++i) CHECK(m.nodes(i) == 2);
    CHECK(m.state_label(3, 0) == "alive");
    CHECK(m.state_label(3, 1) == "dead");

    // One-step death probability and its complement are both exact.
    const double dt = m.tgrid.dt;
    CHECK(m.steps[0][0].arcs[1].p == doctest::Approx(0.09516258196404048).epsilon(1e-15));
    CHECK(m.steps[0][0].arcs[0].p == std::exp(-1.0 * dt));
    CHECK(m.steps[0][0].arcs[1].p == 1.0 - std::exp(-1.0 * dt));

    // Multi-step survival compounds to the continuous-time law.
    double survive = 1.0;
    for (int i = 0; i < 10; ++i) survive *= m.steps[i][0].arcs[0].p;
    CHECK(survive == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    // Dead is absorbing and worthless.
    CHECK(m.steps[5][1].payoff == 0.0);
    REQUIRE(m.steps[5][1].arcs.size() == 1);
    CHECK(m.steps[5][1].arcs[0].to == 1);
    CHECK(m.steps[5][1].arcs[0].p == 1.0);

    CHECK(validate(m).empty());

    p.lambda = -1.0;
    CHECK_THROWS_WITH_AS(build_indicator_lattice(p), doctest::Contains("lambda"),
                         std::invalid_argument);
}

TEST_CASE("constant chain and the model dispatcher") {
    ModelParams p;
    p.kind = ModelKind::Constant;
    p.T = 1.0;
    p.N = 3;
    p.value = 2.5;
    const LatticeModel m = build_lattice(p);
    for (int i = 0; i <= 3; ++i) {
        REQUIRE(m.nodes(i) == 1);
        CHECK(m.steps[i][0].payoff == 2.5);
    }
    CHECK(validate(m).empty());

    p.value = -1.0;
    CHECK_THROWS_AS(build_lattice(p), std::invalid_argument);
}

TEST_CASE("validation reports broken probability mass and negative payoffs") {
    ModelParams p;
    p.kind = ModelKind::Constant;
    p.T = 1.0;
    p.N = 2;
    p.value = 1.0;

    LatticeModel bad_mass = build_lattice(p);
    bad_mass.steps[0][0].arcs[0].p = 0.5;
    CHECK(contains(validate(bad_mass), "probabilities sum"));

    LatticeModel bad_payoff = build_lattice(p);
    bad_payoff.steps[1][0].payoff = -0.25;
    CHECK(contains(validate(bad_payoff), "payoff"));

    LatticeModel bad_target = build_lattice(p);
    bad_target.steps[0][0].arcs[0].to = 7;
    CHECK(contains(validate(bad_target), "missing node"));

    LatticeModel bad_terminal = build_lattice(p);
    bad_terminal.steps[2][0].arcs = {{0, 1.0}};
    CHECK(contains(validate(bad_terminal), "terminal"));
}

TEST_CASE("model identifiers and kind names round-trip") {
    CHECK(std::string(to_string(ModelKind::GbmCall)) == "gbm-call");
    CHECK(std::string(to_string(ModelKind::IndicatorDeterministic)) == "indicator-deterministic");
    CHECK(std::string(to_string(ModelKind::IndicatorExponential)) == "indicator-exponential");
    CHECK(std::string(to_string(ModelKind::Constant)) == "constant");

    const LatticeModel m = build_gbm_lattice(gbm_params(100, 90, 0.3, 0.01, 0.5, 2));
    CHECK(m.id.find("gbm-call") != std::string::npos);
    CHECK(m.id.find("K=90") != std::string::npos);
}
