#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "oracle_utils.hpp"
#include "isci/comparators.hpp"
#include "isci/solver.hpp"

using namespace isci;
using testutil::rnd;

namespace {
HypothesisGraph holm2() { return testutil::holm_graph(2, 0.025); }

HypothesisGraph single_graph(double alpha) {
    HypothesisGraph g;
    g.alpha = alpha;
    g.labels = {"H1"};
    g.initial_levels = {alpha};
    g.transitions = {0.0};
    return g;
}

HypothesisGraph fixed_sequence_graph(std::size_t m, double alpha) {
    HypothesisGraph g;
    g.alpha = alpha;
    g.labels.resize(m);
    g.initial_levels.assign(m, 0.0);
    g.initial_levels[0] = alpha;
    g.transitions.assign(m * m, 0.0);
    for (std::size_t j = 0; j + 1 < m; ++j) g.g(j, j + 1) = 1.0;
    for (std::size_t j = 0; j < m; ++j) g.labels[j] = "H" + std::to_string(j + 1);
    return g;
}

const double z0125 = 2.24140272760494538;
} // namespace

TEST_CASE("starting_value examples") {
    const auto g = holm2();
    auto mu = starting_value(g, {{3.0, 1.0}, {1.0, 1.0}});
    CHECK(mu[0] == 0.0); // p^{-1}(0.0125) = 0.7586 > 0
    CHECK(mu[1] == doctest::Approx(1.0 - z0125).epsilon(1e-12));

    const auto fs = fixed_sequence_graph(2, 0.025);
    mu = starting_value(fs, {{1.0, 1.0}, {1.0, 1.0}});
    CHECK(mu[1] == kNegInf); // level-0 node starts at -inf

    mu = starting_value(g, {{-8.0, 1.0}, {-9.0, 1.0}});
    CHECK(mu[0] == doctest::Approx(-8.0 - z0125).epsilon(1e-10));
    CHECK(mu[1] == doctest::Approx(-9.0 - z0125).epsilon(1e-10));
}

TEST_CASE("starting_value satisfies the start condition") {
    std::mt19937_64 eng(10101);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(eng() % 4);
        const auto g = testutil::random_complete_graph(eng, m, 0.025);
        const auto models = testutil::random_models(eng, m, -2.0, 3.0);
        const auto w = InformationWeightSpec::uniform(rnd(eng, 0.1, 1.0));
        const auto mu0 = starting_value(g, models);
        const auto ll = local_levels(g, mu0, w);
        for (std::size_t j = 0; j < m; ++j) {
            const double lhs = shifted_pvalue(models[j], mu0[j]); // W(mu0)=1 on mu<=0
            CHECK(lhs <= ll.nu[j] * g.alpha + 1e-12);
        }
    }
}

TEST_CASE("iterate_step: Holm-2 against the scalar oracle") {
    const auto g = holm2();
    const std::vector<MarginalModel> models{{3.0, 1.0}, {1.0, 1.0}};
    const auto w = InformationWeightSpec::uniform(0.5);

    const std::vector<double> mu0{0.0, 1.0 - z0125};
    const auto ll = local_levels(g, mu0, w);
    CHECK(ll.nu[0] == doctest::Approx(0.5));
    CHECK(ll.nu[1] == doctest::Approx(0.5));

    const auto mu1 = iterate_step(g, models, w, mu0);
    for (std::size_t j = 0; j < 2; ++j) {
        const double expect = testutil::scan_root(models[j], 0.5, 1.0, ll.nu[j] * g.alpha);
        CHECK(mu1[j] == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(mu1[0] > 0.0);
    CHECK(mu1[1] == doctest::Approx(1.0 - z0125).epsilon(1e-9));
}

TEST_CASE("iterate_step: zero weight gives -inf, q = 1 gives the closed form") {
    const auto fs = fixed_sequence_graph(2, 0.025);
    const std::vector<MarginalModel> models{{1.0, 1.0}, {2.0, 1.0}};
    // H1 not rejectable at 0: nu_2 stays 0
    const auto mu1 =
        iterate_step(fs, models, InformationWeightSpec::uniform(0.5), {-1.2414, kNegInf});
    CHECK(mu1[1] == kNegInf);

    const auto g = holm2();
    const auto mu =
        iterate_step(g, models, InformationWeightSpec::uniform(1.0), {0.0, 0.0});
    CHECK(mu[0] == doctest::Approx(inverse_pvalue(models[0], 0.0125)).epsilon(1e-10));
    CHECK(mu[1] == doctest::Approx(inverse_pvalue(models[1], 0.0125)).epsilon(1e-10));
}

TEST_CASE("compute_bounds: single hypothesis is the classical bound for any q") {
    const auto g = single_graph(0.025);
    for (double q : {0.001, 0.5, 1.0}) {
        const auto bc = compute_bounds(g, {{3.0, 1.0}}, InformationWeightSpec::uniform(q));
        CHECK(bc.trace.converged);
        CHECK(bc.bounds.lower[0] == doctest::Approx(1.04003601545994576).epsilon(1e-9));
    }
}

TEST_CASE("compute_bounds: q = 1 reproduces weighted Bonferroni") {
    std::mt19937_64 eng(5150);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(eng() % 4);
        const auto g = testutil::random_complete_graph(eng, m, 0.025);
        const auto models = testutil::random_models(eng, m, -1.0, 3.0);
        const auto bc = compute_bounds(g, models, InformationWeightSpec::uniform(1.0));
        const auto bon = bonferroni_bounds(models, g.initial_levels);
        REQUIRE(bc.trace.converged);
        for (std::size_t j = 0; j < m; ++j) {
            if (bon.lower[j] == kNegInf)
                CHECK(bc.bounds.lower[j] == kNegInf);
            else
                CHECK(std::fabs(bc.bounds.lower[j] - bon.lower[j]) < 1e-8);
        }
    }
}

TEST_CASE("compute_bounds: Holm-2 worked instance") {
    // reference fixed point from a 25-digit computation
    const auto g = holm2();
    SolveOptions opt;
    opt.eps = 1e-10;
    opt.root_tol = 1e-12;
    const auto bc =
        compute_bounds(g, {{3.0, 1.0}, {1.0, 1.0}}, InformationWeightSpec::uniform(0.5),
                       ShiftSpec{}, opt);
    REQUIRE(bc.trace.converged);
    CHECK(bc.bounds.lower[0] == doctest::Approx(0.6017541909524353).epsilon(1e-8));
    CHECK(bc.bounds.lower[1] == doctest::Approx(-1.125724640455973).epsilon(1e-8));

    // monotone iterates
    for (std::size_t k = 1; k < bc.trace.iterates.size(); ++k)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(bc.trace.iterates[k][j] >= bc.trace.iterates[k - 1][j]);

    // fixed-point sum identity
    const double sum = shifted_pvalue({3.0, 1.0}, bc.bounds.lower[0]) +
                       shifted_pvalue({1.0, 1.0}, bc.bounds.lower[1]);
    CHECK(sum == doctest::Approx(0.025).epsilon(1e-7));
}

TEST_CASE("compute_bounds: shift spec moves the reporting scale only") {
    const auto g = holm2();
    const std::vector<MarginalModel> models{{0.1, 0.5}, {0.3, 0.5}};
    ShiftSpec shifts;
    shifts.offset = {0.378, 0.378};
    const auto w = InformationWeightSpec::uniform(0.4);

    const auto plain = compute_bounds(g, {{0.1 + 0.378, 0.5}, {0.3 + 0.378, 0.5}}, w);
    const auto shifted = compute_bounds(g, models, w, shifts);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(shifted.bounds.lower[j] ==
              doctest::Approx(plain.bounds.lower[j] - 0.378).epsilon(1e-12));
}

TEST_CASE("compute_bounds: gatekept coordinates leave -inf only when opened") {
    const auto g = testutil::three_dose_graph(0.025);
    const auto w = InformationWeightSpec::uniform(0.5);

    // all efficacy p-values near 1: every safety bound stays -inf
    std::vector<MarginalModel> hopeless(6, MarginalModel{-5.0, 1.0});
    auto bc = compute_bounds(g, hopeless, w);
    REQUIRE(bc.trace.converged);
    for (std::size_t j = 3; j < 6; ++j) CHECK(bc.bounds.lower[j] == kNegInf);
    for (std::size_t j = 0; j < 3; ++j) CHECK(bc.bounds.lower[j] != kNegInf);

    // one strong efficacy estimate opens its safety gate
    std::vector<MarginalModel> mixed(6, MarginalModel{-5.0, 1.0});
    mixed[0] = {4.0, 1.0};
    mixed[3] = {1.0, 1.0};
    bc = compute_bounds(g, mixed, w);
    REQUIRE(bc.trace.converged);
    CHECK(bc.bounds.lower[0] > 0.0);
    CHECK(bc.bounds.lower[3] != kNegInf);
    CHECK(bc.bounds.lower[4] == kNegInf);
    CHECK(bc.bounds.lower[5] == kNegInf);
}

TEST_CASE("compute_bounds: fixed sequence dies after an unrejectable head") {
    const auto g = fixed_sequence_graph(3, 0.025);
    const auto bc = compute_bounds(g, {{-1.0, 1.0}, {5.0, 1.0}, {5.0, 1.0}},
                                   InformationWeightSpec::uniform(0.5));
    REQUIRE(bc.trace.converged);
    CHECK(bc.bounds.lower[0] < 0.0);
    CHECK(bc.bounds.lower[0] != kNegInf);
    CHECK(bc.bounds.lower[1] == kNegInf);
    CHECK(bc.bounds.lower[2] == kNegInf);
}

TEST_CASE("property: start independence") {
    std::mt19937_64 eng(887766);
    SolveOptions opt;
    opt.eps = 1e-9;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(eng() % 4);
        const auto g = testutil::random_complete_graph(eng, m, 0.025, true);
        const auto models = testutil::random_models(eng, m, -1.0, 3.0);
        const auto w = InformationWeightSpec::uniform(rnd(eng, 0.15, 0.95));

        const auto ref = compute_bounds(g, models, w, ShiftSpec{}, opt);
        REQUIRE(ref.trace.converged);

        // alternative start: push below the canonical start until the
        // start condition verifies, then iterate manually
        auto mu = starting_value(g, models);
        for (std::size_t j = 0; j < m; ++j) mu[j] -= rnd(eng, 0.0, 2.0);
        for (int guard = 0; guard < 50; ++guard) {
            const auto ll = local_levels(g, mu, w);
            bool ok = true;
            for (std::size_t j = 0; j < m; ++j)
                if (shifted_pvalue(models[j], mu[j]) > ll.nu[j] * g.alpha) ok = false;
            if (ok) break;
            for (std::size_t j = 0; j < m; ++j) mu[j] -= 1.0;
        }
        for (int it = 0; it < 5000; ++it) {
            const auto next = iterate_step(g, models, w, mu, opt.root_tol);
            double step = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                if (mu[j] != kNegInf && next[j] != kNegInf)
                    step = std::max(step, std::fabs(next[j] - mu[j]));
            mu = next;
            if (step < 1e-10) break;
        }
        for (std::size_t j = 0; j < m; ++j)
            CHECK(std::fabs(mu[j] - ref.bounds.lower[j]) < 1e-7);
    }
}

TEST_CASE("property: informativeness of the bounds") {
    std::mt19937_64 eng(445990);
    SolveOptions opt;
    opt.eps = 1e-10;
    opt.root_tol = 1e-12;
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(eng() % 3);
        const auto g = testutil::random_complete_graph(eng, m, 0.025, true);
        const auto models = testutil::random_models(eng, m, -0.5, 2.5);
        const auto w = InformationWeightSpec::uniform(rnd(eng, 0.2, 0.9));
        const auto base = compute_bounds(g, models, w, ShiftSpec{}, opt);
        REQUIRE(base.trace.converged);

        for (std::size_t i = 0; i < m; ++i) {
            auto bumped = models;
            bumped[i].estimate += 1e-3;
            const auto b = compute_bounds(g, bumped, w, ShiftSpec{}, opt);
            REQUIRE(b.trace.converged);
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i && base.bounds.lower[i] != kNegInf)
                    CHECK(b.bounds.lower[i] > base.bounds.lower[i] + 1e-7);
                else if (base.bounds.lower[j] != kNegInf)
                    CHECK(b.bounds.lower[j] >= base.bounds.lower[j] - 1e-8);
            }
        }
    }
}

TEST_CASE("property: bounds increase with the significance level") {
    std::mt19937_64 eng(99120);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(eng() % 3);
        auto g1 = testutil::random_complete_graph(eng, m, 0.02, true);
        auto g2 = g1;
        g2.alpha = 0.05;
        for (double& l : g2.initial_levels) l *= 0.05 / 0.02;
        const auto models = testutil::random_models(eng, m, -1.0, 2.5);
        const auto w = InformationWeightSpec::uniform(0.5);
        const auto b1 = compute_bounds(g1, models, w);
        const auto b2 = compute_bounds(g2, models, w);
        for (std::size_t j = 0; j < m; ++j)
            CHECK(b2.bounds.lower[j] >= b1.bounds.lower[j] - 1e-9);
    }
}

TEST_CASE("property: componentwise level identity at the fixed point") {
    // p_j(L_j) = alpha_j^L per coordinate, with p(-inf) = 0 on dead gates
    std::mt19937_64 eng(720011);
    SolveOptions opt;
    opt.eps = 1e-11;
    opt.root_tol = 1e-13;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(eng() % 4);
        const auto g = testutil::random_complete_graph(eng, m, 0.025);
        const auto models = testutil::random_models(eng, m, -1.0, 3.0);
        const auto w = InformationWeightSpec::uniform(rnd(eng, 0.15, 1.0));
        const auto bc = compute_bounds(g, models, w, ShiftSpec{}, opt);
        REQUIRE(bc.trace.converged);
        const auto ll = local_levels(g, bc.bounds.lower, w);
        for (std::size_t j = 0; j < m; ++j) {
            const double pj = shifted_pvalue(models[j], bc.bounds.lower[j]);
            CHECK(std::fabs(pj - ll.alpha_mu[j]) < 1e-7);
        }
    }
}

TEST_CASE("adjusted_p examples and fixed-point value") {
    const auto g = holm2();
    const std::vector<MarginalModel> models{{3.0, 1.0}, {1.0, 1.0}};
    const auto w = InformationWeightSpec::uniform(0.5);

    // mu <= 0 everywhere: plain weighted Bonferroni adjustment
    const std::vector<double> mu{-0.3, -0.8};
    const double expect = std::min(shifted_pvalue(models[0], -0.3) / 0.5,
                                   shifted_pvalue(models[1], -0.8) / 0.5);
    CHECK(adjusted_p(g, models, w, mu) == doctest::Approx(expect).epsilon(1e-12));

    // at the fixed point the adjusted p-value equals alpha
    SolveOptions opt;
    opt.eps = 1e-10;
    opt.root_tol = 1e-12;
    const auto bc = compute_bounds(g, models, w, ShiftSpec{}, opt);
    CHECK(std::fabs(adjusted_p(g, models, w, bc.bounds.lower) - 0.025) < 1e-8);

    // a zero p-value with positive weight pins the minimum at zero
    CHECK(adjusted_p(g, {{50.0, 1.0}, {1.0, 1.0}}, w, mu) == 0.0);
}

TEST_CASE("induced_test sign rule") {
    CHECK(induced_test({{0.1, -0.2}}) == std::vector<std::size_t>{0});
    CHECK(induced_test({{kNegInf, kNegInf}}).empty());
    CHECK(induced_test({{0.0, 0.0}}) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("brute force oracle: Holm-2 instance matches the iteration") {
    const auto g = holm2();
    const std::vector<MarginalModel> models{{3.0, 1.0}, {1.0, 1.0}};
    const auto w = InformationWeightSpec::uniform(0.5);

    SolveOptions opt;
    opt.eps = 1e-10;
    const auto bc = compute_bounds(g, models, w, ShiftSpec{}, opt);
    const auto grid = testutil::bracket_box(g, models, 1e-3);
    const auto oracle = brute_force_bounds(g, models, w, grid);

    for (std::size_t j = 0; j < 2; ++j) {
        REQUIRE(oracle.status[j] == BracketStatus::ok);
        CHECK(std::fabs(oracle.bounds.lower[j] - bc.bounds.lower[j]) < 2e-3);
        // the oracle never exceeds the iteration limit by more than a step
        CHECK(oracle.bounds.lower[j] <= bc.bounds.lower[j] + 1e-3 + 1e-9);
    }
}

TEST_CASE("brute force oracle: q = 1 snaps to the Bonferroni bound") {
    const auto g = holm2();
    const std::vector<MarginalModel> models{{2.0, 1.0}, {0.5, 1.0}};
    const auto w = InformationWeightSpec::uniform(1.0);
    const auto grid = testutil::bracket_box(g, models, 1e-3);
    const auto oracle = brute_force_bounds(g, models, w, grid);
    for (std::size_t j = 0; j < 2; ++j) {
        REQUIRE(oracle.status[j] == BracketStatus::ok);
        CHECK(std::fabs(oracle.bounds.lower[j] - inverse_pvalue(models[j], 0.0125)) <
              1.5e-3);
    }
}

TEST_CASE("brute force oracle: error reporting") {
    const auto g = holm2();
    const std::vector<MarginalModel> models{{3.0, 1.0}, {1.0, 1.0}};
    const auto w = InformationWeightSpec::uniform(0.5);

    std::mt19937_64 eng(1);
    CHECK_THROWS_AS(brute_force_bounds(testutil::holm_graph(4, 0.025),
                                       testutil::random_models(eng, 4, 0, 1), w,
                                       GridSpec{{0, 0, 0, 0}, {1, 1, 1, 1}, 0.5}),
                    std::invalid_argument);

    // box far above the bound: every slab has survivors
    GridSpec high;
    high.lo = {2.0, 2.0};
    high.hi = {2.5, 2.5};
    high.step = 1e-2;
    const auto res = brute_force_bounds(g, models, w, high);
    CHECK(res.status[0] == BracketStatus::hit_lower);

    // box far below: no slab has survivors
    GridSpec low;
    low.lo = {-9.0, -9.0};
    low.hi = {-8.0, -8.0};
    low.step = 1e-2;
    const auto res2 = brute_force_bounds(g, models, w, low);
    CHECK(res2.status[0] == BracketStatus::hit_upper);
}
