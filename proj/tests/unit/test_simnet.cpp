#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "asymnet/fixtures.hpp"
#include "asymnet/inference.hpp"
#include "asymnet/simnet.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"
#include "support/seed.hpp"

using namespace asymnet;
using namespace asymnet::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ContractViolation;
}

std::vector<double> over_domain(const Factor& f, const HypothesisSpace& space) {
    std::vector<double> out;
    for (std::size_t k = 0; k < space.size(); ++k) out.push_back(f.at(space.as_assignment(space.point_at(k))));
    return out;
}

double gap(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

Variable three_way() { return {"h", "h", {"a", "b", "c"}}; }

// h-only local networks over a triangle cover of three points.
SimilarityNetwork triangle_priors(double ab, double bc, double ac) {
    const HypothesisSpace space{{three_way()}};
    Cover cover{space, {{{0}, {1}}, {{1}, {2}}, {{0}, {2}}}};
    const std::vector<std::vector<double>> rows{{ab, 1.0 - ab, 0.0}, {0.0, bc, 1.0 - bc}, {ac, 0.0, 1.0 - ac}};
    std::vector<OrdinaryLocalNetwork> locals;
    for (std::size_t i = 0; i < 3; ++i) {
        DiscreteNetwork net = DiscreteNetwork::from_cpts({three_way()}, {{"h", {}, {rows[i]}}});
        locals.push_back({i, net.ids(), net, {}});
    }
    return make_simnet(std::move(cover), std::move(locals));
}

// h -> x, h -> y where x does not vary over {a, b}, and y does.
DiscreteNetwork triangle_source(Rng& rng) {
    const auto shared = random_distribution(rng, 2);
    return DiscreteNetwork::from_cpts(
        {three_way(), {"x", "x", {"0", "1"}}, {"y", "y", {"0", "1"}}},
        {
            {"h", {}, {random_distribution(rng, 3)}},
            {"x", {"h"}, {shared, shared, random_distribution(rng, 2)}},
            {"y", {"h"}, {random_distribution(rng, 2), random_distribution(rng, 2), random_distribution(rng, 2)}},
        });
}

bool depicts(const SimilarityNetwork& s, std::size_t edge, const VarId& var) {
    const auto& d = s.locals[edge].depicted;
    return std::find(d.begin(), d.end(), var) != d.end();
}

bool contains(const std::vector<HypothesisPoint>& edge, const HypothesisPoint& p) {
    return std::find(edge.begin(), edge.end(), p) != edge.end();
}

bool share_point(const std::vector<HypothesisPoint>& a, const std::vector<HypothesisPoint>& b) {
    return std::any_of(a.begin(), a.end(), [&](const HypothesisPoint& p) { return contains(b, p); });
}

// Every simple edge path from an edge holding p whose last edge alone depicts var.
void simple_paths(const SimilarityNetwork& s, const VarId& var, std::vector<std::size_t>& path,
                  std::vector<std::vector<std::size_t>>& out) {
    if (depicts(s, path.back(), var)) {
        out.push_back(path);
        return;
    }
    for (std::size_t next = 0; next < s.cover.edges.size(); ++next) {
        if (std::find(path.begin(), path.end(), next) != path.end()) continue;
        if (!share_point(s.cover.edges[path.back()], s.cover.edges[next])) continue;
        path.push_back(next);
        simple_paths(s, var, path, out);
        path.pop_back();
    }
}

}  // namespace

TEST_CASE("connected covers") {
    const HypothesisSpace four = fixtures::limousine_simnet().cover.hypothesis;
    CHECK(is_connected_cover(fixtures::limousine_simnet().cover));
    CHECK_FALSE(is_connected_cover({four, {{{0}, {1}}, {{2}, {3}}}}));
    CHECK(is_connected_cover({four, {{{0}, {1}, {2}, {3}}}}));
    CHECK_FALSE(is_connected_cover({four, {{{0}, {1}, {2}}}}));
    CHECK(is_connected_cover(fixtures::pair_simnet().cover));
}

TEST_CASE("simnet validation") {
    const SimilarityNetwork s = fixtures::limousine_simnet();
    CHECK(validate_simnet(s).ok());
    CHECK(validate_simnet(fixtures::pair_simnet()).ok());

    SimilarityNetwork bridgeless = make_simnet({s.cover.hypothesis, {s.cover.edges[0], s.cover.edges[2]}},
                                               {s.locals[0], s.locals[2]});
    bridgeless.locals[1].edge = 1;
    CHECK(validate_simnet(bridgeless).has(ViolationKind::DisconnectedCover));

    SimilarityNetwork leaky = s;
    std::vector<Cpt> cpts = leaky.locals[0].network.cpts();
    for (Cpt& cpt : cpts) {
        if (cpt.child == "h") cpt.rows = {{0.25, 0.5, 0.25, 0.0}};
    }
    leaky.locals[0].network = DiscreteNetwork::from_cpts(leaky.locals[0].network.variables(), cpts);
    CHECK(validate_simnet(leaky).has(ViolationKind::SupportLeakage));
    CHECK(code_of([&] { require_valid(leaky); }) == ErrorCode::ValidationFailed);
}

TEST_CASE("relevance pruning") {
    const DiscreteNetwork source = union_network(fixtures::limousine_multinet()).network;
    const HypothesisSpace& space = fixtures::limousine_multinet().hypothesis;

    const std::vector<HypothesisPoint> staff{{2}, {3}};
    const OrdinaryLocalNetwork kept = relevance_prune(comprehensive_local_network(source, space, staff), space, staff);
    CHECK(std::count(kept.depicted.begin(), kept.depicted.end(), "l") == 1);
    CHECK(kept.network.arcs().contains({"h", "l"}));
    CHECK_FALSE(kept.network.arcs().contains({"h", "g"}));

    const std::vector<HypothesisPoint> guests{{0}, {1}};
    const OrdinaryLocalNetwork pruned =
        relevance_prune(comprehensive_local_network(source, space, guests), space, guests);
    CHECK(std::count(pruned.depicted.begin(), pruned.depicted.end(), "l") == 0);
    CHECK(pruned.network.arcs().contains({"h", "g"}));

    const OrdinaryLocalNetwork forced =
        relevance_prune(comprehensive_local_network(source, space, guests), space, guests, {"l"});
    CHECK(forced.retained == std::set<VarId>{"l"});

    const std::vector<HypothesisPoint> everyone = space.domain();
    const OrdinaryLocalNetwork whole =
        relevance_prune(comprehensive_local_network(source, space, everyone), space, everyone);
    CHECK(whole.depicted == source.ids());
    CHECK(whole.network.arcs() == source.arcs());
}

TEST_CASE("prior recovery") {
    const SimilarityNetwork s = fixtures::limousine_simnet();
    CHECK(gap(over_domain(recover_priors(s), s.cover.hypothesis),
              hypothesis_priors(fixtures::limousine_multinet())) <= 1e-12);

    const SimilarityNetwork consistent = triangle_priors(0.5, 0.5, 0.5);
    CHECK(gap(over_domain(recover_priors(consistent), consistent.cover.hypothesis),
              {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}) <= 1e-12);
    CHECK(code_of([] { recover_priors(triangle_priors(0.5, 0.5, 0.8)); }) == ErrorCode::InconsistentSimnet);
    CHECK(code_of([] { recover_priors(fixtures::chain_cover_simnet(0.5, 1.0, 0.5)); }) == ErrorCode::ZeroPrior);
}

TEST_CASE("property: recovered priors satisfy every edge equation") {
    Rng rng(seed() + 30);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = random_distribution(rng, 2)[0], b = random_distribution(rng, 2)[0],
                     c = random_distribution(rng, 2)[0];
        const SimilarityNetwork s = fixtures::chain_cover_simnet(a, b, c);
        const auto p = over_domain(recover_priors(s), s.cover.hypothesis);
        CHECK(std::abs(p[0] * (1.0 - a) - p[1] * a) <= 1e-12);
        CHECK(std::abs(p[1] * (1.0 - b) - p[2] * b) <= 1e-12);
        CHECK(std::abs(p[2] * (1.0 - c) - p[3] * c) <= 1e-12);
        CHECK(std::abs(p[0] + p[1] + p[2] + p[3] - 1.0) <= 1e-12);
    }
}

TEST_CASE("conditional factors") {
    const SimilarityNetwork s = fixtures::limousine_simnet();
    const ConditionalFactor l = conditional_factor(s, "l", {}, {1});
    CHECK(l.edge == 2);
    CHECK(l.evaluated_at == HypothesisPoint{2});
    CHECK(l.path == std::vector<std::size_t>{1, 2});

    // g is depicted where the walk starts, so nothing is handed off
    const ConditionalFactor g = conditional_factor(s, "g", {}, {0});
    CHECK(g.edge == 0);
    CHECK(g.distribution.at({{"g", 0}}) == doctest::Approx(0.8));

    const ConditionalFactor b = conditional_factor(s, "b", {{"g", 1}}, {2});
    CHECK(b.distribution.at({{"b", 0}}) == doctest::Approx(0.9));

    CHECK(code_of([&] { conditional_factor(s, "h", {}, {0}); }) == ErrorCode::ContractViolation);
}

TEST_CASE("property: conditional factors do not depend on the path") {
    Rng rng(seed() + 31);
    for (int trial = 0; trial < 50; ++trial) {
        const DiscreteNetwork source = triangle_source(rng);
        const Multinet m = single_block_multinet(source, {"h"});
        const SimilarityNetwork s = simnet_from_multinet(m, {{{0}, {1}}, {{1}, {2}}, {{0}, {2}}});
        REQUIRE(validate_simnet(s).ok());
        REQUIRE_FALSE(depicts(s, 0, "x"));
        const DenseJoint truth = brute_joint(source);
        for (std::size_t y = 0; y < 2; ++y) {
            const Assignment given{{"y", y}};
            const auto expected = brute_posterior(truth, {"x"}, {{"h", 0}, {"y", y}});
            std::vector<std::vector<std::size_t>> paths;
            for (std::size_t start = 0; start < 3; ++start) {
                if (!contains(s.cover.edges[start], {0})) continue;
                std::vector<std::size_t> path{start};
                simple_paths(s, "x", path, paths);
            }
            CHECK(paths.size() >= 2);
            for (const auto& path : paths) {
                const ConditionalFactor cf = conditional_factor_along(s, "x", given, {0}, path);
                CHECK(gap({cf.distribution.at({{"x", 0}}), cf.distribution.at({{"x", 1}})}, expected) <= 1e-9);
            }
        }
    }
}

TEST_CASE("joint reconstruction") {
    const SimilarityNetwork s = fixtures::limousine_simnet();
    CHECK(max_difference(brute_mixture(fixtures::limousine_multinet()), reconstruct_joint(s)) <= 1e-12);

    const DiscreteNetwork building = fixtures::building_network();
    const SimilarityNetwork single = as_simnet(single_block_multinet(building, {"h"}));
    CHECK(max_difference(brute_joint(building), reconstruct_joint(single)) <= 1e-12);

    const JointTable flat = reconstruct_joint(fixtures::chain_cover_simnet(0.5, 0.5, 0.5));
    for (double v : flat.probabilities) CHECK(v == 0.25);

    CHECK(code_of([&] { reconstruct_joint(s, 4); }) == ErrorCode::Resource);
}

TEST_CASE("simnet posterior agrees with the multinet") {
    const SimilarityNetwork s = fixtures::limousine_simnet();
    const Multinet m = fixtures::limousine_multinet();
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t l = 0; l < 2; ++l) {
            const Assignment e{{"g", g}, {"l", l}};
            CHECK(gap(over_domain(simnet_posterior(s, e), m.hypothesis),
                      over_domain(posterior(m, e).distribution, m.hypothesis)) <= 1e-9);
        }
    }
}

TEST_CASE("conversion to a multinet") {
    const Multinet converted = convert_to_multinet(fixtures::limousine_simnet());
    const Multinet expected = fixtures::limousine_multinet();
    CHECK(converted.blocks == expected.blocks);
    CHECK(validate_multinet(converted).ok());
    for (std::size_t i = 0; i < expected.locals.size(); ++i) {
        CHECK(converted.locals[i].arcs() == expected.locals[i].arcs());
    }

    // a one-block partition is the only partition that is also connected
    const DiscreteNetwork building = fixtures::building_network();
    const Multinet single = single_block_multinet(building, {"h"});
    const Multinet round = convert_to_multinet(as_simnet(single));
    CHECK(round.blocks == single.blocks);
    CHECK(round.locals[0].arcs() == building.arcs());
    CHECK(max_difference(brute_joint(building), brute_mixture(round)) <= 1e-12);

    CHECK_FALSE(validate_simnet(as_simnet(fixtures::building_multinet())).ok());
    CHECK(validate_simnet(as_simnet(fixtures::building_multinet()), false).ok());
}

TEST_CASE("property: conversion preserves the joint") {
    Rng rng(seed() + 32);
    for (int trial = 0; trial < 100; ++trial) {
        const Multinet m = planted_family(rng).multinet;
        const SimilarityNetwork s = simnet_from_multinet(m, {{{0}, {1}}, {{1}, {2}}});
        REQUIRE(validate_simnet(s).ok());
        const Multinet converted = convert_to_multinet(s);
        CHECK(validate_multinet(converted).ok());
        CHECK(max_difference(brute_mixture(m), brute_mixture(converted)) <= 1e-9);
        CHECK(max_difference(brute_mixture(m), reconstruct_joint(s)) <= 1e-9);
    }
}

TEST_CASE("redundant parameters") {
    const SimilarityNetwork s = fixtures::limousine_simnet();
    const auto report = redundancy_report(s);
    REQUIRE(report.size() == 1);
    CHECK(report[0].label == "P(g | visitor)");
    CHECK(report[0].edges == std::vector<std::size_t>{0, 1});
    CHECK_FALSE(report[0].incoherent);

    CHECK(redundancy_report(as_simnet(fixtures::building_multinet())).empty());

    SimilarityNetwork off = s;
    std::vector<Cpt> cpts = off.locals[1].network.cpts();
    for (Cpt& cpt : cpts) {
        if (cpt.child == "g") cpt.rows[1] = {0.6, 0.4};
    }
    off.locals[1].network = DiscreteNetwork::from_cpts(off.locals[1].network.variables(), cpts);
    const auto flagged = redundancy_report(off);
    REQUIRE(flagged.size() == 1);
    CHECK(flagged[0].incoherent);
    CHECK(flagged[0].discrepancy == doctest::Approx(0.1));
}

TEST_CASE("two-person cover") {
    const SimilarityNetwork s = fixtures::pair_simnet();
    CHECK(s.cover.hypothesis.size() == 9);
    CHECK(max_difference(brute_joint(fixtures::pair_network()), reconstruct_joint(s)) <= 1e-9);
    CHECK_FALSE(s.locals[0].network.arcs().contains({"h1", "h2"}));
    // the conversation clue only matters for pairs of workers
    CHECK(std::count(s.locals[0].depicted.begin(), s.locals[0].depicted.end(), "c") == 0);

    Rng rng(seed() + 33);
    for (int trial = 0; trial < 20; ++trial) {
        const DiscreteNetwork net = random_pair_network(rng);
        const SimilarityNetwork generated = pair_simnet_of(net);
        CHECK(validate_simnet(generated).ok());
        CHECK(max_difference(brute_joint(net), reconstruct_joint(generated)) <= 1e-9);
    }
}
