#include "asymnet/fixtures.hpp"

#include "asymnet/inference.hpp"

namespace asymnet::fixtures {

namespace {

using Rows = std::vector<std::vector<double>>;

const std::vector<double> kUniform2{0.5, 0.5};

Variable hypothesis3() { return {"h", "identity", {"worker", "visitor", "spy"}}; }
Variable hypothesis4() { return {"h", "identity", {"spy", "visitor", "worker", "executive"}}; }
Variable gender(const VarId& id = "g") { return {id, "gender", {"male", "female"}}; }
Variable badge(const VarId& id = "b") { return {id, "wears badge", {"yes", "no"}}; }
Variable limousine() { return {"l", "arrives by limousine", {"yes", "no"}}; }

HypothesisPoint pt(std::size_t v) { return {v}; }

}  // namespace

DiscreteNetwork building_network() {
    return DiscreteNetwork::from_cpts(
        {hypothesis3(), gender(), badge()},
        {
            {"h", {}, {{0.7, 0.2, 0.1}}},
            {"g", {"h"}, {{0.5, 0.5}, {0.5, 0.5}, {0.8, 0.2}}},
            // last parent fastest: (male, worker) (male, visitor) (male, spy) (female, ...)
            {"b", {"g", "h"}, {{0.6, 0.4}, {0.0, 1.0}, {1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}, {1.0, 0.0}}},
        });
}

Multinet building_multinet() {
    Multinet m;
    m.hypothesis = {{hypothesis3()}};
    m.blocks = {{pt(1), pt(2)}, {pt(0)}};
    m.block_priors = {0.3, 0.7};
    m.locals.push_back(DiscreteNetwork::from_cpts(
        {hypothesis3(), gender(), badge()},
        {
            {"h", {}, {{0.0, 2.0 / 3.0, 1.0 / 3.0}}},
            {"g", {"h"}, {kUniform2, {0.5, 0.5}, {0.8, 0.2}}},
            {"b", {"h"}, {kUniform2, {0.0, 1.0}, {1.0, 0.0}}},
        }));
    m.locals.push_back(DiscreteNetwork::from_cpts(
        {hypothesis3(), gender(), badge()},
        {
            {"h", {}, {{1.0, 0.0, 0.0}}},
            {"g", {}, {{0.5, 0.5}}},
            {"b", {"g"}, {{0.6, 0.4}, {0.9, 0.1}}},
        }));
    return m;
}

Multinet limousine_multinet() {
    Multinet m;
    m.hypothesis = {{hypothesis4()}};
    m.blocks = {{pt(0), pt(1)}, {pt(2), pt(3)}};
    m.block_priors = {0.2, 0.8};
    m.locals.push_back(DiscreteNetwork::from_cpts(
        {hypothesis4(), gender(), badge(), limousine()},
        {
            {"h", {}, {{0.25, 0.75, 0.0, 0.0}}},
            {"g", {"h"}, {{0.8, 0.2}, {0.5, 0.5}, kUniform2, kUniform2}},
            {"b", {"h"}, {{1.0, 0.0}, {0.0, 1.0}, kUniform2, kUniform2}},
            {"l", {}, {{0.0, 1.0}}},
        }));
    m.locals.push_back(DiscreteNetwork::from_cpts(
        {hypothesis4(), gender(), badge(), limousine()},
        {
            {"h", {}, {{0.0, 0.0, 0.75, 0.25}}},
            {"g", {}, {{0.6, 0.4}}},
            {"b", {"g"}, {{0.6, 0.4}, {0.9, 0.1}}},
            {"l", {"h"}, {kUniform2, kUniform2, {0.0, 1.0}, {0.9, 0.1}}},
        }));
    return m;
}

SimilarityNetwork limousine_simnet() {
    Cover cover{{{hypothesis4()}}, {{pt(0), pt(1)}, {pt(1), pt(2)}, {pt(2), pt(3)}}};
    std::vector<DiscreteNetwork> nets;
    nets.push_back(DiscreteNetwork::from_cpts(
        {hypothesis4(), gender(), badge()},
        {
            {"h", {}, {{0.25, 0.75, 0.0, 0.0}}},
            {"g", {"h"}, {{0.8, 0.2}, {0.5, 0.5}, kUniform2, kUniform2}},
            {"b", {"h"}, {{1.0, 0.0}, {0.0, 1.0}, kUniform2, kUniform2}},
        }));
    nets.push_back(DiscreteNetwork::from_cpts(
        {hypothesis4(), gender(), badge()},
        {
            {"h", {}, {{0.0, 0.2, 0.8, 0.0}}},
            {"g", {"h"}, {kUniform2, {0.5, 0.5}, {0.6, 0.4}, kUniform2}},
            {"b", {"g", "h"},
             {kUniform2, {0.0, 1.0}, {0.6, 0.4}, kUniform2, kUniform2, {0.0, 1.0}, {0.9, 0.1}, kUniform2}},
        }));
    nets.push_back(DiscreteNetwork::from_cpts(
        {hypothesis4(), limousine()},
        {
            {"h", {}, {{0.0, 0.0, 0.75, 0.25}}},
            {"l", {"h"}, {kUniform2, kUniform2, {0.0, 1.0}, {0.9, 0.1}}},
        }));
    std::vector<OrdinaryLocalNetwork> locals;
    for (std::size_t i = 0; i < nets.size(); ++i) locals.push_back({i, nets[i].ids(), nets[i], {}});
    return make_simnet(std::move(cover), std::move(locals));
}

SimilarityNetwork chain_cover_simnet(double a, double b, double c) {
    Cover cover{{{hypothesis4()}}, {{pt(0), pt(1)}, {pt(1), pt(2)}, {pt(2), pt(3)}}};
    const Rows rows[] = {{{a, 1.0 - a, 0.0, 0.0}}, {{0.0, b, 1.0 - b, 0.0}}, {{0.0, 0.0, c, 1.0 - c}}};
    std::vector<OrdinaryLocalNetwork> locals;
    for (std::size_t i = 0; i < 3; ++i) {
        DiscreteNetwork net = DiscreteNetwork::from_cpts({hypothesis4()}, {{"h", {}, rows[i]}});
        locals.push_back({i, net.ids(), net, {}});
    }
    return make_simnet(std::move(cover), std::move(locals));
}

DiscreteNetwork pair_network() {
    const std::vector<std::string> who{"w", "v", "s"};
    const Rows g_rows{{0.5, 0.5}, {0.5, 0.5}, {0.8, 0.2}};
    const Rows b_rows{{0.6, 0.4}, {0.0, 1.0}, {1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}, {1.0, 0.0}};
    Rows c_rows(9, {0.0, 1.0});
    c_rows[0] = {0.7, 0.3};  // (w, w)
    return DiscreteNetwork::from_cpts(
        {{"h1", "first person", who}, {"h2", "second person", who}, gender("g1"), badge("b1"), gender("g2"),
         badge("b2"), {"c", "converse", {"yes", "no"}}},
        {
            {"h1", {}, {{0.6, 0.25, 0.15}}},
            {"h2", {"h1"}, {{0.8, 0.15, 0.05}, {0.1, 0.45, 0.45}, {0.2, 0.4, 0.4}}},
            {"g1", {"h1"}, g_rows},
            {"b1", {"g1", "h1"}, b_rows},
            {"g2", {"h2"}, g_rows},
            {"b2", {"g2", "h2"}, b_rows},
            {"c", {"h1", "h2"}, c_rows},
        });
}

SimilarityNetwork pair_simnet() {
    const DiscreteNetwork source = pair_network();
    const HypothesisSpace space = hypothesis_space(source, {"h1", "h2"});
    constexpr std::size_t w = 0, v = 1, s = 2;
    Cover cover{space,
                {{{s, s}, {v, s}, {s, v}, {v, v}}, {{v, v}, {w, v}, {v, w}, {w, w}}, {{s, s}, {s, w}, {w, s}}}};
    std::vector<OrdinaryLocalNetwork> locals;
    for (std::size_t i = 0; i < cover.edges.size(); ++i) {
        OrdinaryLocalNetwork local =
            relevance_prune(comprehensive_local_network(source, space, cover.edges[i]), space, cover.edges[i]);
        local.edge = i;
        locals.push_back(std::move(local));
    }
    return make_simnet(std::move(cover), std::move(locals));
}

namespace {

Variable economy() { return {"r1", "economy", {"low", "high"}}; }
Variable report() { return {"r2", "military report", {"no", "yes"}}; }

const Rows kStagedH{{0.75, 0.2, 0.05}, {0.65, 0.2, 0.15}, {0.65, 0.2, 0.15}, {0.5, 0.2, 0.3}};
const Rows kF1{{0.8, 0.2}, {0.1, 0.9}, {0.95, 0.05}};
const Rows kF2{{0.5, 0.5}, {0.5, 0.5}, {0.8, 0.2}};
const Rows kF3{{0.05, 0.95}, {0.1, 0.9}, {0.02, 0.98}};

std::vector<Variable> clue_variables() {
    return {{"f1", "wears badge", {"yes", "no"}}, {"f2", "gender", {"male", "female"}},
            {"f3", "arrives by limousine", {"yes", "no"}}};
}

}  // namespace

DiscreteNetwork staged_network() {
    std::vector<Variable> vars{economy(), report(), hypothesis3()};
    for (Variable& v : clue_variables()) vars.push_back(std::move(v));
    return DiscreteNetwork::from_cpts(std::move(vars), {
                                                           {"r1", {}, {{0.7, 0.3}}},
                                                           {"r2", {}, {{0.8, 0.2}}},
                                                           {"h", {"r1", "r2"}, kStagedH},
                                                           {"f1", {"h"}, kF1},
                                                           {"f2", {"h"}, kF2},
                                                           {"f3", {"h"}, kF3},
                                                       });
}

DiscreteNetwork staged_prior_network() {
    return DiscreteNetwork::from_cpts({economy(), report(), hypothesis3()}, {
                                                                                {"r1", {}, {{0.7, 0.3}}},
                                                                                {"r2", {}, {{0.8, 0.2}}},
                                                                                {"h", {"r1", "r2"}, kStagedH},
                                                                            });
}

Multinet staged_clue_multinet() {
    const std::vector<double> q = marginal(staged_prior_network(), {"h"}, {}).values;
    std::vector<Variable> vars{hypothesis3()};
    for (Variable& v : clue_variables()) vars.push_back(std::move(v));
    Multinet m;
    m.hypothesis = {{hypothesis3()}};
    m.blocks = {{pt(1), pt(2)}, {pt(0)}};
    m.block_priors = {q[1] + q[2], q[0]};
    m.locals.push_back(DiscreteNetwork::from_cpts(
        vars, {
                  {"h", {}, {{0.0, q[1] / (q[1] + q[2]), q[2] / (q[1] + q[2])}}},
                  {"f1", {"h"}, kF1},
                  {"f2", {"h"}, kF2},
                  {"f3", {"h"}, kF3},
              }));
    m.locals.push_back(DiscreteNetwork::from_cpts(vars, {
                                                            {"h", {}, {{1.0, 0.0, 0.0}}},
                                                            {"f1", {}, {kF1[0]}},
                                                            {"f2", {}, {kF2[0]}},
                                                            {"f3", {}, {kF3[0]}},
                                                        }));
    return m;
}

ModelDocument document(const std::string& name) {
    ModelDocument doc;
    if (name == "building-network") {
        doc.model = building_network();
    } else if (name == "building-multinet") {
        doc.model = building_multinet();
    } else if (name == "limousine-multinet") {
        doc.model = limousine_multinet();
    } else if (name == "limousine-simnet") {
        doc.model = limousine_simnet();
    } else if (name == "chain-cover") {
        doc.model = chain_cover_simnet(1.0 / 3.0, 0.5, 0.5);
    } else if (name == "pair-network") {
        doc.model = pair_network();
    } else if (name == "pair-simnet") {
        doc.model = pair_simnet();
    } else if (name == "staged-network") {
        doc.model = staged_network();
    } else if (name == "staged-prior") {
        doc.model = staged_prior_network();
    } else if (name == "staged-multinet") {
        doc.model = staged_clue_multinet();
    } else {
        fail(ErrorCode::ContractViolation, "unknown fixture '" + name + "'");
    }
    return doc;
}

std::vector<std::string> names() {
    return {"building-network", "building-multinet", "limousine-multinet", "limousine-simnet",
            "chain-cover",      "pair-network",      "pair-simnet",        "staged-network",
            "staged-prior",     "staged-multinet"};
}

}  // namespace asymnet::fixtures
