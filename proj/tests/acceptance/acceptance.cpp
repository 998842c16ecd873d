// Acceptance checks: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes within its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "asymnet/fixtures.hpp"
#include "asymnet/inference.hpp"
#include "asymnet/io.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"
#include "support/seed.hpp"

using namespace asymnet;
using namespace asymnet::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            if (pass) detail.clear();
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3g", v);
    return buffer;
}

std::vector<double> values_of(const Factor& f, const HypothesisSpace& space) {
    std::vector<double> out;
    for (std::size_t k = 0; k < space.size(); ++k) out.push_back(f.at(space.as_assignment(space.point_at(k))));
    return out;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

std::vector<std::set<Arc>> arc_sets(const Multinet& m) {
    std::vector<std::set<Arc>> out;
    for (const DiscreteNetwork& net : m.locals) out.push_back(net.arcs());
    return out;
}

// Random partial evidence over the non-hypothesis variables.
Assignment random_evidence(Rng& rng, const std::vector<Variable>& vars, const HypothesisSpace& space) {
    std::bernoulli_distribution observe(0.5);
    Assignment e;
    for (const Variable& v : vars) {
        if (space.contains(v.id) || !observe(rng)) continue;
        e[v.id] = std::uniform_int_distribution<std::size_t>(0, v.cardinality() - 1)(rng);
    }
    return e;
}

#ifdef ASYMNET_CLI_PATH
std::string run_cli(const std::string& args) {
    const std::string command = std::string(ASYMNET_CLI_PATH) + " " + args + " 2>&1";
    std::string out;
    if (FILE* pipe = popen(command.c_str(), "r")) {
        char buffer[256];
        while (std::fgets(buffer, sizeof buffer, pipe) != nullptr) out += buffer;
        pclose(pipe);
    }
    return out;
}
#endif

// ---------------------------------------------------------------------------

Outcome parameter_counts() {
    Outcome o;
    const std::size_t network = free_parameter_count(fixtures::building_network());
    const std::size_t multinet = multinet_param_count(fixtures::building_multinet());
    o.require(network == 11, "network count " + std::to_string(network) + " != 11");
    o.require(multinet == 9, "multinet count " + std::to_string(multinet) + " != 9");
#ifdef ASYMNET_CLI_PATH
    const auto dir = std::filesystem::temp_directory_path() / ("asymnet_acc_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    for (const auto& [name, expected] : {std::pair<std::string, std::string>{"building-network", "11\n"},
                                         std::pair<std::string, std::string>{"building-multinet", "9\n"}}) {
        const std::string path = (dir / (name + ".json")).string();
        run_cli("fixture " + name + " -o " + path);
        const std::string printed = run_cli("params " + path);
        o.require(printed == expected, "params " + name + " printed '" + printed + "'");
    }
    std::filesystem::remove_all(dir);
#endif
    if (o.pass) o.detail = "network 11, multinet 9";
    return o;
}

Outcome likelihood_identity() {
    Outcome o;
    const Multinet m = fixtures::limousine_multinet();
    const HypothesisPoint worker{2}, executive{3};
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t b = 0; b < 2; ++b) {
            const Assignment e{{"g", g}, {"b", b}};
            const double lw = likelihood(m, worker, e);
            const double le = likelihood(m, executive, e);
            o.require(lw == le, "g=" + std::to_string(g) + ",b=" + std::to_string(b) + ": " + num(lw) + " vs " + num(le));
        }
    }
    if (o.pass) o.detail = "bitwise equal for all four (g, b)";
    return o;
}

Outcome similarity_identity() {
    Outcome o;
    const SimilarityNetwork s = fixtures::limousine_simnet();
    const ConditionalFactor cf = conditional_factor(s, "l", {}, {0});
    const DiscreteNetwork& worker_exec = s.locals.at(2).network;
    const std::vector<double> expected = worker_exec.cpt("l").rows.at(2);  // P(l | worker)
    o.require(!cf.irrelevant, "l reported irrelevant");
    double gap = 0.0;
    for (std::size_t v = 0; v < 2; ++v) gap = std::max(gap, std::abs(cf.distribution.at({{"l", v}}) - expected[v]));
    o.require(gap <= 1e-12, "difference " + num(gap));
    o.require(cf.edge == 2, "evaluated in network " + std::to_string(cf.edge));
    o.require(cf.evaluated_at == HypothesisPoint{2}, "hand-off point is not worker");
    if (o.pass) o.detail = "P(l | spy) = P(l | worker), difference " + num(gap);
    return o;
}

Outcome cross_representation() {
    Outcome o;
    Rng rng(seed());
    double worst = 0.0;
    std::size_t queries = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const PlantedFamily family = planted_family(rng);
        const Multinet& m = family.multinet;
        const DiscreteNetwork monolithic = union_network(m).network;
        const SimilarityNetwork s = simnet_from_multinet(m, {{{0}, {1}}, {{1}, {2}}});
        const DenseJoint truth = brute_mixture(m);
        for (int q = 0; q < 3; ++q) {
            const Assignment e = random_evidence(rng, m.locals[0].variables(), m.hypothesis);
            const std::vector<double> expected = brute_posterior(truth, {"h"}, {e.begin(), e.end()});
            if (expected.empty()) continue;
            const std::vector<double> a = values_of(posterior_chain(monolithic, "h", e).distribution, m.hypothesis);
            const std::vector<double> b = values_of(posterior(m, e).distribution, m.hypothesis);
            const std::vector<double> c = values_of(simnet_posterior(s, e), m.hypothesis);
            worst = std::max({worst, max_gap(a, b), max_gap(b, c), max_gap(a, c), max_gap(a, expected)});
            ++queries;
        }
    }
    o.require(worst <= 1e-9, "max disagreement " + num(worst));
    if (o.pass) o.detail = std::to_string(queries) + " queries on 100 families, max disagreement " + num(worst);
    return o;
}

Outcome prior_recovery() {
    Outcome o;
    const HypothesisSpace space = fixtures::chain_cover_simnet(0.5, 0.5, 0.5).cover.hypothesis;
    const std::vector<double> uniform = values_of(recover_priors(fixtures::chain_cover_simnet(0.5, 0.5, 0.5)), space);
    for (double v : uniform) o.require(v == 0.25, "uniform chain gave " + num(v));

    const double a = 1.0 / 3.0, b = 0.5, c = 0.5;
    const std::vector<double> got = values_of(recover_priors(fixtures::chain_cover_simnet(a, b, c)), space);
    const std::vector<double> expected{1.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0};
    o.require(max_gap(got, expected) <= 1e-12, "chain case off by " + num(max_gap(got, expected)));

    // Independent check: p(x) (1 - a) = p(y) a for each edge {x, y}, plus normalization.
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    A(0, 0) = 1.0 - a, A(0, 1) = -a;
    A(1, 1) = 1.0 - b, A(1, 2) = -b;
    A(2, 2) = 1.0 - c, A(2, 3) = -c;
    A.row(3).setOnes();
    const Eigen::Vector4d solved = A.colPivHouseholderQr().solve(Eigen::Vector4d(0, 0, 0, 1));
    o.require(max_gap(got, {solved(0), solved(1), solved(2), solved(3)}) <= 1e-12, "dense solve disagrees");

    bool raised = false;
    try {
        recover_priors(fixtures::chain_cover_simnet(0.0, 0.5, 0.5));
    } catch (const Error& e) {
        raised = e.code() == ErrorCode::ZeroPrior;
    }
    o.require(raised, "zero within-edge conditional did not raise ZeroPrior");
    if (o.pass) o.detail = "0.25 exact; (1/7, 2/7, 2/7, 2/7) matches the dense solve; zero prior rejected";
    return o;
}

Outcome conversion_fidelity() {
    Outcome o;
    const SimilarityNetwork s = fixtures::limousine_simnet();
    const Multinet converted = convert_to_multinet(s);
    const Multinet expected = fixtures::limousine_multinet();
    o.require(converted.blocks == expected.blocks, "blocks differ");
    o.require(arc_sets(converted) == arc_sets(expected), "local arc sets differ from the limousine multinet");
    const double joint_gap = max_difference(brute_mixture(converted), reconstruct_joint(s));
    o.require(joint_gap <= 1e-9, "joint differs by " + num(joint_gap));
    const double source_gap = max_difference(brute_mixture(converted), brute_mixture(expected));
    o.require(source_gap <= 1e-9, "joint differs from the generating multinet by " + num(source_gap));

    const DiscreteNetwork joined = union_network(fixtures::building_multinet()).network;
    o.require(joined.arcs() == fixtures::building_network().arcs(), "union arc set differs from the building network");
    if (o.pass) o.detail = "arc sets match; joint difference " + num(std::max(joint_gap, source_gap));
    return o;
}

Outcome cost_savings() {
    Outcome o;
    const Multinet fig = fixtures::limousine_multinet();
    const Assignment e{{"g", 0}, {"b", 0}, {"l", 1}};
    const std::size_t multi = posterior(fig, e).multiplications;
    const DiscreteNetwork fig_union = union_network(fig).network;
    const std::size_t mono = posterior_chain(fig_union, "h", e).multiplications;
    o.require(multi < mono, "limousine: multinet " + std::to_string(multi) + " >= monolithic " + std::to_string(mono));
    o.require(multinet_param_count(fig) < free_parameter_count(fig_union), "limousine parameter count not smaller");

    Rng rng(seed() + 7);
    std::size_t families = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const PlantedFamily family = planted_family(rng);
        const Multinet& m = family.multinet;
        const DiscreteNetwork joined = union_network(m).network;
        // Observe every clue except the tails of the dropped arcs, so the
        // query has to eliminate the variables the asymmetry concerns.
        Assignment all;
        for (const Variable& v : m.locals[0].variables()) {
            if (v.id != "h") all[v.id] = 0;
        }
        for (const auto& dropped : family.dropped) {
            for (const Arc& arc : dropped) all.erase(arc.first);
        }
        const std::size_t mm = posterior(m, all).multiplications;
        const std::size_t mo = posterior_chain(joined, "h", all).multiplications;
        const std::size_t pm = multinet_param_count(m);
        const std::size_t po = free_parameter_count(joined);
        if (mm >= mo) o.require(false, "family " + std::to_string(trial) + ": " + std::to_string(mm) + " >= " + std::to_string(mo) + " multiplications");
        if (pm >= po) o.require(false, "family " + std::to_string(trial) + ": " + std::to_string(pm) + " >= " + std::to_string(po) + " parameters");
        ++families;
    }
    if (o.pass) {
        o.detail = "limousine " + std::to_string(multi) + " < " + std::to_string(mono) + " multiplications; " +
                   std::to_string(families) + " generated families cheaper in both measures";
    }
    return o;
}

Outcome generalized_form() {
    Outcome o;
    const SimilarityNetwork fixture = fixtures::pair_simnet();
    o.require(fixture.cover.hypothesis.size() == 9, "hypothesis domain is not 9 pairs");
    o.require(is_connected_cover(fixture.cover), "pair cover is not connected");
    o.require(max_difference(brute_joint(fixtures::pair_network()), reconstruct_joint(fixture)) <= 1e-9,
              "pair fixture joint differs");

    Rng rng(seed() + 8);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const DiscreteNetwork net = random_pair_network(rng);
        const SimilarityNetwork s = pair_simnet_of(net);
        o.require(validate_simnet(s).ok(), "generated simnet invalid");
        o.require(!s.locals[0].network.arcs().contains({"h1", "h2"}), "h1 -> h2 kept in the spy/visitor block");
        worst = std::max(worst, max_difference(brute_joint(net), reconstruct_joint(s)));
    }
    o.require(worst <= 1e-9, "reconstructed joint off by " + num(worst));
    if (o.pass) o.detail = "connected cover of 9 pairs; joint reproduced within " + num(worst);
    return o;
}

Outcome staged_inference() {
    Outcome o;
    const DiscreteNetwork whole = fixtures::staged_network();
    const DiscreteNetwork prior = fixtures::staged_prior_network();
    const Multinet clues = fixtures::staged_clue_multinet();
    const HypothesisSpace& space = clues.hypothesis;
    double worst = 0.0;
    std::size_t cases = 0;
    // every a-priori observation pattern (r unobserved, low/no, high/yes) times every clue pattern
    for (std::size_t r1 = 0; r1 < 3; ++r1) {
        for (std::size_t r2 = 0; r2 < 3; ++r2) {
            Assignment apriori;
            if (r1 < 2) apriori["r1"] = r1;
            if (r2 < 2) apriori["r2"] = r2;
            for (std::size_t f = 0; f < 27; ++f) {
                Assignment clue;
                std::size_t code = f;
                for (const char* id : {"f1", "f2", "f3"}) {
                    if (code % 3 < 2) clue[id] = code % 3;
                    code /= 3;
                }
                Assignment all = apriori;
                all.insert(clue.begin(), clue.end());
                const auto staged = values_of(staged_posterior(prior, clues, apriori, clue).distribution, space);
                const auto mono = values_of(posterior_over(whole, {"h"}, all).distribution, space);
                worst = std::max(worst, max_gap(staged, mono));
                ++cases;
            }
        }
    }
    o.require(worst <= 1e-9, "staged and monolithic differ by " + num(worst));
    if (o.pass) o.detail = std::to_string(cases) + " evidence patterns, max difference " + num(worst);
    return o;
}

Outcome robustness() {
    Outcome o;
    Rng rng(seed() + 10);
    double worst = 0.0;
    std::size_t reversals = 0;
    for (int trial = 0; trial < 100; ++trial) {
        NetworkShape shape;
        shape.min_variables = 3;
        DiscreteNetwork net = random_network(rng, shape);
        while (net.arcs().empty()) net = random_network(rng, shape);
        const DenseJoint before = brute_joint(net);
        for (const auto& [x, y] : net.arcs()) {
            std::set<Arc> others = net.arcs();
            others.erase({x, y});
            others.insert({y, x});
            if (has_cycle(net.ids(), others)) continue;
            const DiscreteNetwork reversed = reverse_arc(net, x, y).network;
            o.require(reversed.arcs().contains({y, x}) && !reversed.arcs().contains({x, y}), "arc not reversed");
            worst = std::max(worst, max_difference(before, enumerate_joint(reversed)));
            ++reversals;
            break;
        }
    }
    o.require(reversals == 100, "only " + std::to_string(reversals) + " networks had a legal reversal");
    o.require(worst <= 1e-9, "reversal changed the joint by " + num(worst));

    std::size_t checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const DiscreteNetwork net = random_network(rng);
        const DenseJoint joint = brute_joint(net);
        std::uniform_int_distribution<int> role(0, 3);  // x, y, z or unused
        for (int draw = 0; draw < 20; ++draw) {
            std::set<VarId> x, y, z;
            for (const VarId& id : net.ids()) {
                const int r = role(rng);
                if (r == 0) x.insert(id);
                if (r == 1) y.insert(id);
                if (r == 2) z.insert(id);
            }
            if (x.empty() || y.empty() || !d_separated(net, x, y, z)) continue;
            ++checked;
            o.require(independent(joint, {x.begin(), x.end()}, {y.begin(), y.end()}, {z.begin(), z.end()}),
                      "d-separated sets are dependent");
        }
    }
    o.require(checked > 0, "no d-separation statement exercised");
    if (o.pass) {
        o.detail = std::to_string(reversals) + " reversals within " + num(worst) + "; " + std::to_string(checked) +
                   " d-separation statements hold numerically";
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    consume_seed_flag(argc, argv);
    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"parameter counts", 1.0, parameter_counts},
        {"equal likelihoods of worker and executive", 1.0, likelihood_identity},
        {"limousine factor borrowed across edges", 1.0, similarity_identity},
        {"cross-representation equivalence", 60.0, cross_representation},
        {"prior recovery", 1.0, prior_recovery},
        {"conversion fidelity", 1.0, conversion_fidelity},
        {"cost savings", 10.0, cost_savings},
        {"generalized form", 5.0, generalized_form},
        {"staged inference", 1.0, staged_inference},
        {"robustness", 30.0, robustness},
    };
    std::printf("seed %llu\n", static_cast<unsigned long long>(seed()));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("threw: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > criteria[i].budget_seconds) {
            outcome.pass = false;
            outcome.detail += " (over the " + num(criteria[i].budget_seconds) + " s budget)";
        }
        failures += outcome.pass ? 0 : 1;
        std::printf("%s  %2zu %-44s %8.3f s  %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, seconds,
                    outcome.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
