// asymnet: validate, query, convert and compare asymmetric network models.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asymnet/fixtures.hpp"
#include "asymnet/inference.hpp"
#include "asymnet/io.hpp"

using namespace asymnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitEvidence = 2;
constexpr int kExitIo = 3;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InconsistentEvidence:
        case ErrorCode::UndefinedLikelihood:
        case ErrorCode::UndefinedConditional: return kExitEvidence;
        case ErrorCode::Parse:
        case ErrorCode::Schema:
        case ErrorCode::Io: return kExitIo;
        default: return kExitInvalid;
    }
}

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

std::vector<VarId> split_ids(const std::string& text) {
    std::vector<VarId> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const Multinet& as_multinet(const ModelDocument& doc, const std::string& what) {
    if (doc.kind() != ModelKind::Multinet) fail(ErrorCode::ContractViolation, what + " expects a multinet file");
    return std::get<Multinet>(doc.model);
}

const SimilarityNetwork& as_simnet_doc(const ModelDocument& doc, const std::string& what) {
    if (doc.kind() != ModelKind::Simnet) fail(ErrorCode::ContractViolation, what + " expects a similarity network file");
    return std::get<SimilarityNetwork>(doc.model);
}

JointTable joint_of(const ModelDocument& doc) {
    JointTable joint;
    switch (doc.kind()) {
        case ModelKind::Network: joint = enumerate_joint(std::get<DiscreteNetwork>(doc.model)); break;
        case ModelKind::Multinet: joint = mixture_joint(std::get<Multinet>(doc.model)); break;
        case ModelKind::Simnet: joint = reconstruct_joint(std::get<SimilarityNetwork>(doc.model)); break;
    }
    std::vector<VarId> sorted = joint.scope;
    std::sort(sorted.begin(), sorted.end());
    return marginalize(joint, sorted);
}

std::size_t param_count(const ModelDocument& doc) {
    switch (doc.kind()) {
        case ModelKind::Network: return free_parameter_count(std::get<DiscreteNetwork>(doc.model));
        case ModelKind::Multinet: return multinet_param_count(std::get<Multinet>(doc.model));
        case ModelKind::Simnet: return multinet_param_count(convert_to_multinet(std::get<SimilarityNetwork>(doc.model)));
    }
    return 0;
}

std::vector<VarId> hypothesis_of(const ModelDocument& doc) {
    switch (doc.kind()) {
        case ModelKind::Network: return {};
        case ModelKind::Multinet: return std::get<Multinet>(doc.model).hypothesis.ids();
        case ModelKind::Simnet: return std::get<SimilarityNetwork>(doc.model).cover.hypothesis.ids();
    }
    return {};
}

// Brute-force P(H | e) from a joint table, in hypothesis-domain order.
std::vector<double> oracle_posterior(const JointTable& joint, const HypothesisSpace& space, const Assignment& e) {
    std::vector<double> out(space.size(), 0.0);
    std::vector<std::size_t> values(joint.scope.size(), 0);
    for (double p : joint.probabilities) {
        bool match = true;
        Assignment point;
        for (std::size_t i = 0; i < joint.scope.size(); ++i) {
            auto it = e.find(joint.scope[i]);
            if (it != e.end() && it->second != values[i]) match = false;
            if (space.contains(joint.scope[i])) point[joint.scope[i]] = values[i];
        }
        if (match) {
            HypothesisPoint hp;
            for (const Variable& v : space.variables) hp.push_back(point.at(v.id));
            out[space.index_of(hp)] += p;
        }
        next_configuration(joint.cardinalities, values);
    }
    double total = 0.0;
    for (double v : out) total += v;
    if (total <= 0.0) fail(ErrorCode::InconsistentEvidence, "evidence has zero probability");
    for (double& v : out) v /= total;
    return out;
}

struct OracleCheck {
    std::size_t queries = 0;
    double worst = 0.0;
};

// Compares run_query against the joint for every complete clue assignment
// with positive probability.
OracleCheck oracle_check(const ModelDocument& doc, const JointTable& joint, const HypothesisSpace& space,
                         const QueryOptions& options) {
    std::vector<VarId> clues;
    std::vector<std::size_t> cards;
    for (std::size_t i = 0; i < joint.scope.size(); ++i) {
        if (!space.contains(joint.scope[i])) {
            clues.push_back(joint.scope[i]);
            cards.push_back(joint.cardinalities[i]);
        }
    }
    const JointTable clue_marginal = marginalize(joint, clues);
    OracleCheck check;
    std::vector<std::size_t> values(clues.size(), 0);
    for (double mass : clue_marginal.probabilities) {
        if (mass > 0.0) {
            Assignment e;
            for (std::size_t i = 0; i < clues.size(); ++i) e[clues[i]] = values[i];
            const QueryResult result = run_query(doc, e, options);
            const std::vector<double> expected = oracle_posterior(joint, space, e);
            for (std::size_t k = 0; k < expected.size(); ++k) {
                check.worst = std::max(check.worst, std::abs(expected[k] - result.posterior[k]));
            }
            ++check.queries;
        }
        if (!next_configuration(cards, values)) break;
    }
    return check;
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        write_text_file(output, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Build, check and query Bayesian networks, multinets and similarity networks."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "asymnet 1.0.0");

    std::string file, file_b, output, evidence_text, apriori_text, priors_file, hypothesis_text, fixture_name;
    bool oracle = false;

    auto* validate = app.add_subcommand("validate", "Check a model file and print its validation report");
    validate->add_option("file", file, "Model file")->required();

    auto* query = app.add_subcommand("query", "Posterior over the hypothesis variables given evidence");
    query->add_option("file", file, "Model file")->required();
    query->add_option("--evidence,-e", evidence_text, "Observed clues, e.g. g=male,b=yes");
    query->add_option("--apriori-evidence", apriori_text, "Observations for the a-priori network");
    query->add_option("--priors", priors_file, "Network file that revises the hypothesis priors first");
    query->add_option("--hypothesis", hypothesis_text, "Hypothesis variables of a network file (default h)");

    auto* convert = app.add_subcommand("convert", "Convert a similarity network into a multinet");
    convert->add_option("file", file, "Similarity network file")->required();
    convert->add_option("-o,--output", output, "Output file (default stdout)");

    auto* to_union = app.add_subcommand("union", "Combine a multinet into one Bayesian network");
    to_union->add_option("file", file, "Multinet file")->required();
    to_union->add_option("-o,--output", output, "Output file (default stdout)");

    auto* params = app.add_subcommand("params", "Count free parameters");
    params->add_option("file", file, "Model file")->required();

    auto* compare = app.add_subcommand("compare", "Check that two models encode the same joint and compare costs");
    compare->add_option("a", file, "First model file")->required();
    compare->add_option("b", file_b, "Second model file")->required();
    compare->add_option("--evidence,-e", evidence_text, "Evidence for the cost comparison query");
    compare->add_option("--hypothesis", hypothesis_text, "Hypothesis variables when both files are networks");
    compare->add_flag("--oracle", oracle, "Also check every query against brute-force enumeration");

    auto* priors = app.add_subcommand("priors", "Recover hypothesis priors from a similarity network");
    priors->add_option("file", file, "Similarity network file")->required();

    auto* redundancy = app.add_subcommand("redundancy", "List parameters specified in more than one local network");
    redundancy->add_option("file", file, "Similarity network file")->required();

    auto* fixture = app.add_subcommand("fixture", "Write a built-in example model");
    fixture->add_option("name", fixture_name, "Fixture name, or 'list'")->required();
    fixture->add_option("-o,--output", output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (validate->parsed()) {
            const ModelDocument doc = read_model_file(file, false);
            const ValidationReport report = validate_document(doc);
            if (report.ok()) {
                std::cout << to_string(doc.kind()) << ": valid\n";
            } else {
                std::cout << to_string(doc.kind()) << ": invalid\n" << report.to_string();
            }
            return report.ok() ? kExitOk : kExitInvalid;
        }

        if (query->parsed()) {
            const ModelDocument doc = read_model_file(file);
            QueryOptions options;
            if (!hypothesis_text.empty()) options.hypothesis = split_ids(hypothesis_text);
            if (!priors_file.empty()) {
                const ModelDocument prior = read_model_file(priors_file);
                if (prior.kind() != ModelKind::Network) {
                    fail(ErrorCode::ContractViolation, "--priors expects a network file");
                }
                options.prior_network = std::get<DiscreteNetwork>(prior.model);
                options.apriori_evidence = parse_evidence(apriori_text, prior.variables());
            } else if (!apriori_text.empty()) {
                options.apriori_evidence = parse_evidence(apriori_text, doc.variables());
            }
            const Assignment evidence = parse_evidence(evidence_text, doc.variables());
            std::cout << format_query_result(run_query(doc, evidence, options));
            return kExitOk;
        }

        if (convert->parsed()) {
            const ModelDocument doc = read_model_file(file);
            ModelDocument out;
            out.model = convert_to_multinet(as_simnet_doc(doc, "convert"));
            emit(serialize_model(out), output);
            return kExitOk;
        }

        if (to_union->parsed()) {
            const ModelDocument doc = read_model_file(file);
            const Transformed t = union_network(as_multinet(doc, "union"));
            for (const std::string& w : t.warnings) std::cerr << "warning: " << w << "\n";
            ModelDocument out;
            out.model = t.network;
            emit(serialize_model(out), output);
            return kExitOk;
        }

        if (params->parsed()) {
            std::cout << param_count(read_model_file(file)) << "\n";
            return kExitOk;
        }

        if (compare->parsed()) {
            const ModelDocument a = read_model_file(file);
            const ModelDocument b = read_model_file(file_b);
            const JointTable ja = joint_of(a);
            const JointTable jb = joint_of(b);
            if (ja.scope != jb.scope || ja.cardinalities != jb.cardinalities) {
                std::cout << "equivalent: no (different variables)\n";
                return kExitInvalid;
            }
            double diff = 0.0;
            for (std::size_t i = 0; i < ja.probabilities.size(); ++i) {
                diff = std::max(diff, std::abs(ja.probabilities[i] - jb.probabilities[i]));
            }
            const bool equivalent = diff <= kTolerance;
            std::cout << "equivalent: " << (equivalent ? "yes" : "no") << "\n";
            std::cout << "max joint difference: " << num(diff) << "\n";

            QueryOptions options;
            options.hypothesis = split_ids(hypothesis_text);
            if (options.hypothesis.empty()) options.hypothesis = hypothesis_of(a);
            if (options.hypothesis.empty()) options.hypothesis = hypothesis_of(b);
            if (options.hypothesis.empty()) options.hypothesis = {"h"};

            const Assignment evidence = parse_evidence(evidence_text, a.variables());
            const QueryResult qa = run_query(a, evidence, options);
            const QueryResult qb = run_query(b, evidence, options);
            std::cout << "parameters: " << param_count(a) << " vs " << param_count(b) << "\n";
            std::cout << "multiplications: " << qa.multiplications << " vs " << qb.multiplications << "\n";

            bool oracle_ok = true;
            if (oracle) {
                const HypothesisSpace space = qa.hypothesis;
                for (const auto& [label, doc] : {std::pair<const char*, const ModelDocument*>{"first", &a},
                                                 std::pair<const char*, const ModelDocument*>{"second", &b}}) {
                    const OracleCheck check = oracle_check(*doc, ja, space, options);
                    const bool ok = check.worst <= kTolerance;
                    oracle_ok = oracle_ok && ok;
                    std::cout << "oracle (" << label << "): " << check.queries << " queries, max deviation "
                              << num(check.worst) << (ok ? "" : " FAILED") << "\n";
                }
            }
            return equivalent && oracle_ok ? kExitOk : kExitInvalid;
        }

        if (priors->parsed()) {
            const ModelDocument doc = read_model_file(file);
            const SimilarityNetwork& s = as_simnet_doc(doc, "priors");
            const Factor f = recover_priors(s);
            const HypothesisSpace& space = s.cover.hypothesis;
            for (std::size_t k = 0; k < space.size(); ++k) {
                const HypothesisPoint p = space.point_at(k);
                std::cout << space.label(p) << "  " << num(f.at(space.as_assignment(p))) << "\n";
            }
            return kExitOk;
        }

        if (redundancy->parsed()) {
            const ModelDocument doc = read_model_file(file);
            const auto report = redundancy_report(as_simnet_doc(doc, "redundancy"));
            bool coherent = true;
            if (report.empty()) std::cout << "no redundant parameters\n";
            for (const RedundantParameter& r : report) {
                std::cout << r.label << "  networks";
                for (std::size_t e : r.edges) std::cout << " " << e;
                std::cout << "  discrepancy " << num(r.discrepancy) << (r.incoherent ? "  INCOHERENT" : "") << "\n";
                coherent = coherent && !r.incoherent;
            }
            return coherent ? kExitOk : kExitInvalid;
        }

        if (fixture->parsed()) {
            if (fixture_name == "list") {
                for (const std::string& name : fixtures::names()) std::cout << name << "\n";
                return kExitOk;
            }
            emit(serialize_model(fixtures::document(fixture_name)), output);
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitOk;
}
