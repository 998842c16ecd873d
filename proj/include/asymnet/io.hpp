#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "asymnet/core.hpp"
#include "asymnet/multinet.hpp"
#include "asymnet/simnet.hpp"

namespace asymnet {

enum class ModelKind { Network, Multinet, Simnet };

std::string_view to_string(ModelKind kind) noexcept;

/// A parsed model file: {"kind", "version", "model"}.
struct ModelDocument {
    std::string version = "1";
    std::variant<DiscreteNetwork, Multinet, SimilarityNetwork> model;

    ModelKind kind() const noexcept { return static_cast<ModelKind>(model.index()); }
    /// All variables of the model, ascending id.
    std::vector<Variable> variables() const;

    friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

/// Parses a model document. Malformed JSON throws Parse with a line and
/// column; a document of the wrong shape throws Schema with a JSON pointer to
/// the offending value. With `validate` set, a model that breaks its
/// invariants throws ValidationFailed carrying the full report.
ModelDocument parse_model(std::string_view text, bool validate = true);

/// Canonical text: keys sorted, variables in id order, probabilities with 17
/// significant digits. Identical models give identical bytes.
std::string serialize_model(const ModelDocument& doc);

/// Runs the validator matching the document's kind.
ValidationReport validate_document(const ModelDocument& doc);

/// File helpers; failures to open, read or write throw Io.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
ModelDocument read_model_file(const std::filesystem::path& path, bool validate = true);

/// Parses "var=label,var=label" against `variables`. Unknown variables or
/// labels throw ContractViolation. An empty string is the empty assignment.
Assignment parse_evidence(std::string_view text, const std::vector<Variable>& variables);

/// Parses "spy" (single hypothesis variable) or "h1=w,h2=v".
HypothesisPoint parse_point(std::string_view text, const HypothesisSpace& space);

struct QueryOptions {
    /// Hypothesis variables for network documents; defaults to {"h"}.
    std::vector<VarId> hypothesis;
    /// Network used to revise the hypothesis priors first (staged inference).
    std::optional<DiscreteNetwork> prior_network;
    Assignment apriori_evidence;
};

struct QueryResult {
    HypothesisSpace hypothesis;
    std::vector<std::string> labels;  // one per point of domain(H)
    std::vector<double> posterior;
    std::size_t multiplications = 0;
    std::vector<std::string> diagnostics;
};

/// P(H | evidence) for any document kind. Networks use one elimination,
/// multinets combine their blocks, and similarity networks are converted to
/// a multinet first.
QueryResult run_query(const ModelDocument& doc, const Assignment& evidence, const QueryOptions& options = {});

/// Human-readable rendering of a query result.
std::string format_query_result(const QueryResult& result);

}  // namespace asymnet
