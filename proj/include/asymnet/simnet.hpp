#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asymnet/core.hpp"
#include "asymnet/factor.hpp"
#include "asymnet/hypothesis.hpp"
#include "asymnet/multinet.hpp"

namespace asymnet {

/// Nonempty subsets of domain(H) whose union is domain(H).
struct Cover {
    HypothesisSpace hypothesis;
    std::vector<std::vector<HypothesisPoint>> edges;

    friend bool operator==(const Cover&, const Cover&) = default;
};

/// A local network of P(depicted | A_edge) over a subset of the variables.
struct OrdinaryLocalNetwork {
    std::size_t edge = 0;
    std::vector<VarId> depicted;  // ascending id, always includes the hypothesis variables
    DiscreteNetwork network;
    /// Depicted variables kept on purpose although they are not connected to
    /// any hypothesis variable.
    std::set<VarId> retained;

    friend bool operator==(const OrdinaryLocalNetwork&, const OrdinaryLocalNetwork&) = default;
};

struct SimilarityNetwork {
    Cover cover;
    std::vector<OrdinaryLocalNetwork> locals;  // locals[i].edge == i
    std::vector<Variable> variables;           // every depicted variable, ascending id

    std::vector<VarId> universe() const;
    const Variable& variable(const VarId& id) const;

    friend bool operator==(const SimilarityNetwork&, const SimilarityNetwork&) = default;
};

/// Builds the variable universe from the locals' depicted variables.
SimilarityNetwork make_simnet(Cover cover, std::vector<OrdinaryLocalNetwork> locals);

/// A multinet read as a similarity network whose cover is its partition.
/// Variables not connected to a hypothesis variable are marked retained.
SimilarityNetwork as_simnet(const Multinet& m);

/// Is the similarity hypergraph connected (points not covered count as isolated)?
bool is_connected_cover(const Cover& c);

/// Checks the cover, the locals and the variable universe. A disconnected
/// cover is reported only when `require_connected` is set; the view of a
/// multinet through as_simnet is disconnected whenever it has two blocks.
ValidationReport validate_simnet(const SimilarityNetwork& s, bool require_connected = true);

/// Throws ValidationFailed carrying the report text when `s` is invalid.
void require_valid(const SimilarityNetwork& s, bool require_connected = true);

/// Comprehensive local network of the distribution of `source` given `edge`:
/// the hypothesis distribution is conditioned on the edge and arcs that no
/// longer matter on the edge's support are dropped. Requires the hypothesis
/// variables of `source` to have only hypothesis parents.
DiscreteNetwork comprehensive_local_network(const DiscreteNetwork& source, const HypothesisSpace& space,
                                            const std::vector<HypothesisPoint>& edge);

/// Drops hypothesis arcs whose tables do not vary over the edge's hypothesis
/// values, then every variable left disconnected from all hypothesis
/// variables. Components holding a variable listed in `retain` are kept and
/// marked retained. The returned local's `edge` field is 0.
OrdinaryLocalNetwork relevance_prune(const DiscreteNetwork& comprehensive, const HypothesisSpace& space,
                                     const std::vector<HypothesisPoint>& edge,
                                     const std::set<VarId>& retain = {});

/// Priors over domain(H) from the within-edge hypothesis conditionals.
/// Throws ZeroPrior when some p(h | A_i) is zero and InconsistentSimnet when
/// the edges disagree by more than 1e-6.
Factor recover_priors(const SimilarityNetwork& s);

struct ConditionalFactor {
    bool irrelevant = false;     // var is depicted in no local network
    Factor distribution;         // P(var | depicted part of given, evaluated_at) over var's values
    std::size_t edge = 0;        // local network used for the evaluation
    HypothesisPoint evaluated_at;
    std::vector<std::size_t> path;  // edges walked, starting at one containing p
};

/// P(var | given, p) evaluated in the nearest local network that depicts
/// var, reached by a breadth-first walk over edges sharing a point. Given
/// variables depicted in an edge the walk passes through are independent of
/// var and are not conditioned on. Throws UndefinedConditional when the
/// conditioning event has probability 0 in the evaluating network.
ConditionalFactor conditional_factor(const SimilarityNetwork& s, const VarId& var, const Assignment& given,
                                     const HypothesisPoint& p);

/// Same as conditional_factor but along a caller-chosen path of edges. The
/// first edge must contain p, consecutive edges must share a point, and only
/// the last edge may depict var.
ConditionalFactor conditional_factor_along(const SimilarityNetwork& s, const VarId& var, const Assignment& given,
                                           const HypothesisPoint& p, const std::vector<std::size_t>& path);

/// Full joint over every variable (scope ascending id) assembled from the
/// recovered priors and chain-rule factors: hypothesis variables first, then
/// a topological order of the union of local arcs.
JointTable reconstruct_joint(const SimilarityNetwork& s, std::size_t cell_cap = kDefaultCellCap);

/// P(H | evidence) read off reconstruct_joint.
Factor simnet_posterior(const SimilarityNetwork& s, const Assignment& evidence,
                        std::size_t cell_cap = kDefaultCellCap);

/// Converts to a multinet: every local is completed with the variables it
/// does not depict, then disjoint edges are kept in index order and each
/// remaining point goes to the first edge containing it.
Multinet convert_to_multinet(const SimilarityNetwork& s);

struct RedundantParameter {
    VarId variable;
    HypothesisPoint point;
    std::vector<VarId> context;      // clue parents shared by the networks
    std::vector<std::size_t> edges;  // local networks specifying the cells
    double discrepancy = 0.0;        // max pairwise difference over all cells
    bool incoherent = false;         // discrepancy above 1e-6
    std::string label;               // e.g. "P(g | visitor)"
};

/// CPT cells specified by two or more local networks for the same variable,
/// hypothesis point, and clue parents. The cover need not be connected.
std::vector<RedundantParameter> redundancy_report(const SimilarityNetwork& s);

/// Incoherence tolerance for elicited duplicates and edge equations.
inline constexpr double kIncoherenceTolerance = 1e-6;

}  // namespace asymnet
