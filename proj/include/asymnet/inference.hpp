#pragma once

#include <string>
#include <vector>

#include "asymnet/core.hpp"
#include "asymnet/factor.hpp"

namespace asymnet {

struct EliminationOrder {
    std::vector<VarId> sequence;
};

/// Greedy min-degree order over the interaction graph of `scopes`, eliminating
/// every variable not listed in `keep`. Ties go to the smallest id.
EliminationOrder min_degree_order(const std::vector<std::vector<VarId>>& scopes,
                                  const std::vector<VarId>& keep);

struct EliminationResult {
    Factor factor;  // shaped like the frame, unnormalized
    std::size_t multiplications = 0;
};

/// Sums every variable outside `frame.scope` out of the product of `factors`.
///
/// `frame` fixes the result's scope order, cardinalities and value maps; its
/// values are ignored. Frame variables no factor mentions are broadcast
/// (constant) in the result. Products inside a bucket are taken smallest
/// factor first.
EliminationResult eliminate(std::vector<Factor> factors, const Factor& frame);

/// All-ones frame over `vars` at their full cardinalities in `net`.
Factor frame_for(const DiscreteNetwork& net, const std::vector<VarId>& vars);

/// P(targets | evidence) by variable elimination over the ancestral set of
/// targets and evidence. Throws InconsistentEvidence when P(evidence) = 0.
Factor marginal(const DiscreteNetwork& net, const std::vector<VarId>& targets, const Assignment& evidence);

/// Unnormalized P(evidence): the product of all CPTs summed over every
/// unbound variable. Returns 1 for empty evidence.
double probability_of(const DiscreteNetwork& net, const Assignment& evidence);

struct Posterior {
    Factor distribution;
    std::size_t multiplications = 0;
};

/// Single-hypothesis posterior; same numbers as marginal(net, {h}, evidence)
/// plus the scalar multiplication count of the elimination.
Posterior posterior_chain(const DiscreteNetwork& net, const VarId& h, const Assignment& evidence);

/// marginal over several targets, with the multiplication count.
Posterior posterior_over(const DiscreteNetwork& net, const std::vector<VarId>& targets, const Assignment& evidence);

/// A network produced by a transformation that may need to fill undefined rows.
struct Transformed {
    DiscreteNetwork network;
    std::vector<std::string> warnings;
};

/// Reverses arc (x, y) by Bayes' rule. Both endpoints inherit the other's
/// parents. Rows conditioned on zero-probability configurations become
/// uniform and are reported in `warnings`.
Transformed reverse_arc(const DiscreteNetwork& net, const VarId& x, const VarId& y);

/// Reverses arcs into `h` until it is a root, always taking the parent that
/// comes last in topological order.
Transformed repeated_reversal_to_root(const DiscreteNetwork& net, const VarId& h);

}  // namespace asymnet
