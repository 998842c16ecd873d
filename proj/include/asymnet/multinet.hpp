#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "asymnet/core.hpp"
#include "asymnet/factor.hpp"
#include "asymnet/hypothesis.hpp"
#include "asymnet/inference.hpp"

namespace asymnet {

/// A partition of domain(H) with one local network of P(all variables | A_i)
/// per block and a prior over blocks.
struct Multinet {
    HypothesisSpace hypothesis;
    std::vector<std::vector<HypothesisPoint>> blocks;
    std::vector<DiscreteNetwork> locals;
    std::vector<double> block_priors;

    /// Index of the block containing `p`; throws ContractViolation if none does.
    std::size_t block_of(const HypothesisPoint& p) const;

    friend bool operator==(const Multinet&, const Multinet&) = default;
};

ValidationReport validate_multinet(const Multinet& m);

/// Throws ValidationFailed carrying the report text when `m` is invalid.
void require_valid(const Multinet& m);

/// block_priors[i] * P(p | A_i).
double hypothesis_prior(const Multinet& m, const HypothesisPoint& p);

/// hypothesis_prior for every point of domain(H), in domain order.
std::vector<double> hypothesis_priors(const Multinet& m);

/// P(evidence | p), computed in the local network of p's block.
/// Throws UndefinedLikelihood when P(p | A_i) = 0.
double likelihood(const Multinet& m, const HypothesisPoint& p, const Assignment& evidence);

struct MultinetPosterior {
    Factor distribution;  // over the hypothesis variables, full domain(H)
    std::size_t multiplications = 0;
};

/// P(H | evidence) by combining each block's likelihoods with the priors.
///
/// One elimination runs per block with the hypothesis variables restricted to
/// the block's values; the count adds one multiplication per point for
/// prior x likelihood. Priors are taken as precomputed and are not counted.
MultinetPosterior posterior(const Multinet& m, const Assignment& evidence);

/// Replaces the priors over domain(H) by `weights` (normalized internally):
/// block priors become block sums and each block's hypothesis conditional is
/// rescaled. A block receiving zero mass keeps its old conditional.
Multinet with_hypothesis_priors(const Multinet& m, const std::vector<double>& weights);

/// Revises the hypothesis priors with `prior_net` under `apriori_evidence`,
/// then queries the revised multinet with `clue_evidence`.
MultinetPosterior staged_posterior(const DiscreteNetwork& prior_net, const Multinet& m,
                                   const Assignment& apriori_evidence, const Assignment& clue_evidence);

/// The blockwise mixture sum_i block_priors[i] * P_i over all variables.
JointTable mixture_joint(const Multinet& m, std::size_t cell_cap = kDefaultCellCap);

/// Single network equivalent to `m`: the union of local arcs plus
/// hypothesis arcs where a variable's table depends on the block.
/// Rows conditioned on zero-probability contexts are uniform and reported.
Transformed union_network(const Multinet& m, std::size_t cell_cap = kDefaultCellCap);

/// One network of P(all variables | points), assembled from the blocks that
/// intersect `points` the same way union_network assembles the whole multinet.
Transformed conditional_network(const Multinet& m, const std::vector<HypothesisPoint>& points,
                                std::size_t cell_cap = kDefaultCellCap);

/// (blocks - 1) plus each local network's free parameters, with hypothesis
/// variables counted only over the values their block supports.
std::size_t multinet_param_count(const Multinet& m);

/// Wraps a single network as a one-block multinet.
Multinet single_block_multinet(const DiscreteNetwork& net, const std::vector<VarId>& hypothesis_ids);

}  // namespace asymnet
