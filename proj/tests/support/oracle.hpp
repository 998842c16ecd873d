#pragma once

// Brute-force references computed straight from the CPT entries. Nothing
// here calls the library's inference, factor or enumeration code.

#include <map>
#include <string>
#include <vector>

#include "asymnet/core.hpp"
#include "asymnet/multinet.hpp"

namespace asymnet::testing {

/// Joint over all variables, scope ascending id, row-major (last fastest).
struct DenseJoint {
    std::vector<VarId> scope;
    std::vector<std::size_t> cards;
    std::vector<double> p;

    std::size_t cells() const { return p.size(); }
    /// Values of each scope variable in cell `index`.
    std::vector<std::size_t> decode(std::size_t index) const;
    double at(const std::map<VarId, std::size_t>& full) const;
};

DenseJoint brute_joint(const DiscreteNetwork& net);

/// sum_i block_priors[i] * joint of locals[i].
DenseJoint brute_mixture(const Multinet& m);

/// P(targets | evidence) in row-major order over `targets`. Returns an empty
/// vector when the evidence has zero probability.
std::vector<double> brute_posterior(const DenseJoint& joint, const std::vector<VarId>& targets,
                                    const std::map<VarId, std::size_t>& evidence);

/// Max |a - b| after aligning b to a's scope. Scopes must hold the same variables.
double max_difference(const DenseJoint& a, const JointTable& b);
double max_difference(const DenseJoint& a, const DenseJoint& b);

/// Numerical conditional independence of x and y given z.
bool independent(const DenseJoint& joint, const std::vector<VarId>& x, const std::vector<VarId>& y,
                 const std::vector<VarId>& z, double tolerance = 1e-9);

}  // namespace asymnet::testing
