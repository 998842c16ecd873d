#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "asymnet/core.hpp"
#include "asymnet/factor.hpp"

namespace asymnet {

/// One element of domain(H): a value index per hypothesis variable, in the
/// order of HypothesisSpace::variables.
using HypothesisPoint = std::vector<std::size_t>;

/// The distinguished variables H and their joint domain.
///
/// A single hypothesis variable is the one-element case; points are then
/// one-element tuples.
struct HypothesisSpace {
    std::vector<Variable> variables;

    std::vector<VarId> ids() const;
    std::vector<std::size_t> cardinalities() const;
    bool contains(const VarId& id) const noexcept;

    /// |domain(H)|.
    std::size_t size() const noexcept;
    /// Row-major position of `p` in domain(H).
    std::size_t index_of(const HypothesisPoint& p) const;
    HypothesisPoint point_at(std::size_t index) const;
    /// All points in row-major order.
    std::vector<HypothesisPoint> domain() const;
    bool in_domain(const HypothesisPoint& p) const noexcept;

    /// Binds each hypothesis variable to the point's value.
    Assignment as_assignment(const HypothesisPoint& p) const;
    /// "spy" for one variable, "h1=s,h2=v" for several.
    std::string label(const HypothesisPoint& p) const;

    /// Factor over H with the given per-point values (length size()).
    Factor make_factor(std::vector<double> values) const;

    friend bool operator==(const HypothesisSpace&, const HypothesisSpace&) = default;
};

/// Reads hypothesis variables out of `net` by id.
HypothesisSpace hypothesis_space(const DiscreteNetwork& net, const std::vector<VarId>& ids);

/// Distinct values of hypothesis variable `k` among `points`, ascending.
std::vector<std::size_t> projected_values(const std::vector<HypothesisPoint>& points, std::size_t k);

/// True when every parent of a hypothesis variable in `net` is itself a
/// hypothesis variable.
bool hypotheses_upward_closed(const DiscreteNetwork& net, const HypothesisSpace& space);

/// Replaces the hypothesis-variable CPTs of `net` so that the joint over H
/// equals `weights` (one entry per domain point, normalized internally) while
/// every other CPT is unchanged. Requires hypotheses_upward_closed(net).
/// When the existing arcs among hypothesis variables cannot represent the
/// target, those variables are rewired into a complete DAG consistent with
/// their current topological order.
DiscreteNetwork set_hypothesis_distribution(const DiscreteNetwork& net, const HypothesisSpace& space,
                                            const std::vector<double>& weights);

/// Distribution over domain(H) encoded by `net`'s hypothesis CPTs (no evidence).
std::vector<double> hypothesis_distribution(const DiscreteNetwork& net, const HypothesisSpace& space);

}  // namespace asymnet
