#pragma once

#include <cstddef>
#include <vector>

#include "asymnet/core.hpp"

namespace asymnet {

/// Nonnegative table over the Cartesian domain of `scope` (row-major, last variable fastest).
///
/// `cardinalities` are the factor's own: a variable restricted to a subset of
/// its values carries the subset size here, and `value_map` records which
/// original value index each position stands for.
struct Factor {
    std::vector<VarId> scope;
    std::vector<std::size_t> cardinalities;
    std::vector<double> values;
    /// Per-scope-variable mapping from factor position to original value index;
    /// an empty inner vector means the identity mapping.
    std::vector<std::vector<std::size_t>> value_map;

    static Factor scalar(double value);
    static Factor from_cpt(const DiscreteNetwork& net, const VarId& child);

    std::size_t size() const noexcept { return values.size(); }
    bool has(const VarId& id) const noexcept;
    std::size_t position(const VarId& id) const;
    /// Original value index for factor position `pos` of scope variable `var_pos`.
    std::size_t original_value(std::size_t var_pos, std::size_t pos) const;
    /// Value at an assignment expressed in original value indices.
    double at(const Assignment& a) const;
    double sum() const;
};

/// Counts scalar multiplications performed by factor products.
struct MultiplicationCounter {
    std::size_t count = 0;
};

/// Pointwise product; adds the result size to `counter`.
Factor multiply(const Factor& a, const Factor& b, MultiplicationCounter& counter);

/// Sums `id` out of `f`.
Factor sum_out(const Factor& f, const VarId& id);

/// Slices `f` at the evidence values of every evidence variable in its scope.
Factor reduce(const Factor& f, const Assignment& evidence);

/// Keeps only the listed original values of `id` (in the given order).
Factor restrict_values(const Factor& f, const VarId& id, const std::vector<std::size_t>& kept);

/// Reorders the scope to `order`, which must be a permutation of the scope.
Factor reorder(const Factor& f, const std::vector<VarId>& order);

/// Divides by the total mass; returns false (leaving `f` unchanged) when the mass is zero.
bool normalize(Factor& f);

}  // namespace asymnet
