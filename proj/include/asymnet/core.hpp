#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asymnet/error.hpp"

namespace asymnet {

/// Absolute tolerance for every normalization and equality check on probabilities.
inline constexpr double kTolerance = 1e-9;

/// Default cap on the number of cells the joint-enumeration oracle will materialize.
inline constexpr std::size_t kDefaultCellCap = std::size_t{1} << 22;

using VarId = std::string;

/// A directed arc (from, to).
using Arc = std::pair<VarId, VarId>;

/// Binds variable ids to value indices.
using Assignment = std::map<VarId, std::size_t>;

struct Variable {
    VarId id;
    std::string name;
    std::vector<std::string> values;

    std::size_t cardinality() const noexcept { return values.size(); }
    std::optional<std::size_t> value_index(std::string_view label) const;

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Conditional probability table. Rows enumerate parent configurations in
/// row-major order over parent value indices (last parent fastest); each row
/// is a distribution over the child's values.
struct Cpt {
    VarId child;
    std::vector<VarId> parents;
    std::vector<std::vector<double>> rows;

    friend bool operator==(const Cpt&, const Cpt&) = default;
};

/// A DAG over finite-valued variables with one CPT per node.
///
/// Construction never throws on malformed content; use validate_network() to
/// obtain the list of violated invariants. Operations documented as requiring
/// a valid network throw ErrorCode::ContractViolation when handed an invalid one.
class DiscreteNetwork {
public:
    DiscreteNetwork() = default;
    DiscreteNetwork(std::vector<Variable> variables, std::set<Arc> arcs, std::vector<Cpt> cpts);

    /// Builds the arc set from the CPT parent lists.
    static DiscreteNetwork from_cpts(std::vector<Variable> variables, std::vector<Cpt> cpts);

    /// Variables sorted by id.
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::set<Arc>& arcs() const noexcept { return arcs_; }
    /// CPTs sorted by child id.
    const std::vector<Cpt>& cpts() const noexcept { return cpts_; }

    std::vector<VarId> ids() const;
    bool contains(const VarId& id) const noexcept;
    const Variable& variable(const VarId& id) const;
    std::size_t cardinality(const VarId& id) const;
    const Cpt* find_cpt(const VarId& id) const noexcept;
    const Cpt& cpt(const VarId& id) const;
    /// Parent list as stored in the variable's CPT.
    const std::vector<VarId>& parents(const VarId& id) const;
    /// Children derived from the arc set, ascending id.
    std::vector<VarId> children(const VarId& id) const;

    /// Row index of `child`'s CPT selected by the parent values in `a`.
    std::size_t row_index(const VarId& child, const Assignment& a) const;

    /// Number of cells of the full Cartesian domain, saturating at SIZE_MAX.
    std::size_t domain_size() const noexcept;

    friend bool operator==(const DiscreteNetwork& a, const DiscreteNetwork& b) {
        return a.variables_ == b.variables_ && a.arcs_ == b.arcs_ && a.cpts_ == b.cpts_;
    }

private:
    std::vector<Variable> variables_;
    std::set<Arc> arcs_;
    std::vector<Cpt> cpts_;
};

/// Dense table over the Cartesian domain of `scope` (row-major, last variable fastest).
struct JointTable {
    std::vector<VarId> scope;
    std::vector<std::size_t> cardinalities;
    std::vector<double> probabilities;

    std::size_t index_of(const Assignment& a) const;
    double at(const Assignment& a) const { return probabilities[index_of(a)]; }
    double total() const;
};

enum class ViolationKind {
    DuplicateVariable,
    EmptyValues,
    DuplicateValue,
    UnknownVariable,
    Cycle,
    MissingCpt,
    ExtraCpt,
    ParentMismatch,
    RowCount,
    RowLength,
    EntryRange,
    RowNormalization,
    // multinet / simnet
    NonPartition,
    PointOutsideDomain,
    BlockPriors,
    SupportLeakage,
    InvalidLocalNetwork,
    VariableMismatch,
    MissingHypothesisVariable,
    DisconnectedCover,
    UndepictedVariable,
    IrrelevantVariable,
    DepictedMismatch,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::string subject;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(ViolationKind kind) const noexcept;
    void add(ViolationKind kind, std::string subject, std::string message);
    /// Appends `other`'s violations with `prefix` prepended to each subject.
    void merge(const ValidationReport& other, const std::string& prefix);
    std::string to_string() const;
};

ValidationReport validate_network(const DiscreteNetwork& net);

/// Throws ValidationFailed carrying the report text when `net` is invalid.
void require_valid(const DiscreteNetwork& net);

/// Topological order with ties broken by ascending id. Throws Structural on a cycle.
std::vector<VarId> topological_order(const DiscreteNetwork& net);

/// Same ordering rule over an arbitrary node set and arc set.
std::vector<VarId> topological_order(const std::vector<VarId>& nodes, const std::set<Arc>& arcs);

/// True when `arcs` restricted to `nodes` contains a directed cycle.
bool has_cycle(const std::vector<VarId>& nodes, const std::set<Arc>& arcs);

/// Product of the CPT entries selected by a full assignment.
double joint_probability(const DiscreteNetwork& net, const Assignment& a);

/// Brute-force joint table over all variables (scope sorted by id).
JointTable enumerate_joint(const DiscreteNetwork& net, std::size_t cell_cap = kDefaultCellCap);

/// Standard d-separation test: is every path between `x` and `y` blocked by `z`?
bool d_separated(const DiscreteNetwork& net, const std::set<VarId>& x, const std::set<VarId>& y,
                 const std::set<VarId>& z);

/// Sum over variables of (cardinality - 1) * (product of parent cardinalities).
std::size_t free_parameter_count(const DiscreteNetwork& net);

/// All ancestors of `seeds`, including the seeds themselves.
std::set<VarId> ancestral_set(const DiscreteNetwork& net, const std::set<VarId>& seeds);

/// Sums `joint` down to `vars`, in the given order.
JointTable marginalize(const JointTable& joint, const std::vector<VarId>& vars);

/// Removes arcs whose child CPT does not depend on the parent across every
/// parent configuration of positive probability. Unreachable rows of a
/// shrunk table become uniform.
DiscreteNetwork drop_vacuous_arcs(const DiscreteNetwork& net, double tolerance = kTolerance,
                                  std::size_t cell_cap = kDefaultCellCap);

/// Row-major linear index over `cardinalities` (last position fastest).
std::size_t linear_index(std::span<const std::size_t> cardinalities,
                         std::span<const std::size_t> values);

/// Product of `cardinalities`, saturating at SIZE_MAX.
std::size_t domain_cells(std::span<const std::size_t> cardinalities) noexcept;

/// Advances `values` to the next configuration in row-major order; returns
/// false after the last configuration (values wrap to all-zero).
bool next_configuration(std::span<const std::size_t> cardinalities, std::span<std::size_t> values);

}  // namespace asymnet
