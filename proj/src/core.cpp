#include "asymnet/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <sstream>

namespace asymnet {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ContractViolation: return "contract violation";
        case ErrorCode::Structural: return "structural error";
        case ErrorCode::Acyclicity: return "acyclicity error";
        case ErrorCode::Resource: return "resource error";
        case ErrorCode::InconsistentEvidence: return "inconsistent evidence";
        case ErrorCode::UndefinedLikelihood: return "undefined likelihood";
        case ErrorCode::UndefinedConditional: return "undefined conditional";
        case ErrorCode::ZeroPrior: return "zero prior";
        case ErrorCode::InconsistentSimnet: return "inconsistent similarity network";
        case ErrorCode::ValidationFailed: return "validation failed";
        case ErrorCode::Parse: return "parse error";
        case ErrorCode::Schema: return "schema error";
        case ErrorCode::Io: return "i/o error";
    }
    return "error";
}

std::string_view to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::DuplicateVariable: return "duplicate-variable";
        case ViolationKind::EmptyValues: return "empty-values";
        case ViolationKind::DuplicateValue: return "duplicate-value";
        case ViolationKind::UnknownVariable: return "unknown-variable";
        case ViolationKind::Cycle: return "cycle";
        case ViolationKind::MissingCpt: return "missing-cpt";
        case ViolationKind::ExtraCpt: return "extra-cpt";
        case ViolationKind::ParentMismatch: return "parent-mismatch";
        case ViolationKind::RowCount: return "row-count";
        case ViolationKind::RowLength: return "row-length";
        case ViolationKind::EntryRange: return "entry-range";
        case ViolationKind::RowNormalization: return "row-normalization";
        case ViolationKind::NonPartition: return "non-partition";
        case ViolationKind::PointOutsideDomain: return "point-outside-domain";
        case ViolationKind::BlockPriors: return "block-priors";
        case ViolationKind::SupportLeakage: return "support-leakage";
        case ViolationKind::InvalidLocalNetwork: return "invalid-local-network";
        case ViolationKind::VariableMismatch: return "variable-mismatch";
        case ViolationKind::MissingHypothesisVariable: return "missing-hypothesis-variable";
        case ViolationKind::DisconnectedCover: return "disconnected-cover";
        case ViolationKind::UndepictedVariable: return "undepicted-variable";
        case ViolationKind::IrrelevantVariable: return "irrelevant-variable";
        case ViolationKind::DepictedMismatch: return "depicted-mismatch";
    }
    return "violation";
}

std::optional<std::size_t> Variable::value_index(std::string_view label) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == label) return i;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// indexing helpers

std::size_t domain_cells(std::span<const std::size_t> cardinalities) noexcept {
    std::size_t cells = 1;
    for (std::size_t c : cardinalities) {
        if (c != 0 && cells > std::numeric_limits<std::size_t>::max() / c) {
            return std::numeric_limits<std::size_t>::max();
        }
        cells *= c;
    }
    return cells;
}

std::size_t linear_index(std::span<const std::size_t> cardinalities,
                         std::span<const std::size_t> values) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < cardinalities.size(); ++i) {
        index = index * cardinalities[i] + values[i];
    }
    return index;
}

bool next_configuration(std::span<const std::size_t> cardinalities, std::span<std::size_t> values) {
    for (std::size_t i = cardinalities.size(); i-- > 0;) {
        if (++values[i] < cardinalities[i]) return true;
        values[i] = 0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// DiscreteNetwork

DiscreteNetwork::DiscreteNetwork(std::vector<Variable> variables, std::set<Arc> arcs,
                                 std::vector<Cpt> cpts)
    : variables_(std::move(variables)), arcs_(std::move(arcs)), cpts_(std::move(cpts)) {
    std::stable_sort(variables_.begin(), variables_.end(),
                     [](const Variable& a, const Variable& b) { return a.id < b.id; });
    std::stable_sort(cpts_.begin(), cpts_.end(),
                     [](const Cpt& a, const Cpt& b) { return a.child < b.child; });
}

DiscreteNetwork DiscreteNetwork::from_cpts(std::vector<Variable> variables, std::vector<Cpt> cpts) {
    std::set<Arc> arcs;
    for (const Cpt& cpt : cpts) {
        for (const VarId& parent : cpt.parents) arcs.emplace(parent, cpt.child);
    }
    return DiscreteNetwork(std::move(variables), std::move(arcs), std::move(cpts));
}

std::vector<VarId> DiscreteNetwork::ids() const {
    std::vector<VarId> out;
    out.reserve(variables_.size());
    for (const Variable& v : variables_) out.push_back(v.id);
    return out;
}

bool DiscreteNetwork::contains(const VarId& id) const noexcept {
    auto it = std::lower_bound(variables_.begin(), variables_.end(), id,
                               [](const Variable& v, const VarId& key) { return v.id < key; });
    return it != variables_.end() && it->id == id;
}

const Variable& DiscreteNetwork::variable(const VarId& id) const {
    auto it = std::lower_bound(variables_.begin(), variables_.end(), id,
                               [](const Variable& v, const VarId& key) { return v.id < key; });
    if (it == variables_.end() || it->id != id) {
        fail(ErrorCode::ContractViolation, "unknown variable '" + id + "'");
    }
    return *it;
}

std::size_t DiscreteNetwork::cardinality(const VarId& id) const { return variable(id).cardinality(); }

const Cpt* DiscreteNetwork::find_cpt(const VarId& id) const noexcept {
    auto it = std::lower_bound(cpts_.begin(), cpts_.end(), id,
                               [](const Cpt& c, const VarId& key) { return c.child < key; });
    if (it == cpts_.end() || it->child != id) return nullptr;
    return &*it;
}

const Cpt& DiscreteNetwork::cpt(const VarId& id) const {
    const Cpt* found = find_cpt(id);
    if (found == nullptr) fail(ErrorCode::ContractViolation, "no CPT for variable '" + id + "'");
    return *found;
}

const std::vector<VarId>& DiscreteNetwork::parents(const VarId& id) const { return cpt(id).parents; }

std::vector<VarId> DiscreteNetwork::children(const VarId& id) const {
    std::vector<VarId> out;
    for (const auto& [from, to] : arcs_) {
        if (from == id) out.push_back(to);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t DiscreteNetwork::row_index(const VarId& child, const Assignment& a) const {
    std::size_t row = 0;
    for (const VarId& parent : parents(child)) {
        auto it = a.find(parent);
        if (it == a.end()) {
            fail(ErrorCode::ContractViolation,
                 "assignment does not bind parent '" + parent + "' of '" + child + "'");
        }
        row = row * cardinality(parent) + it->second;
    }
    return row;
}

std::size_t DiscreteNetwork::domain_size() const noexcept {
    std::vector<std::size_t> cards;
    for (const Variable& v : variables_) cards.push_back(v.cardinality());
    return domain_cells(cards);
}

// ---------------------------------------------------------------------------
// JointTable

std::size_t JointTable::index_of(const Assignment& a) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < scope.size(); ++i) {
        auto it = a.find(scope[i]);
        if (it == a.end() || it->second >= cardinalities[i]) {
            fail(ErrorCode::ContractViolation, "assignment is not a full assignment over the table scope");
        }
        index = index * cardinalities[i] + it->second;
    }
    return index;
}

double JointTable::total() const {
    double sum = 0.0;
    for (double p : probabilities) sum += p;
    return sum;
}

// ---------------------------------------------------------------------------
// ValidationReport

bool ValidationReport::has(ViolationKind kind) const noexcept {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

void ValidationReport::add(ViolationKind kind, std::string subject, std::string message) {
    violations.push_back({kind, std::move(subject), std::move(message)});
}

void ValidationReport::merge(const ValidationReport& other, const std::string& prefix) {
    for (const Violation& v : other.violations) {
        violations.push_back({v.kind, prefix + v.subject, v.message});
    }
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const Violation& v : violations) {
        os << asymnet::to_string(v.kind) << " [" << v.subject << "]: " << v.message << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// graph utilities

bool has_cycle(const std::vector<VarId>& nodes, const std::set<Arc>& arcs) {
    std::map<VarId, std::size_t> indegree;
    std::map<VarId, std::vector<VarId>> out;
    for (const VarId& n : nodes) indegree[n] = 0;
    for (const auto& [from, to] : arcs) {
        if (!indegree.contains(from) || !indegree.contains(to)) continue;
        out[from].push_back(to);
        ++indegree[to];
    }
    std::deque<VarId> ready;
    for (const auto& [n, d] : indegree) {
        if (d == 0) ready.push_back(n);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        VarId n = ready.front();
        ready.pop_front();
        ++visited;
        for (const VarId& m : out[n]) {
            if (--indegree[m] == 0) ready.push_back(m);
        }
    }
    return visited != indegree.size();
}

std::vector<VarId> topological_order(const std::vector<VarId>& nodes, const std::set<Arc>& arcs) {
    std::map<VarId, std::size_t> indegree;
    std::map<VarId, std::vector<VarId>> out;
    for (const VarId& n : nodes) indegree[n] = 0;
    for (const auto& [from, to] : arcs) {
        if (!indegree.contains(from) || !indegree.contains(to)) continue;
        out[from].push_back(to);
        ++indegree[to];
    }
    // min-heap on id gives the ascending-id tie break
    std::priority_queue<VarId, std::vector<VarId>, std::greater<>> ready;
    for (const auto& [n, d] : indegree) {
        if (d == 0) ready.push(n);
    }
    std::vector<VarId> order;
    order.reserve(indegree.size());
    while (!ready.empty()) {
        VarId n = ready.top();
        ready.pop();
        order.push_back(n);
        for (const VarId& m : out[n]) {
            if (--indegree[m] == 0) ready.push(m);
        }
    }
    if (order.size() != indegree.size()) {
        fail(ErrorCode::Structural, "graph contains a directed cycle");
    }
    return order;
}

std::vector<VarId> topological_order(const DiscreteNetwork& net) {
    return topological_order(net.ids(), net.arcs());
}

std::set<VarId> ancestral_set(const DiscreteNetwork& net, const std::set<VarId>& seeds) {
    std::set<VarId> result;
    std::vector<VarId> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
        VarId v = stack.back();
        stack.pop_back();
        if (!result.insert(v).second) continue;
        for (const auto& [from, to] : net.arcs()) {
            if (to == v && !result.contains(from)) stack.push_back(from);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// validation

ValidationReport validate_network(const DiscreteNetwork& net) {
    ValidationReport report;
    const auto& vars = net.variables();

    for (std::size_t i = 0; i < vars.size(); ++i) {
        const Variable& v = vars[i];
        if (i > 0 && vars[i - 1].id == v.id) {
            report.add(ViolationKind::DuplicateVariable, v.id, "variable id declared more than once");
        }
        if (v.values.empty()) {
            report.add(ViolationKind::EmptyValues, v.id, "variable has no values");
        }
        std::set<std::string> labels(v.values.begin(), v.values.end());
        if (labels.size() != v.values.size()) {
            report.add(ViolationKind::DuplicateValue, v.id, "value labels are not distinct");
        }
    }

    for (const auto& [from, to] : net.arcs()) {
        for (const VarId& end : {from, to}) {
            if (!net.contains(end)) {
                report.add(ViolationKind::UnknownVariable, from + "->" + to,
                           "arc endpoint '" + end + "' is not a declared variable");
            }
        }
    }
    if (has_cycle(net.ids(), net.arcs())) {
        report.add(ViolationKind::Cycle, "arcs", "arc set contains a directed cycle");
    }

    const auto& cpts = net.cpts();
    for (std::size_t i = 0; i < cpts.size(); ++i) {
        const Cpt& cpt = cpts[i];
        if (!net.contains(cpt.child)) {
            report.add(ViolationKind::ExtraCpt, cpt.child, "CPT for an undeclared variable");
            continue;
        }
        if (i > 0 && cpts[i - 1].child == cpt.child) {
            report.add(ViolationKind::ExtraCpt, cpt.child, "variable has more than one CPT");
            continue;
        }

        std::set<VarId> declared(cpt.parents.begin(), cpt.parents.end());
        std::set<VarId> in_neighbors;
        for (const auto& [from, to] : net.arcs()) {
            if (to == cpt.child) in_neighbors.insert(from);
        }
        if (declared.size() != cpt.parents.size() || declared != in_neighbors) {
            report.add(ViolationKind::ParentMismatch, cpt.child,
                       "CPT parent list does not match the variable's in-neighbors");
        }

        bool parents_known = true;
        std::size_t expected_rows = 1;
        for (const VarId& p : cpt.parents) {
            if (!net.contains(p)) {
                parents_known = false;
                report.add(ViolationKind::UnknownVariable, cpt.child,
                           "CPT parent '" + p + "' is not a declared variable");
                continue;
            }
            expected_rows *= net.cardinality(p);
        }
        if (parents_known && cpt.rows.size() != expected_rows) {
            report.add(ViolationKind::RowCount, cpt.child,
                       "expected " + std::to_string(expected_rows) + " rows, found " +
                           std::to_string(cpt.rows.size()));
        }
        const std::size_t card = net.cardinality(cpt.child);
        for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
            const auto& row = cpt.rows[r];
            const std::string where = cpt.child + " row " + std::to_string(r);
            if (row.size() != card) {
                report.add(ViolationKind::RowLength, where,
                           "expected " + std::to_string(card) + " entries, found " +
                               std::to_string(row.size()));
                continue;
            }
            double sum = 0.0;
            bool in_range = true;
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0)) in_range = false;
                sum += p;
            }
            if (!in_range) report.add(ViolationKind::EntryRange, where, "entry outside [0, 1]");
            if (!(std::abs(sum - 1.0) <= kTolerance)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "row sums to " << sum;
                report.add(ViolationKind::RowNormalization, where, msg.str());
            }
        }
    }
    for (const Variable& v : vars) {
        if (net.find_cpt(v.id) == nullptr) {
            report.add(ViolationKind::MissingCpt, v.id, "variable has no CPT");
        }
    }
    return report;
}

void require_valid(const DiscreteNetwork& net) {
    ValidationReport report = validate_network(net);
    if (!report.ok()) fail(ErrorCode::ValidationFailed, "invalid network:\n" + report.to_string());
}

// ---------------------------------------------------------------------------
// joint

double joint_probability(const DiscreteNetwork& net, const Assignment& a) {
    for (const Variable& v : net.variables()) {
        auto it = a.find(v.id);
        if (it == a.end()) {
            fail(ErrorCode::ContractViolation, "partial assignment: '" + v.id + "' is unbound");
        }
        if (it->second >= v.cardinality()) {
            fail(ErrorCode::ContractViolation, "value index out of range for '" + v.id + "'");
        }
    }
    double p = 1.0;
    for (const Variable& v : net.variables()) {
        const Cpt& cpt = net.cpt(v.id);
        p *= cpt.rows[net.row_index(v.id, a)][a.at(v.id)];
    }
    return p;
}

JointTable enumerate_joint(const DiscreteNetwork& net, std::size_t cell_cap) {
    require_valid(net);
    JointTable table;
    table.scope = net.ids();
    for (const Variable& v : net.variables()) table.cardinalities.push_back(v.cardinality());
    const std::size_t cells = domain_cells(table.cardinalities);
    if (cells > cell_cap) {
        fail(ErrorCode::Resource, "joint domain has " + std::to_string(cells) +
                                      " cells, exceeding the cap of " + std::to_string(cell_cap));
    }
    table.probabilities.resize(cells);

    // Same arithmetic as joint_probability: product over variables in id order.
    const std::size_t n = table.scope.size();
    std::vector<std::size_t> values(n, 0);
    Assignment a;
    for (const VarId& id : table.scope) a[id] = 0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        for (std::size_t i = 0; i < n; ++i) a[table.scope[i]] = values[i];
        table.probabilities[cell] = joint_probability(net, a);
        next_configuration(table.cardinalities, values);
    }
    return table;
}

// ---------------------------------------------------------------------------
// d-separation (reachability formulation)

bool d_separated(const DiscreteNetwork& net, const std::set<VarId>& x, const std::set<VarId>& y,
                 const std::set<VarId>& z) {
    if (x.empty() || y.empty()) fail(ErrorCode::ContractViolation, "d_separated needs nonempty X and Y");
    for (const auto* set : {&x, &y, &z}) {
        for (const VarId& id : *set) {
            if (!net.contains(id)) fail(ErrorCode::ContractViolation, "unknown variable '" + id + "'");
        }
    }
    auto overlaps = [](const std::set<VarId>& a, const std::set<VarId>& b) {
        return std::any_of(a.begin(), a.end(), [&](const VarId& v) { return b.contains(v); });
    };
    if (overlaps(x, y) || overlaps(x, z) || overlaps(y, z)) {
        fail(ErrorCode::ContractViolation, "d_separated needs pairwise disjoint X, Y, Z");
    }

    std::map<VarId, std::vector<VarId>> parents;
    std::map<VarId, std::vector<VarId>> children;
    for (const auto& [from, to] : net.arcs()) {
        children[from].push_back(to);
        parents[to].push_back(from);
    }
    const std::set<VarId> z_ancestors = ancestral_set(net, z);

    enum class Direction { Up, Down };  // Up: arrived from a child; Down: arrived from a parent
    std::set<std::pair<VarId, Direction>> visited;
    std::vector<std::pair<VarId, Direction>> pending;
    for (const VarId& id : x) pending.emplace_back(id, Direction::Up);

    while (!pending.empty()) {
        auto [node, dir] = pending.back();
        pending.pop_back();
        if (!visited.emplace(node, dir).second) continue;
        const bool observed = z.contains(node);
        if (!observed && y.contains(node)) return false;

        if (dir == Direction::Up && !observed) {
            for (const VarId& p : parents[node]) pending.emplace_back(p, Direction::Up);
            for (const VarId& c : children[node]) pending.emplace_back(c, Direction::Down);
        } else if (dir == Direction::Down) {
            if (!observed) {
                for (const VarId& c : children[node]) pending.emplace_back(c, Direction::Down);
            }
            // v-structure: active when the collider or one of its descendants is observed
            if (z_ancestors.contains(node)) {
                for (const VarId& p : parents[node]) pending.emplace_back(p, Direction::Up);
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// parameters

std::size_t free_parameter_count(const DiscreteNetwork& net) {
    require_valid(net);
    std::size_t total = 0;
    for (const Variable& v : net.variables()) {
        std::size_t configs = 1;
        for (const VarId& p : net.parents(v.id)) configs *= net.cardinality(p);
        total += (v.cardinality() - 1) * configs;
    }
    return total;
}

// ---------------------------------------------------------------------------
// vacuous arcs

namespace {

// Marginal probability of each configuration of `scope` under `joint`.

bool rows_equal(const std::vector<double>& a, const std::vector<double>& b, double tolerance) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tolerance) return false;
    }
    return true;
}

}  // namespace

JointTable marginalize(const JointTable& joint, const std::vector<VarId>& vars) {
    JointTable out;
    out.scope = vars;
    std::vector<std::size_t> positions;
    for (const VarId& id : vars) {
        auto it = std::find(joint.scope.begin(), joint.scope.end(), id);
        if (it == joint.scope.end()) fail(ErrorCode::ContractViolation, "'" + id + "' is not in the table scope");
        positions.push_back(static_cast<std::size_t>(it - joint.scope.begin()));
        out.cardinalities.push_back(joint.cardinalities[positions.back()]);
    }
    out.probabilities.assign(domain_cells(out.cardinalities), 0.0);
    std::vector<std::size_t> values(joint.scope.size(), 0);
    std::vector<std::size_t> projected(vars.size(), 0);
    for (double p : joint.probabilities) {
        for (std::size_t i = 0; i < positions.size(); ++i) projected[i] = values[positions[i]];
        out.probabilities[linear_index(out.cardinalities, projected)] += p;
        next_configuration(joint.cardinalities, values);
    }
    return out;
}

DiscreteNetwork drop_vacuous_arcs(const DiscreteNetwork& net, double tolerance, std::size_t cell_cap) {
    const JointTable joint = enumerate_joint(net, cell_cap);
    std::vector<Cpt> cpts = net.cpts();

    for (Cpt& cpt : cpts) {
        std::size_t k = 0;
        while (k < cpt.parents.size()) {
            std::vector<std::size_t> cards;
            for (const VarId& p : cpt.parents) cards.push_back(net.cardinality(p));
            const std::vector<double> mass = marginalize(joint, cpt.parents).probabilities;

            std::vector<std::size_t> reduced_cards = cards;
            reduced_cards.erase(reduced_cards.begin() + static_cast<std::ptrdiff_t>(k));
            const std::size_t reduced_rows = domain_cells(reduced_cards);
            std::vector<std::optional<std::size_t>> representative(reduced_rows);

            bool vacuous = true;
            std::vector<std::size_t> values(cards.size(), 0);
            for (std::size_t row = 0; row < cpt.rows.size(); ++row) {
                if (mass[row] > 0.0) {
                    std::vector<std::size_t> reduced = values;
                    reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(k));
                    const std::size_t target = linear_index(reduced_cards, reduced);
                    if (!representative[target]) {
                        representative[target] = row;
                    } else if (!rows_equal(cpt.rows[*representative[target]], cpt.rows[row], tolerance)) {
                        vacuous = false;
                        break;
                    }
                }
                next_configuration(cards, values);
            }
            if (!vacuous) {
                ++k;
                continue;
            }
            const std::size_t card = net.cardinality(cpt.child);
            std::vector<std::vector<double>> rows(reduced_rows);
            for (std::size_t r = 0; r < reduced_rows; ++r) {
                rows[r] = representative[r] ? cpt.rows[*representative[r]]
                                            : std::vector<double>(card, 1.0 / static_cast<double>(card));
            }
            cpt.rows = std::move(rows);
            cpt.parents.erase(cpt.parents.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    return DiscreteNetwork::from_cpts(net.variables(), std::move(cpts));
}

}  // namespace asymnet
