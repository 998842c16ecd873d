#include "asymnet/inference.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace asymnet {

EliminationOrder min_degree_order(const std::vector<std::vector<VarId>>& scopes,
                                  const std::vector<VarId>& keep) {
    std::map<VarId, std::set<VarId>> graph;
    for (const auto& scope : scopes) {
        for (const VarId& a : scope) {
            graph[a];
            for (const VarId& b : scope) {
                if (a != b) graph[a].insert(b);
            }
        }
    }
    const std::set<VarId> kept(keep.begin(), keep.end());
    EliminationOrder order;
    while (true) {
        const VarId* best = nullptr;
        std::size_t best_degree = 0;
        for (const auto& [id, neighbors] : graph) {  // ascending id: first minimum wins ties
            if (kept.contains(id)) continue;
            if (best == nullptr || neighbors.size() < best_degree) {
                best = &id;
                best_degree = neighbors.size();
            }
        }
        if (best == nullptr) break;
        const VarId chosen = *best;
        const std::set<VarId> neighbors = graph[chosen];
        for (const VarId& a : neighbors) {
            graph[a].erase(chosen);
            for (const VarId& b : neighbors) {
                if (a != b) graph[a].insert(b);
            }
        }
        graph.erase(chosen);
        order.sequence.push_back(chosen);
    }
    return order;
}

namespace {

Factor product_of(std::vector<Factor> factors, MultiplicationCounter& counter) {
    if (factors.empty()) return Factor::scalar(1.0);
    std::stable_sort(factors.begin(), factors.end(),
                     [](const Factor& a, const Factor& b) { return a.size() < b.size(); });
    Factor acc = std::move(factors.front());
    for (std::size_t i = 1; i < factors.size(); ++i) acc = multiply(acc, factors[i], counter);
    return acc;
}

// Copies `f` into the frame's shape; frame variables absent from `f` are constant.
Factor broadcast(const Factor& f, const Factor& frame) {
    Factor out;
    out.scope = frame.scope;
    out.cardinalities = frame.cardinalities;
    out.value_map = frame.value_map;
    out.value_map.resize(out.scope.size());
    out.values.resize(domain_cells(out.cardinalities));

    std::vector<std::size_t> positions;  // frame position of each f variable
    for (const VarId& id : f.scope) {
        auto it = std::find(frame.scope.begin(), frame.scope.end(), id);
        if (it == frame.scope.end()) {
            fail(ErrorCode::ContractViolation, "eliminated result still mentions '" + id + "'");
        }
        const auto k = static_cast<std::size_t>(it - frame.scope.begin());
        if (f.cardinalities[positions.size()] != frame.cardinalities[k]) {
            fail(ErrorCode::ContractViolation, "frame cardinality mismatch for '" + id + "'");
        }
        positions.push_back(k);
    }
    std::vector<std::size_t> values(out.scope.size(), 0);
    std::vector<std::size_t> projected(f.scope.size(), 0);
    for (double& v : out.values) {
        for (std::size_t i = 0; i < positions.size(); ++i) projected[i] = values[positions[i]];
        v = f.values[linear_index(f.cardinalities, projected)];
        next_configuration(out.cardinalities, values);
    }
    return out;
}

void check_query(const DiscreteNetwork& net, const std::vector<VarId>& targets, const Assignment& evidence) {
    require_valid(net);
    if (targets.empty()) fail(ErrorCode::ContractViolation, "query needs at least one target");
    std::set<VarId> seen;
    for (const VarId& t : targets) {
        if (!net.contains(t)) fail(ErrorCode::ContractViolation, "unknown target '" + t + "'");
        if (!seen.insert(t).second) fail(ErrorCode::ContractViolation, "duplicate target '" + t + "'");
        if (evidence.contains(t)) fail(ErrorCode::ContractViolation, "target '" + t + "' is also evidence");
    }
    for (const auto& [id, value] : evidence) {
        if (!net.contains(id)) fail(ErrorCode::ContractViolation, "unknown evidence variable '" + id + "'");
        if (value >= net.cardinality(id)) {
            fail(ErrorCode::ContractViolation, "evidence value out of range for '" + id + "'");
        }
    }
}

Posterior run_query(const DiscreteNetwork& net, const std::vector<VarId>& targets, const Assignment& evidence) {
    check_query(net, targets, evidence);
    std::set<VarId> seeds(targets.begin(), targets.end());
    for (const auto& [id, value] : evidence) seeds.insert(id);
    const std::set<VarId> relevant = ancestral_set(net, seeds);

    std::vector<Factor> factors;
    for (const VarId& id : relevant) factors.push_back(reduce(Factor::from_cpt(net, id), evidence));

    EliminationResult result = eliminate(std::move(factors), frame_for(net, targets));
    if (!normalize(result.factor)) {
        fail(ErrorCode::InconsistentEvidence, "evidence has probability zero under the model");
    }
    return {std::move(result.factor), result.multiplications};
}

}  // namespace

Factor frame_for(const DiscreteNetwork& net, const std::vector<VarId>& vars) {
    Factor frame;
    frame.scope = vars;
    for (const VarId& id : vars) frame.cardinalities.push_back(net.cardinality(id));
    frame.value_map.resize(vars.size());
    frame.values.assign(domain_cells(frame.cardinalities), 1.0);
    return frame;
}

EliminationResult eliminate(std::vector<Factor> factors, const Factor& frame) {
    std::vector<std::vector<VarId>> scopes;
    for (const Factor& f : factors) scopes.push_back(f.scope);
    const EliminationOrder order = min_degree_order(scopes, frame.scope);

    MultiplicationCounter counter;
    for (const VarId& id : order.sequence) {
        std::vector<Factor> bucket;
        std::vector<Factor> rest;
        for (Factor& f : factors) (f.has(id) ? bucket : rest).push_back(std::move(f));
        rest.push_back(sum_out(product_of(std::move(bucket), counter), id));
        factors = std::move(rest);
    }
    const Factor result = product_of(std::move(factors), counter);
    return {broadcast(result, frame), counter.count};
}

Factor marginal(const DiscreteNetwork& net, const std::vector<VarId>& targets, const Assignment& evidence) {
    return run_query(net, targets, evidence).distribution;
}

double probability_of(const DiscreteNetwork& net, const Assignment& evidence) {
    require_valid(net);
    std::set<VarId> seeds;
    for (const auto& [id, value] : evidence) {
        if (!net.contains(id)) fail(ErrorCode::ContractViolation, "unknown evidence variable '" + id + "'");
        if (value >= net.cardinality(id)) {
            fail(ErrorCode::ContractViolation, "evidence value out of range for '" + id + "'");
        }
        seeds.insert(id);
    }
    std::vector<Factor> factors;
    for (const VarId& id : ancestral_set(net, seeds)) factors.push_back(reduce(Factor::from_cpt(net, id), evidence));
    return eliminate(std::move(factors), Factor::scalar(1.0)).factor.values.at(0);
}

Posterior posterior_chain(const DiscreteNetwork& net, const VarId& h, const Assignment& evidence) {
    return run_query(net, {h}, evidence);
}

Posterior posterior_over(const DiscreteNetwork& net, const std::vector<VarId>& targets, const Assignment& evidence) {
    return run_query(net, targets, evidence);
}

// ---------------------------------------------------------------------------
// arc reversal

namespace {

bool reachable_without(const DiscreteNetwork& net, const VarId& from, const VarId& to, const Arc& skipped) {
    std::set<VarId> seen;
    std::vector<VarId> stack{from};
    while (!stack.empty()) {
        VarId v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        if (!seen.insert(v).second) continue;
        for (const auto& arc : net.arcs()) {
            if (arc.first == v && arc != skipped) stack.push_back(arc.second);
        }
    }
    return false;
}

std::vector<std::vector<double>> rows_from(const Factor& f, std::size_t child_card) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < f.values.size(); i += child_card) {
        rows.emplace_back(f.values.begin() + static_cast<std::ptrdiff_t>(i),
                          f.values.begin() + static_cast<std::ptrdiff_t>(i + child_card));
    }
    return rows;
}

}  // namespace

Transformed reverse_arc(const DiscreteNetwork& net, const VarId& x, const VarId& y) {
    require_valid(net);
    if (!net.arcs().contains({x, y})) {
        fail(ErrorCode::ContractViolation, "no arc " + x + " -> " + y + " to reverse");
    }
    if (reachable_without(net, x, y, {x, y})) {
        fail(ErrorCode::Acyclicity, "reversing " + x + " -> " + y + " would create a cycle: another directed path exists");
    }

    const std::vector<VarId>& x_parents = net.parents(x);
    std::vector<VarId> y_others;
    for (const VarId& p : net.parents(y)) {
        if (p != x) y_others.push_back(p);
    }
    auto contains = [](const std::vector<VarId>& v, const VarId& id) {
        return std::find(v.begin(), v.end(), id) != v.end();
    };
    std::vector<VarId> new_y_parents = y_others;
    for (const VarId& p : x_parents) {
        if (!contains(new_y_parents, p)) new_y_parents.push_back(p);
    }
    std::vector<VarId> new_x_parents = x_parents;
    for (const VarId& p : y_others) {
        if (!contains(new_x_parents, p)) new_x_parents.push_back(p);
    }
    new_x_parents.push_back(y);

    MultiplicationCounter counter;
    const Factor joint = multiply(Factor::from_cpt(net, x), Factor::from_cpt(net, y), counter);
    const Factor y_marginal = sum_out(joint, x);  // P(y | A u B)

    std::vector<VarId> y_scope = new_y_parents;
    y_scope.push_back(y);
    const Factor y_table = reorder(y_marginal, y_scope);

    std::vector<VarId> x_scope = new_x_parents;
    x_scope.push_back(x);
    Factor x_table = reorder(joint, x_scope);

    // divide P(x, y | A u B) by P(y | A u B), row by row
    Transformed out;
    const std::size_t x_card = net.cardinality(x);
    std::vector<std::size_t> y_cards;
    for (const VarId& id : y_scope) y_cards.push_back(net.cardinality(id));
    std::vector<std::size_t> cards = x_table.cardinalities;
    std::vector<std::size_t> values(cards.size(), 0);
    std::vector<std::size_t> y_values(y_scope.size(), 0);
    for (std::size_t row = 0; row * x_card < x_table.values.size(); ++row) {
        for (std::size_t i = 0; i < y_scope.size(); ++i) {
            const auto k = static_cast<std::size_t>(
                std::find(x_scope.begin(), x_scope.end(), y_scope[i]) - x_scope.begin());
            y_values[i] = values[k];
        }
        const double denominator = y_table.values[linear_index(y_cards, y_values)];
        for (std::size_t v = 0; v < x_card; ++v) {
            double& cell = x_table.values[row * x_card + v];
            cell = denominator > 0.0 ? cell / denominator : 1.0 / static_cast<double>(x_card);
        }
        if (!(denominator > 0.0)) {
            out.warnings.push_back("reverse_arc(" + x + ", " + y + "): row " + std::to_string(row) + " of '" + x +
                                   "' conditions on a zero-probability configuration; set uniform");
        }
        // advance past the x position (last) to the next parent configuration
        values.back() = x_card - 1;
        next_configuration(cards, values);
    }

    std::vector<Cpt> cpts;
    for (const Cpt& cpt : net.cpts()) {
        if (cpt.child == x) {
            cpts.push_back({x, new_x_parents, rows_from(x_table, x_card)});
        } else if (cpt.child == y) {
            cpts.push_back({y, new_y_parents, rows_from(y_table, net.cardinality(y))});
        } else {
            cpts.push_back(cpt);
        }
    }
    out.network = DiscreteNetwork::from_cpts(net.variables(), std::move(cpts));
    return out;
}

Transformed repeated_reversal_to_root(const DiscreteNetwork& net, const VarId& h) {
    Transformed current{net, {}};
    require_valid(net);
    if (!net.contains(h)) fail(ErrorCode::ContractViolation, "unknown variable '" + h + "'");
    while (!current.network.parents(h).empty()) {
        const std::vector<VarId> order = topological_order(current.network);
        VarId latest;
        std::size_t latest_pos = 0;
        for (const VarId& p : current.network.parents(h)) {
            const auto pos = static_cast<std::size_t>(std::find(order.begin(), order.end(), p) - order.begin());
            if (latest.empty() || pos > latest_pos) {
                latest = p;
                latest_pos = pos;
            }
        }
        Transformed step = reverse_arc(current.network, latest, h);
        current.network = std::move(step.network);
        current.warnings.insert(current.warnings.end(), step.warnings.begin(), step.warnings.end());
    }
    return current;
}

}  // namespace asymnet
