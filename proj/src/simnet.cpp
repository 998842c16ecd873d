#include "asymnet/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numeric>

#include "asymnet/inference.hpp"

namespace asymnet {

std::vector<VarId> SimilarityNetwork::universe() const {
    std::vector<VarId> out;
    for (const Variable& v : variables) out.push_back(v.id);
    return out;
}

const Variable& SimilarityNetwork::variable(const VarId& id) const {
    for (const Variable& v : variables) {
        if (v.id == id) return v;
    }
    fail(ErrorCode::ContractViolation, "unknown variable '" + id + "'");
}

namespace {

bool contains_point(const std::vector<HypothesisPoint>& points, const HypothesisPoint& p) {
    return std::find(points.begin(), points.end(), p) != points.end();
}

// Variables joined to `seeds` in the undirected skeleton of `net`.
std::set<VarId> connected_to(const DiscreteNetwork& net, const std::set<VarId>& seeds) {
    std::map<VarId, std::vector<VarId>> adjacent;
    for (const auto& [from, to] : net.arcs()) {
        adjacent[from].push_back(to);
        adjacent[to].push_back(from);
    }
    std::set<VarId> seen;
    std::vector<VarId> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
        const VarId v = stack.back();
        stack.pop_back();
        if (!net.contains(v) || !seen.insert(v).second) continue;
        for (const VarId& w : adjacent[v]) stack.push_back(w);
    }
    return seen;
}

std::set<VarId> hypothesis_ids(const HypothesisSpace& space) {
    const auto ids = space.ids();
    return {ids.begin(), ids.end()};
}

// Keeps only `kept` variables; every kept variable's parents must be kept.
DiscreteNetwork restrict_to(const DiscreteNetwork& net, const std::set<VarId>& kept) {
    std::vector<Variable> variables;
    std::vector<Cpt> cpts;
    for (const Variable& v : net.variables()) {
        if (kept.contains(v.id)) variables.push_back(v);
    }
    for (const Cpt& cpt : net.cpts()) {
        if (kept.contains(cpt.child)) cpts.push_back(cpt);
    }
    return DiscreteNetwork::from_cpts(std::move(variables), std::move(cpts));
}

}  // namespace

SimilarityNetwork make_simnet(Cover cover, std::vector<OrdinaryLocalNetwork> locals) {
    SimilarityNetwork s;
    s.cover = std::move(cover);
    s.locals = std::move(locals);
    std::map<VarId, Variable> seen;
    for (const OrdinaryLocalNetwork& local : s.locals) {
        for (const Variable& v : local.network.variables()) seen.emplace(v.id, v);
    }
    for (auto& [id, v] : seen) s.variables.push_back(v);
    return s;
}

SimilarityNetwork as_simnet(const Multinet& m) {
    require_valid(m);
    Cover cover{m.hypothesis, m.blocks};
    std::vector<OrdinaryLocalNetwork> locals;
    for (std::size_t i = 0; i < m.locals.size(); ++i) {
        OrdinaryLocalNetwork local;
        local.edge = i;
        local.network = m.locals[i];
        local.depicted = m.locals[i].ids();
        const std::set<VarId> linked = connected_to(local.network, hypothesis_ids(m.hypothesis));
        for (const VarId& id : local.depicted) {
            if (!linked.contains(id)) local.retained.insert(id);
        }
        locals.push_back(std::move(local));
    }
    return make_simnet(std::move(cover), std::move(locals));
}

bool is_connected_cover(const Cover& c) {
    const HypothesisSpace& space = c.hypothesis;
    if (c.edges.empty()) fail(ErrorCode::ContractViolation, "cover has no edges");
    std::vector<std::size_t> parent(space.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<bool> covered(space.size(), false);
    for (const auto& edge : c.edges) {
        if (edge.empty()) fail(ErrorCode::ContractViolation, "cover edge is empty");
        for (const HypothesisPoint& p : edge) {
            if (!space.in_domain(p)) fail(ErrorCode::ContractViolation, "cover edge has a point outside domain(H)");
        }
        const std::size_t root = find(space.index_of(edge.front()));
        for (const HypothesisPoint& p : edge) {
            const std::size_t k = space.index_of(p);
            covered[k] = true;
            parent[find(k)] = root;
        }
    }
    const std::size_t root = find(0);
    for (std::size_t k = 0; k < space.size(); ++k) {
        if (!covered[k] || find(k) != root) return false;
    }
    return true;
}

ValidationReport validate_simnet(const SimilarityNetwork& s, bool require_connected) {
    ValidationReport report;
    const HypothesisSpace& space = s.cover.hypothesis;
    if (space.variables.empty()) {
        report.add(ViolationKind::MissingHypothesisVariable, "hypothesis", "no hypothesis variables");
        return report;
    }
    if (s.cover.edges.empty()) {
        report.add(ViolationKind::DisconnectedCover, "cover", "cover has no edges");
        return report;
    }
    bool points_ok = true;
    std::vector<bool> covered(space.size(), false);
    for (std::size_t i = 0; i < s.cover.edges.size(); ++i) {
        const std::string subject = "cover[" + std::to_string(i) + "]";
        if (s.cover.edges[i].empty()) {
            report.add(ViolationKind::DisconnectedCover, subject, "edge is empty");
            points_ok = false;
        }
        for (const HypothesisPoint& p : s.cover.edges[i]) {
            if (!space.in_domain(p)) {
                report.add(ViolationKind::PointOutsideDomain, subject, "point outside domain(H)");
                points_ok = false;
            } else {
                covered[space.index_of(p)] = true;
            }
        }
    }
    if (points_ok) {
        for (std::size_t k = 0; k < covered.size(); ++k) {
            if (!covered[k]) {
                report.add(ViolationKind::DisconnectedCover, space.label(space.point_at(k)), "point is in no edge");
            }
        }
        if (require_connected && !is_connected_cover(s.cover)) {
            report.add(ViolationKind::DisconnectedCover, "cover", "similarity hypergraph is not connected");
        }
    }

    if (s.locals.size() != s.cover.edges.size()) {
        report.add(ViolationKind::InvalidLocalNetwork, "locals",
                   "expected one local network per edge (" + std::to_string(s.cover.edges.size()) + "), found " +
                       std::to_string(s.locals.size()));
    }
    std::map<VarId, const Variable*> universe;
    for (const Variable& v : s.variables) universe.emplace(v.id, &v);
    for (const Variable& h : space.variables) {
        auto it = universe.find(h.id);
        if (it == universe.end()) {
            report.add(ViolationKind::MissingHypothesisVariable, h.id, "hypothesis variable not in the variable universe");
        } else if (*it->second != h) {
            report.add(ViolationKind::VariableMismatch, h.id, "hypothesis variable differs from the universe entry");
        }
    }

    std::set<VarId> depicted_anywhere;
    const std::set<VarId> hyp = hypothesis_ids(space);
    for (std::size_t i = 0; i < s.locals.size(); ++i) {
        const OrdinaryLocalNetwork& local = s.locals[i];
        const std::string prefix = "locals[" + std::to_string(i) + "]";
        if (local.edge != i) {
            report.add(ViolationKind::InvalidLocalNetwork, prefix, "edge index " + std::to_string(local.edge) +
                                                                       " does not match its position");
            continue;
        }
        const ValidationReport local_report = validate_network(local.network);
        if (!local_report.ok()) {
            report.merge(local_report, prefix + ".");
            report.add(ViolationKind::InvalidLocalNetwork, prefix, "local network is invalid");
            continue;
        }
        if (local.depicted != local.network.ids()) {
            report.add(ViolationKind::DepictedMismatch, prefix, "depicted list differs from the network's variables");
        }
        for (const Variable& v : local.network.variables()) {
            depicted_anywhere.insert(v.id);
            auto it = universe.find(v.id);
            if (it == universe.end()) {
                report.add(ViolationKind::UnknownVariable, prefix, "'" + v.id + "' is not in the variable universe");
            } else if (*it->second != v) {
                report.add(ViolationKind::VariableMismatch, prefix, "'" + v.id + "' differs from the universe entry");
            }
        }
        bool hypotheses_present = true;
        for (const Variable& h : space.variables) {
            if (!local.network.contains(h.id)) {
                report.add(ViolationKind::MissingHypothesisVariable, prefix, "missing hypothesis variable '" + h.id + "'");
                hypotheses_present = false;
            } else if (local.network.variable(h.id) != h) {
                hypotheses_present = false;
            }
        }
        if (!hypotheses_present) continue;
        const std::set<VarId> linked = connected_to(local.network, hyp);
        for (const VarId& id : local.network.ids()) {
            if (!linked.contains(id) && !local.retained.contains(id)) {
                report.add(ViolationKind::IrrelevantVariable, prefix,
                           "'" + id + "' is not connected to any hypothesis variable");
            }
        }
        if (!points_ok || i >= s.cover.edges.size()) continue;
        const std::vector<double> q = hypothesis_distribution(local.network, space);
        double leaked = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            if (!contains_point(s.cover.edges[i], space.point_at(k))) leaked += q[k];
        }
        if (leaked > kTolerance) {
            report.add(ViolationKind::SupportLeakage, prefix,
                       "hypothesis mass " + std::to_string(leaked) + " outside the edge");
        }
    }
    for (const Variable& v : s.variables) {
        if (!depicted_anywhere.contains(v.id)) {
            report.add(ViolationKind::UndepictedVariable, v.id, "variable is depicted in no local network");
        }
    }
    return report;
}

void require_valid(const SimilarityNetwork& s, bool require_connected) {
    const ValidationReport report = validate_simnet(s, require_connected);
    if (!report.ok()) fail(ErrorCode::ValidationFailed, "invalid similarity network:\n" + report.to_string());
}

DiscreteNetwork comprehensive_local_network(const DiscreteNetwork& source, const HypothesisSpace& space,
                                            const std::vector<HypothesisPoint>& edge) {
    require_valid(source);
    const std::vector<double> q = hypothesis_distribution(source, space);
    std::vector<double> inside(q.size(), 0.0);
    double mass = 0.0;
    for (const HypothesisPoint& p : edge) {
        const std::size_t k = space.index_of(p);
        inside[k] = q[k];
        mass += q[k];
    }
    if (!(mass > 0.0)) fail(ErrorCode::ZeroPrior, "the edge has zero prior probability");
    return drop_vacuous_arcs(set_hypothesis_distribution(source, space, inside));
}

OrdinaryLocalNetwork relevance_prune(const DiscreteNetwork& comprehensive, const HypothesisSpace& space,
                                     const std::vector<HypothesisPoint>& edge, const std::set<VarId>& retain) {
    require_valid(comprehensive);
    if (edge.empty()) fail(ErrorCode::ContractViolation, "relevance_prune needs a nonempty edge");
    const auto ids = space.ids();
    std::vector<Cpt> cpts = comprehensive.cpts();
    for (Cpt& cpt : cpts) {
        if (space.contains(cpt.child)) continue;
        std::size_t k = 0;
        while (k < cpt.parents.size()) {
            const auto h = std::find(ids.begin(), ids.end(), cpt.parents[k]);
            if (h == ids.end()) {
                ++k;
                continue;
            }
            const std::vector<std::size_t> kept_values =
                projected_values(edge, static_cast<std::size_t>(h - ids.begin()));
            std::vector<std::size_t> cards;
            for (const VarId& p : cpt.parents) cards.push_back(comprehensive.cardinality(p));
            std::vector<std::size_t> reduced_cards = cards;
            reduced_cards.erase(reduced_cards.begin() + static_cast<std::ptrdiff_t>(k));
            std::vector<std::vector<double>> reduced(domain_cells(reduced_cards));
            bool vacuous = true;
            std::vector<std::size_t> values(cards.size(), 0);
            for (std::size_t row = 0; row < cpt.rows.size() && vacuous; ++row) {
                if (std::find(kept_values.begin(), kept_values.end(), values[k]) != kept_values.end()) {
                    std::vector<std::size_t> rest = values;
                    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
                    auto& target = reduced[linear_index(reduced_cards, rest)];
                    if (target.empty()) {
                        target = cpt.rows[row];
                    } else {
                        for (std::size_t v = 0; v < target.size(); ++v) {
                            if (std::abs(target[v] - cpt.rows[row][v]) > kTolerance) vacuous = false;
                        }
                    }
                }
                next_configuration(cards, values);
            }
            if (!vacuous) {
                ++k;
                continue;
            }
            cpt.rows = std::move(reduced);
            cpt.parents.erase(cpt.parents.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    const DiscreteNetwork simplified = DiscreteNetwork::from_cpts(comprehensive.variables(), std::move(cpts));

    const std::set<VarId> linked = connected_to(simplified, hypothesis_ids(space));
    std::set<VarId> seeds(linked);
    for (const VarId& id : retain) {
        if (simplified.contains(id)) seeds.insert(id);
    }
    const std::set<VarId> kept = connected_to(simplified, seeds);

    OrdinaryLocalNetwork out;
    out.network = restrict_to(simplified, kept);
    out.depicted = out.network.ids();
    for (const VarId& id : kept) {
        if (!linked.contains(id)) out.retained.insert(id);
    }
    return out;
}

// ---------------------------------------------------------------------------
// priors

namespace {

std::vector<std::vector<double>> edge_conditionals(const SimilarityNetwork& s) {
    std::vector<std::vector<double>> out;
    for (const OrdinaryLocalNetwork& local : s.locals) {
        out.push_back(hypothesis_distribution(local.network, s.cover.hypothesis));
    }
    return out;
}

}  // namespace

Factor recover_priors(const SimilarityNetwork& s) {
    require_valid(s);
    const HypothesisSpace& space = s.cover.hypothesis;
    const auto& edges = s.cover.edges;
    const std::vector<std::vector<double>> q = edge_conditionals(s);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (const HypothesisPoint& p : edges[i]) {
            if (!(q[i][space.index_of(p)] > 0.0)) {
                fail(ErrorCode::ZeroPrior, "p(" + space.label(p) + " | edge " + std::to_string(i) +
                                               ") is zero; priors cannot be recovered");
            }
        }
    }

    // ratio propagation over a breadth-first spanning tree, rooted at point 0
    std::vector<double> ratio(space.size(), 0.0);
    std::vector<bool> assigned(space.size(), false);
    std::deque<std::size_t> queue{0};
    ratio[0] = 1.0;
    assigned[0] = true;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        const HypothesisPoint pu = space.point_at(u);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (!contains_point(edges[i], pu)) continue;
            for (const HypothesisPoint& pv : edges[i]) {
                const std::size_t v = space.index_of(pv);
                if (assigned[v]) continue;
                ratio[v] = ratio[u] * q[i][v] / q[i][u];
                assigned[v] = true;
                queue.push_back(v);
            }
        }
    }
    double total = 0.0;
    for (double r : ratio) total += r;
    for (double& r : ratio) r /= total;

    for (std::size_t i = 0; i < edges.size(); ++i) {
        double edge_mass = 0.0;
        for (const HypothesisPoint& p : edges[i]) edge_mass += ratio[space.index_of(p)];
        for (const HypothesisPoint& p : edges[i]) {
            const std::size_t k = space.index_of(p);
            const double residual = std::abs(ratio[k] - q[i][k] * edge_mass);
            if (residual > kIncoherenceTolerance) {
                fail(ErrorCode::InconsistentSimnet, "edge " + std::to_string(i) + " disagrees on p(" +
                                                        space.label(p) + ") by " + std::to_string(residual));
            }
        }
    }
    return space.make_factor(std::move(ratio));
}

// ---------------------------------------------------------------------------
// conditional factors

namespace {

bool depicts(const SimilarityNetwork& s, std::size_t edge, const VarId& var) {
    return s.locals[edge].network.contains(var);
}

bool share_point(const std::vector<HypothesisPoint>& a, const std::vector<HypothesisPoint>& b) {
    return std::any_of(a.begin(), a.end(), [&](const HypothesisPoint& p) { return contains_point(b, p); });
}

void check_conditional_query(const SimilarityNetwork& s, const VarId& var, const Assignment& given,
                             const HypothesisPoint& p) {
    const HypothesisSpace& space = s.cover.hypothesis;
    if (!space.in_domain(p)) fail(ErrorCode::ContractViolation, "hypothesis point outside domain(H)");
    if (space.contains(var)) fail(ErrorCode::ContractViolation, "'" + var + "' is a hypothesis variable");
    if (given.contains(var)) fail(ErrorCode::ContractViolation, "'" + var + "' is bound in the conditioning set");
    for (const auto& [id, value] : given) {
        if (space.contains(id)) fail(ErrorCode::ContractViolation, "conditioning set binds hypothesis variable '" + id + "'");
        if (value >= s.variable(id).cardinality()) {
            fail(ErrorCode::ContractViolation, "conditioning value out of range for '" + id + "'");
        }
    }
}

HypothesisPoint handoff_point(const SimilarityNetwork& s, const std::vector<std::size_t>& path,
                              const HypothesisPoint& p) {
    if (path.size() < 2) return p;
    const HypothesisSpace& space = s.cover.hypothesis;
    const auto& a = s.cover.edges[path[path.size() - 2]];
    const auto& b = s.cover.edges[path.back()];
    std::optional<std::size_t> best;
    for (const HypothesisPoint& q : a) {
        if (contains_point(b, q)) {
            const std::size_t k = space.index_of(q);
            if (!best || k < *best) best = k;
        }
    }
    return space.point_at(*best);
}

// Variables depicted in an edge the walk passes through are independent of
// var there, so they are dropped from the conditioning set. What remains has
// the same probability at the hand-off point as at the start, which keeps the
// conditional defined whenever it is defined at p.
std::set<VarId> screened_off(const SimilarityNetwork& s, const std::vector<std::size_t>& path) {
    std::set<VarId> out;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        for (const VarId& id : s.locals[path[i]].depicted) out.insert(id);
    }
    return out;
}

Factor evaluate_local(const SimilarityNetwork& s, const std::vector<std::size_t>& path, const VarId& var,
                      const Assignment& given, const HypothesisPoint& at) {
    const std::size_t edge = path.back();
    const DiscreteNetwork& net = s.locals[edge].network;
    const std::set<VarId> dropped = screened_off(s, path);
    Assignment evidence;
    for (const auto& [id, value] : given) {
        if (net.contains(id) && !dropped.contains(id)) evidence[id] = value;
    }
    for (const auto& [id, value] : s.cover.hypothesis.as_assignment(at)) evidence[id] = value;
    try {
        return marginal(net, {var}, evidence);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InconsistentEvidence) throw;
        fail(ErrorCode::UndefinedConditional, "P(" + var + " | ...) is undefined in local network " +
                                                  std::to_string(edge) + ": the conditioning event has probability 0");
    }
}

}  // namespace

ConditionalFactor conditional_factor(const SimilarityNetwork& s, const VarId& var, const Assignment& given,
                                     const HypothesisPoint& p) {
    require_valid(s);
    check_conditional_query(s, var, given, p);
    ConditionalFactor out;
    const auto& edges = s.cover.edges;
    bool depicted = false;
    for (std::size_t i = 0; i < s.locals.size(); ++i) depicted = depicted || depicts(s, i, var);
    if (!depicted) {
        out.irrelevant = true;
        return out;
    }

    std::vector<std::optional<std::size_t>> previous(edges.size());
    std::vector<bool> seen(edges.size(), false);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (contains_point(edges[i], p)) {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    std::optional<std::size_t> destination;
    while (!queue.empty()) {
        const std::size_t e = queue.front();
        queue.pop_front();
        if (depicts(s, e, var)) {
            destination = e;
            break;
        }
        for (std::size_t f = 0; f < edges.size(); ++f) {
            if (!seen[f] && share_point(edges[e], edges[f])) {
                seen[f] = true;
                previous[f] = e;
                queue.push_back(f);
            }
        }
    }
    if (!destination) fail(ErrorCode::ContractViolation, "no local network depicting '" + var + "' is reachable");
    for (std::optional<std::size_t> e = destination; e; e = previous[*e]) out.path.push_back(*e);
    std::reverse(out.path.begin(), out.path.end());
    out.edge = *destination;
    out.evaluated_at = handoff_point(s, out.path, p);
    out.distribution = evaluate_local(s, out.path, var, given, out.evaluated_at);
    return out;
}

ConditionalFactor conditional_factor_along(const SimilarityNetwork& s, const VarId& var, const Assignment& given,
                                           const HypothesisPoint& p, const std::vector<std::size_t>& path) {
    require_valid(s);
    check_conditional_query(s, var, given, p);
    const auto& edges = s.cover.edges;
    if (path.empty()) fail(ErrorCode::ContractViolation, "path is empty");
    for (std::size_t e : path) {
        if (e >= edges.size()) fail(ErrorCode::ContractViolation, "path names an unknown edge");
    }
    if (!contains_point(edges[path.front()], p)) fail(ErrorCode::ContractViolation, "path does not start at p");
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!share_point(edges[path[i]], edges[path[i + 1]])) {
            fail(ErrorCode::ContractViolation, "consecutive path edges share no point");
        }
        if (depicts(s, path[i], var)) fail(ErrorCode::ContractViolation, "an inner path edge already depicts '" + var + "'");
    }
    if (!depicts(s, path.back(), var)) fail(ErrorCode::ContractViolation, "the last path edge does not depict '" + var + "'");
    ConditionalFactor out;
    out.path = path;
    out.edge = path.back();
    out.evaluated_at = handoff_point(s, path, p);
    out.distribution = evaluate_local(s, out.path, var, given, out.evaluated_at);
    return out;
}

// ---------------------------------------------------------------------------
// joint reconstruction

namespace {

std::vector<VarId> chain_order(const SimilarityNetwork& s) {
    std::set<Arc> arcs;
    for (const OrdinaryLocalNetwork& local : s.locals) arcs.insert(local.network.arcs().begin(), local.network.arcs().end());
    const std::vector<VarId> universe = s.universe();
    if (has_cycle(universe, arcs)) {
        fail(ErrorCode::Structural, "the union of local arcs has a directed cycle; no global chain order exists");
    }
    std::vector<VarId> out;
    for (const VarId& id : topological_order(universe, arcs)) {
        if (!s.cover.hypothesis.contains(id)) out.push_back(id);
    }
    return out;
}

// P(var | context, h) tables read from one local network's joint.
struct ChainTable {
    std::vector<VarId> context;
    std::vector<std::size_t> context_cards;
    std::vector<std::vector<double>> rows;
    std::vector<double> mass;
    std::size_t edge = 0;
};

}  // namespace

JointTable reconstruct_joint(const SimilarityNetwork& s, std::size_t cell_cap) {
    const Factor priors = recover_priors(s);
    const HypothesisSpace& space = s.cover.hypothesis;
    const std::vector<VarId> order = chain_order(s);

    JointTable out;
    out.scope = s.universe();
    for (const VarId& id : out.scope) out.cardinalities.push_back(s.variable(id).cardinality());
    const std::size_t cells = domain_cells(out.cardinalities);
    if (cells > cell_cap) {
        fail(ErrorCode::Resource, "joint has " + std::to_string(cells) + " cells, above the cap of " +
                                      std::to_string(cell_cap));
    }
    out.probabilities.assign(cells, 0.0);

    std::vector<std::size_t> strides(out.scope.size(), 1);
    for (std::size_t i = out.scope.size(); i-- > 1;) strides[i - 1] = strides[i] * out.cardinalities[i];
    auto stride_of = [&](const VarId& id) {
        return strides[static_cast<std::size_t>(std::find(out.scope.begin(), out.scope.end(), id) - out.scope.begin())];
    };

    std::map<std::size_t, JointTable> local_joints;
    auto local_joint = [&](std::size_t edge) -> const JointTable& {
        auto it = local_joints.find(edge);
        if (it == local_joints.end()) it = local_joints.emplace(edge, enumerate_joint(s.locals[edge].network, cell_cap)).first;
        return it->second;
    };

    for (std::size_t k = 0; k < space.size(); ++k) {
        const HypothesisPoint p = space.point_at(k);
        const double prior = priors.values[k];
        if (!(prior > 0.0)) continue;

        std::vector<ChainTable> tables;
        for (std::size_t j = 0; j < order.size(); ++j) {
            const ConditionalFactor route = conditional_factor(s, order[j], {}, p);
            const DiscreteNetwork& net = s.locals[route.edge].network;
            ChainTable table;
            table.edge = route.edge;
            const std::set<VarId> dropped = screened_off(s, route.path);
            for (std::size_t i = 0; i < j; ++i) {
                if (net.contains(order[i]) && !dropped.contains(order[i])) {
                    table.context.push_back(order[i]);
                    table.context_cards.push_back(net.cardinality(order[i]));
                }
            }
            std::vector<VarId> scope = space.ids();
            scope.insert(scope.end(), table.context.begin(), table.context.end());
            scope.push_back(order[j]);
            const JointTable slice = marginalize(local_joint(route.edge), scope);
            const std::size_t card = net.cardinality(order[j]);
            const std::size_t context_rows = domain_cells(table.context_cards);
            const std::size_t offset = space.index_of(route.evaluated_at) * context_rows * card;
            for (std::size_t r = 0; r < context_rows; ++r) {
                std::vector<double> row(slice.probabilities.begin() + static_cast<std::ptrdiff_t>(offset + r * card),
                                        slice.probabilities.begin() + static_cast<std::ptrdiff_t>(offset + (r + 1) * card));
                double mass = 0.0;
                for (double v : row) mass += v;
                if (mass > 0.0) {
                    for (double& v : row) v /= mass;
                }
                table.rows.push_back(std::move(row));
                table.mass.push_back(mass);
            }
            tables.push_back(std::move(table));
        }

        std::size_t base = 0;
        for (std::size_t i = 0; i < space.variables.size(); ++i) base += p[i] * stride_of(space.variables[i].id);
        std::vector<std::size_t> value_strides;
        for (const VarId& id : order) value_strides.push_back(stride_of(id));

        Assignment current;
        std::function<void(std::size_t, double, std::size_t)> walk = [&](std::size_t j, double prefix, std::size_t index) {
            if (j == order.size()) {
                out.probabilities[index] = prefix;
                return;
            }
            const ChainTable& table = tables[j];
            std::vector<std::size_t> context_values;
            for (const VarId& id : table.context) context_values.push_back(current.at(id));
            const std::size_t r = linear_index(table.context_cards, context_values);
            if (!(table.mass[r] > 0.0)) {
                fail(ErrorCode::UndefinedConditional, "P(" + order[j] + " | ..., " + space.label(p) +
                                                          ") is undefined: its context has probability 0 in local network " +
                                                          std::to_string(table.edge));
            }
            for (std::size_t v = 0; v < table.rows[r].size(); ++v) {
                const double next = prefix * table.rows[r][v];
                if (next == 0.0) continue;
                current[order[j]] = v;
                walk(j + 1, next, index + v * value_strides[j]);
            }
            current.erase(order[j]);
        };
        walk(0, prior, base);
    }
    return out;
}

Factor simnet_posterior(const SimilarityNetwork& s, const Assignment& evidence, std::size_t cell_cap) {
    const HypothesisSpace& space = s.cover.hypothesis;
    for (const auto& [id, value] : evidence) {
        if (space.contains(id)) fail(ErrorCode::ContractViolation, "evidence binds hypothesis variable '" + id + "'");
        if (value >= s.variable(id).cardinality()) {
            fail(ErrorCode::ContractViolation, "evidence value out of range for '" + id + "'");
        }
    }
    const JointTable joint = reconstruct_joint(s, cell_cap);
    std::vector<VarId> scope = space.ids();
    std::vector<double> out(space.size(), 0.0);
    std::vector<std::size_t> values(joint.scope.size(), 0);
    std::vector<std::size_t> evidence_pos;
    std::vector<std::size_t> evidence_val;
    for (const auto& [id, value] : evidence) {
        evidence_pos.push_back(static_cast<std::size_t>(std::find(joint.scope.begin(), joint.scope.end(), id) -
                                                        joint.scope.begin()));
        evidence_val.push_back(value);
    }
    std::vector<std::size_t> hyp_pos;
    for (const VarId& id : scope) {
        hyp_pos.push_back(static_cast<std::size_t>(std::find(joint.scope.begin(), joint.scope.end(), id) -
                                                   joint.scope.begin()));
    }
    HypothesisPoint point(scope.size());
    for (double prob : joint.probabilities) {
        bool match = true;
        for (std::size_t i = 0; i < evidence_pos.size(); ++i) match = match && values[evidence_pos[i]] == evidence_val[i];
        if (match) {
            for (std::size_t i = 0; i < hyp_pos.size(); ++i) point[i] = values[hyp_pos[i]];
            out[space.index_of(point)] += prob;
        }
        next_configuration(joint.cardinalities, values);
    }
    Factor f = space.make_factor(std::move(out));
    if (!normalize(f)) fail(ErrorCode::InconsistentEvidence, "evidence has probability zero under the model");
    return f;
}

// ---------------------------------------------------------------------------
// conversion

Multinet convert_to_multinet(const SimilarityNetwork& s) {
    const Factor priors = recover_priors(s);  // validates s
    const HypothesisSpace& space = s.cover.hypothesis;
    const auto& edges = s.cover.edges;

    // step 2 first: which edges survive and which points each one keeps
    std::vector<std::vector<HypothesisPoint>> assigned(edges.size());
    std::vector<bool> covered(space.size(), false);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const bool disjoint = std::none_of(edges[i].begin(), edges[i].end(),
                                           [&](const HypothesisPoint& p) { return covered[space.index_of(p)]; });
        if (!disjoint) continue;
        assigned[i] = edges[i];
        for (const HypothesisPoint& p : edges[i]) covered[space.index_of(p)] = true;
    }
    for (std::size_t k = 0; k < space.size(); ++k) {
        if (covered[k]) continue;
        const HypothesisPoint p = space.point_at(k);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (contains_point(edges[i], p)) {
                assigned[i].push_back(p);
                break;
            }
        }
    }

    Multinet m;
    m.hypothesis = space;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (assigned[i].empty()) continue;
        const DiscreteNetwork& original = s.locals[i].network;
        const std::set<VarId> depicted(s.locals[i].depicted.begin(), s.locals[i].depicted.end());

        // step 1: add the variables this network does not depict
        std::vector<Cpt> cpts = original.cpts();
        std::set<Arc> arcs = original.arcs();
        std::vector<std::pair<VarId, std::vector<VarId>>> added;
        for (const Variable& x : s.variables) {
            if (depicted.contains(x.id)) continue;
            std::set<VarId> parents;
            for (std::size_t j = 0; j < s.locals.size(); ++j) {
                if (j == i || !s.locals[j].network.contains(x.id)) continue;
                for (const VarId& p : s.locals[j].network.parents(x.id)) {
                    if (!depicted.contains(p)) parents.insert(p);
                }
            }
            for (const VarId& p : parents) arcs.insert({p, x.id});
            added.emplace_back(x.id, std::vector<VarId>(parents.begin(), parents.end()));
        }
        if (has_cycle(s.universe(), arcs)) {
            fail(ErrorCode::Acyclicity, "augmenting local network " + std::to_string(i) + " creates a directed cycle");
        }
        const HypothesisPoint& anchor = assigned[i].front();
        for (const auto& [x, parents] : added) {
            std::vector<std::size_t> cards;
            for (const VarId& p : parents) cards.push_back(s.variable(p).cardinality());
            std::vector<std::size_t> values(parents.size(), 0);
            std::vector<std::vector<double>> rows;
            for (std::size_t r = 0; r < domain_cells(cards); ++r) {
                Assignment given;
                for (std::size_t k = 0; k < parents.size(); ++k) given[parents[k]] = values[k];
                rows.push_back(conditional_factor(s, x, given, anchor).distribution.values);
                next_configuration(cards, values);
            }
            cpts.push_back({x, parents, std::move(rows)});
        }
        DiscreteNetwork augmented = DiscreteNetwork::from_cpts(s.variables, std::move(cpts));
        if (!hypotheses_upward_closed(augmented, space)) {
            if (space.variables.size() != 1) {
                fail(ErrorCode::ContractViolation, "hypothesis variables must have only hypothesis parents");
            }
            augmented = repeated_reversal_to_root(augmented, space.variables[0].id).network;
        }

        std::vector<double> weights(space.size(), 0.0);
        double mass = 0.0;
        for (const HypothesisPoint& p : assigned[i]) {
            const std::size_t k = space.index_of(p);
            weights[k] = priors.values[k];
            mass += weights[k];
        }
        m.blocks.push_back(assigned[i]);
        m.locals.push_back(set_hypothesis_distribution(augmented, space, weights));
        m.block_priors.push_back(mass);
    }
    return m;
}

// ---------------------------------------------------------------------------
// redundancy

std::vector<RedundantParameter> redundancy_report(const SimilarityNetwork& s) {
    require_valid(s, false);
    const HypothesisSpace& space = s.cover.hypothesis;
    std::vector<RedundantParameter> out;
    for (std::size_t k = 0; k < space.size(); ++k) {
        const HypothesisPoint p = space.point_at(k);
        std::vector<std::size_t> holders;
        for (std::size_t i = 0; i < s.cover.edges.size(); ++i) {
            if (contains_point(s.cover.edges[i], p)) holders.push_back(i);
        }
        if (holders.size() < 2) continue;
        for (const Variable& x : s.variables) {
            if (space.contains(x.id)) continue;
            // group the holders depicting x by their clue-parent sets
            std::map<std::vector<VarId>, std::vector<std::size_t>> groups;
            for (std::size_t i : holders) {
                const DiscreteNetwork& net = s.locals[i].network;
                if (!net.contains(x.id)) continue;
                std::vector<VarId> clue_parents;
                for (const VarId& q : net.parents(x.id)) {
                    if (!space.contains(q)) clue_parents.push_back(q);
                }
                std::sort(clue_parents.begin(), clue_parents.end());
                groups[clue_parents].push_back(i);
            }
            for (const auto& [context, nets] : groups) {
                if (nets.size() < 2) continue;
                std::vector<std::size_t> cards;
                for (const VarId& q : context) cards.push_back(s.variable(q).cardinality());
                double discrepancy = 0.0;
                std::vector<std::size_t> values(context.size(), 0);
                for (std::size_t r = 0; r < domain_cells(cards); ++r) {
                    Assignment a = space.as_assignment(p);
                    for (std::size_t c = 0; c < context.size(); ++c) a[context[c]] = values[c];
                    std::vector<const std::vector<double>*> rows;
                    for (std::size_t i : nets) {
                        const DiscreteNetwork& net = s.locals[i].network;
                        rows.push_back(&net.cpt(x.id).rows[net.row_index(x.id, a)]);
                    }
                    for (std::size_t u = 0; u < rows.size(); ++u) {
                        for (std::size_t w = u + 1; w < rows.size(); ++w) {
                            for (std::size_t v = 0; v < rows[u]->size(); ++v) {
                                discrepancy = std::max(discrepancy, std::abs((*rows[u])[v] - (*rows[w])[v]));
                            }
                        }
                    }
                    next_configuration(cards, values);
                }
                RedundantParameter entry;
                entry.variable = x.id;
                entry.point = p;
                entry.context = context;
                entry.edges = nets;
                entry.discrepancy = discrepancy;
                entry.incoherent = discrepancy > kIncoherenceTolerance;
                entry.label = "P(" + x.id + " | ";
                for (const VarId& q : context) entry.label += q + ", ";
                entry.label += space.label(p) + ")";
                out.push_back(std::move(entry));
            }
        }
    }
    return out;
}

}  // namespace asymnet
