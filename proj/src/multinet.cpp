#include "asymnet/multinet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace asymnet {

std::size_t Multinet::block_of(const HypothesisPoint& p) const {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (std::find(blocks[i].begin(), blocks[i].end(), p) != blocks[i].end()) return i;
    }
    fail(ErrorCode::ContractViolation, "hypothesis point is in no block");
}

ValidationReport validate_multinet(const Multinet& m) {
    ValidationReport report;
    const HypothesisSpace& space = m.hypothesis;
    if (space.variables.empty()) {
        report.add(ViolationKind::MissingHypothesisVariable, "hypothesis", "no hypothesis variables");
        return report;
    }
    std::set<VarId> hyp_ids;
    for (const Variable& v : space.variables) {
        if (!hyp_ids.insert(v.id).second) {
            report.add(ViolationKind::DuplicateVariable, v.id, "hypothesis variable listed twice");
        }
        if (v.values.empty()) report.add(ViolationKind::EmptyValues, v.id, "hypothesis variable has no values");
    }
    if (!report.ok()) return report;

    std::vector<std::vector<std::size_t>> owners(space.size());
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        const std::string subject = "blocks[" + std::to_string(i) + "]";
        if (m.blocks[i].empty()) report.add(ViolationKind::NonPartition, subject, "block is empty");
        for (const HypothesisPoint& p : m.blocks[i]) {
            if (!space.in_domain(p)) {
                report.add(ViolationKind::PointOutsideDomain, subject, "point outside domain(H)");
                continue;
            }
            owners[space.index_of(p)].push_back(i);
        }
    }
    for (std::size_t k = 0; k < owners.size(); ++k) {
        const std::string label = space.label(space.point_at(k));
        if (owners[k].empty()) {
            report.add(ViolationKind::NonPartition, label, "point belongs to no block");
        } else if (owners[k].size() > 1) {
            std::string where;
            for (std::size_t b : owners[k]) where += (where.empty() ? "" : ", ") + std::to_string(b);
            report.add(ViolationKind::NonPartition, label, "point belongs to more than one block (" + where + ")");
        }
    }

    if (m.block_priors.size() != m.blocks.size()) {
        report.add(ViolationKind::BlockPriors, "block_priors",
                   "expected " + std::to_string(m.blocks.size()) + " entries, found " +
                       std::to_string(m.block_priors.size()));
    } else {
        double total = 0.0;
        for (double v : m.block_priors) {
            if (!(v >= 0.0 && v <= 1.0)) report.add(ViolationKind::BlockPriors, "block_priors", "entry outside [0, 1]");
            total += v;
        }
        if (std::abs(total - 1.0) > kTolerance) {
            report.add(ViolationKind::BlockPriors, "block_priors", "entries sum to " + std::to_string(total));
        }
    }

    if (m.locals.size() != m.blocks.size()) {
        report.add(ViolationKind::InvalidLocalNetwork, "locals",
                   "expected " + std::to_string(m.blocks.size()) + " local networks, found " +
                       std::to_string(m.locals.size()));
        return report;
    }
    for (std::size_t i = 0; i < m.locals.size(); ++i) {
        const DiscreteNetwork& local = m.locals[i];
        const std::string prefix = "locals[" + std::to_string(i) + "]";
        const ValidationReport local_report = validate_network(local);
        if (!local_report.ok()) {
            report.merge(local_report, prefix + ".");
            report.add(ViolationKind::InvalidLocalNetwork, prefix, "local network is invalid");
            continue;
        }
        if (i > 0 && local.variables() != m.locals[0].variables()) {
            report.add(ViolationKind::VariableMismatch, prefix, "variables differ from locals[0]");
        }
        bool hypotheses_present = true;
        for (const Variable& h : space.variables) {
            if (!local.contains(h.id)) {
                report.add(ViolationKind::MissingHypothesisVariable, prefix, "missing hypothesis variable '" + h.id + "'");
                hypotheses_present = false;
            } else if (local.variable(h.id) != h) {
                report.add(ViolationKind::VariableMismatch, prefix, "hypothesis variable '" + h.id + "' differs");
                hypotheses_present = false;
            }
        }
        if (!hypotheses_present || i >= m.blocks.size()) continue;
        const std::vector<double> q = hypothesis_distribution(local, space);
        double leaked = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            const HypothesisPoint p = space.point_at(k);
            if (std::find(m.blocks[i].begin(), m.blocks[i].end(), p) == m.blocks[i].end()) leaked += q[k];
        }
        if (leaked > kTolerance) {
            report.add(ViolationKind::SupportLeakage, prefix,
                       "hypothesis mass " + std::to_string(leaked) + " outside the block");
        }
    }
    return report;
}

void require_valid(const Multinet& m) {
    const ValidationReport report = validate_multinet(m);
    if (!report.ok()) fail(ErrorCode::ValidationFailed, "invalid multinet:\n" + report.to_string());
}

namespace {

void check_evidence(const Multinet& m, const Assignment& evidence) {
    const DiscreteNetwork& first = m.locals.front();
    for (const auto& [id, value] : evidence) {
        if (m.hypothesis.contains(id)) {
            fail(ErrorCode::ContractViolation, "evidence binds hypothesis variable '" + id + "'");
        }
        if (!first.contains(id)) fail(ErrorCode::ContractViolation, "unknown evidence variable '" + id + "'");
        if (value >= first.cardinality(id)) {
            fail(ErrorCode::ContractViolation, "evidence value out of range for '" + id + "'");
        }
    }
}

double block_conditional(const Multinet& m, std::size_t block, const HypothesisPoint& p) {
    return hypothesis_distribution(m.locals[block], m.hypothesis)[m.hypothesis.index_of(p)];
}

std::vector<double> priors_unchecked(const Multinet& m) {
    std::vector<double> out(m.hypothesis.size(), 0.0);
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        const std::vector<double> q = hypothesis_distribution(m.locals[i], m.hypothesis);
        for (const HypothesisPoint& p : m.blocks[i]) {
            const std::size_t k = m.hypothesis.index_of(p);
            out[k] = m.block_priors[i] * q[k];
        }
    }
    return out;
}

// Factors of `net` needed for a query on `seeds`, with hypothesis variables
// restricted to `projected` values and evidence applied. Hypothesis CPTs are
// left out when `drop_hypotheses` is set.
std::vector<Factor> block_factors(const DiscreteNetwork& net, const HypothesisSpace& space,
                                  const std::vector<std::vector<std::size_t>>& projected,
                                  const Assignment& evidence, bool drop_hypotheses) {
    std::set<VarId> seeds;
    for (const auto& [id, value] : evidence) seeds.insert(id);
    for (const Variable& h : space.variables) seeds.insert(h.id);
    std::vector<Factor> factors;
    for (const VarId& id : ancestral_set(net, seeds)) {
        if (drop_hypotheses && space.contains(id)) continue;
        Factor f = Factor::from_cpt(net, id);
        for (std::size_t k = 0; k < space.variables.size(); ++k) {
            if (f.has(space.variables[k].id)) f = restrict_values(f, space.variables[k].id, projected[k]);
        }
        factors.push_back(reduce(f, evidence));
    }
    return factors;
}

Factor restricted_frame(const DiscreteNetwork& net, const HypothesisSpace& space,
                        const std::vector<std::vector<std::size_t>>& projected) {
    Factor frame = frame_for(net, space.ids());
    for (std::size_t k = 0; k < space.variables.size(); ++k) {
        frame = restrict_values(frame, space.variables[k].id, projected[k]);
    }
    return frame;
}

std::vector<std::vector<std::size_t>> projections(const HypothesisSpace& space,
                                                  const std::vector<HypothesisPoint>& points) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = 0; k < space.variables.size(); ++k) out.push_back(projected_values(points, k));
    return out;
}

}  // namespace

double hypothesis_prior(const Multinet& m, const HypothesisPoint& p) {
    require_valid(m);
    if (!m.hypothesis.in_domain(p)) fail(ErrorCode::ContractViolation, "hypothesis point outside domain(H)");
    const std::size_t i = m.block_of(p);
    return m.block_priors[i] * block_conditional(m, i, p);
}

std::vector<double> hypothesis_priors(const Multinet& m) {
    require_valid(m);
    return priors_unchecked(m);
}

double likelihood(const Multinet& m, const HypothesisPoint& p, const Assignment& evidence) {
    require_valid(m);
    if (!m.hypothesis.in_domain(p)) fail(ErrorCode::ContractViolation, "hypothesis point outside domain(H)");
    check_evidence(m, evidence);
    const std::size_t i = m.block_of(p);
    const DiscreteNetwork& local = m.locals[i];
    if (!(block_conditional(m, i, p) > 0.0)) {
        fail(ErrorCode::UndefinedLikelihood,
             "P(" + m.hypothesis.label(p) + " | block " + std::to_string(i) + ") is zero; likelihood undefined");
    }
    Assignment joint = evidence;
    for (const auto& [id, value] : m.hypothesis.as_assignment(p)) joint[id] = value;

    if (hypotheses_upward_closed(local, m.hypothesis)) {
        // With the hypotheses fixed, the remaining CPTs multiply to P(. | p).
        std::vector<std::vector<std::size_t>> single;
        for (std::size_t v : p) single.push_back({v});
        std::vector<Factor> factors = block_factors(local, m.hypothesis, single, joint, true);
        return eliminate(std::move(factors), Factor::scalar(1.0)).factor.values.at(0);
    }
    return probability_of(local, joint) / probability_of(local, m.hypothesis.as_assignment(p));
}

MultinetPosterior posterior(const Multinet& m, const Assignment& evidence) {
    require_valid(m);
    check_evidence(m, evidence);
    const HypothesisSpace& space = m.hypothesis;
    const std::vector<double> priors = priors_unchecked(m);

    std::vector<double> out(space.size(), 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        const DiscreteNetwork& local = m.locals[i];
        const auto projected = projections(space, m.blocks[i]);
        const bool closed = hypotheses_upward_closed(local, space);
        EliminationResult result = eliminate(block_factors(local, space, projected, evidence, closed),
                                             restricted_frame(local, space, projected));
        count += result.multiplications;
        for (const HypothesisPoint& p : m.blocks[i]) {
            const std::size_t k = space.index_of(p);
            const double weight = closed ? priors[k] : m.block_priors[i];
            out[k] = weight * result.factor.at(space.as_assignment(p));
            ++count;
        }
    }
    Factor distribution = space.make_factor(std::move(out));
    if (!normalize(distribution)) {
        fail(ErrorCode::InconsistentEvidence, "evidence has probability zero under every hypothesis");
    }
    return {std::move(distribution), count};
}

Multinet with_hypothesis_priors(const Multinet& m, const std::vector<double>& weights) {
    require_valid(m);
    const HypothesisSpace& space = m.hypothesis;
    if (weights.size() != space.size()) fail(ErrorCode::ContractViolation, "priors do not cover domain(H)");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) fail(ErrorCode::ContractViolation, "negative hypothesis prior");
        total += w;
    }
    if (!(total > 0.0)) fail(ErrorCode::ContractViolation, "hypothesis priors are all zero");

    Multinet out = m;
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        std::vector<double> inside(space.size(), 0.0);
        double mass = 0.0;
        for (const HypothesisPoint& p : m.blocks[i]) {
            const std::size_t k = space.index_of(p);
            inside[k] = weights[k] / total;
            mass += inside[k];
        }
        out.block_priors[i] = mass;
        if (mass > 0.0) out.locals[i] = set_hypothesis_distribution(m.locals[i], space, inside);
    }
    return out;
}

MultinetPosterior staged_posterior(const DiscreteNetwork& prior_net, const Multinet& m,
                                   const Assignment& apriori_evidence, const Assignment& clue_evidence) {
    require_valid(m);
    for (const Variable& h : m.hypothesis.variables) {
        if (!prior_net.contains(h.id)) {
            fail(ErrorCode::ContractViolation, "prior network lacks hypothesis variable '" + h.id + "'");
        }
        if (prior_net.variable(h.id).values != h.values) {
            fail(ErrorCode::ContractViolation, "prior network disagrees on the values of '" + h.id + "'");
        }
    }
    const Factor revised = marginal(prior_net, m.hypothesis.ids(), apriori_evidence);
    return posterior(with_hypothesis_priors(m, revised.values), clue_evidence);
}

JointTable mixture_joint(const Multinet& m, std::size_t cell_cap) {
    require_valid(m);
    JointTable out;
    for (std::size_t i = 0; i < m.locals.size(); ++i) {
        JointTable local = enumerate_joint(m.locals[i], cell_cap);
        if (i == 0) {
            out = std::move(local);
            for (double& v : out.probabilities) v *= m.block_priors[0];
            continue;
        }
        for (std::size_t c = 0; c < out.probabilities.size(); ++c) {
            out.probabilities[c] += m.block_priors[i] * local.probabilities[c];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// union construction

namespace {

// Does P(x | parents + subset) agree with P(x | parents + full) wherever the
// latter's context has positive probability?
bool same_conditional(const JointTable& joint, const VarId& x, const std::vector<VarId>& parents,
                      const std::vector<VarId>& full, const std::vector<VarId>& subset) {
    std::vector<VarId> big = parents;
    big.insert(big.end(), full.begin(), full.end());
    std::vector<VarId> small = parents;
    small.insert(small.end(), subset.begin(), subset.end());
    big.push_back(x);
    small.push_back(x);
    const JointTable b = marginalize(joint, big);
    const JointTable s = marginalize(joint, small);

    const std::size_t x_card = b.cardinalities.back();
    std::vector<std::size_t> small_pos;
    for (const VarId& id : small) {
        small_pos.push_back(static_cast<std::size_t>(std::find(big.begin(), big.end(), id) - big.begin()));
    }
    std::vector<std::size_t> values(big.size(), 0);
    std::vector<std::size_t> projected(small.size(), 0);
    for (std::size_t row = 0; row * x_card < b.probabilities.size(); ++row) {
        double b_mass = 0.0;
        for (std::size_t v = 0; v < x_card; ++v) b_mass += b.probabilities[row * x_card + v];
        for (std::size_t i = 0; i < small.size(); ++i) projected[i] = values[small_pos[i]];
        projected.back() = 0;
        const std::size_t s_row = linear_index(s.cardinalities, projected);
        double s_mass = 0.0;
        for (std::size_t v = 0; v < x_card; ++v) s_mass += s.probabilities[s_row + v];
        if (b_mass > 0.0) {
            for (std::size_t v = 0; v < x_card; ++v) {
                const double lhs = b.probabilities[row * x_card + v] / b_mass;
                const double rhs = s.probabilities[s_row + v] / s_mass;
                if (std::abs(lhs - rhs) > kTolerance) return false;
            }
        }
        values.back() = x_card - 1;
        next_configuration(b.cardinalities, values);
    }
    return true;
}

std::vector<std::vector<double>> conditional_rows(const JointTable& joint, const VarId& x,
                                                  const std::vector<VarId>& parents,
                                                  std::vector<std::string>& warnings, const std::string& context) {
    std::vector<VarId> scope = parents;
    scope.push_back(x);
    const JointTable t = marginalize(joint, scope);
    const std::size_t x_card = t.cardinalities.back();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < t.probabilities.size(); i += x_card) {
        std::vector<double> row(t.probabilities.begin() + static_cast<std::ptrdiff_t>(i),
                                t.probabilities.begin() + static_cast<std::ptrdiff_t>(i + x_card));
        double mass = 0.0;
        for (double v : row) mass += v;
        if (mass > 0.0) {
            for (double& v : row) v /= mass;
        } else {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(x_card));
            warnings.push_back(context + ": row " + std::to_string(rows.size()) + " of '" + x +
                               "' has a zero-probability context; set uniform");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Transformed assemble(const HypothesisSpace& space, const std::vector<const DiscreteNetwork*>& nets,
                     const std::vector<double>& weights, std::size_t cell_cap, const std::string& context) {
    JointTable joint;
    double total = 0.0;
    for (double w : weights) total += w;
    for (std::size_t i = 0; i < nets.size(); ++i) {
        JointTable local = enumerate_joint(*nets[i], cell_cap);
        if (i == 0) {
            joint = local;
            std::fill(joint.probabilities.begin(), joint.probabilities.end(), 0.0);
        }
        for (std::size_t c = 0; c < joint.probabilities.size(); ++c) {
            joint.probabilities[c] += weights[i] / total * local.probabilities[c];
        }
    }

    const DiscreteNetwork& first = *nets.front();
    const std::vector<VarId> ids = first.ids();
    std::set<Arc> arcs;
    for (const DiscreteNetwork* net : nets) arcs.insert(net->arcs().begin(), net->arcs().end());
    if (has_cycle(ids, arcs)) fail(ErrorCode::Acyclicity, context + ": the union of local arcs has a directed cycle");

    std::map<VarId, std::vector<VarId>> parents_of;
    for (const VarId& id : ids) {
        for (const auto& arc : arcs) {
            if (arc.second == id) parents_of[id].push_back(arc.first);
        }
    }
    for (const VarId& x : ids) {
        if (space.contains(x)) continue;
        std::vector<VarId>& parents = parents_of[x];
        std::vector<VarId> missing;
        for (const VarId& h : space.ids()) {
            if (std::find(parents.begin(), parents.end(), h) == parents.end()) missing.push_back(h);
        }
        if (missing.empty()) continue;
        std::sort(missing.begin(), missing.end());
        std::vector<VarId> kept = missing;
        for (const VarId& h : missing) {
            std::vector<VarId> trial;
            for (const VarId& k : kept) {
                if (k != h) trial.push_back(k);
            }
            if (same_conditional(joint, x, parents, missing, trial)) kept = std::move(trial);
        }
        for (const VarId& h : kept) {
            arcs.insert({h, x});
            parents.push_back(h);
        }
    }
    if (has_cycle(ids, arcs)) {
        fail(ErrorCode::Acyclicity, context + ": hypothesis arcs required by the mixture would create a cycle");
    }

    Transformed out;
    std::vector<Cpt> cpts;
    for (const VarId& x : ids) {
        std::vector<VarId> parents = parents_of[x];
        const std::set<VarId> parent_set(parents.begin(), parents.end());
        bool matched = false;
        for (const DiscreteNetwork* net : nets) {
            const std::vector<VarId>& local = net->parents(x);
            if (std::set<VarId>(local.begin(), local.end()) == parent_set) {
                parents = local;
                matched = true;
                break;
            }
        }
        if (!matched) std::sort(parents.begin(), parents.end());
        cpts.push_back({x, parents, conditional_rows(joint, x, parents, out.warnings, context)});
    }
    out.network = DiscreteNetwork::from_cpts(first.variables(), std::move(cpts));
    if (hypotheses_upward_closed(out.network, space)) {
        out.network = set_hypothesis_distribution(out.network, space, marginalize(joint, space.ids()).probabilities);
    }
    return out;
}

}  // namespace

Transformed union_network(const Multinet& m, std::size_t cell_cap) {
    require_valid(m);
    std::vector<const DiscreteNetwork*> nets;
    for (const DiscreteNetwork& local : m.locals) nets.push_back(&local);
    std::vector<double> weights = m.block_priors;
    // zero-weight blocks still contribute their arcs
    return assemble(m.hypothesis, nets, weights, cell_cap, "union_network");
}

Transformed conditional_network(const Multinet& m, const std::vector<HypothesisPoint>& points,
                                std::size_t cell_cap) {
    require_valid(m);
    const HypothesisSpace& space = m.hypothesis;
    if (points.empty()) fail(ErrorCode::ContractViolation, "conditional_network needs at least one point");
    for (const HypothesisPoint& p : points) {
        if (!space.in_domain(p)) fail(ErrorCode::ContractViolation, "hypothesis point outside domain(H)");
    }
    std::vector<DiscreteNetwork> restricted;
    std::vector<double> weights;
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        std::vector<double> inside(space.size(), 0.0);
        const std::vector<double> q = hypothesis_distribution(m.locals[i], space);
        double mass = 0.0;
        for (const HypothesisPoint& p : m.blocks[i]) {
            if (std::find(points.begin(), points.end(), p) == points.end()) continue;
            const std::size_t k = space.index_of(p);
            inside[k] = q[k];
            mass += q[k];
        }
        if (!(mass > 0.0) || !(m.block_priors[i] > 0.0)) continue;
        if (!hypotheses_upward_closed(m.locals[i], space)) {
            fail(ErrorCode::ContractViolation, "conditional_network needs hypothesis variables without clue parents");
        }
        restricted.push_back(set_hypothesis_distribution(m.locals[i], space, inside));
        weights.push_back(m.block_priors[i] * mass);
    }
    if (restricted.empty()) {
        fail(ErrorCode::UndefinedConditional, "the requested hypothesis points have zero prior probability");
    }
    std::vector<const DiscreteNetwork*> nets;
    for (const DiscreteNetwork& net : restricted) nets.push_back(&net);
    return assemble(space, nets, weights, cell_cap, "conditional_network");
}

std::size_t multinet_param_count(const Multinet& m) {
    require_valid(m);
    const HypothesisSpace& space = m.hypothesis;
    std::size_t count = m.blocks.size() - 1;
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        const DiscreteNetwork& local = m.locals[i];
        const auto& points = m.blocks[i];
        auto position = [&](const VarId& id) {
            const auto ids = space.ids();
            return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
        };
        for (const Variable& v : local.variables()) {
            std::size_t clue_rows = 1;
            std::vector<std::size_t> hyp_parents;
            for (const VarId& p : local.parents(v.id)) {
                if (space.contains(p)) {
                    hyp_parents.push_back(position(p));
                } else {
                    clue_rows *= local.cardinality(p);
                }
            }
            // supported values of v (hypothesis) grouped by the projected hypothesis parents
            std::map<std::vector<std::size_t>, std::set<std::size_t>> groups;
            for (const HypothesisPoint& p : points) {
                std::vector<std::size_t> key;
                for (std::size_t k : hyp_parents) key.push_back(p[k]);
                auto& values = groups[key];
                if (space.contains(v.id)) values.insert(p[position(v.id)]);
            }
            std::size_t per_row = 0;
            for (const auto& [key, values] : groups) {
                per_row += space.contains(v.id) ? values.size() - 1 : v.cardinality() - 1;
            }
            count += clue_rows * per_row;
        }
    }
    return count;
}

Multinet single_block_multinet(const DiscreteNetwork& net, const std::vector<VarId>& hypothesis_ids) {
    Multinet m;
    m.hypothesis = hypothesis_space(net, hypothesis_ids);
    m.blocks = {m.hypothesis.domain()};
    m.locals = {net};
    m.block_priors = {1.0};
    return m;
}

}  // namespace asymnet
