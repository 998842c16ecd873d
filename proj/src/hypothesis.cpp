#include "asymnet/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "asymnet/inference.hpp"

namespace asymnet {

std::vector<VarId> HypothesisSpace::ids() const {
    std::vector<VarId> out;
    for (const Variable& v : variables) out.push_back(v.id);
    return out;
}

std::vector<std::size_t> HypothesisSpace::cardinalities() const {
    std::vector<std::size_t> out;
    for (const Variable& v : variables) out.push_back(v.cardinality());
    return out;
}

bool HypothesisSpace::contains(const VarId& id) const noexcept {
    return std::any_of(variables.begin(), variables.end(), [&](const Variable& v) { return v.id == id; });
}

std::size_t HypothesisSpace::size() const noexcept { return domain_cells(cardinalities()); }

bool HypothesisSpace::in_domain(const HypothesisPoint& p) const noexcept {
    if (p.size() != variables.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] >= variables[i].cardinality()) return false;
    }
    return true;
}

std::size_t HypothesisSpace::index_of(const HypothesisPoint& p) const {
    if (!in_domain(p)) fail(ErrorCode::ContractViolation, "hypothesis point outside domain(H)");
    return linear_index(cardinalities(), p);
}

HypothesisPoint HypothesisSpace::point_at(std::size_t index) const {
    const auto cards = cardinalities();
    HypothesisPoint p(cards.size(), 0);
    for (std::size_t i = cards.size(); i-- > 0;) {
        p[i] = index % cards[i];
        index /= cards[i];
    }
    return p;
}

std::vector<HypothesisPoint> HypothesisSpace::domain() const {
    std::vector<HypothesisPoint> out;
    const std::size_t n = size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(point_at(i));
    return out;
}

Assignment HypothesisSpace::as_assignment(const HypothesisPoint& p) const {
    if (!in_domain(p)) fail(ErrorCode::ContractViolation, "hypothesis point outside domain(H)");
    Assignment a;
    for (std::size_t i = 0; i < p.size(); ++i) a[variables[i].id] = p[i];
    return a;
}

std::string HypothesisSpace::label(const HypothesisPoint& p) const {
    if (!in_domain(p)) fail(ErrorCode::ContractViolation, "hypothesis point outside domain(H)");
    if (variables.size() == 1) return variables[0].values[p[0]];
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i > 0) out += ',';
        out += variables[i].id + '=' + variables[i].values[p[i]];
    }
    return out;
}

Factor HypothesisSpace::make_factor(std::vector<double> values) const {
    if (values.size() != size()) fail(ErrorCode::ContractViolation, "hypothesis factor has the wrong length");
    Factor f;
    f.scope = ids();
    f.cardinalities = cardinalities();
    f.value_map.resize(f.scope.size());
    f.values = std::move(values);
    return f;
}

HypothesisSpace hypothesis_space(const DiscreteNetwork& net, const std::vector<VarId>& ids) {
    HypothesisSpace space;
    for (const VarId& id : ids) space.variables.push_back(net.variable(id));
    return space;
}

std::vector<std::size_t> projected_values(const std::vector<HypothesisPoint>& points, std::size_t k) {
    std::set<std::size_t> values;
    for (const HypothesisPoint& p : points) values.insert(p.at(k));
    return {values.begin(), values.end()};
}

bool hypotheses_upward_closed(const DiscreteNetwork& net, const HypothesisSpace& space) {
    for (const Variable& h : space.variables) {
        const Cpt* cpt = net.find_cpt(h.id);
        if (cpt == nullptr) return false;
        for (const VarId& p : cpt->parents) {
            if (!space.contains(p)) return false;
        }
    }
    return true;
}

std::vector<double> hypothesis_distribution(const DiscreteNetwork& net, const HypothesisSpace& space) {
    return marginal(net, space.ids(), {}).values;
}

namespace {

// CPTs for the hypothesis variables, conditioned from `q` along `parents_of`.
std::vector<Cpt> conditionals_from(const HypothesisSpace& space, const std::vector<double>& q,
                                   const std::map<VarId, std::vector<VarId>>& parents_of) {
    const auto cards = space.cardinalities();
    const auto ids = space.ids();
    auto pos = [&](const VarId& id) {
        return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
    };
    std::vector<Cpt> cpts;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const std::vector<VarId>& parents = parents_of.at(ids[k]);
        std::vector<std::size_t> parent_cards;
        for (const VarId& p : parents) parent_cards.push_back(cards[pos(p)]);
        const std::size_t rows = domain_cells(parent_cards);
        std::vector<std::vector<double>> table(rows, std::vector<double>(cards[k], 0.0));
        std::vector<std::size_t> parent_values(parents.size());
        for (std::size_t i = 0; i < q.size(); ++i) {
            const HypothesisPoint point = space.point_at(i);
            for (std::size_t j = 0; j < parents.size(); ++j) parent_values[j] = point[pos(parents[j])];
            table[linear_index(parent_cards, parent_values)][point[k]] += q[i];
        }
        for (auto& row : table) {
            double sum = 0.0;
            for (double v : row) sum += v;
            for (double& v : row) v = sum > 0.0 ? v / sum : 1.0 / static_cast<double>(row.size());
        }
        cpts.push_back({ids[k], parents, std::move(table)});
    }
    return cpts;
}

bool reproduces(const HypothesisSpace& space, const std::vector<double>& q, const std::vector<Cpt>& cpts) {
    const auto ids = space.ids();
    const auto cards = space.cardinalities();
    for (std::size_t i = 0; i < q.size(); ++i) {
        const HypothesisPoint point = space.point_at(i);
        double product = 1.0;
        for (std::size_t k = 0; k < cpts.size(); ++k) {
            std::size_t row = 0;
            for (const VarId& p : cpts[k].parents) {
                const auto j = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), p) - ids.begin());
                row = row * cards[j] + point[j];
            }
            product *= cpts[k].rows[row][point[k]];
        }
        if (std::abs(product - q[i]) > kTolerance) return false;
    }
    return true;
}

}  // namespace

DiscreteNetwork set_hypothesis_distribution(const DiscreteNetwork& net, const HypothesisSpace& space,
                                            const std::vector<double>& weights) {
    if (!hypotheses_upward_closed(net, space)) {
        fail(ErrorCode::ContractViolation, "hypothesis variables have non-hypothesis parents");
    }
    if (weights.size() != space.size()) fail(ErrorCode::ContractViolation, "weights do not cover domain(H)");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) fail(ErrorCode::ContractViolation, "negative hypothesis weight");
        total += w;
    }
    if (!(total > 0.0)) fail(ErrorCode::ContractViolation, "hypothesis weights are all zero");
    std::vector<double> q = weights;
    for (double& v : q) v /= total;

    const auto ids = space.ids();
    std::map<VarId, std::vector<VarId>> parents_of;
    for (const VarId& id : ids) parents_of[id] = net.parents(id);
    std::vector<Cpt> hyp_cpts = conditionals_from(space, q, parents_of);

    if (!reproduces(space, q, hyp_cpts)) {
        std::set<Arc> hyp_arcs;
        for (const auto& arc : net.arcs()) {
            if (space.contains(arc.first) && space.contains(arc.second)) hyp_arcs.insert(arc);
        }
        const std::vector<VarId> order = topological_order(ids, hyp_arcs);
        for (std::size_t i = 0; i < order.size(); ++i) {
            parents_of[order[i]] = std::vector<VarId>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i));
        }
        hyp_cpts = conditionals_from(space, q, parents_of);
    }

    std::vector<Cpt> cpts;
    for (const Cpt& cpt : net.cpts()) {
        if (!space.contains(cpt.child)) cpts.push_back(cpt);
    }
    for (Cpt& cpt : hyp_cpts) cpts.push_back(std::move(cpt));
    return DiscreteNetwork::from_cpts(net.variables(), std::move(cpts));
}

}  // namespace asymnet
