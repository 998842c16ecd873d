#include "asymnet/factor.hpp"

#include <algorithm>

namespace asymnet {

namespace {

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& cards) {
    std::vector<std::size_t> strides(cards.size(), 1);
    for (std::size_t i = cards.size(); i-- > 1;) strides[i - 1] = strides[i] * cards[i];
    return strides;
}

}  // namespace

Factor Factor::scalar(double value) {
    Factor f;
    f.values = {value};
    return f;
}

Factor Factor::from_cpt(const DiscreteNetwork& net, const VarId& child) {
    const Cpt& cpt = net.cpt(child);
    Factor f;
    f.scope = cpt.parents;
    f.scope.push_back(child);
    for (const VarId& id : f.scope) f.cardinalities.push_back(net.cardinality(id));
    f.value_map.resize(f.scope.size());
    f.values.reserve(domain_cells(f.cardinalities));
    for (const auto& row : cpt.rows) f.values.insert(f.values.end(), row.begin(), row.end());
    return f;
}

bool Factor::has(const VarId& id) const noexcept {
    return std::find(scope.begin(), scope.end(), id) != scope.end();
}

std::size_t Factor::position(const VarId& id) const {
    auto it = std::find(scope.begin(), scope.end(), id);
    if (it == scope.end()) fail(ErrorCode::ContractViolation, "variable '" + id + "' not in factor scope");
    return static_cast<std::size_t>(it - scope.begin());
}

std::size_t Factor::original_value(std::size_t var_pos, std::size_t pos) const {
    if (var_pos < value_map.size() && !value_map[var_pos].empty()) return value_map[var_pos][pos];
    return pos;
}

double Factor::at(const Assignment& a) const {
    std::vector<std::size_t> local(scope.size());
    for (std::size_t i = 0; i < scope.size(); ++i) {
        auto it = a.find(scope[i]);
        if (it == a.end()) fail(ErrorCode::ContractViolation, "assignment does not bind '" + scope[i] + "'");
        if (i < value_map.size() && !value_map[i].empty()) {
            auto found = std::find(value_map[i].begin(), value_map[i].end(), it->second);
            if (found == value_map[i].end()) return 0.0;
            local[i] = static_cast<std::size_t>(found - value_map[i].begin());
        } else {
            local[i] = it->second;
        }
    }
    return values[linear_index(cardinalities, local)];
}

double Factor::sum() const {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

Factor multiply(const Factor& a, const Factor& b, MultiplicationCounter& counter) {
    Factor out;
    out.scope = a.scope;
    out.cardinalities = a.cardinalities;
    out.value_map = a.value_map;
    out.value_map.resize(out.scope.size());
    for (std::size_t i = 0; i < b.scope.size(); ++i) {
        if (!a.has(b.scope[i])) {
            out.scope.push_back(b.scope[i]);
            out.cardinalities.push_back(b.cardinalities[i]);
            out.value_map.push_back(i < b.value_map.size() ? b.value_map[i] : std::vector<std::size_t>{});
        }
    }
    const std::size_t cells = domain_cells(out.cardinalities);
    out.values.resize(cells);

    // stride of each output variable inside a and b (0 when absent)
    const auto a_strides = strides_of(a.cardinalities);
    const auto b_strides = strides_of(b.cardinalities);
    std::vector<std::size_t> sa(out.scope.size(), 0);
    std::vector<std::size_t> sb(out.scope.size(), 0);
    for (std::size_t i = 0; i < out.scope.size(); ++i) {
        for (std::size_t j = 0; j < a.scope.size(); ++j) {
            if (a.scope[j] == out.scope[i]) sa[i] = a_strides[j];
        }
        for (std::size_t j = 0; j < b.scope.size(); ++j) {
            if (b.scope[j] == out.scope[i]) {
                sb[i] = b_strides[j];
                if (b.cardinalities[j] != out.cardinalities[i]) {
                    fail(ErrorCode::ContractViolation,
                         "factor product over '" + out.scope[i] + "' with mismatched cardinalities");
                }
            }
        }
    }

    std::vector<std::size_t> values(out.scope.size(), 0);
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        out.values[cell] = a.values[ia] * b.values[ib];
        for (std::size_t i = out.scope.size(); i-- > 0;) {
            if (++values[i] < out.cardinalities[i]) {
                ia += sa[i];
                ib += sb[i];
                break;
            }
            ia -= sa[i] * (out.cardinalities[i] - 1);
            ib -= sb[i] * (out.cardinalities[i] - 1);
            values[i] = 0;
        }
    }
    counter.count += cells;
    return out;
}

Factor sum_out(const Factor& f, const VarId& id) {
    const std::size_t k = f.position(id);
    Factor out;
    for (std::size_t i = 0; i < f.scope.size(); ++i) {
        if (i == k) continue;
        out.scope.push_back(f.scope[i]);
        out.cardinalities.push_back(f.cardinalities[i]);
        out.value_map.push_back(i < f.value_map.size() ? f.value_map[i] : std::vector<std::size_t>{});
    }
    out.values.assign(domain_cells(out.cardinalities), 0.0);
    std::vector<std::size_t> values(f.scope.size(), 0);
    std::vector<std::size_t> kept(out.scope.size(), 0);
    for (double v : f.values) {
        for (std::size_t i = 0, j = 0; i < values.size(); ++i) {
            if (i != k) kept[j++] = values[i];
        }
        out.values[linear_index(out.cardinalities, kept)] += v;
        next_configuration(f.cardinalities, values);
    }
    return out;
}

Factor reduce(const Factor& f, const Assignment& evidence) {
    Factor out = f;
    for (const auto& [id, value] : evidence) {
        if (!out.has(id)) continue;
        const std::size_t k = out.position(id);
        std::size_t local = value;
        if (k < out.value_map.size() && !out.value_map[k].empty()) {
            auto it = std::find(out.value_map[k].begin(), out.value_map[k].end(), value);
            if (it == out.value_map[k].end()) {
                // evidence outside the restricted values: the slice is all zero
                Factor zero = sum_out(out, id);
                std::fill(zero.values.begin(), zero.values.end(), 0.0);
                out = std::move(zero);
                continue;
            }
            local = static_cast<std::size_t>(it - out.value_map[k].begin());
        }
        if (local >= out.cardinalities[k]) {
            fail(ErrorCode::ContractViolation, "evidence value out of range for '" + id + "'");
        }
        Factor sliced;
        for (std::size_t i = 0; i < out.scope.size(); ++i) {
            if (i == k) continue;
            sliced.scope.push_back(out.scope[i]);
            sliced.cardinalities.push_back(out.cardinalities[i]);
            sliced.value_map.push_back(i < out.value_map.size() ? out.value_map[i] : std::vector<std::size_t>{});
        }
        sliced.values.reserve(domain_cells(sliced.cardinalities));
        std::vector<std::size_t> values(out.scope.size(), 0);
        for (double v : out.values) {
            if (values[k] == local) sliced.values.push_back(v);
            next_configuration(out.cardinalities, values);
        }
        out = std::move(sliced);
    }
    return out;
}

Factor restrict_values(const Factor& f, const VarId& id, const std::vector<std::size_t>& kept) {
    const std::size_t k = f.position(id);
    std::vector<std::size_t> local;
    for (std::size_t original : kept) {
        std::size_t pos = original;
        if (k < f.value_map.size() && !f.value_map[k].empty()) {
            auto it = std::find(f.value_map[k].begin(), f.value_map[k].end(), original);
            if (it == f.value_map[k].end()) {
                fail(ErrorCode::ContractViolation, "restriction keeps a value already removed from '" + id + "'");
            }
            pos = static_cast<std::size_t>(it - f.value_map[k].begin());
        }
        local.push_back(pos);
    }
    Factor out;
    out.scope = f.scope;
    out.cardinalities = f.cardinalities;
    out.cardinalities[k] = kept.size();
    out.value_map = f.value_map;
    out.value_map.resize(f.scope.size());
    out.value_map[k] = kept;
    out.values.resize(domain_cells(out.cardinalities));
    std::vector<std::size_t> values(out.scope.size(), 0);
    std::vector<std::size_t> source(out.scope.size(), 0);
    for (double& v : out.values) {
        source = values;
        source[k] = local[values[k]];
        v = f.values[linear_index(f.cardinalities, source)];
        next_configuration(out.cardinalities, values);
    }
    return out;
}

Factor reorder(const Factor& f, const std::vector<VarId>& order) {
    if (order.size() != f.scope.size()) fail(ErrorCode::ContractViolation, "reorder needs a permutation of the scope");
    Factor out;
    out.scope = order;
    std::vector<std::size_t> source_pos;
    for (const VarId& id : order) {
        const std::size_t k = f.position(id);
        source_pos.push_back(k);
        out.cardinalities.push_back(f.cardinalities[k]);
        out.value_map.push_back(k < f.value_map.size() ? f.value_map[k] : std::vector<std::size_t>{});
    }
    out.values.resize(f.values.size());
    std::vector<std::size_t> values(order.size(), 0);
    std::vector<std::size_t> source(order.size(), 0);
    for (double& v : out.values) {
        for (std::size_t i = 0; i < order.size(); ++i) source[source_pos[i]] = values[i];
        v = f.values[linear_index(f.cardinalities, source)];
        next_configuration(out.cardinalities, values);
    }
    return out;
}

bool normalize(Factor& f) {
    const double total = f.sum();
    if (!(total > 0.0)) return false;
    for (double& v : f.values) v /= total;
    return true;
}

}  // namespace asymnet
