#include "asymnet/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "asymnet/inference.hpp"

namespace asymnet {

using json = nlohmann::json;

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::Network: return "network";
        case ModelKind::Multinet: return "multinet";
        case ModelKind::Simnet: return "simnet";
    }
    return "unknown";
}

std::vector<Variable> ModelDocument::variables() const {
    switch (kind()) {
        case ModelKind::Network: return std::get<DiscreteNetwork>(model).variables();
        case ModelKind::Multinet: {
            const Multinet& m = std::get<Multinet>(model);
            return m.locals.empty() ? m.hypothesis.variables : m.locals.front().variables();
        }
        case ModelKind::Simnet: return std::get<SimilarityNetwork>(model).variables;
    }
    return {};
}

// ---------------------------------------------------------------------------
// reading

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
    fail(ErrorCode::Schema, (path.empty() ? std::string("/") : path) + ": " + message);
}

std::string escape_pointer(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

// A JSON value together with its location in the document.
struct Node {
    const json& value;
    std::string path;

    Node at(const std::string& key) const {
        if (!value.is_object()) schema_error(path, "expected an object");
        auto it = value.find(key);
        if (it == value.end()) schema_error(path, "missing member \"" + key + "\"");
        return {*it, path + "/" + escape_pointer(key)};
    }
    std::optional<Node> find(const std::string& key) const {
        if (!value.is_object()) schema_error(path, "expected an object");
        auto it = value.find(key);
        if (it == value.end()) return std::nullopt;
        return Node{*it, path + "/" + escape_pointer(key)};
    }
    Node at(std::size_t i) const { return {value.at(i), path + "/" + std::to_string(i)}; }

    const json& array() const {
        if (!value.is_array()) schema_error(path, "expected an array");
        return value;
    }
    std::size_t size() const { return array().size(); }
    std::string string() const {
        if (!value.is_string()) schema_error(path, "expected a string");
        return value.get<std::string>();
    }
    double number() const {
        if (!value.is_number()) schema_error(path, "expected a number");
        return value.get<double>();
    }
    std::size_t index() const {
        if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
            schema_error(path, "expected a nonnegative integer");
        }
        return value.get<std::size_t>();
    }
    std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).string());
        return out;
    }
};

void check_keys(const Node& node, std::initializer_list<std::string_view> allowed) {
    if (!node.value.is_object()) schema_error(node.path, "expected an object");
    for (const auto& [key, value] : node.value.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            schema_error(node.path, "unknown member \"" + key + "\"");
        }
    }
}

std::vector<Variable> read_variables(const Node& node) {
    std::vector<Variable> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const Node v = node.at(i);
        check_keys(v, {"id", "name", "values"});
        Variable var;
        var.id = v.at("id").string();
        if (var.id.empty()) schema_error(v.path + "/id", "variable id is empty");
        const auto name = v.find("name");
        var.name = name ? name->string() : var.id;
        var.values = v.at("values").strings();
        out.push_back(std::move(var));
    }
    return out;
}

const Variable& lookup(const std::vector<Variable>& vars, const std::string& id, const std::string& path) {
    for (const Variable& v : vars) {
        if (v.id == id) return v;
    }
    schema_error(path, "unknown variable '" + id + "'");
}

DiscreteNetwork read_network(const Node& node, const std::vector<Variable>* inherited) {
    check_keys(node, {"variables", "arcs", "cpts"});
    std::vector<Variable> vars;
    if (const auto v = node.find("variables")) {
        vars = read_variables(*v);
    } else if (inherited != nullptr) {
        vars = *inherited;
    } else {
        schema_error(node.path, "missing member \"variables\"");
    }

    std::set<Arc> arcs;
    const Node arc_list = node.at("arcs");
    for (std::size_t i = 0; i < arc_list.size(); ++i) {
        const Node arc = arc_list.at(i);
        if (arc.size() != 2) schema_error(arc.path, "an arc is a [from, to] pair");
        const std::string from = arc.at(0).string();
        const std::string to = arc.at(1).string();
        lookup(vars, from, arc.at(0).path);
        lookup(vars, to, arc.at(1).path);
        arcs.insert({from, to});
    }

    std::vector<Cpt> cpts;
    const Node table_map = node.at("cpts");
    if (!table_map.value.is_object()) schema_error(table_map.path, "expected an object keyed by variable id");
    for (const auto& [child, body] : table_map.value.items()) {
        const Node table{body, table_map.path + "/" + escape_pointer(child)};
        check_keys(table, {"parents", "rows"});
        const Variable& var = lookup(vars, child, table.path);
        Cpt cpt;
        cpt.child = child;
        cpt.parents = table.at("parents").strings();
        std::size_t expected_rows = 1;
        for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
            expected_rows *= lookup(vars, cpt.parents[i], table.path + "/parents/" + std::to_string(i)).cardinality();
        }
        const Node rows = table.at("rows");
        if (rows.size() != expected_rows) {
            schema_error(rows.path, "CPT of '" + child + "' needs " + std::to_string(expected_rows) + " rows, found " +
                                        std::to_string(rows.size()));
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Node row = rows.at(r);
            if (row.size() != var.cardinality()) {
                schema_error(row.path, "row of '" + child + "' needs " + std::to_string(var.cardinality()) +
                                           " entries, found " + std::to_string(row.size()));
            }
            std::vector<double> entries;
            for (std::size_t k = 0; k < row.size(); ++k) entries.push_back(row.at(k).number());
            cpt.rows.push_back(std::move(entries));
        }
        cpts.push_back(std::move(cpt));
    }
    return DiscreteNetwork(std::move(vars), std::move(arcs), std::move(cpts));
}

HypothesisSpace read_hypothesis(const Node& node, const std::vector<Variable>& vars) {
    HypothesisSpace space;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const Node id = node.at(i);
        space.variables.push_back(lookup(vars, id.string(), id.path));
    }
    if (space.variables.empty()) schema_error(node.path, "at least one hypothesis variable is required");
    return space;
}

HypothesisPoint read_point(const Node& node, const HypothesisSpace& space) {
    std::vector<std::string> labels;
    if (node.value.is_string()) {
        labels.push_back(node.string());
    } else {
        labels = node.strings();
    }
    if (labels.size() != space.variables.size()) {
        schema_error(node.path, "a point needs one label per hypothesis variable");
    }
    HypothesisPoint p;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const auto index = space.variables[k].value_index(labels[k]);
        if (!index) schema_error(node.path, "'" + labels[k] + "' is not a value of '" + space.variables[k].id + "'");
        p.push_back(*index);
    }
    return p;
}

std::vector<std::vector<HypothesisPoint>> read_point_sets(const Node& node, const HypothesisSpace& space) {
    std::vector<std::vector<HypothesisPoint>> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const Node set = node.at(i);
        std::vector<HypothesisPoint> points;
        for (std::size_t k = 0; k < set.size(); ++k) points.push_back(read_point(set.at(k), space));
        out.push_back(std::move(points));
    }
    return out;
}

Multinet read_multinet(const Node& node) {
    check_keys(node, {"variables", "hypothesis_vars", "blocks", "block_priors", "locals"});
    const std::vector<Variable> vars = read_variables(node.at("variables"));
    Multinet m;
    m.hypothesis = read_hypothesis(node.at("hypothesis_vars"), vars);
    m.blocks = read_point_sets(node.at("blocks"), m.hypothesis);
    const Node priors = node.at("block_priors");
    for (std::size_t i = 0; i < priors.size(); ++i) m.block_priors.push_back(priors.at(i).number());
    const Node locals = node.at("locals");
    for (std::size_t i = 0; i < locals.size(); ++i) m.locals.push_back(read_network(locals.at(i), &vars));
    return m;
}

SimilarityNetwork read_simnet(const Node& node) {
    check_keys(node, {"variables", "hypothesis_vars", "cover", "locals"});
    const std::vector<Variable> vars = read_variables(node.at("variables"));
    Cover cover;
    cover.hypothesis = read_hypothesis(node.at("hypothesis_vars"), vars);
    cover.edges = read_point_sets(node.at("cover"), cover.hypothesis);
    std::vector<OrdinaryLocalNetwork> locals;
    const Node list = node.at("locals");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Node entry = list.at(i);
        check_keys(entry, {"edge", "depicted", "network", "retained"});
        OrdinaryLocalNetwork local;
        local.edge = entry.at("edge").index();
        local.depicted = entry.at("depicted").strings();
        std::sort(local.depicted.begin(), local.depicted.end());
        std::vector<Variable> depicted_vars;
        for (std::size_t k = 0; k < local.depicted.size(); ++k) {
            depicted_vars.push_back(lookup(vars, local.depicted[k], entry.path + "/depicted"));
        }
        local.network = read_network(entry.at("network"), &depicted_vars);
        if (const auto retained = entry.find("retained")) {
            for (const std::string& id : retained->strings()) local.retained.insert(id);
        }
        locals.push_back(std::move(local));
    }
    SimilarityNetwork s;
    s.cover = std::move(cover);
    s.locals = std::move(locals);
    s.variables = vars;
    std::sort(s.variables.begin(), s.variables.end(), [](const Variable& a, const Variable& b) { return a.id < b.id; });
    return s;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

ModelDocument parse_model(std::string_view text, bool validate) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, column] = line_column(text, byte);
        std::string what = e.what();
        if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
        fail(ErrorCode::Parse, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
    }
    const Node top{root, ""};
    check_keys(top, {"kind", "version", "model"});
    ModelDocument doc;
    doc.version = top.at("version").string();
    if (doc.version != "1") schema_error("/version", "unsupported format version '" + doc.version + "'");
    const std::string kind = top.at("kind").string();
    const Node model = top.at("model");
    if (kind == "network") {
        doc.model = read_network(model, nullptr);
    } else if (kind == "multinet") {
        doc.model = read_multinet(model);
    } else if (kind == "simnet") {
        doc.model = read_simnet(model);
    } else {
        schema_error("/kind", "kind must be network, multinet or simnet, not '" + kind + "'");
    }
    if (validate) {
        const ValidationReport report = validate_document(doc);
        if (!report.ok()) fail(ErrorCode::ValidationFailed, "invalid " + kind + ":\n" + report.to_string());
    }
    return doc;
}

ValidationReport validate_document(const ModelDocument& doc) {
    switch (doc.kind()) {
        case ModelKind::Network: return validate_network(std::get<DiscreteNetwork>(doc.model));
        case ModelKind::Multinet: return validate_multinet(std::get<Multinet>(doc.model));
        case ModelKind::Simnet: return validate_simnet(std::get<SimilarityNetwork>(doc.model));
    }
    return {};
}

// ---------------------------------------------------------------------------
// writing

namespace {

json variables_json(const std::vector<Variable>& vars) {
    json out = json::array();
    for (const Variable& v : vars) out.push_back({{"id", v.id}, {"name", v.name}, {"values", v.values}});
    return out;
}

json network_json(const DiscreteNetwork& net, bool with_variables) {
    json out = json::object();
    if (with_variables) out["variables"] = variables_json(net.variables());
    out["arcs"] = json::array();
    for (const auto& [from, to] : net.arcs()) out["arcs"].push_back({from, to});
    out["cpts"] = json::object();
    for (const Cpt& cpt : net.cpts()) out["cpts"][cpt.child] = {{"parents", cpt.parents}, {"rows", cpt.rows}};
    return out;
}

json point_json(const HypothesisPoint& p, const HypothesisSpace& space) {
    json out = json::array();
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k < space.variables.size() && p[k] < space.variables[k].cardinality()) {
            out.push_back(space.variables[k].values[p[k]]);
        } else {
            out.push_back("?");
        }
    }
    return out;
}

json point_sets_json(const std::vector<std::vector<HypothesisPoint>>& sets, const HypothesisSpace& space) {
    json out = json::array();
    for (const auto& set : sets) {
        json points = json::array();
        for (const HypothesisPoint& p : set) points.push_back(point_json(p, space));
        out.push_back(std::move(points));
    }
    return out;
}

json model_json(const ModelDocument& doc) {
    switch (doc.kind()) {
        case ModelKind::Network: return network_json(std::get<DiscreteNetwork>(doc.model), true);
        case ModelKind::Multinet: {
            const Multinet& m = std::get<Multinet>(doc.model);
            const std::vector<Variable> vars = doc.variables();
            json out = json::object();
            out["variables"] = variables_json(vars);
            out["hypothesis_vars"] = m.hypothesis.ids();
            out["blocks"] = point_sets_json(m.blocks, m.hypothesis);
            out["block_priors"] = m.block_priors;
            out["locals"] = json::array();
            for (const DiscreteNetwork& local : m.locals) {
                out["locals"].push_back(network_json(local, local.variables() != vars));
            }
            return out;
        }
        case ModelKind::Simnet: {
            const SimilarityNetwork& s = std::get<SimilarityNetwork>(doc.model);
            json out = json::object();
            out["variables"] = variables_json(s.variables);
            out["hypothesis_vars"] = s.cover.hypothesis.ids();
            out["cover"] = point_sets_json(s.cover.edges, s.cover.hypothesis);
            out["locals"] = json::array();
            for (const OrdinaryLocalNetwork& local : s.locals) {
                std::vector<Variable> inherited;
                for (const VarId& id : local.depicted) {
                    for (const Variable& v : s.variables) {
                        if (v.id == id) inherited.push_back(v);
                    }
                }
                json entry = {{"edge", local.edge},
                              {"depicted", local.depicted},
                              {"network", network_json(local.network, local.network.variables() != inherited)}};
                if (!local.retained.empty()) {
                    entry["retained"] = std::vector<std::string>(local.retained.begin(), local.retained.end());
                }
                out["locals"].push_back(std::move(entry));
            }
            return out;
        }
    }
    return {};
}

std::string number_text(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

bool is_scalar(const json& v) { return !v.is_object() && !v.is_array(); }

void emit(const json& v, std::size_t indent, std::string& out) {
    const std::string pad(indent, ' ');
    const std::string inner(indent + 2, ' ');
    if (v.is_object()) {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : v.items()) {  // std::map: keys already sorted
            if (!first) out += ",\n";
            first = false;
            out += inner + json(key).dump() + ": ";
            emit(value, indent + 2, out);
        }
        out += "\n" + pad + "}";
    } else if (v.is_array()) {
        if (std::all_of(v.begin(), v.end(), is_scalar)) {
            out += "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) out += ", ";
                emit(v[i], indent, out);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += ",\n";
            out += inner;
            emit(v[i], indent + 2, out);
        }
        out += "\n" + pad + "]";
    } else if (v.is_number_float()) {
        out += number_text(v.get<double>());
    } else {
        out += v.dump();
    }
}

}  // namespace

std::string serialize_model(const ModelDocument& doc) {
    const json root = {{"kind", std::string(to_string(doc.kind()))}, {"version", doc.version}, {"model", model_json(doc)}};
    std::string out;
    emit(root, 0, out);
    out += "\n";
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) fail(ErrorCode::Io, "error while reading '" + path.string() + "'");
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorCode::Io, "error while writing '" + path.string() + "'");
}

ModelDocument read_model_file(const std::filesystem::path& path, bool validate) {
    const std::string text = read_text_file(path);
    try {
        return parse_model(text, validate);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// evidence and queries

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

Assignment parse_evidence(std::string_view text, const std::vector<Variable>& variables) {
    Assignment out;
    if (trim(text).empty()) return out;
    for (const std::string& pair : split(text, ',')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) fail(ErrorCode::ContractViolation, "evidence '" + pair + "' is not var=value");
        const std::string id = trim(std::string_view(pair).substr(0, eq));
        const std::string label = trim(std::string_view(pair).substr(eq + 1));
        auto it = std::find_if(variables.begin(), variables.end(), [&](const Variable& v) { return v.id == id; });
        if (it == variables.end()) fail(ErrorCode::ContractViolation, "unknown evidence variable '" + id + "'");
        const auto index = it->value_index(label);
        if (!index) fail(ErrorCode::ContractViolation, "'" + label + "' is not a value of '" + id + "'");
        if (out.contains(id)) fail(ErrorCode::ContractViolation, "'" + id + "' is observed twice");
        out[id] = *index;
    }
    return out;
}

HypothesisPoint parse_point(std::string_view text, const HypothesisSpace& space) {
    const std::string body = trim(text);
    if (space.variables.size() == 1 && body.find('=') == std::string::npos) {
        const auto index = space.variables[0].value_index(body);
        if (!index) fail(ErrorCode::ContractViolation, "'" + body + "' is not a hypothesis value");
        return {*index};
    }
    const Assignment a = parse_evidence(body, space.variables);
    HypothesisPoint p;
    for (const Variable& v : space.variables) {
        auto it = a.find(v.id);
        if (it == a.end()) fail(ErrorCode::ContractViolation, "point does not bind '" + v.id + "'");
        p.push_back(it->second);
    }
    return p;
}

QueryResult run_query(const ModelDocument& doc, const Assignment& evidence, const QueryOptions& options) {
    QueryResult result;
    Factor distribution;
    if (doc.kind() == ModelKind::Network) {
        const DiscreteNetwork& net = std::get<DiscreteNetwork>(doc.model);
        std::vector<VarId> ids = options.hypothesis.empty() ? std::vector<VarId>{"h"} : options.hypothesis;
        for (const VarId& id : ids) {
            if (!net.contains(id)) fail(ErrorCode::ContractViolation, "network has no hypothesis variable '" + id + "'");
        }
        result.hypothesis = hypothesis_space(net, ids);
        Assignment all = evidence;
        for (const auto& [id, value] : options.apriori_evidence) all[id] = value;
        if (options.prior_network) {
            result.diagnostics.push_back("network documents carry their own priors; --priors ignored");
        }
        Posterior p = posterior_over(net, ids, all);
        distribution = std::move(p.distribution);
        result.multiplications = p.multiplications;
    } else {
        Multinet m;
        if (doc.kind() == ModelKind::Multinet) {
            m = std::get<Multinet>(doc.model);
        } else {
            m = convert_to_multinet(std::get<SimilarityNetwork>(doc.model));
            result.diagnostics.push_back("similarity network converted to a multinet for inference");
        }
        result.hypothesis = m.hypothesis;
        MultinetPosterior p;
        if (options.prior_network) {
            p = staged_posterior(*options.prior_network, m, options.apriori_evidence, evidence);
        } else {
            if (!options.apriori_evidence.empty()) {
                fail(ErrorCode::ContractViolation, "a-priori evidence needs a prior network (--priors)");
            }
            p = posterior(m, evidence);
        }
        distribution = std::move(p.distribution);
        result.multiplications = p.multiplications;
    }
    for (std::size_t k = 0; k < result.hypothesis.size(); ++k) {
        const HypothesisPoint point = result.hypothesis.point_at(k);
        result.labels.push_back(result.hypothesis.label(point));
        result.posterior.push_back(distribution.at(result.hypothesis.as_assignment(point)));
    }
    return result;
}

std::string format_query_result(const QueryResult& result) {
    std::size_t width = 0;
    for (const std::string& label : result.labels) width = std::max(width, label.size());
    std::string out = "posterior:\n";
    for (std::size_t k = 0; k < result.labels.size(); ++k) {
        out += "  " + result.labels[k] + std::string(width - result.labels[k].size() + 2, ' ') +
               number_text(result.posterior[k]) + "\n";
    }
    out += "multiplications: " + std::to_string(result.multiplications) + "\n";
    for (const std::string& d : result.diagnostics) out += "note: " + d + "\n";
    return out;
}

}  // namespace asymnet
