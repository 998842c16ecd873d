#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "asymnet/fixtures.hpp"
#include "asymnet/inference.hpp"
#include "asymnet/io.hpp"

namespace py = pybind11;
using namespace asymnet;

namespace {

// Evidence arrives as {variable: label}.
Assignment to_assignment(const std::map<std::string, std::string>& labels, const std::vector<Variable>& vars) {
    std::string text;
    for (const auto& [id, label] : labels) {
        if (!text.empty()) text += ",";
        text += id + "=" + label;
    }
    return parse_evidence(text, vars);
}

const SimilarityNetwork& as_simnet_doc(const ModelDocument& doc) {
    if (doc.kind() != ModelKind::Simnet) fail(ErrorCode::ContractViolation, "expects a similarity network");
    return std::get<SimilarityNetwork>(doc.model);
}

// Simnets are first converted, so every kind yields a multinet here.
Multinet as_multinet_doc(const ModelDocument& doc) {
    switch (doc.kind()) {
        case ModelKind::Multinet: return std::get<Multinet>(doc.model);
        case ModelKind::Simnet: return convert_to_multinet(std::get<SimilarityNetwork>(doc.model));
        case ModelKind::Network: break;
    }
    fail(ErrorCode::ContractViolation, "expects a multinet or similarity network");
}

ModelDocument wrap(DiscreteNetwork n) {
    ModelDocument d;
    d.model = std::move(n);
    return d;
}

ModelDocument wrap(Multinet m) {
    ModelDocument d;
    d.model = std::move(m);
    return d;
}

py::dict query(const ModelDocument& doc, const std::map<std::string, std::string>& evidence,
               const std::vector<std::string>& hypothesis, const ModelDocument* prior,
               const std::map<std::string, std::string>& apriori) {
    QueryOptions options;
    options.hypothesis = hypothesis;
    if (prior != nullptr) {
        if (prior->kind() != ModelKind::Network) fail(ErrorCode::ContractViolation, "prior must be a network");
        options.prior_network = std::get<DiscreteNetwork>(prior->model);
    }
    std::vector<Variable> vars = doc.variables();
    if (prior != nullptr) {
        for (const Variable& v : prior->variables()) vars.push_back(v);
    }
    options.apriori_evidence = to_assignment(apriori, vars);
    const QueryResult r = run_query(doc, to_assignment(evidence, doc.variables()), options);
    py::dict posterior;
    for (std::size_t k = 0; k < r.labels.size(); ++k) posterior[py::str(r.labels[k])] = r.posterior[k];
    py::dict out;
    out["posterior"] = posterior;
    out["multiplications"] = r.multiplications;
    out["notes"] = r.diagnostics;
    return out;
}

std::size_t parameter_count(const ModelDocument& doc) {
    if (doc.kind() == ModelKind::Network) return free_parameter_count(std::get<DiscreteNetwork>(doc.model));
    return multinet_param_count(as_multinet_doc(doc));
}

py::dict priors(const ModelDocument& doc) {
    py::dict out;
    if (doc.kind() == ModelKind::Simnet) {
        const SimilarityNetwork& s = std::get<SimilarityNetwork>(doc.model);
        const Factor f = recover_priors(s);
        for (std::size_t k = 0; k < s.cover.hypothesis.size(); ++k) {
            const HypothesisPoint p = s.cover.hypothesis.point_at(k);
            out[py::str(s.cover.hypothesis.label(p))] = f.at(s.cover.hypothesis.as_assignment(p));
        }
        return out;
    }
    const Multinet m = as_multinet_doc(doc);
    const std::vector<double> values = hypothesis_priors(m);
    for (std::size_t k = 0; k < values.size(); ++k) out[py::str(m.hypothesis.label(m.hypothesis.point_at(k)))] = values[k];
    return out;
}

py::list redundancy(const ModelDocument& doc) {
    py::list out;
    for (const RedundantParameter& r : redundancy_report(as_simnet_doc(doc))) {
        py::dict entry;
        entry["parameter"] = r.label;
        entry["networks"] = r.edges;
        entry["discrepancy"] = r.discrepancy;
        entry["incoherent"] = r.incoherent;
        out.append(entry);
    }
    return out;
}

py::dict joint(const ModelDocument& doc) {
    JointTable table;
    switch (doc.kind()) {
        case ModelKind::Network: table = enumerate_joint(std::get<DiscreteNetwork>(doc.model)); break;
        case ModelKind::Multinet: table = mixture_joint(std::get<Multinet>(doc.model)); break;
        case ModelKind::Simnet: table = reconstruct_joint(std::get<SimilarityNetwork>(doc.model)); break;
    }
    py::dict out;
    out["scope"] = table.scope;
    out["cardinalities"] = table.cardinalities;
    out["probabilities"] = table.probabilities;
    return out;
}

}  // namespace

PYBIND11_MODULE(_asymnet, m) {
    m.doc() = "Bayesian networks, multinets and similarity networks";

    static py::exception<Error> error(m, "AsymnetError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::class_<ModelDocument>(m, "Model")
        .def_property_readonly("kind", [](const ModelDocument& d) { return std::string(to_string(d.kind())); })
        .def_property_readonly("variables",
                               [](const ModelDocument& d) {
                                   std::map<std::string, std::vector<std::string>> out;
                                   for (const Variable& v : d.variables()) out[v.id] = v.values;
                                   return out;
                               })
        .def("to_json", &serialize_model)
        .def("validate",
             [](const ModelDocument& d) {
                 std::vector<std::string> lines;
                 for (const Violation& v : validate_document(d).violations) {
                     lines.push_back(std::string(to_string(v.kind)) + " [" + v.subject + "]: " + v.message);
                 }
                 return lines;
             })
        .def("query",
             [](const ModelDocument& d, const std::map<std::string, std::string>& evidence,
                const std::vector<std::string>& hypothesis, const ModelDocument* prior,
                const std::map<std::string, std::string>& apriori) {
                 return query(d, evidence, hypothesis, prior, apriori);
             },
             py::arg("evidence") = std::map<std::string, std::string>{},
             py::arg("hypothesis") = std::vector<std::string>{}, py::arg("prior") = nullptr,
             py::arg("apriori") = std::map<std::string, std::string>{})
        .def("parameter_count", &parameter_count)
        .def("priors", &priors)
        .def("redundancy", &redundancy)
        .def("joint", &joint)
        .def("to_multinet", [](const ModelDocument& d) { return wrap(as_multinet_doc(d)); })
        .def("to_network", [](const ModelDocument& d) { return wrap(union_network(as_multinet_doc(d)).network); })
        .def("__eq__", [](const ModelDocument& a, const ModelDocument& b) { return a == b; })
        .def("__repr__", [](const ModelDocument& d) {
            return "<asymnet.Model kind=" + std::string(to_string(d.kind())) + " variables=" +
                   std::to_string(d.variables().size()) + ">";
        });

    m.def("loads", [](const std::string& text, bool validate) { return parse_model(text, validate); },
          py::arg("text"), py::arg("validate") = true);
    m.def("load", [](const std::string& path, bool validate) { return read_model_file(path, validate); },
          py::arg("path"), py::arg("validate") = true);
    m.def("fixture_names", &fixtures::names);
    m.def("fixture", &fixtures::document, py::arg("name"));
}
