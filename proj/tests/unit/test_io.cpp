#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>

#include "asymnet/fixtures.hpp"
#include "asymnet/inference.hpp"
#include "asymnet/io.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"
#include "support/seed.hpp"

using namespace asymnet;
using namespace asymnet::testing;

namespace {

const std::filesystem::path kFixtures = std::filesystem::path(ASYMNET_DATA_DIR) / "fixtures";

Error error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error");
    return Error(ErrorCode::ContractViolation, "");
}

ModelDocument doc_of(DiscreteNetwork n) {
    ModelDocument d;
    d.model = std::move(n);
    return d;
}
ModelDocument doc_of(Multinet m) {
    ModelDocument d;
    d.model = std::move(m);
    return d;
}
ModelDocument doc_of(SimilarityNetwork s) {
    ModelDocument d;
    d.model = std::move(s);
    return d;
}

const char* kTiny = R"({
  "kind": "network",
  "version": "1",
  "model": {
    "variables": [{"id": "x", "values": ["0", "1"]}],
    "arcs": [],
    "cpts": {"x": {"parents": [], "rows": [[0.25, 0.75]]}}
  }
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("parsing a minimal document") {
    const ModelDocument doc = parse_model(kTiny);
    REQUIRE(doc.kind() == ModelKind::Network);
    const DiscreteNetwork& net = std::get<DiscreteNetwork>(doc.model);
    CHECK(net.cpt("x").rows[0][1] == 0.75);
    CHECK(net.variable("x").name == "x");  // name defaults to the id
}

TEST_CASE("parse errors") {
    CHECK(error_of([] { parse_model(""); }).code() == ErrorCode::Parse);

    const Error broken = error_of([] { parse_model("{\n  \"kind\": \"network\",\n  oops\n}"); });
    CHECK(broken.code() == ErrorCode::Parse);
    CHECK(std::string(broken.what()).find("line 3") != std::string::npos);

    const Error row = error_of([] { parse_model(with(kTiny, "[[0.25, 0.75]]", "[[0.25, 0.5, 0.25]]")); });
    CHECK(row.code() == ErrorCode::Schema);
    CHECK(std::string(row.what()).find("x") != std::string::npos);

    const Error rows = error_of([] { parse_model(with(kTiny, "[[0.25, 0.75]]", "[]")); });
    CHECK(std::string(rows.what()).find("x") != std::string::npos);

    const Error unknown = error_of([] { parse_model(with(kTiny, "\"version\": \"1\",", "\"version\": \"1\", \"extra\": 1,")); });
    CHECK(unknown.code() == ErrorCode::Schema);
    CHECK(std::string(unknown.what()).find("extra") != std::string::npos);

    CHECK(error_of([] { parse_model(with(kTiny, "\"1\"", "\"2\"")); }).code() == ErrorCode::Schema);
    CHECK(error_of([] { parse_model(with(kTiny, "\"network\"", "\"graph\"")); }).code() == ErrorCode::Schema);
    CHECK(error_of([] { parse_model(with(kTiny, "0.25, 0.75", "\"a\", 0.75")); }).code() == ErrorCode::Schema);

    const std::string unnormalized = with(kTiny, "0.25, 0.75", "0.5, 0.75");
    CHECK(error_of([&] { parse_model(unnormalized); }).code() == ErrorCode::ValidationFailed);
    CHECK_FALSE(validate_document(parse_model(unnormalized, false)).ok());
}

TEST_CASE("fixture files") {
    for (const auto& entry : std::filesystem::directory_iterator(kFixtures)) {
        CAPTURE(entry.path().string());
        const std::string text = read_text_file(entry.path());
        const ModelDocument doc = parse_model(text);
        CHECK(validate_document(doc).ok());
        CHECK(serialize_model(doc) == text);
    }
    CHECK(read_model_file(kFixtures / "limousine-simnet.json").model ==
          ModelDocument(doc_of(fixtures::limousine_simnet())).model);
    CHECK(error_of([] { read_model_file(kFixtures / "missing.json"); }).code() == ErrorCode::Io);
}

TEST_CASE("equal models serialize to equal bytes") {
    // the same network built with its variables in another order
    const DiscreteNetwork a = fixtures::building_network();
    std::vector<Variable> vars = a.variables();
    std::reverse(vars.begin(), vars.end());
    const DiscreteNetwork b = DiscreteNetwork::from_cpts(vars, a.cpts());
    CHECK(serialize_model(doc_of(a)) == serialize_model(doc_of(b)));
}

TEST_CASE("property: random models round-trip exactly") {
    Rng rng(seed() + 40);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelDocument net = doc_of(random_network(rng));
        const std::string text = serialize_model(net);
        const ModelDocument back = parse_model(text);
        CHECK(back == net);
        CHECK(serialize_model(back) == text);

        const PlantedFamily family = planted_family(rng);
        const ModelDocument multi = doc_of(family.multinet);
        CHECK(parse_model(serialize_model(multi)) == multi);

        const ModelDocument sim = doc_of(simnet_from_multinet(family.multinet, {{{0}, {1}}, {{1}, {2}}}));
        CHECK(parse_model(serialize_model(sim)) == sim);
    }
}

TEST_CASE("evidence and points") {
    const DiscreteNetwork net = fixtures::building_network();
    const Assignment e = parse_evidence("g=female, b=no", net.variables());
    CHECK(e.at("g") == net.variable("g").value_index("female"));
    CHECK(e.at("b") == net.variable("b").value_index("no"));
    CHECK(parse_evidence("", net.variables()).empty());
    CHECK(error_of([&] { parse_evidence("q=1", net.variables()); }).code() == ErrorCode::ContractViolation);
    CHECK(error_of([&] { parse_evidence("g=tall", net.variables()); }).code() == ErrorCode::ContractViolation);
    CHECK(error_of([&] { parse_evidence("g", net.variables()); }).code() == ErrorCode::ContractViolation);

    const HypothesisSpace single = fixtures::limousine_multinet().hypothesis;
    CHECK(parse_point("worker", single) == HypothesisPoint{2});
    const HypothesisSpace pair = fixtures::pair_simnet().cover.hypothesis;
    CHECK(parse_point("h1=w,h2=s", pair) == HypothesisPoint{0, 2});
    CHECK(error_of([&] { parse_point("h1=w", pair); }).code() == ErrorCode::ContractViolation);
}

TEST_CASE("queries agree across representations") {
    const ModelDocument net = doc_of(union_network(fixtures::limousine_multinet()).network);
    const ModelDocument multi = doc_of(fixtures::limousine_multinet());
    const ModelDocument sim = doc_of(fixtures::limousine_simnet());
    const auto vars = multi.variables();
    for (const char* text : {"", "g=male", "b=yes,l=no", "g=female,b=no,l=yes"}) {
        CAPTURE(text);
        const Assignment e = parse_evidence(text, vars);
        const QueryResult a = run_query(net, e), b = run_query(multi, e), c = run_query(sim, e);
        REQUIRE(a.labels == b.labels);
        REQUIRE(b.labels == c.labels);
        for (std::size_t k = 0; k < a.posterior.size(); ++k) {
            CHECK(std::abs(a.posterior[k] - b.posterior[k]) <= 1e-9);
            CHECK(std::abs(b.posterior[k] - c.posterior[k]) <= 1e-9);
        }
        CHECK_FALSE(c.diagnostics.empty());
    }

    const std::string shown = format_query_result(run_query(multi, {}));
    CHECK(shown.find("posterior:") != std::string::npos);
    CHECK(shown.find("multiplications: ") != std::string::npos);
}

TEST_CASE("staged queries through run_query") {
    QueryOptions options;
    options.prior_network = fixtures::staged_prior_network();
    options.apriori_evidence = {{"r1", 1}, {"r2", 1}};
    const Assignment e{{"f1", 1}};
    const QueryResult staged = run_query(doc_of(fixtures::staged_clue_multinet()), e, options);

    QueryOptions whole_options;
    whole_options.apriori_evidence = options.apriori_evidence;
    const QueryResult whole = run_query(doc_of(fixtures::staged_network()), e, whole_options);
    for (std::size_t k = 0; k < whole.posterior.size(); ++k) {
        CHECK(std::abs(staged.posterior[k] - whole.posterior[k]) <= 1e-9);
    }
}
