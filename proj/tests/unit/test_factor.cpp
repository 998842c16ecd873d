#include <doctest.h>

#include "asymnet/factor.hpp"
#include "asymnet/fixtures.hpp"

using namespace asymnet;

namespace {

Factor table(std::vector<VarId> scope, std::vector<std::size_t> cards, std::vector<double> values) {
    Factor f;
    f.scope = std::move(scope);
    f.cardinalities = std::move(cards);
    f.values = std::move(values);
    f.value_map.assign(f.scope.size(), {});
    return f;
}

}  // namespace

TEST_CASE("factor from a CPT puts parents first and the child last") {
    const Factor f = Factor::from_cpt(fixtures::building_network(), "b");
    CHECK(f.scope == std::vector<VarId>{"g", "h", "b"});
    CHECK(f.size() == 12);
    CHECK(f.at({{"g", 0}, {"h", 2}, {"b", 0}}) == 1.0);
    CHECK(f.at({{"g", 1}, {"h", 0}, {"b", 1}}) == doctest::Approx(0.1));
}

TEST_CASE("product counts one multiplication per result cell") {
    const Factor a = table({"x"}, {2}, {0.2, 0.8});
    const Factor b = table({"x", "y"}, {2, 3}, {1, 2, 3, 4, 5, 6});
    MultiplicationCounter counter;
    const Factor c = multiply(a, b, counter);
    CHECK(counter.count == 6);
    CHECK(c.size() == 6);
    CHECK(c.at({{"x", 0}, {"y", 2}}) == doctest::Approx(0.6));
    CHECK(c.at({{"x", 1}, {"y", 0}}) == doctest::Approx(3.2));

    const Factor d = multiply(Factor::scalar(2.0), a, counter);
    CHECK(counter.count == 8);
    CHECK(d.at({{"x", 1}}) == doctest::Approx(1.6));
}

TEST_CASE("summing out, reducing and restricting") {
    const Factor f = table({"x", "y"}, {2, 3}, {1, 2, 3, 4, 5, 6});
    const Factor sx = sum_out(f, "x");
    CHECK(sx.scope == std::vector<VarId>{"y"});
    CHECK(sx.values == std::vector<double>{5, 7, 9});
    const Factor sy = sum_out(f, "y");
    CHECK(sy.values == std::vector<double>{6, 15});

    const Factor r = reduce(f, {{"y", 1}, {"z", 0}});
    CHECK(r.scope == std::vector<VarId>{"x"});
    CHECK(r.values == std::vector<double>{2, 5});

    const Factor kept = restrict_values(f, "y", {2, 0});
    CHECK(kept.cardinalities == std::vector<std::size_t>{2, 2});
    CHECK(kept.at({{"x", 1}, {"y", 2}}) == 6);
    CHECK(kept.at({{"x", 1}, {"y", 0}}) == 4);
    CHECK(kept.at({{"x", 1}, {"y", 1}}) == 0);  // outside the restriction
    CHECK(kept.original_value(1, 0) == 2);
}

TEST_CASE("reordering and normalizing") {
    const Factor f = table({"x", "y"}, {2, 3}, {1, 2, 3, 4, 5, 6});
    const Factor g = reorder(f, {"y", "x"});
    CHECK(g.values == std::vector<double>{1, 4, 2, 5, 3, 6});
    CHECK_THROWS_AS(reorder(f, {"x"}), Error);

    Factor n = f;
    CHECK(normalize(n));
    CHECK(n.sum() == doctest::Approx(1.0));
    CHECK(n.values[5] == doctest::Approx(6.0 / 21.0));

    Factor zero = table({"x"}, {2}, {0, 0});
    CHECK_FALSE(normalize(zero));
    CHECK(zero.values == std::vector<double>{0, 0});
}
