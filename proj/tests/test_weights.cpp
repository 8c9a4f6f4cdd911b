#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fbmvar/weights.hpp"

using namespace fbmvar;
using Catch::Approx;

namespace {

std::vector<double> sweep(double lo, double hi, double step) {
    std::vector<double> g;
    for (double x = lo; x <= hi + 1e-12; x += step) g.push_back(x);
    return g;
}

} // namespace

TEST_CASE("builtin ids", "[weights]") {
    for (const char* id : {"one", "x", "x2", "x3", "sin", "cos", "exp_neg_x2"}) {
        INFO(id);
        CHECK(builtin(id).max_order() == 6);
        CHECK(builtin(id).id() == id);
    }
    CHECK(builtin_registry().ids().size() == 7);
    CHECK_THROWS_AS(builtin("exp_x2"), UnknownWeight);
}

TEST_CASE("builtin values", "[weights]") {
    for (double x : {-3.0, 0.0, 2.5}) {
        CHECK(builtin("one")(x) == 1.0);
        for (int i = 1; i <= 6; ++i) CHECK(builtin("one").derivative(i, x) == 0.0);
    }
    CHECK(builtin("x2").derivative(2, 3.0) == 2.0);
    CHECK(builtin("x2").derivative(1, 3.0) == 6.0);
    CHECK(builtin("x3").derivative(3, -1.7) == 6.0);
    CHECK(builtin("x3").derivative(4, -1.7) == 0.0);
    CHECK(builtin("sin").derivative(3, 0.0) == -1.0);
    CHECK(builtin("cos").derivative(1, 0.5) == Approx(-std::sin(0.5)));
    CHECK(builtin("exp_neg_x2")(1.0) == Approx(std::exp(-1.0)));
    CHECK(builtin("exp_neg_x2").derivative(1, 1.0) == Approx(-2.0 * std::exp(-1.0)));
    CHECK(builtin("exp_neg_x2").derivative(2, 0.0) == Approx(-2.0));
    CHECK_THROWS_AS(builtin("x").derivative(7, 0.0), OrderError);
    CHECK_THROWS_AS(builtin("x").derivative(-1, 0.0), OrderError);
}

TEST_CASE("check_derivatives examples", "[weights]") {
    const std::vector<double> small = {-1.0, 0.0, 1.0};
    CHECK(check_derivatives(builtin("x2"), 1, small, 1e-5) < 1e-8);
    const auto grid = sweep(-5.0, 5.0, 0.25);
    CHECK(check_derivatives(builtin("sin"), 4, grid, 1e-4) < 1e-6);
    for (int i = 1; i <= 6; ++i) CHECK(check_derivatives(builtin("one"), i, grid, 1e-4) == 0.0);
    CHECK_THROWS_AS(check_derivatives(builtin("x"), 7, grid, 1e-4), OrderError);
    CHECK_THROWS_AS(check_derivatives(builtin("x"), 0, grid, 1e-4), OrderError);
    CHECK_THROWS_AS(check_derivatives(builtin("x"), 1, grid, 0.0), DomainError);
}

TEST_CASE("every builtin derivative matches central differences within C step^2", "[weights][property]") {
    const auto grid = sweep(-5.0, 5.0, 0.05);
    for (const auto& id : builtin_registry().ids()) {
        const WeightFunction& w = builtin(id);
        for (double step : {1e-2, 1e-3}) {
            for (int order = 1; order <= w.max_order(); ++order) {
                INFO(id << " order " << order << " step " << step);
                // Round-off term: the evaluators are O(max |h|) on [-5, 5].
                CHECK(check_derivatives(w, order, grid, step) <= w.fd_constant() * step * step + 1e-9);
            }
        }
    }
}

TEST_CASE("registered growth bounds hold on a sweep", "[weights][property]") {
    const auto grid = sweep(-50.0, 50.0, 0.1);
    for (const auto& id : builtin_registry().ids()) {
        const WeightFunction& w = builtin(id);
        const auto b = w.growth_bound();
        for (int order = 0; order <= w.max_order(); ++order) {
            for (double x : grid) {
                INFO(id << " order " << order << " x " << x);
                REQUIRE(std::abs(w.derivative(order, x)) <= b.constant * (1.0 + std::pow(std::abs(x), b.degree)) + 1e-12);
            }
        }
    }
    CHECK(builtin("x3").growth_class() == GrowthClass::polynomial);
    CHECK(builtin("sin").growth_class() == GrowthClass::bounded_smooth);
}

TEST_CASE("linear combinations carry derivatives", "[weights]") {
    const WeightFunction w = linear_combination(2.0, builtin("x2"), -3.0, builtin("sin"));
    for (double x : {-1.0, 0.3, 2.0}) {
        for (int i = 0; i <= 6; ++i) {
            CHECK(w.derivative(i, x) ==
                  Approx(2.0 * builtin("x2").derivative(i, x) - 3.0 * builtin("sin").derivative(i, x)));
        }
    }
    CHECK(w.growth_class() == GrowthClass::polynomial);
    WeightRegistry r;
    r.add(w);
    CHECK(r.contains(w.id()));
}

TEST_CASE("registry add replaces by id", "[weights]") {
    WeightRegistry r = make_builtin_registry();
    std::vector<WeightFunction::Evaluator> ev = {[](double x) { return x * x; }, [](double x) { return 2 * x; },
                                                 [](double) { return 3.0; }};
    r.add(WeightFunction("x2", ev, GrowthClass::polynomial, {3.0, 2.0}, 1.0));
    CHECK(r.get("x2").max_order() == 2);
    CHECK(r.get("x2").derivative(2, 0.0) == 3.0);
    CHECK(builtin("x2").derivative(2, 0.0) == 2.0);
}
