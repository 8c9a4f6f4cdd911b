#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fbmvar/config.hpp"

using namespace fbmvar;

namespace {

std::vector<PlanEntry> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.ini");
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const std::string kValid =
    "# comment\n"
    "[quad]\n"
    "hurst = 0.1\n"
    "kappa = 2\n"
    "weight = x2   # trailing comment\n"
    "form = centered_quadratic\n"
    "n_ladder = 16, 32,64\n"
    "replicas = 10\n"
    "seed = 18446744073709551615\n"
    "\n"
    "[clt]\n"
    "hurst = 0.5\n"
    "kappa = 2\n"
    "form = unweighted_centered\n"
    "n_ladder = 100\n"
    "replicas = 2\n"
    "sampler = cholesky\n"
    "output = clt_out\n";

} // namespace

TEST_CASE("valid config parses", "[config]") {
    const auto plans = parse(kValid);
    REQUIRE(plans.size() == 2);
    const auto& q = plans[0];
    CHECK(q.name == "quad");
    CHECK(q.output_stem == "quad");
    CHECK(q.line == 2);
    CHECK(q.plan.hurst.value() == 0.1);
    CHECK(q.plan.spec.kappa == 2);
    CHECK(q.plan.spec.weight == "x2");
    CHECK(q.plan.spec.form == StatisticForm::centered_quadratic);
    CHECK(q.plan.n_ladder == std::vector<std::size_t>{16, 32, 64});
    CHECK(q.plan.replicas == 10);
    CHECK(q.plan.seed == 18446744073709551615ull);
    CHECK(q.plan.sampler == SamplerMethod::circulant);
    const auto& c = plans[1];
    CHECK(c.plan.spec.weight == "one");
    CHECK(c.plan.seed == 0);
    CHECK(c.plan.sampler == SamplerMethod::cholesky);
    CHECK(c.output_stem == "clt_out");
}

TEST_CASE("diagnostics name the line and field", "[config]") {
    auto with = [](const std::string& from, const std::string& to) {
        std::string s = kValid;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    CHECK(error_of(with("hurst = 0.1", "hurst = 1.5")) .starts_with("test.ini:3: field 'hurst'"));
    CHECK(error_of(with("hurst = 0.1", "hurst = abc")).starts_with("test.ini:3: field 'hurst': expected a number"));
    CHECK(error_of(with("kappa = 2\nweight", "kappa = 3\nweight")).starts_with("test.ini:4: field 'kappa'"));
    CHECK(error_of(with("weight = x2", "weight = exp_x2")).starts_with("test.ini:5: field 'weight': unknown weight"));
    CHECK(error_of(with("form = centered_quadratic", "form = quadratic")).starts_with("test.ini:6: field 'form'"));
    CHECK(error_of(with("n_ladder = 16, 32,64", "n_ladder = 16, ,64")).starts_with("test.ini:7: field 'n_ladder'"));
    CHECK(error_of(with("n_ladder = 16, 32,64", "n_ladder = 64, 32")).starts_with("test.ini:7: field 'n_ladder'"));
    CHECK(error_of(with("replicas = 10", "replicas = 1")).starts_with("test.ini:8: field 'replicas'"));
    CHECK(error_of(with("replicas = 10", "replicas = -4")).starts_with("test.ini:8: field 'replicas'"));
    CHECK(error_of(with("replicas = 10", "replicas = 10\nreplicas = 11")).starts_with("test.ini:9: field 'replicas': duplicate key"));
    CHECK(error_of(with("seed = 18446744073709551615", "colour = red")).starts_with("test.ini:9: field 'colour': unknown key"));
    CHECK(error_of(with("sampler = cholesky", "sampler = wavelet")).starts_with("test.ini:17: field 'sampler'"));
    CHECK(error_of(with("n_ladder = 100", "n_ladder = 100, 5000")).starts_with("test.ini:15: field 'n_ladder': cholesky"));
    CHECK(error_of(with("output = clt_out", "output = ../x")).starts_with("test.ini:18: field 'output'"));
    CHECK(error_of(with("hurst = 0.1\n", "")).starts_with("test.ini:2: field 'hurst': missing"));
    CHECK(error_of(with("[clt]", "[quad]")).starts_with("test.ini:11: duplicate table"));
    CHECK(error_of(with("# comment", "hurst = 0.2")).starts_with("test.ini:1: field 'hurst': key outside"));
    CHECK(error_of(with("# comment", "[open")).starts_with("test.ini:1: unterminated"));
    CHECK(error_of(with("# comment", "just words")).starts_with("test.ini:1: expected 'key = value'"));
    CHECK(error_of(with("kappa = 2\nweight", "kappa =\nweight")).starts_with("test.ini:4: field 'kappa': empty value"));
    CHECK(error_of("# nothing\n") == "test.ini: no [plan] tables found");
}

TEST_CASE("missing config file", "[config]") {
    CHECK_THROWS_AS(load_config("/nonexistent/plan.ini"), ConfigError);
}

TEST_CASE("custom registry governs weight ids", "[config]") {
    WeightRegistry empty;
    std::istringstream in(kValid);
    CHECK_THROWS_AS(parse_config(in, "test.ini", empty), ConfigError);
}
