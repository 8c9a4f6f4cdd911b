#pragma once

// Experiment config: a flat key = value document, one [table] per plan.
//
//   # weighted quadratic variation, H < 1/4
//   [quadratic]
//   hurst    = 0.1
//   kappa    = 2
//   weight   = x2
//   form     = centered_quadratic
//   n_ladder = 128, 512, 2048, 8192
//   replicas = 2000
//   seed     = 7
//   sampler  = circulant     # optional, default circulant
//   output   = quadratic     # optional, default: table name
//
// Required keys: hurst, kappa, form, n_ladder, replicas. weight defaults to
// "one" and seed to 0. Errors are reported as "<source>:<line>: field '<key>': ...".

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fbmvar/errors.hpp"
#include "fbmvar/harness.hpp"
#include "fbmvar/weights.hpp"

namespace fbmvar {

struct PlanEntry {
    std::string name;
    std::string output_stem;
    ExperimentPlan plan;
    int line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    return s != "." && s != "..";
}

struct RawTable {
    std::string name;
    int line = 0;
    std::map<std::string, std::pair<std::string, int>> fields;  // key -> (value, line)
};

class ConfigReader {
public:
    explicit ConfigReader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(int line, std::string_view field, const std::string& msg) const {
        std::string where = source_ + ":" + std::to_string(line) + ": ";
        if (!field.empty()) where += "field '" + std::string(field) + "': ";
        throw ConfigError(where + msg);
    }

    std::vector<RawTable> tables(std::istream& in) const {
        std::vector<RawTable> out;
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string_view s = raw;
            if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') fail(line, "", "unterminated table header");
                const auto name = trim(s.substr(1, s.size() - 2));
                if (!valid_name(name)) fail(line, "", "invalid table name '" + std::string(name) + "'");
                for (const auto& t : out) {
                    if (t.name == name) fail(line, "", "duplicate table '" + std::string(name) + "'");
                }
                out.push_back({std::string(name), line, {}});
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string_view::npos) fail(line, "", "expected 'key = value'");
            const std::string key(trim(s.substr(0, eq)));
            const std::string value(trim(s.substr(eq + 1)));
            if (key.empty()) fail(line, "", "empty key");
            if (out.empty()) fail(line, key, "key outside of any [table]");
            if (value.empty()) fail(line, key, "empty value");
            if (!out.back().fields.emplace(key, std::make_pair(value, line)).second) {
                fail(line, key, "duplicate key");
            }
        }
        return out;
    }

    template <class T>
    T integer(const std::string& key, const std::pair<std::string, int>& v) const {
        T x{};
        const auto* first = v.first.data();
        const auto* last = first + v.first.size();
        const auto [p, ec] = std::from_chars(first, last, x);
        if (ec != std::errc() || p != last) fail(v.second, key, "expected an integer, got '" + v.first + "'");
        return x;
    }

    double real(const std::string& key, const std::pair<std::string, int>& v) const {
        double x = 0.0;
        const auto* first = v.first.data();
        const auto* last = first + v.first.size();
        const auto [p, ec] = std::from_chars(first, last, x);
        if (ec != std::errc() || p != last) fail(v.second, key, "expected a number, got '" + v.first + "'");
        return x;
    }

    std::vector<std::size_t> ladder(const std::string& key, const std::pair<std::string, int>& v) const {
        std::vector<std::size_t> out;
        std::string item;
        std::istringstream ss(v.first);
        while (std::getline(ss, item, ',')) {
            const auto t = trim(item);
            if (t.empty()) fail(v.second, key, "empty ladder entry");
            out.push_back(integer<std::size_t>(key, {std::string(t), v.second}));
        }
        return out;
    }

private:
    std::string source_;
};

} // namespace detail

/// Parses every plan table; validates fields against `weights`.
inline std::vector<PlanEntry> parse_config(std::istream& in, const std::string& source = "config",
                                           const WeightRegistry& weights = builtin_registry()) {
    detail::ConfigReader reader(source);
    std::vector<PlanEntry> plans;
    static const std::vector<std::string> known = {"hurst",    "kappa", "weight",  "form",  "n_ladder",
                                                   "replicas", "seed",  "sampler", "output"};
    for (auto& table : reader.tables(in)) {
        auto& f = table.fields;
        for (const auto& [key, v] : f) {
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                reader.fail(v.second, key, "unknown key");
            }
        }
        for (const char* required : {"hurst", "kappa", "form", "n_ladder", "replicas"}) {
            if (!f.contains(required)) {
                reader.fail(table.line, required, "missing in table [" + table.name + "]");
            }
        }

        PlanEntry entry;
        entry.name = table.name;
        entry.line = table.line;
        entry.output_stem = table.name;
        ExperimentPlan& plan = entry.plan;

        try {
            plan.hurst = HurstIndex(reader.real("hurst", f.at("hurst")));
        } catch (const DomainError& e) {
            reader.fail(f.at("hurst").second, "hurst", e.what());
        }
        plan.spec.kappa = reader.integer<int>("kappa", f.at("kappa"));
        try {
            plan.spec.form = parse_statistic_form(f.at("form").first);
        } catch (const DomainError& e) {
            reader.fail(f.at("form").second, "form", e.what());
        }
        try {
            plan.spec.validate();
        } catch (const KappaError& e) {
            reader.fail(f.at("kappa").second, "kappa", e.what());
        }
        if (auto it = f.find("weight"); it != f.end()) {
            if (!weights.contains(it->second.first)) {
                reader.fail(it->second.second, "weight", "unknown weight '" + it->second.first + "'");
            }
            plan.spec.weight = it->second.first;
        }
        plan.n_ladder = reader.ladder("n_ladder", f.at("n_ladder"));
        plan.replicas = reader.integer<std::size_t>("replicas", f.at("replicas"));
        if (auto it = f.find("seed"); it != f.end()) plan.seed = reader.integer<std::uint64_t>("seed", it->second);
        if (auto it = f.find("sampler"); it != f.end()) {
            try {
                plan.sampler = parse_sampler_method(it->second.first);
            } catch (const DomainError& e) {
                reader.fail(it->second.second, "sampler", e.what());
            }
        }
        if (auto it = f.find("output"); it != f.end()) {
            if (!detail::valid_name(it->second.first)) {
                reader.fail(it->second.second, "output", "output stem must be a plain file name");
            }
            entry.output_stem = it->second.first;
        }
        try {
            plan.validate();
        } catch (const DomainError& e) {
            const std::string key = plan.replicas < 2 ? "replicas" : "n_ladder";
            reader.fail(f.at(key).second, key, e.what());
        }
        if (plan.sampler == SamplerMethod::cholesky && plan.n_ladder.back() > CholeskySampler::kMaxGrid) {
            reader.fail(f.at("n_ladder").second, "n_ladder",
                        "cholesky sampler supports n <= " + std::to_string(CholeskySampler::kMaxGrid));
        }
        plans.push_back(std::move(entry));
    }
    if (plans.empty()) throw ConfigError(source + ": no [plan] tables found");
    return plans;
}

inline std::vector<PlanEntry> load_config(const std::string& path,
                                          const WeightRegistry& weights = builtin_registry()) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path, weights);
}

} // namespace fbmvar
