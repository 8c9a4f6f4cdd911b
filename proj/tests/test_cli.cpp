#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbmvar/cli.hpp"

using namespace fbmvar;
namespace fs = std::filesystem;

namespace {

const std::string kCli = FBMVAR_CLI_PATH;
const std::string kConfigs = FBMVAR_CONFIG_DIR;

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("fbmvar_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
};

int run(const std::string& args, const fs::path& stdout_file = "/dev/null", const fs::path& stderr_file = "/dev/null") {
    const std::string cmd = kCli + " " + args + " >" + stdout_file.string() + " 2>" + stderr_file.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("run writes csv, json and dat per plan", "[cli]") {
    Scratch tmp;
    const fs::path out = tmp.dir / "out";
    const fs::path err = tmp.dir / "err.txt";
    REQUIRE(run("run --config " + kConfigs + "/smoke.ini --out " + out.string(), "/dev/null", err) == 0);
    const std::string csv = slurp(out / "smoke.csv");
    CHECK(csv.starts_with(std::string(kCsvHeader) + "\n"));
    CHECK(count_lines(csv) == 1 + 3);
    CHECK(csv.find("\n16,0.10000000000000001,2,x2,centered_quadratic,") != std::string::npos);

    const auto j = nlohmann::json::parse(slurp(out / "smoke.json"));
    CHECK(j["name"] == "smoke");
    CHECK(j["regime"] == "weighted_l2_quadratic");
    CHECK(j["records"].size() == 3);
    CHECK(j["rate_fit"].contains("slope"));
    CHECK(j["rate_fit_target"] == "l2_error");

    const std::string dat = slurp(out / "smoke.dat");
    CHECK(dat.starts_with("# log_n log_l2_error\n"));
    CHECK(count_lines(dat) == 4);
    CHECK(slurp(err).find("wrote") != std::string::npos);
}

TEST_CASE("csv output is byte-identical across runs and thread counts", "[cli]") {
    Scratch tmp;
    const std::string cfg = " --config " + kConfigs + "/smoke.ini";
    REQUIRE(run("run" + cfg + " --out " + (tmp.dir / "a").string() + " --threads 1") == 0);
    REQUIRE(run("run" + cfg + " --out " + (tmp.dir / "b").string() + " --threads 4") == 0);
    REQUIRE(run("run" + cfg + " --out " + (tmp.dir / "c").string() + " --seed 99") == 0);
    REQUIRE(run("run" + cfg + " --out " + (tmp.dir / "d").string() + " --seed 99") == 0);
    const std::string a = slurp(tmp.dir / "a" / "smoke.csv");
    CHECK(a == slurp(tmp.dir / "b" / "smoke.csv"));
    CHECK(a != slurp(tmp.dir / "c" / "smoke.csv"));
    CHECK(slurp(tmp.dir / "c" / "smoke.csv") == slurp(tmp.dir / "d" / "smoke.csv"));
    CHECK(slurp(tmp.dir / "a" / "smoke.json") == slurp(tmp.dir / "b" / "smoke.json"));
}

TEST_CASE("replica override and path dump", "[cli]") {
    Scratch tmp;
    REQUIRE(run("run --config " + kConfigs + "/smoke.ini --replicas 3 --dump-paths --out " + tmp.dir.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(tmp.dir / "smoke.json"));
    CHECK(j["replicas"] == 3);
    for (int n : {16, 32, 64}) {
        const std::string path = slurp(tmp.dir / ("smoke_path_n" + std::to_string(n) + ".txt"));
        CHECK(count_lines(path) == static_cast<std::size_t>(n + 1));
        CHECK(path.starts_with("0/" + std::to_string(n) + " 0\n"));
    }
}

TEST_CASE("exit codes", "[cli]") {
    Scratch tmp;
    const fs::path err = tmp.dir / "err.txt";
    CHECK(run("run --config " + kConfigs + "/boundary.ini --out " + tmp.dir.string(), "/dev/null", err) == 3);
    CHECK(slurp(err).find("regime") != std::string::npos);

    const fs::path bad = tmp.dir / "bad.ini";
    std::ofstream(bad) << "[p]\nhurst = 0.1\nkappa = 2\nform = centered_quadratic\nn_ladder = 8\nreplicas = x\n";
    CHECK(run("run --config " + bad.string() + " --out " + tmp.dir.string(), "/dev/null", err) == 2);
    CHECK(slurp(err).find("bad.ini:6: field 'replicas'") != std::string::npos);

    CHECK(run("run --config " + (tmp.dir / "missing.ini").string()) == 2);
    CHECK(run("run") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("run --config " + kConfigs + "/smoke.ini --replicas 1 --out " + tmp.dir.string()) == 2);
}

TEST_CASE("regimes table", "[cli]") {
    Scratch tmp;
    const fs::path out = tmp.dir / "table.txt";
    const fs::path csv = tmp.dir / "table.csv";
    REQUIRE(run("regimes --csv " + csv.string(), out) == 0);
    const std::string table = slurp(out);
    CHECK(table.find("\n0.1      2     ") != std::string::npos);
    std::istringstream lines(table);
    std::string line;
    bool found = false;
    while (std::getline(lines, line)) {
        if (line.starts_with("0.1 ") && line.find(" 2 ") != std::string::npos) {
            found = line.find("weighted_l2_quadratic") != std::string::npos;
            break;
        }
    }
    CHECK(found);
    CHECK(count_lines(slurp(csv)) == 1 + 99 * 5);

    REQUIRE(run("regimes --kappa-min 2 --kappa-max 3 --step 0.25", out) == 0);
    const std::string small = slurp(out);
    CHECK(small.find("H = k*0.25") != std::string::npos);
    std::size_t rows = 0;
    std::istringstream s2(small);
    while (std::getline(s2, line)) {
        if (!line.empty() && line[0] != '#' && line[0] != 'H') ++rows;
    }
    CHECK(rows == 3 * 2);
    CHECK(run("regimes --kappa-min 4 --kappa-max 3") == 2);
    CHECK(run("regimes --step 0") == 2);
}

TEST_CASE("hurst grid", "[cli]") {
    const auto g = hurst_grid(0.01);
    CHECK(g.size() == 99);
    CHECK(g[9] == 0.1);
    CHECK(hurst_grid(0.5) == std::vector<double>{0.5});
    CHECK(hurst_grid(0.25) == std::vector<double>{0.25, 0.5, 0.75});
}

TEST_CASE("selftest passes and is repeatable", "[cli]") {
    Scratch tmp;
    const fs::path a = tmp.dir / "a.txt", b = tmp.dir / "b.txt";
    CHECK(run("selftest", a) == 0);
    CHECK(run("selftest", b) == 0);
    const std::string first = slurp(a);
    CHECK(first == slurp(b));
    CHECK(first.find("FAIL") == std::string::npos);
    CHECK(first.find("PASS weights/exp_neg_x2/order6") != std::string::npos);
    CHECK(first.find("PASS sampler/cholesky_reconstruction_n64") != std::string::npos);
}

TEST_CASE("selftest names a corrupted weight", "[cli]") {
    WeightRegistry reg = make_builtin_registry();
    std::vector<WeightFunction::Evaluator> ev = {[](double x) { return x * x; }, [](double x) { return 2.0 * x; },
                                                 [](double) { return 3.0; }};
    reg.add(WeightFunction("x2", ev, GrowthClass::polynomial, {3.0, 2.0}, 1.0));
    std::ostringstream out;
    CHECK(cmd_selftest(out, reg) == 1);
    CHECK(out.str().find("FAIL weights/x2/order2") != std::string::npos);
    CHECK(out.str().find("PASS weights/x2/order1") != std::string::npos);
}
