#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("gmt_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

CliResult run_cli(const std::string& args) {
    const fs::path out_path = work_dir() / "stdout.txt";
    const fs::path err_path = work_dir() / "stderr.txt";
    const std::string command = std::string(GMT_CLI_PATH) + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

const char* kCircleScene = R"json({
  "ambient_dim": 2,
  "charts": [
    {"param_dim": 1, "domain": [[0.0, 6.283185307179586]],
     "map": ["cos(u1)", "sin(u1)"]}
  ]
})json";

const char* kTwoCircleScene = R"json({
  "ambient_dim": 2,
  "charts": [
    {"param_dim": 1, "domain": [[0.0, 6.283185307179586]],
     "map": ["cos(u1)", "sin(u1)"]},
    {"param_dim": 1, "domain": [[0.0, 6.283185307179586]],
     "map": ["2*cos(u1)", "2*sin(u1)"]}
  ]
})json";

const char* kCircleFamily = R"json({
  "ambient_dim": 2,
  "family": {"param_dim": 1, "domain": [[0.0, 6.283185307179586]],
             "map": ["(1 + 1/k)*cos(u1)", "(1 + 1/k)*sin(u1)"]},
  "limit": {"param_dim": 1, "domain": [[0.0, 6.283185307179586]],
            "map": ["cos(u1)", "sin(u1)"]}
})json";

} // namespace

TEST_CASE("area command integrates a circle scene", "[cli]") {
    const fs::path scene = work_dir() / "circle.json";
    spit(scene, kCircleScene);
    const auto r = run_cli("area --scene " + scene.string() + " --field 1 --tol 1e-8");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::fabs(j["value"].get<double>() - 2.0 * M_PI) < 1e-8);
    CHECK(j["per_chart"].size() == 1);

    const fs::path scene2 = work_dir() / "two_circles.json";
    spit(scene2, kTwoCircleScene);
    const auto r2 = run_cli("area --scene " + scene2.string() + " --field 1 --tol 1e-8");
    REQUIRE(r2.exit_code == 0);
    CHECK(std::fabs(nlohmann::json::parse(r2.out)["value"].get<double>() - 6.0 * M_PI) < 1e-8);
}

TEST_CASE("identical area invocations produce byte-identical JSON", "[cli]") {
    const fs::path scene = work_dir() / "circle_det.json";
    spit(scene, kCircleScene);
    const std::string args =
        "area --scene " + scene.string() + " --field 'x1^2+x2^2' --tol 1e-9";
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);
}

TEST_CASE("area exit codes distinguish validation from numerics", "[cli]") {
    const fs::path bad = work_dir() / "bad.json";
    spit(bad, "{ this is not json");
    CHECK(run_cli("area --scene " + bad.string()).exit_code == 1);

    CHECK(run_cli("area --scene " + (work_dir() / "missing.json").string()).exit_code == 1);

    // schema problem: map arity does not match ambient_dim
    const fs::path schema = work_dir() / "schema.json";
    spit(schema, R"json({"ambient_dim": 2, "charts": [
        {"param_dim": 1, "domain": [[0,1]], "map": ["u1"]}]})json");
    CHECK(run_cli("area --scene " + schema.string()).exit_code == 1);

    // bad field expression
    const fs::path scene = work_dir() / "circle_field.json";
    spit(scene, kCircleScene);
    CHECK(run_cli("area --scene " + scene.string() + " --field 'x9'").exit_code == 1);

    // rank-deficient chart fails numerically
    const fs::path rank = work_dir() / "rank.json";
    spit(rank, R"json({"ambient_dim": 2, "charts": [
        {"param_dim": 2, "domain": [[0,1],[0,1]], "map": ["u1", "u1 + 0*u2"]}]})json");
    CHECK(run_cli("area --scene " + rank.string()).exit_code == 2);
}

TEST_CASE("coarea command verifies the linear case", "[cli]") {
    const fs::path csv = work_dir() / "slices.csv";
    const auto r = run_cli("coarea --h 'x1' --f 1 --a 0 --b 1 --dim 2 --res 64 --slices 8 "
                           "--box 0,1,0,1 --csv-out " + csv.string());
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::fabs(j["lhs"].get<double>() - 1.0) < 1e-9);
    CHECK(std::fabs(j["rhs"].get<double>() - 1.0) < 1e-9);
    CHECK(j["rel_err"].get<double>() < 1e-9);
    CHECK(j["per_slice"].size() == 16);

    const std::string table = slurp(csv);
    CHECK(table.rfind("t,value,status\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 17);  // header + 16 slices
}

TEST_CASE("coarea exit codes", "[cli]") {
    // precondition violation
    CHECK(run_cli("coarea --h 'x1' --f 1 --a 1 --b 0").exit_code == 1);
    // malformed H expression
    CHECK(run_cli("coarea --h 'x1+' --f 1 --a 0 --b 1").exit_code == 1);
    // relative error above a deliberately impossible threshold
    CHECK(run_cli("coarea --h 'sqrt(x1^2+x2^2)' --f 1 --a 1 --b 2 --res 64 --slices 8 "
                  "--box -2.25,2.25,-2.25,2.25 --max-rel-err 1e-9")
              .exit_code == 3);
    // numerically flat field: the excluded-slice budget trips
    CHECK(run_cli("coarea --h '1e-10*x1' --f 1 --a 2e-11 --b 8e-11 --res 32 --slices 8 "
                  "--box 0,1,0,1")
              .exit_code == 4);
}

TEST_CASE("net command emits the convergence table", "[cli]") {
    const auto r = run_cli("net --f x1 --a 0 --b 1 --tol 1e-10 --max-steps 40");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.rfind("step,cells,sum,delta\n", 0) == 0);
    // last data row carries the converged sum 0.5
    std::istringstream lines(r.out);
    std::string line, last;
    while (std::getline(lines, line))
        if (!line.empty()) last = line;
    CHECK(last.find(",0.5,") != std::string::npos);

    const auto sine = run_cli("net --f 'sin(x1)' --a 0 --b 3.141592653589793 --tol 1e-8");
    REQUIRE(sine.exit_code == 0);

    CHECK(run_cli("net --f x1 --a 0 --b 1 --max-steps 1").exit_code == 2);
    CHECK(run_cli("net --f x1 --a 1 --b 0").exit_code == 1);
    CHECK(run_cli("net --f 'sin(' --a 0 --b 1").exit_code == 1);
}

TEST_CASE("limit-study command flags convergence of the circle family", "[cli]") {
    const fs::path family = work_dir() / "family.json";
    spit(family, kCircleFamily);
    const fs::path csv = work_dir() / "study.csv";
    const auto r = run_cli("limit-study --family " + family.string() +
                           " --field 1 --k-max 5 --tol 0.2 --csv-out " + csv.string());
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["converged"].get<bool>());
    CHECK(std::fabs(j["limit_value"].get<double>() - 2.0 * M_PI) < 1e-8);
    CHECK(j["rows"].size() == 5);
    // gap for k is 2 pi / k
    for (const auto& row : j["rows"]) {
        const int k = row["k"].get<int>();
        CHECK(std::fabs(row["gap"].get<double>() - 2.0 * M_PI / k) < 1e-6);
    }

    const std::string table = slurp(csv);
    CHECK(table.rfind("k,integral,gap\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 6);

    CHECK(run_cli("limit-study --family " + family.string() + " --k-max 1").exit_code == 1);
    CHECK(run_cli("limit-study --family " +
                  (work_dir() / "missing_family.json").string() + " --k-max 5")
              .exit_code == 1);
}

TEST_CASE("coarea warns when H is not smooth", "[cli]") {
    const auto r = run_cli("coarea --h 'abs(x1)' --f 1 --a 0.25 --b 0.75 --dim 2 --res 64 "
                           "--slices 8 --box -1,1,-1,1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("abs") != std::string::npos);
    // the band 0.25 <= |x1| <= 0.75 is grid-aligned: both sides are 2.0
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::fabs(j["lhs"].get<double>() - 2.0) < 1e-9);
    CHECK(std::fabs(j["rhs"].get<double>() - 2.0) < 1e-9);
}

TEST_CASE("thread count never changes report bytes", "[cli]") {
    const std::string base = "coarea --h 'sqrt(x1^2+x2^2)' --f 1 --a 1 --b 2 --res 64 "
                             "--slices 8 --box -2.25,2.25,-2.25,2.25 --max-rel-err 0.05";
    const auto serial = run_cli(base + " --threads 1");
    const auto parallel = run_cli(base + " --threads 4");
    REQUIRE(serial.exit_code == 0);
    REQUIRE(parallel.exit_code == 0);
    CHECK(serial.out == parallel.out);
}

TEST_CASE("json-out mirrors stdout bytes", "[cli]") {
    const fs::path scene = work_dir() / "circle_mirror.json";
    spit(scene, kCircleScene);
    const fs::path json_file = work_dir() / "report.json";
    const auto r = run_cli("area --scene " + scene.string() + " --json-out " +
                           json_file.string());
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(json_file) == r.out);
}
