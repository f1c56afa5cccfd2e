#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("SYMLAB_BIN");
    REQUIRE(b != nullptr);
    return b;
}

std::string src() {
    const char* s = std::getenv("SYMLAB_SRC");
    REQUIRE(s != nullptr);
    return s;
}

int run(const std::string& args) {
    std::string cmd = bin() + " " + args + " > /dev/null 2> /dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
}

fs::path temp_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("symlab_cli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("identities on the unit circle: exit 0 and a 10-row CSV", "[cli]") {
    fs::path out = temp_dir("identities");
    int rc = run("identities --config " + src() + "/configs/circle_identities.json --out " +
                 out.string() + " --quiet");
    CHECK(rc == 0);
    REQUIRE(fs::exists(out / "summary.csv"));
    std::string csv = slurp(out / "summary.csv");
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 11); // header + 10 identities
    REQUIRE(fs::exists(out / "results.json"));
    REQUIRE(fs::exists(out / "manifest.json"));
    std::string results = slurp(out / "results.json");
    CHECK(results.find("\"schema\": \"1\"") != std::string::npos);
}

TEST_CASE("invalid configs exit with code 2", "[cli]") {
    fs::path dir = temp_dir("badcfg");

    write(dir / "neg_h.json",
          R"({"command":"solve","curve":{"a0":1.0},"h_max":-1.0})");
    CHECK(run("solve --config " + (dir / "neg_h.json").string() + " --out " + dir.string()) == 2);

    write(dir / "unknown.json",
          R"({"command":"solve","curve":{"a0":1.0},"h_max":0.1,"bogus":1})");
    CHECK(run("solve --config " + (dir / "unknown.json").string() + " --out " + dir.string()) ==
          2);

    write(dir / "parse.json", "{\n  \"command\": \"solve\",\n  oops\n}");
    CHECK(run("solve --config " + (dir / "parse.json").string() + " --out " + dir.string()) == 2);

    CHECK(run("solve --config " + (dir / "missing.json").string()) == 2);
}

TEST_CASE("solve writes field artifacts", "[cli]") {
    fs::path out = temp_dir("solve");
    int rc = run("solve --config " + src() + "/configs/disk_solve.json --out " + out.string() +
                 " --quiet");
    CHECK(rc == 0);
    std::string csv = slurp(out / "summary.csv");
    CHECK(csv.rfind("x,y,u,ux,uy,flux", 0) == 0);
    std::string results = slurp(out / "results.json");
    CHECK(results.find("torsional_rigidity") != std::string::npos);
    CHECK(results.find("min_u") != std::string::npos);
}

TEST_CASE("report on the oval passes its bound checks", "[cli]") {
    fs::path out = temp_dir("report");
    // use a coarser run here; the acceptance suite covers h = 0.02
    fs::path cfg = out / "cfg.json";
    write(cfg, R"({
  "command": "report",
  "curve": {"a0": 1.0, "cos": [0.0, 0.1], "sin": [], "center": [0.0, 0.0]},
  "h_max": 0.04,
  "degree": 2
})");
    int rc = run("report --config " + cfg.string() + " --out " + out.string() + " --quiet");
    CHECK(rc == 0);
    std::string csv = slurp(out / "summary.csv");
    CHECK(csv.find("check_comparing_asymmetry,pass") != std::string::npos);
    CHECK(csv.find("check_gradient_upper,pass") != std::string::npos);
}

TEST_CASE("results.json is byte-identical across reruns", "[cli]") {
    fs::path out1 = temp_dir("det1");
    fs::path out2 = temp_dir("det2");
    std::string cfg = src() + "/configs/circle_identities.json";
    REQUIRE(run("identities --config " + cfg + " --out " + out1.string() + " --quiet") == 0);
    REQUIRE(run("identities --config " + cfg + " --out " + out2.string() + " --quiet") == 0);
    CHECK(slurp(out1 / "results.json") == slurp(out2 / "results.json"));
    // second run against the same out dir goes through the cache
    REQUIRE(run("identities --config " + cfg + " --out " + out1.string() + " --quiet") == 0);
    CHECK(slurp(out1 / "results.json") == slurp(out2 / "results.json"));
}

TEST_CASE("analytic command: green across the desk checks", "[cli]") {
    fs::path out = temp_dir("analytic");
    int rc = run("analytic --config " + src() + "/configs/analytic.json --out " + out.string() +
                 " --quiet");
    CHECK(rc == 0);
    std::string csv = slurp(out / "summary.csv");
    CHECK(csv.find("gradient_bound_N2,1.5,pass") != std::string::npos);
    CHECK(csv.find("fail") == std::string::npos);
    std::string results = slurp(out / "results.json");
    CHECK(results.find("\"seed\": 20240817") != std::string::npos);
}

TEST_CASE("small sweep produces fits and plots", "[cli]") {
    fs::path out = temp_dir("sweep");
    fs::path cfg = out / "cfg.json";
    write(cfg, R"({
  "command": "sweep",
  "family": {"type": "cosine", "mode": 2},
  "epsilons": [0.04, 0.06, 0.08, 0.1],
  "mesh_rule": {"c_mesh": 1.0, "h_cap": 0.05},
  "degree": 2,
  "plots": true
})");
    int rc = run("sweep --config " + cfg.string() + " --out " + out.string() + " --quiet");
    CHECK(rc == 0);
    CHECK(fs::exists(out / "plots" / "serrin_L2.svg"));
    std::string svg = slurp(out / "plots" / "serrin_L2.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<!-- data:") != std::string::npos);
    std::string csv = slurp(out / "summary.csv");
    CHECK(csv.rfind("eps,", 0) == 0);
}

TEST_CASE("precondition violations in config values exit 2", "[cli]") {
    fs::path dir = temp_dir("precond");
    // h_max above a0/4 violates the meshing precondition
    write(dir / "coarse.json",
          R"({"command":"solve","curve":{"a0":1.0},"h_max":0.5})");
    CHECK(run("solve --config " + (dir / "coarse.json").string() + " --out " + dir.string()) ==
          2);
}
