#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBin = THERMO_CLI;
const std::string kFix = THERMO_FIXTURES;

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("thermo_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

int run(const std::string& args, const fs::path& out = {}) {
    std::string cmd = kBin + (out.empty() ? "" : " --out-dir " + out.string()) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("exit codes") {
    CHECK(run("--help") == 0);
    CHECK(run("frobnicate") == 64);
    CHECK(run("") == 64);
    CHECK(run("entropy --spec /nonexistent.json", scratch("e1")) == 2);
    CHECK(run("entropy --spec " + kFix + "/golden.json --n-max abc", scratch("e2")) == 2);
    CHECK(run("pressure curve --spec " + kFix + "/golden.json --R 12 --method transfer --beta-grid 1 --recipe cor53 "
              "--tol 1e-6",
              scratch("e3")) == 0);
    CHECK(run("gibbs weights --spec " + kFix + "/golden.json --box 30", scratch("e4")) == 3);
}

TEST_CASE("pressure curve and freeze detect on the golden-mean fixture") {
    auto out = scratch("golden");
    REQUIRE(run("pressure curve --spec " + kFix + "/golden.json --recipe thm34 --R 10 --beta-grid default", out) == 0);
    std::string csv = slurp(out / "curve.csv");
    CHECK(csv.rfind("beta,estimate,lower,upper,method,R\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 62);
    REQUIRE(run("freeze detect --curve " + (out / "curve.csv").string(), out) == 0);
    auto f = load(out / "freeze.json");
    CHECK(f["verdict"] == "FrozenBeyond");
    CHECK(f["beta_c_interval"][0].get<double>() > 0);
    CHECK(f["beta_c_interval"][1].get<double>() <= 1.1);
}

TEST_CASE("nogo on 1/n^2") {
    auto out = scratch("nogo");
    REQUIRE(run("nogo --sequence 1/n^2 --d 1", out) == 0);
    CHECK(load(out / "nogo.json")["verdict"] == "NoGo");
}

TEST_CASE("manifest lists every output with its checksum") {
    auto out = scratch("manifest");
    REQUIRE(run("potential build --spec " + kFix + "/golden.json --recipe thm34 --interaction-n 32", out) == 0);
    auto m = load(out / "manifest.json");
    CHECK(m["command"] == "potential build");
    CHECK(m["spec_sha256"].get<std::string>().size() == 64);
    CHECK(m["outputs"].size() == 3);
    for (const auto& o : m["outputs"]) {
        CHECK(fs::exists(out / o["file"].get<std::string>()));
        CHECK(o["sha256"].get<std::string>().size() == 64);
    }
}

TEST_CASE("identical command and seed give identical checksums") {
    std::string args = "sample --spec " + kFix + "/hard_squares.json --recipe thm34 --R 2 --n 8 --steps 20000 --seed 4";
    auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run(args, a) == 0);
    REQUIRE(run(args, b) == 0);
    CHECK(load(a / "manifest.json")["outputs"] == load(b / "manifest.json")["outputs"]);
}

TEST_CASE("spec validate emits the canonical form") {
    auto out = scratch("spec");
    for (const char* name : {"golden", "hard_squares", "thue_morse", "single_point_one"}) {
        REQUIRE(run("spec validate --spec " + kFix + "/" + name + ".json", out) == 0);
        std::string first = slurp(out / "spec.json");
        auto again = scratch("spec2");
        REQUIRE(run("spec validate --spec " + (out / "spec.json").string(), again) == 0);
        CHECK(slurp(again / "spec.json") == first);
    }
}

TEST_CASE("remaining subcommands run on the fixtures") {
    auto out = scratch("misc");
    CHECK(run("lang count --spec " + kFix + "/thue_morse.json --n-max 12", out) == 0);
    CHECK(run("entropy --spec " + kFix + "/golden.json", out) == 0);
    CHECK(std::abs(load(out / "entropy.json")["exact"].get<double>() - 0.48121182506) < 1e-11);
    CHECK(run("tile --spec " + kFix + "/single_point.json --word 0000010000000000", out) == 0);
    CHECK(load(out / "tiling.json")["tiles"].size() == 5);
    CHECK(run("pins --spec " + kFix + "/single_point_one.json --word 10001", out) == 0);
    CHECK(load(out / "pins.json")["pins"] == json::array({0, 1, 3, 4}));
    CHECK(run("gibbs weights --spec " + kFix + "/golden.json --box 3 --n-max 1 --beta 1", out) == 0);
    CHECK(load(out / "weights.json")["weights"].size() == 8);
    CHECK(run("pins --spec " + kFix + "/golden.json --word 10", out) == 2);
}
