// Drives the mcrsim executable end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "mcr_cli_test";

int mcrsim(const std::string& args) {
    const std::string cmd = std::string("\"") + MCRSIM_PATH + "\" " + args + " > \"" + (work / "log.txt").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Fresh {
    Fresh() {
        fs::remove_all(work);
        fs::create_directories(work);
    }
};

} // namespace

TEST_CASE_FIXTURE(Fresh, "run writes every artifact and is deterministic") {
    const auto a = work / "a";
    const auto b = work / "b";
    REQUIRE(mcrsim("run --steps 2 --seed 4 --xi 0.5 --out " + a.string()) == 0);
    REQUIRE(mcrsim("run --steps 2 --seed 4 --xi 0.5 --out " + b.string()) == 0);
    for (const char* f : {"history.csv", "decisions.csv", "cells.csv", "links.csv", "final_state.json",
                          "map_step_0.svg", "map_step_2.svg"}) {
        CHECK_MESSAGE(fs::exists(a / f), f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE_FIXTURE(Fresh, "config files and overrides") {
    put(work / "cfg.json", R"({"steps": 1, "xi": 0.0, "landuse_enabled": false})");
    REQUIRE(mcrsim("run --config " + (work / "cfg.json").string() + " --out " + (work / "o").string()) == 0);
    CHECK(slurp(work / "o" / "history.csv").find("\n1,") != std::string::npos);

    put(work / "bad.json", R"({"steps": 1, "bogus": true})");
    CHECK(mcrsim("run --config " + (work / "bad.json").string() + " --out " + (work / "o2").string()) == 2);
    CHECK(slurp(work / "log.txt").find("bogus") != std::string::npos);
    put(work / "broken.json", "{\"steps\": ");
    CHECK(mcrsim("run --config " + (work / "broken.json").string()) == 2);
    CHECK(mcrsim("run --xi 1.5 --out " + (work / "o3").string()) == 2);
    CHECK(mcrsim("run --steps -1 --out " + (work / "o3").string()) == 2);
    CHECK(mcrsim("run --no-such-flag") == 2);
    CHECK(mcrsim("run --config " + (work / "missing.json").string()) == 3);
    put(work / "file", "x");
    CHECK(mcrsim("run --steps 1 --out " + (work / "file" / "sub").string()) == 3);
}

TEST_CASE_FIXTURE(Fresh, "replicate and sweep") {
    REQUIRE(mcrsim("replicate --steps 1 --replications 3 --disable-landuse --out " + (work / "r").string()) == 0);
    CHECK(fs::exists(work / "r" / "replicate_summary.csv"));
    CHECK(fs::exists(work / "r" / "ellipse.svg"));
    CHECK(fs::exists(work / "r" / "runs" / "history_seed_3.csv"));

    REQUIRE(mcrsim("sweep --steps 1 --replications 1 --xi 0,1 --out " + (work / "s").string()) == 0);
    const std::string csv = slurp(work / "s" / "sweep.csv");
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 1 + 2 * 4); // header + 2 xi values x 4 variants x 1 replication
    CHECK(fs::exists(work / "s" / "trend.csv"));
    CHECK(fs::exists(work / "s" / "sweep.svg"));
    CHECK(mcrsim("sweep --steps 1 --xi 0,2 --out " + (work / "s2").string()) == 2);
    fs::remove_all(work);
}
