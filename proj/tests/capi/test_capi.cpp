// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mcr/mcr.h>

#include <cstring>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Config {
    mcr_config* p = nullptr;
    ~Config() { mcr_config_free(p); }
};

std::string take(char* s) {
    std::string out(s ? s : "");
    mcr_string_free(s);
    return out;
}

} // namespace

TEST_CASE("config handles") {
    Config c;
    REQUIRE(mcr_config_default(&c.p) == MCR_OK);
    CHECK(mcr_config_validate(c.p) == MCR_OK);
    CHECK(mcr_config_set_steps(c.p, 2) == MCR_OK);
    CHECK(mcr_config_steps(c.p) == 2);

    CHECK(mcr_config_set_xi(c.p, 1.5) == MCR_ERR_CONFIG);
    CHECK(std::string(mcr_last_error_field()) == "xi");

    char* json = nullptr;
    REQUIRE(mcr_config_to_json(c.p, &json) == MCR_OK);
    Config back;
    CHECK(mcr_config_parse(json, &back.p) == MCR_OK);
    mcr_string_free(json);

    Config bad;
    CHECK(mcr_config_parse("{\"bogus\": 1}", &bad.p) == MCR_ERR_CONFIG);
    CHECK(bad.p == nullptr);
    CHECK(std::string(mcr_last_error_field()) == "bogus");
    CHECK(mcr_config_load("/nonexistent/dir/cfg.json", &bad.p) == MCR_ERR_IO);
    CHECK(mcr_config_default(nullptr) == MCR_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(mcr_version()) > 0);
}

TEST_CASE("simulation handle") {
    Config c;
    REQUIRE(mcr_config_default(&c.p) == MCR_OK);
    mcr_config_set_steps(c.p, 2);
    mcr_sim* sim = nullptr;
    REQUIRE(mcr_sim_create(c.p, 7, &sim) == MCR_OK);
    mcr_indicators ind{};
    REQUIRE(mcr_sim_indicators(sim, &ind) == MCR_OK);
    CHECK(ind.step == 0);
    REQUIRE(mcr_sim_step(sim) == MCR_OK);
    REQUIRE(mcr_sim_run(sim) == MCR_OK);
    REQUIRE(mcr_sim_indicators(sim, &ind) == MCR_OK);
    CHECK(ind.step == 2);
    CHECK(ind.link_count == 2);
    CHECK(ind.total_accessibility > 0);
    char* csv = nullptr;
    REQUIRE(mcr_sim_history_csv(sim, &csv) == MCR_OK);
    CHECK(take(csv).rfind("step,total_accessibility", 0) == 0);

    const auto dir = fs::temp_directory_path() / "mcr_capi_run";
    fs::remove_all(dir);
    CHECK(mcr_sim_write_outputs(sim, dir.c_str()) == MCR_OK);
    CHECK(fs::exists(dir / "final_state.json"));
    CHECK(fs::exists(dir / "map_step_2.svg"));
    fs::remove_all(dir);
    CHECK(mcr_sim_write_outputs(sim, "/proc/forbidden/out") == MCR_ERR_IO);
    mcr_sim_free(sim);
}

TEST_CASE("replication and sweep handles") {
    Config c;
    REQUIRE(mcr_config_default(&c.p) == MCR_OK);
    mcr_config_set_steps(c.p, 1);

    mcr_replication* rep = nullptr;
    CHECK(mcr_replicate(c.p, 0, 1, 1, &rep) == MCR_ERR_CONFIG);
    REQUIRE(mcr_replicate(c.p, 3, 1, 1, &rep) == MCR_OK);
    mcr_replication_stats st{};
    REQUIRE(mcr_replication_stats_get(rep, &st) == MCR_OK);
    CHECK(st.n == 3);
    CHECK(st.cov_acc_acc >= 0);
    mcr_replication_free(rep);

    mcr_sweep* sw = nullptr;
    REQUIRE(mcr_sweep_create(c.p, &sw) == MCR_OK);
    const double xs[] = {0.0, 1.0};
    CHECK(mcr_sweep_set_xi_values(sw, xs, 2) == MCR_OK);
    CHECK(mcr_sweep_set_replications(sw, 2) == MCR_OK);
    CHECK(mcr_sweep_clear_configurations(sw) == MCR_OK);
    CHECK(mcr_sweep_add_configuration(sw, "pair", 2.0, 3.0) == MCR_OK);
    double rho = 0;
    CHECK(mcr_sweep_trend(sw, "pair", &rho) == MCR_ERR_STATE);
    size_t failures = 99;
    REQUIRE(mcr_sweep_run(sw, 1, &failures) == MCR_OK);
    CHECK(failures == 0);
    CHECK(mcr_sweep_trend(sw, "missing", &rho) == MCR_ERR_INVALID_ARGUMENT);
    const auto dir = fs::temp_directory_path() / "mcr_capi_sweep";
    fs::remove_all(dir);
    CHECK(mcr_sweep_write_outputs(sw, dir.c_str()) == MCR_OK);
    CHECK(fs::exists(dir / "sweep.csv"));
    fs::remove_all(dir);
    mcr_sweep_free(sw);
}
