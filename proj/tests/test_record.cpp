#include <cstring>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "owfsim/sim.hpp"

using namespace owfsim;

TEST_CASE("record columns are fixed and ordered") {
    const auto cols = record_columns(2);
    REQUIRE(cols.size() == 1 + 2 * std::size(kStringSignals) + std::size(kLinkSignals));
    CHECK(cols.front() == "t");
    CHECK(cols[1] == "s1_vpcc");
    CHECK(cols[1 + std::size(kStringSignals)] == "s2_vpcc");
    CHECK(cols.back() == "i_dc");
    CHECK(string_column(0, "phi_rel") == "s1_phi_rel");
}

TEST_CASE("CSV and header round trip") {
    ScenarioSpec spec = build_black_start(0.3, FeedbackConfig::all_virtual());
    spec.t_end = 0.4;
    spec.settle_window = 0.1;
    SimConfig cfg = SimConfig::for_scenario(spec);
    cfg.record_decimation = 3;
    const RunRecord r = run(spec, cfg);

    std::stringstream csv;
    write_csv(r, csv);
    RunRecord back = read_csv(csv);
    CHECK(back.columns == r.columns);
    REQUIRE(back.rows() == r.rows());
    for (std::size_t c = 0; c < r.columns.size(); ++c)
        for (std::size_t i = 0; i < r.rows(); ++i)
            REQUIRE(std::memcmp(&back.data[c][i], &r.data[c][i], sizeof(double)) == 0);

    apply_header_json(back, header_to_json(r));
    CHECK(scenario_to_json(back.scenario) == scenario_to_json(r.scenario));
    CHECK(sim_config_to_json(back.config) == sim_config_to_json(r.config));
    CHECK(back.status == r.status);

    // The header alone reproduces the run.
    std::stringstream again;
    write_csv(run(back.scenario, back.config), again);
    CHECK(again.str() == csv.str());
}

TEST_CASE("header records the per-unit bases") {
    const ScenarioSpec spec = build_black_start(0.3, FeedbackConfig::all_virtual());
    RunRecord r;
    r.scenario = spec;
    r.columns = record_columns(2);
    const std::string h = header_to_json(r);
    CHECK(h.find("s_base") != std::string::npos);
    CHECK(h.find("inertia_m") != std::string::npos);
}

TEST_CASE("malformed CSV is rejected") {
    std::stringstream ragged("t,a\n0,1\n1\n");
    CHECK_THROWS_AS((void)read_csv(ragged), std::invalid_argument);
    std::stringstream text("t,a\n0,x\n");
    CHECK_THROWS_AS((void)read_csv(text), std::invalid_argument);
    std::stringstream empty("");
    CHECK_THROWS_AS((void)read_csv(empty), std::invalid_argument);
}

TEST_CASE("unknown columns are reported") {
    RunRecord r;
    r.columns = record_columns(1);
    r.data.assign(r.columns.size(), {});
    CHECK_THROWS_AS((void)r.column("s9_vpcc"), std::out_of_range);
}
