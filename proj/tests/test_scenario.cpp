#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "owfsim/metrics.hpp"
#include "owfsim/scenario.hpp"

using namespace owfsim;
using doctest::Approx;

namespace {

std::string error_of(const std::string& text) {
    try {
        (void)scenario_from_json(text);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return {};
}

/// Two strings, synthetic omega and angle traces on a 1 ms grid.
RunRecord synthetic(std::size_t rows) {
    RunRecord r;
    r.scenario = build_black_start(0.0, FeedbackConfig::all_virtual());
    r.columns = record_columns(2);
    r.data.assign(r.columns.size(), std::vector<double>(rows, 0.0));
    for (std::size_t i = 0; i < rows; ++i) r.data[0][i] = 1e-3 * static_cast<double>(i);
    for (std::size_t k = 0; k < 2; ++k) {
        auto& w = r.data[r.column_index(string_column(k, "omega"))];
        std::fill(w.begin(), w.end(), 1.0);
    }
    return r;
}

std::vector<double>& column(RunRecord& r, std::size_t k, const char* sig) {
    return r.data[r.column_index(string_column(k, sig))];
}

}  // namespace

TEST_CASE("black start builder") {
    const ScenarioSpec s = build_black_start(0.3, FeedbackConfig::all_virtual());
    CHECK_NOTHROW(s.validate());
    REQUIRE(s.strings.size() == 2);
    CHECK(s.strings[0].n_wt == 36);
    CHECK(s.strings[1].n_wt == 38);
    CHECK(s.strings[0].v_ext_delay == 0.0);
    CHECK(s.strings[1].v_ext_delay == 0.3);
    CHECK(s.v_ext.target == 0.8);
    CHECK(s.v_ext.slope == 0.6);
    CHECK(s.p_ref.target == 0.0);
    CHECK(s.q_ref == 0.0);
    for (const auto& str : s.strings) {
        CHECK(str.controller.p_min == 0.0);
        CHECK(str.controller.i_max == 1.2);
        CHECK(str.feedback == FeedbackConfig::all_virtual());
    }
    const PlantParams p = s.plant_params();
    CHECK(p.strings[0].weight == Approx(36.0 / 74.0));
    CHECK(p.strings[1].weight == Approx(38.0 / 74.0));
    CHECK(s.system_base().s_base == Approx(74 * 18.0e6));
}

TEST_CASE("power ramp builder") {
    const ScenarioSpec s = build_power_ramp(1.0, kNoPowerLimit, FeedbackConfig::all_measured());
    CHECK_NOTHROW(s.validate());
    CHECK(s.strings[1].v_ext_delay == 0.0);
    CHECK(s.strings[1].p_ref_delay == 1.0);
    CHECK(s.p_ref.target == 0.8);
    CHECK(s.p_ref.slope == 0.5);
    CHECK(std::isinf(s.strings[0].controller.p_min));
    CHECK(s.t_end > s.p_ref.start + 1.0 + s.p_ref.duration());
}

TEST_CASE("ramp profile") {
    const RampProfile r{0.8, 0.6, 0.0};
    CHECK(r.value_after(-1.0) == 0.0);
    CHECK(r.value_after(0.5) == Approx(0.3));
    CHECK(r.value_after(10.0) == 0.8);
    CHECK(r.duration() == Approx(0.8 / 0.6));
}

TEST_CASE("presets are the five studied cases") {
    const auto& list = presets();
    REQUIRE(list.size() == 5);
    for (const auto& p : list) {
        const ScenarioSpec s = build_preset(p.name);
        CHECK(s.name == p.name);
        CHECK_NOTHROW(s.validate());
    }
    const ScenarioSpec droop = build_preset("blackstart-measured-droop");
    CHECK(droop.strings[0].feedback == FeedbackConfig{true, false, false});
    const ScenarioSpec pv = build_preset("ramp-pmin-measured-pv");
    CHECK(pv.strings[0].feedback == FeedbackConfig{true, true, false});
    CHECK(pv.strings[0].controller.p_min == 0.0);
    CHECK_THROWS_AS((void)build_preset("nope"), std::invalid_argument);
}

TEST_CASE("scenario JSON round trip is lossless") {
    for (const auto& p : presets()) {
        const ScenarioSpec s = build_preset(p.name);
        const std::string text = scenario_to_json(s);
        const ScenarioSpec back = scenario_from_json(text);
        CHECK(scenario_to_json(back) == text);
        CHECK(back.strings[0].controller.p_min == s.strings[0].controller.p_min);
    }
}

TEST_CASE("scenario JSON takes defaults for missing fields") {
    const ScenarioSpec s = scenario_from_json(R"({"strings": [{"n_wt": 3}], "profiles": {"v_ext": {"target": 0.5, "slope": 1}}})");
    REQUIRE(s.strings.size() == 1);
    CHECK(s.strings[0].n_wt == 3);
    CHECK(s.strings[0].controller.k_m == 20.0);
    CHECK(s.v_ext.target == 0.5);
    CHECK(s.t_end == 3.0);
}

TEST_CASE("scenario JSON diagnostics name the offending field") {
    CHECK(error_of(R"({"strings": [{"n_wt": 3, "controller": {"k_mm": 1}}]})").find("k_mm") != std::string::npos);
    CHECK(error_of(R"({"strings": [{"n_wt": 3}], "bogus": 1})").find("bogus") != std::string::npos);
    CHECK(error_of(R"({"strings": [{"n_wt": "three"}]})").find("n_wt") != std::string::npos);
    CHECK(error_of(R"({"strings": [{"n_wt": 3}], "profiles": {"v_ext": {"target": 2.0, "slope": 1}}})").find("v_ext") !=
          std::string::npos);
    CHECK(error_of(R"({"strings": [{"n_wt": 3, "controller": {"alpha_q": 5}}]})").find("alpha_q") !=
          std::string::npos);
    CHECK(error_of("{not json").find("malformed") != std::string::npos);
    CHECK_FALSE(error_of(R"({"strings": []})").empty());
}

TEST_CASE("LOS needs the hold time") {
    RunRecord r = synthetic(1000);
    auto& w = column(r, 1, "omega");
    for (std::size_t i = 100; i < 120; ++i) w[i] = 1.05;  // 0.05 pu for 20 ms
    CHECK_FALSE(detect_los(r).detected);

    for (std::size_t i = 300; i < 320; ++i) w[i] = 1.15;  // above threshold, too short
    CHECK_FALSE(detect_los(r).detected);

    for (std::size_t i = 500; i < 700; ++i) w[i] = 0.85;
    const LosVerdict v = detect_los(r);
    CHECK(v.detected);
    CHECK(v.time == Approx(0.6));
}

TEST_CASE("LOS from inter-string angle drift") {
    RunRecord r = synthetic(1000);
    auto& phi = column(r, 1, "phi_rel");
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = wrap_angle(0.01 * static_cast<double>(i));
    const LosVerdict v = detect_los(r);
    CHECK(v.detected);
    CHECK(v.time == Approx(0.315).epsilon(0.01));

    // A common rotation of both strings is not a drift.
    auto& ref = column(r, 0, "phi_rel");
    ref = phi;
    CHECK_FALSE(detect_los(r).detected);
}

TEST_CASE("LOS is monotone in the frequency threshold") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::uniform_int_distribution<std::size_t> pos(0, 900);
    for (int trial = 0; trial < 200; ++trial) {
        RunRecord r = synthetic(1000);
        auto& w = column(r, trial % 2, "omega");
        for (int burst = 0; burst < 3; ++burst) {
            const std::size_t start = pos(rng);
            const double dev = u(rng);
            for (std::size_t i = start; i < start + 100 && i < w.size(); ++i) w[i] = 1.0 + dev;
        }
        LosCriteria c;
        bool detected = true;
        for (double thr = 0.01; thr < 0.35; thr += 0.01) {
            c.freq_dev = thr;
            const bool now = detect_los(r, c).detected;
            CHECK((detected || !now));
            detected = now;
        }
    }
}

TEST_CASE("a diverged record counts as LOS") {
    RunRecord r = synthetic(100);
    r.status = RunStatus::Diverged;
    r.diverged_at = 0.05;
    const LosVerdict v = detect_los(r);
    CHECK(v.detected);
    CHECK(v.time == 0.05);
}

TEST_CASE("metrics on a synthetic settled record") {
    RunRecord r = synthetic(3001);
    for (std::size_t k = 0; k < 2; ++k) {
        std::fill(column(r, k, "vpcc").begin(), column(r, k, "vpcc").end(), 0.8);
        std::fill(column(r, k, "v_ext").begin(), column(r, k, "v_ext").end(), 0.8);
        std::fill(column(r, k, "i").begin(), column(r, k, "i").end(), 0.3);
    }
    column(r, 1, "q")[2900] = 0.02;
    column(r, 0, "i_ref0")[10] = 1.5;
    Metrics m = compute_metrics(r);
    CHECK_FALSE(m.los.detected);
    CHECK(m.voltage_settled);
    CHECK(m.ramp_completed);
    CHECK(m.reactive_imbalance == Approx(0.02));
    CHECK(m.strings[0].max_current == 0.3);
    CHECK(m.strings[0].final_voltage == Approx(0.8));
    CHECK_FALSE(m.strings[0].current_limit_sustained);

    auto& i0 = column(r, 0, "i_ref0");
    for (std::size_t i = 1000; i <= 1150; ++i) i0[i] = 1.3;
    column(r, 1, "vpcc")[2800] = 0.75;
    m = compute_metrics(r);
    CHECK(m.strings[0].longest_current_limit == Approx(0.15));
    CHECK(m.strings[0].current_limit_sustained);
    CHECK_FALSE(m.voltage_settled);

    const std::string json = metrics_to_json(m);
    CHECK(json.find("\"reactive_imbalance\"") != std::string::npos);
    CHECK(json.find("\"longest_current_limit_s\"") != std::string::npos);
}
