#include "owfsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace owfsim {

namespace {

constexpr double kRampTargetMax = 1.2;

constexpr double kBlackStartVoltage = 0.8;
constexpr double kBlackStartSlope = 0.6;
constexpr double kBlackStartHorizon = 3.0;

constexpr double kPowerRampTarget = 0.8;
constexpr double kPowerRampSlope = 0.5;
constexpr double kPowerRampStart = 2.0;   // black start has settled by then
constexpr double kPowerRampSettle = 1.5;  // after the last ramp completes

void require(bool condition, const std::string& what) {
    if (!condition) throw std::invalid_argument("scenario: " + what);
}

void check_ramp(const RampProfile& r, const std::string& field) {
    require(std::isfinite(r.target) && r.target >= 0.0 && r.target <= kRampTargetMax,
            field + ".target must lie in [0, 1.2]");
    require(std::isfinite(r.slope) && r.slope >= 0.0, field + ".slope must be non-negative");
    require(std::isfinite(r.start) && r.start >= 0.0, field + ".start must be non-negative");
    require(r.target == 0.0 || r.slope > 0.0, field + ".slope must be positive for a nonzero target");
}

StringSpec make_string(std::string name, int n_wt) {
    StringSpec s;
    s.name = std::move(name);
    s.n_wt = n_wt;
    return s;
}

}  // namespace

double RampProfile::value_after(double elapsed) const {
    if (elapsed <= 0.0) return 0.0;
    return std::min(target, slope * elapsed);
}

double RampProfile::duration() const { return target > 0.0 ? target / slope : 0.0; }

void ScenarioSpec::validate() const {
    require(!strings.empty(), "strings must not be empty");
    for (std::size_t k = 0; k < strings.size(); ++k) {
        const StringSpec& s = strings[k];
        const std::string tag = "strings[" + std::to_string(k) + "]";
        require(s.n_wt > 0, tag + ".n_wt must be positive");
        require(std::isfinite(s.v_ext_delay) && s.v_ext_delay >= 0.0, tag + ".v_ext_delay must be non-negative");
        require(std::isfinite(s.p_ref_delay) && s.p_ref_delay >= 0.0, tag + ".p_ref_delay must be non-negative");
        try {
            s.controller.validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("scenario: " + tag + ".controller: " + e.what());
        }
    }
    check_ramp(v_ext, "v_ext");
    check_ramp(p_ref, "p_ref");
    require(std::isfinite(q_ref), "q_ref must be finite");
    require(std::isfinite(t_end) && t_end > 0.0, "t_end must be positive");
    require(std::isfinite(settle_window) && settle_window > 0.0 && settle_window <= t_end,
            "settle_window must lie in (0, t_end]");
    require(imbalance_threshold > 0.0, "imbalance_threshold must be positive");
    require(voltage_band > 0.0, "voltage_band must be positive");
    require(saturation_hold > 0.0, "saturation_hold must be positive");
    require(los.freq_dev > 0.0, "los.freq_dev must be positive");
    require(los.hold >= 0.0, "los.hold must be non-negative");
    require(los.angle_drift > 0.0, "los.angle_drift must be positive");
    try {
        plant_params().validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
}

PlantParams ScenarioSpec::plant_params() const {
    PlantParams p;
    int total = 0;
    for (const auto& s : strings) total += s.n_wt;
    for (const auto& s : strings) {
        StringElectrical e;
        e.l_f = plant.l_f;
        e.r_f = plant.r_f;
        e.cable = plant.cable;
        e.weight = total > 0 ? static_cast<double>(s.n_wt) / total : 1.0;
        p.strings.push_back(e);
    }
    p.c_comp = plant.c_comp;
    p.comp_connected = plant.comp_connected;
    p.dru = plant.dru;
    p.hvdc = plant.hvdc;
    p.onshore = plant.onshore;
    if (!strings.empty()) p.omega_base = strings.front().controller.omega_base;
    return p;
}

PerUnitBase ScenarioSpec::system_base() const {
    int total = 0;
    for (const auto& s : strings) total += s.n_wt;
    return string_base(std::max(total, 1));
}

ScenarioSpec build_black_start(double delay_s2, const FeedbackConfig& feedback) {
    ScenarioSpec spec;
    spec.name = "black-start";
    spec.description = "two-string black start, second string delayed by " + std::to_string(delay_s2) + " s";
    StringSpec wts1 = make_string("WTS1", kWts1Turbines);
    StringSpec wts2 = make_string("WTS2", kWts2Turbines);
    for (StringSpec* s : {&wts1, &wts2}) {
        s->feedback = feedback;
        s->controller.p_min = 0.0;
        s->controller.i_max = 1.2;
    }
    wts2.v_ext_delay = delay_s2;
    spec.strings = {wts1, wts2};
    spec.v_ext = {kBlackStartVoltage, kBlackStartSlope, 0.0};
    spec.p_ref = {0.0, 0.0, 0.0};
    spec.q_ref = 0.0;
    spec.t_end = std::max(kBlackStartHorizon, delay_s2 + spec.v_ext.duration() + 1.0);
    return spec;
}

ScenarioSpec build_power_ramp(double delay_s2, double p_min, const FeedbackConfig& feedback) {
    ScenarioSpec spec = build_black_start(0.0, feedback);
    spec.name = "power-ramp";
    spec.description = "black start then power ramp, second string delayed by " + std::to_string(delay_s2) + " s";
    for (auto& s : spec.strings) s.controller.p_min = p_min;
    spec.strings[1].p_ref_delay = delay_s2;
    spec.p_ref = {kPowerRampTarget, kPowerRampSlope, kPowerRampStart};
    spec.t_end = kPowerRampStart + delay_s2 + spec.p_ref.duration() + kPowerRampSettle;
    return spec;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"blackstart-virtual", "black start, 300 ms delay, virtual power in every loop"},
        {"blackstart-measured-droop", "black start, 300 ms delay, QV and PV on measured power"},
        {"ramp-nopmin-measured", "power ramp, 1 s delay, no reverse-power limit, measured power everywhere"},
        {"ramp-pmin-measured-pv", "power ramp, 1 s delay, P_min = 0, PV on measured power"},
        {"ramp-pmin-virtual", "power ramp, 1 s delay, P_min = 0, virtual power in every loop"},
    };
    return list;
}

ScenarioSpec build_preset(std::string_view name) {
    ScenarioSpec spec;
    if (name == "blackstart-virtual") {
        spec = build_black_start(0.3, FeedbackConfig::all_virtual());
    } else if (name == "blackstart-measured-droop") {
        spec = build_black_start(0.3, {true, false, false});
    } else if (name == "ramp-nopmin-measured") {
        spec = build_power_ramp(1.0, kNoPowerLimit, FeedbackConfig::all_measured());
    } else if (name == "ramp-pmin-measured-pv") {
        spec = build_power_ramp(1.0, 0.0, {true, true, false});
    } else if (name == "ramp-pmin-virtual") {
        spec = build_power_ramp(1.0, 0.0, FeedbackConfig::all_virtual());
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    spec.name = std::string(name);
    return spec;
}

}  // namespace owfsim
