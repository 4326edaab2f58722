#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "owfsim/controller.hpp"
#include "owfsim/plant.hpp"

namespace owfsim {

/// Linear ramp from zero that begins when the start signal arrives.
struct RampProfile {
    double target = 0.0;  // pu
    double slope = 0.0;   // pu/s
    double start = 0.0;   // s, time the start signal is sent

    /// Value `elapsed` seconds after the signal arrived (zero before).
    [[nodiscard]] double value_after(double elapsed) const;
    /// Seconds from arrival until the target is reached.
    [[nodiscard]] double duration() const;
};

/// One aggregated wind-turbine string.
struct StringSpec {
    std::string name;
    int n_wt = 1;
    ControllerParams controller{};
    FeedbackConfig feedback{};
    double v_ext_delay = 0.0;  // s, communication delay on the voltage ramp start signal
    double p_ref_delay = 0.0;  // s, communication delay on the power ramp start signal
};

/// Plant data that is not derived from the string list.
struct PlantConfig {
    double l_f = 0.18;
    double r_f = 0.01;
    CableParams cable{};
    double c_comp = 0.4;
    bool comp_connected = true;
    DruParams dru{};
    HvdcParams hvdc{};
    OnshoreParams onshore{};
};

/// Thresholds that turn a trajectory into a loss-of-synchronism verdict.
struct LosCriteria {
    double freq_dev = 0.1;     // pu
    double hold = 0.1;         // s
    double angle_drift = kPi;  // rad, inter-string
};

struct ScenarioSpec {
    std::string name;
    std::string description;
    std::vector<StringSpec> strings;
    RampProfile v_ext{};
    RampProfile p_ref{};
    double q_ref = 0.0;
    PlantConfig plant{};
    double t_end = 3.0;
    double settle_window = 0.5;
    double imbalance_threshold = 0.05;
    double voltage_band = 0.02;
    double saturation_hold = 0.1;  // s of continuous current limiting that counts as sustained
    LosCriteria los{};

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// Plant parameters with per-string weights from the string sizes.
    [[nodiscard]] PlantParams plant_params() const;
    [[nodiscard]] PerUnitBase system_base() const;
};

inline constexpr int kWts1Turbines = 36;
inline constexpr int kWts2Turbines = 38;

/// Two-string black start: voltage ramps to 0.8 pu at 0.6 pu/s, the second
/// string receives the start signal `delay_s2` later. P_ref = 0, P_min = 0.
[[nodiscard]] ScenarioSpec build_black_start(double delay_s2, const FeedbackConfig& feedback);

/// Undelayed black start followed by a power ramp to 0.8 pu at 0.5 pu/s, the
/// second string ramping `delay_s2` later.
[[nodiscard]] ScenarioSpec build_power_ramp(double delay_s2, double p_min, const FeedbackConfig& feedback);

struct Preset {
    std::string_view name;
    std::string_view summary;
};

[[nodiscard]] const std::vector<Preset>& presets();

/// Throws std::invalid_argument for unknown names.
[[nodiscard]] ScenarioSpec build_preset(std::string_view name);

[[nodiscard]] std::string scenario_to_json(const ScenarioSpec& spec, int indent = 2);

/// Parses and validates a scenario document. Missing fields take defaults.
/// Throws std::invalid_argument with the JSON path of the offending field.
[[nodiscard]] ScenarioSpec scenario_from_json(std::string_view text);

}  // namespace owfsim
