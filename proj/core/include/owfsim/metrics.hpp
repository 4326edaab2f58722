#pragma once

#include <optional>
#include <string>
#include <vector>

#include "owfsim/record.hpp"

namespace owfsim {

struct LosVerdict {
    bool detected = false;
    double time = 0.0;  // s, first detection
};

/// Loss of synchronism: some string holds |omega - omega_1| above the threshold
/// for the hold time, the unwrapped inter-string angle drifts by more than the
/// angle bound, or the run diverged.
[[nodiscard]] LosVerdict detect_los(const RunRecord& record, const LosCriteria& criteria);
[[nodiscard]] LosVerdict detect_los(const RunRecord& record);

struct StringMetrics {
    double max_current = 0.0;
    double max_freq_dev = 0.0;
    double final_voltage = 0.0;    // mean |v_pcc| over the settling window
    double final_power = 0.0;      // mean P over the settling window
    double min_power = 0.0;        // over the whole run
    double min_virtual_power = 0.0;
    double longest_current_limit = 0.0;  // s, longest run with |i_ref0| > I_max
    bool current_limit_sustained = false;
};

struct Metrics {
    bool diverged = false;
    double diverged_at = 0.0;
    LosVerdict los{};
    std::vector<StringMetrics> strings;
    double reactive_imbalance = 0.0;  // max |Q_k - Q_1| over the settling window
    bool voltage_settled = false;
    bool ramp_completed = false;
};

[[nodiscard]] Metrics compute_metrics(const RunRecord& record);

[[nodiscard]] std::string metrics_to_json(const Metrics& metrics, int indent = 2);

}  // namespace owfsim
