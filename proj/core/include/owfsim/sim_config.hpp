#pragma once

#include "owfsim/scenario.hpp"

namespace owfsim {

struct SimConfig {
    double dt_plant = 20e-6;     // s
    double ts_control = 200e-6;  // s, integer multiple of dt_plant
    double t_end = 3.0;          // s
    int record_decimation = 1;   // record every n-th control sample
    double divergence_bound = 1e3;

    void validate() const;
    /// Plant steps per control sample.
    [[nodiscard]] int substeps() const;
    [[nodiscard]] long long control_samples() const;

    [[nodiscard]] static SimConfig for_scenario(const ScenarioSpec& spec);
};

}  // namespace owfsim
