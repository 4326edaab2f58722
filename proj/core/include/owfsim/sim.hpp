#pragma once

#include <cstddef>
#include <deque>

#include "owfsim/record.hpp"
#include "owfsim/sim_config.hpp"
#include "owfsim/scenario.hpp"

namespace owfsim {

/// Fixed discrete delay on the control grid.
class DelayLine {
public:
    DelayLine(double delay, double ts, double initial = 0.0);

    /// Pushes the sample of the current instant and returns the one from
    /// `delay` seconds ago.
    double apply(double sample);

    [[nodiscard]] std::size_t delay_samples() const { return n_; }

private:
    std::size_t n_;
    std::deque<double> queue_;
};

/// Simulates the scenario. Divergence ends the run early with a
/// `RunStatus::Diverged` record; invalid inputs throw std::invalid_argument.
[[nodiscard]] RunRecord run(const ScenarioSpec& scenario, const SimConfig& config);

}  // namespace owfsim
