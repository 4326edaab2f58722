#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "owfsim/scenario.hpp"
#include "owfsim/sim_config.hpp"

namespace owfsim {

enum class RunStatus { Converged, Diverged };

/// Per-string signals, in column order. Column names are "s<k>_<signal>".
inline constexpr std::string_view kStringSignals[] = {
    "vpcc", "p", "q", "p_virt", "q_virt", "i", "i_ref0", "omega", "v_ref", "phi_rel", "p_ref", "v_ext",
};
/// Shared DC-link signals, after all string columns.
inline constexpr std::string_view kLinkSignals[] = {"v_on", "v_dc_off", "i_dc"};

[[nodiscard]] std::string string_column(std::size_t string_index, std::string_view signal);
[[nodiscard]] std::vector<std::string> record_columns(std::size_t n_strings);

/// Sampled time series of one run plus everything needed to reproduce it.
struct RunRecord {
    ScenarioSpec scenario;
    SimConfig config;
    RunStatus status = RunStatus::Converged;
    double diverged_at = 0.0;  // s, valid when status == Diverged
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // column-major, data[c][row]

    [[nodiscard]] std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
    /// Throws std::out_of_range for unknown names.
    [[nodiscard]] std::size_t column_index(std::string_view name) const;
    [[nodiscard]] const std::vector<double>& column(std::string_view name) const;
    [[nodiscard]] const std::vector<double>& string_signal(std::size_t k, std::string_view signal) const {
        return column(string_column(k, signal));
    }
    [[nodiscard]] bool diverged() const { return status == RunStatus::Diverged; }
};

/// Comma-separated, one header line, shortest round-trip decimal formatting.
void write_csv(const RunRecord& record, std::ostream& out);

/// Reads columns and data; the header fields stay default.
[[nodiscard]] RunRecord read_csv(std::istream& in);

/// Run header: resolved scenario, simulation settings, per-unit bases, status.
[[nodiscard]] std::string header_to_json(const RunRecord& record, int indent = 2);

/// Restores scenario, config and status from `header_to_json` output.
void apply_header_json(RunRecord& record, std::string_view text);

[[nodiscard]] std::string sim_config_to_json(const SimConfig& config, int indent = 2);

}  // namespace owfsim
