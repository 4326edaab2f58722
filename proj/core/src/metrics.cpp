#include "owfsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace owfsim {

namespace {

// Mean P over the settling window must sit this close to the final P_ref.
constexpr double kRampPowerTolerance = 0.05;

std::vector<double> unwrap(const std::vector<double>& wrapped) {
    std::vector<double> out(wrapped.size());
    double offset = 0.0;
    for (std::size_t i = 0; i < wrapped.size(); ++i) {
        if (i > 0) {
            const double step = wrapped[i] - wrapped[i - 1];
            if (step > kPi) offset -= 2.0 * kPi;
            if (step < -kPi) offset += 2.0 * kPi;
        }
        out[i] = wrapped[i] + offset;
    }
    return out;
}

double omega_1(const RunRecord& record) {
    return record.scenario.strings.empty() ? 1.0 : record.scenario.strings.front().controller.omega_1;
}

}  // namespace

LosVerdict detect_los(const RunRecord& record, const LosCriteria& criteria) {
    const std::size_t n = record.scenario.strings.size();
    const auto& t = record.column("t");
    double first = std::numeric_limits<double>::infinity();

    const double w1 = omega_1(record);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& w = record.string_signal(k, "omega");
        double run_start = -1.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!(std::abs(w[i] - w1) <= criteria.freq_dev)) {
                if (run_start < 0.0) run_start = t[i];
                if (t[i] - run_start >= criteria.hold - 1e-12) {
                    first = std::min(first, t[i]);
                    break;
                }
            } else {
                run_start = -1.0;
            }
        }
    }

    if (n > 1) {
        const std::vector<double> ref = unwrap(record.string_signal(0, "phi_rel"));
        for (std::size_t k = 1; k < n; ++k) {
            const std::vector<double> other = unwrap(record.string_signal(k, "phi_rel"));
            for (std::size_t i = 0; i < t.size(); ++i) {
                const double drift = (other[i] - ref[i]) - (other[0] - ref[0]);
                if (!(std::abs(drift) <= criteria.angle_drift)) {
                    first = std::min(first, t[i]);
                    break;
                }
            }
        }
    }

    if (record.diverged()) first = std::min(first, record.diverged_at);
    if (std::isinf(first)) return {};
    return {true, first};
}

LosVerdict detect_los(const RunRecord& record) { return detect_los(record, record.scenario.los); }

Metrics compute_metrics(const RunRecord& record) {
    const ScenarioSpec& spec = record.scenario;
    const std::size_t n = spec.strings.size();
    const auto& t = record.column("t");

    Metrics m;
    m.diverged = record.diverged();
    m.diverged_at = record.diverged_at;
    m.los = detect_los(record);
    m.strings.resize(n);
    if (t.empty()) return m;

    const double t_last = t.back();
    const double window_start = t_last - spec.settle_window;
    const double w1 = omega_1(record);

    m.voltage_settled = true;
    bool targets_reached = true;
    bool powers_reached = true;
    for (std::size_t k = 0; k < n; ++k) {
        StringMetrics& s = m.strings[k];
        const double i_max = spec.strings[k].controller.i_max;
        const auto& v = record.string_signal(k, "vpcc");
        const auto& p = record.string_signal(k, "p");
        const auto& p_virt = record.string_signal(k, "p_virt");
        const auto& i = record.string_signal(k, "i");
        const auto& i_ref0 = record.string_signal(k, "i_ref0");
        const auto& w = record.string_signal(k, "omega");

        s.min_power = std::numeric_limits<double>::infinity();
        s.min_virtual_power = std::numeric_limits<double>::infinity();
        double v_sum = 0.0;
        double p_sum = 0.0;
        std::size_t count = 0;
        double limit_start = -1.0;
        for (std::size_t r = 0; r < t.size(); ++r) {
            s.max_current = std::max(s.max_current, i[r]);
            s.max_freq_dev = std::max(s.max_freq_dev, std::abs(w[r] - w1));
            s.min_power = std::min(s.min_power, p[r]);
            s.min_virtual_power = std::min(s.min_virtual_power, p_virt[r]);
            if (i_ref0[r] > i_max) {
                if (limit_start < 0.0) limit_start = t[r];
                s.longest_current_limit = std::max(s.longest_current_limit, t[r] - limit_start);
            } else {
                limit_start = -1.0;
            }
            if (t[r] >= window_start) {
                v_sum += v[r];
                p_sum += p[r];
                ++count;
                if (!(std::abs(v[r] - spec.v_ext.target) <= spec.voltage_band)) m.voltage_settled = false;
            }
        }
        s.final_voltage = count ? v_sum / count : 0.0;
        s.final_power = count ? p_sum / count : 0.0;
        s.current_limit_sustained = s.longest_current_limit >= spec.saturation_hold - 1e-12;

        const double p_ref_last = record.string_signal(k, "p_ref").back();
        const double v_ext_last = record.string_signal(k, "v_ext").back();
        if (p_ref_last != spec.p_ref.target || v_ext_last != spec.v_ext.target) targets_reached = false;
        if (!(std::abs(s.final_power - spec.p_ref.target) <= kRampPowerTolerance)) powers_reached = false;
    }

    for (std::size_t r = 0; r < t.size(); ++r) {
        if (t[r] < window_start) continue;
        const double q1 = record.string_signal(0, "q")[r];
        for (std::size_t k = 1; k < n; ++k)
            m.reactive_imbalance = std::max(m.reactive_imbalance, std::abs(record.string_signal(k, "q")[r] - q1));
    }

    m.ramp_completed = !m.diverged && !m.los.detected && targets_reached && powers_reached;
    return m;
}

std::string metrics_to_json(const Metrics& m, int indent) {
    nlohmann::json strings = nlohmann::json::array();
    for (const auto& s : m.strings) {
        strings.push_back({
            {"max_current", s.max_current},
            {"max_freq_dev", s.max_freq_dev},
            {"final_voltage", s.final_voltage},
            {"final_power", s.final_power},
            {"min_power", s.min_power},
            {"min_virtual_power", s.min_virtual_power},
            {"longest_current_limit_s", s.longest_current_limit},
            {"current_limit_sustained", s.current_limit_sustained},
        });
    }
    nlohmann::json j = {
        {"diverged", m.diverged},
        {"los_detected", m.los.detected},
        {"reactive_imbalance", m.reactive_imbalance},
        {"voltage_settled", m.voltage_settled},
        {"ramp_completed", m.ramp_completed},
        {"strings", strings},
    };
    if (m.diverged) j["diverged_at"] = m.diverged_at;
    if (m.los.detected) j["los_time"] = m.los.time;
    return j.dump(indent);
}

}  // namespace owfsim
