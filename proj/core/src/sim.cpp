#include "owfsim/sim.hpp"

#include <algorithm>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace owfsim {

void SimConfig::validate() const {
    if (!(std::isfinite(dt_plant) && dt_plant > 0.0)) throw std::invalid_argument("sim config: dt_plant must be positive");
    if (!(std::isfinite(ts_control) && ts_control > 0.0))
        throw std::invalid_argument("sim config: ts_control must be positive");
    const double ratio = ts_control / dt_plant;
    if (ratio < 0.5 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw std::invalid_argument("sim config: ts_control must be an integer multiple of dt_plant");
    if (!(std::isfinite(t_end) && t_end > 0.0)) throw std::invalid_argument("sim config: t_end must be positive");
    if (record_decimation < 1) throw std::invalid_argument("sim config: record_decimation must be at least 1");
    if (!(divergence_bound > 0.0)) throw std::invalid_argument("sim config: divergence_bound must be positive");
}

int SimConfig::substeps() const { return static_cast<int>(std::lround(ts_control / dt_plant)); }

long long SimConfig::control_samples() const { return std::llround(t_end / ts_control); }

SimConfig SimConfig::for_scenario(const ScenarioSpec& spec) {
    SimConfig c;
    c.t_end = spec.t_end;
    return c;
}

DelayLine::DelayLine(double delay, double ts, double initial) {
    if (!(std::isfinite(delay) && delay >= 0.0)) throw std::invalid_argument("delay line: delay must be non-negative");
    if (!(ts > 0.0)) throw std::invalid_argument("delay line: ts must be positive");
    n_ = static_cast<std::size_t>(std::llround(delay / ts));
    queue_.assign(n_, initial);
}

double DelayLine::apply(double sample) {
    if (n_ == 0) return sample;
    queue_.push_back(sample);
    const double out = queue_.front();
    queue_.pop_front();
    return out;
}

namespace {

/// Local ramp generator fed by a delayed start signal.
class DelayedRamp {
public:
    DelayedRamp(const RampProfile& profile, double delay, double ts)
        : profile_(profile), line_(delay, ts), ts_(ts) {}

    double step(long long k) {
        const double t = static_cast<double>(k) * ts_;
        const double signal = t >= profile_.start - 1e-9 * ts_ ? 1.0 : 0.0;
        if (line_.apply(signal) > 0.5 && arrived_ < 0) arrived_ = k;
        if (arrived_ < 0) return 0.0;
        return profile_.value_after(static_cast<double>(k - arrived_) * ts_);
    }

private:
    RampProfile profile_;
    DelayLine line_;
    double ts_;
    long long arrived_ = -1;
};

double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace

RunRecord run(const ScenarioSpec& scenario, const SimConfig& config) {
    scenario.validate();
    config.validate();

    const PlantParams plant = scenario.plant_params();
    plant.validate();
    const std::size_t n = scenario.strings.size();
    const double ts = config.ts_control;
    const double dt = config.dt_plant;
    const int substeps = config.substeps();
    const long long samples = config.control_samples();

    RunRecord record;
    record.scenario = scenario;
    record.config = config;
    record.columns = record_columns(n);
    record.data.assign(record.columns.size(), {});
    const std::size_t expected_rows = static_cast<std::size_t>(samples / config.record_decimation + 1);
    for (auto& col : record.data) col.reserve(expected_rows);

    std::vector<Upsc> controllers;
    std::vector<DelayedRamp> v_ramps;
    std::vector<DelayedRamp> p_ramps;
    controllers.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const StringSpec& s = scenario.strings[k];
        ControllerParams params = s.controller;
        params.ts = ts;
        record.scenario.strings[k].controller.ts = ts;
        controllers.emplace_back(params, s.feedback);
        v_ramps.emplace_back(scenario.v_ext, s.v_ext_delay, ts);
        p_ramps.emplace_back(scenario.p_ref, s.p_ref_delay, ts);
    }

    PlantState state(n);
    std::vector<double>& x = state.raw();
    std::vector<SpaceVector> applied(n, SpaceVector{});
    std::vector<SpaceVector> pending(n, SpaceVector{});

    OnshoreState onshore = make_onshore_state(plant.onshore, dt);
    const OnshoreGains gains = onshore_gains(plant.onshore, plant.hvdc, plant.omega_base);
    PlantInputs inputs{std::span<const SpaceVector>(applied), 0.0};

    boost::numeric::odeint::runge_kutta4<std::vector<double>> stepper;
    const auto system = [&](const std::vector<double>& xs, std::vector<double>& dxdt, double) {
        plant_derivatives(plant, xs, inputs, dxdt);
    };

    const double w_nominal = plant.omega_base;
    for (long long k = 0; k <= samples; ++k) {
        const double t = static_cast<double>(k) * ts;

        // Every controller reads the same plant snapshot.
        double controller_peak = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const ControllerReferences refs{p_ramps[s].step(k), scenario.q_ref, v_ramps[s].step(k)};
            const ControllerMeasurements meas{state.v_pcc(s), state.i_conv(s)};
            pending[s] = controllers[s].step(refs, meas).v_conv_s;
            controller_peak = std::max(controller_peak, controllers[s].max_state_magnitude());
        }

        const double plant_peak = max_abs(x);
        const bool diverged = !(plant_peak <= config.divergence_bound) || !(controller_peak <= config.divergence_bound);

        if (k % config.record_decimation == 0 || diverged || k == samples) {
            std::size_t c = 0;
            auto push = [&](double v) { record.data[c++].push_back(v); };
            push(t);
            const double nominal_angle = wrap_angle(w_nominal * controllers.front().params().omega_1 * t);
            for (std::size_t s = 0; s < n; ++s) {
                const ControlSignals& sig = controllers[s].state().last;
                push(std::abs(state.v_pcc(s)));
                push(sig.p);
                push(sig.q);
                push(sig.p_virt);
                push(sig.q_virt);
                push(std::abs(state.i_conv(s)));
                push(std::abs(sig.i_ref0));
                push(sig.omega);
                push(sig.v_ref);
                push(wrap_angle(sig.phi - nominal_angle));
                push(sig.p_ref);
                push(sig.v_ext);
            }
            push(state.v_on());
            push(state.v_dc_off());
            push(state.i_dc());
        }

        if (diverged) {
            record.status = RunStatus::Diverged;
            record.diverged_at = t;
            break;
        }
        if (k == samples) break;

        // `applied` holds the outputs computed one sample earlier.
        for (int j = 0; j < substeps; ++j) {
            const double tj = t + static_cast<double>(j) * dt;
            inputs.i_src = onshore_step(onshore, plant.onshore, gains, state.v_on(), state.i_dc_cable(), dt);
            stepper.do_step(system, x, tj, dt);
            enforce_diode_clamp(x, n);
        }
        std::copy(pending.begin(), pending.end(), applied.begin());
    }
    return record;
}

}  // namespace owfsim
