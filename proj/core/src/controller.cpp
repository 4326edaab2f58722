#include "owfsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace owfsim {

namespace {

void require(bool condition, const char* what) {
    if (!condition) throw std::invalid_argument(std::string("controller params: ") + what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

double ControllerParams::modulation_limit() const {
    // Linear range with zero-sequence injection.
    return v_dc / std::sqrt(3.0);
}

void ControllerParams::validate() const {
    require(positive(k_m), "k_m must be positive");
    require(positive(inertia_h), "inertia_h must be positive");
    require(std::isfinite(t_d) && t_d >= 0.0, "t_d must be non-negative");
    require(std::isfinite(k_qv) && k_qv >= 0.0, "k_qv must be non-negative");
    require(std::isfinite(k_pv) && k_pv >= 0.0, "k_pv must be non-negative");
    require(std::isfinite(k_pv_i) && k_pv_i >= 0.0, "k_pv_i must be non-negative");
    require(positive(omega_1), "omega_1 must be positive");
    require(positive(alpha_q) && alpha_q < omega_1, "alpha_q must lie in (0, omega_1)");
    require(positive(alpha_p) && alpha_p < omega_1, "alpha_p must lie in (0, omega_1)");
    require(positive(r_a), "r_a must be positive");
    require(positive(l_f), "l_f must be positive");
    require(std::isfinite(r_f) && r_f >= 0.0, "r_f must be non-negative");
    require(std::isfinite(alpha_a) && alpha_a >= 0.0 && alpha_a < 0.05 * omega_1,
            "alpha_a must lie in [0, 0.05 omega_1)");
    // The tabulated defaults sit exactly on the bound, so it is inclusive (with rounding slack).
    require(positive(alpha_f) && alpha_f <= r_a / l_f * (1.0 + 1e-12), "alpha_f must lie in (0, r_a / l_f]");
    require(positive(i_max), "i_max must be positive");
    require(!std::isnan(p_min) && p_min < std::numeric_limits<double>::infinity(),
            "p_min must be finite or -infinity");
    require(positive(v_dc), "v_dc must be positive");
    require(positive(ts), "ts must be positive");
    require(positive(omega_base), "omega_base must be positive");
    require(positive(v_ref_max), "v_ref_max must be positive");
    require(positive(v_ref_floor), "v_ref_floor must be positive");
    require(positive(v_floor), "v_floor must be positive");
}

ControllerState make_controller_state(const ControllerParams& params) {
    ControllerState s;
    const double wb = params.omega_base;
    s.q_filter = TustinLowPass<double>(params.alpha_q * wb, params.ts);
    s.p_filter = TustinLowPass<double>(params.alpha_p * wb, params.ts);
    s.vpcc_filter = TustinLowPass<SpaceVector>(params.alpha_f * wb, params.ts);
    s.omega = params.omega_1;
    return s;
}

SyncOutput sync_step(ControllerState& state, double p_ref, double p_bar, const ControllerParams& params,
                     double dt) {
    const double dt_pu = dt * params.omega_base;
    const double x_dot = (p_ref - p_bar - params.k_m * state.droop_state) / params.inertia_m();
    state.omega = params.omega_1 + state.droop_state + params.t_d * x_dot;
    state.phi = wrap_angle(state.phi + dt_pu * state.omega);
    state.droop_state += dt_pu * x_dot;
    return {state.phi, state.omega};
}

double voltage_ref_step(ControllerState& state, double v_ext, double q_ref, double q_bar, double p_ref,
                        double p_bar, const ControllerParams& params, double dt) {
    const double q_f = state.q_filter.step(q_bar);
    const double p_f = state.p_filter.step(p_bar);
    const double e_p = p_ref - p_f;

    const double unclamped = v_ext + params.k_qv * (q_ref - q_f) + params.k_pv * e_p + state.pv_integrator;
    const double v_ref = std::clamp(unclamped, 0.0, params.v_ref_max);

    const bool wind_up = (unclamped > params.v_ref_max && e_p > 0.0) || (unclamped < 0.0 && e_p < 0.0);
    if (!wind_up) state.pv_integrator += dt * params.k_pv_i * e_p;
    return v_ref;
}

SpaceVector avc_step(ControllerState& state, double p_ref, double q_ref, double v_ref, SpaceVector v_pcc_dq,
                     const ControllerParams& params, double dt) {
    const SpaceVector v_f = state.vpcc_filter.step(v_pcc_dq);
    const SpaceVector error = SpaceVector(v_ref, 0.0) - v_f;
    const double v_den = std::max(v_ref, params.v_ref_floor);

    const SpaceVector i_ref0 = SpaceVector(p_ref, -q_ref) / v_den + (error + state.avc_integrator) / params.r_a;
    state.avc_integrator += dt * params.omega_base * params.alpha_a * error;
    return i_ref0;
}

SpaceVector limit_reverse_power(SpaceVector i_ref0, SpaceVector v_pcc_f, double p_min, double v_floor) {
    if (!(p_min > kNoPowerLimit)) return i_ref0;
    const double v_sq = std::norm(v_pcc_f);
    if (v_sq <= v_floor * v_floor) return i_ref0;
    const double p = complex_power(v_pcc_f, i_ref0).p;
    if (p >= p_min) return i_ref0;
    return i_ref0 - v_pcc_f * ((p - p_min) / v_sq);
}

SpaceVector limit_current_magnitude(SpaceVector i_refr, double i_max) {
    return i_refr * (i_max / std::max(std::abs(i_refr), i_max));
}

PowerPair virtual_power(SpaceVector v_pcc_s, SpaceVector i_ref0_s) { return complex_power(v_pcc_s, i_ref0_s); }

FeedbackSignals select_feedback(const FeedbackConfig& cfg, PowerPair measured, PowerPair virt) {
    return {
        cfg.sync_uses_virtual ? virt.p : measured.p,
        cfg.pv_uses_virtual ? virt.p : measured.p,
        cfg.qv_uses_virtual ? virt.q : measured.q,
    };
}

SpaceVector current_control(SpaceVector i_ref_s, SpaceVector i_s, SpaceVector v_pcc_f_s,
                            const ControllerParams& params) {
    const SpaceVector z_f(params.r_f, params.omega_1 * params.l_f);
    return params.r_a * (i_ref_s - i_s) + z_f * i_ref_s + v_pcc_f_s;
}

const ControlSignals& controller_step(ControllerState& state, const ControllerReferences& refs,
                                      const ControllerMeasurements& meas, const ControllerParams& params,
                                      const FeedbackConfig& cfg) {
    const double ts = params.ts;
    const double phi = state.phi;
    const SpaceVector v_pcc_dq = to_dq(meas.v_pcc_s, phi);

    if (!state.initialized) {
        state.vpcc_filter.reset(v_pcc_dq);
        state.initialized = true;
    }

    ControlSignals& out = state.last;
    out = ControlSignals{};
    out.phi = phi;
    out.v_ext = refs.v_ext;
    out.p_ref = refs.p_ref;
    out.q_ref = refs.q_ref;

    const PowerPair measured = complex_power(meas.v_pcc_s, meas.i_s);
    // The current reference of this sample does not exist yet; use the last one
    // in the present frame.
    const PowerPair virt = virtual_power(meas.v_pcc_s, to_alphabeta(state.last_i_ref0, phi));
    out.p = measured.p;
    out.q = measured.q;
    out.p_virt = virt.p;
    out.q_virt = virt.q;
    out.feedback = select_feedback(cfg, measured, virt);

    const SyncOutput sync = sync_step(state, refs.p_ref, out.feedback.p_sync, params, ts);
    out.omega = sync.omega;

    out.v_ref = voltage_ref_step(state, refs.v_ext, refs.q_ref, out.feedback.q_qv, refs.p_ref, out.feedback.p_pv,
                                 params, ts);

    out.i_ref0 = avc_step(state, refs.p_ref, refs.q_ref, out.v_ref, v_pcc_dq, params, ts);
    out.v_pcc_f = state.vpcc_filter.value();
    out.i_refr = limit_reverse_power(out.i_ref0, out.v_pcc_f, params.p_min, params.v_floor);
    out.i_ref = limit_current_magnitude(out.i_refr, params.i_max);
    out.reverse_power_limited = out.i_refr != out.i_ref0;
    out.current_limited = out.i_ref != out.i_refr;

    const SpaceVector v_cc = current_control(to_alphabeta(out.i_ref, phi), meas.i_s,
                                             to_alphabeta(out.v_pcc_f, phi), params);
    // Sample, hold and one sample of computation delay: the applied voltage is
    // centered 1.5 samples after the measurement.
    const SpaceVector advanced = v_cc * std::polar(1.0, 1.5 * ts * params.omega_base * sync.omega);
    out.v_conv_s = clamp_magnitude(advanced, params.modulation_limit());
    out.modulation_limited = out.v_conv_s != advanced;

    state.last_i_ref0 = out.i_ref0;
    return out;
}

Upsc::Upsc(const ControllerParams& params, const FeedbackConfig& cfg)
    : params_(params), cfg_(cfg), state_(make_controller_state(params)) {
    params_.validate();
}

double Upsc::max_state_magnitude() const {
    const ControlSignals& s = state_.last;
    return std::max({std::abs(state_.droop_state), std::abs(state_.pv_integrator), std::abs(state_.avc_integrator),
                     std::abs(state_.p_filter.value()), std::abs(state_.q_filter.value()),
                     std::abs(state_.vpcc_filter.value()), std::abs(s.i_ref0), std::abs(s.p_virt),
                     std::abs(s.q_virt)});
}

}  // namespace owfsim
