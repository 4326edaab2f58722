#pragma once

#include <limits>

#include "owfsim/discrete.hpp"
#include "owfsim/spacevec.hpp"

namespace owfsim {

/// Tuning of one power-synchronizing grid-forming controller. Gains, filter
/// bandwidths and time constants are per unit on the string base with
/// normalized time (t_pu = omega_base * t); only `inertia_h`, `ts` and
/// `omega_base` carry SI units.
struct ControllerParams {
    double k_m = 20.0;          // frequency droop
    double inertia_h = 1.0;     // s, inertia time constant H
    double t_d = 0.0;           // damper time constant
    double k_qv = 0.05;
    double alpha_q = 0.2;
    double k_pv = 0.75;
    double k_pv_i = 5.0;        // 1/s: PV integral rate in physical time, unlike the bandwidths
    double alpha_p = 0.5;
    double r_a = 0.36;          // active resistance, also current-controller gain
    double alpha_a = 0.01;      // AVC integral bandwidth
    double alpha_f = 2.0;       // PCC voltage feedforward bandwidth
    double i_max = 1.2;
    double p_min = 0.0;         // -infinity disables the reverse-power limit
    double omega_1 = 1.0;
    double l_f = 0.18;          // filter inductance known to the controller
    double r_f = 0.01;          // filter resistance known to the controller
    double v_dc = 1.9754;       // WT DC-link voltage
    double ts = 200e-6;         // s
    double omega_base = 2.0 * kPi * kNominalFrequencyHz;

    double v_ref_max = 1.2;
    double v_ref_floor = 0.05;  // guards (P - jQ)/V_ref
    double v_floor = 0.01;      // below this |v_pcc,f| the reverse-power projection is bypassed

    /// Virtual inertia M = 2H in normalized time.
    [[nodiscard]] double inertia_m() const { return 2.0 * inertia_h * omega_base; }

    /// Largest converter voltage magnitude the modulator can synthesize.
    [[nodiscard]] double modulation_limit() const;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

inline constexpr double kNoPowerLimit = -std::numeric_limits<double>::infinity();

/// Per-loop choice between virtual power and measured power.
struct FeedbackConfig {
    bool sync_uses_virtual = true;
    bool qv_uses_virtual = true;
    bool pv_uses_virtual = true;

    static constexpr FeedbackConfig all_virtual() { return {true, true, true}; }
    static constexpr FeedbackConfig all_measured() { return {false, false, false}; }

    friend bool operator==(const FeedbackConfig&, const FeedbackConfig&) = default;
};

struct FeedbackSignals {
    double p_sync;
    double p_pv;
    double q_qv;
};

/// Signals produced by one controller sample, for logging and tests.
struct ControlSignals {
    double p = 0.0;           // measured at the PCC
    double q = 0.0;
    double p_virt = 0.0;
    double q_virt = 0.0;
    FeedbackSignals feedback{};
    double omega = 1.0;       // pu
    double phi = 0.0;         // dq angle used for this sample
    double v_ext = 0.0;
    double p_ref = 0.0;
    double q_ref = 0.0;
    double v_ref = 0.0;       // voltage magnitude reference after clamping
    SpaceVector v_pcc_f{};    // dq
    SpaceVector i_ref0{};     // dq, unmodified AVC output
    SpaceVector i_refr{};     // dq, after reverse-power limit
    SpaceVector i_ref{};      // dq, after magnitude limit
    SpaceVector v_conv_s{};   // alpha-beta converter voltage reference sent to the modulator
    bool reverse_power_limited = false;
    bool current_limited = false;
    bool modulation_limited = false;
};

/// All integrator and filter states of one controller instance.
struct ControllerState {
    double phi = 0.0;
    double droop_state = 0.0;     // output of 1/(sM + k_m)
    double omega = 1.0;
    double pv_integrator = 0.0;
    SpaceVector avc_integrator{};
    TustinLowPass<double> q_filter;
    TustinLowPass<double> p_filter;
    TustinLowPass<SpaceVector> vpcc_filter;
    SpaceVector last_i_ref0{};    // dq, previous sample
    bool initialized = false;
    ControlSignals last{};
};

/// Fresh state with filters discretized for `params.ts`.
[[nodiscard]] ControllerState make_controller_state(const ControllerParams& params);

struct SyncOutput {
    double phi;
    double omega;
};

/// Power-synchronization loop phi = (1/s)[omega_1 + (sT_d + 1)/(sM + k_m) (P_ref - P_bar)],
/// forward Euler. Returns the angle for the next sample and the frequency
/// applied over this one.
SyncOutput sync_step(ControllerState& state, double p_ref, double p_bar,
                     const ControllerParams& params, double dt);

/// QV proportional and PV proportional-integral droops on low-pass filtered
/// power feedback. The result is clamped to [0, v_ref_max]; the PV integrator
/// stops integrating in the clamped direction.
double voltage_ref_step(ControllerState& state, double v_ext, double q_ref, double q_bar,
                        double p_ref, double p_bar, const ControllerParams& params, double dt);

/// Alternating voltage controller producing the unmodified current reference
/// (dq). Also advances the PCC voltage feedforward filter; read the filtered
/// voltage back from `state.vpcc_filter.value()`.
SpaceVector avc_step(ControllerState& state, double p_ref, double q_ref, double v_ref,
                     SpaceVector v_pcc_dq, const ControllerParams& params, double dt);

/// Projects the current reference so that Re{v i*} >= p_min while keeping
/// Im{v i*}. Identity when the constraint holds or |v| <= v_floor.
[[nodiscard]] SpaceVector limit_reverse_power(SpaceVector i_ref0, SpaceVector v_pcc_f, double p_min,
                                              double v_floor);

/// Angle-preserving scaling onto |i| <= i_max.
[[nodiscard]] SpaceVector limit_current_magnitude(SpaceVector i_refr, double i_max);

[[nodiscard]] PowerPair virtual_power(SpaceVector v_pcc_s, SpaceVector i_ref0_s);

[[nodiscard]] FeedbackSignals select_feedback(const FeedbackConfig& cfg, PowerPair measured,
                                              PowerPair virt);

/// Stationary-frame proportional current control with PCC voltage and
/// filter-impedance feedforward:
/// v_ref = R_a (i_ref - i) + (R_f + j omega_1 L_f) i_ref + v_pcc,f.
[[nodiscard]] SpaceVector current_control(SpaceVector i_ref_s, SpaceVector i_s, SpaceVector v_pcc_f_s,
                                          const ControllerParams& params);

struct ControllerReferences {
    double p_ref = 0.0;
    double q_ref = 0.0;
    double v_ext = 0.0;
};

struct ControllerMeasurements {
    SpaceVector v_pcc_s{};
    SpaceVector i_s{};
};

/// One full control sample. The returned converter voltage is meant to be
/// applied one sample later for one sample period; it is advanced by the
/// corresponding rotation and clamped to the modulation limit.
const ControlSignals& controller_step(ControllerState& state, const ControllerReferences& refs,
                                      const ControllerMeasurements& meas, const ControllerParams& params,
                                      const FeedbackConfig& cfg);

/// Owning wrapper around the free functions above.
class Upsc {
public:
    Upsc(const ControllerParams& params, const FeedbackConfig& cfg);

    const ControlSignals& step(const ControllerReferences& refs, const ControllerMeasurements& meas) {
        return controller_step(state_, refs, meas, params_, cfg_);
    }

    [[nodiscard]] const ControllerParams& params() const { return params_; }
    [[nodiscard]] const FeedbackConfig& feedback() const { return cfg_; }
    [[nodiscard]] const ControllerState& state() const { return state_; }

    /// Largest magnitude across all states, used for divergence detection.
    [[nodiscard]] double max_state_magnitude() const;

private:
    ControllerParams params_;
    FeedbackConfig cfg_;
    ControllerState state_;
};

}  // namespace owfsim
