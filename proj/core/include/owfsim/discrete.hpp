#pragma once

namespace owfsim {

/// First-order low-pass alpha/(s + alpha) discretized with the bilinear
/// (Tustin) transform, so the DC gain is exactly one.
template <typename T>
class TustinLowPass {
public:
    TustinLowPass() = default;

    /// `alpha_rad_s` is the bandwidth in rad/s, `dt` the sample period in s.
    TustinLowPass(double alpha_rad_s, double dt) {
        const double a = alpha_rad_s * dt;
        pole_ = (2.0 - a) / (2.0 + a);
        gain_ = a / (2.0 + a);
    }

    /// Sets output and stored input so that a constant `value` is an equilibrium.
    void reset(T value) {
        y_ = value;
        u_prev_ = value;
    }

    T step(T u) {
        y_ = pole_ * y_ + gain_ * (u + u_prev_);
        u_prev_ = u;
        return y_;
    }

    [[nodiscard]] T value() const { return y_; }

private:
    double pole_ = 1.0;
    double gain_ = 0.0;
    T y_{};
    T u_prev_{};
};

}  // namespace owfsim
