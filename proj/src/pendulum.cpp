#include "shapelab/pendulum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace shapelab {

void PendulumParams::validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("pendulum: mass must be > 0");
    if (!(gravity > 0.0)) throw std::invalid_argument("pendulum: gravity must be > 0");
    if (!(length > 0.0)) throw std::invalid_argument("pendulum: length must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("pendulum: dt must be > 0");
    if (!(torque_limit > 0.0)) throw std::invalid_argument("pendulum: torque_limit must be > 0");
    if (!(damping >= 0.0)) throw std::invalid_argument("pendulum: damping must be >= 0");
}

double wrap_angle(double theta) {
    double w = std::remainder(theta, 2.0 * std::numbers::pi);
    // remainder returns values in [-pi, pi]; fold the +pi endpoint.
    if (w >= std::numbers::pi) w -= 2.0 * std::numbers::pi;
    return w;
}

PendState step_pendulum(const PendState& s, double torque, const PendulumParams& p) {
    if (std::abs(torque) > p.torque_limit) {
        throw std::domain_error("step_pendulum: torque " + std::to_string(torque) +
                                " outside +-" + std::to_string(p.torque_limit));
    }
    const double inertia = p.mass * p.length * p.length;
    const double accel =
        (torque - p.damping * s.theta_dot + p.mass * p.gravity * p.length * std::sin(s.theta)) /
        inertia;
    PendState next;
    next.theta_dot = s.theta_dot + p.dt * accel;
    next.theta = wrap_angle(s.theta + p.dt * next.theta_dot);
    return next;
}

double energy(const PendState& s, const PendulumParams& p) {
    const double kinetic = 0.5 * p.mass * p.length * p.length * s.theta_dot * s.theta_dot;
    const double potential = p.mass * p.gravity * p.length * std::cos(s.theta);
    return kinetic + potential;
}

}  // namespace shapelab
