#pragma once

namespace shapelab {

/// Physical constants and integration step for the continuous plant.
/// The defaults keep the torque limit well below mass*gravity*length, so
/// swing-up requires energy pumping rather than a direct lift.
struct PendulumParams {
    double mass = 1.0;          // kg
    double gravity = 9.81;      // m/s^2
    double length = 1.0;        // m
    double dt = 0.05;           // s
    double torque_limit = 2.0;  // N*m
    double damping = 0.0;       // N*m*s/rad, viscous

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;
};

/// Pendulum state. theta is measured from upright (theta = 0 is the
/// inverted position) and is kept in [-pi, pi) by every operation that
/// returns a PendState.
struct PendState {
    double theta = 0.0;      // rad
    double theta_dot = 0.0;  // rad/s
};

/// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

/// One semi-implicit Euler step of
///   theta_ddot = (torque - damping*theta_dot + m*g*l*sin(theta)) / (m*l^2),
/// updating theta_dot first and then theta with the new theta_dot.
/// Gravity is destabilizing at theta = 0. Deterministic.
/// Throws std::domain_error if |torque| exceeds the torque limit, which
/// signals a misconfigured action grid.
PendState step_pendulum(const PendState& s, double torque, const PendulumParams& p);

/// Total mechanical energy E = 1/2 m l^2 theta_dot^2 + m g l cos(theta).
/// Upright rest gives exactly mass*gravity*length, the desired energy for
/// the swing-up task.
double energy(const PendState& s, const PendulumParams& p);

}  // namespace shapelab
