//! Decision-variable hierarchies of a few classic optimal control problems.
#![allow(non_snake_case)]

use crate::variable::{Hierarchy, VarError};
use crate::variables;

/// Quadrotor (or any multirotor): `N + 1` rigid-body states and `N` inputs of
/// `rotors` rotor speeds each.
pub fn multirotor(N: usize, rotors: usize) -> Result<Hierarchy, VarError> {
    variables! {
        position: 3;
        orientation: Q;
        linear_velocity: 3;
        angular_velocity: 3;
        rotor_speed: 1;
        x <<= (position, orientation, linear_velocity, angular_velocity);
        X <<= (N + 1) * x;
        u <<= rotors * rotor_speed;
        U <<= N * u;
        decision_variables <<= (X, U);
    }
    decision_variables.build()
}

/// The four-rotor quadrotor hierarchy.
pub fn quadrotor(N: usize) -> Result<Hierarchy, VarError> {
    multirotor(N, 4)
}

/// Quadrupedal locomotion with a single-rigid-body model: every leg gets a
/// contact force and a foot position relative to the body.
pub fn locomotion(N: usize, legs: usize) -> Result<Hierarchy, VarError> {
    variables! {
        position: 3;
        orientation: Q;
        linear_velocity: 3;
        angular_velocity: 3;
        force: 3;
        relative_position: 3;
        leg_input <<= (force, relative_position);
        x <<= (position, orientation, linear_velocity, angular_velocity);
        X <<= (N + 1) * x;
        u <<= legs * leg_input;
        U <<= N * u;
        decision_variables <<= (X, U);
    }
    decision_variables.build()
}

/// Several one-armed quadrupeds carrying a shared payload. Rigid-body leaves
/// appear under both the payload and every robot.
pub fn loco_manipulation(N: usize, robots: usize, legs: usize) -> Result<Hierarchy, VarError> {
    variables! {
        position: 3;
        orientation: Q;
        linear_velocity: 3;
        angular_velocity: 3;
        force: 3;
        relative_position: 3;
        torque: 3;
        leg_input <<= (force, relative_position);
        arm_input <<= (force, torque);
        robot_input <<= (legs * leg_input, arm_input);
        payload_state <<= (position, orientation, linear_velocity, angular_velocity);
        robot_state <<= (position, orientation, linear_velocity, angular_velocity);
        x <<= (payload_state, robots * robot_state);
        X <<= (N + 1) * x;
        u <<= robots * robot_input;
        U <<= N * u;
        decision_variables <<= (X, U);
    }
    decision_variables.build()
}
