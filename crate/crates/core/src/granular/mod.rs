//! Force laws for rotating helical intruders in granular media.
//!
//! Everything here is a pure function of its inputs. Units at this boundary
//! are mm and mm/s for geometry and kinematics, rpm for rotation, N and N·m
//! for loads, and m for burial depth.

mod auger;
mod curves;
mod flow;
mod medium;
mod reduction;

pub use auger::{
    axial_advance_sign, slip_velocity, AugerSpec, AxialAdvance, Handedness, HelixCount, Rotation, RotationState,
};
pub use curves::{thrust_force, torque_estimate, ThrustCurve, TorqueCurve, TorqueSign};
pub use flow::{reynolds_number, FluidContext};
pub use medium::{static_resistance, GranularMedium, StaticDragModel};
pub use reduction::{reduction_factor, rotational_resistance, ReductionCurve};
