//! Design, simulation, calibration, and fabrication export for
//! geometry-based pneumatic actuators: fabric actuators whose inflated
//! shape is set by heat-sealed chamber geometry plus constraint layers.
//!
//! The crate is organized around the workflow:
//!
//! - [`actuator`] / [`chain`] — planar link/joint chains and validated
//!   actuator descriptions;
//! - [`kinematics`] — the affine initial→inflated angle map, contraction
//!   factor, chamber-state resolution, and inflated poses;
//! - [`moment`] — the virtual-work torque model over the two-arc lens
//!   cross-section, plus sweep emulation;
//! - [`calibrate`] — least-squares fitters, filtering, step metrics;
//! - [`fabricate`] — inverse design, flat seal patterns, SVG and G-code
//!   export;
//! - [`control`] — pressure ramps, haptic force mapping, the UDP force
//!   datagram codec, and gait programs;
//! - [`gait`] — the quasi-static crawler simulator and its metrics;
//! - [`config`] — the JSON project document tying it all together.
//!
//! Everything is pure and deterministic: the same inputs always produce
//! bit-identical outputs, and all values are immutable after
//! construction, so the library is safe to use concurrently.

pub mod actuator;
pub mod angle;
pub mod calibrate;
pub mod chain;
pub mod config;
pub mod control;
pub mod fabricate;
pub mod gait;
pub mod geom;
pub mod kinematics;
mod linalg;
pub mod moment;
