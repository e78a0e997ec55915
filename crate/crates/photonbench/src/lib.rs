//! Computational workbench for a hybrid photonic single-photon platform:
//! an InP nanobeam carrying a quantum emitter, coupled through an adiabatic
//! taper onto a thin-film lithium-niobate strip with a Bragg back-mirror
//! and a grating out-coupler.
//!
//! The crate is organized bottom-up: [`units`] and [`geometry`] define the
//! stack and plan-view device, [`modesolver`] reduces vertical stacks to
//! effective indices and solves lateral modes, [`fdtd`] propagates fields
//! on a 2D Yee grid, [`experiments`] runs the device studies, and
//! [`photonstats`] simulates and analyzes the photon-correlation side.

pub mod experiments;
pub mod fdtd;
pub mod geometry;
pub mod modesolver;
pub mod photonstats;
pub mod units;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
