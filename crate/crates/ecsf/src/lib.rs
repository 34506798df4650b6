//! Equivariant curve shortening flow of figure-eight profile curves.
//!
//! Rotationally equivariant Lagrangian submanifolds of complex Euclidean
//! space are determined by a planar profile curve, and their mean curvature
//! flow reduces to the equivariant curve shortening flow
//! `dz/dt = -(k + (m-1) p) nu` of that curve. For the Whitney sphere the
//! profile curve is a figure eight, and the flow drives it into a type-II
//! singularity whose parabolic rescalings approach a grim reaper.
//!
//! This crate simulates that flow at desk scale and verifies the geometric
//! identities, monotone and conserved quantities, and the blow-up behaviour
//! along the way:
//!
//! * [`curve`] — discrete profile curves and pointwise geometry (k, p, h,
//!   |A|^2, Ricci eigenvalues, radial derivatives);
//! * [`seeds`] — figure-eight, perturbed and circle seeds plus the Ricci
//!   positivity validation;
//! * [`flow`] — the explicit integrator with arc-length redistribution and
//!   adaptive time steps;
//! * [`monitors`] — opening angle, enclosed area, conserved integrals and
//!   the verdict checker for a completed run;
//! * [`blowup`] — parabolic rescaling frames, type classification and the
//!   grim-reaper translator fit;
//! * [`config`], [`io`], [`plot`], [`pipeline`] — configuration, artifact
//!   formats, SVG emission and the end-to-end pipeline behind the CLI.
//!
//! The `examples/` directory demonstrates each capability as a runnable
//! program; `ecsf` (the single binary) exposes the same stages as
//! subcommands.

pub mod blowup;
pub mod config;
pub mod curve;
pub mod error;
pub mod flow;
pub mod geom;
pub mod io;
pub mod monitors;
pub mod pipeline;
pub mod plot;
pub mod seeds;

pub use error::{Error, Result};
pub use geom::Vec2;
