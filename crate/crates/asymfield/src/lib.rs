//! Spontaneous-emission rates and photon routing for point dipoles in
//! integrated photonic structures.
//!
//! A structure is a scattering network of directional couplers, propagation
//! segments and lumped reflectors ([`circuit`]). Exciting one external port
//! at a time and solving the resulting complex linear system ([`netsolver`])
//! yields the stationary field at the dipole for every radiative channel;
//! golden-rule prefactors ([`emission`]) turn those enhancements into
//! physical rates and port probabilities. Closed forms for the supported
//! topologies ([`analytic`]) double as an independent cross-check, wired
//! into reusable verification suites ([`selftest`]).

pub mod analytic;
pub mod circuit;
pub mod emission;
pub mod netsolver;
pub mod selftest;
