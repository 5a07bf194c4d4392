//! Remote-ID informed separation and reciprocal velocity obstacle navigation
//! for small UAVs.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`separation`] | airframe, GNSS-error and mobility distributions; uNMAC radii |
//! | [`remoteid`] | broadcast message formats, binary codec, safety-disk policies |
//! | [`rvo`] | VO / RVO constraints, velocity selection, chance-constraint estimator |
//! | [`sim`] | fleet generation, scenarios, step loop, MAC detection, Monte Carlo |
//! | [`config`] | experiment configuration file |
//! | [`analysis`] | separation-component tables |
//! | [`report`] | run reports and CSV output |

pub mod analysis;
pub mod config;
mod error;
pub mod geometry;
pub mod quad;
pub mod remoteid;
pub mod report;
pub mod rvo;
pub mod separation;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::Vec2;
