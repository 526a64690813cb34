//! Library for comparing a human-curated encyclopedia corpus with a
//! generative-mediated counterpart.
//!
//! The modules follow the pipeline stages:
//!
//! * [`ingest`] parses snapshots and dumps and pairs pages across platforms.
//! * [`features`] turns raw activity counts into ordinal levels and
//!   concentration statistics.
//! * [`glm`] fits the inclusion and rewrite logistic models.
//! * [`complexity`] runs the fitness–complexity recursion on editor–page
//!   matrices.
//! * [`narrative`] builds signed narrative multigraphs and sentiment balances.
//! * [`framing`] scores lead sections through a structured-output LLM.
//! * [`stats`] holds the shared rank-correlation code.
//! * [`synth`] generates seeded synthetic data for tests and demos.

pub mod complexity;
pub mod error;
pub mod features;
pub mod framing;
pub mod glm;
pub mod html;
pub mod ingest;
pub mod narrative;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
