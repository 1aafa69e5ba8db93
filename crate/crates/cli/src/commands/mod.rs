pub mod metrics;
pub mod moran;
pub mod report;
pub mod synth;
pub mod tournament;
pub mod validate;
