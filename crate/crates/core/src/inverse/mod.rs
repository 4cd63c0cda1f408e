//! Source recovery from noisy snapshots outside the transition layer.

pub mod band;
pub mod noise;
pub mod pipeline;
pub mod reconstruct;
pub mod region;
pub mod smoothing;

pub use band::{layer_band, LayerBand, MaskMode};
pub use noise::{add_noise, NoiseKind, NoiseSource, PRNG_NAME};
pub use pipeline::{
    median, restrict, run_aer_pipeline, smooth_region, AerConfig, AerMetrics, AerOutcome, Branch,
    Observation, Pipeline, SmoothingResult,
};
pub use reconstruct::{
    grid_gradients, pre_approximate_from_fields, pre_approximate_source, reconstruct_source,
    source_product, ReconstructOptions, ReconstructionResult, EPS_FLOOR,
};
pub use region::Region;
pub use smoothing::{smooth_values, EpsRule, RegionFit, SmoothingOptions};
