//! Shared fixtures for the estimator benchmarks.

use multifract::synth::{generate, GeneratorModel, GeneratorSpec};
use multifract::TimeSeries;

pub fn white_noise(length: usize, seed: u64) -> TimeSeries {
    generate(&GeneratorSpec {
        model: GeneratorModel::GaussianWhite,
        length,
        seed,
    })
    .expect("valid spec")
    .series
}

pub fn cascade(depth: u32, seed: u64) -> multifract::synth::Generated {
    generate(&GeneratorSpec {
        model: GeneratorModel::BinomialCascade { a: 0.6, depth },
        length: 1 << depth,
        seed,
    })
    .expect("valid spec")
}
