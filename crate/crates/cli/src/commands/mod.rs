pub mod ablate;
pub mod eval;
pub mod mix;
pub mod pair;
pub mod postprocess;
pub mod synth;
pub mod train;
