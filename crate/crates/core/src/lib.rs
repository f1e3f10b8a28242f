//! Visual realism assessment (VRA) for face-swap videos.
//!
//! The pipeline mirrors classical no-reference video quality assessment:
//!
//! 1. [`preprocess`]: one stable face crop per target video;
//! 2. [`handcrafted`]: per-frame BRISQUE / GM-LOG features (deep features are
//!    ingested through the same frame-feature CSV format);
//! 3. [`fusion`]: mean and standard-deviation pooling into video features;
//! 4. [`selection`]: two-stage linear-SVR feature selection for wide features;
//! 5. [`svr`]: epsilon-SVR regression of mean opinion scores;
//! 6. [`evaluation`]: SRCC / PLCC / RMSE under grouped split protocols.
//!
//! The accompanying book (`book/`) walks through each stage; its code
//! listings are compiled and run as doctests of this crate.

pub mod datamodel;
pub mod evaluation;
pub mod fusion;
pub mod handcrafted;
pub mod preprocess;
pub mod rng;
pub mod selection;
pub mod svr;
pub mod synth;

#[cfg(doctest)]
mod book;
