//! Reference implementations kept deliberately apart from `kinetiq`, so
//! tests can check the engine against code that shares none of its logic.

pub mod oracle;
pub mod scanline;
