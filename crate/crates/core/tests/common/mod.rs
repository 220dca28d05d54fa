#![allow(dead_code)]

pub mod fixtures;
pub mod k_oracle;
pub mod lp_oracle;
pub mod rng;
