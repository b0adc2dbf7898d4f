pub mod asymptotics;
pub mod bootstrap_mc;
pub mod curve;
pub mod error;
pub mod estimators;
pub mod exact_enum;
pub mod nef;
pub mod numerics;
pub mod rng;
