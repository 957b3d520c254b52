pub mod ck;
pub mod figure;
pub mod riesz;
pub mod sums;
pub mod verify;
