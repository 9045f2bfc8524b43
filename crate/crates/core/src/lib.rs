pub mod circle;
pub mod dynamics;
pub mod error;
pub mod evalmap;
pub mod factorization;
pub mod plmap;
pub mod random;
pub mod report;
pub mod rational;
pub mod reversibility;
pub mod sampling;
pub mod stern_brocot;
