pub mod analytic;
pub mod entangled;
pub mod fringes;
pub mod scaling;
