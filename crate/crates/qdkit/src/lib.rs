//! Numerical toolkit for quadrature domains, anti-holomorphic fixed points,
//! extreme univalent polynomials and the droplet constructions built on them.

pub mod construct;
pub mod curvegeo;
pub mod error;
pub mod inscribe;
pub mod lenssolve;
pub mod numerics;
pub mod par;
pub mod planecurve;
pub mod quadcheck;
pub mod ratfun;
pub mod suffridge;
pub mod svg;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
