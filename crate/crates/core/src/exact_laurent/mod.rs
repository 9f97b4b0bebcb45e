//! Exact scalars, multivariate Laurent polynomials, rational functions with
//! hyperplane poles, and region-wise series expansion.

pub mod poly;
pub mod rational;
pub mod scalar;

pub use poly::{names, series_match, CertifiedSeries, Coeff, Exponents, Laurent, LaurentPoly, MatchReport, Window};
pub use rational::{expand_rational, iterate_var_names, taylor_shift_rational, RationalFn, Region, RegionKind};
pub use scalar::Scalar;
