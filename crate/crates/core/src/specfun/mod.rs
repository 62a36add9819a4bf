//! Special functions: Airy, Hastings–McLeod and the outlier Airy functions.

pub mod airy;
pub mod contour;
pub mod outlier;
pub mod painleve;

pub use airy::{ai, airy, airy_tail_integral};
pub use contour::{contour_quadrature, ContourPath};
pub use outlier::{outlier_airy, outlier_airy_pair, OutlierAirySpec, Sign};
pub use painleve::{hastings_mcleod, PainleveIISolution};
