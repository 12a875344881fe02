//! Shared numerical machinery: Gauss–Legendre rules, adaptive
//! Gauss–Kronrod quadrature, and Chebyshev proxies.

pub mod adaptive;
pub mod chebyshev;
pub mod gauss;

pub use adaptive::{integrate, integrate_with, QuadResult, QuadTarget};
pub use chebyshev::Chebyshev;
pub use gauss::gauss_legendre;
