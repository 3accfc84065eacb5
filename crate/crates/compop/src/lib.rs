//! # compop — composition operators on the Hardy space of Dirichlet series
//!
//! A numerical laboratory for the operators `C_φ : f ↦ f ∘ φ` acting on the
//! Hilbert space ℋ² of Dirichlet series `Σ bₙ n^{-s}` with square-summable
//! coefficients.  The admissible symbols have the form `φ(s) = c₀ s + ψ(s)`
//! with `c₀` a nonnegative integer and `ψ` a Dirichlet polynomial.
//!
//! The crate is organised in layers, each usable on its own:
//!
//! * [`poly`] — exact-as-possible arithmetic on truncated Dirichlet
//!   polynomials (multiplication, truncated exponential, evaluation), with
//!   arbitrary-precision integer frequencies.
//! * [`zeta`] — the real-argument Riemann zeta function to absolute
//!   accuracy `1e-12`, the normalising constant behind every reproducing
//!   kernel norm.
//! * [`symbol`] — symbol validation (boundedness of `C_φ`), the κ
//!   functional, fixed points, Bohr lifts, and the reduction of linear
//!   symbols to real coefficients.
//! * [`la`] — thin, safe wrappers over LAPACK factorizations (SVD,
//!   eigenvalues, Hermitian generalized eigenvalues) on an owned
//!   column-major matrix type.
//! * [`operator`] — truncated matrices of `C_φ` in the basis `n^{-s}`,
//!   their singular values / eigenvalues, Hilbert–Schmidt norms, and decay
//!   fits.
//! * [`kernel`] — reproducing-kernel machinery: inner products of kernels
//!   at half-plane or polydisc points, Bernstein-type lower bounds for
//!   approximation numbers from preimage systems, and the two point-grid
//!   constructions the lower bounds feed on.
//! * [`carleson`] — pseudo-hyperbolic geometry, separation and Carleson
//!   box statistics of pullback measures (Monte Carlo), interpolation
//!   bound formulas, and Blaschke-product upper bounds.
//! * [`transfer`] — transference of composition operators on the unit
//!   disc to Dirichlet-series symbols through the Cayley-type change of
//!   variables, with two-sided norm comparisons.
//!
//! All computations are deterministic: random sampling uses an explicit
//! counter-based generator seeded by the caller, and no operation spawns
//! threads or reads ambient state.

pub mod carleson;
pub mod error;
pub mod kernel;
pub mod la;
pub mod operator;
pub mod poly;
pub mod symbol;
pub mod transfer;
pub mod zeta;

pub use carleson::{
    blaschke_eval, box_norm, crude_delta_bound, pseudo_distance, pullback_profile,
    secondlem_formula, separation, shapiro_shields_bounds, upper_bound_a, CarlesonSquare,
    CrudeDeltaBound, FinitePointMeasure, MonteCarloSettings, ProfileRow, PullbackProfile,
    ShapiroShieldsBounds, UpperBoundA,
};
pub use error::{Error, Result};
pub use transfer::{
    disc_composition_matrix, map_i, mobius_t, transfer_symbol, verify_transfer_inequality,
    DiscSelfMap, TransferReport, TransferredSymbol,
};
pub use kernel::{
    bernstein_lower_bound, grid_section8, horizontal_chain, kernel_inner, BernsteinBound,
    HorizontalChain, KernelPoint, PointConfiguration, Section8Grid,
};
pub use poly::{Cutoff, DirichletPoly};
pub use symbol::{BohrLift, LinearSymbol, Symbol, ValidationVerdict};
pub use zeta::zeta_real;
