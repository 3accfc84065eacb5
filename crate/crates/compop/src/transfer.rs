//! Transference between the unit disc and the Dirichlet half-plane.
//!
//! The Möbius map `T(z) = 1/2 + (1 − z)/(1 + z)` sends the unit disc
//! onto the half-plane `Re s > 1/2`, and `I(s) = 2^{-s}` sends
//! `Re s > 0` into the punctured disc.  Sandwiching a disc self-map `ω`
//! between them produces a Dirichlet-series symbol
//!
//! ```text
//!     φ = T ∘ ω ∘ I,      φ(s) = 1/2 + h(2^{-s}),
//!     h(w) = (1 − ω(w)) / (1 + ω(w)),
//! ```
//!
//! whose composition operator factors as `C_φ = C_I ∘ C_ω ∘ C_T`, with
//! `C_T` read as mapping the Dirichlet-series space into the disc Hardy
//! space (the only direction in which the three factors compose).
//! Approximation numbers are submultiplicative along the factorization,
//! so the disc operator's decay transfers to the Dirichlet side:
//! `a_n(C_φ) ≤ ‖C_T‖ · a_n(C_ω)`.
//!
//! The module provides the two coordinate maps ([`mobius_t`],
//! [`map_i`]), certified power-series self-maps ([`DiscSelfMap`]), the
//! series construction of `φ` ([`transfer_symbol`], producing a symbol
//! supported on the frequencies `2^k`), the disc-side composition
//! matrix in the monomial basis ([`disc_composition_matrix`]), and an
//! end-to-end comparison of the two approximation-number sequences
//! ([`verify_transfer_inequality`]).  The transfer norm `‖C_T‖` has no
//! closed form, so the verification reports empirical ratios rather
//! than certifying the inequality.
//!
//! Certification of `ω` is by sampling: the supremum of `|ω|` and the
//! minimum of `|1 − ω|` are taken over a radial grid of the disc of
//! radius [`DiscSelfMap::grid_radius`].  Between grid nodes and beyond
//! the grid radius nothing is checked — the certificate is honest about
//! being a sampling statement, not a proof.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::la::{self, ComplexMatrix};
use crate::operator::{self, DecayFit};
use crate::poly::{Cutoff, DirichletPoly};
use crate::symbol::Symbol;

/// Smallest admissible distance `min |1 − ω|` on the verification grid.
/// Below this the symbol construction refuses to run: the image hugs
/// the point `1`, where the transferred symbol loses its margin to the
/// boundary line `Re s = 1/2`.
pub const CERTIFICATION_MARGIN: f64 = 1e-3;

/// The series-division growth guard: coefficient `k` of the divided
/// series may not exceed `10 · (1/grid_radius)^k`.  Inside the
/// certified radius the true coefficients obey a Cauchy bound of this
/// shape, so a violation means the division is amplifying rounding
/// noise instead of converging.
pub const SERIES_GROWTH_GUARD_FACTOR: f64 = 10.0;

/// Frequency cutoff exponent used by [`verify_transfer_inequality`]:
/// the transferred symbol keeps frequencies up to `2^24`.  Dropped
/// terms could only reach the operator through matrix rows at
/// frequencies beyond `2^24`, far outside any row range the assembler
/// retains, so the comparison sees an exact compression.
pub const VERIFY_CUTOFF_EXPONENT: usize = 24;

/// Bounds on the certification grid parameter: `grid_points = k` means
/// `k` radii times `k` angles.
pub const MIN_GRID_POINTS: usize = 8;
/// Upper bound on `grid_points` (the grid has `k²` nodes).
pub const MAX_GRID_POINTS: usize = 2048;

/// Relative noise floor below which a disc-side singular value is
/// treated as an exact zero when forming per-index ratios.
const RATIO_FLOOR: f64 = 1e-13;

/// A self-map of the unit disc given as a truncated power series
/// `ω(z) = Σ_{k≤K} a_k z^k`, certified by sampling.
///
/// Construction evaluates `ω` on a radial grid — `grid_points` radii
/// `ρ_i = grid_radius · i / grid_points` times `grid_points` equispaced
/// angles — and records the supremum of `|ω|` (must be `< 1`; the map
/// would otherwise leave the disc) and the minimum of `|1 − ω|` (the
/// margin consumed by [`transfer_symbol`]).
///
/// Serialization uses the spec shape
/// `{ "taylor": [[re, im], …], "grid_radius": r, "grid_points": k }`;
/// deserialization re-runs the certification, so a stored map cannot
/// smuggle in stale bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "DiscSelfMapRepr", try_from = "DiscSelfMapRepr")]
pub struct DiscSelfMap {
    taylor: Vec<Complex64>,
    grid_radius: f64,
    grid_points: usize,
    certified_bound: f64,
    one_margin: f64,
}

/// Serialized shape of [`DiscSelfMap`].
#[derive(Serialize, Deserialize)]
struct DiscSelfMapRepr {
    taylor: Vec<(f64, f64)>,
    grid_radius: f64,
    grid_points: usize,
}

impl From<DiscSelfMap> for DiscSelfMapRepr {
    fn from(map: DiscSelfMap) -> DiscSelfMapRepr {
        DiscSelfMapRepr {
            taylor: map.taylor.iter().map(|c| (c.re, c.im)).collect(),
            grid_radius: map.grid_radius,
            grid_points: map.grid_points,
        }
    }
}

impl TryFrom<DiscSelfMapRepr> for DiscSelfMap {
    type Error = Error;

    fn try_from(repr: DiscSelfMapRepr) -> Result<DiscSelfMap> {
        DiscSelfMap::new(
            repr.taylor
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
            repr.grid_radius,
            repr.grid_points,
        )
    }
}

impl DiscSelfMap {
    /// Certifies `ω(z) = Σ a_k z^k` on the radial grid described on the
    /// type.  The empty coefficient list is the zero map.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInput`] if a coefficient is not finite, the
    /// grid parameters are out of range (`0 < grid_radius < 1`,
    /// [`MIN_GRID_POINTS`]` ≤ grid_points ≤ `[`MAX_GRID_POINTS`]), or
    /// the sampled supremum of `|ω|` reaches `1` (not a self-map).
    pub fn new(
        taylor: Vec<Complex64>,
        grid_radius: f64,
        grid_points: usize,
    ) -> Result<DiscSelfMap> {
        if taylor.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedInput {
                what: "disc self-map",
                detail: "non-finite Taylor coefficient".into(),
            });
        }
        if !(grid_radius.is_finite() && grid_radius > 0.0 && grid_radius < 1.0) {
            return Err(Error::MalformedInput {
                what: "disc self-map",
                detail: format!("grid_radius must lie in (0, 1), got {grid_radius}"),
            });
        }
        if !(MIN_GRID_POINTS..=MAX_GRID_POINTS).contains(&grid_points) {
            return Err(Error::MalformedInput {
                what: "disc self-map",
                detail: format!(
                    "grid_points must lie in [{MIN_GRID_POINTS}, {MAX_GRID_POINTS}], got {grid_points}"
                ),
            });
        }

        let mut map = DiscSelfMap {
            taylor,
            grid_radius,
            grid_points,
            certified_bound: 0.0,
            one_margin: f64::INFINITY,
        };
        let one = Complex64::new(1.0, 0.0);
        for i in 1..=grid_points {
            let radius = grid_radius * i as f64 / grid_points as f64;
            for j in 0..grid_points {
                let angle = std::f64::consts::TAU * j as f64 / grid_points as f64;
                let value = map.eval(Complex64::from_polar(radius, angle));
                map.certified_bound = map.certified_bound.max(value.norm());
                map.one_margin = map.one_margin.min((one - value).norm());
            }
        }
        // ω(0) = a₀ belongs to the closure of the sampled values.
        map.certified_bound = map.certified_bound.max(map.a0().norm());
        map.one_margin = map.one_margin.min((one - map.a0()).norm());

        if map.certified_bound >= 1.0 {
            return Err(Error::MalformedInput {
                what: "disc self-map",
                detail: format!(
                    "sup |ω| = {} on the verification grid; a self-map needs < 1",
                    map.certified_bound
                ),
            });
        }
        Ok(map)
    }

    /// Evaluates `ω(z)` by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.taylor.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    /// The Taylor coefficients `a_0, …, a_K` as supplied.
    pub fn taylor(&self) -> &[Complex64] {
        &self.taylor
    }

    /// `a_k`, with coefficients beyond the truncation read as zero.
    fn coefficient(&self, k: usize) -> Complex64 {
        self.taylor.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `ω(0) = a₀`.
    pub fn a0(&self) -> Complex64 {
        self.coefficient(0)
    }

    /// Truncation order `K` (degree of the stored polynomial).
    pub fn order(&self) -> usize {
        self.taylor.len().saturating_sub(1)
    }

    /// Radius of the certification grid.
    pub fn grid_radius(&self) -> f64 {
        self.grid_radius
    }

    /// Grid resolution (radii × angles each equal to this).
    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    /// Sampled supremum of `|ω|` (strictly below `1`).
    pub fn certified_bound(&self) -> f64 {
        self.certified_bound
    }

    /// Sampled minimum of `|1 − ω|`.
    pub fn one_margin(&self) -> f64 {
        self.one_margin
    }
}

/// The Möbius map `T(z) = 1/2 + (1 − z)/(1 + z)` of the unit disc onto
/// the half-plane `Re s > 1/2`.  `T(0) = 3/2`, `T(1) = 1/2`.
///
/// # Errors
///
/// [`Error::MalformedInput`] at the pole `z = −1`.
pub fn mobius_t(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(-1.0, 0.0) {
        return Err(Error::MalformedInput {
            what: "Möbius argument",
            detail: "z = −1 is the pole of T".into(),
        });
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(Complex64::new(0.5, 0.0) + (one - z) / (one + z))
}

/// The exponential `I(s) = 2^{-s}`, mapping `Re s > 0` into the
/// punctured unit disc.  `I(1) = 1/2`.
pub fn map_i(s: Complex64) -> Complex64 {
    (-s * std::f64::consts::LN_2).exp()
}

/// A Dirichlet-series symbol produced by [`transfer_symbol`]: the
/// composition `φ = T ∘ ω ∘ I`, supported on the frequencies `2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferredSymbol {
    symbol: Symbol,
    h: Vec<Complex64>,
    source: DiscSelfMap,
    cutoff_exponent: usize,
    sup_h_grid: f64,
}

impl TransferredSymbol {
    /// The symbol `φ(s) = (1/2 + h₀) · 1^{-s} + Σ_{k≥1} h_k (2^k)^{-s}`
    /// with `c₀ = 0`.
    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    /// The divided-series coefficients `h_0, …, h_cutoff`.
    pub fn h_coefficients(&self) -> &[Complex64] {
        &self.h
    }

    /// The certified map the symbol was built from.
    pub fn source(&self) -> &DiscSelfMap {
        &self.source
    }

    /// Frequency cutoff exponent: frequencies kept up to `2^cutoff`.
    pub fn cutoff_exponent(&self) -> usize {
        self.cutoff_exponent
    }

    /// Sampled supremum of `|h|` on the certification circle
    /// `|w| = grid_radius` (the constant of the tail bound).
    pub fn sup_h_grid(&self) -> f64 {
        self.sup_h_grid
    }

    /// Cauchy tail bound for the dropped frequencies at evaluation
    /// radius `|2^{-s}| = u`: on the certified circle of radius `r`,
    /// `|h_k| ≤ sup|h| / r^k`, so
    /// `Σ_{k > cutoff} |h_k| u^k ≤ sup|h| · (u/r)^{cutoff+1} / (1 − u/r)`.
    ///
    /// # Panics
    ///
    /// Panics unless `0 ≤ u < grid_radius` (beyond the certified circle
    /// no bound is claimed).
    pub fn tail_bound(&self, u: f64) -> f64 {
        let r = self.source.grid_radius();
        assert!(
            (0.0..r).contains(&u),
            "tail bound is only certified for 0 ≤ u < {r}, got {u}"
        );
        let q = u / r;
        self.sup_h_grid * q.powi(self.cutoff_exponent as i32 + 1) / (1.0 - q)
    }
}

/// Builds the transferred symbol `φ = T ∘ ω ∘ I` up to frequency
/// `2^cutoff_exponent`.
///
/// The series `h(w) = (1 − ω(w))/(1 + ω(w))` is computed by long
/// division: `h₀ = (1 − a₀)/(1 + a₀)` and
/// `h_k = (−a_k − Σ_{i=1}^{k} a_i h_{k−i})/(1 + a₀)`.  Each coefficient
/// is checked against the Cauchy-shaped growth guard
/// `10 · (1/grid_radius)^k`; a violation aborts the division rather
/// than emitting garbage.  Zero coefficients are dropped, so the symbol
/// support is exactly the powers of two that actually occur.
///
/// # Errors
///
/// * [`Error::DiscMapNotCertified`] if the map's sampled `min |1 − ω|`
///   is below [`CERTIFICATION_MARGIN`];
/// * [`Error::TransferSeriesUnstable`] if a divided coefficient breaks
///   the growth guard (index `0` reports a non-finite leading term,
///   i.e. `1 + a₀ = 0`).
///
/// # Panics
///
/// Panics if `cutoff_exponent` is `0`.
pub fn transfer_symbol(
    omega: &DiscSelfMap,
    cutoff_exponent: usize,
) -> Result<TransferredSymbol> {
    assert!(cutoff_exponent >= 1, "need at least frequency 2^1");
    if omega.one_margin() < CERTIFICATION_MARGIN {
        return Err(Error::DiscMapNotCertified {
            margin: omega.one_margin(),
        });
    }

    let one = Complex64::new(1.0, 0.0);
    let lead = one + omega.a0();
    let h0 = (one - omega.a0()) / lead;
    if !h0.is_finite() {
        return Err(Error::TransferSeriesUnstable {
            index: 0,
            magnitude: h0.norm(),
            guard: SERIES_GROWTH_GUARD_FACTOR,
        });
    }
    let mut h = vec![h0];
    for k in 1..=cutoff_exponent {
        let mut acc = -omega.coefficient(k);
        for i in 1..=k.min(omega.taylor.len().saturating_sub(1)) {
            acc -= omega.coefficient(i) * h[k - i];
        }
        let hk = acc / lead;
        let guard = SERIES_GROWTH_GUARD_FACTOR * omega.grid_radius().powi(-(k as i32));
        if !(hk.norm() <= guard) {
            return Err(Error::TransferSeriesUnstable {
                index: k,
                magnitude: hk.norm(),
                guard,
            });
        }
        h.push(hk);
    }

    // sup |h| on the certification circle, for the reported tail bound.
    let mut sup_h_grid = 0.0f64;
    for j in 0..omega.grid_points() {
        let angle = std::f64::consts::TAU * j as f64 / omega.grid_points() as f64;
        let w = omega.eval(Complex64::from_polar(omega.grid_radius(), angle));
        sup_h_grid = sup_h_grid.max(((one - w) / (one + w)).norm());
    }

    let mut psi = DirichletPoly::zero(Cutoff::Frequency(BigUint::one() << cutoff_exponent));
    psi.add_term(BigUint::one(), Complex64::new(0.5, 0.0) + h[0]);
    for (k, coeff) in h.iter().enumerate().skip(1) {
        if coeff.norm() > 0.0 {
            psi.add_term(BigUint::one() << k, *coeff);
        }
    }

    Ok(TransferredSymbol {
        symbol: Symbol::new(0, psi),
        h,
        source: omega.clone(),
        cutoff_exponent,
        sup_h_grid,
    })
}

/// The `n × n` truncation of the disc composition operator
/// `C_ω f = f ∘ ω` in the monomial basis of the disc Hardy space:
/// column `m` holds the coefficients of `ω(z)^m` through degree
/// `n − 1`.  For `ω(z) = r z` the matrix is exactly
/// `diag(1, r, r², …)`.
///
/// # Panics
///
/// Panics if `n` is `0`.
pub fn disc_composition_matrix(omega: &DiscSelfMap, n: usize) -> ComplexMatrix {
    assert!(n >= 1, "need at least one basis monomial");
    let zero = Complex64::new(0.0, 0.0);
    let mut matrix = ComplexMatrix::zeros(n, n);
    let mut power = vec![zero; n];
    power[0] = Complex64::new(1.0, 0.0);
    matrix.set(0, 0, power[0]);
    for m in 1..n {
        let mut next = vec![zero; n];
        for (i, p) in power.iter().enumerate() {
            if p.norm_sqr() == 0.0 {
                continue;
            }
            for (l, a) in omega.taylor.iter().enumerate() {
                if i + l < n {
                    next[i + l] += p * a;
                }
            }
        }
        power = next;
        for (i, p) in power.iter().enumerate() {
            matrix.set(i, m, *p);
        }
    }
    matrix
}

/// Side-by-side approximation numbers of a transferred operator and its
/// disc-side source, from [`verify_transfer_inequality`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport {
    /// `a_1, …, a_N` of the transferred operator's `N`-column
    /// truncation (zero-padded past the truncation rank).
    pub transferred: Vec<f64>,
    /// `a_1, …, a_N` of the disc operator's `N × N` truncation.
    pub disc: Vec<f64>,
    /// Per-index quotients `a_n(C_φ)/a_n(C_ω)`, over the leading range
    /// where the disc values sit above the noise floor.
    pub ratios: Vec<f64>,
    /// Decay-law fits of the transferred sequence (absent when the fit
    /// window has fewer than four positive values, e.g. finite rank).
    pub transferred_fit: Option<DecayFit>,
    /// Decay-law fits of the disc sequence (same caveat).
    pub disc_fit: Option<DecayFit>,
    /// Frequency cutoff exponent of the transferred symbol.
    pub cutoff_exponent: usize,
}

/// Assembles the transferred operator of `omega` with `n` columns,
/// computes both singular-value sequences — Dirichlet side via the
/// matrix assembler, disc side via [`disc_composition_matrix`] — and
/// reports per-index ratios plus geometric/power decay fits of both
/// over the window `[2, max(n/2, 5)]`.  The transfer inequality
/// predicts the ratio sequence stays bounded; the report leaves the
/// judgement to the caller since the transfer norm has no closed form.
///
/// The comparison is conservative by construction: the transferred
/// symbol lives on the frequencies `2^k`, so only `⌊log₂ n⌋ + 1` of
/// the `n` retained columns feed its dominant block, and the
/// Dirichlet-side values beyond roughly that rank are starved by the
/// compression.  Starved values only shrink the ratios, never inflate
/// them, so a bounded report remains valid evidence — but the fitted
/// decay rates describe the truncation, not the operator's asymptotic
/// law, once the window crosses the rank.
///
/// # Errors
///
/// Symbol construction, assembly, and singular-value errors propagate.
///
/// # Panics
///
/// Panics if `n < 10` (too short for the decay fits).
pub fn verify_transfer_inequality(omega: &DiscSelfMap, n: usize) -> Result<TransferReport> {
    assert!(n >= 10, "need n ≥ 10 for meaningful decay fits");
    let transferred_symbol = transfer_symbol(omega, VERIFY_CUTOFF_EXPONENT)?;
    let op = operator::assemble(
        transferred_symbol.symbol(),
        n,
        operator::DEFAULT_ROW_TOLERANCE,
    )?;
    let mut transferred = op.singular_values()?;
    transferred.resize(n, 0.0);

    let disc = la::complex_singular_values(&disc_composition_matrix(omega, n))?;

    let floor = disc[0] * RATIO_FLOOR;
    let ratios = transferred
        .iter()
        .zip(&disc)
        .take_while(|(_, d)| **d > floor)
        .map(|(t, d)| t / d)
        .collect();

    let window = (2, (n / 2).max(5));
    let transferred_fit = operator::decay_fit(&transferred, window).ok();
    let disc_fit = operator::decay_fit(&disc, window).ok();

    Ok(TransferReport {
        transferred,
        disc,
        ratios,
        transferred_fit,
        disc_fit,
        cutoff_exponent: VERIFY_CUTOFF_EXPONENT,
    })
}
