//! Carleson-square geometry on the half-plane `Re s > 1/2`.
//!
//! Everything in this module revolves around one change of viewpoint: a
//! finite set of half-plane points, or a finite measure built from one,
//! is probed by *Carleson squares* — boxes sitting on the boundary line
//! `Re s = 1/2` — and by the pseudo-hyperbolic distance
//!
//! ```text
//!     ϱ(s, w) = |(s − w) / (s + w̄ − 1)|.
//! ```
//!
//! The module supplies, in order of sophistication:
//!
//! * [`pseudo_distance`], [`separation`] — the metric itself and the two
//!   separation statistics `η(S) = inf_{j≠k} ϱ(s_j, s_k)` and
//!   `δ(S) = inf_j Π_{k≠j} ϱ(s_j, s_k)` of a finite point set;
//! * [`box_norm`] — the exact supremum of `μ(Q)/ℓ(Q)` over half-plane
//!   Carleson squares for a [`FinitePointMeasure`], computed over a
//!   finite candidate family that provably attains the supremum;
//! * [`crude_delta_bound`], [`shapiro_shields_bounds`],
//!   [`secondlem_formula`] — closed-form interpolation-constant bounds
//!   driven by `η`, `δ` and the box norm;
//! * [`blaschke_eval`] — numerically stable evaluation of the adapted
//!   Blaschke product `B(s) = Π_j (s − s_j)/(s − (1/2 + θ) + s̄_j)`;
//! * [`pullback_profile`] — a seeded Monte-Carlo profile of the boundary
//!   pull-back measure of a Bohr lift, binned into Carleson boxes of
//!   prescribed side lengths;
//! * [`upper_bound_a`] — the composite approximation-number upper bound
//!   `(sup_Ω |B|² ζ(1/2 + θ) + ‖μ‖)^{1/2}` with every estimated
//!   ingredient reported separately.
//!
//! Two conventions are global.  First, empty infima and empty products
//! are `1`: a singleton set has `η = δ = 1`, which makes the
//! interpolation bounds collapse to the exact one-point value.  Second,
//! all Monte-Carlo sampling is *counter-based*: the `k`-th random draw is
//! a pure function of `(seed, k)`, so the sample stream is identical no
//! matter how the index range is partitioned across threads, and every
//! profile is reproducible from its recorded `seed` and sample count.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{BohrLift, LinearSymbol};
use crate::zeta::zeta_real;

/// Absolute agreement demanded between the two closed forms of the
/// pseudo-hyperbolic distance (the modulus quotient and the
/// `√(1 − …)` expression).  Both are computed on every call and
/// cross-checked; a discrepancy indicates corrupt inputs or a
/// catastrophic loss of precision, not a tolerable rounding error.
pub const PSEUDO_DISTANCE_FORM_TOLERANCE: f64 = 1e-12;

/// Smallest Monte-Carlo sample count accepted by [`pullback_profile`]
/// and [`upper_bound_a`].  Below this, the binomial error bars on a
/// per-box mass exceed any mass the profiles are designed to resolve.
pub const MIN_MEANINGFUL_SAMPLES: u64 = 10_000;

/// Relative stopping tolerance for the adaptive torus grid that
/// estimates `sup_Ω |B|²` in [`upper_bound_a`]: the per-dimension grid
/// is doubled until the supremum changes by less than this factor.
pub const SUP_GRID_RELATIVE_TOLERANCE: f64 = 1e-3;

/// Hard cap on the total number of torus grid points evaluated per
/// refinement level by [`upper_bound_a`].  If doubling the grid would
/// exceed the cap, the last completed level supplies the supremum.
pub const MAX_SUP_GRID_POINTS: u128 = 1 << 22;

/// Worst-case ratio between the true supremum of `μ(Q)/ℓ(Q)` over all
/// boxes of a fixed side and the maximum over the two offset grids used
/// by [`pullback_profile`]: any interval of length `ε` is covered by at
/// most two cells of the `{0, ε/2}`-offset families, so the grid search
/// underestimates the supremum by at most this factor.  Echoed in
/// [`PullbackProfile::search_factor`].
pub const BOX_SEARCH_APPROXIMATION_FACTOR: f64 = 2.0;

/// Samples whose real part lands below the boundary `Re s = 1/2` by at
/// most this much are attributed to the boundary itself (the image of a
/// bounded symbol lies in the closed half-plane; tiny negative
/// excursions are rounding).  Samples below the slack are discarded.
const BOUNDARY_ROUNDING_SLACK: f64 = 1e-9;

/// Increment of the splitmix64 counter sequence.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output mix applied to `seed + (counter + 1)·γ`.
/// A pure function of `(seed, counter)`, so any slice of the stream can
/// be generated without visiting earlier draws.
fn splitmix64(seed: u64, counter: u64) -> u64 {
    let mut z = seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)` from the counter-based stream.
fn uniform01(seed: u64, counter: u64) -> f64 {
    (splitmix64(seed, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Panics unless `s` is a finite point of the open half-plane
/// `Re s > 1/2`; `what` names the offending argument in the message.
fn assert_half_plane(s: Complex64, what: &str) {
    assert!(
        s.re.is_finite() && s.im.is_finite() && s.re > 0.5,
        "{what} must be a finite point with Re > 1/2, got {s}"
    );
}

// ---------------------------------------------------------------------
// Carleson squares
// ---------------------------------------------------------------------

/// A Carleson square, on the half-plane or on the unit disc.
///
/// The half-plane square of side `ℓ` centred at height `t_c` is the
/// closed box `{1/2 ≤ σ ≤ 1/2 + ℓ, |t − t_c| ≤ ℓ/2}`; the disc square
/// anchored at radius `r₀` and angle `t₀` is
/// `{r e^{it} : r ≥ r₀, |t − t₀| ≤ (1 − r₀)π}` with side `ℓ = 1 − r₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarlesonSquare {
    /// Box on the boundary line `Re s = 1/2`.
    HalfPlane {
        /// Side length `ℓ > 0`.
        ell: f64,
        /// Height of the box centre.
        t_center: f64,
    },
    /// Box on the boundary circle of the unit disc.
    Disc {
        /// Inner radius `0 ≤ r₀ < 1`; the side is `ℓ = 1 − r₀`.
        r0: f64,
        /// Central angle.
        t0: f64,
    },
}

impl CarlesonSquare {
    /// A half-plane square of side `ell` centred at height `t_center`.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInput`] unless `ell > 0` and both fields are
    /// finite.
    pub fn half_plane(ell: f64, t_center: f64) -> Result<CarlesonSquare> {
        if !(ell.is_finite() && ell > 0.0 && t_center.is_finite()) {
            return Err(Error::MalformedInput {
                what: "Carleson square",
                detail: format!("need finite ell > 0 and finite t_center, got ell = {ell}, t_center = {t_center}"),
            });
        }
        Ok(CarlesonSquare::HalfPlane { ell, t_center })
    }

    /// A disc square anchored at radius `r0` and angle `t0`.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInput`] unless `0 ≤ r0 < 1` and `t0` is finite.
    pub fn disc(r0: f64, t0: f64) -> Result<CarlesonSquare> {
        if !(r0.is_finite() && (0.0..1.0).contains(&r0) && t0.is_finite()) {
            return Err(Error::MalformedInput {
                what: "Carleson square",
                detail: format!("need 0 ≤ r0 < 1 and finite t0, got r0 = {r0}, t0 = {t0}"),
            });
        }
        Ok(CarlesonSquare::Disc { r0, t0 })
    }

    /// Side length `ℓ(Q)` (`1 − r₀` for a disc square).
    pub fn ell(&self) -> f64 {
        match *self {
            CarlesonSquare::HalfPlane { ell, .. } => ell,
            CarlesonSquare::Disc { r0, .. } => 1.0 - r0,
        }
    }

    /// Closed membership test.  For a half-plane square `z` is read as a
    /// point `σ + it` of the closed half-plane; for a disc square `z` is
    /// read as a point of the closed unit disc and tested by modulus and
    /// angular distance.
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            CarlesonSquare::HalfPlane { ell, t_center } => {
                z.re >= 0.5 && z.re <= 0.5 + ell && (z.im - t_center).abs() <= ell / 2.0
            }
            CarlesonSquare::Disc { r0, t0 } => {
                let angular = {
                    let d = (z.arg() - t0).rem_euclid(TAU);
                    d.min(TAU - d)
                };
                z.norm() >= r0 && angular <= (1.0 - r0) * PI
            }
        }
    }
}

// ---------------------------------------------------------------------
// Finite point measures
// ---------------------------------------------------------------------

/// A finite positive measure `μ = Σ_j w_j δ_{s_j}` with atoms in the
/// open half-plane `Re s > 1/2`.
///
/// Two weight conventions ship as constructors, both equal to the
/// reciprocal squared norm of the reproducing kernel at the atom:
/// `w_j = 2 Re s_j − 1` ([`FinitePointMeasure::h2_half_plane`]) and
/// `w_j = 1/ζ(2 Re s_j)` ([`FinitePointMeasure::hardy_dirichlet`]).
/// Arbitrary positive weights are accepted by
/// [`FinitePointMeasure::with_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointMeasure {
    atoms: Vec<(Complex64, f64)>,
}

impl FinitePointMeasure {
    /// A measure with explicit atom/weight pairs.  The empty measure is
    /// allowed.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInput`] if any atom leaves the open half-plane
    /// `Re s > 1/2` or any weight is not a finite positive number.
    pub fn with_weights(atoms: Vec<(Complex64, f64)>) -> Result<FinitePointMeasure> {
        for (j, (s, w)) in atoms.iter().enumerate() {
            if !(s.re.is_finite() && s.im.is_finite() && s.re > 0.5) {
                return Err(Error::MalformedInput {
                    what: "point measure",
                    detail: format!("atom {j} at {s} is outside the open half-plane Re > 1/2"),
                });
            }
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::MalformedInput {
                    what: "point measure",
                    detail: format!("atom {j} has non-positive weight {w}"),
                });
            }
        }
        Ok(FinitePointMeasure { atoms })
    }

    /// The measure with weights `2 Re s_j − 1` (reciprocal squared
    /// kernel norm for the half-plane Hardy space).
    ///
    /// # Errors
    ///
    /// As [`FinitePointMeasure::with_weights`].
    pub fn h2_half_plane(points: &[Complex64]) -> Result<FinitePointMeasure> {
        FinitePointMeasure::with_weights(
            points.iter().map(|s| (*s, 2.0 * s.re - 1.0)).collect(),
        )
    }

    /// The measure with weights `1/ζ(2 Re s_j)` (reciprocal squared
    /// kernel norm for the Dirichlet-series space).
    ///
    /// # Errors
    ///
    /// As [`FinitePointMeasure::with_weights`].
    pub fn hardy_dirichlet(points: &[Complex64]) -> Result<FinitePointMeasure> {
        let mut atoms = Vec::with_capacity(points.len());
        for s in points {
            assert_half_plane(*s, "measure atom");
            atoms.push((*s, 1.0 / zeta_real(2.0 * s.re)?));
        }
        FinitePointMeasure::with_weights(atoms)
    }

    /// The atom/weight pairs, in construction order.
    pub fn atoms(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    /// Whether the measure has no atoms.
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass `Σ_j w_j`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }
}

// ---------------------------------------------------------------------
// Pseudo-hyperbolic distance and separation statistics
// ---------------------------------------------------------------------

/// The pseudo-hyperbolic distance `ϱ(s, w) = |(s − w)/(s + w̄ − 1)|` on
/// the half-plane `Re > 1/2`.
///
/// Both closed forms — the modulus quotient above and
/// `√(1 − (2 Re s − 1)(2 Re w − 1)/|s + w̄ − 1|²)` — are evaluated and
/// cross-checked to [`PSEUDO_DISTANCE_FORM_TOLERANCE`] on every call.
/// The value lies in `[0, 1)`, vanishing exactly when `s = w`, and is
/// invariant under simultaneous vertical translation of both arguments.
///
/// # Panics
///
/// Panics if either argument is outside the open half-plane or not
/// finite, or if the two forms disagree.
pub fn pseudo_distance(s: Complex64, w: Complex64) -> f64 {
    assert_half_plane(s, "pseudo_distance argument");
    assert_half_plane(w, "pseudo_distance argument");
    let denom = s + w.conj() - 1.0;
    let quotient = ((s - w) / denom).norm();
    let radicand = 1.0 - (2.0 * s.re - 1.0) * (2.0 * w.re - 1.0) / denom.norm_sqr();
    let root = radicand.max(0.0).sqrt();
    assert!(
        (quotient - root).abs() <= PSEUDO_DISTANCE_FORM_TOLERANCE,
        "pseudo-distance forms disagree: |quotient| = {quotient}, root form = {root}"
    );
    quotient
}

/// The separation statistics `(η(S), δ(S))` of a finite point set:
/// `η = inf_{j≠k} ϱ(s_j, s_k)` and `δ = inf_j Π_{k≠j} ϱ(s_j, s_k)`,
/// both by direct `O(n²)` enumeration.  Sets with at most one point
/// return `(1, 1)` (empty infimum, empty product).  Always
/// `δ(S) ≤ η(S)` for `|S| ≥ 2`.
///
/// # Errors
///
/// [`Error::DuplicatePoints`] if two entries coincide exactly.
///
/// # Panics
///
/// Panics if any point is outside the open half-plane `Re s > 1/2`.
pub fn separation(points: &[Complex64]) -> Result<(f64, f64)> {
    for s in points {
        assert_half_plane(*s, "separation point");
    }
    let n = points.len();
    if n <= 1 {
        return Ok((1.0, 1.0));
    }
    let mut rho = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        for k in (j + 1)..n {
            if points[j] == points[k] {
                return Err(Error::DuplicatePoints { i: j, j: k });
            }
            let r = pseudo_distance(points[j], points[k]);
            rho[j][k] = r;
            rho[k][j] = r;
        }
    }
    let mut eta = f64::INFINITY;
    let mut delta = f64::INFINITY;
    for (j, row) in rho.iter().enumerate() {
        let mut product = 1.0f64;
        for (k, r) in row.iter().enumerate() {
            if k != j {
                eta = eta.min(*r);
                product *= r;
            }
        }
        delta = delta.min(product);
    }
    Ok((eta, delta))
}

// ---------------------------------------------------------------------
// Box norm of a finite point measure
// ---------------------------------------------------------------------

/// The exact supremum of `μ(Q)/ℓ(Q)` over all half-plane Carleson
/// squares `Q` (the box ratio of the measure, with no embedding
/// constant folded in).  The empty measure gives `0`.
///
/// For a finite measure the supremum is attained within a finite
/// candidate family: as the side `ℓ` grows between consecutive
/// *events* — an atom's depth `σ_j − 1/2` or a height gap
/// `|t_j − t_k|` — the best attainable mass is constant while `ℓ`
/// grows, so the ratio can only peak at an event value; and for fixed
/// `ℓ` an optimal height window may be slid until its lower edge sits
/// on an atom.  The search is `O(n²)` candidate sides times `O(n²)`
/// anchored windows.
///
/// # Panics
///
/// Panics if the measure's invariants have been violated (never for a
/// value built through the public constructors).
pub fn box_norm(mu: &FinitePointMeasure) -> f64 {
    let mut atoms: Vec<(f64, f64, f64)> = mu
        .atoms()
        .iter()
        .map(|(s, w)| (s.im, s.re - 0.5, *w))
        .collect();
    if atoms.is_empty() {
        return 0.0;
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut sides: Vec<f64> = Vec::new();
    for (j, &(tj, depth, _)) in atoms.iter().enumerate() {
        assert!(depth > 0.0, "measure atom on or beyond the boundary");
        sides.push(depth);
        for &(tk, _, _) in &atoms[j + 1..] {
            let gap = tk - tj;
            if gap > 0.0 {
                sides.push(gap);
            }
        }
    }

    let mut best = 0.0f64;
    for &ell in &sides {
        for anchor in 0..atoms.len() {
            let t_low = atoms[anchor].0;
            let mut mass = 0.0;
            for &(t, depth, w) in &atoms[anchor..] {
                if t - t_low > ell {
                    break;
                }
                if depth <= ell {
                    mass += w;
                }
            }
            best = best.max(mass / ell);
        }
    }
    best
}

// ---------------------------------------------------------------------
// Interpolation-constant bounds
// ---------------------------------------------------------------------

/// Output of [`crude_delta_bound`]: two computable upper bounds for
/// `1/δ(S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrudeDeltaBound {
    /// The directly computable bound
    /// `sup_k exp(1/2 + log(1/η) Σ_j (2Re s_j − 1)(2Re s_k − 1)/|s_j + s̄_k − 1|²)`.
    pub display: f64,
    /// The exponential bound `exp[2π(1 + 2 log(1/η)) ‖μ_S‖]` with the
    /// true Carleson norm of `μ_S` replaced by its box ratio
    /// ([`box_norm`] of the `2 Re s − 1`-weighted measure).  The
    /// replacement drops an absolute embedding constant, so this value
    /// is a constant-free proxy, not a certified bound.
    pub constant_free_proxy: f64,
}

/// Upper bounds for `1/δ(S)` that need only `η(S)` and the box ratio of
/// the canonically weighted measure `μ_S = Σ_j (2 Re s_j − 1) δ_{s_j}`.
/// Sets with one point return `(1, 1)`: `δ = 1` by the empty-product
/// convention and the bound is exact.
///
/// # Errors
///
/// [`Error::DuplicatePoints`] if two points coincide (then `η = 0` and
/// both bounds degenerate).
///
/// # Panics
///
/// Panics on an empty list or on points outside the open half-plane.
pub fn crude_delta_bound(points: &[Complex64]) -> Result<CrudeDeltaBound> {
    assert!(!points.is_empty(), "crude_delta_bound needs at least one point");
    let (eta, _) = separation(points)?;
    if points.len() == 1 {
        return Ok(CrudeDeltaBound {
            display: 1.0,
            constant_free_proxy: 1.0,
        });
    }
    let log_inv_eta = -eta.ln();
    let mut display = 0.0f64;
    for sk in points {
        let mut sum = 0.0;
        for sj in points {
            sum += (2.0 * sj.re - 1.0) * (2.0 * sk.re - 1.0) / (sj + sk.conj() - 1.0).norm_sqr();
        }
        display = display.max((0.5 + log_inv_eta * sum).exp());
    }
    let ratio = box_norm(&FinitePointMeasure::h2_half_plane(points)?);
    let constant_free_proxy = (2.0 * PI * (1.0 + 2.0 * log_inv_eta) * ratio).exp();
    Ok(CrudeDeltaBound {
        display,
        constant_free_proxy,
    })
}

/// Output of [`shapiro_shields_bounds`]: a two-sided enclosure of the
/// interpolation constant of a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapiroShieldsBounds {
    /// The certified lower bound `1/δ(S)`.
    pub lower: f64,
    /// The upper expression `(box ratio)^{1/2}/δ(S)`, with the box
    /// ratio standing in for the Carleson norm of `μ_S`; it lacks the
    /// absolute embedding constant, so it is a proxy rather than a
    /// certified bound.
    pub upper_proxy: f64,
}

/// The two-sided interpolation-constant enclosure
/// `1/δ(S) ≤ M(S) ≤ ‖μ_S‖^{1/2}/δ(S)` with `‖μ_S‖` replaced by the
/// box ratio of the `2 Re s − 1`-weighted measure.  A singleton returns
/// `lower = 1` and `upper_proxy = √2` (its box ratio is exactly `2`).
///
/// # Errors
///
/// [`Error::DuplicatePoints`] if two points coincide.
///
/// # Panics
///
/// Panics on an empty list or on points outside the open half-plane.
pub fn shapiro_shields_bounds(points: &[Complex64]) -> Result<ShapiroShieldsBounds> {
    assert!(
        !points.is_empty(),
        "shapiro_shields_bounds needs at least one point"
    );
    let (_, delta) = separation(points)?;
    let ratio = box_norm(&FinitePointMeasure::h2_half_plane(points)?);
    Ok(ShapiroShieldsBounds {
        lower: 1.0 / delta,
        upper_proxy: ratio.sqrt() / delta,
    })
}

/// The polynomial transfer bound `C · M^{2θ+6} · R^{2θ+7/2}`: given an
/// interpolation constant `M ≥ 1` for a half-plane point set, this is
/// the induced constant for the height-`R` copy of the set seen in the
/// Dirichlet-series space.  The prefactor `C` depends only on `θ` and
/// is supplied by the caller.
///
/// # Errors
///
/// [`Error::InvalidBoundParameters`] unless `R ≥ θ + 1`, `M ≥ 1` and
/// `C > 0` (all finite).
pub fn secondlem_formula(m: f64, theta: f64, r: f64, c: f64) -> Result<f64> {
    if !(m.is_finite() && theta.is_finite() && r.is_finite() && c.is_finite()) {
        return Err(Error::InvalidBoundParameters {
            reason: format!("non-finite input: M = {m}, θ = {theta}, R = {r}, C = {c}"),
        });
    }
    if m < 1.0 {
        return Err(Error::InvalidBoundParameters {
            reason: format!("M = {m} < 1"),
        });
    }
    if r < theta + 1.0 {
        return Err(Error::InvalidBoundParameters {
            reason: format!("R = {r} < θ + 1 = {}", theta + 1.0),
        });
    }
    if c <= 0.0 {
        return Err(Error::InvalidBoundParameters {
            reason: format!("C = {c} ≤ 0"),
        });
    }
    Ok(c * m.powf(2.0 * theta + 6.0) * r.powf(2.0 * theta + 3.5))
}

// ---------------------------------------------------------------------
// Adapted Blaschke products
// ---------------------------------------------------------------------

/// Groups a zero list by exact (bitwise) equality, preserving first
/// appearance order, so repeated zeros cost one factor evaluation.
fn group_zeros(zeros: &[Complex64]) -> Vec<(Complex64, u32)> {
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut grouped: Vec<(Complex64, u32)> = Vec::new();
    for z in zeros {
        let key = (z.re.to_bits(), z.im.to_bits());
        match index.get(&key) {
            Some(&slot) => grouped[slot].1 += 1,
            None => {
                index.insert(key, grouped.len());
                grouped.push((*z, 1));
            }
        }
    }
    grouped
}

/// Log-modulus and phase of the adapted Blaschke product at `s`, or
/// `None` if `s` hits a zero exactly.
fn blaschke_log_parts(
    grouped: &[(Complex64, u32)],
    theta: f64,
    s: Complex64,
) -> Option<(f64, f64)> {
    let mut log_modulus = 0.0f64;
    let mut phase = 0.0f64;
    for &(zero, multiplicity) in grouped {
        let numerator = s - zero;
        if numerator.norm_sqr() == 0.0 {
            return None;
        }
        let denominator = s - (0.5 + theta) + zero.conj();
        let mult = f64::from(multiplicity);
        log_modulus += mult * (numerator.norm().ln() - denominator.norm().ln());
        phase += mult * (numerator.arg() - denominator.arg());
    }
    Some((log_modulus, phase))
}

/// `|B(s)|²` via the log form (exactly `0` on a zero).
fn blaschke_abs_sq(grouped: &[(Complex64, u32)], theta: f64, s: Complex64) -> f64 {
    match blaschke_log_parts(grouped, theta, s) {
        None => 0.0,
        Some((log_modulus, _)) => (2.0 * log_modulus).exp(),
    }
}

/// The adapted Blaschke product
/// `B(s) = Π_j (s − s_j)/(s − (1/2 + θ) + s̄_j)` over a zero list with
/// multiplicity.  Accumulated in log-modulus + phase form (with
/// repeated zeros grouped), so products with hundreds of coincident
/// factors neither underflow nor lose their argument.  `B` has modulus
/// exactly `1` on the line `Re s = 1/4 + θ/2`, modulus `< 1` on
/// `Re s ≥ θ`, and its poles lie in `Re s ≤ 1/2` (reflected zeros).
/// The empty product is `1`.
///
/// # Panics
///
/// Panics unless `θ > 1/2`, every zero satisfies `Re s_j ≥ θ`, and all
/// inputs are finite.
pub fn blaschke_eval(zeros: &[Complex64], theta: f64, s: Complex64) -> Complex64 {
    assert!(
        theta.is_finite() && theta > 0.5,
        "blaschke_eval needs θ > 1/2, got {theta}"
    );
    for z in zeros {
        assert!(
            z.re.is_finite() && z.im.is_finite() && z.re >= theta,
            "Blaschke zero {z} leaves the admissible half-plane Re ≥ θ = {theta}"
        );
    }
    assert!(s.re.is_finite() && s.im.is_finite(), "non-finite evaluation point");
    match blaschke_log_parts(&group_zeros(zeros), theta, s) {
        None => Complex64::new(0.0, 0.0),
        Some((log_modulus, phase)) => Complex64::from_polar(log_modulus.exp(), phase),
    }
}

// ---------------------------------------------------------------------
// Monte-Carlo pull-back profiles
// ---------------------------------------------------------------------

/// Sampling parameters shared by the Monte-Carlo operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSettings {
    /// Number of torus samples (at least [`MIN_MEANINGFUL_SAMPLES`]).
    pub samples: u64,
    /// Seed of the counter-based generator; the sample stream is a pure
    /// function of `(seed, draw index)`.
    pub seed: u64,
    /// Stand-in for the absolute Carleson embedding constant that the
    /// theory leaves unspecified; every measure-dependent term is
    /// multiplied by it.  Keeping the default `1` reports the raw box
    /// ratio.
    pub c_emb: f64,
}

impl Default for MonteCarloSettings {
    fn default() -> MonteCarloSettings {
        MonteCarloSettings {
            samples: 200_000,
            seed: 1,
            c_emb: 1.0,
        }
    }
}

/// One row of a [`PullbackProfile`]: the boundary mass statistics at a
/// single box side `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    /// Box side.
    pub epsilon: f64,
    /// Largest empirical mass of a single Carleson box of side
    /// `epsilon` (fraction of all samples).
    pub max_box_mass: f64,
    /// `max_box_mass / ε` — the quantity whose decay as `ε → 0`
    /// witnesses compactness of the composition operator.
    pub mass_over_ell: f64,
    /// `max_box_mass / ε^{(d+1)/2}` — the mass normalised by the sharp
    /// boundary-contact exponent in `d` torus variables.
    pub lemma_normalized_mass: f64,
    /// Binomial standard error `√(p(1−p)/N)` of `max_box_mass`.
    pub standard_error: f64,
}

/// A seeded Monte-Carlo profile of a Bohr lift's boundary pull-back
/// measure, one [`ProfileRow`] per requested box side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackProfile {
    /// Rows in the order of the requested side lengths (descending).
    pub rows: Vec<ProfileRow>,
    /// Torus samples drawn.
    pub samples: u64,
    /// Generator seed; together with `samples` it reproduces the
    /// profile exactly.
    pub seed: u64,
    /// Number of torus variables `d`.
    pub dimension: usize,
    /// Worst-case factor by which the offset-grid search can
    /// underestimate the true supremum over boxes
    /// ([`BOX_SEARCH_APPROXIMATION_FACTOR`]).
    pub search_factor: f64,
}

/// Draws the `i`-th torus sample (all `d` coordinates) of the
/// counter-based stream and pushes it through the lift.
fn lift_sample(lift: &BohrLift, seed: u64, index: u64, scratch: &mut Vec<Complex64>) -> Complex64 {
    let d = lift.dimension() as u64;
    scratch.clear();
    for j in 0..d {
        let angle = TAU * uniform01(seed, index * d + j);
        scratch.push(Complex64::from_polar(1.0, angle));
    }
    lift.apply(scratch)
}

/// Largest count of samples `(σ, t)` with `σ ≤ eps` in a single cell of
/// the two height grids of pitch `eps` offset by `{0, eps/2}`.  Counts
/// are integers keyed by cell index, so the reduction order is
/// immaterial.
fn max_cell_count(samples: &[(f64, f64)], eps: f64) -> u64 {
    let mut cells: HashMap<(bool, i64), u64> = HashMap::new();
    for &(sigma, t) in samples {
        if sigma <= eps {
            let plain = (t / eps).floor() as i64;
            let shifted = (t / eps - 0.5).floor() as i64;
            *cells.entry((false, plain)).or_insert(0) += 1;
            *cells.entry((true, shifted)).or_insert(0) += 1;
        }
    }
    cells.values().copied().max().unwrap_or(0)
}

/// Monte-Carlo profile of the boundary pull-back measure of `lift`.
///
/// Draws `samples` independent uniform points of the `d`-torus from the
/// counter-based stream seeded by `seed`, pushes each through the lift
/// `Φ`, and keeps the boundary offset `σ = Re Φ − 1/2` and height
/// `t = Im Φ`.  For each requested side `ε` the samples with
/// `0 ≤ σ ≤ ε` are binned into height cells of pitch `ε` on the two
/// offset grids `{0, ε/2}`, and the row records the largest cell mass
/// together with its `ε`- and `ε^{(d+1)/2}`-normalisations and a
/// binomial standard error.  A sample may land in a cell of each offset
/// grid, never two of the same grid, so every reported mass is in
/// `[0, 1]`; the two-grid search undershoots the supremum over freely
/// placed boxes by at most [`BOX_SEARCH_APPROXIMATION_FACTOR`].
///
/// The profile is a pure function of `(lift, epsilons, samples, seed)`.
///
/// # Errors
///
/// [`Error::StatisticallyMeaningless`] if `samples` is below
/// [`MIN_MEANINGFUL_SAMPLES`].
///
/// # Panics
///
/// Panics unless `epsilons` is nonempty, finite, positive and strictly
/// descending.
pub fn pullback_profile(
    lift: &BohrLift,
    epsilons: &[f64],
    samples: u64,
    seed: u64,
) -> Result<PullbackProfile> {
    assert!(!epsilons.is_empty(), "need at least one box side");
    for pair in epsilons.windows(2) {
        assert!(
            pair[1] < pair[0],
            "box sides must be strictly descending, got {} before {}",
            pair[0],
            pair[1]
        );
    }
    assert!(
        epsilons.iter().all(|e| e.is_finite() && *e > 0.0),
        "box sides must be finite and positive"
    );
    if samples < MIN_MEANINGFUL_SAMPLES {
        return Err(Error::StatisticallyMeaningless {
            samples,
            min: MIN_MEANINGFUL_SAMPLES,
        });
    }

    let mut boundary: Vec<(f64, f64)> = Vec::new();
    let mut scratch = Vec::with_capacity(lift.dimension());
    for i in 0..samples {
        let s = lift_sample(lift, seed, i, &mut scratch);
        let sigma = s.re - 0.5;
        if sigma >= -BOUNDARY_ROUNDING_SLACK {
            boundary.push((sigma.max(0.0), s.im));
        }
    }

    let d = lift.dimension();
    let lemma_exponent = (d as f64 + 1.0) / 2.0;
    let rows = epsilons
        .iter()
        .map(|&eps| {
            let mass = max_cell_count(&boundary, eps) as f64 / samples as f64;
            ProfileRow {
                epsilon: eps,
                max_box_mass: mass,
                mass_over_ell: mass / eps,
                lemma_normalized_mass: mass / eps.powf(lemma_exponent),
                standard_error: (mass * (1.0 - mass) / samples as f64).sqrt(),
            }
        })
        .collect();

    Ok(PullbackProfile {
        rows,
        samples,
        seed,
        dimension: d,
        search_factor: BOX_SEARCH_APPROXIMATION_FACTOR,
    })
}

// ---------------------------------------------------------------------
// The composite upper bound
// ---------------------------------------------------------------------

/// Output of [`upper_bound_a`], with every estimated ingredient
/// reported next to the composite bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundA {
    /// The bound `(sup_Ω |B|² · ζ(1/2 + θ) + μ_term)^{1/2}`.  An
    /// estimate: the supremum is sampled, the measure term is Monte
    /// Carlo, and the embedding constant enters as the user-supplied
    /// `c_emb`.
    pub bound: f64,
    /// Sampled `sup_Ω |B(s)|²`.
    pub sup_blaschke_sq: f64,
    /// `ζ(1/2 + θ)`.
    pub zeta_factor: f64,
    /// `c_emb` times the largest sampled box ratio of the pull-back
    /// mass that escapes `Ω` (lands left of `Re s = θ`).
    pub mu_term: f64,
    /// Final per-dimension torus grid side used for the supremum; `0`
    /// when the caller supplied the `Ω` sample.
    pub grid_side: usize,
    /// Monte-Carlo sample count for the measure term.
    pub samples: u64,
    /// Monte-Carlo seed for the measure term.
    pub seed: u64,
    /// The embedding-constant stand-in folded into `mu_term`.
    pub c_emb: f64,
}

/// Supremum of `|B|²` over torus grid images with `Re ≥ theta`, at a
/// fixed per-dimension side.
fn grid_blaschke_sup(
    lift: &BohrLift,
    grouped: &[(Complex64, u32)],
    theta: f64,
    side: usize,
) -> f64 {
    let d = lift.dimension();
    let total = (side as u128).pow(d as u32) as usize;
    let mut z = vec![Complex64::new(0.0, 0.0); d];
    let mut sup = 0.0f64;
    for flat in 0..total {
        let mut rem = flat;
        for slot in z.iter_mut() {
            let k = rem % side;
            rem /= side;
            *slot = Complex64::from_polar(1.0, TAU * k as f64 / side as f64);
        }
        let s = lift.apply(&z);
        if s.re >= theta {
            sup = sup.max(blaschke_abs_sq(grouped, theta, s));
        }
    }
    sup
}

/// The composite approximation-number upper bound
/// `(sup_Ω |B(s)|² · ζ(1/2 + θ) + μ_term)^{1/2}` for the composition
/// operator of a linear symbol, where `Ω` is the part of the symbol's
/// closed range with `Re s ≥ θ` and `B` is the adapted Blaschke product
/// on `zeros`.
///
/// The supremum is sampled on the image of a torus grid (side doubled
/// from 16 until the value moves by less than
/// [`SUP_GRID_RELATIVE_TOLERANCE`] or the next level would exceed
/// [`MAX_SUP_GRID_POINTS`]); passing `omega_sample` overrides the grid
/// with caller-chosen points of `Ω` (still filtered to `Re ≥ θ`).  The
/// measure term is the largest Monte-Carlo box ratio `mass/ε` of the
/// pull-back mass escaping `Ω` — samples with `Re Φ < θ` — over the
/// dyadic side ladder `ε = (θ − 1/2)·2^{2−k}`, `k = 0..9`, scaled by
/// `mc.c_emb`.  Every ingredient is echoed in the output; the result is
/// an estimate, not a certified bound.
///
/// # Errors
///
/// [`Error::StatisticallyMeaningless`] if `mc.samples` is below
/// [`MIN_MEANINGFUL_SAMPLES`]; zeta evaluation failures propagate.
///
/// # Panics
///
/// Panics unless the symbol is bounded (`κ ≥ 1/2`), `θ > 1/2`,
/// `mc.c_emb > 0`, and every zero satisfies `Re ≥ θ`.
pub fn upper_bound_a(
    sym: &LinearSymbol,
    zeros: &[Complex64],
    theta: f64,
    omega_sample: Option<&[Complex64]>,
    mc: &MonteCarloSettings,
) -> Result<UpperBoundA> {
    assert!(
        theta.is_finite() && theta > 0.5,
        "upper_bound_a needs θ > 1/2, got {theta}"
    );
    assert!(
        sym.kappa() >= 0.5 - 1e-12,
        "symbol is not bounded: κ = {} < 1/2",
        sym.kappa()
    );
    assert!(
        mc.c_emb.is_finite() && mc.c_emb > 0.0,
        "c_emb must be finite and positive, got {}",
        mc.c_emb
    );
    for z in zeros {
        assert!(
            z.re.is_finite() && z.im.is_finite() && z.re >= theta,
            "Blaschke zero {z} leaves the admissible half-plane Re ≥ θ = {theta}"
        );
    }
    if mc.samples < MIN_MEANINGFUL_SAMPLES {
        return Err(Error::StatisticallyMeaningless {
            samples: mc.samples,
            min: MIN_MEANINGFUL_SAMPLES,
        });
    }

    let lift = sym.bohr_lift();
    let grouped = group_zeros(zeros);

    let (sup_blaschke_sq, grid_side) = match omega_sample {
        Some(points) => {
            let mut sup = 0.0f64;
            for s in points {
                if s.re >= theta {
                    sup = sup.max(blaschke_abs_sq(&grouped, theta, *s));
                }
            }
            (sup, 0)
        }
        None => {
            let mut side = 16usize;
            let mut sup = grid_blaschke_sup(&lift, &grouped, theta, side);
            if lift.dimension() > 0 {
                loop {
                    let next = side * 2;
                    let points = (next as u128).checked_pow(lift.dimension() as u32);
                    if points.is_none_or(|p| p > MAX_SUP_GRID_POINTS) {
                        break;
                    }
                    let refined = grid_blaschke_sup(&lift, &grouped, theta, next);
                    let settled =
                        (refined - sup).abs() <= SUP_GRID_RELATIVE_TOLERANCE * refined.max(1e-12);
                    sup = refined;
                    side = next;
                    if settled {
                        break;
                    }
                }
            } else {
                side = 1;
            }
            (sup, side)
        }
    };

    // Pull-back mass that escapes Ω: torus samples landing left of
    // Re s = θ, binned exactly as in `pullback_profile`.
    let mut escaped: Vec<(f64, f64)> = Vec::new();
    let mut scratch = Vec::with_capacity(lift.dimension());
    for i in 0..mc.samples {
        let s = lift_sample(&lift, mc.seed, i, &mut scratch);
        let sigma = s.re - 0.5;
        if s.re < theta && sigma >= -BOUNDARY_ROUNDING_SLACK {
            escaped.push((sigma.max(0.0), s.im));
        }
    }
    let mut mu_ratio = 0.0f64;
    for k in 0..9 {
        let eps = (theta - 0.5) * 2.0f64.powi(2 - k);
        let mass = max_cell_count(&escaped, eps) as f64 / mc.samples as f64;
        mu_ratio = mu_ratio.max(mass / eps);
    }
    let mu_term = mc.c_emb * mu_ratio;

    let zeta_factor = zeta_real(0.5 + theta)?;
    Ok(UpperBoundA {
        bound: (sup_blaschke_sq * zeta_factor + mu_term).sqrt(),
        sup_blaschke_sq,
        zeta_factor,
        mu_term,
        grid_side,
        samples: mc.samples,
        seed: mc.seed,
        c_emb: mc.c_emb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "got {got}, want {want} (tolerance {tol})"
        );
    }

    /// `φ(s) = c₁ + Σ c_q q^{-s}` from plain `u64` frequencies.
    fn linear(c1: f64, terms: &[(u64, f64)]) -> LinearSymbol {
        LinearSymbol::new(
            c(c1, 0.0),
            terms
                .iter()
                .map(|&(q, w)| (BigUint::from(q), c(w, 0.0)))
                .collect(),
        )
        .expect("valid test symbol")
    }

    // -- pseudo-distance --------------------------------------------

    #[test]
    fn pseudo_distance_vanishes_on_the_diagonal() {
        for s in [c(0.75, 0.0), c(1.0, 3.0), c(2.5, -7.0)] {
            assert_eq!(pseudo_distance(s, s), 0.0);
        }
    }

    #[test]
    fn pseudo_distance_hand_value() {
        // ϱ(1, 1+i) = |−i/(1−i)| = 1/√2.
        let got = pseudo_distance(c(1.0, 0.0), c(1.0, 1.0));
        assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-15);
    }

    #[test]
    #[should_panic(expected = "Re > 1/2")]
    fn pseudo_distance_rejects_boundary_points() {
        pseudo_distance(c(0.5, 0.0), c(1.0, 0.0));
    }

    // -- separation --------------------------------------------------

    #[test]
    fn separation_singleton_convention() {
        assert_eq!(separation(&[c(1.0, 5.0)]).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn separation_single_pair() {
        let (eta, delta) = separation(&[c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert!((eta - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-15);
        assert_eq!(eta, delta);
    }

    #[test]
    fn separation_rejects_duplicates() {
        let err = separation(&[c(1.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)]).unwrap_err();
        match err {
            Error::DuplicatePoints { i, j } => assert_eq!((i, j), (0, 2)),
            other => panic!("unexpected error {other}"),
        }
    }

    // -- box norm ----------------------------------------------------

    #[test]
    fn box_norm_empty_measure_is_zero() {
        let mu = FinitePointMeasure::with_weights(Vec::new()).unwrap();
        assert_eq!(box_norm(&mu), 0.0);
    }

    #[test]
    fn box_norm_single_atom_hand_value() {
        // Atom at s = 1, weight 1: the optimal square has ℓ = 1/2 (just
        // deep enough to reach the atom), ratio 1/(1/2) = 2.
        let mu = FinitePointMeasure::with_weights(vec![(c(1.0, 0.0), 1.0)]).unwrap();
        assert_eq!(box_norm(&mu), 2.0);
    }

    #[test]
    fn box_norm_two_stacked_atoms() {
        // Unit weights at 1 and 1+i: one atom in an ℓ = 1/2 square and
        // both in an ℓ = 1 square tie at ratio 2.
        let mu =
            FinitePointMeasure::with_weights(vec![(c(1.0, 0.0), 1.0), (c(1.0, 1.0), 1.0)])
                .unwrap();
        assert_eq!(box_norm(&mu), 2.0);
    }

    /// Brute-force oracle: the supremum equals the best ratio
    /// `(Σ_{j∈A} w_j)/ℓ*_A` over nonempty atom subsets `A`, where
    /// `ℓ*_A` is the side of the smallest square containing `A`.
    fn box_norm_subset_oracle(mu: &FinitePointMeasure) -> f64 {
        let atoms = mu.atoms();
        let n = atoms.len();
        let mut best = 0.0f64;
        for mask in 1u32..(1 << n) {
            let mut mass = 0.0;
            let mut depth = 0.0f64;
            let mut t_low = f64::INFINITY;
            let mut t_high = f64::NEG_INFINITY;
            for (j, (s, w)) in atoms.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    mass += w;
                    depth = depth.max(s.re - 0.5);
                    t_low = t_low.min(s.im);
                    t_high = t_high.max(s.im);
                }
            }
            best = best.max(mass / depth.max(t_high - t_low));
        }
        best
    }

    #[test]
    fn box_norm_matches_subset_oracle_on_a_fixed_set() {
        let mu = FinitePointMeasure::with_weights(vec![
            (c(0.8, -1.0), 0.3),
            (c(1.7, 0.1), 2.0),
            (c(0.6, 0.15), 0.05),
            (c(3.0, 4.0), 1.0),
        ])
        .unwrap();
        assert_close(box_norm(&mu), box_norm_subset_oracle(&mu), 1e-12);
    }

    #[test]
    fn finite_point_measure_weight_conventions() {
        let points = [c(1.0, 0.0), c(0.75, 2.0)];
        let h2 = FinitePointMeasure::h2_half_plane(&points).unwrap();
        assert_eq!(h2.atoms()[0].1, 1.0);
        assert_eq!(h2.atoms()[1].1, 0.5);
        let hd = FinitePointMeasure::hardy_dirichlet(&points).unwrap();
        // 1/ζ(2) = 6/π².
        assert_close(hd.atoms()[0].1, 6.0 / (PI * PI), 1e-12);
        assert!(hd.atoms()[1].1 < hd.atoms()[0].1); // ζ(1.5) > ζ(2)
        assert!(FinitePointMeasure::with_weights(vec![(c(0.4, 0.0), 1.0)]).is_err());
        assert!(FinitePointMeasure::with_weights(vec![(c(1.0, 0.0), 0.0)]).is_err());
    }

    #[test]
    fn carleson_square_membership() {
        let q = CarlesonSquare::half_plane(1.0, 0.0).unwrap();
        assert_eq!(q.ell(), 1.0);
        assert!(q.contains(c(1.5, 0.5))); // both boundaries closed
        assert!(q.contains(c(0.5, -0.5)));
        assert!(!q.contains(c(1.6, 0.0)));
        assert!(!q.contains(c(1.0, 0.51)));

        let disc = CarlesonSquare::disc(0.5, 0.0).unwrap();
        assert_close(disc.ell(), 0.5, 1e-15);
        assert!(disc.contains(Complex64::from_polar(0.8, 0.1)));
        assert!(!disc.contains(Complex64::from_polar(0.4, 0.0)));
        assert!(!disc.contains(Complex64::from_polar(0.9, PI)));
        assert!(CarlesonSquare::half_plane(0.0, 0.0).is_err());
        assert!(CarlesonSquare::disc(1.0, 0.0).is_err());
    }

    // -- interpolation bounds -----------------------------------------

    #[test]
    fn crude_bound_singleton_returns_one() {
        let got = crude_delta_bound(&[c(2.0, 3.0)]).unwrap();
        assert_eq!(got.display, 1.0);
        assert_eq!(got.constant_free_proxy, 1.0);
    }

    #[test]
    fn crude_bound_pair_pins_both_forms() {
        // S = {1, 1+i}: η = 1/√2, Σ_j terms are 1 and 1/2, box ratio 2.
        let got = crude_delta_bound(&[c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert_close(got.display, 2.772_807_612_568_574, 1e-12);
        assert_close(got.constant_free_proxy, 1.739_241_569_537_496_4e9, 1e-12);
        assert!(got.display >= std::f64::consts::SQRT_2);
    }

    #[test]
    fn shapiro_shields_singleton() {
        let got = shapiro_shields_bounds(&[c(4.0, -2.0)]).unwrap();
        assert_eq!(got.lower, 1.0);
        assert_close(got.upper_proxy, std::f64::consts::SQRT_2, 1e-12);
    }

    #[test]
    fn shapiro_shields_pair_pins_both_sides() {
        let got = shapiro_shields_bounds(&[c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert_close(got.lower, std::f64::consts::SQRT_2, 1e-14);
        assert_close(got.upper_proxy, 2.0, 1e-12);
    }

    #[test]
    fn secondlem_pinned_values() {
        assert_close(
            secondlem_formula(1.0, 1.0, 2.0, 1.0).unwrap(),
            45.254_833_995_939_04,
            1e-13,
        );
        assert_close(
            secondlem_formula(2.0, 0.5, 2.0, 1.0).unwrap(),
            2_896.309_375_740_099,
            1e-13,
        );
    }

    #[test]
    fn secondlem_rejects_bad_parameters() {
        for (m, theta, r, cc) in [
            (1.0, 1.0, 1.9, 1.0), // R < θ + 1
            (0.5, 1.0, 3.0, 1.0), // M < 1
            (1.0, 1.0, 3.0, 0.0), // C ≤ 0
            (f64::NAN, 1.0, 3.0, 1.0),
        ] {
            assert!(matches!(
                secondlem_formula(m, theta, r, cc),
                Err(Error::InvalidBoundParameters { .. })
            ));
        }
    }

    // -- Blaschke products --------------------------------------------

    #[test]
    fn blaschke_vanishes_at_zeros() {
        let zeros = [c(2.0, 1.0), c(1.5, -3.0), c(2.0, 1.0)];
        for z in &zeros {
            assert_eq!(blaschke_eval(&zeros, 1.2, *z), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn blaschke_empty_product_is_one() {
        assert_eq!(blaschke_eval(&[], 1.0, c(3.0, 2.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn blaschke_unimodular_on_the_mirror_line() {
        // Each factor's numerator and denominator are reflections of
        // each other across Re s = 1/4 + θ/2.
        let theta = 0.9;
        let zeros = [c(1.0, 0.0), c(2.5, 4.0), c(0.95, -1.5)];
        let line = 0.25 + theta / 2.0;
        for k in -5..=5 {
            let s = c(line, 1.7 * f64::from(k));
            assert!((blaschke_eval(&zeros, theta, s).norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn blaschke_log_form_survives_extreme_multiplicity() {
        // 400 coincident zeros: the naive product underflows to 0, the
        // log form reproduces |b|^400 to full relative accuracy.
        let zero = c(2.0, 0.0);
        let zeros = vec![zero; 400];
        let s = c(1.5, 0.3);
        let single = blaschke_eval(&[zero], 1.0, s).norm();
        let got = blaschke_eval(&zeros, 1.0, s).norm();
        let want = single.powi(400);
        assert!(want > 0.0 && want < 1e-90);
        assert!((got / want - 1.0).abs() <= 1e-9);
    }

    #[test]
    #[should_panic(expected = "admissible half-plane")]
    fn blaschke_rejects_zeros_left_of_theta() {
        blaschke_eval(&[c(0.9, 0.0)], 1.0, c(2.0, 0.0));
    }

    // -- pull-back profiles -------------------------------------------

    #[test]
    fn pullback_rejects_small_samples() {
        let lift = linear(1.0, &[(2, -0.5)]).bohr_lift();
        assert!(matches!(
            pullback_profile(&lift, &[0.1], 9_999, 1),
            Err(Error::StatisticallyMeaningless { samples: 9_999, min: MIN_MEANINGFUL_SAMPLES })
        ));
    }

    #[test]
    fn pullback_restricted_range_has_no_boundary_mass() {
        // κ = 3/2: the image stays right of Re = 3/2, so boxes with
        // side below κ − 1/2 = 1 are empty.
        let lift = linear(2.0, &[(2, -0.5)]).bohr_lift();
        let profile = pullback_profile(&lift, &[0.5, 0.25, 0.1], 20_000, 5).unwrap();
        for row in &profile.rows {
            assert_eq!(row.max_box_mass, 0.0);
            assert_eq!(row.mass_over_ell, 0.0);
            assert_eq!(row.standard_error, 0.0);
        }
    }

    #[test]
    fn pullback_is_deterministic_in_the_seed() {
        let lift = linear(1.0, &[(2, -0.5)]).bohr_lift();
        let a = pullback_profile(&lift, &[0.1, 0.01], 20_000, 42).unwrap();
        let b = pullback_profile(&lift, &[0.1, 0.01], 20_000, 42).unwrap();
        assert_eq!(a, b);
        let other = pullback_profile(&lift, &[0.1, 0.01], 20_000, 43).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn pullback_masses_monotone_under_halving() {
        // Halving the side nests the offset-grid boxes, so the maximal
        // mass cannot grow.
        let lift = linear(1.0, &[(2, -0.5)]).bohr_lift();
        let profile =
            pullback_profile(&lift, &[0.2, 0.1, 0.05, 0.025], 200_000, 9).unwrap();
        for pair in profile.rows.windows(2) {
            assert!(pair[1].max_box_mass <= pair[0].max_box_mass);
        }
        for row in &profile.rows {
            assert!((0.0..=1.0).contains(&row.max_box_mass));
        }
    }

    #[test]
    fn pullback_d1_boundary_ratio_stays_positive() {
        // One torus variable with κ = 1/2: the boundary mass in a box
        // of side ε scales like ε itself, so mass/ε stays bounded away
        // from zero (the non-compact regime).
        let lift = linear(1.0, &[(2, -0.5)]).bohr_lift();
        let profile =
            pullback_profile(&lift, &[1e-1, 1e-2, 1e-3], 1_000_000, 7).unwrap();
        for row in &profile.rows {
            assert!(
                row.mass_over_ell >= 0.1,
                "ratio collapsed at ε = {}: {}",
                row.epsilon,
                row.mass_over_ell
            );
        }
        // Regression pins for the deterministic stream (counts / 10⁶).
        for (row, want) in profile.rows.iter().zip([0.036_945, 0.003_301, 0.000_361]) {
            assert_close(row.max_box_mass, want, 1e-12);
        }
    }

    #[test]
    fn pullback_d2_lemma_normalization_is_bounded() {
        // Two torus variables with κ = 1/2: box masses scale like
        // ε^{3/2}, so mass/ε^{3/2} stays bounded while mass/ε → 0 (the
        // compact regime).
        let lift = linear(1.5, &[(2, -0.5), (3, -0.5)]).bohr_lift();
        let profile =
            pullback_profile(&lift, &[1e-1, 1e-2, 1e-3], 1_000_000, 11).unwrap();
        for row in &profile.rows {
            assert!(row.lemma_normalized_mass <= 5.0);
        }
        let first = profile.rows.first().unwrap().mass_over_ell;
        let last = profile.rows.last().unwrap().mass_over_ell;
        assert!(last <= first / 2.0, "mass/ε did not decay: {first} → {last}");
        // Regression pins for the deterministic stream (counts / 10⁶).
        for (row, want) in profile.rows.iter().zip([0.004_873, 0.000_157, 1.4e-5]) {
            assert_close(row.max_box_mass, want, 1e-12);
        }
    }

    // -- the composite upper bound -------------------------------------

    #[test]
    fn upper_bound_constant_symbol_collapses() {
        // φ ≡ 2 with all zeros at 2: B vanishes on the whole (single
        // point) range and no mass escapes Ω, so the bound is exactly 0.
        let sym = linear(2.0, &[]);
        let mc = MonteCarloSettings {
            samples: 10_000,
            seed: 3,
            c_emb: 1.0,
        };
        for n in [2usize, 5] {
            let zeros = vec![c(2.0, 0.0); n - 1];
            let got = upper_bound_a(&sym, &zeros, 1.5, None, &mc).unwrap();
            assert_eq!(got.bound, 0.0);
            assert_eq!(got.sup_blaschke_sq, 0.0);
            assert_eq!(got.mu_term, 0.0);
            assert_eq!(got.grid_side, 1);
        }
    }

    #[test]
    fn upper_bound_compact_range_matches_repeated_zero_rate() {
        // κ = 3/2 > θ = 1: the whole range sits inside Ω, nothing
        // escapes, and with all n−1 zeros at the range centre s₀ = 2
        // the bound collapses to r^{n−1}·√ζ(3/2) with
        // r = sup |(s−2)/(s+1/2)| = 1/4, attained at s = 3/2 = Φ(1)
        // (a grid point, so the sampled supremum is exact).
        let sym = linear(2.0, &[(2, -0.5)]);
        let mc = MonteCarloSettings {
            samples: 10_000,
            seed: 3,
            c_emb: 1.0,
        };
        let r: f64 = 0.25;
        assert!(r < 1.0);
        let zeta_15 = zeta_real(1.5).unwrap();
        for n in [4usize, 8] {
            let zeros = vec![c(2.0, 0.0); n - 1];
            let got = upper_bound_a(&sym, &zeros, 1.0, None, &mc).unwrap();
            assert_eq!(got.mu_term, 0.0);
            assert_close(got.bound, r.powi(n as i32 - 1) * zeta_15.sqrt(), 1e-9);
        }
    }

    #[test]
    fn upper_bound_accepts_a_user_supplied_omega_sample() {
        let sym = linear(2.0, &[(2, -0.5)]);
        let mc = MonteCarloSettings {
            samples: 10_000,
            seed: 3,
            c_emb: 1.0,
        };
        // The range point s = 3/2 maximises |B|; supplying it alone
        // reproduces the grid supremum, points outside Ω are ignored.
        let sample = [c(1.5, 0.0), c(0.75, 0.0)];
        let got = upper_bound_a(&sym, &[c(2.0, 0.0)], 1.0, Some(&sample), &mc).unwrap();
        assert_eq!(got.grid_side, 0);
        assert_close(got.sup_blaschke_sq, 0.25f64.powi(2), 1e-12);
    }

    #[test]
    fn upper_bound_critical_symbol_scaling() {
        // Two-variable symbol with κ = 1/2, repeated zero at
        // s₀ = 1/2 + ρ log n / n and θ − 1/2 = 2ρ²(log n / n)², ρ = 2:
        // the bound should decay like (n/log n)^{-1/2}, i.e. the scaled
        // quantity bound·(n/log n)^{1/2} stays of order one.
        let sym = linear(1.5, &[(2, -0.5), (3, -0.5)]);
        let mc = MonteCarloSettings {
            samples: 200_000,
            seed: 83,
            c_emb: 1.0,
        };
        let rho: f64 = 2.0;
        let pinned = [0.955_293_418_814_293_5, 1.114_978_000_035_611_3, 1.231_244_499_606_434_2];
        for (n, want) in [16usize, 32, 64].into_iter().zip(pinned) {
            let log_n = (n as f64).ln();
            let theta = 0.5 + 2.0 * (rho * log_n / n as f64).powi(2);
            let s0 = c(0.5 + rho * log_n / n as f64, 0.0);
            let zeros = vec![s0; n - 1];
            let got = upper_bound_a(&sym, &zeros, theta, None, &mc).unwrap();
            let scaled = got.bound * (n as f64 / log_n).sqrt();
            assert!(
                (0.3..=3.0).contains(&scaled),
                "scaled bound escaped at n = {n}: {scaled}"
            );
            // Regression pin for the deterministic grid + sample stream.
            assert_close(scaled, want, 1e-9);
        }
    }

    #[test]
    fn upper_bound_rejects_small_samples() {
        let sym = linear(2.0, &[]);
        let mc = MonteCarloSettings {
            samples: 100,
            seed: 1,
            c_emb: 1.0,
        };
        assert!(matches!(
            upper_bound_a(&sym, &[c(2.0, 0.0)], 1.5, None, &mc),
            Err(Error::StatisticallyMeaningless { .. })
        ));
    }

    #[test]
    fn profile_round_trips_through_json() {
        let lift = linear(1.0, &[(2, -0.5)]).bohr_lift();
        let profile = pullback_profile(&lift, &[0.1, 0.05], 20_000, 4).unwrap();
        let text = serde_json::to_string(&profile).unwrap();
        let back: PullbackProfile = serde_json::from_str(&text).unwrap();
        assert_eq!(profile, back);
    }

    // -- property tests -------------------------------------------------

    fn half_plane_point() -> impl Strategy<Value = Complex64> {
        (0.55f64..3.0, -5.0f64..5.0).prop_map(|(re, im)| c(re, im))
    }

    proptest! {
        #[test]
        fn pseudo_distance_forms_agree_and_stay_in_range(
            s in half_plane_point(),
            w in half_plane_point(),
        ) {
            // The call itself cross-checks the two closed forms.
            let rho = pseudo_distance(s, w);
            prop_assert!((0.0..1.0).contains(&rho));
        }

        #[test]
        fn pseudo_distance_invariant_under_vertical_translation(
            s in half_plane_point(),
            w in half_plane_point(),
            shift in -20.0f64..20.0,
        ) {
            let moved = pseudo_distance(s + c(0.0, shift), w + c(0.0, shift));
            prop_assert!((moved - pseudo_distance(s, w)).abs() <= 1e-12);
        }

        #[test]
        fn delta_never_exceeds_eta(
            points in proptest::collection::vec(half_plane_point(), 2..6),
        ) {
            let (eta, delta) = separation(&points).unwrap();
            prop_assert!(delta <= eta + 1e-15);
            prop_assert!(eta < 1.0);
        }

        #[test]
        fn box_norm_matches_subset_oracle(
            atoms in proptest::collection::vec(
                (half_plane_point(), 0.01f64..5.0),
                1..7,
            ),
        ) {
            let mu = FinitePointMeasure::with_weights(atoms).unwrap();
            let got = box_norm(&mu);
            let want = box_norm_subset_oracle(&mu);
            prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0));
        }

        #[test]
        fn box_norm_invariant_under_vertical_translation(
            atoms in proptest::collection::vec(
                (half_plane_point(), 0.01f64..5.0),
                1..6,
            ),
            shift in -50.0f64..50.0,
        ) {
            let mu = FinitePointMeasure::with_weights(atoms.clone()).unwrap();
            let moved = FinitePointMeasure::with_weights(
                atoms.into_iter().map(|(s, w)| (s + c(0.0, shift), w)).collect(),
            ).unwrap();
            let a = box_norm(&mu);
            let b = box_norm(&moved);
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn box_norm_covariant_under_boundary_dilation(
            atoms in proptest::collection::vec(
                (half_plane_point(), 0.01f64..5.0),
                1..6,
            ),
            lambda in 0.1f64..10.0,
        ) {
            // s ↦ 1/2 + λ(s − 1/2) scales squares by λ; rescaling the
            // weights by λ as well leaves the ratio invariant.
            let mu = FinitePointMeasure::with_weights(atoms.clone()).unwrap();
            let dilated = FinitePointMeasure::with_weights(
                atoms
                    .into_iter()
                    .map(|(s, w)| (c(0.5 + lambda * (s.re - 0.5), lambda * s.im), lambda * w))
                    .collect(),
            ).unwrap();
            let a = box_norm(&mu);
            let b = box_norm(&dilated);
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn crude_display_dominates_inverse_delta(
            points in proptest::collection::vec(half_plane_point(), 1..6),
        ) {
            let (_, delta) = separation(&points).unwrap();
            let bound = crude_delta_bound(&points).unwrap();
            prop_assert!(bound.display >= (1.0 / delta) * (1.0 - 1e-12));
        }

        #[test]
        fn shapiro_shields_ordering(
            points in proptest::collection::vec(half_plane_point(), 1..6),
        ) {
            let got = shapiro_shields_bounds(&points).unwrap();
            prop_assert!(got.lower >= 1.0);
            prop_assert!(got.lower <= got.upper_proxy * (1.0 + 1e-12));
        }

        #[test]
        fn secondlem_monotone_in_each_argument(
            m in 1.0f64..5.0,
            theta in 0.6f64..2.0,
            r in 3.5f64..8.0,
            cc in 0.1f64..4.0,
            bump in 0.01f64..2.0,
        ) {
            let base = secondlem_formula(m, theta, r, cc).unwrap();
            prop_assert!(secondlem_formula(m + bump, theta, r, cc).unwrap() >= base);
            prop_assert!(secondlem_formula(m, theta, r + bump, cc).unwrap() >= base);
            prop_assert!(secondlem_formula(m, theta, r, cc + bump).unwrap() >= base);
        }

        #[test]
        fn blaschke_contractive_right_of_theta(
            zeros in proptest::collection::vec(
                (1.0f64..3.0, -4.0f64..4.0).prop_map(|(re, im)| c(re, im)),
                1..5,
            ),
            sigma in 0.0f64..3.0,
            t in -6.0f64..6.0,
        ) {
            let theta = 1.0;
            let s = c(theta + sigma, t);
            prop_assert!(blaschke_eval(&zeros, theta, s).norm() <= 1.0 + 1e-12);
        }
    }
}
