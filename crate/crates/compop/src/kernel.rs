//! Reproducing kernels and kernel-subspace lower bounds.
//!
//! ℋ² carries the reproducing kernel `K_w(s) = ζ(s + w̄)` at half-plane
//! points `Re w > 1/2`, and its Bohr lift carries the polydisc kernel
//! `K_w(s) = Π_j 1/(1 − w̄^{(j)} q_j^{-s})` at points `w ∈ 𝔻^d` tied to a
//! list of multiplicatively independent frequencies `q`.  Because the
//! adjoint of a composition operator maps kernels to kernels
//! (`C_φ* K_w = K_{φ(w)}`), a family of *targets* `s_j` together with
//! verified *preimages* `Φ(z) = s_j` pins down an `n`-dimensional subspace
//! on which `C_φ*` acts explicitly — and the smallest generalized
//! eigenvalue of the two Gram matrices turns into a lower bound for the
//! `n`-th approximation number `a_n(C_φ)`.
//!
//! The module provides:
//!
//! * [`KernelPoint`] / [`kernel_inner`] — kernel vectors at half-plane or
//!   polydisc points and their inner products (`ζ` at a complex argument,
//!   or the finite product over polydisc coordinates);
//! * [`PointConfiguration`] — a verified target/preimage system with
//!   normalising weights `‖K_z‖^{-2}`;
//! * [`bernstein_lower_bound`] — the pencil value
//!   `sqrt(λ_min(A, B))`, a rigorous-in-exact-arithmetic lower bound for
//!   `a_n(C_φ)`;
//! * [`grid_section8`] — the tangency grid of targets on the critical
//!   abscissa with torus-like polydisc preimages, the construction behind
//!   the `n^{-(d-1)/2}` lower bounds for linear symbols with `κ = 1/2`;
//! * [`horizontal_chain`] — the vertical chain of half-plane preimages
//!   `σ₀ + i a k` for symbols with `c₀ ≥ 1`, whose targets stay separated
//!   by at least `a/3`.
//!
//! Gram matrices are gated for numerical positive definiteness before the
//! pencil is solved; a degenerate preimage system is reported as an error
//! rather than silently producing noise.

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::la::{self, ComplexMatrix};
use crate::poly::ln_biguint;
use crate::symbol::{LinearSymbol, Symbol};
use crate::zeta::zeta_real;

/// Largest admissible `|Φ(z) − s_j|` when a preimage is verified.
pub const PREIMAGE_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// A Gram matrix counts as numerically positive definite when its smallest
/// eigenvalue exceeds this fraction of the largest.  The threshold sits a
/// small factor above the Hermitian eigensolver's own noise floor
/// (machine epsilon ≈ 2.2e-16 relative to the largest eigenvalue): a
/// computed smallest eigenvalue below it is indistinguishable from zero,
/// and the generalized eigenproblem built on such a matrix returns noise
/// rather than a usable pencil minimum.  Tangency grids condition
/// exponentially in the number of points, so this gate — not runtime — is
/// what caps the reachable grid size in double precision.
pub const GRAM_CONDITION_GATE: f64 = 2e-15;

/// Diagonal nudge applied to the preimage Gram matrix when the generalized
/// eigensolver's internal Cholesky factorization fails even though the
/// eigenvalue gate passed.  Reported in [`BernsteinBound::jitter_applied`].
pub const PENCIL_JITTER: f64 = 1e-14;

/// Default cap on preimages kept per target by [`grid_section8`]; the
/// `β`-lattice has `n^{d−1}` points and explodes for `d ≥ 4`.
pub const DEFAULT_PREIMAGE_BUDGET: usize = 4096;

/// Largest approach parameter tried by the doubling search in
/// [`grid_section8`].
pub const MAX_APPROACH_PARAMETER: u64 = 1 << 20;

/// Absolute truncation target for `ζ` at complex arguments.
const COMPLEX_ZETA_TOLERANCE: f64 = 1e-12;

/// Two targets closer than this are treated as duplicates.
const DUPLICATE_TOLERANCE: f64 = 1e-13;

// ---------------------------------------------------------------------------
// Kernel points
// ---------------------------------------------------------------------------

/// A point at which a reproducing kernel of ℋ² (or of its Bohr lift) is
/// anchored.
///
/// Serialized as `{"variant":"half-plane","s":[re,im]}` or
/// `{"variant":"polydisc","q":["2","3"],"w":[[re,im],…]}`; deserialization
/// re-validates the domain invariants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "KernelPointRepr", try_from = "KernelPointRepr")]
pub enum KernelPoint {
    /// `s` with `Re s > 1/2`; kernel `K_s(·) = ζ(· + s̄)`.
    HalfPlane(Complex64),
    /// `w ∈ 𝔻^d` tied to frequencies `q`; kernel `Π_j 1/(1 − w̄^{(j)} q_j^{-·})`.
    Polydisc {
        /// The frequency list `q` (each `q_j ≥ 2`).
        q: Vec<BigUint>,
        /// The coordinates `w^{(j)}`, each strictly inside the unit disc.
        w: Vec<Complex64>,
    },
}

impl KernelPoint {
    /// A half-plane point.
    ///
    /// # Errors
    ///
    /// `s` must be finite with `Re s > 1/2`.
    pub fn half_plane(s: Complex64) -> Result<KernelPoint> {
        if !s.re.is_finite() || !s.im.is_finite() || s.re <= 0.5 {
            return Err(Error::MalformedInput {
                what: "kernel point",
                detail: format!("half-plane point needs Re s > 1/2, got {s}"),
            });
        }
        Ok(KernelPoint::HalfPlane(s))
    }

    /// A polydisc point over the frequency list `q`.
    ///
    /// # Errors
    ///
    /// `q` and `w` must have equal positive length, every `q_j ≥ 2`, and
    /// every `|w^{(j)}| < 1`.  (Multiplicative independence of `q` is the
    /// caller's contract; it is established once by
    /// [`LinearSymbol::new`](crate::symbol::LinearSymbol::new), not re-derived here.)
    pub fn polydisc(q: Vec<BigUint>, w: Vec<Complex64>) -> Result<KernelPoint> {
        if q.is_empty() || q.len() != w.len() {
            return Err(Error::MalformedInput {
                what: "kernel point",
                detail: format!(
                    "polydisc point needs matching nonempty lists, got {} frequencies, {} coordinates",
                    q.len(),
                    w.len()
                ),
            });
        }
        let two = BigUint::from(2u32);
        if let Some(bad) = q.iter().find(|qj| **qj < two) {
            return Err(Error::MalformedInput {
                what: "kernel point",
                detail: format!("frequency {bad} must be ≥ 2"),
            });
        }
        if let Some(bad) = w.iter().find(|wj| !(wj.norm() < 1.0)) {
            return Err(Error::MalformedInput {
                what: "kernel point",
                detail: format!("coordinate {bad} must lie strictly inside the unit disc"),
            });
        }
        Ok(KernelPoint::Polydisc { q, w })
    }

    /// Variant name used in error messages.
    pub fn variant_name(&self) -> &'static str {
        match self {
            KernelPoint::HalfPlane(_) => "half-plane",
            KernelPoint::Polydisc { .. } => "polydisc",
        }
    }

    /// `‖K_z‖²`: `ζ(2 Re s)` on the half-plane, `Π_j 1/(1 − |w^{(j)}|²)` on
    /// the polydisc.
    pub fn norm_sq(&self) -> Result<f64> {
        match self {
            KernelPoint::HalfPlane(s) => zeta_real(2.0 * s.re),
            KernelPoint::Polydisc { w, .. } => {
                Ok(w.iter().map(|wj| 1.0 / (1.0 - wj.norm_sqr())).product())
            }
        }
    }
}

/// Serde-facing shape of [`KernelPoint`].
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
enum KernelPointRepr {
    HalfPlane { s: (f64, f64) },
    Polydisc { q: Vec<String>, w: Vec<(f64, f64)> },
}

impl From<KernelPoint> for KernelPointRepr {
    fn from(p: KernelPoint) -> KernelPointRepr {
        match p {
            KernelPoint::HalfPlane(s) => KernelPointRepr::HalfPlane { s: (s.re, s.im) },
            KernelPoint::Polydisc { q, w } => KernelPointRepr::Polydisc {
                q: q.iter().map(BigUint::to_string).collect(),
                w: w.iter().map(|z| (z.re, z.im)).collect(),
            },
        }
    }
}

impl TryFrom<KernelPointRepr> for KernelPoint {
    type Error = Error;

    fn try_from(r: KernelPointRepr) -> Result<KernelPoint> {
        match r {
            KernelPointRepr::HalfPlane { s } => {
                KernelPoint::half_plane(Complex64::new(s.0, s.1))
            }
            KernelPointRepr::Polydisc { q, w } => {
                let q = q
                    .iter()
                    .map(|digits| {
                        digits.parse::<BigUint>().map_err(|e| Error::MalformedInput {
                            what: "kernel point",
                            detail: format!("frequency {digits:?}: {e}"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let w = w.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
                KernelPoint::polydisc(q, w)
            }
        }
    }
}

/// `⟨K_a, K_b⟩ = K_a(b)`: `ζ(b + ā)` on the half-plane, and
/// `Π_j 1/(1 − b^{(j)} · conj(a^{(j)}))` on the polydisc.
///
/// The half-plane case dispatches to [`zeta_real`] when `b + ā` lands on
/// the real axis and to an internal Euler–Maclaurin evaluation (truncated
/// Dirichlet sum plus integral/Bernoulli tail corrections with a rigorous
/// remainder estimate) otherwise.
///
/// # Errors
///
/// Mixed variants, or polydisc points over different frequency lists.
pub fn kernel_inner(a: &KernelPoint, b: &KernelPoint) -> Result<Complex64> {
    match (a, b) {
        (KernelPoint::HalfPlane(sa), KernelPoint::HalfPlane(sb)) => {
            let z = sb + sa.conj();
            if z.im == 0.0 {
                Ok(Complex64::new(zeta_real(z.re)?, 0.0))
            } else {
                zeta_complex(z)
            }
        }
        (
            KernelPoint::Polydisc { q: qa, w: wa },
            KernelPoint::Polydisc { q: qb, w: wb },
        ) => {
            if qa != qb {
                return Err(Error::MalformedInput {
                    what: "kernel point pair",
                    detail: format!(
                        "polydisc points live over different frequency lists ({} vs {})",
                        join_frequencies(qa),
                        join_frequencies(qb)
                    ),
                });
            }
            let mut acc = Complex64::new(1.0, 0.0);
            for (aj, bj) in wa.iter().zip(wb) {
                acc /= Complex64::new(1.0, 0.0) - bj * aj.conj();
            }
            Ok(acc)
        }
        (x, y) => Err(Error::MixedKernelVariants {
            left: x.variant_name(),
            right: y.variant_name(),
        }),
    }
}

fn join_frequencies(q: &[BigUint]) -> String {
    q.iter()
        .map(BigUint::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

// ---------------------------------------------------------------------------
// ζ at complex arguments (internal)
// ---------------------------------------------------------------------------

/// `|B₁₀| / 10!` — the coefficient of the first omitted Euler–Maclaurin
/// correction, used in the remainder estimate.
const B10_OVER_10_FACTORIAL: f64 = 2.087_675_698_786_810e-8;

/// `ζ(z)` for `Re z > 1` by Euler–Maclaurin summation: the partial sum to
/// `M`, the integral tail `M^{1-z}/(z−1)`, the half-term `−M^{-z}/2`, and
/// the Bernoulli corrections through `B₈`.  `M` starts at
/// `max(32, ⌈|Im z|⌉)` and doubles until the standard remainder estimate
/// (the `B₁₀` term scaled by `|z+9|/(Re z + 9)`) clears
/// [`COMPLEX_ZETA_TOLERANCE`].
fn zeta_complex(z: Complex64) -> Result<Complex64> {
    debug_assert!(z.re > 1.0, "kernel arguments satisfy Re > 1 by construction");
    let mut m: usize = 32.max(z.im.abs().ceil() as usize);
    while zeta_remainder_estimate(z, m) > COMPLEX_ZETA_TOLERANCE {
        m *= 2;
        if m > (1 << 26) {
            // Unreachable for arguments with Re > 1 (the estimate decays
            // like M^{-Re z - 9}); kept as a hard stop.
            return Err(Error::ZetaUnreachable {
                x: z.re,
                needed: m as f64,
                cap: (1u64 << 26) as f64,
            });
        }
    }

    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=m {
        sum += (-z * (n as f64).ln()).exp();
    }
    let mf = m as f64;
    let m_pow = (-z * mf.ln()).exp(); // M^{-z}
    sum += m_pow * mf / (z - 1.0); // M^{1-z}/(z−1)
    sum -= 0.5 * m_pow;

    // Corrections B₂/2!·z·M^{-z-1} − B₄-type … with the Bernoulli signs
    // folded into the alternation below.
    let minv = 1.0 / mf;
    let mut rising = z; // z(z+1)⋯ running product
    let mut mp = m_pow * minv; // M^{-z-1}
    sum += rising * mp / 12.0;
    rising = rising * (z + 1.0) * (z + 2.0);
    mp *= minv * minv; // M^{-z-3}
    sum -= rising * mp / 720.0;
    rising = rising * (z + 3.0) * (z + 4.0);
    mp *= minv * minv; // M^{-z-5}
    sum += rising * mp / 30_240.0;
    rising = rising * (z + 5.0) * (z + 6.0);
    mp *= minv * minv; // M^{-z-7}
    sum -= rising * mp / 1_209_600.0;
    Ok(sum)
}

/// Magnitude of the first omitted correction term, scaled by the standard
/// `|z + 9| / (Re z + 9)` factor that turns it into a remainder bound.
fn zeta_remainder_estimate(z: Complex64, m: usize) -> f64 {
    let mut product = 1.0;
    for i in 0..9 {
        product *= (z + i as f64).norm();
    }
    let mf = m as f64;
    B10_OVER_10_FACTORIAL
        * product
        * mf.powf(-(z.re + 9.0))
        * ((z + 9.0).norm() / (z.re + 9.0))
}

// ---------------------------------------------------------------------------
// Point configurations
// ---------------------------------------------------------------------------

/// A verified system of `n` distinct half-plane targets, per-target
/// preimage groups under a symbol, and the normalising weights
/// `‖K_z‖^{-2}` of each preimage.
///
/// Serialization keeps the weights for human inspection; deserialization
/// recomputes them from the points and rejects files where the two
/// disagree.  The preimage→target relation itself cannot be re-verified
/// without the symbol and is trusted on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "PointConfigurationRepr", try_from = "PointConfigurationRepr")]
pub struct PointConfiguration {
    targets: Vec<Complex64>,
    preimages: Vec<Vec<KernelPoint>>,
    weights: Vec<Vec<f64>>,
}

impl PointConfiguration {
    /// Builds and verifies a configuration: `map` must send every listed
    /// preimage to its target within [`PREIMAGE_RESIDUAL_TOLERANCE`].
    ///
    /// # Errors
    ///
    /// * targets outside the half-plane, or closer than `1e-13` to each
    ///   other ([`Error::DuplicatePoints`]);
    /// * empty target list, length mismatch, or an empty preimage group;
    /// * preimage groups mixing kernel variants or frequency lists;
    /// * a preimage that fails verification ([`Error::PreimageMismatch`]).
    pub fn new<F>(
        targets: Vec<Complex64>,
        preimages: Vec<Vec<KernelPoint>>,
        map: F,
    ) -> Result<PointConfiguration>
    where
        F: Fn(&KernelPoint) -> Complex64,
    {
        if targets.is_empty() {
            return Err(Error::MalformedInput {
                what: "point configuration",
                detail: "no targets".into(),
            });
        }
        if targets.len() != preimages.len() {
            return Err(Error::MalformedInput {
                what: "point configuration",
                detail: format!(
                    "{} targets but {} preimage groups",
                    targets.len(),
                    preimages.len()
                ),
            });
        }
        for (j, t) in targets.iter().enumerate() {
            if !t.re.is_finite() || !t.im.is_finite() || t.re <= 0.5 {
                return Err(Error::MalformedInput {
                    what: "point configuration",
                    detail: format!("target {j} = {t} is not in the half-plane Re > 1/2"),
                });
            }
        }
        check_distinct(&targets)?;
        let reference = preimages
            .iter()
            .flatten()
            .next()
            .ok_or(Error::MalformedInput {
                what: "point configuration",
                detail: "no preimages".into(),
            })?
            .clone();
        for (group, (target, points)) in targets.iter().zip(&preimages).enumerate() {
            if points.is_empty() {
                return Err(Error::MalformedInput {
                    what: "point configuration",
                    detail: format!("preimage group {group} is empty"),
                });
            }
            for (index, point) in points.iter().enumerate() {
                // kernel_inner is the arbiter of compatibility (variant and
                // frequency list); probing it here fails fast.
                kernel_inner(&reference, point)?;
                let residual = (map(point) - target).norm();
                if residual > PREIMAGE_RESIDUAL_TOLERANCE {
                    return Err(Error::PreimageMismatch {
                        group,
                        index,
                        residual,
                    });
                }
            }
        }
        let weights = preimages
            .iter()
            .map(|points| points.iter().map(|p| Ok(1.0 / p.norm_sq()?)).collect())
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(PointConfiguration {
            targets,
            preimages,
            weights,
        })
    }

    /// Number of targets `n`.
    pub fn n(&self) -> usize {
        self.targets.len()
    }

    /// The targets `s_j`.
    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }

    /// The preimage groups, aligned with [`Self::targets`].
    pub fn preimages(&self) -> &[Vec<KernelPoint>] {
        &self.preimages
    }

    /// Weights `‖K_z‖^{-2}`, aligned with [`Self::preimages`].
    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Counting masses `N_j = Σ_{z ∈ Z_j} ‖K_z‖^{-2}`.
    pub fn counting_masses(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.iter().sum()).collect()
    }

    /// Total number of preimage points across all groups.
    pub fn total_points(&self) -> usize {
        self.preimages.iter().map(Vec::len).sum()
    }

    /// `Some(d)` when the preimages are polydisc points over `d`
    /// frequencies, `None` for half-plane preimages.
    pub fn polydisc_dimension(&self) -> Option<usize> {
        match self.preimages.first().and_then(|g| g.first()) {
            Some(KernelPoint::Polydisc { q, .. }) => Some(q.len()),
            _ => None,
        }
    }
}

fn check_distinct(targets: &[Complex64]) -> Result<()> {
    for i in 0..targets.len() {
        for j in i + 1..targets.len() {
            if (targets[i] - targets[j]).norm() < DUPLICATE_TOLERANCE {
                return Err(Error::DuplicatePoints { i, j });
            }
        }
    }
    Ok(())
}

/// Serde-facing shape of [`PointConfiguration`].
#[derive(Clone, Serialize, Deserialize)]
struct PointConfigurationRepr {
    targets: Vec<(f64, f64)>,
    preimages: Vec<Vec<KernelPointRepr>>,
    weights: Vec<Vec<f64>>,
}

impl From<PointConfiguration> for PointConfigurationRepr {
    fn from(c: PointConfiguration) -> PointConfigurationRepr {
        PointConfigurationRepr {
            targets: c.targets.iter().map(|t| (t.re, t.im)).collect(),
            preimages: c
                .preimages
                .into_iter()
                .map(|g| g.into_iter().map(KernelPointRepr::from).collect())
                .collect(),
            weights: c.weights,
        }
    }
}

impl TryFrom<PointConfigurationRepr> for PointConfiguration {
    type Error = Error;

    fn try_from(r: PointConfigurationRepr) -> Result<PointConfiguration> {
        let targets: Vec<Complex64> = r
            .targets
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        if targets.is_empty()
            || targets.len() != r.preimages.len()
            || targets.len() != r.weights.len()
        {
            return Err(Error::MalformedInput {
                what: "point configuration",
                detail: "targets, preimages, and weights must have equal nonzero length"
                    .into(),
            });
        }
        for (j, t) in targets.iter().enumerate() {
            if !t.re.is_finite() || !t.im.is_finite() || t.re <= 0.5 {
                return Err(Error::MalformedInput {
                    what: "point configuration",
                    detail: format!("target {j} = {t} is not in the half-plane Re > 1/2"),
                });
            }
        }
        check_distinct(&targets)?;
        let preimages = r
            .preimages
            .into_iter()
            .map(|g| g.into_iter().map(KernelPoint::try_from).collect())
            .collect::<Result<Vec<Vec<KernelPoint>>>>()?;
        for (group, (points, stored)) in preimages.iter().zip(&r.weights).enumerate() {
            if points.is_empty() {
                return Err(Error::MalformedInput {
                    what: "point configuration",
                    detail: format!("preimage group {group} is empty"),
                });
            }
            if points.len() != stored.len() {
                return Err(Error::MalformedInput {
                    what: "point configuration",
                    detail: format!("weight group {group} has the wrong length"),
                });
            }
            for (index, (point, &w)) in points.iter().zip(stored).enumerate() {
                let expected = 1.0 / point.norm_sq()?;
                if !(w.is_finite() && (w - expected).abs() <= 1e-9 * expected.max(1.0)) {
                    return Err(Error::MalformedInput {
                        what: "point configuration",
                        detail: format!(
                            "weight {w} of group {group} point {index} disagrees with \
                             ‖K_z‖^{{-2}} = {expected}"
                        ),
                    });
                }
            }
        }
        Ok(PointConfiguration {
            targets,
            preimages,
            weights: r.weights,
        })
    }
}

// ---------------------------------------------------------------------------
// The pencil lower bound
// ---------------------------------------------------------------------------

/// Result of [`bernstein_lower_bound`].
#[derive(Clone, Debug, Serialize)]
pub struct BernsteinBound {
    /// `sqrt(λ_min(A, B))` — a lower bound for `a_n(C_φ)` with
    /// `n = config.n()`.
    pub bound: f64,
    /// The raw smallest generalized eigenvalue (clamped at zero).
    pub pencil_min: f64,
    /// Whether the diagonal jitter fallback was needed.
    pub jitter_applied: bool,
    /// `(min, max)` eigenvalues of the target Gram matrix `A`.
    pub target_gram_range: (f64, f64),
    /// `(min, max)` eigenvalues of the preimage Gram matrix `B`.
    pub preimage_gram_range: (f64, f64),
}

/// The kernel-subspace lower bound `a_n(C_φ) ≥ sqrt(λ_min(A, B))`.
///
/// With normalised kernel sums `g_j = N_j^{-1} Σ_{z ∈ Z_j} ‖K_z‖^{-2} K_z`
/// over the preimage groups, the adjoint acts by `C_φ* g_j = K_{s_j}`, so
/// on the span of the `g_j` the ratio `‖C_φ* f‖ / ‖f‖` is controlled by the
/// pencil `A·b = λ·B·b` of the two Gram matrices
/// `A[j,k] = ⟨K_{s_k}, K_{s_j}⟩` (targets) and `B[j,k] = ⟨g_k, g_j⟩`
/// (preimages, expanded through [`kernel_inner`]).  The smallest
/// generalized eigenvalue is exactly the squared Bernstein number of that
/// `n`-dimensional subspace, hence a lower bound for `a_n(C_φ)²`.
///
/// # Errors
///
/// * [`Error::DegeneratePreimageSystem`] when `B` fails the positive
///   definiteness gate ([`GRAM_CONDITION_GATE`]), including after the
///   jitter fallback;
/// * [`Error::InvalidBoundParameters`] when `A` fails the same gate
///   (possible only for nearly coincident targets);
/// * kernel evaluation errors.
pub fn bernstein_lower_bound(config: &PointConfiguration) -> Result<BernsteinBound> {
    let n = config.n();
    let target_points = config
        .targets
        .iter()
        .map(|&s| KernelPoint::half_plane(s))
        .collect::<Result<Vec<_>>>()?;

    let mut a = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            a.set(j, k, kernel_inner(&target_points[k], &target_points[j])?);
        }
    }
    a.hermitize();

    let masses = config.counting_masses();
    let mut b = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (u, &wu) in config.preimages[k].iter().zip(&config.weights[k]) {
                for (v, &wv) in config.preimages[j].iter().zip(&config.weights[j]) {
                    acc += wu * wv * kernel_inner(u, v)?;
                }
            }
            b.set(j, k, acc / (masses[j] * masses[k]));
        }
    }
    b.hermitize();

    let a_eigs = la::hermitian_eigenvalues(&a)?;
    let (a_min, a_max) = (a_eigs[0], a_eigs[n - 1]);
    if !(a_min > GRAM_CONDITION_GATE * a_max) {
        return Err(Error::InvalidBoundParameters {
            reason: format!(
                "target Gram matrix numerically singular: eigenvalue range \
                 [{a_min:.3e}, {a_max:.3e}]"
            ),
        });
    }
    let b_eigs = la::hermitian_eigenvalues(&b)?;
    let (b_min, b_max) = (b_eigs[0], b_eigs[n - 1]);
    if !(b_min > GRAM_CONDITION_GATE * b_max) {
        return Err(Error::DegeneratePreimageSystem {
            min_eig: b_min,
            max_eig: b_max,
            cond: if b_min > 0.0 { b_max / b_min } else { f64::INFINITY },
        });
    }

    let mut jitter_applied = false;
    let pencil = match la::hermitian_generalized_eigenvalues(&a, &b) {
        Ok(eigs) => eigs,
        Err(Error::Lapack { routine: "zhegv", info }) if info > n as i32 => {
            // The eigenvalue gate passed but the internal Cholesky still
            // rejected B; nudge the diagonal once and retry.
            jitter_applied = true;
            let mut jittered = b.clone();
            for i in 0..n {
                jittered.set(i, i, jittered.get(i, i) + PENCIL_JITTER);
            }
            la::hermitian_generalized_eigenvalues(&a, &jittered).map_err(|_| {
                Error::DegeneratePreimageSystem {
                    min_eig: b_min,
                    max_eig: b_max,
                    cond: b_max / b_min,
                }
            })?
        }
        Err(e) => return Err(e),
    };
    let pencil_min = pencil[0].max(0.0);
    Ok(BernsteinBound {
        bound: pencil_min.sqrt(),
        pencil_min,
        jitter_applied,
        target_gram_range: (a_min, a_max),
        preimage_gram_range: (b_min, b_max),
    })
}

// ---------------------------------------------------------------------------
// The tangency grid
// ---------------------------------------------------------------------------

/// Output of [`grid_section8`].
#[derive(Clone, Debug, Serialize)]
pub struct Section8Grid {
    /// The verified target/preimage system.
    pub config: PointConfiguration,
    /// The approach parameter `ν` found by the doubling search.
    pub nu: u64,
    /// Size of the full `β`-lattice `n^{d−1}` (saturating).
    pub lattice_size: u64,
    /// Whether the preimage budget forced stride sampling of the lattice.
    pub sampled: bool,
}

/// Builds the tangency grid for a real-reduced linear symbol with
/// `κ = 1/2`: targets `s_j = 1/2 + ν n^{-2} + i j n^{-2}` for
/// `−n/2 < j ≤ n/2`, and per target the polydisc preimages with
/// coordinates `z^{(ℓ)}_β = (1 − n^{-2}) e^{i β_ℓ n^{-2}}` (`β_ℓ ∈ {1..n}`,
/// `ℓ ≥ 2`) and the first coordinate solved from the affine lift,
/// `z^{(1)} = |c_{q_1}|^{-1} (c₁ + Σ_{ℓ≥2} c_{q_ℓ} z^{(ℓ)} − s_j)`.
///
/// `ν` is the smallest value in `{1, 2, 4, …}` for which every constructed
/// first coordinate satisfies `|z^{(1)}| ≤ 1 − n^{-2}` (the admissibility
/// threshold of the construction); the search stops at
/// [`MAX_APPROACH_PARAMETER`].
///
/// Uses [`DEFAULT_PREIMAGE_BUDGET`]; see [`grid_section8_with_budget`].
///
/// # Panics
///
/// See [`grid_section8_with_budget`].
///
/// # Errors
///
/// [`Error::NoAdmissibleGrid`] when the doubling search is exhausted.
pub fn grid_section8(sym: &LinearSymbol, n: usize) -> Result<Section8Grid> {
    grid_section8_with_budget(sym, n, DEFAULT_PREIMAGE_BUDGET)
}

/// As [`grid_section8`] with an explicit per-target preimage budget.  When
/// the `β`-lattice exceeds the budget it is sampled with a deterministic
/// stride; any subset of preimages still yields a valid (if weaker) lower
/// bound.
///
/// # Panics
///
/// `sym` must be real-reduced (real `c₁`, negative real coefficients — see
/// [`LinearSymbol::reduce_to_real`]) with `κ = 1/2` within `1e-12`;
/// `n ≥ 2`; `budget ≥ 1`.
pub fn grid_section8_with_budget(
    sym: &LinearSymbol,
    n: usize,
    budget: usize,
) -> Result<Section8Grid> {
    assert!(
        sym.is_real_negative(),
        "grid needs a real-reduced symbol; call reduce_to_real first"
    );
    assert!(
        (sym.kappa() - 0.5).abs() <= 1e-12,
        "grid is defined on the critical boundedness line κ = 1/2, got κ = {}",
        sym.kappa()
    );
    assert!(n >= 2, "grid needs n ≥ 2");
    assert!(budget >= 1, "preimage budget must be positive");

    let d = sym.dimension();
    let c1 = sym.c1().re;
    let moduli: Vec<f64> = sym.terms().iter().map(|(_, c)| c.norm()).collect();
    let lead = moduli[0];
    let nn = (n * n) as f64;
    let eps = 1.0 / nn;

    // j ∈ (−n/2, n/2]: n consecutive integers.
    let j_values: Vec<i64> = {
        let lo = -((n as i64 - 1) / 2);
        let hi = n as i64 / 2;
        (lo..=hi).collect()
    };
    debug_assert_eq!(j_values.len(), n);

    // Deterministic stride sample of the (d−1)-dimensional β-lattice.
    let total: u128 = (n as u128).pow(d as u32 - 1);
    let sampled = total > budget as u128;
    let stride: u128 = if sampled {
        total.div_ceil(budget as u128)
    } else {
        1
    };
    let beta_sets: Vec<Vec<u32>> = {
        let mut sets = Vec::new();
        let mut idx: u128 = 0;
        while idx < total {
            let mut digits = Vec::with_capacity(d - 1);
            let mut rest = idx;
            for _ in 0..d - 1 {
                digits.push(1 + (rest % n as u128) as u32);
                rest /= n as u128;
            }
            sets.push(digits);
            idx += stride;
        }
        sets
    };

    // Tail coordinates z^{(ℓ)}, ℓ ≥ 2, are ν-independent.
    let radius = 1.0 - eps;
    let tails: Vec<Vec<Complex64>> = beta_sets
        .iter()
        .map(|betas| {
            betas
                .iter()
                .map(|&b| radius * Complex64::new(0.0, f64::from(b) * eps).exp())
                .collect()
        })
        .collect();

    let mut nu: u64 = 1;
    let (targets, firsts) = loop {
        let targets: Vec<Complex64> = j_values
            .iter()
            .map(|&j| Complex64::new(0.5 + nu as f64 * eps, j as f64 * eps))
            .collect();
        let mut admissible = true;
        let mut firsts: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        'targets: for s in &targets {
            let mut row = Vec::with_capacity(tails.len());
            for tail in &tails {
                let mut affine = Complex64::new(c1, 0.0) - s;
                for (ell, z) in tail.iter().enumerate() {
                    affine -= moduli[ell + 1] * z;
                }
                let z1 = affine / lead;
                if z1.norm() > radius {
                    admissible = false;
                    break 'targets;
                }
                row.push(z1);
            }
            firsts.push(row);
        }
        if admissible {
            break (targets, firsts);
        }
        nu = nu
            .checked_mul(2)
            .filter(|&v| v <= MAX_APPROACH_PARAMETER)
            .ok_or(Error::NoAdmissibleGrid {
                nu_max: MAX_APPROACH_PARAMETER,
            })?;
    };

    let q: Vec<BigUint> = sym.terms().iter().map(|(qj, _)| qj.clone()).collect();
    let preimages = firsts
        .iter()
        .map(|row| {
            row.iter()
                .zip(&tails)
                .map(|(&z1, tail)| {
                    let mut w = Vec::with_capacity(d);
                    w.push(z1);
                    w.extend_from_slice(tail);
                    KernelPoint::polydisc(q.clone(), w)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let lift = sym.bohr_lift();
    let full = sym.to_symbol();
    let config = PointConfiguration::new(targets, preimages, |p| match p {
        KernelPoint::Polydisc { w, .. } => lift.apply(w),
        KernelPoint::HalfPlane(s) => full.apply(*s),
    })?;
    Ok(Section8Grid {
        config,
        nu,
        lattice_size: u64::try_from(total).unwrap_or(u64::MAX),
        sampled,
    })
}

// ---------------------------------------------------------------------------
// The horizontal chain
// ---------------------------------------------------------------------------

/// Output of [`horizontal_chain`].
#[derive(Clone, Debug, Serialize)]
pub struct HorizontalChain {
    /// The verified target/preimage system (half-plane preimages).
    pub config: PointConfiguration,
    /// Vertical spacing `a` of the preimages.
    pub spacing: f64,
    /// The rigorous supremum bound `Σ |c_m| m^{-σ₀} ≥ sup_{σ ≥ σ₀} |ψ|`.
    pub sup_bound: f64,
    /// The kernel-norm ratio factor
    /// `inf_j sqrt(ζ(2 Re s_j) / ζ(2 Re s′_j))` of the chain.
    pub ratio_factor: f64,
}

/// Builds the vertical chain of preimages `s′_k = σ₀ + i a k`, `|k| ≤ n/2`,
/// for a symbol with `c₀ ≥ 1`, with targets `φ(s′_k)`.
///
/// The spacing is `a = 3 × Σ_m |c_m| m^{-σ₀}` (three times a rigorous bound
/// on `sup_{Re s ≥ σ₀} |ψ(s)|`), which keeps the targets separated by at
/// least `a/3`; for `ψ ≡ 0` the degenerate `a = 0` is floored at `1`, any
/// positive spacing keeping the targets distinct.
///
/// # Panics
///
/// `c₀ ≥ 1`, `σ₀ > 1/2`, and `n ≥ 1` are the caller's contract.
///
/// # Errors
///
/// Propagates configuration verification (e.g. a `ψ` so large that a
/// target leaves the half-plane).
pub fn horizontal_chain(sym: &Symbol, n: usize, sigma0: f64) -> Result<HorizontalChain> {
    assert!(sym.c0() >= 1, "the chain needs c₀ ≥ 1");
    assert!(sigma0 > 0.5, "σ₀ must lie in the half-plane Re > 1/2");
    assert!(n >= 1, "need at least one point");

    let sup_bound: f64 = sym
        .psi()
        .terms()
        .map(|(m, c)| c.norm() * (-sigma0 * ln_biguint(m)).exp())
        .sum();
    let spacing = if sup_bound > 0.0 { 3.0 * sup_bound } else { 1.0 };

    let half = (n / 2) as i64;
    let preimage_points: Vec<Complex64> = (-half..=half)
        .map(|k| Complex64::new(sigma0, spacing * k as f64))
        .collect();
    let targets: Vec<Complex64> = preimage_points.iter().map(|&s| sym.apply(s)).collect();

    let preimage_norm = zeta_real(2.0 * sigma0)?;
    let mut ratio_factor = f64::INFINITY;
    for t in &targets {
        ratio_factor = ratio_factor.min((zeta_real(2.0 * t.re)? / preimage_norm).sqrt());
    }

    let preimages = preimage_points
        .iter()
        .map(|&s| Ok(vec![KernelPoint::half_plane(s)?]))
        .collect::<Result<Vec<_>>>()?;
    let config = PointConfiguration::new(targets, preimages, |p| match p {
        KernelPoint::HalfPlane(s) => sym.apply(*s),
        KernelPoint::Polydisc { .. } => unreachable!("chain preimages are half-plane points"),
    })?;
    Ok(HorizontalChain {
        config,
        spacing,
        sup_bound,
        ratio_factor,
    })
}

// ---------------------------------------------------------------------------
