//! Symbols `φ(s) = c₀·s + ψ(s)` of composition operators on ℋ², their
//! boundedness validation, κ functional, fixed points, and Bohr lifts.
//!
//! Two representations coexist:
//!
//! * [`Symbol`] — the general form: a nonnegative integer `c₀` plus a
//!   Dirichlet polynomial `ψ` (whose frequency-1 coefficient is `c₁`).
//! * [`LinearSymbol`] — the special class `c₁ + Σ_j c_{q_j} q_j^{-s}`
//!   with multiplicatively independent base frequencies `q_j ≥ 2`, for
//!   which boundedness is decided exactly by the κ criterion and which
//!   lifts to an affine self-map of the polydisc (the [`BohrLift`]).
//!
//! Validation never claims more than can be certified: for general ψ the
//! mapping property behind boundedness lives on an unbounded boundary, so
//! the verdict degrades to `Undecidable` when neither the coefficient-sum
//! bound nor a boundary sampling probe is decisive.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{ln_biguint, Cutoff, DirichletPoly};

/// Default bound for the multiplicative-independence verification: all
/// products `q₁^{α₁} ⋯ q_d^{α_d}` up to this value are enumerated and
/// checked for collisions.  Collisions beyond any realistic matrix cutoff
/// cannot affect a computed quantity, so this is a practical stand-in for
/// the (arithmetic, unverifiable-by-search) full independence.
pub const INDEPENDENCE_BOUND: u64 = 1_000_000_000;

/// Residual tolerance for [`Symbol::fixed_point`].
pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;

/// Maximum damped-Newton steps before giving up on a fixed point.
const NEWTON_MAX_STEPS: usize = 200;

/// A composition-operator symbol `φ(s) = c₀·s + ψ(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    /// The characteristic `c₀` (nonnegative integer slope).
    c0: u32,
    /// The Dirichlet-polynomial part `ψ(s) = Σ cₙ n^{-s}`; the coefficient
    /// at frequency 1 is `c₁`.
    psi: DirichletPoly,
}

/// A linear symbol `c₁ + Σ_{j=1}^d c_{q_j} q_j^{-s}` with multiplicatively
/// independent `q_j ≥ 2` and nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSymbol {
    c1: Complex64,
    terms: Vec<(BigUint, Complex64)>,
}

/// The Bohr lift `Φ(z) = c₁ + Σ_j c_{q_j} z^{(j)}` of a linear symbol: an
/// affine map of the `d`-dimensional polydisc.
#[derive(Debug, Clone, PartialEq)]
pub struct BohrLift {
    /// Constant part (same `c₁` as the source symbol).
    pub c1: Complex64,
    /// One coefficient per polydisc variable, in source term order.
    pub coefficients: Vec<Complex64>,
}

/// Boundedness verdict for a symbol, with the reason it was reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ValidationVerdict {
    /// `C_φ` is bounded on ℋ².
    Bounded {
        /// Which criterion certified boundedness.
        reason: String,
    },
    /// `C_φ` is not bounded on ℋ².
    Unbounded {
        /// Which criterion refuted boundedness.
        reason: String,
    },
    /// Neither provable nor refutable by the implemented criteria.
    Undecidable {
        /// Why no decision was reached.
        reason: String,
    },
}

impl ValidationVerdict {
    /// Whether the verdict is `Bounded`.
    pub fn is_bounded(&self) -> bool {
        matches!(self, ValidationVerdict::Bounded { .. })
    }

    /// The reason accompanying the verdict.
    pub fn reason(&self) -> &str {
        match self {
            ValidationVerdict::Bounded { reason }
            | ValidationVerdict::Unbounded { reason }
            | ValidationVerdict::Undecidable { reason } => reason,
        }
    }
}

/// Result of a fixed-point search: the point, the symbol derivative
/// there, and convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    /// The fixed point `α` with `φ(α) = α`.
    pub point: Complex64,
    /// `φ′(α) = −Σ cₙ (log n) n^{-α}`.
    pub derivative: Complex64,
    /// Final residual `|φ(α) − α|` (≤ [`FIXED_POINT_TOLERANCE`]).
    pub residual: f64,
    /// Newton steps taken.
    pub steps: usize,
}

impl Symbol {
    /// Builds a symbol from its slope `c₀` and polynomial part `ψ`.
    pub fn new(c0: u32, psi: DirichletPoly) -> Symbol {
        Symbol { c0, psi }
    }

    /// Constant symbol `φ ≡ c₁`.
    pub fn constant(c1: Complex64) -> Symbol {
        let mut psi = DirichletPoly::zero(Cutoff::Frequency(BigUint::one()));
        psi.add_term(BigUint::one(), c1);
        Symbol { c0: 0, psi }
    }

    /// The slope `c₀`.
    pub fn c0(&self) -> u32 {
        self.c0
    }

    /// The polynomial part `ψ` (including the constant `c₁` at frequency 1).
    pub fn psi(&self) -> &DirichletPoly {
        &self.psi
    }

    /// The constant coefficient `c₁ = ψ`'s frequency-1 coefficient.
    pub fn c1(&self) -> Complex64 {
        self.psi.coeff(&BigUint::one())
    }

    /// `Σ_{n≥2} |cₙ|`, the coefficient mass away from the constant.
    pub fn tail_norm(&self) -> f64 {
        self.psi
            .terms()
            .filter(|(n, _)| **n > BigUint::one())
            .map(|(_, c)| c.norm())
            .sum()
    }

    /// Evaluates `φ(s) = c₀·s + ψ(s)`.
    pub fn apply(&self, s: Complex64) -> Complex64 {
        Complex64::new(self.c0 as f64, 0.0) * s + self.psi.evaluate(s)
    }

    /// Evaluates `φ′(s) = c₀ − Σ cₙ (log n) n^{-s}`.
    pub fn derivative(&self, s: Complex64) -> Complex64 {
        Complex64::new(self.c0 as f64, 0.0) + self.psi.evaluate_derivative(s)
    }

    /// Whether every coefficient of ψ is real.
    pub fn is_real(&self) -> bool {
        self.psi.terms().all(|(_, c)| c.im == 0.0)
    }

    /// Attempts to view this symbol as a [`LinearSymbol`] (requires
    /// `c₀ = 0` and multiplicatively independent nonunit frequencies).
    pub fn as_linear(&self) -> Option<LinearSymbol> {
        if self.c0 != 0 {
            return None;
        }
        let terms: Vec<(BigUint, Complex64)> = self
            .psi
            .terms()
            .filter(|(n, _)| **n > BigUint::one())
            .map(|(n, c)| (n.clone(), *c))
            .collect();
        LinearSymbol::new(self.c1(), terms).ok()
    }

    /// Boundedness of `C_φ` on ℋ², decided by the strongest applicable
    /// criterion:
    ///
    /// 1. linear symbols (independent frequencies, `c₀ = 0`): bounded
    ///    **iff** `κ(φ) ≥ 1/2`;
    /// 2. constant ψ with `c₀ = 0`: bounded **iff** `Re c₁ > 1/2`;
    /// 3. `c₀ ≥ 1` with `ψ ≡ 0`, or with `Re c₁ > Σ_{n≥2} |cₙ|`
    ///    (which forces `Re ψ > 0` on the right half-plane): bounded;
    /// 4. otherwise a boundary probe samples `Re ψ(it)` on a logarithmic
    ///    grid: a sampled value strictly below the required threshold
    ///    refutes boundedness; absent a refutation the verdict is
    ///    `Undecidable` (sampling cannot *prove* a mapping property).
    pub fn validate(&self) -> ValidationVerdict {
        let c1 = self.c1();
        let tail = self.tail_norm();

        if self.c0 == 0 {
            if tail == 0.0 {
                // Constant map: needs its value inside the half-plane
                // Re s > 1/2 where ℋ² functions live.
                return if c1.re > 0.5 {
                    ValidationVerdict::Bounded {
                        reason: format!(
                            "constant symbol with Re c1 = {} > 1/2 lands inside the half-plane",
                            c1.re
                        ),
                    }
                } else {
                    ValidationVerdict::Unbounded {
                        reason: format!(
                            "constant symbol with Re c1 = {} ≤ 1/2 leaves the domain half-plane",
                            c1.re
                        ),
                    }
                };
            }
            if let Some(linear) = self.as_linear() {
                let kappa = linear.kappa();
                return if kappa >= 0.5 {
                    ValidationVerdict::Bounded {
                        reason: format!("linear symbol with kappa = {kappa} ≥ 1/2"),
                    }
                } else {
                    ValidationVerdict::Unbounded {
                        reason: format!("linear symbol with kappa = {kappa} < 1/2"),
                    }
                };
            }
            // General c₀ = 0 polynomial: ψ must map Re s > 0 into
            // Re s > 1/2.  Coefficient-sum bound is sufficient:
            if c1.re - tail >= 0.5 {
                return ValidationVerdict::Bounded {
                    reason: format!(
                        "coefficient-sum bound: Re c1 − Σ|c_n| = {} ≥ 1/2 keeps ψ in the half-plane",
                        c1.re - tail
                    ),
                };
            }
            let (min_re, at) = self.boundary_probe();
            if min_re < 0.5 - 1e-9 {
                return ValidationVerdict::Unbounded {
                    reason: format!(
                        "boundary probe: Re ψ({at:.6e}·i) = {min_re:.12} < 1/2, \
                         so ψ leaves the half-plane"
                    ),
                };
            }
            return ValidationVerdict::Undecidable {
                reason: format!(
                    "sampled boundary minimum Re ψ(it) = {min_re:.12} stays ≥ 1/2, but \
                     sampling cannot certify the mapping property for dependent frequencies"
                ),
            };
        }

        // c₀ ≥ 1: ψ must map Re s > 0 into Re s ≥ 0.
        if self.psi.is_empty() {
            return ValidationVerdict::Bounded {
                reason: format!("pure dilation s ↦ {}·s", self.c0),
            };
        }
        if c1.re > tail {
            return ValidationVerdict::Bounded {
                reason: format!(
                    "c0 = {} ≥ 1 and Re c1 − Σ|c_n| = {} > 0 keeps ψ in the right half-plane",
                    self.c0,
                    c1.re - tail
                ),
            };
        }
        let (min_re, at) = self.boundary_probe();
        if min_re < -1e-9 {
            return ValidationVerdict::Unbounded {
                reason: format!(
                    "boundary probe: Re ψ({at:.6e}·i) = {min_re:.12} < 0 with c0 ≥ 1"
                ),
            };
        }
        ValidationVerdict::Undecidable {
            reason: format!(
                "sampled boundary minimum Re ψ(it) = {min_re:.12} stays ≥ 0, but \
                 sampling cannot certify the mapping property"
            ),
        }
    }

    /// Minimum of `Re ψ(it)` over a symmetric logarithmic grid of sample
    /// heights (plus `t = 0`); returns the minimum and its location.
    fn boundary_probe(&self) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        let mut check = |t: f64| {
            let v = self.psi.evaluate(Complex64::new(0.0, t)).re;
            if v < best.0 {
                best = (v, t);
            }
        };
        check(0.0);
        // 4000 points per sign over 9 decades: ψ is a trigonometric
        // polynomial in log-frequencies, so a dense log grid hits every
        // phase regime at desk scale.
        const DECADES: (f64, f64) = (-3.0, 6.0);
        const STEPS: usize = 4000;
        for k in 0..=STEPS {
            let e = DECADES.0 + (DECADES.1 - DECADES.0) * k as f64 / STEPS as f64;
            let t = 10f64.powf(e);
            check(t);
            check(-t);
        }
        best
    }

    /// Locates the fixed point `α = φ(α)` of a bounded symbol with
    /// `c₀ = 0` by damped Newton iteration started at `c₁`, and returns
    /// `φ′(α)` alongside.  For real-coefficient symbols a bracketing
    /// bisection on the real axis independently cross-checks the result.
    ///
    /// # Errors
    ///
    /// * [`Error::NoFixedPointForShift`] if `c₀ ≥ 1` (vertical
    ///   translations move every point).
    /// * [`Error::SymbolNotBounded`] if validation does not certify
    ///   boundedness.
    /// * [`Error::NoFixedPointLocated`] if Newton fails to reach residual
    ///   `1e-12` in 200 steps, or the real-axis cross-check disagrees.
    pub fn fixed_point(&self) -> Result<FixedPoint> {
        if self.c0 != 0 {
            return Err(Error::NoFixedPointForShift { c0: self.c0 });
        }
        let verdict = self.validate();
        if !verdict.is_bounded() {
            return Err(Error::SymbolNotBounded {
                reason: verdict.reason().to_string(),
            });
        }

        let f = |s: Complex64| self.psi.evaluate(s) - s;
        let fp = |s: Complex64| self.psi.evaluate_derivative(s) - Complex64::new(1.0, 0.0);

        let mut s = self.c1();
        let mut residual = f(s).norm();
        let mut steps = 0;
        while residual > FIXED_POINT_TOLERANCE && steps < NEWTON_MAX_STEPS {
            steps += 1;
            let deriv = fp(s);
            if deriv.norm() < 1e-14 {
                return Err(Error::NoFixedPointLocated { residual, steps });
            }
            let full_step = -f(s) / deriv;
            // Damping: halve the step until the residual decreases.
            let mut damp = 1.0;
            let mut next = s + full_step;
            let mut next_res = f(next).norm();
            while next_res > residual && damp > 1e-6 {
                damp *= 0.5;
                next = s + full_step * damp;
                next_res = f(next).norm();
            }
            if next_res > residual {
                return Err(Error::NoFixedPointLocated { residual, steps });
            }
            s = next;
            residual = next_res;
        }
        if residual > FIXED_POINT_TOLERANCE {
            return Err(Error::NoFixedPointLocated { residual, steps });
        }

        if self.is_real() {
            // Independent bracketing bisection on the real axis.
            if let Some(alpha_real) = self.real_axis_bisection() {
                if (s - Complex64::new(alpha_real, 0.0)).norm() > 1e-8 {
                    return Err(Error::NoFixedPointLocated { residual, steps });
                }
            }
        }

        Ok(FixedPoint {
            point: s,
            derivative: self.psi.evaluate_derivative(s),
            residual,
            steps,
        })
    }

    /// Bracketing bisection for `ψ(x) = x` on the real axis; `None` when
    /// no sign change is found on the scan grid (e.g. tangential cases).
    fn real_axis_bisection(&self) -> Option<f64> {
        let g = |x: f64| self.psi.evaluate(Complex64::new(x, 0.0)).re - x;
        let hi = self.c1().re + self.tail_norm() + 1.0;
        let mut prev_x = 0.5 + 1e-9;
        let mut prev_g = g(prev_x);
        let n_scan = 4096;
        for k in 1..=n_scan {
            let x = 0.5 + (hi - 0.5) * k as f64 / n_scan as f64;
            let gx = g(x);
            if prev_g == 0.0 {
                return Some(prev_x);
            }
            if prev_g * gx < 0.0 {
                // Bisect to 1e-13.
                let (mut a, mut b) = (prev_x, x);
                let (mut ga, _) = (prev_g, gx);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    let gm = g(mid);
                    if gm == 0.0 || b - a < 1e-13 {
                        return Some(mid);
                    }
                    if ga * gm < 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        ga = gm;
                    }
                }
                return Some(0.5 * (a + b));
            }
            prev_x = x;
            prev_g = gx;
        }
        None
    }
}

impl LinearSymbol {
    /// Builds a linear symbol, verifying term validity and multiplicative
    /// independence of the base frequencies up to [`INDEPENDENCE_BOUND`].
    ///
    /// # Errors
    ///
    /// * [`Error::InvalidSymbolTerm`] for a base < 2 or a zero coefficient;
    /// * [`Error::DependentFrequencies`] when two distinct exponent
    ///   vectors produce the same product within the verification bound.
    pub fn new(c1: Complex64, terms: Vec<(BigUint, Complex64)>) -> Result<LinearSymbol> {
        LinearSymbol::with_independence_bound(c1, terms, INDEPENDENCE_BOUND)
    }

    /// As [`LinearSymbol::new`] with an explicit verification bound.
    pub fn with_independence_bound(
        c1: Complex64,
        terms: Vec<(BigUint, Complex64)>,
        bound: u64,
    ) -> Result<LinearSymbol> {
        let two = BigUint::from(2u32);
        for (q, c) in &terms {
            if *q < two {
                return Err(Error::InvalidSymbolTerm {
                    q: q.clone(),
                    re: c.re,
                    im: c.im,
                    reason: "base frequency must be ≥ 2".into(),
                });
            }
            if c.norm() == 0.0 {
                return Err(Error::InvalidSymbolTerm {
                    q: q.clone(),
                    re: c.re,
                    im: c.im,
                    reason: "coefficient must be nonzero".into(),
                });
            }
        }
        if let Some(collision) = find_collision(&terms, bound) {
            let q_list = terms
                .iter()
                .map(|(q, _)| q.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::DependentFrequencies {
                value: collision,
                q_list,
            });
        }
        Ok(LinearSymbol { c1, terms })
    }

    /// The constant coefficient `c₁`.
    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    /// The `(q_j, c_{q_j})` terms, in construction order.
    pub fn terms(&self) -> &[(BigUint, Complex64)] {
        &self.terms
    }

    /// Number of terms `d`.
    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    /// `κ(φ) = Re c₁ − Σ_j |c_{q_j}|` — the exact boundedness functional:
    /// `C_φ` is bounded iff `κ ≥ 1/2`.
    pub fn kappa(&self) -> f64 {
        self.c1.re - self.terms.iter().map(|(_, c)| c.norm()).sum::<f64>()
    }

    /// The Bohr lift `Φ(z) = c₁ + Σ_j c_{q_j} z^{(j)}`.
    pub fn bohr_lift(&self) -> BohrLift {
        BohrLift {
            c1: self.c1,
            coefficients: self.terms.iter().map(|(_, c)| *c).collect(),
        }
    }

    /// The unitarily equivalent real-coefficient symbol: `c₁ ↦ Re c₁`,
    /// `c_{q_j} ↦ −|c_{q_j}|`.  Approximation numbers are invariant under
    /// this reduction (rotations of each polydisc variable and a vertical
    /// translation conjugate the two operators by unitaries).
    pub fn reduce_to_real(&self) -> LinearSymbol {
        LinearSymbol {
            c1: Complex64::new(self.c1.re, 0.0),
            terms: self
                .terms
                .iter()
                .map(|(q, c)| (q.clone(), Complex64::new(-c.norm(), 0.0)))
                .collect(),
        }
    }

    /// Whether the symbol already has real `c₁` and negative real
    /// coefficients (the normal form of [`LinearSymbol::reduce_to_real`]).
    pub fn is_real_negative(&self) -> bool {
        self.c1.im == 0.0 && self.terms.iter().all(|(_, c)| c.im == 0.0 && c.re < 0.0)
    }

    /// Converts to the general representation (ψ gains `c₁` at
    /// frequency 1).
    pub fn to_symbol(&self) -> Symbol {
        let max_q = self
            .terms
            .iter()
            .map(|(q, _)| q.clone())
            .max()
            .unwrap_or_else(BigUint::one);
        let mut psi = DirichletPoly::zero(Cutoff::Frequency(max_q));
        psi.add_term(BigUint::one(), self.c1);
        for (q, c) in &self.terms {
            psi.add_term(q.clone(), *c);
        }
        Symbol { c0: 0, psi }
    }

    /// Evaluates `φ(s)`.
    pub fn apply(&self, s: Complex64) -> Complex64 {
        let mut acc = self.c1;
        for (q, c) in &self.terms {
            acc += c * (-s * ln_biguint(q)).exp();
        }
        acc
    }
}

impl BohrLift {
    /// Dimension `d` of the polydisc the lift acts on.
    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    /// Evaluates `Φ(z) = c₁ + Σ_j c_j z^{(j)}`.
    ///
    /// # Panics
    ///
    /// Panics if `z.len() ≠ d`.
    pub fn apply(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.coefficients.len(), "dimension mismatch");
        let mut acc = self.c1;
        for (c, zj) in self.coefficients.iter().zip(z) {
            acc += c * zj;
        }
        acc
    }
}

/// Searches for two distinct exponent vectors whose products over the
/// base frequencies agree, among all products ≤ `bound`.  Returns the
/// colliding value if one exists.
fn find_collision(terms: &[(BigUint, Complex64)], bound: u64) -> Option<BigUint> {
    let mut bases: Vec<u64> = Vec::new();
    for (q, _) in terms {
        match q.to_u64() {
            // Bases beyond the bound can only appear with exponent 0, so
            // they cannot collide below it (they are > bound themselves).
            Some(v) if v <= bound => bases.push(v),
            _ => {}
        }
    }
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(1);
    // Depth-first enumeration of Π q_j^{α_j} ≤ bound, one base at a time;
    // each composite value must be reachable along exactly one path.
    fn dfs(bases: &[u64], idx: usize, value: u64, bound: u64, seen: &mut HashSet<u64>) -> Option<u64> {
        if idx == bases.len() {
            return None;
        }
        // Exponent 0 for this base:
        if let Some(v) = dfs(bases, idx + 1, value, bound, seen) {
            return Some(v);
        }
        let mut v = value;
        loop {
            v = match v.checked_mul(bases[idx]) {
                Some(nv) if nv <= bound => nv,
                _ => return None,
            };
            if !seen.insert(v) {
                return Some(v);
            }
            if let Some(w) = dfs(bases, idx + 1, v, bound, seen) {
                return Some(w);
            }
        }
    }
    dfs(&bases, 0, 1, bound, &mut seen).map(BigUint::from)
}

// ---------------------------------------------------------------------
// JSON symbol-spec format
// ---------------------------------------------------------------------

/// On-disk symbol description: either linear
/// (`{"c0": 0, "c1": [re, im], "terms": [[q, re, im], …]}`) or general
/// (`{"c0": n, "psi": [[freq-string, re, im], …]}`).
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum SymbolSpecJson {
    Linear {
        c0: u32,
        c1: (f64, f64),
        terms: Vec<(u64, f64, f64)>,
    },
    General {
        c0: u32,
        psi: DirichletPoly,
    },
}

/// A parsed symbol spec, preserving the linear structure when present.
#[derive(Debug, Clone)]
pub enum ParsedSymbol {
    /// Spec declared a linear symbol (and independence verified).
    Linear(LinearSymbol),
    /// Spec declared a general symbol.
    General(Symbol),
}

impl ParsedSymbol {
    /// The general-form view (linear symbols are converted).
    pub fn to_symbol(&self) -> Symbol {
        match self {
            ParsedSymbol::Linear(l) => l.to_symbol(),
            ParsedSymbol::General(s) => s.clone(),
        }
    }

    /// The linear view, if the spec was linear or the general form
    /// qualifies.
    pub fn as_linear(&self) -> Option<LinearSymbol> {
        match self {
            ParsedSymbol::Linear(l) => Some(l.clone()),
            ParsedSymbol::General(s) => s.as_linear(),
        }
    }
}

/// Parses a JSON symbol spec (see [`ParsedSymbol`] for the two shapes).
///
/// # Errors
///
/// [`Error::Json`] on syntax errors, [`Error::MalformedInput`] when the
/// document matches neither shape, and the [`LinearSymbol::new`] errors
/// when a linear spec is invalid.
pub fn parse_symbol_spec(text: &str) -> Result<ParsedSymbol> {
    let spec: SymbolSpecJson = serde_json::from_str(text).map_err(|e| Error::MalformedInput {
        what: "symbol spec",
        detail: format!(
            "expected {{\"c0\", \"c1\", \"terms\"}} or {{\"c0\", \"psi\"}}: {e}"
        ),
    })?;
    match spec {
        SymbolSpecJson::Linear { c0, c1, terms } => {
            if c0 != 0 {
                return Err(Error::MalformedInput {
                    what: "symbol spec",
                    detail: format!("linear symbols require c0 = 0, got {c0}"),
                });
            }
            let terms = terms
                .into_iter()
                .map(|(q, re, im)| (BigUint::from(q), Complex64::new(re, im)))
                .collect();
            Ok(ParsedSymbol::Linear(LinearSymbol::new(
                Complex64::new(c1.0, c1.1),
                terms,
            )?))
        }
        SymbolSpecJson::General { c0, psi } => Ok(ParsedSymbol::General(Symbol::new(c0, psi))),
    }
}

/// Serializes a symbol to the JSON spec format (linear shape when the
/// linear structure is known).
pub fn symbol_spec_to_json(symbol: &ParsedSymbol) -> serde_json::Value {
    match symbol {
        ParsedSymbol::Linear(l) => serde_json::json!({
            "c0": 0,
            "c1": [l.c1().re, l.c1().im],
            "terms": l
                .terms()
                .iter()
                .map(|(q, c)| serde_json::json!([q.to_u64().expect("linear bases fit u64"), c.re, c.im]))
                .collect::<Vec<_>>(),
        }),
        ParsedSymbol::General(s) => serde_json::json!({
            "c0": s.c0(),
            "psi": s.psi(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn linear(c1: (f64, f64), terms: &[(u64, f64, f64)]) -> LinearSymbol {
        LinearSymbol::new(
            c(c1.0, c1.1),
            terms
                .iter()
                .map(|&(q, re, im)| (BigUint::from(q), c(re, im)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(linear((2.0, 0.0), &[]).kappa(), 2.0);
        assert_eq!(
            linear((1.5, 0.0), &[(2, -0.5, 0.0), (3, -0.5, 0.0)]).kappa(),
            0.5
        );
        assert_eq!(linear((1.5, 5.0), &[(2, 0.0, 0.5)]).kappa(), 1.0);
    }

    #[test]
    fn independence_rejects_powers_and_products() {
        let err = LinearSymbol::new(
            c(1.5, 0.0),
            vec![
                (BigUint::from(2u32), c(-0.1, 0.0)),
                (BigUint::from(4u32), c(-0.1, 0.0)),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not multiplicatively independent"));

        let err = LinearSymbol::new(
            c(2.0, 0.0),
            vec![
                (BigUint::from(2u32), c(-0.1, 0.0)),
                (BigUint::from(3u32), c(-0.1, 0.0)),
                (BigUint::from(6u32), c(-0.1, 0.0)),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DependentFrequencies { value, .. }
            if value == BigUint::from(6u32)));
    }

    #[test]
    fn independence_accepts_coprime_like_sets() {
        // {6, 10, 15} is multiplicatively independent even though the
        // elements are pairwise non-coprime.
        linear((3.0, 0.0), &[(6, -0.5, 0.0), (10, -0.5, 0.0), (15, -0.5, 0.0)]);
        linear((1.5, 0.0), &[(2, -0.5, 0.0), (3, -0.3, 0.0), (5, -0.1, 0.0)]);
    }

    #[test]
    fn term_validity() {
        assert!(LinearSymbol::new(c(1.0, 0.0), vec![(BigUint::from(1u32), c(1.0, 0.0))]).is_err());
        assert!(LinearSymbol::new(c(1.0, 0.0), vec![(BigUint::from(2u32), c(0.0, 0.0))]).is_err());
    }

    #[test]
    fn validate_linear_cases() {
        let bounded = linear((1.5, 0.0), &[(2, -0.3, 0.0), (3, -0.5, 0.0)]);
        assert!(bounded.to_symbol().validate().is_bounded());

        let unbounded = linear((1.0, 0.0), &[(2, -0.7, 0.0)]);
        assert!(matches!(
            unbounded.to_symbol().validate(),
            ValidationVerdict::Unbounded { .. }
        ));

        // Boundary case κ = 1/2 exactly: still bounded.
        let boundary = linear((1.0, 0.0), &[(2, -0.5, 0.0)]);
        assert!(boundary.to_symbol().validate().is_bounded());
    }

    #[test]
    fn validate_constant_cases() {
        assert!(Symbol::constant(c(2.0, 3.0)).validate().is_bounded());
        assert!(!Symbol::constant(c(0.5, 0.0)).validate().is_bounded());
        assert!(!Symbol::constant(c(0.3, 1.0)).validate().is_bounded());
    }

    #[test]
    fn validate_shift_cases() {
        // c0 = 1, ψ ≡ 1: maps the half-plane strictly inside itself.
        let psi = DirichletPoly::from_u64_terms([(1, c(1.0, 0.0))], 1);
        assert!(Symbol::new(1, psi).validate().is_bounded());

        // Pure vertical dilation.
        let zero = DirichletPoly::zero(Cutoff::Frequency(BigUint::one()));
        assert!(Symbol::new(2, zero).validate().is_bounded());

        // c0 = 1 with ψ dipping into the left half-plane: refuted by probe.
        let psi = DirichletPoly::from_u64_terms([(2, c(1.0, 0.0))], 2); // Re ψ(it) = cos(t log 2) hits −1
        assert!(matches!(
            Symbol::new(1, psi).validate(),
            ValidationVerdict::Unbounded { .. }
        ));
    }

    #[test]
    fn validate_undecidable_case() {
        // c0 = 1, ψ = i·2^{-s}: Re ψ(it) = sin(t log 2) ∈ [−1, 1] — the
        // probe finds negative values → unbounded.  Instead take
        // ψ = (2^{-s})² − sneaky dependencies: use ψ = 0.5·2^{-s} + 0.5·4^{-s}
        // with c1 = 0: Re ψ(it) = 0.5cos(a) + 0.5cos(2a) ≥ −0.898 < 0 → unbounded.
        // A genuinely undecidable case: c0 = 1, ψ(s) = (1 − 2^{-s})²·scale
        // touches zero but stays ≥ 0 on the boundary.
        // ψ = 1 − 2·2^{-s} + 4^{-s}: Re ψ(it) = 1 − 2cos a + cos 2a = 2(cos a − 1)... ≤ 0.
        // Use ψ = 3/2 − 2·2^{-s} + (1/2)·4^{-s}: Re = 3/2 − 2cos a + cos(2a)/2
        //   = 3/2 − 2c + (2c²−1)/2 = c² − 2c + 1 = (c−1)² ≥ 0, zero at a = 0.
        let psi = DirichletPoly::from_u64_terms(
            [(1, c(1.5, 0.0)), (2, c(-2.0, 0.0)), (4, c(0.5, 0.0))],
            4,
        );
        let verdict = Symbol::new(1, psi).validate();
        assert!(matches!(verdict, ValidationVerdict::Undecidable { .. }),
            "tangential boundary contact cannot be decided by sampling: {verdict:?}");
    }

    #[test]
    fn fixed_point_constant_symbol() {
        let fp = Symbol::constant(c(2.0, 0.0)).fixed_point().unwrap();
        assert!((fp.point - c(2.0, 0.0)).norm() < 1e-14);
        assert_eq!(fp.derivative, c(0.0, 0.0));
    }

    #[test]
    fn fixed_point_newton_oracle() {
        // φ(s) = 7/4 − (1/4)·2^{-s}; root of α = 7/4 − 2^{-α}/4.
        // Reference values frozen from an independent 30-digit Newton run.
        let sym = linear((1.75, 0.0), &[(2, -0.25, 0.0)]).to_symbol();
        let fp = sym.fixed_point().unwrap();
        assert!(fp.residual <= FIXED_POINT_TOLERANCE);
        assert!((fp.point - c(1.671519358667168, 0.0)).norm() < 1e-10);
        assert!((fp.derivative - c(0.054398635268388812, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn fixed_point_rejects_shifts() {
        let psi = DirichletPoly::from_u64_terms([(1, c(1.0, 0.0))], 1);
        let err = Symbol::new(1, psi).fixed_point().unwrap_err();
        assert!(matches!(err, Error::NoFixedPointForShift { c0: 1 }));
    }

    #[test]
    fn fixed_point_rejects_unbounded() {
        let sym = linear((1.0, 0.0), &[(2, -0.7, 0.0)]).to_symbol();
        assert!(matches!(
            sym.fixed_point(),
            Err(Error::SymbolNotBounded { .. })
        ));
    }

    #[test]
    fn bohr_lift_transcription() {
        let sym = linear((1.5, 0.0), &[(2, -0.5, 0.0)]);
        let lift = sym.bohr_lift();
        assert_eq!(lift.dimension(), 1);
        assert_eq!(lift.c1, c(1.5, 0.0));
        assert_eq!(lift.coefficients, vec![c(-0.5, 0.0)]);

        let no_terms = linear((2.5, 1.0), &[]);
        let lift = no_terms.bohr_lift();
        assert_eq!(lift.dimension(), 0);
        assert_eq!(lift.apply(&[]), c(2.5, 1.0));
    }

    #[test]
    fn bohr_lift_at_ones_equals_symbol_at_zero() {
        let sym = linear((1.5, 0.3), &[(2, -0.25, 0.1), (3, -0.25, 0.0), (5, 0.1, 0.2)]);
        let lift = sym.bohr_lift();
        let ones = vec![c(1.0, 0.0); 3];
        let diff = lift.apply(&ones) - sym.apply(c(0.0, 0.0));
        assert!(diff.norm() < 1e-14);
    }

    #[test]
    fn reduce_to_real_examples() {
        let already = linear((1.5, 0.0), &[(2, -0.5, 0.0)]);
        assert_eq!(already.reduce_to_real(), already);

        let rotated = linear((1.5, 1.0), &[(2, 0.0, 0.5)]);
        let reduced = rotated.reduce_to_real();
        assert_eq!(reduced.c1(), c(1.5, 0.0));
        assert_eq!(reduced.terms()[0].1, c(-0.5, 0.0));
        assert!(reduced.is_real_negative());
    }

    #[test]
    fn symbol_spec_round_trip() {
        let text = r#"{"c0": 0, "c1": [1.5, 0.0], "terms": [[2, -0.5, 0.0], [3, -0.25, 0.125]]}"#;
        let parsed = parse_symbol_spec(text).unwrap();
        let lin = parsed.as_linear().unwrap();
        assert_eq!(lin.c1(), c(1.5, 0.0));
        assert_eq!(lin.dimension(), 2);
        let json = symbol_spec_to_json(&parsed);
        let reparsed = parse_symbol_spec(&json.to_string()).unwrap();
        assert_eq!(reparsed.as_linear().unwrap(), lin);

        let general = r#"{"c0": 2, "psi": [["1", 1.0, 0.0], ["6", -0.25, 0.0]]}"#;
        let parsed = parse_symbol_spec(general).unwrap();
        let sym = parsed.to_symbol();
        assert_eq!(sym.c0(), 2);
        assert_eq!(sym.c1(), c(1.0, 0.0));
    }

    #[test]
    fn symbol_spec_rejects_garbage() {
        assert!(parse_symbol_spec("{\"nope\": 1}").is_err());
        assert!(parse_symbol_spec("[1,2,3]").is_err());
        // Linear shape with c0 ≥ 1 is contradictory.
        assert!(parse_symbol_spec(r#"{"c0": 1, "c1": [2.0, 0.0], "terms": []}"#).is_err());
    }

    proptest! {
        #[test]
        fn kappa_invariant_under_reduction(
            c1re in 0.5f64..3.0,
            c1im in -2.0f64..2.0,
            a_re in -0.5f64..0.5, a_im in -0.5f64..0.5,
            b_re in -0.5f64..0.5, b_im in -0.5f64..0.5,
        ) {
            prop_assume!(c(a_re, a_im).norm() > 1e-6 && c(b_re, b_im).norm() > 1e-6);
            let sym = linear((c1re, c1im), &[(2, a_re, a_im), (3, b_re, b_im)]);
            let red = sym.reduce_to_real();
            prop_assert!((sym.kappa() - red.kappa()).abs() < 1e-12);
            // Reduction is idempotent.
            prop_assert_eq!(red.reduce_to_real(), red);
        }

        #[test]
        fn validate_monotone_in_re_c1(
            c1re in 0.0f64..2.0,
            bump in 0.0f64..2.0,
            a in -0.9f64..-0.05,
        ) {
            let lo = linear((c1re, 0.0), &[(2, a, 0.0)]).to_symbol().validate();
            let hi = linear((c1re + bump, 0.0), &[(2, a, 0.0)]).to_symbol().validate();
            // Raising Re c1 never flips bounded → unbounded.
            if lo.is_bounded() {
                prop_assert!(hi.is_bounded());
            }
        }

        #[test]
        fn fixed_point_residual_contract(
            c1 in 1.2f64..2.5,
            a in -0.45f64..-0.05,
        ) {
            // κ = c1 − |a| ≥ 0.75 > 1/2: always bounded, fixed point exists.
            let sym = linear((c1, 0.0), &[(2, a, 0.0)]).to_symbol();
            let fp = sym.fixed_point().unwrap();
            prop_assert!(fp.residual <= FIXED_POINT_TOLERANCE);
            let image = sym.apply(fp.point);
            prop_assert!((image - fp.point).norm() <= 1e-11);
        }
    }
}
