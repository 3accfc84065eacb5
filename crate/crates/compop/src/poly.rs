//! Truncated Dirichlet polynomials `Σ a(n) n^{-s}` with arbitrary-precision
//! integer frequencies and complex double coefficients.
//!
//! The multiplicative structure of the frequencies is what distinguishes
//! this algebra from ordinary power series: multiplication convolves over
//! divisor pairs (`coefficient of n = Σ_{d·e = n} a(d)·b(e)`), and the
//! truncated exponential is the workhorse behind every operator column,
//! via `m^{-ψ(s)} = exp(−(log m)·ψ(s))`.
//!
//! Frequencies are [`BigUint`]: a symbol with `c₀ ≥ 2` multiplies every
//! frequency by `m^{c₀}`, which overflows 64 bits long before the desk
//! scale this crate targets does anything interesting.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped on store: they are
/// denormal noise relative to every tolerance in the crate and keeping
/// them only bloats supports.
pub const COEFFICIENT_DROP: f64 = 1e-300;

/// Relative tail tolerance for the automatic order selection in
/// [`DirichletPoly::exp_truncated`]: the order is raised until the scalar
/// remainder bound `‖a‖₁^{K+1}/(K+1)!` falls below this.
pub const EXP_TAIL_TOLERANCE: f64 = 1e-14;

/// How a [`DirichletPoly`] was truncated.
///
/// Frequency-truncated polynomials promise that no stored frequency
/// exceeds the bound; weight-truncated ones (operator columns, where rows
/// are dropped by relative coefficient size) carry no frequency bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cutoff {
    /// All stored frequencies are ≤ the bound.
    Frequency(BigUint),
    /// Truncated by coefficient weight; frequencies are unbounded.
    ByWeight,
}

impl Cutoff {
    /// Whether a frequency is admissible under this cutoff.
    fn admits(&self, n: &BigUint) -> bool {
        match self {
            Cutoff::Frequency(bound) => n <= bound,
            Cutoff::ByWeight => true,
        }
    }
}

/// A finitely supported map from positive-integer frequencies to complex
/// coefficients, i.e. a Dirichlet polynomial `Σ a(n) n^{-s}`.
///
/// Invariants (enforced by every constructor and mutator):
/// * all frequencies are ≥ 1;
/// * no stored coefficient is exactly zero, nor below
///   [`COEFFICIENT_DROP`] in modulus;
/// * no stored frequency exceeds the cutoff (when frequency-truncated).
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPoly {
    terms: BTreeMap<BigUint, Complex64>,
    cutoff: Cutoff,
}

impl DirichletPoly {
    /// The empty (zero) polynomial under the given cutoff.
    pub fn zero(cutoff: Cutoff) -> Self {
        DirichletPoly {
            terms: BTreeMap::new(),
            cutoff,
        }
    }

    /// The unit of the convolution algebra: `1·1^{-s}`.
    pub fn one(cutoff: Cutoff) -> Self {
        let mut p = DirichletPoly::zero(cutoff);
        p.add_term(BigUint::one(), Complex64::new(1.0, 0.0));
        p
    }

    /// Builds a polynomial from `(frequency, coefficient)` pairs, summing
    /// duplicates, under a frequency cutoff.
    ///
    /// # Panics
    ///
    /// Panics if any frequency is zero or exceeds `cutoff`, or if
    /// `cutoff < 1`.
    pub fn from_terms<I>(pairs: I, cutoff: BigUint) -> Self
    where
        I: IntoIterator<Item = (BigUint, Complex64)>,
    {
        assert!(cutoff >= BigUint::one(), "cutoff must be ≥ 1");
        let mut p = DirichletPoly::zero(Cutoff::Frequency(cutoff));
        for (n, c) in pairs {
            assert!(
                p.cutoff.admits(&n),
                "frequency {n} exceeds the cutoff of the polynomial"
            );
            p.add_term(n, c);
        }
        p
    }

    /// Convenience constructor with `u64` frequencies.
    ///
    /// # Panics
    ///
    /// Same conditions as [`DirichletPoly::from_terms`].
    pub fn from_u64_terms<I>(pairs: I, cutoff: u64) -> Self
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        DirichletPoly::from_terms(
            pairs
                .into_iter()
                .map(|(n, c)| (BigUint::from(n), c)),
            BigUint::from(cutoff),
        )
    }

    /// Adds `c` to the coefficient at frequency `n`, maintaining the
    /// no-zero / no-denormal invariant.  Frequencies beyond a `Frequency`
    /// cutoff are silently discarded — truncation is the defining feature
    /// of this algebra, not an error.
    ///
    /// # Panics
    ///
    /// Panics if `n = 0`.
    pub fn add_term(&mut self, n: BigUint, c: Complex64) {
        use std::collections::btree_map::Entry;
        assert!(!n.is_zero(), "frequencies must be ≥ 1");
        if !self.cutoff.admits(&n) {
            return;
        }
        match self.terms.entry(n) {
            Entry::Occupied(mut e) => {
                let v = e.get_mut();
                *v += c;
                if v.norm() < COEFFICIENT_DROP {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c.norm() >= COEFFICIENT_DROP {
                    e.insert(c);
                }
            }
        }
    }

    /// Removes denormal/zero coefficients (full sweep).
    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= COEFFICIENT_DROP);
    }

    /// The coefficient at frequency `n` (zero when absent).
    pub fn coeff(&self, n: &BigUint) -> Complex64 {
        self.terms
            .get(n)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Iterator over `(frequency, coefficient)` in ascending frequency.
    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Complex64)> {
        self.terms.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Whether the polynomial is identically zero.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The truncation mode this polynomial was built under.
    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    /// Coefficient 1-norm `Σ |a(n)|`.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Coefficient 2-norm squared `Σ |a(n)|²` — the ℋ² norm squared.
    pub fn two_norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Scales every coefficient by `factor`.
    pub fn scale(&self, factor: Complex64) -> DirichletPoly {
        let mut out = DirichletPoly::zero(self.cutoff.clone());
        for (n, c) in &self.terms {
            out.add_term(n.clone(), c * factor);
        }
        out
    }

    /// Dirichlet multiplication truncated at `cutoff`:
    /// the coefficient of `n` in the result is `Σ_{d·e=n} a(d)·b(e)` over
    /// all divisor pairs with `d` in `self` and `e` in `other`, for
    /// `n ≤ cutoff`.
    ///
    /// # Panics
    ///
    /// Panics if `cutoff < 1`.
    pub fn convolve(&self, other: &DirichletPoly, cutoff: &BigUint) -> DirichletPoly {
        assert!(*cutoff >= BigUint::one(), "cutoff must be ≥ 1");
        let mut acc: BTreeMap<BigUint, Complex64> = BTreeMap::new();
        for (d, ad) in &self.terms {
            if d > cutoff {
                break; // ascending order: no later d can contribute
            }
            for (e, be) in &other.terms {
                let n = d * e;
                if n > *cutoff {
                    break; // e ascends, so every later product is larger
                }
                *acc.entry(n).or_insert_with(|| Complex64::new(0.0, 0.0)) += ad * be;
            }
        }
        let mut out = DirichletPoly::zero(Cutoff::Frequency(cutoff.clone()));
        out.terms = acc;
        out.prune();
        out
    }

    /// Truncated exponential `Σ_{k=0}^{K} a^{*k}/k!` (convolution powers),
    /// truncated at `cutoff`.
    ///
    /// `order` is a lower bound on `K`; the order is raised automatically
    /// until the scalar remainder bound `‖a‖₁^{K+1}/(K+1)!` drops below
    /// [`EXP_TAIL_TOLERANCE`], so the result is a faithful exponential
    /// regardless of the requested order.
    ///
    /// # Errors
    ///
    /// [`Error::NonzeroConstantTerm`] if `a` has a coefficient at
    /// frequency 1 (callers handle the constant part separately, e.g. as
    /// the prefactor `m^{-c₁}` of an operator column).
    ///
    /// # Panics
    ///
    /// Panics if `cutoff < 1`.
    pub fn exp_truncated(&self, cutoff: &BigUint, order: usize) -> Result<DirichletPoly> {
        assert!(*cutoff >= BigUint::one(), "cutoff must be ≥ 1");
        let c1 = self.coeff(&BigUint::one());
        if c1 != Complex64::new(0.0, 0.0) {
            return Err(Error::NonzeroConstantTerm { re: c1.re, im: c1.im });
        }

        let required = auto_exp_order(self.one_norm(), order);

        let mut result = DirichletPoly::one(Cutoff::Frequency(cutoff.clone()));
        // Running term a^{*k}/k!, built incrementally.
        let mut term = DirichletPoly::one(Cutoff::Frequency(cutoff.clone()));
        for k in 1..=required {
            term = term.convolve(self, cutoff);
            term = term.scale(Complex64::new(1.0 / k as f64, 0.0));
            if term.is_empty() {
                break; // a^{*k} vanished under the cutoff; higher powers too
            }
            for (n, c) in &term.terms {
                result.add_term(n.clone(), *c);
            }
        }
        Ok(result)
    }

    /// Pointwise evaluation `Σ a(n)·n^{-s}` over the stored terms.
    pub fn evaluate(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in &self.terms {
            acc += c * (-s * ln_biguint(n)).exp();
        }
        acc
    }

    /// Derivative evaluation `−Σ a(n)·(log n)·n^{-s}` over stored terms.
    pub fn evaluate_derivative(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in &self.terms {
            let ln = ln_biguint(n);
            acc -= c * ln * (-s * ln).exp();
        }
        acc
    }
}

/// Smallest order `K ≥ requested` with `‖a‖₁^{K+1}/(K+1)! ≤ tolerance`.
fn auto_exp_order(one_norm: f64, requested: usize) -> usize {
    let mut k = requested;
    // bound(k) = one_norm^{k+1}/(k+1)!, computed in log space to avoid
    // overflow for large norms.
    let log_norm = if one_norm > 0.0 { one_norm.ln() } else { f64::NEG_INFINITY };
    let log_bound = |k: usize| -> f64 {
        let kp1 = (k + 1) as f64;
        kp1 * log_norm - ln_factorial(kp1)
    };
    let log_tol = EXP_TAIL_TOLERANCE.ln();
    while log_bound(k) > log_tol {
        k += 1;
        assert!(
            k <= 100_000,
            "exp_truncated order runaway: coefficient 1-norm {one_norm} too large"
        );
    }
    k
}

/// `ln(n!)` for integer-valued `n ≥ 0`: direct product for small `n`,
/// Stirling with the `1/(12n)` correction beyond (absolute error there is
/// below `1e-8`, far under the tail-bound slack it feeds).
fn ln_factorial(n: f64) -> f64 {
    if n < 20.5 {
        let mut acc = 0.0;
        let mut k = 2.0;
        while k < n + 0.5 {
            acc += k.ln();
            k += 1.0;
        }
        acc
    } else {
        n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + 1.0 / (12.0 * n)
    }
}

/// Natural log of a positive big integer, with a bit-length fallback for
/// values beyond `f64` range (only reachable through pathological cutoffs).
pub(crate) fn ln_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    match n.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => n.bits() as f64 * std::f64::consts::LN_2,
    }
}

impl fmt::Display for DirichletPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)·{}^(-s)", c.re, c.im, n)?;
        }
        Ok(())
    }
}

/// Serializes as a JSON array of `[frequency-as-string, re, im]` triples,
/// sorted by frequency — the on-disk format shared with the CLI and the
/// test fixtures.
impl Serialize for DirichletPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (n, c) in &self.terms {
            seq.serialize_element(&(n.to_string(), c.re, c.im))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for DirichletPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct TripleVisitor;
        impl<'de> Visitor<'de> for TripleVisitor {
            type Value = DirichletPoly;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "an array of [frequency-string, re, im] triples")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<DirichletPoly, A::Error> {
                let mut p = DirichletPoly::zero(Cutoff::ByWeight);
                let mut max_freq = BigUint::one();
                while let Some((ns, re, im)) = seq.next_element::<(String, f64, f64)>()? {
                    let n: BigUint = ns
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad frequency `{ns}`")))?;
                    if n.is_zero() {
                        return Err(de::Error::custom("frequency 0 is not allowed"));
                    }
                    if n > max_freq {
                        max_freq = n.clone();
                    }
                    p.add_term(n, Complex64::new(re, im));
                }
                // A parsed polynomial gets the tightest frequency cutoff
                // consistent with its support.
                p.cutoff = Cutoff::Frequency(max_freq);
                Ok(p)
            }
        }
        deserializer.deserialize_seq(TripleVisitor)
    }
}
