//! Truncated matrices of `C_φ` in the orthonormal basis `e_m(s) = m^{-s}`
//! of ℋ², and the spectral quantities read off them: approximation
//! numbers (singular values of the compression), eigenvalues of the
//! square compression, Hilbert–Schmidt partial sums, decay-law fits, and
//! the Weyl singular-value/eigenvalue product inequality.
//!
//! The `m`-th column holds the Dirichlet coefficients of
//!
//! ```text
//! m^{-φ(s)} = m^{-c₁} · exp(−(log m)·(ψ(s) − c₁)) · (m^{c₀})^{-s},
//! ```
//!
//! i.e. a convolution-exponential over the support of `ψ − c₁`, with every
//! frequency subsequently multiplied by `m^{c₀}`.  Row truncation is by
//! relative coefficient weight, so the retained column differs from the
//! true one by a reported, auditable deficit.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::la::{self, least_squares, ComplexMatrix, RealMatrix};
use crate::poly::{Cutoff, DirichletPoly};
use crate::symbol::Symbol;

/// Hard cap on dense-matrix columns; beyond this, `assemble` errors.
pub const MAX_COLUMNS: usize = 12_000;
/// Hard cap on dense-matrix rows; beyond this, `assemble` errors and the
/// message suggests raising `row_tolerance`.
pub const MAX_ROWS: usize = 60_000;

/// Default relative row-truncation threshold.
pub const DEFAULT_ROW_TOLERANCE: f64 = 1e-12;

/// Fitted tail exponents at or above this value flag a Hilbert–Schmidt
/// partial sum as divergent-looking (`Σ m^{-p}` diverges iff `p ≤ 1`; the
/// margin absorbs fit noise at desk scale).
pub const DIVERGENT_EXPONENT_FLAG: f64 = -1.1;

/// Frequency cutoff used while building column exponentials: effectively
/// unbounded (truncation is by coefficient weight afterwards), but finite
/// so the polynomial algebra's invariants stay intact.
fn unbounded_cutoff() -> BigUint {
    BigUint::one() << 512
}

/// Entry storage of a truncated operator: real symbols produce real
/// matrices (and cheaper factorizations), complex symbols complex ones.
#[derive(Debug, Clone)]
pub enum OperatorEntries {
    /// All-real entries.
    Real(RealMatrix),
    /// General complex entries.
    Complex(ComplexMatrix),
}

impl OperatorEntries {
    fn cols(&self) -> usize {
        match self {
            OperatorEntries::Real(m) => m.cols(),
            OperatorEntries::Complex(m) => m.cols(),
        }
    }

    /// Singular values, descending.
    fn singular_values(&self) -> Result<Vec<f64>> {
        match self {
            OperatorEntries::Real(m) => la::real_singular_values(m),
            OperatorEntries::Complex(m) => la::complex_singular_values(m),
        }
    }

    /// Eigenvalues (square matrices only), unordered.
    fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        match self {
            OperatorEntries::Real(m) => la::real_eigenvalues(m),
            OperatorEntries::Complex(m) => la::complex_eigenvalues(m),
        }
    }
}

/// The matrix of `C_φ` between the column basis `{e_m : m ≤ N}` and an
/// adaptively chosen sparse row-frequency set.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    /// Retained row frequencies, ascending.
    rows: Vec<BigUint>,
    /// Dense entries, `entry(i, j)` = coefficient of `rows[i]^{-s}` in
    /// `(j+1)^{-φ(s)}`.
    entries: OperatorEntries,
    /// Relative drop threshold the columns were truncated with.
    row_tolerance: f64,
    /// Per-column relative ℓ² mass dropped by row truncation.
    column_deficits: Vec<f64>,
}

/// One column of the operator matrix before dense assembly: the retained
/// coefficients of `m^{-φ}` plus the relative ℓ² deficit of the dropped
/// tail.
#[derive(Debug, Clone)]
pub struct OperatorColumn {
    /// Retained `(frequency, coefficient)` pairs as a polynomial.
    pub coefficients: DirichletPoly,
    /// `‖dropped‖₂ / ‖full‖₂` for this column.
    pub deficit: f64,
}

/// Computes the `m`-th column of `C_φ`: the Dirichlet coefficients of
/// `m^{-φ(s)}`.  Rows are dropped, smallest magnitude first, while their
/// coefficient modulus stays below `row_tolerance ×` the running norm of
/// the retained part.
///
/// # Errors
///
/// [`Error::SymbolNotBounded`] when validation refutes boundedness (an
/// `Undecidable` verdict is allowed — the matrix of a merely conjectural
/// operator is still a well-defined experiment).
///
/// # Panics
///
/// Panics if `m = 0`, `row_tolerance` is negative/NaN, or the truncated
/// exponential overflows its order guard.
pub fn column(sym: &Symbol, m: u64, row_tolerance: f64) -> Result<OperatorColumn> {
    assert!(m >= 1, "column index must be ≥ 1");
    assert!(
        row_tolerance >= 0.0 && row_tolerance.is_finite(),
        "row_tolerance must be finite and nonnegative"
    );
    if let crate::symbol::ValidationVerdict::Unbounded { reason } = sym.validate() {
        return Err(Error::SymbolNotBounded { reason });
    }

    let log_m = (m as f64).ln();
    let c1 = sym.c1();

    // ψ − c₁, scaled by −log m.
    let cutoff = unbounded_cutoff();
    let mut scaled = DirichletPoly::zero(Cutoff::Frequency(cutoff.clone()));
    for (n, c) in sym.psi().terms() {
        if *n > BigUint::one() {
            scaled.add_term(n.clone(), -log_m * c);
        }
    }
    let series = scaled
        .exp_truncated(&cutoff, 0)
        .expect("constant term removed above");

    // Prefactor m^{-c₁} and row dilation by m^{c₀}.
    let prefactor = (-c1 * log_m).exp();
    let dilation = BigUint::from(m).pow(sym.c0());

    let mut terms: Vec<(BigUint, Complex64)> = series
        .terms()
        .map(|(n, c)| (n * &dilation, prefactor * c))
        .collect();

    // Weight truncation: scan descending by modulus, keep while above
    // row_tolerance × running ℓ² norm of what is already kept.
    terms.sort_by(|a, b| b.1.norm().partial_cmp(&a.1.norm()).expect("finite coefficients"));
    let mut kept_sq = 0.0_f64;
    let mut dropped_sq = 0.0_f64;
    let mut out = DirichletPoly::zero(Cutoff::ByWeight);
    for (n, c) in terms {
        let mag = c.norm();
        if kept_sq > 0.0 && mag < row_tolerance * kept_sq.sqrt() {
            dropped_sq += mag * mag;
        } else {
            kept_sq += mag * mag;
            out.add_term(n, c);
        }
    }
    let total_sq = kept_sq + dropped_sq;
    let deficit = if total_sq > 0.0 {
        (dropped_sq / total_sq).sqrt()
    } else {
        0.0
    };
    Ok(OperatorColumn {
        coefficients: out,
        deficit,
    })
}

/// Assembles the truncated matrix of `C_φ` with columns `m = 1..=N` and
/// row set equal to the ascending union of all column supports.
///
/// # Errors
///
/// * [`Error::SymbolNotBounded`] via [`column`];
/// * [`Error::MatrixTooLarge`] when the dense matrix would exceed
///   [`MAX_COLUMNS`] × [`MAX_ROWS`] — raise `row_tolerance` to shrink the
///   row set.
///
/// # Panics
///
/// Panics if `n_columns = 0`.
pub fn assemble(sym: &Symbol, n_columns: usize, row_tolerance: f64) -> Result<TruncatedOperator> {
    assert!(n_columns >= 1, "need at least one column");
    if n_columns > MAX_COLUMNS {
        return Err(Error::MatrixTooLarge {
            rows: 0,
            cols: n_columns,
            max_rows: MAX_ROWS,
            max_cols: MAX_COLUMNS,
        });
    }

    let mut columns = Vec::with_capacity(n_columns);
    let mut deficits = Vec::with_capacity(n_columns);
    for m in 1..=n_columns as u64 {
        let col = column(sym, m, row_tolerance)?;
        deficits.push(col.deficit);
        columns.push(col.coefficients);
    }

    // Deterministic ascending row union.
    let mut row_index: std::collections::BTreeMap<BigUint, usize> = std::collections::BTreeMap::new();
    for col in &columns {
        for (n, _) in col.terms() {
            row_index.entry(n.clone()).or_insert(0);
        }
    }
    let n_rows = row_index.len();
    if n_rows > MAX_ROWS {
        return Err(Error::MatrixTooLarge {
            rows: n_rows,
            cols: n_columns,
            max_rows: MAX_ROWS,
            max_cols: MAX_COLUMNS,
        });
    }
    for (i, (_, slot)) in row_index.iter_mut().enumerate() {
        *slot = i;
    }

    let real = sym.is_real();
    let entries = if real {
        let mut m = RealMatrix::zeros(n_rows, n_columns);
        for (j, col) in columns.iter().enumerate() {
            let slice = m.column_mut(j);
            for (n, c) in col.terms() {
                slice[row_index[n]] = c.re;
            }
        }
        OperatorEntries::Real(m)
    } else {
        let mut m = ComplexMatrix::zeros(n_rows, n_columns);
        for (j, col) in columns.iter().enumerate() {
            let slice = m.column_mut(j);
            for (n, c) in col.terms() {
                slice[row_index[n]] = *c;
            }
        }
        OperatorEntries::Complex(m)
    };

    Ok(TruncatedOperator {
        rows: row_index.into_keys().collect(),
        entries,
        row_tolerance,
        column_deficits: deficits,
    })
}

impl TruncatedOperator {
    /// Number of columns `N` (basis elements `e_1 .. e_N`).
    pub fn columns(&self) -> usize {
        self.entries.cols()
    }

    /// The retained row frequencies, ascending.
    pub fn row_frequencies(&self) -> &[BigUint] {
        &self.rows
    }

    /// Number of retained rows.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Relative drop threshold used during column truncation.
    pub fn row_tolerance(&self) -> f64 {
        self.row_tolerance
    }

    /// Per-column relative ℓ² truncation deficits.
    pub fn column_deficits(&self) -> &[f64] {
        &self.column_deficits
    }

    /// Whether the entries are stored as a real matrix.
    pub fn is_real(&self) -> bool {
        matches!(self.entries, OperatorEntries::Real(_))
    }

    /// Entry at (row index `i`, column `j`), as a complex number.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.entries {
            OperatorEntries::Real(m) => Complex64::new(m.get(i, j), 0.0),
            OperatorEntries::Complex(m) => m.get(i, j),
        }
    }

    /// All singular values of the compression, descending.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        self.entries.singular_values()
    }

    /// Top `count` singular values (approximation numbers of the
    /// compression), descending.
    ///
    /// # Panics
    ///
    /// Panics unless `count ≤ min(rows, columns)`.
    pub fn approximation_numbers(&self, count: usize) -> Result<Vec<f64>> {
        assert!(
            count <= self.row_count().min(self.columns()),
            "count {count} exceeds min(rows = {}, columns = {})",
            self.row_count(),
            self.columns()
        );
        let mut s = self.singular_values()?;
        s.truncate(count);
        Ok(s)
    }

    /// The square compression: rows projected onto the column index set
    /// `{1, …, N}` (a row frequency `m ≤ N` meets column `m`; all other
    /// rows are dropped, missing frequencies contribute zero rows).
    pub fn square_compression(&self) -> OperatorEntries {
        let n = self.columns();
        let bound = BigUint::from(n as u64);
        // Map row index → basis slot for frequencies ≤ N.
        let mut slots: Vec<(usize, usize)> = Vec::new(); // (matrix row, basis slot)
        for (i, freq) in self.rows.iter().enumerate() {
            if *freq <= bound {
                // Frequencies are ≥ 1 and ≤ N here, so they fit usize.
                let m: usize = freq.to_string().parse().expect("small frequency");
                slots.push((i, m - 1));
            }
        }
        match &self.entries {
            OperatorEntries::Real(src) => {
                let mut dst = RealMatrix::zeros(n, n);
                for j in 0..n {
                    for &(i, slot) in &slots {
                        dst.set(slot, j, src.get(i, j));
                    }
                }
                OperatorEntries::Real(dst)
            }
            OperatorEntries::Complex(src) => {
                let mut dst = ComplexMatrix::zeros(n, n);
                for j in 0..n {
                    for &(i, slot) in &slots {
                        dst.set(slot, j, src.get(i, j));
                    }
                }
                OperatorEntries::Complex(dst)
            }
        }
    }

    /// Top `count` eigenvalues of the square compression, by descending
    /// modulus.
    ///
    /// # Panics
    ///
    /// Panics unless `count ≤ columns`.
    pub fn eigenvalues(&self, count: usize) -> Result<Vec<Complex64>> {
        assert!(count <= self.columns(), "count exceeds matrix size");
        let mut evs = self.square_compression().eigenvalues()?;
        evs.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).expect("finite eigenvalues"));
        evs.truncate(count);
        Ok(evs)
    }

    /// Verifies the singular-value/eigenvalue product inequality
    /// `a₁⋯a_n ≥ |λ₁⋯λ_n|` on the square compression for every
    /// `n ≤ n_max`.  Returns the worst margin `min_n (Πa − Π|λ|)`; the
    /// inequality "holds" when the margin stays above `−1e-10`.
    ///
    /// # Panics
    ///
    /// Panics unless `n_max ≤ columns`.
    pub fn weyl_check(&self, n_max: usize) -> Result<WeylCheck> {
        assert!(n_max <= self.columns(), "n_max exceeds matrix size");
        let square = self.square_compression();
        let a = square.singular_values()?;
        let mut lam: Vec<f64> = square.eigenvalues()?.iter().map(|z| z.norm()).collect();
        la::sort_descending(&mut lam);

        let mut prod_a = 1.0_f64;
        let mut prod_l = 1.0_f64;
        let mut margin = f64::INFINITY;
        for n in 0..n_max {
            prod_a *= a[n];
            prod_l *= lam[n];
            let gap = prod_a - prod_l;
            if gap < margin {
                margin = gap;
            }
        }
        Ok(WeylCheck {
            holds: margin >= -1e-10,
            margin,
        })
    }
}

/// Outcome of [`TruncatedOperator::weyl_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylCheck {
    /// Whether `Π a_j ≥ Π |λ_j| − 1e-10` held for every prefix.
    pub holds: bool,
    /// Worst prefix margin `Π a_j − Π |λ_j|` (≥ 0 in exact arithmetic).
    pub margin: f64,
}

/// Hilbert–Schmidt partial sum `Σ_{m ≤ N} ‖m^{-φ}‖²` with a divergence
/// diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsPartialSum {
    /// `Σ_{m≤N} ‖column m‖²` (row truncation included).
    pub sum: f64,
    /// Fitted exponent `p` of the per-column model `‖column m‖² ~ m^p`
    /// over the last decade `[N/10, N]`.
    pub fitted_exponent: f64,
    /// `true` when the tail looks non-summable
    /// (`fitted_exponent ≥ −1.1`); see [`DIVERGENT_EXPONENT_FLAG`].
    pub divergent_looking: bool,
}

/// Computes the Hilbert–Schmidt partial sum over `m ≤ n_columns`.
///
/// The tail diagnostic fits `log ‖column m‖²` against `log m` by least
/// squares over the last decade of columns; exponents ≥ −1.1 flag the sum
/// as divergent-looking (the true Hilbert–Schmidt norm is `Σ` over all
/// `m`, which converges only when the per-column norms decay strictly
/// faster than `m^{-1}`).
///
/// # Errors
///
/// Propagates [`column`] errors.
///
/// # Panics
///
/// Panics if `n_columns < 10` (the tail fit needs a decade of columns).
pub fn hs_norm_sq(sym: &Symbol, n_columns: usize, row_tolerance: f64) -> Result<HsPartialSum> {
    assert!(n_columns >= 10, "need at least 10 columns for the tail fit");
    let mut sum = 0.0_f64;
    let mut norms = Vec::with_capacity(n_columns);
    for m in 1..=n_columns as u64 {
        let col = column(sym, m, row_tolerance)?;
        let norm_sq = col.coefficients.two_norm_sq();
        norms.push(norm_sq);
        sum += norm_sq;
    }
    let lo = (n_columns / 10).max(1);
    let mut design_rows = Vec::new();
    let mut rhs = Vec::new();
    for m in lo..=n_columns {
        let v = norms[m - 1];
        if v > 0.0 {
            design_rows.push((m as f64).ln());
            rhs.push(v.ln());
        }
    }
    let fitted_exponent = if rhs.len() >= 2 {
        let a = RealMatrix::from_fn(design_rows.len(), 2, |i, j| {
            if j == 0 {
                design_rows[i]
            } else {
                1.0
            }
        });
        least_squares(&a, &rhs)?[0]
    } else {
        f64::NEG_INFINITY // columns vanished: nothing left to diverge
    };
    Ok(HsPartialSum {
        sum,
        fitted_exponent,
        divergent_looking: fitted_exponent >= DIVERGENT_EXPONENT_FLAG,
    })
}

/// Power-model fit `log a_n = α·log n + β·log log n + γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    /// Leading exponent α.
    pub alpha: f64,
    /// Log-log correction exponent β.
    pub beta: f64,
    /// Constant γ.
    pub gamma: f64,
    /// ℓ² norm of the log-domain residuals.
    pub residual: f64,
}

/// Geometric-model fit `log a_n = n·log r + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricFit {
    /// Log ratio `log r` (negative for decaying sequences).
    pub log_r: f64,
    /// Constant `c`.
    pub c: f64,
    /// ℓ² norm of the log-domain residuals.
    pub residual: f64,
}

/// Both decay-law fits over a window of a singular-value list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Power-with-log model.
    pub power: PowerFit,
    /// Geometric model.
    pub geometric: GeometricFit,
    /// The 1-based inclusive index window actually used.
    pub window: (usize, usize),
}

/// The default fit window for a list of `count` values:
/// `[max(10, 0.05·count), 0.5·count]` — the head is polluted by constants,
/// the tail by truncation.
pub fn default_fit_window(count: usize) -> (usize, usize) {
    let lo = (count as f64 * 0.05).floor() as usize;
    ((lo.max(10)).max(2), count / 2)
}

/// Least-squares fits of both decay models to `values[n_lo-1 ..= n_hi-1]`
/// (`values` is `a_1, a_2, …` descending; the window is 1-based and
/// inclusive).  Non-positive values inside the window are excluded (their
/// logarithm is undefined — they are exact zeros of the compression).
///
/// # Errors
///
/// [`Error::TooFewPoints`] when fewer than 4 usable points remain.
///
/// # Panics
///
/// Panics unless `2 ≤ n_lo ≤ n_hi ≤ values.len()`.
pub fn decay_fit(values: &[f64], window: (usize, usize)) -> Result<DecayFit> {
    let (n_lo, n_hi) = window;
    assert!(n_lo >= 2, "window must start at n ≥ 2 (log log n must exist)");
    assert!(n_lo <= n_hi && n_hi <= values.len(), "window out of range");

    let mut ns = Vec::new();
    let mut logs = Vec::new();
    for n in n_lo..=n_hi {
        let v = values[n - 1];
        if v > 0.0 {
            ns.push(n as f64);
            logs.push(v.ln());
        }
    }
    let count = ns.len();
    if count < 4 {
        return Err(Error::TooFewPoints { count });
    }

    // Power model: design [log n, log log n, 1].
    let design_p = RealMatrix::from_fn(count, 3, |i, j| match j {
        0 => ns[i].ln(),
        1 => ns[i].ln().ln(),
        _ => 1.0,
    });
    let cp = least_squares(&design_p, &logs)?;
    let mut res_p = 0.0;
    for i in 0..count {
        let pred = cp[0] * ns[i].ln() + cp[1] * ns[i].ln().ln() + cp[2];
        res_p += (logs[i] - pred).powi(2);
    }

    // Geometric model: design [n, 1].
    let design_g = RealMatrix::from_fn(count, 2, |i, j| if j == 0 { ns[i] } else { 1.0 });
    let cg = least_squares(&design_g, &logs)?;
    let mut res_g = 0.0;
    for i in 0..count {
        let pred = cg[0] * ns[i] + cg[1];
        res_g += (logs[i] - pred).powi(2);
    }

    Ok(DecayFit {
        power: PowerFit {
            alpha: cp[0],
            beta: cp[1],
            gamma: cp[2],
            residual: res_p.sqrt(),
        },
        geometric: GeometricFit {
            log_r: cg[0],
            c: cg[1],
            residual: res_g.sqrt(),
        },
        window,
    })
}

/// Full decay study of one symbol: singular values and eigenvalue moduli
/// at truncation `N`, both fits, and per-n convergence against a second
/// truncation level (`2N`, or `N/2` when `2N` would break the size guard).
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    /// Approximation numbers of the compression at the requested level.
    pub singular_values: Vec<f64>,
    /// Eigenvalue moduli of the square compression, descending.
    pub eigenvalue_moduli: Vec<f64>,
    /// Both decay fits.
    pub fits: DecayFit,
    /// The two truncation levels compared.
    pub levels: (usize, usize),
    /// Per-n relative change of `a_n` between the two levels,
    /// `|a_n(hi) − a_n(lo)| / a_n(hi)` (0 when both vanish).
    pub convergence: Vec<f64>,
    /// Row counts at the requested level.
    pub rows: usize,
}

/// Builds a [`DecayReport`] for `sym` at truncation `n_columns`, fitting
/// over `window` (default window when `None`), with `count` spectral
/// values.
///
/// # Errors
///
/// Propagates [`assemble`], [`decay_fit`], and factorization errors.
pub fn decay_report(
    sym: &Symbol,
    n_columns: usize,
    row_tolerance: f64,
    window: Option<(usize, usize)>,
    count: usize,
) -> Result<DecayReport> {
    let op = assemble(sym, n_columns, row_tolerance)?;
    let count = count.min(op.row_count()).min(op.columns());
    let sv = op.approximation_numbers(count)?;
    let eig: Vec<f64> = op
        .eigenvalues(count.min(op.columns()))?
        .iter()
        .map(|z| z.norm())
        .collect();

    let window = window.unwrap_or_else(|| {
        let (lo, hi) = default_fit_window(sv.len());
        (lo, hi.max(lo))
    });
    // A requested window may overshoot a compression whose row count is
    // smaller than anticipated; clamp it to the computed spectrum and let
    // `decay_fit` report `TooFewPoints` if too little survives.
    if sv.len() < 2 {
        return Err(Error::TooFewPoints { count: sv.len() });
    }
    let hi = window.1.min(sv.len()).max(2);
    let window = (window.0.clamp(2, hi), hi);
    let fits = decay_fit(&sv, window)?;

    // Convergence against a second truncation level.
    let other = if 2 * n_columns <= MAX_COLUMNS {
        2 * n_columns
    } else {
        (n_columns / 2).max(1)
    };
    let op2 = assemble(sym, other, row_tolerance)?;
    let count2 = count.min(op2.row_count()).min(op2.columns());
    let sv2 = op2.approximation_numbers(count2)?;
    let (lo_vals, hi_vals) = if other > n_columns {
        (&sv, &sv2)
    } else {
        (&sv2, &sv)
    };
    let mut convergence = Vec::new();
    for n in 0..lo_vals.len().min(hi_vals.len()) {
        let hi = hi_vals[n];
        let lo = lo_vals[n];
        convergence.push(if hi > 0.0 {
            (hi - lo).abs() / hi
        } else {
            0.0
        });
    }

    Ok(DecayReport {
        singular_values: sv,
        eigenvalue_moduli: eig,
        fits,
        levels: (n_columns.min(other), n_columns.max(other)),
        convergence,
        rows: op.row_count(),
    })
}
