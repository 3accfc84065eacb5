//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`].  Contract violations that a
//! correct caller can always avoid (e.g. a non-positive cutoff) panic
//! instead and are documented under `# Panics` on the operation itself.

use num_bigint::BigUint;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions surfaced by the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// `zeta_real` called at or left of the pole at 1.
    #[error("zeta_real({x}): pole/divergence — the series only converges for arguments > 1")]
    ZetaPole {
        /// Offending argument.
        x: f64,
    },

    /// `zeta_real` cannot reach the target tolerance within the term cap.
    #[error(
        "zeta_real({x}): tolerance 1e-12 needs {needed:.3e} terms, above the cap {cap:.1e}"
    )]
    ZetaUnreachable {
        /// Offending argument.
        x: f64,
        /// Number of terms the tail bound demands.
        needed: f64,
        /// Hard cap on the partial-sum length.
        cap: f64,
    },

    /// `exp_truncated` received a polynomial with a nonzero coefficient at
    /// frequency 1.
    #[error(
        "exp_truncated: constant term must be zero (found {re}{im:+}i at frequency 1)"
    )]
    NonzeroConstantTerm {
        /// Real part of the offending coefficient.
        re: f64,
        /// Imaginary part of the offending coefficient.
        im: f64,
    },

    /// A `LinearSymbol` was built from frequencies that are not
    /// multiplicatively independent below the verification bound.
    #[error(
        "linear symbol frequencies are not multiplicatively independent: \
         {value} has two distinct product representations over {{{q_list}}}"
    )]
    DependentFrequencies {
        /// The integer with two distinct representations `q^α`.
        value: BigUint,
        /// Comma-separated list of the base frequencies.
        q_list: String,
    },

    /// A `LinearSymbol` term is malformed (base < 2 or zero coefficient).
    #[error("linear symbol term ({q}, {re}{im:+}i) invalid: {reason}")]
    InvalidSymbolTerm {
        /// Base frequency of the term.
        q: BigUint,
        /// Real part of the coefficient.
        re: f64,
        /// Imaginary part of the coefficient.
        im: f64,
        /// What is wrong with the term.
        reason: String,
    },

    /// `fixed_point` requires `c₀ = 0`; vertical translations have none.
    #[error("fixed_point: precondition c0 = 0 violated (c0 = {c0}); \
             symbols with c0 ≥ 1 have no fixed point in the half-plane")]
    NoFixedPointForShift {
        /// The nonzero `c₀` of the offending symbol.
        c0: u32,
    },

    /// The damped Newton iteration for the fixed point did not converge.
    #[error("no fixed point located: Newton residual {residual:.3e} after {steps} steps")]
    NoFixedPointLocated {
        /// Residual `|φ(α) − α|` at the last iterate.
        residual: f64,
        /// Number of Newton steps taken.
        steps: usize,
    },

    /// An operation that requires a bounded composition operator was given
    /// a symbol whose validation verdict is not `Bounded`.
    #[error("symbol does not define a bounded composition operator: {reason}")]
    SymbolNotBounded {
        /// Verdict reason from validation.
        reason: String,
    },

    /// The requested dense matrix would exceed the in-memory guard.
    #[error(
        "truncated matrix too large: {rows} rows × {cols} columns exceeds \
         the guard of {max_rows} rows × {max_cols} columns"
    )]
    MatrixTooLarge {
        /// Requested number of rows.
        rows: usize,
        /// Requested number of columns.
        cols: usize,
        /// Row guard.
        max_rows: usize,
        /// Column guard.
        max_cols: usize,
    },

    /// A decay fit was requested on fewer than four singular values.
    #[error("decay fit needs at least 4 usable singular values, got {count}")]
    TooFewPoints {
        /// Number of usable points provided.
        count: usize,
    },

    /// Kernel inner products require both points to live on the same side
    /// of the Bohr correspondence.
    #[error(
        "kernel inner product undefined between a {left} point and a {right} point; \
         lift both to the same model first"
    )]
    MixedKernelVariants {
        /// Variant of the left argument.
        left: &'static str,
        /// Variant of the right argument.
        right: &'static str,
    },

    /// The preimage Gram system backing a Bernstein-type lower bound is
    /// numerically singular.
    #[error(
        "preimage system numerically degenerate: smallest Gram eigenvalue {min_eig:.3e} \
         below 1e-12 × largest ({max_eig:.3e}); condition estimate {cond:.3e}"
    )]
    DegeneratePreimageSystem {
        /// Smallest eigenvalue of the preimage Gram matrix.
        min_eig: f64,
        /// Largest eigenvalue of the preimage Gram matrix.
        max_eig: f64,
        /// Condition estimate `max_eig / min_eig`.
        cond: f64,
    },

    /// A point configuration failed its preimage verification.
    #[error(
        "preimage group {group} point {index} does not map to its target: \
         residual {residual:.3e} exceeds 1e-10"
    )]
    PreimageMismatch {
        /// Index of the target point whose group is broken.
        group: usize,
        /// Index of the offending preimage within the group.
        index: usize,
        /// `|φ(preimage) − target|` (or the polydisc analogue).
        residual: f64,
    },

    /// No admissible tangency grid exists within the searched range of the
    /// approach parameter.
    #[error(
        "no admissible tangency grid: approach parameter doubled past {nu_max} \
         without the first-coordinate preimages entering the closed disc"
    )]
    NoAdmissibleGrid {
        /// Largest approach parameter tried.
        nu_max: u64,
    },

    /// Separation statistics on a list with duplicate points.
    #[error("separation undefined: points {i} and {j} coincide")]
    DuplicatePoints {
        /// Index of the first point.
        i: usize,
        /// Index of the second point.
        j: usize,
    },

    /// A Monte Carlo profile was requested with too small a sample budget.
    #[error("{samples} samples is statistically meaningless here; need at least {min}")]
    StatisticallyMeaningless {
        /// Requested sample count.
        samples: u64,
        /// Minimum accepted sample count.
        min: u64,
    },

    /// A LAPACK routine reported failure.
    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack {
        /// Routine name, e.g. `dgesdd`.
        routine: &'static str,
        /// The nonzero `info` return.
        info: i32,
    },

    /// Bound-formula preconditions violated (documented per operation).
    #[error("invalid bound parameters: {reason}")]
    InvalidBoundParameters {
        /// Which precondition failed.
        reason: String,
    },

    /// A disc self-map failed its certification (image must stay inside
    /// the open unit disc with a quantitative margin).
    #[error(
        "disc self-map not certified: min |1 − ω(z)| = {margin:.3e} on the \
         verification grid, below the required 1e-3"
    )]
    DiscMapNotCertified {
        /// Smallest `|1 − ω(z)|` observed on the verification grid.
        margin: f64,
    },

    /// The Taylor-series division in the disc-to-Dirichlet transfer became
    /// numerically unstable.
    #[error(
        "transfer series division unstable: coefficient {index} has modulus \
         {magnitude:.3e}, above the growth guard {guard:.3e}"
    )]
    TransferSeriesUnstable {
        /// Index of the runaway coefficient.
        index: usize,
        /// Its modulus.
        magnitude: f64,
        /// The guard it crossed.
        guard: f64,
    },

    /// A JSON document does not match the expected shape.
    #[error("malformed {what}: {detail}")]
    MalformedInput {
        /// What was being parsed (e.g. "symbol spec").
        what: &'static str,
        /// Human-readable detail.
        detail: String,
    },

    /// Underlying JSON syntax error.
    #[error("JSON syntax error: {0}")]
    Json(#[from] serde_json::Error),
}
