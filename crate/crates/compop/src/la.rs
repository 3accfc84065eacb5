//! Thin, safe wrappers over the system LAPACK for the dense factorizations
//! this crate needs: singular values (the approximation numbers of a
//! finite compression), general eigenvalues, Hermitian eigenvalues, and
//! Hermitian-definite generalized eigenvalues (the pencil behind the
//! kernel lower bounds).
//!
//! Matrices are owned, column-major (LAPACK's native layout), and either
//! real or complex.  All wrappers follow the standard workspace-query
//! convention (`lwork = -1` first) and surface nonzero `info` returns as
//! typed errors instead of panicking, because a singular pencil is an
//! expected, reportable outcome upstream.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Owned column-major matrix over `f64` or `Complex64`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMajor<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Real dense matrix.
pub type RealMatrix = ColMajor<f64>;
/// Complex dense matrix.
pub type ComplexMatrix = ColMajor<Complex64>;

impl<T: Copy + Default> ColMajor<T> {
    /// Zero-initialised matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ColMajor {
            rows,
            cols,
            data: vec![T::default(); rows * cols],
        }
    }

    /// Builds entry-by-entry from `f(row, col)`.
    pub fn from_fn<F: FnMut(usize, usize) -> T>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = ColMajor::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`.
    ///
    /// # Panics
    ///
    /// Panics on out-of-range indices.
    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.data[j * self.rows + i]
    }

    /// Sets entry `(i, j)`.
    ///
    /// # Panics
    ///
    /// Panics on out-of-range indices.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.data[j * self.rows + i] = v;
    }

    /// The underlying column-major buffer.
    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Mutable access to one column.
    ///
    /// # Panics
    ///
    /// Panics when `j` is out of range.
    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        assert!(j < self.cols, "column out of range");
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }
}

impl RealMatrix {
    /// Promotes to a complex matrix.
    pub fn to_complex(&self) -> ComplexMatrix {
        ColMajor {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

impl ComplexMatrix {
    /// Hermitian-symmetrises in place: `A ← (A + A*)/2`.  Gram matrices
    /// assembled entry-by-entry are Hermitian only up to rounding; the
    /// Hermitian eigensolvers read just one triangle, and this keeps the
    /// two triangles consistent.
    pub fn hermitize(&mut self) {
        assert_eq!(self.rows, self.cols, "hermitize requires a square matrix");
        let n = self.rows;
        for j in 0..n {
            for i in 0..=j {
                let a = self.data[j * n + i];
                let b = self.data[i * n + j].conj();
                let avg = 0.5 * (a + b);
                self.data[j * n + i] = avg;
                self.data[i * n + j] = avg.conj();
            }
        }
        for j in 0..n {
            let d = &mut self.data[j * n + j];
            *d = Complex64::new(d.re, 0.0);
        }
    }
}

/// Sorts descending (singular values come out of `gesdd` descending
/// already; used for eigenvalue moduli).
pub fn sort_descending(v: &mut [f64]) {
    v.sort_by(|a, b| b.partial_cmp(a).expect("non-NaN"));
}

/// Singular values of a real matrix, descending.  Empty input → empty.
///
/// # Errors
///
/// [`Error::Lapack`] if `dgesdd` does not converge.
pub fn real_singular_values(a: &RealMatrix) -> Result<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    let mn = m.min(n);
    if mn == 0 {
        return Ok(Vec::new());
    }
    let mut work_a = a.data.clone();
    let mut s = vec![0.0_f64; mn];
    let mut u = [0.0_f64; 1];
    let mut vt = [0.0_f64; 1];
    let mut iwork = vec![0_i32; 8 * mn];
    let mut info = 0_i32;

    // Workspace query.
    let mut query = [0.0_f64; 1];
    unsafe {
        lapack::dgesdd(
            b'N', m as i32, n as i32, &mut work_a, m as i32, &mut s, &mut u, 1, &mut vt, 1,
            &mut query, -1, &mut iwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgesdd", info });
    }
    let lwork = query[0] as usize;
    let mut work = vec![0.0_f64; lwork.max(1)];
    unsafe {
        lapack::dgesdd(
            b'N', m as i32, n as i32, &mut work_a, m as i32, &mut s, &mut u, 1, &mut vt, 1,
            &mut work, lwork as i32, &mut iwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgesdd", info });
    }
    Ok(s)
}

/// Singular values of a complex matrix, descending.  Empty input → empty.
///
/// # Errors
///
/// [`Error::Lapack`] if `zgesdd` does not converge.
pub fn complex_singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    let mn = m.min(n);
    if mn == 0 {
        return Ok(Vec::new());
    }
    let mut work_a = a.data.clone();
    let mut s = vec![0.0_f64; mn];
    let mut u = [Complex64::new(0.0, 0.0); 1];
    let mut vt = [Complex64::new(0.0, 0.0); 1];
    // jobz = 'N' asks ≥ 7·min(m,n) in older references; allocate that.
    let mut rwork = vec![0.0_f64; 7 * mn];
    let mut iwork = vec![0_i32; 8 * mn];
    let mut info = 0_i32;

    let mut query = [Complex64::new(0.0, 0.0); 1];
    unsafe {
        lapack::zgesdd(
            b'N', m as i32, n as i32, &mut work_a, m as i32, &mut s, &mut u, 1, &mut vt, 1,
            &mut query, -1, &mut rwork, &mut iwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgesdd", info });
    }
    let lwork = query[0].re as usize;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1)];
    unsafe {
        lapack::zgesdd(
            b'N', m as i32, n as i32, &mut work_a, m as i32, &mut s, &mut u, 1, &mut vt, 1,
            &mut work, lwork as i32, &mut rwork, &mut iwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgesdd", info });
    }
    Ok(s)
}

/// Eigenvalues of a general real square matrix (unordered).
///
/// # Errors
///
/// [`Error::Lapack`] if `dgeev` does not converge.
///
/// # Panics
///
/// Panics if the matrix is not square.
pub fn real_eigenvalues(a: &RealMatrix) -> Result<Vec<Complex64>> {
    assert_eq!(a.rows, a.cols, "eigenvalues require a square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work_a = a.data.clone();
    let mut wr = vec![0.0_f64; n];
    let mut wi = vec![0.0_f64; n];
    let mut vl = [0.0_f64; 1];
    let mut vr = [0.0_f64; 1];
    let mut info = 0_i32;

    let mut query = [0.0_f64; 1];
    unsafe {
        lapack::dgeev(
            b'N', b'N', n as i32, &mut work_a, n as i32, &mut wr, &mut wi, &mut vl, 1, &mut vr,
            1, &mut query, -1, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgeev", info });
    }
    let lwork = query[0] as usize;
    let mut work = vec![0.0_f64; lwork.max(1)];
    unsafe {
        lapack::dgeev(
            b'N', b'N', n as i32, &mut work_a, n as i32, &mut wr, &mut wi, &mut vl, 1, &mut vr,
            1, &mut work, lwork as i32, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgeev", info });
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

/// Eigenvalues of a general complex square matrix (unordered).
///
/// # Errors
///
/// [`Error::Lapack`] if `zgeev` does not converge.
///
/// # Panics
///
/// Panics if the matrix is not square.
pub fn complex_eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    assert_eq!(a.rows, a.cols, "eigenvalues require a square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work_a = a.data.clone();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut vl = [Complex64::new(0.0, 0.0); 1];
    let mut vr = [Complex64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0_f64; 2 * n];
    let mut info = 0_i32;

    let mut query = [Complex64::new(0.0, 0.0); 1];
    unsafe {
        lapack::zgeev(
            b'N', b'N', n as i32, &mut work_a, n as i32, &mut w, &mut vl, 1, &mut vr, 1,
            &mut query, -1, &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgeev", info });
    }
    let lwork = query[0].re as usize;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1)];
    unsafe {
        lapack::zgeev(
            b'N', b'N', n as i32, &mut work_a, n as i32, &mut w, &mut vl, 1, &mut vr, 1,
            &mut work, lwork as i32, &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgeev", info });
    }
    Ok(w)
}

/// Eigenvalues of a Hermitian complex matrix, ascending.
///
/// Only the lower triangle is read.
///
/// # Errors
///
/// [`Error::Lapack`] if `zheev` does not converge.
///
/// # Panics
///
/// Panics if the matrix is not square.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    assert_eq!(a.rows, a.cols, "eigenvalues require a square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work_a = a.data.clone();
    let mut w = vec![0.0_f64; n];
    let mut rwork = vec![0.0_f64; (3 * n).max(1)];
    let mut info = 0_i32;

    let mut query = [Complex64::new(0.0, 0.0); 1];
    unsafe {
        lapack::zheev(
            b'N', b'L', n as i32, &mut work_a, n as i32, &mut w, &mut query, -1, &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zheev", info });
    }
    let lwork = query[0].re as usize;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1)];
    unsafe {
        lapack::zheev(
            b'N', b'L', n as i32, &mut work_a, n as i32, &mut w, &mut work, lwork as i32,
            &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zheev", info });
    }
    Ok(w)
}

/// Eigenvalues of the Hermitian-definite pencil `A x = λ B x` (`A`
/// Hermitian, `B` Hermitian positive definite), ascending.
///
/// Only the lower triangles are read.  A non-positive-definite `B`
/// surfaces as [`Error::Lapack`] with `info > n` (LAPACK convention:
/// the leading minor of order `info − n` is not positive definite), which
/// callers use to trigger their diagonal-jitter fallback.
///
/// # Errors
///
/// [`Error::Lapack`] on convergence failure (`info ≤ n`) or a
/// non-definite `B` (`info > n`).
///
/// # Panics
///
/// Panics if the matrices are not square of equal size.
pub fn hermitian_generalized_eigenvalues(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<Vec<f64>> {
    assert_eq!(a.rows, a.cols, "pencil requires square matrices");
    assert_eq!(b.rows, b.cols, "pencil requires square matrices");
    assert_eq!(a.rows, b.rows, "pencil requires equal sizes");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work_a = a.data.clone();
    let mut work_b = b.data.clone();
    let mut w = vec![0.0_f64; n];
    let mut rwork = vec![0.0_f64; (3 * n).max(1)];
    let mut info = 0_i32;

    let mut query = [Complex64::new(0.0, 0.0); 1];
    unsafe {
        lapack::zhegv(
            &[1], b'N', b'L', n as i32, &mut work_a, n as i32, &mut work_b, n as i32, &mut w,
            &mut query, -1, &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zhegv", info });
    }
    let lwork = query[0].re as usize;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1)];
    unsafe {
        lapack::zhegv(
            &[1], b'N', b'L', n as i32, &mut work_a, n as i32, &mut work_b, n as i32, &mut w,
            &mut work, lwork as i32, &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zhegv", info });
    }
    Ok(w)
}

/// Least-squares solution of the overdetermined system `A x ≈ b` (QR
/// factorization, full column rank assumed).  Returns the coefficient
/// vector of length `A.cols()`.
///
/// # Errors
///
/// [`Error::Lapack`] if `dgels` reports failure (rank deficiency).
///
/// # Panics
///
/// Panics unless `A.rows() ≥ A.cols() ≥ 1` and `b.len() == A.rows()`.
pub fn least_squares(a: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n && n >= 1, "least_squares needs a tall system");
    assert_eq!(b.len(), m, "right-hand side length mismatch");
    let mut work_a = a.data.clone();
    let mut work_b = b.to_vec();
    let mut info = 0_i32;

    let mut query = [0.0_f64; 1];
    unsafe {
        lapack::dgels(
            b'N', m as i32, n as i32, 1, &mut work_a, m as i32, &mut work_b, m as i32,
            &mut query, -1, &mut info, 1,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgels", info });
    }
    let lwork = query[0] as usize;
    let mut work = vec![0.0_f64; lwork.max(1)];
    unsafe {
        lapack::dgels(
            b'N', m as i32, n as i32, 1, &mut work_a, m as i32, &mut work_b, m as i32,
            &mut work, lwork as i32, &mut info, 1,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgels", info });
    }
    work_b.truncate(n);
    Ok(work_b)
}
