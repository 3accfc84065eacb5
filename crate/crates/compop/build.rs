//! Links the system LAPACK/BLAS shared libraries that back the dense
//! linear-algebra kernels (SVD, eigenvalue, and generalized-eigenvalue
//! factorizations).  The `lapack` crate provides raw FFI signatures only;
//! the actual implementation is whatever the platform's `liblapack.so` /
//! `libblas.so` alternatives point to (reference LAPACK or OpenBLAS both
//! work — all routines used here are standard).

fn main() {
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
