// Links the system LAPACK/BLAS (the distro alternatives point at OpenBLAS).
// We deliberately avoid the *-src provider crates: the toolchain here always
// has the shared libraries installed.
fn main() {
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
