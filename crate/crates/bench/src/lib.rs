//! Inputs shared by the benchmarks.

use dforge_core::diff_poly::DiffPolynomial;
use dforge_core::parse::parse_diffpoly_lenient;

/// `Σ_k c_k x^k f^{k'}` style polynomials of growing x-degree.
pub fn x_polynomial(deg: u32) -> DiffPolynomial {
    let text: Vec<String> = (0..=deg).map(|k| format!("x^{k}*f^{}", (k % 3) + 1)).collect();
    parse_diffpoly_lenient(&format!("{} + f'", text.join(" + "))).expect("valid polynomial")
}

/// Square integer matrices with small entries, deterministic.
pub fn small_matrices(count: usize, dim: usize) -> Vec<Vec<Vec<i64>>> {
    let mut state = 0x9e37_79b9_u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % 7) as i64 - 3
    };
    (0..count).map(|_| (0..dim).map(|_| (0..dim).map(|_| next()).collect()).collect()).collect()
}
