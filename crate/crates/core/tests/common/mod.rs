//! Test-side oracles shared by integration targets.

use u3cert::meataxe::FpModule;
use u3cert::{Gf2, Matrix};

/// Matrices over GF(2) of size ≤ 8 as one byte per row; v·A by xoring rows.
fn bit_rows(m: &Matrix<Gf2>) -> Vec<u8> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).fold(0u8, |acc, c| acc | (m.get(r, c) << c)))
        .collect()
}

fn apply(rows: &[u8], v: u8) -> u8 {
    (0..rows.len())
        .filter(|i| v >> i & 1 == 1)
        .fold(0, |acc, i| acc ^ rows[i])
}

/// Closure of {v} under the generators as a set of vectors.
fn orbit_span(gens: &[Vec<u8>], v: u8) -> usize {
    let mut seen = vec![false; 256];
    seen[0] = true;
    seen[v as usize] = true;
    let mut span = vec![0u8, v];
    let mut i = 1;
    while i < span.len() {
        let w = span[i];
        let mut new = Vec::new();
        for g in gens {
            let x = apply(g, w);
            for &s in &span {
                let y = x ^ s;
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    new.push(y);
                }
            }
        }
        span.extend(new);
        i += 1;
    }
    span.len()
}

/// Reducible iff some nonzero vector spins to a proper subspace.
pub fn exhaustive_irreducible(m: &FpModule<Gf2>) -> bool {
    let d = m.dim();
    let gens: Vec<Vec<u8>> = m.actions().iter().map(bit_rows).collect();
    (1..(1u32 << d)).all(|v| orbit_span(&gens, v as u8) == 1 << d)
}
