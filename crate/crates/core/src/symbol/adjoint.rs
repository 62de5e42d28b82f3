use num_complex::Complex64;

use super::{Symbol, SymbolHat, SymbolTable};
use crate::error::Result;
use crate::grid::GridSpec;

/// Symbol of the adjoint `a(x, D)*` on the lattice of `spec`.
///
/// In the Fourier basis the operator matrix is `Â[ζ, η] = â(ζ-η, η)`; its
/// conjugate transpose gives `b̂(ξ, η) = conj(â(-ξ, ξ+η))` with all indices
/// reduced mod `N`.
pub fn adjoint_symbol_matrix(a: &dyn Symbol, spec: GridSpec) -> Result<SymbolTable> {
    let hat = SymbolTable::tabulate(a, spec)?.partial_ft();
    let len = spec.len();
    let zero = spec.frequency_index(&[0, 0]);
    let mut data = vec![Complex64::new(0.0, 0.0); len * len];
    for eta in 0..len {
        for xi in 0..len {
            let neg = spec.sub_index(zero, xi);
            let sum = spec.add_index(xi, eta);
            data[eta * len + xi] = hat.get(neg, sum).conj();
        }
    }
    let mut table = SymbolHat::from_columns(spec, a.order(), data)?.to_table();
    if let Some(b) = a.tdc_bound() {
        table.set_tdc(Some(b));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::random_grid_function;
    use crate::symbol::{FnSymbol, MultiplicationSymbol};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_self_adjoint() {
        let g = GridSpec::one_d(16).unwrap();
        let b = adjoint_symbol_matrix(&FnSymbol::identity(1), g).unwrap();
        for v in b.data() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn multiplication_goes_to_conjugate() {
        let g = GridSpec::new(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_grid_function(g, &mut rng);
        let b = adjoint_symbol_matrix(&MultiplicationSymbol::new(m.clone()), g).unwrap();
        for e in 0..g.len() {
            for x in 0..g.len() {
                assert!((b.get(x, e) - m.values()[x].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn involution() {
        let g = GridSpec::one_d(32).unwrap();
        let a = FnSymbol::new(1, 1.0, "mix", |x, eta| {
            Complex64::new((2.0 * x[0]).sin() * eta[0], (x[0] - eta[0] / 7.0).cos())
        });
        let t = SymbolTable::tabulate(&a, g).unwrap();
        let b = adjoint_symbol_matrix(&t, g).unwrap();
        let bb = adjoint_symbol_matrix(&b, g).unwrap();
        assert!(t.max_abs_diff(&bb) < 1e-10);
    }
}
