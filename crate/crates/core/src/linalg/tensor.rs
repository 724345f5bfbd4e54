//! Tensor products, partial traces and subsystem placement.
//!
//! Subsystem 0 is the most significant index: a basis state `|i₀ i₁ … i_{n-1}⟩`
//! sits at row `((i₀·d₁ + i₁)·d₂ + …)`.

use super::matrix::ComplexMatrix;
use crate::error::{GurError, Result};
use crate::state::CompositeSpace;

/// Kronecker product; the left factor is the slower-varying index.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(da * db, |r, c| a.get(r / db, c / db) * b.get(r % db, c % db))
}

pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor(&acc, f))
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn check_dim(m: &ComplexMatrix, space: &CompositeSpace) -> Result<()> {
    if m.dim() != space.total_dim() {
        return Err(GurError::DimensionMismatch {
            expected: space.total_dim(),
            found: m.dim(),
        });
    }
    Ok(())
}

/// Traces out every subsystem not listed in `keep`. The result acts on the
/// kept subsystems in canonical (ascending) order; duplicates in `keep` are ignored.
pub fn partial_trace(m: &ComplexMatrix, space: &CompositeSpace, keep: &[usize]) -> Result<ComplexMatrix> {
    check_dim(m, space)?;
    let dims = space.dims();
    for &k in keep {
        if k >= dims.len() {
            return Err(GurError::SubsystemOutOfRange {
                index: k,
                count: dims.len(),
            });
        }
    }
    let kept: Vec<bool> = (0..dims.len()).map(|k| keep.contains(&k)).collect();
    let kept_dim: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();

    // Split each full index into (kept index, traced index).
    let split: Vec<(usize, usize)> = (0..space.total_dim())
        .map(|i| {
            let mut kept_idx = 0;
            let mut traced_idx = 0;
            for (k, digit) in digits(i, dims).into_iter().enumerate() {
                if kept[k] {
                    kept_idx = kept_idx * dims[k] + digit;
                } else {
                    traced_idx = traced_idx * dims[k] + digit;
                }
            }
            (kept_idx, traced_idx)
        })
        .collect();

    let mut out = ComplexMatrix::zeros(kept_dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out.add_at(ki, kj, m.get(i, j));
            }
        }
    }
    Ok(out)
}

/// Reduced state of a single subsystem.
pub fn reduce_to(m: &ComplexMatrix, space: &CompositeSpace, target: usize) -> Result<ComplexMatrix> {
    partial_trace(m, space, &[target])
}

/// Reduced state of everything except `target`.
pub fn trace_out(m: &ComplexMatrix, space: &CompositeSpace, target: usize) -> Result<ComplexMatrix> {
    let keep: Vec<usize> = (0..space.len()).filter(|&k| k != target).collect();
    partial_trace(m, space, &keep)
}

/// Reorders subsystems: subsystem `order[p]` of `m` becomes subsystem `p` of the result.
pub fn permute_subsystems(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> ComplexMatrix {
    assert_eq!(dims.len(), order.len());
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let map: Vec<usize> = (0..m.dim())
        .map(|old| {
            let d = digits(old, dims);
            order.iter().zip(&new_dims).fold(0, |acc, (&k, &nd)| acc * nd + d[k])
        })
        .collect();
    let mut out = ComplexMatrix::zeros(m.dim());
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            out.set(map[i], map[j], m.get(i, j));
        }
    }
    out
}

/// Builds the operator `op ⊗ rest` with `op` sitting on subsystem `target`
/// and `rest` acting on the remaining subsystems in canonical order.
pub fn place(op: &ComplexMatrix, rest: &ComplexMatrix, space: &CompositeSpace, target: usize) -> Result<ComplexMatrix> {
    let dims = space.dims();
    if target >= dims.len() {
        return Err(GurError::SubsystemOutOfRange {
            index: target,
            count: dims.len(),
        });
    }
    if op.dim() != dims[target] {
        return Err(GurError::DimensionMismatch {
            expected: dims[target],
            found: op.dim(),
        });
    }
    let rest_dim = space.total_dim() / dims[target];
    if rest.dim() != rest_dim {
        return Err(GurError::DimensionMismatch {
            expected: rest_dim,
            found: rest.dim(),
        });
    }
    let joint = tensor(op, rest);
    if target == 0 {
        return Ok(joint);
    }
    // `joint` is ordered [target, others...]; move target back to its slot.
    let mut staged_dims = vec![dims[target]];
    staged_dims.extend(dims.iter().enumerate().filter(|&(k, _)| k != target).map(|(_, d)| *d));
    let order: Vec<usize> = (0..dims.len())
        .map(|p| match p.cmp(&target) {
            std::cmp::Ordering::Less => p + 1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => p,
        })
        .collect();
    Ok(permute_subsystems(&joint, &staged_dims, &order))
}

/// `op` acting on subsystem `target`, identity elsewhere.
pub fn embed_local(op: &ComplexMatrix, space: &CompositeSpace, target: usize) -> Result<ComplexMatrix> {
    let dims = space.dims();
    if target >= dims.len() {
        return Err(GurError::SubsystemOutOfRange {
            index: target,
            count: dims.len(),
        });
    }
    place(op, &ComplexMatrix::identity(space.total_dim() / dims[target]), space, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{qubit, C64};

    fn space(dims: &[usize]) -> CompositeSpace {
        CompositeSpace::new(dims.to_vec()).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let a = qubit::hadamard();
        assert_eq!(tensor(&a, &ComplexMatrix::identity(1)), a);
    }

    #[test]
    fn basis_product_ordering() {
        let p = tensor(&ComplexMatrix::basis_projector(2, 0), &ComplexMatrix::basis_projector(2, 1));
        assert_eq!(p, ComplexMatrix::basis_projector(4, 1));
    }

    #[test]
    fn tensor_matches_four_loop_definition() {
        let x = qubit::pauli_x();
        let z = qubit::pauli_z();
        let t = tensor(&x, &z);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(t.get(2 * i + k, 2 * j + l), x.get(i, j) * z.get(k, l));
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let rho = qubit::phi_plus();
        let s = space(&[2, 2]);
        let a = partial_trace(&rho, &s, &[0]).unwrap();
        assert!(a.approx_eq(&ComplexMatrix::identity(2).scale(0.5), 1e-12));
        let all = partial_trace(&rho, &s, &[]).unwrap();
        assert_eq!(all.dim(), 1);
        assert!((all.get(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let s = space(&[2, 3]);
        assert!(partial_trace(&ComplexMatrix::identity(4), &s, &[0]).is_err());
        assert!(partial_trace(&ComplexMatrix::identity(6), &s, &[2]).is_err());
    }

    #[test]
    fn embed_local_on_each_factor() {
        let p0 = ComplexMatrix::basis_projector(2, 0);
        let s = space(&[2, 2]);
        assert_eq!(embed_local(&p0, &s, 0).unwrap(), tensor(&p0, &ComplexMatrix::identity(2)));
        assert_eq!(embed_local(&p0, &s, 1).unwrap(), tensor(&ComplexMatrix::identity(2), &p0));
        assert!(embed_local(&p0, &space(&[3, 2]), 0).is_err());
    }

    #[test]
    fn embed_middle_factor_matches_permutation_matrix() {
        // Explicit permutation matrix taking the [1, 0, 2] ordering back to canonical.
        let dims = [2usize, 3, 2];
        let s = space(&dims);
        let op = ComplexMatrix::from_fn(3, |i, j| C64::new((i * 3 + j) as f64, (i as f64) - (j as f64)));
        let staged = tensor(&op, &ComplexMatrix::identity(4)); // order [1, 0, 2]
        let mut perm = ComplexMatrix::zeros(12);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let canonical = (a * 3 + b) * 2 + c;
                    let staged_idx = (b * 2 + a) * 2 + c;
                    perm.set(canonical, staged_idx, C64::new(1.0, 0.0));
                }
            }
        }
        let expected = perm.matmul(&staged).matmul(&perm.adjoint());
        assert!(embed_local(&op, &s, 1).unwrap().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn place_inverts_partial_traces_on_products() {
        let s = space(&[2, 3, 2]);
        let a = ComplexMatrix::diag_real(&[0.2, 0.5, 0.3]);
        let rest = tensor(&ComplexMatrix::diag_real(&[0.9, 0.1]), &ComplexMatrix::diag_real(&[0.4, 0.6]));
        let joint = place(&a, &rest, &s, 1).unwrap();
        assert!(reduce_to(&joint, &s, 1).unwrap().approx_eq(&a, 1e-12));
        assert!(trace_out(&joint, &s, 1).unwrap().approx_eq(&rest, 1e-12));
    }
}
