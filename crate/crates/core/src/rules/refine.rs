use crate::error::{GurError, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Splits `p` into rank-1 projectors by projecting the columns of `basis`
/// into its range and orthonormalizing them in order.
///
/// The result is covariant: refining `U p U†` against `U basis` gives the
/// conjugated refinement of `p` against `basis`.
pub fn refine_projector(p: &ComplexMatrix, basis: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    if p.dim() != basis.dim() {
        return Err(GurError::DimensionMismatch {
            expected: p.dim(),
            found: basis.dim(),
        });
    }
    let rank = p.projector_rank();
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(rank);
    for j in 0..basis.dim() {
        if vectors.len() == rank {
            break;
        }
        let mut v = p.apply(&basis.column(j));
        for u in &vectors {
            let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= overlap * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-7 {
            vectors.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    if vectors.len() != rank {
        return Err(GurError::InvalidRefinement(format!(
            "reference basis spans only {} of {rank} dimensions",
            vectors.len()
        )));
    }
    let refinement: Vec<ComplexMatrix> = vectors.iter().map(|v| ComplexMatrix::pure(v)).collect();
    let mut sum = ComplexMatrix::zeros(p.dim());
    for r in &refinement {
        sum.axpy(C64::new(1.0, 0.0), r);
    }
    if sum.distance(p) > 1e-8 {
        return Err(GurError::InvalidRefinement("refinement does not sum to the outcome".into()));
    }
    Ok(refinement)
}
