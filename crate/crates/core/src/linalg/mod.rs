//! Dense complex linear algebra for small composite systems.

pub mod matrix;
pub mod sample;
pub mod tensor;

pub use matrix::{qubit, ComplexMatrix, C64, ONE, ZERO};
pub use sample::{
    fourier_matrix, haar_unitary, haar_unitary_with, random_density, random_density_with, random_observable,
    random_observable_with, random_projector, random_projector_with, shift_operator, Seed,
};
pub use tensor::{embed_local, partial_trace, permute_subsystems, place, reduce_to, tensor, tensor_all, trace_out};

/// Hermitian to `tol` with every eigenvalue `≥ -tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_hermitian(tol) && m.hermitian_eigenvalues().first().is_none_or(|&v| v >= -tol)
}

/// Smallest eigenvalue of the Hermitian part (0 for an empty matrix).
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    m.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
}

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` of a linear map on `dim × dim` matrices.
/// The map is completely positive iff the result is positive semidefinite.
pub fn choi_matrix(map: impl Fn(&ComplexMatrix) -> ComplexMatrix, dim: usize) -> ComplexMatrix {
    let mut blocks = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            blocks.push(map(&ComplexMatrix::unit(dim, i, j)));
        }
    }
    let out_dim = blocks.first().map_or(0, ComplexMatrix::dim);
    let mut choi = ComplexMatrix::zeros(dim * out_dim);
    for i in 0..dim {
        for j in 0..dim {
            let block = &blocks[i * dim + j];
            for r in 0..out_dim {
                for c in 0..out_dim {
                    choi.set(i * out_dim + r, j * out_dim + c, block.get(r, c));
                }
            }
        }
    }
    choi
}

/// Extends a map defined on density operators to all of `L(H)` by
/// linearity, evaluating it only on pure states:
/// `|i⟩⟨j| = |+⟩⟨+| + i|+i⟩⟨+i| − (1+i)/2 (|i⟩⟨i| + |j⟩⟨j|)`.
///
/// Only meaningful when the underlying map is convex-linear.
pub fn linear_extension<F>(map_on_states: F, dim: usize) -> impl Fn(&ComplexMatrix) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    move |unit: &ComplexMatrix| {
        // Locate the single non-zero entry of a matrix unit |i⟩⟨j|.
        let (i, j) = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .find(|&(r, c)| unit.get(r, c) != ZERO)
            .expect("linear_extension expects a matrix unit");
        let basis = |k: usize| ComplexMatrix::basis_projector(dim, k);
        if i == j {
            return map_on_states(&basis(i));
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut plus = vec![ZERO; dim];
        plus[i] = C64::new(h, 0.0);
        plus[j] = C64::new(h, 0.0);
        let mut plus_i = vec![ZERO; dim];
        plus_i[i] = C64::new(h, 0.0);
        plus_i[j] = C64::new(0.0, h);
        let mut out = map_on_states(&ComplexMatrix::pure(&plus));
        out.axpy(C64::new(0.0, 1.0), &map_on_states(&ComplexMatrix::pure(&plus_i)));
        let diag = &map_on_states(&basis(i)) + &map_on_states(&basis(j));
        out.axpy(C64::new(-0.5, -0.5), &diag);
        out
    }
}
