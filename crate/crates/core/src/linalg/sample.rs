//! Seeded random sampling of unitaries, states, projectors and observables.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Derives an independent child seed from a stream tag and counter.
    pub fn derive(self, tag: &str, counter: u64) -> Seed {
        let mut h = fnv1a(tag.as_bytes());
        h = splitmix64(h ^ self.0);
        Seed(splitmix64(h ^ counter.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ *b as u64).wrapping_mul(0x100_0000_01b3))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` pushed into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    assert!(dim >= 1, "haar_unitary needs dim >= 1");
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    let (q, r) = g.qr();
    let phases: Vec<C64> = (0..dim)
        .map(|k| {
            let d = r.get(k, k);
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    ComplexMatrix::from_fn(dim, |i, j| q.get(i, j) * phases[j])
}

/// Wishart state `G G† / Tr(G G†)` with `G` of shape `dim × rank`.
pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    assert!((1..=dim).contains(&rank), "rank must lie in 1..=dim");
    let cols: Vec<Vec<C64>> = (0..rank).map(|_| (0..dim).map(|_| gaussian(rng)).collect()).collect();
    let mut m = ComplexMatrix::zeros(dim);
    for c in &cols {
        m.axpy(C64::new(1.0, 0.0), &ComplexMatrix::pure(c));
    }
    let tr = m.trace_re();
    m.scale(1.0 / tr)
}

/// Projector onto the span of columns `range` of `u`.
pub fn column_projector(u: &ComplexMatrix, range: std::ops::Range<usize>) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(u.dim());
    for j in range {
        p.axpy(C64::new(1.0, 0.0), &ComplexMatrix::pure(&u.column(j)));
    }
    p
}

pub fn random_projector_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    assert!((1..=dim).contains(&rank), "rank must lie in 1..=dim");
    if rank == dim {
        return ComplexMatrix::identity(dim);
    }
    let u = haar_unitary_with(rng, dim);
    column_projector(&u, 0..rank)
}

/// Uniform random composition of `total` into `parts` positive integers.
pub fn random_composition<R: Rng + ?Sized>(rng: &mut R, total: usize, parts: usize) -> Vec<usize> {
    assert!((1..=total).contains(&parts), "need 1 <= parts <= total");
    let mut cuts: Vec<usize> = index::sample(rng, total - 1, parts - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(total - prev);
    out
}

/// Mutually orthogonal projectors summing to the identity, with ranks
/// drawn as a uniform random composition of `dim`.
pub fn random_observable_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, num_outcomes: usize) -> Vec<ComplexMatrix> {
    let ranks = random_composition(rng, dim, num_outcomes);
    if num_outcomes == 1 {
        return vec![ComplexMatrix::identity(dim)];
    }
    let u = haar_unitary_with(rng, dim);
    let mut start = 0;
    ranks
        .into_iter()
        .map(|r| {
            let p = column_projector(&u, start..start + r);
            start += r;
            p
        })
        .collect()
}

/// Random unit vector inside the range of a projector.
pub fn random_vector_in<R: Rng + ?Sized>(rng: &mut R, projector: &ComplexMatrix) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..projector.dim()).map(|_| gaussian(rng)).collect();
        let w = projector.apply(&v);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return w.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn haar_unitary(dim: usize, seed: Seed) -> ComplexMatrix {
    haar_unitary_with(&mut seed.rng(), dim)
}

pub fn random_density(dim: usize, rank: usize, seed: Seed) -> ComplexMatrix {
    random_density_with(&mut seed.rng(), dim, rank)
}

pub fn random_projector(dim: usize, rank: usize, seed: Seed) -> ComplexMatrix {
    random_projector_with(&mut seed.rng(), dim, rank)
}

pub fn random_observable(dim: usize, num_outcomes: usize, seed: Seed) -> Vec<ComplexMatrix> {
    random_observable_with(&mut seed.rng(), dim, num_outcomes)
}

/// Generalized Pauli X (cyclic shift `|j⟩ ↦ |j+1 mod d⟩`).
pub fn shift_operator(dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        m.set((j + 1) % dim, j, C64::new(1.0, 0.0));
    }
    m
}

/// Discrete Fourier basis as the columns of a unitary; for `dim = 2` this is the Hadamard basis.
pub fn fourier_matrix(dim: usize) -> ComplexMatrix {
    let norm = 1.0 / (dim as f64).sqrt();
    ComplexMatrix::from_fn(dim, |j, k| {
        let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / dim as f64;
        C64::from_polar(norm, angle)
    })
}
