//! Operators on the truncated emitter ⊗ Fock(N) space.
//!
//! Basis ordering is fixed globally: `index = tls * (N + 1) + n`, with
//! `tls = 0` the ground state and `n` the photon number.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Emitter (two-level) ⊗ single bosonic mode truncated at `n_fock` photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_fock: usize,
}

impl HilbertSpace {
    pub fn new(n_fock: usize) -> Result<Self> {
        if n_fock < 1 {
            return Err(Error::invalid("n_fock", "Fock cutoff must be >= 1"));
        }
        Ok(Self { n_fock })
    }

    pub fn n_fock(&self) -> usize {
        self.n_fock
    }

    pub fn fock_dim(&self) -> usize {
        self.n_fock + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_dim()
    }

    /// Joint index of |tls, n⟩ (`excited = true` for |e⟩).
    pub fn index(&self, excited: bool, n: usize) -> usize {
        debug_assert!(n <= self.n_fock);
        usize::from(excited) * self.fock_dim() + n
    }
}

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(pub DMatrix<C64>);

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// Largest |A − A†| entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Nonzero entries as (row, col, value) triplets.
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let d = self.dim();
        let mut out = Vec::new();
        for j in 0..d {
            for i in 0..d {
                let v = self.0[(i, j)];
                if v != ZERO {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

/// Kronecker product `a ⊗ b`; the first factor is the slow index.
pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix(a.0.kronecker(&b.0))
}

/// Like [`tensor`], but checks the result fits `space`.
pub fn tensor_in(space: &HilbertSpace, a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: a.dim(),
        });
    }
    if b.dim() != space.fock_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.fock_dim(),
            got: b.dim(),
        });
    }
    Ok(tensor(a, b))
}

/// Fock-space annihilation operator alone, ⟨n−1|a|n⟩ = √n.
pub fn fock_annihilation(n_fock: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(n_fock + 1, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// Two-level lowering operator alone, σ⁻|e⟩ = |g⟩ (basis: 0 = g, 1 = e).
pub fn tls_lowering() -> OperatorMatrix {
    OperatorMatrix::from_fn(2, |i, j| if i == 0 && j == 1 { ONE } else { ZERO })
}

/// Photon annihilation operator on the joint space (identity on the emitter).
pub fn annihilation(space: &HilbertSpace) -> OperatorMatrix {
    tensor(&OperatorMatrix::identity(2), &fock_annihilation(space.n_fock()))
}

/// Emitter lowering operator σ⁻ on the joint space (identity on the mode).
pub fn sigma_minus(space: &HilbertSpace) -> OperatorMatrix {
    tensor(&tls_lowering(), &OperatorMatrix::identity(space.fock_dim()))
}

pub fn sigma_plus(space: &HilbertSpace) -> OperatorMatrix {
    sigma_minus(space).adjoint()
}

/// a†a on the joint space.
pub fn number(space: &HilbertSpace) -> OperatorMatrix {
    let a = annihilation(space);
    &a.adjoint() * &a
}

/// σ⁺σ⁻ on the joint space (excited-state projector).
pub fn excited_projector(space: &HilbertSpace) -> OperatorMatrix {
    let s = sigma_minus(space);
    &s.adjoint() * &s
}

/// |ψ⟩⟨ψ| for a basis state.
pub fn basis_projector(space: &HilbertSpace, excited: bool, n: usize) -> OperatorMatrix {
    let k = space.index(excited, n);
    OperatorMatrix::from_fn(space.dim(), |i, j| if i == k && j == k { ONE } else { ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize) -> HilbertSpace {
        HilbertSpace::new(n).unwrap()
    }

    fn pseudo_random(dim: usize, seed: u64) -> OperatorMatrix {
        let mut state = seed;
        OperatorMatrix::from_fn(dim, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            C64::new(re, im)
        })
    }

    #[test]
    fn space_dimensions() {
        let s = space(5);
        assert_eq!(s.dim(), 12);
        assert_eq!(s.index(true, 3), 9);
        assert!(HilbertSpace::new(0).is_err());
    }

    #[test]
    fn ladder_elements() {
        let a = fock_annihilation(5);
        assert_eq!(a.get(0, 1), ONE);
        assert!((a.get(3, 4).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_commutator() {
        let n = 5;
        let a = fock_annihilation(n);
        let c = &(&a * &a.adjoint()) - &(&a.adjoint() * &a);
        for i in 0..=n {
            for j in 0..=n {
                let expected = if i != j {
                    0.0
                } else if i == n {
                    -(n as f64)
                } else {
                    1.0
                };
                assert!((c.get(i, j) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_algebra() {
        let sm = tls_lowering();
        let sp = sm.adjoint();
        let id = (&sm * &sp).0 + (&sp * &sm).0;
        assert!((id - DMatrix::identity(2, 2)).norm() < 1e-15);
        assert_eq!(&sm * &sm, OperatorMatrix::zeros(2));
        let s = space(4);
        let joint = sigma_minus(&s);
        assert_eq!(joint.get(s.index(false, 3), s.index(true, 3)), ONE);
        assert_eq!(&joint * &joint, OperatorMatrix::zeros(s.dim()));
    }

    #[test]
    fn number_spectrum_is_exact() {
        let s = space(6);
        let n = number(&s);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let expected = if i == j { (i % s.fock_dim()) as f64 } else { 0.0 };
                assert!((n.get(i, j).re - expected).abs() < 1e-12 && n.get(i, j).im == 0.0);
            }
        }
    }

    #[test]
    fn mode_and_emitter_commute() {
        let s = space(5);
        let c = annihilation(&s).commutator(&sigma_minus(&s));
        assert!(c.0.norm() < 1e-15);
    }

    #[test]
    fn tensor_identities() {
        let i6 = tensor(&OperatorMatrix::identity(2), &OperatorMatrix::identity(3));
        assert_eq!(i6, OperatorMatrix::identity(6));
        let a = pseudo_random(2, 1);
        let b = pseudo_random(3, 2);
        let c = pseudo_random(2, 3);
        let d = pseudo_random(3, 4);
        let ab = tensor(&a, &b);
        assert!((ab.trace() - a.trace() * b.trace()).norm() < 1e-12);
        let lhs = &ab * &tensor(&c, &d);
        let rhs = tensor(&(&a * &c), &(&b * &d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        // Brute-force element check of the ordering convention.
        for i in 0..6 {
            for j in 0..6 {
                let expected = a.get(i / 3, j / 3) * b.get(i % 3, j % 3);
                assert_eq!(ab.get(i, j), expected);
            }
        }
    }

    #[test]
    fn tensor_in_checks_dims() {
        let s = space(2);
        let r = tensor_in(&s, &OperatorMatrix::identity(3), &OperatorMatrix::identity(3));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        assert!(tensor_in(&s, &OperatorMatrix::identity(2), &OperatorMatrix::identity(3)).is_ok());
    }
}
