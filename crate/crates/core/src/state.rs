//! Dense complex statevector over the computational basis, plus the generic
//! kernels every other module builds on: product-state construction, gate
//! application, inner products, partial traces, and seeded measurement
//! sampling.
//!
//! Index convention (fixed project-wide): qubit `k` owns bit `k` of the
//! basis-state index, so qubit 0 is the least significant bit. States are
//! immutable values; every operation returns a fresh state.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, ONE, ZERO};

/// Hard upper bound on register width (16 MiB of amplitudes).
pub const MAX_QUBITS: usize = 20;

/// Wrap an angle into the canonical interval `(-pi, pi]`. Values already in
/// range pass through bit-exactly.
pub fn canon_angle(a: f64) -> f64 {
    let mut x = a;
    if !(x > -PI && x <= PI) {
        x = x.rem_euclid(2.0 * PI); // [0, 2pi]
        if x > PI {
            x -= 2.0 * PI;
        }
    }
    if x == 0.0 {
        x = 0.0; // normalize -0.0
    }
    x
}

/// Deterministic derivation of per-purpose seeds from one root seed, so
/// that independent random streams (angle draws, shot batches) never share
/// state. SplitMix64 finalizer over the (seed, stream) pair.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A 2x2 complex operator on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitOp(pub [[Complex64; 2]; 2]);

impl SingleQubitOp {
    pub fn identity() -> Self {
        SingleQubitOp([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        SingleQubitOp([[ZERO, ONE], [ONE, ZERO]])
    }

    /// Pauli y in the fixed global convention `[[0, -i], [i, 0]]`.
    pub fn pauli_y() -> Self {
        SingleQubitOp([
            [ZERO, Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), ZERO],
        ])
    }

    pub fn pauli_z() -> Self {
        SingleQubitOp([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        SingleQubitOp([[h, h], [h, -h]])
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        SingleQubitOp([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, other: &SingleQubitOp) -> SingleQubitOp {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        SingleQubitOp(out)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.as_mat().is_unitary(tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.as_mat().is_hermitian(tol)
    }

    pub fn max_abs_diff(&self, other: &SingleQubitOp) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    pub(crate) fn as_mat(&self) -> Mat {
        Mat::from_rows(&[&self.0[0], &self.0[1]])
    }
}

/// A 4x4 complex operator on an ordered qubit pair `(i, j)`.
///
/// Rows and columns are indexed by `b_i + 2*b_j`: the first qubit argument
/// of [`StateVector::apply_two`] is the low bit of the gate index.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitOp(pub [[Complex64; 4]; 4]);

impl TwoQubitOp {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = ONE;
        }
        TwoQubitOp(m)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.as_mat().is_unitary(tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.as_mat().is_hermitian(tol)
    }

    pub(crate) fn as_mat(&self) -> Mat {
        Mat::from_rows(&[&self.0[0], &self.0[1], &self.0[2], &self.0[3]])
    }
}

/// Per-qubit Bloch parameters `(theta_k, phi_k)` defining a separable pure
/// state. Constructed values are always in canonical form: `theta in [0, pi]`
/// and `phi in [0, 2pi)` in general, with real-plane states (phi = 0 or pi)
/// folded to `phi = 0` and `theta in (-pi, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitAngles(Vec<(f64, f64)>);

impl QubitAngles {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() || pairs.len() > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange {
                n: pairs.len(),
                max: MAX_QUBITS,
            });
        }
        if pairs.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(Error::NonFiniteAngle);
        }
        Ok(QubitAngles(pairs.into_iter().map(canonicalize).collect()))
    }

    /// Real-plane states: `phi = 0`, theta canonical in `(-pi, pi]`.
    pub fn real(thetas: &[f64]) -> Result<Self> {
        QubitAngles::new(thetas.iter().map(|&t| (t, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.0.iter().map(|&(t, _)| t).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        self.0.iter().map(|&(_, p)| p).collect()
    }

    /// True when every qubit lies in the z-x plane (all phi = 0 after
    /// canonicalization).
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|&(_, p)| p == 0.0)
    }
}

/// Canonical form of a single `(theta, phi)` pair; idempotent.
fn canonicalize(pair: (f64, f64)) -> (f64, f64) {
    let (mut theta, mut phi) = pair;
    theta = canon_angle(theta); // (-pi, pi]
    if theta < 0.0 {
        // (theta, phi) and (-theta, phi + pi) are the same amplitudes.
        theta = -theta;
        phi += PI;
    }
    phi = phi.rem_euclid(2.0 * PI);
    if phi == PI {
        // Real state written with a sign: fold into negative theta.
        theta = canon_angle(-theta);
        phi = 0.0;
    }
    if phi == 0.0 {
        phi = 0.0; // normalize -0.0
    }
    if theta == 0.0 {
        theta = 0.0;
    }
    (theta, phi)
}

/// Measurement outcome counts with seed provenance.
///
/// `counts` maps bitstrings (most significant qubit first, so qubit 0 is the
/// rightmost character) to the number of shots that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub seed: u64,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl ShotRecord {
    /// Expectation of sigma_z on `qubit` implied by the recorded counts
    /// (outcome bit 0 contributes +1, bit 1 contributes -1).
    pub fn expectation_z(&self, qubit: usize) -> f64 {
        let mut acc: i64 = 0;
        for (bits, &count) in &self.counts {
            let ch = bits.as_bytes()[bits.len() - 1 - qubit];
            if ch == b'0' {
                acc += count as i64;
            } else {
                acc -= count as i64;
            }
        }
        acc as f64 / self.shots as f64
    }
}

/// Hermitian positive-semidefinite reduced state of 1 or 2 kept qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        DensityMatrix { dim, entries }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.entry(k, k)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.as_mat().is_hermitian(tol)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.as_mat()).0
    }

    /// Eigenvalues (ascending) with matching orthonormal eigenvectors.
    pub fn eigen_pairs(&self) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        linalg::hermitian_eigen(&self.as_mat())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Operator-norm distance (largest |eigenvalue| of the Hermitian
    /// difference) to another density matrix of the same dimension.
    pub fn operator_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = self.as_mat().sub(&other.as_mat());
        let (w, _) = linalg::hermitian_eigen(&diff);
        w.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub(crate) fn as_mat(&self) -> Mat {
        Mat {
            dim: self.dim,
            data: self.entries.clone(),
        }
    }
}

/// Dense statevector over `2^n` computational-basis amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state |0...0>.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Wrap an amplitude buffer whose length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::BadAmplitudeCount(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        Ok(StateVector { n_qubits, amps })
    }

    /// Separable state `prod_k [cos(theta_k/2)|0> + sin(theta_k/2) e^{i phi_k} |1>]`.
    pub fn product_state(angles: &QubitAngles) -> Result<Self> {
        let n = angles.len();
        check_qubit_count(n)?;
        let mut amps = vec![ONE];
        for &(theta, phi) in angles.pairs() {
            let a0 = Complex64::new((theta / 2.0).cos(), 0.0);
            let a1 = Complex64::from_polar((theta / 2.0).sin(), phi);
            let mut next = vec![ZERO; amps.len() * 2];
            for (x, &amp) in amps.iter().enumerate() {
                next[x] = amp * a0;
                next[x + amps.len()] = amp * a1;
            }
            amps = next;
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply a 2x2 operator to qubit `k`, returning the new state.
    pub fn apply_single(&self, k: usize, op: &SingleQubitOp) -> Result<Self> {
        let mut out = self.clone();
        out.apply_single_mut(k, op)?;
        Ok(out)
    }

    /// Apply a 4x4 operator to the ordered pair `(i, j)`; `i` is the low bit
    /// of the gate index.
    pub fn apply_two(&self, i: usize, j: usize, op: &TwoQubitOp) -> Result<Self> {
        let mut out = self.clone();
        out.apply_two_mut(i, j, op)?;
        Ok(out)
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Fidelity `|<self|other>|^2` -- the global-phase-blind comparison.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest elementwise amplitude difference (global phase sensitive).
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Reduced density matrix of the kept qubits (1 or 2 of them). With two
    /// kept qubits the lower original index becomes the low bit of the
    /// reduced index.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() || keep.len() > 2 {
            return Err(Error::UnsupportedKeepCount(keep.len()));
        }
        let mut ks = keep.to_vec();
        ks.sort_unstable();
        if ks.len() == 2 && ks[0] == ks[1] {
            return Err(Error::DuplicateQubit(ks[0]));
        }
        for &q in &ks {
            if q >= self.n_qubits {
                return Err(Error::QubitIndexOutOfRange {
                    index: q,
                    n: self.n_qubits,
                });
            }
        }

        let m = ks.len();
        let kd = 1usize << m;
        let rest_qubits: Vec<usize> =
            (0..self.n_qubits).filter(|q| !ks.contains(q)).collect();
        let mut rho = vec![ZERO; kd * kd];

        for rest_idx in 0..(1usize << rest_qubits.len()) {
            let mut base = 0usize;
            for (bit, &q) in rest_qubits.iter().enumerate() {
                base |= ((rest_idx >> bit) & 1) << q;
            }
            for a in 0..kd {
                let xa = base | scatter(a, &ks);
                let amp_a = self.amps[xa];
                if amp_a == ZERO {
                    continue;
                }
                for b in 0..kd {
                    let xb = base | scatter(b, &ks);
                    rho[a * kd + b] += amp_a * self.amps[xb].conj();
                }
            }
        }
        Ok(DensityMatrix::from_entries(kd, rho))
    }

    /// Rotate each qubit by its basis rotation, then draw `shots` seeded
    /// samples from the resulting computational-basis distribution.
    pub fn sample_measurement(
        &self,
        per_qubit_basis: &[SingleQubitOp],
        shots: u64,
        seed: u64,
    ) -> Result<ShotRecord> {
        if shots == 0 {
            return Err(Error::TooFewShots { got: 0, min: 1 });
        }
        if per_qubit_basis.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: per_qubit_basis.len(),
                right: self.n_qubits,
            });
        }
        let mut rotated = self.clone();
        for (k, op) in per_qubit_basis.iter().enumerate() {
            rotated.apply_single_mut(k, op)?;
        }

        let mut cumulative = Vec::with_capacity(rotated.amps.len());
        let mut acc = 0.0f64;
        for a in &rotated.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let total = acc;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let r = rng.random::<f64>() * total;
            let idx = cumulative
                .partition_point(|&c| c <= r)
                .min(rotated.amps.len() - 1);
            let bits = format!("{:0width$b}", idx, width = self.n_qubits);
            *counts.entry(bits).or_insert(0) += 1;
        }
        Ok(ShotRecord {
            seed,
            shots,
            counts,
        })
    }

    /// Stable 64-bit digest of the amplitude buffer (FNV-1a over the raw
    /// float bit patterns); used for transcript provenance.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.n_qubits as u64);
        for a in &self.amps {
            eat(a.re.to_bits());
            eat(a.im.to_bits());
        }
        h
    }

    pub(crate) fn apply_single_mut(&mut self, k: usize, op: &SingleQubitOp) -> Result<()> {
        if k >= self.n_qubits {
            return Err(Error::QubitIndexOutOfRange {
                index: k,
                n: self.n_qubits,
            });
        }
        let m = &op.0;
        let step = 1usize << k;
        let dim = self.amps.len();
        let mut base = 0usize;
        while base < dim {
            for offset in 0..step {
                let x0 = base + offset;
                let x1 = x0 + step;
                let a = self.amps[x0];
                let b = self.amps[x1];
                self.amps[x0] = m[0][0] * a + m[0][1] * b;
                self.amps[x1] = m[1][0] * a + m[1][1] * b;
            }
            base += 2 * step;
        }
        Ok(())
    }

    pub(crate) fn apply_two_mut(&mut self, i: usize, j: usize, op: &TwoQubitOp) -> Result<()> {
        if i == j {
            return Err(Error::DuplicateQubit(i));
        }
        for &q in &[i, j] {
            if q >= self.n_qubits {
                return Err(Error::QubitIndexOutOfRange {
                    index: q,
                    n: self.n_qubits,
                });
            }
        }
        let m = &op.0;
        let mask_i = 1usize << i;
        let mask_j = 1usize << j;
        for x in 0..self.amps.len() {
            if x & (mask_i | mask_j) != 0 {
                continue;
            }
            let idx = [x, x | mask_i, x | mask_j, x | mask_i | mask_j];
            let a = [
                self.amps[idx[0]],
                self.amps[idx[1]],
                self.amps[idx[2]],
                self.amps[idx[3]],
            ];
            for (r, &xi) in idx.iter().enumerate() {
                self.amps[xi] =
                    m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2] + m[r][3] * a[3];
            }
        }
        Ok(())
    }

}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCountOutOfRange { n, max: MAX_QUBITS });
    }
    Ok(())
}

/// Spread the low bits of `compact` onto the qubit positions in `targets`.
#[inline]
fn scatter(compact: usize, targets: &[usize]) -> usize {
    let mut out = 0usize;
    for (bit, &q) in targets.iter().enumerate() {
        out |= ((compact >> bit) & 1) << q;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_state_north_poles() {
        let s = StateVector::product_state(&QubitAngles::new(vec![(0.0, 0.0), (0.0, 0.0)]).unwrap())
            .unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn product_state_south_pole() {
        let s = StateVector::product_state(&QubitAngles::new(vec![(PI, 0.0)]).unwrap()).unwrap();
        assert!((s.amplitudes()[0] - ZERO).norm() < 1e-15);
        assert!((s.amplitudes()[1] - ONE).norm() < 1e-15);
    }

    #[test]
    fn product_state_equator_with_phase() {
        // Direct evaluation of the two amplitude formulas at (pi/2, pi/2).
        let s = StateVector::product_state(
            &QubitAngles::new(vec![(FRAC_PI_2, FRAC_PI_2)]).unwrap(),
        )
        .unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, r)).norm() < 1e-15);
    }

    #[test]
    fn product_state_rejects_bad_input() {
        assert!(matches!(
            QubitAngles::new(vec![]),
            Err(Error::QubitCountOutOfRange { .. })
        ));
        assert!(matches!(
            QubitAngles::new(vec![(0.0, 0.0); 21]),
            Err(Error::QubitCountOutOfRange { .. })
        ));
        assert!(matches!(
            QubitAngles::new(vec![(f64::NAN, 0.0)]),
            Err(Error::NonFiniteAngle)
        ));
    }

    #[test]
    fn apply_single_pauli_x_flips() {
        let s = StateVector::zero_state(1).unwrap();
        let s = s.apply_single(0, &SingleQubitOp::pauli_x()).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, ONE]);
    }

    #[test]
    fn apply_single_pauli_y_on_zero() {
        // sigma_y |0> = i |1> in the fixed convention.
        let s = StateVector::zero_state(1).unwrap();
        let s = s.apply_single(0, &SingleQubitOp::pauli_y()).unwrap();
        assert_eq!(s.amplitudes()[1], c(0.0, 1.0));
    }

    #[test]
    fn apply_single_identity_is_bit_exact() {
        let angles = QubitAngles::new(vec![(0.3, 1.1), (2.0, 4.4), (1.2, 0.0)]).unwrap();
        let s = StateVector::product_state(&angles).unwrap();
        let t = s.apply_single(1, &SingleQubitOp::identity()).unwrap();
        assert_eq!(s.amplitudes(), t.amplitudes());
    }

    #[test]
    fn index_convention_bit_k() {
        // sigma_x on qubit k of |0..0> sets exactly bit k.
        for n in 1..=5 {
            for k in 0..n {
                let s = StateVector::zero_state(n).unwrap();
                let s = s.apply_single(k, &SingleQubitOp::pauli_x()).unwrap();
                for (x, amp) in s.amplitudes().iter().enumerate() {
                    if x == 1 << k {
                        assert!((amp - ONE).norm() < 1e-15);
                    } else {
                        assert_eq!(*amp, ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn apply_two_swap() {
        // Swap on (qubit0=1, qubit1=0), i.e. index 1, gives index 2.
        let mut swap = [[ZERO; 4]; 4];
        swap[0][0] = ONE;
        swap[1][2] = ONE;
        swap[2][1] = ONE;
        swap[3][3] = ONE;
        let swap = TwoQubitOp(swap);
        let s = StateVector::from_amplitudes(vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        let s = s.apply_two(0, 1, &swap).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn apply_two_identity_unchanged() {
        let angles = QubitAngles::new(vec![(0.4, 0.2), (1.9, 5.1), (2.8, 3.3)]).unwrap();
        let s = StateVector::product_state(&angles).unwrap();
        let t = s.apply_two(2, 0, &TwoQubitOp::identity()).unwrap();
        assert_eq!(s.amplitudes(), t.amplitudes());
    }

    #[test]
    fn apply_two_rejects_same_qubit() {
        let s = StateVector::zero_state(2).unwrap();
        assert!(matches!(
            s.apply_two(1, 1, &TwoQubitOp::identity()),
            Err(Error::DuplicateQubit(1))
        ));
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::zero_state(1).unwrap();
        let one = zero.apply_single(0, &SingleQubitOp::pauli_x()).unwrap();
        assert!((zero.inner(&zero).unwrap() - ONE).norm() < 1e-15);
        assert!(zero.inner(&one).unwrap().norm() < 1e-15);

        // Antipodal real-plane states are orthogonal.
        let a = StateVector::product_state(&QubitAngles::new(vec![(FRAC_PI_2, 0.0)]).unwrap())
            .unwrap();
        let b = StateVector::product_state(&QubitAngles::new(vec![(FRAC_PI_2, PI)]).unwrap())
            .unwrap();
        assert!(a.inner(&b).unwrap().norm() < 1e-12);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let a = StateVector::zero_state(1).unwrap();
        let b = StateVector::zero_state(2).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn partial_trace_basis_state() {
        let s = StateVector::zero_state(2).unwrap();
        let rho = s.partial_trace(&[0]).unwrap();
        assert!((rho.entry(0, 0) - ONE).norm() < 1e-15);
        assert!(rho.entry(1, 1).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            StateVector::from_amplitudes(vec![c(r, 0.0), ZERO, ZERO, c(r, 0.0)]).unwrap();
        let rho = bell.partial_trace(&[0]).unwrap();
        assert!(rho.operator_distance(&DensityMatrix::maximally_mixed(2)) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let s = StateVector::zero_state(4).unwrap();
        assert!(matches!(
            s.partial_trace(&[]),
            Err(Error::UnsupportedKeepCount(0))
        ));
        assert!(matches!(
            s.partial_trace(&[0, 1, 2]),
            Err(Error::UnsupportedKeepCount(3))
        ));
        assert!(matches!(
            s.partial_trace(&[5]),
            Err(Error::QubitIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let zero = StateVector::zero_state(1).unwrap();
        let basis = [SingleQubitOp::identity()];
        let rec = zero.sample_measurement(&basis, 100, 7).unwrap();
        assert_eq!(rec.counts.get("0"), Some(&100));

        let plus = zero.apply_single(0, &SingleQubitOp::hadamard()).unwrap();
        let rec1 = plus.sample_measurement(&basis, 100_000, 3).unwrap();
        let rec2 = plus.sample_measurement(&basis, 100_000, 3).unwrap();
        assert_eq!(rec1, rec2);
        let ones = *rec1.counts.get("1").unwrap() as f64;
        assert!((ones / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn sampling_rejects_zero_shots() {
        let s = StateVector::zero_state(1).unwrap();
        assert!(matches!(
            s.sample_measurement(&[SingleQubitOp::identity()], 0, 0),
            Err(Error::TooFewShots { .. })
        ));
    }

    #[test]
    fn expectation_z_from_counts() {
        let mut counts = BTreeMap::new();
        counts.insert("00".to_string(), 75);
        counts.insert("01".to_string(), 25);
        let rec = ShotRecord {
            seed: 0,
            shots: 100,
            counts,
        };
        assert!((rec.expectation_z(0) - 0.5).abs() < 1e-12);
        assert!((rec.expectation_z(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonicalization_is_idempotent_and_folds_real_states() {
        let a = QubitAngles::new(vec![(-1.2, 0.0), (2.5, PI), (0.3, 7.0), (-0.4, 3.0)]).unwrap();
        let b = QubitAngles::new(a.pairs().to_vec()).unwrap();
        assert_eq!(a, b);
        // (2.5, pi) is a real state and folds to theta = -2.5, phi = 0.
        assert_eq!(a.pairs()[1], (-2.5, 0.0));
        assert!(a.pairs()[0].0 == -1.2 && a.pairs()[0].1 == 0.0);
    }

    #[test]
    fn canonicalization_preserves_amplitudes_up_to_phase() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let t = (rng.random::<f64>() - 0.5) * 12.0;
            let p = (rng.random::<f64>() - 0.5) * 12.0;
            let raw = {
                let a0 = c((t / 2.0).cos(), 0.0);
                let a1 = Complex64::from_polar((t / 2.0).sin(), p);
                StateVector::from_amplitudes(vec![a0, a1]).unwrap()
            };
            let canon = StateVector::product_state(
                &QubitAngles::new(vec![(t, p)]).unwrap(),
            )
            .unwrap();
            assert!(
                (raw.fidelity(&canon).unwrap() - 1.0).abs() < 1e-10,
                "canonicalization changed the physical state at ({t}, {p})"
            );
        }
    }

    #[test]
    fn shot_record_serializes_to_pinned_schema() {
        let mut counts = BTreeMap::new();
        counts.insert("01".to_string(), 3);
        counts.insert("00".to_string(), 2);
        let rec = ShotRecord {
            seed: 9,
            shots: 5,
            counts,
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"seed":9,"shots":5,"counts":{"00":2,"01":3}}"#);
    }

    #[test]
    fn checksum_stable_and_sensitive() {
        let a = StateVector::zero_state(3).unwrap();
        let b = StateVector::zero_state(3).unwrap();
        assert_eq!(a.checksum(), b.checksum());
        let c = a.apply_single(1, &SingleQubitOp::pauli_x()).unwrap();
        assert_ne!(a.checksum(), c.checksum());
    }
}
