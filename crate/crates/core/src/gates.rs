//! The collective operator toolbox: the pairwise entangler `S_ij`, the full
//! collective unitary `S` with its equivalent exponential form, rotated Pauli
//! bases, GHZ basis states, and the stabilizer verification that pins them
//! down.
//!
//! `S_ij = (I + sigma_y_i + sigma_y_j - sigma_y_i sigma_y_j)/2` is a Hermitian
//! unitary (an involution) diagonal in the two-qubit sigma_y eigenbasis with
//! eigenvalues (+1, +1, +1, -1). Applying all pairs turns any real separable
//! state into a maximally entangled state whose single-qubit marginals are
//! all I/2.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::orthogonal_pair;
use crate::error::{Error, Result};
use crate::state::{SingleQubitOp, StateVector, TwoQubitOp};

/// Elementwise tolerance for the stabilizer fixed-point check; looser than
/// the kernel tolerance because N^2 gate layers each contribute rounding.
pub const STABILIZER_TOL: f64 = 1e-8;

/// The pairwise entangler acting on qubits `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGate {
    pub i: usize,
    pub j: usize,
    pub matrix: TwoQubitOp,
}

/// `S_ij` as a 4x4 matrix in the `b_i + 2*b_j` index convention.
pub fn s_pair(i: usize, j: usize) -> Result<PairGate> {
    if i == j {
        return Err(Error::DuplicateQubit(i));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let im = Complex64::new(0.0, 1.0);

    // (I + Y_i + Y_j - Y_i Y_j)/2 with Y_i = kron(I, sy), Y_j = kron(sy, I).
    let sy = [[zero, -im], [im, zero]];
    let id = [[one, zero], [zero, one]];
    let mut m = [[zero; 4]; 4];
    for r in 0..4 {
        let (ri, rj) = (r & 1, r >> 1);
        for c in 0..4 {
            let (ci, cj) = (c & 1, c >> 1);
            let yi = sy[ri][ci] * id[rj][cj];
            let yj = id[ri][ci] * sy[rj][cj];
            let yy = sy[ri][ci] * sy[rj][cj];
            let eye = id[ri][ci] * id[rj][cj];
            m[r][c] = (eye + yi + yj - yy) * Complex64::new(0.5, 0.0);
        }
    }
    Ok(PairGate {
        i,
        j,
        matrix: TwoQubitOp(m),
    })
}

/// Apply the full collective unitary `S = prod_{i<j} S_ij` by sequential
/// pairwise gate application. The factors commute, so the order is
/// immaterial beyond rounding.
pub fn apply_s(state: &StateVector) -> Result<StateVector> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    let mut out = state.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let gate = s_pair(i, j)?;
            out.apply_two_mut(i, j, &gate.matrix)?;
        }
    }
    Ok(out)
}

/// Apply `S` through its exponential decomposition
/// `exp(-i C(N,2) pi/4) * exp(i (N-1) (pi/4) sum_j Y_j) * exp(-i (pi/4) sum_{j<k} Y_j Y_k)`,
/// evaluated by rotating every qubit into the sigma_y eigenbasis, where all
/// three factors are diagonal with phases that depend only on the Hamming
/// weight of the y-basis index, and rotating back.
///
/// The constant prefactor makes this agree with [`apply_s`] exactly,
/// including global phase, which is what the equivalence tests pin down.
pub fn apply_s_exponential(state: &StateVector) -> Result<StateVector> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }

    // T maps the computational basis onto the sigma_y eigenbasis:
    // T|0> = |y+>, T|1> = |y->.
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let t = SingleQubitOp([
        [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
        [Complex64::new(0.0, r), Complex64::new(0.0, -r)],
    ]);
    let t_dag = t.dagger();

    let mut out = state.clone();
    for k in 0..n {
        out.apply_single_mut(k, &t_dag)?;
    }

    // In the y eigenbasis, index bit k set means eigenvalue -1 for qubit k.
    // With h ones, sum_j lambda_j = n - 2h and
    // sum_{j<k} lambda_j lambda_k = ((n - 2h)^2 - n)/2.
    let pairs = (n * (n - 1) / 2) as f64;
    let constant = Complex64::from_polar(1.0, -pairs * PI / 4.0);
    let mut phase_by_weight = Vec::with_capacity(n + 1);
    for h in 0..=n {
        let m = n as f64 - 2.0 * h as f64;
        let linear = Complex64::from_polar(1.0, (n as f64 - 1.0) * (PI / 4.0) * m);
        let quadratic = Complex64::from_polar(1.0, -(PI / 4.0) * (m * m - n as f64) / 2.0);
        phase_by_weight.push(constant * linear * quadratic);
    }

    let phased: Vec<Complex64> = out
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| a * phase_by_weight[x.count_ones() as usize])
        .collect();
    let mut out = StateVector::from_amplitudes(phased)?;

    for k in 0..n {
        out.apply_single_mut(k, &t)?;
    }
    Ok(out)
}

/// Spin matrices along the locally rotated axes:
/// `sigma_z' = sigma_z cos(theta) + sigma_x sin(theta)` and
/// `sigma_x' = -sigma_z sin(theta) + sigma_x cos(theta)`.
/// Together with sigma_y they satisfy the Pauli algebra.
pub fn rotated_paulis(theta: f64) -> Result<(SingleQubitOp, SingleQubitOp)> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    let (s, c) = theta.sin_cos();
    let zp = SingleQubitOp([
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-c, 0.0)],
    ]);
    let xp = SingleQubitOp([
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
    ]);
    Ok((zp, xp))
}

/// Eigenstates of `sigma_x'(theta)` with eigenvalues +1 and -1:
/// `|0>_x' = cos((theta + pi/2)/2)|0> + sin((theta + pi/2)/2)|1>` and
/// `|1>_x' = sigma_y |0>_x'`.
pub fn xprime_basis(theta: f64) -> Result<(StateVector, StateVector)> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    let beta = (theta + FRAC_PI_2) / 2.0;
    let zero = StateVector::from_amplitudes(vec![
        Complex64::new(beta.cos(), 0.0),
        Complex64::new(beta.sin(), 0.0),
    ])?;
    let one = StateVector::from_amplitudes(vec![
        Complex64::new(0.0, -beta.sin()),
        Complex64::new(0.0, beta.cos()),
    ])?;
    Ok((zero, one))
}

/// A member of the orthonormal GHZ basis: a sign choice per qubit together
/// with the projection angles that define the per-qubit orthogonal pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzBasisElement {
    pub signs: String,
    pub etas: Vec<f64>,
}

impl GhzBasisElement {
    /// Validates the sign string (`'+'`/`'-'`, one per qubit) and folds the
    /// angles into `(-pi, pi]`.
    pub fn new(signs: &str, etas: &[f64]) -> Result<Self> {
        if signs.chars().count() != etas.len() {
            return Err(Error::SignLengthMismatch {
                got: signs.chars().count(),
                expected: etas.len(),
            });
        }
        if let Some(bad) = signs.chars().find(|&c| c != '+' && c != '-') {
            return Err(Error::InvalidSign(bad));
        }
        if etas.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFiniteAngle);
        }
        Ok(GhzBasisElement {
            signs: signs.to_string(),
            etas: etas.iter().map(|&e| crate::state::canon_angle(e)).collect(),
        })
    }

    /// Sign string for `n` qubits where bit `k` of `bits` set means `'-'`
    /// at position `k` (character `k` belongs to qubit `k`).
    pub fn signs_from_bits(bits: usize, n: usize) -> String {
        (0..n)
            .map(|k| if (bits >> k) & 1 == 1 { '-' } else { '+' })
            .collect()
    }

    pub fn state(&self) -> Result<StateVector> {
        ghz_state(&self.etas, &self.signs)
    }
}

/// The GHZ basis state `S prod_k |phi^{s_k}(eta_k)>`.
///
/// One code path for every sign string keeps relative phases consistent
/// across the whole basis, so superpositions reconstruct evolved states
/// exactly. For the all-`'+'` element this matches the closed-form
/// superposition of [`ghz_closed_form`] up to a global phase.
pub fn ghz_state(etas: &[f64], signs: &str) -> Result<StateVector> {
    let n = etas.len();
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    let element = GhzBasisElement::new(signs, etas)?;
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for (k, sign) in element.signs.chars().enumerate() {
        let (plus, minus) = orthogonal_pair(element.etas[k])?;
        let q = if sign == '+' { plus } else { minus };
        let mut next = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
        for (x, &amp) in amps.iter().enumerate() {
            next[x] = amp * q.amplitudes()[0];
            next[x + amps.len()] = amp * q.amplitudes()[1];
        }
        amps = next;
    }
    apply_s(&StateVector::from_amplitudes(amps)?)
}

/// The closed-form maximally entangled superposition
/// `(1/sqrt(2)) (prod_k |0>_x'(eta_k) + i prod_k |1>_x'(eta_k))`.
///
/// Built without touching `S`, which makes it the independent reference the
/// fidelity checks compare the dynamical route against.
pub fn ghz_closed_form(etas: &[f64]) -> Result<StateVector> {
    let n = etas.len();
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    let mut prod0 = vec![Complex64::new(1.0, 0.0)];
    let mut prod1 = vec![Complex64::new(1.0, 0.0)];
    for &eta in etas {
        let (zero, one) = xprime_basis(eta)?;
        let grow = |amps: &[Complex64], q: &StateVector| {
            let mut next = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
            for (x, &amp) in amps.iter().enumerate() {
                next[x] = amp * q.amplitudes()[0];
                next[x + amps.len()] = amp * q.amplitudes()[1];
            }
            next
        };
        prod0 = grow(&prod0, &zero);
        prod1 = grow(&prod1, &one);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let amps: Vec<Complex64> = prod0
        .iter()
        .zip(&prod1)
        .map(|(a, b)| (a + Complex64::new(0.0, 1.0) * b) * Complex64::new(r, 0.0))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Worst elementwise deviation over the N fixed-point equations
/// `sigma_z'(eta_i)^(i) prod_{j != i} sigma_y^(j) |state> = |state>`
/// and their pairwise consequence
/// `sigma_x'(eta_i)^(i) sigma_x'(eta_j)^(j) |state> = |state>`.
pub fn stabilizer_residual(state: &StateVector, etas: &[f64]) -> Result<f64> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    if etas.len() != n {
        return Err(Error::SignLengthMismatch {
            got: etas.len(),
            expected: n,
        });
    }
    let sy = SingleQubitOp::pauli_y();
    let mut worst = 0.0f64;

    for i in 0..n {
        let (zp, _) = rotated_paulis(etas[i])?;
        let mut t = state.clone();
        for j in 0..n {
            if j != i {
                t.apply_single_mut(j, &sy)?;
            }
        }
        t.apply_single_mut(i, &zp)?;
        worst = worst.max(t.max_abs_diff(state)?);
    }

    for i in 0..n {
        for ip in (i + 1)..n {
            let (_, xp_i) = rotated_paulis(etas[i])?;
            let (_, xp_ip) = rotated_paulis(etas[ip])?;
            let mut t = state.clone();
            t.apply_single_mut(i, &xp_i)?;
            t.apply_single_mut(ip, &xp_ip)?;
            worst = worst.max(t.max_abs_diff(state)?);
        }
    }
    Ok(worst)
}

/// True when every stabilizer fixed-point equation holds within
/// [`STABILIZER_TOL`].
pub fn verify_stabilizer(state: &StateVector, etas: &[f64]) -> Result<bool> {
    Ok(stabilizer_residual(state, etas)? <= STABILIZER_TOL)
}

/// The N-body unitary `U_N = (I + i prod_k sigma_y^(k))/sqrt(2)`.
///
/// Kept purely as an independent cross-check oracle for entangled-state
/// structure; the pairwise route is the object of interest.
pub fn u_n_oracle(state: &StateVector) -> Result<StateVector> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    let sy = SingleQubitOp::pauli_y();
    let mut flipped = state.clone();
    for k in 0..n {
        flipped.apply_single_mut(k, &sy)?;
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let amps: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .zip(flipped.amplitudes())
        .map(|(a, b)| (a + Complex64::new(0.0, 1.0) * b) * Complex64::new(r, 0.0))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Random real-plane angles in `(-pi, pi]`, one per qubit.
pub fn random_real_angles<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            crate::state::canon_angle(PI * (2.0 * u - 1.0))
        })
        .collect()
}

/// Random Bloch angles uniform over the sphere surface.
pub fn random_sphere_angles<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            ((1.0 - 2.0 * u).acos(), 2.0 * PI * v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{embed_pair, embed_single, Mat};
    use crate::state::{DensityMatrix, QubitAngles};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_product(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let pairs = random_sphere_angles(n, rng);
        StateVector::product_state(&QubitAngles::new(pairs).unwrap()).unwrap()
    }

    fn y_eigenstate(sign: f64) -> Vec<Complex64> {
        // |y+/-> = (|0> +/- i|1>)/sqrt(2)
        let r = std::f64::consts::FRAC_1_SQRT_2;
        vec![Complex64::new(r, 0.0), Complex64::new(0.0, sign * r)]
    }

    #[test]
    fn s_pair_eigenvalues_on_y_basis() {
        // (1+1+1-1)/2 = +1 on |y+>|y+> and (1-1-1-1)/2 = -1 on |y->|y->.
        let gate = s_pair(0, 1).unwrap().matrix;
        for (si, sj, expect) in [(1.0, 1.0, 1.0), (-1.0, -1.0, -1.0), (1.0, -1.0, 1.0)] {
            let qi = y_eigenstate(si);
            let qj = y_eigenstate(sj);
            let amps: Vec<Complex64> = (0..4).map(|x| qi[x & 1] * qj[x >> 1]).collect();
            let state = StateVector::from_amplitudes(amps).unwrap();
            let out = state.apply_two(0, 1, &gate).unwrap();
            let scaled: Vec<Complex64> = state
                .amplitudes()
                .iter()
                .map(|a| a * Complex64::new(expect, 0.0))
                .collect();
            let want = StateVector::from_amplitudes(scaled).unwrap();
            assert!(out.max_abs_diff(&want).unwrap() < 1e-12);
        }
    }

    #[test]
    fn s_pair_is_hermitian_involution() {
        let gate = s_pair(2, 5).unwrap().matrix;
        assert!(gate.is_hermitian(1e-12));
        assert!(gate.is_unitary(1e-12));
        let m = gate.as_mat();
        assert!(m.mul(&m).max_abs_diff(&Mat::identity(4)) < 1e-12);
    }

    #[test]
    fn s_pair_rejects_equal_indices() {
        assert!(matches!(s_pair(3, 3), Err(Error::DuplicateQubit(3))));
    }

    #[test]
    fn apply_s_is_involution_and_norm_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=7 {
            let state = random_product(n, &mut rng);
            let once = apply_s(&state).unwrap();
            assert!((once.norm_sqr() - 1.0).abs() < 1e-10);
            let twice = apply_s(&once).unwrap();
            assert!(twice.max_abs_diff(&state).unwrap() < 1e-12);
        }
    }

    #[test]
    fn apply_s_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 5;
        let state = random_product(n, &mut rng);

        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let forward = {
            let mut s = state.clone();
            for &(i, j) in &pairs {
                s = s.apply_two(i, j, &s_pair(i, j).unwrap().matrix).unwrap();
            }
            s
        };
        pairs.reverse();
        let backward = {
            let mut s = state;
            for &(i, j) in &pairs {
                s = s.apply_two(i, j, &s_pair(i, j).unwrap().matrix).unwrap();
            }
            s
        };
        assert!(forward.max_abs_diff(&backward).unwrap() < 1e-12);
    }

    #[test]
    fn apply_s_rejects_single_qubit() {
        let s = StateVector::zero_state(1).unwrap();
        assert!(matches!(apply_s(&s), Err(Error::TooFewQubits(1))));
    }

    #[test]
    fn exponential_route_matches_gate_route_including_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=8 {
            let state = random_product(n, &mut rng);
            let a = apply_s(&state).unwrap();
            let b = apply_s_exponential(&state).unwrap();
            assert!(
                a.max_abs_diff(&b).unwrap() < 1e-9,
                "exponential route drifted at n = {n}"
            );
            assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn exponential_route_odd_and_even_real_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3usize, 4] {
            let thetas = random_real_angles(n, &mut rng);
            let state =
                StateVector::product_state(&QubitAngles::real(&thetas).unwrap()).unwrap();
            let a = apply_s(&state).unwrap();
            let b = apply_s_exponential(&state).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-9);
        }
    }

    #[test]
    fn rotated_paulis_at_axes() {
        let (zp, xp) = rotated_paulis(0.0).unwrap();
        assert!(zp.max_abs_diff(&SingleQubitOp::pauli_z()) < 1e-15);
        assert!(xp.max_abs_diff(&SingleQubitOp::pauli_x()) < 1e-15);

        let (zp, xp) = rotated_paulis(FRAC_PI_2).unwrap();
        assert!(zp.max_abs_diff(&SingleQubitOp::pauli_x()) < 1e-15);
        let minus_z = SingleQubitOp([
            [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ]);
        assert!(xp.max_abs_diff(&minus_z) < 1e-15);
    }

    #[test]
    fn rotated_paulis_close_the_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let theta = PI * (2.0 * rng.random::<f64>() - 1.0);
            let (zp, xp) = rotated_paulis(theta).unwrap();
            assert!(zp.is_hermitian(1e-12) && zp.is_unitary(1e-12));
            assert!(xp.is_hermitian(1e-12) && xp.is_unitary(1e-12));

            let sy = SingleQubitOp::pauli_y();
            // Anticommutators vanish pairwise.
            for (a, b) in [(&xp, &sy), (&xp, &zp), (&sy, &zp)] {
                let anti = a.mul(b).as_mat().add(&b.mul(a).as_mat());
                assert!(anti.max_abs_diff(&Mat::zeros(2)) < 1e-12);
            }
            // [sigma_x', sigma_y] = 2i sigma_z'.
            let comm = xp.mul(&sy).as_mat().sub(&sy.mul(&xp).as_mat());
            let want = zp.as_mat().scale(Complex64::new(0.0, 2.0));
            assert!(comm.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn xprime_basis_eigenstates() {
        // theta = 0: |0>_x' is |+>.
        let (zero, _) = xprime_basis(0.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((zero.amplitudes()[0] - Complex64::new(r, 0.0)).norm() < 1e-15);
        assert!((zero.amplitudes()[1] - Complex64::new(r, 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let theta = PI * (2.0 * rng.random::<f64>() - 1.0);
            let (zero, one) = xprime_basis(theta).unwrap();
            let (_, xp) = rotated_paulis(theta).unwrap();
            let plus = zero.apply_single(0, &xp).unwrap();
            assert!(plus.max_abs_diff(&zero).unwrap() < 1e-12);
            let minus = one.apply_single(0, &xp).unwrap();
            let negated = StateVector::from_amplitudes(
                one.amplitudes().iter().map(|a| -a).collect(),
            )
            .unwrap();
            assert!(minus.max_abs_diff(&negated).unwrap() < 1e-12);
            assert!(zero.inner(&one).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn conjugation_identities_as_matrices() {
        // S_ij sigma_z'(i) S_ij^dag = sigma_z'(i) (x) sigma_y(j), S_ij
        // commutes with every sigma_y(k), and spectators are untouched,
        // checked as full 16x16 matrices at n = 4.
        let n = 4;
        let theta = 0.83;
        let (zp, _) = rotated_paulis(theta).unwrap();
        let sy = SingleQubitOp::pauli_y();

        for (i, j) in [(0usize, 1usize), (1, 3), (2, 0)] {
            let s_full = embed_pair(&s_pair(i, j).unwrap().matrix.0, i, j, n).unwrap();
            let zp_i = embed_single(&zp.0, i, n).unwrap();
            let sy_j = embed_single(&sy.0, j, n).unwrap();

            let lhs = s_full.mul(&zp_i).mul(&s_full.dagger());
            let rhs = zp_i.mul(&sy_j);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "conjugation failed for ({i},{j})");

            for k in 0..n {
                let sy_k = embed_single(&sy.0, k, n).unwrap();
                let commuted = s_full.mul(&sy_k).mul(&s_full.dagger());
                assert!(commuted.max_abs_diff(&sy_k) < 1e-12);
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let zp_k = embed_single(&zp.0, k, n).unwrap();
                let spectator = s_full.mul(&zp_k).mul(&s_full.dagger());
                assert!(spectator.max_abs_diff(&zp_k) < 1e-12);
            }
        }
    }

    #[test]
    fn ghz_state_matches_evolved_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=6 {
            let etas = random_real_angles(n, &mut rng);
            let via_s = apply_s(
                &StateVector::product_state(&QubitAngles::real(&etas).unwrap()).unwrap(),
            )
            .unwrap();
            let signs = "+".repeat(n);
            let basis = ghz_state(&etas, &signs).unwrap();
            assert!((basis.fidelity(&via_s).unwrap() - 1.0).abs() < 1e-10);

            let closed = ghz_closed_form(&etas).unwrap();
            assert!((closed.fidelity(&via_s).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ghz_basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 3;
        let etas = random_real_angles(n, &mut rng);
        let states: Vec<StateVector> = (0..1usize << n)
            .map(|bits| {
                ghz_state(&etas, &GhzBasisElement::signs_from_bits(bits, n)).unwrap()
            })
            .collect();
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                let overlap = sa.inner(sb).unwrap().norm();
                if a == b {
                    assert!((overlap - 1.0).abs() < 1e-10);
                } else {
                    assert!(overlap < 1e-10, "elements {a} and {b} overlap: {overlap}");
                }
            }
        }
    }

    #[test]
    fn ghz_two_qubit_closed_form_amplitudes() {
        // Hand expansion at etas = (0, 0): (1/(2 sqrt 2)) (1-i, 1+i, 1+i, 1-i)
        // up to a global phase.
        let state = ghz_state(&[0.0, 0.0], "++").unwrap();
        let r = 1.0 / (2.0 * 2.0f64.sqrt());
        let want = StateVector::from_amplitudes(vec![
            Complex64::new(r, -r),
            Complex64::new(r, r),
            Complex64::new(r, r),
            Complex64::new(r, -r),
        ])
        .unwrap();
        assert!((state.fidelity(&want).unwrap() - 1.0).abs() < 1e-12);
        // The closed form route gives those amplitudes verbatim.
        let closed = ghz_closed_form(&[0.0, 0.0]).unwrap();
        assert!(closed.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn ghz_marginals_are_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 2..=5 {
            let etas = random_real_angles(n, &mut rng);
            let bits = (rng.random::<u32>() as usize) & ((1 << n) - 1);
            let signs = GhzBasisElement::signs_from_bits(bits, n);
            let state = ghz_state(&etas, &signs).unwrap();
            for q in 0..n {
                let rho = state.partial_trace(&[q]).unwrap();
                assert!(rho.operator_distance(&DensityMatrix::maximally_mixed(2)) < 1e-10);
            }
        }
    }

    #[test]
    fn ghz_rejects_bad_signs() {
        assert!(matches!(
            ghz_state(&[0.0, 0.0], "+"),
            Err(Error::SignLengthMismatch { .. })
        ));
        assert!(matches!(
            ghz_state(&[0.0, 0.0], "+x"),
            Err(Error::InvalidSign('x'))
        ));
        assert!(matches!(
            ghz_state(&[0.0], "+"),
            Err(Error::TooFewQubits(1))
        ));
    }

    #[test]
    fn stabilizer_accepts_ghz_and_rejects_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5 {
            let etas = random_real_angles(n, &mut rng);
            let ghz = ghz_state(&etas, &"+".repeat(n)).unwrap();
            assert!(verify_stabilizer(&ghz, &etas).unwrap());

            let product =
                StateVector::product_state(&QubitAngles::real(&etas).unwrap()).unwrap();
            assert!(!verify_stabilizer(&product, &etas).unwrap());

            let mut perturbed = etas.clone();
            perturbed[0] += 0.1;
            assert!(!verify_stabilizer(&ghz, &perturbed).unwrap());
        }
    }

    #[test]
    fn u_n_oracle_properties() {
        // Unitarity as a matrix identity for small n.
        for n in 2..=4 {
            let dim = 1usize << n;
            let mut cols: Vec<Vec<Complex64>> = Vec::new();
            for x in 0..dim {
                let mut amps = vec![Complex64::new(0.0, 0.0); dim];
                amps[x] = Complex64::new(1.0, 0.0);
                let out = u_n_oracle(&StateVector::from_amplitudes(amps).unwrap()).unwrap();
                cols.push(out.amplitudes().to_vec());
            }
            let mut m = Mat::zeros(dim);
            for (c, col) in cols.iter().enumerate() {
                for (r, v) in col.iter().enumerate() {
                    m.set(r, c, *v);
                }
            }
            assert!(m.is_unitary(1e-12));
        }

        // On the x' product state at theta = 0, all marginals are I/2.
        let n = 4;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..n {
            let (zero, _) = xprime_basis(0.0).unwrap();
            let mut next = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
            for (x, &a) in amps.iter().enumerate() {
                next[x] = a * zero.amplitudes()[0];
                next[x + amps.len()] = a * zero.amplitudes()[1];
            }
            amps = next;
        }
        let state = StateVector::from_amplitudes(amps).unwrap();
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        let out = u_n_oracle(&state).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        for q in 0..n {
            let rho = out.partial_trace(&[q]).unwrap();
            assert!(rho.operator_distance(&DensityMatrix::maximally_mixed(2)) < 1e-10);
        }
    }
}
