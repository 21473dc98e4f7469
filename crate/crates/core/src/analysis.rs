//! Expansion of arbitrary separable states over the GHZ basis, the optimal
//! orthogonal-plane projection, the maximal GHZ probability and its NPT
//! witness, and closed-form Bloch-sphere sweeps.

use std::collections::{BTreeMap, BinaryHeap};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{ghz_state, GhzBasisElement};
use crate::state::{canon_angle, QubitAngles, StateVector};

/// Largest qubit count for which the full 2^N coefficient map is built;
/// beyond this only the top-k enumeration is offered.
pub const MAX_FULL_EXPANSION: usize = 12;

/// Result of maximizing the overlap with an in-plane orthogonal pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionResult {
    /// Optimal projection angle in `(-pi, pi]`.
    pub eta: f64,
    /// The achieved maximum `(1 + sqrt(1 - sin^2 theta sin^2 phi))/2`.
    pub p_max: f64,
    /// Set when the Bloch vector sits on the +/- y axis: the in-plane
    /// projection has zero length and every eta achieves p = 1/2; eta = 0
    /// is returned by convention.
    pub degenerate: bool,
}

/// Overlap probability `p(eta) = (1 + cos(theta)cos(eta) + sin(theta)cos(phi)sin(eta))/2`
/// of the qubit `(theta, phi)` with the in-plane state `|phi^+(eta)>`.
pub fn projection_probability(theta: f64, phi: f64, eta: f64) -> f64 {
    (1.0 + theta.cos() * eta.cos() + theta.sin() * phi.cos() * eta.sin()) / 2.0
}

/// Direction of the Bloch vector's z-x-plane projection and the maximal
/// in-plane overlap probability it achieves.
///
/// `eta = atan2(sin(theta)cos(phi), cos(theta))` is valid on the whole
/// sphere; on the half-space `sin(theta) > 0, cos(phi) != 0` it reduces to
/// the root of `tan(eta) = tan(theta)cos(phi)` with `sin(eta)cos(phi) > 0`.
pub fn optimal_projection(theta: f64, phi: f64) -> Result<ProjectionResult> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    let z = theta.cos();
    let x = theta.sin() * phi.cos();
    let len_sq = 1.0 - (theta.sin() * phi.sin()).powi(2);
    if len_sq <= 0.0 || (z == 0.0 && x == 0.0) {
        return Ok(ProjectionResult {
            eta: 0.0,
            p_max: 0.5,
            degenerate: true,
        });
    }
    Ok(ProjectionResult {
        eta: canon_angle(x.atan2(z)),
        p_max: (1.0 + len_sq.sqrt()) / 2.0,
        degenerate: false,
    })
}

/// The orthogonal in-plane pair
/// `|phi^+> = cos(eta/2)|0> + sin(eta/2)|1>` and
/// `|phi^-> = -sin(eta/2)|0> + cos(eta/2)|1>`.
pub fn orthogonal_pair(eta: f64) -> Result<(StateVector, StateVector)> {
    if !eta.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    let (s, c) = (eta / 2.0).sin_cos();
    let plus = StateVector::from_amplitudes(vec![
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
    ])?;
    let minus = StateVector::from_amplitudes(vec![
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
    ])?;
    Ok((plus, minus))
}

/// Per-qubit overlap factors `(<phi^+|psi>, <phi^->|psi>)` for the qubit
/// `(theta, phi)` projected onto the pair at `eta`.
fn overlap_factors(theta: f64, phi: f64, eta: f64) -> (Complex64, Complex64) {
    let a0 = Complex64::new((theta / 2.0).cos(), 0.0);
    let a1 = Complex64::from_polar((theta / 2.0).sin(), phi);
    let (s, c) = (eta / 2.0).sin_cos();
    (
        Complex64::new(c, 0.0) * a0 + Complex64::new(s, 0.0) * a1,
        Complex64::new(-s, 0.0) * a0 + Complex64::new(c, 0.0) * a1,
    )
}

/// Expansion of a separable state over the GHZ basis generated from the
/// per-qubit pairs at `etas`; sign-string keys use character `k` for
/// qubit `k`.
#[derive(Debug, Clone)]
pub struct GhzExpansion {
    pub n_qubits: usize,
    pub etas: Vec<f64>,
    pub coefficients: BTreeMap<String, Complex64>,
}

impl GhzExpansion {
    /// Completeness check `sum_s |c_s|^2`.
    pub fn sum_sq(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm_sqr()).sum()
    }

    /// Rebuild `sum_s c_s |ghz(s)>`; equals the `S`-evolved input state.
    pub fn reconstruct(&self) -> Result<StateVector> {
        let dim = 1usize << self.n_qubits;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for (signs, coeff) in &self.coefficients {
            let basis = ghz_state(&self.etas, signs)?;
            for (x, a) in basis.amplitudes().iter().enumerate() {
                amps[x] += coeff * a;
            }
        }
        StateVector::from_amplitudes(amps)
    }
}

/// Full coefficient map `c_s = prod_k <phi^{s_k}(eta_k)|psi^(k)>` over all
/// 2^N sign strings; capped at [`MAX_FULL_EXPANSION`] qubits.
pub fn ghz_expand(angles: &QubitAngles, etas: &[f64]) -> Result<GhzExpansion> {
    let n = angles.len();
    if etas.len() != n {
        return Err(Error::SignLengthMismatch {
            got: etas.len(),
            expected: n,
        });
    }
    if n > MAX_FULL_EXPANSION {
        return Err(Error::ExpansionTooLarge {
            n,
            max: MAX_FULL_EXPANSION,
        });
    }
    if etas.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFiniteAngle);
    }

    // Tensor the per-qubit factor pairs together; bit k of the running
    // index selects the '-' branch of qubit k.
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for (k, &(theta, phi)) in angles.pairs().iter().enumerate() {
        let (fp, fm) = overlap_factors(theta, phi, etas[k]);
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() * 2];
        for (x, &c) in coeffs.iter().enumerate() {
            next[x] = c * fp;
            next[x + coeffs.len()] = c * fm;
        }
        coeffs = next;
    }

    let mut coefficients = BTreeMap::new();
    for (bits, c) in coeffs.into_iter().enumerate() {
        coefficients.insert(GhzBasisElement::signs_from_bits(bits, n), c);
    }
    Ok(GhzExpansion {
        n_qubits: n,
        etas: etas.to_vec(),
        coefficients,
    })
}

#[derive(Debug)]
struct HeapNode {
    weight: f64,
    flips: u64,
    last: i64,
}

impl PartialEq for HeapNode {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.flips == other.flips
    }
}
impl Eq for HeapNode {}
impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on weight; flip pattern breaks ties deterministically.
        self.weight
            .total_cmp(&other.weight)
            .then(other.flips.cmp(&self.flips))
    }
}

/// The k largest `|c_s|^2` of the expansion, without materializing the
/// full 2^N map: best-first search over the per-qubit factor lattice,
/// flipping qubits from the greedy maximum in canonical order.
pub fn top_k_coefficients(
    angles: &QubitAngles,
    etas: &[f64],
    k: usize,
) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::EmptyTopK);
    }
    let n = angles.len();
    if etas.len() != n {
        return Err(Error::SignLengthMismatch {
            got: etas.len(),
            expected: n,
        });
    }
    if etas.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFiniteAngle);
    }

    // Per qubit: probability of the preferred branch (>= 1/2 always, since
    // the two branches are complementary) and which sign that branch is.
    let mut best_prob = Vec::with_capacity(n);
    let mut ratio = Vec::with_capacity(n);
    let mut best_sign_minus = Vec::with_capacity(n);
    for (qubit, &(theta, phi)) in angles.pairs().iter().enumerate() {
        let (fp, fm) = overlap_factors(theta, phi, etas[qubit]);
        let (pp, pm) = (fp.norm_sqr(), fm.norm_sqr());
        if pp >= pm {
            best_prob.push(pp);
            ratio.push(pm / pp);
            best_sign_minus.push(false);
        } else {
            best_prob.push(pm);
            ratio.push(pp / pm);
            best_sign_minus.push(true);
        }
    }
    let top_weight: f64 = best_prob.iter().product();

    let limit = k.min(1usize << n.min(63));
    let mut heap = BinaryHeap::new();
    heap.push(HeapNode {
        weight: top_weight,
        flips: 0,
        last: -1,
    });
    let mut out = Vec::with_capacity(limit);
    while out.len() < limit {
        let node = match heap.pop() {
            Some(node) => node,
            None => break,
        };
        let bits: usize = (0..n)
            .map(|q| {
                let flipped = (node.flips >> q) & 1 == 1;
                usize::from(flipped != best_sign_minus[q]) << q
            })
            .sum();
        out.push((GhzBasisElement::signs_from_bits(bits, n), node.weight));

        for q in ((node.last + 1) as usize)..n {
            heap.push(HeapNode {
                weight: node.weight * ratio[q],
                flips: node.flips | (1 << q),
                last: q as i64,
            });
        }
    }
    Ok(out)
}

/// The sufficient entanglement witness: the product of per-qubit maximal
/// GHZ overlaps, conclusive when it exceeds 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NptWitness {
    pub product: f64,
    pub is_conclusive: bool,
}

pub fn npt_witness(angles: &QubitAngles) -> Result<NptWitness> {
    let mut product = 1.0;
    for &(theta, phi) in angles.pairs() {
        product *= optimal_projection(theta, phi)?.p_max;
    }
    Ok(NptWitness {
        product,
        is_conclusive: product > 0.5,
    })
}

/// Closed-form maximal N-GHZ probability landscape for N identical qubits,
/// sampled on grid nodes: theta runs over `[0, pi]` inclusive and phi over
/// `[0, 2pi)`, theta-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub n: usize,
    pub grid: Vec<(f64, f64, f64)>,
}

impl SweepGrid {
    /// CSV rendering with a `theta,phi,P` header and 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.grid.len() * 48 + 16);
        out.push_str("theta,phi,P\n");
        for &(theta, phi, p) in &self.grid {
            out.push_str(&format!("{theta:.11e},{phi:.11e},{p:.11e}\n"));
        }
        out
    }

    pub fn max_p(&self) -> f64 {
        self.grid.iter().map(|&(_, _, p)| p).fold(f64::MIN, f64::max)
    }

    pub fn min_p(&self) -> f64 {
        self.grid.iter().map(|&(_, _, p)| p).fold(f64::MAX, f64::min)
    }
}

/// `P(theta, phi) = ((1 + sqrt(1 - sin^2 theta sin^2 phi))/2)^N` on a
/// uniform grid; the identical-qubit condensate case.
pub fn bloch_sweep(n_qubits: usize, grid_theta: usize, grid_phi: usize) -> Result<SweepGrid> {
    if grid_theta < 2 || grid_phi < 2 {
        return Err(Error::GridTooSmall {
            theta: grid_theta,
            phi: grid_phi,
        });
    }
    let mut grid = Vec::with_capacity(grid_theta * grid_phi);
    for ti in 0..grid_theta {
        let theta = (ti as f64 / (grid_theta - 1) as f64) * PI;
        for pj in 0..grid_phi {
            let phi = (pj as f64 / grid_phi as f64) * (2.0 * PI);
            let len_sq = 1.0 - (theta.sin() * phi.sin()).powi(2);
            let p = (1.0 + len_sq.max(0.0).sqrt()) / 2.0;
            grid.push((theta, phi, p.powi(n_qubits as i32)));
        }
    }
    Ok(SweepGrid { n: n_qubits, grid })
}

/// Expand a separable state over the basis at the per-qubit optimal etas.
pub fn optimal_etas(angles: &QubitAngles) -> Result<Vec<f64>> {
    angles
        .pairs()
        .iter()
        .map(|&(theta, phi)| Ok(optimal_projection(theta, phi)?.eta))
        .collect()
}
