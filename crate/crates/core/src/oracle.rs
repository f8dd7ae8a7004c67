//! Brute-force validation in truncated Fock space: coherent-state vectors,
//! displacement operators built by exact diagonalization, the two-mode beam
//! splitter for detection loss, and full correlators with no closed-form
//! shortcuts.
//!
//! Branch field states are four-mode products, so every multimode quantity
//! factorizes into single-mode pieces; the four-mode tensor space is never
//! materialized. The two-mode beam-splitter generator conserves total photon
//! number, so its exact diagonalization proceeds block by block.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::linalg::{expm_anti_hermitian, hermitian_eigen, CMatrix};
use crate::states::CciState;
use crate::{C64, Error, Result};

/// Truncated single-mode state: coefficients of |0> .. |cutoff>.
#[derive(Clone, Debug)]
pub struct FockVector {
    pub coeffs: Vec<C64>,
}

impl FockVector {
    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); cutoff + 1];
        coeffs[0] = C64::new(1.0, 0.0);
        FockVector { coeffs }
    }

    /// <self|other>.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Smallest cutoff considered safe for amplitude modulus-squared `n2`
/// (mean photon number plus ten standard deviations of the Poisson tail).
pub fn required_cutoff(n2: f64) -> usize {
    (n2 + 10.0 * (n2 + 1.0).sqrt()).ceil() as usize
}

const LEAK_TOL: f64 = 1e-10;

/// Coherent state |alpha> truncated at `cutoff`: c_n = e^{-|a|^2/2} a^n/sqrt(n!).
pub fn coherent_fock(alpha: C64, cutoff: usize) -> Result<FockVector> {
    let n2 = alpha.norm_sqr();
    let required = required_cutoff(n2);
    if cutoff < required {
        return Err(Error::Truncation { required, cutoff });
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); cutoff + 1];
    coeffs[0] = C64::new((-n2 / 2.0).exp(), 0.0);
    for n in 1..=cutoff {
        coeffs[n] = coeffs[n - 1] * alpha / (n as f64).sqrt();
    }
    let v = FockVector { coeffs };
    let leak = 1.0 - v.norm_sqr();
    if leak.abs() > LEAK_TOL {
        return Err(Error::Truncation { required, cutoff });
    }
    Ok(v)
}

/// Displacement operator exp(beta a^dag - conj(beta) a) on the truncated
/// space, by exact diagonalization of its (anti-Hermitian) generator.
pub fn displacement_matrix(beta: C64, cutoff: usize) -> Result<CMatrix> {
    let required = required_cutoff(beta.norm_sqr());
    if cutoff < required {
        return Err(Error::Truncation { required, cutoff });
    }
    let d = cutoff + 1;
    let mut gen = CMatrix::zeros(d, d);
    for n in 0..cutoff {
        let root = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = beta * root; // a^dag
        gen[(n, n + 1)] = -beta.conj() * root; // -conj(beta) a
    }
    Ok(expm_anti_hermitian(&gen))
}

/// The joint displaced photon-threshold observable over a set of modes:
/// prod_l D_l(beta_l)^dag (2|vac><vac| - 1) prod_l D_l(beta_l), held in
/// mode-factorized form.
pub struct ThresholdObservable {
    displacements: Vec<CMatrix>,
}

/// Build the observable for the given displacement of each mode.
pub fn threshold_observable(beta: &[C64], cutoff: usize) -> Result<ThresholdObservable> {
    let displacements = beta
        .iter()
        .map(|b| displacement_matrix(*b, cutoff))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdObservable { displacements })
}

impl ThresholdObservable {
    pub fn n_modes(&self) -> usize {
        self.displacements.len()
    }

    /// <x| A |y> for product states x = (x_1, ..., x_L), y likewise:
    /// 2 prod_l <x_l|D_l^dag|0><0|D_l|y_l> - prod_l <x_l|y_l>.
    pub fn matrix_element(&self, xs: &[FockVector], ys: &[FockVector]) -> C64 {
        assert_eq!(xs.len(), self.displacements.len());
        assert_eq!(ys.len(), self.displacements.len());
        let mut vac_part = C64::new(1.0, 0.0);
        let mut id_part = C64::new(1.0, 0.0);
        for (l, d) in self.displacements.iter().enumerate() {
            let dx = d.matvec(&xs[l].coeffs);
            let dy = d.matvec(&ys[l].coeffs);
            vac_part *= dx[0].conj() * dy[0];
            id_part *= xs[l].inner(&ys[l]);
        }
        2.0 * vac_part - id_part
    }

    /// Expectation on a product state.
    pub fn expectation(&self, xs: &[FockVector]) -> f64 {
        self.matrix_element(xs, xs).re
    }

    /// Generalized element between beam-splitter outputs (system x ancilla
    /// matrices), with the ancilla traced out:
    /// 2 prod_l sum_a <Mx_l[:,a]| D^dag|0><0|D |My_l[:,a]>
    ///   - prod_l sum_a <Mx_l[:,a]|My_l[:,a]>.
    pub fn channel_element(&self, xs: &[CMatrix], ys: &[CMatrix]) -> C64 {
        assert_eq!(xs.len(), self.displacements.len());
        let mut vac_part = C64::new(1.0, 0.0);
        let mut id_part = C64::new(1.0, 0.0);
        for (l, d) in self.displacements.iter().enumerate() {
            let (mx, my) = (&xs[l], &ys[l]);
            let dim = mx.n_rows();
            let n_anc = mx.n_cols();
            // row 0 of D |psi> per ancilla column
            let mut vac = C64::new(0.0, 0.0);
            let mut idp = C64::new(0.0, 0.0);
            for a in 0..n_anc {
                let mut dx0 = C64::new(0.0, 0.0);
                let mut dy0 = C64::new(0.0, 0.0);
                for n in 0..dim {
                    dx0 += d[(0, n)] * mx[(n, a)];
                    dy0 += d[(0, n)] * my[(n, a)];
                }
                vac += dx0.conj() * dy0;
                for n in 0..dim {
                    idp += mx[(n, a)].conj() * my[(n, a)];
                }
            }
            vac_part *= vac;
            id_part *= idp;
        }
        2.0 * vac_part - id_part
    }
}

/// Eigendecompositions of the photon-number-conserving blocks of the
/// two-mode beam-splitter generator a^dag b - a b^dag.
struct BeamSplitterBlocks {
    cutoff: usize,
    blocks: Vec<crate::linalg::HermitianEigen>,
}

fn beam_splitter_blocks(cutoff: usize) -> BeamSplitterBlocks {
    // inputs are |psi> (x) |vac>, so only blocks with total n <= cutoff are
    // ever populated; those blocks fit the truncated two-mode space exactly
    let mut blocks = Vec::with_capacity(cutoff + 1);
    for n in 0..=cutoff {
        let dim = n + 1;
        // i * generator, Hermitian, tridiagonal in k = n_sys
        let mut h = CMatrix::zeros(dim, dim);
        for k in 0..n {
            // <k+1, n-k-1| G |k, n-k> = sqrt((k+1)(n-k))
            let g = (((k + 1) * (n - k)) as f64).sqrt();
            h[(k + 1, k)] = C64::new(0.0, 1.0) * g;
            h[(k, k + 1)] = C64::new(0.0, -1.0) * g;
        }
        blocks.push(hermitian_eigen(&h));
    }
    BeamSplitterBlocks { cutoff, blocks }
}

impl BeamSplitterBlocks {
    /// Couple `state` to an ancilla vacuum with exp[acos(sqrt(eta)) G] and
    /// return the joint amplitudes M[(n_sys, n_anc)].
    fn output(&self, state: &FockVector, eta: f64) -> CMatrix {
        let cutoff = self.cutoff;
        let theta = eta.sqrt().min(1.0).acos();
        let d = cutoff + 1;
        let mut m = CMatrix::zeros(d, d);
        for n in 0..=cutoff {
            let c_n = state.coeffs[n];
            if c_n.norm_sqr() == 0.0 {
                continue;
            }
            let eig = &self.blocks[n];
            let dim = n + 1;
            // input basis index within block: k = n (all photons in the
            // system mode, ancilla in vacuum)
            let j_in = n;
            // U e_j = V diag(e^{-i theta w}) V^dag e_j
            let mut coef = vec![C64::new(0.0, 0.0); dim];
            for k in 0..dim {
                coef[k] = eig.eigenvectors[(j_in, k)].conj() * C64::new(0.0, -theta * eig.eigenvalues[k]).exp();
            }
            for row in 0..dim {
                let mut amp = C64::new(0.0, 0.0);
                for k in 0..dim {
                    amp += eig.eigenvectors[(row, k)] * coef[k];
                }
                m[(row, n - row)] += c_n * amp;
            }
        }
        m
    }
}

/// Send a single-mode state through a beam splitter of transmissivity
/// sqrt(eta) with a vacuum ancilla and trace out the ancilla; returns the
/// reduced density operator.
pub fn beam_splitter_attenuate(state: &FockVector, eta: f64, cutoff: usize) -> Result<CMatrix> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain("beam-splitter transmissivity requires eta in (0, 1]"));
    }
    if state.cutoff() != cutoff {
        return Err(Error::domain("state cutoff mismatch"));
    }
    let m = beam_splitter_blocks(cutoff).output(state, eta);
    let d = cutoff + 1;
    let mut rho = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..d {
                acc += m[(i, a)] * m[(j, a)].conj();
            }
            rho[(i, j)] = acc;
        }
    }
    Ok(rho)
}

fn branch_mode_amplitudes(state: &CciState) -> [[C64; 4]; 2] {
    [state.open_field.as_array(), state.closed_field.as_array()]
}

/// Full Fock-space evaluation of <Gamma(zeta) (x) A(beta)>, with the spin
/// part done by explicit 2x2 matrix exponentiation and every field quantity
/// computed from truncated Fock vectors. At eta < 1 each mode is attenuated
/// through the beam splitter before the threshold measurement.
pub fn oracle_correlator(
    state: &CciState,
    zeta: C64,
    beta: &[C64; 4],
    eta: f64,
    cutoff: usize,
) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain("detection efficiency must lie in (0, 1]"));
    }
    // spin observable from its generator, not from the closed form
    let mut gen = CMatrix::zeros(2, 2);
    gen[(0, 1)] = zeta;
    gen[(1, 0)] = -zeta.conj();
    let r = expm_anti_hermitian(&gen);
    let mut sz = CMatrix::zeros(2, 2);
    sz[(0, 0)] = C64::new(1.0, 0.0);
    sz[(1, 1)] = C64::new(-1.0, 0.0);
    let gamma = r.matmul(&sz).matmul(&r.adjoint());
    let spins = [&state.open_spin, &state.closed_spin];
    let spin_el = |x: usize, y: usize| -> C64 {
        let bra = spins[x];
        let ket = spins[y];
        let col = gamma.matvec(&[ket.up, ket.down]);
        bra.up.conj() * col[0] + bra.down.conj() * col[1]
    };

    let amps = branch_mode_amplitudes(state);
    let observable = threshold_observable(beta, cutoff)?;
    // Fock vectors of the raw branch amplitudes, for the state normalization
    let raw: [Vec<FockVector>; 2] = [
        amps[0]
            .iter()
            .map(|a| coherent_fock(*a, cutoff))
            .collect::<Result<Vec<_>>>()?,
        amps[1]
            .iter()
            .map(|a| coherent_fock(*a, cutoff))
            .collect::<Result<Vec<_>>>()?,
    ];
    let mut field_overlap = C64::new(1.0, 0.0);
    for l in 0..4 {
        field_overlap *= raw[0][l].inner(&raw[1][l]);
    }
    let w = [1.0, state.nfc];
    let nf_sq = 1.0
        + state.nfc * state.nfc
        + 2.0 * (state.nfc * state.open_spin.inner(&state.closed_spin) * field_overlap).re;

    let mut total = C64::new(0.0, 0.0);
    if (eta - 1.0).abs() < 1e-15 {
        for x in 0..2 {
            for y in 0..2 {
                total += w[x] * w[y] * spin_el(x, y) * observable.matrix_element(&raw[x], &raw[y]);
            }
        }
    } else {
        let blocks = beam_splitter_blocks(cutoff);
        let outputs: [Vec<CMatrix>; 2] = [
            raw[0].iter().map(|v| blocks.output(v, eta)).collect(),
            raw[1].iter().map(|v| blocks.output(v, eta)).collect(),
        ];
        for x in 0..2 {
            for y in 0..2 {
                total +=
                    w[x] * w[y] * spin_el(x, y) * observable.channel_element(&outputs[x], &outputs[y]);
            }
        }
    }
    Ok((total / nf_sq).re)
}
