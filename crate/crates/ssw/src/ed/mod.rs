//! Exact diagonalization on small periodic chains: the ground-truth
//! oracle.
//!
//! Operators are built as dense 2^N × 2^N matrices in the σᶻ product basis
//! (site 1 is the most significant bit; bit 0 means spin up). A Pauli
//! string has exactly one nonzero entry per column, so construction walks
//! the basis once per string. The steady state ρ = e^{−βH₀ − γJ^E}/Z comes
//! from a Hermitian eigendecomposition with the spectrum shifted by its
//! minimum, safe for any β. Everything the bulk formulas predict (thermal
//! densities, Jordan-Wigner Majorana two-point functions, pair
//! correlators, Wootters concurrence of the two-site reduced state) is
//! recomputed here from the full density matrix with no free-fermion
//! shortcut, so agreement is a genuine end-to-end check.

pub mod free_fermion;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SswError};

/// Dense ED ceiling: 2^12 = 4096-dimensional eigensolves.
pub const MAX_SITES: usize = 12;

/// Single-site Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Hermiticity tag carried by built operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hermiticity {
    Hermitian,
    AntiHermitian,
}

/// A dense operator on an N-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliOperator {
    pub n_sites: usize,
    pub matrix: DMatrix<Complex64>,
    pub hermiticity: Hermiticity,
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(SswError::SizeLimit(n_sites));
    }
    Ok(())
}

fn dim(n_sites: usize) -> usize {
    1 << n_sites
}

/// Bit position of a 1-based site: site 1 is the most significant bit.
fn bit_position(n_sites: usize, site: usize) -> usize {
    n_sites - site
}

/// Accumulate coeff · (Π factors) into `matrix`. Factors are (site, axis)
/// with 1-based sites; a Pauli string maps each basis column to a single
/// row, so this is one O(2^N) pass.
fn add_pauli_string(
    matrix: &mut DMatrix<Complex64>,
    n_sites: usize,
    coeff: Complex64,
    factors: &[(usize, Axis)],
) {
    let i = Complex64::new(0.0, 1.0);
    for col in 0..dim(n_sites) {
        let mut row = col;
        let mut amp = coeff;
        for &(site, axis) in factors {
            let mask = 1usize << bit_position(n_sites, site);
            let bit = (row & mask != 0) as i32;
            let sign = f64::from(1 - 2 * bit);
            match axis {
                Axis::X => row ^= mask,
                Axis::Y => {
                    amp *= i * sign;
                    row ^= mask;
                }
                Axis::Z => amp *= sign,
            }
        }
        matrix[(row, col)] += amp;
    }
}

fn zeros(n_sites: usize) -> DMatrix<Complex64> {
    DMatrix::from_element(dim(n_sites), dim(n_sites), Complex64::new(0.0, 0.0))
}

/// σ^axis embedded at a 1-based site.
pub fn build_site_operator(n_sites: usize, site: usize, axis: Axis) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if site == 0 || site > n_sites {
        return Err(SswError::InvalidParams(format!(
            "site {site} out of range 1..={n_sites}"
        )));
    }
    let mut matrix = zeros(n_sites);
    add_pauli_string(&mut matrix, n_sites, Complex64::new(1.0, 0.0), &[(site, axis)]);
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::Hermitian,
    })
}

fn wrap(site: usize, n_sites: usize) -> usize {
    (site - 1) % n_sites + 1
}

/// H₀ = −(J/2) Σ_l (σˣ_l σˣ_{l+1} + σʸ_l σʸ_{l+1}) − bB Σ_l σᶻ_l, periodic.
pub fn build_h0(n_sites: usize, j: f64, b_field: f64, b_aux: f64) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if n_sites < 3 {
        return Err(SswError::InvalidParams(format!(
            "periodic chain needs at least 3 sites, got {n_sites}"
        )));
    }
    let mut matrix = zeros(n_sites);
    let hop = Complex64::new(-j / 2.0, 0.0);
    let zeeman = Complex64::new(-b_aux * b_field, 0.0);
    for l in 1..=n_sites {
        let l1 = wrap(l + 1, n_sites);
        add_pauli_string(&mut matrix, n_sites, hop, &[(l, Axis::X), (l1, Axis::X)]);
        add_pauli_string(&mut matrix, n_sites, hop, &[(l, Axis::Y), (l1, Axis::Y)]);
        add_pauli_string(&mut matrix, n_sites, zeeman, &[(l, Axis::Z)]);
    }
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::Hermitian,
    })
}

/// J^E = −BJ Σ_l (σʸ_l σˣ_{l+1} − σˣ_l σʸ_{l+1})
///       + (J²/2) Σ_l (σʸ_l σᶻ_{l+1} σˣ_{l+2} − σˣ_l σᶻ_{l+1} σʸ_{l+2}),
/// periodic.
pub fn build_je(n_sites: usize, j: f64, b_field: f64) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if n_sites < 3 {
        return Err(SswError::InvalidParams(format!(
            "periodic chain needs at least 3 sites, got {n_sites}"
        )));
    }
    let mut matrix = zeros(n_sites);
    let two_site = Complex64::new(-b_field * j, 0.0);
    let three_site = Complex64::new(j * j / 2.0, 0.0);
    for l in 1..=n_sites {
        let l1 = wrap(l + 1, n_sites);
        let l2 = wrap(l + 2, n_sites);
        add_pauli_string(&mut matrix, n_sites, two_site, &[(l, Axis::Y), (l1, Axis::X)]);
        add_pauli_string(&mut matrix, n_sites, -two_site, &[(l, Axis::X), (l1, Axis::Y)]);
        add_pauli_string(
            &mut matrix,
            n_sites,
            three_site,
            &[(l, Axis::Y), (l1, Axis::Z), (l2, Axis::X)],
        );
        add_pauli_string(
            &mut matrix,
            n_sites,
            -three_site,
            &[(l, Axis::X), (l1, Axis::Z), (l2, Axis::Y)],
        );
    }
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::Hermitian,
    })
}

/// Bond interaction V(l, l+1) = −(J/2)(σˣσˣ + σʸσʸ).
fn bond(n_sites: usize, l: usize, j: f64) -> DMatrix<Complex64> {
    let mut matrix = zeros(n_sites);
    let l = wrap(l, n_sites);
    let l1 = wrap(l + 1, n_sites);
    let hop = Complex64::new(-j / 2.0, 0.0);
    add_pauli_string(&mut matrix, n_sites, hop, &[(l, Axis::X), (l1, Axis::X)]);
    add_pauli_string(&mut matrix, n_sites, hop, &[(l, Axis::Y), (l1, Axis::Y)]);
    matrix
}

/// On-site piece h_l⁰ = −bB σᶻ_l.
fn onsite(n_sites: usize, l: usize, b_field: f64, b_aux: f64) -> DMatrix<Complex64> {
    let mut matrix = zeros(n_sites);
    add_pauli_string(
        &mut matrix,
        n_sites,
        Complex64::new(-b_aux * b_field, 0.0),
        &[(wrap(l, n_sites), Axis::Z)],
    );
    matrix
}

fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

/// Local current from the continuity construction:
/// j_l = (i/2)([h_l⁰ − h_{l+1}⁰, V(l,l+1)] + [V(l,l+1), V(l+1,l+2)]
///            + [V(l−1,l), V(l,l+1)]).
pub fn build_jl(
    n_sites: usize,
    l: usize,
    j: f64,
    b_field: f64,
    b_aux: f64,
) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if n_sites < 3 {
        return Err(SswError::InvalidParams(format!(
            "periodic chain needs at least 3 sites, got {n_sites}"
        )));
    }
    if l == 0 || l > n_sites {
        return Err(SswError::InvalidParams(format!(
            "site {l} out of range 1..={n_sites}"
        )));
    }
    let v_prev = bond(n_sites, l + n_sites - 1, j);
    let v_here = bond(n_sites, l, j);
    let v_next = bond(n_sites, l + 1, j);
    let h_diff = onsite(n_sites, l, b_field, b_aux) - onsite(n_sites, l + 1, b_field, b_aux);
    let sum = commutator(&h_diff, &v_here)
        + commutator(&v_here, &v_next)
        + commutator(&v_prev, &v_here);
    let matrix = sum.map(|x| Complex64::new(0.0, 0.5) * x);
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::Hermitian,
    })
}

/// Local energy density with the symmetric bond split,
/// h_l = h_l⁰ + (V(l−1,l) + V(l,l+1))/2, which is what makes the lattice
/// continuity relation i[H₀, h_l] = j_{l−1} − j_l hold exactly.
pub fn build_hl(
    n_sites: usize,
    l: usize,
    j: f64,
    b_field: f64,
    b_aux: f64,
) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if n_sites < 3 {
        return Err(SswError::InvalidParams(format!(
            "periodic chain needs at least 3 sites, got {n_sites}"
        )));
    }
    if l == 0 || l > n_sites {
        return Err(SswError::InvalidParams(format!(
            "site {l} out of range 1..={n_sites}"
        )));
    }
    let matrix = onsite(n_sites, l, b_field, b_aux)
        + (bond(n_sites, l + n_sites - 1, j) + bond(n_sites, l, j)).map(|x| 0.5 * x);
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::Hermitian,
    })
}

/// Σ_l (σˣ_l σˣ_{l+1} + σʸ_l σʸ_{l+1}), the observable behind the W₁
/// separability bound.
pub fn build_xx_plus_yy_sum(n_sites: usize) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if n_sites < 3 {
        return Err(SswError::InvalidParams(format!(
            "periodic chain needs at least 3 sites, got {n_sites}"
        )));
    }
    let mut matrix = zeros(n_sites);
    let one = Complex64::new(1.0, 0.0);
    for l in 1..=n_sites {
        let l1 = wrap(l + 1, n_sites);
        add_pauli_string(&mut matrix, n_sites, one, &[(l, Axis::X), (l1, Axis::X)]);
        add_pauli_string(&mut matrix, n_sites, one, &[(l, Axis::Y), (l1, Axis::Y)]);
    }
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::Hermitian,
    })
}

/// Jordan-Wigner Majorana A_l = (Π_{m<l} σᶻ_m) σˣ_l.
pub fn jw_majorana_a(n_sites: usize, site: usize) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if site == 0 || site > n_sites {
        return Err(SswError::InvalidParams(format!(
            "site {site} out of range 1..={n_sites}"
        )));
    }
    let mut factors: Vec<(usize, Axis)> = (1..site).map(|m| (m, Axis::Z)).collect();
    factors.push((site, Axis::X));
    let mut matrix = zeros(n_sites);
    add_pauli_string(&mut matrix, n_sites, Complex64::new(1.0, 0.0), &factors);
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::Hermitian,
    })
}

/// Jordan-Wigner Majorana B_l = −i (Π_{m<l} σᶻ_m) σʸ_l = a_l† − a_l.
pub fn jw_majorana_b(n_sites: usize, site: usize) -> Result<PauliOperator> {
    check_sites(n_sites)?;
    if site == 0 || site > n_sites {
        return Err(SswError::InvalidParams(format!(
            "site {site} out of range 1..={n_sites}"
        )));
    }
    let mut factors: Vec<(usize, Axis)> = (1..site).map(|m| (m, Axis::Z)).collect();
    factors.push((site, Axis::Y));
    let mut matrix = zeros(n_sites);
    add_pauli_string(&mut matrix, n_sites, Complex64::new(0.0, -1.0), &factors);
    Ok(PauliOperator {
        n_sites,
        matrix,
        hermiticity: Hermiticity::AntiHermitian,
    })
}

/// Hermitian eigendecomposition: ascending eigenvalues plus the unitary of
/// column eigenvectors. Goes through faer because nalgebra's symmetric
/// eigensolver silently returns inaccurate eigenvectors on clustered
/// spectra, and the density matrix inherits any such error wholesale.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let dim = m.nrows();
    let a = faer::Mat::from_fn(dim, dim, |i, j| m[(i, j)]);
    let eigen = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| SswError::EigensolverFailure(format!("{e:?}")))?;
    let s = eigen.S().column_vector();
    let values: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
    let vectors = DMatrix::from_fn(dim, dim, |i, j| eigen.U()[(i, j)]);
    Ok((values, vectors))
}

/// The steady-state density matrix ρ = e^{−βH₀ − γJ^E}/Z.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub rho: DMatrix<Complex64>,
    pub beta: f64,
    pub gamma: f64,
}

/// Build ρ by Hermitian eigendecomposition of K = βH₀ + γJ^E, with the
/// spectrum shifted by its minimum before exponentiation.
pub fn thermal_state(
    h0: &PauliOperator,
    je: &PauliOperator,
    beta: f64,
    gamma: f64,
) -> Result<ThermalState> {
    if h0.matrix.nrows() != je.matrix.nrows() {
        return Err(SswError::DimensionMismatch(format!(
            "H0 is {}x{} but JE is {}x{}",
            h0.matrix.nrows(),
            h0.matrix.ncols(),
            je.matrix.nrows(),
            je.matrix.ncols()
        )));
    }
    let k = h0.matrix.map(|x| beta * x) + je.matrix.map(|x| gamma * x);
    let (eigenvalues, u) = hermitian_eigen(&k)?;
    let min = eigenvalues[0];
    let weights: Vec<f64> = eigenvalues.iter().map(|&l| (-(l - min)).exp()).collect();
    let norm: f64 = weights.iter().sum();

    let mut scaled = u.clone();
    for (c, w) in weights.iter().enumerate() {
        let factor = Complex64::new(w / norm, 0.0);
        for r in 0..scaled.nrows() {
            scaled[(r, c)] = u[(r, c)] * factor;
        }
    }
    let rho = &scaled * u.adjoint();
    Ok(ThermalState {
        rho,
        beta,
        gamma,
    })
}

/// tr(M ρ) without forming the product matrix.
pub fn expect_matrix(m: &DMatrix<Complex64>, state: &ThermalState) -> Result<Complex64> {
    if m.nrows() != state.rho.nrows() {
        return Err(SswError::DimensionMismatch(format!(
            "operator is {}x{} but rho is {}x{}",
            m.nrows(),
            m.ncols(),
            state.rho.nrows(),
            state.rho.ncols()
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            total += m[(i, j)] * state.rho[(j, i)];
        }
    }
    Ok(total)
}

/// ⟨op⟩ = tr(op ρ) for a Hermitian operator; the imaginary residue is
/// numerical noise.
pub fn expect(op: &PauliOperator, state: &ThermalState) -> Result<f64> {
    let value = expect_matrix(&op.matrix, state)?;
    debug_assert!(
        value.im.abs() < 1e-10,
        "Hermitian expectation kept imaginary part {}",
        value.im
    );
    Ok(value.re)
}

/// ⟨ψ|op|ψ⟩ for a pure state.
pub fn expect_pure(op: &PauliOperator, psi: &DVector<Complex64>) -> Result<f64> {
    if op.matrix.nrows() != psi.len() {
        return Err(SswError::DimensionMismatch(format!(
            "operator is {}x{} but state has {} amplitudes",
            op.matrix.nrows(),
            op.matrix.ncols(),
            psi.len()
        )));
    }
    let value = psi.dotc(&(&op.matrix * psi));
    debug_assert!(value.im.abs() < 1e-10);
    Ok(value.re)
}

/// Two-site reduced density matrix over (1-based) sites l, r, in the basis
/// |a b⟩ with a the σᶻ state of site l (index 2a + b).
pub fn two_site_rdm(state: &ThermalState, l: usize, r: usize) -> Result<DMatrix<Complex64>> {
    let dim_full = state.rho.nrows();
    let n_sites = dim_full.trailing_zeros() as usize;
    if dim_full != 1 << n_sites {
        return Err(SswError::InvalidDensityMatrix(format!(
            "dimension {dim_full} is not a power of two"
        )));
    }
    if l == 0 || r == 0 || l > n_sites || r > n_sites || l == r {
        return Err(SswError::DimensionMismatch(format!(
            "invalid site pair ({l}, {r}) for {n_sites} sites"
        )));
    }
    let pl = bit_position(n_sites, l);
    let pr = bit_position(n_sites, r);
    let (hi, lo) = if pl > pr { (pl, pr) } else { (pr, pl) };

    let mut rdm = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    let env_count = 1usize << (n_sites - 2);
    for env in 0..env_count {
        let low = env & ((1 << lo) - 1);
        let mid = (env >> lo) & ((1 << (hi - 1 - lo)) - 1);
        let high = env >> (hi - 1);
        let skeleton = (high << (hi + 1)) | (mid << (lo + 1)) | low;
        for a in 0..2usize {
            for b in 0..2usize {
                let row_state = skeleton | (a << pl) | (b << pr);
                for a2 in 0..2usize {
                    for b2 in 0..2usize {
                        let col_state = skeleton | (a2 << pl) | (b2 << pr);
                        rdm[(2 * a + b, 2 * a2 + b2)] += state.rho[(row_state, col_state)];
                    }
                }
            }
        }
    }
    Ok(rdm)
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (eigenvalues, u) = hermitian_eigen(m)?;
    let mut scaled = u.clone();
    for (c, &l) in eigenvalues.iter().enumerate() {
        if l < -1e-10 {
            return Err(SswError::InvalidDensityMatrix(format!(
                "negative eigenvalue {l} in a supposed PSD matrix"
            )));
        }
        let root = Complex64::new(l.max(0.0).sqrt(), 0.0);
        for r in 0..scaled.nrows() {
            scaled[(r, c)] = u[(r, c)] * root;
        }
    }
    Ok(&scaled * u.adjoint())
}

/// Wootters concurrence of a two-qubit density matrix:
/// C = max{0, λ₁ − λ₂ − λ₃ − λ₄} with λᵢ the decreasing square roots of
/// the eigenvalues of ρρ̃, ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ). Computed through the
/// Hermitian product √ρ ρ̃ √ρ, which shares those eigenvalues.
pub fn wootters_concurrence(rdm: &DMatrix<Complex64>) -> Result<f64> {
    if rdm.nrows() != 4 || rdm.ncols() != 4 {
        return Err(SswError::DimensionMismatch(format!(
            "concurrence needs a 4x4 matrix, got {}x{}",
            rdm.nrows(),
            rdm.ncols()
        )));
    }
    let trace = rdm.trace();
    if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-10 {
        return Err(SswError::InvalidDensityMatrix(format!(
            "trace {trace} is not 1"
        )));
    }
    let residue = (rdm - rdm.adjoint()).map(|x| x.norm()).max();
    if residue > 1e-8 {
        return Err(SswError::InvalidDensityMatrix(format!(
            "Hermiticity residue {residue}"
        )));
    }

    // σʸ⊗σʸ is real up to the product of two i's: entries ±1 on the
    // anti-diagonal.
    let mut yy = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    let signs = [-1.0, 1.0, 1.0, -1.0];
    for (k, &s) in signs.iter().enumerate() {
        yy[(k, 3 - k)] = Complex64::new(s, 0.0);
    }
    let rho_tilde = &yy * rdm.map(|x| x.conj()) * &yy;

    let sqrt_rho = hermitian_sqrt(rdm)?;
    let m = &sqrt_rho * rho_tilde * &sqrt_rho;
    // m is Hermitian PSD in exact arithmetic; symmetrize the rounding away.
    let m = (&m + m.adjoint()).map(|x| 0.5 * x);
    let (eigenvalues, _) = hermitian_eigen(&m)?;
    let mut lambdas: Vec<f64> = eigenvalues
        .iter()
        .map(|&l| {
            if l < -1e-10 {
                return f64::NAN;
            }
            l.max(0.0).sqrt()
        })
        .collect();
    if lambdas.iter().any(|l| l.is_nan()) {
        return Err(SswError::InvalidDensityMatrix(
            "negative eigenvalue in rho rho-tilde".into(),
        ));
    }
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// ⊗_l (cos(θ_l/2)|↑⟩ + e^{iφ_l} sin(θ_l/2)|↓⟩) with Haar-uniform site
/// directions drawn from `rng`.
pub fn random_product_state<R: Rng>(n_sites: usize, rng: &mut R) -> Result<DVector<Complex64>> {
    check_sites(n_sites)?;
    let mut psi = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for _ in 0..n_sites {
        let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let theta = cos_theta.acos();
        let site = DVector::from_vec(vec![
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ]);
        psi = psi.kronecker(&site);
    }
    Ok(psi)
}
