//! Operator constructors: the rational R-matrix, the oscillator defect Lax
//! operators L and L̂, the S-matrix, transmission amplitudes and
//! transmission matrices, and the monodromy of a chain with one defect site.
//!
//! Operators acting on an auxiliary `N`-dimensional space and the defect
//! Fock space are laid out as `aux ⊗ Fock`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, NumberOrdering};
use crate::special::{gamma_ratio, POLE_EPS};
use crate::tensor::{antidiagonal, embed, kron, matrix_unit, permutation_op, Matrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The rank `N ≥ 2` of gl(N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct AlgebraRank(usize);

impl AlgebraRank {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("rank must be at least 2, got {n}")));
        }
        Ok(AlgebraRank(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Number of oscillator species carried by the defect.
    pub fn species(self) -> usize {
        self.0 - 1
    }
}

impl TryFrom<usize> for AlgebraRank {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        AlgebraRank::new(n)
    }
}

impl From<AlgebraRank> for usize {
    fn from(r: AlgebraRank) -> usize {
        r.0
    }
}

impl fmt::Display for AlgebraRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gl({})", self.0)
    }
}

/// Sign label for the `±` pairs (T⁺/T⁻, 𝔢⁺/𝔢⁻).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LaxVariant {
    /// L(λ): oscillator in the (1,1) auxiliary corner.
    DefectL,
    /// L̂(λ): the crossed operator, oscillator in the (N,N) corner.
    DefectLhat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaxSpec {
    pub rank: AlgebraRank,
    pub variant: LaxVariant,
    pub ordering: NumberOrdering,
    /// Coefficient `c` of the constant `i c` in the oscillator corner.
    pub shift: f64,
    /// Defect rapidity Θ; constructors evaluate at `λ − Θ`.
    pub rapidity: Complex64,
}

impl LaxSpec {
    /// Normal ordering, shift 1, Θ = 0.
    pub fn new(rank: AlgebraRank, variant: LaxVariant) -> Self {
        LaxSpec {
            rank,
            variant,
            ordering: NumberOrdering::Normal,
            shift: 1.0,
            rapidity: Complex64::new(0.0, 0.0),
        }
    }

    pub fn with_ordering(mut self, ordering: NumberOrdering, shift: f64) -> Self {
        self.ordering = ordering;
        self.shift = shift;
        self
    }

    pub fn with_rapidity(mut self, theta: Complex64) -> Self {
        self.rapidity = theta;
        self
    }

    /// Shift expressed relative to normal ordering; candidates with equal
    /// effective shift are the same operator.
    pub fn effective_shift(&self) -> f64 {
        match self.ordering {
            NumberOrdering::Normal => self.shift,
            NumberOrdering::Antinormal => self.shift + self.rank.species() as f64,
        }
    }
}

fn check_fock(rank: AlgebraRank, fock: &FockSpace) -> Result<()> {
    if fock.species() != rank.species() {
        return Err(Error::RankMismatch {
            species: fock.species(),
            rank: rank.get(),
        });
    }
    Ok(())
}

/// `Σ e_{kl} ⊗ X_{kl}` over the given auxiliary entries (1-based).
fn assemble(n: usize, fdim: usize, terms: Vec<(usize, usize, Matrix)>) -> Result<Matrix> {
    let mut out = Matrix::zeros(n * fdim, n * fdim);
    for (k, l, x) in terms {
        out = &out + &kron(&matrix_unit(n, k, l)?, &x);
    }
    Ok(out)
}

/// `R(λ) = λ + i𝒫` on `N ⊗ N`.
pub fn r_matrix(rank: AlgebraRank, lambda: Complex64) -> Matrix {
    let n = rank.get();
    &Matrix::identity(n * n).scale(lambda) + &permutation_op(n).scale(I)
}

/// L(λ − Θ) = e₁₁⊗(λ−Θ + ic + iℕ) + iΣ_{j≥2} e_jj⊗𝕀 + iΣ_{j≥2}(e_1j⊗a_{j−1} + e_j1⊗a†_{j−1}).
pub fn l_matrix(spec: &LaxSpec, fock: &FockSpace, lambda: Complex64) -> Result<Matrix> {
    if spec.variant != LaxVariant::DefectL {
        return Err(Error::InvalidArgument("l_matrix needs the DefectL variant".into()));
    }
    check_fock(spec.rank, fock)?;
    let n = spec.rank.get();
    let d = fock.dim();
    let id = Matrix::identity(d);
    let u = lambda - spec.rapidity;
    let num = fock.number_op_ordered(spec.ordering);
    let mut terms = vec![(1, 1, &id.scale(u + I * spec.shift) + &num.scale(I))];
    for j in 2..=n {
        let (a, adag) = fock.ladder_ops(j - 1)?;
        terms.push((j, j, id.scale(I)));
        terms.push((1, j, a.scale(I)));
        terms.push((j, 1, adag.scale(I)));
    }
    assemble(n, d, terms)
}

/// L̂(λ − Θ) with the oscillator in the (N,N) corner and barred indices
/// `j̄ = N + 1 − j`.
pub fn l_hat_matrix(spec: &LaxSpec, fock: &FockSpace, lambda: Complex64) -> Result<Matrix> {
    if spec.variant != LaxVariant::DefectLhat {
        return Err(Error::InvalidArgument("l_hat_matrix needs the DefectLhat variant".into()));
    }
    check_fock(spec.rank, fock)?;
    let n = spec.rank.get();
    let d = fock.dim();
    let id = Matrix::identity(d);
    let u = lambda - spec.rapidity;
    let corner = -u - I * (n as f64 / 2.0) + I * spec.shift;
    let num = fock.number_op_ordered(spec.ordering);
    let mut terms = vec![(n, n, &id.scale(corner) + &num.scale(I))];
    for j in 2..=n {
        let jb = n + 1 - j;
        let (a, adag) = fock.ladder_ops(j - 1)?;
        terms.push((jb, jb, id.scale(I)));
        terms.push((jb, n, a.scale(I)));
        terms.push((n, jb, adag.scale(I)));
    }
    assemble(n, d, terms)
}

/// Dispatches on `spec.variant`.
pub fn defect_lax(spec: &LaxSpec, fock: &FockSpace, lambda: Complex64) -> Result<Matrix> {
    match spec.variant {
        LaxVariant::DefectL => l_matrix(spec, fock, lambda),
        LaxVariant::DefectLhat => l_hat_matrix(spec, fock, lambda),
    }
}

/// `V₁ M^{t₁} V₁` for `M` on `aux(n) ⊗ rest`.
pub fn crossing_transform(m: &Matrix, n: usize) -> Result<Matrix> {
    let rest = m.rows() / n.max(1);
    let v = kron(&antidiagonal(n), &Matrix::identity(rest));
    Ok(&(&v * &m.partial_transpose_first(n)?) * &v)
}

/// Hole–hole scattering amplitude
/// `S(λ) = Γ(iλ/N+1) Γ(−iλ/N+1−1/N) / [Γ(−iλ/N+1) Γ(iλ/N+1−1/N)]`.
pub fn s_amplitude(rank: AlgebraRank, lambda: Complex64) -> Result<Complex64> {
    let n = rank.as_f64();
    let x = I * lambda / n;
    gamma_ratio(
        &[x + 1.0, -x + 1.0 - 1.0 / n],
        &[-x + 1.0, x + 1.0 - 1.0 / n],
        POLE_EPS,
    )
}

/// `𝕊(λ) = S(λ)/(iλ+1) · (iλ + 𝒫)`.
pub fn s_matrix(rank: AlgebraRank, lambda: Complex64) -> Result<Matrix> {
    let denom = I * lambda + 1.0;
    if denom.norm() < POLE_EPS {
        return Err(Error::Pole {
            what: "S-matrix prefactor iλ+1".into(),
            at: lambda,
        });
    }
    let s = s_amplitude(rank, lambda)?;
    let n = rank.get();
    let body = &Matrix::identity(n * n).scale(I * lambda) + &permutation_op(n);
    Ok(body.scale(s / denom))
}

/// Closed-form transmission amplitudes
/// `T⁺(λ) = Γ(−iλ/N + 1/2N) / Γ(−iλ/N − 1/2N + 1)`,
/// `T⁻(λ) = Γ(iλ/N + 1/2N + 1/2) / Γ(iλ/N − 1/2N + 1/2)`.
pub fn transmission_amplitude(rank: AlgebraRank, sign: Sign, lambda: Complex64) -> Result<Complex64> {
    let n = rank.as_f64();
    let x = I * lambda / n;
    let h = 0.5 / n;
    match sign {
        Sign::Plus => gamma_ratio(&[-x + h], &[-x - h + 1.0], POLE_EPS),
        Sign::Minus => gamma_ratio(&[x + h + 0.5], &[x - h + 0.5], POLE_EPS),
    }
}

/// Options shared by the two transmission-matrix constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionOptions {
    /// Ordering of the bare ℕ inside `ℕ̄ = ℕ + N/2 − 3/2`.
    pub ordering: NumberOrdering,
    /// Multiply by the scalar prefactor (T^± and the rational factor).
    pub with_prefactor: bool,
}

impl Default for TransmissionOptions {
    fn default() -> Self {
        TransmissionOptions {
            ordering: NumberOrdering::Normal,
            with_prefactor: true,
        }
    }
}

fn shifted_number(rank: AlgebraRank, fock: &FockSpace, ordering: NumberOrdering) -> Matrix {
    let shift = rank.as_f64() / 2.0 - 1.5;
    &fock.number_op_ordered(ordering) + &Matrix::identity(fock.dim()).scale(re(shift))
}

/// Scalar prefactor `T⁻(λ) / (iλ + N/2 − 1/2)` of 𝕋.
pub fn transmission_prefactor(rank: AlgebraRank, lambda: Complex64) -> Result<Complex64> {
    let denom = I * lambda + rank.as_f64() / 2.0 - 0.5;
    if denom.norm() < POLE_EPS {
        return Err(Error::Pole {
            what: "transmission prefactor iλ + N/2 − 1/2".into(),
            at: lambda,
        });
    }
    Ok(transmission_amplitude(rank, Sign::Minus, lambda)? / denom)
}

/// 𝕋(λ) = T⁻/(iλ+N/2−1/2) · (e₁₁⊗(iλ+1+ℕ̄) + Σ e_jj⊗𝕀 + Σ(e_1j⊗a_{j−1} + e_j1⊗a†_{j−1})).
pub fn transmission_matrix(
    rank: AlgebraRank,
    fock: &FockSpace,
    lambda: Complex64,
    opts: &TransmissionOptions,
) -> Result<Matrix> {
    check_fock(rank, fock)?;
    let n = rank.get();
    let d = fock.dim();
    let id = Matrix::identity(d);
    let nbar = shifted_number(rank, fock, opts.ordering);
    let mut terms = vec![(1, 1, &id.scale(I * lambda + 1.0) + &nbar)];
    for j in 2..=n {
        let (a, adag) = fock.ladder_ops(j - 1)?;
        terms.push((j, j, id.clone()));
        terms.push((1, j, a));
        terms.push((j, 1, adag));
    }
    let body = assemble(n, d, terms)?;
    if opts.with_prefactor {
        Ok(body.scale(transmission_prefactor(rank, lambda)?))
    } else {
        Ok(body)
    }
}

/// 𝕋̄(λ) = T⁺(λ) · (e_NN⊗(−iλ−N/2+1+ℕ̄) + Σ e_j̄j̄⊗𝕀 + Σ(e_j̄N⊗a_{j−1} + e_Nj̄⊗a†_{j−1})).
pub fn conjugate_transmission_matrix(
    rank: AlgebraRank,
    fock: &FockSpace,
    lambda: Complex64,
    opts: &TransmissionOptions,
) -> Result<Matrix> {
    check_fock(rank, fock)?;
    let n = rank.get();
    let nf = n as f64;
    let d = fock.dim();
    let id = Matrix::identity(d);
    let nbar = shifted_number(rank, fock, opts.ordering);
    let mut terms = vec![(n, n, &id.scale(-I * lambda - nf / 2.0 + 1.0) + &nbar)];
    for j in 2..=n {
        let jb = n + 1 - j;
        let (a, adag) = fock.ladder_ops(j - 1)?;
        terms.push((jb, jb, id.clone()));
        terms.push((jb, n, a));
        terms.push((n, jb, adag));
    }
    let body = assemble(n, d, terms)?;
    if opts.with_prefactor {
        Ok(body.scale(transmission_amplitude(rank, Sign::Plus, lambda)?))
    } else {
        Ok(body)
    }
}

pub const DEFAULT_DIM_CAP: usize = 20_000;

/// A chain of `sites` bulk gl(N) sites with the defect at position
/// `defect_site ∈ 1..=sites+1`.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub rank: AlgebraRank,
    pub sites: usize,
    pub defect_site: usize,
    pub fock: FockSpace,
    pub defect: LaxSpec,
    pub dim_cap: usize,
}

impl ChainSpec {
    pub fn new(
        rank: AlgebraRank,
        sites: usize,
        defect_site: usize,
        fock: FockSpace,
        theta: Complex64,
    ) -> Result<Self> {
        Self::with_defect(
            sites,
            defect_site,
            fock,
            LaxSpec::new(rank, LaxVariant::DefectL).with_rapidity(theta),
        )
    }

    pub fn with_defect(sites: usize, defect_site: usize, fock: FockSpace, defect: LaxSpec) -> Result<Self> {
        if defect_site == 0 || defect_site > sites + 1 {
            return Err(Error::IndexOutOfRange {
                what: "defect site",
                index: defect_site,
                bound: sites + 1,
            });
        }
        check_fock(defect.rank, &fock)?;
        Ok(ChainSpec {
            rank: defect.rank,
            sites,
            defect_site,
            fock,
            defect,
            dim_cap: DEFAULT_DIM_CAP,
        })
    }

    pub fn theta(&self) -> Complex64 {
        self.defect.rapidity
    }

    /// Tensor factor dimensions of the quantum space: bulk sites in order,
    /// then the defect Fock space.
    pub fn quantum_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.rank.get(); self.sites];
        dims.push(self.fock.dim());
        dims
    }

    pub fn quantum_dim(&self) -> usize {
        self.quantum_dims().iter().product()
    }

    /// Index of `|Ω⟩ = |1⟩^{⊗sites} ⊗ |vac⟩` in the quantum space.
    pub fn reference_index(&self) -> usize {
        0
    }
}

/// `T(λ) = X_{sites+1}(λ) ⋯ X_1(λ)` on `aux ⊗ quantum`, where `X_p` is
/// `R_{0p}(λ)` for bulk positions and `L_{0n}(λ − Θ)` at the defect.
pub fn monodromy(chain: &ChainSpec, lambda: Complex64) -> Result<Matrix> {
    let qdim = chain.quantum_dim();
    if qdim > chain.dim_cap {
        return Err(Error::DimensionCap {
            dim: qdim,
            cap: chain.dim_cap,
        });
    }
    let n = chain.rank.get();
    let mut dims = vec![n];
    dims.extend(chain.quantum_dims());
    let fock_factor = dims.len() - 1;

    let r = r_matrix(chain.rank, lambda);
    let l = defect_lax(&chain.defect, &chain.fock, lambda)?;

    // factor index for each chain position 1..=sites+1
    let mut factors = Vec::with_capacity(chain.sites + 1);
    let mut bulk = 1;
    for p in 1..=chain.sites + 1 {
        if p == chain.defect_site {
            factors.push((fock_factor, true));
        } else {
            factors.push((bulk, false));
            bulk += 1;
        }
    }

    let mut t = Matrix::identity(n * qdim);
    for &(f, is_defect) in factors.iter().rev() {
        let local = if is_defect { &l } else { &r };
        t = t.matmul(&embed(local, &dims, &[0, f])?)?;
    }
    Ok(t)
}

/// `t(λ) = tr₀ T(λ)`.
pub fn transfer_matrix(chain: &ChainSpec, lambda: Complex64) -> Result<Matrix> {
    monodromy(chain, lambda)?.partial_trace_first(chain.rank.get())
}
