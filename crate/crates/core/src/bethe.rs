//! Nested Bethe equations for a homogeneous chain with one defect, a
//! damped Newton solver for them, and the finite-size counting function.
//!
//! Level 0 holds `sites` roots pinned at 0. For a root `λ` at level
//! `k = 1..N−1` the equation reads
//!
//! ```text
//! D_k(λ) = − Π_{level k−1} e₋₁(λ−μ) · Π_{level k} e₂(λ−μ) · Π_{level k+1} e₋₁(λ−μ)
//! ```
//!
//! with `D_1 = 𝔢⁺(λ−Θ)` for the L defect, `D_{N−1} = 𝔢⁻(λ−Θ)` for the L̂
//! defect and `D_k = 1` otherwise. The same-level product includes the
//! `μ = λ` term, `e₂(0) = −1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lax::{AlgebraRank, Sign};
use crate::tensor::Matrix;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default minimum separation of roots within a level.
pub const MIN_SEPARATION: f64 = 1e-9;
/// Distance to a pole of an evaluation factor treated as a collision.
const POLE_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetheVariant {
    #[serde(rename = "L_defect")]
    LDefect,
    #[serde(rename = "Lhat_defect")]
    LhatDefect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub rank: AlgebraRank,
    pub sites: usize,
    pub theta: Complex64,
    pub variant: BetheVariant,
    /// `roots[k−1]` is level `k`, for `k = 1..N−1`.
    pub roots: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum_numbers: Option<Vec<Vec<f64>>>,
}

impl BetheState {
    /// A state with the given root content; levels missing from `roots`
    /// are filled in empty.
    pub fn new(
        rank: AlgebraRank,
        sites: usize,
        theta: Complex64,
        variant: BetheVariant,
        mut roots: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        roots.resize(rank.get() - 1, Vec::new());
        let s = BetheState {
            rank,
            sites,
            theta,
            variant,
            roots,
            quantum_numbers: None,
        };
        s.validate(MIN_SEPARATION)?;
        Ok(s)
    }

    pub fn levels(&self) -> usize {
        self.rank.get() - 1
    }

    pub fn magnon_numbers(&self) -> Vec<usize> {
        self.roots.iter().map(Vec::len).collect()
    }

    pub fn total_roots(&self) -> usize {
        self.roots.iter().map(Vec::len).sum()
    }

    pub fn validate(&self, min_separation: f64) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::InvalidArgument("sites must be positive".into()));
        }
        if self.roots.len() != self.levels() {
            return Err(Error::InvalidArgument(format!(
                "rank {} needs {} root levels, got {}",
                self.rank.get(),
                self.levels(),
                self.roots.len()
            )));
        }
        if let Some(q) = &self.quantum_numbers {
            if q.len() != self.levels() || q.iter().zip(&self.roots).any(|(a, b)| a.len() != b.len()) {
                return Err(Error::InvalidArgument("quantum numbers do not match the root content".into()));
            }
        }
        for (k, level) in self.roots.iter().enumerate() {
            if level.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite root at level {}", k + 1)));
            }
            if let Some((a, b)) = closest_pair_below(level, min_separation) {
                return Err(Error::CoalescedRoots {
                    level: k + 1,
                    first: a,
                    second: b,
                    threshold: min_separation,
                });
            }
        }
        Ok(())
    }

    fn defect_level(&self) -> usize {
        match self.variant {
            BetheVariant::LDefect => 1,
            BetheVariant::LhatDefect => self.levels(),
        }
    }

    fn flat(&self) -> Vec<(usize, Complex64)> {
        self.roots
            .iter()
            .enumerate()
            .flat_map(|(k, l)| l.iter().map(move |&z| (k + 1, z)))
            .collect()
    }

    fn with_flat(&self, values: &[Complex64]) -> BetheState {
        let mut out = self.clone();
        let mut it = values.iter();
        for level in &mut out.roots {
            for z in level.iter_mut() {
                *z = *it.next().expect("flat length matches");
            }
        }
        out
    }
}

fn closest_pair_below(level: &[Complex64], delta: f64) -> Option<(usize, usize)> {
    for i in 0..level.len() {
        for j in i + 1..level.len() {
            if (level[i] - level[j]).norm() < delta {
                return Some((i, j));
            }
        }
    }
    None
}

/// `e_n(λ) = (λ + in/2)/(λ − in/2)`.
pub fn elementary(n: i32, lambda: Complex64) -> Result<Complex64> {
    let half = I * (n as f64 / 2.0);
    let den = lambda - half;
    if den.norm() < POLE_GUARD {
        return Err(Error::Pole {
            what: format!("e_{n}"),
            at: lambda,
        });
    }
    Ok((lambda + half) / den)
}

/// `𝔢⁺(λ) = λ + i/2`, `𝔢⁻(λ) = 1/(λ − i/2)`.
pub fn defect_factor(sign: Sign, lambda: Complex64) -> Result<Complex64> {
    match sign {
        Sign::Plus => Ok(lambda + 0.5 * I),
        Sign::Minus => {
            let den = lambda - 0.5 * I;
            if den.norm() < POLE_GUARD {
                return Err(Error::Pole {
                    what: "defect factor".into(),
                    at: lambda,
                });
            }
            Ok(1.0 / den)
        }
    }
}

/// Principal log of `e_n(x)`, failing on its zero or pole.
fn log_e(n: i32, x: Complex64) -> Result<Complex64> {
    let v = elementary(n, x)?;
    if v.norm() < POLE_GUARD {
        return Err(Error::Pole {
            what: format!("zero of e_{n}"),
            at: x,
        });
    }
    Ok(v.ln())
}

fn dlog_e(n: i32, x: Complex64) -> Complex64 {
    let half = I * (n as f64 / 2.0);
    1.0 / (x + half) - 1.0 / (x - half)
}

/// Reduces the imaginary part into `(−π, π]`.
fn wrap(z: Complex64) -> Complex64 {
    let mut im = z.im % (2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    } else if im <= -PI {
        im += 2.0 * PI;
    }
    Complex64::new(z.re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelfTermMode {
    /// Same-level product runs over all roots, `e₂(0) = −1` included.
    Include,
    /// Drops `j = i` together with the overall minus sign.
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaeResidual {
    /// One entry per root, levels concatenated.
    pub per_root: Vec<Complex64>,
    pub max_abs: f64,
    /// Some entry sits within 1e−6 of the branch cut, so its reduction
    /// mod 2πi is ambiguous.
    pub branch_ambiguous: bool,
}

fn level_roots(state: &BetheState, k: usize) -> Vec<Complex64> {
    if k == 0 {
        vec![Complex64::new(0.0, 0.0); state.sites]
    } else if k <= state.levels() {
        state.roots[k - 1].clone()
    } else {
        Vec::new()
    }
}

fn log_lhs(state: &BetheState, k: usize, lambda: Complex64) -> Result<Complex64> {
    if k != state.defect_level() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sign = match state.variant {
        BetheVariant::LDefect => Sign::Plus,
        BetheVariant::LhatDefect => Sign::Minus,
    };
    let v = defect_factor(sign, lambda - state.theta)?;
    if v.norm() < POLE_GUARD {
        return Err(Error::Pole {
            what: "zero of the defect factor".into(),
            at: lambda,
        });
    }
    Ok(v.ln())
}

fn dlog_lhs(state: &BetheState, k: usize, lambda: Complex64) -> Complex64 {
    if k != state.defect_level() {
        return Complex64::new(0.0, 0.0);
    }
    let x = lambda - state.theta;
    match state.variant {
        BetheVariant::LDefect => 1.0 / (x + 0.5 * I),
        BetheVariant::LhatDefect => -1.0 / (x - 0.5 * I),
    }
}

/// Unreduced `log D − log(RHS)` for every root.
fn raw_residuals(state: &BetheState, mode: SelfTermMode) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(state.total_roots());
    for k in 1..=state.levels() {
        let below = level_roots(state, k - 1);
        let same = level_roots(state, k);
        let above = level_roots(state, k + 1);
        for (i, &lam) in same.iter().enumerate() {
            let mut log_rhs = match mode {
                SelfTermMode::Include => I * PI,
                SelfTermMode::Exclude => Complex64::new(0.0, 0.0),
            };
            for &mu in below.iter().chain(&above) {
                log_rhs += log_e(-1, lam - mu)?;
            }
            for (j, &mu) in same.iter().enumerate() {
                if j == i {
                    if mode == SelfTermMode::Include {
                        log_rhs += I * PI;
                    }
                    continue;
                }
                log_rhs += log_e(2, lam - mu)?;
            }
            out.push(log_lhs(state, k, lam)? - log_rhs);
        }
    }
    Ok(out)
}

pub fn bae_residual_with(state: &BetheState, mode: SelfTermMode) -> Result<BaeResidual> {
    let per_root: Vec<Complex64> = raw_residuals(state, mode)?.into_iter().map(wrap).collect();
    let max_abs = per_root.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let branch_ambiguous = per_root.iter().any(|z| PI - z.im.abs() < 1e-6);
    Ok(BaeResidual {
        per_root,
        max_abs,
        branch_ambiguous,
    })
}

pub fn bae_residual(state: &BetheState) -> Result<BaeResidual> {
    bae_residual_with(state, SelfTermMode::Include)
}

fn jacobian(state: &BetheState) -> Matrix {
    let flat = state.flat();
    let n = flat.len();
    let mut jac = Matrix::zeros(n, n);
    for (i, &(ki, li)) in flat.iter().enumerate() {
        let mut diag = dlog_lhs(state, ki, li);
        if ki == 1 {
            diag -= dlog_e(-1, li) * state.sites as f64;
        }
        for (j, &(kj, lj)) in flat.iter().enumerate() {
            if i == j {
                continue;
            }
            let order = if kj == ki {
                2
            } else if kj + 1 == ki || ki + 1 == kj {
                -1
            } else {
                continue;
            };
            let d = dlog_e(order, li - lj);
            diag -= d;
            jac[(i, j)] += d;
        }
        jac[(i, i)] += diag;
    }
    jac
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Factor applied to the Newton step while the residual grows.
    pub step_damping: f64,
    pub tol: f64,
    pub min_separation: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 200,
            step_damping: 0.5,
            tol: 1e-10,
            min_separation: MIN_SEPARATION,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub state: BetheState,
    pub residual: BaeResidual,
    pub iterations: usize,
    /// Max residual before each iteration, then the final one.
    pub trace: Vec<f64>,
}

fn check_separation(state: &BetheState, delta: f64) -> Result<()> {
    for (k, level) in state.roots.iter().enumerate() {
        if let Some((a, b)) = closest_pair_below(level, delta) {
            return Err(Error::CoalescedRoots {
                level: k + 1,
                first: a,
                second: b,
                threshold: delta,
            });
        }
    }
    Ok(())
}

/// Damped Newton iteration on the stacked logarithmic residual.
pub fn solve_bae(initial: &BetheState, opts: &SolveOptions) -> Result<SolveOutcome> {
    initial.validate(opts.min_separation)?;
    let mut state = initial.clone();
    let mut res = bae_residual(&state)?;
    let mut trace = vec![res.max_abs];
    let mut iterations = 0;
    while res.max_abs > opts.tol {
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: res.max_abs,
                trace,
            });
        }
        iterations += 1;
        check_separation(&state, opts.min_separation)?;
        let step = jacobian(&state).solve(&res.per_root)?;
        let current: Vec<Complex64> = state.flat().into_iter().map(|(_, z)| z).collect();
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<Complex64> = current.iter().zip(&step).map(|(z, s)| z - s * scale).collect();
            let candidate = state.with_flat(&trial);
            if let Ok(r) = bae_residual(&candidate) {
                if r.max_abs < res.max_abs || accepted.is_none() && scale < 1e-6 {
                    accepted = Some((candidate, r));
                    break;
                }
            }
            scale *= opts.step_damping;
        }
        let Some((next, r)) = accepted else {
            return Err(Error::NonConvergence {
                iterations,
                residual: res.max_abs,
                trace,
            });
        };
        state = next;
        res = r;
        trace.push(res.max_abs);
    }
    Ok(SolveOutcome {
        state,
        residual: res,
        iterations,
        trace,
    })
}

/// `θ_n(x) = 2 arctan(2x/n)`, principal branch for complex `x`.
fn theta_n(n: f64, x: Complex64) -> Complex64 {
    (x * (2.0 / n)).atan() * 2.0
}

fn dtheta_n(n: f64, x: Complex64) -> Complex64 {
    4.0 * n / (n * n + 4.0 * x * x)
}

/// Finite-size counting function at level `k`, real part:
/// `h(λ) = (1/2π)[Σ_{k±1} θ₁(λ−μ) − Σ_k θ₂(λ−μ) + arctan(2(λ−Θ))]`,
/// the last term only at the defect's level.
pub fn counting_function(state: &BetheState, k: usize, lambda: f64) -> Result<f64> {
    counting_parts(state, k, lambda, theta_n)
}

/// `dh/dλ`, evaluated analytically.
pub fn counting_derivative(state: &BetheState, k: usize, lambda: f64) -> Result<f64> {
    counting_parts(state, k, lambda, dtheta_n)
}

fn counting_parts(
    state: &BetheState,
    k: usize,
    lambda: f64,
    phase: fn(f64, Complex64) -> Complex64,
) -> Result<f64> {
    if k == 0 || k > state.levels() {
        return Err(Error::IndexOutOfRange {
            what: "level",
            index: k,
            bound: state.levels(),
        });
    }
    let lam = Complex64::new(lambda, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for mu in level_roots(state, k - 1).into_iter().chain(level_roots(state, k + 1)) {
        total += phase(1.0, lam - mu);
    }
    for mu in level_roots(state, k) {
        total -= phase(2.0, lam - mu);
    }
    if k == state.defect_level() {
        total += 0.5 * phase(1.0, lam - state.theta);
    }
    if !total.re.is_finite() {
        return Err(Error::Pole {
            what: "counting function branch point".into(),
            at: lam,
        });
    }
    Ok(total.re / (2.0 * PI))
}

/// Quantum numbers `J_i = i − (M−1)/2` of the filled level-1 sea.
pub fn sea_quantum_numbers(m: usize) -> Vec<f64> {
    (0..m).map(|i| i as f64 - (m as f64 - 1.0) / 2.0).collect()
}

/// Real level-1 roots solving the defect-free logarithmic equations
/// `sites·θ₁(λ_i) − Σ_j θ₂(λ_i − λ_j) = 2π J_i`, by Newton from a tangent guess.
pub fn sea_seed(sites: usize, quantum_numbers: &[f64]) -> Result<Vec<f64>> {
    let m = quantum_numbers.len();
    let n = sites as f64;
    let th = |k: f64, x: f64| 2.0 * (2.0 * x / k).atan();
    let dth = |k: f64, x: f64| 4.0 * k / (k * k + 4.0 * x * x);
    let mut l: Vec<f64> = quantum_numbers.iter().map(|j| 0.25 * (PI * j / n).tan()).collect();
    for _ in 0..200 {
        let mut f = vec![0.0; m];
        let mut jac = Matrix::zeros(m, m);
        for i in 0..m {
            f[i] = n * th(1.0, l[i]) - 2.0 * PI * quantum_numbers[i];
            let mut diag = n * dth(1.0, l[i]);
            for j in 0..m {
                if j != i {
                    f[i] -= th(2.0, l[i] - l[j]);
                    let d = dth(2.0, l[i] - l[j]);
                    diag -= d;
                    jac[(i, j)] = Complex64::new(d, 0.0);
                }
            }
            jac[(i, i)] = Complex64::new(diag, 0.0);
        }
        let worst = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if worst < 1e-13 {
            return Ok(l);
        }
        let rhs: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let step = jac.solve(&rhs)?;
        for (x, s) in l.iter_mut().zip(step) {
            *x -= s.re;
        }
    }
    Err(Error::NonConvergence {
        iterations: 200,
        residual: f64::NAN,
        trace: Vec::new(),
    })
}

/// Ground state with `m` level-1 roots (higher levels empty), seeded from
/// the defect-free sea and refined on the full defect equations.
pub fn sea_state(
    rank: AlgebraRank,
    sites: usize,
    m: usize,
    theta: Complex64,
    variant: BetheVariant,
    opts: &SolveOptions,
) -> Result<SolveOutcome> {
    let js = sea_quantum_numbers(m);
    let seed = sea_seed(sites, &js)?;
    let mut roots = vec![seed.into_iter().map(|x| Complex64::new(x, 0.0)).collect::<Vec<_>>()];
    roots.resize(rank.get() - 1, Vec::new());
    let mut state = BetheState::new(rank, sites, theta, variant, roots)?;
    let mut qn = vec![js];
    qn.resize(rank.get() - 1, Vec::new());
    state.quantum_numbers = Some(qn);
    solve_bae(&state, opts)
}
