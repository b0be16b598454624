//! Gain synthesis: pole placement, the algebraic Riccati solver, robust
//! Riccati-based gains, interval characteristic polynomials and eigenvalue
//! sweeps over the pendulum's operating range.

use crate::models::sip_partial_at;
use crate::numerics::{char_poly, eigenvalues, nnmf_rank1, Complex, Mat, Poly, Vector};
use crate::stability::IntervalPoly;
use crate::{Error, Result};

/// Single-input state feedback gain, used as `u = −kᵀx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    pub k: Vector,
    /// Set when the design was numerically delicate (e.g. a badly
    /// conditioned controllability matrix).
    pub warning: Option<String>,
}

impl GainMatrix {
    pub fn new(k: Vector) -> Self {
        GainMatrix { k, warning: None }
    }

    pub fn from_slice(k: &[f64]) -> Self {
        GainMatrix::new(Vector::from_column_slice(k))
    }
}

pub fn controllability_matrix(a: &Mat, b: &Mat) -> Mat {
    let n = a.nrows();
    let mut c = Mat::zeros(n, n);
    let mut col = b.column(0).into_owned();
    for j in 0..n {
        c.set_column(j, &col);
        col = a * col;
    }
    c
}

/// Ackermann's formula `kᵀ = e_nᵀ·𝒞⁻¹·φ(A)` where `φ` is the monic
/// polynomial with the requested roots.
pub fn design_gain_matrix(a: &Mat, b: &Mat, desired: &[Complex<f64>]) -> Result<GainMatrix> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != 1 || desired.len() != n || n == 0 {
        return Err(Error::Dimension(format!(
            "pole placement needs square A, a single input column and n poles (A {}x{}, B {}x{}, {} poles)",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            desired.len()
        )));
    }
    let phi = Poly::from_roots(desired)?;
    let ctrb = controllability_matrix(a, b);
    let sv = ctrb.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-13 * smax) {
        return Err(Error::Uncontrollable(format!(
            "controllability matrix is rank deficient (singular values {smin:e} .. {smax:e})"
        )));
    }
    let cond = smax / smin;
    let mut phi_a = Mat::zeros(n, n);
    let mut power = Mat::identity(n, n);
    for c in phi.coeffs() {
        phi_a += &power * *c;
        power = a * power;
    }
    let mut en = Vector::zeros(n);
    en[n - 1] = 1.0;
    // Solve 𝒞ᵀ·w = e_n, so wᵀ = e_nᵀ𝒞⁻¹.
    let w = ctrb
        .transpose()
        .lu()
        .solve(&en)
        .ok_or_else(|| Error::Uncontrollable("controllability matrix is singular".into()))?;
    let k = (w.transpose() * phi_a).transpose();
    let warning = (cond > 1e10).then(|| format!("controllability matrix condition number {cond:e}"));
    Ok(GainMatrix { k, warning })
}

/// Convenience: pole placement with every pole at the same real location.
pub fn place_repeated(a: &Mat, b: &Mat, pole: f64) -> Result<GainMatrix> {
    design_gain_matrix(a, b, &vec![Complex::new(pole, 0.0); a.nrows()])
}

#[derive(Debug, Clone, PartialEq)]
pub enum CareSolution {
    /// The stabilizing solution, symmetric positive definite.
    PositiveDefinite(Mat),
    /// A stabilizing solution exists but is not positive definite.
    NotPositiveDefinite { p: Mat, min_eigenvalue: f64 },
}

/// `PA + AᵀP − PMP + Q` (the Riccati residual).
pub fn care_residual(a: &Mat, m: &Mat, q: &Mat, p: &Mat) -> Mat {
    p * a + a.transpose() * p - p * m * p + q
}

/// Matrix sign function by the scaled Newton iteration.
fn matrix_sign(h: &Mat) -> Result<Mat> {
    let n = h.nrows();
    let mut z = h.clone();
    for it in 0..200 {
        let inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Spectral("Hamiltonian iterate became singular".into()))?;
        let scale = if it < 30 {
            let det = z.determinant().abs();
            if det > 0.0 && det.is_finite() { det.powf(-1.0 / n as f64) } else { 1.0 }
        } else {
            1.0
        };
        let next = (&z * scale + inv / scale) * 0.5;
        let delta = (&next - &z).abs().row_sum().max();
        let size = next.abs().row_sum().max();
        z = next;
        if delta <= 1e-14 * size {
            return Ok(z);
        }
    }
    if z.iter().all(|v| v.is_finite()) {
        Ok(z)
    } else {
        Err(Error::Numerical("matrix sign iteration diverged".into()))
    }
}

/// Solves `Xᵀ·P + P·X = −c` for `P` through the Kronecker form.
fn solve_lyapunov(x: &Mat, c: &Mat) -> Option<Mat> {
    let n = x.nrows();
    let id = Mat::identity(n, n);
    let xt = x.transpose();
    let big = id.kronecker(&xt) + xt.kronecker(&id);
    let rhs = Vector::from_iterator(n * n, (-c).iter().copied());
    let sol = big.lu().solve(&rhs)?;
    Some(Mat::from_column_slice(n, n, sol.as_slice()))
}

/// Stabilizing solution of `PA + AᵀP − PMP + Q = 0`.
///
/// The stable invariant subspace `[X₁; X₂]` of the Hamiltonian
/// `[[A, −M], [−Q, −Aᵀ]]` is taken as the null space of `sign(H) + I`, then
/// `P = X₂X₁⁻¹` is symmetrized and polished with Newton steps.
pub fn solve_care(a: &Mat, m: &Mat, q: &Mat) -> Result<CareSolution> {
    let n = a.nrows();
    if a.ncols() != n || m.shape() != (n, n) || q.shape() != (n, n) || n == 0 {
        return Err(Error::Dimension("CARE needs square A, M, Q of one size".into()));
    }
    let mut h = Mat::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-m));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));
    let eigs = eigenvalues(&h)?;
    if let Some(bad) = eigs.iter().find(|l| l.re.abs() <= 1e-9) {
        return Err(Error::Spectral(format!("Hamiltonian eigenvalue {bad} lies on the imaginary axis")));
    }
    let sign = matrix_sign(&h)?;
    let w = sign + Mat::identity(2 * n, 2 * n);
    let svd = w.svd(false, true);
    let v = svd.v_t.ok_or_else(|| Error::Numerical("SVD without right vectors".into()))?.transpose();
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|i, j| sv[*i].total_cmp(&sv[*j]));
    let basis = Mat::from_columns(&order[..n].iter().map(|&i| v.column(i).into_owned()).collect::<Vec<_>>());
    let (null_big, kept_small) = (sv[order[n - 1]], sv[order[n]]);
    if !(null_big <= 1e-6 * kept_small.max(1e-300)) {
        return Err(Error::Subspace(format!(
            "stable subspace is not cleanly separated (singular values {null_big:e} vs {kept_small:e})"
        )));
    }
    let x1 = basis.rows(0, n).into_owned();
    let x2 = basis.rows(n, n).into_owned();
    let x1_sv = x1.singular_values();
    if !(x1_sv.min() > 1e-12 * x1_sv.max()) {
        return Err(Error::Subspace("X1 is singular".into()));
    }
    let x1_inv = x1.try_inverse().ok_or_else(|| Error::Subspace("X1 is singular".into()))?;
    let mut p = &x2 * x1_inv;
    p = (&p + p.transpose()) * 0.5;

    let mut res = care_residual(a, m, q, &p).norm();
    for _ in 0..4 {
        let closed = a - m * &p;
        let Some(next) = solve_lyapunov(&closed, &(q + &p * m * &p)) else { break };
        let next = (&next + next.transpose()) * 0.5;
        let r = care_residual(a, m, q, &next).norm();
        if r < res {
            p = next;
            res = r;
        } else {
            break;
        }
    }

    let min_eig = p.clone().symmetric_eigen().eigenvalues.min();
    if min_eig > 0.0 {
        Ok(CareSolution::PositiveDefinite(p))
    } else {
        Ok(CareSolution::NotPositiveDefinite { p, min_eigenvalue: min_eig })
    }
}

/// Settings of the robust Riccati design: weights `ā`, `b̄` of the
/// uncertainty terms, the scalar `ε` and the quadratic weights `Q`, `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustConfig {
    pub a_bar: f64,
    pub b_bar: f64,
    pub epsilon: f64,
    pub q: Mat,
    pub r: Mat,
}

/// Element-wise bounds `|ΔA| ⪯ dA_max`, `|ΔB| ⪯ dB_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyBounds {
    pub da_max: Mat,
    pub db_max: Mat,
}

impl UncertaintyBounds {
    /// Bounds for a nominal model `(A, B)` against a second model, i.e.
    /// `|A₂ − A|` and `|B₂ − B|`.
    pub fn between(a: &Mat, b: &Mat, a2: &Mat, b2: &Mat) -> Self {
        UncertaintyBounds { da_max: (a2 - a).abs(), db_max: (b2 - b).abs() }
    }
}

/// Everything the robust design produced, kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustDesign {
    pub gain: GainMatrix,
    pub p: Mat,
    pub m: Mat,
    pub q_sigma: Mat,
    pub sigma_a: Mat,
    pub sigma_x: Mat,
    pub sigma_b: Mat,
    pub sigma_y: Mat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RobustOutcome {
    Solved(Box<RobustDesign>),
    /// No positive definite Riccati solution for these settings. The usual
    /// remedy is to raise `ā`, `b̄` and lower `ε`, then try again.
    NoSolution { m: Mat, q_sigma: Mat, reason: String },
}

pub const TUNING_HINT: &str =
    "no positive definite Riccati solution: increase a_bar and b_bar, decrease epsilon, and retry";

fn split_weight(w: &Vector, weight: f64, what: &str) -> Result<Vector> {
    if w.iter().all(|v| *v == 0.0) {
        return Ok(w.clone());
    }
    if !(weight > 0.0) {
        return Err(Error::Domain(format!("{what} must be positive when the bound is nonzero")));
    }
    Ok(w / weight)
}

/// Robust gain for `ẋ = (A + ΔA)x + (B + ΔB)u` with rank-one bounds
/// `ΔA_max = ā·a₁x₁ᵀ`, `ΔB_max = b̄·b₁y₁ᵀ`.
///
/// Builds `Σ_a = ā a₁a₁ᵀ`, `Σ_x = ā x₁x₁ᵀ`, `Σ_b = b̄ b₁b₁ᵀ`, `Σ_y = b̄ y₁y₁ᵀ`,
/// `M = B(R+εΣ_y)⁻¹(2R+εΣ_y)(R+εΣ_y)⁻¹Bᵀ − Σ_a − Σ_b/ε`, `Q_Σ = Σ_x + Q`,
/// solves the Riccati equation for `P` and returns `K = P·B·(R+εΣ_y)⁻¹`.
pub fn robust_riccati_gain(a: &Mat, b: &Mat, bounds: &UncertaintyBounds, cfg: &RobustConfig) -> Result<RobustOutcome> {
    let n = a.nrows();
    let mi = b.ncols();
    if bounds.da_max.shape() != (n, n) || bounds.db_max.shape() != (n, mi) || cfg.q.shape() != (n, n) || cfg.r.shape() != (mi, mi) {
        return Err(Error::Dimension("robust design shapes disagree".into()));
    }
    if !(cfg.epsilon > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let (wa, xk) = nnmf_rank1(&bounds.da_max)?;
    let (wb, yk) = nnmf_rank1(&bounds.db_max)?;
    let ak = split_weight(&wa, cfg.a_bar, "a_bar")?;
    let bk = split_weight(&wb, cfg.b_bar, "b_bar")?;
    let sigma_a = &ak * ak.transpose() * cfg.a_bar;
    let sigma_x = &xk * xk.transpose() * cfg.a_bar;
    let sigma_b = &bk * bk.transpose() * cfg.b_bar;
    let sigma_y = &yk * yk.transpose() * cfg.b_bar;
    let eps = cfg.epsilon;
    let inner = &cfg.r + &sigma_y * eps;
    let inner_inv = inner
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("R + εΣ_y is singular".into()))?;
    let middle = &cfg.r * 2.0 + &sigma_y * eps;
    let m = b * &inner_inv * middle * &inner_inv * b.transpose() - &sigma_a - &sigma_b / eps;
    let q_sigma = &sigma_x + &cfg.q;
    match solve_care(a, &m, &q_sigma) {
        Ok(CareSolution::PositiveDefinite(p)) => {
            let k = &p * b * &inner_inv;
            Ok(RobustOutcome::Solved(Box::new(RobustDesign {
                gain: GainMatrix::new(k.column(0).into_owned()),
                p,
                m,
                q_sigma,
                sigma_a,
                sigma_x,
                sigma_b,
                sigma_y,
            })))
        }
        Ok(CareSolution::NotPositiveDefinite { min_eigenvalue, .. }) => Ok(RobustOutcome::NoSolution {
            m,
            q_sigma,
            reason: format!("Riccati solution has eigenvalue {min_eigenvalue:e}"),
        }),
        Err(e @ (Error::Spectral(_) | Error::Subspace(_))) => Ok(RobustOutcome::NoSolution {
            m,
            q_sigma,
            reason: e.to_string(),
        }),
        Err(e) => Err(e),
    }
}

/// Coefficient-wise hull of the characteristic polynomials of
/// `A* − B*·kᵀ` over every pair drawn from the two families.
pub fn vertex_interval_char_poly(a_family: &[Mat], b_family: &[Mat], k: &Vector) -> Result<IntervalPoly> {
    if a_family.is_empty() || b_family.is_empty() {
        return Err(Error::Dimension("empty model family".into()));
    }
    let n = k.len();
    let mut lo = vec![f64::INFINITY; n + 1];
    let mut hi = vec![f64::NEG_INFINITY; n + 1];
    for a in a_family {
        for b in b_family {
            if a.shape() != (n, n) || b.shape() != (n, 1) {
                return Err(Error::Dimension("family member has the wrong shape".into()));
            }
            let cp = char_poly(&(a - b * k.transpose()))?;
            for (i, c) in cp.coeffs().iter().enumerate() {
                lo[i] = lo[i].min(*c);
                hi[i] = hi[i].max(*c);
            }
        }
    }
    IntervalPoly::new(lo, hi)
}

/// Outcome of the closed-form pendulum gain region test, with the two
/// intermediate bounds the inequalities compare against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCheck {
    pub feasible: bool,
    /// `k₃ / b_lo`, the upper bound on `k₂`.
    pub k2_bound: f64,
    /// `a_hi·k₂ / (−b_lo·k₂ + k₃)`, the upper bound on `k₁`.
    pub k1_bound: f64,
}

/// Robust gain region for the partial pendulum model with
/// `a ∈ [a_lo, a_hi]`, `b ∈ [b_lo, b_hi]`:
/// `k₃ < 0`, `k₂ < k₃/b_lo`, `k₁ < a_hi·k₂/(−b_lo·k₂ + k₃)`.
pub fn sip_region_feasible(k: &Vector, a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> Result<RegionCheck> {
    if k.len() != 3 {
        return Err(Error::Dimension("region check needs a 3-entry gain".into()));
    }
    if !(0.0 < a_lo && a_lo <= a_hi && 0.0 < b_lo && b_lo <= b_hi) {
        return Err(Error::Domain("region check needs 0 < a_lo <= a_hi and 0 < b_lo <= b_hi".into()));
    }
    let (k1, k2, k3) = (k[0], k[1], k[2]);
    let k2_bound = k3 / b_lo;
    let k1_bound = a_hi * k2 / (-b_lo * k2 + k3);
    Ok(RegionCheck { feasible: k3 < 0.0 && k2 < k2_bound && k1 < k1_bound, k2_bound, k1_bound })
}

/// One row of an eigenvalue sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    /// Real parts, largest magnitude first.
    pub re: Vec<f64>,
}

/// Real parts of the eigenvalues of `A_P(θ) − B_P(θ)·kᵀ` for each angle.
pub fn eig_sweep(k: &Vector, thetas: &[f64], l: f64, g: f64) -> Result<Vec<SweepRow>> {
    if k.len() != 3 {
        return Err(Error::Dimension("sweep needs a 3-entry partial-state gain".into()));
    }
    thetas
        .iter()
        .map(|&theta| {
            let (a, b) = sip_partial_at(theta, l, g);
            let mut re: Vec<f64> = eigenvalues(&(a - b * k.transpose()))?.iter().map(|z| z.re).collect();
            re.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
            Ok(SweepRow { theta, re })
        })
        .collect()
}
