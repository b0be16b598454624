//! Interval matrices and polynomials, Routh–Hurwitz and Kharitonov tests,
//! and Bauer–Fike eigenvalue-perturbation bounds.

use crate::numerics::{cond_complex, eigen_decomposition, eigenvalues, induced_norm, Mat, Poly, Vector};
use crate::{Error, Result};

fn same_shape(a: &Mat, b: &Mat) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("shapes {:?} and {:?} differ", a.shape(), b.shape())));
    }
    Ok(())
}

pub fn elem_min(a: &Mat, b: &Mat) -> Result<Mat> {
    same_shape(a, b)?;
    Ok(a.zip_map(b, f64::min))
}

pub fn elem_max(a: &Mat, b: &Mat) -> Result<Mat> {
    same_shape(a, b)?;
    Ok(a.zip_map(b, f64::max))
}

pub fn elem_abs(a: &Mat) -> Mat {
    a.abs()
}

/// `a ⪯ b`: every entry of `a` is at most the matching entry of `b`.
pub fn preceq(a: &Mat, b: &Mat) -> Result<bool> {
    same_shape(a, b)?;
    Ok(a.iter().zip(b.iter()).all(|(x, y)| x <= y))
}

/// `a ≺ b`: strictly smaller in every entry.
pub fn prec(a: &Mat, b: &Mat) -> Result<bool> {
    same_shape(a, b)?;
    Ok(a.iter().zip(b.iter()).all(|(x, y)| x < y))
}

pub fn succeq(a: &Mat, b: &Mat) -> Result<bool> {
    preceq(b, a)
}

pub fn succ(a: &Mat, b: &Mat) -> Result<bool> {
    prec(b, a)
}

/// The set `{X : lower ⪯ X ⪯ upper}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMatrix {
    lower: Mat,
    upper: Mat,
}

impl IntervalMatrix {
    pub fn new(lower: Mat, upper: Mat) -> Result<Self> {
        if !preceq(&lower, &upper)? {
            return Err(Error::Domain("interval matrix needs lower ⪯ upper".into()));
        }
        Ok(IntervalMatrix { lower, upper })
    }

    /// Smallest interval matrix containing every member of `family`.
    pub fn hull(family: &[Mat]) -> Result<Self> {
        let first = family.first().ok_or_else(|| Error::Dimension("empty family".into()))?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for m in &family[1..] {
            lo = elem_min(&lo, m)?;
            hi = elem_max(&hi, m)?;
        }
        Ok(IntervalMatrix { lower: lo, upper: hi })
    }

    pub fn lower(&self) -> &Mat {
        &self.lower
    }

    pub fn upper(&self) -> &Mat {
        &self.upper
    }

    pub fn midpoint(&self) -> Mat {
        (&self.lower + &self.upper) / 2.0
    }

    pub fn radius(&self) -> Mat {
        (&self.upper - &self.lower) / 2.0
    }

    pub fn contains(&self, m: &Mat) -> bool {
        preceq(&self.lower, m).unwrap_or(false) && preceq(m, &self.upper).unwrap_or(false)
    }
}

/// Coefficient-wise bounds `lower[i] ≤ aᵢ ≤ upper[i]`, ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPoly {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl IntervalPoly {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() < 2 {
            return Err(Error::Dimension(format!(
                "interval polynomial bounds of lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::Domain("interval polynomial needs lower <= upper".into()));
        }
        let n = lower.len() - 1;
        if lower[n] <= 0.0 && upper[n] >= 0.0 {
            return Err(Error::Domain("leading coefficient interval contains zero".into()));
        }
        Ok(IntervalPoly { lower, upper })
    }

    pub fn degenerate(p: &Poly) -> Result<Self> {
        IntervalPoly::new(p.coeffs().to_vec(), p.coeffs().to_vec())
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn degree(&self) -> usize {
        self.lower.len() - 1
    }

    /// The same family with every member multiplied by −1.
    pub fn negated(&self) -> IntervalPoly {
        IntervalPoly {
            lower: self.upper.iter().map(|v| -v).collect(),
            upper: self.lower.iter().map(|v| -v).collect(),
        }
    }

    /// All `2^(n+1)` corner polynomials.
    pub fn vertices(&self) -> Vec<Poly> {
        let n = self.lower.len();
        (0u64..(1 << n))
            .map(|mask| {
                Poly::new(
                    (0..n)
                        .map(|i| if mask & (1 << i) != 0 { self.upper[i] } else { self.lower[i] })
                        .collect(),
                )
            })
            .collect()
    }

    /// The member with coefficients `lower + t ⊙ (upper − lower)`, `t ∈ [0,1]ⁿ⁺¹`.
    pub fn sample(&self, t: &[f64]) -> Poly {
        Poly::new(
            self.lower
                .iter()
                .zip(&self.upper)
                .zip(t)
                .map(|((l, u), s)| l + s * (u - l))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouthResult {
    pub stable: bool,
    pub first_column: Vec<f64>,
    /// A (near) zero pivot stopped the construction.
    pub degenerate: bool,
}

/// Routh–Hurwitz test: all roots in the open left half plane iff every entry
/// of the first column of the Routh array is positive.
pub fn routh_stable(p: &Poly) -> Result<RouthResult> {
    if p.is_zero() {
        return Err(Error::Domain("Routh test of the zero polynomial".into()));
    }
    if p.degree() == 0 {
        return Err(Error::Domain("Routh test needs degree >= 1".into()));
    }
    let p = if p.leading() < 0.0 { p.scale(-1.0) } else { p.clone() };
    let n = p.degree();
    let desc: Vec<f64> = p.coeffs().iter().rev().copied().collect();
    let scale = desc.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = 1e-12 * scale.max(1.0);
    let width = n / 2 + 1;
    let mut prev: Vec<f64> = (0..width).map(|j| desc.get(2 * j).copied().unwrap_or(0.0)).collect();
    let mut cur: Vec<f64> = (0..width).map(|j| desc.get(2 * j + 1).copied().unwrap_or(0.0)).collect();
    let mut first = vec![prev[0]];
    for _ in 1..=n {
        first.push(cur[0]);
        if cur[0].abs() < tiny {
            return Ok(RouthResult { stable: false, first_column: first, degenerate: true });
        }
        if first.len() == n + 1 {
            break;
        }
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = prev.get(j + 1).copied().unwrap_or(0.0);
                let b = cur.get(j + 1).copied().unwrap_or(0.0);
                (cur[0] * a - prev[0] * b) / cur[0]
            })
            .collect();
        prev = cur;
        cur = next;
    }
    let stable = first.iter().all(|v| *v > 0.0);
    Ok(RouthResult { stable, first_column: first, degenerate: false })
}

/// The four Kharitonov polynomials. Coefficient `aᵢ` takes the lower (L) or
/// upper (U) bound by the period-4 patterns
/// K₁ = LLUU, K₂ = LUUL, K₃ = ULLU, K₄ = UULL, starting from `a₀`.
pub fn kharitonov_polys(ip: &IntervalPoly) -> [Poly; 4] {
    const PATTERNS: [[bool; 4]; 4] = [
        [false, false, true, true],
        [false, true, true, false],
        [true, false, false, true],
        [true, true, false, false],
    ];
    PATTERNS.map(|pat| {
        Poly::new(
            (0..ip.lower.len())
                .map(|i| if pat[i % 4] { ip.upper[i] } else { ip.lower[i] })
                .collect(),
        )
    })
}

/// Kharitonov's criterion: the whole family is Hurwitz iff the four
/// Kharitonov polynomials are.
pub fn interval_poly_stable(ip: &IntervalPoly) -> bool {
    let ip = if ip.upper[ip.degree()] < 0.0 { ip.negated() } else { ip.clone() };
    kharitonov_polys(&ip)
        .iter()
        .all(|k| routh_stable(k).map(|r| r.stable).unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BauerFike {
    /// `κ(S)·‖ΔA‖`.
    pub radius: f64,
    /// Every perturbed eigenvalue lies within `radius` of an unperturbed one.
    pub holds: bool,
    /// Condition number of the unit-column eigenvector matrix; large values
    /// flag a nearly defective matrix.
    pub cond_s: f64,
    /// Largest distance from a perturbed eigenvalue to the nearest unperturbed one.
    pub max_distance: f64,
}

pub fn bauer_fike_check(ac0: &Mat, delta: &Mat) -> Result<BauerFike> {
    if ac0.shape() != delta.shape() {
        return Err(Error::Dimension("Bauer–Fike needs matching shapes".into()));
    }
    let (eigs, s) = eigen_decomposition(ac0)?;
    let cond_s = cond_complex(&s)
        .map_err(|_| Error::Domain("matrix is not diagonalizable (singular eigenvector basis)".into()))?;
    let radius = cond_s * induced_norm(delta);
    let perturbed = eigenvalues(&(ac0 + delta))?;
    let max_distance = perturbed
        .iter()
        .map(|mu| eigs.iter().map(|l| (mu - l).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let slack = 1e-9 * (1.0 + radius) + 1e-9 * eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
    Ok(BauerFike { radius, holds: max_distance <= radius + slack, cond_s, max_distance })
}

/// Closed-loop matrix `A(x) − B(x)·Kᵀ` of the single inverted pendulum at
/// angle `theta` for a full (length 4) or partial (length 3) gain.
pub fn sip_closed_loop(k: &Vector, theta: f64, l: f64, g: f64) -> Result<Mat> {
    let (a21, b2) = (g / l * crate::models::sinc(theta), -theta.cos() / l);
    let (a, b) = match k.len() {
        4 => {
            let mut a = Mat::zeros(4, 4);
            a[(0, 1)] = 1.0;
            a[(1, 0)] = a21;
            a[(2, 3)] = 1.0;
            (a, Mat::from_column_slice(4, 1, &[0.0, b2, 0.0, 1.0]))
        }
        3 => crate::models::sip_partial_model(a21, b2),
        n => return Err(Error::Dimension(format!("SIP gain must have 3 or 4 entries, got {n}"))),
    };
    Ok(a - b * k.transpose())
}

/// `ΔA_c(x) = A_c(x) − A_c(0)`, exact.
pub fn sip_delta_ac(k: &Vector, theta: f64, l: f64, g: f64) -> Result<Mat> {
    Ok(sip_closed_loop(k, theta, l, g)? - sip_closed_loop(k, 0.0, l, g)?)
}

/// The θ-independent factor of the bound `‖ΔA_c(x)‖ ≤ θ²·c`:
/// `c = (g/(6L))‖e₂e₁ᵀ‖ + (1/(2L))‖e₂Kᵀ‖`.
pub fn sip_delta_ac_coefficient(k: &Vector, l: f64, g: f64) -> f64 {
    let n = k.len();
    let mut e2e1 = Mat::zeros(n, n);
    e2e1[(1, 0)] = 1.0;
    let mut e2k = Mat::zeros(n, n);
    e2k.set_row(1, &k.transpose());
    g / (6.0 * l) * induced_norm(&e2e1) + 1.0 / (2.0 * l) * induced_norm(&e2k)
}

/// Largest `|θ|` for which the Bauer–Fike bound still certifies that the
/// closed loop `A_c(x)` keeps every eigenvalue in the left half plane.
pub fn sip_theta_safe_radius(k: &Vector, l: f64, g: f64) -> Result<f64> {
    let ac0 = sip_closed_loop(k, 0.0, l, g)?;
    let (eigs, s) = eigen_decomposition(&ac0)?;
    let lambda1 = eigs[0];
    if !(lambda1.re < 0.0) {
        return Err(Error::Domain(format!("closed loop at θ = 0 is not stable (λ₁ = {lambda1})")));
    }
    let kappa = cond_complex(&s)
        .map_err(|_| Error::Domain("closed loop at θ = 0 is not diagonalizable".into()))?;
    Ok((lambda1.re.abs() / (kappa * sip_delta_ac_coefficient(k, l, g))).sqrt())
}
