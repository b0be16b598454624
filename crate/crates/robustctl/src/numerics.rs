//! Small dense linear algebra, polynomials, rank-one factorization and a tiny
//! quadratic-program solver.
//!
//! Matrices are plain [`nalgebra::DMatrix<f64>`]; every function here is pure.

use nalgebra::{DMatrix, DVector, Schur, SVD};

use crate::{Error, Result};

pub use nalgebra::Complex;

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;
pub type CMat = DMatrix<Complex<f64>>;

/// Builds a matrix from row slices. Panics on ragged input, so it is meant
/// for literals.
pub fn mat(rows: &[&[f64]]) -> Mat {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    assert!(rows.iter().all(|row| row.len() == c), "ragged matrix literal");
    Mat::from_fn(r, c, |i, j| rows[i][j])
}

pub fn vector(entries: &[f64]) -> Vector {
    Vector::from_column_slice(entries)
}

pub fn all_finite(m: &Mat) -> bool {
    m.iter().all(|v| v.is_finite())
}

fn require_square(m: &Mat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{what} needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// All eigenvalues of a real square matrix, with multiplicity.
///
/// Ordered by descending real part, ties broken by descending imaginary part,
/// so a conjugate pair always appears as `(a + bi, a - bi)`.
pub fn eigenvalues(m: &Mat) -> Result<Vec<Complex<f64>>> {
    require_square(m, "eigenvalues")?;
    if !all_finite(m) {
        return Err(Error::Numerical(format!("non-finite entries in {m}")));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical(format!("Schur iteration did not converge for {m}")))?;
    let mut eigs: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    sort_eigenvalues(&mut eigs);
    Ok(eigs)
}

pub fn sort_eigenvalues(eigs: &mut [Complex<f64>]) {
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Eigenvalues together with a unit-column eigenvector matrix `S`, so that
/// `m·S ≈ S·diag(λ)` when `m` is diagonalizable.
///
/// Eigenvalues closer than a relative 1e-6 are treated as one cluster whose
/// eigenvectors are read off the trailing right singular vectors of `m − λI`.
/// For a defective matrix the returned `S` is (close to) singular, which shows
/// up as a huge condition number rather than an error.
pub fn eigen_decomposition(m: &Mat) -> Result<(Vec<Complex<f64>>, CMat)> {
    let eigs = eigenvalues(m)?;
    let n = eigs.len();
    let cm: CMat = m.map(|v| Complex::new(v, 0.0));
    let mut s = CMat::zeros(n, n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (eigs[j] - eigs[i]).norm() <= 1e-6 * (1.0 + eigs[i].norm()) {
            j += 1;
        }
        let k = j - i;
        let lambda = eigs[i..j].iter().sum::<Complex<f64>>() / k as f64;
        let shifted = &cm - CMat::identity(n, n) * lambda;
        let svd = SVD::new(shifted, false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Numerical("SVD produced no right vectors".into()))?;
        let v = v_t.adjoint();
        for c in 0..k {
            let mut col = v.column(n - k + c).into_owned();
            let norm = col.norm();
            if norm > 0.0 {
                col /= Complex::new(norm, 0.0);
            }
            s.set_column(i + c, &col);
        }
        i = j;
    }
    Ok((eigs, s))
}

/// Minimizer of `‖design·z − target‖₂`. Rank-deficient designs are rejected.
pub fn least_squares(design: &Mat, target: &Vector) -> Result<Vector> {
    let (m, n) = design.shape();
    if m < n || target.len() != m || n == 0 {
        return Err(Error::Dimension(format!(
            "least squares needs m >= n and target of length m; got {m}x{n} and {}",
            target.len()
        )));
    }
    let sv = design.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smax > 0.0) || smin < 1e-10 * smax {
        return Err(Error::Rank(format!(
            "design matrix singular values span [{smin:e}, {smax:e}]"
        )));
    }
    // The SVD only certifies the rank; Householder QR gives the smaller
    // normal-equation residual on full-rank problems.
    let qr = design.clone().qr();
    let qtb = qr.q().transpose() * target;
    qr.r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))
}

/// The block row `[v₁I … v_kI]`, i.e. `vᵀ ⊗ I_d`.
pub fn kron_row(v: &Vector, identity_dim: usize) -> Result<Mat> {
    if v.is_empty() || identity_dim == 0 {
        return Err(Error::Dimension("kron_row needs a non-empty vector and dim >= 1".into()));
    }
    let d = identity_dim;
    let mut out = Mat::zeros(d, v.len() * d);
    for (k, vk) in v.iter().enumerate() {
        for i in 0..d {
            out[(i, k * d + i)] = *vk;
        }
    }
    Ok(out)
}

/// Exact rank-one non-negative factorization `m = w·hᵀ` with `‖h‖∞ = 1`.
///
/// `h` is the row holding the largest entry, scaled to peak at one; `w` is the
/// column where that peak sits. The all-zero matrix maps to `w = 0, h = e₁`.
pub fn nnmf_rank1(m: &Mat) -> Result<(Vector, Vector)> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Err(Error::Dimension("nnmf of an empty matrix".into()));
    }
    if let Some(bad) = m.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("nnmf needs non-negative entries, found {bad}")));
    }
    let (mut bi, mut bj, mut peak) = (0, 0, 0.0);
    for j in 0..c {
        for i in 0..r {
            if m[(i, j)] > peak {
                (bi, bj, peak) = (i, j, m[(i, j)]);
            }
        }
    }
    if peak == 0.0 {
        let mut h = Vector::zeros(c);
        h[0] = 1.0;
        return Ok((Vector::zeros(r), h));
    }
    let h: Vector = m.row(bi).transpose() / peak;
    let w: Vector = m.column(bj).into_owned();
    let err = (&w * h.transpose() - m).amax();
    if err > 1e-9 * peak.max(1.0) {
        return Err(Error::Rank(format!(
            "matrix is not rank one (reconstruction error {err:e}); split it into several terms"
        )));
    }
    Ok((w, h))
}

/// Spectral norm: the largest singular value.
pub fn induced_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Spectral condition number `‖m‖·‖m⁻¹‖`.
pub fn cond(m: &Mat) -> Result<f64> {
    require_square(m, "cond")?;
    let sv = m.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-12 * smax) {
        return Err(Error::Singular(format!("cond of a singular matrix (sigma_min = {smin:e})")));
    }
    Ok(smax / smin)
}

/// Same as [`cond`] for a complex matrix, e.g. an eigenvector basis.
pub fn cond_complex(m: &CMat) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension("cond needs a square matrix".into()));
    }
    let sv = m.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-12 * smax) {
        return Err(Error::Singular(format!("cond of a singular matrix (sigma_min = {smin:e})")));
    }
    Ok(smax / smin)
}

/// Real polynomial with coefficients stored in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Trailing exact zeros are dropped so the stored leading coefficient is
    /// nonzero (the zero polynomial keeps a single `0`).
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    /// Builds from coefficients listed highest degree first, the way
    /// polynomials are usually written down.
    pub fn from_descending(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().rev().copied().collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Monic polynomial with the given roots. The roots must be closed under
    /// conjugation so that the coefficients come out real.
    pub fn from_roots(roots: &[Complex<f64>]) -> Result<Poly> {
        let mut c = vec![Complex::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if c.iter().any(|z| z.im.abs() > 1e-9 * scale) {
            return Err(Error::Domain("roots are not closed under conjugation".into()));
        }
        Ok(Poly::new(c.iter().map(|z| z.re).collect()))
    }

    /// Companion matrix whose characteristic polynomial is the monic version
    /// of `self`.
    pub fn companion(&self) -> Result<Mat> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::Dimension("companion of a constant polynomial".into()));
        }
        let lead = self.leading();
        let mut m = Mat::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        Ok(m)
    }

    pub fn roots(&self) -> Result<Vec<Complex<f64>>> {
        if self.degree() == 0 {
            return Ok(Vec::new());
        }
        eigenvalues(&self.companion()?)
    }
}

/// Characteristic polynomial `det(sI − m)` by the Faddeev–LeVerrier
/// recursion. Returned monic, ascending.
pub fn char_poly(m: &Mat) -> Result<Poly> {
    require_square(m, "char_poly")?;
    let n = m.nrows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = Mat::zeros(n, n);
    let id = Mat::identity(n, n);
    for k in 1..=n {
        mk = m * (&mk + &id * c[n - k + 1]);
        c[n - k] = -mk.trace() / k as f64;
    }
    Ok(Poly::new(c))
}

/// Minimizer of `½zᵀHz + cᵀz` subject to `A·z ≤ b` for tiny problems
/// (n ≤ 3 variables, m ≤ 4 constraints).
///
/// Every subset of constraints is tried as the active set, smallest subsets
/// first and lexicographically within a size. The first candidate that is
/// primal feasible with non-negative multipliers is the global minimizer
/// because the objective is strictly convex.
pub fn qp_small(h: &Mat, c: &Vector, a: &Mat, b: &Vector) -> Result<Vector> {
    let n = h.nrows();
    let m = a.nrows();
    if h.ncols() != n || c.len() != n || (m > 0 && a.ncols() != n) || b.len() != m {
        return Err(Error::Dimension(format!(
            "qp shapes: H {}x{}, c {}, A {}x{}, b {}",
            h.nrows(),
            h.ncols(),
            c.len(),
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if n == 0 || n > 3 || m > 4 {
        return Err(Error::Dimension(format!("qp_small supports n <= 3, m <= 4 (got {n}, {m})")));
    }
    if (h - h.transpose()).amax() > 1e-12 * h.amax().max(1.0) || h.clone().cholesky().is_none() {
        return Err(Error::Domain("H must be symmetric positive definite".into()));
    }
    let tol = 1e-9;
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << m))
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));

    for active in &subsets {
        let k = active.len();
        let mut kkt = Mat::zeros(n + k, n + k);
        let mut rhs = Vector::zeros(n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(h);
        for i in 0..n {
            rhs[i] = -c[i];
        }
        for (r, &ci) in active.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = a[(ci, j)];
                kkt[(j, n + r)] = a[(ci, j)];
            }
            rhs[n + r] = b[ci];
        }
        let sv = kkt.singular_values();
        if !(sv.min() > 1e-12 * sv.max()) {
            continue;
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        let z = sol.rows(0, n).into_owned();
        let mult = sol.rows(n, k);
        if mult.iter().any(|mu| *mu < -tol) {
            continue;
        }
        let feasible = (0..m).all(|i| (a.row(i) * &z)[0] <= b[i] + tol * (1.0 + b[i].abs()));
        if feasible {
            return Ok(z);
        }
    }
    Err(Error::Infeasible(format!("no feasible point for A = {a}, b = {b}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigenvalues_of_pendulum_linearization() {
        let e = eigenvalues(&mat(&[&[0.0, 1.0], &[10.0, 0.0]])).unwrap();
        assert!(close(e[0].re, 10f64.sqrt(), 1e-12));
        assert!(close(e[1].re, -10f64.sqrt(), 1e-12));
    }

    #[test]
    fn eigenvalues_of_identity() {
        let e = eigenvalues(&Mat::identity(3, 3)).unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|z| close(z.re, 1.0, 1e-14) && z.im == 0.0));
    }

    #[test]
    fn eigenvalues_reject_rectangular() {
        assert!(matches!(eigenvalues(&Mat::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn conjugate_pairs_are_adjacent_and_ordered() {
        let m = mat(&[&[0.0, 1.0], &[-5.0, -2.0]]);
        let e = eigenvalues(&m).unwrap();
        assert!(close(e[0].re, -1.0, 1e-12) && close(e[0].im, 2.0, 1e-12));
        assert!(close(e[1].re, -1.0, 1e-12) && close(e[1].im, -2.0, 1e-12));
    }

    #[test]
    fn least_squares_mean_and_identity() {
        let z = least_squares(&mat(&[&[1.0], &[1.0]]), &vector(&[2.0, 4.0])).unwrap();
        assert!(close(z[0], 3.0, 1e-14));
        let z = least_squares(&Mat::identity(3, 3), &vector(&[1.0, 2.0, 3.0])).unwrap();
        assert!((z - vector(&[1.0, 2.0, 3.0])).amax() < 1e-14);
    }

    #[test]
    fn least_squares_recovers_factored_pendulum_parameters() {
        let theta: f64 = 0.3;
        let truth = [10.0 * theta.sin() / theta, -theta.cos()];
        let d = mat(&[&[theta, 1.0], &[theta, -2.0]]);
        let y = &d * vector(&truth);
        let z = least_squares(&d, &y).unwrap();
        assert!(close(z[0], truth[0], 1e-12) && close(z[1], truth[1], 1e-12));
    }

    #[test]
    fn least_squares_flags_rank_deficiency() {
        let d = mat(&[&[0.0, 1.0], &[0.0, 2.0], &[0.0, 3.0]]);
        assert!(matches!(least_squares(&d, &vector(&[1.0, 2.0, 3.0])), Err(Error::Rank(_))));
    }

    #[test]
    fn kron_row_examples() {
        assert_eq!(kron_row(&vector(&[1.0]), 2).unwrap(), Mat::identity(2, 2));
        assert_eq!(kron_row(&vector(&[2.0, 3.0]), 1).unwrap(), mat(&[&[2.0, 3.0]]));
        assert_eq!(
            kron_row(&vector(&[1.0, 0.0]), 2).unwrap(),
            mat(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]])
        );
        assert!(kron_row(&Vector::zeros(0), 2).is_err());
    }

    #[test]
    fn nnmf_of_pendulum_uncertainty_bounds() {
        let da = mat(&[&[0.0, 0.0, 0.0], &[2.43, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let (w, h) = nnmf_rank1(&da).unwrap();
        assert_eq!(w, vector(&[0.0, 2.43, 0.0]));
        assert_eq!(h, vector(&[1.0, 0.0, 0.0]));

        let db = mat(&[&[0.0], &[0.69], &[0.0]]);
        let (w, h) = nnmf_rank1(&db).unwrap();
        assert_eq!(w, vector(&[0.0, 0.69, 0.0]));
        assert_eq!(h, vector(&[1.0]));
    }

    #[test]
    fn nnmf_zero_and_errors() {
        let (w, h) = nnmf_rank1(&Mat::zeros(2, 3)).unwrap();
        assert_eq!(w, Vector::zeros(2));
        assert_eq!(h, vector(&[1.0, 0.0, 0.0]));
        assert!(matches!(nnmf_rank1(&mat(&[&[1.0, -1.0]])), Err(Error::Domain(_))));
        assert!(matches!(nnmf_rank1(&Mat::identity(2, 2)), Err(Error::Rank(_))));
    }

    #[test]
    fn norms_and_condition_numbers() {
        assert!(close(induced_norm(&Mat::identity(3, 3)), 1.0, 1e-14));
        assert!(close(cond(&Mat::identity(3, 3)).unwrap(), 1.0, 1e-14));
        let d = Mat::from_diagonal(&vector(&[2.0, 3.0]));
        assert!(close(induced_norm(&d), 3.0, 1e-14));
        assert!(close(cond(&d).unwrap(), 1.5, 1e-14));
        let mut e21 = Mat::zeros(4, 4);
        e21[(1, 0)] = 1.0;
        assert!(close(induced_norm(&e21), 1.0, 1e-14));
        assert!(matches!(cond(&e21), Err(Error::Singular(_))));
    }

    #[test]
    fn poly_roots_and_char_poly() {
        let p = Poly::from_roots(&[Complex::new(-4.0, 0.0); 3]).unwrap();
        assert_eq!(p.coeffs(), &[64.0, 48.0, 12.0, 1.0]);
        let cp = char_poly(&mat(&[&[0.0, 1.0], &[10.0, 0.0]])).unwrap();
        assert_eq!(cp.coeffs(), &[-10.0, 0.0, 1.0]);
        assert!(Poly::from_roots(&[Complex::new(0.0, 1.0)]).is_err());
        assert_eq!(Poly::new(vec![1.0, 0.0, 0.0]).degree(), 0);
        assert!(Poly::new(vec![]).is_zero());
    }

    #[test]
    fn qp_trivial_cases() {
        let h = mat(&[&[1.0]]);
        let none = Mat::zeros(0, 1);
        let z = qp_small(&h, &vector(&[0.0]), &none, &Vector::zeros(0)).unwrap();
        assert_eq!(z[0], 0.0);
        let z = qp_small(&h, &vector(&[-2.0]), &mat(&[&[1.0]]), &vector(&[1.0])).unwrap();
        assert!(close(z[0], 1.0, 1e-14));
    }

    #[test]
    fn qp_reports_infeasibility() {
        let h = mat(&[&[1.0]]);
        let a = mat(&[&[1.0], &[-1.0]]);
        let r = qp_small(&h, &vector(&[0.0]), &a, &vector(&[-1.0, -1.0]));
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }
}
