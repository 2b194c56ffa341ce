//! Complex least squares.
//!
//! Two independent routes: [`best_fit`] returns the minimum-norm solution
//! through an SVD, and [`QrSolver`] is an allocation-free column-pivoted
//! Householder QR used in the search loops, where only the residual matters.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Relative threshold below which a column is treated as dependent.
pub const RANK_TOL: f64 = 1e-10;

/// Minimum-norm least-squares fit of `target` by the columns `cols`.
///
/// Returns the coefficients and the residual `‖A c − ψ‖₂`.
pub fn best_fit(cols: &[&[Complex64]], target: &[Complex64]) -> (Vec<Complex64>, f64) {
    let d = target.len();
    let r = cols.len();
    if r == 0 {
        return (Vec::new(), norm(target));
    }
    let a = DMatrix::from_fn(d, r, |i, j| cols[j][i]);
    let b = DVector::from_column_slice(target);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (RANK_TOL * smax).max(f64::MIN_POSITIVE);
    let c = svd.solve(&b, eps).expect("both factors were computed");
    let res = (&a * &c - &b).norm();
    (c.iter().copied().collect(), res)
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Reusable workspace for the Householder route.
#[derive(Clone, Debug)]
pub struct QrSolver {
    d: usize,
    cap: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    norms: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
}

impl QrSolver {
    /// Workspace for vectors of length `d` and up to `cap` columns.
    pub fn new(d: usize, cap: usize) -> Self {
        Self {
            d,
            cap,
            a: vec![Complex64::new(0.0, 0.0); d * cap],
            b: vec![Complex64::new(0.0, 0.0); d],
            norms: vec![0.0; cap],
            perm: (0..cap).collect(),
            rank: 0,
        }
    }

    /// Least-squares residual of `target` against the span of `cols`.
    pub fn residual(&mut self, cols: &[&[Complex64]], target: &[Complex64]) -> f64 {
        self.factor(cols, target);
        self.b[self.rank..self.d]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Residual and a basic solution (dependent columns get coefficient 0).
    pub fn solve(&mut self, cols: &[&[Complex64]], target: &[Complex64]) -> (Vec<Complex64>, f64) {
        let res = self.residual(cols, target);
        let d = self.d;
        let mut z = vec![Complex64::new(0.0, 0.0); self.rank];
        for i in (0..self.rank).rev() {
            let mut s = self.b[i];
            for (j, zj) in z.iter().enumerate().skip(i + 1) {
                s -= self.a[j * d + i] * zj;
            }
            z[i] = s / self.a[i * d + i];
        }
        let mut c = vec![Complex64::new(0.0, 0.0); cols.len()];
        for (i, zi) in z.into_iter().enumerate() {
            c[self.perm[i]] = zi;
        }
        (c, res)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn factor(&mut self, cols: &[&[Complex64]], target: &[Complex64]) {
        let d = self.d;
        let r = cols.len();
        assert!(r <= self.cap && target.len() == d, "QR workspace too small");
        for (j, col) in cols.iter().enumerate() {
            self.a[j * d..(j + 1) * d].copy_from_slice(col);
            self.norms[j] = col.iter().map(|z| z.norm_sqr()).sum();
            self.perm[j] = j;
        }
        self.b.copy_from_slice(target);
        let scale = self.norms[..r].iter().cloned().fold(0.0, f64::max).sqrt();
        self.rank = 0;
        for j in 0..r.min(d) {
            // pivot: largest remaining column norm
            let (piv, best) = (j..r)
                .map(|c| {
                    (
                        c,
                        self.a[c * d + j..(c + 1) * d]
                            .iter()
                            .map(|z| z.norm_sqr())
                            .sum::<f64>(),
                    )
                })
                .fold((j, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best.sqrt() <= RANK_TOL * scale.max(1e-300) {
                break;
            }
            if piv != j {
                for i in 0..d {
                    self.a.swap(j * d + i, piv * d + i);
                }
                self.perm.swap(j, piv);
            }
            let xnorm = best.sqrt();
            let x0 = self.a[j * d + j];
            let phase = if x0.norm() > 0.0 {
                x0 / x0.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let alpha = -phase * xnorm;
            // v = x - alpha e1 stored in place of column j
            self.a[j * d + j] = x0 - alpha;
            let vnorm2: f64 = self.a[j * d + j..(j + 1) * d]
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            let (head, tail) = self.a.split_at_mut((j + 1) * d);
            let v = &head[j * d + j..(j + 1) * d];
            for c in 0..r - j - 1 {
                let y = &mut tail[c * d + j..(c + 1) * d];
                apply_reflector(v, vnorm2, y);
            }
            apply_reflector(v, vnorm2, &mut self.b[j..d]);
            // store R diagonal
            self.a[j * d + j] = alpha;
            for i in j + 1..d {
                self.a[j * d + i] = Complex64::new(0.0, 0.0);
            }
            self.rank += 1;
        }
    }
}

#[inline]
fn apply_reflector(v: &[Complex64], vnorm2: f64, y: &mut [Complex64]) {
    let mut s = Complex64::new(0.0, 0.0);
    for (vi, yi) in v.iter().zip(y.iter()) {
        s += vi.conj() * yi;
    }
    let f = s * (2.0 / vnorm2);
    for (vi, yi) in v.iter().zip(y.iter_mut()) {
        *yi -= vi * f;
    }
}
