//! Small numerical kernels: compensated summation, trapezoid quadrature,
//! second-order difference stencils and the two direct solvers used by the
//! Newton iterations.

use crate::scalar::Scalar;

/// Smallest pivot magnitude accepted by the direct solvers.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Kahan–Babuška (Neumaier) accumulator. Results depend only on the order
/// in which terms are pushed.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for v in iter {
            k.add(v);
        }
        k
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().total()
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2, "trapezoid needs at least two samples");
    let mut k = KahanSum::new();
    for (i, &v) in values.iter().enumerate() {
        let wt = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        k.add(wt * v);
    }
    h * k.total()
}

/// Trapezoid weight of node `i` among `len` nodes with spacing `h`.
#[inline]
pub fn trapezoid_weight(i: usize, len: usize, h: f64) -> f64 {
    if i == 0 || i + 1 == len {
        0.5 * h
    } else {
        h
    }
}

/// Coefficients `(offset, weight)` of the first-derivative stencil at node `i`
/// of `len` nodes, before division by `h`. Central in the interior,
/// second-order one-sided at the two ends.
pub fn first_derivative_stencil(i: usize, len: usize) -> [(usize, f64); 3] {
    debug_assert!(len >= 3);
    if i == 0 {
        [(0, -1.5), (1, 2.0), (2, -0.5)]
    } else if i + 1 == len {
        [(len - 1, 1.5), (len - 2, -2.0), (len - 3, 0.5)]
    } else {
        [(i - 1, -0.5), (i, 0.0), (i + 1, 0.5)]
    }
}

/// First derivative at every node.
pub fn first_derivative<S: Scalar>(y: &[S], h: f64) -> Vec<S> {
    let len = y.len();
    (0..len)
        .map(|i| {
            let st = first_derivative_stencil(i, len);
            let mut acc = S::from_f64(0.0);
            for (j, c) in st {
                if c != 0.0 {
                    acc = acc + y[j] * c;
                }
            }
            acc / h
        })
        .collect()
}

/// Second derivative at every node: three-point central in the interior,
/// four-point one-sided (second order) at the ends when at least four nodes
/// exist.
pub fn second_derivative<S: Scalar>(y: &[S], h: f64) -> Vec<S> {
    let len = y.len();
    let h2 = h * h;
    (0..len)
        .map(|i| {
            if i > 0 && i + 1 < len {
                (y[i - 1] - y[i] * 2.0 + y[i + 1]) / h2
            } else if len >= 4 {
                let (a, b, c, d) = if i == 0 {
                    (y[0], y[1], y[2], y[3])
                } else {
                    (y[len - 1], y[len - 2], y[len - 3], y[len - 4])
                };
                (a * 2.0 - b * 5.0 + c * 4.0 - d) / h2
            } else {
                (y[0] - y[1] * 2.0 + y[2]) / h2
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub row: usize,
    pub pivot: f64,
}

/// Solves a tridiagonal system by forward elimination and back substitution.
/// `lower[i]` couples row `i+1` to column `i`; `upper[i]` couples row `i` to
/// column `i+1`.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, SingularPivot> {
    let n = diag.len();
    assert!(lower.len() + 1 == n && upper.len() + 1 == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv.abs() < PIVOT_FLOOR || !piv.is_finite() {
        return Err(SingularPivot { row: 0, pivot: piv });
    }
    if n > 1 {
        c[0] = upper[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i - 1] * c[i - 1];
        if piv.abs() < PIVOT_FLOOR || !piv.is_finite() {
            return Err(SingularPivot { row: i, pivot: piv });
        }
        if i + 1 < n {
            c[i] = upper[i] / piv;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Square band matrix with equal lower and upper bandwidth, stored row-wise
/// as `2·bw + 1` diagonals.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandMatrix {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> Option<usize> {
        if c + self.bw < r || r + self.bw < c {
            None
        } else {
            Some(r * (2 * self.bw + 1) + (c + self.bw - r))
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.slot(r, c).map_or(0.0, |s| self.data[s])
    }

    /// Panics when `(r, c)` lies outside the band.
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let s = self.slot(r, c).expect("entry outside band");
        self.data[s] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.bw);
                let hi = (r + self.bw).min(self.n - 1);
                (lo..=hi).map(|c| self.get(r, c) * x[c]).sum()
            })
            .collect()
    }

    /// In-place LU factorization without pivoting followed by the solve.
    pub fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>, SingularPivot> {
        let n = self.n;
        let bw = self.bw;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let piv = self.get(k, k);
            if piv.abs() < PIVOT_FLOOR || !piv.is_finite() {
                return Err(SingularPivot { row: k, pivot: piv });
            }
            let last = (k + bw).min(n - 1);
            for r in k + 1..=last {
                let s = self.slot(r, k).unwrap();
                let l = self.data[s] / piv;
                if l == 0.0 {
                    continue;
                }
                self.data[s] = l;
                for c in k + 1..=last {
                    let v = self.get(k, c);
                    if v != 0.0 {
                        let t = self.slot(r, c).unwrap();
                        self.data[t] -= l * v;
                    }
                }
                x[r] -= l * x[k];
            }
        }
        for k in (0..n).rev() {
            let last = (k + bw).min(n - 1);
            let mut acc = x[k];
            for c in k + 1..=last {
                acc -= self.get(k, c) * x[c];
            }
            x[k] = acc / self.get(k, k);
        }
        Ok(x)
    }
}

/// Sup-norm of a slice; `NaN` entries propagate as infinity.
pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| {
        if x.is_nan() {
            f64::INFINITY
        } else {
            m.max(x.abs())
        }
    })
}
