//! Small dense linear algebra for k x k problems (k <= 16).
//!
//! Matrices are row-major `Vec<f64>` with explicit dimensions.

/// Orthonormal Helmert basis of the subspace orthogonal to the ones vector,
/// as a `k x (k-1)` row-major matrix.
pub fn helmert(k: usize) -> Vec<f64> {
    let d = k.saturating_sub(1);
    let mut h = vec![0.0; k * d];
    for j in 0..d {
        let jj = (j + 1) as f64;
        let norm = (jj * (jj + 1.0)).sqrt();
        for i in 0..=j {
            h[i * d + j] = 1.0 / norm;
        }
        h[(j + 1) * d + j] = -jj / norm;
    }
    h
}

/// `a (r x s) * b (s x t)`.
pub fn matmul(a: &[f64], b: &[f64], r: usize, s: usize, t: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * t];
    for i in 0..r {
        for l in 0..s {
            let x = a[i * s + l];
            if x == 0.0 {
                continue;
            }
            for j in 0..t {
                out[i * t + j] += x * b[l * t + j];
            }
        }
    }
    out
}

pub fn transpose(a: &[f64], r: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = a[i * c + j];
        }
    }
    out
}

/// `H^T a H`: the restriction of a k x k matrix to the subspace orthogonal to
/// the ones vector, in Helmert coordinates.
pub fn restrict_to_v(a: &[f64], k: usize) -> Vec<f64> {
    let d = k - 1;
    let h = helmert(k);
    let ah = matmul(a, &h, k, k, d);
    matmul(&transpose(&h, k, d), &ah, d, k, d)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn sym_eigenvalues(a: &[f64], d: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * d + j] * m[i * d + j])
            .sum();
        let scale: f64 = m.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..d {
                    let arp = m[r * d + p];
                    let arq = m[r * d + q];
                    m[r * d + p] = c * arp - s * arq;
                    m[r * d + q] = s * arp + c * arq;
                }
                for r in 0..d {
                    let apr = m[p * d + r];
                    let aqr = m[q * d + r];
                    m[p * d + r] = c * apr - s * aqr;
                    m[q * d + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..d).map(|i| m[i * d + i]).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Singular values, descending, via the eigenvalues of `a^T a`.
pub fn singular_values(a: &[f64], r: usize, c: usize) -> Vec<f64> {
    let gram = matmul(&transpose(a, r, c), a, c, r, c);
    sym_eigenvalues(&gram, c)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect()
}

/// Determinant by LU with partial pivoting.
pub fn det(a: &[f64], d: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| m[i * d + col].abs().total_cmp(&m[j * d + col].abs()))
            .unwrap();
        if m[piv * d + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..d {
                m.swap(piv * d + j, col * d + j);
            }
            det = -det;
        }
        let p = m[col * d + col];
        det *= p;
        for i in col + 1..d {
            let f = m[i * d + col] / p;
            if f != 0.0 {
                for j in col..d {
                    m[i * d + j] -= f * m[col * d + j];
                }
            }
        }
    }
    det
}

/// `log |det a|`, accumulated in log space so long products do not underflow.
pub fn log_abs_det(a: &[f64], d: usize) -> f64 {
    let mut m = a.to_vec();
    let mut acc = 0.0;
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| m[i * d + col].abs().total_cmp(&m[j * d + col].abs()))
            .unwrap();
        if m[piv * d + col] == 0.0 {
            return f64::NEG_INFINITY;
        }
        if piv != col {
            for j in 0..d {
                m.swap(piv * d + j, col * d + j);
            }
        }
        let p = m[col * d + col];
        acc += p.abs().ln();
        for i in col + 1..d {
            let f = m[i * d + col] / p;
            if f != 0.0 {
                for j in col..d {
                    m[i * d + j] -= f * m[col * d + j];
                }
            }
        }
    }
    acc
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &[f64], b: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| m[i * d + col].abs().total_cmp(&m[j * d + col].abs()))
            .unwrap();
        if m[piv * d + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..d {
                m.swap(piv * d + j, col * d + j);
            }
            x.swap(piv, col);
        }
        let p = m[col * d + col];
        for i in col + 1..d {
            let f = m[i * d + col] / p;
            if f != 0.0 {
                for j in col..d {
                    m[i * d + j] -= f * m[col * d + j];
                }
                x[i] -= f * x[col];
            }
        }
    }
    for col in (0..d).rev() {
        let mut s = x[col];
        for j in col + 1..d {
            s -= m[col * d + j] * x[j];
        }
        x[col] = s / m[col * d + col];
    }
    Some(x)
}

/// Neumaier-compensated sum.
#[derive(Default, Clone, Copy, Debug)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `ln 0!, ..., ln n!`, accumulated with compensation.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    out.push(0.0);
    for i in 1..=n {
        acc.add((i as f64).ln());
        out.push(acc.value());
    }
    out
}
