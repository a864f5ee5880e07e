//! Fixed-size vectors and matrices plus the band solver used by the
//! dynamic torsion integrator.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Column 3-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self([x, y, z])
    }

    pub fn zeros() -> Self {
        Self([T::zero(); 3])
    }

    /// Unit basis vector `e_{k+1}` (zero based).
    pub fn unit(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = T::one();
        v
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = other.0;
        Self([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: T) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        Self([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Row-major 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn zeros() -> Self {
        Self([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diagonal(&Vec3([T::one(); 3]))
    }

    pub fn diagonal(d: &Vec3<T>) -> Self {
        let mut m = Self::zeros();
        for k in 0..3 {
            m.0[k][k] = d.0[k];
        }
        m
    }

    pub fn from_cols(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        let mut m = Self::zeros();
        for r in 0..3 {
            m.0[r][0] = c0.0[r];
            m.0[r][1] = c1.0[r];
            m.0[r][2] = c2.0[r];
        }
        m
    }

    pub fn col(&self, c: usize) -> Vec3<T> {
        Vec3([self.0[0][c], self.0[1][c], self.0[2][c]])
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..3 {
            for c in 0..3 {
                m.0[c][r] = self.0[r][c];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        let mut out = Vec3::zeros();
        for r in 0..3 {
            out.0[r] = self.0[r][0] * v.0[0] + self.0[r][1] * v.0[1] + self.0[r][2] * v.0[2];
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * s;
            }
        }
        m
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|x| x.is_finite())
    }

    /// Skew-symmetric matrix `[a]×` with `[a]× b = a × b`.
    pub fn skew(a: &Vec3<T>) -> Self {
        let z = T::zero();
        let [x, y, w] = a.0;
        Self([[z, -w, y], [w, z, -x], [-y, x, z]])
    }

    /// Axial vector of the skew-symmetric part.
    pub fn vee(&self) -> Vec3<T> {
        let m = &self.0;
        let h = T::half();
        Vec3([
            (m[2][1] - m[1][2]) * h,
            (m[0][2] - m[2][0]) * h,
            (m[1][0] - m[0][1]) * h,
        ])
    }

    /// Exponential of `[a]×`: the rotation by angle `|a|` about `a`.
    pub fn exp_so3(a: &Vec3<T>) -> Self {
        let theta2 = a.norm_squared();
        let theta = theta2.sqrt();
        let (sa, sb) = if theta < T::epsilon().powf(T::lit(0.25)) {
            (
                T::one() - theta2 / T::lit(6.0) + theta2 * theta2 / T::lit(120.0),
                T::half() - theta2 / T::lit(24.0) + theta2 * theta2 / T::lit(720.0),
            )
        } else {
            (theta.sin() / theta, (T::one() - theta.cos()) / theta2)
        };
        let k = Self::skew(a);
        Self::identity() + k.scale(sa) + (k * k).scale(sb)
    }

    /// Inverse by adjugate; `None` when the determinant vanishes relative to
    /// the entry scale.
    pub fn try_inverse(&self) -> Option<Self> {
        let d = self.det();
        let scale = self.max_abs();
        if d == T::zero() || !d.is_finite() || d.abs() <= T::epsilon() * scale * scale * scale {
            return None;
        }
        let m = &self.0;
        let mut inv = Self::zeros();
        for r in 0..3 {
            for c in 0..3 {
                let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
                let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
                inv.0[r][c] = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / d;
            }
        }
        Some(inv)
    }

    pub fn symmetry_defect(&self) -> T {
        let m = &self.0;
        (m[0][1] - m[1][0])
            .abs()
            .max((m[0][2] - m[2][0]).abs())
            .max((m[1][2] - m[2][1]).abs())
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.
    /// Returns eigenvalues (ascending) and the matrix whose columns are the
    /// corresponding orthonormal eigenvectors.
    pub fn symmetric_eigen(&self) -> (Vec3<T>, Self) {
        let mut a = self.0;
        // Symmetrize so the sweep only ever sees the upper triangle.
        for r in 0..3 {
            for c in (r + 1)..3 {
                let s = (a[r][c] + a[c][r]) * T::half();
                a[r][c] = s;
                a[c][r] = s;
            }
        }
        let mut v = Self::identity().0;
        let scale = Self(a).max_abs();
        for _sweep in 0..64 {
            let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
            if off <= T::epsilon() * T::lit(1e-3) * scale || off == T::zero() {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::two() * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
        let vals = Vec3([a[order[0]][order[0]], a[order[1]][order[1]], a[order[2]][order[2]]]);
        let vecs = Self::from_cols(
            Self(v).col(order[0]),
            Self(v).col(order[1]),
            Self(v).col(order[2]),
        );
        (vals, vecs)
    }

    /// `S^p` for a symmetric positive-definite `S` via its eigen-decomposition.
    pub fn spd_power(&self, p: T) -> Self {
        let (vals, vecs) = self.symmetric_eigen();
        let d = Self::diagonal(&vals.map(|l| l.powf(p)));
        vecs * d * vecs.transpose()
    }

    /// Cholesky factor `L` (lower) with `S = L Lᵀ`, or `None` if a pivot is
    /// not strictly positive.
    pub fn cholesky(&self) -> Option<Self> {
        let a = &self.0;
        let mut l = Self::zeros();
        for j in 0..3 {
            let mut d = a[j][j];
            for k in 0..j {
                d = d - l.0[j][k] * l.0[j][k];
            }
            if !(d > T::zero()) {
                return None;
            }
            let ljj = d.sqrt();
            l.0[j][j] = ljj;
            for i in (j + 1)..3 {
                let mut s = a[i][j];
                for k in 0..j {
                    s = s - l.0[i][k] * l.0[j][k];
                }
                l.0[i][j] = s / ljj;
            }
        }
        Some(l)
    }

    /// Solves `S x = b` for symmetric positive-definite `S`.
    pub fn solve_spd(&self, b: &Vec3<T>) -> Option<Vec3<T>> {
        let l = self.cholesky()?;
        let mut y = Vec3::zeros();
        for i in 0..3 {
            let mut s = b.0[i];
            for k in 0..i {
                s = s - l.0[i][k] * y.0[k];
            }
            y.0[i] = s / l.0[i][i];
        }
        let mut x = Vec3::zeros();
        for i in (0..3).rev() {
            let mut s = y.0[i];
            for k in (i + 1)..3 {
                s = s - l.0[k][i] * x.0[k];
            }
            x.0[i] = s / l.0[i][i];
        }
        Some(x)
    }

    /// Quadratic form `aᵀ S a`.
    pub fn quadratic(&self, a: &Vec3<T>) -> T {
        a.dot(&self.mul_vec(a))
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for r in 0..3 {
            for c in 0..3 {
                m.0[r][c] = m.0[r][c] + o.0[r][c];
            }
        }
        m
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut m = self;
        for r in 0..3 {
            for c in 0..3 {
                m.0[r][c] = m.0[r][c] - o.0[r][c];
            }
        }
        m
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = Self::zeros();
        for r in 0..3 {
            for c in 0..3 {
                m.0[r][c] = self.0[r][0] * o.0[0][c] + self.0[r][1] * o.0[1][c] + self.0[r][2] * o.0[2][c];
            }
        }
        m
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        self.mul_vec(&v)
    }
}

/// Row-major 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zeros() -> Self {
        Self([[T::zero(); 2]; 2])
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.0[0][0] * s, self.0[0][1] * s, self.0[1][0] * s, self.0[1][1] * s)
    }

    pub fn mul_vec(&self, v: [T; 2]) -> [T; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn try_inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        Some(Self::new(self.0[1][1] / d, -self.0[0][1] / d, -self.0[1][0] / d, self.0[0][0] / d))
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.0[0][0] + o.0[0][0],
            self.0[0][1] + o.0[0][1],
            self.0[1][0] + o.0[1][0],
            self.0[1][1] + o.0[1][1],
        )
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.0[0][0] - o.0[0][0],
            self.0[0][1] - o.0[0][1],
            self.0[1][0] - o.0[1][0],
            self.0[1][1] - o.0[1][1],
        )
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Square band matrix with `lower` sub-diagonals and `upper` super-diagonals.
#[derive(Clone, Debug)]
pub struct BandMatrix<T> {
    n: usize,
    lower: usize,
    upper: usize,
    // Row-major, `lower + upper + 1` entries per row; entry (i, j) lives at
    // i * width + (j + lower - i).
    data: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![T::zero(); n * (lower + upper + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[i * self.width() + (j + self.lower - i)]
        } else {
            T::zero()
        }
    }

    /// Adds `v` to entry `(i, j)`. Panics if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let w = self.width();
        let idx = i * w + (j + self.lower - i);
        self.data[idx] = self.data[idx] + v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            let mut s = T::zero();
            for j in lo..=hi {
                s = s + self.get(i, j) * x[j];
            }
            *yi = s;
        }
        y
    }

    /// `diag(d) - c * self`.
    pub fn shifted(&self, d: &[T], c: T) -> Self {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = -c * *x;
        }
        for (i, di) in d.iter().enumerate() {
            out.add(i, i, *di);
        }
        out
    }

    /// LU factorization with partial pivoting.
    pub fn factor(&self) -> Result<BandLu<T>> {
        let n = self.n;
        let kl = self.lower;
        let ku = self.upper + self.lower;
        let w = kl + ku + 1;
        // Working storage with room for pivoting fill: entry (i, j) at
        // i * w + (j + kl - i), j in [i - kl, i + ku].
        let mut a = vec![T::zero(); n * w];
        for i in 0..n {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(n - 1);
            for j in lo..=hi {
                a[i * w + (j + kl - i)] = self.get(i, j);
            }
        }
        let at = |i: usize, j: usize| i * w + (j + kl - i);
        let mut pivots = vec![0usize; n];
        let mut multipliers = vec![T::zero(); n * kl.max(1)];
        let scale = self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a[at(k, k)].abs();
            for i in (k + 1)..=last {
                let v = a[at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= T::epsilon() * scale * T::lit(1e-3) || best == T::zero() {
                return Err(Error::Singular("zero pivot in band LU"));
            }
            pivots[k] = p;
            let jmax = (k + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    a.swap(at(k, j), at(p, j));
                }
            }
            let piv = a[at(k, k)];
            for i in (k + 1)..=last {
                let l = a[at(i, k)] / piv;
                multipliers[k * kl.max(1) + (i - k - 1)] = l;
                a[at(i, k)] = T::zero();
                if l != T::zero() {
                    for j in (k + 1)..=jmax {
                        let u = a[at(k, j)];
                        a[at(i, j)] = a[at(i, j)] - l * u;
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            ku,
            upper: a,
            multipliers,
            pivots,
        })
    }
}

/// Factorization produced by [`BandMatrix::factor`].
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    upper: Vec<T>,
    multipliers: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let kl = self.kl;
        let w = kl + self.ku + 1;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let last = (k + kl).min(n - 1);
            for i in (k + 1)..=last {
                let l = self.multipliers[k * kl.max(1) + (i - k - 1)];
                x[i] = x[i] - l * x[k];
            }
        }
        for i in (0..n).rev() {
            let jmax = (i + self.ku).min(n - 1);
            let mut s = x[i];
            for j in (i + 1)..=jmax {
                s = s - self.upper[i * w + (j + kl - i)] * x[j];
            }
            x[i] = s / self.upper[i * w + kl];
        }
        x
    }
}

/// Band matrix bordered by one dense row and column:
/// `[[A, col], [rowᵀ, corner]]`.
#[derive(Clone, Debug)]
pub struct BorderedBand<T> {
    pub band: BandMatrix<T>,
    pub col: Vec<T>,
    pub row: Vec<T>,
    pub corner: T,
}

impl<T: Real> BorderedBand<T> {
    pub fn zeros(n_band: usize, lower: usize, upper: usize) -> Self {
        Self {
            band: BandMatrix::zeros(n_band, lower, upper),
            col: vec![T::zero(); n_band],
            row: vec![T::zero(); n_band],
            corner: T::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.band.dim() + 1
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.band.dim();
        let xb = x[n];
        let mut y = self.band.mul_vec(&x[..n]);
        for (yi, ci) in y.iter_mut().zip(&self.col) {
            *yi = *yi + *ci * xb;
        }
        let last = self.row.iter().zip(&x[..n]).fold(T::zero(), |s, (r, xi)| s + *r * *xi) + self.corner * xb;
        y.push(last);
        y
    }

    pub fn shifted(&self, d: &[T], c: T) -> Self {
        let n = self.band.dim();
        Self {
            band: self.band.shifted(&d[..n], c),
            col: self.col.iter().map(|x| -c * *x).collect(),
            row: self.row.iter().map(|x| -c * *x).collect(),
            corner: d[n] - c * self.corner,
        }
    }

    /// Factorization by block elimination of the border (Schur complement).
    pub fn factor(&self) -> Result<BorderedLu<T>> {
        let lu = self.band.factor()?;
        let z = lu.solve(&self.col);
        let schur = self.corner - self.row.iter().zip(&z).fold(T::zero(), |s, (r, zi)| s + *r * *zi);
        let scale = self.corner.abs().max(T::one());
        if schur.abs() <= T::epsilon() * scale {
            return Err(Error::Singular("vanishing Schur complement"));
        }
        Ok(BorderedLu {
            lu,
            z,
            row: self.row.clone(),
            schur,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BorderedLu<T> {
    lu: BandLu<T>,
    z: Vec<T>,
    row: Vec<T>,
    schur: T,
}

impl<T: Real> BorderedLu<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.z.len();
        let mut x = self.lu.solve(&b[..n]);
        let y = (b[n] - self.row.iter().zip(&x).fold(T::zero(), |s, (r, xi)| s + *r * *xi)) / self.schur;
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi = *xi - *zi * y;
        }
        x.push(y);
        x
    }
}
