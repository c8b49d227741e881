//! Small dense complex linear algebra: 2x2 operators for the qubit and a
//! partially pivoted LU for the sideband-resolved steady-state system.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::num::{cplx, Cplx, Real};

/// Two-component complex state vector.
pub type Vec2<T> = [Cplx<T>; 2];

/// 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T: Real> {
    pub m: [[Cplx<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(a: Cplx<T>, b: Cplx<T>, c: Cplx<T>, d: Cplx<T>) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        let z = Cplx::zero();
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let (z, o) = (Cplx::zero(), Cplx::one());
        Self::new(o, z, z, o)
    }

    pub fn sigma_x() -> Self {
        let (z, o) = (Cplx::zero(), Cplx::one());
        Self::new(z, o, o, z)
    }

    pub fn sigma_y() -> Self {
        let z = Cplx::zero();
        let i = Cplx::i();
        Self::new(z, -i, i, z)
    }

    pub fn sigma_z() -> Self {
        let (z, o) = (Cplx::zero(), Cplx::one());
        Self::new(o, z, z, -o)
    }

    /// `a * sigma_x + b * sigma_z` for real `a`, `b`.
    pub fn real_xz(a: T, b: T) -> Self {
        let z = T::zero();
        Self::new(cplx(b, z), cplx(a, z), cplx(a, z), cplx(-b, z))
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Cplx<T> {
        self.m[r][c]
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        let m = &self.m;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cplx(s, T::zero()))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Cplx<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Cplx<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn apply(&self, v: &Vec2<T>) -> Vec2<T> {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `<u| self |v>`.
    pub fn sandwich(&self, u: &Vec2<T>, v: &Vec2<T>) -> Cplx<T> {
        let w = self.apply(v);
        u[0].conj() * w[0] + u[1].conj() * w[1]
    }

    /// `|u><v|`.
    pub fn outer(u: &Vec2<T>, v: &Vec2<T>) -> Self {
        Self::new(
            u[0] * v[0].conj(),
            u[0] * v[1].conj(),
            u[1] * v[0].conj(),
            u[1] * v[1].conj(),
        )
    }

    /// `|| self^dagger self - 1 ||_F`.
    pub fn unitarity_defect(&self) -> T {
        (self.adjoint() * *self - Self::identity()).norm()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        (*self - self.adjoint()).norm() <= tol
    }

    /// Matrix exponential.
    ///
    /// Uses `exp(M) = e^{tr/2} [cosh(s) 1 + sinh(s)/s (M - tr/2)]` with
    /// `s^2 = -det(M - tr/2)`, exact for 2x2 matrices.
    pub fn expm(&self) -> Self {
        let half_tr = self.trace() * T::lit(0.5);
        let traceless = *self - Self::identity().scale(half_tr);
        let s2 = -traceless.det();
        let s = s2.sqrt();
        let (cosh, sinhc) = if s.norm() < T::lit(1e-4) {
            // Taylor to fourth order in s
            let s4 = s2 * s2;
            (
                Cplx::<T>::one() + s2 * T::lit(0.5) + s4 * T::lit(1.0 / 24.0),
                Cplx::<T>::one() + s2 * T::lit(1.0 / 6.0) + s4 * T::lit(1.0 / 120.0),
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        let pre = half_tr.exp();
        (Self::identity().scale(cosh) + traceless.scale(sinhc)).scale(pre)
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        Self::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-T::one())
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

pub fn vec_norm<T: Real>(v: &Vec2<T>) -> T {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

pub fn inner<T: Real>(u: &Vec2<T>, v: &Vec2<T>) -> Cplx<T> {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

fn normalized<T: Real>(v: Vec2<T>) -> Vec2<T> {
    let n = vec_norm(&v);
    [v[0] / n, v[1] / n]
}

/// Unit vector orthogonal to the unit vector `v`.
pub fn orthogonal_complement<T: Real>(v: &Vec2<T>) -> Vec2<T> {
    [-v[1].conj(), v[0].conj()]
}

/// Eigen-decomposition of a 2x2 normal matrix.
///
/// Returns eigenvalues and an orthonormal eigenbasis together with the
/// eigenvalue separation. The second vector is always the orthogonal
/// complement of the first, so the basis stays orthonormal at exact
/// degeneracies where any basis is an eigenbasis.
pub fn eig_normal<T: Real>(a: &Mat2<T>) -> ([Cplx<T>; 2], [Vec2<T>; 2], T) {
    let half_tr = a.trace() * T::lit(0.5);
    let disc = (half_tr * half_tr - a.det()).sqrt();
    let lam = half_tr + disc;
    let m = &a.m;
    // two candidate eigenvectors for `lam`; pick the better conditioned one
    let c1: Vec2<T> = [m[0][1], lam - m[0][0]];
    let c2: Vec2<T> = [lam - m[1][1], m[1][0]];
    let (n1, n2) = (vec_norm(&c1), vec_norm(&c2));
    let scale = a.norm().max(T::min_positive_value());
    let v1 = if n1.max(n2) <= T::lit(1e-12) * scale {
        [Cplx::one(), Cplx::zero()]
    } else if n1 >= n2 {
        normalized(c1)
    } else {
        normalized(c2)
    };
    let v2 = orthogonal_complement(&v1);
    let l1 = a.sandwich(&v1, &v1);
    let l2 = a.sandwich(&v2, &v2);
    ([l1, l2], [v1, v2], (l1 - l2).norm())
}

/// Eigenvalues of a 2x2 Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues<T: Real>(a: &Mat2<T>) -> [T; 2] {
    let half_tr = (a.m[0][0].re + a.m[1][1].re) * T::lit(0.5);
    let half_diff = (a.m[0][0].re - a.m[1][1].re) * T::lit(0.5);
    let r = (half_diff * half_diff + a.m[0][1].norm_sqr()).sqrt();
    [half_tr - r, half_tr + r]
}

/// Eigenpairs of a real symmetric `[[a, b], [b, d]]` in ascending order.
pub fn real_symmetric_eig<T: Real>(a: T, b: T, d: T) -> ([T; 2], [[T; 2]; 2]) {
    let half_tr = (a + d) * T::lit(0.5);
    let half_diff = (a - d) * T::lit(0.5);
    let r = half_diff.hypot(b);
    // rotation angle of the eigenbasis
    let phi = T::lit(0.5) * b.atan2(half_diff);
    let (s, c) = phi.sin_cos();
    // upper eigenvector (cos, sin), lower (-sin, cos)
    ([half_tr - r, half_tr + r], [[-s, c], [c, s]])
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LuError {
    #[error("matrix is singular (zero pivot at column {0})")]
    Singular(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T: Real> {
    pub n: usize,
    pub data: Vec<Cplx<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Cplx::zero(); n * n] }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Cplx<T> {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Cplx<T> {
        &mut self.data[r * self.n + c]
    }

    pub fn mul_vec(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        (0..self.n)
            .map(|r| {
                self.data[r * self.n..(r + 1) * self.n]
                    .iter()
                    .zip(x)
                    .fold(Cplx::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|c| (0..self.n).fold(T::zero(), |acc, r| acc + self.at(r, c).norm()))
            .fold(T::zero(), T::max)
    }

    pub fn lu(&self) -> Result<Lu<T>, LuError> {
        Lu::factor(self.clone())
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(mut a: DenseMatrix<T>) -> Result<Self, LuError> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, pmax) = (col..n)
                .map(|r| (r, a.at(r, col).norm()))
                .fold((col, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == T::zero() || !pmax.is_finite() {
                return Err(LuError::Singular(col));
            }
            if piv != col {
                for c in 0..n {
                    a.data.swap(piv * n + c, col * n + c);
                }
                perm.swap(piv, col);
            }
            let d = a.at(col, col);
            for r in col + 1..n {
                let f = a.at(r, col) / d;
                *a.at_mut(r, col) = f;
                if f == Cplx::zero() {
                    continue;
                }
                for c in col + 1..n {
                    let v = a.at(col, c);
                    *a.at_mut(r, c) = a.at(r, c) - f * v;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, b: &[Cplx<T>]) -> Result<Vec<Cplx<T>>, LuError> {
        let n = self.lu.n;
        if b.len() != n {
            return Err(LuError::Dimension(format!("rhs has {} entries, expected {n}", b.len())));
        }
        let mut x: Vec<Cplx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut acc = x[r];
            for c in 0..r {
                acc = acc - self.lu.at(r, c) * x[c];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc = acc - self.lu.at(r, c) * x[c];
            }
            x[r] = acc / self.lu.at(r, r);
        }
        Ok(x)
    }

    /// `||A^{-1}||_1`, computed column by column.
    pub fn inverse_norm1(&self) -> T {
        let n = self.lu.n;
        let mut e = vec![Cplx::zero(); n];
        let mut best = T::zero();
        for c in 0..n {
            e.iter_mut().for_each(|z| *z = Cplx::zero());
            e[c] = Complex::one();
            if let Ok(col) = self.solve(&e) {
                let s = col.iter().fold(T::zero(), |acc, z| acc + z.norm());
                best = best.max(s);
            }
        }
        best
    }
}
