//! Symmetric second-order tensors in three dimensions.
//!
//! Stresses, strains and strain rates all live in the six-dimensional space of
//! symmetric 3x3 matrices equipped with the Frobenius scalar product
//! `a : b = sum_ij a_ij b_ij`. Off-diagonal components are stored once and
//! counted twice wherever the full matrix would count them twice.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Plain 3-vector.
pub type Vec3 = [f64; 3];

/// Default relative tolerance under which two eigenvalues count as equal.
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// Symmetric 3x3 tensor stored by its six independent components.
///
/// Serializes as the array `[s11, s22, s33, s12, s13, s23]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 6]", into = "[f64; 6]")]
pub struct SymTensor3 {
    pub s11: f64,
    pub s22: f64,
    pub s33: f64,
    pub s12: f64,
    pub s13: f64,
    pub s23: f64,
}

impl SymTensor3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Self = Self::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);

    pub const fn new(s11: f64, s22: f64, s33: f64, s12: f64, s13: f64, s23: f64) -> Self {
        Self {
            s11,
            s22,
            s33,
            s12,
            s13,
            s23,
        }
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0, 0.0, 0.0)
    }

    /// `p * I`.
    pub const fn hydrostatic(p: f64) -> Self {
        Self::diag(p, p, p)
    }

    pub const fn from_array(a: [f64; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub const fn to_array(self) -> [f64; 6] {
        [self.s11, self.s22, self.s33, self.s12, self.s13, self.s23]
    }

    /// Full row-major matrix.
    pub fn to_matrix(self) -> [[f64; 3]; 3] {
        [
            [self.s11, self.s12, self.s13],
            [self.s12, self.s22, self.s23],
            [self.s13, self.s23, self.s33],
        ]
    }

    /// Symmetric part of an arbitrary 3x3 matrix.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Self {
        Self::new(
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            0.5 * (m[1][2] + m[2][1]),
        )
    }

    pub fn trace(self) -> f64 {
        self.s11 + self.s22 + self.s33
    }

    pub fn dot(self, other: Self) -> f64 {
        dot(self, other)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Frobenius norm of the full matrix.
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn deviator(self) -> Self {
        deviator(self)
    }

    pub fn det(self) -> f64 {
        self.s11 * (self.s22 * self.s33 - self.s23 * self.s23)
            - self.s12 * (self.s12 * self.s33 - self.s23 * self.s13)
            + self.s13 * (self.s12 * self.s23 - self.s22 * self.s13)
    }

    /// Matrix square, which is again symmetric.
    pub fn square(self) -> Self {
        let m = self.to_matrix();
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, value) in row.iter_mut().enumerate() {
                *value = (0..3).map(|k| m[i][k] * m[k][j]).sum();
            }
        }
        Self::from_matrix(out)
    }

    /// Matrix-vector product.
    pub fn apply(self, v: Vec3) -> Vec3 {
        let m = self.to_matrix();
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.to_array()
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }
}

impl From<[f64; 6]> for SymTensor3 {
    fn from(a: [f64; 6]) -> Self {
        Self::from_array(a)
    }
}

impl From<SymTensor3> for [f64; 6] {
    fn from(t: SymTensor3) -> Self {
        t.to_array()
    }
}

impl fmt::Display for SymTensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}, {}, {}]",
            self.s11, self.s22, self.s33, self.s12, self.s13, self.s23
        )
    }
}

impl Add for SymTensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.s11 + o.s11,
            self.s22 + o.s22,
            self.s33 + o.s33,
            self.s12 + o.s12,
            self.s13 + o.s13,
            self.s23 + o.s23,
        )
    }
}

impl Sub for SymTensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.s11 - o.s11,
            self.s22 - o.s22,
            self.s33 - o.s33,
            self.s12 - o.s12,
            self.s13 - o.s13,
            self.s23 - o.s23,
        )
    }
}

impl Neg for SymTensor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = Self;
    fn mul(self, a: f64) -> Self {
        Self::new(
            a * self.s11,
            a * self.s22,
            a * self.s33,
            a * self.s12,
            a * self.s13,
            a * self.s23,
        )
    }
}

impl Mul<SymTensor3> for f64 {
    type Output = SymTensor3;
    fn mul(self, t: SymTensor3) -> SymTensor3 {
        t * self
    }
}

impl Div<f64> for SymTensor3 {
    type Output = Self;
    fn div(self, a: f64) -> Self {
        self * (1.0 / a)
    }
}

impl AddAssign for SymTensor3 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for SymTensor3 {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Frobenius scalar product `a : b`.
pub fn dot(a: SymTensor3, b: SymTensor3) -> f64 {
    a.s11 * b.s11
        + a.s22 * b.s22
        + a.s33 * b.s33
        + 2.0 * (a.s12 * b.s12 + a.s13 * b.s13 + a.s23 * b.s23)
}

/// Traceless part `s - tr(s)/3 I`.
pub fn deviator(s: SymTensor3) -> SymTensor3 {
    let p = s.trace() / 3.0;
    SymTensor3::new(s.s11 - p, s.s22 - p, s.s33 - p, s.s12, s.s13, s.s23)
}

/// Symmetric tensor product `(u ⊗ v + v ⊗ u) / 2`.
pub fn sym_outer(u: Vec3, v: Vec3) -> SymTensor3 {
    SymTensor3::new(
        u[0] * v[0],
        u[1] * v[1],
        u[2] * v[2],
        0.5 * (u[0] * v[1] + u[1] * v[0]),
        0.5 * (u[0] * v[2] + u[2] * v[0]),
        0.5 * (u[1] * v[2] + u[2] * v[1]),
    )
}

/// Dyad `u ⊗ u`.
pub fn outer(u: Vec3) -> SymTensor3 {
    sym_outer(u, u)
}

pub fn vec_dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn vec_norm(a: Vec3) -> f64 {
    vec_dot(a, a).sqrt()
}

/// Principal and deviatoric invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Invariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `-I2` of the deviator, equal to half its squared norm.
    pub j2: f64,
    /// Determinant of the deviator.
    pub j3: f64,
}

pub fn invariants(s: SymTensor3) -> Invariants {
    let i1 = s.trace();
    let i2 = 0.5 * (i1 * i1 - s.square().trace());
    let dev = s.deviator();
    Invariants {
        i1,
        i2,
        i3: s.det(),
        j2: 0.5 * dev.norm_squared(),
        j3: dev.det(),
    }
}

pub fn j2(s: SymTensor3) -> f64 {
    0.5 * s.deviator().norm_squared()
}

pub fn j3(s: SymTensor3) -> f64 {
    s.deviator().det()
}

/// Gradient of `J2`, the deviator.
pub fn grad_j2(s: SymTensor3) -> SymTensor3 {
    s.deviator()
}

/// Gradient of `J3`: `dev² - (2/3) J2 I`.
pub fn grad_j3(s: SymTensor3) -> SymTensor3 {
    let dev = s.deviator();
    dev.square() - SymTensor3::hydrostatic(2.0 / 3.0 * 0.5 * dev.norm_squared())
}

/// `3√3 J3 / (2 J2^{3/2})` clamped to `[-1, 1]`, or `None` for a hydrostatic tensor.
fn lode_cosine(s: SymTensor3) -> Option<f64> {
    let inv = invariants(s);
    if inv.j2 <= f64::MIN_POSITIVE {
        return None;
    }
    let arg = 3.0 * 3f64.sqrt() * inv.j3 / (2.0 * inv.j2.powf(1.5));
    Some(arg.clamp(-1.0, 1.0))
}

/// The angle `phi0 ∈ [0, π]` parameterizing the deviator eigenvalues; zero for
/// hydrostatic tensors.
pub fn lode_phi0(s: SymTensor3) -> f64 {
    lode_cosine(s).map_or(0.0, f64::acos)
}

/// Ordered eigenvalues of the deviator from the trigonometric solution of
/// `x³ - J2 x - J3 = 0`.
pub fn deviator_eigenvalues_trig(s: SymTensor3) -> [f64; 3] {
    let j2 = j2(s);
    let Some(c) = lode_cosine(s) else {
        return [0.0; 3];
    };
    let phi0 = c.acos();
    let amp = (4.0 * j2 / 3.0).sqrt();
    [
        amp * (phi0 / 3.0).cos(),
        amp * ((2.0 * PI - phi0) / 3.0).cos(),
        amp * ((2.0 * PI + phi0) / 3.0).cos(),
    ]
}

/// Which eigenvalues coincide, within tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Distinct,
    /// `λ1 = λ2 > λ3`.
    UpperPair,
    /// `λ1 > λ2 = λ3`.
    LowerPair,
    Triple,
}

/// Eigen-decomposition with `λ1 ≥ λ2 ≥ λ3` and orthonormal eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDecomp {
    pub eigenvalues: [f64; 3],
    pub eigenvectors: [Vec3; 3],
    pub multiplicity: Multiplicity,
}

impl SpectralDecomp {
    /// `Σ λ_i v_i ⊗ v_i`.
    pub fn reconstruct(&self) -> SymTensor3 {
        (0..3).fold(SymTensor3::ZERO, |acc, i| {
            acc + outer(self.eigenvectors[i]) * self.eigenvalues[i]
        })
    }

    pub fn projector(&self, i: usize) -> SymTensor3 {
        outer(self.eigenvectors[i])
    }
}

pub fn spectral(s: SymTensor3) -> SpectralDecomp {
    spectral_with_tol(s, DEFAULT_EIG_TOL)
}

/// Eigen-decomposition where eigenvalues closer than `eig_tol * max(1, |s|)`
/// are reported as coincident.
pub fn spectral_with_tol(s: SymTensor3, eig_tol: f64) -> SpectralDecomp {
    let (values, vectors) = jacobi_eigen(s.to_matrix());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let eigenvalues = order.map(|i| values[i]);
    let eigenvectors = order.map(|i| {
        let v = [vectors[0][i], vectors[1][i], vectors[2][i]];
        let n = vec_norm(v);
        [v[0] / n, v[1] / n, v[2] / n]
    });

    let tol = eig_tol * s.norm().max(1.0);
    let upper = eigenvalues[0] - eigenvalues[1] <= tol;
    let lower = eigenvalues[1] - eigenvalues[2] <= tol;
    let multiplicity = match (upper, lower) {
        _ if eigenvalues[0] - eigenvalues[2] <= tol => Multiplicity::Triple,
        (true, true) => Multiplicity::Triple,
        (true, false) => Multiplicity::UpperPair,
        (false, true) => Multiplicity::LowerPair,
        (false, false) => Multiplicity::Distinct,
    };
    SpectralDecomp {
        eigenvalues,
        eigenvectors,
        multiplicity,
    }
}

/// Cyclic Jacobi rotations. Returns eigenvalues (unsorted) and the matrix whose
/// columns are the matching eigenvectors.
fn jacobi_eigen(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let total: f64 = a.iter().flatten().map(|x| x * x).sum();
    if total == 0.0 {
        return ([0.0; 3], v);
    }
    for _sweep in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off <= 1e-40 * total {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = if theta.abs() > 1e150 {
                0.5 / theta
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for row in a.iter_mut() {
                let (akp, akq) = (row[p], row[q]);
                row[p] = c * akp - s * akq;
                row[q] = s * akp + c * akq;
            }
            let (rp, rq) = (a[p], a[q]);
            for k in 0..3 {
                a[p][k] = c * rp[k] - s * rq[k];
                a[q][k] = s * rp[k] + c * rq[k];
            }
            for row in v.iter_mut() {
                let (vkp, vkq) = (row[p], row[q]);
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}
