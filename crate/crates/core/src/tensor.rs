//! Dense symmetric second-order tensors and minor-symmetric fourth-order
//! tensors in three dimensions.
//!
//! Index order for the six independent components is `{11, 22, 33, 12, 23, 13}`.
//! A [`Tensor4V`] stores the tensor components `A_ijkl` directly at the
//! corresponding Voigt positions, so the printed 6×6 matrices carry no shear
//! factors (the `(4,4)` entry of the isotropic elasticity tensor is `μ`).
//! Strain-like Voigt vectors carry the doubled shear components instead.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector3, Vector6};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// `(i, j)` index pairs of the six Voigt slots.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

/// Weight of each Voigt slot in a full double contraction (off-diagonal
/// components appear twice).
const VOIGT_WEIGHT: [f64; 6] = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];

/// Voigt slot holding tensor component `(i, j)`.
pub fn voigt_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (1, 2) => 4,
        (0, 2) => 5,
        _ => panic!("tensor index out of range: ({i}, {j})"),
    }
}

/// Symmetric second-order tensor stored as six components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3 {
    c: [f64; 6],
}

impl SymTensor3 {
    pub const fn from_components(c: [f64; 6]) -> Self {
        Self { c }
    }

    pub const fn zero() -> Self {
        Self { c: [0.0; 6] }
    }

    pub const fn identity() -> Self {
        Self {
            c: [1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn diag(d0: f64, d1: f64, d2: f64) -> Self {
        Self {
            c: [d0, d1, d2, 0.0, 0.0, 0.0],
        }
    }

    /// Symmetric part of a full matrix.
    pub fn from_matrix(m: &Mat3) -> Self {
        let mut c = [0.0; 6];
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            c[a] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
        Self { c }
    }

    /// Dyadic square `a ⊗ a`.
    pub fn outer_self(a: &Vec3) -> Self {
        let mut c = [0.0; 6];
        for (s, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            c[s] = a[i] * a[j];
        }
        Self { c }
    }

    pub fn components(&self) -> [f64; 6] {
        self.c
    }

    pub fn to_matrix(&self) -> Mat3 {
        let c = &self.c;
        Mat3::new(c[0], c[3], c[5], c[3], c[1], c[4], c[5], c[4], c[2])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[voigt_index(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.c[0] + self.c[1] + self.c[2]
    }

    /// Frobenius inner product `⟨A, B⟩ = tr(A Bᵀ)`.
    pub fn dot(&self, other: &Self) -> f64 {
        (0..6).map(|a| VOIGT_WEIGHT[a] * self.c[a] * other.c[a]).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn det(&self) -> f64 {
        self.to_matrix().determinant()
    }

    pub fn deviator(&self) -> Self {
        deviator(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Matrix product `self · other`, which is in general not symmetric.
    pub fn matmul(&self, other: &Self) -> Mat3 {
        self.to_matrix() * other.to_matrix()
    }

    /// `Q · self · Qᵀ`.
    pub fn rotate(&self, q: &Mat3) -> Self {
        Self::from_matrix(&(q * self.to_matrix() * q.transpose()))
    }
}

impl Index<usize> for SymTensor3 {
    type Output = f64;
    fn index(&self, a: usize) -> &f64 {
        &self.c[a]
    }
}

impl Add for SymTensor3 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for SymTensor3 {
    fn add_assign(&mut self, rhs: Self) {
        for a in 0..6 {
            self.c[a] += rhs.c[a];
        }
    }
}

impl Sub for SymTensor3 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl SubAssign for SymTensor3 {
    fn sub_assign(&mut self, rhs: Self) {
        for a in 0..6 {
            self.c[a] -= rhs.c[a];
        }
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for v in &mut self.c {
            *v *= s;
        }
        self
    }
}

impl Mul<SymTensor3> for f64 {
    type Output = SymTensor3;
    fn mul(self, t: SymTensor3) -> SymTensor3 {
        t * self
    }
}

impl Neg for SymTensor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

/// `dev T = T − ⅓ tr(T) 1`.
pub fn deviator(t: &SymTensor3) -> SymTensor3 {
    let m = t.trace() / 3.0;
    let mut c = t.c;
    c[0] -= m;
    c[1] -= m;
    c[2] -= m;
    SymTensor3 { c }
}

/// How shear components are treated when packing a tensor into a 6-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoigtKind {
    /// Components copied as-is.
    StressLike,
    /// Shear components doubled (engineering shear strains).
    StrainLike,
}

pub fn voigt_pack(t: &SymTensor3, kind: VoigtKind) -> Vector6<f64> {
    let mut v = Vector6::from_row_slice(&t.c);
    if kind == VoigtKind::StrainLike {
        for a in 3..6 {
            v[a] *= 2.0;
        }
    }
    v
}

pub fn voigt_unpack(v: &Vector6<f64>, kind: VoigtKind) -> SymTensor3 {
    let mut c = [0.0; 6];
    for a in 0..6 {
        c[a] = v[a];
    }
    if kind == VoigtKind::StrainLike {
        for a in c.iter_mut().skip(3) {
            *a *= 0.5;
        }
    }
    SymTensor3 { c }
}

/// Fourth-order tensor with both minor symmetries, stored as its 6×6 Voigt
/// matrix of tensor components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor4V {
    m: Matrix6<f64>,
    /// Set when the tensor is known to be major-symmetric by construction.
    pub has_major_symmetry: bool,
}

/// Full 3×3×3×3 component array, used during assembly.
pub type Full4 = [[[[f64; 3]; 3]; 3]; 3];

impl Tensor4V {
    pub fn zeros() -> Self {
        Self {
            m: Matrix6::zeros(),
            has_major_symmetry: true,
        }
    }

    pub fn from_matrix(m: Matrix6<f64>) -> Self {
        let mut t = Self {
            m,
            has_major_symmetry: false,
        };
        t.has_major_symmetry = t.major_asymmetry() <= 1e-10 * t.max_abs().max(f64::MIN_POSITIVE);
        t
    }

    pub fn from_rows(rows: [[f64; 6]; 6]) -> Self {
        Self::from_matrix(Matrix6::from_fn(|i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.m
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[(a, b)]
    }

    /// Component `A_ijkl`.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.m[(voigt_index(i, j), voigt_index(k, l))]
    }

    /// Symmetric fourth-order identity `𝕀ˢʸᵐ = ½(δ_ik δ_jl + δ_il δ_jk)`.
    pub fn sym_identity() -> Self {
        let mut m = Matrix6::zeros();
        for a in 0..6 {
            m[(a, a)] = if a < 3 { 1.0 } else { 0.5 };
        }
        Self {
            m,
            has_major_symmetry: true,
        }
    }

    /// `a ⊗ b`.
    pub fn outer(a: &SymTensor3, b: &SymTensor3) -> Self {
        let m = Matrix6::from_fn(|i, j| a.c[i] * b.c[j]);
        Self {
            m,
            has_major_symmetry: a == b,
        }
    }

    /// Deviatoric projector `𝕀_P = 1⊠1 − ⅓ 1⊗1`.
    pub fn dev_projector() -> Self {
        let one = SymTensor3::identity();
        let mut p = kronecker_box(&one, &one) - Self::outer(&one, &one) * (1.0 / 3.0);
        p.has_major_symmetry = true;
        p
    }

    /// Minor-symmetrized Voigt form of a full component array.
    pub fn from_full(a: &Full4) -> Self {
        let mut m = Matrix6::zeros();
        for (p, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            for (q, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
                m[(p, q)] = 0.25 * (a[i][j][k][l] + a[j][i][k][l] + a[i][j][l][k] + a[j][i][l][k]);
            }
        }
        Self::from_matrix(m)
    }

    pub fn to_full(&self) -> Full4 {
        let mut a = [[[[0.0; 3]; 3]; 3]; 3];
        for (i, ai) in a.iter_mut().enumerate() {
            for (j, aij) in ai.iter_mut().enumerate() {
                for (k, aijk) in aij.iter_mut().enumerate() {
                    for (l, v) in aijk.iter_mut().enumerate() {
                        *v = self.component(i, j, k, l);
                    }
                }
            }
        }
        a
    }

    /// Right contraction `(A : T)_ij = A_ijkl T_kl`.
    pub fn contract(&self, t: &SymTensor3) -> SymTensor3 {
        let mut c = [0.0; 6];
        for (a, ca) in c.iter_mut().enumerate() {
            *ca = (0..6).map(|b| self.m[(a, b)] * VOIGT_WEIGHT[b] * t.c[b]).sum();
        }
        SymTensor3 { c }
    }

    /// Left contraction `(T : A)_kl = T_ij A_ijkl`.
    pub fn contract_left(&self, t: &SymTensor3) -> SymTensor3 {
        let mut c = [0.0; 6];
        for (b, cb) in c.iter_mut().enumerate() {
            *cb = (0..6).map(|a| t.c[a] * VOIGT_WEIGHT[a] * self.m[(a, b)]).sum();
        }
        SymTensor3 { c }
    }

    /// Double contraction `(A : B)_ijkl = A_ijmn B_mnkl`.
    pub fn compose(&self, other: &Self) -> Self {
        let w = Matrix6::from_diagonal(&Vector6::from_row_slice(&VOIGT_WEIGHT));
        Self::from_matrix(self.m * w * other.m)
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
            has_major_symmetry: self.has_major_symmetry,
        }
    }

    /// Largest absolute entry of `A − Aᵀ`.
    pub fn major_asymmetry(&self) -> f64 {
        (self.m - self.m.transpose()).abs().max()
    }

    pub fn is_major_symmetric(&self, rel_tol: f64) -> bool {
        self.major_asymmetry() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.abs().max()
    }

    /// Frobenius norm of the Voigt matrix.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|v| v.is_finite())
    }

    /// Rotated tensor `Q_ia Q_jb Q_kc Q_ld A_abcd`.
    pub fn rotate(&self, q: &Mat3) -> Self {
        let mut t = Self::from_full(&rotate_full(&self.to_full(), q));
        t.has_major_symmetry = self.has_major_symmetry;
        t
    }

    /// Push-forward `F_iA F_jB F_kC F_lD A_ABCD` (spatial tangent from a material one).
    pub fn push_forward(&self, f: &Mat3) -> Self {
        self.rotate(f)
    }

    /// Eigenvalues of the symmetrized Voigt matrix, in ascending order.
    pub fn voigt_eigenvalues(&self) -> [f64; 6] {
        let sym = (self.m + self.m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2], ev[3], ev[4], ev[5]]
    }

    /// Six comma-separated rows in the printed Voigt layout.
    pub fn to_csv_block(&self) -> String {
        let mut out = String::new();
        for a in 0..6 {
            let row: Vec<String> = (0..6).map(|b| format!("{}", self.m[(a, b)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

impl Add for Tensor4V {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            m: self.m + rhs.m,
            has_major_symmetry: self.has_major_symmetry && rhs.has_major_symmetry,
        }
    }
}

impl AddAssign for Tensor4V {
    fn add_assign(&mut self, rhs: Self) {
        self.m += rhs.m;
        self.has_major_symmetry &= rhs.has_major_symmetry;
    }
}

impl Sub for Tensor4V {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            m: self.m - rhs.m,
            has_major_symmetry: self.has_major_symmetry && rhs.has_major_symmetry,
        }
    }
}

impl Mul<f64> for Tensor4V {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            m: self.m * s,
            has_major_symmetry: self.has_major_symmetry,
        }
    }
}

/// `Q_ia Q_jb Q_kc Q_ld A_abcd`, one index at a time.
pub fn rotate_full(a: &Full4, q: &Mat3) -> Full4 {
    let mut cur = *a;
    for slot in 0..4 {
        let mut next = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let idx = [i, j, k, l];
                        let mut s = 0.0;
                        for r in 0..3 {
                            let mut src = idx;
                            src[slot] = r;
                            s += q[(idx[slot], r)] * cur[src[0]][src[1]][src[2]][src[3]];
                        }
                        next[i][j][k][l] = s;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Kronecker box product, `(G⊠H)_ijkl = G_ik H_jl`, stored minor-symmetrized
/// so that `(G⊠H) : X = sym(G X Hᵀ)` for symmetric `X`.
pub fn kronecker_box(g: &SymTensor3, h: &SymTensor3) -> Tensor4V {
    let (g, h) = (g.to_matrix(), h.to_matrix());
    let mut a = [[[[0.0; 3]; 3]; 3]; 3];
    for (i, ai) in a.iter_mut().enumerate() {
        for (j, aij) in ai.iter_mut().enumerate() {
            for (k, aijk) in aij.iter_mut().enumerate() {
                for (l, v) in aijk.iter_mut().enumerate() {
                    *v = g[(i, k)] * h[(j, l)];
                }
            }
        }
    }
    Tensor4V::from_full(&a)
}

/// Multiplicity pattern of the three eigenvalues (sorted descending).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Distinct,
    /// The two listed eigenvalue indices coincide within the coalescence tolerance.
    Double(usize, usize),
    Triple,
}

impl Multiplicity {
    /// Whether eigenvalues `k` and `j` are treated as equal.
    pub fn pairs(&self, k: usize, j: usize) -> bool {
        if k == j {
            return true;
        }
        match *self {
            Multiplicity::Distinct => false,
            Multiplicity::Triple => true,
            Multiplicity::Double(a, b) => (k == a && j == b) || (k == b && j == a),
        }
    }

    /// Whether eigenvalue `k` coincides with any other eigenvalue.
    pub fn is_repeated(&self, k: usize) -> bool {
        (0..3).any(|j| j != k && self.pairs(k, j))
    }
}

/// Coalescence tolerance for eigenvalues of magnitude up to `max_eig`.
pub fn tol_eig(max_eig: f64) -> f64 {
    1e-8 * max_eig.abs().max(1.0)
}

/// Positive-definiteness threshold for a tensor with the given trace.
pub fn tol_pd(trace: f64) -> f64 {
    1e-12 * trace.abs().max(1.0)
}

/// Eigen-decomposition of a symmetric positive-definite tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral {
    /// Eigenvalues, sorted descending.
    pub eigenvalues: [f64; 3],
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub vectors: Mat3,
    /// Eigenprojections `N_k ⊗ N_k`.
    pub projections: [SymTensor3; 3],
    pub multiplicity: Multiplicity,
}

impl Spectral {
    pub fn vector(&self, k: usize) -> Vec3 {
        self.vectors.column(k).into_owned()
    }

    /// `Σ f(λ_k) P_k`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymTensor3 {
        let d = Mat3::from_diagonal(&Vec3::new(
            f(self.eigenvalues[0]),
            f(self.eigenvalues[1]),
            f(self.eigenvalues[2]),
        ));
        SymTensor3::from_matrix(&(self.vectors * d * self.vectors.transpose()))
    }

    pub fn reconstruct(&self) -> SymTensor3 {
        self.map(|x| x)
    }
}

/// Eigenvalues (descending) and eigenvector columns of any symmetric tensor.
pub fn sym_eigen(t: &SymTensor3) -> ([f64; 3], Mat3) {
    let eig = SymmetricEigen::new(t.to_matrix());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = [
        eig.eigenvalues[order[0]],
        eig.eigenvalues[order[1]],
        eig.eigenvalues[order[2]],
    ];
    let mut vecs = Mat3::zeros();
    for (c, &o) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(o).normalize();
        vecs.set_column(c, &v);
    }
    // right-handed basis
    if vecs.determinant() < 0.0 {
        let v = -vecs.column(2);
        vecs.set_column(2, &v);
    }
    (vals, vecs)
}

fn classify(vals: &[f64; 3]) -> Multiplicity {
    let tol = tol_eig(vals[0].abs().max(vals[2].abs()));
    let g01 = (vals[0] - vals[1]).abs() < tol;
    let g12 = (vals[1] - vals[2]).abs() < tol;
    match (g01, g12) {
        (true, true) => Multiplicity::Triple,
        (true, false) => Multiplicity::Double(0, 1),
        (false, true) => Multiplicity::Double(1, 2),
        (false, false) => Multiplicity::Distinct,
    }
}

fn spectral_from_parts(vals: [f64; 3], vecs: Mat3) -> Spectral {
    let projections = [0, 1, 2].map(|k| SymTensor3::outer_self(&vecs.column(k).into_owned()));
    Spectral {
        eigenvalues: vals,
        vectors: vecs,
        projections,
        multiplicity: classify(&vals),
    }
}

/// Spectral decomposition of a symmetric positive-definite tensor.
pub fn spectral_decompose(c: &SymTensor3) -> Result<Spectral> {
    let (vals, vecs) = sym_eigen(c);
    if vals[2] <= tol_pd(c.trace()) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: vals[2],
        });
    }
    Ok(spectral_from_parts(vals, vecs))
}

/// Spectral decomposition of an arbitrary symmetric tensor (no definiteness
/// requirement). Used for log-space arguments, whose eigenvalues may be negative.
pub fn spectral_decompose_any(t: &SymTensor3) -> Spectral {
    let (vals, vecs) = sym_eigen(t);
    spectral_from_parts(vals, vecs)
}

/// Principal logarithm of a positive-definite tensor; halved when `halve` is
/// set, which turns `log C` into `log U`.
pub fn sym_log(t: &SymTensor3, halve: bool) -> Result<SymTensor3> {
    let s = spectral_decompose(t)?;
    let f = if halve { 0.5 } else { 1.0 };
    Ok(s.map(|x| f * x.ln()))
}

/// Matrix exponential of a symmetric tensor.
pub fn sym_exp(t: &SymTensor3) -> SymTensor3 {
    spectral_decompose_any(t).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rotation(axis: Vec3, angle: f64) -> Mat3 {
        *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).matrix()
    }

    #[test]
    fn identity_is_triple() {
        let s = spectral_decompose(&SymTensor3::identity()).unwrap();
        assert_eq!(s.eigenvalues, [1.0, 1.0, 1.0]);
        assert_eq!(s.multiplicity, Multiplicity::Triple);
        let sum = s.projections[0] + s.projections[1] + s.projections[2];
        assert!((sum - SymTensor3::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn axis_aligned_decomposition() {
        let l3 = 1.0 / (0.9 * 1.65);
        let s = spectral_decompose(&SymTensor3::diag(1.65, 0.9, l3)).unwrap();
        assert_relative_eq!(s.eigenvalues[0], 1.65, epsilon = 1e-14);
        assert_relative_eq!(s.eigenvalues[1], 0.9, epsilon = 1e-14);
        assert_relative_eq!(s.eigenvalues[2], 0.673_400_673_400_673_4, epsilon = 1e-14);
        assert!((s.projections[0] - SymTensor3::diag(1.0, 0.0, 0.0)).max_abs() < 1e-14);
        assert!((s.projections[2] - SymTensor3::diag(0.0, 0.0, 1.0)).max_abs() < 1e-14);
        assert_eq!(s.multiplicity, Multiplicity::Distinct);
    }

    #[test]
    fn rejects_indefinite() {
        let err = spectral_decompose(&SymTensor3::diag(1.0, 1.0, -0.1)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
        assert!(sym_log(&SymTensor3::diag(1.0, 1.0, 0.0), false).is_err());
    }

    #[test]
    fn double_eigenvalue_classified() {
        let s = spectral_decompose(&SymTensor3::diag(2.0, 1.0, 1.0 + 1e-10)).unwrap();
        assert_eq!(s.multiplicity, Multiplicity::Double(1, 2));
        assert!(s.multiplicity.is_repeated(2));
        assert!(!s.multiplicity.is_repeated(0));
    }

    #[test]
    fn log_of_diagonal() {
        let e = std::f64::consts::E;
        let l = sym_log(&SymTensor3::diag(e, 1.0, 1.0 / e), false).unwrap();
        assert!((l - SymTensor3::diag(1.0, 0.0, -1.0)).max_abs() < 1e-15);
        assert!(l.trace().abs() < 1e-15);
        assert_eq!(sym_log(&SymTensor3::identity(), true).unwrap(), SymTensor3::zero());
    }

    #[test]
    fn deviator_examples() {
        assert_eq!(deviator(&SymTensor3::identity()), SymTensor3::zero());
        assert_eq!(
            deviator(&SymTensor3::diag(2.0, 1.0, 0.0)),
            SymTensor3::diag(1.0, 0.0, -1.0)
        );
    }

    #[test]
    fn box_of_identities_is_sym_identity() {
        let one = SymTensor3::identity();
        let b = kronecker_box(&one, &one);
        assert_eq!(b, Tensor4V::sym_identity());
        let p = Tensor4V::dev_projector();
        assert!((p.compose(&p).matrix() - p.matrix()).abs().max() < 1e-13);
        assert!(p.contract(&one).max_abs() < 1e-13);
    }

    #[test]
    fn voigt_packing_conventions() {
        let v = voigt_pack(&SymTensor3::identity(), VoigtKind::StressLike);
        assert_eq!(v.as_slice(), &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let t = SymTensor3::from_components([0.0, 0.0, 0.0, 3.0, 0.0, 0.0]);
        assert_eq!(voigt_pack(&t, VoigtKind::StrainLike)[3], 6.0);
    }

    #[test]
    fn reference_tensor_rotation_round_trip() {
        let q = rotation(Vec3::new(1.0, 2.0, -0.5), 0.7);
        let t = Tensor4V::dev_projector();
        let r = t.rotate(&q).rotate(&q.transpose());
        assert!((r.matrix() - t.matrix()).abs().max() < 1e-14);
        // isotropic tensors are rotation invariant
        assert!((t.rotate(&q).matrix() - t.matrix()).abs().max() < 1e-14);
    }
}
