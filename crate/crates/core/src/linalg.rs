//! Vectors and matrices over 𝒜_v, their faithful real-linear picture, and
//! graded component extraction; plus the dense real-matrix toolkit
//! (Frobenius norms, Kronecker lifts, cyclic Jacobi eigensolver,
//! Gram-Schmidt) everything downstream runs on.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::cd::{cd_conj, BasisTable, CdNumber};
use crate::{fp, Error, Result};

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMat {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
}

/// The real-linear picture of an operator on the flattened coordinates of
/// an 𝒜_v module. Composition of real pictures is the authoritative
/// (associative) operator product.
pub type RealPicture = RealMat;

impl RealMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMat { rows, cols, a: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMat::zeros(n, n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = RealMat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.a[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::EmptyInput);
        }
        let c = rows[0].len();
        let mut a = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch { lhs: row.len(), rhs: c });
            }
            a.extend_from_slice(row);
        }
        Ok(RealMat { rows: r, cols: c, a })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, t: f64) {
        self.a[r * self.cols + c] = t;
    }

    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, t: f64) {
        self.a[r * self.cols + c] += t;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.a[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.at(r, c)).collect()
    }

    pub fn transpose(&self) -> RealMat {
        RealMat::from_fn(self.cols, self.rows, |r, c| self.at(c, r))
    }

    pub fn add(&self, rhs: &RealMat) -> RealMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let a = self.a.iter().zip(&rhs.a).map(|(x, y)| x + y).collect();
        RealMat { rows: self.rows, cols: self.cols, a }
    }

    pub fn sub(&self, rhs: &RealMat) -> RealMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let a = self.a.iter().zip(&rhs.a).map(|(x, y)| x - y).collect();
        RealMat { rows: self.rows, cols: self.cols, a }
    }

    pub fn scale(&self, t: f64) -> RealMat {
        RealMat { rows: self.rows, cols: self.cols, a: self.a.iter().map(|x| x * t).collect() }
    }

    pub fn matmul(&self, rhs: &RealMat) -> RealMat {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = RealMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.a[i * self.cols + k];
                if aik == 0.0 {
                    continue;
                }
                let rrow = &rhs.a[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.a[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o += aik * r;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frob(&self) -> f64 {
        fp::sqrt(self.a.iter().map(|t| t * t).sum())
    }

    /// Frobenius distance ‖self − rhs‖.
    pub fn dist(&self, rhs: &RealMat) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        fp::sqrt(self.a.iter().zip(&rhs.a).map(|(x, y)| (x - y) * (x - y)).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, t| m.max(fp::abs(*t)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).sum()
    }

    /// Frobenius inner product tr(selfᵀ · rhs).
    pub fn frob_inner(&self, rhs: &RealMat) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        self.a.iter().zip(&rhs.a).map(|(x, y)| x * y).sum()
    }

    /// Kronecker product; block (i1,j1) of the result is self[i1,j1]·rhs.
    pub fn kron(&self, rhs: &RealMat) -> RealMat {
        let mut out = RealMat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let s = self.at(i1, j1);
                if s == 0.0 {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        out.set(i1 * rhs.rows + i2, j1 * rhs.cols + j2, s * rhs.at(i2, j2));
                    }
                }
            }
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> RealMat {
        RealMat::from_fn(h, w, |r, c| self.at(r0 + r, c0 + c))
    }

    /// self += t · x xᵀ.
    pub fn add_outer(&mut self, x: &[f64], t: f64) {
        assert_eq!(self.rows, x.len());
        assert_eq!(self.cols, x.len());
        for (r, &xr) in x.iter().enumerate() {
            for (c, &xc) in x.iter().enumerate() {
                self.a[r * self.cols + c] += t * xr * xc;
            }
        }
    }

    pub fn commutator_norm(&self, rhs: &RealMat) -> f64 {
        self.matmul(rhs).dist(&rhs.matmul(self))
    }

    pub fn symmetry_residual(&self) -> f64 {
        self.dist(&self.transpose())
    }
}

/// Operator composition: the real matrix product.
pub fn compose(s: &RealPicture, t: &RealPicture) -> RealPicture {
    s.matmul(t)
}

pub fn vec_dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn vec_norm(x: &[f64]) -> f64 {
    fp::sqrt(vec_dot(x, x))
}

/// ‖MMᵀ − MᵀM‖_F; the adjoint in the real picture is the transpose.
pub fn normality_residual(m: &RealMat) -> f64 {
    let mt = m.transpose();
    m.matmul(&mt).dist(&mt.matmul(m))
}

pub fn is_normal(m: &RealMat, tol: f64) -> bool {
    normality_residual(m) <= tol
}

/// max(‖P − Pᵀ‖, ‖P² − P‖).
pub fn projection_residual(p: &RealMat) -> f64 {
    p.symmetry_residual().max(p.matmul(p).dist(p))
}

pub fn is_projection(p: &RealMat, tol: f64) -> bool {
    projection_residual(p) <= tol
}

/// max(‖UᵀU − I‖, ‖UUᵀ − I‖).
pub fn unitary_residual(u: &RealMat) -> f64 {
    let id = RealMat::identity(u.rows());
    let ut = u.transpose();
    ut.matmul(u).dist(&id).max(u.matmul(&ut).dist(&id))
}

pub fn is_unitary(u: &RealMat, tol: f64) -> bool {
    unitary_residual(u) <= tol
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in ascending order and the orthogonal matrix whose
/// columns are the matching eigenvectors (A = V diag(λ) Vᵀ).
pub fn jacobi_eigh(m: &RealMat) -> (Vec<f64>, RealMat) {
    assert!(m.is_square(), "jacobi_eigh needs a square matrix");
    let n = m.rows();
    // Symmetrize defensively; callers pass symmetric input up to roundoff.
    let mut b = m.add(&m.transpose()).scale(0.5);
    let mut v = RealMat::identity(n);
    let scale = b.frob().max(1.0);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * b.at(p, q) * b.at(p, q);
            }
        }
        if fp::sqrt(off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = b.at(p, q);
                if fp::abs(apq) <= 1e-300 {
                    continue;
                }
                let tau = (b.at(q, q) - b.at(p, p)) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + fp::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + fp::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / fp::sqrt(1.0 + t * t);
                let s = t * c;
                // B := Jᵀ B J and V := V J for the (p,q) rotation.
                for r in 0..n {
                    let brp = b.at(r, p);
                    let brq = b.at(r, q);
                    b.set(r, p, c * brp - s * brq);
                    b.set(r, q, s * brp + c * brq);
                }
                for r in 0..n {
                    let bpr = b.at(p, r);
                    let bqr = b.at(q, r);
                    b.set(p, r, c * bpr - s * bqr);
                    b.set(q, r, s * bpr + c * bqr);
                }
                for r in 0..n {
                    let vrp = v.at(r, p);
                    let vrq = v.at(r, q);
                    v.set(r, p, c * vrp - s * vrq);
                    v.set(r, q, s * vrp + c * vrq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b.at(i, i).partial_cmp(&b.at(j, j)).unwrap());
    let vals = order.iter().map(|&i| b.at(i, i)).collect();
    let vecs = RealMat::from_fn(n, n, |r, c| v.at(r, order[c]));
    (vals, vecs)
}

/// Modified Gram-Schmidt with re-orthogonalization on the columns.
/// Fails when a column drops below norm 1e−8 after orthogonalization.
pub fn gram_schmidt(m: &RealMat) -> Result<RealMat> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.col(j);
        for _ in 0..2 {
            for qi in &q {
                let t = vec_dot(qi, &v);
                for (vr, qr) in v.iter_mut().zip(qi) {
                    *vr -= t * qr;
                }
            }
        }
        let n = vec_norm(&v);
        if n < 1e-8 {
            return Err(Error::BadSpec("rank-deficient basis"));
        }
        for vr in v.iter_mut() {
            *vr /= n;
        }
        q.push(v);
    }
    Ok(RealMat::from_fn(rows, cols, |r, c| q[c][r]))
}

/// Seeded random orthogonal matrix; redraws (deterministically) in the
/// astronomically unlikely rank-deficient case.
pub fn random_orthonormal<R: Rng>(rng: &mut R, n: usize) -> RealMat {
    loop {
        let m = RealMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        if let Ok(q) = gram_schmidt(&m) {
            return q;
        }
    }
}

/// A resolution of the identity into `n_atoms` orthogonal projections with
/// random (seeded) joint eigenbasis; every atom has rank ≥ 1.
pub fn random_projection_split<R: Rng>(rng: &mut R, d: usize, n_atoms: usize) -> Vec<RealMat> {
    assert!(n_atoms >= 1 && n_atoms <= d, "need 1 ≤ atoms ≤ d");
    let q = random_orthonormal(rng, d);
    let mut sizes = vec![1usize; n_atoms];
    for _ in n_atoms..d {
        let g = rng.gen_range(0..n_atoms);
        sizes[g] += 1;
    }
    let mut out = Vec::with_capacity(n_atoms);
    let mut col = 0;
    for &sz in &sizes {
        let mut p = RealMat::zeros(d, d);
        for c in col..col + sz {
            p.add_outer(&q.col(c), 1.0);
        }
        out.push(p);
        col += sz;
    }
    out
}

/// Vector over 𝒜_v.
#[derive(Clone, Debug, PartialEq)]
pub struct AvVector {
    v: u8,
    entries: Vec<CdNumber>,
}

impl AvVector {
    pub fn new(v: u8, entries: Vec<CdNumber>) -> Result<Self> {
        for e in &entries {
            if e.level() != v {
                return Err(Error::LevelMismatch { lhs: v, rhs: e.level() });
            }
        }
        Ok(AvVector { v, entries })
    }

    pub fn zero(v: u8, d: usize) -> Self {
        AvVector { v, entries: vec![CdNumber::zero(v); d] }
    }

    pub fn level(&self) -> u8 {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, p: usize) -> &CdNumber {
        &self.entries[p]
    }

    pub fn set_entry(&mut self, p: usize, z: CdNumber) {
        assert_eq!(z.level(), self.v, "level mismatch");
        self.entries[p] = z;
    }

    pub fn entries(&self) -> &[CdNumber] {
        &self.entries
    }
}

/// Square matrix over 𝒜_v acting by (Mx)_p = Σ_q M_{pq}·x_q (entries
/// multiply components from the left).
#[derive(Clone, Debug, PartialEq)]
pub struct AvMatrix {
    v: u8,
    d: usize,
    entries: Vec<CdNumber>,
}

impl AvMatrix {
    pub fn new(v: u8, d: usize, entries: Vec<CdNumber>) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::ShapeMismatch { lhs: entries.len(), rhs: d * d });
        }
        for e in &entries {
            if e.level() != v {
                return Err(Error::LevelMismatch { lhs: v, rhs: e.level() });
            }
        }
        Ok(AvMatrix { v, d, entries })
    }

    pub fn zero(v: u8, d: usize) -> Self {
        AvMatrix { v, d, entries: vec![CdNumber::zero(v); d * d] }
    }

    pub fn identity(v: u8, d: usize) -> Self {
        let mut m = AvMatrix::zero(v, d);
        for p in 0..d {
            m.entries[p * d + p] = CdNumber::real(v, 1.0);
        }
        m
    }

    pub fn diag(v: u8, entries: Vec<CdNumber>) -> Result<Self> {
        let d = entries.len();
        let mut m = AvMatrix::zero(v, d);
        for (p, z) in entries.into_iter().enumerate() {
            if z.level() != v {
                return Err(Error::LevelMismatch { lhs: v, rhs: z.level() });
            }
            m.entries[p * d + p] = z;
        }
        Ok(m)
    }

    pub fn level(&self) -> u8 {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn at(&self, p: usize, q: usize) -> &CdNumber {
        &self.entries[p * self.d + q]
    }

    pub fn set(&mut self, p: usize, q: usize, z: CdNumber) {
        assert_eq!(z.level(), self.v, "level mismatch");
        self.entries[p * self.d + q] = z;
    }
}

/// (Mx)_p = Σ_q M_{pq}·x_q.
pub fn apply(m: &AvMatrix, x: &AvVector, table: &BasisTable) -> Result<AvVector> {
    if m.v != x.v {
        return Err(Error::LevelMismatch { lhs: m.v, rhs: x.v });
    }
    if m.d != x.dim() {
        return Err(Error::ShapeMismatch { lhs: m.d, rhs: x.dim() });
    }
    let mut out = AvVector::zero(m.v, m.d);
    for p in 0..m.d {
        let mut acc = CdNumber::zero(m.v);
        for q in 0..m.d {
            acc = acc.add(&table.mul(m.at(p, q), x.entry(q))?);
        }
        out.entries[p] = acc;
    }
    Ok(out)
}

/// 𝒜_v-valued scalar product ⟨x;y⟩ = Σ_k conj(x_k)·y_k, conjugate-linear
/// in the first argument. Re⟨x;x⟩ = Σ|x_k|² with vanishing imaginary part.
pub fn inner(x: &AvVector, y: &AvVector, table: &BasisTable) -> Result<CdNumber> {
    if x.v != y.v {
        return Err(Error::LevelMismatch { lhs: x.v, rhs: y.v });
    }
    if x.dim() != y.dim() {
        return Err(Error::ShapeMismatch { lhs: x.dim(), rhs: y.dim() });
    }
    let mut acc = CdNumber::zero(x.v);
    for (a, b) in x.entries.iter().zip(&y.entries) {
        acc = acc.add(&table.mul(&cd_conj(a), b)?);
    }
    Ok(acc)
}

/// Conjugate transpose.
pub fn adjoint(m: &AvMatrix) -> AvMatrix {
    let mut out = AvMatrix::zero(m.v, m.d);
    for p in 0..m.d {
        for q in 0..m.d {
            out.entries[q * m.d + p] = cd_conj(m.at(p, q));
        }
    }
    out
}

/// Flatten to real coordinates: component p of the vector occupies indices
/// p·2^v .. (p+1)·2^v, coefficient of i_j at offset j.
pub fn flat(x: &AvVector) -> Vec<f64> {
    let g = 1usize << x.v;
    let mut out = Vec::with_capacity(x.dim() * g);
    for e in &x.entries {
        out.extend_from_slice(e.coeffs());
    }
    out
}

pub fn unflat(v: u8, d: usize, data: &[f64]) -> Result<AvVector> {
    let g = 1usize << v;
    if data.len() != d * g {
        return Err(Error::ShapeMismatch { lhs: data.len(), rhs: d * g });
    }
    let entries = data
        .chunks(g)
        .map(|c| CdNumber::new(v, c.to_vec()).unwrap())
        .collect();
    AvVector::new(v, entries)
}

/// The g×g real matrix of left multiplication by z (g = 2^v).
pub fn scalar_left_mat(z: &CdNumber, table: &BasisTable) -> RealMat {
    assert_eq!(z.level(), table.level(), "level mismatch");
    let g = table.dim();
    let mut m = RealMat::zeros(g, g);
    for (j, &zj) in z.coeffs().iter().enumerate() {
        if zj == 0.0 {
            continue;
        }
        for k in 0..g {
            let (s, l) = table.entry(j, k);
            m.add_at(l, k, f64::from(s) * zj);
        }
    }
    m
}

/// I_d ⊗ L_z: componentwise left scalar multiplication on the module.
pub fn lift_scalar(z: &CdNumber, d: usize, table: &BasisTable) -> RealMat {
    RealMat::identity(d).kron(&scalar_left_mat(z, table))
}

/// R ⊗ I_g: a real d×d matrix acting on components. Commutes with every
/// lift_scalar.
pub fn lift_real(r: &RealMat, g: usize) -> RealMat {
    assert!(r.is_square());
    r.kron(&RealMat::identity(g))
}

/// Faithful real picture of an 𝒜_v matrix; acts on flat coordinates
/// exactly as [`apply`] does.
pub fn real_picture(m: &AvMatrix, table: &BasisTable) -> RealPicture {
    assert_eq!(m.v, table.level(), "level mismatch");
    let g = table.dim();
    let n = m.d * g;
    let mut out = RealMat::zeros(n, n);
    for p in 0..m.d {
        for q in 0..m.d {
            let z = m.at(p, q);
            for (j, &zj) in z.coeffs().iter().enumerate() {
                if zj == 0.0 {
                    continue;
                }
                for k in 0..g {
                    let (s, l) = table.entry(j, k);
                    out.add_at(p * g + l, q * g + k, f64::from(s) * zj);
                }
            }
        }
    }
    out
}

/// The graded decomposition T = Σ_j ^jT̂ of a real picture, together with
/// the Frobenius residual of the reconstruction. The residual vanishes on
/// the representable class Σ_k L_{z_k}P_k (real P_k) and is reported, not
/// thrown, for anything else.
#[derive(Clone, Debug)]
pub struct GradedComponents {
    pub parts: Vec<RealPicture>,
    pub residual: f64,
}

/// C_j with ^jT̂ = C_j ⊗ L_{i_j}: each g×g block of T is projected onto the
/// Frobenius-orthogonal family {L_{i_j}} (‖L_{i_j}‖²_F = g at every level).
pub fn coefficient_matrix(t: &RealPicture, d: usize, table: &BasisTable, j: usize) -> RealMat {
    let g = table.dim();
    assert_eq!(t.rows(), d * g, "size mismatch");
    assert!(t.is_square());
    let lj = scalar_left_mat(&CdNumber::basis(table.level(), j).unwrap(), table);
    RealMat::from_fn(d, d, |p, q| {
        let mut acc = 0.0;
        for l in 0..g {
            for k in 0..g {
                acc += lj.at(l, k) * t.at(p * g + l, q * g + k);
            }
        }
        acc / g as f64
    })
}

/// All components ^jT̂ = C_j ⊗ L_{i_j} plus the reconstruction residual.
pub fn graded_components(t: &RealPicture, d: usize, table: &BasisTable) -> GradedComponents {
    let g = table.dim();
    let mut parts = Vec::with_capacity(g);
    let mut sum = RealMat::zeros(d * g, d * g);
    for j in 0..g {
        let cj = coefficient_matrix(t, d, table, j);
        let lj = scalar_left_mat(&CdNumber::basis(table.level(), j).unwrap(), table);
        let part = cj.kron(&lj);
        sum = sum.add(&part);
        parts.push(part);
    }
    GradedComponents { parts, residual: t.dist(&sum) }
}

/// Single component ^jT̂.
pub fn graded_component(t: &RealPicture, d: usize, table: &BasisTable, j: usize) -> RealPicture {
    let cj = coefficient_matrix(t, d, table, j);
    let lj = scalar_left_mat(&CdNumber::basis(table.level(), j).unwrap(), table);
    cj.kron(&lj)
}
