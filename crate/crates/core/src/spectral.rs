//! Finitely supported graded projection-valued measures: synthesis of
//! normal operators from spectral atoms, recovery of atoms from operators,
//! functional calculus, interval projections, and quasi-permutability
//! checks.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::cd::{BasisTable, CdNumber};
use crate::linalg::{
    coefficient_matrix, jacobi_eigh, projection_residual, random_projection_split,
    scalar_left_mat, RealMat, RealPicture,
};
use crate::{Error, Result};

/// Tolerance for the structural invariants of a measure (resolution of the
/// identity, orthogonality, projection property).
pub const PVM_TOL: f64 = 1e-10;

/// One spectral atom: value z ∈ 𝒜_v and a real orthogonal projection on
/// the module's component space (d×d).
#[derive(Clone, Debug)]
pub struct PvmAtom {
    pub z: CdNumber,
    pub p: RealMat,
}

/// Finitely supported projection-valued measure. The projections are
/// real-entried, so they commute with every scalar lift and the graded
/// structure lives entirely in the spectral values.
#[derive(Clone, Debug)]
pub struct GradedPvm {
    v: u8,
    d: usize,
    atoms: Vec<PvmAtom>,
}

fn resolution_residual(atoms: &[PvmAtom], d: usize) -> f64 {
    let mut sum = RealMat::zeros(d, d);
    let mut r: f64 = 0.0;
    for (k, a) in atoms.iter().enumerate() {
        r = r.max(projection_residual(&a.p));
        for b in &atoms[..k] {
            r = r.max(a.p.matmul(&b.p).frob());
        }
        sum = sum.add(&a.p);
    }
    r.max(sum.dist(&RealMat::identity(d)))
}

impl GradedPvm {
    /// Validates the resolution-of-identity invariants at [`PVM_TOL`] and
    /// merges atoms whose spectral values coincide exactly.
    pub fn new(v: u8, d: usize, atoms: Vec<PvmAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut merged: Vec<PvmAtom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            if a.z.level() != v {
                return Err(Error::LevelMismatch { lhs: v, rhs: a.z.level() });
            }
            if a.p.rows() != d || a.p.cols() != d {
                return Err(Error::ShapeMismatch { lhs: a.p.rows(), rhs: d });
            }
            match merged.iter_mut().find(|m| m.z == a.z) {
                Some(m) => m.p = m.p.add(&a.p),
                None => merged.push(a),
            }
        }
        let residual = resolution_residual(&merged, d);
        if residual > PVM_TOL {
            return Err(Error::InvalidPvm { residual });
        }
        Ok(GradedPvm { v, d, atoms: merged })
    }

    pub fn level(&self) -> u8 {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[PvmAtom] {
        &self.atoms
    }

    pub fn residual(&self) -> f64 {
        resolution_residual(&self.atoms, self.d)
    }

    /// Deterministic random measure: seeded orthonormal eigenbasis split
    /// into `n_atoms` projections, spectral coefficients uniform in
    /// [−2, 2] with pairwise ∞-distance at least 1e−3.
    pub fn random(v: u8, d: usize, n_atoms: usize, seed: u64) -> Result<Self> {
        if v > 3 {
            return Err(Error::UnsupportedLevel { v });
        }
        if n_atoms < 1 || n_atoms > d {
            return Err(Error::BadSpec("need 1 ≤ atoms ≤ dim"));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let projections = random_projection_split(&mut rng, d, n_atoms);
        let g = 1usize << v;
        let mut values: Vec<CdNumber> = Vec::with_capacity(n_atoms);
        while values.len() < n_atoms {
            let z = CdNumber::new(v, (0..g).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let separated = values.iter().all(|w| {
                z.coeffs()
                    .iter()
                    .zip(w.coeffs())
                    .any(|(a, b)| (a - b).abs() >= 1e-3)
            });
            if separated {
                values.push(z);
            }
        }
        let atoms = values
            .into_iter()
            .zip(projections)
            .map(|(z, p)| PvmAtom { z, p })
            .collect();
        GradedPvm::new(v, d, atoms)
    }
}

/// Componentwise order box: z ∈ I_{a,b} iff a_j ≤ z_j ≤ b_j for every j.
#[derive(Clone, Debug)]
pub struct IntervalBox {
    a: CdNumber,
    b: CdNumber,
}

impl IntervalBox {
    pub fn new(a: CdNumber, b: CdNumber) -> Result<Self> {
        if a.level() != b.level() {
            return Err(Error::LevelMismatch { lhs: a.level(), rhs: b.level() });
        }
        if a.coeffs().iter().zip(b.coeffs()).any(|(x, y)| y < x) {
            return Err(Error::BadSpec("box needs b ⪰ a componentwise"));
        }
        Ok(IntervalBox { a, b })
    }

    /// The truncation box [−n, n] in every coordinate.
    pub fn saturated(v: u8, n: f64) -> Self {
        let g = 1usize << v;
        IntervalBox {
            a: CdNumber::new(v, vec![-n; g]).unwrap(),
            b: CdNumber::new(v, vec![n; g]).unwrap(),
        }
    }

    pub fn level(&self) -> u8 {
        self.a.level()
    }

    pub fn lower(&self) -> &CdNumber {
        &self.a
    }

    pub fn upper(&self) -> &CdNumber {
        &self.b
    }

    pub fn contains(&self, z: &CdNumber) -> bool {
        z.level() == self.a.level()
            && z.coeffs()
                .iter()
                .zip(self.a.coeffs().iter().zip(self.b.coeffs()))
                .all(|(t, (lo, hi))| lo <= t && t <= hi)
    }

    /// Componentwise containment of boxes.
    pub fn subset_of(&self, other: &IntervalBox) -> bool {
        other.contains(&self.a) && other.contains(&self.b)
    }
}

/// A = Σ_k L_{z_k} P_k as a real picture: the normal operator with the
/// given spectral data. Since the projections are real, this is exactly
/// Σ_k P_k ⊗ L_{z_k}.
pub fn synth_normal(pvm: &GradedPvm, table: &BasisTable) -> RealPicture {
    assert_eq!(pvm.level(), table.level(), "level mismatch");
    let g = table.dim();
    let n = pvm.dim() * g;
    let mut out = RealMat::zeros(n, n);
    for atom in pvm.atoms() {
        out = out.add(&atom.p.kron(&scalar_left_mat(&atom.z, table)));
    }
    out
}

/// Σ_k L_{f(z_k)} P_k.
pub fn functional_calculus(
    pvm: &GradedPvm,
    table: &BasisTable,
    f: impl Fn(&CdNumber) -> CdNumber,
) -> RealPicture {
    assert_eq!(pvm.level(), table.level(), "level mismatch");
    let g = table.dim();
    let n = pvm.dim() * g;
    let mut out = RealMat::zeros(n, n);
    for atom in pvm.atoms() {
        let w = f(&atom.z);
        assert_eq!(w.level(), pvm.level(), "calculus must preserve the level");
        out = out.add(&atom.p.kron(&scalar_left_mat(&w, table)));
    }
    out
}

/// F(I_{a,b}) = Σ_{z_k ∈ box} P_k, lifted to the full real picture.
pub fn interval_projection(pvm: &GradedPvm, bx: &IntervalBox) -> RealPicture {
    interval_projection_small(pvm, bx).kron(&RealMat::identity(1 << pvm.level()))
}

/// Same projection on the d×d component space.
pub fn interval_projection_small(pvm: &GradedPvm, bx: &IntervalBox) -> RealMat {
    let mut out = RealMat::zeros(pvm.dim(), pvm.dim());
    for atom in pvm.atoms() {
        if bx.contains(&atom.z) {
            out = out.add(&atom.p);
        }
    }
    out
}

/// Commutation report for two measures.
#[derive(Clone, Debug)]
pub struct QuasiPermuteReport {
    /// max over atom pairs of ‖P_k Q_l − Q_l P_k‖_F on the component space.
    pub max_commutator: f64,
    pub pass: bool,
}

/// With real projections the graded commutation law reduces to plain
/// commutation of the component projections (the scalar-lift signs are the
/// anticommutation invariant, checked separately).
pub fn quasi_permute_check(pvm1: &GradedPvm, pvm2: &GradedPvm, tol: f64) -> Result<QuasiPermuteReport> {
    if pvm1.level() != pvm2.level() {
        return Err(Error::LevelMismatch { lhs: pvm1.level(), rhs: pvm2.level() });
    }
    if pvm1.dim() != pvm2.dim() {
        return Err(Error::ShapeMismatch { lhs: pvm1.dim(), rhs: pvm2.dim() });
    }
    let mut worst: f64 = 0.0;
    for a in pvm1.atoms() {
        for b in pvm2.atoms() {
            worst = worst.max(a.p.commutator_norm(&b.p));
        }
    }
    Ok(QuasiPermuteReport { max_commutator: worst, pass: worst <= tol })
}

/// Report for the reduction of an operator by an interval projection.
#[derive(Clone, Debug)]
pub struct ReduceReport {
    /// ‖FB − BF‖_F.
    pub commutation: f64,
    /// Normality residual of the compression FBF (zero off range(F)).
    pub compression_normality: f64,
    pub pass: bool,
}

/// F = F(I_{a,b}) from pvm_a must commute with B, and the compression FBF
/// must be normal on range(F).
pub fn reduce_check(
    pvm_a: &GradedPvm,
    b: &RealPicture,
    bx: &IntervalBox,
    tol: f64,
) -> ReduceReport {
    let f = interval_projection(pvm_a, bx);
    let commutation = f.commutator_norm(b);
    let fbf = f.matmul(b).matmul(&f);
    let compression_normality = crate::linalg::normality_residual(&fbf);
    ReduceReport {
        commutation,
        compression_normality,
        pass: commutation <= tol && compression_normality <= tol,
    }
}

fn columns(m: &RealMat, lo: usize, hi: usize) -> RealMat {
    RealMat::from_fn(m.rows(), hi - lo, |r, c| m.at(r, lo + c))
}

fn write_columns(m: &mut RealMat, lo: usize, block: &RealMat) {
    for r in 0..m.rows() {
        for c in 0..block.cols() {
            m.set(r, lo + c, block.at(r, c));
        }
    }
}

/// Recover the spectral atoms of an operator in the representable class
/// Σ_k L_{z_k} P_k (real projections P_k).
///
/// The 2^v coefficient matrices C_j (with ^jÂ = C_j ⊗ L_{i_j}) of such an
/// operator form a commuting real-symmetric family with C_j = Σ_k z_{k,j}
/// P_k. They are jointly diagonalized — eigendecomposition of a fixed-seed
/// random combination, refined per coordinate inside eigenvalue clusters —
/// and each joint eigenvector contributes its coefficient tuple; columns
/// with values within `tol` merge into one atom. Atoms are returned in
/// lexicographic order of their coefficients.
pub fn spectral_recover(a: &RealPicture, table: &BasisTable, tol: f64) -> Result<GradedPvm> {
    let g = table.dim();
    let v = table.level();
    if !a.is_square() || a.rows() % g != 0 {
        return Err(Error::ShapeMismatch { lhs: a.rows(), rhs: g });
    }
    let d = a.rows() / g;

    let cs: Vec<RealMat> = (0..g).map(|j| coefficient_matrix(a, d, table, j)).collect();

    // Detection: block-representability, symmetry, and commutation of the
    // coefficient family. A nilpotent shift, for instance, shows up as an
    // asymmetric C_j.
    let mut detect: f64 = 0.0;
    {
        let mut sum = RealMat::zeros(d * g, d * g);
        for (j, c) in cs.iter().enumerate() {
            let lj = scalar_left_mat(&CdNumber::basis(v, j).unwrap(), table);
            sum = sum.add(&c.kron(&lj));
            detect = detect.max(c.symmetry_residual());
        }
        detect = detect.max(a.dist(&sum));
    }
    for (j, cj) in cs.iter().enumerate() {
        for ck in &cs[..j] {
            detect = detect.max(cj.commutator_norm(ck));
        }
    }
    if detect > tol {
        return Err(Error::NotRepresentable { residual: detect });
    }

    // Random combination, then per-coordinate refinement within clusters.
    let mut rng = ChaCha12Rng::seed_from_u64(0x5EED_0C75);
    let mut w = RealMat::zeros(d, d);
    for c in &cs {
        w = w.add(&c.scale(rng.gen_range(-1.0..1.0)));
    }
    let gap = |m: &RealMat| tol.max(1e-12) * 10.0 * (1.0 + m.max_abs());
    let (wvals, mut vmat) = jacobi_eigh(&w);

    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    let weps = gap(&w);
    let mut start = 0;
    for c in 1..=d {
        if c == d || wvals[c] - wvals[c - 1] > weps {
            stack.push((start, c, 0));
            start = c;
        }
    }
    while let Some((lo, hi, j)) = stack.pop() {
        if j >= g || hi - lo <= 1 {
            continue;
        }
        let vsub = columns(&vmat, lo, hi);
        let b = vsub.transpose().matmul(&cs[j]).matmul(&vsub);
        let (evals, q) = jacobi_eigh(&b);
        write_columns(&mut vmat, lo, &vsub.matmul(&q));
        let eps = gap(&cs[j]);
        let mut s = 0;
        for c in 1..=(hi - lo) {
            if c == hi - lo || evals[c] - evals[c - 1] > eps {
                stack.push((lo + s, lo + c, j + 1));
                s = c;
            }
        }
    }

    // Joint-diagonalization residual.
    let mut offdiag: f64 = 0.0;
    for c in &cs {
        let m = vmat.transpose().matmul(c).matmul(&vmat);
        let mut off = 0.0;
        for r in 0..d {
            for q in 0..d {
                if r != q {
                    off += m.at(r, q) * m.at(r, q);
                }
            }
        }
        offdiag = offdiag.max(crate::fp::sqrt(off));
    }
    if offdiag > tol {
        return Err(Error::NotRepresentable { residual: offdiag });
    }

    // Per-column coefficient tuples, merged into atoms by ∞-proximity.
    let col_z: Vec<Vec<f64>> = (0..d)
        .map(|c| {
            let vc = vmat.col(c);
            cs.iter()
                .map(|cj| crate::linalg::vec_dot(&vc, &cj.matvec(&vc)))
                .collect()
        })
        .collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Vec<f64>> = Vec::new();
    let merge_tol = tol.max(1e-14);
    for c in 0..d {
        let found = reps.iter().position(|r| {
            r.iter()
                .zip(&col_z[c])
                .all(|(x, y)| (x - y).abs() <= merge_tol)
        });
        match found {
            Some(i) => groups[i].push(c),
            None => {
                reps.push(col_z[c].clone());
                groups.push(vec![c]);
            }
        }
    }

    let mut atoms: Vec<PvmAtom> = groups
        .iter()
        .map(|cols| {
            let mut p = RealMat::zeros(d, d);
            let mut z = vec![0.0; g];
            for &c in cols {
                p.add_outer(&vmat.col(c), 1.0);
                for (zt, ct) in z.iter_mut().zip(&col_z[c]) {
                    *zt += ct;
                }
            }
            for zt in z.iter_mut() {
                *zt /= cols.len() as f64;
            }
            PvmAtom { z: CdNumber::new(v, z).unwrap(), p }
        })
        .collect();
    atoms.sort_by(|x, y| {
        x.z.coeffs()
            .iter()
            .zip(y.z.coeffs())
            .find_map(|(a, b)| a.partial_cmp(b).filter(|o| o.is_ne()))
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let pvm = GradedPvm::new(v, d, atoms)?;
    let round_trip = a.dist(&synth_normal(&pvm, table));
    if round_trip > tol {
        return Err(Error::NotRepresentable { residual: round_trip });
    }
    Ok(pvm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cd::{cd_norm, polar_scalar, Doubling};
    use crate::linalg::{
        compose, is_normal, is_unitary, lift_real, lift_scalar, normality_residual,
        random_orthonormal, vec_dot,
    };

    fn table(v: u8) -> BasisTable {
        BasisTable::new(v, Doubling::Standard).unwrap()
    }

    #[test]
    fn synth_examples() {
        let t = table(2);
        let pvm = GradedPvm::new(
            2,
            3,
            vec![PvmAtom { z: CdNumber::real(2, 1.0), p: RealMat::identity(3) }],
        )
        .unwrap();
        assert_eq!(synth_normal(&pvm, &t), RealMat::identity(12));

        let mut p = RealMat::zeros(2, 2);
        p.set(0, 0, 1.0);
        let q = RealMat::identity(2).sub(&p);
        let i1 = CdNumber::basis(2, 1).unwrap();
        let pvm = GradedPvm::new(
            2,
            2,
            vec![
                PvmAtom { z: i1.clone(), p },
                PvmAtom { z: i1.neg(), p: q },
            ],
        )
        .unwrap();
        let a = synth_normal(&pvm, &t);
        let diag = crate::linalg::AvMatrix::diag(2, vec![i1.clone(), i1.neg()]).unwrap();
        assert_eq!(a, crate::linalg::real_picture(&diag, &t));

        let t3 = table(3);
        let pvm = GradedPvm::random(3, 4, 4, 42).unwrap();
        let a = synth_normal(&pvm, &t3);
        assert!(normality_residual(&a) <= 1e-11);
        // Adjoint is the synthesis over conjugated values.
        let adj = functional_calculus(&pvm, &t3, crate::cd::cd_conj);
        assert_eq!(a.transpose().dist(&adj), 0.0);
    }

    #[test]
    fn pvm_validation() {
        // Non-projection atom is rejected.
        let bad = GradedPvm::new(
            2,
            2,
            vec![PvmAtom { z: CdNumber::real(2, 1.0), p: RealMat::identity(2).scale(0.5) }],
        );
        assert!(matches!(bad, Err(Error::InvalidPvm { .. })));

        // Exactly equal values are merged.
        let mut p = RealMat::zeros(2, 2);
        p.set(0, 0, 1.0);
        let q = RealMat::identity(2).sub(&p);
        let pvm = GradedPvm::new(
            2,
            2,
            vec![
                PvmAtom { z: CdNumber::real(2, 2.0), p },
                PvmAtom { z: CdNumber::real(2, 2.0), p: q },
            ],
        )
        .unwrap();
        assert_eq!(pvm.atoms().len(), 1);
        assert!(pvm.atoms()[0].p.dist(&RealMat::identity(2)) == 0.0);
    }

    #[test]
    fn recover_round_trip() {
        let t = table(3);
        // Identity recovers as the single atom (i_0, I).
        let pvm = spectral_recover(&RealMat::identity(16), &t, 1e-10).unwrap();
        assert_eq!(pvm.atoms().len(), 1);
        assert!(pvm.atoms()[0].z.dist(&CdNumber::real(3, 1.0)) <= 1e-12);
        assert!(pvm.atoms()[0].p.dist(&RealMat::identity(2)) <= 1e-12);

        // Two named atoms.
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let q = random_orthonormal(&mut rng, 4);
        let mut p = RealMat::zeros(4, 4);
        p.add_outer(&q.col(0), 1.0);
        p.add_outer(&q.col(1), 1.0);
        let pc = RealMat::identity(4).sub(&p);
        let mut z1 = CdNumber::real(3, 1.0);
        z1.set_coeff(3, 2.0);
        let z2 = CdNumber::basis(3, 5).unwrap().neg();
        let pvm = GradedPvm::new(
            3,
            4,
            vec![PvmAtom { z: z1.clone(), p }, PvmAtom { z: z2.clone(), p: pc }],
        )
        .unwrap();
        let a = synth_normal(&pvm, &t);
        let rec = spectral_recover(&a, &t, 1e-10).unwrap();
        assert_eq!(rec.atoms().len(), 2);
        // Canonical order: z2 = −i_5 sorts before z1 = 1 + 2i_3.
        assert!(rec.atoms()[0].z.dist(&z2) <= 1e-10);
        assert!(rec.atoms()[1].z.dist(&z1) <= 1e-10);
        assert!(rec.atoms()[1].p.dist(&pvm.atoms()[0].p) <= 1e-10);
        assert!(synth_normal(&rec, &t).dist(&a) <= 1e-11);
    }

    #[test]
    fn recover_rejects_nilpotent() {
        let t = table(1);
        let shift = RealMat::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        match spectral_recover(&shift, &t, 1e-10) {
            Err(Error::NotRepresentable { residual }) => assert!(residual >= 0.5),
            other => panic!("expected NotRepresentable, got {other:?}"),
        }
    }

    #[test]
    fn recover_seeded_round_trips() {
        for v in [2u8, 3] {
            let t = table(v);
            for seed in 0..10u64 {
                let d = 2 + (seed as usize % 7);
                let n_atoms = 1 + (seed as usize % d);
                let pvm = GradedPvm::random(v, d, n_atoms, 1000 + seed).unwrap();
                let a = synth_normal(&pvm, &t);
                let rec = spectral_recover(&a, &t, 1e-10).unwrap();
                assert_eq!(rec.atoms().len(), pvm.atoms().len());
                // Match canonical order against sorted originals.
                let mut orig: Vec<_> = pvm.atoms().to_vec();
                orig.sort_by(|x, y| {
                    x.z.coeffs()
                        .iter()
                        .zip(y.z.coeffs())
                        .find_map(|(a, b)| a.partial_cmp(b).filter(|o| o.is_ne()))
                        .unwrap_or(core::cmp::Ordering::Equal)
                });
                for (r, o) in rec.atoms().iter().zip(&orig) {
                    assert!(r.z.dist(&o.z) <= 1e-10, "v={v} seed={seed}");
                    assert!(r.p.dist(&o.p) <= 1e-10, "v={v} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn functional_calculus_examples() {
        let t = table(3);
        let pvm = GradedPvm::random(3, 5, 3, 7).unwrap();
        let a = synth_normal(&pvm, &t);
        assert_eq!(functional_calculus(&pvm, &t, |z| z.clone()), a);

        let modulus = functional_calculus(&pvm, &t, |z| CdNumber::real(3, cd_norm(z)));
        assert_eq!(modulus.symmetry_residual(), 0.0);
        let (evals, _) = jacobi_eigh(&modulus);
        for e in evals {
            let hit = pvm
                .atoms()
                .iter()
                .any(|atom| (cd_norm(&atom.z) - e).abs() <= 1e-10);
            assert!(hit, "eigenvalue {e} is some |z_k|");
        }

        let phase = functional_calculus(&pvm, &t, |z| polar_scalar(z).1);
        assert!(is_unitary(&phase, 1e-10));

        // Positive operator contract: Re⟨|A|x; x⟩ ≥ 0.
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(vec_dot(&x, &modulus.matvec(&x)) >= -1e-10);
        }
    }

    #[test]
    fn calculus_homomorphism_in_a_plane() {
        // All atom values in ℝ ⊕ ℝμ: calculus over pointwise products
        // matches composition.
        let t = table(3);
        let mu = CdNumber::basis(3, 6).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let projections = random_projection_split(&mut rng, 5, 3);
        let atoms: Vec<PvmAtom> = projections
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut z = CdNumber::real(3, i as f64 + 0.5);
                z = z.add(&mu.scale(1.0 - i as f64));
                PvmAtom { z, p }
            })
            .collect();
        let pvm = GradedPvm::new(3, 5, atoms).unwrap();
        let f = |z: &CdNumber| crate::cd::cd_mul(z, z, Doubling::Standard).unwrap();
        let g = crate::cd::cd_conj;
        let fg = |z: &CdNumber| {
            crate::cd::cd_mul(&f(z), &g(z), Doubling::Standard).unwrap()
        };
        let lhs = functional_calculus(&pvm, &t, fg);
        let rhs = compose(
            &functional_calculus(&pvm, &t, f),
            &functional_calculus(&pvm, &t, g),
        );
        assert!(lhs.dist(&rhs) <= 1e-11);
    }

    #[test]
    fn interval_projection_examples() {
        let pvm = GradedPvm::random(2, 4, 3, 5).unwrap();
        let all = IntervalBox::saturated(2, 10.0);
        assert!(interval_projection(&pvm, &all).dist(&RealMat::identity(16)) <= 1e-12);

        let far = IntervalBox::new(
            CdNumber::real(2, 50.0),
            CdNumber::real(2, 60.0),
        )
        .unwrap();
        assert_eq!(interval_projection(&pvm, &far).frob(), 0.0);

        // Saturation at n ≥ max |z_{k,j}| is forced.
        let n = pvm
            .atoms()
            .iter()
            .flat_map(|a| a.z.coeffs().iter())
            .fold(0.0f64, |m, &c| m.max(c.abs()));
        let bx = IntervalBox::saturated(2, n);
        assert!(interval_projection(&pvm, &bx).dist(&RealMat::identity(16)) <= 1e-12);

        // Monotone saturation: box1 ⊆ box2 ⇒ range inclusion.
        let small = IntervalBox::saturated(2, 1.0);
        let big = IntervalBox::saturated(2, 2.5);
        assert!(small.subset_of(&big));
        let f1 = interval_projection(&pvm, &small);
        let f2 = interval_projection(&pvm, &big);
        assert!(f2.matmul(&f1).dist(&f1) <= 1e-12);

        assert!(IntervalBox::new(CdNumber::real(2, 1.0), CdNumber::real(2, 0.0)).is_err());
    }

    #[test]
    fn quasi_permute_examples() {
        let pvm = GradedPvm::random(2, 4, 2, 11).unwrap();
        let r = quasi_permute_check(&pvm, &pvm, 1e-12).unwrap();
        assert!(r.max_commutator <= 1e-14);
        assert!(r.pass);

        // Common eigenbasis, different groupings.
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let q = random_orthonormal(&mut rng, 4);
        let mk = |cols: &[usize], z: f64| {
            let mut p = RealMat::zeros(4, 4);
            for &c in cols {
                p.add_outer(&q.col(c), 1.0);
            }
            PvmAtom { z: CdNumber::real(2, z), p }
        };
        let pvm1 = GradedPvm::new(2, 4, vec![mk(&[0], 1.0), mk(&[1, 2, 3], 2.0)]).unwrap();
        let pvm2 = GradedPvm::new(2, 4, vec![mk(&[0, 1], 5.0), mk(&[2, 3], 7.0)]).unwrap();
        let r = quasi_permute_check(&pvm1, &pvm2, 1e-12).unwrap();
        assert!(r.pass, "residual {}", r.max_commutator);

        // 45° projections do not commute.
        let mut p = RealMat::zeros(2, 2);
        p.set(0, 0, 1.0);
        let h = RealMat::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let pa = GradedPvm::new(
            2,
            2,
            vec![mk2(p.clone(), 1.0), mk2(RealMat::identity(2).sub(&p), 2.0)],
        )
        .unwrap();
        let pb = GradedPvm::new(
            2,
            2,
            vec![mk2(h.clone(), 1.0), mk2(RealMat::identity(2).sub(&h), 2.0)],
        )
        .unwrap();
        let r = quasi_permute_check(&pa, &pb, 1e-12).unwrap();
        assert!(!r.pass);
        assert!((r.max_commutator - 0.5f64.sqrt()).abs() <= 1e-15);
    }

    fn mk2(p: RealMat, z: f64) -> PvmAtom {
        PvmAtom { z: CdNumber::real(2, z), p }
    }

    #[test]
    fn reduce_check_examples() {
        let t = table(2);
        let pvm = GradedPvm::random(2, 4, 3, 17).unwrap();
        let b = synth_normal(&pvm, &t);
        assert!(is_normal(&b, 1e-11));
        // Any box: shared atoms always reduce.
        let bx = IntervalBox::saturated(2, 1.0);
        let r = reduce_check(&pvm, &b, &bx, 1e-10);
        assert!(r.pass, "commutation {} normality {}", r.commutation, r.compression_normality);

        // Rotated eigenbasis does not reduce.
        let other = GradedPvm::random(2, 4, 3, 18).unwrap();
        let c = synth_normal(&other, &t);
        // Pick a box containing some but not all atoms of pvm.
        let z0 = &pvm.atoms()[0].z;
        let bx = IntervalBox::new(
            CdNumber::new(2, z0.coeffs().iter().map(|t| t - 1e-6).collect()).unwrap(),
            CdNumber::new(2, z0.coeffs().iter().map(|t| t + 1e-6).collect()).unwrap(),
        )
        .unwrap();
        let r = reduce_check(&pvm, &c, &bx, 1e-10);
        assert!(!r.pass);
        assert!(r.commutation > 1e-3);
    }

    #[test]
    fn lifted_synth_matches_compose_form() {
        let t = table(3);
        let pvm = GradedPvm::random(3, 3, 2, 23).unwrap();
        let a = synth_normal(&pvm, &t);
        let mut alt = RealMat::zeros(24, 24);
        for atom in pvm.atoms() {
            alt = alt.add(&compose(
                &lift_scalar(&atom.z, 3, &t),
                &lift_real(&atom.p, 8),
            ));
        }
        assert_eq!(a.dist(&alt), 0.0);
    }
}
