//! Ω-parameterized operator semigroups B^x = Σ_k a_k^x · L_{exp(μ_k, θ_k(x))} P_k,
//! their polar/power/kernel structure, generator recovery from sampled
//! one-parameter unitary groups, and continuity/convexity probes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::cd::{cd_norm, exp_pure, BasisTable, CdNumber};
use crate::fp;
use crate::linalg::{
    compose, jacobi_eigh, projection_residual, random_projection_split, scalar_left_mat,
    unitary_residual, vec_dot, RealMat, RealPicture,
};
use crate::spectral::spectral_recover;
use crate::{Error, Result};

/// Parameter point of the mixed cone Ω: the first `m` coordinates are
/// non-negative integers, the rest non-negative reals, not all zero.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaPoint {
    m: usize,
    n: usize,
    x: Vec<f64>,
}

impl OmegaPoint {
    pub fn new(m: usize, n: usize, x: Vec<f64>) -> Result<OmegaPoint> {
        if m > n || n == 0 {
            return Err(Error::BadSpec("need 0 ≤ m ≤ n, n ≥ 1"));
        }
        if x.len() != n {
            return Err(Error::ShapeMismatch { lhs: x.len(), rhs: n });
        }
        let mut sum = 0.0;
        for (j, &c) in x.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::NotInOmega);
            }
            if j < m && fp::floor(c) != c {
                return Err(Error::NotInOmega);
            }
            sum += c;
        }
        if sum <= 0.0 {
            return Err(Error::NotInOmega);
        }
        Ok(OmegaPoint { m, n, x })
    }

    /// Unit point e_s.
    pub fn unit(m: usize, n: usize, s: usize) -> Result<OmegaPoint> {
        if s >= n {
            return Err(Error::IndexOutOfRange { idx: s, dim: n });
        }
        let mut x = vec![0.0; n];
        x[s] = 1.0;
        OmegaPoint::new(m, n, x)
    }

    /// Componentwise sum; Ω is closed under addition.
    pub fn add(&self, rhs: &OmegaPoint) -> Result<OmegaPoint> {
        if self.m != rhs.m || self.n != rhs.n {
            return Err(Error::ShapeMismatch { lhs: self.n, rhs: rhs.n });
        }
        let x = self.x.iter().zip(&rhs.x).map(|(a, b)| a + b).collect();
        OmegaPoint::new(self.m, self.n, x)
    }

    pub fn scale_coord(&self, s: usize, t: f64) -> Result<OmegaPoint> {
        if s >= self.n {
            return Err(Error::IndexOutOfRange { idx: s, dim: self.n });
        }
        let mut x = self.x.clone();
        x[s] += t;
        OmegaPoint::new(self.m, self.n, x)
    }

    pub fn discrete_count(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }
}

/// One spectral atom of the semigroup: projection P, per-coordinate scales
/// a ≥ 0, frequencies b, a pure unit direction μ and per-coordinate signs
/// s so the effective direction of coordinate j is s_j·μ.
#[derive(Clone, Debug)]
pub struct SemigroupAtom {
    pub p: RealMat,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mu: CdNumber,
    pub s: Vec<i8>,
}

#[derive(Clone, Debug)]
pub struct SemigroupSpec {
    v: u8,
    d: usize,
    m: usize,
    n: usize,
    atoms: Vec<SemigroupAtom>,
}

impl SemigroupSpec {
    pub fn new(v: u8, d: usize, m: usize, n: usize, atoms: Vec<SemigroupAtom>) -> Result<Self> {
        if v == 0 || v > 3 {
            return Err(Error::UnsupportedLevel { v });
        }
        if m > n || n == 0 || d == 0 {
            return Err(Error::BadSpec("need 0 ≤ m ≤ n, n ≥ 1, d ≥ 1"));
        }
        if atoms.is_empty() {
            return Err(Error::BadSpec("need at least one atom"));
        }
        for atom in &atoms {
            if atom.p.rows() != d || atom.p.cols() != d {
                return Err(Error::ShapeMismatch { lhs: atom.p.rows(), rhs: d });
            }
            if atom.a.len() != n || atom.b.len() != n || atom.s.len() != n {
                return Err(Error::BadSpec("per-coordinate data must have length n"));
            }
            if atom.a.iter().any(|&a| !a.is_finite() || a < 0.0) {
                return Err(Error::BadSpec("scales must be non-negative"));
            }
            if atom.b.iter().any(|&b| !b.is_finite()) {
                return Err(Error::BadSpec("frequencies must be finite"));
            }
            if atom.s.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::BadSpec("direction signs must be ±1"));
            }
            if atom.mu.level() != v {
                return Err(Error::LevelMismatch { lhs: atom.mu.level(), rhs: v });
            }
            if fp::abs(cd_norm(&atom.mu) - 1.0) > 1e-12 || fp::abs(atom.mu.re()) > 1e-12 {
                return Err(Error::NotPureUnit);
            }
            if atom.p.frob() < 0.5 {
                return Err(Error::BadSpec("zero projection atom"));
            }
        }
        // Resolution of identity; also rejects repeated projections, whose
        // pairwise product cannot vanish.
        let mut residual: f64 = 0.0;
        let mut total = RealMat::zeros(d, d);
        for atom in &atoms {
            residual = residual.max(projection_residual(&atom.p));
            total = total.add(&atom.p);
        }
        residual = residual.max(total.dist(&RealMat::identity(d)));
        for (k, ak) in atoms.iter().enumerate() {
            for al in atoms.iter().skip(k + 1) {
                residual = residual.max(ak.p.matmul(&al.p).frob());
            }
        }
        if residual > 1e-10 {
            return Err(Error::InvalidPvm { residual });
        }
        Ok(SemigroupSpec { v, d, m, n, atoms })
    }

    /// Seeded random spec on an orthogonal projection split: scales in
    /// [0.25, 2], frequencies in [−2.4, 2.4], random pure unit directions.
    pub fn random(v: u8, d: usize, m: usize, n: usize, n_atoms: usize, seed: u64) -> Result<Self> {
        if n_atoms == 0 || n_atoms > d {
            return Err(Error::BadSpec("need 1 ≤ atoms ≤ dim"));
        }
        if v == 0 || v > 3 {
            return Err(Error::UnsupportedLevel { v });
        }
        let g = 1usize << v;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let projections = random_projection_split(&mut rng, d, n_atoms);
        let atoms = projections
            .into_iter()
            .map(|p| {
                let a = (0..n).map(|_| rng.gen_range(0.25..2.0)).collect();
                let b = (0..n).map(|_| rng.gen_range(-2.4..2.4)).collect();
                let s = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
                let mu = loop {
                    let mut c = vec![0.0; g];
                    for cj in c.iter_mut().skip(1) {
                        *cj = rng.gen_range(-1.0..1.0);
                    }
                    let z = CdNumber::new(v, c).unwrap();
                    let norm = cd_norm(&z);
                    if norm > 1e-3 {
                        break z.scale(1.0 / norm);
                    }
                };
                SemigroupAtom { p, a, b, mu, s }
            })
            .collect();
        SemigroupSpec::new(v, d, m, n, atoms)
    }

    pub fn level(&self) -> u8 {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn discrete_count(&self) -> usize {
        self.m
    }

    pub fn n_coords(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[SemigroupAtom] {
        &self.atoms
    }

    fn check_point(&self, x: &OmegaPoint) -> Result<()> {
        if x.discrete_count() != self.m || x.len() != self.n {
            return Err(Error::ShapeMismatch { lhs: x.len(), rhs: self.n });
        }
        Ok(())
    }

    fn check_table(&self, table: &BasisTable) -> Result<()> {
        if table.level() != self.v {
            return Err(Error::LevelMismatch { lhs: table.level(), rhs: self.v });
        }
        Ok(())
    }
}

fn atom_scale(atom: &SemigroupAtom, x: &OmegaPoint) -> f64 {
    atom.a
        .iter()
        .zip(x.coords())
        .fold(1.0, |acc, (&a, &xs)| acc * fp::pow_conv(a, xs))
}

fn atom_angle(atom: &SemigroupAtom, x: &OmegaPoint) -> f64 {
    atom.b
        .iter()
        .zip(&atom.s)
        .zip(x.coords())
        .map(|((&b, &s), &xs)| f64::from(s) * xs * b)
        .sum()
}

/// B^x = Σ_k (Π_s a_{k,s}^{x_s}) · P_k ⊗ L_{exp(μ_k, Σ_s s_{k,s}x_s b_{k,s})},
/// with the 0^0 = 1 convention so x_s = 0 deactivates a coordinate.
pub fn eval_semigroup(spec: &SemigroupSpec, x: &OmegaPoint, table: &BasisTable) -> Result<RealPicture> {
    spec.check_point(x)?;
    spec.check_table(table)?;
    let g = table.dim();
    let nf = spec.d * g;
    let mut out = RealMat::zeros(nf, nf);
    for atom in &spec.atoms {
        let scale = atom_scale(atom, x);
        if scale == 0.0 {
            continue;
        }
        let w = exp_pure(&atom.mu, atom_angle(atom, x))?;
        out = out.add(&atom.p.kron(&scalar_left_mat(&w, table)).scale(scale));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub max_residual: f64,
    pub pass: bool,
}

/// max ‖B^x B^y − B^{x+y}‖ over the sampled pairs.
pub fn verify_semigroup_law(
    spec: &SemigroupSpec,
    pairs: &[(OmegaPoint, OmegaPoint)],
    tol: f64,
    table: &BasisTable,
) -> Result<LawReport> {
    let mut max_residual: f64 = 0.0;
    for (x, y) in pairs {
        let bx = eval_semigroup(spec, x, table)?;
        let by = eval_semigroup(spec, y, table)?;
        let bxy = eval_semigroup(spec, &x.add(y)?, table)?;
        max_residual = max_residual.max(compose(&bx, &by).dist(&bxy));
    }
    Ok(LawReport { max_residual, pass: max_residual <= tol })
}

/// Factorization B^x = T^x U^x = U^x T^x into the positive scale part and
/// the unitary phase part.
#[derive(Clone, Debug)]
pub struct SemigroupPolar {
    pub t: RealPicture,
    pub u: RealPicture,
}

pub fn polar_semigroup(spec: &SemigroupSpec, x: &OmegaPoint, table: &BasisTable) -> Result<SemigroupPolar> {
    spec.check_point(x)?;
    spec.check_table(table)?;
    let g = table.dim();
    let nf = spec.d * g;
    let id_g = RealMat::identity(g);
    let mut t = RealMat::zeros(nf, nf);
    let mut u = RealMat::zeros(nf, nf);
    for atom in &spec.atoms {
        t = t.add(&atom.p.kron(&id_g).scale(atom_scale(atom, x)));
        let w = exp_pure(&atom.mu, atom_angle(atom, x))?;
        u = u.add(&atom.p.kron(&scalar_left_mat(&w, table)));
    }
    Ok(SemigroupPolar { t, u })
}

/// A^p = Σ_k (Π_s a_{k,s}^{p_s}) P_k ⊗ I; coincides with T^p.
pub fn power_operator(spec: &SemigroupSpec, p: &OmegaPoint, table: &BasisTable) -> Result<RealPicture> {
    spec.check_point(p)?;
    spec.check_table(table)?;
    let g = table.dim();
    let nf = spec.d * g;
    let id_g = RealMat::identity(g);
    let mut out = RealMat::zeros(nf, nf);
    for atom in &spec.atoms {
        out = out.add(&atom.p.kron(&id_g).scale(atom_scale(atom, p)));
    }
    Ok(out)
}

/// (N, K): N spans the atoms with a_{k,s} = 0 — the kernel of B^{e_s} for
/// a continuous coordinate — and K = I − N its complement.
pub fn kernel_split(spec: &SemigroupSpec, s: usize, table: &BasisTable) -> Result<(RealPicture, RealPicture)> {
    if s >= spec.n {
        return Err(Error::IndexOutOfRange { idx: s, dim: spec.n });
    }
    spec.check_table(table)?;
    let g = table.dim();
    let nf = spec.d * g;
    let id_g = RealMat::identity(g);
    let mut n_proj = RealMat::zeros(nf, nf);
    for atom in &spec.atoms {
        if atom.a[s] == 0.0 {
            n_proj = n_proj.add(&atom.p.kron(&id_g));
        }
    }
    let k_proj = RealMat::identity(nf).sub(&n_proj);
    Ok((n_proj, k_proj))
}

/// Projector of the scale measure over the box [lo, hi] ⊂ ℝ^n (d×d).
/// Boxes reaching below zero in any coordinate select nothing, since every
/// scale vector is non-negative.
pub fn scale_box_projector(spec: &SemigroupSpec, lo: &[f64], hi: &[f64]) -> Result<RealMat> {
    if lo.len() != spec.n || hi.len() != spec.n {
        return Err(Error::ShapeMismatch { lhs: lo.len().max(hi.len()), rhs: spec.n });
    }
    let mut out = RealMat::zeros(spec.d, spec.d);
    for atom in &spec.atoms {
        let inside = atom
            .a
            .iter()
            .zip(lo.iter().zip(hi))
            .all(|(&a, (&l, &h))| l <= a && a <= h);
        if inside {
            out = out.add(&atom.p);
        }
    }
    Ok(out)
}

/// Evaluates B^x through the product of per-coordinate resolutions: atoms
/// are grouped per coordinate by identical (a_s, s_s·b_s, μ) data, the
/// joint projections are rebuilt as products of the marginals, and the
/// atom-scale sum runs over the nonempty intersections. Agrees with
/// [`eval_semigroup`] up to roundoff.
pub fn resolution_product_eval(
    spec: &SemigroupSpec,
    x: &OmegaPoint,
    table: &BasisTable,
) -> Result<RealPicture> {
    spec.check_point(x)?;
    spec.check_table(table)?;
    struct Class {
        a: f64,
        omega: f64,
        members: Vec<usize>,
        proj: RealMat,
    }
    let key_match = |spec: &SemigroupSpec, k: usize, c: &Class, s: usize| {
        let atom = &spec.atoms[k];
        atom.a[s] == c.a
            && f64::from(atom.s[s]) * atom.b[s] == c.omega
            && atom.mu == spec.atoms[c.members[0]].mu
    };
    let mut per_coord: Vec<Vec<Class>> = Vec::with_capacity(spec.n);
    for s in 0..spec.n {
        let mut classes: Vec<Class> = Vec::new();
        for (k, atom) in spec.atoms.iter().enumerate() {
            if let Some(c) = classes.iter_mut().find(|c| key_match(spec, k, c, s)) {
                c.members.push(k);
                c.proj = c.proj.add(&atom.p);
            } else {
                classes.push(Class {
                    a: atom.a[s],
                    omega: f64::from(atom.s[s]) * atom.b[s],
                    members: vec![k],
                    proj: atom.p.clone(),
                });
            }
        }
        per_coord.push(classes);
    }

    let g = table.dim();
    let nf = spec.d * g;
    let mut out = RealMat::zeros(nf, nf);
    // Odometer over one class choice per coordinate.
    let mut choice = vec![0usize; spec.n];
    loop {
        let mut members: Vec<usize> = per_coord[0][choice[0]].members.clone();
        for s in 1..spec.n {
            members.retain(|k| per_coord[s][choice[s]].members.contains(k));
        }
        if !members.is_empty() {
            let mut f_small = per_coord[0][choice[0]].proj.clone();
            for s in 1..spec.n {
                f_small = f_small.matmul(&per_coord[s][choice[s]].proj);
            }
            let mut scale = 1.0;
            let mut theta = 0.0;
            for s in 0..spec.n {
                let c = &per_coord[s][choice[s]];
                scale *= fp::pow_conv(c.a, x.coords()[s]);
                theta += c.omega * x.coords()[s];
            }
            if scale != 0.0 {
                let w = exp_pure(&spec.atoms[members[0]].mu, theta)?;
                out = out.add(&f_small.kron(&scalar_left_mat(&w, table)).scale(scale));
            }
        }
        // Advance the odometer.
        let mut s = 0;
        loop {
            choice[s] += 1;
            if choice[s] < per_coord[s].len() {
                break;
            }
            choice[s] = 0;
            s += 1;
            if s == spec.n {
                return Ok(out);
            }
        }
    }
}

/// One recovered spectral atom of a one-parameter group generator.
#[derive(Clone, Debug)]
pub struct RecoveredAtom {
    pub p: RealMat,
    pub b: f64,
    pub mu: CdNumber,
}

#[derive(Clone, Debug)]
pub struct StoneRecovery {
    pub atoms: Vec<RecoveredAtom>,
    /// Sampling step used for fitting (the smallest sampled t).
    pub h: f64,
    /// max b_k·h: distance to the π principal-branch boundary.
    pub max_angle: f64,
    /// max ‖U_t − Û_t‖ over the samples not used for fitting.
    pub held_out_residual: f64,
}

/// Recovers generator data (P_k, b_k ≥ 0, μ_k) from samples (t, U_t) of a
/// one-parameter unitary group, fitting on the earliest sample via the
/// principal logarithm on rotation planes and holding the rest out for
/// validation. Requires max|b_k|·h < π; at or past the branch boundary the
/// recovery aborts with [`Error::Aliasing`] and a smaller step must be
/// sampled.
pub fn stone_recover(
    samples: &[(f64, RealPicture)],
    table: &BasisTable,
    tol: f64,
) -> Result<StoneRecovery> {
    let v = table.level();
    if v == 0 || v > 3 {
        return Err(Error::UnsupportedLevel { v });
    }
    if samples.len() < 2 {
        return Err(Error::BadSpec("need at least two samples"));
    }
    let g = table.dim();
    let nf = samples[0].1.rows();
    if nf == 0 || nf % g != 0 {
        return Err(Error::ShapeMismatch { lhs: nf, rhs: g });
    }
    for (t, u) in samples {
        if !t.is_finite() || *t <= 0.0 {
            return Err(Error::BadSpec("sample times must be positive"));
        }
        if u.rows() != nf || u.cols() != nf {
            return Err(Error::ShapeMismatch { lhs: u.rows(), rhs: nf });
        }
        let res = unitary_residual(u);
        if res > 1e-8 {
            return Err(Error::NotUnitary { residual: res });
        }
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| {
        samples[i].0.partial_cmp(&samples[j].0).unwrap_or(core::cmp::Ordering::Equal)
    });
    let fit = order[0];
    let h = samples[fit].0;
    let u0 = &samples[fit].1;

    // Split U_h = Σ cos(θ_k)·P_k⊗I + sin(θ_k)·P_k⊗L_{μ_k} into its
    // symmetric (cosine) and skew (sine) parts.
    let u0t = u0.transpose();
    let c_part = u0.add(&u0t).scale(0.5);
    let k_part = u0.sub(&u0t).scale(0.5);

    let (evals, vecs) = jacobi_eigh(&c_part);
    // Cluster the cosine spectrum; each cluster is one rotation angle.
    let gap = 1e-7;
    let mut s_gen = RealMat::zeros(nf, nf);
    let mut start = 0;
    while start < nf {
        let mut stop = start + 1;
        while stop < nf && evals[stop] - evals[stop - 1] <= gap {
            stop += 1;
        }
        let cluster: Vec<usize> = (start..stop).collect();
        let c_mean = cluster.iter().map(|&i| evals[i]).sum::<f64>() / cluster.len() as f64;
        let s_val = fp::sqrt((1.0 - c_mean * c_mean).max(0.0));
        if s_val <= 1e-8 {
            if c_mean < 0.0 {
                // cos θ = −1: exactly at the branch boundary.
                return Err(Error::Aliasing { theta_max: PI, step: h });
            }
            // θ = 0: stationary block contributes nothing to the generator.
        } else {
            let theta = fp::atan2(s_val, c_mean);
            if theta >= PI * (1.0 - 1e-3) {
                return Err(Error::Aliasing { theta_max: theta, step: h });
            }
            let mut proj = RealMat::zeros(nf, nf);
            for &i in &cluster {
                proj.add_outer(&vecs.col(i), 1.0);
            }
            let restricted = proj.matmul(&k_part).matmul(&proj);
            s_gen = s_gen.add(&restricted.scale(theta / (h * s_val)));
        }
        start = stop;
    }

    // The generator is a representable normal operator with purely
    // imaginary spectral values b_k·μ_k.
    let pvm = spectral_recover(&s_gen, table, tol.max(1e-10))?;
    let mut atoms = Vec::with_capacity(pvm.atoms().len());
    let mut max_angle: f64 = 0.0;
    for atom in pvm.atoms() {
        let norm = cd_norm(&atom.z);
        let (b, mu) = if norm <= 1e-9 {
            (0.0, CdNumber::basis(v, 1)?)
        } else {
            // Project out roundoff in the real part before normalizing.
            let mut z = atom.z.clone();
            z.set_coeff(0, 0.0);
            let pure_norm = cd_norm(&z);
            (norm, z.scale(1.0 / pure_norm))
        };
        max_angle = max_angle.max(b * h);
        atoms.push(RecoveredAtom { p: atom.p.clone(), b, mu });
    }

    let reconstruct = |t: f64| -> Result<RealPicture> {
        let mut out = RealMat::zeros(nf, nf);
        for atom in &atoms {
            let w = exp_pure(&atom.mu, t * atom.b)?;
            out = out.add(&atom.p.kron(&scalar_left_mat(&w, table)));
        }
        Ok(out)
    };
    let mut held_out_residual: f64 = 0.0;
    for &i in order.iter().skip(1) {
        let (t, u) = &samples[i];
        held_out_residual = held_out_residual.max(reconstruct(*t)?.dist(u));
    }
    if held_out_residual > tol {
        return Err(Error::Aliasing { theta_max: max_angle, step: h });
    }
    Ok(StoneRecovery { atoms, h, max_angle, held_out_residual })
}

/// Evaluation line for the probes: base + t·e_coord, t on [lo, hi].
#[derive(Clone, Debug)]
pub struct ProbeGrid {
    pub base: OmegaPoint,
    pub coord: usize,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    /// Max adjacent jump of ⟨B^x f; g⟩ at the coarse grid.
    pub jump_coarse: f64,
    /// Same at double resolution; must contract for a continuous pairing.
    pub jump_fine: f64,
    pub continuity_ok: bool,
    /// min over fine-grid triples of q(lo)q(hi)(1+1e−10) − q(mid)².
    pub convexity_margin: f64,
    pub convexity_ok: bool,
    /// The inequality is verified with the left side squared; the
    /// unsquared variant is not implied for norms below one.
    pub squared_form_flagged: bool,
    pub gram_min_eigenvalue: f64,
    pub gram_ok: bool,
    pub pass: bool,
}

/// Continuity contrast, squared log-convexity of q(y) = ‖B^y f‖, and
/// positive semidefiniteness of the Gram matrix Re⟨B^{y_i}f; B^{y_j}f⟩
/// along a one-coordinate line through Ω.
pub fn continuity_and_convexity_probe(
    spec: &SemigroupSpec,
    f: &[f64],
    g_vec: &[f64],
    grid: &ProbeGrid,
    table: &BasisTable,
) -> Result<ProbeReport> {
    spec.check_point(&grid.base)?;
    spec.check_table(table)?;
    let nf = spec.d * table.dim();
    if f.len() != nf || g_vec.len() != nf {
        return Err(Error::ShapeMismatch { lhs: f.len().max(g_vec.len()), rhs: nf });
    }
    if grid.coord < spec.m || grid.coord >= spec.n {
        return Err(Error::BadSpec("probe coordinate must be continuous"));
    }
    if !(grid.lo >= 0.0 && grid.hi > grid.lo && grid.count >= 3) {
        return Err(Error::BadSpec("need 0 ≤ lo < hi and at least 3 grid points"));
    }

    let images = |count: usize| -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let t = grid.lo + (grid.hi - grid.lo) * i as f64 / (count - 1) as f64;
            let x = grid.base.scale_coord(grid.coord, t)?;
            out.push(eval_semigroup(spec, &x, table)?.matvec(f));
        }
        Ok(out)
    };

    let pair = |u: &[f64]| vec_dot(u, g_vec);
    let coarse = images(grid.count)?;
    let fine = images(2 * grid.count - 1)?;
    let max_jump = |vals: &[Vec<f64>]| {
        vals.windows(2)
            .map(|w| fp::abs(pair(&w[1]) - pair(&w[0])))
            .fold(0.0f64, f64::max)
    };
    let jump_coarse = max_jump(&coarse);
    let jump_fine = max_jump(&fine);
    let continuity_ok = jump_fine <= 0.75 * jump_coarse + 1e-12;

    let q: Vec<f64> = fine.iter().map(|u| fp::sqrt(vec_dot(u, u))).collect();
    let mut convexity_margin = f64::INFINITY;
    for w in q.windows(3) {
        let margin = w[0] * w[2] * (1.0 + 1e-10) - w[1] * w[1];
        convexity_margin = convexity_margin.min(margin);
    }
    let convexity_ok = convexity_margin >= -1e-12;

    let mut gram = RealMat::zeros(coarse.len(), coarse.len());
    for (i, ui) in coarse.iter().enumerate() {
        for (j, uj) in coarse.iter().enumerate() {
            gram.set(i, j, vec_dot(ui, uj));
        }
    }
    let (gram_evals, _) = jacobi_eigh(&gram);
    let gram_min_eigenvalue = gram_evals.first().copied().unwrap_or(0.0);
    let gram_ok = gram_min_eigenvalue >= -1e-10;

    Ok(ProbeReport {
        jump_coarse,
        jump_fine,
        continuity_ok,
        convexity_margin,
        convexity_ok,
        squared_form_flagged: true,
        gram_min_eigenvalue,
        gram_ok,
        pass: continuity_ok && convexity_ok && gram_ok,
    })
}
