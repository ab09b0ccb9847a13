//! Seeded verification suites behind `verify`, `stone verify`, and
//! `report`. Every suite is a pure function of its config, merges its
//! residuals in seed order, and reports the worst case, so identical
//! invocations serialize to identical bytes.

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use octospec_core::cd::{cd_norm, kappa, sedenion_zero_divisor, BasisTable, CdNumber, Doubling};
use octospec_core::factor::{
    calibrate_theorem5, check_property_p, verify_corollary6, verify_lemma7, verify_theorem5_eq1,
    verify_theorem5_eq2, CalibrationReport, ConventionSpec, PropertyPTriple,
};
use octospec_core::linalg::{compose, RealPicture};
use octospec_core::spectral::{spectral_recover, synth_normal, GradedPvm, IntervalBox};
use octospec_core::stone::{
    continuity_and_convexity_probe, eval_semigroup, kernel_split, polar_semigroup, power_operator,
    scale_box_projector, stone_recover, verify_semigroup_law, OmegaPoint, ProbeGrid,
    SemigroupAtom, SemigroupSpec,
};

use crate::dto::Report;

pub const REGISTRY: &[&str] = &[
    "algebra",
    "spectral",
    "theorem5",
    "lemma2",
    "corollary6",
    "lemma7",
    "property-p",
    "semigroup",
    "stone-recovery",
    "probes",
];

pub fn registered(name: &str) -> Result<()> {
    if REGISTRY.contains(&name) {
        Ok(())
    } else {
        bail!("unknown suite `{name}`; registered: {}", REGISTRY.join(", "));
    }
}

fn table(v: u8) -> BasisTable {
    BasisTable::new(v, Doubling::Standard).unwrap()
}

fn random_cd(rng: &mut ChaCha12Rng, v: u8) -> CdNumber {
    let g = 1usize << v;
    CdNumber::new(v, (0..g).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
}

/// Parameter point with coordinates small enough that semigroup scales
/// stay O(10²) and absolute tolerances remain meaningful.
fn bounded_point(rng: &mut ChaCha12Rng, m: usize, n: usize) -> OmegaPoint {
    let mut coords: Vec<f64> = Vec::with_capacity(n);
    for s in 0..n {
        if s < m {
            coords.push(rng.gen_range(0..3) as f64);
        } else {
            coords.push(rng.gen_range(0.0..1.2f64));
        }
    }
    if coords.iter().sum::<f64>() <= 0.0 {
        coords[n - 1] = if m == n { 1.0 } else { 0.5 };
    }
    OmegaPoint::new(m, n, coords).unwrap()
}

fn pure_unit(rng: &mut ChaCha12Rng, v: u8) -> CdNumber {
    let g = 1usize << v;
    let mut c = vec![0.0; g];
    for slot in c.iter_mut().skip(1) {
        *slot = rng.gen_range(-1.0..1.0);
    }
    let mut mu = CdNumber::new(v, c).unwrap();
    if cd_norm(&mu) < 0.2 {
        mu.set_coeff(1, 1.0);
    }
    let norm = cd_norm(&mu);
    CdNumber::new(v, mu.coeffs().iter().map(|x| x / norm).collect()).unwrap()
}

/// Scalar algebra controls: multiplicative norm and alternative laws below
/// the sedenions, exhibited failures at level 4, exact sign coherence.
pub fn algebra(level: u8, n_pairs: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("algebra", tol);
    report.seeds = Some(n_pairs);
    if level > 4 {
        bail!("levels beyond 4 are out of scope");
    }
    let tb = table(level);
    let mut rng = ChaCha12Rng::seed_from_u64(0xA16E);
    let mut worst_norm: f64 = 0.0;
    let mut worst_alt: f64 = 0.0;
    let mut worst_conj: f64 = 0.0;
    for _ in 0..n_pairs {
        let x = random_cd(&mut rng, level);
        let y = random_cd(&mut rng, level);
        let q = cd_norm(&x) * cd_norm(&y);
        let scale = (1.0 + cd_norm(&x)) * (1.0 + cd_norm(&x)) * (1.0 + cd_norm(&y));
        let conj = octospec_core::cd::cd_conj(&tb.mul(&x, &y)?).dist(&tb.mul(
            &octospec_core::cd::cd_conj(&y),
            &octospec_core::cd::cd_conj(&x),
        )?);
        worst_conj = worst_conj.max(conj / (1.0 + q));
        if level <= 3 {
            worst_norm = worst_norm.max((cd_norm(&tb.mul(&x, &y)?) - q).abs() / (1.0 + q));
            let xx = tb.mul(&x, &x)?;
            let left = tb.mul(&x, &tb.mul(&x, &y)?)?.dist(&tb.mul(&xx, &y)?);
            let right = tb.mul(&tb.mul(&y, &x)?, &x)?.dist(&tb.mul(&y, &xx)?);
            worst_alt = worst_alt.max(left.max(right) / scale);
        }
    }
    report.put("conj_antiautomorphism", worst_conj);
    let mut pass = worst_conj <= tol;
    if level <= 3 {
        report.put("norm_multiplicativity", worst_norm);
        report.put("alternativity", worst_alt);
        pass &= worst_norm <= tol && worst_alt <= tol;
        if level == 3 {
            let mut coherent = true;
            for j in 0..8 {
                for k in 0..8 {
                    for s in 0..8 {
                        coherent &= tb.xi(j, k, s)? == kappa(j, k);
                    }
                }
            }
            report.put("xi_kappa_coherent", coherent);
            report.put("trace_identity_violation", tb.trace_identity_violation().is_none());
            pass &= coherent && tb.trace_identity_violation().is_none();
        }
    } else {
        let broken = sedenion_zero_divisor(&tb)
            .map(|(x, y)| {
                let p = cd_norm(&tb.mul(&x, &y).unwrap());
                (p - cd_norm(&x) * cd_norm(&y)).abs()
            })
            .unwrap_or(0.0);
        report.put("zero_divisor_norm_gap", broken);
        report.put("alternativity_counterexample", tb.alternativity_violation().is_some());
        pass &= broken > 0.5 && tb.alternativity_violation().is_some();
    }
    report.pass = pass;
    Ok(report)
}

/// Synthesis/recovery round trips per level.
pub fn spectral(seeds: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("spectral", tol);
    report.seeds = Some(seeds);
    let mut z_err: f64 = 0.0;
    let mut p_err: f64 = 0.0;
    for v in 2..=3u8 {
        let tb = table(v);
        for seed in 0..seeds {
            let d = 1 + (seed as usize % 8);
            let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5731);
            let n_atoms = rng.gen_range(1..=d);
            let pvm = GradedPvm::random(v, d, n_atoms, seed * 31 + u64::from(v))?;
            let t = synth_normal(&pvm, &tb);
            let rec = spectral_recover(&t, &tb, tol)?;
            for orig in pvm.atoms() {
                let best = rec
                    .atoms()
                    .iter()
                    .min_by(|a, b| a.z.dist(&orig.z).partial_cmp(&b.z.dist(&orig.z)).unwrap())
                    .unwrap();
                z_err = z_err.max(best.z.dist(&orig.z));
                p_err = p_err.max(best.p.dist(&orig.p));
            }
        }
    }
    report.put("spectral_value_error", z_err);
    report.put("projection_error", p_err);
    report.pass = z_err <= tol && p_err <= tol;
    Ok(report)
}

fn seeded_triple(v: u8, seed: u64, real_only: bool) -> Result<PropertyPTriple> {
    let d = 2 + (seed as usize % 4);
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x791E);
    let n_atoms = rng.gen_range(1..=d);
    Ok(PropertyPTriple::synth(v, d, n_atoms, seed * 17 + u64::from(v), real_only)?)
}

/// Graded anticommutation plus component reconstruction under a fixed
/// convention; octonion component residuals are findings, not gates.
pub fn theorem5(seeds: u64, tol: f64, conv: &ConventionSpec) -> Result<Report> {
    let mut report = Report::new("theorem5", tol);
    report.seeds = Some(seeds);
    report.convention = Some(conv.id());
    let mut eq1_worst: f64 = 0.0;
    let mut eq2_worst: f64 = 0.0;
    let mut oct_findings: f64 = 0.0;
    for v in 2..=3u8 {
        let tb = table(v);
        for seed in 0..seeds {
            let t = seeded_triple(v, seed, false)?;
            eq1_worst = eq1_worst.max(verify_theorem5_eq1(&t, tol, &tb)?.max_residual);
            let eq2 = verify_theorem5_eq2(&t, conv, tol, &tb)?;
            if v <= 2 {
                eq2_worst = eq2_worst.max(eq2.max_residual);
            } else {
                oct_findings = oct_findings.max(eq2.max_residual);
            }
        }
    }
    report.put("eq1", eq1_worst);
    report.put("eq2_quaternionic", eq2_worst);
    report.put("eq2_octonion_finding", oct_findings);
    report.pass = eq1_worst <= tol && eq2_worst <= tol;
    Ok(report)
}

/// Compressed commutation and adjoint restriction on interval boxes.
pub fn lemma2(seeds: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("lemma2", tol);
    report.seeds = Some(seeds);
    let mut commutation: f64 = 0.0;
    let mut adjoint: f64 = 0.0;
    let mut graded: f64 = 0.0;
    for v in 2..=3u8 {
        let tb = table(v);
        for seed in 0..seeds {
            let t = seeded_triple(v, seed, false)?;
            let bx = IntervalBox::saturated(v, if seed % 2 == 0 { 3.0 } else { 0.9 });
            let rep = octospec_core::factor::verify_lemma2(&t, &bx, tol, &tb)?;
            commutation = commutation.max(rep.commutation);
            adjoint = adjoint.max(rep.adjoint_restriction);
            graded = graded.max(rep.graded_sign);
        }
    }
    report.put("commutation", commutation);
    report.put("adjoint_restriction", adjoint);
    report.put("graded_sign", graded);
    report.pass = commutation <= tol && adjoint <= tol && graded <= tol;
    Ok(report)
}

pub fn corollary6(seeds: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("corollary6", tol);
    report.seeds = Some(seeds);
    let mut worst: f64 = 0.0;
    for v in 2..=3u8 {
        let tb = table(v);
        for seed in 0..seeds {
            let t = seeded_triple(v, seed, true)?;
            let rep = verify_corollary6(&t, tol, &tb)?;
            worst = worst.max(rep.residual.unwrap_or(f64::INFINITY));
        }
    }
    report.put("commutator", worst);
    report.pass = worst <= tol;
    Ok(report)
}

pub fn lemma7(seeds: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("lemma7", tol);
    report.seeds = Some(seeds);
    let mut identities: f64 = 0.0;
    let mut equivalence: f64 = 0.0;
    let mut min_eig: f64 = 0.0;
    let mut all = true;
    for v in 2..=3u8 {
        let tb = table(v);
        for seed in 0..seeds {
            let t = seeded_triple(v, seed, false)?;
            let rep = verify_lemma7(&t, tol, &tb)?;
            all &= rep.pass;
            identities = identities
                .max(rep.modulus_product)
                .max(rep.phase_atomwise)
                .max(rep.modulus_phase_commutation)
                .max(rep.polar_reconstruction);
            equivalence = equivalence.max(rep.unitary_equivalence);
            min_eig = min_eig.min(rep.t_min_eigenvalue);
        }
    }
    report.put("product_identities", identities);
    report.put("unitary_equivalence", equivalence);
    report.put("modulus_min_eigenvalue", min_eig);
    report.pass = all;
    Ok(report)
}

pub fn property_p(seeds: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("property-p", tol);
    report.seeds = Some(seeds);
    let mut normality: f64 = 0.0;
    let mut commutation: f64 = 0.0;
    let mut graded: f64 = 0.0;
    let mut all = true;
    for v in 2..=3u8 {
        let tb = table(v);
        for seed in 0..seeds {
            let t = seeded_triple(v, seed, false)?;
            let rep = check_property_p(&t, tol, &tb)?;
            all &= rep.pass;
            normality = normality.max(rep.normality);
            commutation = commutation.max(rep.measure_commutation);
            graded = graded.max(rep.graded_sign);
        }
    }
    report.put("normality", normality);
    report.put("measure_commutation", commutation);
    report.put("graded_sign", graded);
    report.pass = all;
    Ok(report)
}

/// Semigroup law, factor commutation, powers, kernel splitting and
/// negative boxes over seeded specs.
pub fn semigroup(specs: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("semigroup", tol);
    report.seeds = Some(specs);
    let mut law: f64 = 0.0;
    let mut comm: f64 = 0.0;
    let mut power: f64 = 0.0;
    let mut merge: f64 = 0.0;
    let mut boxes = true;
    for seed in 0..specs {
        let v = 1 + (seed % 3) as u8;
        let n = 1 + (seed as usize % 3);
        let m = (seed as usize % 2).min(n);
        let d = 2 + (seed as usize % 5);
        let tb = table(v);
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x57E0);
        let n_atoms = rng.gen_range(1..=d.min(3));
        let spec = SemigroupSpec::random(v, d, m, n, n_atoms, seed * 11 + 3)?;
        let pairs: Vec<_> = (0..50)
            .map(|_| (bounded_point(&mut rng, m, n), bounded_point(&mut rng, m, n)))
            .collect();
        law = law.max(verify_semigroup_law(&spec, &pairs, tol, &tb)?.max_residual);
        let x = bounded_point(&mut rng, m, n);
        let polar = polar_semigroup(&spec, &x, &tb)?;
        comm = comm.max(compose(&polar.t, &polar.u).dist(&compose(&polar.u, &polar.t)));
        power = power.max(power_operator(&spec, &x, &tb)?.dist(&polar.t));
        let b = eval_semigroup(&spec, &x, &tb)?;
        let s = rng.gen_range(0..n);
        let (n_proj, k_proj) = kernel_split(&spec, s, &tb)?;
        let merged = compose(&n_proj, &compose(&b, &n_proj))
            .add(&compose(&k_proj, &compose(&b, &k_proj)));
        merge = merge.max(merged.dist(&b));
        let mut lo = vec![0.0; n];
        let mut hi = vec![10.0; n];
        lo[s] = -2.0;
        hi[s] = -0.1;
        boxes &= scale_box_projector(&spec, &lo, &hi)?.max_abs() == 0.0;
    }
    report.put("law", law);
    report.put("factor_commutation", comm);
    report.put("power_defect", power);
    report.put("kernel_reassembly", merge);
    report.put("negative_boxes_vanish", boxes);
    report.pass = law <= tol && comm <= 1e-11 && power <= 1e-12 && merge <= 1e-12 && boxes;
    Ok(report)
}

/// Unitary-group sampling and generator recovery round trips.
pub fn stone_recovery(seeds: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("stone-recovery", tol);
    report.seeds = Some(seeds);
    let h = 0.35;
    let mut held_out: f64 = 0.0;
    let mut counts = true;
    for seed in 0..seeds {
        let v = 1 + (seed % 3) as u8;
        let d = 2 + (seed as usize % 4);
        let tb = table(v);
        let mut attempt = 0u64;
        let spec = loop {
            let mut rng = ChaCha12Rng::seed_from_u64(seed * 1_000 + attempt);
            let n_atoms = rng.gen_range(1..=d.min(2));
            let projections =
                octospec_core::linalg::random_projection_split(&mut rng, d, n_atoms);
            let atoms: Vec<SemigroupAtom> = projections
                .into_iter()
                .map(|p| SemigroupAtom {
                    p,
                    a: vec![1.0],
                    b: vec![rng.gen_range(0.3..2.5f64)],
                    mu: pure_unit(&mut rng, v),
                    s: vec![1],
                })
                .collect();
            let spec = SemigroupSpec::new(v, d, 0, 1, atoms)?;
            let speeds: Vec<f64> = spec.atoms().iter().map(|a| a.b[0]).collect();
            let ok = (0..speeds.len()).all(|i| {
                (0..i).all(|j| ((speeds[i] * h).cos() - (speeds[j] * h).cos()).abs() > 5e-3)
            });
            if ok {
                break spec;
            }
            attempt += 1;
        };
        let samples: Vec<(f64, RealPicture)> = (1..=6)
            .map(|k| {
                let t = k as f64 * h;
                let x = OmegaPoint::new(0, 1, vec![t]).unwrap();
                Ok((t, eval_semigroup(&spec, &x, &tb)?))
            })
            .collect::<Result<_>>()?;
        let rec = stone_recover(&samples, &tb, tol)?;
        held_out = held_out.max(rec.held_out_residual);
        counts &= rec.atoms.len() == spec.atoms().len();
    }
    report.put("held_out_reconstruction", held_out);
    report.put("atom_counts_preserved", counts);
    report.pass = held_out <= tol && counts;
    Ok(report)
}

/// Gram positivity, squared log-convexity, grid-refinement continuity.
pub fn probes(specs: u64, tol: f64) -> Result<Report> {
    let mut report = Report::new("probes", tol);
    report.seeds = Some(specs);
    let mut gram_min: f64 = 0.0;
    let mut margin: f64 = 0.0;
    let mut all = true;
    for seed in 0..specs {
        let v = 1 + (seed % 3) as u8;
        let d = 2 + (seed as usize % 3);
        let n = 1 + (seed as usize % 2);
        let tb = table(v);
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9806E);
        let n_atoms = rng.gen_range(1..=d.min(3));
        let spec = SemigroupSpec::random(v, d, 0, n, n_atoms, seed * 23 + 5)?;
        let nf = d * tb.dim();
        let f: Vec<f64> = (0..nf).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let g: Vec<f64> = (0..nf).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let grid = ProbeGrid {
            base: bounded_point(&mut rng, 0, n),
            coord: rng.gen_range(0..n),
            lo: 0.1,
            hi: 1.4,
            count: 5,
        };
        let rep = continuity_and_convexity_probe(&spec, &f, &g, &grid, &tb)?;
        all &= rep.pass;
        gram_min = gram_min.min(rep.gram_min_eigenvalue);
        margin = margin.min(rep.convexity_margin);
    }
    report.put("gram_min_eigenvalue", gram_min);
    report.put("convexity_margin", margin);
    report.put("squared_form_flagged", true);
    report.pass = all && gram_min >= -1e-10;
    Ok(report)
}

/// Convention ranking on associative oracles.
pub fn calibrate(
    level: u8,
    dim: usize,
    atoms: usize,
    seeds: u64,
    tol: f64,
) -> Result<(Report, CalibrationReport)> {
    let tb = table(level);
    let seed_list: Vec<u64> = (0..seeds).collect();
    let cal = calibrate_theorem5(&tb, dim, atoms, &seed_list, &ConventionSpec::all())?;
    let mut report = Report::new("calibrate", tol);
    report.seeds = Some(seeds);
    report.convention = Some(cal.winner.id());
    let winner_residual = cal
        .ranked
        .iter()
        .find(|(c, _)| *c == cal.winner)
        .map(|(_, r)| *r)
        .unwrap();
    report.put("winner_residual", winner_residual);
    report.put(
        "ranking",
        cal.ranked.iter().map(|(c, r)| (c.id(), *r)).collect::<Vec<_>>(),
    );
    report.put("note", cal.note);
    report.pass = winner_residual <= tol;
    Ok((report, cal))
}

/// Run one registered suite with default sizes.
pub fn run_registered(name: &str, seeds: u64, tol: f64, conv: &ConventionSpec) -> Result<Report> {
    registered(name)?;
    match name {
        "algebra" => algebra(3, seeds.max(1) * 100, tol),
        "spectral" => spectral(seeds, tol),
        "theorem5" => theorem5(seeds, tol, conv),
        "lemma2" => lemma2(seeds, tol),
        "corollary6" => corollary6(seeds, tol.min(1e-11)),
        "lemma7" => lemma7(seeds, tol),
        "property-p" => property_p(seeds, tol),
        "semigroup" => semigroup(seeds, tol.max(1e-9)),
        "stone-recovery" => stone_recovery(seeds, tol.max(1e-8)),
        "probes" => probes(seeds, tol),
        _ => unreachable!("gated by registered()"),
    }
}
