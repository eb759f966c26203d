//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p gsrep --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use gsrep::cones::{su12_cone_check, su12_hw_unitarizable, DEFAULT_SAMPLES, PSD_TOL};
use gsrep::dirlim::{generators_agree, DirectLimitSpec};
use gsrep::groundstate::{analyze, nonstrict_fixture, spectral_translation_check, Tolerances};
use gsrep::heisenfock::{
    character_pair, factorization_check, model_check, second_quantize, weyl_op, weyl_relation_residual,
    FockTruncation, SymplecticSetup, TensorModel,
};
use gsrep::irreps::Representation;
use gsrep::job::{
    classify_box, cone_cases, dirlim_cases, dominant_weights, ground_state_case, is_antidominant, is_monotone,
    residual_table, standard_d_list, JobTolerances,
};
use gsrep::liealg::{build_algebra, AlgebraKind, IntervalSet};
use gsrep::matcore::{c64, null_space, CMatrix, CVector};

const SEED: u64 = 20;

/// Collected sub-check outcomes of one criterion.
#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn cv(xs: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&(a, b)| c64(a, b)))
}

fn diag(xs: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(xs.len(), xs.iter().map(|&x| c64(x, 0.0))))
}

fn binom(n: usize, k: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

fn ac1(o: &mut Outcome) {
    let g = std::sync::Arc::new(build_algebra(AlgebraKind::Unitary(3)).unwrap());
    let pi = Representation::defining(g.clone()).unwrap();
    let d = g.diagonal_element(&[1.0, 0.0, 0.0]).unwrap();
    let r = analyze(&pi, &d, Tolerances::default()).unwrap();
    o.check(r.m.abs() <= 1e-10, format!("m = {:e}", r.m));
    o.check(r.h0_dim() == 2, format!("dim H0 = {}", r.h0_dim()));
    o.check(r.commutant_dims.ground == 1, format!("commutant of pi0 has dim {}", r.commutant_dims.ground));
    o.check(r.ground_state, "ground_state = false");
    o.check(r.strict, "strict = false");
    o.note(format!("m = {:.1e}, dim H0 = {}", r.m, r.h0_dim()));
}

struct Sweep {
    cases: Vec<gsrep::job::GroundStateCase>,
}

fn ground_state_sweep() -> Sweep {
    let tol = JobTolerances::default();
    let mut cases = Vec::new();
    for kind in [AlgebraKind::Unitary(2), AlgebraKind::Unitary(3), AlgebraKind::SpecialUnitary(3)] {
        let n = kind.unitary_rank().unwrap();
        for d in standard_d_list(kind) {
            for w in dominant_weights(n, -2, 2) {
                cases.push(ground_state_case(kind, &w, &d, &tol, DEFAULT_SAMPLES, SEED, None).unwrap());
            }
        }
    }
    Sweep { cases }
}

fn ac2(o: &mut Outcome, sweep: &Sweep) {
    for kind in [AlgebraKind::Unitary(2), AlgebraKind::Unitary(3), AlgebraKind::SpecialUnitary(3)] {
        let list = standard_d_list(kind);
        o.check(list.len() == 6, format!("{kind}: {} diagonal elements", list.len()));
        o.check(list.iter().any(|d| d.iter().all(|&x| x == 0.0)), format!("{kind}: d = 0 missing"));
    }
    let bad: Vec<_> = sweep.cases.iter().filter(|c| !(c.ground_state && c.strict)).collect();
    for c in bad.iter().take(5) {
        o.check(false, format!("{} {:?} d = {:?}: ground_state {} strict {}", c.group, c.weight, c.d, c.ground_state, c.strict));
    }
    o.check(bad.is_empty(), format!("{} failures", bad.len()));
    o.note(format!("{} fixtures, {} failures", sweep.cases.len(), bad.len()));
}

fn ac3(o: &mut Outcome, sweep: &Sweep) {
    let not_cone: Vec<_> = sweep.cases.iter().filter(|c| !c.cone).collect();
    o.check(not_cone.is_empty(), format!("{} ground state fixtures fail the cone test", not_cone.len()));

    let mut chars = 0;
    let mut rejected = 0;
    let mut disagreements = 0;
    for kind in [AlgebraKind::Unitary(2), AlgebraKind::Unitary(3), AlgebraKind::SpecialUnitary(3)] {
        for d in standard_d_list(kind) {
            let regular = (0..d.len()).all(|i| (0..i).all(|j| d[i] != d[j]));
            for c in cone_cases(kind, &d, -2, 2, PSD_TOL, DEFAULT_SAMPLES, SEED).unwrap() {
                if c.cone != c.coroot {
                    disagreements += 1;
                    o.check(false, format!("{kind} {:?} d = {:?}: cone {} coroot {}", c.weight, d, c.cone, c.coroot));
                }
                if regular {
                    chars += 1;
                    if !is_antidominant(&c.weight, &d).unwrap() {
                        rejected += 1;
                        o.check(!c.cone && c.witness, format!("{kind} character {:?} d = {:?} not rejected with witness", c.weight, d));
                    }
                }
            }
        }
    }
    o.check(disagreements == 0, format!("{disagreements} disagreements with the coroot test"));
    o.note(format!(
        "{} fixtures in the cone, {chars} torus characters, {rejected} rejected with witness, {disagreements} disagreements",
        sweep.cases.len() - not_cone.len()
    ));
}

fn ac4(o: &mut Outcome) {
    for d in [[1.0, 0.0], [-0.5, 0.7], [2.0, -1.0]] {
        let c = classify_box(2, &d, 3, None).unwrap();
        o.check(c.equal, format!("d = {d:?}: antidominant set differs from lowest weight set"));
        o.check(c.injective, format!("d = {d:?}: lowest weight map not injective"));
        o.check(c.irreps == 28, format!("d = {d:?}: {} irreps in the box", c.irreps));
        o.note(format!("d = {d:?}: {} weights", c.antidominant.len()));
    }
}

fn ac5(o: &mut Outcome) {
    let v = su12_cone_check([0, 1, 0], PSD_TOL, DEFAULT_SAMPLES, SEED).unwrap();
    o.check(v.holds, "(0,1,0): cone = false");
    o.check(!su12_hw_unitarizable([0, 1, 0]), "(0,1,0): hw_unitarizable = true");
    o.check(su12_hw_unitarizable([-1, 1, 0]), "(-1,1,0): hw_unitarizable = false");
    o.note(format!("(0,1,0) in the cone over {} generators, not unitarizable", v.checked));
}

fn ac6(o: &mut Outcome) {
    let ft1 = FockTruncation::new(1, 40);
    let ft2 = FockTruncation::new(2, 40);
    let mut worst: f64 = 0.0;
    let probes: Vec<(&FockTruncation, CVector)> = vec![
        (&ft1, cv(&[(0.3, 0.0)])),
        (&ft1, cv(&[(1.0, 0.0)])),
        (&ft1, cv(&[(0.0, 1.0)])),
        (&ft1, cv(&[(0.6, -0.8)])),
        (&ft2, cv(&[(0.6, 0.0), (0.0, 0.8)])),
        (&ft2, cv(&[(0.3, 0.2), (-0.1, 0.4)])),
    ];
    for (ft, v) in &probes {
        let w = weyl_op(ft, v).unwrap();
        let err = (w[(0, 0)] - c64((-v.norm_squared() / 4.0).exp(), 0.0)).norm();
        worst = worst.max(err);
    }
    o.check(worst <= 1e-6, format!("vacuum coefficient error {worst:e}"));

    let v = cv(&[(1.0, 0.0)]);
    let w = cv(&[(0.0, 1.0)]);
    let r = weyl_relation_residual(&ft1, &v, &w, 20).unwrap();
    o.check(r <= 1e-6, format!("Weyl relation residual {r:.3e} at N = 40, M = 20 exceeds 1e-6"));

    let rows = residual_table(&[10, 20, 40], &v, &w, None).unwrap();
    let table: Vec<String> = rows.iter().map(|r| format!("N={} M={}: {:.2e}", r.n, r.m, r.residual)).collect();
    o.check(is_monotone(&rows), format!("residuals not monotone: {}", table.join(", ")));

    let mut kernel_cases = 0;
    for (modes, cutoff, entries) in [
        (2, 40, vec![0.0, 1.0]),
        (3, 8, vec![0.0, 0.0, 2.0]),
        (3, 8, vec![1.0, 0.5, 2.0]),
        (2, 12, vec![0.0, 0.0]),
    ] {
        let ft = FockTruncation::new(modes, cutoff);
        let dg = second_quantize(&ft, &diag(&entries), 1e-8).unwrap();
        let got = null_space(&dg, 1e-9).unwrap().ncols();
        let r = entries.iter().filter(|&&x| x == 0.0).count();
        let expected = binom(r + cutoff, cutoff);
        o.check(got == expected, format!("ker dGamma(diag {entries:?}) at N = {cutoff}: {got} vs {expected}"));
        kernel_cases += 1;
    }
    o.note(format!(
        "vacuum error {worst:.1e}; Weyl residual {r:.2e}; table [{}]; {kernel_cases} kernel counts",
        table.join(", ")
    ));
}

fn ac7(o: &mut Outcome) {
    let ft = FockTruncation::new(1, 30);
    let s = SymplecticSetup::from_hermitian(diag(&[1.0]), 1e-10).unwrap();
    let v = factorization_check(&s, None, &ft, 10, 1e-5).unwrap();
    o.check(v.block_residual <= 1e-5, format!("block residual {:e}", v.block_residual));
    o.check(v.vacuum_space_dim == 1, format!("minimal energy space has dim {}", v.vacuum_space_dim));
    o.check(v.holds, format!("pure effective model rejected: {v:?}"));

    let s2 = SymplecticSetup::from_hermitian(diag(&[0.0, 1.0]), 1e-10).unwrap();
    let rep0 = character_pair([1.0, -0.5], [0.25, 2.0]).unwrap();
    let v2 = factorization_check(&s2, Some(&rep0), &ft, 10, 1e-5).unwrap();
    o.check(v2.holds && v2.vacuum_space_dim == 1, format!("model with V^beta rejected: {v2:?}"));

    let bad = TensorModel::new(&s2, Some(&rep0), &ft).unwrap().with_coupling(0.3);
    let vb = model_check(&bad, 10, 1e-5).unwrap();
    o.check(!vb.holds, "coupled model accepted");
    o.note(format!(
        "block residuals {:.1e}, {:.1e}; coupled {:.1e}",
        v.block_residual, v2.block_residual, vb.block_residual
    ));
}

fn ac8(o: &mut Outcome) {
    let g = std::sync::Arc::new(build_algebra(AlgebraKind::Unitary(3)).unwrap());
    let pi = Representation::defining(g.clone()).unwrap();
    let d = g.diagonal_element(&[1.0, 0.0, 0.0]).unwrap();
    let mut worst: f64 = 0.0;
    let mut annihilation = false;
    for e in [-1.0, 0.0, 1.0] {
        for f in [0.0, 1.0] {
            let v = spectral_translation_check(&pi, &d, &IntervalSet::point(e), &IntervalSet::point(f), 1e-9).unwrap();
            worst = worst.max(v.residual);
            o.check(v.holds && v.residual <= 1e-9, format!("E = {e}, F = {f}: residual {:e}", v.residual));
            if e == -1.0 && f == 0.0 && v.pairs > 0 {
                annihilation = true;
            }
        }
    }
    o.check(annihilation, "annihilation case not exercised");
    o.note(format!("worst residual {worst:.1e}"));
}

fn ac9(o: &mut Outcome) {
    let (checked, failures) = dirlim_cases(1000, 6, 3, SEED).unwrap();
    o.check(checked == 1000, format!("{checked} cases"));
    o.check(failures.is_empty(), format!("{} failures", failures.len()));
    let seqs = [
        vec![1.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 2.0, 3.0],
        vec![3.0, 1.0, 2.0],
        vec![0.3, -1.0, 2.0, 0.0],
        vec![4.0, 3.0, 2.0, 1.0],
    ];
    for d in seqs {
        let spec = DirectLimitSpec::new(d.clone()).unwrap();
        o.check(generators_agree(&spec, 1e-8).unwrap(), format!("d = {d:?}: generators disagree"));
    }
    o.note(format!("{checked} random triples, 7 generator sequences"));
}

fn ac10(o: &mut Outcome) {
    let (pi, d) = nonstrict_fixture().unwrap();
    let r = analyze(&pi, &d, Tolerances::default()).unwrap();
    o.check(r.ground_state, "fixture is not a ground state representation");
    o.check(!r.strict, "strict = true");
    o.note(format!(
        "compressed algebra dim {}, pi0 algebra distance {:.2}",
        r.commutant_dims.compressed_algebra, r.strictness_distance
    ));
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sweep = ground_state_sweep();
    type Criterion<'a> = (&'a str, &'a str, Box<dyn Fn(&mut Outcome) + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("AC1", "u(3) defining representation", Box::new(ac1)),
        ("AC2", "ground state sweep u(2), u(3), su(3)", Box::new(|o| ac2(o, &sweep))),
        ("AC3", "cone test against coroot test", Box::new(|o| ac3(o, &sweep))),
        ("AC4", "antidominant weights and lowest weights", Box::new(ac4)),
        ("AC5", "su(1,2) cone without unitarizability", Box::new(ac5)),
        ("AC6", "Fock space and Weyl operators", Box::new(ac6)),
        ("AC7", "factorization of Heisenberg models", Box::new(ac7)),
        ("AC8", "spectral translation", Box::new(ac8)),
        ("AC9", "direct limit consistency", Box::new(ac9)),
        ("AC10", "non-strict negative control", Box::new(ac10)),
    ];
    let mut failed = 0;
    for (id, title, f) in &criteria {
        let mut o = Outcome::default();
        if let Err(e) = catch_unwind(AssertUnwindSafe(|| f(&mut o))) {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            o.failures.push(format!("panicked: {msg}"));
        }
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if o.failures.is_empty() { o.notes.join("; ") } else { o.failures.join("; ") };
        println!("{id:<5} {status}  {title}: {detail}");
        failed += usize::from(!o.failures.is_empty());
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
