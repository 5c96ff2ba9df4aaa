//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use orbifrob::cocycles::{
    normalize_nonabelian_sn, schur_cocycle_sn, Group, SuperGrading, TwoCocycle,
};
use orbifrob::exact::{Scalar, SparseVec};
use orbifrob::frobenius::FrobeniusAlgebra;
use orbifrob::gfrob::{
    extract_special, normalize_gamma, super_twist, tensor_hat, twist_by_torsion, twisted_group_ring, verify_axioms,
    GFrobeniusAlgebra, SectionChoice,
};
use orbifrob::symgroup::{all_permutations, graph_defect_twice, graph_defect_twice_orbit_form, joint_orbits};
use orbifrob::sympow::{second_quantization, SymmetricPowerAlgebra};

type Outcome = Result<String, String>;

fn bases() -> Vec<FrobeniusAlgebra> {
    vec![FrobeniusAlgebra::point(), FrobeniusAlgebra::truncated(2), FrobeniusAlgebra::truncated(3)]
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn failure(r: &orbifrob::report::Report) -> String {
    r.failures()
        .next()
        .map(|c| format!("{}: {}", c.axiom, c.witness.clone().unwrap_or_default()))
        .unwrap_or_default()
}

fn build(a: &FrobeniusAlgebra, n: usize, p: u8) -> Result<SymmetricPowerAlgebra, String> {
    SymmetricPowerAlgebra::build(a, n, p, None).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let mut count = 0;
    for a in bases() {
        let ns: &[usize] = if a.dim() <= 2 { &[2, 3, 4] } else { &[2, 3] };
        for &n in ns {
            for p in 0..2 {
                let s = build(&a, n, p)?;
                let r = s.verify();
                ensure(r.passed(), || format!("{} n={n} p={p}: {}", a.name(), failure(&r)))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} structures pass every axiom"))
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for a in [FrobeniusAlgebra::point(), FrobeniusAlgebra::truncated(2)] {
        for n in 2..=4 {
            for p in 0..2 {
                let s = build(&a, n, p)?;
                let r = s.ls_compare().map_err(|e| e.to_string())?;
                ensure(r.passed(), || format!("{} n={n} p={p}: {}", a.name(), failure(&r)))?;
                count += 1;
            }
        }
    }
    for n in 0..=4 {
        for p in 0..2 {
            let s = build(&FrobeniusAlgebra::point(), n, p)?;
            let g = s.group().clone();
            let ring = twisted_group_ring(&TwoCocycle::trivial(g.clone()), &SuperGrading::sign(g, p).unwrap())
                .map_err(|e| e.to_string())?;
            if let Some(d) = s.algebra().table_difference(&ring) {
                return Err(format!("pt n={n} p={p} differs from the twisted group ring: {d}"));
            }
        }
    }
    Ok(format!("{count} two-route comparisons agree; point powers equal twisted group rings for n ≤ 4"))
}

fn criterion_3() -> Outcome {
    let mut pairs = 0;
    for a in [FrobeniusAlgebra::point(), FrobeniusAlgebra::truncated(2)] {
        for n in 1..=4 {
            for p in 0..2 {
                let s = build(&a, n, p)?;
                let t = s.trace_report();
                ensure(t.report.passed(), || format!("{} n={n} p={p}: {}", a.name(), failure(&t.report)))?;
                pairs += t.rows.len();
            }
        }
    }
    let s = build(&FrobeniusAlgebra::truncated(2), 4, 1)?;
    let row = s
        .trace_report()
        .rows
        .into_iter()
        .find(|r| r.sigma == "(1 2)(3 4)" && r.sigma_prime == "(1 3)(2 4)")
        .ok_or("pair missing")?;
    ensure(row.lhs == Scalar::from_int(2), || format!("(12)(34) on A_(13)(24): {}", row.lhs))?;
    Ok(format!("{pairs} commuting pairs match the closed form; torsion laws hold"))
}

fn criterion_4() -> Outcome {
    for n in [4, 5] {
        let alpha = schur_cocycle_sn(n).map_err(|e| e.to_string())?;
        let g = alpha.group().clone();
        if let Some(w) = alpha.violation() {
            return Err(format!("S_{n}: {w}"));
        }
        let transpositions: Vec<usize> =
            (0..g.order()).filter(|&t| g.perm(t).unwrap().orbits().len() + 1 == n).collect();
        for &t in &transpositions {
            ensure(alpha.get(t, t).is_one(), || format!("α({0},{0}) ≠ 1", g.label(t)))?;
            for &u in &transpositions {
                let disjoint = u != t && g.commute(t, u);
                ensure(!disjoint || alpha.epsilon(t, u) == -Scalar::one(), || {
                    format!("ε({}, {}) = {}", g.label(t), g.label(u), alpha.epsilon(t, u))
                })?;
            }
        }
    }
    let alpha = schur_cocycle_sn(4).map_err(|e| e.to_string())?;
    let g = alpha.group().clone();
    let ring = twisted_group_ring(&alpha, &SuperGrading::trivial(g)).map_err(|e| e.to_string())?;
    let r = verify_axioms(&ring, false);
    ensure(r.passed(), || failure(&r))?;
    Ok("S_4 and S_5 Schur cocycles verified; twisted k[S_4] passes".into())
}

fn random_units(rng: &mut ChaCha8Rng, g: &Group, keep_transpositions: bool) -> Vec<Scalar> {
    (0..g.order())
        .map(|x| {
            if x == g.identity() || (keep_transpositions && g.length(x) == 1) {
                Scalar::one()
            } else {
                let num = rng.gen_range(1..=7i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
                Scalar::frac(num, rng.gen_range(1..=5i64))
            }
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut trips = 0;
    for p in 0..2 {
        let s = build(&FrobeniusAlgebra::truncated(2), 3, p)?;
        let a = s.algebra();
        let g = s.group().clone();
        let special = extract_special(a, &s.generators(), SectionChoice::Pivot).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let lambda = random_units(&mut rng, &g, false);
            let moved = special.phi.rescaled(&lambda).map_err(|e| e.to_string())?;
            let back = normalize_nonabelian_sn(&moved).map_err(|e| e.to_string())?;
            ensure(back.phi == special.phi && back.p == p, || format!("φ round trip failed for p={p}"))?;

            let lambda = random_units(&mut rng, &g, true);
            let gens: Vec<SparseVec> = s.generators().iter().zip(&lambda).map(|(v, l)| v.scaled(l)).collect();
            let moved = extract_special(a, &gens, SectionChoice::Pivot).map_err(|e| e.to_string())?;
            let back = normalize_gamma(a, &moved).map_err(|e| e.to_string())?;
            ensure(back.report.passed(), || failure(&back.report))?;
            ensure(back.structure.gamma == special.gamma && back.structure.generators == special.generators, || {
                format!("γ round trip failed for p={p}")
            })?;
            trips += 2;
        }
    }
    let mut splittings = 0;
    for p in 0..2 {
        let s = build(&FrobeniusAlgebra::truncated(2), 4, p)?;
        let g = s.group();
        let special = extract_special(s.algebra(), &s.generators(), SectionChoice::Pivot).map_err(|e| e.to_string())?;
        let norm = normalize_gamma(s.algebra(), &special).map_err(|e| e.to_string())?;
        ensure(norm.report.passed(), || failure(&norm.report))?;
        ensure(norm.lambda.iter().all(Scalar::is_one), || "S_4 generators are not already normalized".into())?;
        let lambda = random_units(&mut rng, g, true);
        let gens: Vec<SparseVec> = s.generators().iter().zip(&lambda).map(|(v, l)| v.scaled(l)).collect();
        let moved = extract_special(s.algebra(), &gens, SectionChoice::Pivot).map_err(|e| e.to_string())?;
        let back = normalize_gamma(s.algebra(), &moved).map_err(|e| e.to_string())?;
        ensure(back.structure.gamma == special.gamma, || format!("S_4 γ round trip failed for p={p}"))?;
        trips += 1;
        for x in 0..g.order() {
            for t in 0..g.order() {
                if g.length(t) == 1 && g.length(g.mul(x, t)) + 1 == g.length(x) {
                    splittings += 1;
                }
            }
        }
    }
    Ok(format!("{trips} seeded round trips recover the originals; {splittings} S_4 splittings agree"))
}

fn criterion_6() -> Outcome {
    let mut pairs = 0usize;
    for n in 1..=6 {
        let perms = all_permutations(n);
        let bad = perms
            .par_iter()
            .map(|a| {
                for b in &perms {
                    let joint = joint_orbits(n, &[a, b]).map_err(|e| e.to_string())?;
                    for bl in joint.blocks() {
                        let c = graph_defect_twice(a, b, bl).map_err(|e| e.to_string())?;
                        let o = graph_defect_twice_orbit_form(a, b, bl).map_err(|e| e.to_string())?;
                        if c != o || c < 0 || c % 2 != 0 {
                            return Err(format!("({a}, {b}) block {bl:?}: {c} vs {o}"));
                        }
                    }
                }
                Ok(())
            })
            .find_any(|r| r.is_err());
        if let Some(Err(e)) = bad {
            return Err(e);
        }
        pairs += perms.len() * perms.len();
    }
    Ok(format!("{pairs} pairs over n ≤ 6 give equal nonnegative integer defects"))
}

fn criterion_7() -> Outcome {
    let frozen: [&[usize]; 3] = [&[1, 1, 2, 3, 5], &[1, 2, 5, 10, 20], &[1, 3, 9, 22, 51]];
    for (d, want) in (1..=3).zip(frozen) {
        let series = second_quantization(&FrobeniusAlgebra::truncated(d), 4, 0, None).map_err(|e| e.to_string())?;
        ensure(series.matches() == Some(true), || format!("dim {d}: {:?} vs product formula", series.coefficients()))?;
        ensure(series.coefficients() == want, || format!("dim {d}: {:?}", series.coefficients()))?;
    }
    Ok("invariant dimensions match the product formula up to q^4 for dim A = 1, 2, 3".into())
}

fn criterion_8() -> Outcome {
    let s = build(&FrobeniusAlgebra::truncated(2), 3, 0)?;
    let a = s.algebra();
    let g: Group = s.group().clone();
    for alpha in [TwoCocycle::trivial(g.clone()), schur_cocycle_sn(3).map_err(|e| e.to_string())?] {
        let twisted = twist_by_torsion(a, &alpha).map_err(|e| e.to_string())?;
        let ring = twisted_group_ring(&alpha, &SuperGrading::trivial(g.clone())).map_err(|e| e.to_string())?;
        let product = tensor_hat(a, &ring).map_err(|e| e.to_string())?;
        if let Some(d) = twisted.table_difference(&product) {
            return Err(format!("twist ≠ tensor product: {d}"));
        }
    }
    let sup = super_twist(a, &SuperGrading::sign(g.clone(), 1).unwrap()).map_err(|e| e.to_string())?;
    let odd = build(&FrobeniusAlgebra::truncated(2), 3, 1)?;
    if let Some(d) = sup.table_difference(odd.algebra()) {
        return Err(format!("super twist of p=0 differs from p=1: {d}"));
    }
    Ok("torsion twists factor through the tensor product; the sign super twist gives p = 1".into())
}

fn corrupt(a: &GFrobeniusAlgebra, f: impl FnOnce(&mut orbifrob::gfrob::GFrobParts)) -> Option<GFrobeniusAlgebra> {
    let mut parts = a.parts();
    f(&mut parts);
    GFrobeniusAlgebra::from_parts(parts).ok()
}

fn caught(a: Option<GFrobeniusAlgebra>, super_mode: bool) -> Result<String, String> {
    match a {
        None => Ok("rejected at construction".into()),
        Some(a) => {
            let r = verify_axioms(&a, super_mode);
            let found = r.failures().find(|c| c.witness.is_some()).map(|c| c.axiom.clone());
            found.ok_or_else(|| "corruption passed every check".to_string())
        }
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut caught_count = 0;
    for p in 0..2u8 {
        let s = build(&FrobeniusAlgebra::truncated(2), 3, p)?;
        let a = s.algebra();
        let g = s.group().clone();
        let k = g.order();
        for _ in 0..6 {
            let block = rng.gen_range(0..k * k);
            let entries = a.parts().mult[block].len();
            let i = rng.gen_range(0..entries);
            let target = rng.gen_range(0..a.dim(g.mul(block / k, block % k)));
            let c = corrupt(a, |parts| {
                let v = &parts.mult[block][i];
                parts.mult[block][i] = v.add(&SparseVec::basis(target));
            });
            caught(c, p == 1).map_err(|e| format!("structure constant in block {block}: {e}"))?;

            let (x, y) = loop {
                let (x, y) = (rng.gen_range(0..k), rng.gen_range(0..k));
                if g.length(g.mul(x, y)) != g.length(x) + g.length(y) {
                    break (x, y);
                }
            };
            let c = corrupt(a, |parts| {
                let two = Scalar::from_int(2);
                for v in parts.mult[x * k + y].iter_mut() {
                    *v = v.scaled(&two);
                }
            });
            caught(c, p == 1).map_err(|e| format!("γ_({}, {}): {e}", g.label(x), g.label(y)))?;

            let (x, y) = (rng.gen_range(1..k), rng.gen_range(0..k));
            let c = corrupt(a, |parts| {
                let j = rng.gen_range(0..parts.action[x * k + y].len());
                parts.action[x * k + y][j] = parts.action[x * k + y][j].scaled(&-Scalar::one());
            });
            caught(c, p == 1).map_err(|e| format!("action sign φ_{} on A_{}: {e}", g.label(x), g.label(y)))?;
            caught_count += 3;
        }
        let t = g.parse_element("(1 2)").unwrap();
        let zeroed = corrupt(a, |parts| {
            for v in parts.mult[t * k + t].iter_mut() {
                *v = SparseVec::new();
            }
        });
        let r = verify_axioms(zeroed.as_ref().ok_or("zeroed γ rejected at construction")?, p == 1);
        for axiom in ["metric invariance (d)", "nondegeneracy"] {
            ensure(r.get(axiom).is_some_and(|c| !c.passed()), || format!("γ_(12),(12) = 0 passes {axiom}"))?;
        }
    }
    Ok(format!("{caught_count} seeded corruptions caught with witnesses"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("axiom closure of symmetric powers", criterion_1),
        ("two-route equality and point powers", criterion_2),
        ("trace values and discrete torsion laws", criterion_3),
        ("Schur cocycle", criterion_4),
        ("normalization round trips", criterion_5),
        ("graph defect forms", criterion_6),
        ("second-quantization series", criterion_7),
        ("twist coherence", criterion_8),
        ("negative controls", criterion_9),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                all = false;
                println!("criterion {}: FAIL {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
