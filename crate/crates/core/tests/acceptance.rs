//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails. All comparisons are exact.

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_traits::Zero;

use dialg::algebra::{
    catalog, field, group_algebra_c2, matrix_algebra, perm_quotient, truncated_poly,
    validate_associative, validate_perm, FiniteAlgebra, Side,
};
use dialg::decomposition::{
    assemble_derivation, assemble_diderivation, decompose_derivation, decompose_diderivation,
    reconstruct_check, Sidedness,
};
use dialg::dialgebra::{kp_dialgebra, kp_window, validate_dialgebra, Dialgebra, Window};
use dialg::operators::{
    algebra_inner_derivation, bracket, inner_derivation, inner_diderivation, is_derivation,
    is_diderivation, DerivationKind, LinOp,
};
use dialg::sampling::{random_combination, random_element, rng_from_seed, ComponentSpaces};
use dialg::solver::{algebra_derivation_space, derivation_space, diderivation_space, SubspaceBasis};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn catalog_algebras() -> Vec<FiniteAlgebra> {
    vec![field(), truncated_poly(3).unwrap(), matrix_algebra(2).unwrap(), group_algebra_c2()]
}

fn axiom_suite() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 0..=5 {
        let p = perm_quotient(n);
        let r = validate_associative(&p).merge(validate_perm(&p, Side::Left), None);
        if !r.is_pass() {
            pass = false;
            notes.push(format!("P0[{n}] fails: {r}"));
        }
    }
    let mut instances = 0;
    for alg in catalog_algebras() {
        for n in 0..=3 {
            let d = kp_dialgebra(&perm_quotient(n), &alg).unwrap();
            instances += 1;
            if !validate_dialgebra(&d).is_pass() {
                pass = false;
                notes.push(format!("{} fails", d.name));
            }
        }
        for w in [Window::new(1, 1), Window::new(2, 1), Window::new(2, 2)] {
            let d = kp_window(w, &alg).unwrap();
            instances += 1;
            if !validate_dialgebra(&d).is_pass() {
                pass = false;
                notes.push(format!("{} fails", d.name));
            }
        }
    }
    notes.insert(0, format!("P0[0..=5] left perm, {instances} KP dialgebras exhaustive"));
    outcome(pass, notes.join("; "))
}

fn inner_operator_suite() -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    for (i, alg) in catalog_algebras().into_iter().enumerate() {
        for w in [Window::new(1, 1), Window::new(2, 1)] {
            let d = kp_window(w, &alg).unwrap();
            let mut rng = rng_from_seed(100 + i as u64);
            for _ in 0..50 {
                let a = random_element(&mut rng, &d);
                checked += 1;
                let ad = inner_derivation(&d, &a).unwrap();
                let big = inner_diderivation(&d, &a).unwrap();
                if !is_derivation(&d, &ad).unwrap().is_pass() || !is_diderivation(&d, &big).unwrap().is_pass() {
                    failures += 1;
                }
            }
        }
    }
    outcome(failures == 0, format!("{checked} random elements over 8 instances, {failures} failures"))
}

fn der_soundness() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, alg) in catalog_algebras().into_iter().enumerate() {
        let d = kp_window(Window::new(2, 2), &alg).unwrap();
        let spaces = ComponentSpaces::of(&d).unwrap();
        let mut rng = rng_from_seed(300 + i as u64);
        let mut passes = 0;
        for _ in 0..50 {
            let fam = spaces.random_der_family(&mut rng);
            let op = assemble_derivation(&d, &fam).unwrap();
            if is_derivation(&d, &op).unwrap().is_pass() {
                passes += 1;
            }
        }
        pass &= passes == 50;
        notes.push(format!("{} {passes}/50", alg.name));
    }
    outcome(pass, format!("window (2,2): {}", notes.join(", ")))
}

fn dider_soundness() -> Outcome {
    let algebras = catalog_algebras();
    let mut per_variant = Vec::new();
    let mut any_full = false;
    for s in Sidedness::ALL {
        let mut total = 0;
        let mut passes = 0;
        let mut parts = Vec::new();
        for (i, alg) in algebras.iter().enumerate() {
            let d = kp_window(Window::new(2, 2), alg).unwrap();
            let spaces = ComponentSpaces::of(&d).unwrap();
            let mut rng = rng_from_seed(400 + i as u64);
            let mut ok = 0;
            for _ in 0..50 {
                let fam = spaces.random_dider_family(&mut rng, s);
                let op = assemble_diderivation(&d, &fam, s).unwrap();
                if is_diderivation(&d, &op).unwrap().is_pass() {
                    ok += 1;
                }
            }
            total += 50;
            passes += ok;
            parts.push(format!("{} {ok}/50", alg.name));
        }
        any_full |= passes == total;
        per_variant.push(format!("{} [{}]", s.as_str(), parts.join(", ")));
    }
    let d = kp_window(Window::new(2, 2), &field()).unwrap();
    let spaces = ComponentSpaces::of(&d).unwrap();
    outcome(
        any_full,
        format!(
            "window (2,2): {}; dims LDer(P)={} RDer(P)={}",
            per_variant.join("; "),
            spaces.perm_left.dimension(),
            spaces.perm_right.dimension()
        ),
    )
}

fn completeness() -> Outcome {
    let mut pass = true;
    let mut rows = Vec::new();
    for alg in [field(), truncated_poly(3).unwrap()] {
        for w in [Window::new(1, 1), Window::new(2, 1)] {
            let d = kp_window(w, &alg).unwrap();
            let report = dialg::compare::compare(&d, 0, 0).unwrap();
            let der = derivation_space(&d);
            let dider = diderivation_space(&d);
            for op in der.basis_ops() {
                let (_, res) = decompose_derivation(&d, &op).unwrap();
                let localized = res.roundtrip_total == res.roundtrip.len() && res.roundtrip.iter().all(|m| m.boundary);
                pass &= res.roundtrip_total == 0 || localized;
                pass &= res.components.is_empty();
                pass &= reconstruct_check(&d, &op).unwrap().is_pass();
            }
            for op in dider.basis_ops() {
                let (_, res) = decompose_diderivation(&d, &op).unwrap();
                let localized = res.roundtrip_total == res.roundtrip.len() && res.roundtrip.iter().all(|m| m.boundary);
                pass &= res.roundtrip_total == 0 || localized;
                pass &= res.components.is_empty();
            }
            let gaps: Vec<String> = report
                .rows
                .iter()
                .map(|r| {
                    format!(
                        "{}{} {}/{} gap {}",
                        r.kind,
                        r.variant.map(|s| format!("[{}]", s.as_str())).unwrap_or_default(),
                        r.assembled_dim.unwrap_or(0),
                        r.solver_dim,
                        r.gap.unwrap_or(0)
                    )
                })
                .collect();
            rows.push(format!("{} {w}: {}", alg.name, gaps.join(", ")));
        }
    }
    outcome(pass, rows.join("; "))
}

fn classical_oracles() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();

    let m2 = matrix_algebra(2).unwrap();
    let der = algebra_derivation_space(&m2, DerivationKind::TwoSided);
    let inner: Vec<LinOp> = (0..4)
        .map(|k| algebra_inner_derivation(&m2, &m2.basis_vector(k)).unwrap())
        .collect();
    let inner_span = SubspaceBasis::span(&m2.name, 4, &inner).unwrap();
    pass &= der.dimension() == 3 && inner_span.dimension() == 3 && inner_span.same_subspace(&der);
    notes.push(format!("M2 {} (inner rank {})", der.dimension(), inner_span.dimension()));

    // k[t]/(t³): d is fixed by d(t) = g(t) with g(0) = 0, so two free
    // coefficients; every basis element must respect that shape.
    let poly = truncated_poly(3).unwrap();
    let der = algebra_derivation_space(&poly, DerivationKind::TwoSided);
    let shape_ok = der.basis_ops().iter().all(|op| {
        op.column(0).is_empty() && op.get(0, 1).is_zero()
    });
    pass &= der.dimension() == 2 && shape_ok;
    notes.push(format!("k[t]/(t^3) {}", der.dimension()));

    let c2 = algebra_derivation_space(&group_algebra_c2(), DerivationKind::TwoSided).dimension();
    pass &= c2 == 0;
    notes.push(format!("k[C2] {c2}"));

    let k_dims: Vec<usize> = [DerivationKind::TwoSided, DerivationKind::Left, DerivationKind::Right]
        .into_iter()
        .map(|kind| algebra_derivation_space(&field(), kind).dimension())
        .collect();
    pass &= k_dims == [0, 0, 0];
    notes.push(format!("k {k_dims:?}"));
    outcome(pass, notes.join(", "))
}

fn coincidence() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["M2", "poly3", "C2", "Q"] {
        let d = Dialgebra::from_associative(&catalog(name).unwrap());
        let der = derivation_space(&d);
        let dider = diderivation_space(&d);
        let ok = der.contains_subspace(&dider).unwrap() && dider.contains_subspace(&der).unwrap();
        pass &= ok;
        notes.push(format!("{} {}={}", d.name, der.dimension(), dider.dimension()));
    }
    outcome(pass, notes.join(", "))
}

fn bimodule() -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    for (i, alg) in [matrix_algebra(2).unwrap(), truncated_poly(3).unwrap()].iter().enumerate() {
        let d = kp_window(Window::new(1, 1), alg).unwrap();
        let der = derivation_space(&d).basis_ops();
        let dider = diderivation_space(&d).basis_ops();
        let mut rng = rng_from_seed(800 + i as u64);
        while checked < 10 * (i + 1) {
            let (Some(x), Some(y)) = (random_combination(&mut rng, &der), random_combination(&mut rng, &dider)) else {
                continue;
            };
            checked += 1;
            if !is_diderivation(&d, &bracket(&x, &y).unwrap()).unwrap().is_pass() {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{checked} pairs, {failures} failures"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_dialg");
    let run = |threads: Option<&str>| {
        let mut cmd = Command::new(bin);
        cmd.args(["compare", "--algebra", "builtin:M2", "--window", "1", "1", "--seed", "7", "--trials", "10"]);
        match threads {
            Some(t) => cmd.env("DIALG_THREADS", t),
            None => cmd.env_remove("DIALG_THREADS"),
        };
        cmd.output().expect("binary runs")
    };
    let a = run(None);
    let b = run(None);
    let one = run(Some("1"));
    let four = run(Some("4"));
    let same = a.stdout == b.stdout && a.stdout == one.stdout && a.stdout == four.stdout;
    let valid = !a.stdout.is_empty()
        && serde_json::from_slice::<serde_json::Value>(&a.stdout).is_ok()
        && [&a, &b, &one, &four].iter().all(|o| o.status.code() == a.status.code());
    outcome(
        same && valid,
        format!("{} bytes, identical across repeat and DIALG_THREADS=1/4: {same}", a.stdout.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 axiom suite", axiom_suite),
        ("2 inner operators", inner_operator_suite),
        ("3 derivation theorem soundness", der_soundness),
        ("4 diderivation theorem soundness", dider_soundness),
        ("5 completeness at truncation", completeness),
        ("6 classical oracles", classical_oracles),
        ("7 coincidence", coincidence),
        ("8 bimodule", bimodule),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {name}: {} ({secs:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
