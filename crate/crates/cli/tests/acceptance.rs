//! Acceptance suite: one PASS/FAIL line per criterion, then a nonzero exit if any
//! criterion deviates from its recorded outcome.
//!
//! Runs without the libtest harness so the verdict lines are always printed.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qonsager_cli::{report_format, run, Command, Format, RunConfig};
use qonsager_core::loopsl2::{
    affine_sl2_cartan, build_evaluation, evaluation_unchecked, kacmoody_from_drinfeld, tensor, trivial_km,
    verify_aux_identities, verify_drinfeld_relations, verify_kacmoody, EvalParams, KmModule, LoopModule,
};
use qonsager_core::onsager::{
    eta_embed, family_on, onedim_character, onedim_drf_numeric, rationality_check, tau_dual_check,
    verify_luwang, verify_qdolangrady, OnsagerParams,
};
use qonsager_core::ranka::{
    ai_minus1_word_check, braid_compat_check, build_vector_evaluation, generate_rankn_family, omega_word,
    rankn_spectral_check, verify_grel, AffineTypeA, RankParams,
};
use qonsager_core::scalars::NumericPoint;
use qonsager_core::spectra::{
    coproduct_aplus_check, drf_suite, factorization_check, generalized_factorization_check, lweights_eval,
    lweights_tensor, tensor_grouplike_check, DRF_FIT_TERMS,
};
use qonsager_core::{Exec, Report, Scalar};

const EXEC: Exec = Exec::Parallel;

// Pinned budgets and tolerances.
const C1_SECONDS: f64 = 30.0;
const C2_SECONDS: f64 = 120.0;
const C4_SECONDS: f64 = 180.0;
const C7_SECONDS: f64 = 180.0;
const C8_SECONDS: f64 = 300.0;
const ONEDIM_RESIDUAL: f64 = 1e-8;
const RANKN_RESIDUAL: f64 = 1e-9;
const Q0: f64 = 1.3;
const LW_WINDOW: usize = 4;
const M_MAX: usize = 3;
const SERIES_ORDER: usize = 6;
const COPRODUCT_ORDER: usize = 4;

fn s(x: &str) -> Scalar {
    Scalar::parse(x).unwrap()
}

fn eval(n: usize, a: &str) -> LoopModule {
    build_evaluation(&EvalParams::new(n, s(a)).unwrap(), 2, 4 * SERIES_ORDER + 4).unwrap()
}

fn km(n: usize, a: &str) -> KmModule {
    kacmoody_from_drinfeld(&eval(n, a)).unwrap()
}

fn params(c: [&str; 2], sv: [&str; 2]) -> OnsagerParams {
    OnsagerParams::new([s(c[0]), s(c[1])], [s(sv[0]), s(sv[1])]).unwrap()
}

const CS: [[&str; 2]; 2] = [["1", "1"], ["q^2", "q^-2"]];
const SS: [[&str; 2]; 3] = [["0", "0"], ["1", "0"], ["1", "q"]];

/// The rank-one modules of criterion 2: V_n(q) for n ≤ 2 and V₁(q)⊗V₁(q³).
fn rank_one_modules() -> Vec<(String, KmModule)> {
    let mut out: Vec<(String, KmModule)> = (0..=2).map(|n| (format!("V_{n}(q)"), km(n, "q"))).collect();
    out.push(("V_1(q) x V_1(q^3)".into(), tensor(&km(1, "q"), &km(1, "q^3")).unwrap()));
    out
}

fn rank_one_configs() -> Vec<(String, OnsagerParams, KmModule)> {
    let mods = rank_one_modules();
    let mut out = Vec::new();
    for c in CS {
        for sv in SS {
            for (label, m) in &mods {
                out.push((format!("c={c:?} s={sv:?} {label}"), params(c, sv), m.clone()));
            }
        }
    }
    out
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn first_failure(tag: &str, r: &Report) -> Option<String> {
    r.failures().first().map(|c| format!("{tag}: {} {}", c.name, c.detail))
}

fn collect(failures: Vec<Option<String>>, total: usize, elapsed: f64, budget: f64) -> Outcome {
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    let pass = bad.is_empty() && elapsed < budget;
    let mut detail = format!("{total} cases, {elapsed:.1}s");
    if budget.is_finite() {
        detail.push_str(&format!(" (budget {budget:.0}s)"));
    }
    if let Some(b) = bad.first() {
        detail.push_str(&format!("; {} failing, first: {b}", bad.len()));
    }
    Outcome { pass, detail }
}

fn criterion1() -> Outcome {
    let t = Instant::now();
    let cases: Vec<(usize, &str)> =
        (0..=3).flat_map(|n| ["1", "q", "q^2", "q^-1"].into_iter().map(move |a| (n, a))).collect();
    let total = cases.len();
    let bad = EXEC.map(cases, |(n, a)| {
        let v = evaluation_unchecked(&EvalParams::new(n, s(a)).unwrap(), 3, 8);
        let tag = format!("V_{n}({a})");
        first_failure(&tag, &verify_drinfeld_relations(&v, 3, Exec::Sequential))
            .or_else(|| first_failure(&tag, &verify_aux_identities(&v, 3)))
            .or_else(|| {
                let k = kacmoody_from_drinfeld(&v).unwrap();
                first_failure(&tag, &verify_kacmoody(&k, &affine_sl2_cartan(), Exec::Sequential))
            })
    });
    collect(bad, total, t.elapsed().as_secs_f64(), C1_SECONDS)
}

fn criterion2() -> Outcome {
    let t = Instant::now();
    let cfgs = rank_one_configs();
    let total = cfgs.len();
    let bad = EXEC.map(cfgs, |(tag, p, m)| {
        let f = family_on(&p, &m, LW_WINDOW + M_MAX + 1).unwrap();
        first_failure(&tag, &verify_luwang(&f, LW_WINDOW, M_MAX, Exec::Sequential))
            .or_else(|| first_failure(&tag, &verify_qdolangrady(&eta_embed(&p, &m).unwrap(), &p)))
    });
    collect(bad, total, t.elapsed().as_secs_f64(), C2_SECONDS)
}

fn criterion3() -> Outcome {
    let t = Instant::now();
    let cfgs = rank_one_configs();
    let total = cfgs.len();
    let bad = EXEC.map(cfgs, |(tag, p, m)| {
        let f = family_on(&p, &m, SERIES_ORDER + 2).unwrap();
        let rat = rationality_check(&f, SERIES_ORDER).unwrap();
        let names: Vec<&str> = rat.report.checks.iter().map(|c| c.name.as_str()).collect();
        if rat.report.checks.len() != 3 || !names.contains(&"C-symmetry") {
            return Some(format!("{tag}: unexpected checks {names:?}"));
        }
        first_failure(&tag, &rat.report)
    });
    collect(bad, total, t.elapsed().as_secs_f64(), f64::INFINITY)
}

/// V₁(q), V₂(q), V₃(q) and V₁(q)⊗V₁(q³) with their ℓ-weights.
fn factorization_modules() -> Vec<(String, KmModule, Vec<qonsager_core::spectra::LWeight>)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let v = eval(n, "q");
        out.push((format!("V_{n}(q)"), kacmoody_from_drinfeld(&v).unwrap(), lweights_eval(&v, SERIES_ORDER).unwrap()));
    }
    let (a, b) = (eval(1, "q"), eval(1, "q^3"));
    let m = tensor(&kacmoody_from_drinfeld(&a).unwrap(), &kacmoody_from_drinfeld(&b).unwrap()).unwrap();
    let lw = lweights_tensor(&lweights_eval(&a, SERIES_ORDER).unwrap(), &lweights_eval(&b, SERIES_ORDER).unwrap());
    out.push(("V_1(q) x V_1(q^3)".into(), m, lw));
    out
}

fn criterion4() -> Outcome {
    let t = Instant::now();
    let mut cases = Vec::new();
    for c in CS {
        for (label, m, lw) in factorization_modules() {
            cases.push((format!("c={c:?} {label}"), params(c, ["0", "0"]), m, lw));
        }
    }
    let total = cases.len();
    let bad = EXEC.map(cases, |(tag, p, m, lw)| {
        let f = family_on(&p, &m, SERIES_ORDER + 1).unwrap();
        first_failure(&tag, &factorization_check(&f, &m.grading, &lw, SERIES_ORDER, Exec::Sequential).unwrap())
    });
    collect(bad, total, t.elapsed().as_secs_f64(), C4_SECONDS)
}

fn criterion5() -> Outcome {
    let t = Instant::now();
    let p = params(["1", "1"], ["0", "0"]);
    let mods = vec![("V_1(q)", eval(1, "q")), ("V_2(q)", eval(2, "q")), ("V_1(q^2)", eval(1, "q^2"))];
    let total = mods.len();
    let bad = EXEC.map(mods, |(tag, v)| {
        let lines = drf_suite(&p, &v, SERIES_ORDER, 2 * v.dim() + 4).unwrap();
        if lines.len() != v.dim() {
            return Some(format!("{tag}: {} lines", lines.len()));
        }
        lines.iter().find_map(|l| {
            let tag = format!("{tag} line {}", l.line);
            if l.drf.as_ref().and_then(|d| d.prefactor.as_ref()).is_none() {
                return Some(format!("{tag}: no exact prefactor for C = q^4"));
            }
            // every line must carry the full set of identities
            if l.report.checks.len() < 7 {
                return Some(format!("{tag}: only {} checks", l.report.checks.len()));
            }
            first_failure(&tag, &l.report)
        })
    });
    collect(bad, total, t.elapsed().as_secs_f64(), f64::INFINITY)
}

/// c_i and s_i drawn as ±(small ratio)·q^k.
fn random_scalar(rng: &mut ChaCha8Rng, allow_zero: bool) -> Scalar {
    if allow_zero && rng.gen_bool(0.2) {
        return Scalar::zero();
    }
    let num = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den = rng.gen_range(1..=2);
    &Scalar::ratio(num, den) * &Scalar::q_pow(rng.gen_range(-2..=2))
}

fn criterion6() -> Outcome {
    let t = Instant::now();
    let point = NumericPoint::real(Q0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d5a_2024);
    let mut bad = Vec::new();
    let mut total = 0;
    for k in 0..5 {
        let c = [random_scalar(&mut rng, false), random_scalar(&mut rng, false)];
        let sv = [random_scalar(&mut rng, true), random_scalar(&mut rng, true)];
        let p = OnsagerParams::new(c, sv).unwrap();
        let tag = format!("draw {k} c={:?} s={:?}", p.c, p.s);
        let (_, rep) = onedim_character(&p, SERIES_ORDER).unwrap();
        bad.push(first_failure(&tag, &rep));
        let drf = onedim_drf_numeric(&p, &point).unwrap();
        if !(drf.residual <= ONEDIM_RESIDUAL) {
            bad.push(Some(format!("{tag}: residual {:.3e}", drf.residual)));
        }
        total += 1;
    }
    // degeneration witnesses: (c, s, expected degree)
    let witnesses = [
        (["1", "1"], ["0", "0"], 0),
        (["q^2", "q^-2"], ["0", "0"], 0),
        (["q^2", "1"], ["q", "1"], 1),
        (["q^2", "1"], ["-q", "1"], 1),
        (["4", "1"], ["2*q", "q"], 1),
        (["1", "1"], ["1", "q"], 2),
        (["q^2", "q^-2"], ["1", "0"], 2),
    ];
    for (c, sv, want) in witnesses {
        let p = params(c, sv);
        let drf = onedim_drf_numeric(&p, &point).unwrap();
        let tag = format!("witness c={c:?} s={sv:?}");
        if drf.degree != want {
            bad.push(Some(format!("{tag}: degree {} expected {want}", drf.degree)));
        }
        if !(drf.residual <= ONEDIM_RESIDUAL) {
            bad.push(Some(format!("{tag}: residual {:.3e}", drf.residual)));
        }
        total += 1;
    }
    collect(bad, total, t.elapsed().as_secs_f64(), f64::INFINITY)
}

/// Returns the overall outcome and whether only the recorded deviation failed.
fn criterion7() -> (Outcome, bool) {
    let t = Instant::now();
    let a = eval(1, "q");
    let b_km = km(1, "q^3");
    let mut cases: Vec<(String, Box<dyn Fn() -> Report + Send + Sync>)> = Vec::new();
    for c in CS {
        for sv in SS {
            let p = params(c, sv);
            let a1 = a.clone();
            let tag = format!("coproduct (1-dim, V_1(q)) c={c:?} s={sv:?}");
            cases.push((tag, Box::new(move || coproduct_aplus_check(&p, &trivial_km(), &a1, COPRODUCT_ORDER).unwrap())));
        }
    }
    let deviation = "coproduct (V_1(q^3), V_1(q)) c=[\"1\", \"1\"] s=[\"1\", \"q\"]".to_string();
    {
        let p = params(["1", "1"], ["1", "q"]);
        let (a1, b1) = (a.clone(), b_km.clone());
        cases.push((deviation.clone(), Box::new(move || coproduct_aplus_check(&p, &b1, &a1, COPRODUCT_ORDER).unwrap())));
    }
    for c in CS {
        for sv in [["1", "0"], ["1", "q"]] {
            for (label, m, _) in factorization_modules() {
                let p = params(c, sv);
                let tag = format!("generalized {label} c={c:?} s={sv:?}");
                cases.push((tag, Box::new(move || generalized_factorization_check(&p, &m, SERIES_ORDER).unwrap())));
            }
        }
        for sv in SS {
            let p = params(c, sv);
            let (v, w) = (km(1, "q"), b_km.clone());
            let tag = format!("tensor group-like V_1(q) x V_1(q^3) c={c:?} s={sv:?}");
            cases.push((tag, Box::new(move || tensor_grouplike_check(&p, &v, &w, SERIES_ORDER).unwrap())));
        }
    }
    let total = cases.len();
    let results = EXEC.map(cases, |(tag, f)| (tag.clone(), first_failure(&tag, &f())));
    let elapsed = t.elapsed().as_secs_f64();
    let only_recorded = results.iter().all(|(tag, fail)| fail.is_some() == (*tag == deviation));
    let out = collect(results.into_iter().map(|(_, f)| f).collect(), total, elapsed, C7_SECONDS);
    let recorded = only_recorded && elapsed < C7_SECONDS;
    (out, recorded)
}

fn criterion8() -> Outcome {
    let t = Instant::now();
    let point = NumericPoint::real(Q0).unwrap();
    let mut bad = Vec::new();
    let mut total = 0;
    for n in [2usize, 3] {
        let ty = AffineTypeA::new(n).unwrap();
        let m = build_vector_evaluation(&ty, &s("q^2")).unwrap();
        let p = RankParams::new(&ty, vec![Scalar::one(); n + 1], vec![Scalar::zero(); n + 1]).unwrap();
        for i in 1..=n {
            let tag = format!("N={n} node {i}");
            let w = omega_word(i, n).unwrap();
            if w.len() != i * (n - i + 1) {
                bad.push(Some(format!("{tag}: omega length {}", w.len())));
            }
            bad.push(first_failure(&tag, &ai_minus1_word_check(&m, &p, i).unwrap()));
            bad.push(first_failure(&tag, &braid_compat_check(&m, &p, i).unwrap()));
            total += 1;
        }
        let f = generate_rankn_family(&m, &p, 2 + M_MAX + 1, EXEC).unwrap();
        let grel = verify_grel(&f, 2, M_MAX, EXEC);
        if !grel.checks.iter().any(|c| c.name.contains("Theta") && c.name.contains("cross")) {
            bad.push(Some(format!("N={n}: no cross-node Theta check in {:?}", grel.checks.iter().map(|c| &c.name).collect::<Vec<_>>())));
        }
        bad.push(first_failure(&format!("N={n} grel"), &grel));
        let (rep, fits) = rankn_spectral_check(&f, &m.grading, SERIES_ORDER, DRF_FIT_TERMS, &point).unwrap();
        bad.push(first_failure(&format!("N={n} spectra"), &rep));
        for fit in fits.iter().flatten() {
            if !(fit.residual <= RANKN_RESIDUAL) {
                bad.push(Some(format!("N={n}: fit residual {:.3e}", fit.residual)));
            }
        }
    }
    collect(bad, total, t.elapsed().as_secs_f64(), C8_SECONDS)
}

fn criterion9() -> Outcome {
    let t = Instant::now();
    let cfgs = rank_one_configs();
    let total = cfgs.len();
    let bad = EXEC.map(cfgs, |(tag, p, m)| {
        let f = family_on(&p, &m, LW_WINDOW + M_MAX + 1).unwrap();
        first_failure(&tag, &tau_dual_check(&f, LW_WINDOW, M_MAX, Exec::Sequential))
    });
    collect(bad, total, t.elapsed().as_secs_f64(), f64::INFINITY)
}

fn criterion10() -> Outcome {
    let t = Instant::now();
    let cfg = RunConfig::from_json(
        r#"{
            "modules": [
                {"kind": "trivial"},
                {"kind": "eval", "n": 1, "a": "q"},
                {"kind": "eval", "n": 2, "a": "q^2"},
                {"kind": "tensor", "factors": [{"n": 1, "a": "q"}, {"n": 1, "a": "q^3"}]}
            ],
            "params": {"c": ["q^2", "q^-2"], "s": ["1", "q"]},
            "checks": ["scalars", "drinfeld", "kacmoody", "qdg", "luwang", "tau", "rationality",
                       "factorization", "generalized", "grouplike", "drf", "onedim",
                       "rank-kacmoody", "grel", "words", "braid"],
            "onedim": [{"c": ["1", "q"], "s": ["1", "q^-1"]}],
            "rank": {"N": 2, "a": "q^2", "c": ["1", "1", "1"], "s": ["0", "0", "0"]}
        }"#,
    )
    .unwrap();
    let first = report_format(&run(Command::All, &cfg, Exec::Parallel).unwrap(), Format::Json, false).unwrap();
    let second = report_format(&run(Command::All, &cfg, Exec::Sequential).unwrap(), Format::Json, false).unwrap();
    let pass = first == second;
    Outcome { pass, detail: format!("{} bytes, {:.1}s", first.len(), t.elapsed().as_secs_f64()) }
}

fn main() {
    // libtest-style filter arguments are ignored; `--list` must print nothing
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let line = |k: usize, name: &str, o: &Outcome, expected_pass: bool| -> bool {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {verdict} {name}: {}", o.detail);
        o.pass == expected_pass
    };
    let mut ok = true;
    ok &= line(1, "module certification", &criterion1(), true);
    ok &= line(2, "Lu-Wang and q-Dolan-Grady", &criterion2(), true);
    ok &= line(3, "rationality and C-symmetry", &criterion3(), true);
    ok &= line(4, "factorization", &criterion4(), true);
    ok &= line(5, "DRF suite", &criterion5(), true);
    ok &= line(6, "one-dimensional modules", &criterion6(), true);
    let (o7, recorded) = criterion7();
    line(7, "coproduct and group-like", &o7, o7.pass);
    if !o7.pass {
        println!(
            "             the only failing case is the recorded (V_1(b), V_1(a)) coproduct deviation: {}",
            if recorded { "yes" } else { "NO" }
        );
        ok &= recorded;
    }
    ok &= line(8, "higher rank", &criterion8(), true);
    ok &= line(9, "tau-duality", &criterion9(), true);
    ok &= line(10, "determinism", &criterion10(), true);
    if !ok {
        println!("acceptance: unexpected outcome");
        std::process::exit(1);
    }
}
