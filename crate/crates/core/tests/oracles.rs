//! Frozen oracle values. The rational numbers at q = 3/2 come from an
//! independent exact-fraction implementation of the family recursion; the
//! ℚ(q) strings are frozen outputs that later changes must reproduce.

use qonsager_core::loopsl2::{build_evaluation, kacmoody_from_drinfeld, EvalParams};
use qonsager_core::onsager::{family_on, generate_family, onedim_closed_form, OnsagerParams};
use qonsager_core::ranka::{build_vector_evaluation, generate_rankn_family, rankn_spectral_check, AffineTypeA, RankParams};
use qonsager_core::scalars::NumericPoint;
use qonsager_core::series::spoly_string;
use qonsager_core::spectra::{boundary_poly, drinfeld_data, lweights_eval};
use qonsager_core::{Exec, Matrix, Scalar};

const REL_TOL: f64 = 1e-12;

fn s(x: &str) -> Scalar {
    Scalar::parse(x).unwrap()
}

fn frac(x: &str) -> f64 {
    match x.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => x.parse().unwrap(),
    }
}

fn assert_at_three_halves(got: &Matrix, want: &[[&str; 2]; 2], what: &str) {
    let pt = NumericPoint::real(1.5).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let g = pt.eval(got.get(i, j)).unwrap();
            let w = frac(want[i][j]);
            assert!(g.im.abs() < 1e-12, "{what} ({i},{j}) not real");
            assert!((g.re - w).abs() <= REL_TOL * w.abs().max(1.0), "{what} ({i},{j}): {} vs {w}", g.re);
        }
    }
}

#[test]
fn v1_family_matches_fraction_oracle() {
    let v = build_evaluation(&EvalParams::new(1, Scalar::q()).unwrap(), 2, 8).unwrap();
    let m = kacmoody_from_drinfeld(&v).unwrap();
    let p = OnsagerParams::new([s("q^2"), s("q^-2")], [s("1"), s("q")]).unwrap();
    let f = family_on(&p, &m, 5).unwrap();
    let theta: [[[&str; 2]; 2]; 5] = [
        [["6/5", "0"], ["0", "6/5"]],
        [["845/96", "-325/108"], ["0", "-51545/3456"]],
        [["5801621/55296", "-2508025/62208"], ["0", "-423665549/1990656"]],
        [["36832739285/31850496", "-17639782225/35831808"], ["0", "-3122774462885/1146617856"]],
        [["241827130819061/18345885696", "-117238801949425/20639121408"], ["0", "-20861849142158789/660451885056"]],
    ];
    for (k, t) in theta.iter().enumerate() {
        assert_at_three_halves(&f.theta[k], t, &format!("Theta_{k}"));
    }
    let a: [(i64, [[&str; 2]; 2]); 7] = [
        (-3, [["6331/4374", "-201962288/1162261467"], ["729/64", "-53651/39366"]]),
        (-2, [["22/27", "-80192/1594323"], ["81/16", "-14/81"]]),
        (-1, [["8/27", "-128/2187"], ["9/4", "32/243"]]),
        (0, [["1", "-2/3"], ["1", "9/4"]]),
        (1, [["1/9", "-2687/288"], ["4/9", "37/18"]]),
        (2, [["5761/1296", "-17949407/165888"], ["16/81", "62249/5184"]]),
        (3, [["3361/11664", "-118687787327/95551488"], ["64/729", "249157/23328"]]),
    ];
    for (r, want) in &a {
        assert_at_three_halves(&f.a[r], want, &format!("A_{r}"));
    }
}

#[test]
fn onedim_family_matches_fraction_oracle() {
    let p = OnsagerParams::new([s("1"), s("q")], [s("1"), s("q^-1")]).unwrap();
    let b = [Matrix::scalar(1, p.s[0].clone()), Matrix::scalar(1, p.s[1].clone())];
    let f = generate_family(&b, &p, 6).unwrap();
    let pt = NumericPoint::real(1.5).unwrap();
    let theta = ["6/5", "5/6", "13/32", "495/32", "43929/1024", "151875/1024", "15077907/32768"];
    for (k, w) in theta.iter().enumerate() {
        let g = pt.eval(f.theta[k].get(0, 0)).unwrap().re;
        assert!((g - frac(w)).abs() <= REL_TOL * frac(w).abs(), "Theta_{k}");
    }
    let a = ["128/2187", "64/729", "4/9", "2/3", "27/8", "81/16", "6561/256"];
    for (k, w) in a.iter().enumerate() {
        let r = k as i64 - 3;
        let g = pt.eval(f.a[&r].get(0, 0)).unwrap().re;
        assert!((g - frac(w)).abs() <= REL_TOL * frac(w).abs(), "A_{r}");
    }
}

#[test]
fn frozen_onedim_closed_form() {
    let p = OnsagerParams::new([s("1"), s("1")], [s("1"), s("q")]).unwrap();
    let f = onedim_closed_form(&p).reduced();
    assert_eq!(
        f.to_string_exact(),
        "([1] + [q^4-2*q^2+1]*z + [q^7-q^5-2*q^4-q^3+q]*z^2 + [q^8-2*q^6+q^4]*z^3 + [q^8]*z^4) / \
         ([1] + [-2*q^4]*z^2 + [q^8]*z^4)"
    );
}

#[test]
fn frozen_v2_drinfeld_data() {
    let v = build_evaluation(&EvalParams::new(2, Scalar::q()).unwrap(), 2, 16).unwrap();
    let lw = lweights_eval(&v, 12).unwrap();
    let big_c = Scalar::q_pow(4);
    let got: Vec<[String; 4]> = lw
        .iter()
        .map(|w| {
            let d = drinfeld_data(w, 8).unwrap();
            let (bq, bqd) = boundary_poly(&d, &big_c).unwrap();
            [spoly_string(&d.q), spoly_string(&d.r), spoly_string(&bq), spoly_string(&bqd)]
        })
        .collect();
    assert_eq!(
        got[0],
        [
            "[1] + [-q^2-1]*z + [q^2]*z^2".to_string(),
            "1".into(),
            "[1] + [-q^6-q^4]*z + [q^10]*z^2".into(),
            "[1] + [(-q^2-1)/(q^2)]*z + [(1)/(q^2)]*z^2".into(),
        ]
    );
    assert_eq!(
        got[1],
        [
            "[1] + [-1]*z".to_string(),
            "[1] + [-q^4]*z".into(),
            "[1] + [(-q^8-1)/(q^4)]*z + [1]*z^2".into(),
            "[1] + [-q^8-1]*z + [q^8]*z^2".into(),
        ]
    );
    assert_eq!(
        got[2],
        [
            "1".to_string(),
            "[1] + [-q^4-q^2]*z + [q^6]*z^2".into(),
            "[1] + [(-q^2-1)/(q^4)]*z + [(1)/(q^6)]*z^2".into(),
            "[1] + [-q^8-q^6]*z + [q^14]*z^2".into(),
        ]
    );
}

#[test]
fn frozen_rank_two_fit() {
    let ty = AffineTypeA::new(2).unwrap();
    let m = build_vector_evaluation(&ty, &Scalar::q_pow(2)).unwrap();
    let p = RankParams::new(&ty, vec![Scalar::one(); 3], vec![Scalar::zero(); 3]).unwrap();
    let f = generate_rankn_family(&m, &p, 4, Exec::Sequential).unwrap();
    let (rep, fits) = rankn_spectral_check(&f, &m.grading, 4, 16, &NumericPoint::real(1.3).unwrap()).unwrap();
    assert!(rep.passed());
    assert_eq!(spoly_string(&fits[0][0].num), "[1] + [-q^5]*z");
    assert_eq!(spoly_string(&fits[0][0].den), "[1] + [-q]*z");
}
