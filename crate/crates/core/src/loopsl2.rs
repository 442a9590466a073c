//! Finite-dimensional modules of the quantum loop algebra of sl₂.
//!
//! Evaluation modules are built in the Drinfeld presentation, certified against
//! the defining relations, and translated to Chevalley generators. Tensor
//! products use the coproduct on Chevalley generators only.

use std::collections::BTreeMap;

use crate::linmat::{commutator, qbracket, Grading, Matrix};
use crate::scalars::{qbinom, qdiff, qint, Scalar};
use crate::series::series_log;
use crate::{Check, Error, Exec, Report, Result};

/// Highest weight and evaluation point of V_n(a).
#[derive(Clone, Debug, PartialEq)]
pub struct EvalParams {
    pub n: usize,
    pub a: Scalar,
}

impl EvalParams {
    pub fn new(n: usize, a: Scalar) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Domain("evaluation parameter must be nonzero".into()));
        }
        Ok(EvalParams { n, a })
    }
}

/// Evaluation module in the Drinfeld presentation.
///
/// `xp`/`xm` hold x^±_k for |k| ≤ `span`; `psi[k]` is ψ_k and `phi[k]` is φ_{−k}
/// for 0 ≤ k ≤ `span`; `h` holds h_k for 1 ≤ |k| ≤ `span`.
#[derive(Clone, Debug)]
pub struct LoopModule {
    pub params: EvalParams,
    pub span: i64,
    pub k: Matrix,
    pub k_inv: Matrix,
    pub xp: BTreeMap<i64, Matrix>,
    pub xm: BTreeMap<i64, Matrix>,
    pub psi: Vec<Matrix>,
    pub phi: Vec<Matrix>,
    pub h: BTreeMap<i64, Matrix>,
    pub grading: Grading,
}

/// Module given by Chevalley generators E_i, F_i, K_i (i = 0..nodes).
#[derive(Clone, Debug, PartialEq)]
pub struct KmModule {
    pub e: Vec<Matrix>,
    pub f: Vec<Matrix>,
    pub k: Vec<Matrix>,
    pub grading: Grading,
    pub label: String,
}

impl KmModule {
    pub fn dim(&self) -> usize {
        self.grading.dim()
    }

    pub fn nodes(&self) -> usize {
        self.k.len()
    }

    pub fn k_inv(&self, i: usize) -> Matrix {
        self.k[i].inv_diag().expect("K_i is diagonal and invertible")
    }
}

/// The one-dimensional trivial module for the affine sl₂ Chevalley generators.
pub fn trivial_km() -> KmModule {
    KmModule {
        e: vec![Matrix::zeros(1, 1); 2],
        f: vec![Matrix::zeros(1, 1); 2],
        k: vec![Matrix::identity(1); 2],
        grading: Grading::scalar(vec![0]),
        label: "trivial".into(),
    }
}

fn xp_matrix(p: &EvalParams, k: i64) -> Matrix {
    let n = p.n as i64;
    let d = p.n + 1;
    let mut m = Matrix::zeros(d, d);
    for j in 1..d {
        let jj = j as i64;
        let f = (&p.a * &Scalar::q_pow(n - 2 * jj + 2)).pow(k);
        m.set(j - 1, j, &f * &qint(n - jj + 1));
    }
    m
}

fn xm_matrix(p: &EvalParams, k: i64) -> Matrix {
    let n = p.n as i64;
    let d = p.n + 1;
    let mut m = Matrix::zeros(d, d);
    for j in 0..d - 1 {
        let jj = j as i64;
        let f = (&p.a * &Scalar::q_pow(n - 2 * jj)).pow(k);
        m.set(j + 1, j, &f * &qint(jj + 1));
    }
    m
}

/// Stored index span needed for a relation window and a series order.
pub fn span_for(window: usize, order: usize) -> i64 {
    (2 * window + 2).max(order + 1) as i64
}

/// Builds V_n(a) and certifies the Drinfeld relations on `window`.
pub fn build_evaluation(p: &EvalParams, window: usize, order: usize) -> Result<LoopModule> {
    let v = evaluation_unchecked(p, window, order);
    let rep = verify_drinfeld_relations(&v, window, Exec::Sequential);
    match rep.failures().first() {
        None => Ok(v),
        Some(c) => Err(Error::Domain(format!("relation {} violated: {}", c.name, c.detail))),
    }
}

/// Builds V_n(a) without running the relation suite.
pub fn evaluation_unchecked(p: &EvalParams, window: usize, order: usize) -> LoopModule {
    let n = p.n as i64;
    let d = p.n + 1;
    let span = span_for(window, order);
    let k = Matrix::diag((0..d as i64).map(|j| Scalar::q_pow(n - 2 * j)).collect());
    let k_inv = k.inv_diag().expect("K invertible");
    let xp: BTreeMap<i64, Matrix> = (-span..=span).map(|i| (i, xp_matrix(p, i))).collect();
    let xm: BTreeMap<i64, Matrix> = (-span..=span).map(|i| (i, xm_matrix(p, i))).collect();
    let grading = Grading::scalar((0..d as i64).map(|j| -j).collect());
    let mut v = LoopModule {
        params: p.clone(),
        span,
        k,
        k_inv,
        xp,
        xm,
        psi: Vec::new(),
        phi: Vec::new(),
        h: BTreeMap::new(),
        grading,
    };
    v.refresh_cartan();
    v
}

impl LoopModule {
    pub fn dim(&self) -> usize {
        self.params.n + 1
    }

    pub fn xp(&self, k: i64) -> Result<&Matrix> {
        self.xp.get(&k).ok_or_else(|| Error::Insufficient(format!("x+_{k} outside stored span")))
    }

    pub fn xm(&self, k: i64) -> Result<&Matrix> {
        self.xm.get(&k).ok_or_else(|| Error::Insufficient(format!("x-_{k} outside stored span")))
    }

    /// ψ_m for m ≥ 0, φ_m for m ≤ 0 (both zero on the wrong side).
    pub fn psi_at(&self, m: i64) -> Matrix {
        if m >= 0 {
            self.psi.get(m as usize).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(), self.dim()))
        } else {
            Matrix::zeros(self.dim(), self.dim())
        }
    }

    pub fn phi_at(&self, m: i64) -> Matrix {
        if m <= 0 {
            self.phi.get((-m) as usize).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(), self.dim()))
        } else {
            Matrix::zeros(self.dim(), self.dim())
        }
    }

    /// Recomputes ψ, φ and h from the stored x^±.
    pub fn refresh_cartan(&mut self) {
        let dq = qdiff();
        let x0 = self.xm[&0].clone();
        self.psi = vec![self.k.clone()];
        self.phi = vec![self.k_inv.clone()];
        for m in 1..=self.span {
            self.psi.push(commutator(&self.xp[&m], &x0).scale(&dq));
            self.phi.push(commutator(&self.xp[&-m], &x0).scale(&-&dq));
        }
        let n = self.span as usize + 1;
        let up: Vec<Matrix> = self.psi.iter().map(|p| &self.k_inv * p).collect();
        let down: Vec<Matrix> = self.phi.iter().map(|p| &self.k * p).collect();
        let lp = series_log(&up, n);
        let lm = series_log(&down, n);
        let dinv = dq.inv().expect("nonzero");
        self.h.clear();
        for m in 1..n {
            self.h.insert(m as i64, lp[m].scale(&dinv));
            self.h.insert(-(m as i64), lm[m].scale(&-&dinv));
        }
    }
}

/// Checks the Drinfeld relations on indices |k|, |l| ≤ `window`.
pub fn verify_drinfeld_relations(v: &LoopModule, window: usize, exec: Exec) -> Report {
    let w = window as i64;
    let mut rep = Report::new("drinfeld");
    if 2 * w + 2 > v.span {
        rep.push(Check::inconclusive("window", format!("window {w} needs span {}, stored {}", 2 * w + 2, v.span)));
        return rep;
    }
    let dq = qdiff();
    let dinv = dq.inv().expect("nonzero");
    let pairs: Vec<(i64, i64)> = (-w..=w).flat_map(|k| (-w..=w).map(move |l| (k, l))).collect();
    let signs = [(1i64, &v.xp), (-1i64, &v.xm)];

    let kx: Vec<String> = signs
        .iter()
        .flat_map(|(s, x)| {
            (-w..=w).filter_map(move |k| {
                let lhs = &(&v.k * &x[&k]) * &v.k_inv;
                (lhs != x[&k].scale(&Scalar::q_pow(2 * s))).then(|| format!("sign {s}, k={k}"))
            })
        })
        .collect();
    rep.push(Check::from_failures("K x", 2 * (2 * w as usize + 1), &kx));

    let xx = exec.map(pairs.clone(), |(k, l)| {
        let lhs = commutator(&v.xp[&k], &v.xm[&l]);
        let rhs = (&v.psi_at(k + l) - &v.phi_at(k + l)).scale(&dinv);
        (lhs != rhs).then(|| format!("k={k}, l={l}"))
    });
    let xx: Vec<String> = xx.into_iter().flatten().collect();
    rep.push(Check::from_failures("x+ x-", pairs.len(), &xx));

    let four = exec.map(pairs.clone(), |(k, l)| {
        let mut bad = Vec::new();
        for (s, x) in signs {
            let t = Scalar::q_pow(2 * s);
            let lhs = qbracket(&x[&(k + 1)], &x[&l], &t);
            let rhs = &(&x[&k] * &x[&(l + 1)]).scale(&t) - &(&x[&(l + 1)] * &x[&k]);
            if lhs != rhs {
                bad.push(format!("sign {s}, k={k}, l={l}"));
            }
        }
        bad
    });
    let four: Vec<String> = four.into_iter().flatten().collect();
    rep.push(Check::from_failures("x x exchange", 2 * pairs.len(), &four));

    let hx_pairs: Vec<(i64, i64)> = pairs.iter().copied().filter(|(k, _)| *k != 0).collect();
    let hx = exec.map(hx_pairs.clone(), |(k, l)| {
        let mut bad = Vec::new();
        let c = &qint(2 * k) * &Scalar::ratio(1, k);
        for (s, x) in signs {
            let lhs = commutator(&v.h[&k], &x[&l]);
            if lhs != x[&(k + l)].scale(&(&c * &Scalar::int(s))) {
                bad.push(format!("sign {s}, k={k}, l={l}"));
            }
        }
        bad
    });
    let hx: Vec<String> = hx.into_iter().flatten().collect();
    rep.push(Check::from_failures("h x", 2 * hx_pairs.len(), &hx));

    let mut hh = Vec::new();
    let hs: Vec<i64> = (-w..=w).filter(|k| *k != 0).collect();
    for &k in &hs {
        if !commutator(&v.k, &v.h[&k]).is_zero() {
            hh.push(format!("K, h_{k}"));
        }
        for &l in &hs {
            if l > k && !commutator(&v.h[&k], &v.h[&l]).is_zero() {
                hh.push(format!("h_{k}, h_{l}"));
            }
        }
    }
    rep.push(Check::from_failures("h h", hs.len() * (hs.len() + 1) / 2, &hh));

    let mut grading = Vec::new();
    for k in -w..=w {
        for (s, x) in signs {
            if crate::linmat::assert_block_triangular(&x[&k], &v.grading, |sh| sh == [s]).is_err() {
                grading.push(format!("sign {s}, k={k}"));
            }
        }
    }
    rep.push(Check::from_failures("x degree", 2 * (2 * w as usize + 1), &grading));

    let ends = v.psi[0] == v.k
        && v.phi[0] == v.k_inv
        && v.psi[1] == (&v.k * &v.h[&1]).scale(&dq)
        && v.phi[1] == (&v.k_inv * &v.h[&-1]).scale(&-&dq);
    rep.push(Check::new("psi phi low terms", ends, ""));
    rep
}

/// Chevalley generators via E₁ = x⁺₀, F₁ = x⁻₀, K₁ = K, E₀ = −K⁻¹x⁻₁, F₀ = −x⁺₋₁K, K₀ = K⁻¹.
pub fn kacmoody_from_drinfeld(v: &LoopModule) -> Result<KmModule> {
    let e1 = v.xp(0)?.clone();
    let f1 = v.xm(0)?.clone();
    let e0 = -&(&v.k_inv * v.xm(1)?);
    let f0 = -&(v.xp(-1)? * &v.k);
    let m = KmModule {
        e: vec![e0, e1],
        f: vec![f0, f1],
        k: vec![v.k_inv.clone(), v.k.clone()],
        grading: v.grading.clone(),
        label: format!("V_{}({})", v.params.n, v.params.a),
    };
    let rep = verify_kacmoody(&m, &affine_sl2_cartan(), Exec::Sequential);
    match rep.failures().first() {
        None => Ok(m),
        Some(c) => Err(Error::Domain(format!("Chevalley relation {} violated: {}", c.name, c.detail))),
    }
}

pub fn affine_sl2_cartan() -> Vec<Vec<i64>> {
    vec![vec![2, -2], vec![-2, 2]]
}

/// q-Serre combination Σ_r (−1)^r [1−a, r] X_i^{1−a−r} X_j X_i^r.
pub fn serre(xi: &Matrix, xj: &Matrix, a: i64) -> Matrix {
    let top = 1 - a;
    let mut acc = Matrix::zeros(xi.rows(), xi.cols());
    for r in 0..=top {
        let c = qbinom(top, r).expect("0 <= r <= top");
        let c = if r % 2 == 0 { c } else { -c };
        let t = &(&xi.pow((top - r) as usize) * xj) * &xi.pow(r as usize);
        acc = &acc + &t.scale(&c);
    }
    acc
}

/// Chevalley relations for a generalized Cartan matrix, plus level zero (∏K_i = 1).
pub fn verify_kacmoody(m: &KmModule, cartan: &[Vec<i64>], exec: Exec) -> Report {
    let n = m.nodes();
    let d = m.dim();
    let dinv = qdiff().inv().expect("nonzero");
    let mut rep = Report::new("kac-moody");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let res = exec.map(pairs.clone(), |(i, j)| {
        let mut bad = Vec::new();
        let a = cartan[i][j];
        let ki = &m.k[i];
        let kinv = m.k_inv(i);
        if (&(ki * &m.e[j]) * &kinv) != m.e[j].scale(&Scalar::q_pow(a)) {
            bad.push(format!("K{i} E{j}"));
        }
        if (&(ki * &m.f[j]) * &kinv) != m.f[j].scale(&Scalar::q_pow(-a)) {
            bad.push(format!("K{i} F{j}"));
        }
        let ef = commutator(&m.e[i], &m.f[j]);
        let want = if i == j { (ki - &kinv).scale(&dinv) } else { Matrix::zeros(d, d) };
        if ef != want {
            bad.push(format!("[E{i}, F{j}]"));
        }
        if i != j {
            if !serre(&m.e[i], &m.e[j], a).is_zero() {
                bad.push(format!("Serre E{i} E{j}"));
            }
            if !serre(&m.f[i], &m.f[j], a).is_zero() {
                bad.push(format!("Serre F{i} F{j}"));
            }
            if !commutator(&m.k[i], &m.k[j]).is_zero() {
                bad.push(format!("[K{i}, K{j}]"));
            }
        }
        bad
    });
    let bad: Vec<String> = res.into_iter().flatten().collect();
    rep.push(Check::from_failures("chevalley", pairs.len(), &bad));
    let prod = m.k.iter().fold(Matrix::identity(d), |acc, k| &acc * k);
    rep.push(Check::new("level zero", prod == Matrix::identity(d), ""));
    rep
}

/// V ⊗ W through E ↦ E⊗1 + K⊗E, F ↦ F⊗K⁻¹ + 1⊗F, K ↦ K⊗K.
/// The grading concatenates the factors' degree vectors.
pub fn tensor(v: &KmModule, w: &KmModule) -> Result<KmModule> {
    if v.nodes() != w.nodes() {
        return Err(Error::Dimension(format!("{} vs {} nodes", v.nodes(), w.nodes())));
    }
    let (dv, dw) = (v.dim(), w.dim());
    let iv = Matrix::identity(dv);
    let iw = Matrix::identity(dw);
    let mut e = Vec::new();
    let mut f = Vec::new();
    let mut k = Vec::new();
    for i in 0..v.nodes() {
        e.push(&v.e[i].kron(&iw) + &v.k[i].kron(&w.e[i]));
        f.push(&v.f[i].kron(&w.k_inv(i)) + &iv.kron(&w.f[i]));
        k.push(v.k[i].kron(&w.k[i]));
    }
    Ok(KmModule { e, f, k, grading: v.grading.tensor(&w.grading), label: format!("{} x {}", v.label, w.label) })
}

/// (φ_{−k})_{k ≤ T} and (ψ_k)_{k ≤ T}; errors if any is not diagonal.
pub fn phi_series(v: &LoopModule, order: usize) -> Result<(Vec<Matrix>, Vec<Matrix>)> {
    if order as i64 > v.span {
        return Err(Error::Insufficient(format!("order {order} beyond stored span {}", v.span)));
    }
    let phi = v.phi[..=order].to_vec();
    let psi = v.psi[..=order].to_vec();
    for (k, m) in phi.iter().chain(&psi).enumerate() {
        if !m.is_diagonal() {
            return Err(Error::Domain(format!("Cartan series coefficient {k} is not diagonal")));
        }
    }
    Ok((phi, psi))
}

/// Commutation identities between φ and x^± used by the coproduct analysis.
pub fn verify_aux_identities(v: &LoopModule, order: usize) -> Report {
    let mut rep = Report::new("aux");
    let t = order as i64;
    let w = 3i64.min(v.span - t - 1).max(0);
    let q2 = Scalar::q_pow(2);
    let qm2 = Scalar::q_pow(-2);
    let q4m1 = &Scalar::q_pow(4) - &Scalar::one();
    let mut nak = Vec::new();
    let mut xphi = Vec::new();
    let mut total = 0;
    for r in 1..=t {
        for s in -w..=w {
            total += 1;
            let l = &(&v.phi_at(-r) * &v.xp[&s]) + &(&v.xp[&(s - 1)] * &v.phi_at(1 - r));
            let rr = (&(&v.xp[&s] * &v.phi_at(-r)) + &(&v.phi_at(1 - r) * &v.xp[&(s - 1)])).scale(&qm2);
            if l != rr {
                nak.push(format!("r={r}, s={s}"));
            }
            let mut rhs = (&v.phi_at(-r) * &v.xp[&s]).scale(&q2);
            for j in 1..=r {
                let c = &q4m1 * &Scalar::q_pow(2 * (j - 1));
                rhs = &rhs + &(&v.phi_at(j - r) * &v.xp[&(s - j)]).scale(&c);
            }
            if &v.xp[&s] * &v.phi_at(-r) != rhs {
                xphi.push(format!("r={r}, k={s}"));
            }
        }
    }
    rep.push(Check::from_failures("phi x homogeneous", total, &nak));
    rep.push(Check::from_failures("x phi expansion", total, &xphi));
    let mut lem = Vec::new();
    for m in -1..=t {
        let mut x = Matrix::zeros(v.dim(), v.dim());
        if m + 1 >= 0 {
            x = &x + &qbracket(&v.xm[&1], &v.phi_at(-(m + 1)), &qm2);
        }
        if m >= 0 {
            x = &x - &qbracket(&v.xm[&0], &v.phi_at(-m), &q2).scale(&qm2);
        }
        if !x.is_zero() {
            lem.push(format!("z^{m}"));
        }
    }
    rep.push(Check::from_failures("x- Phi bracket", (t + 2) as usize, &lem));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> Scalar {
        Scalar::q_pow(k)
    }

    #[test]
    fn evaluation_modules_certify() {
        for n in 0..4 {
            for a in [Scalar::one(), q(1), q(2), q(-1), Scalar::ratio(7, 5)] {
                let p = EvalParams::new(n, a).unwrap();
                let v = build_evaluation(&p, 3, 6).unwrap();
                let m = kacmoody_from_drinfeld(&v).unwrap();
                assert_eq!(&m.k[0] * &m.k[1], Matrix::identity(n + 1));
                assert!(verify_aux_identities(&v, 4).passed());
                phi_series(&v, 6).unwrap();
            }
        }
    }

    #[test]
    fn perturbed_module_fails() {
        let p = EvalParams::new(1, q(1)).unwrap();
        let mut v = evaluation_unchecked(&p, 3, 6);
        let x = v.xp[&1].scale(&q(1));
        v.xp.insert(1, x);
        let rep = verify_drinfeld_relations(&v, 3, Exec::Sequential);
        let bad = rep.checks.iter().find(|c| c.name == "x+ x-").unwrap();
        assert!(!bad.passed());
        assert!(bad.detail.contains("k=1, l="));
    }

    #[test]
    fn tensor_counit_and_weights() {
        let v1 = kacmoody_from_drinfeld(&build_evaluation(&EvalParams::new(1, q(1)).unwrap(), 1, 2).unwrap()).unwrap();
        let v2 = kacmoody_from_drinfeld(&build_evaluation(&EvalParams::new(1, q(3)).unwrap(), 1, 2).unwrap()).unwrap();
        let t = tensor(&v1, &trivial_km()).unwrap();
        assert_eq!(t.e, v1.e);
        assert_eq!(t.f, v1.f);
        let t = tensor(&v1, &v2).unwrap();
        assert_eq!(t.k[1], Matrix::diag(vec![q(2), q(0), q(0), q(-2)]));
        assert!(verify_kacmoody(&t, &affine_sl2_cartan(), Exec::Parallel).passed());
        assert_eq!(t.grading.deg(3), &[-1, -1]);
    }
}
