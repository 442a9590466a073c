//! Truncated power series in z with scalar or matrix coefficients, the
//! exponential link between Θ- and H-series, rational functions in z over
//! ℚ(q), Padé reconstruction and expansion at infinity.

use crate::linmat::Matrix;
use crate::scalars::{qdiff, Scalar};
use crate::{Error, Result};

/// Coefficient ring for series and z-polynomials.
pub trait Coef: Clone + PartialEq + Send + Sync + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
}

impl Coef for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn one_like(&self) -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
}

impl Coef for Matrix {
    fn zero_like(&self) -> Self {
        Matrix::zeros(self.rows(), self.cols())
    }
    fn one_like(&self) -> Self {
        Matrix::identity(self.rows())
    }
    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: &Scalar) -> Self {
        Matrix::scale(self, s)
    }
}

/// Cauchy product truncated to `n` terms.
pub fn series_mul<T: Coef>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let zero = a.first().or(b.first()).expect("series_mul on empty series").zero_like();
    (0..n)
        .map(|k| {
            let mut acc = zero.clone();
            for i in 0..=k {
                if let (Some(x), Some(y)) = (a.get(i), b.get(k - i)) {
                    if !x.is_zero() && !y.is_zero() {
                        acc = acc.add(&x.mul(y));
                    }
                }
            }
            acc
        })
        .collect()
}

/// exp of a series with zero constant term and pairwise commuting coefficients.
pub fn series_exp<T: Coef>(x: &[T], n: usize) -> Vec<T> {
    let one = x[0].one_like();
    let mut e = vec![one];
    for k in 1..n {
        let mut acc = x[0].zero_like();
        for j in 1..=k {
            if let Some(xj) = x.get(j) {
                if !xj.is_zero() {
                    acc = acc.add(&xj.mul(&e[k - j]).scale(&Scalar::int(j as i64)));
                }
            }
        }
        e.push(acc.scale(&Scalar::ratio(1, k as i64)));
    }
    e
}

/// log of a series with constant term 1 and pairwise commuting coefficients.
pub fn series_log<T: Coef>(y: &[T], n: usize) -> Vec<T> {
    let zero = y[0].zero_like();
    let mut l = vec![zero.clone()];
    for k in 1..n {
        let mut acc = y.get(k).cloned().unwrap_or_else(|| zero.clone());
        let mut corr = zero.clone();
        for j in 1..k {
            if let Some(yk) = y.get(k - j) {
                if !l[j].is_zero() && !yk.is_zero() {
                    corr = corr.add(&l[j].mul(yk).scale(&Scalar::int(j as i64)));
                }
            }
        }
        acc = acc.sub(&corr.scale(&Scalar::ratio(1, k as i64)));
        l.push(acc);
    }
    l
}

/// Θ_0, …, Θ_{n−1} from H_1, … via 1 + Σ(q−q⁻¹)Θ_m z^m = exp((q−q⁻¹)ΣH_m z^m).
/// `h[0]` is ignored; Θ_0 is (q − q⁻¹)⁻¹ times the identity.
pub fn theta_from_h<T: Coef>(h: &[T], n: usize) -> Vec<T> {
    let d = qdiff();
    let dinv = d.inv().expect("q - 1/q is nonzero");
    let mut x: Vec<T> = h.iter().map(|v| v.scale(&d)).collect();
    x[0] = h[0].zero_like();
    let e = series_exp(&x, n);
    let mut out: Vec<T> = e.iter().map(|v| v.scale(&dinv)).collect();
    out[0] = h[0].one_like().scale(&dinv);
    out
}

/// Inverse of [`theta_from_h`]: H_m from Θ_m (index 0 of the result is zero).
pub fn h_from_theta<T: Coef>(theta: &[T], n: usize) -> Vec<T> {
    let d = qdiff();
    let dinv = d.inv().expect("q - 1/q is nonzero");
    let mut y: Vec<T> = theta.iter().map(|v| v.scale(&d)).collect();
    y[0] = theta[0].one_like();
    series_log(&y, n).iter().map(|v| v.scale(&dinv)).collect()
}

/// Trims trailing zero coefficients.
pub fn trim<T: Coef>(mut p: Vec<T>) -> Vec<T> {
    while p.last().is_some_and(Coef::is_zero) {
        p.pop();
    }
    p
}

/// p(λz).
pub fn dilate<T: Coef>(p: &[T], lambda: &Scalar) -> Vec<T> {
    let mut f = Scalar::one();
    p.iter()
        .map(|c| {
            let v = c.scale(&f);
            f = &f * lambda;
            v
        })
        .collect()
}

/// z^m p(λ/z) for m ≥ deg p.
pub fn reflect<T: Coef>(p: &[T], m: usize, lambda: &Scalar, zero: &T) -> Vec<T> {
    assert!(p.len() <= m + 1, "reflect degree bound too small");
    let mut out = vec![zero.clone(); m + 1];
    let mut f = Scalar::one();
    for (k, c) in p.iter().enumerate() {
        out[m - k] = c.scale(&f);
        f = &f * lambda;
    }
    trim(out)
}

/// Product of a coefficient polynomial by a scalar polynomial.
pub fn poly_mul_scalar<T: Coef>(p: &[T], r: &[Scalar]) -> Vec<T> {
    if p.is_empty() || r.is_empty() {
        return Vec::new();
    }
    let zero = p[0].zero_like();
    let mut out = vec![zero; p.len() + r.len() - 1];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in r.iter().enumerate() {
            if !b.is_zero() {
                out[i + j] = out[i + j].add(&a.scale(b));
            }
        }
    }
    trim(out)
}

pub fn poly_add<T: Coef>(a: &[T], b: &[T], zero: &T) -> Vec<T> {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).unwrap_or(zero).add(b.get(i).unwrap_or(zero))).collect())
}

pub fn poly_sub<T: Coef>(a: &[T], b: &[T], zero: &T) -> Vec<T> {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).unwrap_or(zero).sub(b.get(i).unwrap_or(zero))).collect())
}

/// Scalar polynomial from coefficients (ascending), trimmed.
pub fn spoly(c: Vec<Scalar>) -> Vec<Scalar> {
    trim(c)
}

/// Product of scalar polynomials.
pub fn spoly_mul(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    poly_mul_scalar(a, b)
}

/// Evaluation of a scalar polynomial.
pub fn spoly_eval(p: &[Scalar], x: &Scalar) -> Scalar {
    p.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
}

/// Division with remainder of scalar polynomials.
pub fn spoly_divrem(a: &[Scalar], b: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lb = b.last().expect("nonzero").inv().expect("nonzero leading coefficient");
    let mut quo = vec![Scalar::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let f = r.last().expect("nonzero") * &lb;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &(&f * bj);
        }
        quo[k] = f;
        r.pop();
        r = trim(r);
    }
    (trim(quo), r)
}

/// Monic gcd of scalar polynomials.
pub fn spoly_gcd(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = spoly_divrem(&a, &b);
        a = b;
        b = r;
    }
    match a.last() {
        None => a,
        Some(l) => {
            let li = l.inv().expect("nonzero");
            a.iter().map(|c| c * &li).collect()
        }
    }
}

/// Human-readable z-polynomial with exact coefficients.
pub fn spoly_string(p: &[Scalar]) -> String {
    match p {
        [] => return "0".into(),
        [c] => return c.to_string(),
        _ => {}
    }
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match k {
            0 => format!("[{c}]"),
            1 => format!("[{c}]*z"),
            _ => format!("[{c}]*z^{k}"),
        })
        .collect();
    terms.join(" + ")
}

/// Rational function num/den in z with coefficients in `T` and a scalar denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational<T: Coef> {
    pub num: Vec<T>,
    pub den: Vec<Scalar>,
    /// Zero of the coefficient type (fixes matrix shape).
    pub zero: T,
}

pub type RatFn = Rational<Scalar>;
pub type MatRatFn = Rational<Matrix>;

impl<T: Coef> Rational<T> {
    pub fn new(num: Vec<T>, den: Vec<Scalar>, zero: T) -> Self {
        let den = trim(den);
        assert!(!den.is_empty(), "rational function with zero denominator");
        Rational { num: trim(num), den, zero }
    }

    /// Taylor expansion at z = 0 to `n` terms; requires den(0) ≠ 0.
    pub fn expand(&self, n: usize) -> Result<Vec<T>> {
        let r0 = self.den[0].inv().map_err(|_| Error::Domain("denominator vanishes at z = 0".into()))?;
        let mut out: Vec<T> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.num.get(k).cloned().unwrap_or_else(|| self.zero.clone());
            for i in 1..=k.min(self.den.len() - 1) {
                if !self.den[i].is_zero() {
                    acc = acc.sub(&out[k - i].scale(&self.den[i]));
                }
            }
            out.push(acc.scale(&r0));
        }
        Ok(out)
    }

    /// Expansion at z = ∞: returns the top exponent e and coefficients of
    /// z^e, z^{e−1}, …, `n` of them.
    pub fn expand_at_infinity(&self, n: usize) -> Result<(i64, Vec<T>)> {
        if self.num.is_empty() {
            return Ok((0, vec![self.zero.clone(); n]));
        }
        let e = self.num.len() as i64 - self.den.len() as i64;
        let rn: Vec<T> = self.num.iter().rev().cloned().collect();
        let rd: Vec<Scalar> = self.den.iter().rev().cloned().collect();
        let g = Rational { num: rn, den: rd, zero: self.zero.clone() };
        Ok((e, g.expand(n)?))
    }

    /// f(λ z⁻¹) as a rational function of z.
    pub fn reflect(&self, lambda: &Scalar) -> Self {
        let m = self.num.len().max(self.den.len()).saturating_sub(1);
        Rational::new(
            reflect(&self.num, m, lambda, &self.zero),
            reflect(&self.den, m, lambda, &Scalar::zero()),
            self.zero.clone(),
        )
    }

    /// f(λ z).
    pub fn dilate(&self, lambda: &Scalar) -> Self {
        Rational::new(dilate(&self.num, lambda), dilate(&self.den, lambda), self.zero.clone())
    }

    /// Exact equality as rational functions (cross multiplication).
    pub fn same_function(&self, o: &Self) -> bool {
        poly_mul_scalar(&self.num, &o.den) == poly_mul_scalar(&o.num, &self.den)
    }
}

impl RatFn {
    pub fn scalar(num: Vec<Scalar>, den: Vec<Scalar>) -> Self {
        Rational::new(num, den, Scalar::zero())
    }

    pub fn constant(c: Scalar) -> Self {
        RatFn::scalar(vec![c], vec![Scalar::one()])
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFn::scalar(spoly_mul(&self.num, &o.num), spoly_mul(&self.den, &o.den)).reduced()
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.num.is_empty() {
            return Err(Error::Domain("division by the zero rational function".into()));
        }
        Ok(RatFn::scalar(spoly_mul(&self.num, &o.den), spoly_mul(&self.den, &o.num)).reduced())
    }

    pub fn inv(&self) -> Result<Self> {
        RatFn::constant(Scalar::one()).div(self)
    }

    /// Cancels common factors and normalizes the denominator's lowest nonzero coefficient to 1.
    pub fn reduced(&self) -> Self {
        if self.num.is_empty() {
            return RatFn::scalar(Vec::new(), vec![Scalar::one()]);
        }
        let g = spoly_gcd(&self.num, &self.den);
        let (n, _) = spoly_divrem(&self.num, &g);
        let (d, _) = spoly_divrem(&self.den, &g);
        let lead = d.iter().find(|c| !c.is_zero()).expect("nonzero denominator").inv().expect("nonzero");
        RatFn::scalar(n.iter().map(|c| c * &lead).collect(), d.iter().map(|c| c * &lead).collect())
    }

    pub fn to_string_exact(&self) -> String {
        if self.den.len() == 1 && self.den[0].is_one() {
            return spoly_string(&self.num);
        }
        format!("({}) / ({})", spoly_string(&self.num), spoly_string(&self.den))
    }
}

/// Berlekamp–Massey over ℚ(q): shortest connection polynomial C (C(0)=1) and
/// its length L with Σ_{i} C_i s_{k−i} = 0 for all L ≤ k < len(s).
pub fn berlekamp_massey(s: &[Scalar]) -> (Vec<Scalar>, usize) {
    let mut c = vec![Scalar::one()];
    let mut b = vec![Scalar::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = Scalar::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            if !c[i].is_zero() && !s[n - i].is_zero() {
                d += &(&c[i] * &s[n - i]);
            }
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let f = &d / &bd;
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, Scalar::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            if !bi.is_zero() {
                next[i + m] = &next[i + m] - &(&f * bi);
            }
        }
        if 2 * l <= n {
            b = c;
            l = n + 1 - l;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
        c = next;
    }
    (trim(c), l)
}

/// Number of coefficients beyond 2L required to certify a reconstruction.
pub const PADE_MARGIN: usize = 2;

/// Reconstructs the rational function with minimal denominator degree from a
/// scalar series. Fails with [`Error::Insufficient`] when the series is too
/// short to certify a recurrence of length ≤ `budget`.
pub fn pade_reconstruct(s: &[Scalar], budget: usize) -> Result<RatFn> {
    let (c, l) = berlekamp_massey(s);
    certify_length(l, s.len(), budget)?;
    let num: Vec<Scalar> = series_mul(&c, s, l);
    Ok(RatFn::scalar(num, c))
}

fn certify_length(l: usize, n: usize, budget: usize) -> Result<()> {
    if l > budget {
        return Err(Error::Insufficient(format!("recurrence length {l} exceeds budget {budget}")));
    }
    if n < 2 * l + PADE_MARGIN {
        return Err(Error::Insufficient(format!("{n} terms cannot certify recurrence length {l}")));
    }
    Ok(())
}

/// Padé reconstruction of a matrix series with a common scalar denominator.
pub fn pade_reconstruct_matrix(s: &[Matrix], budget: usize) -> Result<MatRatFn> {
    let first = s.first().ok_or_else(|| Error::Insufficient("empty series".into()))?;
    let zero = first.zero_like();
    let entries = first.rows() * first.cols();
    for attempt in 0..3i64 {
        let weights: Vec<Scalar> =
            (0..entries as i64).map(|e| Scalar::int(1 + e * (e + 3 + attempt) + 7 * attempt)).collect();
        let proj: Vec<Scalar> = s
            .iter()
            .map(|m| {
                crate::linmat::sum_scalars(
                    m.entries().zip(&weights).filter(|((_, _, v), _)| !v.is_zero()).map(|((_, _, v), w)| v * w).collect(),
                )
            })
            .collect();
        let (c, l) = berlekamp_massey(&proj);
        certify_length(l, s.len(), budget)?;
        let annihilated = (l..s.len()).all(|k| {
            let mut acc = zero.clone();
            for (i, ci) in c.iter().enumerate() {
                if i <= k && !ci.is_zero() {
                    acc = acc.add(&s[k - i].scale(ci));
                }
            }
            acc.is_zero()
        });
        if annihilated {
            let num = series_mul(&c.iter().map(|x| zero.one_like().scale(x)).collect::<Vec<_>>(), s, l);
            return Ok(Rational::new(num, c, zero));
        }
    }
    Err(Error::Insufficient("no projection produced a common recurrence".into()))
}

/// Certifies that `den` is a denominator for the matrix series `s`: the product
/// den·s must vanish from degree `num_bound + 1` on, with at least
/// `deg den + PADE_MARGIN` vanishing coefficients observed past the bound.
pub fn certify_denominator(s: &[Matrix], den: &[Scalar], num_bound: usize) -> Result<MatRatFn> {
    let first = s.first().ok_or_else(|| Error::Insufficient("empty series".into()))?;
    let zero = first.zero_like();
    let dd = den.len().saturating_sub(1);
    if s.len() < num_bound + 1 + dd + PADE_MARGIN {
        return Err(Error::Insufficient(format!("{} terms cannot certify a degree-{dd} denominator", s.len())));
    }
    let lift: Vec<Matrix> = den.iter().map(|x| zero.one_like().scale(x)).collect();
    let prod = series_mul(&lift, s, s.len());
    if let Some(k) = (num_bound + 1..s.len()).find(|&k| !prod[k].is_zero()) {
        return Err(Error::Domain(format!("candidate denominator leaves a nonzero coefficient at z^{k}")));
    }
    Ok(Rational::new(prod[..=num_bound.min(s.len() - 1)].to_vec(), den.to_vec(), zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    #[test]
    fn exp_log_roundtrip() {
        let h: Vec<Scalar> = vec![Scalar::zero(), s("q"), s("1/(q+1)"), s("3")];
        let th = theta_from_h(&h, 6);
        assert_eq!(th[0], qdiff().inv().unwrap());
        assert_eq!(th[1], h[1]);
        let back = h_from_theta(&th, 6);
        assert_eq!(&back[1..4], &h[1..4]);
        assert!(back[4..].iter().all(Scalar::is_zero));
    }

    #[test]
    fn pade_geometric() {
        let ser: Vec<Scalar> = (0..8).map(|_| Scalar::one()).collect();
        let f = pade_reconstruct(&ser, 4).unwrap();
        assert_eq!(f.num, vec![Scalar::one()]);
        assert_eq!(f.den, vec![Scalar::one(), Scalar::int(-1)]);
        let (e, inf) = f.expand_at_infinity(3).unwrap();
        assert_eq!(e, -1);
        assert_eq!(inf, vec![Scalar::int(-1); 3]);
    }

    #[test]
    fn pade_numerator_above_denominator() {
        // (1 + q z^3) / (1 - q^2 z)
        let f = RatFn::scalar(vec![s("1"), s("0"), s("0"), s("q")], vec![s("1"), s("-q^2")]);
        let ser = f.expand(12).unwrap();
        let g = pade_reconstruct(&ser, 6).unwrap();
        assert!(g.same_function(&f));
        assert!(pade_reconstruct(&ser[..5], 6).is_err());
    }

    #[test]
    fn reflect_and_dilate() {
        let f = RatFn::scalar(vec![s("1"), s("q")], vec![s("1"), s("-2")]);
        let g = f.reflect(&s("q^2"));
        // f(q^2/z) = (z + q^3)/(z - 2 q^2)
        assert!(g.same_function(&RatFn::scalar(vec![s("q^3"), s("1")], vec![s("-2*q^2"), s("1")])));
        assert!(g.reflect(&s("q^2")).same_function(&f));
        assert!(f.dilate(&s("q")).same_function(&RatFn::scalar(vec![s("1"), s("q^2")], vec![s("1"), s("-2*q")])));
    }

    #[test]
    fn polynomial_gcd() {
        let a = spoly_mul(&[s("1"), s("-q")], &[s("2"), s("1")]);
        let b = spoly_mul(&[s("1"), s("-q")], &[s("5"), s("q")]);
        let g = spoly_gcd(&a, &b);
        assert_eq!(g, vec![-s("q^-1"), Scalar::one()]);
    }
}
