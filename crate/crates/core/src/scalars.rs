//! Exact scalars in the rational function field ℚ(q), quantum integers,
//! and numeric specialization at a complex value of q.
//!
//! A [`Scalar`] is a reduced ratio of integer polynomials in q. After every
//! operation numerator and denominator are coprime in ℤ[q] and the
//! denominator has positive leading coefficient, so structural equality is
//! field equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Dense polynomial in ℤ[q], coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    c: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(v: BigInt) -> Self {
        Poly::from_coeffs(vec![v])
    }

    /// `v * q^d`.
    pub fn monomial(v: BigInt, d: usize) -> Self {
        let mut c = vec![BigInt::zero(); d];
        c.push(v);
        Poly::from_coeffs(c)
    }

    pub fn from_coeffs(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.c.last().cloned().unwrap_or_default()
    }

    /// Largest power of q dividing the polynomial.
    pub fn valuation(&self) -> usize {
        self.c.iter().take_while(|x| x.is_zero()).count()
    }

    /// `Some((v, d))` when the polynomial is the single term `v q^d`.
    pub fn as_monomial(&self) -> Option<(BigInt, usize)> {
        let v = self.valuation();
        (v + 1 == self.c.len()).then(|| (self.c[v].clone(), v))
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.c[k.min(self.c.len())..].to_vec())
    }

    fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in &self.c {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn scale(&self, v: &BigInt) -> Poly {
        if v.is_zero() {
            return Poly::zero();
        }
        Poly { c: self.c.iter().map(|x| x * v).collect() }
    }

    fn div_int(&self, v: &BigInt) -> Poly {
        Poly { c: self.c.iter().map(|x| x / v).collect() }
    }

    fn primitive(&self) -> Poly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            self.clone()
        } else {
            self.div_int(&g)
        }
    }

    fn neg(&self) -> Poly {
        Poly { c: self.c.iter().map(|x| -x).collect() }
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => c.push(a + b),
                (Some(a), None) => c.push(a.clone()),
                (None, Some(b)) => c.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::from_coeffs(c)
    }

    fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if o.c.len() == 1 {
            return self.scale(&o.c[0]);
        }
        if self.c.len() == 1 {
            return o.scale(&self.c[0]);
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(c)
    }

    /// Exact quotient in ℤ[q]; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by zero polynomial");
        if d.is_one() {
            return self.clone();
        }
        if let Some((v, k)) = d.as_monomial() {
            let p = self.shift_down(k);
            return if v.is_one() { p } else { p.div_int(&v) };
        }
        let mut r = self.c.clone();
        let dl = d.lc();
        let dd = d.degree();
        if r.len() < d.c.len() {
            assert!(self.is_zero(), "inexact polynomial division");
            return Poly::zero();
        }
        let mut quo = vec![BigInt::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (qk, rem) = top.div_rem(&dl);
            assert!(rem.is_zero(), "inexact polynomial division");
            for (j, dj) in d.c.iter().enumerate() {
                if !dj.is_zero() {
                    r[k + j] -= &qk * dj;
                }
            }
            quo[k] = qk;
        }
        assert!(r.iter().all(|x| x.is_zero()), "inexact polynomial division");
        Poly::from_coeffs(quo)
    }

    /// Remainder of `self` by `b` up to a nonzero integer factor, made primitive.
    fn prem_primitive(&self, b: &Poly) -> Poly {
        let mut r = self.clone();
        let bl = b.lc();
        let bd = b.degree();
        let unit = bl.is_one() || (-&bl).is_one();
        while !r.is_zero() && r.degree() >= bd {
            let rl = r.lc();
            let k = r.degree() - bd;
            let g = if unit { BigInt::one() } else { rl.gcd(&bl) };
            let mr = &bl / &g;
            let mb = &rl / &g;
            r = r.scale(&mr).sub(&b.scale(&mb).shift_up(k));
            if !unit {
                r = r.primitive();
            }
        }
        r.primitive()
    }

    /// Greatest common divisor in ℤ[q] with positive leading coefficient.
    pub fn gcd(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.normalize_sign();
        }
        if o.is_zero() {
            return self.normalize_sign();
        }
        let v = self.valuation().min(o.valuation());
        let a = self.shift_down(v);
        let b = o.shift_down(v);
        let cg = a.content().gcd(&b.content());
        let res = if a.c.len() == 1 || b.c.len() == 1 {
            Poly::one()
        } else if a.as_monomial().is_some() || b.as_monomial().is_some() {
            // the other side has valuation zero, so only the content survives
            Poly::one()
        } else {
            let (a, b) = (a.primitive(), b.primitive());
            match modp_gcd(&a, &b) {
                Some(g) if g.len() == 1 => Poly::one(),
                Some(g) => lift_modp_gcd(&a, &b, &g)
                    .or_else(|| heuristic_gcd(&a, &b, Some(g.len() - 1)))
                    .unwrap_or_else(|| prs_gcd(a, b)),
                None => heuristic_gcd(&a, &b, None).unwrap_or_else(|| prs_gcd(a, b)),
            }
        };
        res.scale(&cg).shift_up(v)
    }

    /// Quotient if `d` divides `self` exactly in ℤ[q].
    fn try_div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() || self.c.len() < d.c.len() {
            return self.is_zero().then(Poly::zero);
        }
        let mut r = self.c.clone();
        let dl = d.lc();
        let dd = d.degree();
        let mut quo = vec![BigInt::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            if r[k + dd].is_zero() {
                continue;
            }
            let (qk, rem) = r[k + dd].div_rem(&dl);
            if !rem.is_zero() {
                return None;
            }
            for (j, dj) in d.c.iter().enumerate() {
                if !dj.is_zero() {
                    r[k + j] -= &qk * dj;
                }
            }
            quo[k] = qk;
        }
        r.iter().all(Zero::is_zero).then(|| Poly::from_coeffs(quo))
    }

    fn eval_big(&self, x: &BigInt) -> BigInt {
        self.c.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    fn max_norm(&self) -> BigInt {
        self.c.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

const GCD_PRIME: u64 = (1 << 61) - 1;

fn mod_p(x: &BigInt) -> u64 {
    let p = BigInt::from(GCD_PRIME);
    x.mod_floor(&p).to_u64().expect("reduced below p")
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % GCD_PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

/// Monic gcd(a, b) mod p. Its degree bounds the degree over ℤ when p does not
/// divide the leading coefficients; `None` if p is unlucky.
fn modp_gcd(a: &Poly, b: &Poly) -> Option<Vec<u64>> {
    let red = |p: &Poly| {
        let mut v: Vec<u64> = p.c.iter().map(mod_p).collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let (mut x, mut y) = (red(a), red(b));
    if x.len() != a.c.len() || y.len() != b.c.len() {
        return None;
    }
    while !y.is_empty() {
        let inv = powmod(*y.last().expect("nonempty"), GCD_PRIME - 2);
        while x.len() >= y.len() {
            let f = mulmod(*x.last().expect("nonempty"), inv);
            let k = x.len() - y.len();
            for (j, yj) in y.iter().enumerate() {
                x[k + j] = (x[k + j] + GCD_PRIME - mulmod(f, *yj)) % GCD_PRIME;
            }
            while x.last() == Some(&0) {
                x.pop();
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    let inv = powmod(*x.last().expect("gcd of nonzero polynomials"), GCD_PRIME - 2);
    Some(x.iter().map(|c| mulmod(*c, inv)).collect())
}

/// Lifts a monic gcd mod p to ℤ[q] assuming small coefficients, confirmed by
/// trial division.
fn lift_modp_gcd(a: &Poly, b: &Poly, g: &[u64]) -> Option<Poly> {
    let gamma = a.lc().gcd(&b.lc());
    let gm = mod_p(&gamma);
    let half = GCD_PRIME / 2;
    let coeffs: Vec<BigInt> = g
        .iter()
        .map(|c| {
            let v = mulmod(*c, gm);
            if v > half {
                BigInt::from(v) - BigInt::from(GCD_PRIME)
            } else {
                BigInt::from(v)
            }
        })
        .collect();
    let cand = Poly::from_coeffs(coeffs).primitive().normalize_sign();
    (cand.degree() + 1 == g.len() && a.try_div_exact(&cand).is_some() && b.try_div_exact(&cand).is_some())
        .then_some(cand)
}

/// Heuristic gcd of primitive polynomials by evaluation at a large integer.
fn heuristic_gcd(a: &Poly, b: &Poly, bound: Option<usize>) -> Option<Poly> {
    let mut xi: BigInt = BigInt::from(2) * a.max_norm().min(b.max_norm()) + 29;
    for _ in 0..6 {
        let g = a.eval_big(&xi).gcd(&b.eval_big(&xi));
        let mut coeffs = Vec::new();
        let mut rest = g;
        let half = &xi / 2;
        while !rest.is_zero() {
            let mut d = rest.mod_floor(&xi);
            if d > half {
                d -= &xi;
            }
            rest = (rest - &d) / &xi;
            coeffs.push(d);
        }
        let cand = Poly::from_coeffs(coeffs).primitive().normalize_sign();
        if !cand.is_zero()
            && bound.is_none_or(|d| cand.degree() <= d)
            && a.try_div_exact(&cand).is_some()
            && b.try_div_exact(&cand).is_some()
        {
            return Some(cand);
        }
        xi = xi * 73794 / 27011;
    }
    None
}

fn prs_gcd(mut a: Poly, mut b: Poly) -> Poly {
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.degree() == 0 {
            return Poly::one();
        }
        let r = a.prem_primitive(&b);
        a = b;
        b = r;
    }
    a.normalize_sign()
}

impl Poly {
    fn normalize_sign(&self) -> Poly {
        if self.lc().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in self.c.iter().rev() {
            acc = acc * z + Complex64::new(big_to_f64(x), 0.0);
        }
        acc
    }

    /// Integer square root of a perfect-square polynomial.
    pub fn sqrt_exact(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let v = self.valuation();
        if v % 2 == 1 {
            return None;
        }
        let p = self.shift_down(v);
        let d = p.degree();
        if d % 2 == 1 || p.lc().is_negative() {
            return None;
        }
        let m = d / 2;
        let top = p.lc().sqrt();
        if &top * &top != p.lc() {
            return None;
        }
        let mut s = vec![BigInt::zero(); m + 1];
        s[m] = top.clone();
        let two_top = &top * 2;
        for k in (0..m).rev() {
            let mut acc = p.c[m + k].clone();
            for i in (k + 1)..=m {
                let j = m + k - i;
                if j > k && j <= m {
                    acc -= &s[i] * &s[j];
                }
            }
            let (qk, rem) = acc.div_rem(&two_top);
            if !rem.is_zero() {
                return None;
            }
            s[k] = qk;
        }
        let root = Poly::from_coeffs(s);
        (root.mul(&root) == p).then(|| root.shift_up(v / 2))
    }

    fn fmt_terms(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (d, x) in self.c.iter().enumerate().rev() {
            if x.is_zero() {
                continue;
            }
            let neg = x.is_negative();
            let a = x.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            match d {
                0 => out.push_str(&a.to_string()),
                _ => {
                    if !a.is_one() {
                        out.push_str(&a.to_string());
                        out.push('*');
                    }
                    out.push('q');
                    if d > 1 {
                        out.push_str(&format!("^{d}"));
                    }
                }
            }
        }
        out
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Element of ℚ(q) in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn int(v: i64) -> Self {
        Scalar { num: Poly::constant(BigInt::from(v)), den: Poly::one() }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from_polys(Poly::constant(n.into()), Poly::constant(d.into()))
    }

    /// The indeterminate q.
    pub fn q() -> Self {
        Scalar::q_pow(1)
    }

    /// q^k for any integer k.
    pub fn q_pow(k: i64) -> Self {
        let m = Poly::monomial(BigInt::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Scalar { num: m, den: Poly::one() }
        } else {
            Scalar { num: Poly::one(), den: m }
        }
    }

    pub fn from_polys(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) };
        if den.lc().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Scalar { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn inv(&self) -> Result<Scalar, Error> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(Scalar::from_polys(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, k: i64) -> Scalar {
        if k < 0 {
            return self.inv().expect("negative power of zero").pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `Some((v, e))` when the scalar is `v q^e` with integer `v`.
    pub fn as_laurent_monomial(&self) -> Option<(BigInt, i64)> {
        let (dv, dk) = self.den.as_monomial()?;
        if !dv.is_one() {
            return None;
        }
        let (nv, nk) = self.num.as_monomial()?;
        Some((nv, nk as i64 - dk as i64))
    }

    /// Square root in ℚ(q), if one exists (the root with positive leading coefficients).
    pub fn sqrt(&self) -> Option<Scalar> {
        Some(Scalar::from_polys(self.num.sqrt_exact()?, self.den.sqrt_exact()?))
    }

    /// Evaluates at a complex value of q.
    pub fn specialize(&self, q0: Complex64) -> Result<Complex64, Error> {
        let d = self.den.eval_complex(q0);
        if d.norm() == 0.0 {
            return Err(Error::Domain(format!("denominator vanishes at q = {q0}")));
        }
        Ok(self.num.eval_complex(q0) / d)
    }

    /// Parses expressions such as `q^4`, `1/(q-q^-1)`, `3*q^2-1`.
    pub fn parse(s: &str) -> Result<Scalar, Error> {
        let mut p = Parser { s: s.as_bytes(), i: 0 };
        let v = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }

    fn cmp_key(&self) -> (String, String) {
        (self.num.fmt_terms(), self.den.fmt_terms())
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Total order on canonical strings, used only to sort multisets deterministically.
impl Ord for Scalar {
    fn cmp(&self, o: &Self) -> Ordering {
        self.cmp_key().cmp(&o.cmp_key())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num.fmt_terms())
        } else {
            write!(f, "({})/({})", self.num.fmt_terms(), self.den.fmt_terms())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn add_scalars(a: &Scalar, b: &Scalar) -> Scalar {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den == b.den {
        return Scalar::from_polys(a.num.add(&b.num), a.den.clone());
    }
    let g = a.den.gcd(&b.den);
    let da = a.den.div_exact(&g);
    let db = b.den.div_exact(&g);
    let num = a.num.mul(&db).add(&b.num.mul(&da));
    if num.is_zero() {
        return Scalar::zero();
    }
    // only factors of g can cancel against the new numerator
    let h = num.gcd(&g);
    let den = da.mul(&b.den);
    if h.is_one() {
        let mut s = Scalar { num, den };
        if s.den.lc().is_negative() {
            s.num = s.num.neg();
            s.den = s.den.neg();
        }
        s
    } else {
        Scalar::from_polys(num, den)
    }
}

fn mul_scalars(a: &Scalar, b: &Scalar) -> Scalar {
    if a.is_zero() || b.is_zero() {
        return Scalar::zero();
    }
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    let g1 = a.num.gcd(&b.den);
    let g2 = b.num.gcd(&a.den);
    let n1 = a.num.div_exact(&g1);
    let d2 = b.den.div_exact(&g1);
    let n2 = b.num.div_exact(&g2);
    let d1 = a.den.div_exact(&g2);
    let mut num = n1.mul(&n2);
    let mut den = d1.mul(&d2);
    if den.lc().is_negative() {
        num = num.neg();
        den = den.neg();
    }
    Scalar { num, den }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(self, o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(&self, &o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(&self, o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(self, &o)
            }
        }
    };
}

forward_binop!(Add, add, add_scalars);
forward_binop!(Sub, sub, |a: &Scalar, b: &Scalar| add_scalars(a, &-b));
forward_binop!(Mul, mul, mul_scalars);
forward_binop!(Div, div, |a: &Scalar, b: &Scalar| mul_scalars(a, &b.inv().expect("division by zero")));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = add_scalars(self, o);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = add_scalars(self, &-o);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = mul_scalars(self, o);
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {} of {:?}", self.i, String::from_utf8_lossy(self.s)))
    }

    fn expr(&mut self) -> Result<Scalar, Error> {
        let mut neg = false;
        if let Some(c @ (b'-' | b'+')) = self.peek() {
            neg = c == b'-';
            self.i += 1;
        }
        let mut acc = self.term()?;
        if neg {
            acc = -acc;
        }
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc + t } else { acc - t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, Error> {
        let mut acc = self.power()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let t = self.power()?;
            acc = if c == b'*' { acc * t } else { acc * t.inv().map_err(|_| self.err("division by zero"))? };
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Scalar, Error> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let mut neg = false;
            if let Some(c @ (b'-' | b'+')) = self.peek() {
                neg = c == b'-';
                self.i += 1;
            }
            let e = self.integer()?;
            let e = e.to_i64().ok_or_else(|| self.err("exponent too large"))?;
            if base.is_zero() && neg {
                return Err(self.err("negative power of zero"));
            }
            return Ok(base.pow(if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, Error> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.i]).expect("ascii digits");
        txt.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn atom(&mut self) -> Result<Scalar, Error> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(v)
            }
            Some(b'q') => {
                self.i += 1;
                Ok(Scalar::q())
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(Scalar { num: Poly::constant(v), den: Poly::one() }.normalized())
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

impl Scalar {
    fn normalized(self) -> Scalar {
        Scalar::from_polys(self.num, self.den)
    }
}

/// Quantum integer [k] = (q^k − q^{−k})/(q − q^{−1}); [−k] = −[k].
pub fn qint(k: i64) -> Scalar {
    if k == 0 {
        return Scalar::zero();
    }
    let n = k.unsigned_abs() as usize;
    // [n] = q^{-(n-1)} (1 + q^2 + ... + q^{2(n-1)})
    let mut c = vec![BigInt::zero(); 2 * n - 1];
    for j in 0..n {
        c[2 * j] = BigInt::one();
    }
    let v = Scalar::from_polys(Poly::from_coeffs(c), Poly::monomial(BigInt::one(), n - 1));
    if k < 0 {
        -v
    } else {
        v
    }
}

/// Quantum factorial [k]! for k ≥ 0.
pub fn qfact(k: i64) -> Result<Scalar, Error> {
    if k < 0 {
        return Err(Error::Domain(format!("quantum factorial of negative {k}")));
    }
    Ok((1..=k).fold(Scalar::one(), |acc, j| acc * qint(j)))
}

/// Quantum binomial [k choose l] = [k]!/([k−l]![l]!), defined for 0 ≤ l ≤ k.
pub fn qbinom(k: i64, l: i64) -> Result<Scalar, Error> {
    if l < 0 || l > k {
        return Err(Error::Domain(format!("quantum binomial ({k}, {l}) outside 0 ≤ l ≤ k")));
    }
    Ok(qfact(k)? / (qfact(k - l)? * qfact(l)?))
}

/// q − q^{−1}.
pub fn qdiff() -> Scalar {
    Scalar::q() - Scalar::q_pow(-1)
}

/// Numeric value of q used by the numeric backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericPoint {
    pub q0: Complex64,
}

impl NumericPoint {
    /// Highest order checked when ruling out roots of unity.
    pub const ROOT_OF_UNITY_ORDER: u32 = 48;

    pub fn new(q0: Complex64) -> Result<Self, Error> {
        if q0.norm() == 0.0 || !q0.re.is_finite() || !q0.im.is_finite() {
            return Err(Error::Domain(format!("invalid numeric q = {q0}")));
        }
        let mut p = Complex64::new(1.0, 0.0);
        for k in 1..=Self::ROOT_OF_UNITY_ORDER {
            p *= q0;
            if (p - 1.0).norm() < 1e-12 {
                return Err(Error::Domain(format!("q = {q0} is a root of unity of order {k}")));
            }
        }
        Ok(NumericPoint { q0 })
    }

    pub fn real(q0: f64) -> Result<Self, Error> {
        Self::new(Complex64::new(q0, 0.0))
    }

    pub fn eval(&self, s: &Scalar) -> Result<Complex64, Error> {
        s.specialize(self.q0)
    }
}
