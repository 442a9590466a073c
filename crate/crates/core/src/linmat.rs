//! Dense matrices over ℚ(q), graded components, triangularity checks, and
//! numeric generalized eigenspaces.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::scalars::{NumericPoint, Scalar};
use crate::{Error, Result};

/// Dense row-major matrix with exact entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::scalar(n, Scalar::one())
    }

    pub fn scalar(n: usize, v: Scalar) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn diag(v: Vec<Scalar>) -> Self {
        let n = v.len();
        let mut m = Matrix::zeros(n, n);
        for (i, x) in v.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Matrix with a single nonzero entry `v` at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize, v: Scalar) -> Self {
        let mut m = Matrix::zeros(n, n);
        m.set(i, j, v);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.data.iter().enumerate().map(move |(k, v)| (k / self.cols, k % self.cols, v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, v: &Scalar) -> Matrix {
        if v.is_zero() {
            return Matrix::zeros(self.rows, self.cols);
        }
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * v).collect() }
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).fold(Scalar::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn pow(&self, k: usize) -> Matrix {
        (0..k).fold(Matrix::identity(self.rows), |acc, _| &acc * self)
    }

    /// Inverse of a diagonal matrix.
    pub fn inv_diag(&self) -> Result<Matrix> {
        if !self.is_diagonal() {
            return Err(Error::Domain("inv_diag on a non-diagonal matrix".into()));
        }
        let v = (0..self.rows).map(|i| self.get(i, i).inv()).collect::<Result<Vec<_>>>()?;
        Ok(Matrix::diag(v))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, v)| i == j || v.is_zero())
    }

    /// Principal submatrix on the given indices.
    pub fn principal(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), idx.len(), |a, b| self.get(idx[a], idx[b]).clone())
    }

    /// Kronecker product, first factor indexing the slow coordinate.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        let (r, c) = (self.rows * o.rows, self.cols * o.cols);
        let mut m = Matrix::zeros(r, c);
        for (i, j, a) in self.entries() {
            if a.is_zero() {
                continue;
            }
            for (k, l, b) in o.entries() {
                if !b.is_zero() {
                    m.set(i * o.rows + k, j * o.cols + l, a * b);
                }
            }
        }
        m
    }

    fn check_same(&self, o: &Matrix, op: &str) {
        assert!(
            self.rows == o.rows && self.cols == o.cols,
            "{op}: shape {}x{} vs {}x{}",
            self.rows,
            self.cols,
            o.rows,
            o.cols
        );
    }

    /// Exact characteristic polynomial det(xI − M), ascending coefficients,
    /// by the Faddeev–LeVerrier recursion.
    pub fn charpoly(&self) -> Vec<Scalar> {
        let n = self.rows;
        let mut c = vec![Scalar::zero(); n + 1];
        c[n] = Scalar::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            let prev = &c[n - k + 1];
            mk = &(self * &mk) + &Matrix::scalar(n, prev.clone());
            let t = (self * &mk).trace();
            c[n - k] = -(t / Scalar::int(k as i64));
        }
        c
    }

    /// Evaluates every entry at a numeric point.
    pub fn specialize(&self, p: &NumericPoint) -> Result<DMatrix<Complex64>> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.entries() {
            m[(i, j)] = p.eval(v)?;
        }
        Ok(m)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, o: &Matrix) -> Matrix {
        self.check_same(o, "add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, o: &Matrix) -> Matrix {
        self.check_same(o, "sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "mul: inner dimension mismatch");
        let mut acc: Vec<Vec<Scalar>> = vec![Vec::new(); self.rows * o.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        acc[i * o.cols + j].push(a * b);
                    }
                }
            }
        }
        Matrix { rows: self.rows, cols: o.cols, data: acc.into_iter().map(sum_scalars).collect() }
    }
}

/// Sums with denominators grouped first, which keeps gcd work small.
pub fn sum_scalars(mut terms: Vec<Scalar>) -> Scalar {
    match terms.len() {
        0 => Scalar::zero(),
        1 => terms.pop().expect("one term"),
        _ => {
            terms.sort_by_key(|a| a.den().coeffs().len());
            let mut groups: Vec<(crate::scalars::Poly, Vec<Scalar>)> = Vec::new();
            for t in terms {
                match groups.iter_mut().find(|(d, _)| d == t.den()) {
                    Some((_, g)) => g.push(t),
                    None => groups.push((t.den().clone(), vec![t])),
                }
            }
            groups
                .into_iter()
                .map(|(d, g)| {
                    let mut num = crate::scalars::Poly::zero();
                    for t in &g {
                        num = num_add(&num, t.num());
                    }
                    if num.is_zero() {
                        Scalar::zero()
                    } else {
                        Scalar::from_polys(num, d)
                    }
                })
                .fold(Scalar::zero(), |acc, x| acc + x)
        }
    }
}

fn num_add(a: &crate::scalars::Poly, b: &crate::scalars::Poly) -> crate::scalars::Poly {
    let n = a.coeffs().len().max(b.coeffs().len());
    let z = num_bigint::BigInt::default();
    crate::scalars::Poly::from_coeffs(
        (0..n).map(|i| a.coeffs().get(i).unwrap_or(&z) + b.coeffs().get(i).unwrap_or(&z)).collect(),
    )
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, o: Matrix) -> Matrix {
        &self + &o
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, o: Matrix) -> Matrix {
        &self - &o
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, o: Matrix) -> Matrix {
        &self * &o
    }
}

/// q-commutator [a, b]_v = ab − v·ba.
pub fn qbracket(a: &Matrix, b: &Matrix, v: &Scalar) -> Matrix {
    let ab = a * b;
    if v.is_zero() {
        return ab;
    }
    &ab - &(b * a).scale(v)
}

/// Ordinary commutator [a, b].
pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    &(a * b) - &(b * a)
}

/// Integer degree vector attached to each basis vector of a graded module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    degs: Vec<Vec<i64>>,
}

impl Grading {
    pub fn new(degs: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(first) = degs.first() {
            if degs.iter().any(|d| d.len() != first.len()) {
                return Err(Error::Grading("degree vectors of unequal length".into()));
            }
        }
        Ok(Grading { degs })
    }

    /// One-dimensional grading.
    pub fn scalar(degs: Vec<i64>) -> Self {
        Grading { degs: degs.into_iter().map(|d| vec![d]).collect() }
    }

    pub fn dim(&self) -> usize {
        self.degs.len()
    }

    pub fn deg(&self, i: usize) -> &[i64] {
        &self.degs[i]
    }

    /// Degree shift of the matrix entry (i, j), i.e. of the map v_j ↦ v_i.
    pub fn shift(&self, i: usize, j: usize) -> Vec<i64> {
        self.degs[i].iter().zip(&self.degs[j]).map(|(a, b)| a - b).collect()
    }

    /// Grading of the tensor product, degree vectors concatenated (first factor first).
    pub fn tensor(&self, o: &Grading) -> Grading {
        let mut degs = Vec::with_capacity(self.dim() * o.dim());
        for a in &self.degs {
            for b in &o.degs {
                degs.push(a.iter().chain(b).copied().collect());
            }
        }
        Grading { degs }
    }

    /// Maps each degree vector through `f` (e.g. summing tensor coordinates).
    pub fn map(&self, f: impl Fn(&[i64]) -> Vec<i64>) -> Grading {
        Grading { degs: self.degs.iter().map(|d| f(d)).collect() }
    }

    /// Basis indices grouped by degree, in ascending degree order.
    pub fn pieces(&self) -> BTreeMap<Vec<i64>, Vec<usize>> {
        let mut m: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (i, d) in self.degs.iter().enumerate() {
            m.entry(d.clone()).or_default().push(i);
        }
        m
    }
}

/// Splits a matrix into homogeneous components keyed by degree shift.
pub fn degree_components(m: &Matrix, g: &Grading) -> Result<BTreeMap<Vec<i64>, Matrix>> {
    if m.rows() != g.dim() || m.cols() != g.dim() {
        return Err(Error::Dimension(format!("matrix {}x{} vs grading of dim {}", m.rows(), m.cols(), g.dim())));
    }
    let mut out: BTreeMap<Vec<i64>, Matrix> = BTreeMap::new();
    for (i, j, v) in m.entries() {
        if v.is_zero() {
            continue;
        }
        out.entry(g.shift(i, j))
            .or_insert_with(|| Matrix::zeros(m.rows(), m.cols()))
            .set(i, j, v.clone());
    }
    Ok(out)
}

/// Checks that every nonzero component has a shift accepted by `allowed`.
/// Returns a witness `(i, j, shift)` for the first offending entry.
pub fn assert_block_triangular(
    m: &Matrix,
    g: &Grading,
    allowed: impl Fn(&[i64]) -> bool,
) -> std::result::Result<(), (usize, usize, Vec<i64>)> {
    for (i, j, v) in m.entries() {
        if !v.is_zero() {
            let s = g.shift(i, j);
            if !allowed(&s) {
                return Err((i, j, s));
            }
        }
    }
    Ok(())
}

/// Shift accepted by the "raising" filtration: zero or strictly positive along
/// the selected coordinate.
pub fn nonneg(s: &[i64]) -> bool {
    s.iter().all(|&x| x >= 0)
}

/// One generalized eigenspace of a numeric matrix.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Orthonormal basis as columns.
    pub basis: DMatrix<Complex64>,
    /// max over basis vectors of ‖(M − λ)^m v‖.
    pub residual: f64,
}

/// Numeric generalized eigenspaces of a square complex matrix.
///
/// Eigenvalues closer than `cluster_tol` (relative to the spectral scale) are
/// merged; a gap smaller than ten times that tolerance between distinct
/// clusters is reported as ill-conditioned.
pub fn generalized_eigenspaces(m: &DMatrix<Complex64>, cluster_tol: f64) -> Result<Vec<Eigenspace>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension("generalized_eigenspaces needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let (_, t) = m.clone().schur().unpack();
    let mut evs: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = evs.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let tol = cluster_tol * scale;
    evs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for z in evs {
        match clusters.iter_mut().find(|c| (c[0] - z).norm() <= tol) {
            Some(c) => c.push(z),
            None => clusters.push(vec![z]),
        }
    }
    for (a, ca) in clusters.iter().enumerate() {
        for cb in clusters.iter().skip(a + 1) {
            if (ca[0] - cb[0]).norm() < 10.0 * tol {
                return Err(Error::IllConditioned(format!("eigenvalues {} and {} too close to separate", ca[0], cb[0])));
            }
        }
    }
    let mut out = Vec::new();
    for c in clusters {
        let mult = c.len();
        let lambda = c.iter().sum::<Complex64>() / mult as f64;
        let shifted = m - DMatrix::<Complex64>::identity(n, n) * lambda;
        let mut p = DMatrix::<Complex64>::identity(n, n);
        for _ in 0..mult {
            p = &p * &shifted;
        }
        let svd = p.clone().svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| Error::IllConditioned("SVD failed".into()))?;
        // singular values are sorted descending; take the last `mult` right singular vectors
        let basis = v_t.rows(n - mult, mult).adjoint();
        let pnorm = p.norm().max(1.0);
        let residual = (0..mult).map(|k| (&p * basis.column(k)).norm() / pnorm).fold(0.0_f64, f64::max);
        if residual > cluster_tol.sqrt() {
            return Err(Error::IllConditioned(format!("generalized eigenspace of {lambda} has residual {residual:e}")));
        }
        out.push(Eigenspace { value: lambda, multiplicity: mult, basis, residual });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    #[test]
    fn qbracket_basics() {
        let a = Matrix::unit(2, 0, 1, Scalar::one());
        let b = Matrix::unit(2, 1, 0, Scalar::one());
        let c = qbracket(&a, &b, &s("q^2"));
        assert_eq!(c, Matrix::diag(vec![Scalar::one(), s("-q^2")]));
        assert_eq!(commutator(&a, &a), Matrix::zeros(2, 2));
    }

    #[test]
    fn charpoly_matches_roots() {
        let m = Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => s("q"),
            (0, 1) => s("1"),
            (1, 1) => s("q^-1"),
            _ => Scalar::zero(),
        });
        let cp = m.charpoly();
        assert_eq!(cp, vec![Scalar::one(), -(s("q") + s("q^-1")), Scalar::one()]);
    }

    #[test]
    fn components_and_triangularity() {
        let g = Grading::scalar(vec![0, -1, -2]);
        let mut m = Matrix::identity(3);
        m.set(0, 1, s("q"));
        let comps = degree_components(&m, &g).unwrap();
        assert_eq!(comps.keys().cloned().collect::<Vec<_>>(), vec![vec![0], vec![1]]);
        assert!(assert_block_triangular(&m, &g, nonneg).is_ok());
        m.set(2, 0, s("1"));
        assert_eq!(assert_block_triangular(&m, &g, nonneg), Err((2, 0, vec![-2])));
    }

    #[test]
    fn eigenspaces_jordan_block() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[2.0, 1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 5.0].map(|x| Complex64::new(x, 0.0)),
        );
        let es = generalized_eigenspaces(&m, 1e-7).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].multiplicity, 2);
        assert!((es[0].value - Complex64::new(2.0, 0.0)).norm() < 1e-6);
        assert_eq!(es[1].multiplicity, 1);
    }
}
