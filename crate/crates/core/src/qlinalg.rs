//! Exact linear algebra over the rationals.
//!
//! Matrices act on column vectors: a map `V -> W` is stored as a
//! `dim W x dim V` matrix.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(rational_to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Builds an `r x c` matrix; `rows` may be empty when `r == 0`.
    pub fn from_rows_sized(r: usize, c: usize, rows: Vec<Vec<Rational>>) -> Self {
        if r == 0 {
            return Self::zeros(0, c);
        }
        let m = Self::from_rows(rows);
        assert_eq!((m.rows, m.cols), (r, c));
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors, each of length `len`.
    pub fn from_cols(len: usize, cols: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(len, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), len);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn scalar(n: usize, s: &Rational) -> Self {
        Self::diag(&vec![s.clone(); n])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: &Rational) {
        if !v.is_zero() {
            self.data[r * self.cols + c] += v;
        }
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|c| self.col(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        let data = self.data.iter().map(|a| a * s).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&q(-1))
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        out.put_block(0, 0, self);
        out.put_block(self.rows, self.cols, other);
        out
    }

    pub fn put_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get(r0 + r, c0 + c).clone());
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                out.set(i, c, self.get(r, c).clone());
            }
        }
        out
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> Matrix {
        assert!(self.is_square());
        let mut out = Matrix::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref(self).2
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let (r, _, rank) = rref(&self.hstack(&Matrix::identity(n)));
        if rank < n || (0..n).any(|i| !r.get(i, i).is_one()) {
            return None;
        }
        Some(r.block(0, n, n, n))
    }
}

/// Reduced row echelon form, pivot columns and rank.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>, usize) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                let t = a.get(r, j);
                if !t.is_zero() {
                    let v = a.get(i, j) - &f * t;
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    (a, pivots, rank)
}

/// A linear subspace of `Q^n`, stored by its canonical reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, &Matrix::identity(ambient).columns())
    }

    pub fn span(ambient: usize, vectors: &[Vec<Rational>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = Matrix::from_rows(vectors.to_vec());
        assert_eq!(m.cols, ambient);
        let (r, _, rank) = rref(&m);
        Subspace { ambient, basis: (0..rank).map(|i| r.row(i).to_vec()).collect() }
    }

    /// Column space of `m`.
    pub fn column_space(m: &Matrix) -> Self {
        Self::span(m.rows, &m.columns())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_cols(self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in the stored basis.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(v.len(), self.ambient);
        // In reduced echelon form the coordinate on a basis vector is the entry at its pivot.
        let mut coords = Vec::with_capacity(self.dim());
        let mut rest = v.to_vec();
        for b in &self.basis {
            let p = b.iter().position(|x| !x.is_zero()).unwrap();
            let c = rest[p].clone();
            if !c.is_zero() {
                for (x, y) in rest.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
            coords.push(c);
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Self::span(self.ambient, &v)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.ambient);
        }
        let a = self.basis_matrix();
        let b = other.basis_matrix();
        let k = kernel(&a.hstack(&b.neg()));
        let vs: Vec<_> = k.basis.iter().map(|c| a.mul_vec(&c[..self.dim()])).collect();
        Self::span(self.ambient, &vs)
    }

    /// Image under a linear map.
    pub fn image(&self, m: &Matrix) -> Subspace {
        let vs: Vec<_> = self.basis.iter().map(|b| m.mul_vec(b)).collect();
        Self::span(m.rows, &vs)
    }
}

pub fn kernel(m: &Matrix) -> Subspace {
    let (r, pivots, rank) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let vectors: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate().take(rank) {
                v[p] = -r.get(i, f).clone();
            }
            v
        })
        .collect();
    Subspace::span(m.cols, &vectors)
}

pub fn image(m: &Matrix) -> Subspace {
    Subspace::column_space(m)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("linear system has no solution")]
pub struct NoSolution;

/// Solves `m x = b`, choosing free variables as zero.
pub fn solve(m: &Matrix, b: &[Rational]) -> Result<Vec<Rational>, NoSolution> {
    assert_eq!(b.len(), m.rows);
    let x = solve_matrix(m, &Matrix::from_cols(m.rows, &[b.to_vec()]))?;
    Ok(x.col(0))
}

/// Solves `m X = b` column by column in one elimination.
pub fn solve_matrix(m: &Matrix, b: &Matrix) -> Result<Matrix, NoSolution> {
    assert_eq!(b.rows, m.rows);
    let (r, pivots, _) = rref(&m.hstack(b));
    if pivots.iter().any(|&p| p >= m.cols) {
        return Err(NoSolution);
    }
    let mut x = Matrix::zeros(m.cols, b.cols);
    for (i, &p) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x.set(p, j, r.get(i, m.cols + j).clone());
        }
    }
    Ok(x)
}

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn normalize(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.rows;
        let mut acc = Matrix::zeros(n, n);
        for c in self.0.iter().rev() {
            acc = acc.mul(m).add(&Matrix::scalar(n, c));
        }
        acc
    }

    /// Divides by `(t - root)`, returning quotient and remainder.
    pub fn divide_linear(&self, root: &Rational) -> (Poly, Rational) {
        let n = self.0.len();
        if n == 0 {
            return (Poly(vec![]), Rational::zero());
        }
        let mut quot = vec![Rational::zero(); n - 1];
        let mut acc = Rational::zero();
        for i in (0..n).rev() {
            acc = acc * root + &self.0[i];
            if i > 0 {
                quot[i - 1] = acc.clone();
            }
        }
        (Poly(quot), acc)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = rational_to_string(c);
            terms.push(match i {
                0 => cs,
                1 => format!("{cs}*t"),
                _ => format!("{cs}*t^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Monic characteristic polynomial det(t - m), by Faddeev-LeVerrier.
pub fn char_poly(m: &Matrix) -> Poly {
    assert!(m.is_square(), "char_poly needs a square matrix");
    let n = m.rows;
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
        mk = m.mul(&mk).add(&Matrix::scalar(n, &coeffs[n - k + 1]));
        let am = m.mul(&mk);
        let tr: Rational = (0..n).map(|i| am.get(i, i).clone()).sum();
        coeffs[n - k] = -tr / q(k as i64);
    }
    Poly(coeffs)
}

/// Prime powers by trial division up to `10^6`; a larger leftover cofactor is kept as one factor.
fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &p * &p <= n && p <= limit {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![];
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in factor(n) {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut x = d.clone();
            for _ in 0..=e {
                next.push(x.clone());
                x *= &p;
            }
        }
        out = next;
    }
    out
}

/// Distinct rational roots with multiplicities, ascending.
pub fn rational_roots(p: &Poly) -> Vec<(Rational, usize)> {
    let mut p = p.clone().normalize();
    let mut roots = Vec::new();
    if p.degree().is_none() {
        return roots;
    }
    let mut zero_mult = 0;
    while p.0.first().is_some_and(Zero::is_zero) && p.0.len() > 1 {
        p.0.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }
    // clear denominators
    let lcm = p.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.0.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let a0 = ints.first().cloned().unwrap_or_default();
    let an = ints.last().cloned().unwrap_or_default();
    if ints.len() > 1 {
        let mut candidates = Vec::new();
        for num in divisors(&a0) {
            for den in divisors(&an) {
                let c = Rational::new(num.clone(), den.clone());
                candidates.push(c.clone());
                candidates.push(-c);
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            let mut mult = 0;
            loop {
                let (quot, rem) = p.divide_linear(&c);
                if !rem.is_zero() || p.degree().unwrap_or(0) == 0 {
                    break;
                }
                p = quot.normalize();
                mult += 1;
            }
            if mult > 0 {
                roots.push((c, mult));
            }
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    roots
}

#[derive(Clone, Debug)]
pub struct EigenSplit {
    pub components: Vec<(Rational, Subspace)>,
    pub residual: Subspace,
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.0.len() + b.0.len() - 1];
    for (i, x) in a.0.iter().enumerate() {
        for (j, y) in b.0.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Poly(out).normalize()
}

/// `p(m) v` by Horner's rule.
fn poly_apply(p: &Poly, m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); v.len()];
    for c in p.0.iter().rev() {
        acc = m.mul_vec(&acc);
        for (a, x) in acc.iter_mut().zip(v) {
            *a += c * x;
        }
    }
    acc
}

/// Monic polynomial of least degree killing `v`, from its Krylov sequence.
fn local_min_poly(m: &Matrix, v: &[Rational]) -> Poly {
    let mut ech = Echelon::new();
    let mut w = v.to_vec();
    let mut k = 0;
    loop {
        let sw = sv_from_dense(&w);
        if let Some(c) = ech.coordinates(&sw) {
            // m^k v = Σ c_j m^j v
            let mut coeffs: Vec<Rational> = (0..k).map(|j| -c.get(&j).cloned().unwrap_or_default()).collect();
            coeffs.push(Rational::one());
            return Poly(coeffs);
        }
        ech.insert(&sw);
        w = m.mul_vec(&w);
        k += 1;
    }
}

/// Minimal polynomial, grown one basis vector at a time.
pub fn min_poly(m: &Matrix) -> Poly {
    assert!(m.is_square(), "min_poly needs a square matrix");
    let n = m.rows;
    let mut mu = Poly(vec![Rational::one()]);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        let w = poly_apply(&mu, m, &e);
        if w.iter().all(Zero::is_zero) {
            continue;
        }
        mu = poly_mul(&mu, &local_min_poly(m, &w));
    }
    mu
}

/// Kernel of `a^k` for the least `k` where it stops growing.
fn stable_kernel(a: &Matrix, max: usize) -> Subspace {
    let mut power = a.clone();
    let mut ker = kernel(&power);
    for _ in 1..max {
        let next_power = a.mul(&power);
        let next = kernel(&next_power);
        if next.dim() == ker.dim() {
            break;
        }
        power = next_power;
        ker = next;
    }
    ker
}

pub fn rational_eigen_split(m: &Matrix) -> EigenSplit {
    let n = m.rows;
    let mp = min_poly(m);
    let roots = rational_roots(&mp);
    let mut rest = mp.clone();
    let mut components = Vec::new();
    for (lambda, mult) in roots {
        let shifted = m.sub(&Matrix::scalar(n, &lambda));
        components.push((lambda.clone(), stable_kernel(&shifted, mult)));
        for _ in 0..mult {
            rest = rest.divide_linear(&lambda).0;
        }
    }
    let residual = if rest.degree().unwrap_or(0) == 0 { Subspace::zero(n) } else { kernel(&rest.eval_matrix(m)) };
    EigenSplit { components, residual }
}

/// Sparse vector: basis index to nonzero coefficient.
pub type SVec = BTreeMap<usize, Rational>;

pub fn sv_unit(i: usize) -> SVec {
    SVec::from([(i, Rational::one())])
}

pub fn sv_add_scaled(acc: &mut SVec, v: &SVec, c: &Rational) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        let e = acc.entry(i).or_insert_with(Rational::zero);
        *e += x * c;
        if e.is_zero() {
            acc.remove(&i);
        }
    }
}

pub fn sv_scale(v: &SVec, c: &Rational) -> SVec {
    if c.is_zero() {
        return SVec::new();
    }
    v.iter().map(|(&i, x)| (i, x * c)).collect()
}

pub fn sv_to_dense(v: &SVec, n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (&i, x) in v {
        out[i] = x.clone();
    }
    out
}

pub fn sv_from_dense(v: &[Rational]) -> SVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// Column-sparse matrix; column `j` is the image of basis vector `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpMat {
    pub rows: usize,
    pub cols: Vec<SVec>,
}

impl SpMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SpMat { rows, cols: vec![SVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SpMat { rows: n, cols: (0..n).map(sv_unit).collect() }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn from_dense(m: &Matrix) -> Self {
        SpMat { rows: m.rows(), cols: m.columns().iter().map(|c| sv_from_dense(c)).collect() }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for (&i, x) in c {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Dense block of rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn dense_block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Matrix {
        let mut m = Matrix::zeros(nr, nc);
        for j in 0..nc {
            for (&i, x) in self.cols[c0 + j].range(r0..r0 + nr) {
                m.set(i - r0, j, x.clone());
            }
        }
        m
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (&j, c) in v {
            sv_add_scaled(&mut out, &self.cols[j], c);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SpMat) -> SpMat {
        SpMat { rows: self.rows, cols: other.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn add(&self, other: &SpMat) -> SpMat {
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut s = a.clone();
                sv_add_scaled(&mut s, b, &Rational::one());
                s
            })
            .collect();
        SpMat { rows: self.rows, cols }
    }

    pub fn scale(&self, c: &Rational) -> SpMat {
        SpMat { rows: self.rows, cols: self.cols.iter().map(|v| sv_scale(v, c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }
}

/// Echelon basis of sparse vectors, built one vector at a time.
///
/// Each stored row remembers which inserted vectors it combines, so
/// vectors in the span can be written in terms of the accepted inputs.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, (SVec, SVec)>,
    accepted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Remainder of `v` modulo the span (zero on pivots) and the combination subtracted.
    pub fn reduce(&self, v: &SVec) -> (SVec, SVec) {
        let mut r = v.clone();
        let mut comb = SVec::new();
        let mut cursor = 0;
        while let Some(k) = r.range(cursor..).map(|(&k, _)| k).find(|k| self.rows.contains_key(k)) {
            let c = r[&k].clone();
            let (row, rc) = &self.rows[&k];
            sv_add_scaled(&mut r, row, &-c.clone());
            sv_add_scaled(&mut comb, rc, &c);
            cursor = k + 1;
        }
        (r, comb)
    }

    /// The echelon rows, by pivot.
    pub fn rows(&self) -> Vec<SVec> {
        self.rows.values().map(|(r, _)| r.clone()).collect()
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Adds `v`; returns its index among accepted vectors if it raised the rank.
    pub fn insert(&mut self, v: &SVec) -> Option<usize> {
        let (r, comb) = self.reduce(v);
        let (&p, lead) = r.iter().next()?;
        let inv = lead.recip();
        let id = self.accepted;
        self.accepted += 1;
        let mut c = sv_scale(&comb, &-Rational::one());
        c.insert(id, Rational::one());
        self.rows.insert(p, (sv_scale(&r, &inv), sv_scale(&c, &inv)));
        Some(id)
    }

    /// Coefficients of `v` in the accepted vectors, if `v` lies in the span.
    pub fn coordinates(&self, v: &SVec) -> Option<SVec> {
        let (r, comb) = self.reduce(v);
        r.is_empty().then_some(comb)
    }
}

/// Solves the sparse system with equations `row · x = rhs`; free unknowns are set to zero.
pub fn solve_sparse(equations: impl IntoIterator<Item = (SVec, Rational)>) -> Option<SVec> {
    let mut pivots: BTreeMap<usize, (SVec, Rational)> = BTreeMap::new();
    for (mut row, mut rhs) in equations {
        let mut cursor = 0;
        while let Some(k) = row.range(cursor..).map(|(&k, _)| k).find(|k| pivots.contains_key(k)) {
            let c = row[&k].clone();
            let (prow, prhs) = &pivots[&k];
            sv_add_scaled(&mut row, prow, &-c.clone());
            rhs -= prhs * &c;
            cursor = k + 1;
        }
        match row.iter().next() {
            None if rhs.is_zero() => {}
            None => return None,
            Some((&p, lead)) => {
                let inv = lead.recip();
                pivots.insert(p, (sv_scale(&row, &inv), rhs * &inv));
            }
        }
    }
    let mut x = SVec::new();
    for (&p, (row, rhs)) in pivots.iter().rev() {
        let mut v = rhs.clone();
        for (k, c) in row.range(p + 1..) {
            if let Some(xk) = x.get(k) {
                v -= c * xk;
            }
        }
        if !v.is_zero() {
            x.insert(p, v);
        }
    }
    Some(x)
}
