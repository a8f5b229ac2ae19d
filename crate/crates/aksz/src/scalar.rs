//! Scalars: exact Gaussian rationals, complex floats and square matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;

/// Exact element `re + im·i` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    pub fn zero() -> Self {
        Gq {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Gq::int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Gq {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        Gq {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Gq {
            re: BigRational::new(BigInt::from(n), BigInt::from(d)),
            im: BigRational::zero(),
        }
    }

    pub fn complex(re: (i64, i64), im: (i64, i64)) -> Self {
        Gq {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Gq {
            re: r,
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gq {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Gq {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn checked_div(&self, o: &Gq) -> Option<Self> {
        o.inv().map(|inv| self * &inv)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Gq::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// `(-1)^k` as an exact scalar.
    pub fn sign(odd: bool) -> Self {
        if odd {
            Gq::int(-1)
        } else {
            Gq::one()
        }
    }

    /// Canonical text form, parseable by the model-file grammar.
    pub fn render(&self) -> String {
        let r = render_rational(&self.re);
        if self.im.is_zero() {
            return r;
        }
        let im = if self.im.is_one() {
            "i".to_string()
        } else if (-self.im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", render_rational(&self.im))
        };
        if self.re.is_zero() {
            im
        } else if self.im.is_negative() {
            format!("({}{})", r, im)
        } else {
            format!("({}+{})", r, im)
        }
    }

    /// True when the rendering needs no parentheses as a product factor.
    pub fn is_atomic(&self) -> bool {
        self.im.is_zero() || self.re.is_zero()
    }
}

fn render_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<i64> for Gq {
    fn from(n: i64) -> Self {
        Gq::int(n)
    }
}

impl<'a> Add<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, o: &Gq) -> Gq {
        Gq {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Add for Gq {
    type Output = Gq;
    fn add(self, o: Gq) -> Gq {
        &self + &o
    }
}

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, o: &Gq) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl<'a> Sub<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, o: &Gq) -> Gq {
        Gq {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Sub for Gq {
    type Output = Gq;
    fn sub(self, o: Gq) -> Gq {
        &self - &o
    }
}

impl<'a> Mul<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, o: &Gq) -> Gq {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq {
                re: &self.re * &o.re,
                im: BigRational::zero(),
            };
        }
        Gq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Mul for Gq {
    type Output = Gq;
    fn mul(self, o: Gq) -> Gq {
        &self * &o
    }
}

impl<'a> Div<&'a Gq> for &'a Gq {
    type Output = Gq;
    /// Panics on division by zero; use [`Gq::checked_div`] otherwise.
    fn div(self, o: &Gq) -> Gq {
        self.checked_div(o).expect("division by zero in Gq")
    }
}

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re, im: -self.im }
    }
}

impl Neg for &Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

/// Square matrix over ℚ(i), row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QMatrix {
    pub dim: usize,
    pub entries: Vec<Gq>,
}

impl QMatrix {
    pub fn zeros(dim: usize) -> Self {
        QMatrix {
            dim,
            entries: vec![Gq::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = QMatrix::zeros(dim);
        for k in 0..dim {
            m.entries[k * dim + k] = Gq::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Gq>>) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(AlgebraError::NotSquare { rows: dim, cols: r.len() });
            }
            entries.extend(r);
        }
        Ok(QMatrix { dim, entries })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Gq::int(v)).collect()).collect()).expect("square integer matrix")
    }

    pub fn get(&self, r: usize, c: usize) -> &Gq {
        &self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Gq) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Gq::is_zero)
    }

    pub fn try_add(&self, o: &QMatrix) -> Result<QMatrix, AlgebraError> {
        if self.dim != o.dim {
            return Err(AlgebraError::DimensionMismatch { left: self.dim, right: o.dim });
        }
        Ok(QMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_mul(&self, o: &QMatrix) -> Result<QMatrix, AlgebraError> {
        if self.dim != o.dim {
            return Err(AlgebraError::DimensionMismatch { left: self.dim, right: o.dim });
        }
        let n = self.dim;
        let mut out = QMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = o.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * n + c] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Gq) -> QMatrix {
        QMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn neg(&self) -> QMatrix {
        self.scale(&Gq::int(-1))
    }

    pub fn commutator(&self, o: &QMatrix) -> Result<QMatrix, AlgebraError> {
        let ab = self.try_mul(o)?;
        let ba = o.try_mul(self)?;
        ab.try_add(&ba.neg())
    }

    pub fn trace(&self) -> Gq {
        let mut t = Gq::zero();
        for k in 0..self.dim {
            t += self.get(k, k);
        }
        t
    }

    pub fn transpose(&self) -> QMatrix {
        let n = self.dim;
        let mut out = QMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn det(&self) -> Gq {
        crate::linalg::det(&self.to_rows())
    }

    pub fn to_rows(&self) -> Vec<Vec<Gq>> {
        (0..self.dim).map(|r| self.entries[r * self.dim..(r + 1) * self.dim].to_vec()).collect()
    }

    pub fn to_c64(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c).to_c64())
    }

    pub fn render(&self) -> String {
        let rows: Vec<String> = (0..self.dim)
            .map(|r| {
                let cells: Vec<String> = (0..self.dim).map(|c| self.get(r, c).render()).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

/// Value of the numeric layer: exact, floating, or a square matrix of either.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Exact(Gq),
    Float(Complex64),
    Matrix(ScalarMatrix),
}

/// Square matrix whose entries are exact or floating scalars.
#[derive(Clone, PartialEq, Debug)]
pub struct ScalarMatrix {
    pub dim: usize,
    pub entries: Vec<Scalar>,
}

impl Scalar {
    pub fn to_c64(&self) -> Option<Complex64> {
        match self {
            Scalar::Exact(g) => Some(g.to_c64()),
            Scalar::Float(c) => Some(*c),
            Scalar::Matrix(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => *c == Complex64::new(0.0, 0.0),
            Scalar::Matrix(m) => m.entries.iter().all(Scalar::is_zero),
        }
    }

    pub fn try_add(&self, o: &Scalar) -> Result<Scalar, AlgebraError> {
        use Scalar::*;
        Ok(match (self, o) {
            (Exact(a), Exact(b)) => Exact(a + b),
            (Matrix(a), Matrix(b)) => {
                if a.dim != b.dim {
                    return Err(AlgebraError::DimensionMismatch { left: a.dim, right: b.dim });
                }
                let entries = a.entries.iter().zip(&b.entries).map(|(x, y)| x.try_add(y)).collect::<Result<_, _>>()?;
                Matrix(ScalarMatrix { dim: a.dim, entries })
            }
            (Matrix(_), _) | (_, Matrix(_)) => return Err(AlgebraError::MixedKinds),
            (a, b) => Float(a.to_c64().unwrap() + b.to_c64().unwrap()),
        })
    }

    pub fn try_mul(&self, o: &Scalar) -> Result<Scalar, AlgebraError> {
        use Scalar::*;
        Ok(match (self, o) {
            (Exact(a), Exact(b)) => Exact(a * b),
            (Matrix(a), Matrix(b)) => {
                if a.dim != b.dim {
                    return Err(AlgebraError::DimensionMismatch { left: a.dim, right: b.dim });
                }
                let n = a.dim;
                let mut entries = Vec::with_capacity(n * n);
                for r in 0..n {
                    for c in 0..n {
                        let mut acc = Exact(Gq::zero());
                        for k in 0..n {
                            acc = acc.try_add(&a.entries[r * n + k].try_mul(&b.entries[k * n + c])?)?;
                        }
                        entries.push(acc);
                    }
                }
                Matrix(ScalarMatrix { dim: n, entries })
            }
            (Matrix(m), s) | (s, Matrix(m)) => {
                let entries = m.entries.iter().map(|e| e.try_mul(s)).collect::<Result<_, _>>()?;
                Matrix(ScalarMatrix { dim: m.dim, entries })
            }
            (a, b) => Float(a.to_c64().unwrap() * b.to_c64().unwrap()),
        })
    }

    /// Trace of a matrix scalar; other kinds are returned unchanged.
    pub fn trace(&self) -> Scalar {
        match self {
            Scalar::Matrix(m) => {
                let mut acc = Scalar::Exact(Gq::zero());
                for k in 0..m.dim {
                    acc = acc.try_add(&m.entries[k * m.dim + k]).expect("scalar entries");
                }
                acc
            }
            s => s.clone(),
        }
    }
}

impl From<&QMatrix> for ScalarMatrix {
    fn from(m: &QMatrix) -> Self {
        ScalarMatrix {
            dim: m.dim,
            entries: m.entries.iter().cloned().map(Scalar::Exact).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations() {
        let a = Gq::complex((1, 2), (3, 1));
        let b = Gq::complex((-2, 1), (1, 3));
        let q = a.checked_div(&b).unwrap();
        assert_eq!(&q * &b, a);
        assert!(Gq::zero().inv().is_none());
        assert_eq!(&Gq::i() * &Gq::i(), Gq::int(-1));
    }

    #[test]
    fn rendering() {
        assert_eq!(Gq::ratio(-3, 6).render(), "-1/2");
        assert_eq!(Gq::i().render(), "i");
        assert_eq!(Gq::complex((1, 1), (-2, 3)).render(), "(1-2/3*i)");
    }

    #[test]
    fn matrix_dimension_mismatch_is_error() {
        let a = QMatrix::identity(2);
        let b = QMatrix::identity(3);
        assert!(a.try_mul(&b).is_err());
        let s = Scalar::Matrix((&a).into());
        let t = Scalar::Matrix((&b).into());
        assert!(s.try_mul(&t).is_err());
    }

    #[test]
    fn matrix_associativity() {
        let a = QMatrix::from_ints(&[&[1, 2], &[0, 1]]);
        let b = QMatrix::from_ints(&[&[0, 1], &[-1, 3]]);
        let c = QMatrix::from_ints(&[&[2, 0], &[5, 1]]);
        let l = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let r = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn trace_of_diagonal() {
        let m = QMatrix::from_ints(&[&[1, 0], &[0, 2]]);
        assert_eq!(m.trace(), Gq::int(3));
    }
}
