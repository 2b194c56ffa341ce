//! Exact arithmetic in the cyclotomic fields Q(ζ_24) and Q(ζ_72).
//!
//! Elements are stored as rational coefficient vectors over the power basis
//! `1, ζ, ..., ζ^{φ(N)-1}` and are reduced modulo the N-th cyclotomic
//! polynomial after every multiplication, so equality is a coefficient
//! comparison. Both supported conductors have a cyclotomic polynomial of the
//! shape `x^φ - x^{φ/2} + 1`.
//!
//! Q(ζ_24) holds every constant the fixtures need (ω, i, e^{iπ/6}, e^{iπ/12},
//! √2, √3, √6); Q(ζ_72) additionally holds ω_9 = e^{2πi/9}. Mixed-conductor
//! operations lift the Q(ζ_24) operand into Q(ζ_72).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conductor {
    N24,
    N72,
}

impl Conductor {
    pub fn order(self) -> u32 {
        match self {
            Conductor::N24 => 24,
            Conductor::N72 => 72,
        }
    }

    /// Degree φ(N) of the field over Q.
    pub fn degree(self) -> usize {
        match self {
            Conductor::N24 => 8,
            Conductor::N72 => 24,
        }
    }

    pub fn from_order(n: u32) -> Result<Self> {
        match n {
            24 => Ok(Conductor::N24),
            72 => Ok(Conductor::N72),
            _ => Err(Error::InvalidInput(format!("unsupported conductor {n}"))),
        }
    }

    fn tables(self) -> &'static Tables {
        static T24: OnceLock<Tables> = OnceLock::new();
        static T72: OnceLock<Tables> = OnceLock::new();
        match self {
            Conductor::N24 => T24.get_or_init(|| Tables::build(self)),
            Conductor::N72 => T72.get_or_init(|| Tables::build(self)),
        }
    }
}

struct Tables {
    /// `powers[j]` = integer coordinates of ζ^j, `0 <= j < N`.
    powers: Vec<Vec<i64>>,
    units: Vec<Complex64>,
}

impl Tables {
    fn build(c: Conductor) -> Self {
        let n = c.order() as usize;
        let phi = c.degree();
        let half = phi / 2;
        let mut powers = Vec::with_capacity(n);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x, then fold x^φ = x^{φ/2} - 1
            let top = cur[phi - 1];
            for k in (1..phi).rev() {
                cur[k] = cur[k - 1];
            }
            cur[0] = -top;
            cur[half] += top;
        }
        let units = (0..phi)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect();
        Self { powers, units }
    }
}

/// An exact element of Q(ζ_N).
#[derive(Clone, Debug)]
pub struct CycloNumber {
    conductor: Conductor,
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl CycloNumber {
    pub fn zero(conductor: Conductor) -> Self {
        Self {
            conductor,
            coeffs: vec![BigRational::zero(); conductor.degree()],
        }
    }

    pub fn one(conductor: Conductor) -> Self {
        Self::from_rational(conductor, BigRational::one())
    }

    pub fn from_integer(conductor: Conductor, n: i64) -> Self {
        Self::from_rational(conductor, rat(n))
    }

    pub fn from_ratio(conductor: Conductor, num: i64, den: i64) -> Self {
        Self::from_rational(
            conductor,
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    pub fn from_rational(conductor: Conductor, q: BigRational) -> Self {
        let mut z = Self::zero(conductor);
        z.coeffs[0] = q;
        z
    }

    /// Build from power-basis coordinates; the vector must have length φ(N).
    pub fn from_coeffs(conductor: Conductor, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != conductor.degree() {
            return Err(Error::DimensionMismatch(format!(
                "conductor {} needs {} coefficients, got {}",
                conductor.order(),
                conductor.degree(),
                coeffs.len()
            )));
        }
        Ok(Self { conductor, coeffs })
    }

    /// ζ_N^j for any integer exponent.
    pub fn zeta_pow(conductor: Conductor, j: i64) -> Self {
        let n = conductor.order() as i64;
        let row = &conductor.tables().powers[j.rem_euclid(n) as usize];
        Self {
            conductor,
            coeffs: row.iter().map(|&v| rat(v)).collect(),
        }
    }

    /// e^{2πi num/den}; `den` must divide the conductor.
    pub fn root_of_unity(conductor: Conductor, num: i64, den: u32) -> Result<Self> {
        let n = conductor.order();
        if den == 0 || !n.is_multiple_of(den) {
            return Err(Error::InvalidInput(format!(
                "e^(2πi/{den}) is not in Q(ζ_{n})"
            )));
        }
        Ok(Self::zeta_pow(conductor, num * (n / den) as i64))
    }

    /// ω = e^{2πi/3}.
    pub fn omega() -> Self {
        Self::zeta_pow(Conductor::N24, 8)
    }

    pub fn imag_unit() -> Self {
        Self::zeta_pow(Conductor::N24, 6)
    }

    /// ξ = e^{iπ/6}, a primitive 12th root of unity.
    pub fn xi() -> Self {
        Self::zeta_pow(Conductor::N24, 2)
    }

    pub fn sqrt2() -> Self {
        Self::zeta_pow(Conductor::N24, 3) + Self::zeta_pow(Conductor::N24, 21)
    }

    pub fn sqrt3() -> Self {
        Self::zeta_pow(Conductor::N24, 2) + Self::zeta_pow(Conductor::N24, 22)
    }

    pub fn sqrt6() -> Self {
        Self::sqrt2() * Self::sqrt3()
    }

    /// ω_9 = e^{2πi/9}, only available at conductor 72.
    pub fn omega9() -> Self {
        Self::zeta_pow(Conductor::N72, 8)
    }

    /// p^{-k/2} for p ∈ {2, 3}.
    pub fn inv_sqrt_power(conductor: Conductor, p: u8, k: u32) -> Self {
        let root = match p {
            2 => Self::sqrt2(),
            3 => Self::sqrt3(),
            _ => panic!("inv_sqrt_power supports p = 2, 3"),
        };
        let whole = BigRational::new(BigInt::one(), BigInt::from(p as u64).pow(k / 2 + k % 2));
        let mut out = Self::from_rational(conductor, whole);
        if k % 2 == 1 {
            out = out * root;
        }
        out
    }

    pub fn conductor(&self) -> Conductor {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }

    /// Re-express in Q(ζ_72).
    pub fn lift(&self, target: Conductor) -> Result<Self> {
        match (self.conductor, target) {
            (a, b) if a == b => Ok(self.clone()),
            (Conductor::N24, Conductor::N72) => {
                let mut out = Self::zero(Conductor::N72);
                for (i, c) in self.coeffs.iter().enumerate() {
                    out.coeffs[3 * i] = c.clone();
                }
                Ok(out)
            }
            (a, b) => Err(Error::IncompatibleFields(format!(
                "cannot lift Q(ζ_{}) into Q(ζ_{})",
                a.order(),
                b.order()
            ))),
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let c = a.conductor.max(b.conductor);
        (
            a.lift(c).expect("24 lifts into 72"),
            b.lift(c).expect("24 lifts into 72"),
        )
    }

    /// Complex conjugation, the automorphism ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let n = self.conductor.order() as i64;
        let mut out = Self::zero(self.conductor);
        let tables = self.conductor.tables();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &tables.powers[(n - j as i64).rem_euclid(n) as usize];
            for (k, &v) in row.iter().enumerate() {
                if v != 0 {
                    out.coeffs[k] += c * rat(v);
                }
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.conductor);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi = self.conductor.degree();
        // Column j of the multiplication matrix holds self * ζ^j.
        let mut aug: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); phi + 1]; phi];
        for j in 0..phi {
            let col = self * &Self::zeta_pow(self.conductor, j as i64);
            for i in 0..phi {
                aug[i][j] = col.coeffs[i].clone();
            }
        }
        aug[0][phi] = BigRational::one();
        for c in 0..phi {
            let pr = (c..phi).find(|&r| !aug[r][c].is_zero())?;
            aug.swap(c, pr);
            let inv = aug[c][c].recip();
            for v in aug[c].iter_mut() {
                *v *= &inv;
            }
            for r in 0..phi {
                if r != c && !aug[r][c].is_zero() {
                    let f = aug[r][c].clone();
                    let (pivot_row, row) = if r < c {
                        let (lo, hi) = aug.split_at_mut(c);
                        (&hi[0], &mut lo[r])
                    } else {
                        let (lo, hi) = aug.split_at_mut(r);
                        (&lo[c], &mut hi[0])
                    };
                    for (dst, src) in row.iter_mut().zip(pivot_row.iter()) {
                        *dst -= &f * src;
                    }
                }
            }
        }
        let coeffs = aug.into_iter().map(|row| row[phi].clone()).collect();
        Some(Self {
            conductor: self.conductor,
            coeffs,
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        let units = &self.conductor.tables().units;
        self.coeffs
            .iter()
            .zip(units)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, u)| u * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNumber {}

impl<'a> Add<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        if self.conductor != rhs.conductor {
            let (a, b) = CycloNumber::common(self, rhs);
            return &a + &b;
        }
        CycloNumber {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        self + &(-rhs)
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl<'a> Mul<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        if self.conductor != rhs.conductor {
            let (a, b) = CycloNumber::common(self, rhs);
            return &a * &b;
        }
        let c = self.conductor;
        let n = c.order() as usize;
        let phi = c.degree();
        let tables = c.tables();
        let mut raw: Vec<BigRational> = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        let mut coeffs: Vec<BigRational> = raw[..phi].to_vec();
        for (deg, v) in raw.into_iter().enumerate().skip(phi) {
            if v.is_zero() {
                continue;
            }
            for (k, &t) in tables.powers[deg % n].iter().enumerate() {
                if t != 0 {
                    coeffs[k] += &v * rat(t);
                }
            }
        }
        CycloNumber {
            conductor: c,
            coeffs,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: &CycloNumber) -> CycloNumber {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<CycloNumber> for &'a CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.conductor.order();
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match j {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}·ζ{n}")?,
                _ => write!(f, "{a}·ζ{n}^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn rational_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    conductor: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycloNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            conductor: self.conductor.order(),
            coeffs: self.coeffs.iter().map(rational_to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CycloRepr::deserialize(d)?;
        let conductor = Conductor::from_order(repr.conductor).map_err(D::Error::custom)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CycloNumber::from_coeffs(conductor, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c24(n: i64) -> CycloNumber {
        CycloNumber::from_integer(Conductor::N24, n)
    }

    #[test]
    fn omega_relation() {
        let w = CycloNumber::omega();
        assert!((c24(1) + &w + w.pow(2)).is_zero());
    }

    #[test]
    fn xi_powers() {
        let xi = CycloNumber::xi();
        assert_eq!(xi.pow(6), c24(-1));
        assert_eq!(xi.pow(3), CycloNumber::imag_unit());
        assert_eq!(xi.pow(4), CycloNumber::omega());
        assert_eq!(xi.pow(12), c24(1));
    }

    #[test]
    fn sqrt3_xi_plus_omega_squared_is_one() {
        let v = CycloNumber::sqrt3() * CycloNumber::xi() + CycloNumber::omega().pow(2);
        assert_eq!(v, c24(1));
    }

    #[test]
    fn square_roots_square_correctly() {
        assert_eq!(CycloNumber::sqrt2().pow(2), c24(2));
        assert_eq!(CycloNumber::sqrt3().pow(2), c24(3));
        assert_eq!(CycloNumber::sqrt6().pow(2), c24(6));
    }

    #[test]
    fn to_complex_examples() {
        assert!((c24(1).to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let i = CycloNumber::zeta_pow(Conductor::N24, 6).to_complex();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let s3 = CycloNumber::sqrt3().to_complex();
        assert!((s3.re - 3f64.sqrt()).abs() < 4e-16 && s3.im.abs() < 1e-15);
        let q = CycloNumber::from_ratio(Conductor::N24, 7, 3).to_complex();
        assert!((q.re - 7.0 / 3.0).abs() <= 1e-15 * 7.0 / 3.0);
    }

    #[test]
    fn omega9_and_lift() {
        let w9 = CycloNumber::omega9();
        assert_eq!(
            w9.pow(3),
            CycloNumber::omega().lift(Conductor::N72).unwrap()
        );
        // mixed-conductor arithmetic auto-lifts
        let mixed = &w9.pow(3) - &CycloNumber::omega();
        assert!(mixed.is_zero());
        assert_eq!(mixed.conductor(), Conductor::N72);
        assert!(CycloNumber::omega9().lift(Conductor::N24).is_err());
        let z =
            (w9.to_complex() - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 9.0)).norm();
        assert!(z < 1e-15);
    }

    #[test]
    fn conjugation_is_automorphism() {
        let w = CycloNumber::omega();
        assert_eq!(w.conj(), w.pow(2));
        let i = CycloNumber::imag_unit();
        assert_eq!(i.conj(), -i);
        assert_eq!(CycloNumber::sqrt3().conj(), CycloNumber::sqrt3());
    }

    #[test]
    fn serde_roundtrip() {
        let x = CycloNumber::sqrt6() * CycloNumber::from_ratio(Conductor::N24, -3, 8);
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"conductor\":24"));
        let y: CycloNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    fn random_element(rng: &mut ChaCha8Rng, c: Conductor) -> CycloNumber {
        let coeffs = (0..c.degree())
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.random_range(-6i64..=6)),
                    BigInt::from(rng.random_range(1i64..=5)),
                )
            })
            .collect();
        CycloNumber::from_coeffs(c, coeffs).unwrap()
    }

    #[test]
    fn field_laws_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..1000 {
            let c = if trial % 5 == 0 {
                Conductor::N72
            } else {
                Conductor::N24
            };
            let a = random_element(&mut rng, c);
            let b = random_element(&mut rng, c);
            let d = random_element(&mut rng, c);
            assert_eq!((&a * &b) * &d, &a * &(&b * &d));
            assert_eq!(&a * &(&b + &d), &a * &b + &a * &d);
            assert_eq!(&a * &b, &b * &a);
            assert_eq!((&a * &b).conj(), a.conj() * b.conj());
            if !a.is_zero() {
                let inv = a.inv().unwrap();
                assert_eq!(&a * &inv, CycloNumber::one(c));
            }
            let z = (&a * &b).to_complex() - a.to_complex() * b.to_complex();
            assert!(z.norm() < 1e-9);
        }
    }
}
