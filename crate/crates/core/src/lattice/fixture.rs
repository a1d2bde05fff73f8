//! JSON fixture format for marked lattices.
//!
//! Integer data are JSON integers; the reference class, test vectors and
//! periods are strings holding exact rationals (`"3/4"`, `"-2"`) or
//! decimals (`"0.125"`, `"1.5e-3"`), converted exactly.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{ComplexQ, IntLattice, MarkedLattice, QVector, Vector};
use crate::error::{Error, Result};
use crate::numerics::IntMatrix;

pub const FIXTURE_SCHEMA: &str = "instanton-lab/lattice-fixture/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodEntry {
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub schema: String,
    pub name: String,
    pub gram: Vec<Vec<i64>>,
    pub fiber: Vec<i64>,
    pub components: Vec<Vec<i64>>,
    pub exceptional: Vec<Vec<i64>>,
    pub nodal: Vec<Vec<i64>>,
    pub ample: Vec<String>,
    pub periods: Vec<PeriodEntry>,
    #[serde(default)]
    pub test_vectors: Vec<Vec<String>>,
}

/// Parses `p/q`, an integer, or a decimal with optional exponent, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Fixture(format!("not an exact number: {s:?}"));
    if t.contains('/') {
        let q = BigRational::from_str(t).map_err(|_| bad())?;
        return Ok(q);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(k) => (&t[..k], t[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int}{frac}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(num);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn big(v: &[i64]) -> Vector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or_else(|| Error::Fixture(format!("entry {x} exceeds 64 bits")))).collect()
}

fn rationals(v: &[String]) -> Result<QVector> {
    v.iter().map(|s| parse_rational(s)).collect()
}

impl FixtureFile {
    pub fn into_marked(&self) -> Result<MarkedLattice> {
        if self.schema != FIXTURE_SCHEMA {
            return Err(Error::Fixture(format!("unknown schema {:?}, expected {FIXTURE_SCHEMA:?}", self.schema)));
        }
        let gram = IntMatrix::from_rows(&self.gram)?;
        let m = MarkedLattice {
            name: self.name.clone(),
            lattice: IntLattice::new(gram)?,
            fiber: big(&self.fiber),
            components: self.components.iter().map(|v| big(v)).collect(),
            exceptional: self.exceptional.iter().map(|v| big(v)).collect(),
            nodal: self.nodal.iter().map(|v| big(v)).collect(),
            ample: rationals(&self.ample)?,
            periods: self
                .periods
                .iter()
                .map(|p| Ok(ComplexQ::new(parse_rational(&p.re)?, parse_rational(&p.im)?)))
                .collect::<Result<_>>()?,
            test_vectors: self.test_vectors.iter().map(|v| rationals(v)).collect::<Result<_>>()?,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_marked(m: &MarkedLattice) -> Result<Self> {
        let g = m.lattice.gram();
        let gram = (0..g.rows()).map(|i| small(g.row(i))).collect::<Result<_>>()?;
        let fmt = |v: &QVector| v.iter().map(format_rational).collect::<Vec<_>>();
        Ok(Self {
            schema: FIXTURE_SCHEMA.to_string(),
            name: m.name.clone(),
            gram,
            fiber: small(&m.fiber)?,
            components: m.components.iter().map(|v| small(v)).collect::<Result<_>>()?,
            exceptional: m.exceptional.iter().map(|v| small(v)).collect::<Result<_>>()?,
            nodal: m.nodal.iter().map(|v| small(v)).collect::<Result<_>>()?,
            ample: fmt(&m.ample),
            periods: m
                .periods
                .iter()
                .map(|p| PeriodEntry { re: format_rational(&p.re), im: format_rational(&p.im) })
                .collect(),
            test_vectors: m.test_vectors.iter().map(fmt).collect(),
        })
    }
}

pub fn from_json(text: &str) -> Result<MarkedLattice> {
    let f: FixtureFile = serde_json::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;
    f.into_marked()
}

pub fn to_json(m: &MarkedLattice) -> Result<String> {
    serde_json::to_string_pretty(&FixtureFile::from_marked(m)?).map_err(|e| Error::Fixture(e.to_string()))
}

pub fn load(path: &Path) -> Result<MarkedLattice> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
    from_json(&text)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ib_fixture;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), q(-3, 4));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), q(-3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), q(200, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        for bad in ["", "abc", "1/0x", "1..2", "-", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(format_rational(&q(-3, 4)), "-3/4");
        assert_eq!(format_rational(&q(5, 1)), "5");
    }

    #[test]
    fn json_round_trip() {
        for b in [1, 4, 9] {
            let m = ib_fixture(b, if b < 8 { 1 } else { 0 }).unwrap();
            let text = to_json(&m).unwrap();
            assert_eq!(from_json(&text).unwrap(), m);
        }
    }

    #[test]
    fn rejects_malformed() {
        let m = ib_fixture(2, 1).unwrap();
        let mut f = FixtureFile::from_marked(&m).unwrap();
        f.schema = "other".into();
        assert!(f.into_marked().is_err());
        let mut f = FixtureFile::from_marked(&m).unwrap();
        f.components.pop();
        assert!(f.into_marked().is_err());
        assert!(from_json("{\"schema\": 1}").is_err());
    }
}
