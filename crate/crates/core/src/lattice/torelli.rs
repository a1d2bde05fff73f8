//! Matching two marked lattices through an isometry: fibre components,
//! `(-1)`-classes, periods, and the Weyl correction between reference
//! chambers.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::weyl::{apply_q, chamber_transport, WeylElement};
use super::{
    cpp_membership, ib_components, nodal_chain, orthogonal_complement, reflection_matrix, res_class,
    standard_res_lattice, to_rational, ComplexQ, MarkedLattice, Vector,
};
use crate::error::{Error, Result};
use crate::numerics::IntMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorelliVerdict {
    pub pairing_preserved: bool,
    /// `mu(D_i) = D_i` for every component, in order.
    pub components_fixed: bool,
    /// `mu` maps the supplied `(-1)`-classes onto the target's and preserves
    /// cone membership of the test vectors.
    pub cone_preserved: bool,
    /// Periods agree through `mu` on a basis of the classes orthogonal to
    /// the fibre components.
    pub periods_match: bool,
    pub failing: Vec<String>,
    /// Weyl element `g` with `mu g` taking the reference chamber to the
    /// target's; only searched when every condition holds.
    pub correction: Option<WeylElement>,
    pub matches: usize,
    pub unique: bool,
    pub group_exhausted: bool,
}

impl TorelliVerdict {
    pub fn all_ok(&self) -> bool {
        self.failing.is_empty() && self.correction.is_some() && self.unique
    }
}

fn sorted(mut v: Vec<Vector>) -> Vec<Vector> {
    v.sort();
    v
}

pub fn torelli_match(
    source: &MarkedLattice,
    target: &MarkedLattice,
    mu: &IntMatrix,
    bound: usize,
) -> Result<TorelliVerdict> {
    source.validate()?;
    target.validate()?;
    if let Some((i, j, before, after)) = source.lattice.isometry_witness(&target.lattice, mu) {
        return Err(Error::PairingNotPreserved { i, j, before: before.to_string(), after: after.to_string() });
    }
    let mut failing = Vec::new();

    let components_fixed = source.components.len() == target.components.len()
        && source.components.iter().zip(&target.components).all(|(d1, d2)| &mu.mul_vec(d1) == d2);
    if !components_fixed {
        failing.push("components".to_string());
    }

    let mapped = sorted(source.exceptional.iter().map(|e| mu.mul_vec(e)).collect());
    let mut cone_preserved = mapped == sorted(target.exceptional.clone());
    for v in std::iter::once(&source.ample).chain(&source.test_vectors) {
        let here = cpp_membership(v, source).member;
        let there = cpp_membership(&apply_q(mu, v), target).member;
        cone_preserved &= here == there;
    }
    if !cone_preserved {
        failing.push("cone".to_string());
    }

    let periods_match =
        orthogonal_complement(source)?.iter().all(|x| source.period(x) == target.period(&mu.mul_vec(x)));
    if !periods_match {
        failing.push("periods".to_string());
    }

    let mut verdict = TorelliVerdict {
        pairing_preserved: true,
        components_fixed,
        cone_preserved,
        periods_match,
        failing,
        correction: None,
        matches: 0,
        unique: false,
        group_exhausted: false,
    };
    if verdict.failing.is_empty() {
        let pulled: Vec<BigRational> = apply_q(&mu.inverse_unimodular()?, &target.ample);
        let t = chamber_transport(&source.lattice, &source.ample, &pulled, &source.nodal, bound)?;
        verdict.unique = t.unique();
        verdict.matches = t.matches;
        verdict.group_exhausted = t.exhausted;
        verdict.correction = t.element;
    }
    Ok(verdict)
}

/// Randomised matching problem with a known answer.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripCase {
    pub source: MarkedLattice,
    pub target: MarkedLattice,
    pub mu: IntMatrix,
    pub planted: WeylElement,
}

fn random_q(rng: &mut impl Rng) -> BigRational {
    BigRational::new(rng.random_range(-40..=40).into(), rng.random_range(1..=9).into())
}

/// Random `I_b` marked lattice with an `A_k` nodal chain (`k <= 3`),
/// random periods and a random generic reference class.
pub fn random_marked_lattice(rng: &mut impl Rng) -> Result<MarkedLattice> {
    let b = rng.random_range(1..=6usize);
    let rank = rng.random_range(1..=3usize.min(8 - b));
    let block = b + 1..=b + 1 + rank;
    let shared = ComplexQ::new(random_q(rng), random_q(rng));
    let mut periods = vec![ComplexQ::new(random_q(rng), random_q(rng))];
    for i in 1..=9 {
        periods.push(if block.contains(&i) { shared.clone() } else { ComplexQ::new(random_q(rng), random_q(rng)) });
    }
    let mut coeffs: Vec<i64> = (2..=10).collect();
    coeffs.shuffle(rng);
    let mut c = [0i64; 9];
    c.copy_from_slice(&coeffs);
    let m = MarkedLattice {
        name: format!("random I_{b} with A_{rank}"),
        lattice: standard_res_lattice(),
        fiber: super::fiber_class(),
        components: ib_components(b)?,
        exceptional: (1..=9).map(super::exceptional).collect(),
        nodal: nodal_chain(b, rank)?,
        ample: to_rational(&res_class(30, c)),
        periods,
        test_vectors: vec![to_rational(&res_class(1, [0; 9]))],
    };
    m.validate()?;
    Ok(m)
}

/// Plants a random Weyl word `g` of length at most `max_len` and returns
/// `mu = g^{-1}` between two copies of a random marked lattice; the matcher
/// must recover `g`.
pub fn random_round_trip(rng: &mut impl Rng, max_len: usize) -> Result<RoundTripCase> {
    let source = random_marked_lattice(rng)?;
    let len = rng.random_range(0..=max_len);
    let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..source.nodal.len())).collect();
    let planted = WeylElement::from_word(&source.lattice, &source.nodal, &word)?;
    let mu = planted.inverse()?.matrix;
    Ok(RoundTripCase { target: source.clone(), source, mu, planted })
}

/// Same data with every period negated.
pub fn negated_periods(m: &MarkedLattice) -> MarkedLattice {
    MarkedLattice { periods: m.periods.iter().map(ComplexQ::neg).collect(), ..m.clone() }
}

/// Reflection in the first fibre component, an isometry that moves the
/// marking (`D_1 -> -D_1`). Needs `b >= 2`.
pub fn component_reflection(m: &MarkedLattice) -> Result<IntMatrix> {
    reflection_matrix(&m.lattice, &m.components[0])
}

pub fn identity_isometry(m: &MarkedLattice) -> IntMatrix {
    IntMatrix::identity(m.rank())
}

/// A non-isometry, for rejection tests: `h -> 2h`.
pub fn doubling_map(m: &MarkedLattice) -> IntMatrix {
    let mut d = vec![BigInt::from(1); m.rank()];
    d[0] = BigInt::from(2);
    IntMatrix::diagonal(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ib_fixture, DEFAULT_WORD_BOUND};
    use rand::SeedableRng;

    #[test]
    fn identity_matches() {
        let m = ib_fixture(2, 3).unwrap();
        let v = torelli_match(&m, &m, &identity_isometry(&m), DEFAULT_WORD_BOUND).unwrap();
        assert!(v.all_ok(), "{v:?}");
        assert!(v.correction.unwrap().word.is_empty());
    }

    #[test]
    fn single_reflection_recovered() {
        let m = ib_fixture(3, 2).unwrap();
        let s = reflection_matrix(&m.lattice, &m.nodal[1]).unwrap();
        let v = torelli_match(&m, &m, &s, DEFAULT_WORD_BOUND).unwrap();
        assert!(v.all_ok());
        assert_eq!(v.correction.unwrap().matrix, s);
    }

    #[test]
    fn round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let case = random_round_trip(&mut rng, 6).unwrap();
            let v = torelli_match(&case.source, &case.target, &case.mu, DEFAULT_WORD_BOUND).unwrap();
            assert!(v.all_ok());
            assert_eq!(v.correction.unwrap().matrix, case.planted.matrix);
        }
    }

    #[test]
    fn failures_are_identified() {
        let m = ib_fixture(3, 2).unwrap();
        let id = identity_isometry(&m);
        let v = torelli_match(&m, &negated_periods(&m), &id, DEFAULT_WORD_BOUND).unwrap();
        assert_eq!(v.failing, vec!["periods".to_string()]);
        assert!(v.correction.is_none());

        let r = component_reflection(&m).unwrap();
        let v = torelli_match(&m, &m, &r, DEFAULT_WORD_BOUND).unwrap();
        assert!(!v.components_fixed && v.failing.contains(&"components".to_string()));
        assert!(v.correction.is_none());

        let err = torelli_match(&m, &m, &doubling_map(&m), DEFAULT_WORD_BOUND).unwrap_err();
        assert!(matches!(err, Error::PairingNotPreserved { i: 0, j: 0, .. }));
    }
}
