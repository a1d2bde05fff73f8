//! Exact integer lattices for the Torelli matching of rational elliptic
//! surfaces: intersection forms, the `I_b` fibre cycle, nodal roots, Weyl
//! reflections, the positive cone cut out by `(-1)`-classes, and the
//! restriction to the complement of the fibre.

pub mod fixture;
pub mod torelli;
pub mod weyl;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{smith_normal_form, IntMatrix, SmithForm};
use crate::torus::validate_degree;

pub use torelli::{random_round_trip, torelli_match, RoundTripCase, TorelliVerdict};
pub use weyl::{
    chamber_signature, chamber_transport, enumerate_weyl_group, root_orbit, Transport, WeylElement, WeylGroup,
    DEFAULT_WORD_BOUND,
};

pub type Vector = Vec<BigInt>;
pub type QVector = Vec<BigRational>;

pub fn vector(v: &[i64]) -> Vector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn to_rational(v: &[BigInt]) -> QVector {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(k: &BigInt, a: &[BigInt]) -> Vector {
    a.iter().map(|x| k * x).collect()
}

/// Symmetric integer pairing on `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntLattice {
    gram: IntMatrix,
}

impl IntLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension { expected: gram.rows(), got: gram.cols() });
        }
        if gram.transpose() != gram {
            return Err(Error::InvalidMarking("gram matrix is not symmetric".into()));
        }
        Ok(Self { gram })
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    fn check(&self, v: &[BigInt]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::Dimension { expected: self.rank(), got: v.len() });
        }
        Ok(())
    }

    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let gb = self.gram.mul_vec(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    pub fn square(&self, a: &[BigInt]) -> BigInt {
        self.pair(a, a)
    }

    pub fn pair_q(&self, x: &[BigRational], b: &[BigInt]) -> BigRational {
        let gb = self.gram.mul_vec(b);
        x.iter().zip(&gb).map(|(p, y)| p * BigRational::from_integer(y.clone())).sum()
    }

    pub fn square_q(&self, x: &[BigRational]) -> BigRational {
        let n = self.rank();
        let mut s = BigRational::zero();
        for i in 0..n {
            for j in 0..n {
                let g = &self.gram[(i, j)];
                if !g.is_zero() {
                    s += &x[i] * &x[j] * BigRational::from_integer(g.clone());
                }
            }
        }
        s
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    /// First pair of basis vectors whose pairing `m` changes, if any.
    pub fn isometry_witness(&self, target: &IntLattice, m: &IntMatrix) -> Option<(usize, usize, BigInt, BigInt)> {
        let n = self.rank();
        if m.rows() != target.rank() || m.cols() != n {
            return Some((0, 0, BigInt::zero(), BigInt::zero()));
        }
        let cols: Vec<Vector> = (0..n).map(|j| m.column(j)).collect();
        for i in 0..n {
            for j in i..n {
                let before = self.gram[(i, j)].clone();
                let after = target.pair(&cols[i], &cols[j]);
                if before != after {
                    return Some((i, j, before, after));
                }
            }
        }
        None
    }
}

/// `H^2` of a rational elliptic surface: basis `h, e_1, ..., e_9` with
/// pairing `diag(1, -1, ..., -1)`.
pub fn standard_res_lattice() -> IntLattice {
    let mut d = vec![-1i64; 10];
    d[0] = 1;
    IntLattice::new(IntMatrix::diagonal(&d)).expect("diagonal is symmetric")
}

/// `a h - sum c_i e_i` in the standard basis.
pub fn res_class(a: i64, c: [i64; 9]) -> Vector {
    let mut v = vec![BigInt::from(a)];
    v.extend(c.iter().map(|&x| BigInt::from(-x)));
    v
}

/// `e_i`, `1 <= i <= 9`.
pub fn exceptional(i: usize) -> Vector {
    let mut v = vec![BigInt::zero(); 10];
    v[i] = BigInt::one();
    v
}

/// Fibre class `F = 3h - sum e_i = -K`.
pub fn fiber_class() -> Vector {
    res_class(3, [1; 9])
}

/// Exact complex number with rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexQ {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexQ {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_i64(re: i64, re_den: i64, im: i64, im_den: i64) -> Self {
        Self {
            re: BigRational::new(re.into(), re_den.into()),
            im: BigRational::new(im.into(), im_den.into()),
        }
    }

    pub fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn neg(&self) -> Self {
        Self { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn add_scaled(&self, k: &BigInt, other: &Self) -> Self {
        let k = BigRational::from_integer(k.clone());
        Self { re: &self.re + &k * &other.re, im: &self.im + &k * &other.im }
    }
}

impl fmt::Display for ComplexQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

/// Lattice together with the fibre cycle, supplied `(-1)`- and `(-2)`-class
/// sets, an ample reference class, and the period of `Omega` on each basis
/// vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedLattice {
    pub name: String,
    pub lattice: IntLattice,
    pub fiber: Vector,
    pub components: Vec<Vector>,
    pub exceptional: Vec<Vector>,
    pub nodal: Vec<Vector>,
    /// Generic class of the positive cone, used to pick the reference chamber.
    pub ample: QVector,
    pub periods: Vec<ComplexQ>,
    /// Extra classes on which cone membership is compared by the matcher.
    pub test_vectors: Vec<QVector>,
}

impl MarkedLattice {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// Period of `Omega` on a class, extended linearly from the basis.
    pub fn period(&self, x: &[BigInt]) -> ComplexQ {
        x.iter().zip(&self.periods).fold(ComplexQ::zero(), |acc, (k, p)| acc.add_scaled(k, p))
    }

    /// Checks the `I_b` combinatorics, the root and `(-1)` conditions, and
    /// dimensions. Verdicts elsewhere are relative to the supplied sets.
    pub fn validate(&self) -> Result<()> {
        let n = self.rank();
        let lat = &self.lattice;
        let dim = |v: &[BigInt]| lat.check(v);
        dim(&self.fiber)?;
        if self.periods.len() != n {
            return Err(Error::Dimension { expected: n, got: self.periods.len() });
        }
        if self.ample.len() != n {
            return Err(Error::Dimension { expected: n, got: self.ample.len() });
        }
        for v in self.components.iter().chain(&self.exceptional).chain(&self.nodal) {
            dim(v)?;
        }
        for v in &self.test_vectors {
            if v.len() != n {
                return Err(Error::Dimension { expected: n, got: v.len() });
            }
        }
        let b = self.components.len();
        validate_degree(b as i64)?;
        let sum = self.components.iter().fold(vec![BigInt::zero(); n], |acc, d| add(&acc, d));
        if sum != self.fiber {
            return Err(Error::InvalidMarking("fibre components do not sum to F".into()));
        }
        if !lat.square(&self.fiber).is_zero() {
            return Err(Error::InvalidMarking("F^2 != 0".into()));
        }
        let two = BigInt::from(2);
        for i in 0..b {
            for j in i..b {
                let got = lat.pair(&self.components[i], &self.components[j]);
                let want = intersection_rule(b, i, j);
                if got != BigInt::from(want) {
                    return Err(Error::InvalidMarking(format!(
                        "D{} . D{} = {got}, an I_{b} cycle needs {want}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (k, a) in self.nodal.iter().enumerate() {
            if lat.square(a) != -two.clone() {
                return Err(Error::NotARoot(format!("nodal class #{k} has square {}", lat.square(a))));
            }
            if let Some(i) = self.components.iter().position(|d| !lat.pair(a, d).is_zero()) {
                return Err(Error::InvalidMarking(format!("nodal class #{k} meets D{}", i + 1)));
            }
            if !self.period(a).is_zero() {
                return Err(Error::InvalidMarking(format!("nodal class #{k} has non-zero period")));
            }
        }
        for (k, e) in self.exceptional.iter().enumerate() {
            if lat.square(e) != -BigInt::one() {
                return Err(Error::InvalidMarking(format!("exceptional class #{k} has square {}", lat.square(e))));
            }
        }
        if !cpp_membership(&self.ample, self).member {
            return Err(Error::InvalidMarking("reference class is not in the positive cone".into()));
        }
        Ok(())
    }
}

/// Pairing `D_i . D_j` for an `I_b` cycle. `I_1` is a nodal curve with
/// `D_1^2 = 0`; `I_2` is two curves meeting in two points.
pub fn intersection_rule(b: usize, i: usize, j: usize) -> i64 {
    match b {
        1 => 0,
        2 => {
            if i == j {
                -2
            } else {
                2
            }
        }
        _ => {
            if i == j {
                -2
            } else if (i + 1) % b == j || (j + 1) % b == i {
                1
            } else {
                0
            }
        }
    }
}

/// `I_b` cycle: `D_1 = F` for `b = 1`, otherwise `D_i = e_i - e_{i+1}`
/// (`i < b`) and `D_b = F - e_1 + e_b`.
pub fn ib_components(b: usize) -> Result<Vec<Vector>> {
    validate_degree(b as i64)?;
    if b == 1 {
        return Ok(vec![fiber_class()]);
    }
    let mut out: Vec<Vector> = (1..b).map(|i| sub(&exceptional(i), &exceptional(i + 1))).collect();
    out.push(add(&sub(&fiber_class(), &exceptional(1)), &exceptional(b)));
    Ok(out)
}

/// Chain of nodal roots `e_i - e_{i+1}` for `b < i < b + 1 + rank`, all
/// orthogonal to the `I_b` cycle; they span a root system of type `A_rank`.
pub fn nodal_chain(b: usize, rank: usize) -> Result<Vec<Vector>> {
    if rank > 0 && b + rank > 8 {
        return Err(Error::InvalidArgument(format!("no A_{rank} chain orthogonal to an I_{b} cycle in this basis")));
    }
    Ok((b + 1..b + 1 + rank).map(|i| sub(&exceptional(i), &exceptional(i + 1))).collect())
}

/// Generic ample class `30 h - sum (i + 1) e_i`.
pub fn reference_ample() -> QVector {
    let mut c = [0i64; 9];
    for (i, x) in c.iter_mut().enumerate() {
        *x = i as i64 + 2;
    }
    to_rational(&res_class(30, c))
}

/// Deterministic periods: `e_i` in the nodal block share a period so that
/// every nodal root has period zero.
pub fn default_periods(b: usize, nodal_rank: usize) -> Vec<ComplexQ> {
    let block = b + 1..=b + 1 + nodal_rank;
    let mut p = vec![ComplexQ::from_i64(1, 1, 1, 2)];
    for i in 1..=9i64 {
        p.push(if nodal_rank > 0 && block.contains(&(i as usize)) {
            ComplexQ::from_i64(1, 3, 1, 5)
        } else {
            ComplexQ::from_i64(i, 7, -i, 11 + i)
        });
    }
    p
}

/// Marked lattice with an `I_b` fibre and an `A_rank` chain of nodal roots.
pub fn ib_fixture(b: usize, nodal_rank: usize) -> Result<MarkedLattice> {
    let m = MarkedLattice {
        name: format!("I_{b} with A_{nodal_rank} nodal chain"),
        lattice: standard_res_lattice(),
        fiber: fiber_class(),
        components: ib_components(b)?,
        exceptional: (1..=9).map(exceptional).collect(),
        nodal: nodal_chain(b, nodal_rank)?,
        ample: reference_ample(),
        periods: default_periods(b, nodal_rank),
        test_vectors: vec![to_rational(&res_class(1, [0; 9])), to_rational(&exceptional(1))],
    };
    m.validate()?;
    Ok(m)
}

/// `s_alpha(beta) = beta + <alpha, beta> alpha` for a root `alpha`.
pub fn reflect(lattice: &IntLattice, alpha: &[BigInt], beta: &[BigInt]) -> Result<Vector> {
    check_root(lattice, alpha)?;
    lattice.check(beta)?;
    Ok(add(beta, &scale(&lattice.pair(alpha, beta), alpha)))
}

pub fn check_root(lattice: &IntLattice, alpha: &[BigInt]) -> Result<()> {
    lattice.check(alpha)?;
    let sq = lattice.square(alpha);
    if sq != BigInt::from(-2) {
        return Err(Error::NotARoot(sq.to_string()));
    }
    Ok(())
}

pub fn reflect_q(lattice: &IntLattice, alpha: &[BigInt], x: &[BigRational]) -> QVector {
    let k = lattice.pair_q(x, alpha);
    x.iter().zip(alpha).map(|(xi, a)| xi + &k * BigRational::from_integer(a.clone())).collect()
}

/// Matrix of `s_alpha` acting on column vectors.
pub fn reflection_matrix(lattice: &IntLattice, alpha: &[BigInt]) -> Result<IntMatrix> {
    let n = lattice.rank();
    let cols = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            reflect(lattice, alpha, &e)
        })
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_columns(&cols, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CppVerdict {
    pub member: bool,
    pub square: BigRational,
    /// Index of the first supplied `(-1)`-class pairing negatively.
    pub violated_by: Option<usize>,
    /// Number of `(-1)`-classes checked; the verdict is relative to them.
    pub checked: usize,
    /// Set when no `(-1)`-classes were supplied.
    pub relative_to_empty_set: bool,
}

/// `beta^2 > 0` and `beta . E >= 0` for every supplied `(-1)`-class `E`.
pub fn cpp_membership(beta: &[BigRational], marked: &MarkedLattice) -> CppVerdict {
    let lat = &marked.lattice;
    let square = lat.square_q(beta);
    let violated_by = marked.exceptional.iter().position(|e| lat.pair_q(beta, e).is_negative());
    CppVerdict {
        member: square.is_positive() && violated_by.is_none(),
        square,
        violated_by,
        checked: marked.exceptional.len(),
        relative_to_empty_set: marked.exceptional.is_empty(),
    }
}

/// The quotient `Z^n / span{D_i}` computed from the Smith form of the
/// inclusion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LesRestriction {
    pub span_rank: usize,
    pub quotient_rank: usize,
    /// Non-trivial invariant factors of the inclusion: torsion of the quotient.
    pub torsion: Vec<BigInt>,
    smith: SmithForm,
}

/// Image of a class in the quotient: free coordinates and torsion residues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientClass {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl QuotientClass {
    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(&self.torsion).all(Zero::is_zero)
    }
}

pub fn les_restriction(marked: &MarkedLattice) -> Result<LesRestriction> {
    let n = marked.rank();
    let inclusion = IntMatrix::from_columns(&marked.components, n)?;
    let smith = smith_normal_form(&inclusion);
    let factors = smith.invariant_factors();
    let span_rank = smith.rank();
    let torsion = factors.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
    Ok(LesRestriction { span_rank, quotient_rank: n - span_rank, torsion, smith })
}

impl LesRestriction {
    pub fn project(&self, x: &[BigInt]) -> QuotientClass {
        let y = self.smith.u.mul_vec(x);
        let factors = self.smith.invariant_factors();
        let mut torsion = Vec::new();
        for (i, d) in factors.iter().enumerate().take(self.span_rank) {
            if !d.is_one() {
                torsion.push(y[i].mod_floor(d));
            }
        }
        QuotientClass { free: y[self.span_rank..].to_vec(), torsion }
    }

    /// Whether `delta_2 - delta_1` lies in the span of the fibre components.
    pub fn same_restriction(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        self.project(&sub(b, a)).is_zero()
    }
}

/// `Z`-basis of the classes orthogonal to every fibre component.
pub fn orthogonal_complement(marked: &MarkedLattice) -> Result<Vec<Vector>> {
    let n = marked.rank();
    let rows: Vec<Vector> = marked.components.iter().map(|d| marked.lattice.gram.mul_vec(d)).collect();
    let a = IntMatrix::from_rows(&rows)?;
    let f = smith_normal_form(&a);
    // u a v = s, so a v_j = 0 for the columns j >= rank
    Ok((f.rank()..n).map(|j| f.v.column(j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn lat() -> IntLattice {
        standard_res_lattice()
    }

    #[test]
    fn standard_lattice() {
        let l = lat();
        let f = fiber_class();
        assert!(l.square(&f).is_zero());
        assert_eq!(l.square(&res_class(1, [0; 9])), BigInt::one());
        for i in 1..=9 {
            for j in 1..=9 {
                let want = if i == j { -1 } else { 0 };
                assert_eq!(l.pair(&exceptional(i), &exceptional(j)), BigInt::from(want));
            }
        }
        assert_eq!(l.determinant(), BigInt::from(-1));
    }

    #[test]
    fn reflection_examples() {
        let l = lat();
        let a = sub(&exceptional(1), &exceptional(2));
        let b = sub(&exceptional(2), &exceptional(3));
        assert_eq!(l.pair(&a, &b), BigInt::one());
        assert_eq!(reflect(&l, &a, &b).unwrap(), sub(&exceptional(1), &exceptional(3)));
        assert_eq!(reflect(&l, &a, &a).unwrap(), scale(&BigInt::from(-1), &a));
        assert!(matches!(reflect(&l, &exceptional(1), &b), Err(Error::NotARoot(_))));
        let m = reflection_matrix(&l, &a).unwrap();
        assert!(l.isometry_witness(&l, &m).is_none());
    }

    #[test]
    fn randomized_reflection_invariants() {
        let l = lat();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for b in 1..=7 {
            let m = ib_fixture(b, 8 - b).unwrap();
            for _ in 0..40 {
                let alpha = &m.nodal[rng.random_range(0..m.nodal.len())];
                let beta: Vector = (0..10).map(|_| BigInt::from(rng.random_range(-9..=9))).collect();
                let gamma: Vector = (0..10).map(|_| BigInt::from(rng.random_range(-9..=9))).collect();
                let sb = reflect(&l, alpha, &beta).unwrap();
                assert_eq!(reflect(&l, alpha, &sb).unwrap(), beta);
                let sg = reflect(&l, alpha, &gamma).unwrap();
                assert_eq!(l.pair(&sb, &sg), l.pair(&beta, &gamma));
                for d in &m.components {
                    assert_eq!(&reflect(&l, alpha, d).unwrap(), d);
                }
            }
        }
    }

    #[test]
    fn cone_membership() {
        let m = ib_fixture(3, 2).unwrap();
        let q = |v: Vector| to_rational(&v);
        assert!(cpp_membership(&q(res_class(1, [0; 9])), &m).member);
        assert!(!cpp_membership(&q(exceptional(1)), &m).member);
        let v = res_class(1, [2, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(m.lattice.pair(&v, &exceptional(1)), BigInt::from(2));
        assert!(!cpp_membership(&q(v), &m).member);
        let empty = MarkedLattice { exceptional: vec![], ..m };
        let verdict = cpp_membership(&q(res_class(1, [0; 9])), &empty);
        assert!(verdict.member && verdict.relative_to_empty_set);
    }

    #[test]
    fn ib_fixtures_validate() {
        for b in 1..=9 {
            let m = ib_fixture(b, 0).unwrap();
            let les = les_restriction(&m).unwrap();
            assert_eq!(les.span_rank, b);
            assert_eq!(les.quotient_rank, 10 - b);
            for d in &m.components {
                assert!(les.project(d).is_zero());
            }
            assert!(les.same_restriction(&exceptional(0), &add(&exceptional(0), &m.fiber)));
            let perp = orthogonal_complement(&m).unwrap();
            assert_eq!(perp.len(), 10 - b);
            for v in &perp {
                for d in &m.components {
                    assert!(m.lattice.pair(v, d).is_zero());
                }
            }
        }
        let m1 = ib_fixture(1, 0).unwrap();
        let les = les_restriction(&m1).unwrap();
        assert!(!les.same_restriction(&exceptional(0), &add(&exceptional(0), &exceptional(1))));
        assert!(ib_components(10).is_err());
    }

    #[test]
    fn invalid_markings_rejected() {
        let mut m = ib_fixture(4, 1).unwrap();
        m.components.swap(0, 1);
        assert!(m.validate().is_err());
        let mut m = ib_fixture(4, 1).unwrap();
        m.nodal.push(sub(&exceptional(1), &exceptional(2)));
        assert!(m.validate().is_err());
        let mut m = ib_fixture(4, 1).unwrap();
        m.exceptional.push(sub(&exceptional(1), &exceptional(2)));
        assert!(m.validate().is_err());
    }

    /// Integer matrices of determinant one commuting with `[[1, b], [0, 1]]`
    /// are `+-[[1, m], [0, 1]]`.
    #[test]
    fn unipotent_centralizer() {
        for b in 1..=9i64 {
            let t = [[1, b], [0, 1]];
            for a in -5..=5i64 {
                for bb in -5..=5i64 {
                    for c in -5..=5i64 {
                        for d in -5..=5i64 {
                            if a * d - bb * c != 1 {
                                continue;
                            }
                            let m = [[a, bb], [c, d]];
                            let mt = [
                                [m[0][0] * t[0][0] + m[0][1] * t[1][0], m[0][0] * t[0][1] + m[0][1] * t[1][1]],
                                [m[1][0] * t[0][0] + m[1][1] * t[1][0], m[1][0] * t[0][1] + m[1][1] * t[1][1]],
                            ];
                            let tm = [
                                [t[0][0] * m[0][0] + t[0][1] * m[1][0], t[0][0] * m[0][1] + t[0][1] * m[1][1]],
                                [t[1][0] * m[0][0] + t[1][1] * m[1][0], t[1][0] * m[0][1] + t[1][1] * m[1][1]],
                            ];
                            if mt == tm {
                                assert!(c == 0 && a == d && a.abs() == 1, "{m:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}
