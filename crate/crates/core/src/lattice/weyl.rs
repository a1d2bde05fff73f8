//! Weyl groups generated by nodal reflections, their chambers, and the
//! transport of one chamber to another.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_root, reflect, reflection_matrix, IntLattice, QVector, Vector};
use crate::error::{Error, Result};
use crate::numerics::IntMatrix;

pub const DEFAULT_WORD_BOUND: usize = 8;

/// Largest root orbit accepted; larger orbits indicate an infinite group.
pub const ORBIT_CAP: usize = 4096;

/// Group element with the word that produced it: `word = [i1, ..., ik]`
/// stands for `s_{i1} s_{i2} ... s_{ik}` in the generator list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylElement {
    pub matrix: IntMatrix,
    pub word: Vec<usize>,
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        Self { matrix: IntMatrix::identity(rank), word: Vec::new() }
    }

    pub fn from_word(lattice: &IntLattice, generators: &[Vector], word: &[usize]) -> Result<Self> {
        let mut m = IntMatrix::identity(lattice.rank());
        for &i in word {
            let alpha = generators
                .get(i)
                .ok_or_else(|| Error::InvalidArgument(format!("generator index {i} out of range")))?;
            m = &m * &reflection_matrix(lattice, alpha)?;
        }
        Ok(Self { matrix: m, word: word.to_vec() })
    }

    pub fn apply(&self, v: &[BigInt]) -> Vector {
        self.matrix.mul_vec(v)
    }

    pub fn apply_q(&self, x: &[BigRational]) -> QVector {
        apply_q(&self.matrix, x)
    }

    /// `M^T G M = G`.
    pub fn preserves(&self, lattice: &IntLattice) -> bool {
        lattice.isometry_witness(lattice, &self.matrix).is_none()
    }

    pub fn fixes_all(&self, classes: &[Vector]) -> bool {
        classes.iter().all(|c| &self.apply(c) == c)
    }

    /// Inverse: the reversed word, as every generator is an involution.
    pub fn inverse(&self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.inverse_unimodular()?, word: self.word.iter().rev().copied().collect() })
    }
}

pub fn apply_q(m: &IntMatrix, x: &[BigRational]) -> QVector {
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(x).map(|(a, b)| BigRational::from_integer(a.clone()) * b).sum())
        .collect()
}

fn canonical(v: Vector) -> Vector {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.into_iter().map(|x| -x).collect(),
        _ => v,
    }
}

/// All roots `w(alpha)` for `w` in the group generated by the reflections
/// in `generators`, one representative per pair `+-beta`.
pub fn root_orbit(lattice: &IntLattice, generators: &[Vector]) -> Result<Vec<Vector>> {
    for g in generators {
        check_root(lattice, g)?;
    }
    let mut seen: HashSet<Vector> = HashSet::new();
    let mut out = Vec::new();
    let mut queue: Vec<Vector> = generators.iter().cloned().map(canonical).collect();
    while let Some(v) = queue.first().cloned() {
        queue.remove(0);
        if !seen.insert(v.clone()) {
            continue;
        }
        out.push(v.clone());
        if out.len() > ORBIT_CAP {
            return Err(Error::InvalidArgument(format!(
                "root orbit exceeds {ORBIT_CAP} roots; the reflection group looks infinite"
            )));
        }
        for g in generators {
            let w = canonical(reflect(lattice, g, &v)?);
            if !seen.contains(&w) {
                queue.push(w);
            }
        }
    }
    Ok(out)
}

/// Signs of `x . alpha` over `roots`.
pub fn chamber_signature(lattice: &IntLattice, x: &[BigRational], roots: &[Vector]) -> Result<Vec<i8>> {
    roots
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let p = lattice.pair_q(x, a);
            if p.is_zero() {
                Err(Error::OnWall(k))
            } else if p.is_positive() {
                Ok(1)
            } else {
                Ok(-1)
            }
        })
        .collect()
}

/// Group elements reachable by words of length at most `bound`, each with
/// its lexicographically first shortest word.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylGroup {
    pub elements: Vec<WeylElement>,
    /// True when the search closed before the bound, so `elements` is the
    /// whole group.
    pub exhausted: bool,
    pub bound: usize,
}

pub fn enumerate_weyl_group(lattice: &IntLattice, generators: &[Vector], bound: usize) -> Result<WeylGroup> {
    let reflections =
        generators.iter().map(|g| reflection_matrix(lattice, g)).collect::<Result<Vec<IntMatrix>>>()?;
    let id = WeylElement::identity(lattice.rank());
    let mut seen: HashSet<IntMatrix> = HashSet::from([id.matrix.clone()]);
    let mut elements = vec![id.clone()];
    let mut frontier = vec![id];
    let mut exhausted = false;
    for _ in 0..bound {
        let children: Vec<Vec<WeylElement>> = frontier
            .par_iter()
            .map(|parent| {
                reflections
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let mut word = parent.word.clone();
                        word.push(i);
                        WeylElement { matrix: &parent.matrix * s, word }
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for child in children.into_iter().flatten() {
            if seen.insert(child.matrix.clone()) {
                next.push(child);
            }
        }
        if next.is_empty() {
            exhausted = true;
            break;
        }
        elements.extend(next.iter().cloned());
        frontier = next;
    }
    if !exhausted {
        // one more level decides whether the bound happened to close the group
        exhausted = frontier.iter().all(|p| reflections.iter().all(|s| seen.contains(&(&p.matrix * s))));
    }
    Ok(WeylGroup { elements, exhausted, bound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    /// First element, in word order, taking the chamber of `x` to that of `y`.
    pub element: Option<WeylElement>,
    /// Number of enumerated elements doing so.
    pub matches: usize,
    pub group_size: usize,
    pub exhausted: bool,
}

impl Transport {
    pub fn unique(&self) -> bool {
        self.matches == 1
    }
}

/// Searches the group generated by `generators` for `g` with `g x` in the
/// chamber of `y`, chambers being cut out by the full root orbit.
pub fn chamber_transport(
    lattice: &IntLattice,
    x: &[BigRational],
    y: &[BigRational],
    generators: &[Vector],
    bound: usize,
) -> Result<Transport> {
    let roots = root_orbit(lattice, generators)?;
    chamber_signature(lattice, x, &roots)?;
    let target = chamber_signature(lattice, y, &roots)?;
    let group = enumerate_weyl_group(lattice, generators, bound)?;
    let hits: Vec<bool> = group
        .elements
        .par_iter()
        .map(|g| chamber_signature(lattice, &g.apply_q(x), &roots).map(|s| s == target).unwrap_or(false))
        .collect();
    let element = hits.iter().position(|&h| h).map(|k| group.elements[k].clone());
    Ok(Transport {
        element,
        matches: hits.iter().filter(|&&h| h).count(),
        group_size: group.elements.len(),
        exhausted: group.exhausted,
    })
}
