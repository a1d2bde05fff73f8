//! Exact lattice suites: reflections, chambers, restriction quotients and
//! Torelli-type matching.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use instanton_core::lattice::fixture;
use instanton_core::lattice::torelli::{component_reflection, doubling_map, negated_periods};
use instanton_core::lattice::{
    chamber_signature, chamber_transport, enumerate_weyl_group, exceptional, ib_fixture, les_restriction,
    random_round_trip, reflect, root_orbit, standard_res_lattice, sub, torelli_match, MarkedLattice, Vector,
    WeylElement,
};
use instanton_core::{Error, Result};

use crate::config::RunConfig;
use crate::report::{Criterion, SuiteRecord, Table};

fn equals(expected: f64) -> Criterion {
    Criterion::Equals { expected }
}

fn case_rng(base: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(i as u64);
    rng
}

fn random_vector(rng: &mut impl Rng, n: usize) -> Vector {
    (0..n).map(|_| BigInt::from(rng.random_range(-20..=20))).collect()
}

/// `e_i - e_j` or `h - e_i - e_j - e_k` with random indices and sign.
fn random_root(rng: &mut impl Rng) -> Vector {
    let idx: Vec<usize> = rand::seq::index::sample(rng, 9, 3).into_iter().map(|i| i + 1).collect();
    let r = if rng.random_bool(0.5) {
        sub(&exceptional(idx[0]), &exceptional(idx[1]))
    } else {
        let mut v = exceptional(0);
        for &i in &idx {
            v[i] -= 1;
        }
        v
    };
    if rng.random_bool(0.5) {
        r.iter().map(|x| -x).collect()
    } else {
        r
    }
}

#[derive(Default)]
struct Failures {
    involution: u32,
    pairing: u32,
    fixing: u32,
}

fn reflection_case(fixtures: &[MarkedLattice], base: u64, i: usize) -> Result<Failures> {
    let mut rng = case_rng(base, i);
    let m = fixtures.choose(&mut rng).ok_or(Error::InvalidArgument("no fixtures".into()))?;
    let l = &m.lattice;
    let alpha = random_root(&mut rng);
    let (beta, gamma) = (random_vector(&mut rng, 10), random_vector(&mut rng, 10));
    let sb = reflect(l, &alpha, &beta)?;
    let sg = reflect(l, &alpha, &gamma)?;
    let mut f = Failures::default();
    if reflect(l, &alpha, &sb)? != beta {
        f.involution += 1;
    }
    if l.pair(&sb, &sg) != l.pair(&beta, &gamma) {
        f.pairing += 1;
    }
    let len = rng.random_range(1..=4);
    let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..m.nodal.len())).collect();
    let g = WeylElement::from_word(l, &m.nodal, &word)?;
    if !g.fixes_all(&m.components) || !g.preserves(l) {
        f.fixing += 1;
    }
    Ok(f)
}

/// Rank over `Q` by fraction-free elimination, independent of the Smith form.
fn rational_rank(vectors: &[Vector]) -> usize {
    let mut rows: Vec<Vec<BigRational>> =
        vectors.iter().map(|v| v.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            let k = &rows[r][c] / &rows[rank][c];
            for j in c..cols {
                let d = &k * &rows[rank][j];
                rows[r][j] -= d;
            }
        }
        rank += 1;
    }
    rank
}

fn random_point(rng: &mut impl Rng) -> Vec<BigRational> {
    (0..10).map(|_| BigRational::new(rng.random_range(-50..=50).into(), rng.random_range(1..=7).into())).collect()
}

pub fn lattice(cfg: &RunConfig, rec: &mut SuiteRecord) -> Result<()> {
    let c = &cfg.lattice;
    let seed = cfg.suite_seed("lattice");
    let mut fixtures = Vec::new();
    for b in 1..=7 {
        for rank in 1..=3usize.min(8 - b) {
            fixtures.push(ib_fixture(b, rank)?);
        }
    }
    let outcomes = (0..c.random_cases)
        .into_par_iter()
        .map(|i| reflection_case(&fixtures, seed, i))
        .collect::<Result<Vec<Failures>>>()?;
    let sum = |f: fn(&Failures) -> u32| f64::from(outcomes.iter().map(f).sum::<u32>());
    rec.check("reflection_involution_failures", sum(|f| f.involution), equals(0.0));
    rec.check("reflection_pairing_failures", sum(|f| f.pairing), equals(0.0));
    rec.check("nodal_weyl_component_fixing_failures", sum(|f| f.fixing), equals(0.0));
    rec.record("random_cases", c.random_cases);

    // A_2 chambers against exhaustive enumeration of its Weyl group
    let l = standard_res_lattice();
    let gens = vec![sub(&exceptional(1), &exceptional(2)), sub(&exceptional(2), &exceptional(3))];
    let roots = root_orbit(&l, &gens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa2);
    let mut reps: BTreeMap<Vec<i8>, Vec<BigRational>> = BTreeMap::new();
    for _ in 0..c.chamber_points {
        let x = random_point(&mut rng);
        match chamber_signature(&l, &x, &roots) {
            Ok(sig) => {
                reps.entry(sig).or_insert(x);
            }
            Err(Error::OnWall(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let group = enumerate_weyl_group(&l, &gens, c.word_bound)?;
    let mut agree = 0u32;
    for x in reps.values() {
        for (ysig, y) in &reps {
            let oracle: Vec<&WeylElement> = group
                .elements
                .iter()
                .filter(|g| chamber_signature(&l, &g.apply_q(x), &roots).as_ref() == Ok(ysig))
                .collect();
            let t = chamber_transport(&l, x, y, &gens, c.word_bound)?;
            if oracle.len() == 1 && t.unique() && t.element.as_ref() == Some(oracle[0]) {
                agree += 1;
            }
        }
    }
    rec.check("a2_root_count", roots.len() as f64, equals(3.0));
    rec.check("a2_chambers_sampled", reps.len() as f64, equals(6.0));
    rec.check("a2_group_order", group.elements.len() as f64, equals(6.0));
    rec.check("a2_group_exhausted", f64::from(u8::from(group.exhausted)), equals(1.0));
    rec.check("a2_unique_transport_pairs", f64::from(agree), equals(36.0));

    let mut table = Table::new(&["fixture", "b", "span_rank", "quotient_rank", "oracle_quotient_rank", "torsion"]);
    let mut mismatches = 0u32;
    let mut row = |name: String, m: &MarkedLattice| -> Result<()> {
        let les = les_restriction(m)?;
        let oracle = m.rank() - rational_rank(&m.components);
        if les.quotient_rank != oracle {
            mismatches += 1;
        }
        let torsion: Vec<String> = les.torsion.iter().map(ToString::to_string).collect();
        table.push(vec![
            json!(name),
            json!(m.components.len()),
            json!(les.span_rank),
            json!(les.quotient_rank),
            json!(oracle),
            json!(torsion.join(" ")),
        ]);
        Ok(())
    };
    for b in 1..=9 {
        row(format!("I_{b}"), &ib_fixture(b, 0)?)?;
    }
    for path in &c.fixtures {
        let m = fixture::load(path)?;
        row(m.name.clone(), &m)?;
    }
    rec.check("les_quotient_rank_mismatches", f64::from(mismatches), equals(0.0));
    rec.tables.insert("restriction".into(), table);
    Ok(())
}

struct TripOutcome {
    b: usize,
    nodal: usize,
    word: usize,
    recovered: bool,
    matches: usize,
    exhausted: bool,
    periods_identified: bool,
    marking_identified: Option<bool>,
    isometry_rejected: bool,
}

pub fn torelli(cfg: &RunConfig, rec: &mut SuiteRecord) -> Result<()> {
    let t = &cfg.torelli;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.suite_seed("torelli"));
    let cases = (0..t.round_trips).map(|_| random_round_trip(&mut rng, t.max_word)).collect::<Result<Vec<_>>>()?;
    let outcomes = cases
        .par_iter()
        .map(|case| {
            let v = torelli_match(&case.source, &case.target, &case.mu, t.word_bound)?;
            let recovered = v.all_ok() && v.correction.as_ref().map(|g| &g.matrix) == Some(&case.planted.matrix);
            let p = torelli_match(&case.source, &negated_periods(&case.target), &case.mu, t.word_bound)?;
            let b = case.source.components.len();
            let marking_identified = if b >= 2 {
                let r = component_reflection(&case.target)?;
                let v = torelli_match(&case.source, &case.target, &r, t.word_bound)?;
                Some(v.failing == ["components"] && v.correction.is_none())
            } else {
                None
            };
            let bad = torelli_match(&case.source, &case.target, &doubling_map(&case.source), t.word_bound);
            Ok(TripOutcome {
                b,
                nodal: case.source.nodal.len(),
                word: case.planted.word.len(),
                recovered,
                matches: v.matches,
                exhausted: v.group_exhausted,
                periods_identified: p.failing == ["periods"] && p.correction.is_none(),
                marking_identified,
                isometry_rejected: matches!(bad, Err(Error::PairingNotPreserved { .. })),
            })
        })
        .collect::<Result<Vec<TripOutcome>>>()?;

    let count = |f: fn(&TripOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64;
    let n = outcomes.len() as f64;
    let marking_cases = outcomes.iter().filter(|o| o.marking_identified.is_some()).count() as f64;
    rec.check("planted_element_recovered", count(|o| o.recovered), equals(n));
    rec.check("period_mismatch_identified", count(|o| o.periods_identified), equals(n));
    rec.check("marking_mismatch_identified", count(|o| o.marking_identified == Some(true)), equals(marking_cases));
    rec.check("non_isometry_rejected", count(|o| o.isometry_rejected), equals(n));
    let mut table = Table::new(&["case", "b", "nodal_rank", "word_length", "recovered", "matches", "group_exhausted"]);
    for (i, o) in outcomes.iter().enumerate() {
        table.push(vec![json!(i), json!(o.b), json!(o.nodal), json!(o.word), json!(o.recovered), json!(o.matches), json!(o.exhausted)]);
    }
    rec.tables.insert("round_trips".into(), table);

    let mut fixture_ok = 0u32;
    for path in &t.fixtures {
        let m = fixture::load(path)?;
        let id = instanton_core::lattice::torelli::identity_isometry(&m);
        let v = torelli_match(&m, &m, &id, t.word_bound)?;
        if v.all_ok() {
            fixture_ok += 1;
        }
        rec.record(&format!("fixture:{}", m.name), &v.failing);
    }
    if !t.fixtures.is_empty() {
        rec.check("fixture_self_match", f64::from(fixture_ok), equals(t.fixtures.len() as f64));
    }
    Ok(())
}
