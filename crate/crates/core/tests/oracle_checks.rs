//! Implementation-vs-oracle checks: every dual-route contract in the
//! library is exercised against an independent computation here.

mod common;

use common::*;
use lpalg_core::algebra::{AlgElement, Carrier};
use lpalg_core::groupoid::{singleton_bisections, Bisection, FiniteGroupoid};
use lpalg_core::matrix::Matrix;
use lpalg_core::opnorm::{opnorm_bracket, opnorm_exact};
use lpalg_core::reps::is_tight_rep;
use lpalg_core::scalar::{rat_int, Exponent, Scalar};
use num_traits::Signed;
use lpalg_core::semigroup::{exel_semigroup, GroupTable, ISemigroup};
use lpalg_core::semilattice::FiniteSemilattice;
use lpalg_core::space::WeightedSpace;
use num_traits::ToPrimitive;
use rand::Rng;

fn random_small_matrix(rng: &mut rand_chacha::ChaCha8Rng, n: usize, nonneg: bool) -> Matrix {
    Matrix::from_fn(n, n, |_, _| {
        let q = random_rational(rng);
        Scalar::from_rational(if nonneg { q.abs() } else { q })
    })
}

#[test]
fn bracket_contains_grid_oracle_value() {
    let mut r = rng(41);
    for _ in 0..40 {
        let n = r.gen_range(1..=3);
        let nonneg = r.gen_bool(0.5);
        let m = random_small_matrix(&mut r, n, nonneg);
        for (num, den) in [(3i64, 2i64), (2, 1), (3, 1), (4, 1)] {
            let p = exponent(num, den);
            let pf = num as f64 / den as f64;
            let bracket = opnorm_bracket(&m, &p).unwrap();
            let oracle = grid_opnorm(&m, pf);
            assert!(
                bracket.lower <= oracle + 1e-6,
                "lower {} > oracle {} for {:?} p={}",
                bracket.lower,
                oracle,
                m,
                pf
            );
            assert!(
                oracle <= bracket.upper + 1e-9,
                "oracle {} > upper {} for {:?} p={}",
                oracle,
                bracket.upper,
                m,
                pf
            );
            if nonneg {
                assert!(
                    bracket.converged,
                    "nonnegative bracket must converge, width {}",
                    bracket.width()
                );
            }
        }
    }
}

#[test]
fn bracket_upper_submultiplicative_on_nonneg() {
    let mut r = rng(43);
    let p = exponent(3, 1);
    for _ in 0..25 {
        let n = r.gen_range(1..=4);
        let a = random_small_matrix(&mut r, n, true);
        let b = random_small_matrix(&mut r, n, true);
        let ba = opnorm_bracket(&a, &p).unwrap();
        let bb = opnorm_bracket(&b, &p).unwrap();
        let bab = opnorm_bracket(&(&a * &b), &p).unwrap();
        if ba.converged && bb.converged && bab.converged {
            assert!(
                bab.upper <= ba.upper * bb.upper + 1e-9,
                "submultiplicativity fails: {} > {} * {}",
                bab.upper,
                ba.upper,
                bb.upper
            );
        }
    }
}

#[test]
fn projective_lp_matches_dual_vertex_oracle() {
    let mut r = rng(47);
    let g = FiniteGroupoid::pair(3);
    let carrier = Carrier::untwisted(g.clone());
    let singles = singleton_bisections(&g);
    for trial in 0..60 {
        // a random element supported on ≤ 4 arrows
        let mut f = AlgElement::zero(carrier.clone());
        let mut support = Vec::new();
        while support.len() < r.gen_range(1..=4) {
            let a = r.gen_range(0..g.arrows());
            if !support.contains(&a) {
                support.push(a);
                let mut q = random_rational(&mut r);
                if q.to_f64().unwrap() == 0.0 {
                    q = rat_int(1);
                }
                f.set_coeff(a, Scalar::from_rational(q));
            }
        }
        // a random covering family of ≤ 4 bisections
        let mut family: Vec<Bisection> = Vec::new();
        for &a in &support {
            if family.len() < 4 && r.gen_bool(0.7) {
                family.push(singles[a].clone());
            }
        }
        // make sure the support is covered: group leftovers into one
        // diagonal-style bisection when possible, else add singletons
        for &a in &support {
            if !family.iter().any(|u| u.contains(a)) {
                family.push(singles[a].clone());
            }
        }
        while family.len() > 4 {
            family.pop();
            // re-cover
            for &a in &support {
                if !family.iter().any(|u| u.contains(a)) && family.len() < 4 {
                    family.push(singles[a].clone());
                }
            }
            if family.len() > 4 {
                continue;
            }
        }
        if support.iter().any(|&a| !family.iter().any(|u| u.contains(a))) {
            continue;
        }
        let (lp_value, pieces) = f.norm_projective(&family).unwrap();
        // decomposition reassembles f and certifies feasibility
        let mut acc = AlgElement::zero(carrier.clone());
        for (ui, piece) in &pieces {
            for arrow in piece.support() {
                assert!(family[*ui].contains(arrow));
            }
            acc = acc.add(piece).unwrap();
        }
        assert_eq!(acc, f, "trial {}", trial);
        // dual vertex enumeration
        let f_values: Vec<_> = support
            .iter()
            .map(|&a| f.coeff(a).re_exact().unwrap().clone())
            .collect();
        let covers: Vec<Vec<usize>> = family
            .iter()
            .map(|u| {
                support
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| u.contains(a))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let dual = projective_norm_dual_oracle(&support, &f_values, &covers);
        assert_eq!(lp_value, dual, "trial {}: LP and dual disagree", trial);
    }
}

#[test]
fn cover_reduction_matches_literal_on_random_semilattices() {
    let mut r = rng(53);
    for _ in 0..20 {
        // a random intersection-closed family of subsets of {0..4}
        let m = 5usize;
        let mut sets: Vec<u32> = vec![0, (1 << m) - 1];
        while sets.len() < 8 {
            let s: u32 = r.gen_range(0..(1u32 << m));
            if !sets.contains(&s) {
                sets.push(s);
            }
        }
        loop {
            let mut grew = false;
            let snapshot = sets.clone();
            for &a in &snapshot {
                for &b in &snapshot {
                    if !sets.contains(&(a & b)) {
                        sets.push(a & b);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        sets.sort_unstable();
        let n = sets.len();
        if n > 12 {
            continue;
        }
        let table: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| sets.binary_search(&(sets[i] & sets[j])).unwrap())
                    .collect()
            })
            .collect();
        let zero = sets.binary_search(&0).ok();
        let lat = FiniteSemilattice::validate(table, zero).unwrap();
        for e in 0..n {
            let below: Vec<usize> = (0..n).filter(|&f| lat.leq(f, e)).collect();
            for _ in 0..40 {
                let fam: Vec<usize> = below
                    .iter()
                    .copied()
                    .filter(|_| r.gen_bool(0.4))
                    .collect();
                assert_eq!(
                    lat.is_cover(e, &fam).unwrap(),
                    lat.is_cover_literal(e, &fam).unwrap()
                );
            }
        }
    }
}

#[test]
fn tightness_reduction_matches_cover_oracle() {
    let mut r = rng(59);
    // commutative inverse semigroups from small semilattices whose
    // elements are subsets; representations by diagonal indicators over
    // random character subsets
    let diamond = vec![
        vec![0, 0, 0, 0],
        vec![0, 1, 0, 1],
        vec![0, 0, 2, 2],
        vec![0, 1, 2, 3],
    ];
    let chain = vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]];
    for table in [diamond, chain] {
        let n = table.len();
        let s = ISemigroup::validate(table, (0..n).collect()).unwrap();
        let lat = s.semilattice().clone();
        let chars = lat.characters().unwrap();
        for _ in 0..30 {
            // a random subset of characters carries the representation
            let chosen: Vec<usize> = (0..chars.len()).filter(|_| r.gen_bool(0.6)).collect();
            let dim = chosen.len().max(1);
            let v_of = {
                let chars = chars.clone();
                let chosen = chosen.clone();
                move |pos: usize| -> Matrix {
                    let diag: Vec<Scalar> = (0..dim)
                        .map(|k| {
                            if k < chosen.len() && chars[chosen[k]].value(pos) {
                                Scalar::one()
                            } else {
                                Scalar::zero()
                            }
                        })
                        .collect();
                    Matrix::diagonal(&diag)
                }
            };
            let v: Vec<Matrix> = (0..s.len())
                .map(|el| v_of(s.idempotent_pos(el).unwrap()))
                .collect();
            let sp = WeightedSpace::counting(dim, Exponent::from_int(2).unwrap());
            let report = is_tight_rep(&s, &v, &sp).unwrap();
            let oracle = tightness_cover_oracle(&lat, &v_of, dim);
            assert_eq!(report.is_tight(), oracle, "chosen = {:?}", chosen);
        }
    }
}

#[test]
fn exel_models_match_word_closure_small() {
    for group in [GroupTable::cyclic(2), GroupTable::cyclic(3)] {
        let model = exel_semigroup(&group).unwrap();
        let eval = |w: &[usize]| -> usize {
            let mut acc = model.bracket[group.unit()];
            for &s in w {
                acc = model.semigroup.mul(acc, model.bracket[s]);
            }
            acc
        };
        let closure = exel_word_closure(&group, &eval, 4 * model.semigroup.len());
        assert_eq!(closure.reps.len(), model.semigroup.len());
        // the evaluation map is a bijection matching the tables
        let images: Vec<usize> = closure.reps.iter().map(|w| eval(w)).collect();
        let mut sorted = images.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), model.semigroup.len());
        for i in 0..closure.reps.len() {
            for j in 0..closure.reps.len() {
                assert_eq!(
                    model.semigroup.mul(images[i], images[j]),
                    images[closure.table[i][j]]
                );
            }
        }
    }
}

#[test]
fn spectral_norm_agrees_with_grid_oracle() {
    let mut r = rng(61);
    let p2 = Exponent::from_int(2).unwrap();
    for _ in 0..20 {
        let n = r.gen_range(1..=3);
        let m = random_small_matrix(&mut r, n, false);
        let exact = opnorm_exact(&m, &p2).unwrap();
        let oracle = grid_opnorm(&m, 2.0);
        assert!(
            (exact - oracle).abs() <= 1e-7 * exact.max(1.0),
            "{} vs {}",
            exact,
            oracle
        );
    }
}
