mod support;

use arccount::classes::{canonical_curve, CurveClass};
use arccount::intersect::{i_arc_curve, i_curves, self_intersection};
use arccount::surface::make_preset;
use arccount::word::{self, Letter, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

#[test]
fn engine_agrees_with_hyperbolic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut agreed = 0;
    let mut skipped = 0;
    for name in ["S_1_1", "S_0_4", "S_1_2"] {
        let s = make_preset(name).unwrap();
        for _ in 0..60 {
            let u = random_curve(&mut rng, &s, 8);
            let v = random_curve(&mut rng, &s, 8);
            match oracle_i_curves(&s, u.word(), v.word(), CURVE_DEPTH) {
                Ok(n) => {
                    assert_eq!(i_curves(&s, &u, &v), n, "{name}: i({u}, {v})");
                    agreed += 1;
                }
                Err(_) => skipped += 1,
            }
            match oracle_self_intersection(&s, u.word(), CURVE_DEPTH) {
                Ok(n) => {
                    assert_eq!(self_intersection(&s, &u), n, "{name}: self({u})");
                    agreed += 1;
                }
                Err(_) => skipped += 1,
            }
        }
        for _ in 0..40 {
            let a = random_arc(&mut rng, &s, 5);
            let v = random_curve(&mut rng, &s, 6);
            match oracle_i_arc(&s, (a.start(), a.end()), a.word(), v.word(), ARC_DEPTH) {
                Ok(n) => {
                    assert_eq!(i_arc_curve(&s, &a, &v).unwrap(), n, "{name}: i({a}, {v})");
                    agreed += 1;
                }
                Err(_) => skipped += 1,
            }
        }
    }
    println!("oracle agreed={agreed} skipped={skipped}");
    assert!(agreed >= 300, "only {agreed} stabilized comparisons");
}

#[test]
fn oracle_small_examples() {
    let s = make_preset("S_1_1").unwrap();
    let w = |t: &str| s.parse_word(t).unwrap();
    assert_eq!(oracle_i_curves(&s, &w("a"), &w("b"), 6), Ok(1));
    assert_eq!(oracle_i_curves(&s, &w("a"), &w("a"), 6), Ok(0));
    assert_eq!(oracle_i_curves(&s, &w("ab"), &w("ab'"), 6), Ok(2));
    assert_eq!(oracle_self_intersection(&s, &w("aab'"), 6), Ok(0));
    assert_eq!(oracle_self_intersection(&s, &w("aabb"), 6), Ok(1));
    let long: Word = w("ab").repeat(7);
    assert_eq!(oracle_i_curves(&s, &long, &w("a"), 6), Err(OracleError::WordTooLong));
}

#[test]
fn slope_curves_on_torus() {
    let s = make_preset("S_1_1").unwrap();
    let mut slopes = Vec::new();
    for p in -6i64..=6 {
        for q in -6i64..=6 {
            let g = num_integer::gcd(p, q);
            if g == 1 && (p > 0 || (p == 0 && q > 0)) {
                slopes.push((p, q));
            }
        }
    }
    let curves: Vec<CurveClass> = slopes
        .iter()
        .map(|&(p, q)| canonical_curve(&s, &slope_word(p, q)).unwrap())
        .collect();
    for (i, &(p, q)) in slopes.iter().enumerate() {
        assert_eq!(self_intersection(&s, &curves[i]), 0, "slope ({p},{q}) is simple");
        for (j, &(r, t)) in slopes.iter().enumerate() {
            let expect = (p * t - q * r).unsigned_abs();
            assert_eq!(i_curves(&s, &curves[i], &curves[j]), expect, "({p},{q}) vs ({r},{t})");
        }
    }
}

#[test]
fn symmetry_on_short_words() {
    for name in ["S_1_1", "S_0_4"] {
        let s = make_preset(name).unwrap();
        let mut words: Vec<Word> = vec![vec![]];
        let mut curves = Vec::new();
        for _ in 0..4 {
            let mut next = Vec::new();
            for w in &words {
                for code in 0..2 * s.rank() as u8 {
                    let l = Letter::from_code(code);
                    if w.last().is_some_and(|&x| x == l.inv()) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            for w in &next {
                if let Ok(c) = canonical_curve(&s, w) {
                    if !c.is_peripheral() && !curves.contains(&c) {
                        curves.push(c);
                    }
                }
            }
            words = next;
        }
        for u in &curves {
            for v in &curves {
                assert_eq!(i_curves(&s, u, v), i_curves(&s, v, u), "{name}: {u} {v}");
            }
            let inv = canonical_curve(&s, &word::inverse(u.word())).unwrap();
            assert_eq!(self_intersection(&s, u), self_intersection(&s, &inv));
        }
    }
}
