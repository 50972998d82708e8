use arccount::classes::{Class, MultiClass, Weight};
use arccount::functional;
use arccount::intersect::{i_curves, i_multi, is_simple, self_intersection};
use arccount::mlz::{chart_for, decode, enumerate_mlz, thurston_ball_estimate, Coords, Slope};
use arccount::surface::make_preset;

fn slopes(n: i64) -> Vec<Slope> {
    let mut out = Vec::new();
    for p in -n..=n {
        for q in -n..=n {
            let s = Slope { p, q };
            if s.is_normalized() {
                out.push(s);
            }
        }
    }
    out
}

#[test]
fn charts_decode_distinct_simple_curves() {
    // On the torus i = |ps - qr|; on the four-holed sphere every crossing is
    // doubled, i = 2|ps - qr|.
    for (name, factor) in [("S_1_1", 1u64), ("S_0_4", 2)] {
        let s = make_preset(name).unwrap();
        let chart = chart_for(&s).unwrap();
        let all = slopes(6);
        let curves: Vec<_> = all.iter().map(|&sl| chart.curve(&s, sl).unwrap()).collect();
        for (i, x) in all.iter().enumerate() {
            assert!(!curves[i].is_peripheral(), "{name} {x:?}");
            assert_eq!(self_intersection(&s, &curves[i]), 0, "{name} {x:?}");
            for (j, y) in all.iter().enumerate().skip(i + 1) {
                assert_ne!(curves[i], curves[j], "{name}: {x:?} and {y:?} collide");
                let det = (x.p * y.q - x.q * y.p).unsigned_abs();
                assert_eq!(i_curves(&s, &curves[i], &curves[j]), factor * det, "{name} {x:?} {y:?}");
            }
        }
    }
}

#[test]
fn multiples_are_simple_multicurves() {
    let s = make_preset("S_1_1").unwrap();
    let chart = chart_for(&s).unwrap();
    let mu = MultiClass::parse(&s, "a+b").unwrap();
    for sl in slopes(4) {
        for c in 1..=4 {
            let m = decode(chart.as_ref(), &s, Coords::new(c, sl.p, sl.q)).unwrap();
            assert!(is_simple(&s, &m));
            let expect = c * (sl.p.abs() + sl.q.abs());
            assert_eq!(i_multi(&s, &m, &mu).unwrap(), Weight::from_integer(expect));
        }
    }
    assert!(decode(chart.as_ref(), &s, Coords::new(1, 2, 4)).is_err());
    assert!(decode(chart.as_ref(), &s, Coords::new(0, 1, 0)).is_err());
    assert!(decode(chart.as_ref(), &s, Coords::new(1, -1, 1)).is_err());
}

#[test]
fn torus_counts_match_lattice_formula() {
    // Integral simple multicurves on S_1_1 are c·(p, q); with F = i(·, a+b)
    // their value is c(|p|+|q|), so the count is a lattice-point sum.
    let s = make_preset("S_1_1").unwrap();
    let chart = chart_for(&s).unwrap();
    let f = functional::build(&s, "i:a+b").unwrap();
    for l in [1i64, 2, 3, 5, 8, 13] {
        let mut brute = 0u64;
        for sl in slopes(l) {
            let n = sl.p.abs() + sl.q.abs();
            brute += (l / n) as u64;
        }
        let got = enumerate_mlz(chart.as_ref(), &s, f.as_ref(), Weight::from_integer(l)).unwrap();
        assert_eq!(got, brute, "L={l}");
    }
    assert_eq!(enumerate_mlz(chart.as_ref(), &s, f.as_ref(), Weight::from_integer(1)).unwrap(), 2);
    assert_eq!(enumerate_mlz(chart.as_ref(), &s, f.as_ref(), Weight::from_integer(2)).unwrap(), 6);
}

#[test]
fn ball_estimates_converge_on_torus() {
    let s = make_preset("S_1_1").unwrap();
    let chart = chart_for(&s).unwrap();
    let f = functional::build(&s, "i:a+b").unwrap();
    let levels: Vec<Weight> = [16, 32, 64, 128].map(Weight::from_integer).to_vec();
    let b = thurston_ball_estimate(chart.as_ref(), &s, f.as_ref(), &levels).unwrap();
    // N(L) = L(L+1) for this functional
    for (l, c) in levels.iter().zip(&b.counts) {
        let l = l.to_integer() as u64;
        assert_eq!(*c, l * (l + 1));
    }
    assert!((b.estimate() - 1.0).abs() < 0.01);
}

#[test]
fn homogeneity_on_chart_curves() {
    for name in ["S_1_1", "S_0_4"] {
        let s = make_preset(name).unwrap();
        let chart = chart_for(&s).unwrap();
        let f = functional::build(&s, "triweight").unwrap();
        for sl in slopes(3) {
            let c = chart.curve(&s, sl).unwrap();
            let one = f.eval_curve(&s, &c).unwrap();
            assert!(one > Weight::from_integer(0));
            let m = MultiClass::single(Class::Curve(c), Weight::from_integer(3)).unwrap();
            assert_eq!(f.eval_multi(&s, &m).unwrap(), one * Weight::from_integer(3));
        }
    }
}
