use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;
use tensorbound::bounds::lp_balanced_distribution;
use tensorbound::degeneration::{apply_monomial_map, power_map, MonomialMap};
use tensorbound::interval::Interval;
use tensorbound::io::{tensor_from_json, tensor_from_text, tensor_to_json, tensor_to_text};
use tensorbound::search::{exact_independence, SearchOptions};
use tensorbound::{Rational, Tensor, Triple};

fn small_tensor(max_dim: usize, max_terms: usize) -> impl Strategy<Value = Tensor> {
    (1..=max_dim, 1..=max_dim, 1..=max_dim).prop_flat_map(move |(x, y, z)| {
        proptest::collection::btree_set((0..x, 0..y, 0..z), 1..=max_terms).prop_map(move |set| {
            Tensor::from_support(
                [x, y, z],
                set.into_iter().map(|(i, j, k)| Triple::new(i, j, k)),
            )
            .unwrap()
        })
    })
}

fn weighted(t: Tensor) -> impl Strategy<Value = Tensor> {
    let [x, y, z] = t.dims();
    proptest::collection::vec(-3i64..=3, x + y + z).prop_map(move |w| {
        let coeffs = t
            .support()
            .map(|tr| {
                (
                    tr,
                    Rational::new((w[tr.i] + 2).into(), (1 + w[x + tr.j].abs()).into()),
                )
            })
            .filter(|(_, c)| !c.is_zero());
        Tensor::new(t.dims(), coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_multiplies_dims_and_terms(a in small_tensor(3, 5), b in small_tensor(3, 5)) {
        let ab = a.tensor_product(&b);
        let [p, q, r] = a.dims();
        let [s, t, u] = b.dims();
        prop_assert_eq!(ab.dims(), [p * s, q * t, r * u]);
        prop_assert_eq!(ab.len(), a.len() * b.len());
        for x in a.support() {
            for y in b.support() {
                prop_assert!(ab.contains(Triple::new(x.i * s + y.i, x.j * t + y.j, x.k * u + y.k)));
            }
        }
    }

    #[test]
    fn product_is_associative(a in small_tensor(2, 3), b in small_tensor(2, 3), c in small_tensor(2, 3)) {
        prop_assert_eq!(a.tensor_product(&b).tensor_product(&c), a.tensor_product(&b.tensor_product(&c)));
    }

    #[test]
    fn power_map_commutes_with_power(t in small_tensor(3, 6), w in proptest::collection::vec(0i64..=2, 9)) {
        // Shift the z-weights so every sum is nonnegative and the map is total.
        let [x, y, z] = t.dims();
        let a: Vec<i64> = w[..x].to_vec();
        let b: Vec<i64> = w[3..3 + y].to_vec();
        let shift = t.support().map(|tr| a[tr.i] + b[tr.j]).min().unwrap_or(0);
        let c: Vec<i64> = (0..z).map(|k| w[6 + k] - shift).collect();
        let m = MonomialMap { a, b, c };
        let image = apply_monomial_map(&t, &m).unwrap();
        let p = t.power(2, 1 << 16).unwrap();
        let image2 = apply_monomial_map(&p, &power_map(&m, 2)).unwrap();
        prop_assert_eq!(image2, image.power(2, 1 << 16).unwrap());
    }

    #[test]
    fn json_and_text_round_trip(t in small_tensor(4, 8).prop_flat_map(weighted)) {
        let json = tensor_to_json(&t);
        prop_assert_eq!(&tensor_from_json(&json).unwrap(), &t);
        let text = tensor_to_text(&t);
        let back = tensor_from_text(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(tensor_to_json(&back), json);
    }

    #[test]
    fn witnesses_are_valid_and_bounded(t in small_tensor(4, 10)) {
        let r = exact_independence(&t, SearchOptions::default());
        prop_assert!(r.exact);
        r.witness.validate(&t).unwrap();
        let [a, b, c] = t.minimal_sets().sizes();
        prop_assert!(r.witness.size <= a.min(b).min(c));
        prop_assert!(r.witness.size >= 1);
    }

    #[test]
    fn zeroing_out_is_a_subtensor(t in small_tensor(4, 10), keep in proptest::collection::vec(any::<bool>(), 12)) {
        let [x, y, z] = t.dims();
        let sub = tensorbound::AxisSubset::new(
            (0..x).filter(|&i| keep[i]),
            (0..y).filter(|&j| keep[4 + j]),
            (0..z).filter(|&k| keep[8 + k]),
        );
        let zeroed = t.zero_out(&sub);
        prop_assert!(zeroed.is_subtensor_of(&t));
        let ids: BTreeSet<Triple> = zeroed.support().collect();
        prop_assert!(t.support().filter(|tr| sub.contains(*tr)).eq(ids.into_iter()));
    }

    #[test]
    fn intervals_nest_with_precision(n in 1i64..10_000, d in 1i64..1_000) {
        let r = Rational::new(n.into(), d.into());
        let eval = |prec: u32| -> Interval {
            let v = Interval::from_rational(prec, &r);
            v.ln().unwrap().exp().mul(&v.cbrt()).add(&v.sqrt().unwrap())
        };
        let (coarse, fine) = (eval(64), eval(256));
        let exact = (n as f64 / d as f64).powf(4.0 / 3.0) + (n as f64 / d as f64).sqrt();
        prop_assert!(fine.width_f64() <= coarse.width_f64());
        prop_assert!(coarse.lo_f64() <= fine.hi_f64() && fine.lo_f64() <= coarse.hi_f64());
        prop_assert!((fine.mid_f64() - exact).abs() <= 1e-9 * exact.max(1.0));
    }

    #[test]
    fn balanced_lp_is_monotone_in_eps(t in small_tensor(3, 9).prop_filter("square", |t| t.is_square())) {
        let q = t.dims()[0];
        let mut was = false;
        for k in 0..=3 {
            let eps = Rational::new(k.into(), (3 * q).into());
            let now = lp_balanced_distribution(&t, &eps).unwrap().is_feasible();
            prop_assert!(!was || now);
            was = now;
        }
    }
}
