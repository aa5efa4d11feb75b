//! Search results against brute-force oracles written independently of
//! the library's search code.

use std::collections::HashSet;

use tensorbound::bounds::{bound_corners, bound_measures, detect_corners};
use tensorbound::catalog;
use tensorbound::group::Group;
use tensorbound::search::{
    exact_independence, extract_sumfree, subtensor_embedding_search, sumfree_search,
    verify_sumfree, EmbeddingOutcome, SearchOptions,
};
use tensorbound::{Partition, Tensor, Triple};

/// Largest set of terms with pairwise disjoint variables whose variables
/// induce no other term. Exponential in the number of terms.
fn brute_independence(t: &Tensor) -> usize {
    let terms: Vec<Triple> = t.support().collect();
    assert!(terms.len() <= 20);
    let mut best = 0;
    for mask in 0u32..(1 << terms.len()) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let chosen: Vec<Triple> = (0..terms.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| terms[b])
            .collect();
        let xs: HashSet<usize> = chosen.iter().map(|t| t.i).collect();
        let ys: HashSet<usize> = chosen.iter().map(|t| t.j).collect();
        let zs: HashSet<usize> = chosen.iter().map(|t| t.k).collect();
        if xs.len() != size || ys.len() != size || zs.len() != size {
            continue;
        }
        let induced = terms
            .iter()
            .filter(|t| xs.contains(&t.i) && ys.contains(&t.j) && zs.contains(&t.k))
            .count();
        if induced == size {
            best = size;
        }
    }
    best
}

fn search(t: &Tensor) -> usize {
    let r = exact_independence(t, SearchOptions::default());
    assert!(r.exact);
    r.witness.validate(t).unwrap();
    r.witness.size
}

fn small_catalog() -> Vec<(String, Tensor)> {
    let mut v = vec![
        ("matmul(2,2,2)".to_string(), catalog::matmul(2, 2, 2)),
        ("matmul(1,2,3)".to_string(), catalog::matmul(1, 2, 3)),
        ("matmul(2,2,3)".to_string(), catalog::matmul(2, 2, 3)),
    ];
    for q in 1..=5 {
        v.push((format!("cw({q})"), catalog::cw(q).tensor));
    }
    for q in 1..=4 {
        v.push((format!("cyclic({q})"), catalog::cyclic_tensor(q)));
    }
    for q in 2..=5 {
        v.push((format!("tq_lower({q})"), catalog::tq_lower(q)));
        v.push((format!("diagonal({q})"), catalog::distinct_diagonal(q)));
    }
    for r in 1..=6 {
        v.push((format!("independent({r})"), catalog::independent(r)));
    }
    v.into_iter().filter(|(_, t)| t.len() <= 20).collect()
}

#[test]
fn independence_matches_brute_force() {
    for (name, t) in small_catalog() {
        assert_eq!(search(&t), brute_independence(&t), "{name}");
    }
}

#[test]
fn independence_of_known_tensors() {
    for r in 1..=6 {
        assert_eq!(search(&catalog::independent(r)), r);
    }
    assert_eq!(search(&catalog::cw(1).tensor), 2);
    for q in 1..=6 {
        let t = catalog::cw(q).tensor;
        for part in catalog::cw_three_partition(&t).unwrap().part_tensors(&t) {
            assert_eq!(search(&part), 1);
        }
    }
}

#[test]
fn supermultiplicativity() {
    let base = [
        catalog::cw(1).tensor,
        catalog::cw(2).tensor,
        catalog::cyclic_tensor(3),
        catalog::tq_lower(3),
        catalog::matmul(1, 2, 2),
        catalog::independent(2),
    ];
    let mut pairs = 0;
    for (i, a) in base.iter().enumerate() {
        for b in &base[i..] {
            let ab = a.tensor_product(b);
            if ab.len() > 120 {
                continue;
            }
            let (ia, ib) = (search(a), search(b));
            assert!(search(&ab) >= ia * ib);
            pairs += 1;
        }
    }
    assert!(pairs >= 10, "only {pairs} pairs");
}

#[test]
fn values_respect_upper_bounds() {
    let prec = 128;
    let tensors = [
        catalog::cw(1).tensor,
        catalog::cw(2).tensor,
        catalog::cw(3).tensor,
        catalog::tq_lower(3),
        catalog::tq_lower(4),
        catalog::cyclic_tensor(3),
        catalog::independent(3),
    ];
    for t in &tensors {
        for n in 1..=2 {
            let p = t.power(n, 1 << 20).unwrap();
            let i = search(&p);
            let root = (i as f64).powf(1.0 / n as f64);
            let [a, b, c] = p.minimal_sets().sizes();
            assert!(i <= a.min(b).min(c));
            assert!((i as f64) <= (p.measure() as f64).cbrt() + 1e-9);
            // Bounds stated for T itself apply to every power's root.
            let trivial = bound_measures(t, &Partition::trivial(t), prec).unwrap();
            assert!(root <= trivial.value.hi_f64() + 1e-12);
            if detect_corners(t).is_some() && t.is_square() {
                let corner = bound_corners(t.dims()[0], prec).unwrap();
                assert!(
                    root <= corner.value.hi_f64(),
                    "corner bound violated at n={n}"
                );
            }
            if let Ok(part) = catalog::cw_three_partition(t) {
                let m = bound_measures(t, &part, prec).unwrap();
                assert!(root <= m.value.hi_f64());
            }
        }
    }
}

/// All injections tried directly.
fn brute_embeds(a: &Tensor, b: &Tensor) -> bool {
    fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for prefix in injections(n - 1, m) {
            for v in 0..m {
                if !prefix.contains(&v) {
                    let mut p = prefix.clone();
                    p.push(v);
                    out.push(p);
                }
            }
        }
        out
    }
    let [da, db, dc] = a.dims();
    let [ea, eb, ec] = b.dims();
    let terms: Vec<Triple> = a.support().collect();
    let (xs, ys, zs) = (injections(da, ea), injections(db, eb), injections(dc, ec));
    xs.iter().any(|x| {
        ys.iter().any(|y| {
            zs.iter().any(|z| {
                terms
                    .iter()
                    .all(|t| b.contains(Triple::new(x[t.i], y[t.j], z[t.k])))
            })
        })
    })
}

#[test]
fn embedding_matches_brute_force() {
    let cases = [
        (catalog::cw(1).tensor, "C3"),
        (catalog::cw(2).tensor, "C4"),
        (catalog::cw(2).tensor, "C2xC2"),
        (catalog::cw(3).tensor, "C5"),
        (catalog::tq_lower(3), "C3"),
        (catalog::matmul(1, 2, 2), "C4"),
    ];
    for (a, name) in cases {
        let g = Group::by_name(name).unwrap();
        let b = catalog::group_tensor(&g).tensor;
        let r = subtensor_embedding_search(&a, &b, SearchOptions::default(), Some(&g)).unwrap();
        let found = match r.outcome {
            EmbeddingOutcome::Found { witness } => {
                witness.validate(&a, &b).unwrap();
                true
            }
            EmbeddingOutcome::NotEmbeddable => false,
            EmbeddingOutcome::Inconclusive => panic!("budget"),
        };
        assert_eq!(found, brute_embeds(&a, &b), "into {name}");
    }
}

/// `a₁b₂ ≠ c₃` checked straight from the cyclic group arithmetic.
fn cyclic_sumfree(q: usize, triples: &[[Vec<usize>; 3]]) -> bool {
    let add = |a: &[usize], b: &[usize]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + y) % q)
            .collect::<Vec<_>>()
    };
    triples.iter().all(|[a, b, c]| add(a, b) == *c)
        && (0..triples.len()).all(|i| {
            (0..triples.len()).all(|j| {
                (0..triples.len()).all(|k| {
                    (i == j && j == k) || add(&triples[i][0], &triples[j][1]) != triples[k][2]
                })
            })
        })
}

#[test]
fn sumfree_sets_from_witnesses() {
    for q in 2..=5 {
        let g = Group::cyclic(q).unwrap();
        for n in 1..=2 {
            let t = catalog::group_tensor(&g).tensor.power(n, 1 << 20).unwrap();
            let r = sumfree_search(&g, n, SearchOptions::default()).unwrap();
            assert!(r.exact);
            if t.len() <= 81 {
                assert_eq!(r.witness.size, search(&t), "C{q}^{n}");
            }
            let s = extract_sumfree(&g, n, &r.witness).unwrap();
            assert_eq!(s.len(), r.witness.size);
            assert!(verify_sumfree(&g, n, &s));
            assert!(cyclic_sumfree(q, &s.triples), "C{q}^{n}");
        }
    }
}
