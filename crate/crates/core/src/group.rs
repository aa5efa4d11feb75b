//! Finite groups given by multiplication tables.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order for which tables are checked exhaustively and builtins exist.
pub const MAX_BUILTIN_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct Group {
    name: String,
    identity: usize,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    #[serde(default)]
    name: String,
    order: usize,
    identity: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<GroupRepr> for Group {
    type Error = Error;

    fn try_from(r: GroupRepr) -> Result<Self> {
        if r.order != r.table.len() {
            return Err(Error::InvalidGroup(format!(
                "order {} does not match table with {} rows",
                r.order,
                r.table.len()
            )));
        }
        let name = if r.name.is_empty() {
            format!("G{}", r.order)
        } else {
            r.name
        };
        Group::from_table(name, r.table, r.identity)
    }
}

impl From<Group> for GroupRepr {
    fn from(g: Group) -> Self {
        GroupRepr {
            order: g.order(),
            name: g.name,
            identity: g.identity,
            table: g.table,
        }
    }
}

impl Group {
    /// Validates that `table` is a Latin square with two-sided identity
    /// `identity` and that the operation is associative.
    pub fn from_table(
        name: impl Into<String>,
        table: Vec<Vec<usize>>,
        identity: usize,
    ) -> Result<Self> {
        let name = name.into();
        let n = table.len();
        let bad = |msg: String| Error::InvalidGroup(format!("{name}: {msg}"));
        if n == 0 {
            return Err(bad("empty table".into()));
        }
        if identity >= n {
            return Err(bad(format!("identity {identity} out of range")));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(bad(format!("row {a} has length {}", row.len())));
            }
            let seen: BTreeSet<usize> = row.iter().copied().collect();
            if seen.len() != n || row.iter().any(|&v| v >= n) {
                return Err(bad(format!("row {a} is not a permutation")));
            }
        }
        for b in 0..n {
            let col: BTreeSet<usize> = (0..n).map(|a| table[a][b]).collect();
            if col.len() != n {
                return Err(bad(format!("column {b} is not a permutation")));
            }
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return Err(bad(format!("{identity} is not a two-sided identity")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(bad(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| table[a][b] == identity)
                    .expect("latin square")
            })
            .collect();
        Ok(Group {
            name,
            identity,
            table,
            inverses,
        })
    }

    fn from_fn(
        name: impl Into<String>,
        n: usize,
        identity: usize,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let table = (0..n)
            .map(|a| (0..n).map(|b| mul(a, b)).collect())
            .collect();
        Group::from_table(name, table, identity)
    }

    /// Cyclic group `C_n` with element `i` standing for the `i`-th power of a generator.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        Group::from_fn(format!("C{n}"), n, 0, |a, b| (a + b) % n)
    }

    /// Direct product with row-major element indices `a * |other| + b`.
    pub fn direct_product(&self, other: &Group) -> Result<Self> {
        let m = other.order();
        let name = format!("{}x{}", self.name, other.name);
        Group::from_fn(
            name,
            self.order() * m,
            self.identity * m + other.identity,
            |u, v| self.mul(u / m, v / m) * m + other.mul(u % m, v % m),
        )
    }

    /// `C_n ⋊ C_m` where the generator of `C_m` acts by `a ↦ a^r`.
    /// Element `i + n*j` stands for `a^i b^j`.
    pub fn semidirect_cyclic(
        name: impl Into<String>,
        n: usize,
        m: usize,
        r: usize,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidGroup("semidirect factor of order 0".into()));
        }
        let mut rp = vec![1usize; m + 1];
        for j in 1..=m {
            rp[j] = rp[j - 1] * r % n;
        }
        if rp[m] % n != 1 % n {
            return Err(Error::InvalidGroup(format!("{r}^{m} is not 1 modulo {n}")));
        }
        Group::from_fn(name, n * m, 0, |u, v| {
            let (i1, j1) = (u % n, u / n);
            let (i2, j2) = (v % n, v / n);
            let i = (i1 + rp[j1] * i2) % n;
            let j = (j1 + j2) % m;
            i + n * j
        })
    }

    pub fn dihedral(n: usize) -> Result<Self> {
        Group::semidirect_cyclic(format!("D{n}"), n, 2, n - 1)
    }

    /// Dicyclic group of order `4n`: `a` of order `2n`, `x² = aⁿ`, `x a x⁻¹ = a⁻¹`.
    /// Element `k + 2n*j` stands for `a^k x^j`.
    pub fn dicyclic(name: impl Into<String>, n: usize) -> Result<Self> {
        let m = 2 * n;
        Group::from_fn(name, 2 * m, 0, |u, v| {
            let (k1, j1) = (u % m, u / m);
            let (k2, j2) = (v % m, v / m);
            let (k, j) = match (j1, j2) {
                (0, _) => ((k1 + k2) % m, j2),
                (_, 0) => ((k1 + m - k2) % m, 1),
                _ => ((k1 + m - k2 + n) % m, 0),
            };
            k + m * j
        })
    }

    /// Closure of a set of permutations of `{0..degree}` under composition.
    pub fn permutation_closure(name: impl Into<String>, generators: &[Vec<usize>]) -> Result<Self> {
        let degree = generators.first().map_or(0, Vec::len);
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut frontier = 0;
        while frontier < elems.len() {
            let cur = elems[frontier].clone();
            frontier += 1;
            for g in generators {
                let next: Vec<usize> = (0..degree).map(|p| g[cur[p]]).collect();
                if !index.contains_key(&next) {
                    if elems.len() >= 1 << 12 {
                        return Err(Error::InvalidGroup("permutation closure too large".into()));
                    }
                    index.insert(next.clone(), elems.len());
                    elems.push(next);
                }
            }
        }
        // (f·g)(p) = f(g(p))
        Group::from_fn(name, elems.len(), 0, |a, b| {
            let prod: Vec<usize> = (0..degree).map(|p| elems[a][elems[b][p]]).collect();
            index[&prod]
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// A generating set chosen greedily by element index.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span: BTreeSet<usize> = [self.identity].into();
        for x in 0..self.order() {
            if !span.contains(&x) {
                gens.push(x);
                span = self.closure(&gens);
            }
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut span: BTreeSet<usize> = [self.identity].into();
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if span.insert(y) {
                    stack.push(y);
                }
            }
        }
        span
    }

    /// All automorphisms as element permutations, found by trying every
    /// order-preserving image of the generators.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let n = self.order();
        let choices: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                (0..n)
                    .filter(|&x| self.element_order(x) == self.element_order(g))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut pick = vec![0; gens.len()];
        'outer: loop {
            let images: Vec<usize> = pick.iter().zip(&choices).map(|(&p, c)| c[p]).collect();
            if let Some(map) = self.extend_hom(&gens, &images) {
                out.push(map);
            }
            for slot in 0..pick.len() {
                pick[slot] += 1;
                if pick[slot] < choices[slot].len() {
                    continue 'outer;
                }
                pick[slot] = 0;
            }
            break;
        }
        out
    }

    /// The bijective homomorphism sending `gens[i]` to `images[i]`, if any.
    fn extend_hom(&self, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let n = self.order();
        let mut map = vec![usize::MAX; n];
        map[self.identity] = self.identity;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for (&g, &h) in gens.iter().zip(images) {
                let (y, fy) = (self.mul(x, g), self.mul(map[x], h));
                if map[y] == usize::MAX {
                    map[y] = fy;
                    stack.push(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        let hit: BTreeSet<usize> = map.iter().copied().collect();
        (hit.len() == n && !hit.contains(&usize::MAX)).then_some(map)
    }

    /// Componentwise product in `Gⁿ`, elements as index tuples.
    pub fn mul_tuple(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter().zip(b).map(|(&x, &y)| self.mul(x, y)).collect()
    }

    /// Looks up a builtin group by name (case-insensitive), or `C<n>` for any `n`.
    pub fn by_name(name: &str) -> Result<Self> {
        let wanted = normalize(name);
        if let Some(n) = wanted
            .strip_prefix('c')
            .and_then(|s| s.parse::<usize>().ok())
        {
            return Group::cyclic(n);
        }
        builtin_groups(MAX_BUILTIN_ORDER)?
            .into_iter()
            .find(|g| normalize(&g.name) == wanted)
            .ok_or_else(|| Error::UnknownGroup(name.to_string()))
    }
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| !matches!(c, '_' | ' '))
        .flat_map(char::to_lowercase)
        .map(|c| if c == '×' { 'x' } else { c })
        .collect()
}

/// Every builtin group of order at most `max_order` (which must not exceed 16):
/// all cyclic groups, all abelian groups as products of cyclic ones, and a
/// selection of nonabelian groups that includes every one of order at most 12.
pub fn builtin_groups(max_order: usize) -> Result<Vec<Group>> {
    if max_order > MAX_BUILTIN_ORDER {
        return Err(Error::invalid(format!(
            "builtin groups only go up to order {MAX_BUILTIN_ORDER}"
        )));
    }
    let c = Group::cyclic;
    let mut out = Vec::new();
    for n in 1..=max_order {
        out.push(c(n)?);
    }
    let abelian: [&[usize]; 9] = [
        &[2, 2],
        &[2, 4],
        &[2, 2, 2],
        &[3, 3],
        &[2, 6],
        &[2, 8],
        &[4, 4],
        &[2, 2, 4],
        &[2, 2, 2, 2],
    ];
    for factors in abelian {
        if factors.iter().product::<usize>() <= max_order {
            let mut g = c(factors[0])?;
            for &f in &factors[1..] {
                g = g.direct_product(&c(f)?)?;
            }
            out.push(g);
        }
    }
    let a4 = || Group::permutation_closure("A4", &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]);
    let nonabelian: Vec<(usize, Box<dyn Fn() -> Result<Group>>)> = vec![
        (6, Box::new(|| Group::semidirect_cyclic("S3", 3, 2, 2))),
        (8, Box::new(|| Group::dihedral(4))),
        (8, Box::new(|| Group::dicyclic("Q8", 2))),
        (10, Box::new(|| Group::dihedral(5))),
        (12, Box::new(|| Group::dihedral(6))),
        (12, Box::new(a4)),
        (12, Box::new(|| Group::dicyclic("Dic3", 3))),
        (14, Box::new(|| Group::dihedral(7))),
        (16, Box::new(|| Group::dihedral(8))),
        (16, Box::new(|| Group::dicyclic("Q16", 4))),
        (16, Box::new(|| Group::semidirect_cyclic("SD16", 8, 2, 3))),
        (16, Box::new(|| Group::semidirect_cyclic("M16", 8, 2, 5))),
        (16, Box::new(|| Group::semidirect_cyclic("C4:C4", 4, 4, 3))),
        (16, Box::new(|| c(2)?.direct_product(&Group::dihedral(4)?))),
        (
            16,
            Box::new(|| c(2)?.direct_product(&Group::dicyclic("Q8", 2)?)),
        ),
    ];
    for (order, make) in nonabelian {
        if order <= max_order {
            out.push(make()?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn automorphism_counts() {
        for (name, count) in [
            ("C1", 1),
            ("C2", 1),
            ("C5", 4),
            ("C2xC2", 6),
            ("S3", 6),
            ("D4", 8),
            ("Q8", 24),
            ("C12", 4),
        ] {
            let g = Group::by_name(name).unwrap();
            let auts = g.automorphisms();
            assert_eq!(auts.len(), count, "{name}");
            for f in &auts {
                assert!((0..g.order())
                    .all(|a| (0..g.order()).all(|b| f[g.mul(a, b)] == g.mul(f[a], f[b]))));
            }
        }
    }

    #[test]
    fn builtins_are_valid_and_named_uniquely() {
        let groups = builtin_groups(16).unwrap();
        let names: BTreeSet<&str> = groups.iter().map(Group::name).collect();
        assert_eq!(names.len(), groups.len());
        for g in &groups {
            assert!(g.order() <= 16);
        }
    }

    #[test]
    fn nonabelian_counts_by_order() {
        let groups = builtin_groups(16).unwrap();
        let nonab = |n: usize| -> Vec<String> {
            groups
                .iter()
                .filter(|g| g.order() == n && !g.is_abelian())
                .map(|g| g.name().to_string())
                .collect()
        };
        assert_eq!(nonab(6), vec!["S3"]);
        assert_eq!(nonab(8), vec!["D4", "Q8"]);
        assert_eq!(nonab(10), vec!["D5"]);
        assert_eq!(nonab(12).len(), 3);
        assert_eq!(nonab(14), vec!["D7"]);
        assert_eq!(nonab(16).len(), 7);
        assert!(groups.iter().any(|g| g.name() == "C2xC4"));
    }

    #[test]
    fn abelian_counts_by_order() {
        let groups = builtin_groups(16).unwrap();
        let count = |n: usize| {
            groups
                .iter()
                .filter(|g| g.order() == n && g.is_abelian())
                .count()
        };
        // Numbers of abelian groups of each order up to isomorphism.
        let expected = [1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5];
        for (n, &e) in (1..=16).zip(&expected) {
            assert_eq!(count(n), e, "order {n}");
        }
    }

    #[test]
    fn element_orders_distinguish_q8_from_d4() {
        let q8 = Group::by_name("Q8").unwrap();
        let d4 = Group::by_name("d4").unwrap();
        let involutions = |g: &Group| (0..g.order()).filter(|&a| g.element_order(a) == 2).count();
        assert_eq!(involutions(&q8), 1);
        assert_eq!(involutions(&d4), 5);
        let a4 = Group::by_name("A4").unwrap();
        assert_eq!(a4.order(), 12);
        assert_eq!(involutions(&a4), 3);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Group::from_table("bad", vec![vec![0, 1], vec![0, 1]], 0).is_err());
        assert!(Group::from_table("bad", vec![vec![1, 0], vec![0, 1]], 0).is_err());
        // Latin square with identity but not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            Group::from_table("loop", loop5, 0),
            Err(Error::InvalidGroup(_))
        ));
        assert!(Group::semidirect_cyclic("x", 5, 2, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = Group::by_name("S3").unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"order\":6"));
        let back: Group = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(
            serde_json::from_str::<Group>(r#"{"order":2,"identity":0,"table":[[0,1],[0,1]]}"#)
                .is_err()
        );
    }

    #[test]
    fn unknown_name() {
        assert_eq!(
            Group::by_name("Z7").unwrap_err(),
            Error::UnknownGroup("Z7".into())
        );
        assert_eq!(Group::by_name("c7").unwrap().order(), 7);
    }
}
