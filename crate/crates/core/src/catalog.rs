//! Named tensor families: matrix multiplication, Coppersmith-Winograd,
//! cyclic and group tensors, with known asymptotic ranks as metadata.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::tensor::{Labels, Partition, Rational, Tensor, Triple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub tensor: Tensor,
    pub known_asymptotic_rank: Option<Rational>,
    pub provenance: String,
}

fn support(dims: [usize; 3], triples: impl IntoIterator<Item = Triple>) -> Tensor {
    Tensor::from_support(dims, triples).expect("catalog constructors produce valid supports")
}

/// `⟨a,b,c⟩ = Σ x_{ij} y_{jk} z_{ki}` with `x_{ij} = i*b + j`, `y_{jk} = j*c + k`, `z_{ki} = k*a + i`.
pub fn matmul(a: usize, b: usize, c: usize) -> Tensor {
    let mut triples = Vec::with_capacity(a * b * c);
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                triples.push(Triple::new(i * b + j, j * c + k, k * a + i));
            }
        }
    }
    let names = |p: char, r: usize, s: usize| -> Vec<String> {
        (0..r)
            .flat_map(|u| (0..s).map(move |v| format!("{p}{u},{v}")))
            .collect()
    };
    let labels = Labels {
        x: names('x', a, b),
        y: names('y', b, c),
        z: names('z', c, a),
    };
    support([a * b, b * c, c * a], triples)
        .with_labels(labels)
        .expect("label lengths match")
}

/// `⟨r⟩ = Σ x_i y_i z_i`.
pub fn independent(r: usize) -> Tensor {
    support([r, r, r], (0..r).map(|i| Triple::new(i, i, i)))
}

/// `CW_q` with corner index `q+1`:
/// `x0 y0 z_{q+1} + x0 y_{q+1} z0 + x_{q+1} y0 z0 + Σ (x_i y0 z_i + x0 y_i z_i + x_i y_i z0)`.
pub fn cw(q: usize) -> CatalogEntry {
    CatalogEntry {
        name: format!("cw{q}"),
        tensor: cw_general(q, &CwPerms::identity(q)).expect("identity permutations"),
        known_asymptotic_rank: Some(Rational::from_integer((q + 2).into())),
        provenance: "Coppersmith-Winograd tensor; border rank and asymptotic rank q+2".into(),
    }
}

/// The six permutations of `{1..q}` rewiring the middle terms of a
/// generalized CW tensor. Entry `p[i-1]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CwPerms {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub gamma: Vec<usize>,
    pub delta: Vec<usize>,
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

impl CwPerms {
    pub fn identity(q: usize) -> Self {
        let id: Vec<usize> = (1..=q).collect();
        CwPerms {
            alpha: id.clone(),
            beta: id.clone(),
            gamma: id.clone(),
            delta: id.clone(),
            sigma: id.clone(),
            tau: id,
        }
    }

    /// Identity everywhere except `σ`.
    pub fn with_sigma(sigma: Vec<usize>) -> Self {
        let mut p = CwPerms::identity(sigma.len());
        p.sigma = sigma;
        p
    }

    fn all(&self) -> [(&'static str, &Vec<usize>); 6] {
        [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("sigma", &self.sigma),
            ("tau", &self.tau),
        ]
    }

    pub fn validate(&self, q: usize) -> Result<()> {
        for (name, p) in self.all() {
            let distinct: BTreeSet<usize> = p.iter().copied().collect();
            if p.len() != q || distinct.len() != q || p.iter().any(|&v| v == 0 || v > q) {
                return Err(Error::InvalidPermutation(format!(
                    "{name} = {p:?} is not a permutation of 1..={q}"
                )));
            }
        }
        Ok(())
    }
}

/// `(x0 y0 z_{q+1} + x0 y_{q+1} z0 + x_{q+1} y0 z0)
///  + Σ_i (x_{τ(i)} y_{σ(i)} z0 + x_{α(i)} y0 z_{β(i)} + x0 y_{γ(i)} z_{δ(i)})`.
pub fn cw_general(q: usize, perms: &CwPerms) -> Result<Tensor> {
    perms.validate(q)?;
    let e = q + 1;
    let mut triples = vec![
        Triple::new(0, 0, e),
        Triple::new(0, e, 0),
        Triple::new(e, 0, 0),
    ];
    for i in 0..q {
        triples.push(Triple::new(perms.tau[i], perms.sigma[i], 0));
        triples.push(Triple::new(perms.alpha[i], 0, perms.beta[i]));
        triples.push(Triple::new(0, perms.gamma[i], perms.delta[i]));
    }
    support([q + 2; 3], triples).with_labels(Labels::indexed([q + 2; 3]))
}

/// `T_q = Σ x_i y_j z_{i+j mod q}`.
pub fn cyclic_tensor(q: usize) -> Tensor {
    support(
        [q; 3],
        (0..q).flat_map(|i| (0..q).map(move |j| Triple::new(i, j, (i + j) % q))),
    )
}

/// `T_q^lower = Σ_{i+j ≤ q-1} x_i y_j z_{i+j}`.
pub fn tq_lower(q: usize) -> Tensor {
    support(
        [q; 3],
        (0..q).flat_map(|i| (0..q - i).map(move |j| Triple::new(i, j, i + j))),
    )
}

/// `Σ_i x_i y_{q-1-i} z_i`: lower triangular with pairwise distinct diagonal z-variables.
pub fn distinct_diagonal(q: usize) -> Tensor {
    support([q; 3], (0..q).map(|i| Triple::new(i, q - 1 - i, i)))
}

/// `T_G = Σ x_g y_h z_{gh}` over the element indices of `G`.
pub fn group_tensor(g: &Group) -> CatalogEntry {
    let n = g.order();
    let names: Vec<String> = (0..n).map(|e| format!("{}[{e}]", g.name())).collect();
    let tensor = support(
        [n; 3],
        (0..n).flat_map(|a| (0..n).map(move |b| Triple::new(a, b, g.mul(a, b)))),
    )
    .with_labels(Labels {
        x: names.clone(),
        y: names.clone(),
        z: names,
    })
    .expect("label lengths match");
    let abelian = g.is_abelian();
    CatalogEntry {
        name: format!("group-{}", g.name()),
        tensor,
        known_asymptotic_rank: abelian.then(|| Rational::from_integer(n.into())),
        provenance: if abelian {
            "group algebra of an abelian group is diagonalizable; asymptotic rank |G|".into()
        } else {
            "group algebra tensor; asymptotic rank not recorded for nonabelian groups".into()
        },
    }
}

/// Block of a CW index: 0, middle (1..=q) or corner (q+1).
fn cw_block(idx: usize, q: usize) -> usize {
    match idx {
        0 => 0,
        i if i <= q => 1,
        _ => 2,
    }
}

/// Block pattern names of the six parts of a CW tensor, in partition order.
pub const CW_BLOCKS: [&str; 6] = ["T002", "T200", "T020", "T101", "T011", "T110"];

fn cw_block_part(t: Triple, q: usize) -> Option<usize> {
    match (cw_block(t.i, q), cw_block(t.j, q), cw_block(t.k, q)) {
        (0, 0, 2) => Some(0),
        (2, 0, 0) => Some(1),
        (0, 2, 0) => Some(2),
        (1, 0, 1) => Some(3),
        (0, 1, 1) => Some(4),
        (1, 1, 0) => Some(5),
        _ => None,
    }
}

fn cw_q_of(t: &Tensor) -> Result<usize> {
    let d = t.dims();
    if !t.is_square() || d[0] < 2 || t.len() != 3 * (d[0] - 1) {
        return Err(Error::invalid(
            "expected a generalized CW tensor in canonical index layout",
        ));
    }
    Ok(d[0] - 2)
}

fn cw_partition_by(t: &Tensor, part_of: impl Fn(usize) -> usize) -> Result<Partition> {
    let q = cw_q_of(t)?;
    let mut assignment = BTreeMap::new();
    for tr in t.support() {
        let block = cw_block_part(tr, q).ok_or_else(|| {
            Error::invalid(format!("term {tr} does not fit the CW block pattern"))
        })?;
        assignment.insert(tr, part_of(block));
    }
    Partition::new(t, &assignment)
}

/// The six block tensors `T002, T200, T020, T101, T011, T110` of a CW tensor.
pub fn cw_six_partition(t: &Tensor) -> Result<Partition> {
    cw_partition_by(t, |b| b)
}

/// Three parts, each one corner plus one middle family:
/// `T1 = T002 + T011`, `T2 = T200 + T101`, `T3 = T020 + T110`.
pub fn cw_three_partition(t: &Tensor) -> Result<Partition> {
    cw_partition_by(t, |b| match b {
        0 | 4 => 0,
        1 | 3 => 1,
        _ => 2,
    })
}

/// Structure of a tensor recognized as a generalized CW tensor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwStructure {
    pub q: usize,
    /// Per axis: the centre variable (index 0 in the canonical form).
    pub centre: [usize; 3],
    /// Per axis: the corner variable (index q+1 in the canonical form).
    pub corner: [usize; 3],
    /// Per axis: the middle variables in increasing order (indices 1..=q).
    pub middle: [Vec<usize>; 3],
    /// Index maps onto the canonical layout.
    pub maps: [Vec<usize>; 3],
    /// Permutations such that relabelling through `maps` gives `cw_general(q, perms)`.
    pub perms: CwPerms,
}

/// Recognizes a 0/1 tensor that is a generalized CW tensor up to
/// relabelling each axis: three corner terms through centre variables and
/// three bijective middle families.
pub fn recognize_generalized_cw(t: &Tensor) -> Option<CwStructure> {
    if !t.is_zero_one() || t.len() % 3 != 0 || t.is_empty() {
        return None;
    }
    let q = t.len() / 3 - 1;
    let deg = t.degrees();
    let mut centre = [0; 3];
    for a in 0..3 {
        let hubs: Vec<usize> = (0..deg[a].len()).filter(|&v| deg[a][v] == q + 2).collect();
        if hubs.len() != 1 {
            return None;
        }
        centre[a] = hubs[0];
    }
    let [x0, y0, z0] = centre;
    let mut corner = [usize::MAX; 3];
    let mut families: [Vec<Triple>; 3] = Default::default();
    for tr in t.support() {
        let at = [tr.i == x0, tr.j == y0, tr.k == z0];
        match at {
            [true, true, true] => return None,
            [true, true, false] => set_once(&mut corner[2], tr.k)?,
            [true, false, true] => set_once(&mut corner[1], tr.j)?,
            [false, true, true] => set_once(&mut corner[0], tr.i)?,
            [true, false, false] => families[0].push(tr),
            [false, true, false] => families[1].push(tr),
            [false, false, true] => families[2].push(tr),
            [false, false, false] => return None,
        }
    }
    if corner.contains(&usize::MAX) {
        return None;
    }
    // Middle variables per axis from the family not centred on that axis.
    let mids =
        |f: &[Triple], a: usize| -> BTreeSet<usize> { f.iter().map(|t| t.to_array()[a]).collect() };
    let mx = mids(&families[1], 0);
    let my = mids(&families[0], 1);
    let mz = mids(&families[0], 2);
    let checks = [
        (&families[0], 1, 2, &my, &mz),
        (&families[1], 0, 2, &mx, &mz),
        (&families[2], 0, 1, &mx, &my),
    ];
    for (f, a, b, ma, mb) in checks {
        if f.len() != q || ma.len() != q || mb.len() != q {
            return None;
        }
        if mids(f, a) != *ma || mids(f, b) != *mb {
            return None;
        }
    }
    for a in 0..3 {
        let m = [&mx, &my, &mz][a];
        if m.contains(&centre[a]) || m.contains(&corner[a]) || centre[a] == corner[a] {
            return None;
        }
    }
    let middle = [
        mx.iter().copied().collect::<Vec<_>>(),
        my.iter().copied().collect(),
        mz.iter().copied().collect(),
    ];
    let dims = t.dims();
    let mut maps: [Vec<usize>; 3] = [
        vec![usize::MAX; dims[0]],
        vec![usize::MAX; dims[1]],
        vec![usize::MAX; dims[2]],
    ];
    for a in 0..3 {
        maps[a][centre[a]] = 0;
        maps[a][corner[a]] = q + 1;
        for (r, &v) in middle[a].iter().enumerate() {
            maps[a][v] = r + 1;
        }
    }
    let canon = |a: usize, v: usize| maps[a][v];
    let mut perms = CwPerms::identity(q);
    // Family centred on x: x0 y_γ(i) z_δ(i), indexed by the rank of y.
    for tr in &families[0] {
        let r = canon(1, tr.j);
        perms.gamma[r - 1] = r;
        perms.delta[r - 1] = canon(2, tr.k);
    }
    for tr in &families[1] {
        let r = canon(0, tr.i);
        perms.alpha[r - 1] = r;
        perms.beta[r - 1] = canon(2, tr.k);
    }
    for tr in &families[2] {
        let r = canon(0, tr.i);
        perms.tau[r - 1] = r;
        perms.sigma[r - 1] = canon(1, tr.j);
    }
    Some(CwStructure {
        q,
        centre,
        corner,
        middle,
        maps,
        perms,
    })
}

fn set_once(slot: &mut usize, v: usize) -> Option<()> {
    if *slot != usize::MAX {
        return None;
    }
    *slot = v;
    Some(())
}

impl CwStructure {
    /// Relabels `t` (on the recognized variables only) into the canonical layout.
    pub fn canonical_form(&self, t: &Tensor) -> Result<Tensor> {
        let n = self.q + 2;
        let maps: [Vec<usize>; 3] = self.maps.clone().map(|m| {
            m.into_iter()
                .map(|v| if v == usize::MAX { 0 } else { v })
                .collect()
        });
        t.relabel([n; 3], &maps)
    }
}

/// A named construction with its parameters, used by the CLI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Named {
    Matmul(usize, usize, usize),
    Independent(usize),
    Cw(usize),
    CwGeneral(usize, CwPerms),
    Cyclic(usize),
    TqLower(usize),
    DistinctDiagonal(usize),
    Group(String),
}

/// Names accepted by [`Named::parse`] with their parameters.
pub const NAMES: &[(&str, &str)] = &[
    ("matmul", "a b c"),
    ("independent", "r"),
    ("cw", "q"),
    ("cw-sigma", "q s1 .. sq"),
    ("cyclic", "q"),
    ("tq-lower", "q"),
    ("diagonal", "q"),
    ("group", "NAME"),
];

impl Named {
    pub fn parse(name: &str, params: &[String]) -> Result<Self> {
        let nums = || -> Result<Vec<usize>> {
            params
                .iter()
                .map(|p| {
                    p.parse::<usize>().map_err(|_| {
                        Error::invalid(format!("expected a nonnegative integer, got `{p}`"))
                    })
                })
                .collect()
        };
        let want = |n: usize, v: Vec<usize>| -> Result<Vec<usize>> {
            if v.len() == n {
                Ok(v)
            } else {
                Err(Error::invalid(format!(
                    "`{name}` takes {n} parameter(s), got {}",
                    v.len()
                )))
            }
        };
        let positive = |v: Vec<usize>| -> Result<Vec<usize>> {
            if v.contains(&0) {
                Err(Error::invalid(format!(
                    "`{name}` parameters must be positive"
                )))
            } else {
                Ok(v)
            }
        };
        Ok(match name {
            "matmul" => {
                let v = positive(want(3, nums()?)?)?;
                Named::Matmul(v[0], v[1], v[2])
            }
            "independent" => Named::Independent(positive(want(1, nums()?)?)?[0]),
            "cw" => Named::Cw(want(1, nums()?)?[0]),
            "cw-sigma" => {
                let v = nums()?;
                let (&q, sigma) = v
                    .split_first()
                    .ok_or_else(|| Error::invalid("`cw-sigma` needs q followed by q images"))?;
                Named::CwGeneral(q, CwPerms::with_sigma_checked(q, sigma.to_vec())?)
            }
            "cyclic" => Named::Cyclic(positive(want(1, nums()?)?)?[0]),
            "tq-lower" => Named::TqLower(positive(want(1, nums()?)?)?[0]),
            "diagonal" => Named::DistinctDiagonal(positive(want(1, nums()?)?)?[0]),
            "group" => match params {
                [g] => Named::Group(g.clone()),
                _ => return Err(Error::invalid("`group` takes one group name")),
            },
            other => return Err(Error::invalid(format!("unknown catalog entry `{other}`"))),
        })
    }

    pub fn build(&self) -> Result<CatalogEntry> {
        let plain =
            |name: String, tensor: Tensor, rank: Option<usize>, provenance: &str| CatalogEntry {
                name,
                tensor,
                known_asymptotic_rank: rank.map(|r| Rational::from_integer(r.into())),
                provenance: provenance.into(),
            };
        Ok(match self {
            Named::Matmul(a, b, c) => plain(
                format!("matmul{a}x{b}x{c}"),
                matmul(*a, *b, *c),
                None,
                "matrix multiplication tensor",
            ),
            Named::Independent(r) => plain(
                format!("independent{r}"),
                independent(*r),
                Some(*r),
                "diagonal tensor",
            ),
            Named::Cw(q) => cw(*q),
            Named::CwGeneral(q, p) => plain(
                format!("cw{q}-general"),
                cw_general(*q, p)?,
                None,
                "generalized Coppersmith-Winograd tensor",
            ),
            Named::Cyclic(q) => plain(
                format!("cyclic{q}"),
                cyclic_tensor(*q),
                Some(*q),
                "cyclic group algebra tensor; asymptotic rank q",
            ),
            Named::TqLower(q) => plain(
                format!("tq-lower{q}"),
                tq_lower(*q),
                None,
                "lower triangular part of T_q",
            ),
            Named::DistinctDiagonal(q) => plain(
                format!("diagonal{q}"),
                distinct_diagonal(*q),
                None,
                "lower triangular tensor with distinct diagonal z-variables",
            ),
            Named::Group(name) => group_tensor(&Group::by_name(name)?),
        })
    }
}

impl CwPerms {
    fn with_sigma_checked(q: usize, sigma: Vec<usize>) -> Result<Self> {
        let mut p = CwPerms::identity(q);
        p.sigma = sigma;
        p.validate(q)?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin_groups;

    fn triples(t: &Tensor) -> BTreeSet<[usize; 3]> {
        t.support().map(Triple::to_array).collect()
    }

    #[test]
    fn cw1_support() {
        let expected: BTreeSet<[usize; 3]> = [
            [0, 0, 2],
            [2, 0, 0],
            [0, 2, 0],
            [1, 0, 1],
            [0, 1, 1],
            [1, 1, 0],
        ]
        .into();
        assert_eq!(triples(&cw(1).tensor), expected);
    }

    #[test]
    fn cw_sizes_and_rank_metadata() {
        for q in 0..8 {
            let e = cw(q);
            assert_eq!(e.tensor.len(), 3 * q + 3);
            assert_eq!(e.tensor.dims(), [q + 2; 3]);
        }
        assert_eq!(cw(6).tensor.len(), 21);
        assert_eq!(
            cw(6).known_asymptotic_rank,
            Some(Rational::from_integer(8.into()))
        );
    }

    #[test]
    fn cw_general_examples() {
        assert_eq!(cw_general(4, &CwPerms::identity(4)).unwrap(), cw(4).tensor);
        let rev = cw_general(3, &CwPerms::with_sigma(vec![3, 2, 1])).unwrap();
        assert_eq!(rev.len(), 12);
        let swapped = cw_general(2, &CwPerms::with_sigma(vec![2, 1])).unwrap();
        let a = triples(&swapped);
        let b = triples(&cw(2).tensor);
        let only_a: BTreeSet<_> = a.difference(&b).copied().collect();
        let only_b: BTreeSet<_> = b.difference(&a).copied().collect();
        assert_eq!(only_a, [[1, 2, 0], [2, 1, 0]].into());
        assert_eq!(only_b, [[1, 1, 0], [2, 2, 0]].into());
    }

    #[test]
    fn cw_general_rejects_non_bijections() {
        assert!(matches!(
            cw_general(3, &CwPerms::with_sigma(vec![1, 1, 2])),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(cw_general(3, &CwPerms::with_sigma(vec![1, 2])).is_err());
    }

    #[test]
    fn cyclic_and_lower() {
        assert_eq!(cyclic_tensor(3).len(), 9);
        assert_eq!(tq_lower(3).len(), 6);
        for q in 1..7 {
            assert!(tq_lower(q).is_subtensor_of(&cyclic_tensor(q)));
            assert_eq!(tq_lower(q).len(), q * (q + 1) / 2);
        }
        assert_eq!(
            triples(&tq_lower(2)),
            [[0, 0, 0], [0, 1, 1], [1, 0, 1]].into()
        );
    }

    #[test]
    fn group_tensors() {
        let c3 = Group::cyclic(3).unwrap();
        assert!(group_tensor(&c3).tensor.same_support(&cyclic_tensor(3)));
        let s3 = Group::by_name("S3").unwrap();
        let t = group_tensor(&s3);
        assert_eq!(t.tensor.len(), 36);
        assert_eq!(t.tensor.dims(), [6, 6, 6]);
        assert_eq!(t.known_asymptotic_rank, None);
        let c4 = group_tensor(&Group::cyclic(4).unwrap());
        assert_eq!(
            c4.known_asymptotic_rank,
            Some(Rational::from_integer(4.into()))
        );
    }

    #[test]
    fn matmul_shapes() {
        assert_eq!(matmul(1, 1, 1).without_labels(), independent(1));
        let m = matmul(2, 2, 2);
        assert_eq!((m.len(), m.dims()), (8, [4, 4, 4]));
        assert_eq!(matmul(1, 1, 5).dims()[0], 1);
    }

    #[test]
    fn catalog_entries_are_concise() {
        let mut entries = vec![
            matmul(2, 3, 4),
            independent(4),
            tq_lower(5),
            cyclic_tensor(5),
        ];
        entries.extend((0..6).map(|q| cw(q).tensor));
        for g in builtin_groups(8).unwrap() {
            entries.push(group_tensor(&g).tensor);
        }
        for t in entries {
            let r = t.flattening_ranks();
            assert!(r.concise, "{t}");
        }
    }

    #[test]
    fn known_rank_dominates_flattening_ranks() {
        let mut entries: Vec<CatalogEntry> = (0..6).map(cw).collect();
        entries.extend(builtin_groups(12).unwrap().iter().map(group_tensor));
        for e in entries {
            if let Some(r) = &e.known_asymptotic_rank {
                for fr in e.tensor.flattening_ranks().ranks {
                    assert!(Rational::from_integer(fr.into()) <= *r);
                }
            }
        }
    }

    #[test]
    fn cw_partitions() {
        let t = cw(6).tensor;
        let p3 = cw_three_partition(&t).unwrap();
        let sizes: Vec<usize> = p3.parts().iter().map(BTreeSet::len).collect();
        assert_eq!(sizes, vec![7, 7, 7]);
        for part in p3.part_tensors(&t) {
            assert_eq!(part.measure(), 49);
        }
        let p6 = cw_six_partition(&t).unwrap();
        let sizes: Vec<usize> = p6.parts().iter().map(BTreeSet::len).collect();
        assert_eq!(sizes, vec![1, 1, 1, 6, 6, 6]);
        assert!(cw_three_partition(&cyclic_tensor(4)).is_err());
    }

    #[test]
    fn recognizer_inverts_cw_general() {
        let perms = CwPerms {
            alpha: vec![2, 3, 1],
            beta: vec![1, 3, 2],
            gamma: vec![3, 1, 2],
            delta: vec![2, 1, 3],
            sigma: vec![3, 2, 1],
            tau: vec![1, 2, 3],
        };
        let t = cw_general(3, &perms).unwrap();
        let s = recognize_generalized_cw(&t).unwrap();
        assert_eq!(s.q, 3);
        assert_eq!(s.centre, [0, 0, 0]);
        assert_eq!(s.corner, [4, 4, 4]);
        let canon = cw_general(3, &s.perms).unwrap();
        assert!(s.canonical_form(&t).unwrap().same_support(&canon));
        assert!(recognize_generalized_cw(&cyclic_tensor(4)).is_none());
        assert!(recognize_generalized_cw(&tq_lower(4)).is_none());
        // T_3^lower is CW_1 after relabelling.
        assert_eq!(recognize_generalized_cw(&tq_lower(3)).unwrap().q, 1);
        for q in 0..6 {
            assert_eq!(recognize_generalized_cw(&cw(q).tensor).unwrap().q, q);
        }
    }

    #[test]
    fn named_parsing() {
        let p = |n: &str, a: &[&str]| {
            Named::parse(n, &a.iter().map(|s| s.to_string()).collect::<Vec<_>>())
        };
        assert_eq!(p("cw", &["2"]).unwrap().build().unwrap().tensor.len(), 9);
        assert_eq!(
            p("matmul", &["2", "2", "2"]).unwrap(),
            Named::Matmul(2, 2, 2)
        );
        assert!(p("matmul", &["2", "2"]).is_err());
        assert!(p("nope", &[]).is_err());
        assert!(p("cw-sigma", &["2", "1", "1"]).is_err());
        assert_eq!(
            p("cw-sigma", &["2", "2", "1"])
                .unwrap()
                .build()
                .unwrap()
                .tensor
                .len(),
            9
        );
        assert_eq!(
            p("group", &["Q8"]).unwrap().build().unwrap().tensor.len(),
            64
        );
    }
}
