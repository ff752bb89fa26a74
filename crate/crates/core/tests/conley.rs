//! Conley indices against relative homology of small cubical complexes.
//!
//! Each index pair (N, L) is drawn on a unit grid: N is a set of closed
//! squares, L a set of boundary edges. H_k(N, L) over a prime field gives
//! the rank of the reduced homology of N/L; with L empty it is H_k(N), which
//! is the reduced homology of N with a disjoint base point. A wedge of
//! spheres has one generator per sphere, so the ranks must equal the
//! multiplicities of each sphere dimension.

use bistable::conley::{
    component_index_from_entries, index_of_equilibrium, index_of_planar_cycle, index_of_template, wedge, ConleyIndex,
    IndexPairTemplate,
};
use bistable::dynsys::{builtin, builtin_names, fixture};
use bistable::equilibria::{find_equilibria, EqClass, SearchBox};
use bistable::flow::{analyze_flow, FlowConfig};
use bistable::region::builtin_region;
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

const P: i64 = 1_000_003;

type Vertex = (i32, i32);
/// Edge from its lower-left vertex; `true` for horizontal.
type EdgeCell = (i32, i32, bool);

fn rank_mod_p(mut m: Vec<Vec<i64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let pow = |mut b: i64, mut e: i64| {
        let mut r = 1;
        b = b.rem_euclid(P);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c].rem_euclid(P) != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow(m[rank][c], P - 2);
        for r in 0..rows {
            if r != rank && m[r][c].rem_euclid(P) != 0 {
                let k = m[r][c] * inv % P;
                for j in 0..cols {
                    m[r][j] = (m[r][j] - k * m[rank][j]).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

struct Pair {
    squares: BTreeSet<Vertex>,
    exit_edges: BTreeSet<EdgeCell>,
}

fn square_edges(s: Vertex) -> [(EdgeCell, i64); 4] {
    let (i, j) = s;
    // counterclockwise: bottom, right, top (reversed), left (reversed)
    [((i, j, true), 1), ((i + 1, j, false), 1), ((i, j + 1, true), -1), ((i, j, false), -1)]
}

fn edge_vertices(e: EdgeCell) -> [(Vertex, i64); 2] {
    let (i, j, h) = e;
    let end = if h { (i + 1, j) } else { (i, j + 1) };
    [((i, j), -1), (end, 1)]
}

impl Pair {
    fn boundary_edges(&self) -> Vec<EdgeCell> {
        let mut count: BTreeMap<EdgeCell, usize> = BTreeMap::new();
        for s in &self.squares {
            for (e, _) in square_edges(*s) {
                *count.entry(e).or_default() += 1;
            }
        }
        count.into_iter().filter(|(_, n)| *n == 1).map(|(e, _)| e).collect()
    }

    /// Ranks of H_0, H_1, H_2 of the pair.
    fn betti(&self) -> [usize; 3] {
        let edges: BTreeSet<EdgeCell> = self.squares.iter().flat_map(|s| square_edges(*s).map(|e| e.0)).collect();
        let verts: BTreeSet<Vertex> = edges.iter().flat_map(|e| edge_vertices(*e).map(|v| v.0)).collect();
        let l_verts: BTreeSet<Vertex> = self
            .exit_edges
            .iter()
            .flat_map(|e| edge_vertices(*e).map(|v| v.0))
            .collect();
        let c0: Vec<Vertex> = verts.difference(&l_verts).copied().collect();
        let c1: Vec<EdgeCell> = edges.difference(&self.exit_edges).copied().collect();
        let c2: Vec<Vertex> = self.squares.iter().copied().collect();
        let i0: BTreeMap<Vertex, usize> = c0.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        let i1: BTreeMap<EdgeCell, usize> = c1.iter().enumerate().map(|(k, e)| (*e, k)).collect();

        let mut d1 = vec![vec![0i64; c1.len()]; c0.len()];
        for (k, e) in c1.iter().enumerate() {
            for (v, sgn) in edge_vertices(*e) {
                if let Some(&r) = i0.get(&v) {
                    d1[r][k] += sgn;
                }
            }
        }
        let mut d2 = vec![vec![0i64; c2.len()]; c1.len()];
        for (k, s) in c2.iter().enumerate() {
            for (e, sgn) in square_edges(*s) {
                if let Some(&r) = i1.get(&e) {
                    d2[r][k] += sgn;
                }
            }
        }
        let r1 = if c0.is_empty() || c1.is_empty() { 0 } else { rank_mod_p(d1) };
        let r2 = if c1.is_empty() || c2.is_empty() { 0 } else { rank_mod_p(d2) };
        [c0.len() - r1, c1.len() - r1 - r2, c2.len() - r2]
    }
}

fn rect(x0: i32, y0: i32, x1: i32, y1: i32) -> BTreeSet<Vertex> {
    (x0..x1).flat_map(|i| (y0..y1).map(move |j| (i, j))).collect()
}

fn touches(e: &EdgeCell, hole: &BTreeSet<Vertex>) -> bool {
    // an edge borders a hole square when one of its two neighbours is in it
    let (i, j, h) = *e;
    let sides = if h { [(i, j), (i, j - 1)] } else { [(i, j), (i - 1, j)] };
    sides.iter().any(|s| hole.contains(s))
}

fn pair_for(t: IndexPairTemplate) -> Pair {
    use IndexPairTemplate::*;
    let disk = rect(0, 0, 4, 4);
    let hole = rect(2, 2, 4, 4);
    let annulus: BTreeSet<Vertex> = rect(0, 0, 6, 6).difference(&hole).copied().collect();
    let holes: BTreeSet<Vertex> = rect(2, 2, 3, 3).union(&rect(6, 2, 7, 3)).copied().collect();
    let pierced: BTreeSet<Vertex> = rect(0, 0, 9, 5).difference(&holes).copied().collect();

    let with = |squares: BTreeSet<Vertex>, pick: &dyn Fn(&EdgeCell) -> bool| {
        let mut p = Pair {
            squares,
            exit_edges: BTreeSet::new(),
        };
        p.exit_edges = p.boundary_edges().into_iter().filter(|e| pick(e)).collect();
        p
    };
    match t {
        DiskNoExit => with(disk, &|_| false),
        DiskFullExit => with(disk, &|_| true),
        AnnulusBothExit => with(annulus, &|_| true),
        AnnulusInnerExit => with(annulus, &|e| touches(e, &hole)),
        AnnulusNoExit => with(annulus, &|_| false),
        DiskMinusTwoDisksInnerExit => with(pierced, &|e| touches(e, &holes)),
    }
}

fn sphere_counts(c: &ConleyIndex) -> [usize; 3] {
    let mut n = [0; 3];
    for &d in c.dims() {
        n[d as usize] += 1;
    }
    n
}

#[test]
fn template_table_matches_relative_homology() {
    for t in IndexPairTemplate::ALL {
        let got = sphere_counts(&index_of_template(t));
        assert_eq!(got, pair_for(t).betti(), "{t:?}");
    }
}

#[test]
fn cycle_indices_match_annulus_homology() {
    let stable = index_of_planar_cycle(0.5).unwrap();
    let unstable = index_of_planar_cycle(2.0).unwrap();
    assert_eq!(sphere_counts(&stable), pair_for(IndexPairTemplate::AnnulusNoExit).betti());
    assert_eq!(sphere_counts(&unstable), pair_for(IndexPairTemplate::AnnulusBothExit).betti());
    assert!(index_of_planar_cycle(1.0).is_err());
}

#[test]
fn equilibrium_indices_match_their_isolating_disks() {
    // a saddle's disk exits through two opposite boundary arcs
    let disk = rect(0, 0, 4, 4);
    let mut saddle = Pair {
        squares: disk,
        exit_edges: BTreeSet::new(),
    };
    saddle.exit_edges = saddle
        .boundary_edges()
        .into_iter()
        .filter(|&(i, _, h)| !h && (i == 0 || i == 4))
        .collect();
    let saddle_betti = saddle.betti();

    for name in builtin_names() {
        let fx = fixture(name).unwrap();
        let f = builtin(name, &[]).unwrap();
        if f.dim() != 2 {
            continue;
        }
        let found = find_equilibria(&f, &SearchBox::new(fx.search_box.0, fx.search_box.1), [64, 64]);
        for e in &found.equilibria {
            let idx = sphere_counts(&index_of_equilibrium(e).unwrap());
            let want = match e.class {
                EqClass::StableNode | EqClass::StableFocus => pair_for(IndexPairTemplate::DiskNoExit).betti(),
                EqClass::UnstableNode | EqClass::UnstableFocus => pair_for(IndexPairTemplate::DiskFullExit).betti(),
                EqClass::Saddle => saddle_betti,
                EqClass::NonHyperbolic => unreachable!(),
            };
            assert_eq!(idx, want, "{name} {:?}", e.class);
        }
    }
}

#[test]
fn entry_counts_follow_the_collapse_rule() {
    assert_eq!(component_index_from_entries(0).unwrap(), ConleyIndex::sphere(2));
    assert_eq!(component_index_from_entries(1).unwrap(), ConleyIndex::trivial());
    assert_eq!(component_index_from_entries(2).unwrap(), ConleyIndex::sphere(1));
    assert!(component_index_from_entries(-1).is_err());
}

#[test]
fn griffith_components_wedge_to_one_circle() {
    let f = builtin("griffith", &[]).unwrap();
    let region = builtin_region(&f).unwrap();
    let fs = analyze_flow(&f, &region, &FlowConfig::default()).unwrap();
    let total = fs
        .components
        .iter()
        .map(|c| c.index.clone().unwrap())
        .fold(ConleyIndex::trivial(), |a, b| wedge(&a, &b));
    assert_eq!(total.to_string(), "Σ¹");
}

fn any_index() -> impl Strategy<Value = ConleyIndex> {
    proptest::collection::vec(0u32..5, 0..8).prop_map(ConleyIndex::from_dims)
}

proptest! {
    #[test]
    fn wedge_laws(a in any_index(), b in any_index(), c in any_index()) {
        prop_assert_eq!(wedge(&wedge(&a, &b), &c), wedge(&a, &wedge(&b, &c)));
        prop_assert_eq!(wedge(&a, &b), wedge(&b, &a));
        prop_assert_eq!(wedge(&a, &ConleyIndex::trivial()), a.clone());
        prop_assert_eq!(wedge(&a, &b).dims().len(), a.dims().len() + b.dims().len());
    }

    #[test]
    fn rendering_is_sorted_and_canonical(dims in proptest::collection::vec(0u32..5, 0..8)) {
        let mut shuffled = dims.clone();
        shuffled.reverse();
        let a = ConleyIndex::from_dims(dims);
        let b = ConleyIndex::from_dims(shuffled);
        prop_assert_eq!(a.to_string(), b.to_string());
        prop_assert_eq!(a.ascii(), b.ascii());
        let shown: Vec<u32> = a.dims().to_vec();
        prop_assert!(shown.windows(2).all(|w| w[0] >= w[1]));
    }
}
