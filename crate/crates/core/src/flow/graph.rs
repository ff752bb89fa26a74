//! Connection graph over the S-candidates and its components.

use super::{Branch, BranchKind, Cycle, End, Member, Outflow, Targets};
use crate::conley::{component_index_from_entries, component_index_with_loop, index_of_equilibrium, ConleyIndex};
use crate::dynsys::State;
use crate::equilibria::{scale, Equilibrium};
use crate::linalg::dist;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Node {
    Member(usize),
    Attractor(usize),
    Boundary,
    /// Branch that never settled within the time limit.
    Unresolved,
}

impl Node {
    fn of_end(end: &End) -> Node {
        match end {
            End::Attractor(a) => Node::Attractor(*a),
            End::Member(m) => Node::Member(*m),
            End::Exit(_) => Node::Boundary,
            End::Timeout | End::Failed => Node::Unresolved,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub from: Node,
    pub to: Node,
    pub via: String,
    /// Orbit joining two S-candidates.
    pub connection: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub members: Vec<usize>,
    pub connections: usize,
    pub has_loop: bool,
    /// Stable branches that reach the component from the region boundary.
    pub n_external: usize,
    pub unresolved: usize,
    /// None when a member is not hyperbolic on the line.
    pub index: Option<ConleyIndex>,
}

pub(super) fn outflows(targets: &Targets, eqs: &[Equilibrium], cycles: &[Cycle], members: &[Member]) -> Vec<Outflow> {
    let mut starts: Vec<(usize, State)> = Vec::new();
    for (j, m) in members.iter().enumerate() {
        match m {
            Member::Point(i) if eqs[*i].unstable_dim == 2 => {
                let p = eqs[*i].point;
                let rho = 1e-3 * scale(&p);
                let n = targets.cfg.rays.max(1);
                for k in 0..n {
                    let a = std::f64::consts::TAU * k as f64 / n as f64;
                    starts.push((j, [p[0] + rho * a.cos(), p[1] + rho * a.sin()]));
                }
            }
            Member::Cycle(c) => {
                let cyc = &cycles[*c];
                let p = cyc.points[0];
                let d = dist(&p, &cyc.center);
                let rho = 1e-3 * targets.region.scale();
                for s in [1.0, -1.0] {
                    let u = s * rho / d;
                    starts.push((
                        j,
                        [
                            p[0] + u * (p[0] - cyc.center[0]),
                            p[1] + u * (p[1] - cyc.center[1]),
                        ],
                    ));
                }
            }
            _ => {}
        }
    }
    use rayon::prelude::*;
    starts
        .par_iter()
        .map(|&(source, start)| Outflow {
            source,
            start,
            end: targets.run(start, false, false, true).0,
        })
        .collect()
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut i = i;
    while parent[i] != r {
        let next = parent[i];
        parent[i] = r;
        i = next;
    }
    r
}

pub(super) fn connect(
    dim: usize,
    eqs: &[Equilibrium],
    members: &[Member],
    branches: &[Branch],
    outflows: &[Outflow],
) -> (Vec<Edge>, Vec<Component>) {
    let mut edges = Vec::new();
    for b in branches {
        let me = Node::Member(b.member);
        let other = Node::of_end(&b.end);
        match b.kind {
            BranchKind::Stable => edges.push(Edge {
                from: other,
                to: me,
                via: b.label(),
                connection: matches!(other, Node::Member(_)),
            }),
            BranchKind::Unstable => {
                // the same saddle-to-saddle orbit may also show up as a
                // stable branch of the target
                let seen = match b.end {
                    End::Member(k) => branches.iter().any(|s| {
                        s.member == k && s.kind == BranchKind::Stable && s.end == End::Member(b.member)
                    }),
                    _ => false,
                };
                edges.push(Edge {
                    from: me,
                    to: other,
                    via: b.label(),
                    connection: matches!(other, Node::Member(_)) && !seen,
                });
            }
        }
    }
    let mut rays: BTreeMap<(Node, Node), usize> = BTreeMap::new();
    for o in outflows {
        *rays
            .entry((Node::Member(o.source), Node::of_end(&o.end)))
            .or_default() += 1;
    }
    for ((from, to), n) in rays {
        edges.push(Edge {
            from,
            to,
            via: format!("{n} outflow rays"),
            connection: false,
        });
    }

    let mut parent: Vec<usize> = (0..members.len()).collect();
    for e in edges.iter().filter(|e| e.connection) {
        if let (Node::Member(a), Node::Member(b)) = (e.from, e.to) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..members.len() {
        let r = find(&mut parent, j);
        groups.entry(r).or_default().push(j);
    }
    let components = groups
        .into_values()
        .map(|ms| {
            let inside = |n: &Node| matches!(n, Node::Member(k) if ms.contains(k));
            let connections = edges
                .iter()
                .filter(|e| e.connection && inside(&e.from) && inside(&e.to))
                .count();
            let own: Vec<&Branch> = branches.iter().filter(|b| ms.contains(&b.member)).collect();
            let n_external = own
                .iter()
                .filter(|b| b.kind == BranchKind::Stable && matches!(b.end, End::Exit(_)))
                .count();
            let unresolved = own
                .iter()
                .filter(|b| matches!(b.end, End::Timeout | End::Failed))
                .count();
            let has_cycle = ms.iter().any(|j| matches!(members[*j], Member::Cycle(_)));
            let has_loop = has_cycle || connections >= ms.len();
            let index = if dim == 1 {
                ms.iter().try_fold(ConleyIndex::trivial(), |acc, j| match members[*j] {
                    Member::Point(i) => index_of_equilibrium(&eqs[i]).ok().map(|x| acc.wedge(&x)),
                    Member::Cycle(_) => None,
                })
            } else if has_loop {
                component_index_with_loop(n_external as i64).ok()
            } else {
                component_index_from_entries(n_external as i64).ok()
            };
            Component {
                members: ms,
                connections,
                has_loop,
                n_external,
                unresolved,
                index,
            }
        })
        .collect();
    (edges, components)
}
