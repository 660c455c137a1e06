use crate::env::Environment;
use crate::error::{Error, Result};
use crate::lattice::LatticeBox;
use serde::Serialize;
use std::collections::VecDeque;

/// Edges `x → x ± e_i` wherever `ω(x, e_i) > 0`, restricted to a box. Edges
/// leaving the box are dropped.
#[derive(Debug, Clone)]
pub struct DirectedLatticeGraph {
    bbox: LatticeBox,
    masks: Vec<u32>,
}

pub fn build_digraph(env: &Environment, bbox: &LatticeBox) -> Result<DirectedLatticeGraph> {
    if !env.bounds().contains_box(bbox) {
        return Err(Error::Argument(format!(
            "graph box {:?}..{:?} is not inside the environment box",
            bbox.lo(),
            bbox.hi()
        )));
    }
    let eb = env.bounds();
    let mut x = vec![0; bbox.dim()];
    let masks = (0..bbox.len())
        .map(|i| {
            bbox.coords_into(i, &mut x);
            env.axis_mask(eb.index(&x).expect("inside"))
        })
        .collect();
    Ok(DirectedLatticeGraph { bbox: bbox.clone(), masks })
}

impl DirectedLatticeGraph {
    pub fn from_masks(bbox: LatticeBox, masks: Vec<u32>) -> Self {
        assert_eq!(bbox.len(), masks.len());
        Self { bbox, masks }
    }

    pub fn bbox(&self) -> &LatticeBox {
        &self.bbox
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Bit `i` set when axis `i` carries positive weight.
    pub fn mask(&self, idx: usize) -> u32 {
        self.masks[idx]
    }

    pub fn has_axis(&self, idx: usize, axis: usize) -> bool {
        self.masks[idx] >> axis & 1 == 1
    }

    /// In-box out-neighbours of `idx`.
    pub fn successors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.masks[idx];
        (0..self.bbox.dim())
            .filter(move |a| m >> a & 1 == 1)
            .flat_map(move |a| [true, false].into_iter().filter_map(move |s| self.bbox.neighbor(idx, a, s)))
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors(from).any(|j| j == to)
    }

    /// Breadth-first distances from `src`, `u32::MAX` where unreachable. When
    /// `allowed` is given, the search stays inside it.
    pub fn bfs(&self, src: usize, allowed: Option<&[bool]>) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for w in self.successors(v) {
                if dist[w] == u32::MAX && allowed.is_none_or(|a| a[w]) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Shortest directed path length `d_ω(x, y)` inside the box, `None` if `y`
/// is unreachable.
pub fn directed_distance(g: &DirectedLatticeGraph, x: &[i64], y: &[i64]) -> Result<Option<u32>> {
    let (xi, yi) = match (g.bbox.index(x), g.bbox.index(y)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Argument(format!("{x:?} or {y:?} outside the graph box"))),
    };
    let d = g.bfs(xi, None)[yi];
    Ok((d != u32::MAX).then_some(d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinkDecomposition {
    /// SCC id per site; ids are ordered by each component's smallest site.
    pub scc: Vec<u32>,
    pub n_scc: usize,
    /// Per SCC: no edge to a different in-box SCC.
    pub terminal: Vec<bool>,
    /// Site lists of the terminal SCCs, in id order.
    pub sinks: Vec<Vec<usize>>,
    /// Terminality ignores edges leaving the box.
    pub in_box: bool,
}

impl SinkDecomposition {
    /// `A(n)`, the number of in-box sinks.
    pub fn count(&self) -> usize {
        self.sinks.len()
    }

    /// The sink used for density and geometry: largest, ties to the lowest id.
    pub fn main_sink(&self) -> &[usize] {
        let mut best = 0;
        for (i, s) in self.sinks.iter().enumerate() {
            if s.len() > self.sinks[best].len() {
                best = i;
            }
        }
        &self.sinks[best]
    }

    pub fn main_sink_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.scc.len()];
        for &i in self.main_sink() {
            m[i] = true;
        }
        m
    }
}

/// Strongly connected components by an iterative Tarjan search, and the
/// terminal ones among them.
pub fn find_sinks(g: &DirectedLatticeGraph) -> SinkDecomposition {
    let n = g.len();
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut raw = vec![UNSEEN; n];
    let mut n_raw = 0u32;
    let mut counter = 0u32;
    let succ: Vec<Vec<usize>> = (0..n).map(|v| g.successors(v).collect()).collect();
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        raw[w] = n_raw;
                        if w == v {
                            break;
                        }
                    }
                    n_raw += 1;
                }
            }
        }
    }
    // renumber by smallest member
    let mut remap = vec![UNSEEN; n_raw as usize];
    let mut next_id = 0u32;
    let mut scc = vec![0u32; n];
    for v in 0..n {
        let r = raw[v] as usize;
        if remap[r] == UNSEEN {
            remap[r] = next_id;
            next_id += 1;
        }
        scc[v] = remap[r];
    }
    let n_scc = next_id as usize;
    let mut terminal = vec![true; n_scc];
    for v in 0..n {
        if succ[v].iter().any(|&w| scc[w] != scc[v]) {
            terminal[scc[v] as usize] = false;
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_scc];
    for v in 0..n {
        if terminal[scc[v] as usize] {
            members[scc[v] as usize].push(v);
        }
    }
    let sinks = members.into_iter().filter(|m| !m.is_empty()).collect();
    SinkDecomposition {
        scc,
        n_scc,
        terminal,
        sinks,
        in_box: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Environment;

    #[test]
    fn srw_box_is_one_sink() {
        let b = LatticeBox::centered(2, 3).unwrap();
        let env = Environment::constant(b.clone(), &[0.25, 0.25], "srw");
        let g = build_digraph(&env, &b).unwrap();
        for i in 0..g.len() {
            let inside = (0..2).map(|a| [true, false].iter().filter(|&&s| b.neighbor(i, a, s).is_some()).count()).sum::<usize>();
            assert_eq!(g.successors(i).count(), inside);
        }
        let s = find_sinks(&g);
        assert_eq!(s.count(), 1);
        assert_eq!(s.main_sink().len(), b.len());
        assert_eq!(directed_distance(&g, &[-3, -3], &[2, 1]).unwrap(), Some(9));
    }

    #[test]
    fn horizontal_rows_are_separate_sinks() {
        let b = LatticeBox::new(vec![0, 0], vec![4, 6]).unwrap();
        let env = Environment::constant(b.clone(), &[0.0, 0.5], "rows");
        let g = build_digraph(&env, &b).unwrap();
        let s = find_sinks(&g);
        assert_eq!(s.count(), 5);
        assert_eq!(directed_distance(&g, &[0, 0], &[1, 0]).unwrap(), None);
    }

    #[test]
    fn hand_built_masks() {
        // 0 → 1; 1 has no edges; 2 ↔ 3 with 2 → 1
        let b = LatticeBox::new(vec![0], vec![3]).unwrap();
        let g = DirectedLatticeGraph::from_masks(b, vec![1, 0, 1, 1]);
        let s = find_sinks(&g);
        assert_eq!(s.n_scc, 3);
        assert_eq!(s.sinks, vec![vec![1]]);
    }
}
