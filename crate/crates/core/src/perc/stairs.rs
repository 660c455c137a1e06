//! Stairs, bubbles and tadpoles of a two-dimensional environment.
//!
//! Moves alternate preferences: after a vertical move (or at the start) the
//! stair steps forward when it can, and after a forward move it steps
//! vertically when it can. The ES-stair climbs until the first forward
//! opportunity and then descends; the EN-stair is its mirror image. With
//! this rule the path length obeys `L = 2V₀ + Σ H_j` exactly.

use super::graph::DirectedLatticeGraph;
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Which axis plays "east" and which plays "north".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Heading {
    /// Forward `+e₁`, sides `±e₂`.
    East,
    /// Forward `+e₂`, sides `±e₁` (the mirror of `East` across the diagonal).
    North,
}

impl Heading {
    fn axes(self) -> (usize, usize) {
        match self {
            Heading::East => (0, 1),
            Heading::North => (1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Start,
    Forward,
    Side,
}

/// Lazily traced infinite stair.
struct Tracer<'g> {
    g: &'g DirectedLatticeGraph,
    fwd: usize,
    side: usize,
    /// `true` for the ES-stair (first `+side`, then `-side`).
    climb_first: bool,
    climbing: bool,
    idx: usize,
    last: Move,
    sites: Vec<usize>,
}

impl<'g> Tracer<'g> {
    fn new(g: &'g DirectedLatticeGraph, origin: usize, heading: Heading, climb_first: bool) -> Self {
        let (fwd, side) = heading.axes();
        Self {
            g,
            fwd,
            side,
            climb_first,
            climbing: true,
            idx: origin,
            last: Move::Start,
            sites: vec![origin],
        }
    }

    fn escape(&self, axis: usize, positive: bool) -> Error {
        let mut site = self.g.bbox().coords(self.idx);
        site[axis] += if positive { 1 } else { -1 };
        Error::BoxEscape { site }
    }

    fn step(&mut self) -> Result<Move> {
        let can_fwd = self.g.has_axis(self.idx, self.fwd);
        let can_side = self.g.has_axis(self.idx, self.side);
        if !can_fwd && !can_side {
            return Err(Error::Domain(format!(
                "stair stuck at {:?}: no admissible move",
                self.g.bbox().coords(self.idx)
            )));
        }
        let go_fwd = match self.last {
            Move::Start | Move::Side => can_fwd,
            Move::Forward => !can_side,
        };
        let (axis, positive) = if go_fwd {
            self.climbing = false;
            (self.fwd, true)
        } else {
            // climbing phase moves toward +side for ES, -side for EN
            let up = self.climbing == self.climb_first;
            (self.side, up)
        };
        let next = self.g.bbox().neighbor(self.idx, axis, positive).ok_or_else(|| self.escape(axis, positive))?;
        self.idx = next;
        self.sites.push(next);
        self.last = if go_fwd { Move::Forward } else { Move::Side };
        Ok(self.last)
    }

    fn fwd_coord(&self) -> i64 {
        self.g.bbox().coord(self.idx, self.fwd)
    }

    /// Traces until the stair leaves forward column `col`; returns the range
    /// of side coordinates visited in that column.
    fn complete_column(&mut self, col: i64) -> Result<(i64, i64)> {
        while self.fwd_coord() <= col {
            self.step()?;
        }
        let b = self.g.bbox();
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for &s in self.sites.iter().rev() {
            let c = b.coord(s, self.fwd);
            if c < col {
                break;
            }
            if c == col {
                let v = b.coord(s, self.side);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Ok((lo, hi))
    }
}

/// One stair path from its origin back to the origin's side level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StairPath {
    pub sites: Vec<Vec<i64>>,
    pub v0: usize,
    /// Forward run lengths `H_j` read off the traced path.
    pub runs: Vec<usize>,
    pub length: usize,
    /// Forward offset of the end point.
    pub advance: i64,
}

fn trace_path(g: &DirectedLatticeGraph, origin: usize, heading: Heading, climb_first: bool) -> Result<StairPath> {
    let (fwd, side) = heading.axes();
    let b = g.bbox();
    let s0 = b.coord(origin, side);
    let f0 = b.coord(origin, fwd);
    let mut t = Tracer::new(g, origin, heading, climb_first);
    let mut v0 = 0;
    let mut runs = Vec::new();
    let mut run = 0;
    // forward available at the origin: the path is empty
    if !g.has_axis(origin, fwd) {
        loop {
            match t.step()? {
                Move::Forward => run += 1,
                Move::Side if t.climbing => v0 += 1,
                Move::Side => {
                    runs.push(run);
                    run = 0;
                    if b.coord(t.idx, side) == s0 {
                        break;
                    }
                }
                Move::Start => unreachable!(),
            }
        }
    }
    let sites: Vec<Vec<i64>> = t.sites.iter().map(|&i| b.coords(i)).collect();
    let length = sites.len() - 1;
    let advance = sites.last().map_or(0, |s| s[fwd] - f0);
    Ok(StairPath {
        sites,
        v0,
        runs,
        length,
        advance,
    })
}

/// `V₀` and `H_j` straight from their defining infima, independent of the
/// path tracer.
pub fn stair_formula(g: &DirectedLatticeGraph, origin: &[i64], heading: Heading, climb_first: bool) -> Result<(usize, Vec<usize>)> {
    let (fwd, side) = heading.axes();
    let b = g.bbox();
    let sign: i64 = if climb_first { 1 } else { -1 };
    let at = |f: i64, s: i64| -> Result<usize> {
        let mut x = origin.to_vec();
        x[fwd] += f;
        x[side] += sign * s;
        b.index(&x).ok_or(Error::BoxEscape { site: x })
    };
    let mut v0 = 0usize;
    while !g.has_axis(at(0, v0 as i64)?, fwd) {
        v0 += 1;
    }
    let mut runs = Vec::with_capacity(v0);
    let mut offset = 0i64;
    for j in 0..v0 {
        let level = (v0 - j) as i64;
        if j > 0 && !g.has_axis(at(offset, level)?, fwd) {
            runs.push(0);
            continue;
        }
        let mut n = 1i64;
        while !g.has_axis(at(offset + n, level)?, side) {
            n += 1;
        }
        runs.push(n as usize);
        offset += n;
    }
    Ok((v0, runs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StairStructure {
    pub origin: Vec<i64>,
    pub heading: Heading,
    pub es: StairPath,
    pub en: StairPath,
    /// `true` when the E-path is the EN-path (shorter, or tied).
    pub e_is_en: bool,
    pub e_length: usize,
    /// Sites between the two stairs up to the first column where they meet.
    pub bubble: Vec<Vec<i64>>,
}

impl StairStructure {
    pub fn e_path(&self) -> &StairPath {
        if self.e_is_en {
            &self.en
        } else {
            &self.es
        }
    }

    /// `L = 2V₀ + Σ H_j` for both stairs.
    pub fn identity_holds(&self) -> bool {
        [&self.es, &self.en]
            .iter()
            .all(|p| p.length == 2 * p.v0 + p.runs.iter().sum::<usize>())
    }

    /// `#B ≤ (L^ES + L^EN)²`; an empty E-path leaves the two-site bubble
    /// `{o, o + e}` outside this bound.
    pub fn bubble_bound_holds(&self) -> bool {
        self.es.v0 == 0 || self.bubble.len() <= (self.es.length + self.en.length).pow(2)
    }
}

/// ES- and EN-paths, the E-path and the E-bubble at `origin`.
pub fn es_stair(g: &DirectedLatticeGraph, origin: &[i64], heading: Heading) -> Result<StairStructure> {
    if g.bbox().dim() != 2 {
        return Err(Error::Argument("stairs are defined for d = 2 only".into()));
    }
    let o = g
        .bbox()
        .index(origin)
        .ok_or_else(|| Error::BoxEscape { site: origin.to_vec() })?;
    let es = trace_path(g, o, heading, true)?;
    let en = trace_path(g, o, heading, false)?;
    let e_is_en = en.length <= es.length;
    let e_length = es.length.min(en.length);
    let bubble = bubble(g, o, heading)?;
    Ok(StairStructure {
        origin: origin.to_vec(),
        heading,
        es,
        en,
        e_is_en,
        e_length,
        bubble,
    })
}

fn bubble(g: &DirectedLatticeGraph, o: usize, heading: Heading) -> Result<Vec<Vec<i64>>> {
    let (fwd, side) = heading.axes();
    let b = g.bbox();
    let f0 = b.coord(o, fwd);
    let mut es = Tracer::new(g, o, heading, true);
    let mut en = Tracer::new(g, o, heading, false);
    let mut columns: BTreeMap<i64, (i64, i64)> = BTreeMap::new();
    let mut col = f0;
    loop {
        let (es_lo, es_hi) = es.complete_column(col)?;
        let (en_lo, en_hi) = en.complete_column(col)?;
        columns.insert(col, (en_lo, es_hi));
        if col > f0 && es_lo <= en_hi && en_lo <= es_hi {
            break;
        }
        col += 1;
    }
    let mut out = Vec::new();
    for (c, (lo, hi)) in columns {
        for s in lo..=hi {
            let mut x = vec![0i64; 2];
            x[fwd] = c;
            x[side] = s;
            out.push(x);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tadpole {
    pub n: i64,
    pub heading: Heading,
    pub sites: Vec<Vec<i64>>,
    /// End points `R_i` of the concatenated E-paths, starting at the origin.
    pub anchors: Vec<Vec<i64>>,
    /// Every site reachable from the origin in the box is reachable inside
    /// the tadpole.
    pub connected_within: bool,
}

impl Tadpole {
    pub fn size(&self) -> usize {
        self.sites.len()
    }
}

/// Union of the first `M(n) - 1` E-paths and the `M(n)`-th E-bubble, where
/// `M(n)` is the first index whose anchor reaches forward coordinate `n`.
/// An empty E-path is replaced by the single forward step.
pub fn tadpole(g: &DirectedLatticeGraph, origin: &[i64], n: i64, heading: Heading) -> Result<Tadpole> {
    let (fwd, _) = heading.axes();
    let b = g.bbox();
    let mut set: BTreeSet<usize> = BTreeSet::new();
    let o = b.index(origin).ok_or_else(|| Error::BoxEscape { site: origin.to_vec() })?;
    set.insert(o);
    let mut anchor = origin.to_vec();
    let mut anchors = vec![anchor.clone()];
    loop {
        let st = es_stair(g, &anchor, heading)?;
        let path = st.e_path();
        let mut next = anchor.clone();
        let steps: Vec<Vec<i64>> = if path.length == 0 {
            next[fwd] += 1;
            vec![anchor.clone(), next.clone()]
        } else {
            next[fwd] += path.advance;
            path.sites.clone()
        };
        if next[fwd] - origin[fwd] >= n {
            for x in &st.bubble {
                set.insert(b.index(x).ok_or_else(|| Error::BoxEscape { site: x.clone() })?);
            }
            break;
        }
        for x in &steps {
            set.insert(b.index(x).ok_or_else(|| Error::BoxEscape { site: x.clone() })?);
        }
        anchor = next;
        anchors.push(anchor.clone());
    }
    let mut allowed = vec![false; b.len()];
    for &i in &set {
        allowed[i] = true;
    }
    let inside = g.bfs(o, Some(&allowed));
    let full = g.bfs(o, None);
    let connected_within = set.iter().all(|&i| (full[i] == u32::MAX) == (inside[i] == u32::MAX));
    Ok(Tadpole {
        n,
        heading,
        sites: set.iter().map(|&i| b.coords(i)).collect(),
        anchors,
        connected_within,
    })
}
