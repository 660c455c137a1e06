//! Balanced i.i.d. environments.
//!
//! A site stores only its `d` axis weights `p_i = ω(z, e_i) = ω(z, -e_i)`, so
//! balance holds by construction; the remaining invariant is
//! `Σ_i 2 p_i = 1`.

use crate::error::{Error, Result};
use crate::lattice::LatticeBox;
use crate::rng::{site_hash, unit_interval};
use rayon::prelude::*;
use serde::Serialize;
use std::io::{Read, Write};
use std::path::Path;

pub const BALANCE_TOL: f64 = 1e-12;
const MAGIC: &str = "RWRE-ENV v1";

/// One atom of a site law: axis weights and the probability of drawing them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub weights: Vec<f64>,
    pub prob: f64,
}

/// Single-site distribution over balanced transition vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvironmentLaw {
    dim: usize,
    atoms: Vec<Atom>,
    name: String,
}

/// How to build a law.
#[derive(Debug, Clone, PartialEq)]
pub enum LawSpec {
    /// Simple random walk: one atom with every `p_i = 1/(2d)`.
    Srw { dim: usize },
    /// Each site picks one axis uniformly and moves along it with `1/2` each way.
    AxisChoice { dim: usize },
    /// Explicit atoms `(weights, probability)`.
    Atoms {
        name: String,
        dim: usize,
        atoms: Vec<(Vec<f64>, f64)>,
    },
}

impl LawSpec {
    /// Parses `srw`, `axis-choice`, or `atoms:p,p@q;p,p@q;...`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let text = text.trim();
        match text {
            "srw" => Ok(LawSpec::Srw { dim }),
            "axis-choice" => Ok(LawSpec::AxisChoice { dim }),
            _ => {
                let body = text.strip_prefix("atoms:").ok_or_else(|| Error::Config {
                    field: "law".into(),
                    message: format!("unknown law `{text}` (expected srw, axis-choice or atoms:...)"),
                })?;
                let mut atoms = Vec::new();
                for part in body.split(';').filter(|s| !s.trim().is_empty()) {
                    let (w, q) = part.split_once('@').ok_or_else(|| Error::Config {
                        field: "law".into(),
                        message: format!("atom `{part}` lacks `@probability`"),
                    })?;
                    let parse = |s: &str| {
                        s.trim().parse::<f64>().map_err(|_| Error::Config {
                            field: "law".into(),
                            message: format!("bad number `{s}`"),
                        })
                    };
                    let weights = w.split(',').map(parse).collect::<Result<Vec<_>>>()?;
                    atoms.push((weights, parse(q)?));
                }
                let dim = atoms.first().map(|a| a.0.len()).unwrap_or(dim);
                Ok(LawSpec::Atoms {
                    name: text.to_string(),
                    dim,
                    atoms,
                })
            }
        }
    }
}

pub fn make_law(spec: &LawSpec) -> Result<EnvironmentLaw> {
    let (name, dim, atoms) = match spec {
        LawSpec::Srw { dim } => {
            check_dim(*dim)?;
            ("srw".to_string(), *dim, vec![(vec![0.5 / *dim as f64; *dim], 1.0)])
        }
        LawSpec::AxisChoice { dim } => {
            check_dim(*dim)?;
            let atoms = (0..*dim)
                .map(|i| {
                    let mut w = vec![0.0; *dim];
                    w[i] = 0.5;
                    (w, 1.0 / *dim as f64)
                })
                .collect();
            ("axis-choice".to_string(), *dim, atoms)
        }
        LawSpec::Atoms { name, dim, atoms } => {
            check_dim(*dim)?;
            (name.clone(), *dim, atoms.clone())
        }
    };
    EnvironmentLaw::new(name, dim, atoms)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > 16 {
        return Err(Error::Argument(format!("dimension must be in 1..=16, got {dim}")));
    }
    Ok(())
}

impl EnvironmentLaw {
    pub fn new(name: String, dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Probability { total: 0.0 });
        }
        let mut out = Vec::with_capacity(atoms.len());
        for (k, (weights, prob)) in atoms.into_iter().enumerate() {
            if weights.len() != dim {
                return Err(Error::Argument(format!(
                    "atom {k} has {} weights, expected {dim}",
                    weights.len()
                )));
            }
            if weights.iter().any(|&w| !(w >= 0.0)) || !(prob >= 0.0) {
                return Err(Error::Argument(format!("atom {k} has a negative or NaN entry")));
            }
            let total: f64 = weights.iter().map(|w| 2.0 * w).sum();
            if (total - 1.0).abs() > BALANCE_TOL {
                return Err(Error::Balance { atom: k, total });
            }
            out.push(Atom { weights, prob });
        }
        let total_q: f64 = out.iter().map(|a| a.prob).sum();
        if (total_q - 1.0).abs() > 1e-12 {
            return Err(Error::Probability { total: total_q });
        }
        for axis in 0..dim {
            if !out.iter().any(|a| a.prob > 0.0 && a.weights[axis] > 0.0) {
                return Err(Error::DegenerateLaw { axis });
            }
        }
        Ok(Self { dim, atoms: out, name })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// True when the law is a point mass, so every environment is the same.
    pub fn is_deterministic(&self) -> bool {
        self.atoms.iter().filter(|a| a.prob > 0.0).count() == 1
    }

    /// Picks the atom selected by a uniform draw `u ∈ [0, 1)`.
    pub fn atom_for(&self, u: f64) -> &Atom {
        let mut acc = 0.0;
        let mut last = &self.atoms[0];
        for a in &self.atoms {
            if a.prob <= 0.0 {
                continue;
            }
            acc += a.prob;
            last = a;
            if u < acc {
                return a;
            }
        }
        last
    }

    /// Diagonal of the limiting covariance when the law itself forces it:
    /// constant laws and laws invariant under permutation of the axes.
    pub fn symmetric_sigma(&self) -> Option<Vec<f64>> {
        if self.is_deterministic() {
            let a = self.atoms.iter().find(|a| a.prob > 0.0)?;
            return Some(a.weights.iter().map(|w| 2.0 * w).collect());
        }
        match self.name.as_str() {
            "srw" | "axis-choice" => Some(vec![1.0 / self.dim as f64; self.dim]),
            _ => None,
        }
    }
}

/// A sampled (or hand-built) environment on a finite box.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    bounds: LatticeBox,
    weights: Vec<f64>,
    law_name: String,
    seed: u64,
}

pub fn sample_environment(law: &EnvironmentLaw, bounds: &LatticeBox, seed: u64) -> Result<Environment> {
    if law.dim() != bounds.dim() {
        return Err(Error::Argument(format!(
            "law dimension {} does not match box dimension {}",
            law.dim(),
            bounds.dim()
        )));
    }
    let d = law.dim();
    let n = bounds.len();
    let total = n.checked_mul(d).ok_or_else(|| Error::Capacity("weight array overflows".into()))?;
    let mut weights = Vec::new();
    weights
        .try_reserve_exact(total)
        .map_err(|e| Error::Capacity(format!("cannot allocate {total} weights: {e}")))?;
    weights.resize(total, 0.0);
    weights.par_chunks_mut(d).enumerate().for_each(|(idx, chunk)| {
        let x = bounds.coords(idx);
        let atom = law.atom_for(unit_interval(site_hash(seed, &x)));
        chunk.copy_from_slice(&atom.weights);
    });
    Ok(Environment {
        bounds: bounds.clone(),
        weights,
        law_name: law.name().to_string(),
        seed,
    })
}

impl Environment {
    /// Builds an environment from a per-site weight function. No validation is
    /// performed; use [`validate_environment`] to check it.
    pub fn from_fn(bounds: LatticeBox, law_name: &str, mut f: impl FnMut(&[i64]) -> Vec<f64>) -> Self {
        let d = bounds.dim();
        let mut weights = Vec::with_capacity(bounds.len() * d);
        for idx in 0..bounds.len() {
            let w = f(&bounds.coords(idx));
            assert_eq!(w.len(), d, "weight vector has wrong dimension");
            weights.extend_from_slice(&w);
        }
        Self {
            bounds,
            weights,
            law_name: law_name.to_string(),
            seed: 0,
        }
    }

    /// Every site uses the same weights.
    pub fn constant(bounds: LatticeBox, weights: &[f64], law_name: &str) -> Self {
        Self::from_fn(bounds, law_name, |_| weights.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &LatticeBox {
        &self.bounds
    }

    pub fn law_name(&self) -> &str {
        &self.law_name
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn raw_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Axis weights at the linear index `idx` of the box.
    #[inline]
    pub fn weights(&self, idx: usize) -> &[f64] {
        let d = self.dim();
        &self.weights[idx * d..(idx + 1) * d]
    }

    pub fn weights_at(&self, x: &[i64]) -> Option<&[f64]> {
        self.bounds.index(x).map(|i| self.weights(i))
    }

    /// `ω(x, ±e_axis)`.
    #[inline]
    pub fn weight(&self, idx: usize, axis: usize) -> f64 {
        self.weights[idx * self.dim() + axis]
    }

    /// Bit `i` is set when axis `i` has strictly positive weight.
    #[inline]
    pub fn axis_mask(&self, idx: usize) -> u32 {
        self.weights(idx)
            .iter()
            .enumerate()
            .fold(0, |m, (i, &w)| if w > 0.0 { m | (1 << i) } else { m })
    }

    pub fn set_weights(&mut self, x: &[i64], w: &[f64]) -> Result<()> {
        let idx = self
            .bounds
            .index(x)
            .ok_or_else(|| Error::BoxEscape { site: x.to_vec() })?;
        let d = self.dim();
        self.weights[idx * d..(idx + 1) * d].copy_from_slice(w);
        Ok(())
    }
}

/// Result of [`validate_environment`]. Only the sampled box is certified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub balanced: bool,
    pub balance_violations: Vec<Vec<i64>>,
    pub negative_weights: Vec<Vec<i64>>,
    /// For each axis, whether some in-box site moves along it.
    pub axis_present: Vec<bool>,
}

impl ValidationReport {
    pub fn genuinely_d_dimensional(&self) -> bool {
        self.axis_present.iter().all(|&b| b)
    }

    pub fn ok(&self) -> bool {
        self.balanced && self.negative_weights.is_empty() && self.genuinely_d_dimensional()
    }
}

pub fn validate_environment(env: &Environment) -> ValidationReport {
    let d = env.dim();
    let mut report = ValidationReport {
        balanced: true,
        balance_violations: Vec::new(),
        negative_weights: Vec::new(),
        axis_present: vec![false; d],
    };
    for idx in 0..env.bounds.len() {
        let w = env.weights(idx);
        let total: f64 = w.iter().map(|p| 2.0 * p).sum();
        if !((total - 1.0).abs() <= BALANCE_TOL) {
            report.balanced = false;
            report.balance_violations.push(env.bounds.coords(idx));
        }
        if w.iter().any(|&p| !(p >= 0.0)) {
            report.negative_weights.push(env.bounds.coords(idx));
        }
        for (axis, &p) in w.iter().enumerate() {
            if p > 0.0 {
                report.axis_present[axis] = true;
            }
        }
    }
    report
}

fn join(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn write_environment<W: Write>(env: &Environment, mut w: W) -> Result<()> {
    let b = env.bounds();
    write!(
        w,
        "{MAGIC}\nd={}\nbox={}:{}\nlaw={}\nseed={}\n",
        env.dim(),
        join(b.lo()),
        join(b.hi()),
        env.law_name,
        env.seed
    )?;
    let mut buf = Vec::with_capacity(env.weights.len() * 8);
    for x in &env.weights {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn save_environment(env: &Environment, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_environment(env, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_environment(path: &Path) -> Result<Environment> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_environment(&bytes)
}

/// Parses the on-disk environment format.
pub fn parse_environment(bytes: &[u8]) -> Result<Environment> {
    let mut offset = 0usize;
    let mut next_line = |expect: &str| -> Result<(usize, String)> {
        let start = offset;
        let rel = bytes[start..].iter().position(|&b| b == b'\n').ok_or_else(|| Error::Format {
            offset: start as u64,
            message: format!("missing header line `{expect}`"),
        })?;
        let line = std::str::from_utf8(&bytes[start..start + rel]).map_err(|_| Error::Format {
            offset: start as u64,
            message: "header is not UTF-8".into(),
        })?;
        offset = start + rel + 1;
        Ok((start, line.to_string()))
    };
    let fmt_err = |at: usize, message: String| Error::Format {
        offset: at as u64,
        message,
    };

    let (at, magic) = next_line("magic")?;
    if magic != MAGIC {
        return Err(fmt_err(at, format!("bad magic `{magic}`")));
    }
    let field = |line: (usize, String), key: &str| -> Result<(usize, String)> {
        let (at, text) = line;
        let prefix = format!("{key}=");
        text.strip_prefix(&prefix)
            .map(|v| (at, v.to_string()))
            .ok_or_else(|| fmt_err(at, format!("expected `{key}=...`, found `{text}`")))
    };
    let (at_d, d_text) = field(next_line("d")?, "d")?;
    let d: usize = d_text
        .parse()
        .ok()
        .filter(|&d| d > 0)
        .ok_or_else(|| fmt_err(at_d, format!("bad dimension `{d_text}`")))?;
    let (at_box, box_text) = field(next_line("box")?, "box")?;
    let parse_corner = |s: &str| -> Result<Vec<i64>> {
        s.split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| fmt_err(at_box, format!("bad box corner `{s}`")))
    };
    let (lo, hi) = box_text
        .split_once(':')
        .ok_or_else(|| fmt_err(at_box, "box needs `lo:hi`".into()))?;
    let (lo, hi) = (parse_corner(lo)?, parse_corner(hi)?);
    if lo.len() != d || hi.len() != d {
        return Err(fmt_err(at_box, format!("box corners do not have dimension {d}")));
    }
    let bounds = LatticeBox::new(lo, hi).map_err(|e| fmt_err(at_box, e.to_string()))?;
    let (_, law_name) = field(next_line("law")?, "law")?;
    let (at_seed, seed_text) = field(next_line("seed")?, "seed")?;
    let seed: u64 = seed_text
        .parse()
        .map_err(|_| fmt_err(at_seed, format!("bad seed `{seed_text}`")))?;

    let payload = &bytes[offset..];
    let expected = bounds.len() * d * 8;
    if payload.len() != expected {
        return Err(fmt_err(
            offset + payload.len().min(expected),
            format!("payload has {} bytes, box declares {expected}", payload.len()),
        ));
    }
    let weights = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(Environment {
        bounds,
        weights,
        law_name,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis2() -> EnvironmentLaw {
        make_law(&LawSpec::AxisChoice { dim: 2 }).unwrap()
    }

    #[test]
    fn builtin_laws() {
        let srw = make_law(&LawSpec::Srw { dim: 2 }).unwrap();
        assert_eq!(srw.atoms().len(), 1);
        assert_eq!(srw.atoms()[0].weights, vec![0.25, 0.25]);
        assert_eq!(srw.atoms()[0].prob, 1.0);
        let ax = axis2();
        assert_eq!(ax.atoms()[0].weights, vec![0.5, 0.0]);
        assert_eq!(ax.atoms()[1].weights, vec![0.0, 0.5]);
        assert!(ax.atoms().iter().all(|a| a.prob == 0.5));
    }

    #[test]
    fn law_errors() {
        let unbalanced = LawSpec::Atoms {
            name: "bad".into(),
            dim: 2,
            atoms: vec![(vec![0.6, 0.0], 1.0)],
        };
        assert!(matches!(make_law(&unbalanced), Err(Error::Balance { .. })));
        let degenerate = LawSpec::Atoms {
            name: "h".into(),
            dim: 2,
            atoms: vec![(vec![0.5, 0.0], 1.0)],
        };
        assert_eq!(make_law(&degenerate), Err(Error::DegenerateLaw { axis: 1 }));
        let bad_q = LawSpec::Atoms {
            name: "q".into(),
            dim: 2,
            atoms: vec![(vec![0.5, 0.0], 0.5), (vec![0.0, 0.5], 0.4)],
        };
        assert!(matches!(make_law(&bad_q), Err(Error::Probability { .. })));
    }

    #[test]
    fn parse_atoms_spec() {
        let spec = LawSpec::parse("atoms:0.5,0@0.25;0.25,0.25@0.75", 0).unwrap();
        let law = make_law(&spec).unwrap();
        assert_eq!(law.dim(), 2);
        assert_eq!(law.atoms()[1].prob, 0.75);
        assert!(LawSpec::parse("nope", 2).is_err());
    }

    #[test]
    fn srw_samples_constant() {
        let srw = make_law(&LawSpec::Srw { dim: 2 }).unwrap();
        let env = sample_environment(&srw, &LatticeBox::centered(2, 5).unwrap(), 9).unwrap();
        assert!((0..env.bounds().len()).all(|i| env.weights(i) == [0.25, 0.25]));
    }

    #[test]
    fn sampling_is_deterministic_and_local() {
        let b = LatticeBox::centered(2, 6).unwrap();
        let e1 = sample_environment(&axis2(), &b, 3).unwrap();
        let e2 = sample_environment(&axis2(), &b, 3).unwrap();
        assert_eq!(e1, e2);
        // a sub-box sees exactly the same weights: sites are seeded by coordinates
        let small = LatticeBox::new(vec![-2, 0], vec![3, 4]).unwrap();
        let e3 = sample_environment(&axis2(), &small, 3).unwrap();
        for idx in 0..small.len() {
            let x = small.coords(idx);
            assert_eq!(e3.weights(idx), e1.weights_at(&x).unwrap());
        }
    }

    #[test]
    fn validation_flags_problems() {
        let b = LatticeBox::centered(2, 2).unwrap();
        let horiz = Environment::constant(b.clone(), &[0.5, 0.0], "horizontal");
        let r = validate_environment(&horiz);
        assert!(r.balanced);
        assert_eq!(r.axis_present, vec![true, false]);
        assert!(!r.ok());

        let mut srw = Environment::constant(b, &[0.25, 0.25], "srw");
        assert!(validate_environment(&srw).ok());
        srw.set_weights(&[1, -1], &[0.25, 0.2]).unwrap();
        let r = validate_environment(&srw);
        assert!(!r.balanced);
        assert_eq!(r.balance_violations, vec![vec![1, -1]]);
    }

    #[test]
    fn file_format_errors() {
        let b = LatticeBox::centered(2, 1).unwrap();
        let env = sample_environment(&axis2(), &b, 1).unwrap();
        let mut bytes = Vec::new();
        write_environment(&env, &mut bytes).unwrap();
        assert_eq!(parse_environment(&bytes).unwrap(), env);

        let mut wrong_magic = bytes.clone();
        wrong_magic[0] = b'X';
        assert!(matches!(parse_environment(&wrong_magic), Err(Error::Format { offset: 0, .. })));

        let truncated = &bytes[..bytes.len() - 3];
        assert!(matches!(parse_environment(truncated), Err(Error::Format { .. })));

        assert!(bytes.starts_with(b"RWRE-ENV v1\nd=2\nbox=-1,-1:1,1\nlaw=axis-choice\nseed=1\n"));
        assert_eq!(bytes.len(), 53 + 9 * 2 * 8);
    }
}
