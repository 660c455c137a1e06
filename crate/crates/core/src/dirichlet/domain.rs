use crate::error::{Error, Result};
use crate::lattice::LatticeBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRole {
    Outside,
    Interior(u32),
    Boundary(u32),
}

/// A finite lattice domain: interior sites `É`, boundary sites `∂`, and dense
/// ordinal maps for both. Every neighbour of an interior site lies in
/// `É ∪ ∂`.
#[derive(Debug, Clone)]
pub struct LatticeDomain {
    bbox: LatticeBox,
    roles: Vec<SiteRole>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    radius: Option<f64>,
    center: Option<Vec<f64>>,
}

impl LatticeDomain {
    /// Builds the domain whose closure is the given member set of `bbox`:
    /// interior sites are members all of whose `2d` neighbours are members.
    pub fn from_closure(bbox: LatticeBox, member: &[bool]) -> Result<Self> {
        assert_eq!(member.len(), bbox.len());
        let d = bbox.dim();
        let mut roles = vec![SiteRole::Outside; bbox.len()];
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for idx in 0..bbox.len() {
            if !member[idx] {
                continue;
            }
            let inner = (0..d).all(|a| {
                [true, false]
                    .iter()
                    .all(|&s| bbox.neighbor(idx, a, s).is_some_and(|j| member[j]))
            });
            if inner {
                roles[idx] = SiteRole::Interior(interior.len() as u32);
                interior.push(idx);
            } else {
                roles[idx] = SiteRole::Boundary(boundary.len() as u32);
                boundary.push(idx);
            }
        }
        if interior.is_empty() {
            return Err(Error::Domain("domain has no interior sites".into()));
        }
        Ok(Self {
            bbox,
            roles,
            interior,
            boundary,
            radius: None,
            center: None,
        })
    }

    /// `B_R^dis(c) = {z : ‖z - c‖₂ < R}` with interior `É_R` and boundary
    /// `∂É_R = B_R^dis \ É_R`.
    pub fn discrete_ball(radius: f64, center: &[f64]) -> Result<Self> {
        Self::ball(radius, center, false)
    }

    /// The closed variant `{z : ‖z - c‖₂ ≤ R}`.
    pub fn closed_ball(radius: f64, center: &[f64]) -> Result<Self> {
        Self::ball(radius, center, true)
    }

    fn ball(radius: f64, center: &[f64], closed: bool) -> Result<Self> {
        if !(radius >= 1.0) {
            return Err(Error::Argument(format!("ball radius must be at least 1, got {radius}")));
        }
        if center.is_empty() {
            return Err(Error::Argument("ball center must have positive dimension".into()));
        }
        let lo = center.iter().map(|c| (c - radius).floor() as i64).collect();
        let hi = center.iter().map(|c| (c + radius).ceil() as i64).collect();
        let bbox = LatticeBox::new(lo, hi)?;
        let r2 = radius * radius;
        let member: Vec<bool> = (0..bbox.len())
            .map(|i| {
                let x = bbox.coords(i);
                let dist2: f64 = x.iter().zip(center).map(|(&a, c)| (a as f64 - c).powi(2)).sum();
                if closed {
                    dist2 <= r2
                } else {
                    dist2 < r2
                }
            })
            .collect();
        let mut dom = Self::from_closure(bbox, &member)?;
        dom.radius = Some(radius);
        dom.center = Some(center.to_vec());
        Ok(dom)
    }

    /// Domain whose closure is an entire box.
    pub fn from_box(bbox: LatticeBox) -> Result<Self> {
        let member = vec![true; bbox.len()];
        Self::from_closure(bbox, &member)
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn bbox(&self) -> &LatticeBox {
        &self.bbox
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn center(&self) -> Option<&[f64]> {
        self.center.as_deref()
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    pub fn role(&self, x: &[i64]) -> SiteRole {
        self.bbox.index(x).map_or(SiteRole::Outside, |i| self.roles[i])
    }

    pub fn role_at(&self, bbox_idx: usize) -> SiteRole {
        self.roles[bbox_idx]
    }

    /// Box indices of interior sites, in ordinal order.
    pub fn interior_indices(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_indices(&self) -> &[usize] {
        &self.boundary
    }

    pub fn interior_site(&self, ord: usize) -> Vec<i64> {
        self.bbox.coords(self.interior[ord])
    }

    pub fn boundary_site(&self, ord: usize) -> Vec<i64> {
        self.bbox.coords(self.boundary[ord])
    }

    pub fn interior_sites(&self) -> Vec<Vec<i64>> {
        self.interior.iter().map(|&i| self.bbox.coords(i)).collect()
    }

    pub fn boundary_sites(&self) -> Vec<Vec<i64>> {
        self.boundary.iter().map(|&i| self.bbox.coords(i)).collect()
    }

    pub fn in_closure(&self, x: &[i64]) -> bool {
        !matches!(self.role(x), SiteRole::Outside)
    }

    /// `I_k`: interior sites at Euclidean distance more than `k` from `∂`.
    pub fn inner_core(&self, k: f64) -> Vec<Vec<i64>> {
        let bnd = self.boundary_sites();
        self.interior_sites()
            .into_iter()
            .filter(|x| {
                bnd.iter().all(|b| {
                    let d2: i64 = x.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
                    (d2 as f64) > k * k
                })
            })
            .collect()
    }

    /// Membership mask over an environment box, for exit-stopped walks:
    /// `true` on interior sites.
    pub fn interior_mask(&self, env_box: &LatticeBox) -> Vec<bool> {
        let mut mask = vec![false; env_box.len()];
        for &i in &self.interior {
            if let Some(j) = env_box.index(&self.bbox.coords(i)) {
                mask[j] = true;
            }
        }
        mask
    }
}

/// `∂^{(k)}Q`: sites outside `Q` within sup-norm distance `< k` of `Q`.
pub fn widened_boundary(q: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    if q.is_empty() || k == 0 {
        return Vec::new();
    }
    let d = q[0].len();
    let reach = k as i64 - 1;
    let lo: Vec<i64> = (0..d).map(|a| q.iter().map(|x| x[a]).min().unwrap() - reach).collect();
    let hi: Vec<i64> = (0..d).map(|a| q.iter().map(|x| x[a]).max().unwrap() + reach).collect();
    let bbox = LatticeBox::new(lo, hi).expect("bounding box of a finite set");
    let mut in_q = vec![false; bbox.len()];
    for x in q {
        in_q[bbox.index(x).unwrap()] = true;
    }
    let mut near = vec![false; bbox.len()];
    for x in q {
        // every site of the sup-norm ball of radius k-1 around x
        let sub_lo: Vec<i64> = x.iter().map(|c| c - reach).collect();
        let sub_hi: Vec<i64> = x.iter().map(|c| c + reach).collect();
        let sub = LatticeBox::new(sub_lo, sub_hi).unwrap();
        for y in sub.iter_coords() {
            near[bbox.index(&y).unwrap()] = true;
        }
    }
    (0..bbox.len())
        .filter(|&i| near[i] && !in_q[i])
        .map(|i| bbox.coords(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_ball() {
        let dom = LatticeDomain::discrete_ball(2.5, &[0.0]).unwrap();
        assert_eq!(dom.interior_sites(), vec![vec![-1], vec![0], vec![1]]);
        assert_eq!(dom.boundary_sites(), vec![vec![-2], vec![2]]);
    }

    #[test]
    fn two_dimensional_ball_matches_definition() {
        let r = 3.0;
        let dom = LatticeDomain::discrete_ball(r, &[0.0, 0.0]).unwrap();
        // oracle: filter the definition over a generous square
        let in_ball = |x: i64, y: i64| ((x * x + y * y) as f64) < r * r;
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for x in -5..=5 {
            for y in -5..=5 {
                if !in_ball(x, y) {
                    continue;
                }
                let all = in_ball(x + 1, y) && in_ball(x - 1, y) && in_ball(x, y + 1) && in_ball(x, y - 1);
                if all {
                    interior.push(vec![x, y]);
                } else {
                    boundary.push(vec![x, y]);
                }
            }
        }
        assert_eq!(dom.interior_sites(), interior);
        assert_eq!(dom.boundary_sites(), boundary);
        for x in dom.interior_sites() {
            for a in 0..2 {
                for s in [-1, 1] {
                    let mut y = x.clone();
                    y[a] += s;
                    assert!(dom.in_closure(&y));
                }
            }
        }
    }

    #[test]
    fn radius_below_one_rejected() {
        assert!(matches!(LatticeDomain::discrete_ball(0.5, &[0.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn widened_boundary_counts() {
        let q: Vec<Vec<i64>> = LatticeBox::centered(2, 1).unwrap().iter_coords().collect();
        assert!(widened_boundary(&q, 1).is_empty());
        assert_eq!(widened_boundary(&q, 2).len(), 25 - 9);
        assert_eq!(widened_boundary(&q, 3).len(), 49 - 9);
    }

    #[test]
    fn inner_core_shrinks() {
        let dom = LatticeDomain::discrete_ball(6.0, &[0.0, 0.0]).unwrap();
        let core = dom.inner_core(2.0);
        assert!(core.len() < dom.n_interior());
        assert!(core.contains(&vec![0, 0]));
    }
}
