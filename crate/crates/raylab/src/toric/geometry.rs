//! Convex bodies in dimension one and two.
//!
//! Intervals are stored as endpoints, planar bodies as counter-clockwise hull
//! vertices. Planar bodies may be degenerate (a point or a segment); such
//! bodies have zero volume but still take part in hulls, intersections and
//! Minkowski sums.

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Interval { lo: f64, hi: f64 },
    Polygon(Vec<[f64; 2]>),
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Convex hull (Andrew's monotone chain), counter-clockwise, collinear points dropped.
pub fn hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| dist(*a, *b) <= EPS);
    if pts.len() <= 2 {
        return pts;
    }
    let scale = pts.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let tol = EPS * scale * scale;
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && dist(lower[0], lower[1]) <= EPS {
        lower.truncate(1);
    }
    lower
}

fn segment_intersection(p: [f64; 2], p2: [f64; 2], q: [f64; 2], q2: [f64; 2]) -> Option<[f64; 2]> {
    let r = [p2[0] - p[0], p2[1] - p[1]];
    let s = [q2[0] - q[0], q2[1] - q[1]];
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom.abs() <= EPS * (r[0].hypot(r[1]) * s[0].hypot(s[1])).max(EPS) {
        return None;
    }
    let qp = [q[0] - p[0], q[1] - p[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / denom;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / denom;
    if (-EPS..=1.0 + EPS).contains(&t) && (-EPS..=1.0 + EPS).contains(&u) {
        Some([p[0] + t * r[0], p[1] + t * r[1]])
    } else {
        None
    }
}

fn edges(v: &[[f64; 2]]) -> Vec<([f64; 2], [f64; 2])> {
    match v.len() {
        0 => vec![],
        1 => vec![(v[0], v[0])],
        2 => vec![(v[0], v[1])],
        n => (0..n).map(|i| (v[i], v[(i + 1) % n])).collect(),
    }
}

impl ConvexBody {
    pub fn interval(lo: f64, hi: f64) -> Self {
        ConvexBody::Interval { lo: lo.min(hi), hi: lo.max(hi) }
    }

    /// Convex hull of points in dimension `dim`.
    pub fn hull(dim: usize, points: &[Vec<f64>]) -> Option<Self> {
        if points.is_empty() {
            return None;
        }
        match dim {
            1 => {
                let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                Some(ConvexBody::Interval { lo, hi })
            }
            _ => {
                let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
                Some(ConvexBody::Polygon(hull_2d(&pts)))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Interval { .. } => 1,
            ConvexBody::Polygon(_) => 2,
        }
    }

    /// Lebesgue measure (length or area).
    pub fn volume(&self) -> f64 {
        match self {
            ConvexBody::Interval { lo, hi } => hi - lo,
            ConvexBody::Polygon(v) => {
                if v.len() < 3 {
                    return 0.0;
                }
                let mut a = 0.0;
                for i in 0..v.len() {
                    let (p, q) = (v[i], v[(i + 1) % v.len()]);
                    a += p[0] * q[1] - q[0] * p[1];
                }
                0.5 * a.abs()
            }
        }
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            ConvexBody::Interval { lo, hi } if lo == hi => vec![vec![*lo]],
            ConvexBody::Interval { lo, hi } => vec![vec![*lo], vec![*hi]],
            ConvexBody::Polygon(v) => v.iter().map(|p| p.to_vec()).collect(),
        }
    }

    fn points_2d(&self) -> Vec<[f64; 2]> {
        match self {
            ConvexBody::Polygon(v) => v.clone(),
            ConvexBody::Interval { .. } => panic!("planar operation on an interval"),
        }
    }

    /// Signed distance-like excess: `≤ 0` inside, the largest violated
    /// facet inequality (Euclidean distance for degenerate bodies) outside.
    pub fn excess(&self, p: &[f64]) -> f64 {
        match self {
            ConvexBody::Interval { lo, hi } => (lo - p[0]).max(p[0] - hi),
            ConvexBody::Polygon(v) => {
                let x = [p[0], p[1]];
                match v.len() {
                    0 => f64::INFINITY,
                    1 => dist(v[0], x),
                    2 => point_segment_distance(x, v[0], v[1]),
                    n => (0..n)
                        .map(|i| {
                            let (a, b) = (v[i], v[(i + 1) % n]);
                            let len = dist(a, b);
                            -cross(a, b, x) / len
                        })
                        .fold(f64::NEG_INFINITY, f64::max),
                }
            }
        }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.excess(p) <= tol
    }

    /// Outward unit normals and offsets `(ν, c)` with the body equal to
    /// `{⟨ν, p⟩ ≤ c}`. Degenerate planar bodies have no facets.
    pub fn halfspaces(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            ConvexBody::Interval { lo, hi } => vec![(vec![-1.0], -lo), (vec![1.0], *hi)],
            ConvexBody::Polygon(v) if v.len() >= 3 => (0..v.len())
                .map(|i| {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    let len = dist(a, b);
                    let nu = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
                    (nu.to_vec(), nu[0] * a[0] + nu[1] * a[1])
                })
                .collect(),
            ConvexBody::Polygon(_) => Vec::new(),
        }
    }

    pub fn intersect(&self, other: &ConvexBody) -> Option<ConvexBody> {
        match (self, other) {
            (ConvexBody::Interval { lo: a, hi: b }, ConvexBody::Interval { lo: c, hi: d }) => {
                let (lo, hi) = (a.max(*c), b.min(*d));
                if lo <= hi + EPS {
                    Some(ConvexBody::Interval { lo, hi: hi.max(lo) })
                } else {
                    None
                }
            }
            (ConvexBody::Polygon(_), ConvexBody::Polygon(_)) => {
                let (a, b) = (self.points_2d(), other.points_2d());
                let tol = 1e-11;
                let mut pts: Vec<[f64; 2]> = a.iter().copied().filter(|p| other.contains(p, tol)).collect();
                pts.extend(b.iter().copied().filter(|p| self.contains(p, tol)));
                for (p, p2) in edges(&a) {
                    for (q, q2) in edges(&b) {
                        if let Some(x) = segment_intersection(p, p2, q, q2) {
                            pts.push(x);
                        }
                    }
                }
                if pts.is_empty() {
                    None
                } else {
                    Some(ConvexBody::Polygon(hull_2d(&pts)))
                }
            }
            _ => panic!("intersecting bodies of different dimension"),
        }
    }

    /// Convex hull of the union.
    pub fn hull_union(&self, other: &ConvexBody) -> ConvexBody {
        let mut pts = self.vertices();
        pts.extend(other.vertices());
        ConvexBody::hull(self.dim(), &pts).expect("nonempty")
    }

    pub fn minkowski_sum(&self, other: &ConvexBody) -> ConvexBody {
        let mut pts = Vec::new();
        for p in self.vertices() {
            for q in other.vertices() {
                pts.push(p.iter().zip(&q).map(|(a, b)| a + b).collect::<Vec<f64>>());
            }
        }
        ConvexBody::hull(self.dim(), &pts).expect("nonempty")
    }

    /// Clip by the half-space `⟨a, p⟩ ≤ c`.
    pub fn clip_halfspace(&self, a: &[f64], c: f64) -> Option<ConvexBody> {
        match self {
            ConvexBody::Interval { lo, hi } => {
                let (mut lo, mut hi) = (*lo, *hi);
                if a[0] > 0.0 {
                    hi = hi.min(c / a[0]);
                } else if a[0] < 0.0 {
                    lo = lo.max(c / a[0]);
                } else if c < 0.0 {
                    return None;
                }
                (lo <= hi).then_some(ConvexBody::Interval { lo, hi })
            }
            ConvexBody::Polygon(v) => {
                let val = |p: [f64; 2]| a[0] * p[0] + a[1] * p[1] - c;
                let scale = a[0].hypot(a[1]).max(EPS);
                let mut out = Vec::new();
                let n = v.len();
                for i in 0..n {
                    let p = v[i];
                    let q = v[(i + 1) % n];
                    let (fp, fq) = (val(p), val(q));
                    if fp <= EPS * scale {
                        out.push(p);
                    }
                    if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
                        let t = fp / (fp - fq);
                        out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                    }
                }
                if out.is_empty() {
                    None
                } else {
                    Some(ConvexBody::Polygon(hull_2d(&out)))
                }
            }
        }
    }

    pub fn scaled(&self, k: f64) -> ConvexBody {
        match self {
            ConvexBody::Interval { lo, hi } => ConvexBody::interval(lo * k, hi * k),
            ConvexBody::Polygon(v) => ConvexBody::Polygon(v.iter().map(|p| [p[0] * k, p[1] * k]).collect()),
        }
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexBody::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            ConvexBody::Polygon(v) => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for p in v {
                    for d in 0..2 {
                        lo[d] = lo[d].min(p[d]);
                        hi[d] = hi[d].max(p[d]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Mutual containment of vertices within `tol`; equality of closed bodies.
    pub fn approx_eq(&self, other: &ConvexBody, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.vertices().iter().all(|p| other.contains(p, tol))
            && other.vertices().iter().all(|p| self.contains(p, tol))
    }

    /// Support function `sup_{p ∈ Q} ⟨p, x⟩`.
    pub fn support(&self, x: &[f64]) -> f64 {
        self.vertices()
            .iter()
            .map(|p| p.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn point_segment_distance(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 { 0.0 } else { (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0) };
    dist(x, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Mixed area `MV(A, B)` with `MV(A, A) = area(A)`.
pub fn mixed_area(a: &ConvexBody, b: &ConvexBody) -> f64 {
    0.5 * (a.minkowski_sum(b).volume() - a.volume() - b.volume())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody {
        ConvexBody::Polygon(hull_2d(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    }

    fn triangle() -> ConvexBody {
        ConvexBody::Polygon(hull_2d(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    }

    #[test]
    fn shoelace_areas() {
        assert_eq!(square().volume(), 1.0);
        assert_eq!(triangle().volume(), 0.5);
        assert_eq!(ConvexBody::interval(0.25, 1.0).volume(), 0.75);
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let h = hull_2d(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.2, 0.2], [0.0, 1.0]]);
        assert_eq!(h.len(), 3);
        let seg = hull_2d(&[[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]]);
        assert_eq!(seg.len(), 2);
    }

    #[test]
    fn intersection_of_square_and_shifted_triangle() {
        let t = ConvexBody::Polygon(hull_2d(&[[0.5, -1.0], [2.0, -1.0], [0.5, 2.0]]));
        let i = square().intersect(&t).unwrap();
        // Area checked against midpoint sampling.
        let mut inside = 0;
        let n = 400;
        for a in 0..n {
            for b in 0..n {
                let p = [(a as f64 + 0.5) / n as f64, (b as f64 + 0.5) / n as f64];
                if square().contains(&p, 0.0) && t.contains(&p, 0.0) {
                    inside += 1;
                }
            }
        }
        assert!((i.volume() - inside as f64 / (n * n) as f64).abs() < 5e-3);
    }

    #[test]
    fn disjoint_intersection() {
        let far = ConvexBody::Polygon(hull_2d(&[[3.0, 3.0], [4.0, 3.0], [3.0, 4.0]]));
        assert!(square().intersect(&far).is_none());
        assert!(ConvexBody::interval(0.0, 1.0).intersect(&ConvexBody::interval(2.0, 3.0)).is_none());
    }

    #[test]
    fn mixed_area_with_itself_is_area() {
        assert!((mixed_area(&triangle(), &triangle()) - 0.5).abs() < 1e-14);
        // MV(square, triangle) = (area(S+T) - 1 - 1/2)/2 = (3.5 - 1.5)/2.
        assert!((mixed_area(&square(), &triangle()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn halfspace_clip() {
        let c = square().clip_halfspace(&[1.0, 1.0], 1.0).unwrap();
        assert!((c.volume() - 0.5).abs() < 1e-14);
        assert!(square().clip_halfspace(&[1.0, 0.0], -1.0).is_none());
        let i = ConvexBody::interval(0.0, 1.0).clip_halfspace(&[-2.0], -1.0).unwrap();
        assert_eq!(i, ConvexBody::interval(0.5, 1.0));
    }

    #[test]
    fn excess_signs() {
        assert!(triangle().excess(&[0.2, 0.2]) < 0.0);
        assert!((triangle().excess(&[1.0, 1.0]) - 0.5f64.sqrt()).abs() < 1e-14);
        let hs = triangle().halfspaces();
        assert_eq!(hs.len(), 3);
    }
}
