//! Exact convex polytopes in dimensions 1, 2 and 3 with cross-validated
//! vertex and facet descriptions.
//!
//! A 2-dimensional polytope keeps its vertices in counterclockwise order,
//! starting from the lexicographically smallest one; facets are its edges in
//! the same order. In dimension 3 vertices are sorted lexicographically and
//! facets by their canonical half-space.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};

use super::rational::*;
use super::simplex::Simplex;
use crate::error::{Error, Result};

/// Closed half-space `normal · x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfSpace {
    pub normal: Point,
    pub offset: Q,
}

impl HalfSpace {
    pub fn new(normal: Point, offset: Q) -> Self {
        Self { normal, offset }
    }

    /// Rescales so that the offset is in `{-1, 0, 1}`, or the largest normal
    /// coordinate is 1 in absolute value when the offset vanishes.
    pub fn canonical(&self) -> Self {
        if self.offset.is_zero() {
            Self::new(normalize_direction(&self.normal), Q::zero())
        } else {
            let s = Q::one() / self.offset.abs();
            Self::new(scale(&self.normal, &s), &self.offset * &s)
        }
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        &self.offset - dot(&self.normal, x)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        !self.slack(x).is_negative()
    }
}

/// A facet: supporting half-space plus the indices of the vertices on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub plane: HalfSpace,
    pub vertices: Vec<usize>,
}

/// Full-dimensional convex polytope in `R^d`, `d ∈ {1, 2, 3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
}

/// 2-dimensional [`Polytope`].
pub type Polygon = Polytope;
/// 3-dimensional [`Polytope`].
pub type Polytope3 = Polytope;

impl Polytope {
    /// Convex hull of a finite point set. Fails with `DegenerateInput` when
    /// the points do not span the ambient space.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::DegenerateInput("no points".into()))?;
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidInput("points of mixed dimension".into()));
        }
        let mut pts: Vec<Point> = points.to_vec();
        pts.sort();
        pts.dedup();
        match dim {
            1 => hull1(&pts),
            2 => hull2(&pts),
            3 => hull3(&pts),
            d => Err(Error::InvalidInput(format!("unsupported dimension {d}"))),
        }
    }

    /// Intersection of half-spaces. Fails with `Unbounded` when the
    /// intersection is not bounded and `DegenerateInput` when it is empty or
    /// lower dimensional.
    pub fn from_halfspaces(dim: usize, hs: &[HalfSpace]) -> Result<Self> {
        let verts = enumerate_vertices(dim, hs);
        let radius = verts
            .iter()
            .flat_map(|v| v.iter().map(|c| c.abs()))
            .max()
            .unwrap_or_else(Q::zero);
        let radius = q(2) * radius + Q::one();
        let mut boxed = hs.to_vec();
        for k in 0..dim {
            for s in [1, -1] {
                let mut n = vec![Q::zero(); dim];
                n[k] = q(s);
                boxed.push(HalfSpace::new(n, radius.clone()));
            }
        }
        let boxed_verts = enumerate_vertices(dim, &boxed);
        if boxed_verts.iter().any(|v| v.iter().any(|c| c.abs() == radius)) {
            return Err(Error::Unbounded);
        }
        if boxed_verts.is_empty() {
            return Err(Error::DegenerateInput("empty intersection".into()));
        }
        Self::hull(&boxed_verts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn halfspaces(&self) -> Vec<HalfSpace> {
        self.facets.iter().map(|f| f.plane.clone()).collect()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.facets.iter().all(|f| f.plane.contains(x))
    }

    pub fn contains_origin_in_interior(&self) -> bool {
        self.facets.iter().all(|f| f.plane.offset.is_positive())
    }

    /// True when the vertex set is invariant under `x ↦ -x`.
    pub fn is_centrally_symmetric(&self) -> bool {
        let set: BTreeSet<&Point> = self.vertices.iter().collect();
        self.vertices.iter().all(|v| set.contains(&neg(v)))
    }

    /// Polar body `{y : <x, y> <= 1 for all x}`; requires the origin in the interior.
    pub fn polar(&self) -> Result<Self> {
        if !self.contains_origin_in_interior() {
            return Err(Error::OriginNotInterior);
        }
        let pts: Vec<Point> = self
            .facets
            .iter()
            .map(|f| scale(&f.plane.normal, &(Q::one() / &f.plane.offset)))
            .collect();
        Self::hull(&pts)
    }

    /// Image under an invertible linear map.
    pub fn map_linear(&self, m: &[Vec<Q>]) -> Result<Self> {
        if det(m).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let pts: Vec<Point> = self.vertices.iter().map(|v| mat_vec(m, v)).collect();
        Self::hull(&pts)
    }

    /// Intersection with extra half-spaces.
    pub fn clip(&self, extra: &[HalfSpace]) -> Result<Self> {
        let mut hs = self.halfspaces();
        hs.extend_from_slice(extra);
        Self::from_halfspaces(self.dim, &hs)
    }

    /// Fan triangulation from the lexicographically smallest vertex.
    pub fn triangulate(&self) -> Vec<Simplex> {
        match self.dim {
            1 => vec![Simplex::new(self.vertices.clone())],
            2 => (1..self.vertices.len() - 1)
                .map(|i| {
                    Simplex::new(vec![
                        self.vertices[0].clone(),
                        self.vertices[i].clone(),
                        self.vertices[i + 1].clone(),
                    ])
                })
                .collect(),
            _ => {
                // vertices are sorted, so index 0 is the lexicographic minimum
                let apex = &self.vertices[0];
                let mut out = Vec::new();
                for f in &self.facets {
                    if f.vertices.contains(&0) {
                        continue;
                    }
                    let ring = &f.vertices;
                    for i in 1..ring.len() - 1 {
                        out.push(Simplex::new(vec![
                            apex.clone(),
                            self.vertices[ring[0]].clone(),
                            self.vertices[ring[i]].clone(),
                            self.vertices[ring[i + 1]].clone(),
                        ]));
                    }
                }
                out
            }
        }
    }

    pub fn volume(&self) -> Q {
        self.triangulate().iter().map(Simplex::volume).sum()
    }

    /// Projection onto the first `k` coordinates.
    pub fn project_prefix(&self, k: usize) -> Result<Self> {
        let pts: Vec<Point> = self.vertices.iter().map(|v| v[..k].to_vec()).collect();
        Self::hull(&pts)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for k in 0..self.dim {
                if v[k] < lo[k] {
                    lo[k] = v[k].clone();
                }
                if v[k] > hi[k] {
                    hi[k] = v[k].clone();
                }
            }
        }
        (lo, hi)
    }

    /// Axis-aligned cube `[-a, a]^d`.
    pub fn cube(dim: usize, a: &Q) -> Result<Self> {
        let mut pts = vec![Vec::new()];
        for _ in 0..dim {
            pts = pts
                .into_iter()
                .flat_map(|p: Point| {
                    let mut lo = p.clone();
                    lo.push(-a.clone());
                    let mut hi = p;
                    hi.push(a.clone());
                    [lo, hi]
                })
                .collect();
        }
        Self::hull(&pts)
    }

    /// Cross-polytope `conv{±a e_i}`.
    pub fn cross_polytope(dim: usize, a: &Q) -> Result<Self> {
        let mut pts = Vec::new();
        for k in 0..dim {
            for s in [a.clone(), -a.clone()] {
                let mut p = vec![Q::zero(); dim];
                p[k] = s;
                pts.push(p);
            }
        }
        Self::hull(&pts)
    }
}

fn enumerate_vertices(dim: usize, hs: &[HalfSpace]) -> Vec<Point> {
    let mut out = BTreeSet::new();
    if hs.len() < dim {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let a: Vec<Point> = idx.iter().map(|&i| hs[i].normal.clone()).collect();
        let b: Vec<Q> = idx.iter().map(|&i| hs[i].offset.clone()).collect();
        if let Some(x) = solve(&a, &b) {
            if hs.iter().all(|h| h.contains(&x)) {
                out.insert(x);
            }
        }
        if !next_combination(&mut idx, hs.len()) {
            return out.into_iter().collect();
        }
    }
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn hull1(pts: &[Point]) -> Result<Polytope> {
    if pts.len() < 2 {
        return Err(Error::DegenerateInput("fewer than 2 distinct points on the line".into()));
    }
    let lo = pts[0].clone();
    let hi = pts[pts.len() - 1].clone();
    let facets = vec![
        Facet {
            plane: HalfSpace::new(vec![-Q::one()], -lo[0].clone()).canonical(),
            vertices: vec![0],
        },
        Facet {
            plane: HalfSpace::new(vec![Q::one()], hi[0].clone()).canonical(),
            vertices: vec![1],
        },
    ];
    Ok(Polytope { dim: 1, vertices: vec![lo, hi], facets })
}

fn orient2(a: &[Q], b: &[Q], c: &[Q]) -> Q {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// Strictly convex counterclockwise hull of sorted, deduplicated 2D points,
/// starting at the lexicographically smallest point.
pub(crate) fn ccw_hull_2d(pts: &[Point]) -> Vec<usize> {
    if pts.len() < 3 {
        return (0..pts.len()).collect();
    }
    let mut lower: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while lower.len() >= 2
            && !orient2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i])
                .is_positive()
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for i in (0..pts.len()).rev() {
        while upper.len() >= 2
            && !orient2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i])
                .is_positive()
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn hull2(pts: &[Point]) -> Result<Polytope> {
    let ring = ccw_hull_2d(pts);
    if ring.len() < 3 {
        return Err(Error::DegenerateInput("planar points are collinear".into()));
    }
    let vertices: Vec<Point> = ring.iter().map(|&i| pts[i].clone()).collect();
    let k = vertices.len();
    let facets = (0..k)
        .map(|i| {
            let p = &vertices[i];
            let r = &vertices[(i + 1) % k];
            let normal = vec![&r[1] - &p[1], &p[0] - &r[0]];
            let offset = dot(&normal, p);
            Facet {
                plane: HalfSpace::new(normal, offset).canonical(),
                vertices: vec![i, (i + 1) % k],
            }
        })
        .collect();
    Ok(Polytope { dim: 2, vertices, facets })
}

fn orient3(a: &[Q], b: &[Q], c: &[Q], d: &[Q]) -> Q {
    let n = cross3(&sub(b, a), &sub(c, a));
    dot(&n, &sub(d, a))
}

fn hull3(pts: &[Point]) -> Result<Polytope> {
    let degenerate = || Error::DegenerateInput("points are coplanar".into());
    if pts.len() < 4 {
        return Err(degenerate());
    }
    // initial tetrahedron
    let i0 = 0;
    let i1 = 1;
    let i2 = (2..pts.len())
        .find(|&i| !is_zero_vec(&cross3(&sub(&pts[i1], &pts[i0]), &sub(&pts[i], &pts[i0]))))
        .ok_or_else(degenerate)?;
    let i3 = (2..pts.len())
        .find(|&i| !orient3(&pts[i0], &pts[i1], &pts[i2], &pts[i]).is_zero())
        .ok_or_else(degenerate)?;
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let o = orient3(&pts[i0], &pts[i1], &pts[i2], &pts[i3]);
    let (a, b, c, d) = if o.is_negative() { (i0, i1, i2, i3) } else { (i0, i2, i1, i3) };
    // orient every face so that d (resp. the opposite vertex) is behind it
    faces.push([a, b, c]);
    faces.push([a, d, b]);
    faces.push([b, d, c]);
    faces.push([c, d, a]);

    let visible = |f: &[usize; 3], p: &[Q]| orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], p).is_positive();

    for (pi, p) in pts.iter().enumerate() {
        if [i0, i1, i2, i3].contains(&pi) {
            continue;
        }
        let vis: Vec<bool> = faces.iter().map(|f| visible(f, p)).collect();
        if !vis.iter().any(|&v| v) {
            continue;
        }
        let mut directed: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (f, &v) in faces.iter().zip(&vis) {
            if v {
                directed.insert((f[0], f[1]));
                directed.insert((f[1], f[2]));
                directed.insert((f[2], f[0]));
            }
        }
        let horizon: Vec<(usize, usize)> = directed
            .iter()
            .filter(|(u, w)| !directed.contains(&(*w, *u)))
            .cloned()
            .collect();
        let mut next: Vec<[usize; 3]> =
            faces.iter().zip(&vis).filter(|(_, &v)| !v).map(|(f, _)| *f).collect();
        for (u, w) in horizon {
            next.push([u, w, pi]);
        }
        faces = next;
    }

    // merge coplanar triangles into facets
    let mut planes: BTreeMap<HalfSpace, BTreeSet<usize>> = BTreeMap::new();
    for f in &faces {
        let normal = cross3(&sub(&pts[f[1]], &pts[f[0]]), &sub(&pts[f[2]], &pts[f[0]]));
        let offset = dot(&normal, &pts[f[0]]);
        let plane = HalfSpace::new(normal, offset).canonical();
        planes.entry(plane).or_default().extend(f.iter().copied());
    }
    let mut count: HashMap<usize, usize> = HashMap::new();
    for set in planes.values() {
        for &i in set {
            *count.entry(i).or_default() += 1;
        }
    }
    let mut vertex_ids: Vec<usize> = count.iter().filter(|(_, &c)| c >= 3).map(|(&i, _)| i).collect();
    vertex_ids.sort_by(|a, b| pts[*a].cmp(&pts[*b]));
    let vertices: Vec<Point> = vertex_ids.iter().map(|&i| pts[i].clone()).collect();
    let index_of: HashMap<usize, usize> = vertex_ids.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    let mut facets = Vec::with_capacity(planes.len());
    for (plane, set) in planes {
        let on: Vec<usize> = set.iter().filter_map(|i| index_of.get(i).copied()).collect();
        let ring = order_facet(&vertices, &on, &plane.normal);
        facets.push(Facet { plane, vertices: ring });
    }
    Ok(Polytope { dim: 3, vertices, facets })
}

/// Orders the vertices of a 3D facet counterclockwise as seen from outside,
/// starting at the smallest index.
fn order_facet(vertices: &[Point], on: &[usize], normal: &[Q]) -> Vec<usize> {
    let k = (0..3).max_by(|&a, &b| normal[a].abs().cmp(&normal[b].abs())).unwrap_or(2);
    let (i, j) = match k {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut proj: Vec<(Point, usize)> =
        on.iter().map(|&v| (vec![vertices[v][i].clone(), vertices[v][j].clone()], v)).collect();
    proj.sort();
    let pts: Vec<Point> = proj.iter().map(|(p, _)| p.clone()).collect();
    let mut ring: Vec<usize> = ccw_hull_2d(&pts).into_iter().map(|x| proj[x].1).collect();
    if normal[k].is_negative() {
        ring.reverse();
    }
    if let Some(pos) = ring.iter().enumerate().min_by_key(|(_, &v)| v).map(|(p, _)| p) {
        ring.rotate_left(pos);
    }
    ring
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_hull_has_six_facets() {
        let c = Polytope::cube(3, &q(1)).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert!(c.facets().iter().all(|f| f.vertices.len() == 4));
        assert_eq!(c.volume(), q(8));
    }

    #[test]
    fn interior_point_is_absorbed() {
        let c = Polytope::cube(3, &q(1)).unwrap();
        let mut pts = c.vertices().to_vec();
        pts.push(pt(&[0, 0, 0]));
        pts.push(vec![qr(1, 2), q(1), q(0)]);
        assert_eq!(Polytope::hull(&pts).unwrap(), c);
    }

    #[test]
    fn coplanar_points_are_rejected() {
        let pts = vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[1, 1, 0])];
        assert!(matches!(Polytope::hull(&pts), Err(Error::DegenerateInput(_))));
        let line = vec![pt(&[0, 0]), pt(&[1, 1]), pt(&[2, 2])];
        assert!(matches!(Polytope::hull(&line), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn cube_polar_is_octahedron() {
        let c = Polytope::cube(3, &q(1)).unwrap();
        let o = c.polar().unwrap();
        assert_eq!(o, Polytope::cross_polytope(3, &q(1)).unwrap());
        assert_eq!(o.polar().unwrap(), c);
        assert_eq!(o.volume(), qr(4, 3));
    }

    #[test]
    fn square_polar_and_segment_polar() {
        let sq = Polytope::cube(2, &q(1)).unwrap();
        assert_eq!(sq.polar().unwrap(), Polytope::cross_polytope(2, &q(1)).unwrap());
        let seg = Polytope::cube(1, &q(3)).unwrap();
        assert_eq!(seg.polar().unwrap(), Polytope::cube(1, &qr(1, 3)).unwrap());
    }

    #[test]
    fn polar_requires_interior_origin() {
        let sq = Polytope::hull(&[pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])]).unwrap();
        assert_eq!(sq.polar(), Err(Error::OriginNotInterior));
    }

    #[test]
    fn halfspace_intersection() {
        let hs = vec![
            HalfSpace::new(pt(&[1, 0]), q(1)),
            HalfSpace::new(pt(&[-1, 0]), q(1)),
            HalfSpace::new(pt(&[0, 1]), q(1)),
            HalfSpace::new(pt(&[0, -1]), q(1)),
            HalfSpace::new(pt(&[1, 1]), q(5)),
        ];
        let p = Polytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p, Polytope::cube(2, &q(1)).unwrap());
        assert_eq!(Polytope::from_halfspaces(2, &hs[..3]), Err(Error::Unbounded));
        let empty = vec![HalfSpace::new(pt(&[1]), q(-1)), HalfSpace::new(pt(&[-1]), q(-1))];
        assert!(Polytope::from_halfspaces(1, &empty).is_err());
    }

    #[test]
    fn square_triangulates_into_two_triangles() {
        let sq = Polytope::cube(2, &q(1)).unwrap();
        let tri = sq.triangulate();
        assert_eq!(tri.len(), 2);
        assert_eq!(tri.iter().map(Simplex::volume).sum::<Q>(), q(4));
    }
}
