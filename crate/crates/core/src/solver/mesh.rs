//! Structured graded triangulations of disks (optionally punctured at a
//! boundary point) and bounded sectors, with exact boundary placement.
//!
//! The disk is parametrized in polar coordinates around the puncture point
//! `a`: with `sigma(alpha)` the unit direction at angle `alpha` from the
//! inward normal `-a/|a|`, the chord through the disk has length
//! `s_max(alpha) = 2R cos(alpha)`, so the domain is exactly the graph region
//! `{a + s sigma(alpha) : |alpha| < pi/2, 0 < s < 2R cos(alpha)}` and both
//! boundary circles are hit exactly by construction.  Quads are split along
//! the locally Delaunay diagonal and a Lawson flip pass finishes the job.

use super::SolverError;
use crate::linalg;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryTag {
    /// Outer domain boundary (the full circle, or the circle minus the cap
    /// cut away by a puncture).
    Outer,
    /// The arc of the puncture circle lying inside the disk.
    InnerArc,
    /// Sector edge along angle 0.
    RayLower,
    /// Sector edge along the opening angle.
    RayUpper,
    /// Sector arc at radius 1.
    Arc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub edge: [usize; 2],
    pub tag: BoundaryTag,
}

/// Triangulated planar domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Mesh2D {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
}

fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// `true` when `d` lies strictly inside the circumcircle of the CCW triangle
/// `(a, b, c)`.
fn in_circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let adx = a[0] - d[0];
    let ady = a[1] - d[1];
    let bdx = b[0] - d[0];
    let bdy = b[1] - d[1];
    let cdx = c[0] - d[0];
    let cdy = c[1] - d[1];
    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;
    let det = adx * (bdy * clift - cdy * blift) - ady * (bdx * clift - cdx * blift)
        + alift * (bdx * cdy - cdx * bdy);
    det > 1e-14
}

impl Mesh2D {
    pub fn node_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn tri_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        0.5 * orient2d(self.vertices[i], self.vertices[j], self.vertices[k])
    }

    /// Map from boundary node index to its tag.  When a node sits on two
    /// differently tagged pieces (a puncture corner), `Outer` wins: the outer
    /// boundary is the closed set in the decomposition, the inner arc the
    /// open one.
    pub fn boundary_nodes(&self) -> HashMap<usize, BoundaryTag> {
        let mut map: HashMap<usize, BoundaryTag> = HashMap::new();
        let precedence = |tag: BoundaryTag| match tag {
            BoundaryTag::Outer | BoundaryTag::RayLower | BoundaryTag::RayUpper => 1,
            BoundaryTag::InnerArc | BoundaryTag::Arc => 0,
        };
        for be in &self.boundary {
            for &v in &be.edge {
                match map.get(&v) {
                    Some(&old) if precedence(old) >= precedence(be.tag) => {}
                    _ => {
                        map.insert(v, be.tag);
                    }
                }
            }
        }
        map
    }

    /// Structural invariants: positive orientation, no duplicate vertices,
    /// every boundary edge in exactly one triangle.
    pub fn validate(&self) -> Result<(), SolverError> {
        for t in 0..self.triangles.len() {
            if self.triangle_area(t) <= 0.0 {
                return Err(SolverError::MeshGeneration(format!(
                    "triangle {t} has nonpositive orientation"
                )));
            }
        }
        // duplicate detection on a rounded grid (cheaper than all pairs)
        let mut seen: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let key = ((v[0] * 1e10).round() as i64, (v[1] * 1e10).round() as i64);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(close) = seen.get(&(key.0 + dx, key.1 + dy)) {
                        for &j in close {
                            if linalg::dist(&self.vertices[j], v) < 1e-12 {
                                return Err(SolverError::MeshGeneration(format!(
                                    "vertices {j} and {i} coincide"
                                )));
                            }
                        }
                    }
                }
            }
            seen.entry(key).or_default().push(i);
        }
        let edge_count = self.edge_triangle_count();
        for be in &self.boundary {
            let key = sorted_edge(be.edge[0], be.edge[1]);
            match edge_count.get(&key) {
                Some(1) => {}
                other => {
                    return Err(SolverError::MeshGeneration(format!(
                        "boundary edge {:?} belongs to {:?} triangles",
                        be.edge, other
                    )));
                }
            }
        }
        Ok(())
    }

    fn edge_triangle_count(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                let key = sorted_edge(t[e], t[(e + 1) % 3]);
                *map.entry(key).or_insert(0) += 1;
            }
        }
        map
    }
}

fn sorted_edge(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Graded radial subdivision of `[start, end]`: local spacing is
/// proportional to the distance from zero, clamped to `[h/8, h]`, and the
/// endpoints are hit exactly.
fn graded_radii(start: f64, end: f64, h: f64) -> Vec<f64> {
    let mut out = vec![start];
    let mut s = start;
    while s < end {
        let step = (0.5 * s.max(h / 8.0)).clamp(h / 8.0, h);
        s += step;
        out.push(s.min(end));
    }
    // merge a too-short trailing interval into its predecessor
    let n = out.len();
    if n >= 3 && out[n - 1] - out[n - 2] < 0.25 * (out[n - 2] - out[n - 3]) {
        out.remove(n - 2);
    }
    *out.last_mut().unwrap() = end;
    out
}

/// Split the quad `(v00, v10, v11, v01)` (CCW) into two triangles along the
/// locally Delaunay diagonal.
fn split_quad(
    vertices: &[[f64; 2]],
    v00: usize,
    v10: usize,
    v11: usize,
    v01: usize,
    triangles: &mut Vec<[usize; 3]>,
) {
    // diagonal v00-v11 vs v10-v01: pick by the in-circle criterion
    let a = vertices[v00];
    let b = vertices[v10];
    let c = vertices[v11];
    let d = vertices[v01];
    if in_circumcircle(a, b, c, d) {
        triangles.push([v00, v10, v01]);
        triangles.push([v10, v11, v01]);
    } else {
        triangles.push([v00, v10, v11]);
        triangles.push([v00, v11, v01]);
    }
}

/// Lawson flip pass: flips interior edges until the triangulation is
/// (constrained) Delaunay.  Boundary edges are never flipped.
fn delaunay_flip(mesh: &mut Mesh2D) {
    let boundary: std::collections::HashSet<(usize, usize)> =
        mesh.boundary.iter().map(|be| sorted_edge(be.edge[0], be.edge[1])).collect();
    // edge -> (triangle, local edge index) incidences
    let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for e in 0..3 {
            edge_map.entry(sorted_edge(tri[e], tri[(e + 1) % 3])).or_default().push(t);
        }
    }
    let mut queue: Vec<(usize, usize)> = edge_map
        .iter()
        .filter(|(k, v)| v.len() == 2 && !boundary.contains(k))
        .map(|(k, _)| *k)
        .collect();
    queue.sort_unstable();
    let max_flips = 20 * mesh.triangles.len();
    let mut flips = 0;
    while let Some(key) = queue.pop() {
        let Some(ts) = edge_map.get(&key) else { continue };
        if ts.len() != 2 || boundary.contains(&key) {
            continue;
        }
        let (t1, t2) = (ts[0], ts[1]);
        let tri1 = mesh.triangles[t1];
        let tri2 = mesh.triangles[t2];
        let (u, v) = key;
        let c = *tri1.iter().find(|&&x| x != u && x != v).unwrap();
        let d = *tri2.iter().find(|&&x| x != u && x != v).unwrap();
        if c == d {
            continue;
        }
        // orient tri1 as (u', v', c) CCW
        let (uu, vv) = {
            let pos = tri1.iter().position(|&x| x == c).unwrap();
            (tri1[(pos + 1) % 3], tri1[(pos + 2) % 3])
        };
        if !in_circumcircle(mesh.vertices[uu], mesh.vertices[vv], mesh.vertices[c], mesh.vertices[d])
        {
            continue;
        }
        // the flip is valid only if the quad (uu, d, vv, c) is convex
        let quad_ok = orient2d(mesh.vertices[uu], mesh.vertices[d], mesh.vertices[c]) > 0.0
            && orient2d(mesh.vertices[d], mesh.vertices[vv], mesh.vertices[c]) > 0.0;
        if !quad_ok {
            continue;
        }
        // replace (uu,vv,c) and (vv,uu,d) with (uu,d,c) and (d,vv,c)
        let new1 = [uu, d, c];
        let new2 = [d, vv, c];
        for (old_t, new_tri) in [(t1, new1), (t2, new2)] {
            let old_tri = mesh.triangles[old_t];
            for e in 0..3 {
                let k = sorted_edge(old_tri[e], old_tri[(e + 1) % 3]);
                if let Some(list) = edge_map.get_mut(&k) {
                    list.retain(|&x| x != old_t);
                }
            }
            mesh.triangles[old_t] = new_tri;
            for e in 0..3 {
                let k = sorted_edge(new_tri[e], new_tri[(e + 1) % 3]);
                edge_map.entry(k).or_default().push(old_t);
                if !boundary.contains(&k) {
                    queue.push(k);
                }
            }
        }
        flips += 1;
        if flips > max_flips {
            break;
        }
    }
}

/// Triangulate the disk of the given radius centered at the origin, graded
/// toward the boundary point `a`, optionally punctured by the ball of radius
/// `epsilon` around `a`.  Boundary vertices land exactly on the circles.
///
/// The unpunctured disk reuses the punctured construction with a synthetic
/// hole of radius `h/8` around `a`, closed by a vertex fan at `a` itself.
pub fn mesh_disk(
    radius: f64,
    a: &[f64],
    epsilon: Option<f64>,
    h: f64,
) -> Result<Mesh2D, SolverError> {
    if !(radius > 0.0) || !(h > 0.0) || h > radius {
        return Err(SolverError::MeshGeneration(format!(
            "invalid disk parameters: radius {radius}, h {h}"
        )));
    }
    if a.len() != 2 || (linalg::norm(a) - radius).abs() > 1e-9 {
        return Err(SolverError::MeshGeneration(format!(
            "point {a:?} is not on the circle of radius {radius}"
        )));
    }
    if let Some(eps) = epsilon {
        if !(eps > 0.0 && eps < radius) {
            return Err(SolverError::MeshGeneration(format!(
                "puncture radius {eps} outside (0, {radius})"
            )));
        }
    }
    // snap a to the circle
    let a = {
        let n = linalg::norm(a);
        [a[0] * radius / n, a[1] * radius / n]
    };
    let inward = [-a[0] / radius, -a[1] / radius];
    let tangent = [-inward[1], inward[0]];
    let sigma = |alpha: f64| {
        [
            inward[0] * alpha.cos() + tangent[0] * alpha.sin(),
            inward[1] * alpha.cos() + tangent[1] * alpha.sin(),
        ]
    };
    let point_at = |alpha: f64, s: f64| {
        let d = sigma(alpha);
        [a[0] + s * d[0], a[1] + s * d[1]]
    };
    let punctured = epsilon.is_some();
    let eps = epsilon.unwrap_or(h / 8.0);
    let alpha_c = (eps / (2.0 * radius)).acos();
    let n_alpha = (((2.0 * alpha_c * 2.0 * radius) / h).ceil() as usize + 1).max(4);
    let radial = graded_radii(eps, 2.0 * radius, h);
    let fractions: Vec<f64> = radial.iter().map(|s| (s - eps) / (2.0 * radius - eps)).collect();
    let m = fractions.len() - 1;

    let mut mesh = Mesh2D { vertices: Vec::new(), triangles: Vec::new(), boundary: Vec::new() };

    // corner vertices where the puncture circle meets the outer circle
    mesh.vertices.push(point_at(-alpha_c, eps));
    mesh.vertices.push(point_at(alpha_c, eps));
    let (left_id, right_id) = (0, 1);

    // full columns for interior angles
    let mut column_ids: Vec<Vec<usize>> = Vec::new();
    for i in 1..n_alpha {
        let alpha = -alpha_c + 2.0 * alpha_c * i as f64 / n_alpha as f64;
        let s_max = 2.0 * radius * alpha.cos();
        let mut ids = Vec::with_capacity(m + 1);
        for j in 0..=m {
            // fractions run 0 -> 1, putting the extreme nodes exactly on the
            // puncture circle and the outer circle
            let s = eps + fractions[j] * (s_max - eps);
            ids.push(mesh.vertices.len());
            mesh.vertices.push(point_at(alpha, s));
        }
        column_ids.push(ids);
    }

    // fans at the corners
    let first = column_ids[0].clone();
    let last = column_ids.last().unwrap().clone();
    for j in 0..first.len() - 1 {
        mesh.triangles.push([left_id, first[j], first[j + 1]]);
    }
    for j in 0..last.len() - 1 {
        mesh.triangles.push([right_id, last[j + 1], last[j]]);
    }
    // quads between consecutive columns
    for c in 0..column_ids.len() - 1 {
        let col_a = &column_ids[c];
        let col_b = &column_ids[c + 1];
        for j in 0..col_a.len() - 1 {
            split_quad(
                &mesh.vertices,
                col_a[j],
                col_b[j],
                col_b[j + 1],
                col_a[j + 1],
                &mut mesh.triangles,
            );
        }
    }

    // boundary chains: outer circle along column tops, puncture circle along
    // column bottoms
    let tops: Vec<usize> = std::iter::once(left_id)
        .chain(column_ids.iter().map(|c| *c.last().unwrap()))
        .chain(std::iter::once(right_id))
        .collect();
    for w in tops.windows(2) {
        mesh.boundary.push(BoundaryEdge { edge: [w[0], w[1]], tag: BoundaryTag::Outer });
    }
    let bottoms: Vec<usize> = std::iter::once(left_id)
        .chain(column_ids.iter().map(|c| c[0]))
        .chain(std::iter::once(right_id))
        .collect();
    if punctured {
        for w in bottoms.windows(2) {
            mesh.boundary.push(BoundaryEdge { edge: [w[0], w[1]], tag: BoundaryTag::InnerArc });
        }
    } else {
        // close the synthetic hole with a fan from a; the outer circle then
        // runs through a between the two corners
        let apex = mesh.vertices.len();
        mesh.vertices.push(a);
        for w in bottoms.windows(2) {
            mesh.triangles.push([apex, w[1], w[0]]);
        }
        mesh.boundary.push(BoundaryEdge { edge: [right_id, apex], tag: BoundaryTag::Outer });
        mesh.boundary.push(BoundaryEdge { edge: [apex, left_id], tag: BoundaryTag::Outer });
    }

    fix_orientation(&mut mesh);
    delaunay_flip(&mut mesh);
    mesh.validate()?;
    Ok(mesh)
}

fn fix_orientation(mesh: &mut Mesh2D) {
    for t in 0..mesh.triangles.len() {
        if mesh.triangle_area(t) < 0.0 {
            mesh.triangles[t].swap(1, 2);
        }
    }
}

/// Triangulate the sector `{0 < phi < angle, r < 1}` with radial grading
/// toward the corner at the origin.
pub fn mesh_sector(angle: f64, h: f64) -> Result<Mesh2D, SolverError> {
    if !(angle > 0.0 && angle <= std::f64::consts::PI) {
        return Err(SolverError::MeshGeneration(format!("sector angle {angle} outside (0, pi]")));
    }
    if !(h > 0.0 && h < 0.5) {
        return Err(SolverError::MeshGeneration(format!("invalid target size {h}")));
    }
    let radial = graded_radii(0.0, 1.0, h);
    let n_phi = ((angle / h).ceil() as usize).max(2);
    let mut mesh = Mesh2D { vertices: Vec::new(), triangles: Vec::new(), boundary: Vec::new() };
    mesh.vertices.push([0.0, 0.0]);
    let mut rings: Vec<Vec<usize>> = Vec::new();
    for &r in &radial[1..] {
        let mut ring = Vec::with_capacity(n_phi + 1);
        for u in 0..=n_phi {
            let phi = angle * u as f64 / n_phi as f64;
            ring.push(mesh.vertices.len());
            mesh.vertices.push([r * phi.cos(), r * phi.sin()]);
        }
        rings.push(ring);
    }
    // fan at the origin
    for u in 0..n_phi {
        mesh.triangles.push([0, rings[0][u], rings[0][u + 1]]);
    }
    for w in rings.windows(2) {
        let (inner, outer) = (&w[0], &w[1]);
        for u in 0..n_phi {
            split_quad(&mesh.vertices, inner[u], outer[u], outer[u + 1], inner[u + 1], &mut mesh.triangles);
        }
    }
    // boundary: lower ray, arc, upper ray
    let lower: Vec<usize> =
        std::iter::once(0).chain(rings.iter().map(|r| r[0])).collect();
    for w in lower.windows(2) {
        mesh.boundary.push(BoundaryEdge { edge: [w[0], w[1]], tag: BoundaryTag::RayLower });
    }
    let upper: Vec<usize> =
        std::iter::once(0).chain(rings.iter().map(|r| r[n_phi])).collect();
    for w in upper.windows(2) {
        mesh.boundary.push(BoundaryEdge { edge: [w[0], w[1]], tag: BoundaryTag::RayUpper });
    }
    let arc = rings.last().unwrap();
    for w in arc.windows(2) {
        mesh.boundary.push(BoundaryEdge { edge: [w[0], w[1]], tag: BoundaryTag::Arc });
    }
    fix_orientation(&mut mesh);
    delaunay_flip(&mut mesh);
    mesh.validate()?;
    Ok(mesh)
}

/// Point location by triangle walking with a brute-force fallback; returns
/// the containing triangle and the barycentric coordinates.  On edges the
/// lowest triangle index wins.  Owns its mesh so it can be cached alongside
/// nodal data and shared across threads.
pub struct Locator {
    mesh: std::sync::Arc<Mesh2D>,
    neighbors: Vec<[Option<usize>; 3]>,
    last: std::sync::atomic::AtomicUsize,
}

impl Locator {
    pub fn new(mesh: std::sync::Arc<Mesh2D>) -> Self {
        let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for e in 0..3 {
                edge_map.entry(sorted_edge(tri[e], tri[(e + 1) % 3])).or_default().push(t);
            }
        }
        let mut neighbors = vec![[None; 3]; mesh.triangles.len()];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for e in 0..3 {
                let key = sorted_edge(tri[e], tri[(e + 1) % 3]);
                if let Some(list) = edge_map.get(&key) {
                    for &other in list {
                        if other != t {
                            neighbors[t][e] = Some(other);
                        }
                    }
                }
            }
        }
        Self { mesh, neighbors, last: std::sync::atomic::AtomicUsize::new(0) }
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    fn barycentric(&self, t: usize, x: &[f64; 2]) -> [f64; 3] {
        let [i, j, k] = self.mesh.triangles[t];
        let a = self.mesh.vertices[i];
        let b = self.mesh.vertices[j];
        let c = self.mesh.vertices[k];
        let area = orient2d(a, b, c);
        [
            orient2d(*x, b, c) / area,
            orient2d(a, *x, c) / area,
            orient2d(a, b, *x) / area,
        ]
    }

    /// Containing triangle and barycentric coordinates of `x`.
    pub fn locate(&self, x: &[f64; 2]) -> Result<(usize, [f64; 3]), SolverError> {
        use std::sync::atomic::Ordering;
        const TOL: f64 = 1e-12;
        let mut t = self.last.load(Ordering::Relaxed).min(self.mesh.triangles.len() - 1);
        for _ in 0..4 * self.mesh.triangles.len() {
            let bc = self.barycentric(t, x);
            let (worst, &min) =
                bc.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
            if min >= -TOL {
                let t_final = self.resolve_ties(t, x, &bc);
                self.last.store(t_final, Ordering::Relaxed);
                return Ok((t_final, self.barycentric(t_final, x)));
            }
            // edge e of the triangle is (v_e, v_{e+1}), opposite vertex e+2:
            // a negative coordinate `worst` means x is beyond the edge not
            // containing vertex `worst`
            let edge_index = (worst + 1) % 3;
            match self.neighbors[t][edge_index] {
                Some(next) => t = next,
                None => break,
            }
        }
        // brute force in index order (also the deterministic tie-break)
        for t in 0..self.mesh.triangles.len() {
            let bc = self.barycentric(t, x);
            if bc.iter().all(|&b| b >= -TOL) {
                self.last.store(t, Ordering::Relaxed);
                return Ok((t, bc));
            }
        }
        Err(SolverError::PointLocation(vec![x[0], x[1]]))
    }

    /// If `x` sits on an edge of `t`, the neighbor across it may have a
    /// lower index; deterministic outputs pick the lowest.
    fn resolve_ties(&self, t: usize, x: &[f64; 2], bc: &[f64; 3]) -> usize {
        const TOL: f64 = 1e-12;
        let mut best = t;
        for (v, &b) in bc.iter().enumerate() {
            if b.abs() <= TOL {
                let edge_index = (v + 1) % 3;
                if let Some(other) = self.neighbors[t][edge_index] {
                    if other < best {
                        let obc = self.barycentric(other, x);
                        if obc.iter().all(|&ob| ob >= -TOL) {
                            best = other;
                        }
                    }
                }
            }
        }
        best
    }

    /// Barycentric interpolation of nodal values and the P1 gradient at `x`.
    pub fn interpolate(&self, values: &[f64], x: &[f64; 2]) -> Result<(f64, [f64; 2]), SolverError> {
        if values.len() != self.mesh.vertices.len() {
            return Err(SolverError::InvalidProblem(format!(
                "value vector length {} does not match vertex count {}",
                values.len(),
                self.mesh.vertices.len()
            )));
        }
        let (t, bc) = self.locate(x)?;
        let [i, j, k] = self.mesh.triangles[t];
        let val = bc[0] * values[i] + bc[1] * values[j] + bc[2] * values[k];
        let grads = p1_gradients(&self.mesh, t);
        let mut g = [0.0, 0.0];
        for (node, gl) in [i, j, k].into_iter().zip(grads) {
            g[0] += values[node] * gl[0];
            g[1] += values[node] * gl[1];
        }
        Ok((val, g))
    }
}

/// Barycentric interpolation of nodal values at `x`; convenience alias for
/// [`Locator::interpolate`].
pub fn interpolate(
    locator: &Locator,
    values: &[f64],
    x: &[f64; 2],
) -> Result<(f64, [f64; 2]), SolverError> {
    locator.interpolate(values, x)
}

/// Gradients of the three barycentric basis functions on triangle `t`.
pub fn p1_gradients(mesh: &Mesh2D, t: usize) -> [[f64; 2]; 3] {
    let [i, j, k] = mesh.triangles[t];
    let a = mesh.vertices[i];
    let b = mesh.vertices[j];
    let c = mesh.vertices[k];
    let det = orient2d(a, b, c);
    [
        [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
        [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
    ]
}
