//! Conforming triangulations with derived edge topology, boundary tags and
//! longest-edge bisection.
//!
//! Edges are numbered in lexicographic order of their sorted vertex pair, so
//! "lowest edge index" and "smallest vertex pair" coincide. Every edge carries
//! a fixed unit normal `n_e`: the outward normal of its first adjacent
//! triangle `K+`, which is the adjacent triangle with the smaller index.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

impl BoundaryTag {
    pub fn code(self) -> char {
        match self {
            BoundaryTag::Dirichlet => 'D',
            BoundaryTag::Neumann => 'N',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, sorted ascending.
    pub vertices: [usize; 2],
    /// The orientation-defining triangle `K+` (smaller index).
    pub plus: usize,
    /// The second triangle `K-`; `None` on the boundary.
    pub minus: Option<usize>,
    /// `None` for interior edges.
    pub tag: Option<BoundaryTag>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    generation: Vec<u32>,
    edges: Vec<Edge>,
    /// Local edge `k` of a triangle is the side opposite local vertex `k`.
    tri_edges: Vec<[usize; 3]>,
    areas: Vec<f64>,
    diameters: Vec<f64>,
    edge_lengths: Vec<f64>,
    edge_normals: Vec<[f64; 2]>,
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

fn dist2(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
}

fn midpoint(p: Point, q: Point) -> Point {
    [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
}

impl Mesh {
    /// Builds a mesh from raw connectivity, tagging every boundary edge with
    /// `classify(midpoint)`.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        classify: impl Fn(Point) -> BoundaryTag,
    ) -> Result<Self> {
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &triangles {
            for k in 0..3 {
                *count.entry(sorted_pair(t[(k + 1) % 3], t[(k + 2) % 3])).or_default() += 1;
            }
        }
        let mut tags = HashMap::new();
        for (&(a, b), &c) in &count {
            if c == 1 {
                let (pa, pb) = match (vertices.get(a), vertices.get(b)) {
                    (Some(pa), Some(pb)) => (*pa, *pb),
                    _ => return Err(Error::InvalidMesh(format!("vertex index out of range in edge ({a}, {b})"))),
                };
                tags.insert((a, b), classify(midpoint(pa, pb)));
            }
        }
        let generation = vec![0; triangles.len()];
        Self::from_parts(vertices, triangles, generation, &tags)
    }

    /// `n × n` grid of squares over `[lo, hi]`, each halved by the diagonal
    /// from its bottom-right to its top-left corner.
    pub fn square(lo: Point, hi: Point, n: usize, classify: impl Fn(Point) -> BoundaryTag) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one subdivision per side".into()));
        }
        let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
        if !(w > 0.0 && h > 0.0) || !w.is_finite() || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("degenerate domain {lo:?} .. {hi:?}")));
        }
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([lo[0] + w * i as f64 / n as f64, lo[1] + h * j as f64 / n as f64]);
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (bl, br, tr, tl) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([bl, br, tl]);
                triangles.push([br, tr, tl]);
            }
        }
        Self::new(vertices, triangles, classify)
    }

    fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        generation: Vec<u32>,
        tags: &HashMap<(usize, usize), BoundaryTag>,
    ) -> Result<Self> {
        let nv = vertices.len();
        let mut areas = Vec::with_capacity(triangles.len());
        let mut diameters = Vec::with_capacity(triangles.len());
        let mut adjacency: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let [p, q, r] = tri.map(|v| vertices[v]);
            let area = signed_area(p, q, r);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!("triangle {t} has non-positive signed area {area:e}")));
            }
            areas.push(area);
            diameters.push(dist2(p, q).max(dist2(q, r)).max(dist2(r, p)).sqrt());
            for k in 0..3 {
                adjacency.entry(sorted_pair(tri[(k + 1) % 3], tri[(k + 2) % 3])).or_default().push(t);
            }
        }

        let mut edges = Vec::with_capacity(adjacency.len());
        let mut index = HashMap::with_capacity(adjacency.len());
        let mut has_dirichlet = false;
        for (&(a, b), tris) in &adjacency {
            let edge = match tris.as_slice() {
                [t] => {
                    let tag = *tags.get(&(a, b)).ok_or_else(|| {
                        Error::InvalidMesh(format!("boundary edge ({a}, {b}) has no tag; mesh is not conforming"))
                    })?;
                    has_dirichlet |= tag == BoundaryTag::Dirichlet;
                    Edge { vertices: [a, b], plus: *t, minus: None, tag: Some(tag) }
                }
                [t0, t1] => Edge { vertices: [a, b], plus: *t0.min(t1), minus: Some(*t0.max(t1)), tag: None },
                _ => {
                    return Err(Error::InvalidMesh(format!("edge ({a}, {b}) is shared by {} triangles", tris.len())))
                }
            };
            index.insert((a, b), edges.len());
            edges.push(edge);
        }
        if !has_dirichlet {
            return Err(Error::InvalidMesh("the Dirichlet boundary is empty".into()));
        }

        let tri_edges: Vec<[usize; 3]> = triangles
            .iter()
            .map(|tri| std::array::from_fn(|k| index[&sorted_pair(tri[(k + 1) % 3], tri[(k + 2) % 3])]))
            .collect();

        let mut edge_lengths = Vec::with_capacity(edges.len());
        let mut edge_normals = Vec::with_capacity(edges.len());
        for (e, edge) in edges.iter().enumerate() {
            let [a, b] = edge.vertices.map(|v| vertices[v]);
            let len = dist2(a, b).sqrt();
            let mut n = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
            // Opposite vertex of K+ must lie on the negative side of n.
            let k = tri_edges[edge.plus].iter().position(|&x| x == e).unwrap();
            let c = vertices[triangles[edge.plus][k]];
            if (c[0] - a[0]) * n[0] + (c[1] - a[1]) * n[1] > 0.0 {
                n = [-n[0], -n[1]];
            }
            edge_lengths.push(len);
            edge_normals.push(n);
        }

        Ok(Self { vertices, triangles, generation, edges, tri_edges, areas, diameters, edge_lengths, edge_normals })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    /// Refinement depth of each triangle.
    pub fn generation(&self, t: usize) -> u32 {
        self.generation[t]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Global edge indices of triangle `t`; entry `k` is opposite local vertex `k`.
    pub fn tri_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    /// `+1` when `t` is the orientation-defining triangle of its local edge `k`,
    /// so `n_e` is outward for `t`; `-1` otherwise.
    pub fn edge_sign(&self, t: usize, k: usize) -> f64 {
        if self.edges[self.tri_edges[t][k]].plus == t {
            1.0
        } else {
            -1.0
        }
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    /// `h_K`: the longest side of `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    /// `h_e`.
    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_lengths[e]
    }

    /// Unit normal `n_e`, outward for `K+`.
    pub fn edge_normal(&self, e: usize) -> [f64; 2] {
        self.edge_normals[e]
    }

    pub fn edge_points(&self, e: usize) -> [Point; 2] {
        self.edges[e].vertices.map(|v| self.vertices[v])
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edge_points(e);
        midpoint(a, b)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [p, q, r] = self.triangle_points(t);
        [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0]
    }

    /// Maps barycentric coordinates on triangle `t` to a physical point.
    pub fn map_point(&self, t: usize, bary: [f64; 3]) -> Point {
        let [p, q, r] = self.triangle_points(t);
        [
            bary[0] * p[0] + bary[1] * q[0] + bary[2] * r[0],
            bary[0] * p[1] + bary[1] * q[1] + bary[2] * r[1],
        ]
    }

    /// Barycentric coordinates of `x` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, x: Point) -> [f64; 3] {
        let [p, q, r] = self.triangle_points(t);
        let area = self.areas[t];
        let l1 = signed_area(p, x, r) / area;
        let l2 = signed_area(p, q, x) / area;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Constant gradients of the three barycentric coordinate functions.
    pub fn barycentric_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [p, q, r] = self.triangle_points(t);
        let two_area = 2.0 * self.areas[t];
        [
            [(q[1] - r[1]) / two_area, (r[0] - q[0]) / two_area],
            [(r[1] - p[1]) / two_area, (p[0] - r[0]) / two_area],
            [(p[1] - q[1]) / two_area, (q[0] - p[0]) / two_area],
        ]
    }

    pub fn h_max(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.diameters.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_degrees(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| {
                let p = self.triangle_points(t);
                (0..3)
                    .map(|k| {
                        let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                        let u = [b[0] - a[0], b[1] - a[1]];
                        let v = [c[0] - a[0], c[1] - a[1]];
                        let cos = (u[0] * v[0] + u[1] * v[1]) / (dist2(a, b).sqrt() * dist2(a, c).sqrt());
                        cos.clamp(-1.0, 1.0).acos().to_degrees()
                    })
                    .fold(180.0, f64::min)
            })
            .fold(180.0, f64::min)
    }

    pub fn boundary_tags(&self) -> HashMap<(usize, usize), BoundaryTag> {
        self.edges
            .iter()
            .filter_map(|e| e.tag.map(|tag| ((e.vertices[0], e.vertices[1]), tag)))
            .collect()
    }

    /// Longest-edge (Rivara) refinement. Every marked triangle is bisected at
    /// least once through the midpoint of its longest edge; neighbours are
    /// bisected along their own longest-edge propagation path until the mesh
    /// is conforming again.
    pub fn refine(&self, marked: &[usize]) -> Result<Mesh> {
        Ok(self.refine_tracked(marked)?.0)
    }

    /// [`Mesh::refine`], also returning for each new triangle the index of
    /// the triangle of `self` that contains it.
    pub fn refine_tracked(&self, marked: &[usize]) -> Result<(Mesh, Vec<usize>)> {
        if let Some(&t) = marked.iter().find(|&&t| t >= self.n_triangles()) {
            return Err(Error::InvalidArgument(format!("marked triangle {t} out of range")));
        }
        let mut work = Bisector::new(self);
        let mut order = marked.to_vec();
        order.sort_unstable();
        order.dedup();
        for t in order {
            if work.original[t] {
                work.refine_triangle(t);
            }
        }
        let mesh = Mesh::from_parts(work.vertices, work.triangles, work.generation, &work.tags)?;
        Ok((mesh, work.parent))
    }

    /// Bisects every triangle twice, which halves all diameters on meshes built
    /// by [`Mesh::square`].
    pub fn uniform_refine(&self) -> Result<Mesh> {
        let all: Vec<usize> = (0..self.n_triangles()).collect();
        let once = self.refine(&all)?;
        let all: Vec<usize> = (0..once.n_triangles()).collect();
        once.refine(&all)
    }

    /// Every interior edge has two incident triangles and every boundary edge
    /// is tagged. Holds by construction; exposed for tests.
    pub fn is_conforming(&self) -> bool {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *count.entry(sorted_pair(t[(k + 1) % 3], t[(k + 2) % 3])).or_default() += 1;
            }
        }
        self.edges.iter().all(|e| {
            let c = count[&(e.vertices[0], e.vertices[1])];
            (c == 2 && e.minus.is_some() && e.tag.is_none()) || (c == 1 && e.minus.is_none() && e.tag.is_some())
        }) && count.len() == self.edges.len()
    }
}

/// Mutable working state for longest-edge bisection.
struct Bisector {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    generation: Vec<u32>,
    original: Vec<bool>,
    parent: Vec<usize>,
    adjacency: HashMap<(usize, usize), Vec<usize>>,
    midpoints: HashMap<(usize, usize), usize>,
    tags: HashMap<(usize, usize), BoundaryTag>,
}

impl Bisector {
    fn new(mesh: &Mesh) -> Self {
        let mut adjacency: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                adjacency.entry(sorted_pair(tri[(k + 1) % 3], tri[(k + 2) % 3])).or_default().push(t);
            }
        }
        Self {
            vertices: mesh.vertices.clone(),
            triangles: mesh.triangles.clone(),
            generation: mesh.generation.clone(),
            original: vec![true; mesh.n_triangles()],
            parent: (0..mesh.n_triangles()).collect(),
            adjacency,
            midpoints: HashMap::new(),
            tags: mesh.boundary_tags(),
        }
    }

    /// Local index `k` of the longest edge (opposite vertex `k`). Ties within a
    /// relative 1e-12 go to the lexicographically smallest vertex pair.
    fn longest_edge(&self, t: usize) -> usize {
        let tri = self.triangles[t];
        let mut best = 0;
        let mut best_len = -1.0;
        let mut best_key = (usize::MAX, usize::MAX);
        for k in 0..3 {
            let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let len = dist2(self.vertices[a], self.vertices[b]);
            let key = sorted_pair(a, b);
            let tie = (len - best_len).abs() <= 1e-12 * len.max(best_len);
            if (tie && key < best_key) || (!tie && len > best_len) {
                best = k;
                best_len = len;
                best_key = key;
            }
        }
        best
    }

    fn edge_key(&self, t: usize, k: usize) -> (usize, usize) {
        let tri = self.triangles[t];
        sorted_pair(tri[(k + 1) % 3], tri[(k + 2) % 3])
    }

    fn neighbour(&self, t: usize, key: (usize, usize)) -> Option<usize> {
        self.adjacency[&key].iter().copied().find(|&s| s != t)
    }

    fn detach(&mut self, t: usize) {
        let tri = self.triangles[t];
        for k in 0..3 {
            let key = sorted_pair(tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let list = self.adjacency.get_mut(&key).unwrap();
            list.retain(|&s| s != t);
            if list.is_empty() {
                self.adjacency.remove(&key);
            }
        }
    }

    fn attach(&mut self, t: usize) {
        let tri = self.triangles[t];
        for k in 0..3 {
            self.adjacency.entry(sorted_pair(tri[(k + 1) % 3], tri[(k + 2) % 3])).or_default().push(t);
        }
    }

    fn midpoint_of(&mut self, key: (usize, usize)) -> usize {
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let m = self.vertices.len();
        self.vertices.push(midpoint(self.vertices[key.0], self.vertices[key.1]));
        self.midpoints.insert(key, m);
        if let Some(tag) = self.tags.remove(&key) {
            self.tags.insert(sorted_pair(key.0, m), tag);
            self.tags.insert(sorted_pair(m, key.1), tag);
        }
        m
    }

    /// Splits `t` through the midpoint of its local edge `k`. The first child
    /// keeps slot `t`, the second is appended.
    fn bisect(&mut self, t: usize, k: usize) {
        let tri = self.triangles[t];
        let (a, b, c) = (tri[(k + 1) % 3], tri[(k + 2) % 3], tri[k]);
        let m = self.midpoint_of(sorted_pair(a, b));
        self.detach(t);
        let g = self.generation[t] + 1;
        self.triangles[t] = [a, m, c];
        self.generation[t] = g;
        self.original[t] = false;
        let s = self.triangles.len();
        self.triangles.push([m, b, c]);
        self.generation.push(g);
        self.original.push(false);
        self.parent.push(self.parent[t]);
        self.attach(t);
        self.attach(s);
    }

    fn refine_triangle(&mut self, t: usize) {
        let k = self.longest_edge(t);
        let key = self.edge_key(t, k);
        loop {
            match self.neighbour(t, key) {
                None => {
                    self.bisect(t, k);
                    return;
                }
                Some(n) => {
                    let kn = self.longest_edge(n);
                    if self.edge_key(n, kn) == key {
                        self.bisect(t, k);
                        self.bisect(n, kn);
                        return;
                    }
                    // The neighbour's bisection leaves `key` on one of its
                    // children; look again.
                    self.refine_triangle(n);
                }
            }
        }
    }
}
