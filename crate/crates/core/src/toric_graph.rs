//! Weighted graphs embedded with straight edges in a flat torus.
//!
//! A fundamental domain is described by two basis vectors `a1, a2` spanning
//! the translation lattice, vertex positions in the plane, and edges that may
//! wrap around the torus. An edge with endpoints `(u, v)` and displacement
//! `(d1, d2)` runs as a straight segment from `pos(u)` to
//! `pos(v) + d1*a1 + d2*a2`.
//!
//! Construction derives the full combinatorics of the embedding: the table of
//! oriented edges, the counterclockwise rotation system at each vertex, and
//! the faces obtained by tracing `e -> R^{-1}(e-bar)`. A graph is accepted
//! only when the complement of the edges is a union of discs, which is
//! equivalent to `V - E + F = 0` together with a zero net displacement around
//! every traced face.

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Angular gap below which two oriented edges at a vertex are considered
/// parallel, making the rotation system ill-defined.
const TIE_EPS: f64 = 1e-9;

pub type Vec2 = Vector2<f64>;

/// One directed edge out of the table of `2|E|` oriented edges.
///
/// Index `2i` is edge `i` taken forward, `2i + 1` is its reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge(pub usize);

impl OrientedEdge {
    pub fn forward(edge: usize) -> Self {
        OrientedEdge(edge << 1)
    }

    pub fn backward(edge: usize) -> Self {
        OrientedEdge(edge << 1 | 1)
    }

    /// The same edge with the opposite orientation.
    pub fn reversed(self) -> Self {
        OrientedEdge(self.0 ^ 1)
    }

    /// Index of the underlying unoriented edge.
    pub fn edge(self) -> usize {
        self.0 >> 1
    }

    pub fn is_forward(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// How the weight of an edge was specified in its source description.
///
/// `J` is a coupling constant; `X` is a high-temperature weight, equivalent
/// to the coupling `atanh(x)` at inverse temperature one. Keeping the raw
/// value makes emit -> parse -> emit byte-identical.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingSpec {
    J(f64),
    X(f64),
}

impl CouplingSpec {
    /// The coupling constant `J_e > 0`.
    pub fn coupling(self) -> f64 {
        match self {
            CouplingSpec::J(j) => j,
            CouplingSpec::X(x) => x.atanh(),
        }
    }

    fn is_valid(self) -> bool {
        match self {
            CouplingSpec::J(j) => j.is_finite() && j > 0.0,
            CouplingSpec::X(x) => x.is_finite() && 0.0 < x && x < 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VertexData {
    pub name: String,
    pub position: Vec2,
}

#[derive(Clone, Debug)]
pub struct EdgeData {
    pub name: String,
    pub u: usize,
    pub v: usize,
    pub displacement: (i32, i32),
    pub weight: CouplingSpec,
}

/// Raw description of a toric graph, before validation.
#[derive(Clone, Debug)]
pub struct GraphData {
    pub basis: [Vec2; 2],
    pub vertices: Vec<VertexData>,
    pub edges: Vec<EdgeData>,
}

/// Diagnostics collected while checking the embedding invariants.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub connected: bool,
    pub face_count: Option<usize>,
    pub euler_characteristic: Option<i64>,
    pub face_displacement_sums: Vec<(i64, i64)>,
    pub problems: Vec<Error>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.problems.is_empty()
    }
}

struct Derived {
    origin: Vec<usize>,
    terminus: Vec<usize>,
    direction: Vec<Vec2>,
    displacement: Vec<(i32, i32)>,
    rot_next: Vec<OrientedEdge>,
    rot_prev: Vec<OrientedEdge>,
    star: Vec<Vec<OrientedEdge>>,
    faces: Vec<Vec<OrientedEdge>>,
    face_left: Vec<usize>,
    face_offset: Vec<(i32, i32)>,
}

impl GraphData {
    /// Checks every embedding invariant and reports the outcome without
    /// failing fast.
    pub fn validate(&self) -> ValidationReport {
        self.analyze().0
    }

    /// Validates and, on success, produces the immutable graph with all
    /// derived combinatorics.
    pub fn build(self) -> Result<ToricGraph> {
        let (report, derived) = self.analyze();
        match (report.accepted(), derived) {
            (true, Some(d)) => Ok(ToricGraph {
                basis: self.basis,
                vertices: self.vertices,
                edges: self.edges,
                origin: d.origin,
                terminus: d.terminus,
                direction: d.direction,
                displacement: d.displacement,
                rot_next: d.rot_next,
                rot_prev: d.rot_prev,
                star: d.star,
                faces: d.faces,
                face_left: d.face_left,
                face_offset: d.face_offset,
                report,
            }),
            _ => Err(report.problems.into_iter().next().unwrap_or_else(|| {
                Error::DegenerateEmbedding("validation failed without diagnostics".into())
            })),
        }
    }

    fn analyze(&self) -> (ValidationReport, Option<Derived>) {
        let nv = self.vertices.len();
        let ne = self.edges.len();
        let mut report = ValidationReport {
            vertex_count: nv,
            edge_count: ne,
            connected: false,
            face_count: None,
            euler_characteristic: None,
            face_displacement_sums: Vec::new(),
            problems: Vec::new(),
        };

        if nv == 0 || ne == 0 {
            report.problems.push(Error::DegenerateEmbedding(
                "graph has no vertices or no edges".into(),
            ));
            return (report, None);
        }
        let basis_det = self.basis[0].perp(&self.basis[1]);
        let scale = self.basis[0].norm().max(self.basis[1].norm()).max(1.0);
        if basis_det.abs() <= 1e-12 * scale * scale {
            report.problems.push(Error::DegenerateEmbedding(
                "lattice basis vectors are parallel".into(),
            ));
            return (report, None);
        }
        for e in &self.edges {
            if e.u >= nv || e.v >= nv {
                report.problems.push(Error::DegenerateEmbedding(format!(
                    "edge `{}` references a missing vertex",
                    e.name
                )));
            }
            if !e.weight.is_valid() {
                report.problems.push(Error::InvalidWeight(match e.weight {
                    CouplingSpec::J(j) => j,
                    CouplingSpec::X(x) => x,
                }));
            }
        }
        if !report.problems.is_empty() {
            return (report, None);
        }

        // Oriented-edge tables.
        let lift = |d: (i32, i32)| self.basis[0] * d.0 as f64 + self.basis[1] * d.1 as f64;
        let mut origin = Vec::with_capacity(2 * ne);
        let mut terminus = Vec::with_capacity(2 * ne);
        let mut direction = Vec::with_capacity(2 * ne);
        let mut displacement = Vec::with_capacity(2 * ne);
        for e in &self.edges {
            let segment =
                self.vertices[e.v].position + lift(e.displacement) - self.vertices[e.u].position;
            if segment.norm() <= 1e-12 * scale {
                report.problems.push(Error::ZeroLengthEdge(e.name.clone()));
                continue;
            }
            origin.push(e.u);
            terminus.push(e.v);
            direction.push(segment);
            displacement.push(e.displacement);
            origin.push(e.v);
            terminus.push(e.u);
            direction.push(-segment);
            displacement.push((-e.displacement.0, -e.displacement.1));
        }
        if !report.problems.is_empty() {
            return (report, None);
        }

        // Connectivity over the underlying undirected graph.
        let mut adjacency = vec![Vec::new(); nv];
        for e in &self.edges {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        report.connected = seen.iter().all(|&s| s);
        if !report.connected {
            report.problems.push(Error::Disconnected);
            return (report, None);
        }

        // Rotation system: counterclockwise order of outgoing edges.
        let mut star: Vec<Vec<OrientedEdge>> = vec![Vec::new(); nv];
        for h in 0..2 * ne {
            star[origin[h]].push(OrientedEdge(h));
        }
        let mut rot_next = vec![OrientedEdge(0); 2 * ne];
        let mut rot_prev = vec![OrientedEdge(0); 2 * ne];
        for (v, out) in star.iter_mut().enumerate() {
            out.sort_by(|a, b| {
                let pa = direction[a.0].y.atan2(direction[a.0].x);
                let pb = direction[b.0].y.atan2(direction[b.0].x);
                pa.partial_cmp(&pb).unwrap()
            });
            let deg = out.len();
            for i in 0..deg {
                let a = out[i];
                let b = out[(i + 1) % deg];
                let gap = ccw_gap(direction[a.0], direction[b.0]);
                if deg > 1 && !(TIE_EPS..=2.0 * std::f64::consts::PI - TIE_EPS).contains(&gap) {
                    report.problems.push(Error::DegenerateEmbedding(format!(
                        "two oriented edges at vertex `{}` leave in the same direction",
                        self.vertices[v].name
                    )));
                }
                rot_next[a.0] = b;
                rot_prev[b.0] = a;
            }
        }
        if !report.problems.is_empty() {
            return (report, None);
        }

        // Face tracing: following e -> R^{-1}(e-bar) walks the boundary of
        // the face to the left of e counterclockwise.
        let mut face_left = vec![usize::MAX; 2 * ne];
        let mut face_offset = vec![(0i32, 0i32); 2 * ne];
        let mut faces = Vec::new();
        for start in 0..2 * ne {
            if face_left[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut offset = (0i64, 0i64);
            let mut h = OrientedEdge(start);
            loop {
                face_left[h.0] = id;
                face_offset[h.0] = (offset.0 as i32, offset.1 as i32);
                walk.push(h);
                offset.0 += displacement[h.0].0 as i64;
                offset.1 += displacement[h.0].1 as i64;
                h = rot_prev[h.reversed().0];
                if h.0 == start {
                    break;
                }
                if walk.len() > 2 * ne {
                    report.problems.push(Error::DegenerateEmbedding(
                        "face tracing did not close".into(),
                    ));
                    return (report, None);
                }
            }
            report.face_displacement_sums.push(offset);
            if offset != (0, 0) {
                report.problems.push(Error::DegenerateEmbedding(format!(
                    "face {id} wraps around the torus (net displacement {offset:?})"
                )));
            }
            faces.push(walk);
        }
        let nf = faces.len();
        report.face_count = Some(nf);
        let euler = nv as i64 - ne as i64 + nf as i64;
        report.euler_characteristic = Some(euler);
        if euler != 0 {
            report.problems.push(Error::DegenerateEmbedding(format!(
                "Euler characteristic V - E + F = {euler}, expected 0"
            )));
        }
        if !report.problems.is_empty() {
            return (report, None);
        }

        (
            report,
            Some(Derived {
                origin,
                terminus,
                direction,
                displacement,
                rot_next,
                rot_prev,
                star,
                faces,
                face_left,
                face_offset,
            }),
        )
    }
}

/// Counterclockwise angular gap from `a` to `b`, in `[0, 2*pi)`.
fn ccw_gap(a: Vec2, b: Vec2) -> f64 {
    let g = b.y.atan2(b.x) - a.y.atan2(a.x);
    g.rem_euclid(2.0 * std::f64::consts::PI)
}

/// A validated toric graph together with its derived combinatorics.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads.
#[derive(Clone, Debug)]
pub struct ToricGraph {
    basis: [Vec2; 2],
    vertices: Vec<VertexData>,
    edges: Vec<EdgeData>,
    origin: Vec<usize>,
    terminus: Vec<usize>,
    direction: Vec<Vec2>,
    displacement: Vec<(i32, i32)>,
    rot_next: Vec<OrientedEdge>,
    rot_prev: Vec<OrientedEdge>,
    star: Vec<Vec<OrientedEdge>>,
    faces: Vec<Vec<OrientedEdge>>,
    face_left: Vec<usize>,
    face_offset: Vec<(i32, i32)>,
    report: ValidationReport,
}

impl ToricGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn oriented_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn oriented_edges(&self) -> impl Iterator<Item = OrientedEdge> {
        (0..self.oriented_edge_count()).map(OrientedEdge)
    }

    pub fn basis(&self) -> [Vec2; 2] {
        self.basis
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeData] {
        &self.edges
    }

    /// Dimension of the GF(2) cycle space, `|E| - |V| + 1` for connected graphs.
    pub fn cycle_rank(&self) -> usize {
        self.edge_count() - self.vertex_count() + 1
    }

    pub fn coupling(&self, edge: usize) -> f64 {
        self.edges[edge].weight.coupling()
    }

    pub fn couplings(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight.coupling()).collect()
    }

    /// Origin vertex `o(e)`.
    pub fn origin(&self, e: OrientedEdge) -> usize {
        self.origin[e.0]
    }

    /// Terminus vertex `t(e)`.
    pub fn terminus(&self, e: OrientedEdge) -> usize {
        self.terminus[e.0]
    }

    /// Direction vector of the straight segment realizing `e`.
    pub fn direction(&self, e: OrientedEdge) -> Vec2 {
        self.direction[e.0]
    }

    /// Signed lattice displacement of `e`; negated under reversal.
    pub fn displacement(&self, e: OrientedEdge) -> (i32, i32) {
        self.displacement[e.0]
    }

    /// Next outgoing edge counterclockwise at `o(e)`.
    pub fn rotation_next(&self, e: OrientedEdge) -> OrientedEdge {
        self.rot_next[e.0]
    }

    pub fn rotation_prev(&self, e: OrientedEdge) -> OrientedEdge {
        self.rot_prev[e.0]
    }

    /// Outgoing oriented edges at `v` in counterclockwise order.
    pub fn star(&self, v: usize) -> &[OrientedEdge] {
        &self.star[v]
    }

    pub fn faces(&self) -> &[Vec<OrientedEdge>] {
        &self.faces
    }

    /// Face lying to the left of `e` (the face whose counterclockwise
    /// boundary walk contains `e`).
    pub fn face_left(&self, e: OrientedEdge) -> usize {
        self.face_left[e.0]
    }

    /// Lattice offset of `o(e)` in the planar lift of the face left of `e`.
    pub fn face_offset(&self, e: OrientedEdge) -> (i32, i32) {
        self.face_offset[e.0]
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    /// Counterclockwise gap from `e` to its rotation successor, in `(0, 2*pi)`.
    ///
    /// These angles sum to `2*pi` over the star of each vertex.
    pub fn turning_gap(&self, e: OrientedEdge) -> f64 {
        ccw_gap(self.direction[e.0], self.direction[self.rot_next[e.0].0])
    }

    /// Signed turning angle from `e` to `e2` in `(-pi, pi)`.
    ///
    /// Requires `t(e) = o(e2)` and `e2 != reversed(e)`.
    pub fn angle(&self, e: OrientedEdge, e2: OrientedEdge) -> Result<f64> {
        if e2 == e.reversed() {
            return Err(Error::BacktrackPair);
        }
        if self.terminus[e.0] != self.origin[e2.0] {
            return Err(Error::NotIncident);
        }
        let a = self.direction[e.0];
        let b = self.direction[e2.0];
        Ok(a.perp(&b).atan2(a.dot(&b)))
    }

    /// Phase `z^p * w^q` carried by `e`, with the crossing numbers `(p, q)`
    /// read off the edge displacement. The product of phases around every
    /// face is 1 because face displacement sums vanish.
    pub fn cocycle_phase(&self, e: OrientedEdge, z: Complex64, w: Complex64) -> Complex64 {
        let (d1, d2) = self.displacement[e.0];
        z.powi(d1) * w.powi(d2)
    }

    /// Parity of the displacement, i.e. the mod-2 homology pairing of `e`.
    pub fn displacement_parity(&self, edge: usize) -> (bool, bool) {
        let d = self.edges[edge].displacement;
        (d.0.rem_euclid(2) == 1, d.1.rem_euclid(2) == 1)
    }

    /// The dual graph: one vertex per face, one edge per edge of the primal
    /// crossing it, oriented from the face right of `e` to the face left of
    /// `e`. Edge index `i` of the dual corresponds to edge `i` of the primal
    /// and carries the same stored weight.
    pub fn dual(&self) -> Result<ToricGraph> {
        let mut centroids = Vec::with_capacity(self.faces.len());
        for walk in &self.faces {
            let mut c = Vec2::zeros();
            for &h in walk {
                let t = self.face_offset[h.0];
                c += self.vertices[self.origin[h.0]].position
                    + self.basis[0] * t.0 as f64
                    + self.basis[1] * t.1 as f64;
            }
            centroids.push(c / walk.len() as f64);
        }

        // Reduce each centroid into the fundamental parallelogram and record
        // the lattice shift so edge displacements can compensate.
        let det = self.basis[0].perp(&self.basis[1]);
        let mut shifts = Vec::with_capacity(centroids.len());
        let mut positions = Vec::with_capacity(centroids.len());
        for c in &centroids {
            let s = c.perp(&self.basis[1]) / det;
            let t = self.basis[0].perp(c) / det;
            let shift = (s.floor() as i32, t.floor() as i32);
            positions.push(c - self.basis[0] * shift.0 as f64 - self.basis[1] * shift.1 as f64);
            shifts.push(shift);
        }

        let vertices = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| VertexData {
                name: format!("f{i}"),
                position: p,
            })
            .collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let fwd = OrientedEdge::forward(i);
            let left = self.face_left[fwd.0];
            let right = self.face_left[fwd.reversed().0];
            let t_l = self.face_offset[fwd.0];
            let t_r = self.face_offset[fwd.reversed().0];
            let d = (
                t_r.0 - t_l.0 - e.displacement.0 + shifts[left].0 - shifts[right].0,
                t_r.1 - t_l.1 - e.displacement.1 + shifts[left].1 - shifts[right].1,
            );
            edges.push(EdgeData {
                name: e.name.clone(),
                u: right,
                v: left,
                displacement: d,
                weight: e.weight,
            });
        }
        GraphData {
            basis: self.basis,
            vertices,
            edges,
        }
        .build()
    }

    /// The `n x m` cover: every vertex and edge copied `n * m` times, with
    /// displacements reduced modulo the enlarged lattice. Weights are copied
    /// periodically.
    pub fn enlarge(&self, n: usize, m: usize) -> ToricGraph {
        assert!(n >= 1 && m >= 1, "cover indices must be positive");
        let (n_i, m_i) = (n as i32, m as i32);
        let copy = |v: usize, i: i32, j: i32| (v * n * m) + (i as usize) * m + j as usize;
        let mut vertices = Vec::with_capacity(self.vertices.len() * n * m);
        for v in &self.vertices {
            for i in 0..n_i {
                for j in 0..m_i {
                    vertices.push(VertexData {
                        name: format!("{}_{i}_{j}", v.name),
                        position: v.position + self.basis[0] * i as f64 + self.basis[1] * j as f64,
                    });
                }
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len() * n * m);
        for e in &self.edges {
            for i in 0..n_i {
                for j in 0..m_i {
                    let ti = i + e.displacement.0;
                    let tj = j + e.displacement.1;
                    edges.push(EdgeData {
                        name: format!("{}_{i}_{j}", e.name),
                        u: copy(e.u, i, j),
                        v: copy(e.v, ti.rem_euclid(n_i), tj.rem_euclid(m_i)),
                        displacement: (ti.div_euclid(n_i), tj.div_euclid(m_i)),
                        weight: e.weight,
                    });
                }
            }
        }
        GraphData {
            basis: [self.basis[0] * n as f64, self.basis[1] * m as f64],
            vertices,
            edges,
        }
        .build()
        .expect("a cover of a valid graph is valid")
    }

    /// Isoradial couplings read off the embedding, assuming every face is
    /// inscribed in a unit circle with the circumcenter in its closure
    /// (caller-asserted). The half-rhombus angle of edge `e` then satisfies
    /// `|e| = 2 cos(theta_e)`, and `J_e = log((1 + sin theta_e)/cos theta_e) / 2`.
    pub fn isoradial_couplings(&self) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let half = self.direction[OrientedEdge::forward(i).0].norm() / 2.0;
            if half >= 1.0 {
                return Err(Error::NotIsoradial(e.name.clone()));
            }
            let theta = half.acos();
            if theta <= 0.0 || theta >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::NotIsoradial(e.name.clone()));
            }
            out.push(0.5 * ((1.0 + theta.sin()) / theta.cos()).ln());
        }
        Ok(out)
    }

    /// Serializes to the line-oriented graph file format.
    pub fn to_file_string(&self) -> String {
        let data = GraphData {
            basis: self.basis,
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        };
        data.to_file_string()
    }
}

impl GraphData {
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "lattice {} {} {} {}\n",
            self.basis[0].x, self.basis[0].y, self.basis[1].x, self.basis[1].y
        ));
        for v in &self.vertices {
            out.push_str(&format!(
                "vertex {} {} {}\n",
                v.name, v.position.x, v.position.y
            ));
        }
        for e in &self.edges {
            let weight = match e.weight {
                CouplingSpec::J(j) => format!("J={j}"),
                CouplingSpec::X(x) => format!("x={x}"),
            };
            out.push_str(&format!(
                "edge {} {} {} {} {} {}\n",
                e.name,
                self.vertices[e.u].name,
                self.vertices[e.v].name,
                e.displacement.0,
                e.displacement.1,
                weight
            ));
        }
        out
    }
}

/// Parses the line-oriented graph file format.
///
/// ```text
/// # comments run to the end of the line
/// lattice a1x a1y a2x a2y
/// vertex <name> <px> <py>
/// edge <name> <u> <v> <d1> <d2> J=<positive real>
/// edge <name> <u> <v> <d1> <d2> x=<real in (0,1)>
/// ```
pub fn parse_graph(text: &str) -> Result<GraphData> {
    let mut basis: Option<[Vec2; 2]> = None;
    let mut vertices: Vec<VertexData> = Vec::new();
    let mut edges: Vec<EdgeData> = Vec::new();
    let mut index = std::collections::HashMap::new();

    let err = |line: usize, message: String| Error::Parse { line, message };
    let num = |line: usize, tok: &str| -> Result<f64> {
        tok.parse::<f64>()
            .map_err(|_| err(line, format!("expected a number, found `{tok}`")))
    };
    let int = |line: usize, tok: &str| -> Result<i32> {
        tok.parse::<i32>()
            .map_err(|_| err(line, format!("expected an integer, found `{tok}`")))
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tok: Vec<&str> = content.split_whitespace().collect();
        match tok[0] {
            "lattice" => {
                if basis.is_some() {
                    return Err(err(line, "duplicate lattice line".into()));
                }
                if tok.len() != 5 {
                    return Err(err(line, "lattice needs 4 numbers: a1x a1y a2x a2y".into()));
                }
                basis = Some([
                    Vec2::new(num(line, tok[1])?, num(line, tok[2])?),
                    Vec2::new(num(line, tok[3])?, num(line, tok[4])?),
                ]);
            }
            "vertex" => {
                if tok.len() != 4 {
                    return Err(err(line, "vertex needs a name and 2 coordinates".into()));
                }
                if index.contains_key(tok[1]) {
                    return Err(err(line, format!("duplicate vertex `{}`", tok[1])));
                }
                index.insert(tok[1].to_string(), vertices.len());
                vertices.push(VertexData {
                    name: tok[1].to_string(),
                    position: Vec2::new(num(line, tok[2])?, num(line, tok[3])?),
                });
            }
            "edge" => {
                if tok.len() != 7 {
                    return Err(err(
                        line,
                        "edge needs: name, two vertex names, two integer displacements, J=<v> or x=<v>"
                            .into(),
                    ));
                }
                let u = *index
                    .get(tok[2])
                    .ok_or_else(|| err(line, format!("unknown vertex `{}`", tok[2])))?;
                let v = *index
                    .get(tok[3])
                    .ok_or_else(|| err(line, format!("unknown vertex `{}`", tok[3])))?;
                let d = (int(line, tok[4])?, int(line, tok[5])?);
                let weight = if let Some(rest) = tok[6].strip_prefix("J=") {
                    let j = num(line, rest)?;
                    if !(j.is_finite() && j > 0.0) {
                        return Err(err(line, format!("coupling must be positive, got {j}")));
                    }
                    CouplingSpec::J(j)
                } else if let Some(rest) = tok[6].strip_prefix("x=") {
                    let x = num(line, rest)?;
                    if !(x.is_finite() && 0.0 < x && x < 1.0) {
                        return Err(err(line, format!("weight must lie in (0,1), got {x}")));
                    }
                    CouplingSpec::X(x)
                } else {
                    return Err(err(
                        line,
                        "edge weight must be given as J=<v> or x=<v>".into(),
                    ));
                };
                edges.push(EdgeData {
                    name: tok[1].to_string(),
                    u,
                    v,
                    displacement: d,
                    weight,
                });
            }
            other => {
                return Err(err(line, format!("unknown directive `{other}`")));
            }
        }
    }
    let basis =
        basis.ok_or_else(|| err(text.lines().count().max(1), "missing lattice line".into()))?;
    Ok(GraphData {
        basis,
        vertices,
        edges,
    })
}
