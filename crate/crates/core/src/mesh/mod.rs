//! 2D unstructured meshes: polygonal cells, unique edges with unit normals,
//! boundary tags, generators and file I/O.

mod gen;
mod io;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use gen::{gen_cylinder_ogrid, gen_double_cone, gen_rect, gen_rect_periodic, DoubleConeParams, RectTags};
pub use io::{parse_mesh, read_mesh, write_mesh, write_mesh_to, write_vtk, write_vtk_to};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cell {cell} references vertex {vertex}, only {n_vertices} vertices exist")]
    VertexIndex { cell: usize, vertex: usize, n_vertices: usize },
    #[error("cell {cell} is degenerate (area {area:e})")]
    Degenerate { cell: usize, area: f64 },
    #[error("edge ({0}, {1}) is shared by more than two cells")]
    NonManifold(usize, usize),
    #[error("boundary edge ({0}, {1}) has no tag")]
    Untagged(usize, usize),
    #[error("tagged edge ({0}, {1}) is not a boundary edge of the mesh")]
    NotOnBoundary(usize, usize),
    #[error("periodic meshes cannot be written in the native format")]
    Periodic,
    #[error("invalid generator parameters: {0}")]
    Generator(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Wall,
    Symmetry,
    Inflow,
    Outflow,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Wall => "wall",
            BoundaryTag::Symmetry => "symmetry",
            BoundaryTag::Inflow => "inflow",
            BoundaryTag::Outflow => "outflow",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wall" => Ok(BoundaryTag::Wall),
            "symmetry" => Ok(BoundaryTag::Symmetry),
            "inflow" => Ok(BoundaryTag::Inflow),
            "outflow" => Ok(BoundaryTag::Outflow),
            other => Err(format!("unknown boundary tag `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighbor {
    Cell(usize),
    Boundary(BoundaryTag),
}

/// A unique edge. The normal points out of `left` (into `right`).
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, counterclockwise as seen from `left`.
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Neighbor,
    pub normal: [f64; 2],
    pub length: f64,
    pub midpoint: [f64; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        matches!(self.right, Neighbor::Boundary(_))
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    cell_edges: Vec<Vec<usize>>,
    areas: Vec<f64>,
    perimeters: Vec<f64>,
    centroids: Vec<[f64; 2]>,
    periodic: bool,
}

fn signed_area(vertices: &[[f64; 2]], cell: &[usize]) -> f64 {
    let k = cell.len();
    (0..k)
        .map(|i| {
            let (a, b) = (vertices[cell[i]], vertices[cell[(i + 1) % k]]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}

fn centroid(vertices: &[[f64; 2]], cell: &[usize], area: f64) -> [f64; 2] {
    let k = cell.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..k {
        let (a, b) = (vertices[cell[i]], vertices[cell[(i + 1) % k]]);
        let cross = a[0] * b[1] - b[0] * a[1];
        cx += (a[0] + b[0]) * cross;
        cy += (a[1] + b[1]) * cross;
    }
    [cx / (6.0 * area), cy / (6.0 * area)]
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Mesh {
    /// Builds the edge structure. Clockwise cells are reoriented; every boundary
    /// edge must appear in `boundary`.
    pub fn new(vertices: Vec<[f64; 2]>, cells: Vec<Vec<usize>>, boundary: &[([usize; 2], BoundaryTag)]) -> Result<Self, MeshError> {
        Self::build(vertices, cells, boundary, &[])
    }

    /// Like [`Mesh::new`], additionally gluing pairs of boundary edges into periodic interior edges.
    pub fn with_periodic_pairs(
        vertices: Vec<[f64; 2]>,
        cells: Vec<Vec<usize>>,
        boundary: &[([usize; 2], BoundaryTag)],
        pairs: &[([usize; 2], [usize; 2])],
    ) -> Result<Self, MeshError> {
        Self::build(vertices, cells, boundary, pairs)
    }

    fn build(
        vertices: Vec<[f64; 2]>,
        mut cells: Vec<Vec<usize>>,
        boundary: &[([usize; 2], BoundaryTag)],
        pairs: &[([usize; 2], [usize; 2])],
    ) -> Result<Self, MeshError> {
        let nv = vertices.len();
        let mut areas = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter_mut().enumerate() {
            if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
                return Err(MeshError::VertexIndex { cell: c, vertex: v, n_vertices: nv });
            }
            let mut area = if cell.len() >= 3 { signed_area(&vertices, cell) } else { 0.0 };
            if area < 0.0 {
                cell.reverse();
                area = -area;
            }
            if !(area > 0.0) {
                return Err(MeshError::Degenerate { cell: c, area });
            }
            areas.push(area);
        }

        let geometry = |a: usize, b: usize| {
            let (p, q) = (vertices[a], vertices[b]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let length = dx.hypot(dy);
            ([dy / length, -dx / length], length, [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])])
        };

        let mut edges: Vec<Edge> = Vec::new();
        let mut open: HashSet<(usize, usize)> = HashSet::new();
        let mut cell_edges: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        for (c, cell) in cells.iter().enumerate() {
            let k = cell.len();
            for i in 0..k {
                let (a, b) = (cell[i], cell[(i + 1) % k]);
                let kk = key(a, b);
                if let Some(&e) = edge_index.get(&kk) {
                    if !open.remove(&kk) {
                        return Err(MeshError::NonManifold(kk.0, kk.1));
                    }
                    edges[e].right = Neighbor::Cell(c);
                    cell_edges[c].push(e);
                } else {
                    let (normal, length, midpoint) = geometry(a, b);
                    edge_index.insert(kk, edges.len());
                    open.insert(kk);
                    cell_edges[c].push(edges.len());
                    // placeholder neighbor until the edge is matched or tagged
                    edges.push(Edge {
                        vertices: [a, b],
                        left: c,
                        right: Neighbor::Boundary(BoundaryTag::Wall),
                        normal,
                        length,
                        midpoint,
                    });
                }
            }
        }

        let mut merged: Vec<Option<usize>> = vec![None; edges.len()];
        for (a, b) in pairs {
            let (ka, kb) = (key(a[0], a[1]), key(b[0], b[1]));
            let ea = *edge_index.get(&ka).ok_or(MeshError::NotOnBoundary(ka.0, ka.1))?;
            let eb = *edge_index.get(&kb).ok_or(MeshError::NotOnBoundary(kb.0, kb.1))?;
            if !open.remove(&ka) || !open.remove(&kb) {
                return Err(MeshError::NotOnBoundary(ka.0, ka.1));
            }
            let cb = edges[eb].left;
            edges[ea].right = Neighbor::Cell(cb);
            merged[eb] = Some(ea);
        }

        let mut tagged: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for (v, tag) in boundary {
            let k = key(v[0], v[1]);
            if !open.contains(&k) {
                return Err(MeshError::NotOnBoundary(v[0], v[1]));
            }
            tagged.insert(k, *tag);
        }
        for k in &open {
            match tagged.get(k) {
                Some(tag) => edges[edge_index[k]].right = Neighbor::Boundary(*tag),
                None => return Err(MeshError::Untagged(k.0, k.1)),
            }
        }

        // drop the second copy of glued edges and renumber
        let periodic = !pairs.is_empty();
        let mut renumber = vec![usize::MAX; edges.len()];
        let mut kept = Vec::with_capacity(edges.len());
        for (i, e) in edges.into_iter().enumerate() {
            if merged[i].is_none() {
                renumber[i] = kept.len();
                kept.push(e);
            }
        }
        for i in 0..merged.len() {
            if let Some(j) = merged[i] {
                renumber[i] = renumber[j];
            }
        }
        for ce in &mut cell_edges {
            for e in ce.iter_mut() {
                *e = renumber[*e];
            }
        }

        let perimeters = cell_edges.iter().map(|ce| ce.iter().map(|&e| kept[e].length).sum()).collect();
        let centroids = cells.iter().zip(&areas).map(|(c, &a)| centroid(&vertices, c, a)).collect();
        Ok(Self {
            vertices,
            cells,
            edges: kept,
            cell_edges,
            areas,
            perimeters,
            centroids,
            periodic,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Edges of cell `c`, in the cell's vertex order.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn area(&self, c: usize) -> f64 {
        self.areas[c]
    }

    pub fn perimeter(&self, c: usize) -> f64 {
        self.perimeters[c]
    }

    pub fn centroid(&self, c: usize) -> [f64; 2] {
        self.centroids[c]
    }

    /// Outward normal of edge `e` as seen from cell `c`, and the cell across it.
    pub fn oriented(&self, e: usize, c: usize) -> ([f64; 2], Neighbor) {
        let edge = &self.edges[e];
        if edge.left == c {
            (edge.normal, edge.right)
        } else {
            ([-edge.normal[0], -edge.normal[1]], Neighbor::Cell(edge.left))
        }
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_boundary())
    }

    /// `|sum |e| n_e|` over the edges of cell `c`, relative to its perimeter.
    pub fn closure_defect(&self, c: usize) -> f64 {
        let (mut sx, mut sy) = (0.0, 0.0);
        for &e in &self.cell_edges[c] {
            let (n, _) = self.oriented(e, c);
            sx += self.edges[e].length * n[0];
            sy += self.edges[e].length * n[1];
        }
        sx.hypot(sy) / self.perimeters[c]
    }

    pub fn max_closure_defect(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.closure_defect(c)).fold(0.0, f64::max)
    }

    /// Inscribed-radius estimate `2|cell|/|boundary|` over the diameter.
    pub fn shape_regularity(&self, c: usize) -> f64 {
        let cell = &self.cells[c];
        let mut diam: f64 = 0.0;
        for (i, &a) in cell.iter().enumerate() {
            for &b in &cell[i + 1..] {
                let (p, q) = (self.vertices[a], self.vertices[b]);
                diam = diam.max((p[0] - q[0]).hypot(p[1] - q[1]));
            }
        }
        2.0 * self.areas[c] / self.perimeters[c] / diam
    }

    pub fn min_shape_regularity(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.shape_regularity(c)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest characteristic length `|cell| / |boundary|`.
    pub fn min_cell_length(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.areas[c] / self.perimeters[c]).fold(f64::INFINITY, f64::min)
    }

    /// `V - E + F` over the vertices used by cells.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = vec![false; self.vertices.len()];
        for c in &self.cells {
            for &v in c {
                used[v] = true;
            }
        }
        used.iter().filter(|&&u| u).count() as i64 - self.edges.len() as i64 + self.cells.len() as i64
    }

    /// Number of closed loops formed by the boundary edges.
    pub fn boundary_loops(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut on_boundary = vec![false; self.vertices.len()];
        for (_, e) in self.boundary_edges() {
            let [a, b] = e.vertices;
            on_boundary[a] = true;
            on_boundary[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        (0..self.vertices.len()).filter(|&v| on_boundary[v] && find(&mut parent, v) == v).count()
    }

    /// Checks closure, orientation, interior-edge pairing and the Euler characteristic.
    pub fn validate(&self) -> Result<(), String> {
        for c in 0..self.n_cells() {
            if !(self.areas[c] > 0.0) {
                return Err(format!("cell {c} has non-positive area"));
            }
            if self.closure_defect(c) > 1e-12 {
                return Err(format!("cell {c} is not closed (defect {:e})", self.closure_defect(c)));
            }
        }
        let mut refs = vec![0usize; self.edges.len()];
        for ce in &self.cell_edges {
            for &e in ce {
                refs[e] += 1;
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let expected = if e.is_boundary() { 1 } else { 2 };
            if refs[i] != expected {
                return Err(format!("edge {i} referenced {} times", refs[i]));
            }
        }
        if !self.periodic {
            let chi = self.euler_characteristic();
            let expected = 2 - self.boundary_loops() as i64;
            if chi != expected {
                return Err(format!("Euler characteristic {chi}, expected {expected}"));
            }
        }
        Ok(())
    }
}
