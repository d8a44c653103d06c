use std::f64::consts::{FRAC_PI_2, PI};

use super::{BoundaryTag, Mesh, MeshError};

/// Tags of the four sides of a rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RectTags {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub bottom: BoundaryTag,
    pub top: BoundaryTag,
}

impl RectTags {
    pub fn uniform(tag: BoundaryTag) -> Self {
        Self {
            left: tag,
            right: tag,
            bottom: tag,
            top: tag,
        }
    }
}

fn rect_vertices(nx: usize, ny: usize, extent: [f64; 4]) -> Vec<[f64; 2]> {
    let [x0, x1, y0, y1] = extent;
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            v.push([x0 + (x1 - x0) * i as f64 / nx as f64, y0 + (y1 - y0) * j as f64 / ny as f64]);
        }
    }
    v
}

fn grid_quads(ni: usize, nj: usize) -> Vec<Vec<usize>> {
    let id = |i: usize, j: usize| j * (ni + 1) + i;
    let mut cells = Vec::with_capacity(ni * nj);
    for j in 0..nj {
        for i in 0..ni {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    cells
}

fn check_extent(extent: [f64; 4]) -> Result<(), MeshError> {
    let [x0, x1, y0, y1] = extent;
    if !(x1 > x0 && y1 > y0) {
        return Err(MeshError::Generator(format!("empty extent {extent:?}")));
    }
    Ok(())
}

/// Structured quad mesh of `[x0, x1] x [y0, y1]`.
pub fn gen_rect(nx: usize, ny: usize, extent: [f64; 4], tags: RectTags) -> Result<Mesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::Generator("nx and ny must be at least 1".into()));
    }
    check_extent(extent)?;
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut boundary = Vec::new();
    for i in 0..nx {
        boundary.push(([id(i, 0), id(i + 1, 0)], tags.bottom));
        boundary.push(([id(i, ny), id(i + 1, ny)], tags.top));
    }
    for j in 0..ny {
        boundary.push(([id(0, j), id(0, j + 1)], tags.left));
        boundary.push(([id(nx, j), id(nx, j + 1)], tags.right));
    }
    Mesh::new(rect_vertices(nx, ny, extent), grid_quads(nx, ny), &boundary)
}

/// Doubly periodic quad mesh (a flat torus).
pub fn gen_rect_periodic(nx: usize, ny: usize, extent: [f64; 4]) -> Result<Mesh, MeshError> {
    if nx < 2 || ny < 2 {
        return Err(MeshError::Generator("periodic meshes need at least 2 cells per direction".into()));
    }
    check_extent(extent)?;
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut pairs = Vec::new();
    for i in 0..nx {
        pairs.push(([id(i, ny), id(i + 1, ny)], [id(i, 0), id(i + 1, 0)]));
    }
    for j in 0..ny {
        pairs.push(([id(nx, j), id(nx, j + 1)], [id(0, j), id(0, j + 1)]));
    }
    Mesh::with_periodic_pairs(rect_vertices(nx, ny, extent), grid_quads(nx, ny), &[], &pairs)
}

/// Geometric clustering of `t in [0, 1]` toward 0; `beta = 0` is uniform.
fn cluster(t: f64, beta: f64) -> f64 {
    if beta.abs() < 1e-12 {
        t
    } else {
        (beta * t).exp_m1() / beta.exp_m1()
    }
}

/// Body-fitted half O-grid around the forebody of a circle of radius `body_radius`
/// centred at the origin, facing a flow in `+x`.
///
/// `outer_radius(phi)` gives the outer boundary at angle `phi` from the
/// stagnation line (`phi = 0` on `y = 0, x < 0`; `phi = pi/2` on `x = 0`).
/// Tags: body wall, outer inflow, `y = 0` symmetry, `x = 0` outflow.
pub fn gen_cylinder_ogrid(
    n_radial: usize,
    n_theta: usize,
    body_radius: f64,
    outer_radius: &dyn Fn(f64) -> f64,
    clustering: f64,
) -> Result<Mesh, MeshError> {
    if n_radial < 2 || n_theta < 2 {
        return Err(MeshError::Generator("n_radial and n_theta must be at least 2".into()));
    }
    if !(body_radius > 0.0) {
        return Err(MeshError::Generator(format!("body radius {body_radius}")));
    }
    let (ni, nj) = (n_radial, n_theta);
    let mut vertices = Vec::with_capacity((ni + 1) * (nj + 1));
    for j in 0..=nj {
        let phi = FRAC_PI_2 * j as f64 / nj as f64;
        let r_out = outer_radius(phi);
        if !(r_out > body_radius) {
            return Err(MeshError::Generator(format!("outer radius {r_out} inside the body at phi = {phi}")));
        }
        let theta = PI - phi;
        for i in 0..=ni {
            let r = body_radius + (r_out - body_radius) * cluster(i as f64 / ni as f64, clustering);
            vertices.push([r * theta.cos(), r * theta.sin()]);
        }
    }
    // exact symmetry line and outflow plane
    let id = |i: usize, j: usize| j * (ni + 1) + i;
    for i in 0..=ni {
        vertices[id(i, 0)][1] = 0.0;
        vertices[id(i, nj)][0] = 0.0;
    }
    let mut boundary = Vec::new();
    for j in 0..nj {
        boundary.push(([id(0, j), id(0, j + 1)], BoundaryTag::Wall));
        boundary.push(([id(ni, j), id(ni, j + 1)], BoundaryTag::Inflow));
    }
    for i in 0..ni {
        boundary.push(([id(i, 0), id(i + 1, 0)], BoundaryTag::Symmetry));
        boundary.push(([id(i, nj), id(i + 1, nj)], BoundaryTag::Outflow));
    }
    Mesh::new(vertices, grid_quads(ni, nj), &boundary)
}

/// Planar double-cone geometry. Lengths are measured along the surfaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleConeParams {
    /// Cone half-angles in degrees.
    pub angles: (f64, f64),
    pub lengths: (f64, f64),
    /// Length of the flat section behind the second cone.
    pub aft: f64,
    /// Length of the symmetry line ahead of the tip.
    pub upstream: f64,
    /// Height of the top boundary above the symmetry line.
    pub height: f64,
    /// Cell counts of the coarsest level along and across the body.
    pub base_cells: (usize, usize),
    /// Wall-normal clustering.
    pub clustering: f64,
}

impl Default for DoubleConeParams {
    fn default() -> Self {
        Self {
            angles: (25.0, 55.0),
            lengths: (0.1016, 0.0508),
            aft: 0.03,
            upstream: 0.02,
            height: 0.2,
            base_cells: (48, 32),
            clustering: 0.0,
        }
    }
}

impl DoubleConeParams {
    /// Corners of the lower boundary: domain corner, tip, cone junction, shoulder, outflow.
    pub fn profile(&self) -> [[f64; 2]; 5] {
        let (a1, a2) = (self.angles.0.to_radians(), self.angles.1.to_radians());
        let tip = [0.0, 0.0];
        let junction = [self.lengths.0 * a1.cos(), self.lengths.0 * a1.sin()];
        let shoulder = [junction[0] + self.lengths.1 * a2.cos(), junction[1] + self.lengths.1 * a2.sin()];
        [[-self.upstream, 0.0], tip, junction, shoulder, [shoulder[0] + self.aft, shoulder[1]]]
    }

    /// Cell counts `(along, across)` of refinement `level`; each level multiplies the cell count by about 2.
    pub fn cells(&self, level: usize) -> (usize, usize) {
        let f = std::f64::consts::SQRT_2.powi(level as i32);
        ((self.base_cells.0 as f64 * f).round() as usize, (self.base_cells.1 as f64 * f).round() as usize)
    }
}

/// Triangulated double-cone domain at refinement `level` (0 is the coarsest).
///
/// Vertical grid lines join the lower boundary (symmetry line then body) to the
/// top boundary; every quad is split into two triangles with alternating diagonals.
/// Tags: body wall, bottom symmetry, left and top inflow, right outflow.
pub fn gen_double_cone(params: &DoubleConeParams, level: usize) -> Result<Mesh, MeshError> {
    let (a1, a2) = params.angles;
    if !(0.0 < a1 && a1 < a2 && a2 < 90.0) {
        return Err(MeshError::Generator(format!("cone angles {:?} must satisfy 0 < a1 < a2 < 90", params.angles)));
    }
    let positive = [params.lengths.0, params.lengths.1, params.aft, params.upstream];
    if positive.iter().any(|&l| !(l > 0.0)) || params.base_cells.0 < 4 || params.base_cells.1 < 2 {
        return Err(MeshError::Generator("lengths and base cell counts must be positive".into()));
    }
    let corners = params.profile();
    if !(params.height > corners[4][1]) {
        return Err(MeshError::Generator("top boundary below the body".into()));
    }
    let (n_along, nj) = params.cells(level);
    let seg_len: Vec<f64> = corners.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).collect();
    let total: f64 = seg_len.iter().sum();
    let counts: Vec<usize> = seg_len.iter().map(|l| ((l / total) * n_along as f64).round().max(1.0) as usize).collect();
    let mut lower = vec![corners[0]];
    let mut lower_tag = Vec::new();
    for (s, w) in corners.windows(2).enumerate() {
        for k in 1..=counts[s] {
            let t = k as f64 / counts[s] as f64;
            lower.push([w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1])]);
            lower_tag.push(if s == 0 { BoundaryTag::Symmetry } else { BoundaryTag::Wall });
        }
    }
    let ni = lower.len() - 1;
    let id = |i: usize, j: usize| j * (ni + 1) + i;
    let mut vertices = Vec::with_capacity((ni + 1) * (nj + 1));
    for j in 0..=nj {
        let t = cluster(j as f64 / nj as f64, params.clustering);
        for p in &lower {
            vertices.push([p[0], p[1] + t * (params.height - p[1])]);
        }
    }
    let mut cells = Vec::with_capacity(2 * ni * nj);
    for j in 0..nj {
        for i in 0..ni {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                cells.push(vec![a, b, c]);
                cells.push(vec![a, c, d]);
            } else {
                cells.push(vec![a, b, d]);
                cells.push(vec![b, c, d]);
            }
        }
    }
    let mut boundary = Vec::new();
    for i in 0..ni {
        boundary.push(([id(i, 0), id(i + 1, 0)], lower_tag[i]));
        boundary.push(([id(i, nj), id(i + 1, nj)], BoundaryTag::Inflow));
    }
    for j in 0..nj {
        boundary.push(([id(0, j), id(0, j + 1)], BoundaryTag::Inflow));
        boundary.push(([id(ni, j), id(ni, j + 1)], BoundaryTag::Outflow));
    }
    Mesh::new(vertices, cells, &boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Neighbor;

    fn outer(phi: f64) -> f64 {
        2.0 + 2.0 * phi.sin().powi(2)
    }

    #[test]
    fn ogrid_counts_and_orientation() {
        let m = gen_cylinder_ogrid(20, 20, 1.0, &outer, 0.0).unwrap();
        assert_eq!(m.n_cells(), 400);
        m.validate().unwrap();
        for (_, e) in m.boundary_edges() {
            if e.right == Neighbor::Boundary(BoundaryTag::Wall) {
                // outward from the fluid means pointing toward the body centre
                let dot = e.normal[0] * e.midpoint[0] + e.normal[1] * e.midpoint[1];
                assert!(dot < 0.0);
            }
        }
        let clustered = gen_cylinder_ogrid(10, 10, 1.0, &outer, 3.0).unwrap();
        clustered.validate().unwrap();
        assert!(clustered.min_shape_regularity() > 0.0);
    }

    #[test]
    fn double_cone_series() {
        let p = DoubleConeParams::default();
        let c = p.profile();
        let slope = |a: [f64; 2], b: [f64; 2]| (b[1] - a[1]).atan2(b[0] - a[0]).to_degrees();
        assert!(((slope(c[2], c[3]) - slope(c[1], c[2])) - 30.0).abs() < 1e-9);
        let mut last = 0;
        for level in 0..5 {
            let m = gen_double_cone(&p, level).unwrap();
            m.validate().unwrap();
            assert!(m.n_cells() > last);
            assert!(m.min_shape_regularity() > 0.01, "level {level}: {}", m.min_shape_regularity());
            last = m.n_cells();
        }
    }
}
