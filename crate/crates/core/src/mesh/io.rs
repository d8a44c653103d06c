//! Native ASCII mesh format and legacy VTK output.
//!
//! ```text
//! $Vertices n
//! x y
//! $Cells n
//! k i1 .. ik
//! $Boundary n
//! i j tag
//! ```
//! Vertex indices are zero-based; `#` starts a comment.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{BoundaryTag, Mesh, MeshError, Neighbor};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line.split_whitespace().collect()));
            }
        }
        None
    }

    fn section(&mut self, name: &str) -> Result<usize, MeshError> {
        let (line, f) = self.next_content().ok_or_else(|| MeshError::Parse {
            line: self.last,
            message: format!("missing `{name}` section"),
        })?;
        if f.len() != 2 || f[0] != name {
            return Err(MeshError::Parse {
                line,
                message: format!("expected `{name} <count>`"),
            });
        }
        parse(line, f[1], "count")
    }

    fn row(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), MeshError> {
        self.next_content().ok_or_else(|| MeshError::Parse {
            line: self.last,
            message: format!("unexpected end of file in {what}"),
        })
    }
}

fn parse<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, MeshError> {
    s.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("bad {what} `{s}`"),
    })
}

/// Parses the native format.
pub fn parse_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let nv = lines.section("$Vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, f) = lines.row("$Vertices")?;
        if f.len() != 2 {
            return Err(MeshError::Parse {
                line,
                message: "vertex lines hold `x y`".into(),
            });
        }
        vertices.push([parse(line, f[0], "coordinate")?, parse(line, f[1], "coordinate")?]);
    }
    let nc = lines.section("$Cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (line, f) = lines.row("$Cells")?;
        let k: usize = parse(line, f[0], "vertex count")?;
        if k < 3 || f.len() != k + 1 {
            return Err(MeshError::Parse {
                line,
                message: format!("cell lines hold `k i1 .. ik` with k >= 3, found {} fields", f.len()),
            });
        }
        let mut cell = Vec::with_capacity(k);
        for s in &f[1..] {
            let v: usize = parse(line, s, "vertex index")?;
            if v >= nv {
                return Err(MeshError::Parse {
                    line,
                    message: format!("vertex index {v} out of range (n = {nv})"),
                });
            }
            cell.push(v);
        }
        cells.push(cell);
    }
    let nb = lines.section("$Boundary")?;
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (line, f) = lines.row("$Boundary")?;
        if f.len() != 3 {
            return Err(MeshError::Parse {
                line,
                message: "boundary lines hold `i j tag`".into(),
            });
        }
        let (i, j): (usize, usize) = (parse(line, f[0], "vertex index")?, parse(line, f[1], "vertex index")?);
        if i >= nv || j >= nv {
            return Err(MeshError::Parse {
                line,
                message: format!("vertex index out of range (n = {nv})"),
            });
        }
        let tag: BoundaryTag = f[2].parse().map_err(|message| MeshError::Parse { line, message })?;
        boundary.push(([i, j], tag));
    }
    if let Some((line, _)) = lines.next_content() {
        return Err(MeshError::Parse {
            line,
            message: "trailing content".into(),
        });
    }
    Mesh::new(vertices, cells, &boundary)
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

/// Writes the native format with 17 significant digits.
pub fn write_mesh_to<W: Write>(mesh: &Mesh, mut out: W) -> Result<(), MeshError> {
    if mesh.is_periodic() {
        return Err(MeshError::Periodic);
    }
    writeln!(out, "$Vertices {}", mesh.vertices().len())?;
    for v in mesh.vertices() {
        writeln!(out, "{:.16e} {:.16e}", v[0], v[1])?;
    }
    writeln!(out, "$Cells {}", mesh.n_cells())?;
    for c in mesh.cells() {
        let ids: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{} {}", c.len(), ids.join(" "))?;
    }
    let boundary: Vec<_> = mesh.boundary_edges().collect();
    writeln!(out, "$Boundary {}", boundary.len())?;
    for (_, e) in boundary {
        if let Neighbor::Boundary(tag) = e.right {
            writeln!(out, "{} {} {}", e.vertices[0], e.vertices[1], tag)?;
        }
    }
    Ok(())
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mesh_to(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Legacy ASCII VTK unstructured grid with one scalar cell array per entry of `arrays`.
pub fn write_vtk_to<W: Write>(mesh: &Mesh, title: &str, arrays: &[(&str, &[f64])], mut out: W) -> Result<(), MeshError> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.vertices().len())?;
    for v in mesh.vertices() {
        writeln!(out, "{:.16e} {:.16e} 0", v[0], v[1])?;
    }
    let size: usize = mesh.cells().iter().map(|c| c.len() + 1).sum();
    writeln!(out, "CELLS {} {}", mesh.n_cells(), size)?;
    for c in mesh.cells() {
        let ids: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{} {}", c.len(), ids.join(" "))?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.n_cells())?;
    for c in mesh.cells() {
        let t = match c.len() {
            3 => 5,
            4 => 9,
            _ => 7,
        };
        writeln!(out, "{t}")?;
    }
    writeln!(out, "CELL_DATA {}", mesh.n_cells())?;
    for (name, values) in arrays {
        if values.len() != mesh.n_cells() {
            return Err(MeshError::Generator(format!("array `{name}` has {} values for {} cells", values.len(), mesh.n_cells())));
        }
        writeln!(out, "SCALARS {} double 1", name.replace(char::is_whitespace, "_"))?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in *values {
            writeln!(out, "{v:.16e}")?;
        }
    }
    Ok(())
}

pub fn write_vtk(mesh: &Mesh, path: impl AsRef<Path>, title: &str, arrays: &[(&str, &[f64])]) -> Result<(), MeshError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vtk_to(mesh, title, arrays, &mut w)?;
    w.flush()?;
    Ok(())
}
