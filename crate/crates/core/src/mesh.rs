//! Triangular meshes of the unit square and the barycentric macro split.
//!
//! Two families are provided: the uniform diagonal mesh (each square of an
//! `n x n` grid cut by its NW-SE diagonal) and the slightly irregular
//! eight-triangle pattern, tiled `2^(level-1)` times per direction.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Default refinement cap for the mesh generators.
pub const DEFAULT_LEVEL_CAP: usize = 12;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    Uniform,
    Irregular8,
}

impl MeshFamily {
    pub fn generate(self, level: usize) -> Result<TriangleMesh> {
        match self {
            MeshFamily::Uniform => gen_uniform_mesh(level),
            MeshFamily::Irregular8 => gen_irregular8_mesh(level),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Uniform => "uniform",
            MeshFamily::Irregular8 => "irregular8",
        }
    }
}

impl std::str::FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeshFamily::Uniform),
            "irregular8" | "irregular" => Ok(MeshFamily::Irregular8),
            other => Err(Error::Config(format!("unknown mesh family `{other}`"))),
        }
    }
}

/// An edge stored from its lower to its higher vertex index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// Adjacent triangles; the second slot is `None` on the boundary.
    pub triangles: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }
}

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// `triangle_edges[t][j]` is the edge joining local vertices `j` and `j+1`.
    pub triangle_edges: Vec<[usize; 3]>,
    pub boundary_vertex: Vec<bool>,
    pub level: usize,
    pub h_max: f64,
}

impl TriangleMesh {
    /// Builds the edge topology and boundary flags from vertices and CCW triangles.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, level: usize) -> Self {
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 3 / 2 + 1);
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0usize; 3];
            for j in 0..3 {
                let (a, b) = (tri[j], tri[(j + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: [key.0, key.1], triangles: [None, None] });
                    edges.len() - 1
                });
                let slot = &mut edges[e].triangles;
                if slot[0].is_none() {
                    slot[0] = Some(t);
                } else {
                    slot[1] = Some(t);
                }
                local[j] = e;
            }
            triangle_edges.push(local);
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[e.vertices[0]] = true;
            boundary_vertex[e.vertices[1]] = true;
        }
        let h_max = triangles
            .iter()
            .map(|tri| diameter(&tri.map(|v| vertices[v])))
            .fold(0.0, f64::max);
        TriangleMesh { vertices, triangles, edges, triangle_edges, boundary_vertex, level, h_max }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        signed_area(&self.triangle_points(t))
    }

    pub fn boundary_edge(&self, e: usize) -> bool {
        self.edges[e].is_boundary()
    }

    /// Applies `map` to every vertex, keeping the topology. Used for rigid-motion checks.
    pub fn map_vertices(&self, map: impl Fn(Point) -> Point) -> TriangleMesh {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = map(*v);
        }
        out.h_max = out
            .triangles
            .iter()
            .map(|tri| diameter(&tri.map(|v| out.vertices[v])))
            .fold(0.0, f64::max);
        out
    }

    /// Writes `vertices N triangles T`, then `x y` lines, then 0-based `i j k` lines.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "vertices {} triangles {}", self.num_vertices(), self.num_triangles())?;
        for p in &self.vertices {
            writeln!(w, "{} {}", p[0], p[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_text(std::io::BufWriter::new(file))?;
        Ok(())
    }
}

pub fn signed_area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

pub fn diameter(p: &[Point; 3]) -> f64 {
    let d = |a: Point, b: Point| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    d(p[0], p[1]).max(d(p[1], p[2])).max(d(p[2], p[0]))
}

pub fn barycenter(p: &[Point; 3]) -> Point {
    [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
}

fn check_level(level: usize, cap: usize) -> Result<()> {
    if level == 0 || level > cap {
        return Err(Error::InvalidLevel { level, cap });
    }
    Ok(())
}

pub fn gen_uniform_mesh(level: usize) -> Result<TriangleMesh> {
    gen_uniform_mesh_capped(level, DEFAULT_LEVEL_CAP)
}

pub fn gen_uniform_mesh_capped(level: usize, cap: usize) -> Result<TriangleMesh> {
    check_level(level, cap)?;
    let n = 1usize << (level - 1);
    let step = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * step, j as f64 * step]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (p00, p10, p01, p11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            // NW-SE diagonal p01 -- p10
            triangles.push([p00, p10, p01]);
            triangles.push([p10, p11, p01]);
        }
    }
    Ok(TriangleMesh::from_triangles(vertices, triangles, level))
}

/// Base pattern in quarter units of the tile width.
const IRREGULAR8_VERTICES: [(u64, u64); 9] =
    [(0, 0), (2, 0), (4, 0), (0, 2), (3, 2), (4, 2), (0, 4), (2, 4), (4, 4)];

const IRREGULAR8_TRIANGLES: [[usize; 3]; 8] = [
    [0, 1, 3],
    [1, 4, 3],
    [1, 2, 4],
    [2, 5, 4],
    [5, 8, 4],
    [4, 8, 7],
    [4, 7, 6],
    [3, 4, 6],
];

pub fn gen_irregular8_mesh(level: usize) -> Result<TriangleMesh> {
    gen_irregular8_mesh_capped(level, DEFAULT_LEVEL_CAP)
}

pub fn gen_irregular8_mesh_capped(level: usize, cap: usize) -> Result<TriangleMesh> {
    check_level(level, cap)?;
    let tiles = 1u64 << (level - 1);
    // exact integer lattice with spacing 1/(4 * tiles)
    let denom = (4 * tiles) as f64;
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(8 * (tiles * tiles) as usize);
    for ty in 0..tiles {
        for tx in 0..tiles {
            let local = IRREGULAR8_VERTICES.map(|(x, y)| {
                let key = (4 * tx + x, 4 * ty + y);
                *index.entry(key).or_insert_with(|| {
                    vertices.push([key.0 as f64 / denom, key.1 as f64 / denom]);
                    vertices.len() - 1
                })
            });
            for tri in IRREGULAR8_TRIANGLES {
                triangles.push(tri.map(|v| local[v]));
            }
        }
    }
    Ok(TriangleMesh::from_triangles(vertices, triangles, level))
}

/// A triangle split into three sub-triangles through its barycenter.
///
/// Sub-triangle `i` is `(v_i, v_{i+1}, x0)`, counterclockwise when the parent is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroSplit {
    pub parent: usize,
    pub vertices: [Point; 3],
    pub barycenter: Point,
    pub sub_triangles: [[Point; 3]; 3],
    /// Local frame origin (the first vertex). Element computations run in
    /// coordinates relative to it so that rounding scales with the element size.
    pub origin: Point,
    pub local_barycenter: Point,
    pub local_sub_triangles: [[Point; 3]; 3],
}

impl MacroSplit {
    pub fn from_points(parent: usize, vertices: [Point; 3]) -> Self {
        let origin = vertices[0];
        let local = vertices.map(|v| [v[0] - origin[0], v[1] - origin[1]]);
        let lb = [(local[1][0] + local[2][0]) / 3.0, (local[1][1] + local[2][1]) / 3.0];
        let x0 = [origin[0] + lb[0], origin[1] + lb[1]];
        let sub_triangles = [0, 1, 2].map(|i| [vertices[i], vertices[(i + 1) % 3], x0]);
        let local_sub_triangles = [0, 1, 2].map(|i| [local[i], local[(i + 1) % 3], lb]);
        MacroSplit { parent, vertices, barycenter: x0, sub_triangles, origin, local_barycenter: lb, local_sub_triangles }
    }

    pub fn to_local(&self, p: Point) -> Point {
        [p[0] - self.origin[0], p[1] - self.origin[1]]
    }

    pub fn to_global(&self, q: Point) -> Point {
        [q[0] + self.origin[0], q[1] + self.origin[1]]
    }

    pub fn parent_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }
}

pub fn split_hct(mesh: &TriangleMesh, triangle: usize) -> Result<MacroSplit> {
    if triangle >= mesh.num_triangles() {
        return Err(Error::TriangleIndex { index: triangle, len: mesh.num_triangles() });
    }
    Ok(MacroSplit::from_points(triangle, mesh.triangle_points(triangle)))
}
