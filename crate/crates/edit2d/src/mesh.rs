//! Background triangulation: geometry, connectivity, boundary patches and
//! msh-file ingestion. The triangulation is immutable after construction.

use std::collections::BTreeMap;

use crate::geom::{clip_segment_to_triangle, Vec2};
use crate::{Error, Result};

mod gmsh;
pub use gmsh::{read_gmsh, read_gmsh_str, write_gmsh};

/// Named group of boundary edges sharing one boundary-condition tag.
#[derive(Clone, Debug)]
pub struct BoundaryPatch {
    pub name: String,
    /// Node pairs as stored in the input, one per boundary edge.
    pub edges: Vec<[usize; 2]>,
}

/// Unique mesh edge with its adjacent cells (boundary edges have one).
#[derive(Clone, Copy, Debug)]
pub struct MeshEdge {
    /// Endpoint node ids, lower id first.
    pub nodes: [usize; 2],
    pub cells: [Option<usize>; 2],
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.cells[1].is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    nodes: Vec<Vec2>,
    cells: Vec<[usize; 3]>,
    patches: Vec<BoundaryPatch>,
    edges: Vec<MeshEdge>,
    /// (min, max) node pair -> edge id.
    edge_ids: BTreeMap<(usize, usize), usize>,
    /// CSR node -> incident cells.
    node_cell_off: Vec<usize>,
    node_cell_dat: Vec<usize>,
    /// Per cell, edge id opposite each vertex.
    cell_edges: Vec<[usize; 3]>,
    /// Patch id for each boundary edge id.
    boundary_patch_of_edge: BTreeMap<usize, usize>,
}

impl Triangulation {
    /// Build and validate. Cell orientation is normalized to counter-clockwise.
    pub fn new(
        nodes: Vec<Vec2>,
        mut cells: Vec<[usize; 3]>,
        patches: Vec<BoundaryPatch>,
    ) -> Result<Self> {
        let nn = nodes.len();
        for (c, tri) in cells.iter_mut().enumerate() {
            for &v in tri.iter() {
                if v >= nn {
                    return Err(Error::Mesh(format!(
                        "cell {c} references node {v} out of {nn}"
                    )));
                }
            }
            let area2 = crate::geom::orient2d(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
            if area2 < 0.0 {
                tri.swap(1, 2);
            } else if area2 == 0.0 {
                return Err(Error::Mesh(format!("cell {c} is degenerate (zero area)")));
            }
        }

        // edge table
        let mut edge_ids = BTreeMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut cell_edges = vec![[usize::MAX; 3]; cells.len()];
        for (c, tri) in cells.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let key = (a.min(b), a.max(b));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(MeshEdge {
                        nodes: [key.0, key.1],
                        cells: [None, None],
                    });
                    edges.len() - 1
                });
                let e = &mut edges[id];
                if e.cells[0].is_none() {
                    e.cells[0] = Some(c);
                } else if e.cells[1].is_none() {
                    e.cells[1] = Some(c);
                } else {
                    return Err(Error::Mesh(format!(
                        "edge ({a}, {b}) shared by more than two cells"
                    )));
                }
                cell_edges[c][k] = id;
            }
        }

        // node -> cell adjacency (CSR)
        let mut counts = vec![0usize; nn];
        for tri in &cells {
            for &v in tri {
                counts[v] += 1;
            }
        }
        let mut node_cell_off = vec![0usize; nn + 1];
        for i in 0..nn {
            node_cell_off[i + 1] = node_cell_off[i] + counts[i];
        }
        let mut node_cell_dat = vec![0usize; node_cell_off[nn]];
        let mut cursor = node_cell_off.clone();
        for (c, tri) in cells.iter().enumerate() {
            for &v in tri {
                node_cell_dat[cursor[v]] = c;
                cursor[v] += 1;
            }
        }

        // bind boundary patches to edges
        let mut boundary_patch_of_edge = BTreeMap::new();
        for (pid, patch) in patches.iter().enumerate() {
            for &[a, b] in &patch.edges {
                let key = (a.min(b), a.max(b));
                let &eid = edge_ids.get(&key).ok_or_else(|| {
                    Error::Mesh(format!(
                        "patch '{}' edge ({a}, {b}) is not a mesh edge",
                        patch.name
                    ))
                })?;
                if !edges[eid].is_boundary() {
                    return Err(Error::Mesh(format!(
                        "patch '{}' edge ({a}, {b}) is interior",
                        patch.name
                    )));
                }
                if boundary_patch_of_edge.insert(eid, pid).is_some() {
                    return Err(Error::Mesh(format!(
                        "boundary edge ({a}, {b}) covered by two patches"
                    )));
                }
            }
        }
        let n_claimed = boundary_patch_of_edge.len();
        let n_boundary = edges.iter().filter(|e| e.is_boundary()).count();
        if n_claimed != n_boundary {
            return Err(Error::Mesh(format!(
                "{n_boundary} boundary edges but {n_claimed} covered by patches"
            )));
        }

        Ok(Triangulation {
            nodes,
            cells,
            patches,
            edges,
            edge_ids,
            node_cell_off,
            node_cell_dat,
            cell_edges,
            boundary_patch_of_edge,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn node(&self, i: usize) -> Vec2 {
        self.nodes[i]
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn cell(&self, c: usize) -> [usize; 3] {
        self.cells[c]
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn cell_points(&self, c: usize) -> [Vec2; 3] {
        let [a, b, d] = self.cells[c];
        [self.nodes[a], self.nodes[b], self.nodes[d]]
    }

    pub fn patches(&self) -> &[BoundaryPatch] {
        &self.patches
    }

    pub fn patch_by_name(&self, name: &str) -> Option<(usize, &BoundaryPatch)> {
        self.patches
            .iter()
            .enumerate()
            .find(|(_, p)| p.name == name)
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_ids.get(&(a.min(b), a.max(b))).copied()
    }

    /// Edge ids of cell `c`, opposite each of its three vertices.
    pub fn cell_edge_ids(&self, c: usize) -> [usize; 3] {
        self.cell_edges[c]
    }

    pub fn boundary_patch_of_edge(&self, eid: usize) -> Option<usize> {
        self.boundary_patch_of_edge.get(&eid).copied()
    }

    pub fn cells_of_node(&self, i: usize) -> &[usize] {
        &self.node_cell_dat[self.node_cell_off[i]..self.node_cell_off[i + 1]]
    }

    /// Neighbor cell across the edge opposite vertex k of cell c.
    pub fn cell_neighbor(&self, c: usize, k: usize) -> Option<usize> {
        let e = &self.edges[self.cell_edges[c][k]];
        match e.cells {
            [Some(a), Some(b)] => Some(if a == c { b } else { a }),
            [Some(a), None] => (a != c).then_some(a),
            _ => None,
        }
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        let [a, b, d] = self.cell_points(c);
        0.5 * crate::geom::orient2d(a, b, d)
    }

    pub fn cell_centroid(&self, c: usize) -> Vec2 {
        let [a, b, d] = self.cell_points(c);
        (a + b + d) / 3.0
    }

    /// Inward face normals scaled by face length, one per vertex (normal to
    /// the face opposite that vertex). They sum to zero.
    pub fn cell_scaled_normals(&self, c: usize) -> [Vec2; 3] {
        let p = self.cell_points(c);
        [
            (p[2] - p[1]).perp(),
            (p[0] - p[2]).perp(),
            (p[1] - p[0]).perp(),
        ]
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_area(c)).sum()
    }

    /// Characteristic mesh size h = sqrt(total area / number of triangles).
    pub fn mesh_size(&self) -> f64 {
        (self.total_area() / self.n_cells() as f64).sqrt()
    }

    /// Median-dual area of a node: one third of each incident cell.
    pub fn dual_area(&self, i: usize) -> f64 {
        self.cells_of_node(i)
            .iter()
            .map(|&c| self.cell_area(c) / 3.0)
            .sum()
    }

    /// Gradient of a nodal 4-vector field, constant on the cell:
    /// sum_k (Z_k n_k) / (2 A_T).
    pub fn cell_gradient(&self, c: usize, field: &[[f64; 4]]) -> Result<[Vec2; 4]> {
        let area = self.cell_area(c);
        if area <= 0.0 {
            return Err(Error::Mesh(format!("cell {c} degenerate in cell_gradient")));
        }
        let tri = self.cells[c];
        let normals = self.cell_scaled_normals(c);
        let mut grad = [Vec2::ZERO; 4];
        for k in 0..3 {
            let z = field[tri[k]];
            for comp in 0..4 {
                grad[comp] += normals[k] * (z[comp] / (2.0 * area));
            }
        }
        Ok(grad)
    }

    /// Uniform refinement: each triangle splits into four via edge midpoints.
    /// Boundary patch edges split in two and stay in their patch.
    pub fn uniform_refine(&self) -> Result<Triangulation> {
        let mut nodes = self.nodes.clone();
        // midpoint node per edge, ids assigned in sorted edge-key order
        let mut mid_of_edge = vec![0usize; self.edges.len()];
        for (&(a, b), &eid) in &self.edge_ids {
            mid_of_edge[eid] = nodes.len();
            nodes.push((self.nodes[a] + self.nodes[b]) * 0.5);
        }
        let mut cells = Vec::with_capacity(self.cells.len() * 4);
        for (c, tri) in self.cells.iter().enumerate() {
            let m = [
                mid_of_edge[self.cell_edges[c][0]], // midpoint opposite v0 = mid(v1, v2)
                mid_of_edge[self.cell_edges[c][1]],
                mid_of_edge[self.cell_edges[c][2]],
            ];
            cells.push([tri[0], m[2], m[1]]);
            cells.push([tri[1], m[0], m[2]]);
            cells.push([tri[2], m[1], m[0]]);
            cells.push([m[0], m[1], m[2]]);
        }
        let patches = self
            .patches
            .iter()
            .map(|p| BoundaryPatch {
                name: p.name.clone(),
                edges: p
                    .edges
                    .iter()
                    .flat_map(|&[a, b]| {
                        let eid = self.edge_ids[&(a.min(b), a.max(b))];
                        let m = mid_of_edge[eid];
                        [[a, m], [m, b]]
                    })
                    .collect(),
            })
            .collect();
        Triangulation::new(nodes, cells, patches)
    }

    /// Barycentric coordinates of p in cell c (can be negative outside).
    pub fn barycentric(&self, c: usize, p: Vec2) -> [f64; 3] {
        let [a, b, d] = self.cell_points(c);
        let area2 = crate::geom::orient2d(a, b, d);
        [
            crate::geom::orient2d(p, b, d) / area2,
            crate::geom::orient2d(a, p, d) / area2,
            crate::geom::orient2d(a, b, p) / area2,
        ]
    }
}

/// Uniform-grid spatial index over cell bounding boxes.
pub struct CellLocator {
    min: Vec2,
    inv_bin: f64,
    nx: usize,
    ny: usize,
    bins: Vec<Vec<usize>>,
}

impl CellLocator {
    pub fn new(tri: &Triangulation) -> Self {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in tri.nodes() {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let bin = 2.0 * tri.mesh_size();
        let nx = (((hi.x - lo.x) / bin).ceil() as usize).max(1);
        let ny = (((hi.y - lo.y) / bin).ceil() as usize).max(1);
        let mut bins = vec![Vec::new(); nx * ny];
        let inv_bin = 1.0 / bin;
        let clampx = |v: f64| (v.max(0.0) as usize).min(nx - 1);
        let clampy = |v: f64| (v.max(0.0) as usize).min(ny - 1);
        for c in 0..tri.n_cells() {
            let pts = tri.cell_points(c);
            let (mut cx0, mut cy0) = (f64::INFINITY, f64::INFINITY);
            let (mut cx1, mut cy1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in pts {
                cx0 = cx0.min(p.x);
                cy0 = cy0.min(p.y);
                cx1 = cx1.max(p.x);
                cy1 = cy1.max(p.y);
            }
            let i0 = clampx(((cx0 - lo.x) * inv_bin).floor());
            let i1 = clampx(((cx1 - lo.x) * inv_bin).floor());
            let j0 = clampy(((cy0 - lo.y) * inv_bin).floor());
            let j1 = clampy(((cy1 - lo.y) * inv_bin).floor());
            for j in j0..=j1 {
                for i in i0..=i1 {
                    bins[j * nx + i].push(c);
                }
            }
        }
        CellLocator {
            min: lo,
            inv_bin,
            nx,
            ny,
            bins,
        }
    }

    fn bin_range(&self, lo: Vec2, hi: Vec2) -> (usize, usize, usize, usize) {
        let cx = |v: f64| ((v as isize).max(0) as usize).min(self.nx - 1);
        let cy = |v: f64| ((v as isize).max(0) as usize).min(self.ny - 1);
        (
            cx(((lo.x - self.min.x) * self.inv_bin).floor()),
            cx(((hi.x - self.min.x) * self.inv_bin).floor()),
            cy(((lo.y - self.min.y) * self.inv_bin).floor()),
            cy(((hi.y - self.min.y) * self.inv_bin).floor()),
        )
    }

    /// Candidate cells whose bbox bins overlap the segment's bbox.
    /// Sorted and deduplicated, so downstream behavior is deterministic.
    pub fn cells_near_segment(&self, p0: Vec2, p1: Vec2) -> Vec<usize> {
        let lo = Vec2::new(p0.x.min(p1.x), p0.y.min(p1.y));
        let hi = Vec2::new(p0.x.max(p1.x), p0.y.max(p1.y));
        let (i0, i1, j0, j1) = self.bin_range(lo, hi);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend_from_slice(&self.bins[j * self.nx + i]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Cell containing point p, if any (inclusive of edges).
    pub fn find_cell(&self, tri: &Triangulation, p: Vec2) -> Option<usize> {
        for c in self.cells_near_segment(p, p) {
            let bc = tri.barycentric(c, p);
            if bc.iter().all(|&w| w >= -1e-12) {
                return Some(c);
            }
        }
        None
    }
}

/// Length of the part of segment [p0, p1] inside cell c.
pub fn segment_length_in_cell(tri: &Triangulation, c: usize, p0: Vec2, p1: Vec2) -> f64 {
    match clip_segment_to_triangle(p0, p1, tri.cell_points(c)) {
        Some((t0, t1)) if t1 > t0 => (t1 - t0) * (p1 - p0).norm(),
        _ => 0.0,
    }
}

/// Structured rectangle triangulation, mainly for tests: nx-by-ny quads, each
/// split into two triangles. Patches: "left", "right", "bottom", "top".
pub fn rectangle(nx: usize, ny: usize, w: f64, h: f64) -> Triangulation {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push(Vec2::new(w * i as f64 / nx as f64, h * j as f64 / ny as f64));
        }
    }
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            // alternate the diagonal to avoid a preferred direction
            if (i + j) % 2 == 0 {
                cells.push([a, b, c]);
                cells.push([a, c, d]);
            } else {
                cells.push([a, b, d]);
                cells.push([b, c, d]);
            }
        }
    }
    let patches = vec![
        BoundaryPatch {
            name: "left".into(),
            edges: (0..ny).map(|j| [id(0, j), id(0, j + 1)]).collect(),
        },
        BoundaryPatch {
            name: "right".into(),
            edges: (0..ny).map(|j| [id(nx, j), id(nx, j + 1)]).collect(),
        },
        BoundaryPatch {
            name: "bottom".into(),
            edges: (0..nx).map(|i| [id(i, 0), id(i + 1, 0)]).collect(),
        },
        BoundaryPatch {
            name: "top".into(),
            edges: (0..nx).map(|i| [id(i, ny), id(i + 1, ny)]).collect(),
        },
    ];
    Triangulation::new(nodes, cells, patches).expect("rectangle mesh is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangle_square() -> Triangulation {
        rectangle(1, 1, 1.0, 1.0)
    }

    #[test]
    fn square_counts() {
        let t = two_triangle_square();
        assert_eq!(t.n_nodes(), 4);
        assert_eq!(t.n_cells(), 2);
        let nb = t.edges().iter().filter(|e| e.is_boundary()).count();
        assert_eq!(nb, 4);
        assert!((t.total_area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scaled_normals_close() {
        let t = two_triangle_square();
        for c in 0..t.n_cells() {
            let n = t.cell_scaled_normals(c);
            let s = n[0] + n[1] + n[2];
            assert!(s.norm() < 1e-14);
        }
    }

    #[test]
    fn cell_gradient_linear_exact() {
        let t = rectangle(3, 3, 1.0, 1.0);
        let constant: Vec<[f64; 4]> = t.nodes().iter().map(|_| [2.0; 4]).collect();
        let linear: Vec<[f64; 4]> = t
            .nodes()
            .iter()
            .map(|p| [p.x, 3.0 * p.x - 2.0 * p.y, p.y, 0.0])
            .collect();
        for c in 0..t.n_cells() {
            let g0 = t.cell_gradient(c, &constant).unwrap();
            for comp in g0 {
                assert!(comp.norm() < 1e-13);
            }
            let g = t.cell_gradient(c, &linear).unwrap();
            assert!((g[0] - Vec2::new(1.0, 0.0)).norm() < 1e-13);
            assert!((g[1] - Vec2::new(3.0, -2.0)).norm() < 1e-13);
            assert!((g[2] - Vec2::new(0.0, 1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn cell_gradient_random_linear() {
        // skewed triangle, hand-built
        let nodes = vec![
            Vec2::new(0.13, -0.4),
            Vec2::new(1.7, 0.21),
            Vec2::new(0.9, 1.3),
        ];
        let f: Vec<[f64; 4]> = nodes.iter().map(|p| [3.0 * p.x - 2.0 * p.y; 4]).collect();
        let t = Triangulation::new(
            nodes,
            vec![[0, 1, 2]],
            vec![BoundaryPatch {
                name: "b".into(),
                edges: vec![[0, 1], [1, 2], [2, 0]],
            }],
        )
        .unwrap();
        let g = t.cell_gradient(0, &f).unwrap();
        assert!((g[0] - Vec2::new(3.0, -2.0)).norm() < 1e-13);
    }

    #[test]
    fn refine_counts_and_area() {
        let t = rectangle(2, 3, 2.0, 3.0);
        let r = t.uniform_refine().unwrap();
        assert_eq!(r.n_cells(), 4 * t.n_cells());
        // V' = V + E
        assert_eq!(r.n_nodes(), t.n_nodes() + t.edges().len());
        assert!((r.total_area() - t.total_area()).abs() < 1e-13 * t.total_area());
        assert!((r.mesh_size() - 0.5 * t.mesh_size()).abs() < 1e-13);
        // nesting: every coarse node appears exactly in the refined mesh
        for i in 0..t.n_nodes() {
            assert_eq!(t.node(i), r.node(i));
        }
    }

    #[test]
    fn refine_preserves_boundary_patches() {
        let t = rectangle(2, 2, 1.0, 1.0);
        let r = t.uniform_refine().unwrap();
        for (p0, p1) in t.patches().iter().zip(r.patches()) {
            assert_eq!(p0.name, p1.name);
            assert_eq!(p1.edges.len(), 2 * p0.edges.len());
        }
    }

    #[test]
    fn locator_finds_cells() {
        let t = rectangle(10, 10, 1.0, 1.0);
        let loc = CellLocator::new(&t);
        let p = Vec2::new(0.237, 0.481);
        let c = loc.find_cell(&t, p).unwrap();
        let bc = t.barycentric(c, p);
        assert!(bc.iter().all(|&w| w >= -1e-12));
        assert!(loc.find_cell(&t, Vec2::new(1.5, 0.5)).is_none());
    }

    #[test]
    fn dangling_node_rejected() {
        let nodes = vec![Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let r = Triangulation::new(nodes, vec![[0, 1, 5]], vec![]);
        assert!(r.is_err());
    }
}
