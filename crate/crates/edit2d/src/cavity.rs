//! Cavity construction: flag the background cells crossed by front edges,
//! derive the computational mesh (background minus cavity) with its raw
//! surrogate boundaries, and handle grid-points overtaken by moving fronts.

use crate::front::{label_subdomains, FrontSet, Side};
use crate::gas::GasState;
use crate::geom::Vec2;
use crate::mesh::{segment_length_in_cell, CellLocator, Triangulation};
use crate::{Error, Result};

/// Geometric intersection tolerance relative to the mesh size.
pub const EPS_GEO: f64 = 1e-9;

/// Background triangulation minus the front cavity.
#[derive(Clone, Debug)]
pub struct ComputationalMesh {
    /// Cells not crossed by any front.
    pub active_cell: Vec<bool>,
    /// Per-cell sub-domain id in 1..=m, 0 inside the cavity.
    pub subdomain: Vec<usize>,
    /// Nodes of the raw surrogate ensemble (sorted).
    pub surrogate_nodes: Vec<usize>,
    /// Edges shared by one flagged and one active cell, as (min, max) pairs.
    pub surrogate_edges: Vec<[usize; 2]>,
    pub is_surrogate_node: Vec<bool>,
    /// Nodes belonging to at least one active cell.
    pub active_node: Vec<bool>,
}

impl ComputationalMesh {
    /// Flag, extract and label in one pass.
    pub fn build(
        tri: &Triangulation,
        locator: &CellLocator,
        fs: &FrontSet,
    ) -> Result<ComputationalMesh> {
        let flagged = flag_crossed_cells(tri, locator, fs)?;
        let active_cell: Vec<bool> = flagged.iter().map(|&f| !f).collect();
        let (surrogate_nodes, surrogate_edges) = extract_surrogates(tri, &flagged)?;
        let mut is_surrogate_node = vec![false; tri.n_nodes()];
        for &n in &surrogate_nodes {
            is_surrogate_node[n] = true;
        }
        let mut active_node = vec![false; tri.n_nodes()];
        for c in 0..tri.n_cells() {
            if active_cell[c] {
                for v in tri.cell(c) {
                    active_node[v] = true;
                }
            }
        }
        let subdomain = label_subdomains(tri, &active_cell, &fs.seeds, locator)?;
        Ok(ComputationalMesh {
            active_cell,
            subdomain,
            surrogate_nodes,
            surrogate_edges,
            is_surrogate_node,
            active_node,
        })
    }

    /// All cells active, no surrogates: the shock-capturing configuration.
    pub fn all_active(tri: &Triangulation) -> ComputationalMesh {
        ComputationalMesh {
            active_cell: vec![true; tri.n_cells()],
            subdomain: vec![1; tri.n_cells()],
            surrogate_nodes: Vec::new(),
            surrogate_edges: Vec::new(),
            is_surrogate_node: vec![false; tri.n_nodes()],
            active_node: vec![true; tri.n_nodes()],
        }
    }

    pub fn n_active_cells(&self) -> usize {
        self.active_cell.iter().filter(|&&a| a).count()
    }

    pub fn n_active_nodes(&self) -> usize {
        self.active_node.iter().filter(|&&a| a).count()
    }
}

/// Cells crossed by any tracked front edge: intersection of the edge with the
/// closed cell of length above EPS_GEO * h, with front points within
/// EPS_GEO * h of a grid node flagging all incident cells.
pub fn flag_crossed_cells(
    tri: &Triangulation,
    locator: &CellLocator,
    fs: &FrontSet,
) -> Result<Vec<bool>> {
    let h = tri.mesh_size();
    let eps = EPS_GEO * h;
    let mut flagged = vec![false; tri.n_cells()];
    for (_, front) in fs.tracked() {
        for e in 0..front.n_edges() {
            let (p0, p1) = front.edge_points(e);
            let len = p0.dist(p1);
            if len > 3.0 * h {
                return Err(Error::Cavity(format!(
                    "front '{}' edge {e} has length {len:.3e} > 3h = {:.3e}; front and mesh resolutions are mismatched",
                    front.name,
                    3.0 * h
                )));
            }
            for c in locator.cells_near_segment(p0, p1) {
                if flagged[c] {
                    continue;
                }
                if segment_length_in_cell(tri, c, p0, p1) > eps {
                    flagged[c] = true;
                }
            }
        }
        // degenerate front points: on (or almost on) a grid node every
        // incident cell counts as crossed
        for p in &front.points {
            for c in locator.cells_near_segment(p.x, p.x) {
                for v in tri.cell(c) {
                    if tri.node(v).dist(p.x) < eps {
                        for &cc in tri.cells_of_node(v) {
                            flagged[cc] = true;
                        }
                    }
                }
            }
        }
    }
    Ok(flagged)
}

/// The raw surrogate ensemble: edges separating flagged from active cells,
/// plus their nodes. Errors on active cells left with no active neighbor.
pub fn extract_surrogates(
    tri: &Triangulation,
    flagged: &[bool],
) -> Result<(Vec<usize>, Vec<[usize; 2]>)> {
    let mut edges = Vec::new();
    let mut nodes = Vec::new();
    for e in tri.edges() {
        if let [Some(a), Some(b)] = e.cells {
            if flagged[a] != flagged[b] {
                edges.push(e.nodes);
                nodes.extend_from_slice(&e.nodes);
            }
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    edges.sort_unstable();
    // isolated active cells make the sub-domains ill-posed
    for c in 0..tri.n_cells() {
        if flagged[c] {
            continue;
        }
        let isolated = (0..3).all(|k| tri.cell_neighbor(c, k).map_or(true, |nb| flagged[nb]));
        if isolated {
            return Err(Error::Cavity(format!(
                "active cell {c} is fully surrounded by the cavity; the mesh is too coarse for this front layout"
            )));
        }
    }
    Ok((nodes, edges))
}

/// A grid-point whose side relative to a front flipped between two front
/// configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OvertakenNode {
    pub node: usize,
    pub front: usize,
    pub was: Side,
    pub now: Side,
}

/// Nodes overtaken by the front motion from `fs_old` to `fs_new`: the sign of
/// the projection test (x_p - x_i) . n flips. Only nodes within two mesh
/// sizes of the moving front are candidates.
pub fn detect_overtaken(
    tri: &Triangulation,
    locator: &CellLocator,
    fs_old: &FrontSet,
    fs_new: &FrontSet,
) -> Vec<OvertakenNode> {
    let h = tri.mesh_size();
    let mut candidates: Vec<usize> = Vec::new();
    for fs in [fs_old, fs_new] {
        for (_, front) in fs.tracked() {
            for e in 0..front.n_edges() {
                let (p0, p1) = front.edge_points(e);
                for c in locator.cells_near_segment(p0, p1) {
                    candidates.extend_from_slice(&tri.cell(c));
                }
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let mut out = Vec::new();
    for node in candidates {
        let x = tri.node(node);
        for ((j, fo), (_, fn_)) in fs_old.tracked().zip(fs_new.tracked()) {
            let (_, _, d_old) = fo.closest_edge(x);
            let (_, _, d_new) = fn_.closest_edge(x);
            if d_old.min(d_new) > 2.0 * h {
                continue;
            }
            let a_old = fo.side_test(x);
            let a_new = fn_.side_test(x);
            if a_old.signum() != a_new.signum() && a_old != 0.0 && a_new != 0.0 {
                let side = |a: f64| if a > 0.0 { Side::Down } else { Side::Up };
                out.push(OvertakenNode {
                    node,
                    front: j,
                    was: side(a_old),
                    now: side(a_new),
                });
                break;
            }
        }
    }
    out
}

/// Replace the state of each overtaken node by linear interpolation of the
/// new-side twin states along the nearest edge of the front that crossed it.
pub fn reinitialize_overtaken(
    tri: &Triangulation,
    overtaken: &[OvertakenNode],
    fs_new: &FrontSet,
    field: &mut [GasState],
) -> Result<()> {
    let h = tri.mesh_size();
    for ov in overtaken {
        let x = tri.node(ov.node);
        let front = &fs_new.fronts[ov.front];
        let (e, t, d) = front.closest_edge(x);
        if d > 2.0 * h {
            return Err(Error::Cavity(format!(
                "overtaken node {} is {d:.3e} away from front '{}', farther than 2h",
                ov.node, front.name
            )));
        }
        let (i, j) = front.edge(e);
        let (sa, sb) = (front.points[i].state(ov.now), front.points[j].state(ov.now));
        field[ov.node] = GasState::new(
            (1.0 - t) * sa.rho + t * sb.rho,
            Vec2::new(
                (1.0 - t) * sa.vel.x + t * sb.vel.x,
                (1.0 - t) * sa.vel.y + t * sb.vel.y,
            ),
            (1.0 - t) * sa.p + t * sb.p,
        );
        field[ov.node].validate()?;
    }
    Ok(())
}
