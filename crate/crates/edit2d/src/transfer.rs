//! Data transfer between the computational mesh and the front mesh: a
//! normal-ray projection maps each front point to a host edge on each side's
//! surrogate chain, values are interpolated there, and forward/backward
//! Taylor expansions move the data at first or second order. All transfers
//! operate on Roe's parameter vector.

use std::collections::BTreeMap;

use crate::front::{Front, FrontKind, FrontSet, Side, SurrogateChains};
use crate::gas::{GasModel, GasState, RoeVector};
use crate::geom::{closest_point_param, ray_segment_intersection, Vec2};
use crate::mesh::Triangulation;
use crate::{Error, Result};

/// Host edge and interpolation data of one front point on one side.
#[derive(Clone, Copy, Debug)]
pub struct MapEntry {
    /// Surrogate mesh nodes of the host edge.
    pub edge: [usize; 2],
    /// Projected point on the host edge.
    pub x_proj: Vec2,
    /// Interpolation weights: phi(x_proj) = w2 phi(edge[0]) + w1 phi(edge[1]),
    /// the weights being the normalized distances to the opposite endpoint.
    pub w1: f64,
    pub w2: f64,
    /// The normal ray missed the chain and the closest point was used.
    pub used_fallback: bool,
}

/// Projection map for every (front, point, side) combination.
#[derive(Clone, Debug, Default)]
pub struct ProjectionMap {
    pub entries: BTreeMap<(usize, usize, Side), MapEntry>,
}

fn project_to_chain(
    x: Vec2,
    dir: Vec2,
    tri: &Triangulation,
    edges: &[[usize; 2]],
) -> Option<(MapEntry, f64)> {
    // primary: first intersection of the outgoing ray with the chain
    let mut best: Option<(f64, MapEntry)> = None;
    for &[a, b] in edges {
        let (pa, pb) = (tri.node(a), tri.node(b));
        if let Some((t, s)) = ray_segment_intersection(x, dir, pa, pb) {
            if best.as_ref().map_or(true, |(bt, _)| t < *bt) {
                best = Some((
                    t,
                    MapEntry {
                        edge: [a, b],
                        x_proj: pa + (pb - pa) * s,
                        w1: s,
                        w2: 1.0 - s,
                        used_fallback: false,
                    },
                ));
            }
        }
    }
    if let Some((t, e)) = best {
        return Some((e, t * dir.norm()));
    }
    // fallback: closest point on the chain
    let mut best: Option<(f64, MapEntry)> = None;
    for &[a, b] in edges {
        let (pa, pb) = (tri.node(a), tri.node(b));
        let s = closest_point_param(pa, pb, x);
        let xp = pa + (pb - pa) * s;
        let d = xp.dist(x);
        if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            best = Some((
                d,
                MapEntry {
                    edge: [a, b],
                    x_proj: xp,
                    w1: s,
                    w2: 1.0 - s,
                    used_fallback: true,
                },
            ));
        }
    }
    best.map(|(d, e)| (e, d))
}

/// Build the map for every tracked front point: the ray along +n on the
/// upstream side and along -n on the downstream side, with a closest-point
/// fallback where stair-stepped chains leave the ray without intersection.
pub fn build_projection(
    fs: &FrontSet,
    tri: &Triangulation,
    chains: &SurrogateChains,
) -> Result<ProjectionMap> {
    let mut map = ProjectionMap::default();
    for (fid, front) in fs.tracked() {
        for side in [Side::Up, Side::Down] {
            let Some(edges) = chains.side_edges.get(&(fid, side)) else {
                return Err(Error::Transfer(format!(
                    "front '{}' has no surrogate chain on side {side:?}",
                    front.name
                )));
            };
            for (pid, point) in front.points.iter().enumerate() {
                let dir = match side {
                    Side::Up => point.n,
                    Side::Down => -point.n,
                };
                let Some((entry, _)) = project_to_chain(point.x, dir, tri, edges) else {
                    return Err(Error::Transfer(format!(
                        "front '{}' point {pid}: no projection onto side {side:?} chain",
                        front.name
                    )));
                };
                map.entries.insert((fid, pid, side), entry);
            }
        }
    }
    Ok(map)
}

/// Linear interpolation on the host edge with the cross-paired weights.
pub fn interpolate_on_edge<const N: usize>(
    entry: &MapEntry,
    phi_a: [f64; N],
    phi_b: [f64; N],
) -> [f64; N] {
    std::array::from_fn(|k| entry.w2 * phi_a[k] + entry.w1 * phi_b[k])
}

fn grad_at(
    entry: &MapEntry,
    node_grads: &BTreeMap<usize, [Vec2; 4]>,
) -> Result<[Vec2; 4]> {
    let ga = node_grads.get(&entry.edge[0]).ok_or_else(|| {
        Error::Transfer(format!("missing nodal gradient at node {}", entry.edge[0]))
    })?;
    let gb = node_grads.get(&entry.edge[1]).ok_or_else(|| {
        Error::Transfer(format!("missing nodal gradient at node {}", entry.edge[1]))
    })?;
    Ok(std::array::from_fn(|k| {
        ga[k] * entry.w2 + gb[k] * entry.w1
    }))
}

/// Extrapolate the parameter vector from the surrogate to a front point
/// located at `x`. Order 2 adds the interpolated-gradient term; when the
/// extrapolated state is non-physical the order drops to 1 for this point
/// (reported by the returned flag).
pub fn forward_transfer(
    order: usize,
    entry: &MapEntry,
    x: Vec2,
    field_z: &[[f64; 4]],
    node_grads: &BTreeMap<usize, [Vec2; 4]>,
    gas: &GasModel,
) -> Result<(GasState, bool)> {
    let z0 = interpolate_on_edge(entry, field_z[entry.edge[0]], field_z[entry.edge[1]]);
    let mut reduced = false;
    let state = if order >= 2 {
        let g = grad_at(entry, node_grads)?;
        let d = x - entry.x_proj;
        let z: [f64; 4] = std::array::from_fn(|k| z0[k] + g[k].dot(d));
        match RoeVector(z).to_state(gas) {
            Ok(s) => s,
            Err(_) => {
                reduced = true;
                RoeVector(z0).to_state(gas)?
            }
        }
    } else {
        RoeVector(z0).to_state(gas)?
    };
    Ok((state, reduced))
}

/// Dirichlet states for the surrogate nodes updated from the corrected front
/// states: the node is paired with its nearest point on the front polyline,
/// corrected states are interpolated linearly there, and a backward expansion
/// with the node's own recovered gradient brings the value to the node. For
/// shocks only the downstream chain is updated; contacts update both sides.
pub fn backward_transfer(
    order: usize,
    fid: usize,
    front: &Front,
    side: Side,
    chains: &SurrogateChains,
    tri: &Triangulation,
    node_grads: &BTreeMap<usize, [Vec2; 4]>,
    gas: &GasModel,
    h: f64,
) -> Result<Vec<(usize, GasState)>> {
    let mut out = Vec::new();
    for node in chains.nodes_of(fid, side) {
        let x_node = tri.node(node);
        let (e, t, dist) = front.closest_edge(x_node);
        if dist > 2.0 * h {
            return Err(Error::Transfer(format!(
                "surrogate node {node} has no front projection within 2h (distance {dist:.3e})"
            )));
        }
        let (i, j) = front.edge(e);
        let za = front.points[i].state(side).to_roe(gas).0;
        let zb = front.points[j].state(side).to_roe(gas).0;
        let zx: [f64; 4] = std::array::from_fn(|k| (1.0 - t) * za[k] + t * zb[k]);
        let x_front = {
            let (a, b) = front.edge_points(e);
            a + (b - a) * t
        };
        let z_node: [f64; 4] = if order >= 2 {
            let g = node_grads.get(&node).ok_or_else(|| {
                Error::Transfer(format!("missing nodal gradient at surrogate node {node}"))
            })?;
            let d = x_front - x_node;
            std::array::from_fn(|k| zx[k] - g[k].dot(d))
        } else {
            zx
        };
        let state = match RoeVector(z_node).to_state(gas) {
            Ok(s) => s,
            // order reduction mirrors the forward side
            Err(_) => RoeVector(zx).to_state(gas)?,
        };
        out.push((node, state));
    }
    Ok(out)
}

/// Which sides receive Dirichlet data for a front of the given kind.
pub fn updated_sides(kind: FrontKind) -> &'static [Side] {
    match kind {
        FrontKind::Shock => &[Side::Down],
        FrontKind::Contact => &[Side::Up, Side::Down],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::ComputationalMesh;
    use crate::front::{label_surrogates, EndpointRole, FrontPoint};
    use crate::mesh::{rectangle, CellLocator};
    use crate::recon::green_gauss;

    fn gas() -> GasModel {
        GasModel::new(1.4).unwrap()
    }

    fn state(rho: f64, p: f64) -> GasState {
        GasState::new(rho, Vec2::ZERO, p)
    }

    /// Straight horizontal front embedded in a rectangle mesh, with labeled
    /// chains. Returns everything the transfer stages need.
    fn straight_setup(
        n: usize,
        y: f64,
    ) -> (
        Triangulation,
        FrontSet,
        ComputationalMesh,
        SurrogateChains,
    ) {
        let tri = rectangle(n, n, 1.0, 1.0);
        let loc = CellLocator::new(&tri);
        let points: Vec<FrontPoint> = (0..=n)
            .map(|i| {
                FrontPoint::new(
                    Vec2::new(i as f64 / n as f64, y),
                    state(1.0, 1.0),
                    state(2.0, 3.0),
                )
            })
            .collect();
        let mut front = Front {
            name: "f".into(),
            kind: FrontKind::Shock,
            points,
            closed: false,
            start: Some(EndpointRole::Boundary { patch: "left".into() }),
            end: Some(EndpointRole::Boundary { patch: "right".into() }),
            tracked: true,
        };
        front.compute_frames(&vec![0.0; n + 1], tri.mesh_size()).unwrap();
        let fs = FrontSet {
            fronts: vec![front],
            seeds: vec![(Vec2::new(0.5, 0.95), 1), (Vec2::new(0.5, 0.05), 2)],
        };
        let cm = ComputationalMesh::build(&tri, &loc, &fs).unwrap();
        let chains = label_surrogates(
            &fs,
            &tri,
            &cm.surrogate_nodes,
            &cm.surrogate_edges,
            tri.mesh_size(),
        )
        .unwrap();
        (tri, fs, cm, chains)
    }

    #[test]
    fn chains_partition_and_projection_hits() {
        let (tri, fs, cm, chains) = straight_setup(8, 0.505);
        // partition of the surrogate nodes
        let nu = chains.nodes_of(0, Side::Up).len();
        let nd = chains.nodes_of(0, Side::Down).len();
        assert_eq!(nu + nd, cm.surrogate_nodes.len());
        assert!(nu > 0 && nd > 0);
        // upstream nodes sit above the front (the normal points up)
        for nid in chains.nodes_of(0, Side::Up) {
            assert!(tri.node(nid).y > 0.505);
        }
        let map = build_projection(&fs, &tri, &chains).unwrap();
        // straight front against an axis-aligned chain: projection distance
        // matches |y - y_chain| and no fallback is needed
        for ((_, pid, side), entry) in &map.entries {
            assert!(!entry.used_fallback, "point {pid} side {side:?}");
            let x = fs.fronts[0].points[*pid].x;
            assert!((entry.x_proj.x - x.x).abs() < 1e-12);
            assert!((entry.w1 + entry.w2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_weights() {
        let e = MapEntry {
            edge: [0, 1],
            x_proj: Vec2::ZERO,
            w1: 0.5,
            w2: 0.5,
            used_fallback: false,
        };
        assert_eq!(interpolate_on_edge(&e, [1.0], [3.0]), [2.0]);
        let e = MapEntry { w1: 1.0, w2: 0.0, ..e };
        assert_eq!(interpolate_on_edge(&e, [1.0], [3.0]), [3.0]);
        let e = MapEntry { w1: 0.0, w2: 1.0, ..e };
        assert_eq!(interpolate_on_edge(&e, [1.0], [3.0]), [1.0]);
    }

    /// Z field linear in space built from a slowly varying physical state.
    fn linear_z(p: Vec2) -> [f64; 4] {
        [
            1.1 + 0.05 * p.x + 0.02 * p.y,
            3.5 + 0.03 * p.x - 0.04 * p.y,
            0.2 + 0.01 * p.x + 0.03 * p.y,
            0.1 - 0.02 * p.x + 0.01 * p.y,
        ]
    }

    #[test]
    fn forward_exact_on_linear_fields() {
        let (tri, fs, _cm, chains) = straight_setup(8, 0.505);
        let g = gas();
        let map = build_projection(&fs, &tri, &chains).unwrap();
        let field_z: Vec<[f64; 4]> = tri.nodes().iter().map(|&p| linear_z(p)).collect();
        let mut grads = BTreeMap::new();
        for (&node, _) in &chains.node_label {
            // exact constant gradient of the linear field
            grads.insert(
                node,
                [
                    Vec2::new(0.05, 0.02),
                    Vec2::new(0.03, -0.04),
                    Vec2::new(0.01, 0.03),
                    Vec2::new(-0.02, 0.01),
                ],
            );
        }
        for ((_, pid, _), entry) in &map.entries {
            let x = fs.fronts[0].points[*pid].x;
            let (s2, reduced) = forward_transfer(2, entry, x, &field_z, &grads, &g).unwrap();
            assert!(!reduced);
            let exact = RoeVector(linear_z(x)).to_state(&g).unwrap();
            assert!((s2.rho - exact.rho).abs() < 1e-12);
            assert!((s2.p - exact.p).abs() < 1e-12);
            // order 1 error equals |grad Z| |x - x_proj| on the linear field
            let (s1, _) = forward_transfer(1, entry, x, &field_z, &grads, &g).unwrap();
            let z1 = s1.to_roe(&g).0;
            let z_exact = linear_z(x);
            let z_at_proj = linear_z(entry.x_proj);
            for k in 0..4 {
                assert!((z1[k] - z_at_proj[k]).abs() < 1e-12);
                let expected_err = (z_exact[k] - z_at_proj[k]).abs();
                assert!(((z1[k] - z_exact[k]).abs() - expected_err).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_field_transfers_unchanged_both_orders() {
        let (tri, fs, _cm, chains) = straight_setup(6, 0.51);
        let g = gas();
        let map = build_projection(&fs, &tri, &chains).unwrap();
        let free = GasState::new(1.3, Vec2::new(0.4, -0.1), 0.8);
        let z0 = free.to_roe(&g).0;
        let field_z: Vec<[f64; 4]> = tri.nodes().iter().map(|_| z0).collect();
        let grads: BTreeMap<usize, [Vec2; 4]> = chains
            .node_label
            .keys()
            .map(|&n| (n, [Vec2::ZERO; 4]))
            .collect();
        for ((_, _, _), entry) in &map.entries {
            for order in [1, 2] {
                let (s, _) =
                    forward_transfer(order, entry, Vec2::new(0.3, 0.51), &field_z, &grads, &g)
                        .unwrap();
                assert!((s.rho - free.rho).abs() < 1e-13);
                assert!((s.vel - free.vel).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn backward_uniform_state_reaches_all_downstream_nodes() {
        let (tri, mut fs, _cm, chains) = straight_setup(8, 0.505);
        let g = gas();
        let corrected = GasState::new(2.5, Vec2::new(0.0, -0.3), 4.0);
        for p in &mut fs.fronts[0].points {
            p.state_down = corrected;
        }
        let grads: BTreeMap<usize, [Vec2; 4]> = chains
            .node_label
            .keys()
            .map(|&n| (n, [Vec2::ZERO; 4]))
            .collect();
        let updates = backward_transfer(
            2,
            0,
            &fs.fronts[0],
            Side::Down,
            &chains,
            &tri,
            &grads,
            &g,
            tri.mesh_size(),
        )
        .unwrap();
        assert_eq!(updates.len(), chains.nodes_of(0, Side::Down).len());
        for (_, s) in &updates {
            assert!((s.rho - corrected.rho).abs() < 1e-12);
            assert!((s.p - corrected.p).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_exact_on_linear_fields() {
        // forward to the front, identity correction, backward to the nodes:
        // a globally linear Z field returns exactly at second order
        let (tri, mut fs, cm, chains) = straight_setup(8, 0.505);
        let g = gas();
        let map = build_projection(&fs, &tri, &chains).unwrap();
        let field_z: Vec<[f64; 4]> = tri.nodes().iter().map(|&p| linear_z(p)).collect();
        // one-sided recovered gradients on the active side of each node:
        // Green-Gauss is exact on linear fields, so the round trip stays exact
        let mut grads = BTreeMap::new();
        for &node in &cm.surrogate_nodes {
            grads.insert(
                node,
                green_gauss(&tri, node, Some(&cm.active_cell), &field_z).unwrap(),
            );
        }
        let npts = fs.fronts[0].points.len();
        for pid in 0..npts {
            let x = fs.fronts[0].points[pid].x;
            let entry = map.entries[&(0, pid, Side::Down)];
            let (s, reduced) = forward_transfer(2, &entry, x, &field_z, &grads, &g).unwrap();
            assert!(!reduced);
            fs.fronts[0].points[pid].state_down = s;
        }
        let updates = backward_transfer(
            2,
            0,
            &fs.fronts[0],
            Side::Down,
            &chains,
            &tri,
            &grads,
            &g,
            tri.mesh_size(),
        )
        .unwrap();
        for (node, s) in updates {
            let z = s.to_roe(&g).0;
            let exact = field_z[node];
            for k in 0..4 {
                assert!(
                    (z[k] - exact[k]).abs() < 1e-12,
                    "node {node} comp {k}: {} vs {}",
                    z[k],
                    exact[k]
                );
            }
        }
    }

    #[test]
    fn fallback_projection_near_chain_end() {
        // a point whose outgoing ray exits past the chain end uses the
        // closest point instead, never a worse one
        let tri = rectangle(4, 4, 1.0, 1.0);
        let edges = vec![[0usize, 1], [1usize, 2]]; // bottom row y = 0
        let x = Vec2::new(0.9, 0.3);
        // ray pointing up and away misses the chain entirely
        let (entry, d) = project_to_chain(x, Vec2::new(0.3, 1.0), &tri, &edges).unwrap();
        assert!(entry.used_fallback);
        // closest point on the chain is (0.5, 0), the nearest chain node is
        // capped at the segment end
        assert!(d <= x.dist(Vec2::new(0.0, 0.0)) + 1e-12);
        assert!((entry.x_proj.y - 0.0).abs() < 1e-12);
    }
}
