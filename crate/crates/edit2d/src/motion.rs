//! Front displacement over one pseudo-time step and the convergence metric on
//! the front speeds. Interior points move along their normals; endpoints
//! pinned to a boundary slide along it, endpoints shared at interaction
//! points move with the interaction-point velocity.

use std::collections::BTreeMap;

use crate::front::{EndpointRole, FrontSet};
use crate::geom::{closest_point_param, Vec2};
use crate::interaction::WhichEnd;
use crate::mesh::Triangulation;
use crate::{Error, Result};

/// Projects points back onto named boundary patches (their edge polylines).
pub struct BoundaryProjector {
    patches: BTreeMap<String, Vec<(Vec2, Vec2)>>,
}

impl BoundaryProjector {
    pub fn new(tri: &Triangulation) -> Self {
        let mut patches = BTreeMap::new();
        for p in tri.patches() {
            let segs = p
                .edges
                .iter()
                .map(|&[a, b]| (tri.node(a), tri.node(b)))
                .collect();
            patches.insert(p.name.clone(), segs);
        }
        BoundaryProjector { patches }
    }

    pub fn project(&self, patch: &str, x: Vec2) -> Result<Vec2> {
        let segs = self
            .patches
            .get(patch)
            .ok_or_else(|| Error::Front(format!("unknown boundary patch '{patch}'")))?;
        let mut best = (f64::INFINITY, x);
        for &(a, b) in segs {
            let t = closest_point_param(a, b, x);
            let p = a + (b - a) * t;
            let d = p.dist(x);
            if d < best.0 {
                best = (d, p);
            }
        }
        Ok(best.1)
    }

    /// Unit tangent of the patch segment nearest to x.
    pub fn tangent_at(&self, patch: &str, x: Vec2) -> Result<Vec2> {
        let segs = self
            .patches
            .get(patch)
            .ok_or_else(|| Error::Front(format!("unknown boundary patch '{patch}'")))?;
        let mut best = (f64::INFINITY, Vec2::new(1.0, 0.0));
        for &(a, b) in segs {
            let t = closest_point_param(a, b, x);
            let d = (a + (b - a) * t).dist(x);
            if d < best.0 {
                best = (d, (b - a).normalized());
            }
        }
        Ok(best.1)
    }
}

/// Move every tracked front point by omega n dt (scaled by `relax`),
/// overriding interaction endpoints with their vector velocities and keeping
/// boundary endpoints on their patch. Displacements above one mesh size are
/// scaled down; the applied scaling factor is returned.
pub fn displace(
    fs: &mut FrontSet,
    dt: f64,
    relax: f64,
    endpoint_velocity: &[(usize, WhichEnd, Vec2)],
    projector: &BoundaryProjector,
    h: f64,
) -> Result<f64> {
    // cap the largest displacement at one mesh size
    let mut max_d: f64 = 0.0;
    for (fid, front) in fs.tracked() {
        for p in &front.points {
            max_d = max_d.max((p.speed * dt * relax).abs());
        }
        for &(id, _, v) in endpoint_velocity {
            if id == fid {
                max_d = max_d.max((v * dt * relax).norm());
            }
        }
    }
    let scale = if max_d > h { h / max_d } else { 1.0 };
    let factor = relax * scale * dt;

    let overrides: BTreeMap<(usize, bool), Vec2> = endpoint_velocity
        .iter()
        .map(|&(fid, end, v)| ((fid, end == WhichEnd::End), v))
        .collect();
    for fid in 0..fs.fronts.len() {
        if !fs.fronts[fid].tracked {
            continue;
        }
        let front = &mut fs.fronts[fid];
        let last = front.points.len() - 1;
        for (i, p) in front.points.iter_mut().enumerate() {
            let is_start = i == 0 && !front.closed;
            let is_end = i == last && !front.closed;
            let role = if is_start {
                front.start.as_ref()
            } else if is_end {
                front.end.as_ref()
            } else {
                None
            };
            let endpoint_key = (fid, is_end);
            match role {
                Some(EndpointRole::Interaction { .. }) => {
                    let v = overrides.get(&endpoint_key).copied().unwrap_or_else(|| {
                        // no model supplied: fall back to the point's own motion
                        p.n * p.speed
                    });
                    p.x += v * factor;
                }
                Some(EndpointRole::Boundary { patch }) => {
                    let moved = p.x + p.n * (p.speed * factor);
                    p.x = projector.project(patch, moved)?;
                }
                None => {
                    p.x += p.n * (p.speed * factor);
                }
            }
        }
    }
    // endpoint coherence: members of one interaction point coincide
    let mut anchor: BTreeMap<Vec<u8>, Vec2> = BTreeMap::new();
    for fid in 0..fs.fronts.len() {
        let front = &fs.fronts[fid];
        if !front.tracked {
            continue;
        }
        for (role, idx) in [(front.start.clone(), 0usize), (front.end.clone(), front.points.len() - 1)] {
            if let Some(EndpointRole::Interaction { id }) = role {
                let key = id.to_le_bytes().to_vec();
                let pos = *anchor.entry(key).or_insert(fs.fronts[fid].points[idx].x);
                fs.fronts[fid].points[idx].x = pos;
            }
        }
    }
    for (_, front) in fs.tracked() {
        if !front.is_simple() {
            return Err(Error::Front(format!(
                "front '{}' self-intersects after displacement",
                front.name
            )));
        }
    }
    Ok(scale)
}

/// L2 norm of the normal displacement speeds over all tracked front points;
/// the steady-state stopping metric.
pub fn shock_speed_norm(fs: &FrontSet) -> f64 {
    let mut acc = 0.0;
    let mut n = 0usize;
    for (_, front) in fs.tracked() {
        for p in &front.points {
            acc += p.speed * p.speed;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        (acc / n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::{Front, FrontKind, FrontPoint};
    use crate::gas::GasState;
    use crate::mesh::rectangle;

    fn state() -> GasState {
        GasState::new(1.0, Vec2::ZERO, 1.0)
    }

    fn straight(n: usize, y: f64, speed: f64) -> FrontSet {
        let points: Vec<FrontPoint> = (0..=n)
            .map(|i| {
                let mut p = FrontPoint::new(
                    Vec2::new(i as f64 / n as f64, y),
                    state(),
                    GasState::new(2.0, Vec2::ZERO, 3.0),
                );
                p.speed = speed;
                p
            })
            .collect();
        let mut f = Front {
            name: "f".into(),
            kind: FrontKind::Shock,
            points,
            closed: false,
            start: Some(EndpointRole::Boundary { patch: "left".into() }),
            end: Some(EndpointRole::Boundary { patch: "right".into() }),
            tracked: true,
        };
        f.compute_frames(&vec![0.0; n + 1], 0.1).unwrap();
        FrontSet {
            fronts: vec![f],
            seeds: vec![],
        }
    }

    #[test]
    fn zero_speed_keeps_positions() {
        let tri = rectangle(4, 4, 1.0, 1.0);
        let proj = BoundaryProjector::new(&tri);
        let mut fs = straight(4, 0.5, 0.0);
        let before: Vec<Vec2> = fs.fronts[0].points.iter().map(|p| p.x).collect();
        displace(&mut fs, 0.1, 1.0, &[], &proj, tri.mesh_size()).unwrap();
        for (b, p) in before.iter().zip(&fs.fronts[0].points) {
            assert_eq!(*b, p.x);
        }
    }

    #[test]
    fn uniform_speed_translates_rigidly() {
        let tri = rectangle(4, 4, 1.0, 1.0);
        let proj = BoundaryProjector::new(&tri);
        let mut fs = straight(4, 0.5, 0.25);
        let dt = 0.1;
        displace(&mut fs, dt, 1.0, &[], &proj, 10.0).unwrap();
        // normal points +y, so the front moves up by 0.025
        for p in &fs.fronts[0].points {
            assert!((p.x.y - 0.525).abs() < 1e-14);
        }
        // boundary endpoints stayed on their (vertical) patches
        assert!((fs.fronts[0].points[0].x.x - 0.0).abs() < 1e-12);
        assert!((fs.fronts[0].points[4].x.x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_step_is_scaled() {
        let tri = rectangle(4, 4, 1.0, 1.0);
        let h = tri.mesh_size();
        let proj = BoundaryProjector::new(&tri);
        let mut fs = straight(4, 0.5, 40.0);
        let scale = displace(&mut fs, 0.1, 1.0, &[], &proj, h).unwrap();
        assert!(scale < 1.0);
        for p in &fs.fronts[0].points {
            assert!((p.x.y - 0.5).abs() <= h * (1.0 + 1e-12));
        }
    }

    #[test]
    fn interaction_endpoints_follow_override() {
        let tri = rectangle(4, 4, 1.0, 1.0);
        let proj = BoundaryProjector::new(&tri);
        let mut fs = straight(4, 0.5, 0.0);
        fs.fronts[0].end = Some(EndpointRole::Interaction { id: 0 });
        let v = Vec2::new(0.3, -0.2);
        displace(&mut fs, 0.1, 1.0, &[(0, WhichEnd::End, v)], &proj, 10.0).unwrap();
        let p = fs.fronts[0].points[4].x;
        assert!((p - (Vec2::new(1.0, 0.5) + v * 0.1)).norm() < 1e-14);
    }

    #[test]
    fn speed_norm_definition() {
        let mut fs = straight(3, 0.5, 0.0);
        assert_eq!(shock_speed_norm(&fs), 0.0);
        fs.fronts[0].points[1].speed = 0.4;
        let expect = 0.4 / 2.0; // sqrt(0.16 / 4)
        assert!((shock_speed_norm(&fs) - expect).abs() < 1e-15);
    }

    #[test]
    fn self_intersection_rejected() {
        let tri = rectangle(4, 4, 1.0, 1.0);
        let proj = BoundaryProjector::new(&tri);
        let mut fs = straight(4, 0.5, 0.0);
        // fold the middle over its neighbor so displacement keeps it folded
        fs.fronts[0].points[2].x = Vec2::new(0.1, 0.9);
        fs.fronts[0].points[1].x = Vec2::new(0.9, 0.55);
        let r = displace(&mut fs, 0.1, 1.0, &[], &proj, 10.0);
        assert!(r.is_err());
    }
}
