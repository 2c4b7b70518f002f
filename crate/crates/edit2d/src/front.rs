//! Discontinuity fronts: ordered point polylines carrying twin states and
//! local frames, plus the labeling that splits the raw surrogate-boundary
//! ensemble into per-front upstream/downstream chains and numbers the
//! sub-domains left by cavity removal.
//!
//! Orientation convention: points are ordered so that the upstream (lower
//! entropy) side lies to the left of the walking direction. The unit normal is
//! the tangent rotated by +90 degrees, so it points into the upstream region,
//! from the high-entropy side toward the low-entropy side.

use std::collections::BTreeMap;
use std::path::Path;

use crate::gas::{GasModel, GasState};
use crate::geom::{closest_point_param, Vec2};
use crate::mesh::{CellLocator, Triangulation};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontKind {
    Shock,
    Contact,
}

#[derive(Clone, Copy, Debug)]
pub struct FrontPoint {
    pub x: Vec2,
    /// Unit normal, pointing toward the upstream side.
    pub n: Vec2,
    /// Unit tangent along increasing point index.
    pub tau: Vec2,
    /// State on the side the normal points into (upstream for shocks).
    pub state_up: GasState,
    pub state_down: GasState,
    /// Normal displacement speed omega.
    pub speed: f64,
}

impl FrontPoint {
    pub fn new(x: Vec2, state_up: GasState, state_down: GasState) -> Self {
        FrontPoint {
            x,
            n: Vec2::new(0.0, 1.0),
            tau: Vec2::new(1.0, 0.0),
            state_up,
            state_down,
            speed: 0.0,
        }
    }

    pub fn state(&self, side: Side) -> GasState {
        match side {
            Side::Up => self.state_up,
            Side::Down => self.state_down,
        }
    }
}

/// What a front endpoint is attached to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndpointRole {
    /// Pinned to (sliding along) a named boundary patch.
    Boundary { patch: String },
    /// Shared with other fronts at an interaction point.
    Interaction { id: usize },
}

#[derive(Clone, Debug)]
pub struct Front {
    pub name: String,
    pub kind: FrontKind,
    pub points: Vec<FrontPoint>,
    pub closed: bool,
    /// Role of points[0] (None only for closed fronts).
    pub start: Option<EndpointRole>,
    /// Role of points[last].
    pub end: Option<EndpointRole>,
    /// Captured-instead-of-tracked fronts take no part in the machinery.
    pub tracked: bool,
}

impl Front {
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_edges(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }

    /// Endpoint indices of front edge e.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        (e, (e + 1) % self.points.len())
    }

    pub fn edge_points(&self, e: usize) -> (Vec2, Vec2) {
        let (i, j) = self.edge(e);
        (self.points[i].x, self.points[j].x)
    }

    /// Closest point on the polyline: (edge, parameter on edge, distance).
    pub fn closest_edge(&self, x: Vec2) -> (usize, f64, f64) {
        let mut best = (0usize, 0.0f64, f64::INFINITY);
        for e in 0..self.n_edges() {
            let (a, b) = self.edge_points(e);
            let t = closest_point_param(a, b, x);
            let d = (a + (b - a) * t).dist(x);
            if d < best.2 {
                best = (e, t, d);
            }
        }
        best
    }

    /// Index of the front point nearest to x.
    pub fn closest_point(&self, x: Vec2) -> usize {
        (0..self.points.len())
            .min_by(|&i, &j| {
                self.points[i]
                    .x
                    .dist(x)
                    .partial_cmp(&self.points[j].x.dist(x))
                    .unwrap()
            })
            .unwrap()
    }

    /// Arclength parameter of the projection of x onto the polyline.
    pub fn arclength_of(&self, x: Vec2) -> f64 {
        let (e, t, _) = self.closest_edge(x);
        let mut s = 0.0;
        for k in 0..e {
            let (a, b) = self.edge_points(k);
            s += a.dist(b);
        }
        let (a, b) = self.edge_points(e);
        s + t * a.dist(b)
    }

    /// Signed side of x relative to the front: the alpha test
    /// (x_p - x) . n with x_p the projection on the closest front edge and n
    /// the normal of the closest front point. Positive means x lies on the
    /// downstream side (the normal points upstream).
    pub fn side_test(&self, x: Vec2) -> f64 {
        let (e, t, _) = self.closest_edge(x);
        let (a, b) = self.edge_points(e);
        let xp = a + (b - a) * t;
        let n = self.points[self.closest_point(x)].n;
        (xp - x).dot(n)
    }

    pub fn side_of(&self, x: Vec2) -> Side {
        if self.side_test(x) > 0.0 {
            Side::Down
        } else {
            Side::Up
        }
    }

    /// Tangents and normals from the point ordering by finite differences:
    /// centered at interior points (and everywhere on closed fronts) unless
    /// the downstream normal Mach there exceeds one, in which case the
    /// one-sided stencil from the lower-index side is used; endpoints of open
    /// fronts are always one-sided. The normal is the tangent rotated +90
    /// degrees.
    pub fn compute_frames(&mut self, downstream_mach: &[f64], h_ref: f64) -> Result<()> {
        let n = self.points.len();
        if n < 2 {
            return Err(Error::Front(format!(
                "front '{}' needs at least 2 points",
                self.name
            )));
        }
        let pos: Vec<Vec2> = self.points.iter().map(|p| p.x).collect();
        for i in 0..n {
            let supersonic = downstream_mach.get(i).copied().unwrap_or(0.0) > 1.0;
            let d = if self.closed {
                let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
                if supersonic {
                    pos[i] - pos[im]
                } else {
                    pos[ip] - pos[im]
                }
            } else if i == 0 {
                pos[1] - pos[0]
            } else if i == n - 1 {
                pos[n - 1] - pos[n - 2]
            } else if supersonic {
                pos[i] - pos[i - 1]
            } else {
                pos[i + 1] - pos[i - 1]
            };
            let len = d.norm();
            if len < 1e-12 * h_ref {
                return Err(Error::Front(format!(
                    "front '{}': coincident points around index {i}",
                    self.name
                )));
            }
            let tau = d / len;
            self.points[i].tau = tau;
            self.points[i].n = tau.perp();
        }
        Ok(())
    }

    /// Entropy orientation invariant for shocks: the stored downstream state
    /// must not have lower entropy than the upstream one.
    pub fn validate_orientation(&self, gas: &GasModel) -> Result<()> {
        if self.kind != FrontKind::Shock {
            return Ok(());
        }
        for (i, p) in self.points.iter().enumerate() {
            let (su, sd) = (p.state_up.entropy(gas), p.state_down.entropy(gas));
            if sd < su * (1.0 - 1e-9) {
                return Err(Error::Front(format!(
                    "front '{}' point {i}: entropy orientation violated (s_up = {su:.6e} > s_down = {sd:.6e})",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Geometric simplicity: no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let ne = self.n_edges();
        for e1 in 0..ne {
            for e2 in e1 + 1..ne {
                let adjacent = {
                    let (a1, b1) = self.edge(e1);
                    let (a2, b2) = self.edge(e2);
                    a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2
                };
                if adjacent {
                    continue;
                }
                let (p0, p1) = self.edge_points(e1);
                let (q0, q1) = self.edge_points(e2);
                if crate::geom::segments_intersect(p0, p1, q0, q1) {
                    return false;
                }
            }
        }
        true
    }
}

/// Upstream/downstream flag relative to a front's normal orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Up,
    Down,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Up => Side::Down,
            Side::Down => Side::Up,
        }
    }
}

/// The tracked discontinuities plus the sub-domain seeds shared by all
/// geometric stages of an iteration.
#[derive(Clone, Debug)]
pub struct FrontSet {
    pub fronts: Vec<Front>,
    /// Seed point and sub-domain id (1-based) per expected sub-domain.
    pub seeds: Vec<(Vec2, usize)>,
}

impl FrontSet {
    pub fn subdomain_count(&self) -> usize {
        self.seeds.iter().map(|&(_, id)| id).max().unwrap_or(1)
    }

    pub fn tracked(&self) -> impl Iterator<Item = (usize, &Front)> {
        self.fronts.iter().enumerate().filter(|(_, f)| f.tracked)
    }

    pub fn by_name(&self, name: &str) -> Option<usize> {
        self.fronts.iter().position(|f| f.name == name)
    }

    /// Nearest tracked front to x: (front id, distance).
    pub fn closest_front(&self, x: Vec2) -> Option<(usize, f64)> {
        self.tracked()
            .map(|(j, f)| (j, f.closest_edge(x).2))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
    }
}

/// Label of one surrogate node or edge: owning front and side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurrogateLabel {
    pub front: usize,
    pub side: Side,
}

/// Outcome of the surrogate labeling pass.
#[derive(Clone, Debug, Default)]
pub struct SurrogateChains {
    /// Every surrogate node gets exactly one label.
    pub node_label: BTreeMap<usize, SurrogateLabel>,
    /// Per (front, side): mesh edges (node pairs) of that chain.
    pub side_edges: BTreeMap<(usize, Side), Vec<[usize; 2]>>,
    /// Per (front, side): ordered node paths, oriented along the front.
    pub chains: BTreeMap<(usize, Side), Vec<Vec<usize>>>,
}

impl SurrogateChains {
    pub fn nodes_of(&self, front: usize, side: Side) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .node_label
            .iter()
            .filter(|(_, l)| l.front == front && l.side == side)
            .map(|(&n, _)| n)
            .collect();
        out.sort_unstable();
        out
    }
}

fn classify(fs: &FrontSet, x: Vec2, tie_tol: f64) -> Result<SurrogateLabel> {
    // step 1: index of the closest discontinuity by orthogonal projection
    let mut dists: Vec<(usize, f64)> = fs
        .tracked()
        .map(|(j, f)| (j, f.closest_edge(x).2))
        .collect();
    if dists.is_empty() {
        return Err(Error::Front("no tracked fronts to label against".into()));
    }
    dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    let mut owner = dists[0].0;
    if dists.len() > 1 && (dists[1].1 - dists[0].1).abs() <= tie_tol {
        // tie break on the orthogonal distance to the supporting line of each
        // front's nearest edge
        let line_dist = |j: usize| {
            let f = &fs.fronts[j];
            let (e, _, _) = f.closest_edge(x);
            let (a, b) = f.edge_points(e);
            let d = (b - a).normalized();
            ((x - a) - d * (x - a).dot(d)).norm()
        };
        let (la, lb) = (line_dist(dists[0].0), line_dist(dists[1].0));
        if lb < la - tie_tol {
            owner = dists[1].0;
        }
    }
    // step 2: upstream/downstream flag from the normal orientation
    let side = fs.fronts[owner].side_of(x);
    Ok(SurrogateLabel { front: owner, side })
}

/// Steps 1-4 of the multi-front labeling: give every node and edge of the raw
/// surrogate ensemble an owning front and side, then assemble per-front
/// ordered chains.
pub fn label_surrogates(
    fs: &FrontSet,
    tri: &Triangulation,
    surrogate_nodes: &[usize],
    surrogate_edges: &[[usize; 2]],
    h: f64,
) -> Result<SurrogateChains> {
    let tie_tol = 1e-9 * h;
    let mut out = SurrogateChains::default();
    for &node in surrogate_nodes {
        let label = classify(fs, tri.node(node), tie_tol)?;
        out.node_label.insert(node, label);
    }
    // edges labeled through their midpoints so junction edges resolve cleanly
    for &[a, b] in surrogate_edges {
        let mid = (tri.node(a) + tri.node(b)) * 0.5;
        let label = classify(fs, mid, tie_tol)?;
        out.side_edges
            .entry((label.front, label.side))
            .or_default()
            .push([a.min(b), a.max(b)]);
    }
    for edges in out.side_edges.values_mut() {
        edges.sort_unstable();
    }
    // step 3/4: walk each side's edges into paths and orient them along the
    // owning front, which also gives the front <-> surrogate mapping
    for (&(front, side), edges) in &out.side_edges {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (e, &[a, b]) in edges.iter().enumerate() {
            adj.entry(a).or_default().push(e);
            adj.entry(b).or_default().push(e);
        }
        let mut used = vec![false; edges.len()];
        let mut paths: Vec<Vec<usize>> = Vec::new();
        // open paths first (degree-1 start nodes), then leftover loops
        let mut starts: Vec<usize> = adj
            .iter()
            .filter(|(_, es)| es.len() == 1)
            .map(|(&n, _)| n)
            .collect();
        starts.extend(adj.keys().copied());
        for &start in &starts {
            let mut cur = start;
            let mut path = vec![cur];
            loop {
                let Some(&e) = adj[&cur].iter().find(|&&e| !used[e]) else {
                    break;
                };
                used[e] = true;
                let [a, b] = edges[e];
                cur = if a == cur { b } else { a };
                path.push(cur);
            }
            if path.len() > 1 {
                paths.push(path);
            }
        }
        let f = &fs.fronts[front];
        for path in &mut paths {
            let s0 = f.arclength_of(tri.node(path[0]));
            let s1 = f.arclength_of(tri.node(*path.last().unwrap()));
            if s1 < s0 {
                path.reverse();
            }
        }
        paths.sort_by(|a, b| a.first().cmp(&b.first()));
        out.chains.insert((front, side), paths);
    }
    Ok(out)
}

/// Flood-fill the active cells into connected components and match them to
/// the configured seed points. Returns a per-cell sub-domain id, 0 in the
/// cavity.
pub fn label_subdomains(
    tri: &Triangulation,
    active: &[bool],
    seeds: &[(Vec2, usize)],
    locator: &CellLocator,
) -> Result<Vec<usize>> {
    let m = seeds.iter().map(|&(_, id)| id).max().unwrap_or(1);
    let mut component = vec![usize::MAX; tri.n_cells()];
    let mut n_comp = 0usize;
    for c0 in 0..tri.n_cells() {
        if !active[c0] || component[c0] != usize::MAX {
            continue;
        }
        let comp = n_comp;
        n_comp += 1;
        let mut stack = vec![c0];
        component[c0] = comp;
        while let Some(c) = stack.pop() {
            for k in 0..3 {
                if let Some(nb) = tri.cell_neighbor(c, k) {
                    if active[nb] && component[nb] == usize::MAX {
                        component[nb] = comp;
                        stack.push(nb);
                    }
                }
            }
        }
    }
    if n_comp != m {
        return Err(Error::Front(format!(
            "active cells form {n_comp} connected components but {m} sub-domains are configured"
        )));
    }
    let mut comp_to_id = vec![0usize; n_comp];
    for &(p, id) in seeds {
        let c = locator
            .find_cell(tri, p)
            .filter(|&c| active[c])
            .ok_or_else(|| {
                Error::Front(format!(
                    "sub-domain seed ({}, {}) is not inside an active cell",
                    p.x, p.y
                ))
            })?;
        let comp = component[c];
        if comp_to_id[comp] != 0 && comp_to_id[comp] != id {
            return Err(Error::Front(format!(
                "seeds for sub-domains {} and {id} fall in the same component",
                comp_to_id[comp]
            )));
        }
        comp_to_id[comp] = id;
    }
    if comp_to_id.iter().any(|&id| id == 0) {
        return Err(Error::Front("a connected component has no seed".into()));
    }
    Ok(component
        .iter()
        .map(|&c| if c == usize::MAX { 0 } else { comp_to_id[c] })
        .collect())
}

// ---------------------------------------------------------------------------
// front initialization files
// ---------------------------------------------------------------------------

/// Endpoint role as written in an initialization file, before interaction
/// names are resolved to ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoleSpec {
    Boundary(String),
    Interaction(String),
}

/// Parsed front initialization data. Twin states are optional: when absent
/// the driver samples them from the current flow field.
#[derive(Clone, Debug)]
pub struct FrontInit {
    pub name: String,
    pub kind: FrontKind,
    pub closed: bool,
    pub start: Option<RoleSpec>,
    pub end: Option<RoleSpec>,
    pub points: Vec<(Vec2, Option<(GasState, GasState)>)>,
}

impl FrontInit {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let name = path
            .as_ref()
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "front".into());
        Self::parse(&std::fs::read_to_string(path)?, &name)
    }

    /// One point per line: `x y [rho_u u_u v_u p_u rho_d u_d v_d p_d]`.
    /// Header lines start with '#': `# kind shock|contact`, `# closed`,
    /// `# start boundary:<patch>|interaction:<name>`, `# end ...`,
    /// `# name <name>`.
    pub fn parse(text: &str, default_name: &str) -> Result<Self> {
        let mut init = FrontInit {
            name: default_name.to_string(),
            kind: FrontKind::Shock,
            closed: false,
            start: None,
            end: None,
            points: Vec::new(),
        };
        let bad = Error::Front;
        let parse_role = |v: &str| -> Result<RoleSpec> {
            match v.split_once(':') {
                Some(("boundary", p)) => Ok(RoleSpec::Boundary(p.to_string())),
                Some(("interaction", p)) => Ok(RoleSpec::Interaction(p.to_string())),
                _ => Err(bad(format!("bad endpoint role '{v}'"))),
            }
        };
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                match it.next() {
                    Some("kind") => {
                        init.kind = match it.next() {
                            Some("shock") => FrontKind::Shock,
                            Some("contact") => FrontKind::Contact,
                            other => {
                                return Err(bad(format!("line {}: bad kind {other:?}", ln + 1)))
                            }
                        }
                    }
                    Some("closed") => init.closed = true,
                    Some("start") => {
                        init.start = Some(parse_role(it.next().unwrap_or_default())?)
                    }
                    Some("end") => init.end = Some(parse_role(it.next().unwrap_or_default())?),
                    Some("name") => {
                        if let Some(n) = it.next() {
                            init.name = n.to_string();
                        }
                    }
                    _ => {} // plain comment
                }
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|v| {
                    v.parse()
                        .map_err(|_| bad(format!("line {}: bad number '{v}'", ln + 1)))
                })
                .collect::<Result<_>>()?;
            match vals.len() {
                2 => init.points.push((Vec2::new(vals[0], vals[1]), None)),
                10 => {
                    let up = GasState::new(vals[2], Vec2::new(vals[3], vals[4]), vals[5]);
                    let down = GasState::new(vals[6], Vec2::new(vals[7], vals[8]), vals[9]);
                    up.validate()?;
                    down.validate()?;
                    init.points
                        .push((Vec2::new(vals[0], vals[1]), Some((up, down))));
                }
                n => {
                    return Err(bad(format!(
                        "line {}: expected 2 or 10 numbers, got {n}",
                        ln + 1
                    )))
                }
            }
        }
        if init.points.len() < 2 {
            return Err(bad(format!(
                "front '{}' has {} points, needs at least 2",
                init.name,
                init.points.len()
            )));
        }
        Ok(init)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "# name {}", self.name);
        let _ = writeln!(
            out,
            "# kind {}",
            match self.kind {
                FrontKind::Shock => "shock",
                FrontKind::Contact => "contact",
            }
        );
        if self.closed {
            let _ = writeln!(out, "# closed");
        }
        let role = |r: &RoleSpec| match r {
            RoleSpec::Boundary(p) => format!("boundary:{p}"),
            RoleSpec::Interaction(p) => format!("interaction:{p}"),
        };
        if let Some(r) = &self.start {
            let _ = writeln!(out, "# start {}", role(r));
        }
        if let Some(r) = &self.end {
            let _ = writeln!(out, "# end {}", role(r));
        }
        for (x, states) in &self.points {
            match states {
                None => {
                    let _ = writeln!(out, "{:.17e} {:.17e}", x.x, x.y);
                }
                Some((u, d)) => {
                    let _ = writeln!(
                        out,
                        "{:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
                        x.x, x.y, u.rho, u.vel.x, u.vel.y, u.p, d.rho, d.vel.x, d.vel.y, d.p
                    );
                }
            }
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(rho: f64, p: f64) -> GasState {
        GasState::new(rho, Vec2::ZERO, p)
    }

    fn straight_front(n: usize) -> Front {
        // along y = 0, walking +x; upstream (left of walk) is y > 0
        let points = (0..n)
            .map(|i| {
                FrontPoint::new(
                    Vec2::new(i as f64, 0.0),
                    uniform(1.0, 1.0),
                    uniform(2.0, 3.0),
                )
            })
            .collect();
        Front {
            name: "f".into(),
            kind: FrontKind::Shock,
            points,
            closed: false,
            start: Some(EndpointRole::Boundary { patch: "b".into() }),
            end: Some(EndpointRole::Boundary { patch: "b".into() }),
            tracked: true,
        }
    }

    #[test]
    fn frames_straight_front() {
        let mut f = straight_front(3);
        f.compute_frames(&[0.0; 3], 1.0).unwrap();
        for p in &f.points {
            assert!((p.tau - Vec2::new(1.0, 0.0)).norm() < 1e-14);
            assert!((p.n - Vec2::new(0.0, 1.0)).norm() < 1e-14);
        }
        let gas = GasModel::new(1.4).unwrap();
        f.validate_orientation(&gas).unwrap();
        // upstream above / downstream below per the orientation convention
        assert_eq!(f.side_of(Vec2::new(1.0, 0.5)), Side::Up);
        assert_eq!(f.side_of(Vec2::new(1.0, -0.5)), Side::Down);
    }

    #[test]
    fn frames_two_point_front() {
        let mut f = straight_front(2);
        f.compute_frames(&[0.0; 2], 1.0).unwrap();
        assert!((f.points[0].tau - f.points[1].tau).norm() < 1e-14);
    }

    #[test]
    fn frames_circle_accuracy() {
        // circular front of radius 1.5 walked counter-clockwise so the left
        // side of the walk, where the normal points, is the supersonic core
        let n = 64;
        let r = 1.5;
        let points: Vec<FrontPoint> = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                FrontPoint::new(
                    Vec2::new(r * a.cos(), r * a.sin()),
                    uniform(1.0, 1.0),
                    uniform(2.0, 3.0),
                )
            })
            .collect();
        let mut f = Front {
            name: "circle".into(),
            kind: FrontKind::Shock,
            points,
            closed: true,
            start: None,
            end: None,
            tracked: true,
        };
        f.compute_frames(&vec![0.0; n], 0.1).unwrap();
        let ds = std::f64::consts::TAU * r / n as f64;
        for p in &f.points {
            let inward = (Vec2::ZERO - p.x).normalized();
            let err = (p.n - inward).norm();
            // centered stencils are O(ds^2) accurate on the circle
            assert!(err < ds * ds, "normal error {err} vs ds^2 {}", ds * ds);
        }
        assert!(f.is_simple());
    }

    #[test]
    fn frames_reject_coincident_points() {
        let mut f = straight_front(3);
        f.points[1].x = f.points[0].x;
        assert!(f.compute_frames(&[0.0; 3], 1.0).is_err());
    }

    #[test]
    fn upwind_stencil_when_supersonic() {
        let mut f = straight_front(3);
        f.points[1].x = Vec2::new(1.0, 0.3); // kink
        f.compute_frames(&[0.0, 2.0, 0.0], 1.0).unwrap();
        let expect = (f.points[1].x - f.points[0].x).normalized();
        assert!((f.points[1].tau - expect).norm() < 1e-14);
        // centered when subsonic
        f.compute_frames(&[0.0, 0.5, 0.0], 1.0).unwrap();
        let expect = (f.points[2].x - f.points[0].x).normalized();
        assert!((f.points[1].tau - expect).norm() < 1e-14);
    }

    #[test]
    fn self_intersection_detected() {
        let mut f = straight_front(4);
        f.points[0].x = Vec2::new(0.0, 0.5);
        f.points[1].x = Vec2::new(2.0, 0.5);
        f.points[2].x = Vec2::new(0.5, 1.0);
        f.points[3].x = Vec2::new(0.5, 0.0);
        // edge 2->3 crosses edge 0->1
        assert!(!f.is_simple());
    }

    #[test]
    fn front_file_round_trip() {
        let init = FrontInit {
            name: "is1".into(),
            kind: FrontKind::Contact,
            closed: false,
            start: Some(RoleSpec::Boundary("inlet".into())),
            end: Some(RoleSpec::Interaction("qp".into())),
            points: vec![
                (Vec2::new(0.0, 0.5), None),
                (
                    Vec2::new(1.0, 0.75),
                    Some((uniform(1.0, 1.0), uniform(2.0, 1.0))),
                ),
            ],
        };
        let path = std::env::temp_dir().join("edit2d_front_rt.txt");
        init.write(&path).unwrap();
        let back = FrontInit::read(&path).unwrap();
        assert_eq!(back.name, "is1");
        assert_eq!(back.kind, FrontKind::Contact);
        assert_eq!(back.start, Some(RoleSpec::Boundary("inlet".into())));
        assert_eq!(back.end, Some(RoleSpec::Interaction("qp".into())));
        assert_eq!(back.points.len(), 2);
        assert!(back.points[0].1.is_none());
        assert!(back.points[1].1.is_some());
    }

    #[test]
    fn front_file_rejects_garbage() {
        assert!(FrontInit::parse("0 0 1\n1 1\n", "f").is_err());
        assert!(FrontInit::parse("# kind sideways\n0 0\n1 1\n", "f").is_err());
        assert!(FrontInit::parse("0 0\n", "f").is_err());
    }
}
