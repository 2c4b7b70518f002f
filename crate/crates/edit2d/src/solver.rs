//! Node-centered finite-volume Euler solver on the median-dual cells of the
//! computational mesh. Second order in space through least-squares slopes
//! with van Albada limiting; explicit pseudo-time stepping with optional
//! local time steps for steady convergence. Surrogate boundaries act as
//! supersonic outflows on the upstream side and as strong Dirichlet data on
//! the side updated by the backward transfer.

use crate::cavity::ComputationalMesh;
use crate::gas::{GasModel, GasState};
use crate::geom::Vec2;
use crate::mesh::Triangulation;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCondition {
    SupersonicInflow(GasState),
    SupersonicOutflow,
    SubsonicOutflow { p_out: f64 },
    SlipWall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxScheme {
    Hllc,
    Rusanov,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub cfl: f64,
    pub flux: FluxScheme,
    /// 1 = first order, 2 = limited linear reconstruction.
    pub order: usize,
    /// Local pseudo-time steps (steady runs) or the global minimum.
    pub local_dt: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            cfl: 0.8,
            flux: FluxScheme::Hllc,
            order: 2,
            local_dt: true,
        }
    }
}

/// Per-node flow state over the background mesh (inactive nodes keep stale
/// values) plus the pseudo-time iteration counter.
#[derive(Clone, Debug)]
pub struct SolverField {
    pub states: Vec<GasState>,
    pub iteration: usize,
}

impl SolverField {
    pub fn uniform(n: usize, state: GasState) -> Self {
        SolverField {
            states: vec![state; n],
            iteration: 0,
        }
    }

    pub fn from_fn(tri: &Triangulation, f: impl Fn(Vec2) -> GasState) -> Self {
        SolverField {
            states: tri.nodes().iter().map(|&p| f(p)).collect(),
            iteration: 0,
        }
    }

    /// Roe parameter vectors of all nodes.
    pub fn roe_field(&self, gas: &GasModel) -> Vec<[f64; 4]> {
        self.states.iter().map(|s| s.to_roe(gas).0).collect()
    }
}

#[derive(Clone, Copy, Debug)]
enum ClosureKind {
    Patch(usize),
    Surrogate,
}

#[derive(Clone, Copy, Debug)]
struct DualFace {
    i: usize,
    j: usize,
    /// Oriented i -> j, magnitude equals the face length.
    normal: Vec2,
}

#[derive(Clone, Copy, Debug)]
struct ClosureFace {
    node: usize,
    /// Outward, magnitude equals half the boundary edge length.
    normal: Vec2,
    kind: ClosureKind,
}

/// Geometry of the median-dual tessellation restricted to the active cells,
/// rebuilt whenever the cavity changes.
pub struct DualGeometry {
    faces: Vec<DualFace>,
    closures: Vec<ClosureFace>,
    pub dual_area: Vec<f64>,
    pub active_node: Vec<bool>,
    /// Characteristic dual radius area / perimeter per node.
    pub dual_radius: Vec<f64>,
    /// Per-node least-squares neighbor lists (over dual faces).
    neighbors_off: Vec<usize>,
    neighbors_dat: Vec<usize>,
}

impl DualGeometry {
    pub fn build(tri: &Triangulation, cm: &ComputationalMesh) -> DualGeometry {
        let nn = tri.n_nodes();
        let mut dual_area = vec![0.0f64; nn];
        for c in 0..tri.n_cells() {
            if cm.active_cell[c] {
                let a3 = tri.cell_area(c) / 3.0;
                for v in tri.cell(c) {
                    dual_area[v] += a3;
                }
            }
        }
        let mut faces = Vec::new();
        let mut closures = Vec::new();
        for (eid, e) in tri.edges().iter().enumerate() {
            let [i, j] = e.nodes;
            let (xi, xj) = (tri.node(i), tri.node(j));
            let mid = (xi + xj) * 0.5;
            let mut normal = Vec2::ZERO;
            let mut n_active = 0;
            for c in e.cells.into_iter().flatten() {
                if !cm.active_cell[c] {
                    continue;
                }
                n_active += 1;
                let g = tri.cell_centroid(c);
                let mut nf = (g - mid).perp();
                if nf.dot(xj - xi) < 0.0 {
                    nf = -nf;
                }
                normal += nf;
            }
            if n_active > 0 {
                faces.push(DualFace { i, j, normal });
            }
            // closure pieces where the active region ends on this edge
            let closure = match e.cells {
                [Some(c0), None] if cm.active_cell[c0] => {
                    let pid = tri
                        .boundary_patch_of_edge(eid)
                        .expect("boundary edge without patch");
                    Some((c0, ClosureKind::Patch(pid)))
                }
                [Some(c0), Some(c1)] if cm.active_cell[c0] != cm.active_cell[c1] => {
                    let act = if cm.active_cell[c0] { c0 } else { c1 };
                    Some((act, ClosureKind::Surrogate))
                }
                _ => None,
            };
            if let Some((act, kind)) = closure {
                let mut out = (xj - xi).perp();
                if out.dot(tri.cell_centroid(act) - mid) > 0.0 {
                    out = -out;
                }
                for node in [i, j] {
                    closures.push(ClosureFace {
                        node,
                        normal: out * 0.5,
                        kind,
                    });
                }
            }
        }
        // perimeter of each dual cell for the time-step length scale
        let mut perim = vec![0.0f64; nn];
        for f in &faces {
            let l = f.normal.norm();
            perim[f.i] += l;
            perim[f.j] += l;
        }
        for c in &closures {
            perim[c.node] += c.normal.norm();
        }
        let dual_radius = (0..nn)
            .map(|i| {
                if perim[i] > 0.0 {
                    dual_area[i] / perim[i]
                } else {
                    0.0
                }
            })
            .collect();
        // neighbor lists
        let mut counts = vec![0usize; nn];
        for f in &faces {
            counts[f.i] += 1;
            counts[f.j] += 1;
        }
        let mut neighbors_off = vec![0usize; nn + 1];
        for i in 0..nn {
            neighbors_off[i + 1] = neighbors_off[i] + counts[i];
        }
        let mut neighbors_dat = vec![0usize; neighbors_off[nn]];
        let mut cur = neighbors_off.clone();
        for f in &faces {
            neighbors_dat[cur[f.i]] = f.j;
            cur[f.i] += 1;
            neighbors_dat[cur[f.j]] = f.i;
            cur[f.j] += 1;
        }
        DualGeometry {
            faces,
            closures,
            dual_area,
            active_node: cm.active_node.clone(),
            dual_radius,
            neighbors_off,
            neighbors_dat,
        }
    }

    fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors_dat[self.neighbors_off[i]..self.neighbors_off[i + 1]]
    }
}

type Prim = [f64; 4]; // rho, u, v, p

fn prim_of(s: &GasState) -> Prim {
    [s.rho, s.vel.x, s.vel.y, s.p]
}

fn state_of(w: Prim) -> GasState {
    GasState::new(w[0], Vec2::new(w[1], w[2]), w[3])
}

/// Analytic Euler flux through a unit normal, times `area`.
fn analytic_flux(s: &GasState, nhat: Vec2, area: f64, gas: &GasModel) -> [f64; 4] {
    let un = s.vel.dot(nhat);
    let re = s.rho * s.total_energy(gas);
    [
        area * s.rho * un,
        area * (s.rho * s.vel.x * un + s.p * nhat.x),
        area * (s.rho * s.vel.y * un + s.p * nhat.y),
        area * (re + s.p) * un,
    ]
}

fn rusanov_flux(l: &GasState, r: &GasState, nhat: Vec2, area: f64, gas: &GasModel) -> [f64; 4] {
    let fl = analytic_flux(l, nhat, 1.0, gas);
    let fr = analytic_flux(r, nhat, 1.0, gas);
    let smax = (l.vel.dot(nhat).abs() + l.sound_speed(gas))
        .max(r.vel.dot(nhat).abs() + r.sound_speed(gas));
    let ul = l.to_conservative(gas);
    let ur = r.to_conservative(gas);
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = area * (0.5 * (fl[k] + fr[k]) - 0.5 * smax * (ur[k] - ul[k]));
    }
    out
}

fn hllc_flux(l: &GasState, r: &GasState, nhat: Vec2, area: f64, gas: &GasModel) -> [f64; 4] {
    let that = nhat.perp();
    let (unl, utl) = (l.vel.dot(nhat), l.vel.dot(that));
    let (unr, utr) = (r.vel.dot(nhat), r.vel.dot(that));
    let (al, ar) = (l.sound_speed(gas), r.sound_speed(gas));
    let (hl, hr) = (l.total_enthalpy(gas), r.total_enthalpy(gas));
    // Roe-averaged normal speed and sound speed for the outer wave estimates
    let (sl_, sr_) = (l.rho.sqrt(), r.rho.sqrt());
    let inv = 1.0 / (sl_ + sr_);
    let un_roe = (sl_ * unl + sr_ * unr) * inv;
    let ut_roe = (sl_ * utl + sr_ * utr) * inv;
    let h_roe = (sl_ * hl + sr_ * hr) * inv;
    let a2 = gas.gm1() * (h_roe - 0.5 * (un_roe * un_roe + ut_roe * ut_roe));
    let a_roe = a2.max(1e-300).sqrt();
    let s_l = (unl - al).min(un_roe - a_roe);
    let s_r = (unr + ar).max(un_roe + a_roe);
    let s_star = (r.p - l.p + l.rho * unl * (s_l - unl) - r.rho * unr * (s_r - unr))
        / (l.rho * (s_l - unl) - r.rho * (s_r - unr));

    let flux_side = |s: &GasState, un: f64| -> [f64; 4] {
        let re = s.rho * s.total_energy(gas);
        [
            s.rho * un,
            s.rho * s.vel.x * un + s.p * nhat.x,
            s.rho * s.vel.y * un + s.p * nhat.y,
            (re + s.p) * un,
        ]
    };
    let star_flux = |s: &GasState, un: f64, s_k: f64| -> [f64; 4] {
        let u = s.to_conservative(gas);
        let fk = flux_side(s, un);
        let coef = s.rho * (s_k - un) / (s_k - s_star);
        let ustar = [
            coef,
            coef * (s.vel.x + (s_star - un) * nhat.x),
            coef * (s.vel.y + (s_star - un) * nhat.y),
            coef * (s.total_energy(gas) + (s_star - un) * (s_star + s.p / (s.rho * (s_k - un)))),
        ];
        let mut out = [0.0; 4];
        for k in 0..4 {
            out[k] = fk[k] + s_k * (ustar[k] - u[k]);
        }
        out
    };
    let f = if s_l >= 0.0 {
        flux_side(l, unl)
    } else if s_star >= 0.0 {
        star_flux(l, unl, s_l)
    } else if s_r > 0.0 {
        star_flux(r, unr, s_r)
    } else {
        flux_side(r, unr)
    };
    [area * f[0], area * f[1], area * f[2], area * f[3]]
}

fn numerical_flux(
    scheme: FluxScheme,
    l: &GasState,
    r: &GasState,
    normal: Vec2,
    gas: &GasModel,
) -> [f64; 4] {
    let area = normal.norm();
    let nhat = normal / area;
    match scheme {
        FluxScheme::Hllc => hllc_flux(l, r, nhat, area, gas),
        FluxScheme::Rusanov => rusanov_flux(l, r, nhat, area, gas),
    }
}

/// Unweighted least-squares gradients of the primitive variables.
fn lsq_gradients(
    tri: &Triangulation,
    geom: &DualGeometry,
    states: &[GasState],
) -> Vec<[Vec2; 4]> {
    let nn = tri.n_nodes();
    let mut grads = vec![[Vec2::ZERO; 4]; nn];
    for i in 0..nn {
        if !geom.active_node[i] {
            continue;
        }
        let xi = tri.node(i);
        let wi = prim_of(&states[i]);
        let (mut a11, mut a12, mut a22) = (0.0f64, 0.0, 0.0);
        let mut bx = [0.0f64; 4];
        let mut by = [0.0f64; 4];
        for &j in geom.neighbors(i) {
            let r = tri.node(j) - xi;
            let w = 1.0 / r.norm2();
            a11 += w * r.x * r.x;
            a12 += w * r.x * r.y;
            a22 += w * r.y * r.y;
            let wj = prim_of(&states[j]);
            for k in 0..4 {
                let d = wj[k] - wi[k];
                bx[k] += w * r.x * d;
                by[k] += w * r.y * d;
            }
        }
        let det = a11 * a22 - a12 * a12;
        if det.abs() < 1e-14 * (a11 * a22).max(1e-300) {
            continue; // degenerate stencil: keep zero gradient
        }
        for k in 0..4 {
            grads[i][k] = Vec2::new(
                (a22 * bx[k] - a12 * by[k]) / det,
                (a11 * by[k] - a12 * bx[k]) / det,
            );
        }
    }
    grads
}

fn van_albada(a: f64, b: f64) -> f64 {
    const EPS: f64 = 1e-28;
    let s = (2.0 * a * b + EPS) / (a * a + b * b + EPS);
    s.max(0.0) * (a + b) / 4.0
}

fn reconstruct(
    wi: Prim,
    wj: Prim,
    gi: &[Vec2; 4],
    gj: &[Vec2; 4],
    rij: Vec2,
) -> (Prim, Prim) {
    let mut wl = wi;
    let mut wr = wj;
    for k in 0..4 {
        let dc = wj[k] - wi[k];
        let bi = 2.0 * gi[k].dot(rij) - dc;
        let bj = 2.0 * gj[k].dot(rij) - dc;
        wl[k] = wi[k] + van_albada(dc, bi);
        wr[k] = wj[k] - van_albada(dc, bj);
    }
    // order drop on non-physical extrapolations
    if wl[0] <= 0.0 || wl[3] <= 0.0 {
        wl = wi;
    }
    if wr[0] <= 0.0 || wr[3] <= 0.0 {
        wr = wj;
    }
    (wl, wr)
}

/// Boundary state for a subsonic outflow with imposed static pressure:
/// entropy and tangential velocity from the interior, the outgoing Riemann
/// invariant closes the normal velocity.
fn subsonic_outflow_state(inner: &GasState, p_out: f64, nhat: Vec2, gas: &GasModel) -> GasState {
    let g = gas.gamma();
    let a_in = inner.sound_speed(gas);
    let un = inner.vel.dot(nhat);
    let ut = inner.vel - nhat * un;
    let s = inner.entropy(gas);
    let rho_b = (p_out / s).powf(1.0 / g);
    let a_b = (g * p_out / rho_b).sqrt();
    let un_b = un + 2.0 * (a_in - a_b) / gas.gm1();
    GasState::new(rho_b, ut + nhat * un_b, p_out)
}

/// One explicit pseudo-time step. `frozen` nodes keep their state (strong
/// Dirichlet data on surrogate boundaries). Returns the global minimum time
/// step, which also drives the front displacement.
pub fn advance(
    field: &mut SolverField,
    tri: &Triangulation,
    geom: &DualGeometry,
    bc: &[BoundaryCondition],
    frozen: &[bool],
    opts: &SolverOptions,
    gas: &GasModel,
) -> Result<f64> {
    let nn = tri.n_nodes();
    let states = &field.states;
    let grads = if opts.order >= 2 {
        lsq_gradients(tri, geom, states)
    } else {
        vec![[Vec2::ZERO; 4]; nn]
    };

    let mut residual = vec![[0.0f64; 4]; nn];
    for f in &geom.faces {
        let (i, j) = (f.i, f.j);
        let rij = tri.node(j) - tri.node(i);
        let (wl, wr) = if opts.order >= 2 {
            reconstruct(prim_of(&states[i]), prim_of(&states[j]), &grads[i], &grads[j], rij)
        } else {
            (prim_of(&states[i]), prim_of(&states[j]))
        };
        let fl = numerical_flux(opts.flux, &state_of(wl), &state_of(wr), f.normal, gas);
        for k in 0..4 {
            residual[i][k] += fl[k];
            residual[j][k] -= fl[k];
        }
    }
    for c in &geom.closures {
        let s = &states[c.node];
        let area = c.normal.norm();
        let nhat = c.normal / area;
        let fl = match c.kind {
            ClosureKind::Surrogate => analytic_flux(s, nhat, area, gas),
            ClosureKind::Patch(pid) => match &bc[pid] {
                BoundaryCondition::SupersonicInflow(state) => {
                    analytic_flux(state, nhat, area, gas)
                }
                BoundaryCondition::SupersonicOutflow => analytic_flux(s, nhat, area, gas),
                BoundaryCondition::SubsonicOutflow { p_out } => {
                    let b = subsonic_outflow_state(s, *p_out, nhat, gas);
                    analytic_flux(&b, nhat, area, gas)
                }
                BoundaryCondition::SlipWall => {
                    [0.0, area * s.p * nhat.x, area * s.p * nhat.y, 0.0]
                }
            },
        };
        for k in 0..4 {
            residual[c.node][k] += fl[k];
        }
    }

    // time steps: cfl * dual radius / (|u| + a)
    let mut dt_min = f64::INFINITY;
    let mut dts = vec![0.0f64; nn];
    for i in 0..nn {
        if !geom.active_node[i] || geom.dual_area[i] <= 0.0 {
            continue;
        }
        let s = &states[i];
        let speed = s.vel.norm() + s.sound_speed(gas);
        let dt = opts.cfl * geom.dual_radius[i] / speed;
        dts[i] = dt;
        dt_min = dt_min.min(dt);
    }
    if !dt_min.is_finite() {
        return Err(Error::Mesh("no active nodes to advance".into()));
    }

    let mut new_states = states.clone();
    for i in 0..nn {
        if !geom.active_node[i] || frozen[i] {
            continue;
        }
        let dt = if opts.local_dt { dts[i] } else { dt_min };
        let mut u = states[i].to_conservative(gas);
        let scale = dt / geom.dual_area[i];
        for k in 0..4 {
            u[k] -= scale * residual[i][k];
        }
        new_states[i] = GasState::from_conservative(u, gas).map_err(|_| Error::SolverBlowup {
            node: i,
            rho: u[0],
            p: f64::NAN,
        })?;
    }
    field.states = new_states;
    field.iteration += 1;
    Ok(dt_min)
}

/// Overwrite surrogate nodal states with the Dirichlet data produced by the
/// backward transfer. Every listed node must carry a state.
pub fn apply_surrogate_bc(
    field: &mut SolverField,
    updates: &[(usize, GasState)],
) -> Result<usize> {
    for &(node, state) in updates {
        state.validate().map_err(|_| Error::Transfer(format!(
            "missing or non-physical Dirichlet state for surrogate node {node}"
        )))?;
        field.states[node] = state;
    }
    Ok(updates.len())
}

/// Per-variable L2 pseudo-time residuals over the active nodes.
pub fn residual_norms(prev: &SolverField, next: &SolverField, active: &[bool]) -> [f64; 4] {
    let mut acc = [0.0f64; 4];
    let mut n = 0usize;
    for i in 0..prev.states.len() {
        if !active[i] {
            continue;
        }
        n += 1;
        let a = prim_of(&prev.states[i]);
        let b = prim_of(&next.states[i]);
        for k in 0..4 {
            acc[k] += (b[k] - a[k]) * (b[k] - a[k]);
        }
    }
    if n == 0 {
        return [0.0; 4];
    }
    acc.map(|v| (v / n as f64).sqrt())
}

/// Total conserved quantities over the active dual cells.
pub fn total_conserved(field: &SolverField, geom: &DualGeometry, gas: &GasModel) -> [f64; 4] {
    let mut acc = [0.0f64; 4];
    for i in 0..field.states.len() {
        if geom.dual_area[i] <= 0.0 {
            continue;
        }
        let u = field.states[i].to_conservative(gas);
        for k in 0..4 {
            acc[k] += geom.dual_area[i] * u[k];
        }
    }
    acc
}
