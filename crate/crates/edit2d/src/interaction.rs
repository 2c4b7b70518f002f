//! Models for points where fronts meet each other or a wall: the velocity
//! composition rules for same-family quadruple points, triple points and
//! regular wall reflections, plus the fully coupled triple-point solve based
//! on steady three-shock theory in the frame moving with the point.

use crate::gas::{GasModel, GasState};
use crate::geom::Vec2;
use crate::verify::{deflection_angle, normal_shock};
use crate::{Error, Result};

/// Which end of a member front is pinned to the interaction point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhichEnd {
    Start,
    End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InteractionKind {
    /// Same-family shock-shock interaction; members [IS1, IS2, RS1, CD?].
    QuadruplePoint,
    /// Mach-reflection triple point, heuristic velocity; members [IS, MS, ...].
    TriplePoint,
    /// Fully coupled triple point; members [IS, RS, MS, CD].
    TriplePointFull,
    /// Regular reflection sliding along a wall; members [IS, RS].
    WallReflection,
}

/// A shared front endpoint with its velocity model.
#[derive(Clone, Debug)]
pub struct InteractionPoint {
    pub name: String,
    pub kind: InteractionKind,
    /// Member fronts in the role order of the kind.
    pub members: Vec<(usize, WhichEnd)>,
    /// Wall patch for reflections.
    pub wall_patch: Option<String>,
    /// Last computed velocity.
    pub velocity: Vec2,
}

/// Velocity of a same-family quadruple point: the first incident shock's
/// endpoint velocity plus the second one's component along the first shock's
/// tangent.
pub fn qp_velocity(omega_is1: Vec2, omega_is2: Vec2, tau1: Vec2) -> Vec2 {
    omega_is1 + tau1 * omega_is2.dot(tau1)
}

/// Simplified triple-point velocity from the incident-shock and Mach-stem
/// endpoint velocities; same composition as the quadruple point.
pub fn tp_velocity_heuristic(omega_is: Vec2, omega_ms: Vec2, tau1: Vec2) -> Vec2 {
    omega_is + tau1 * omega_ms.dot(tau1)
}

/// Wall reflection points slide along the wall with the tangential component
/// of the incident-shock endpoint velocity.
pub fn wall_ip_velocity(omega_is: Vec2, wall_tangent: Vec2) -> Vec2 {
    wall_tangent * omega_is.dot(wall_tangent)
}

// ---------------------------------------------------------------------------
// steady three-shock theory
// ---------------------------------------------------------------------------

/// Steady three-shock solution for a Mach reflection: incident shock
/// deflecting the stream by theta2, reflected shock (weak branch) and Mach
/// stem (strong branch) meeting the pressure and flow-angle match across the
/// slip line.
#[derive(Clone, Copy, Debug)]
pub struct ThreeShock {
    /// Pressure behind the slip line over the free-stream pressure.
    pub p_cd: f64,
    /// Flow deflection of the slip-line region from the free stream, radians.
    pub theta_cd: f64,
    /// Reflected-shock angle from the state-2 flow direction.
    pub beta_rs: f64,
    /// Mach-stem angle from the free-stream direction.
    pub beta_ms: f64,
    pub m3: f64,
    pub m4: f64,
}

/// Shock angle that produces the given pressure ratio at upstream Mach m.
fn beta_from_pressure_ratio(m: f64, pr: f64, gas: &GasModel) -> Result<f64> {
    let g = gas.gamma();
    let sin2 = ((g + 1.0) * pr + (g - 1.0)) / (2.0 * g) / (m * m);
    if !(0.0..=1.0 + 1e-12).contains(&sin2) {
        return Err(Error::NoSolution(format!(
            "pressure ratio {pr} unreachable at M = {m}"
        )));
    }
    Ok(sin2.min(1.0).sqrt().asin())
}

pub fn three_shock_theory(m1: f64, theta2: f64, gas: &GasModel) -> Result<ThreeShock> {
    let os_is = crate::verify::oblique_shock(m1, theta2, gas, crate::verify::ShockBranch::Weak)?;
    let p2 = os_is.p_ratio;
    let m2 = os_is.m2;
    // parametrize by the pressure p behind the slip line (units of p1):
    // theta3(p) from the reflected-shock polar at M2 grows with p while
    // theta4(p) from the Mach-stem polar at M1 shrinks, so the flow-angle
    // mismatch brackets a root between p2 and the normal-shock limit
    let ns1 = normal_shock(m1, gas)?;
    let angle_residual = |p: f64| -> Result<f64> {
        let beta_rs = beta_from_pressure_ratio(m2, p / p2, gas)?;
        let theta3 = deflection_angle(m2, beta_rs, gas);
        let beta_ms = beta_from_pressure_ratio(m1, p, gas)?;
        let theta4 = deflection_angle(m1, beta_ms, gas);
        Ok((theta2 - theta3) - theta4)
    };
    let (mut lo, mut hi) = (p2 * (1.0 + 1e-9), ns1.p_ratio * (1.0 - 1e-12));
    let (rlo, rhi) = (angle_residual(lo)?, angle_residual(hi)?);
    if rlo * rhi > 0.0 {
        // scan for a sign change; the polars may cross twice
        let mut bracket = None;
        let mut prev = (lo, rlo);
        for k in 1..=400 {
            let p = lo + (hi - lo) * k as f64 / 400.0;
            let r = angle_residual(p)?;
            if prev.1 * r <= 0.0 {
                bracket = Some((prev.0, p));
                break;
            }
            prev = (p, r);
        }
        let Some((a, b)) = bracket else {
            return Err(Error::NoSolution(format!(
                "no three-shock solution at M1 = {m1}, theta2 = {:.3} deg",
                theta2.to_degrees()
            )));
        };
        lo = a;
        hi = b;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if angle_residual(mid)?.signum() == angle_residual(lo)?.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let beta_rs = beta_from_pressure_ratio(m2, p / p2, gas)?;
    let theta3 = deflection_angle(m2, beta_rs, gas);
    let beta_ms = beta_from_pressure_ratio(m1, p, gas)?;
    let theta4 = deflection_angle(m1, beta_ms, gas);
    let mn3 = normal_shock((m2 * beta_rs.sin()).max(1.0 + 1e-14), gas)?.m2;
    let mn4 = normal_shock((m1 * beta_ms.sin()).max(1.0 + 1e-14), gas)?.m2;
    Ok(ThreeShock {
        p_cd: p,
        theta_cd: theta4,
        beta_rs,
        beta_ms,
        m3: mn3 / (beta_rs - theta3).sin(),
        m4: mn4 / (beta_ms - theta4).sin(),
    })
}

// ---------------------------------------------------------------------------
// fully coupled triple point
// ---------------------------------------------------------------------------

/// Output of the coupled triple-point solve.
#[derive(Clone, Copy, Debug)]
pub struct TpSolution {
    /// State behind the reflected shock (lab frame).
    pub state3: GasState,
    /// State behind the Mach stem (lab frame).
    pub state4: GasState,
    /// Unit direction of the slip line leaving the triple point, pointing
    /// downstream (lab frame).
    pub cd_dir: Vec2,
    /// Triple-point velocity (lab frame).
    pub omega_tp: Vec2,
    /// Mach-stem tangent direction at the triple point implied by the solve.
    pub ms_tangent: Vec2,
    /// Max-norm of the matching residuals (pressure scaled by p1, angle).
    pub residual: f64,
}

/// Jump across a steady straight shock whose line has unit tangent `t`, for
/// an upstream state crossing it. Errors when the normal Mach is subsonic.
pub fn oblique_jump_across(t: Vec2, upstream: &GasState, gas: &GasModel) -> Result<GasState> {
    let mut m = t.perp();
    let un = upstream.vel.dot(m);
    let m_signed = if un < 0.0 { -m } else { m };
    m = m_signed;
    let un = upstream.vel.dot(m);
    let a = upstream.sound_speed(gas);
    let mach_n = un / a;
    if mach_n <= 1.0 {
        return Err(Error::NoSolution(format!(
            "normal Mach {mach_n:.4} <= 1 across shock"
        )));
    }
    let ns = normal_shock(mach_n, gas)?;
    let ut = upstream.vel.dot(t);
    let un2 = un / ns.rho_ratio;
    Ok(GasState::new(
        upstream.rho * ns.rho_ratio,
        t * ut + m * un2,
        upstream.p * ns.p_ratio,
    ))
}

fn rotate(v: Vec2, ang: f64) -> Vec2 {
    Vec2::new(
        v.x * ang.cos() - v.y * ang.sin(),
        v.x * ang.sin() + v.y * ang.cos(),
    )
}

/// Couple the four states around the triple point with its velocity: in the
/// frame moving with omega_tp = omega_is + w tau1, the incident shock is
/// steady by construction; the unknowns are the Mach-stem angle and the
/// sliding speed w, driven by a damped Newton on the pressure and flow-angle
/// match across the slip line. The reflected-shock direction is taken from
/// the current front geometry (`rs_tangent`).
#[allow(clippy::too_many_arguments)]
pub fn tp_full_solve(
    state1: &GasState,
    state2: &GasState,
    rs_tangent: Vec2,
    omega_is: Vec2,
    tau1: Vec2,
    ms_tangent_guess: Vec2,
    gas: &GasModel,
) -> Result<TpSolution> {
    state1.validate()?;
    state2.validate()?;
    if (state2.p - state1.p).abs() < 1e-10 * state1.p {
        return Err(Error::NoSolution(
            "zero-strength incident shock cannot form a triple point".into(),
        ));
    }
    // unknowns: x = [psi, w] with psi the Mach-stem tangent angle
    let mut x = [ms_tangent_guess.y.atan2(ms_tangent_guess.x), 0.0];
    let residual = |x: &[f64; 2]| -> Result<[f64; 2]> {
        let (psi, w) = (x[0], x[1]);
        let v_tp = omega_is + tau1 * w;
        let s1 = GasState::new(state1.rho, state1.vel - v_tp, state1.p);
        let s2 = GasState::new(state2.rho, state2.vel - v_tp, state2.p);
        let ms_t = Vec2::new(psi.cos(), psi.sin());
        let s4 = oblique_jump_across(ms_t, &s1, gas)?;
        let s3 = oblique_jump_across(rs_tangent, &s2, gas)?;
        let p_match = (s3.p - s4.p) / state1.p;
        let ang_match = s3.vel.normalized().cross(s4.vel.normalized());
        Ok([p_match, ang_match])
    };
    let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());
    let mut f = residual(&x)?;
    let mut fnorm = norm(&f);
    let mut iters = 0;
    while fnorm > 1e-12 && iters < 80 {
        iters += 1;
        // finite-difference Jacobian
        let eps = [1e-8, 1e-8];
        let mut jac = [[0.0f64; 2]; 2];
        for col in 0..2 {
            let mut xp = x;
            xp[col] += eps[col];
            let fp = residual(&xp)?;
            for row in 0..2 {
                jac[row][col] = (fp[row] - f[row]) / eps[col];
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            return Err(Error::NewtonFailed {
                iters,
                residual: fnorm,
                context: "singular triple-point Jacobian".into(),
            });
        }
        let dx = [
            (jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            (jac[0][0] * f[1] - jac[1][0] * f[0]) / det,
        ];
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [x[0] - step * dx[0], x[1] - step * dx[1]];
            match residual(&trial) {
                Ok(ft) if norm(&ft) < fnorm => {
                    x = trial;
                    f = ft;
                    fnorm = norm(&f);
                    accepted = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !accepted {
            break;
        }
    }
    if fnorm > 1e-10 {
        return Err(Error::NewtonFailed {
            iters,
            residual: fnorm,
            context: "triple-point coupling".into(),
        });
    }
    let (psi, w) = (x[0], x[1]);
    let v_tp = omega_is + tau1 * w;
    let s1 = GasState::new(state1.rho, state1.vel - v_tp, state1.p);
    let s2 = GasState::new(state2.rho, state2.vel - v_tp, state2.p);
    let ms_t = Vec2::new(psi.cos(), psi.sin());
    let s4f = oblique_jump_across(ms_t, &s1, gas)?;
    let s3f = oblique_jump_across(rs_tangent, &s2, gas)?;
    let cd_dir = (s3f.vel.normalized() + s4f.vel.normalized()).normalized();
    Ok(TpSolution {
        state3: GasState::new(s3f.rho, s3f.vel + v_tp, s3f.p),
        state4: GasState::new(s4f.rho, s4f.vel + v_tp, s4f.p),
        cd_dir,
        omega_tp: v_tp,
        ms_tangent: ms_t,
        residual: fnorm,
    })
}
