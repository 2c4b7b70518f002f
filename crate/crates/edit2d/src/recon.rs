//! Nodal gradient recovery on (possibly one-sided) cell patches around a
//! grid-point: area-weighted Green-Gauss averaging, Zienkiewicz-Zhu patch
//! recovery by weighted least squares over cell barycenters, and the legacy
//! auxiliary-triangle gradient that mixes one front point into the stencil.

use crate::geom::Vec2;
use crate::mesh::Triangulation;
use crate::{Error, Result};

/// Gradient recovery variants selectable per run mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientRecovery {
    /// No gradients: first-order transfers.
    FirstOrder,
    GreenGauss,
    ZienkiewiczZhu,
    /// Auxiliary-triangle gradient with the jump-corrected front state.
    AuxiliaryTriangle,
}

fn active_cells_of_node<'a>(
    tri: &'a Triangulation,
    node: usize,
    active: Option<&'a [bool]>,
) -> impl Iterator<Item = usize> + 'a {
    tri.cells_of_node(node)
        .iter()
        .copied()
        .filter(move |&c| active.map_or(true, |m| m[c]))
}

/// Area-weighted average of the cell-wise constant gradients of the active
/// cells around `node`. Exact for fields linear in (x, y).
pub fn green_gauss(
    tri: &Triangulation,
    node: usize,
    active: Option<&[bool]>,
    field_z: &[[f64; 4]],
) -> Result<[Vec2; 4]> {
    let mut total = 0.0;
    let mut grad = [Vec2::ZERO; 4];
    for c in active_cells_of_node(tri, node, active) {
        let a = tri.cell_area(c);
        let g = tri.cell_gradient(c, field_z)?;
        for k in 0..4 {
            grad[k] += g[k] * a;
        }
        total += a;
    }
    if total <= 0.0 {
        return Err(Error::Recon(format!(
            "node {node} has no active incident cell"
        )));
    }
    for g in &mut grad {
        *g = *g / total;
    }
    Ok(grad)
}

/// Solve the 3x3 system by elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Weighted least-squares fit of a linear polynomial P = [1, x, y] to vector
/// samples at `points`, evaluated at `x_eval`. Coordinates are centered and
/// scaled internally for conditioning. None when the normal matrix is
/// singular (collinear sample points).
pub fn fit_linear_vector_field(
    points: &[Vec2],
    weights: &[f64],
    samples: &[Vec2],
    x_eval: Vec2,
) -> Option<Vec2> {
    let h = weights.iter().sum::<f64>().sqrt().max(1e-300);
    let basis = |p: Vec2| [1.0, (p.x - x_eval.x) / h, (p.y - x_eval.y) / h];
    let mut mat = [[0.0f64; 3]; 3];
    let mut rhs = [[0.0f64; 3]; 2];
    for ((&p, &w), &s) in points.iter().zip(weights).zip(samples) {
        let b = basis(p);
        for i in 0..3 {
            for j in 0..3 {
                mat[i][j] += w * b[i] * b[j];
            }
            rhs[0][i] += w * b[i] * s.x;
            rhs[1][i] += w * b[i] * s.y;
        }
    }
    let ax = solve3(mat, rhs[0])?;
    let ay = solve3(mat, rhs[1])?;
    // P(x_eval) = [1, 0, 0] in the centered basis
    Some(Vec2::new(ax[0], ay[0]))
}

/// Zienkiewicz-Zhu patch recovery: fit a linear polynomial to the cell-wise
/// gradients sampled at cell barycenters (area weighted), then evaluate at the
/// node. Falls back to Green-Gauss when fewer than three cells are available
/// or the barycenters are collinear; the second return value reports whether
/// the fallback was taken.
pub fn zienkiewicz_zhu(
    tri: &Triangulation,
    node: usize,
    active: Option<&[bool]>,
    field_z: &[[f64; 4]],
) -> Result<([Vec2; 4], bool)> {
    let cells: Vec<usize> = active_cells_of_node(tri, node, active).collect();
    if cells.len() < 3 {
        return Ok((green_gauss(tri, node, active, field_z)?, true));
    }
    let points: Vec<Vec2> = cells.iter().map(|&c| tri.cell_centroid(c)).collect();
    let weights: Vec<f64> = cells.iter().map(|&c| tri.cell_area(c)).collect();
    let cell_grads: Vec<[Vec2; 4]> = cells
        .iter()
        .map(|&c| tri.cell_gradient(c, field_z))
        .collect::<Result<_>>()?;
    let mut grad = [Vec2::ZERO; 4];
    for k in 0..4 {
        let samples: Vec<Vec2> = cell_grads.iter().map(|g| g[k]).collect();
        match fit_linear_vector_field(&points, &weights, &samples, tri.node(node)) {
            Some(g) => grad[k] = g,
            None => return Ok((green_gauss(tri, node, active, field_z)?, true)),
        }
    }
    Ok((grad, false))
}

/// Cell gradient of the auxiliary triangle formed by one front point (carrying
/// its jump-corrected state) and two interior grid-points adjacent to `node`
/// that do not lie on a surrogate boundary.
pub fn auxiliary_triangle_gradient(
    tri: &Triangulation,
    node: usize,
    active: Option<&[bool]>,
    is_surrogate_node: &[bool],
    front_point: Vec2,
    front_z: [f64; 4],
    field_z: &[[f64; 4]],
) -> Result<[Vec2; 4]> {
    // candidate interior neighbors: vertices of active cells around `node`,
    // excluding surrogate nodes and the node itself
    let mut cand: Vec<usize> = Vec::new();
    for c in active_cells_of_node(tri, node, active) {
        for v in tri.cell(c) {
            if v != node && !is_surrogate_node[v] && !cand.contains(&v) {
                cand.push(v);
            }
        }
    }
    cand.sort_unstable();
    // best-shaped triangle (front_point, a, b): maximize area over edge^2
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..cand.len() {
        for j in i + 1..cand.len() {
            let (a, b) = (tri.node(cand[i]), tri.node(cand[j]));
            let area2 = crate::geom::orient2d(front_point, a, b).abs();
            let lmax = (a - front_point)
                .norm2()
                .max((b - front_point).norm2())
                .max((b - a).norm2());
            if lmax == 0.0 {
                continue;
            }
            let q = area2 / lmax;
            if best.map_or(true, |(bq, _, _)| q > bq) {
                best = Some((q, cand[i], cand[j]));
            }
        }
    }
    let (q, ia, ib) = best.ok_or_else(|| {
        Error::Recon(format!(
            "node {node}: no auxiliary triangle constructible (fewer than two interior neighbors)"
        ))
    })?;
    if q < 1e-8 {
        return Err(Error::Recon(format!(
            "node {node}: auxiliary triangle degenerate (quality {q:.3e})"
        )));
    }
    let (pa, pb) = (tri.node(ia), tri.node(ib));
    // orient (front, a, b) counter-clockwise
    let (pa, pb, za, zb) = if crate::geom::orient2d(front_point, pa, pb) > 0.0 {
        (pa, pb, field_z[ia], field_z[ib])
    } else {
        (pb, pa, field_z[ib], field_z[ia])
    };
    let area = 0.5 * crate::geom::orient2d(front_point, pa, pb);
    let normals = [
        (pb - pa).perp(),
        (front_point - pb).perp(),
        (pa - front_point).perp(),
    ];
    let zs = [front_z, za, zb];
    let mut grad = [Vec2::ZERO; 4];
    for k in 0..3 {
        for comp in 0..4 {
            grad[comp] += normals[k] * (zs[k][comp] / (2.0 * area));
        }
    }
    Ok(grad)
}
