//! Run artifacts: legacy-ASCII VTK field snapshots, CSV iteration history,
//! CSV convergence tables, front polyline dumps and an optional SVG debug
//! view of the cavity and surrogate boundaries.

use std::fmt::Write as _;
use std::path::Path;

use crate::cavity::ComputationalMesh;
use crate::front::FrontSet;
use crate::gas::GasModel;
use crate::mesh::Triangulation;
use crate::solver::SolverField;
use crate::Result;

/// Nodal rho, velocity, p, Mach, total enthalpy and entropy plus the cavity
/// mask and sub-domain id per cell, as a legacy VTK unstructured grid.
pub fn write_vtk(
    path: impl AsRef<Path>,
    tri: &Triangulation,
    field: &SolverField,
    cm: &ComputationalMesh,
    gas: &GasModel,
) -> Result<()> {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("edit2d field snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", tri.n_nodes());
    for i in 0..tri.n_nodes() {
        let p = tri.node(i);
        let _ = writeln!(out, "{:.12e} {:.12e} 0", p.x, p.y);
    }
    let _ = writeln!(out, "CELLS {} {}", tri.n_cells(), 4 * tri.n_cells());
    for c in 0..tri.n_cells() {
        let [a, b, d] = tri.cell(c);
        let _ = writeln!(out, "3 {a} {b} {d}");
    }
    let _ = writeln!(out, "CELL_TYPES {}", tri.n_cells());
    for _ in 0..tri.n_cells() {
        out.push_str("5\n");
    }
    let _ = writeln!(out, "POINT_DATA {}", tri.n_nodes());
    let scalar = |out: &mut String, name: &str, f: &dyn Fn(usize) -> f64| {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for i in 0..tri.n_nodes() {
            let _ = writeln!(out, "{:.12e}", f(i));
        }
    };
    scalar(&mut out, "rho", &|i| field.states[i].rho);
    scalar(&mut out, "p", &|i| field.states[i].p);
    scalar(&mut out, "mach", &|i| field.states[i].mach(gas));
    scalar(&mut out, "total_enthalpy", &|i| {
        field.states[i].total_enthalpy(gas)
    });
    scalar(&mut out, "entropy", &|i| field.states[i].entropy(gas));
    out.push_str("VECTORS velocity double\n");
    for i in 0..tri.n_nodes() {
        let v = field.states[i].vel;
        let _ = writeln!(out, "{:.12e} {:.12e} 0", v.x, v.y);
    }
    let _ = writeln!(out, "CELL_DATA {}", tri.n_cells());
    let _ = writeln!(out, "SCALARS cavity int 1\nLOOKUP_TABLE default");
    for c in 0..tri.n_cells() {
        let _ = writeln!(out, "{}", if cm.active_cell[c] { 0 } else { 1 });
    }
    let _ = writeln!(out, "SCALARS subdomain int 1\nLOOKUP_TABLE default");
    for c in 0..tri.n_cells() {
        let _ = writeln!(out, "{}", cm.subdomain[c]);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// One iteration-history row.
#[derive(Clone, Copy, Debug)]
pub struct HistoryRow {
    pub iteration: usize,
    pub residuals: [f64; 4],
    pub shock_speed_norm: f64,
    pub dt: f64,
    pub n_active_nodes: usize,
}

pub fn write_history(path: impl AsRef<Path>, rows: &[HistoryRow]) -> Result<()> {
    let mut out = String::from(
        "iteration,res_rho,res_u,res_v,res_p,shock_speed_norm,dt,active_nodes\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            r.iteration,
            r.residuals[0],
            r.residuals[1],
            r.residuals[2],
            r.residuals[3],
            r.shock_speed_norm,
            r.dt,
            r.n_active_nodes
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// One line of a grid-convergence table: errors and observed orders per
/// component of the parameter vector.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub l1: [f64; 4],
    /// Observed order against the previous level, when available.
    pub order: Option<[f64; 4]>,
}

pub fn write_convergence(path: impl AsRef<Path>, rows: &[ConvergenceRow]) -> Result<()> {
    let mut out = String::from(
        "level,h,l1_z1,l1_z2,l1_z3,l1_z4,order_z1,order_z2,order_z3,order_z4\n",
    );
    for r in rows {
        let _ = write!(
            out,
            "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
            r.level, r.h, r.l1[0], r.l1[1], r.l1[2], r.l1[3]
        );
        match r.order {
            Some(o) => {
                let _ = writeln!(out, ",{:.4},{:.4},{:.4},{:.4}", o[0], o[1], o[2], o[3]);
            }
            None => out.push_str(",,,,\n"),
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Cavity, surrogate boundaries and fronts as a standalone SVG.
pub fn write_svg_debug(
    path: impl AsRef<Path>,
    tri: &Triangulation,
    cm: &ComputationalMesh,
    fs: &FrontSet,
) -> Result<()> {
    let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
    let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in tri.nodes() {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let w = 900.0;
    let s = w / (x1 - x0).max(1e-12);
    let h = (y1 - y0) * s;
    // svg y grows downward
    let tx = |p: crate::geom::Vec2| ((p.x - x0) * s, h - (p.y - y0) * s);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\">"
    );
    for c in 0..tri.n_cells() {
        let pts = tri.cell_points(c);
        let fill = if cm.active_cell[c] { "none" } else { "#f4b6b6" };
        let (a, b, d) = (tx(pts[0]), tx(pts[1]), tx(pts[2]));
        let _ = writeln!(
            out,
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"{fill}\" stroke=\"#ccc\" stroke-width=\"0.4\"/>",
            a.0, a.1, b.0, b.1, d.0, d.1
        );
    }
    for &[a, b] in &cm.surrogate_edges {
        let (pa, pb) = (tx(tri.node(a)), tx(tri.node(b)));
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#d62728\" stroke-width=\"1.2\"/>",
            pa.0, pa.1, pb.0, pb.1
        );
    }
    for (_, front) in fs.tracked() {
        let mut d = String::from("M");
        for (k, p) in front.points.iter().enumerate() {
            let (x, y) = tx(p.x);
            if k == 0 {
                let _ = write!(d, " {x:.2},{y:.2}");
            } else {
                let _ = write!(d, " L {x:.2},{y:.2}");
            }
        }
        if front.closed {
            d.push_str(" Z");
        }
        let _ = writeln!(
            out,
            "<path d=\"{d}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.6\"/>"
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasState;
    use crate::geom::Vec2;
    use crate::mesh::rectangle;

    #[test]
    fn vtk_snapshot_well_formed() {
        let tri = rectangle(3, 2, 1.0, 1.0);
        let cm = ComputationalMesh::all_active(&tri);
        let gas = GasModel::new(1.4).unwrap();
        let field = SolverField::uniform(
            tri.n_nodes(),
            GasState::new(1.0, Vec2::new(1.0, 0.0), 1.0),
        );
        let path = std::env::temp_dir().join("edit2d_test.vtk");
        write_vtk(&path, &tri, &field, &cm, &gas).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0"));
        assert!(text.contains(&format!("POINTS {} double", tri.n_nodes())));
        assert!(text.contains(&format!("CELLS {} {}", tri.n_cells(), 4 * tri.n_cells())));
        assert!(text.contains("SCALARS mach double 1"));
        assert!(text.contains("VECTORS velocity double"));
        // triangle type everywhere
        assert_eq!(text.matches("\n5\n").count() >= 1, true);
    }

    #[test]
    fn history_and_convergence_csv() {
        let hist = vec![HistoryRow {
            iteration: 1,
            residuals: [1e-3, 2e-3, 3e-3, 4e-3],
            shock_speed_norm: 5e-4,
            dt: 1e-2,
            n_active_nodes: 100,
        }];
        let p1 = std::env::temp_dir().join("edit2d_hist.csv");
        write_history(&p1, &hist).unwrap();
        let text = std::fs::read_to_string(&p1).unwrap();
        assert!(text.lines().count() == 2);
        assert!(text.contains("shock_speed_norm"));

        let rows = vec![
            ConvergenceRow {
                level: 0,
                h: 0.1,
                l1: [1e-2; 4],
                order: None,
            },
            ConvergenceRow {
                level: 1,
                h: 0.05,
                l1: [2.5e-3; 4],
                order: Some([2.0; 4]),
            },
        ];
        let p2 = std::env::temp_dir().join("edit2d_conv.csv");
        write_convergence(&p2, &rows).unwrap();
        let text = std::fs::read_to_string(&p2).unwrap();
        assert!(text.lines().count() == 3);
        assert!(text.lines().nth(2).unwrap().contains("2.0000"));
    }
}
