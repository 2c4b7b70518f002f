//! Reader/writer for the ASCII msh v2.2 subset used by this crate:
//! $Nodes, $Elements with 2-node lines (boundary edges tagged by physical
//! group) and 3-node triangles, plus $PhysicalNames.

use std::collections::BTreeMap;
use std::path::Path;

use super::{BoundaryPatch, Triangulation};
use crate::geom::Vec2;
use crate::{Error, Result};

pub fn read_gmsh(path: impl AsRef<Path>) -> Result<Triangulation> {
    let text = std::fs::read_to_string(path)?;
    read_gmsh_str(&text)
}

pub fn read_gmsh_str(text: &str) -> Result<Triangulation> {
    let err = |line: usize, msg: &str| Error::MshFormat {
        line: line + 1,
        msg: msg.to_string(),
    };
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;

    let mut phys_names: BTreeMap<(i32, i32), String> = BTreeMap::new();
    let mut node_ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut nodes: Vec<Vec2> = Vec::new();
    let mut cells: Vec<[usize; 3]> = Vec::new();
    // physical tag -> boundary edges
    let mut patch_edges: BTreeMap<i32, Vec<[usize; 2]>> = BTreeMap::new();

    while i < lines.len() {
        let line = lines[i].trim();
        match line {
            "$MeshFormat" => {
                let f = lines
                    .get(i + 1)
                    .ok_or_else(|| err(i, "truncated $MeshFormat"))?;
                let ver = f.split_whitespace().next().unwrap_or("");
                if !ver.starts_with("2.") {
                    return Err(err(i + 1, &format!("unsupported msh version {ver}")));
                }
                i += 3;
            }
            "$PhysicalNames" => {
                let n: usize = lines[i + 1]
                    .trim()
                    .parse()
                    .map_err(|_| err(i + 1, "bad count"))?;
                for k in 0..n {
                    let row = lines
                        .get(i + 2 + k)
                        .ok_or_else(|| err(i + 1 + k, "truncated $PhysicalNames"))?;
                    let mut it = row.split_whitespace();
                    let dim: i32 = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(i + 2 + k, "bad dim"))?;
                    let tag: i32 = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(i + 2 + k, "bad tag"))?;
                    let name = row
                        .splitn(3, char::is_whitespace)
                        .nth(2)
                        .unwrap_or("")
                        .trim()
                        .trim_matches('"')
                        .to_string();
                    phys_names.insert((dim, tag), name);
                }
                i += n + 3;
            }
            "$Nodes" => {
                let n: usize = lines[i + 1]
                    .trim()
                    .parse()
                    .map_err(|_| err(i + 1, "bad node count"))?;
                for k in 0..n {
                    let row = lines
                        .get(i + 2 + k)
                        .ok_or_else(|| err(i + 1 + k, "truncated $Nodes"))?;
                    let mut it = row.split_whitespace();
                    let id: u64 = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(i + 2 + k, "bad node id"))?;
                    let x: f64 = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(i + 2 + k, "bad x"))?;
                    let y: f64 = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(i + 2 + k, "bad y"))?;
                    node_ids.insert(id, nodes.len());
                    nodes.push(Vec2::new(x, y));
                }
                i += n + 3;
            }
            "$Elements" => {
                let n: usize = lines[i + 1]
                    .trim()
                    .parse()
                    .map_err(|_| err(i + 1, "bad element count"))?;
                for k in 0..n {
                    let row = lines
                        .get(i + 2 + k)
                        .ok_or_else(|| err(i + 1 + k, "truncated $Elements"))?;
                    let fields: Vec<i64> = row
                        .split_whitespace()
                        .map(|v| v.parse().map_err(|_| err(i + 2 + k, "bad element field")))
                        .collect::<Result<_>>()?;
                    if fields.len() < 3 {
                        return Err(err(i + 2 + k, "short element row"));
                    }
                    let etype = fields[1];
                    let ntags = fields[2] as usize;
                    let phys = if ntags > 0 { fields[3] as i32 } else { 0 };
                    let conn = &fields[3 + ntags..];
                    let resolve = |id: i64| -> Result<usize> {
                        node_ids
                            .get(&(id as u64))
                            .copied()
                            .ok_or_else(|| err(i + 2 + k, &format!("dangling node ref {id}")))
                    };
                    match etype {
                        1 => {
                            if conn.len() != 2 {
                                return Err(err(i + 2 + k, "line element needs 2 nodes"));
                            }
                            patch_edges
                                .entry(phys)
                                .or_default()
                                .push([resolve(conn[0])?, resolve(conn[1])?]);
                        }
                        2 => {
                            if conn.len() != 3 {
                                return Err(err(i + 2 + k, "triangle element needs 3 nodes"));
                            }
                            cells.push([resolve(conn[0])?, resolve(conn[1])?, resolve(conn[2])?]);
                        }
                        15 => {} // point elements carry no information we use
                        other => {
                            return Err(err(
                                i + 2 + k,
                                &format!("unsupported 2D element type {other}"),
                            ));
                        }
                    }
                }
                i += n + 3;
            }
            "" => i += 1,
            s if s.starts_with('$') => {
                // skip unknown section
                let end = format!("$End{}", &s[1..]);
                let mut j = i + 1;
                while j < lines.len() && lines[j].trim() != end {
                    j += 1;
                }
                i = j + 1;
            }
            _ => i += 1,
        }
    }

    if nodes.is_empty() {
        return Err(Error::MshFormat {
            line: 0,
            msg: "no $Nodes section".into(),
        });
    }
    if cells.is_empty() {
        return Err(Error::MshFormat {
            line: 0,
            msg: "no triangles in $Elements".into(),
        });
    }

    let patches = patch_edges
        .into_iter()
        .map(|(tag, edges)| BoundaryPatch {
            name: phys_names
                .get(&(1, tag))
                .cloned()
                .unwrap_or_else(|| format!("patch{tag}")),
            edges,
        })
        .collect();

    Triangulation::new(nodes, cells, patches)
}

/// Write in the same msh v2.2 ASCII subset `read_gmsh` accepts.
pub fn write_gmsh(tri: &Triangulation, path: impl AsRef<Path>) -> Result<()> {
    use std::fmt::Write as _;
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(out, "$PhysicalNames\n{}", tri.patches().len() + 1);
    for (pid, patch) in tri.patches().iter().enumerate() {
        let _ = writeln!(out, "1 {} \"{}\"", pid + 1, patch.name);
    }
    let _ = writeln!(out, "2 {} \"domain\"", tri.patches().len() + 1);
    out.push_str("$EndPhysicalNames\n$Nodes\n");
    let _ = writeln!(out, "{}", tri.n_nodes());
    for i in 0..tri.n_nodes() {
        let p = tri.node(i);
        let _ = writeln!(out, "{} {:.17e} {:.17e} 0", i + 1, p.x, p.y);
    }
    out.push_str("$EndNodes\n$Elements\n");
    let n_lines: usize = tri.patches().iter().map(|p| p.edges.len()).sum();
    let _ = writeln!(out, "{}", n_lines + tri.n_cells());
    let mut eid = 1;
    for (pid, patch) in tri.patches().iter().enumerate() {
        for &[a, b] in &patch.edges {
            let _ = writeln!(out, "{eid} 1 2 {} {} {} {}", pid + 1, pid + 1, a + 1, b + 1);
            eid += 1;
        }
    }
    let domain_tag = tri.patches().len() + 1;
    for c in 0..tri.n_cells() {
        let [a, b, d] = tri.cell(c);
        let _ = writeln!(
            out,
            "{eid} 2 2 {domain_tag} {domain_tag} {} {} {}",
            a + 1,
            b + 1,
            d + 1
        );
        eid += 1;
    }
    out.push_str("$EndElements\n");
    std::fs::write(path, out)?;
    Ok(())
}
