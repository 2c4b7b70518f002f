//! Case configuration: a TOML file with sections [gas], [mesh], [bc],
//! [fronts], [interactions], [mode], [numerics] and [output], resolved into
//! the typed setup the driver runs.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::gas::{GasModel, GasState};
use crate::geom::Vec2;
use crate::interaction::InteractionKind;
use crate::recon::GradientRecovery;
use crate::solver::{BoundaryCondition, FluxScheme, SolverOptions};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    /// Plain shock capturing on the background mesh.
    Sc,
    /// Tracking with first-order transfers.
    EditFo,
    /// Tracking with second-order transfers and Green-Gauss recovery.
    EditGg,
    /// Tracking with second-order transfers and Zienkiewicz-Zhu recovery.
    EditZz,
    /// Tracking with the auxiliary-triangle gradient (single front only).
    Est,
}

impl RunMode {
    pub fn parse(s: &str) -> Result<RunMode> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "sc" => RunMode::Sc,
            "edit-fo" | "edit_fo" | "editfo" => RunMode::EditFo,
            "edit-gg" | "edit_gg" | "editgg" => RunMode::EditGg,
            "edit-zz" | "edit_zz" | "editzz" => RunMode::EditZz,
            "est" => RunMode::Est,
            other => return Err(Error::Config(format!("unknown mode '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunMode::Sc => "sc",
            RunMode::EditFo => "edit-fo",
            RunMode::EditGg => "edit-gg",
            RunMode::EditZz => "edit-zz",
            RunMode::Est => "est",
        }
    }

    pub fn tracks_fronts(&self) -> bool {
        !matches!(self, RunMode::Sc)
    }

    /// Taylor-expansion order of the surrogate/front transfers.
    pub fn transfer_order(&self) -> usize {
        match self {
            RunMode::EditFo => 1,
            _ => 2,
        }
    }

    pub fn gradient_recovery(&self) -> GradientRecovery {
        match self {
            RunMode::Sc | RunMode::EditFo => GradientRecovery::FirstOrder,
            RunMode::EditGg => GradientRecovery::GreenGauss,
            RunMode::EditZz => GradientRecovery::ZienkiewiczZhu,
            RunMode::Est => GradientRecovery::AuxiliaryTriangle,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    #[serde(default)]
    pub gas: GasSection,
    pub mesh: MeshSection,
    pub mode: ModeSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    pub bc: BcSection,
    #[serde(default)]
    pub fronts: FrontsSection,
    #[serde(default)]
    pub interactions: InteractionsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub gamma: f64,
}

impl Default for GasSection {
    fn default() -> Self {
        GasSection { gamma: 1.4 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub file: PathBuf,
    /// Uniform refinement levels applied after reading.
    #[serde(default)]
    pub refine: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub kind: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub cfl: f64,
    pub flux: String,
    /// Spatial order of the flow solver (1 or 2).
    pub order: usize,
    pub max_iters: usize,
    /// L2 pseudo-time residual threshold on the flow.
    pub flow_tol: f64,
    /// Front-speed norm threshold.
    pub shock_speed_tol: f64,
    /// Front-speed norm above which a stagnating run fails.
    pub shock_speed_stagnation: f64,
    /// Shock-capturing iterations before fronts are inserted.
    pub warmup_iters: usize,
    /// Run the solver first order for this many initial iterations.
    pub first_order_iters: usize,
    /// Relaxation factor on the front displacement.
    pub relax_front: f64,
    /// Twin-state sampling offset from the front, in mesh sizes.
    pub sample_offset: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            cfl: 0.8,
            flux: "hllc".into(),
            order: 2,
            max_iters: 20000,
            flow_tol: 1e-9,
            shock_speed_tol: 1e-7,
            shock_speed_stagnation: 1e-5,
            warmup_iters: 500,
            first_order_iters: 0,
            relax_front: 1.0,
            sample_offset: 3.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcSection {
    pub patch: Vec<BcPatch>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcPatch {
    pub name: String,
    pub kind: String,
    /// rho, u, v, p for inflow conditions.
    pub state: Option<[f64; 4]>,
    pub p_out: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontsSection {
    #[serde(default)]
    pub front: Vec<FrontEntry>,
    #[serde(default)]
    pub seed: Vec<SeedEntry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontEntry {
    pub file: PathBuf,
    #[serde(default = "default_true")]
    pub tracked: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedEntry {
    pub point: [f64; 2],
    pub region: usize,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionsSection {
    #[serde(default)]
    pub point: Vec<InteractionEntry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionEntry {
    pub name: String,
    pub kind: String,
    /// Member front names in the role order of the kind.
    pub members: Vec<String>,
    pub wall: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub vtk: bool,
    pub history: bool,
    pub front_dump: bool,
    pub front_history: bool,
    pub svg_debug: bool,
    /// Emit field snapshots every N iterations (0 = final only).
    pub every: usize,
    /// Progress lines on stdout every N iterations (0 = silent).
    pub log_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            vtk: true,
            history: true,
            front_dump: true,
            front_history: false,
            svg_debug: false,
            every: 0,
            log_every: 0,
        }
    }
}

impl CaseFile {
    pub fn read(path: impl AsRef<Path>) -> Result<CaseFile> {
        let text = std::fs::read_to_string(&path)?;
        let mut case: CaseFile = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        // paths inside the case file are relative to its directory
        if let Some(dir) = path.as_ref().parent() {
            if case.mesh.file.is_relative() {
                case.mesh.file = dir.join(&case.mesh.file);
            }
            for f in &mut case.fronts.front {
                if f.file.is_relative() {
                    f.file = dir.join(&f.file);
                }
            }
        }
        Ok(case)
    }

    pub fn gas_model(&self) -> Result<GasModel> {
        GasModel::new(self.gas.gamma)
    }

    pub fn run_mode(&self) -> Result<RunMode> {
        RunMode::parse(&self.mode.kind)
    }

    pub fn solver_options(&self) -> Result<SolverOptions> {
        let flux = match self.numerics.flux.to_ascii_lowercase().as_str() {
            "hllc" => FluxScheme::Hllc,
            "rusanov" => FluxScheme::Rusanov,
            other => return Err(Error::Config(format!("unknown flux scheme '{other}'"))),
        };
        if !(self.numerics.order == 1 || self.numerics.order == 2) {
            return Err(Error::Config(format!(
                "solver order must be 1 or 2, got {}",
                self.numerics.order
            )));
        }
        Ok(SolverOptions {
            cfl: self.numerics.cfl,
            flux,
            order: self.numerics.order,
            local_dt: true,
        })
    }

    /// Boundary conditions aligned with the mesh patches.
    pub fn boundary_conditions(
        &self,
        patches: &[crate::mesh::BoundaryPatch],
    ) -> Result<Vec<BoundaryCondition>> {
        let mut out = Vec::with_capacity(patches.len());
        for patch in patches {
            let entry = self
                .bc
                .patch
                .iter()
                .find(|p| p.name == patch.name)
                .ok_or_else(|| {
                    Error::Config(format!("no boundary condition for patch '{}'", patch.name))
                })?;
            let bc = match entry.kind.to_ascii_lowercase().as_str() {
                "supersonic-inflow" => {
                    let s = entry.state.ok_or_else(|| {
                        Error::Config(format!("patch '{}' needs state = [rho,u,v,p]", entry.name))
                    })?;
                    let state = GasState::new(s[0], Vec2::new(s[1], s[2]), s[3]);
                    state.validate()?;
                    BoundaryCondition::SupersonicInflow(state)
                }
                "supersonic-outflow" => BoundaryCondition::SupersonicOutflow,
                "subsonic-outflow" => BoundaryCondition::SubsonicOutflow {
                    p_out: entry.p_out.ok_or_else(|| {
                        Error::Config(format!("patch '{}' needs p_out", entry.name))
                    })?,
                },
                "slip-wall" => BoundaryCondition::SlipWall,
                other => {
                    return Err(Error::Config(format!(
                        "unknown boundary condition '{other}' on patch '{}'",
                        entry.name
                    )))
                }
            };
            out.push(bc);
        }
        // every configured patch must exist on the mesh
        for entry in &self.bc.patch {
            if !patches.iter().any(|p| p.name == entry.name) {
                return Err(Error::Config(format!(
                    "boundary condition for unknown patch '{}'",
                    entry.name
                )));
            }
        }
        Ok(out)
    }

    pub fn interaction_kind(kind: &str) -> Result<InteractionKind> {
        Ok(match kind.to_ascii_lowercase().as_str() {
            "quadruple-point" | "qp" => InteractionKind::QuadruplePoint,
            "triple-point" | "tp" => InteractionKind::TriplePoint,
            "triple-point-full" | "tp-full" => InteractionKind::TriplePointFull,
            "wall-reflection" | "wall-ip" => InteractionKind::WallReflection,
            other => return Err(Error::Config(format!("unknown interaction kind '{other}'"))),
        })
    }

    pub fn seeds(&self) -> Vec<(Vec2, usize)> {
        self.fronts
            .seed
            .iter()
            .map(|s| (Vec2::new(s.point[0], s.point[1]), s.region))
            .collect()
    }
}
