//! Run configuration: strict JSON with defaults, validated into domain,
//! Hamiltonian and boundary data.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{GridDomain, Mask, ScalarField, Shape, Stencil};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::hamiltonian::{HamiltonianSpec, RadialTable, WeightField, DEFAULT_N_DIRS};
use crate::io;

fn value_err(path: &str, message: impl Into<String>) -> Error {
    Error::ConfigValue {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Box,
    Interval,
    Disc,
    Annulus,
    SlitAnnulus,
    MaskFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeConfig {
    pub kind: ShapeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_out: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub shape: ShapeConfig,
    pub h: f64,
    #[serde(default = "default_stencil_k")]
    pub stencil_k: usize,
}

fn default_stencil_k() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKindTag {
    IsotropicPower,
    WeightedIsotropic,
    AnisotropicNorm,
    PlateauRadial,
    TabulatedRadial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Affine,
    BoundaryDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub kind: WeightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub kind: HamiltonianKindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shelf_end: Option<f64>,
    /// Table CSV for `tabulated_radial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_dirs: Option<usize>,
    #[serde(default = "default_n_dirs")]
    pub n_dirs: usize,
}

fn default_n_dirs() -> usize {
    DEFAULT_N_DIRS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// `g = a·x + b + a_y·y`.
    Linear,
    #[serde(alias = "two_arc")]
    TwoArc,
    #[serde(alias = "custom_csv")]
    CustomCsv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub kind: BoundaryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol_lambda")]
    pub tol_lambda: f64,
    #[serde(default = "default_lambda_cap")]
    pub lambda_cap: f64,
    /// Absolute; omitted means single-node patches.
    #[serde(default)]
    pub patch_radius: Option<f64>,
    #[serde(default = "default_n_sweeps")]
    pub n_sweeps: usize,
    #[serde(default = "default_tol_fix")]
    pub tol_fix: f64,
    #[serde(default)]
    pub rng_seed: u64,
    /// Patch radius for the reported local-optimality residual; default `4h`.
    #[serde(default)]
    pub residual_radius: Option<f64>,
}

fn default_tol_lambda() -> f64 {
    1e-4
}
fn default_lambda_cap() -> f64 {
    1e6
}
fn default_n_sweeps() -> usize {
    20_000
}
fn default_tol_fix() -> f64 {
    1e-7
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_lambda: default_tol_lambda(),
            lambda_cap: default_lambda_cap(),
            patch_radius: None,
            n_sweeps: default_n_sweeps(),
            tol_fix: default_tol_fix(),
            rng_seed: 0,
            residual_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointwiseConfig {
    /// Decreasing radii; default `[6h, 4h, 3h]`.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    /// Default `5%` of the sup of `h_du`.
    #[serde(default)]
    pub tau: Option<f64>,
    /// Default `2τ`.
    #[serde(default)]
    pub tau_fat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_prefix")]
    pub prefix: PathBuf,
    #[serde(default)]
    pub emit_heatmaps: bool,
}

fn default_prefix() -> PathBuf {
    PathBuf::from("out/run")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            prefix: default_prefix(),
            emit_heatmaps: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Fixture names; empty means all.
    #[serde(default)]
    pub fixtures: Vec<String>,
    /// Cells per unit length, overriding each fixture's default resolution.
    #[serde(default)]
    pub cells: Option<usize>,
    /// Threshold per check name (`fixture/check`).
    #[serde(default)]
    pub tolerance_overrides: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// The problem blocks are optional so that a config can carry only a
    /// `verify` block; the problem subcommands require them.
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianConfig>,
    #[serde(default)]
    pub boundary: Option<BoundaryConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub pointwise: PointwiseConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config(&text, &base)
}

/// Parses configuration text; relative paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        if inner.is_data() {
            Error::ConfigValue {
                path,
                message: format!("{inner}"),
            }
        } else {
            Error::ConfigParse {
                line: inner.line(),
                column: inner.column(),
                message: format!("{inner}"),
            }
        }
    })?;
    cfg.base_dir = base_dir.to_path_buf();
    cfg.validate()?;
    Ok(cfg)
}

fn reject_extra(path: &str, kind: &str, present: &[(&str, bool)]) -> Result<()> {
    match present.iter().find(|(_, p)| *p) {
        Some((name, _)) => Err(value_err(&format!("{path}.{name}"), format!("not used by kind `{kind}`"))),
        None => Ok(()),
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(value_err(path, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn require_file(&self, key: &str, p: &Option<PathBuf>) -> Result<PathBuf> {
        let p = p.as_ref().ok_or_else(|| value_err(key, "a file path is required"))?;
        let full = self.resolve(p);
        if !full.is_file() {
            return Err(Error::FileNotFound(full));
        }
        Ok(full)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = &self.domain {
            self.validate_domain(d)?;
        }
        if let Some(hc) = &self.hamiltonian {
            self.validate_hamiltonian(hc)?;
        }
        if let Some(b) = &self.boundary {
            self.validate_boundary(b)?;
        }
        self.validate_numerics()
    }

    fn validate_domain(&self, d: &DomainConfig) -> Result<()> {
        positive("domain.h", d.h)?;
        if !Stencil::ALLOWED.contains(&d.stencil_k) {
            return Err(value_err(
                "domain.stencil_k",
                format!("must be one of {{8, 16, 32}}, got {}", d.stencil_k),
            ));
        }
        let s = &d.shape;
        let sp = "domain.shape";
        match s.kind {
            ShapeKind::Box => reject_extra(sp, "box", &[
                ("a", s.a.is_some()), ("b", s.b.is_some()), ("center", s.center.is_some()), ("radius", s.radius.is_some()),
                ("r_in", s.r_in.is_some()), ("r_out", s.r_out.is_some()), ("path", s.path.is_some()),
            ])?,
            ShapeKind::Interval => reject_extra(sp, "interval", &[
                ("lo", s.lo.is_some()), ("hi", s.hi.is_some()), ("center", s.center.is_some()), ("radius", s.radius.is_some()),
                ("r_in", s.r_in.is_some()), ("r_out", s.r_out.is_some()), ("path", s.path.is_some()),
            ])?,
            ShapeKind::Disc => reject_extra(sp, "disc", &[
                ("lo", s.lo.is_some()), ("hi", s.hi.is_some()), ("a", s.a.is_some()), ("b", s.b.is_some()),
                ("r_in", s.r_in.is_some()), ("r_out", s.r_out.is_some()), ("path", s.path.is_some()),
            ])?,
            ShapeKind::Annulus | ShapeKind::SlitAnnulus => reject_extra(sp, "annulus", &[
                ("lo", s.lo.is_some()), ("hi", s.hi.is_some()), ("a", s.a.is_some()), ("b", s.b.is_some()),
                ("radius", s.radius.is_some()), ("path", s.path.is_some()),
                ("center", s.kind == ShapeKind::SlitAnnulus && s.center.is_some()),
            ])?,
            ShapeKind::MaskFile => {
                reject_extra(sp, "mask_file", &[
                    ("lo", s.lo.is_some()), ("hi", s.hi.is_some()), ("a", s.a.is_some()), ("b", s.b.is_some()),
                    ("center", s.center.is_some()), ("radius", s.radius.is_some()), ("r_in", s.r_in.is_some()),
                    ("r_out", s.r_out.is_some()),
                ])?;
                self.require_file("domain.shape.path", &s.path)?;
            }
        }
        Ok(())
    }

    fn validate_hamiltonian(&self, hc: &HamiltonianConfig) -> Result<()> {
        let hp = "hamiltonian";
        if hc.n_dirs < 8 {
            return Err(value_err("hamiltonian.n_dirs", format!("must be at least 8, got {}", hc.n_dirs)));
        }
        let table_keys = [
            ("path", hc.path.is_some()),
            ("lambdas", hc.lambdas.is_some()),
            ("table_dirs", hc.table_dirs.is_some()),
        ];
        match hc.kind {
            HamiltonianKindTag::IsotropicPower => {
                let mut extra = vec![("weight", hc.weight.is_some()), ("matrix", hc.matrix.is_some()), ("level", hc.level.is_some()), ("shelf_end", hc.shelf_end.is_some())];
                extra.extend(table_keys);
                reject_extra(hp, "isotropic_power", &extra)?;
                positive("hamiltonian.exponent", hc.exponent.unwrap_or(1.0))?;
            }
            HamiltonianKindTag::WeightedIsotropic => {
                let mut extra = vec![("exponent", hc.exponent.is_some()), ("matrix", hc.matrix.is_some()), ("level", hc.level.is_some()), ("shelf_end", hc.shelf_end.is_some())];
                extra.extend(table_keys);
                reject_extra(hp, "weighted_isotropic", &extra)?;
                let w = hc.weight.as_ref().ok_or_else(|| value_err("hamiltonian.weight", "required for weighted_isotropic"))?;
                if w.kind == WeightKind::BoundaryDistance {
                    reject_extra("hamiltonian.weight", "boundary_distance", &[("c0", w.c0.is_some()), ("cx", w.cx.is_some()), ("cy", w.cy.is_some())])?;
                }
            }
            HamiltonianKindTag::AnisotropicNorm => {
                let mut extra = vec![("exponent", hc.exponent.is_some()), ("weight", hc.weight.is_some()), ("level", hc.level.is_some()), ("shelf_end", hc.shelf_end.is_some())];
                extra.extend(table_keys);
                reject_extra(hp, "anisotropic_norm", &extra)?;
                if hc.matrix.is_none() {
                    return Err(value_err("hamiltonian.matrix", "required for anisotropic_norm"));
                }
            }
            HamiltonianKindTag::PlateauRadial => {
                let mut extra = vec![("exponent", hc.exponent.is_some()), ("weight", hc.weight.is_some()), ("matrix", hc.matrix.is_some())];
                extra.extend(table_keys);
                reject_extra(hp, "plateau_radial", &extra)?;
            }
            HamiltonianKindTag::TabulatedRadial => {
                reject_extra(hp, "tabulated_radial", &[
                    ("exponent", hc.exponent.is_some()), ("weight", hc.weight.is_some()), ("matrix", hc.matrix.is_some()),
                    ("level", hc.level.is_some()), ("shelf_end", hc.shelf_end.is_some()),
                ])?;
                self.require_file("hamiltonian.path", &hc.path)?;
                if hc.lambdas.as_ref().map_or(true, Vec::is_empty) {
                    return Err(value_err("hamiltonian.lambdas", "required for tabulated_radial"));
                }
                if hc.table_dirs.is_none() {
                    return Err(value_err("hamiltonian.table_dirs", "required for tabulated_radial"));
                }
            }
        }
        Ok(())
    }

    fn validate_boundary(&self, b: &BoundaryConfig) -> Result<()> {
        let bp = "boundary";
        match b.kind {
            BoundaryKind::Linear => reject_extra(bp, "linear", &[
                ("band_half_width", b.band_half_width.is_some()), ("decay", b.decay.is_some()), ("path", b.path.is_some()),
            ])?,
            BoundaryKind::TwoArc => {
                reject_extra(bp, "two-arc", &[("a", b.a.is_some()), ("b", b.b.is_some()), ("a_y", b.a_y.is_some()), ("path", b.path.is_some())])?;
                positive("boundary.band_half_width", b.band_half_width.unwrap_or(TWO_ARC_BAND))?;
            }
            BoundaryKind::CustomCsv => {
                reject_extra(bp, "custom-csv", &[
                    ("a", b.a.is_some()), ("b", b.b.is_some()), ("a_y", b.a_y.is_some()),
                    ("band_half_width", b.band_half_width.is_some()), ("decay", b.decay.is_some()),
                ])?;
                self.require_file("boundary.path", &b.path)?;
            }
        }
        Ok(())
    }

    fn validate_numerics(&self) -> Result<()> {
        let s = &self.solver;
        positive("solver.tol_lambda", s.tol_lambda)?;
        positive("solver.lambda_cap", s.lambda_cap)?;
        positive("solver.tol_fix", s.tol_fix)?;
        if let Some(r) = s.patch_radius {
            positive("solver.patch_radius", r)?;
        }
        if let Some(r) = s.residual_radius {
            positive("solver.residual_radius", r)?;
        }
        let p = &self.pointwise;
        if let Some(radii) = &p.radii {
            if radii.is_empty() || radii.windows(2).any(|w| w[1] >= w[0]) {
                return Err(value_err("pointwise.radii", "must be non-empty and strictly decreasing"));
            }
            if let Some(d) = &self.domain {
                if let Some(&r) = radii.iter().find(|&&r| r < 2.0 * d.h * (1.0 - 1e-9)) {
                    return Err(value_err("pointwise.radii", format!("radius {r} is below 2h")));
                }
            }
        }
        if let Some(t) = p.tau {
            positive("pointwise.tau", t)?;
        }
        if let Some(t) = p.tau_fat {
            positive("pointwise.tau_fat", t)?;
        }
        for name in &self.verify.fixtures {
            if !crate::verify::FIXTURES.contains(&name.as_str()) {
                return Err(value_err(
                    "verify.fixtures",
                    format!("unknown fixture `{name}`; known: {}", crate::verify::FIXTURES.join(", ")),
                ));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<&DomainConfig> {
        self.domain.as_ref().ok_or_else(|| value_err("domain", "block is required"))
    }

    pub fn hamiltonian(&self) -> Result<&HamiltonianConfig> {
        self.hamiltonian.as_ref().ok_or_else(|| value_err("hamiltonian", "block is required"))
    }

    pub fn boundary(&self) -> Result<&BoundaryConfig> {
        self.boundary.as_ref().ok_or_else(|| value_err("boundary", "block is required"))
    }

    pub fn shape(&self) -> Result<Shape> {
        let s = &self.domain()?.shape;
        let v = |p: [f64; 2]| Vec2::new(p[0], p[1]);
        let shape = match s.kind {
            ShapeKind::Box => Shape::Box {
                lo: v(s.lo.unwrap_or([0.0, 0.0])),
                hi: v(s.hi.unwrap_or([1.0, 1.0])),
            },
            ShapeKind::Interval => Shape::Interval {
                a: s.a.unwrap_or(0.0),
                b: s.b.unwrap_or(1.0),
            },
            ShapeKind::Disc => Shape::Disc {
                center: v(s.center.unwrap_or([0.0, 0.0])),
                radius: s.radius.unwrap_or(1.0),
            },
            ShapeKind::Annulus => Shape::Annulus {
                center: v(s.center.unwrap_or([0.0, 0.0])),
                r_in: s.r_in.unwrap_or(1.0),
                r_out: s.r_out.unwrap_or(2.0),
            },
            ShapeKind::SlitAnnulus => Shape::SlitAnnulus {
                r_in: s.r_in.unwrap_or(1.0),
                r_out: s.r_out.unwrap_or(2.0),
            },
            ShapeKind::MaskFile => {
                let path = self.require_file("domain.shape.path", &s.path)?;
                let (nx, ny, inside) = io::read_mask_pgm(&path)?;
                Shape::MaskFile(Arc::new(Mask::new(self.domain()?.h, nx, ny, inside)?))
            }
        };
        shape.validate()?;
        Ok(shape)
    }

    pub fn build_domain(&self) -> Result<GridDomain> {
        let d = self.domain()?;
        GridDomain::build(self.shape()?, d.h, d.stencil_k)
    }

    pub fn build_hamiltonian(&self, dom: &GridDomain) -> Result<HamiltonianSpec> {
        let hc = self.hamiltonian()?;
        let spec = match hc.kind {
            HamiltonianKindTag::IsotropicPower => HamiltonianSpec::isotropic_power(hc.exponent.unwrap_or(1.0))?,
            HamiltonianKindTag::WeightedIsotropic => {
                let w = hc.weight.as_ref().ok_or_else(|| value_err("hamiltonian.weight", "required"))?;
                let field = match w.kind {
                    WeightKind::Affine => WeightField::Affine {
                        c0: w.c0.unwrap_or(1.0),
                        cx: w.cx.unwrap_or(0.0),
                        cy: w.cy.unwrap_or(0.0),
                    },
                    WeightKind::BoundaryDistance => WeightField::BoundaryDistance(dom.shape.clone()),
                };
                let (lo, hi) = dom.shape.bounds();
                HamiltonianSpec::weighted(field, lo, hi)?
            }
            HamiltonianKindTag::AnisotropicNorm => {
                HamiltonianSpec::anisotropic(hc.matrix.ok_or_else(|| value_err("hamiltonian.matrix", "required"))?)?
            }
            HamiltonianKindTag::PlateauRadial => {
                HamiltonianSpec::plateau(hc.level.unwrap_or(0.5), hc.shelf_end.unwrap_or(0.75))?
            }
            HamiltonianKindTag::TabulatedRadial => {
                let path = self.require_file("hamiltonian.path", &hc.path)?;
                let records = io::read_table_csv(&path)?;
                let lambdas = hc.lambdas.clone().unwrap_or_default();
                let n_dirs = hc.table_dirs.unwrap_or(0);
                let table = RadialTable::from_records(dom.origin, dom.h, dom.nx, dom.ny, lambdas, n_dirs, &records)?;
                HamiltonianSpec::tabulated(table)
            }
        };
        Ok(spec.with_n_dirs(hc.n_dirs))
    }

    /// Boundary data sampled at every inside node (only boundary nodes matter).
    pub fn boundary_field(&self, dom: &GridDomain) -> Result<ScalarField> {
        let b = self.boundary()?;
        match b.kind {
            BoundaryKind::Linear => {
                let (a, offset, a_y) = (b.a.unwrap_or(1.0), b.b.unwrap_or(0.0), b.a_y.unwrap_or(0.0));
                Ok(ScalarField::from_fn(dom, "g", |p| a * p.x + offset + a_y * p.y))
            }
            BoundaryKind::TwoArc => {
                let hw = b.band_half_width.unwrap_or(TWO_ARC_BAND);
                let decay = b.decay.unwrap_or(TWO_ARC_DECAY);
                Ok(ScalarField::from_fn(dom, "g", |p| two_arc(p, hw, decay)))
            }
            BoundaryKind::CustomCsv => {
                let path = self.require_file("boundary.path", &b.path)?;
                let field = io::read_field(dom, &path)?.renamed("g");
                if let Some(&n) = dom.boundary_nodes.iter().find(|&&n| !field.values[n].is_finite()) {
                    let (i, j) = dom.ij(n);
                    return Err(Error::Format {
                        what: "boundary CSV",
                        message: format!("no finite value for boundary node ({i}, {j})"),
                    });
                }
                Ok(field)
            }
        }
    }

    pub fn solver_options(&self) -> crate::solver::SolverOptions {
        crate::solver::SolverOptions {
            tol_lambda: self.solver.tol_lambda,
            lambda_cap: self.solver.lambda_cap,
            ..Default::default()
        }
    }

    pub fn absolutize_options(&self) -> crate::solver::AbsolutizeOptions {
        crate::solver::AbsolutizeOptions {
            patch_radius: self.solver.patch_radius,
            n_sweeps: self.solver.n_sweeps,
            tol_fix: self.solver.tol_fix,
            rng_seed: self.solver.rng_seed,
            ..Default::default()
        }
    }

    pub fn radii(&self, dom: &GridDomain) -> Vec<f64> {
        self.pointwise.radii.clone().unwrap_or_else(|| crate::pointwise::default_radii(dom))
    }
}

/// Default half-width of the band where the two-arc data is steepest.
pub const TWO_ARC_BAND: f64 = 0.05;
/// Default decay of the two-arc data away from the band.
pub const TWO_ARC_DECAY: f64 = 0.8;

/// `0.5 + (0.5 − x)(1 − 2c·dist(y, [0.5 − w, 0.5 + w]))`: on the unit box the
/// left and right sides carry opposite arcs of data that are steepest on the
/// band `|y − 1/2| ≤ w`.
pub fn two_arc(p: Vec2, half_width: f64, decay: f64) -> f64 {
    let band = (p.y - 0.5).abs() - half_width;
    0.5 + (0.5 - p.x) * (1.0 - 2.0 * decay * band.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "domain": {"shape": {"kind": "box"}, "h": 0.25},
        "hamiltonian": {"kind": "isotropic_power"},
        "boundary": {"kind": "linear", "a": 1.0}
    }"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(cfg.domain.as_ref().unwrap().stencil_k, 16);
        assert_eq!(cfg.hamiltonian.as_ref().unwrap().n_dirs, 64);
        assert_eq!(cfg.solver.tol_lambda, 1e-4);
        let dom = cfg.build_domain().unwrap();
        assert_eq!(dom.nx, 5);
    }

    #[test]
    fn bad_stencil_names_the_allowed_set() {
        let text = MINIMAL.replace("\"h\": 0.25", "\"h\": 0.25, \"stencil_k\": 7");
        let err = parse_config(&text, Path::new(".")).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::ConfigValue { .. }));
        assert!(msg.contains("domain.stencil_k") && msg.contains("{8, 16, 32}"), "{msg}");
    }

    #[test]
    fn missing_boundary_csv_is_file_not_found() {
        let text = MINIMAL.replace(
            r#""boundary": {"kind": "linear", "a": 1.0}"#,
            r#""boundary": {"kind": "custom-csv", "path": "does/not/exist.csv"}"#,
        );
        match parse_config(&text, Path::new("/tmp")).unwrap_err() {
            Error::FileNotFound(p) => assert!(p.ends_with("does/not/exist.csv")),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let text = MINIMAL.replace("\"h\": 0.25", "\"h\": 0.25, \"spacing\": 1");
        let msg = parse_config(&text, Path::new(".")).unwrap_err().to_string();
        assert!(msg.contains("domain") && msg.contains("spacing"), "{msg}");
    }

    #[test]
    fn syntax_errors_report_line_and_column() {
        let err = parse_config("{\n  \"domain\": ,\n}", Path::new(".")).unwrap_err();
        match err {
            Error::ConfigParse { line, column, .. } => assert_eq!((line, column), (2, 13)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parameters_of_other_kinds_are_rejected() {
        let text = MINIMAL.replace(r#""kind": "isotropic_power""#, r#""kind": "isotropic_power", "matrix": [[1,0],[0,1]]"#);
        let msg = parse_config(&text, Path::new(".")).unwrap_err().to_string();
        assert!(msg.contains("hamiltonian.matrix"), "{msg}");
    }

    #[test]
    fn two_arc_is_steepest_on_the_band() {
        assert_eq!(two_arc(Vec2::new(0.0, 0.5), 0.05, 0.8), 1.0);
        assert_eq!(two_arc(Vec2::new(1.0, 0.5), 0.05, 0.8), 0.0);
        assert!(two_arc(Vec2::new(0.0, 0.0), 0.05, 0.8) < 0.7);
    }
}
