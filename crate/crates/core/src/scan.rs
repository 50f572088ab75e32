//! Deterministic parameter-grid scans over the built-in state families.
//!
//! A [`ScanSpec`] names a family, pins some of its parameters, sweeps the
//! rest over inclusive linear grids, and evaluates a list of criteria at
//! every on-simplex point. Results keep the full per-point reports; CSV is
//! the authoritative export and SVG a convenience heatmap.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{self, Alpha, Config, CriterionReport, CRITERION_NAMES};
use crate::maps::{AntisymmetricUnitary, UKind};
use crate::matrix::MatrixJson;
use crate::states::{self, DensityMatrix, Side};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    BellDiagonal,
    BellMixture,
    Divincenzo,
    #[serde(rename = "so3_4x4")]
    So3,
}

impl Family {
    /// Canonical parameter order; `check --params` and [`classify_point`]
    /// take values in this order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::BellDiagonal => &["t1", "t2", "t3"],
            Family::BellMixture => &["p", "q", "r"],
            Family::Divincenzo => &["b", "c"],
            Family::So3 => &["p", "q", "r"],
        }
    }

    /// Reversal unitary used when a spec names none: the spin flip on the
    /// rotationally invariant family (the choice commuting with it), the
    /// canonical anti-diagonal pattern elsewhere.
    pub fn default_u(self) -> UKind {
        match self {
            Family::So3 => UKind::SpinFlip,
            _ => UKind::Canonical,
        }
    }

    /// Build the state at one parameter point; off-simplex points error.
    pub fn build(self, params: &[f64]) -> Result<DensityMatrix> {
        let n = self.param_names().len();
        if params.len() != n {
            return Err(Error::Param(format!(
                "{self} takes {n} parameters, got {}",
                params.len()
            )));
        }
        match self {
            Family::BellDiagonal => states::bell_diagonal(params[0], params[1], params[2]),
            Family::BellMixture => states::bell_mixture(params[0], params[1], params[2]),
            Family::Divincenzo => states::divincenzo(params[0], params[1]),
            Family::So3 => states::so3_invariant_4x4(params[0], params[1], params[2]),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::BellDiagonal => "bell_diagonal",
            Family::BellMixture => "bell_mixture",
            Family::Divincenzo => "divincenzo",
            Family::So3 => "so3_4x4",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s.trim() {
            "bell_diagonal" => Ok(Family::BellDiagonal),
            "bell_mixture" => Ok(Family::BellMixture),
            "divincenzo" => Ok(Family::Divincenzo),
            "so3_4x4" | "so3" => Ok(Family::So3),
            other => Err(Error::Param(format!("unknown state family {other:?}"))),
        }
    }
}

/// Inclusive linear sweep of one named parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + step * i as f64).collect()
    }
}

/// One criterion to evaluate per point: registry name, optional order and
/// side, and an optional explicit column label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Alpha>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl CriterionSpec {
    pub fn new(name: &str, alpha: Option<Alpha>) -> Self {
        CriterionSpec {
            name: name.to_string(),
            alpha,
            side: None,
            label: None,
        }
    }

    /// Column label: explicit label, else the name with an `_a<order>`
    /// suffix when an order is set.
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.alpha {
            Some(a) => format!("{}_a{a}", self.name),
            None => self.name.clone(),
        }
    }

    fn side(&self) -> Result<Option<Side>> {
        self.side.as_deref().map(Side::from_str).transpose()
    }
}

/// A full scan request; see the preset JSON files for the on-disk shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanSpec {
    pub family: Family,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub grid: Vec<AxisSpec>,
    #[serde(default)]
    pub criteria: Vec<CriterionSpec>,
    /// "canonical" or "spin_flip"; defaults per family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    /// Path to a JSON complex matrix used as the reversal unitary instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_file: Option<String>,
}

/// Reversal-unitary choice after resolving a spec: a named pattern built
/// per dimension, or one concrete matrix.
#[derive(Clone, Debug)]
pub enum ReversalChoice {
    Kind(UKind),
    Custom(AntisymmetricUnitary),
}

impl ScanSpec {
    pub fn from_json(s: &str) -> Result<ScanSpec> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let params = self.family.param_names();
        if self.grid.is_empty() {
            return Err(Error::Param("scan needs at least one grid axis".into()));
        }
        let mut covered: BTreeMap<&str, &str> = BTreeMap::new();
        for axis in &self.grid {
            if axis.steps < 2 {
                return Err(Error::Param(format!(
                    "axis {} needs at least 2 steps",
                    axis.name
                )));
            }
            if !axis.min.is_finite() || !axis.max.is_finite() {
                return Err(Error::Param(format!("axis {} range not finite", axis.name)));
            }
            if !params.contains(&axis.name.as_str()) {
                return Err(Error::Param(format!(
                    "{} has no parameter {}; expected one of {params:?}",
                    self.family, axis.name
                )));
            }
            if covered.insert(axis.name.as_str(), "axis").is_some() {
                return Err(Error::Param(format!("parameter {} listed twice", axis.name)));
            }
        }
        for name in self.fixed.keys() {
            if !params.contains(&name.as_str()) {
                return Err(Error::Param(format!(
                    "{} has no parameter {name}; expected one of {params:?}",
                    self.family
                )));
            }
            if covered.insert(name.as_str(), "fixed").is_some() {
                return Err(Error::Param(format!("parameter {name} listed twice")));
            }
        }
        if let Some(missing) = params.iter().find(|p| !covered.contains_key(*p)) {
            return Err(Error::Param(format!(
                "parameter {missing} neither swept nor fixed"
            )));
        }
        for crit in &self.criteria {
            if !CRITERION_NAMES.contains(&crit.name.as_str()) {
                return Err(Error::UnknownCriterion(crit.name.clone()));
            }
            crit.side()?;
        }
        if self.u.is_some() && self.u_file.is_some() {
            return Err(Error::Param("give either u or u_file, not both".into()));
        }
        if let Some(u) = &self.u {
            UKind::from_str(u)?;
        }
        Ok(())
    }

    /// Resolve the reversal-unitary choice, reading `u_file` if given.
    pub fn resolve_u(&self) -> Result<ReversalChoice> {
        if let Some(path) = &self.u_file {
            let text = std::fs::read_to_string(path)?;
            let mj: MatrixJson = serde_json::from_str(&text)?;
            return Ok(ReversalChoice::Custom(AntisymmetricUnitary::new(
                mj.to_matrix()?,
            )?));
        }
        Ok(ReversalChoice::Kind(match &self.u {
            Some(s) => UKind::from_str(s)?,
            None => self.family.default_u(),
        }))
    }

    pub fn total_points(&self) -> usize {
        self.grid.iter().map(|a| a.steps).product()
    }
}

/// One evaluated grid point: parameter values in the family's canonical
/// order, a validity flag, and one report per requested criterion
/// (absent when the point is off the simplex).
#[derive(Clone, Debug)]
pub struct PointResult {
    pub params: Vec<f64>,
    pub valid: bool,
    pub reports: Vec<Option<CriterionReport>>,
}

/// Completed scan: the spec that produced it plus one row per grid point,
/// in odometer order (first axis slowest).
#[derive(Clone, Debug)]
pub struct RegionScan {
    pub spec: ScanSpec,
    pub rows: Vec<PointResult>,
}

/// Evaluate all criteria at one parameter point. Off-simplex points come
/// back flagged invalid with no reports; criterion errors at valid points
/// propagate (they indicate a misconfigured scan, not a bad point).
pub fn classify_point(
    family: Family,
    params: &[f64],
    criteria: &[CriterionSpec],
    u: &ReversalChoice,
    cfg: &Config,
) -> Result<PointResult> {
    if params.len() != family.param_names().len() {
        return Err(Error::Param(format!(
            "{family} takes {} parameters, got {}",
            family.param_names().len(),
            params.len()
        )));
    }
    let rho = match family.build(params) {
        Ok(rho) => rho,
        Err(Error::Param(_)) | Err(Error::State(_)) => {
            return Ok(PointResult {
                params: params.to_vec(),
                valid: false,
                reports: vec![None; criteria.len()],
            })
        }
        Err(e) => return Err(e),
    };
    let mut reports = Vec::with_capacity(criteria.len());
    for crit in criteria {
        let side = crit.side()?;
        let report = match u {
            ReversalChoice::Kind(kind) => {
                criteria::evaluate(&rho, &crit.name, crit.alpha, side, *kind, cfg)?
            }
            ReversalChoice::Custom(cu) => {
                criteria::evaluate_with_u(&rho, &crit.name, crit.alpha, side, cu, cfg)?
            }
        };
        reports.push(Some(report));
    }
    Ok(PointResult {
        params: params.to_vec(),
        valid: true,
        reports,
    })
}

/// Run the scan: every grid point, every criterion, data-parallel with
/// order-stable output.
pub fn run_scan(spec: &ScanSpec, cfg: &Config) -> Result<RegionScan> {
    spec.validate()?;
    let u = spec.resolve_u()?;
    let params = spec.family.param_names();
    // parameter index -> fixed value or grid axis
    let sources: Vec<std::result::Result<f64, usize>> = params
        .iter()
        .map(|p| match spec.fixed.get(*p) {
            Some(v) => Ok(*v),
            None => Err(spec
                .grid
                .iter()
                .position(|a| a.name == **p)
                .expect("validated coverage")),
        })
        .collect();
    let axis_values: Vec<Vec<f64>> = spec.grid.iter().map(|a| a.values()).collect();
    let total = spec.total_points();
    let rows = (0..total)
        .into_par_iter()
        .map(|flat| {
            // odometer decode, first axis slowest
            let mut rem = flat;
            let mut axis_idx = vec![0usize; axis_values.len()];
            for (k, vals) in axis_values.iter().enumerate().rev() {
                axis_idx[k] = rem % vals.len();
                rem /= vals.len();
            }
            let point: Vec<f64> = sources
                .iter()
                .map(|s| match s {
                    Ok(v) => *v,
                    Err(k) => axis_values[*k][axis_idx[*k]],
                })
                .collect();
            classify_point(spec.family, &point, &spec.criteria, &u, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionScan {
        spec: spec.clone(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

/// CSV export: axis columns in grid order, a `valid` flag, then
/// `margin_<label>,sat_<label>` per criterion; invalid rows leave the
/// criterion cells empty.
pub fn emit_csv(scan: &RegionScan) -> String {
    let params = scan.spec.family.param_names();
    let axis_cols: Vec<usize> = scan
        .spec
        .grid
        .iter()
        .map(|a| params.iter().position(|p| *p == a.name).expect("validated"))
        .collect();
    let mut out = String::new();
    for a in &scan.spec.grid {
        out.push_str(&a.name);
        out.push(',');
    }
    out.push_str("valid");
    for c in &scan.spec.criteria {
        let l = c.label();
        let _ = write!(out, ",margin_{l},sat_{l}");
    }
    out.push('\n');
    for row in &scan.rows {
        for &k in &axis_cols {
            let _ = write!(out, "{},", row.params[k]);
        }
        out.push_str(if row.valid { "1" } else { "0" });
        for rep in &row.reports {
            match rep {
                Some(r) => {
                    let _ = write!(out, ",{},{}", r.margin, if r.satisfied { 1 } else { 0 });
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

const SVG_SAT: &str = "#d7e3f4";
const SVG_VIOL: &str = "#c0392b";
const SVG_INVALID: &str = "#d9d9d9";

/// SVG heatmap of one criterion over a two-axis scan: first axis rightward,
/// second axis upward; satisfied/violated/off-simplex cells in three flat
/// colors with a legend. Deterministic bytes for a fixed scan.
pub fn emit_svg(scan: &RegionScan, label: &str) -> Result<String> {
    if scan.spec.grid.len() != 2 {
        return Err(Error::Param(format!(
            "heatmaps need exactly 2 grid axes, spec has {}",
            scan.spec.grid.len()
        )));
    }
    let idx = scan
        .spec
        .criteria
        .iter()
        .position(|c| c.label() == label)
        .ok_or_else(|| Error::Param(format!("no criterion labeled {label} in this scan")))?;
    let (ax, ay) = (&scan.spec.grid[0], &scan.spec.grid[1]);
    let (nx, ny) = (ax.steps, ay.steps);
    let (w, h) = (600.0, 600.0);
    let (ml, mt, legend_w, mb) = (70.0, 46.0, 150.0, 56.0);
    let (cw, ch) = (w / nx as f64, h / ny as f64);
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" \
         font-family=\"sans-serif\">\n",
        ml + w + legend_w,
        mt + h + mb
    );
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" font-size=\"16\">{} on {} ({}x{})</text>\n",
        ml,
        label,
        scan.spec.family,
        nx,
        ny
    );
    for (flat, row) in scan.rows.iter().enumerate() {
        let (ix, iy) = (flat / ny, flat % ny);
        let fill = match &row.reports[idx] {
            None => SVG_INVALID,
            Some(r) if r.satisfied => SVG_SAT,
            Some(_) => SVG_VIOL,
        };
        let x = ml + ix as f64 * cw;
        let y = mt + h - (iy + 1) as f64 * ch;
        let _ = write!(
            svg,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>\n",
            cw + 0.05,
            ch + 0.05
        );
    }
    // axes and tick labels
    let _ = write!(
        svg,
        "<rect x=\"{ml:.1}\" y=\"{mt:.1}\" width=\"{w:.1}\" height=\"{h:.1}\" \
         fill=\"none\" stroke=\"#333\"/>\n"
    );
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        ml + w / 2.0,
        mt + h + 34.0,
        ax.name
    );
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 {:.1} {:.1})\">{}</text>\n",
        ml - 44.0,
        mt + h / 2.0,
        ml - 44.0,
        mt + h / 2.0,
        ay.name
    );
    let ticks = [
        (ml, mt + h + 16.0, format!("{}", ax.min), "start"),
        (ml + w, mt + h + 16.0, format!("{}", ax.max), "end"),
        (ml - 6.0, mt + h, format!("{}", ay.min), "end"),
        (ml - 6.0, mt + 10.0, format!("{}", ay.max), "end"),
    ];
    for (x, y, txt, anchor) in ticks {
        let _ = write!(
            svg,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"11\" text-anchor=\"{anchor}\">{txt}</text>\n"
        );
    }
    for (i, (color, name)) in [
        (SVG_SAT, "satisfied"),
        (SVG_VIOL, "violated"),
        (SVG_INVALID, "off simplex"),
    ]
    .iter()
    .enumerate()
    {
        let y = mt + 20.0 * i as f64;
        let _ = write!(
            svg,
            "<rect x=\"{:.1}\" y=\"{y:.1}\" width=\"14\" height=\"14\" fill=\"{color}\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{name}</text>\n",
            ml + w + 16.0,
            ml + w + 36.0,
            y + 12.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
