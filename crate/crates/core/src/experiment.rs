//! Convergence studies: run a method over a range of mesh levels and report
//! errors, orders and optionally `κ₂(A)` as CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::assembly::{self, Discretization, SolveOptions, SourceTreatment};
use crate::classic::{ClassicVem, DofScaling, EnrichedVem, StabilizerConfig};
use crate::error::{Error, Result};
use crate::linalg::{
    estimate_condition_2, solve_cg, CgOptions, ConditionEstimate, SolverKind, SparseCholesky, SparseSym,
    AUTO_DIRECT_LIMIT,
};
use crate::mesh::MeshFamily;
use crate::problem::{ExactField, ManufacturedSolution};
use crate::sfvem::SfHct;

pub const CSV_HEADER: &str = "level,dofs,l2,l2_order,h1,h1_order,kappa,seconds";

/// `log2(coarse / fine)`.
pub fn convergence_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SfHct,
    Classic,
    Enriched,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SfHct => "sf-hct",
            Method::Classic => "classic",
            Method::Enriched => "enriched",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sf-hct" | "sf" | "hct" => Ok(Method::SfHct),
            "classic" => Ok(Method::Classic),
            "enriched" => Ok(Method::Enriched),
            other => Err(Error::Config(format!("unknown method `{other}` (sf-hct, classic, enriched)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub k: usize,
    pub mesh: MeshFamily,
    /// Inclusive level range.
    pub levels: (usize, usize),
    pub alpha: f64,
    pub dof_mode: DofScaling,
    pub harmonic_degrees: Vec<usize>,
    pub source: SourceTreatment,
    pub kappa: bool,
    pub tol: f64,
    pub solver: SolverKind,
    /// When false the `seconds` column is left empty so output is reproducible byte for byte.
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub dump_matrix: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::SfHct,
            k: 1,
            mesh: MeshFamily::Uniform,
            levels: (1, 4),
            alpha: 0.0,
            dof_mode: DofScaling::Standard,
            harmonic_degrees: Vec::new(),
            source: SourceTreatment::default(),
            kappa: false,
            tol: 1e-12,
            solver: SolverKind::Auto,
            timing: true,
            out: None,
            dump_matrix: None,
        }
    }
}

pub fn parse_levels(s: &str) -> Result<(usize, usize)> {
    let parse = |t: &str| {
        t.trim().parse::<usize>().map_err(|_| Error::Config(format!("invalid level `{t}` in `{s}`")))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((parse(a)?, parse(b)?))
        }
        None => {
            let l = parse(s)?;
            Ok((l, l))
        }
    }
}

pub fn parse_degrees(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = parse_levels(&format!("{a}..{b}"))?;
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Config(format!("invalid harmonic degree `{t}`"))))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("`{key}` expects a boolean, got `{v}`"))),
    }
}

impl RunConfig {
    /// Applies one `key=value` setting; keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        let number = |what: &str| Error::Config(format!("`{what}` expects a number, got `{v}`"));
        match key.as_str() {
            "method" => self.method = v.parse()?,
            "k" => self.k = v.parse().map_err(|_| number("k"))?,
            "mesh" | "family" => self.mesh = v.parse()?,
            "levels" => self.levels = parse_levels(v)?,
            "alpha" => self.alpha = v.parse().map_err(|_| number("alpha"))?,
            "dof-mode" => self.dof_mode = v.parse()?,
            "harmonic-degrees" => self.harmonic_degrees = parse_degrees(v)?,
            "source" => self.source = v.parse()?,
            "kappa" => self.kappa = parse_bool("kappa", v)?,
            "tol" => self.tol = v.parse().map_err(|_| number("tol"))?,
            "solver" => self.solver = v.parse()?,
            "timing" => self.timing = parse_bool("timing", v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "dump-matrix" => self.dump_matrix = Some(PathBuf::from(v)),
            other => return Err(Error::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Flat `key=value` text; blank lines and `#` comments are ignored.
    pub fn parse_text(text: &str, mut base: RunConfig) -> Result<RunConfig> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", n + 1)))?;
            base.set(k, v)?;
        }
        Ok(base)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_text(&text, RunConfig::default())
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.levels;
        if a == 0 || a > b {
            return Err(Error::Config(format!("invalid level range {a}..{b}")));
        }
        if b > crate::mesh::DEFAULT_LEVEL_CAP {
            return Err(Error::InvalidLevel { level: b, cap: crate::mesh::DEFAULT_LEVEL_CAP });
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("solver tolerance must lie in (0, 1), got {}", self.tol)));
        }
        if self.method != Method::Enriched && !self.harmonic_degrees.is_empty() {
            return Err(Error::Config("harmonic degrees only apply to the enriched method".into()));
        }
        if self.method != Method::Classic && (self.alpha != 0.0 || self.dof_mode != DofScaling::Standard) {
            return Err(Error::Config("stabilizer exponent and DOF mode only apply to the classic method".into()));
        }
        self.discretization().map(|_| ())
    }

    pub fn discretization(&self) -> Result<Box<dyn Discretization>> {
        Ok(match self.method {
            Method::SfHct => Box::new(SfHct::new(self.k)?.with_source(self.source)),
            Method::Classic => Box::new(
                ClassicVem::new(self.k, self.dof_mode, StabilizerConfig { alpha: self.alpha })?.with_source(self.source),
            ),
            Method::Enriched => {
                Box::new(EnrichedVem::new(self.k, &self.harmonic_degrees)?.with_source(self.source))
            }
        })
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { solver: self.solver, cg: CgOptions { tol: self.tol, ..CgOptions::default() } }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub level: usize,
    pub dofs: usize,
    pub l2: f64,
    pub l2_order: f64,
    pub h1: f64,
    pub h1_order: f64,
    pub kappa: Option<ConditionEstimate>,
    pub seconds: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub method: String,
    pub rows: Vec<LevelResult>,
    pub timing: bool,
}

impl ErrorReport {
    pub fn new(method: String, timing: bool) -> Self {
        ErrorReport { method, rows: Vec::new(), timing }
    }

    /// Appends a level, computing orders against the previous row (first row reports 0).
    pub fn push(&mut self, mut row: LevelResult) {
        let (l2_order, h1_order) = match self.rows.last() {
            Some(prev) if prev.l2 > 0.0 && row.l2 > 0.0 && prev.h1 > 0.0 && row.h1 > 0.0 => {
                (convergence_order(prev.l2, row.l2), convergence_order(prev.h1, row.h1))
            }
            Some(prev) => (
                if prev.l2 > 0.0 && row.l2 > 0.0 { convergence_order(prev.l2, row.l2) } else { 0.0 },
                if prev.h1 > 0.0 && row.h1 > 0.0 { convergence_order(prev.h1, row.h1) } else { 0.0 },
            ),
            None => (0.0, 0.0),
        };
        row.l2_order = l2_order;
        row.h1_order = h1_order;
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let kappa = r.kappa.map(|c| format!("{:.4e}", c.kappa)).unwrap_or_default();
            let seconds = if self.timing { format!("{:.3}", r.seconds) } else { String::new() };
            let _ = writeln!(
                s,
                "{},{},{:.4e},{:.2},{:.4e},{:.2},{},{}",
                r.level, r.dofs, r.l2, r.l2_order, r.h1, r.h1_order, kappa, seconds
            );
        }
        s
    }

    /// Least-squares slope of `-log2(error)` against level over the last `n` rows.
    pub fn fitted_slope(&self, n: usize, h1: bool) -> f64 {
        let rows = &self.rows[self.rows.len().saturating_sub(n)..];
        let pts: Vec<(f64, f64)> =
            rows.iter().map(|r| (r.level as f64, -(if h1 { r.h1 } else { r.l2 }).log2())).collect();
        least_squares_slope(&pts)
    }
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `κ₂` of an assembled SPD matrix; inner solves use a sparse factorization
/// when it fits the direct-solver budget, otherwise Jacobi-CG.
pub fn condition_number(a: &SparseSym) -> Result<ConditionEstimate> {
    if a.dim() <= AUTO_DIRECT_LIMIT {
        let chol = SparseCholesky::factor(a)?;
        estimate_condition_2(a, |b| Ok(chol.solve(b)))
    } else {
        let opts = CgOptions { tol: 1e-12, ..CgOptions::default() };
        estimate_condition_2(a, |b| solve_cg(a, b, &opts).map(|o| o.x))
    }
}

fn dump_path(base: &Path, level: usize, single: bool) -> PathBuf {
    if single {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("mtx");
    base.with_file_name(format!("{stem}.level{level}.{ext}"))
}

/// Runs one level and returns its row (orders are filled in by [`ErrorReport::push`]).
pub fn run_level(
    config: &RunConfig,
    method: &dyn Discretization,
    level: usize,
    problem: &dyn ExactField,
) -> Result<LevelResult> {
    let start = Instant::now();
    let mesh = config.mesh.generate(level)?;
    let solution = assembly::solve(method, &mesh, problem, &config.solve_options())?;
    let (l2, h1) = assembly::error_norms(method, &mesh, problem, &solution.values)?;
    let seconds = start.elapsed().as_secs_f64();
    let kappa = if config.kappa && solution.system.dofs.num_free > 0 {
        Some(condition_number(&solution.system.matrix)?)
    } else {
        None
    };
    if let Some(path) = &config.dump_matrix {
        let path = dump_path(path, level, config.levels.0 == config.levels.1);
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        solution.system.matrix.write_matrix_market(file)?;
    }
    Ok(LevelResult {
        level,
        dofs: solution.system.dofs.num_free,
        l2,
        l2_order: 0.0,
        h1,
        h1_order: 0.0,
        kappa,
        seconds,
        iterations: solution.report.iterations,
        residual: solution.report.residual,
    })
}

/// Runs the configured study against the sine manufactured solution and writes
/// the CSV to `config.out` when set.
pub fn run_experiment(config: &RunConfig) -> Result<ErrorReport> {
    run_experiment_with(config, &ManufacturedSolution::sine(), |_| {})
}

/// As [`run_experiment`], with a custom exact solution and a callback after each level.
pub fn run_experiment_with(
    config: &RunConfig,
    problem: &dyn ExactField,
    mut on_level: impl FnMut(&LevelResult),
) -> Result<ErrorReport> {
    config.validate()?;
    let method = config.discretization()?;
    let mut report = ErrorReport::new(method.name(), config.timing);
    for level in config.levels.0..=config.levels.1 {
        let row = run_level(config, method.as_ref(), level, problem)?;
        report.push(row);
        on_level(report.rows.last().expect("row just pushed"));
    }
    if let Some(out) = &config.out {
        std::fs::write(out, report.to_csv())?;
    }
    Ok(report)
}
