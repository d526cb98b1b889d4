//! The work behind each CLI subcommand, returning tables instead of printing.

use super::config::RunConfig;
use super::svg::{line_chart, FigureSeries};
use super::table::{Cell, Table};
use crate::correlation::{
    bell_original_check, chsh_value, estimate_correlation_mc, expectation_quadrature, quantum_correlation,
};
use crate::distance::{
    self, distance_d, distance_gamma0_antidiagonal, find_dmax, solve_gamma0_maximum, DistancePair, DmaxResult,
    GAMMA0_DMAX, QUARTER_ANGLE_D,
};
use crate::error::{Error, Result};
use crate::model::{solve_coefficients, verify_constraints, GammaParam, SettingAngle};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// A command's primary table plus any files it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub table: Table,
    pub files: Vec<PathBuf>,
}

impl From<Table> for CommandOutput {
    fn from(table: Table) -> Self {
        Self { table, files: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quad,
    Mc,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" => Ok(Self::Quad),
            "mc" => Ok(Self::Mc),
            other => Err(Error::domain(format!("method must be quad or mc, got {other:?}"))),
        }
    }
}

/// Which correlation function feeds the Bell and CHSH combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Quantum,
    Model,
    Both,
}

impl FromStr for Source {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Self::Quantum),
            "model" => Ok(Self::Model),
            "both" => Ok(Self::Both),
            other => Err(Error::domain(format!("source must be quantum, model or both, got {other:?}"))),
        }
    }
}

impl Source {
    fn expand(self) -> &'static [&'static str] {
        match self {
            Source::Quantum => &["quantum"],
            Source::Model => &["model"],
            Source::Both => &["quantum", "model"],
        }
    }
}

pub fn coeffs(cfg: &RunConfig, phi: f64, gamma: f64) -> Result<Table> {
    let (phi, gamma) = (SettingAngle::new(phi)?, GammaParam::new(gamma)?);
    let c = solve_coefficients(phi, gamma, &cfg.quad)?;
    let r = verify_constraints(&c, &cfg.quad)?;
    let mut t = Table::new(["phi", "gamma", "c1", "c2", "norm_residual", "corr_residual"]);
    t.push(vec![phi.radians().into(), gamma.value().into(), c.c1.into(), c.c2.into(), r.norm.into(), r.corr.into()]);
    Ok(t)
}

/// The (γ, φ, c1, c2) grid behind the coefficient plots.
pub fn figure1_data(cfg: &RunConfig) -> Result<Table> {
    let steps = cfg.phi_steps;
    let points: Vec<(GammaParam, f64)> = cfg
        .gammas
        .iter()
        .flat_map(|&g| (1..steps).map(move |k| (g, PI * k as f64 / steps as f64)))
        .collect();
    let coeffs: Vec<_> = points
        .par_iter()
        .map(|&(g, p)| solve_coefficients(SettingAngle::new(p)?, g, &cfg.quad))
        .collect::<Result<_>>()?;
    let mut t = Table::new(["gamma", "phi", "c1", "c2"]);
    for ((g, p), c) in points.iter().zip(&coeffs) {
        t.push(vec![g.value().into(), (*p).into(), c.c1.into(), c.c2.into()]);
    }
    Ok(t)
}

fn color_for(gamma: f64, index: usize) -> usize {
    // Default grid γ = −0.4 … 0.4 maps onto the palette in order.
    let k = ((gamma + 0.4) * 10.0).round();
    if (gamma + 0.4 - k / 10.0).abs() < 1e-9 && (0.0..9.0).contains(&k) {
        k as usize
    } else {
        index
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

pub fn figure1(cfg: &RunConfig) -> Result<CommandOutput> {
    let data = figure1_data(cfg)?;
    prepare_dir(&cfg.out_dir)?;
    let data_path = cfg.out_dir.join(format!("figure1.{}", cfg.format.extension()));
    data.write_to(&data_path, cfg.format)?;

    let mut files = vec![data_path];
    for (col, name) in [(2, "c1"), (3, "c2")] {
        let series = cfg
            .gammas
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let rows = data.rows.iter().filter(|r| r[0] == Cell::Num(g.value()));
                let (x, y): (Vec<f64>, Vec<f64>) = rows
                    .map(|r| match (&r[1], &r[col]) {
                        (Cell::Num(p), Cell::Num(c)) => (*p, *c),
                        _ => unreachable!("figure1 rows are numeric"),
                    })
                    .unzip();
                FigureSeries::new(format!("γ = {}", g.value()), x, y, color_for(g.value(), i))
            })
            .collect::<Result<Vec<_>>>()?;
        let svg = line_chart(&format!("{name} versus φ"), "φ (rad)", name, &series);
        let path = cfg.out_dir.join(format!("figure1_{name}.svg"));
        std::fs::write(&path, svg)?;
        files.push(path);
    }

    let mut t = Table::new(["artifact", "rows"]);
    t.push(vec![files[0].display().to_string().into(), data.rows.len().into()]);
    for f in &files[1..] {
        t.push(vec![f.display().to_string().into(), cfg.gammas.len().into()]);
    }
    Ok(CommandOutput { table: t, files })
}

pub fn correlate(cfg: &RunConfig, phi: f64, gamma: f64, method: Method, n: usize) -> Result<Table> {
    let (phi, gamma) = (SettingAngle::new(phi)?, GammaParam::new(gamma)?);
    let target = quantum_correlation(phi.radians());
    match method {
        Method::Quad => {
            let e = expectation_quadrature(phi, gamma, &cfg.quad)?;
            let mut t = Table::new(["method", "phi", "gamma", "e", "target", "residual"]);
            t.push(vec!["quad".into(), phi.radians().into(), gamma.value().into(), e.into(), target.into(), (e - target).abs().into()]);
            Ok(t)
        }
        Method::Mc => {
            let est = estimate_correlation_mc(phi, gamma, n, cfg.seed, &cfg.quad)?;
            let mut t = Table::new([
                "method", "phi", "gamma", "e", "target", "std_err", "n_accepted", "n_proposed", "seed", "within_4_std_err",
            ]);
            t.push(vec![
                "mc".into(),
                phi.radians().into(),
                gamma.value().into(),
                est.mean.into(),
                target.into(),
                est.std_err.into(),
                est.n_accepted.into(),
                est.n_proposed.into(),
                est.seed.into(),
                ((est.mean - target).abs() < 4.0 * est.std_err).into(),
            ]);
            Ok(t)
        }
    }
}

fn correlation_for<'a>(source: &str, gamma: GammaParam, cfg: &'a RunConfig) -> impl FnMut(f64) -> Result<f64> + 'a {
    let model = source == "model";
    move |p| {
        if model {
            expectation_quadrature(SettingAngle::new(p)?, gamma, &cfg.quad)
        } else {
            Ok(quantum_correlation(p))
        }
    }
}

pub fn bell(cfg: &RunConfig, angles: [f64; 3], gamma: f64, source: Source) -> Result<Table> {
    let gamma = GammaParam::new(gamma)?;
    let mut t = Table::new(["source", "gamma", "phi_xy", "phi_xz", "phi_yz", "lhs", "rhs", "verdict"]);
    for &src in source.expand() {
        let r = bell_original_check(angles[0], angles[1], angles[2], correlation_for(src, gamma, cfg))?;
        let g_cell: Cell = if src == "model" { gamma.value().into() } else { Cell::Empty };
        t.push(vec![
            src.into(),
            g_cell,
            angles[0].into(),
            angles[1].into(),
            angles[2].into(),
            r.lhs.into(),
            r.rhs.into(),
            if r.violated { "VIOLATED" } else { "satisfied" }.into(),
        ]);
    }
    Ok(t)
}

pub fn chsh(cfg: &RunConfig, angles: [f64; 4], gamma: f64, source: Source) -> Result<Table> {
    let gamma = GammaParam::new(gamma)?;
    let mut t = Table::new(["source", "gamma", "phi_ab", "phi_ab2", "phi_a2b", "phi_a2b2", "chsh", "local_bound", "verdict"]);
    for &src in source.expand() {
        let v = chsh_value(angles[0], angles[1], angles[2], angles[3], correlation_for(src, gamma, cfg))?;
        let g_cell: Cell = if src == "model" { gamma.value().into() } else { Cell::Empty };
        t.push(vec![
            src.into(),
            g_cell,
            angles[0].into(),
            angles[1].into(),
            angles[2].into(),
            angles[3].into(),
            v.into(),
            2.0.into(),
            if v > 2.0 { "VIOLATED" } else { "satisfied" }.into(),
        ]);
    }
    Ok(t)
}

pub fn distance(cfg: &RunConfig, phi_a: f64, phi_b: f64, gamma: f64) -> Result<Table> {
    let pair = DistancePair::new(phi_a, phi_b)?;
    let gamma = GammaParam::new(gamma)?;
    let d = distance_d(pair, gamma, &cfg.quad)?;
    let mut t = Table::new(["phi_a", "phi_b", "gamma", "d"]);
    t.push(vec![phi_a.into(), phi_b.into(), gamma.value().into(), d.into()]);
    Ok(t)
}

fn dmax_table(results: &[DmaxResult]) -> Table {
    let mut t = Table::new(["gamma", "phi_a", "phi_b", "d_max", "grid_n", "refine_tol"]);
    for r in results {
        t.push(vec![
            r.gamma.value().into(),
            r.argmax.phi_a.radians().into(),
            r.argmax.phi_b.radians().into(),
            r.d_max.into(),
            r.grid_n.into(),
            r.refine_tol.into(),
        ]);
    }
    t
}

pub fn dmax_single(cfg: &RunConfig, gamma: f64) -> Result<Table> {
    let r = find_dmax(GammaParam::new(gamma)?, cfg.grid_n, cfg.refine_tol, &cfg.quad)?;
    Ok(dmax_table(&[r]))
}

/// Scans `gammas`, writing `figure2.{csv,json}` and `figure2.svg` to the output directory.
pub fn dmax_scan(cfg: &RunConfig, gammas: &[GammaParam]) -> Result<CommandOutput> {
    let results = distance::dmax_scan(gammas, cfg.grid_n, cfg.refine_tol, &cfg.quad)?;
    let table = dmax_table(&results);
    prepare_dir(&cfg.out_dir)?;
    let data_path = cfg.out_dir.join(format!("figure2.{}", cfg.format.extension()));
    table.write_to(&data_path, cfg.format)?;

    let mut pts: Vec<(f64, f64)> = results.iter().map(|r| (r.gamma.value(), r.d_max)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let (x, y) = pts.into_iter().unzip();
    let series = FigureSeries::new("d_max(γ)", x, y, 0)?;
    let svg_path = cfg.out_dir.join("figure2.svg");
    std::fs::write(&svg_path, line_chart("maximum distance versus γ", "γ", "d_max", &[series]))?;
    Ok(CommandOutput { table, files: vec![data_path, svg_path] })
}

pub fn gamma0_analytic() -> Result<Table> {
    let m = solve_gamma0_maximum()?;
    let d_quarter = distance_gamma0_antidiagonal(FRAC_PI_4)?;
    let mut t = Table::new(["quantity", "value"]);
    let rows: [(&str, f64); 8] = [
        ("phi_star", m.phi_star),
        ("phi_star_partner", PI - m.phi_star),
        ("d_max", m.d_max),
        ("stationarity_residual", m.residual),
        ("d_at_pi_over_4", d_quarter),
        ("d_max_minus_d_at_pi_over_4", m.d_max - d_quarter),
        ("open_interval_lower", QUARTER_ANGLE_D),
        ("open_interval_upper", GAMMA0_DMAX),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v.into()]);
    }
    Ok(t)
}
