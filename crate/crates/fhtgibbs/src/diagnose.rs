//! Ratio reports, moment tables, marginal grids and mode masses.

use fhtgibbs_core::diagnostics::{
    empirical_marginal, grid_ball_masses, moment_table, plus_minus_ratio, sample_ball_masses,
    MomentSource, RatioReport,
};
use fhtgibbs_core::fht::{fht_sample, linspace};
use fhtgibbs_core::{FhtModel, ParticleEnsemble, SeedPath};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const MODE_CENTERS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// One named CSV file.
pub type Table = (String, String);

fn ratio_row(source: &str, r: &RatioReport) -> String {
    format!(
        "{source},{},{},{},{}\n",
        r.u_plus, r.u_minus, r.iota, r.sample_count
    )
}

fn check_pairs(cfg: &RunConfig, d: usize) -> Result<()> {
    for &(i, j) in &cfg.diagnose.pairs {
        if i >= d || j >= d || i == j {
            return Err(CliError::Config(format!(
                "diagnose.pairs: invalid pair ({i}, {j}) for d = {d}"
            )));
        }
    }
    Ok(())
}

/// Model marginal on a `points x points` grid over the fitted box; rows are
/// `(x_i, x_j, density)` with `x_i` varying slowest.
pub fn model_marginal(
    model: &FhtModel,
    i: usize,
    j: usize,
    points: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let w = model.basis().half_width();
    let g = linspace(-w, w, points);
    let values = model.marginal_2d(i, j, &g, &g)?;
    Ok((g, values))
}

fn grid_csv(g: &[f64], values: &[f64]) -> String {
    let mut s = String::from("x_i,x_j,density\n");
    for (a, &x) in g.iter().enumerate() {
        for (b, &y) in g.iter().enumerate() {
            s.push_str(&format!("{x},{y},{}\n", values[a * g.len() + b]));
        }
    }
    s
}

fn balls_rows(source: &str, i: usize, j: usize, masses: &[f64]) -> String {
    MODE_CENTERS
        .iter()
        .zip(masses)
        .map(|(&(cx, cy), m)| format!("{source},{i},{j},{cx},{cy},{m}\n"))
        .collect()
}

/// All diagnostic tables for the given inputs, in a fixed order.
pub fn run_diagnose(
    cfg: &RunConfig,
    samples: Option<&ParticleEnsemble>,
    model: Option<&FhtModel>,
) -> Result<Vec<Table>> {
    if samples.is_none() && model.is_none() {
        return Err(CliError::Config(
            "diagnose needs a sample file, a model file, or both".into(),
        ));
    }
    let pairs = &cfg.diagnose.pairs;
    let points = cfg.diagnose.grid_points;
    let radius = cfg.diagnose.ball_radius;
    let mut ratio = String::from("source,u_plus,u_minus,iota,count\n");
    let mut moments = String::from("source,i,j,mean_i,mean_j,cross\n");
    let mut balls = String::from("source,i,j,center_i,center_j,mass\n");
    let mut grids = Vec::new();

    let mut add_moments = |source: &str, src: MomentSource<'_>| -> Result<()> {
        for r in moment_table(&src, pairs)? {
            moments.push_str(&format!(
                "{source},{},{},{},{},{}\n",
                r.i, r.j, r.mean_i, r.mean_j, r.cross
            ));
        }
        Ok(())
    };

    if let Some(s) = samples {
        check_pairs(cfg, s.dim())?;
        ratio.push_str(&ratio_row("samples", &plus_minus_ratio(s)?));
        add_moments("samples", MomentSource::Samples(s))?;
        let w = cfg.fht.half_width;
        for &(i, j) in pairs {
            let h = empirical_marginal(s, i, j, points, -w, w)?;
            if h.out_of_box > 0 {
                log::info!(
                    "({i}, {j}): {} samples outside the histogram box",
                    h.out_of_box
                );
            }
            grids.push((
                format!("marginal_samples_{i}_{j}.csv"),
                grid_csv(&h.centers(), &h.density),
            ));
            balls.push_str(&balls_rows(
                "samples",
                i,
                j,
                &sample_ball_masses(s, i, j, &MODE_CENTERS, radius)?,
            ));
        }
    }
    if let Some(m) = model {
        check_pairs(cfg, m.dim())?;
        if cfg.diagnose.model_samples > 0 {
            let seed = SeedPath::new(cfg.io.seed).child(3);
            let draws = fht_sample(m, cfg.diagnose.model_samples, cfg.fht.sample_grid, seed)?;
            ratio.push_str(&ratio_row("model", &plus_minus_ratio(&draws)?));
        }
        add_moments("model", MomentSource::Model(m))?;
        for &(i, j) in pairs {
            let (g, values) = model_marginal(m, i, j, points)?;
            balls.push_str(&balls_rows(
                "model",
                i,
                j,
                &grid_ball_masses(&values, &g, &g, &MODE_CENTERS, radius)?,
            ));
            grids.push((format!("marginal_model_{i}_{j}.csv"), grid_csv(&g, &values)));
        }
    }
    let mut tables = vec![
        ("ratio.csv".to_string(), ratio),
        ("moments.csv".to_string(), moments),
    ];
    if !pairs.is_empty() {
        tables.push(("balls.csv".to_string(), balls));
    }
    tables.extend(grids);
    Ok(tables)
}
