//! Frozen γ₀ grids, compared against fresh `gamma-grid` output.

use crate::commands::gamma_grid_csv;
use crate::csv::GridCsv;
use crate::spec::ModelSpec;

use super::Recorder;

pub const FIGURE_RESOLUTION: usize = 101;
pub const FIGURE_DELTA: f64 = 0.01;
pub const FIGURE_PAIR: &str = "1,2";

#[derive(Clone, Copy, Debug)]
pub struct FigureConfig {
    pub name: &'static str,
    pub spec: &'static str,
    pub golden: &'static str,
}

macro_rules! figure {
    ($name:literal) => {
        FigureConfig {
            name: $name,
            spec: include_str!(concat!("../../goldens/", $name, ".json")),
            golden: include_str!(concat!("../../goldens/", $name, ".csv")),
        }
    };
}

pub fn figure_configs() -> Vec<FigureConfig> {
    vec![
        figure!("clayton"),
        figure!("frank_theta_m5"),
        figure!("frank_theta_m2"),
        figure!("frank_theta_m0.5"),
        figure!("frank_theta_0.5"),
        figure!("frank_theta_2"),
        figure!("frank_theta_5"),
        figure!("frank_theta_10"),
        figure!("invgauss_theta_1"),
        figure!("chisq_rho2_0.1"),
        figure!("chisq_rho2_0.5"),
        figure!("chisq_rho2_0.9"),
        figure!("prop_beta_1"),
    ]
}

impl FigureConfig {
    pub fn render(&self) -> crate::error::CliResult<GridCsv> {
        let model = ModelSpec::parse(self.spec)?.build()?;
        gamma_grid_csv(&model, FIGURE_PAIR, FIGURE_RESOLUTION, FIGURE_DELTA, None)
    }
}

pub(crate) fn run(rec: &mut Recorder) {
    for fig in figure_configs() {
        let fresh = fig.render();
        let golden = GridCsv::parse(fig.golden);
        let name = format!("golden grid {}", fig.name);
        match (fresh, golden) {
            (Ok(fresh), Ok(golden)) => {
                rec.holds(format!("{name} bit-identical"), || {
                    Ok((fresh.render() != fig.golden).then(|| "rendered grid differs from the golden file".to_string()))
                });
                rec.within(format!("{name} numeric"), 1e-10, || {
                    if fresh.rows.len() != golden.rows.len() {
                        return Err(hazdep::Error::Structural(format!("{} rows vs {}", fresh.rows.len(), golden.rows.len())));
                    }
                    let mut worst = 0.0f64;
                    for (a, b) in fresh.rows.iter().zip(&golden.rows) {
                        for (x, y) in a.iter().zip(b) {
                            if x.is_nan() != y.is_nan() {
                                return Ok(f64::INFINITY);
                            }
                            if !x.is_nan() {
                                worst = worst.max((x - y).abs());
                            }
                        }
                    }
                    Ok(worst)
                });
            }
            (fresh, golden) => {
                let msg = fresh.err().map(|e| e.to_string()).or(golden.err()).unwrap_or_default();
                rec.holds(name, || Ok(Some(msg)));
            }
        }
    }
}
