//! The grid-producing commands, as functions from a loaded model to a CSV table.

use hazdep::depfun::{gamma_grid, GammaRoute, HazardModel};
use hazdep::lattice::{factorize, linspace, GridDomain, GridSpec, Support};
use hazdep::IndexSet;

use crate::csv::GridCsv;
use crate::error::{CliError, CliResult};
use crate::spec::LoadedModel;

fn axis_prefix(support: Support) -> &'static str {
    match support {
        Support::UnitCube => "u",
        Support::Orthant => "t",
    }
}

fn parse_subset(model: &LoadedModel, text: &str) -> CliResult<IndexSet> {
    let d = model.dim();
    IndexSet::parse(d, text).map_err(|e| {
        CliError::Library(hazdep::Error::Capability(format!(
            "model `{}` of dimension {d} does not support `{text}`: {e}",
            model.label()
        )))
    })
}

/// `γ_{0,pair}` on `[0, 1-δ]²` with `resolution` nodes per axis.
pub fn gamma_grid_csv(
    model: &LoadedModel,
    pair: &str,
    resolution: usize,
    delta: f64,
    route: Option<GammaRoute>,
) -> CliResult<GridCsv> {
    let i = parse_subset(model, pair)?;
    if i.len() != 2 {
        return Err(CliError::Usage(format!("--pair needs two distinct indices, got `{pair}`")));
    }
    let grid = model.with_model(|m| gamma_grid(m, i, resolution, delta, route))?;
    let axes = i.to_axes();
    let mut csv = GridCsv::new(vec![format!("u{}", axes[0] + 1), format!("u{}", axes[1] + 1), "value".into()])
        .with_meta("model", model.label())
        .with_meta("I", i)
        .with_meta("resolution", resolution)
        .with_meta("delta", delta)
        .with_meta("route", grid.route);
    for (a, &ua) in grid.axis.iter().enumerate() {
        for (b, &ub) in grid.axis.iter().enumerate() {
            csv.push(vec![ua, ub, grid.value(a, b)]);
        }
    }
    Ok(csv)
}

/// Parses `lo:hi:n` (shared by every axis) or `;`-separated per-axis items,
/// each `lo:hi:n` or a comma list of points.
pub fn parse_grid_axes(text: &str, k: usize) -> CliResult<Vec<Vec<f64>>> {
    let items: Vec<&str> = text.split(';').map(str::trim).collect();
    let parse_item = |item: &str| -> CliResult<Vec<f64>> {
        let bad = || CliError::Usage(format!("cannot parse grid `{item}`; expected `lo:hi:n` or a comma list"));
        if item.contains(':') {
            let parts: Vec<&str> = item.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
            if n < 2 || !(lo < hi) {
                return Err(bad());
            }
            Ok(linspace(lo, hi, n))
        } else {
            item.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
        }
    };
    match items.len() {
        1 => Ok(vec![parse_item(items[0])?; k]),
        n if n == k => items.into_iter().map(parse_item).collect(),
        n => Err(CliError::Usage(format!("grid has {n} axes, subset needs {k}"))),
    }
}

/// `Λ_I` on a grid over the axes of `I`.
pub fn factorize_csv(model: &LoadedModel, subset: &str, grid: &str) -> CliResult<GridCsv> {
    let i = parse_subset(model, subset)?;
    i.ensure_nonempty()?;
    let axes = parse_grid_axes(grid, i.len())?;
    let top = axes.iter().flat_map(|a| a.iter().copied()).fold(f64::NEG_INFINITY, f64::max);
    model.with_model(|m| {
        let support = m.support();
        let domain = match support {
            Support::UnitCube => GridDomain::UnitCube { delta: 1.0 - top },
            Support::Orthant => GridDomain::Orthant { upper: top },
        };
        let spec = GridSpec::new(axes, domain)?;
        let parts = factorize(m, i, &spec)?;
        let values = parts.exponent(i).expect("factorization covers its own index set");
        let prefix = axis_prefix(support);
        let mut cols: Vec<String> = i.axes().map(|a| format!("{prefix}{}", a + 1)).collect();
        cols.push("value".into());
        let mut csv = GridCsv::new(cols)
            .with_meta("model", m.label())
            .with_meta("I", i)
            .with_meta("grid", grid)
            .with_meta("quantity", "Lambda_I");
        for (flat, v) in values.into_iter().enumerate() {
            let mut row = parts.point(i, flat);
            row.push(v);
            csv.push(row);
        }
        Ok(csv)
    })
}

/// `n` lifetimes drawn from `seed`, mapped through the spec's marginals when given.
pub fn sample_csv(model: &LoadedModel, n: usize, seed: u64) -> CliResult<GridCsv> {
    let draws = model.model.sample_lifetimes(n, seed)?;
    let d = model.dim();
    let prefix = if model.marginals.is_some() { model.with_model(|m| axis_prefix(m.support())) } else { "t" };
    let cols: Vec<String> = (1..=d).map(|k| format!("{prefix}{k}")).collect();
    let mut csv = GridCsv::new(cols).with_meta("model", model.label()).with_meta("n", n).with_meta("seed", seed);
    let native: Vec<_> = (0..d).map(|k| model.model.marginal(k)).collect();
    for row in draws.rows() {
        let out = match &model.marginals {
            None => row.to_vec(),
            Some(targets) => row
                .iter()
                .zip(native.iter().zip(targets))
                .map(|(&t, (from, to))| to.inverse_cumulative_hazard(from.cumulative_hazard(t)))
                .collect::<hazdep::Result<Vec<_>>>()?,
        };
        csv.push(out);
    }
    Ok(csv)
}
