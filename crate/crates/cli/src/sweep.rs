//! Cartesian-product parameter sweeps.

use anyhow::{bail, Result};
use frictionless_core::ermakov::SolverSettings;
use rayon::prelude::*;

use crate::config::{CycleConfig, ProtocolConfig, SweepConfig};
use crate::output::Table;
use crate::scenarios::{cycle_row, stroke_summary_row, CYCLE_COLUMNS, STROKE_SUMMARY_COLUMNS};

const STROKE_AXES: &[&str] = &["omega_start", "omega_end", "tau"];

/// The grid of a sweep: axis names and their values.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.values.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the `index`-th point with the first axis varying slowest.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.values.len()];
        for (axis, values) in self.values.iter().enumerate().rev() {
            coords[axis] = values[index % values.len()];
            index /= values.len();
        }
        coords
    }
}

enum Base<'a> {
    Cycle(&'a CycleConfig),
    Stroke(&'a ProtocolConfig),
}

pub fn grid(cfg: &SweepConfig) -> Result<Grid> {
    let allowed: &[&str] = match (&cfg.cycle, &cfg.stroke) {
        (Some(_), None) => CycleConfig::AXES,
        (None, Some(_)) => STROKE_AXES,
        _ => bail!("sweep needs exactly one of `cycle` or `stroke` as its base"),
    };
    if cfg.axes.is_empty() {
        bail!("sweep needs at least one axis");
    }
    let mut names = Vec::with_capacity(cfg.axes.len());
    let mut values = Vec::with_capacity(cfg.axes.len());
    for axis in &cfg.axes {
        if !allowed.contains(&axis.name.as_str()) {
            bail!(
                "unknown sweep axis `{}` (expected one of {})",
                axis.name,
                allowed.join(", ")
            );
        }
        if names.contains(&axis.name) {
            bail!("sweep axis `{}` given twice", axis.name);
        }
        names.push(axis.name.clone());
        values.push(axis.points()?);
    }
    Ok(Grid { names, values })
}

/// Evaluates every grid point on the current rayon pool and returns the rows in
/// grid order. Point failures go to the status column.
pub fn sweep(cfg: &SweepConfig, settings: &SolverSettings) -> Result<Table> {
    let grid = grid(cfg)?;
    let base = match (&cfg.cycle, &cfg.stroke) {
        (Some(c), _) => Base::Cycle(c),
        (_, Some(s)) => Base::Stroke(s),
        _ => unreachable!("checked by grid"),
    };
    let columns = match base {
        Base::Cycle(_) => CYCLE_COLUMNS,
        Base::Stroke(_) => STROKE_SUMMARY_COLUMNS,
    };
    let rows: Vec<_> = (0..grid.len())
        .into_par_iter()
        .map(|index| {
            let coords = grid.point(index);
            match &base {
                Base::Cycle(c) => {
                    let mut point = (*c).clone();
                    for (name, v) in grid.names.iter().zip(&coords) {
                        point.set(name, *v).expect("axis names validated");
                    }
                    cycle_row(&point, settings)
                }
                Base::Stroke(s) => {
                    let mut point = (*s).clone();
                    let applied = grid
                        .names
                        .iter()
                        .zip(&coords)
                        .try_for_each(|(name, v)| point.set(name, *v));
                    let mut row = stroke_summary_row(&point, settings);
                    if let Err(e) = applied {
                        row[0] = format!("error: {e:#}").into();
                        row[5..].fill(crate::output::Value::Null);
                    }
                    row
                }
            }
        })
        .collect();
    let mut table = Table::new(columns.iter().copied());
    for row in rows {
        table.push(row);
    }
    Ok(table)
}
