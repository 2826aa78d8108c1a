//! Parameter sweeps written as CSV. Grid points are evaluated in parallel and
//! written in grid order.

use crate::commands::Status;
use crate::config::RunConfig;
use anyhow::{bail, Context, Result};
use gcl_core::random::{random_class, seeded};
use gcl_core::twomode::{
    compose_class, decoupling_search, n1_threshold, n2_threshold, thermal_classify,
    zero_capacity_bound, BoundVariant, ClassKind, TwoModeClass,
};
use rand::Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::str::FromStr;

/// Inclusive grid `start:stop:step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) {
            bail!("empty grid {}:{}:{}", self.start, self.stop, self.step);
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| self.start + k as f64 * self.step).collect())
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        match parts.as_slice() {
            [single] => {
                let v = parse(single)?;
                Ok(Grid::new(v, v, 1.0))
            }
            [start, stop, step] => Ok(Grid::new(parse(start)?, parse(stop)?, parse(step)?)),
            _ => Err(format!("expected start:stop:step, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    /// N1(a) for class B and N2(0, b) for class C, with verdicts either side.
    Fig1,
    /// Zero-capacity bounds against N2 along a = const.
    Fig2,
    /// Squeezing needed to decouple a defective block.
    Fig3,
    /// Composition-table conformance on random draws.
    Table,
}

#[derive(Clone, Debug)]
pub struct SweepArgs {
    pub kind: SweepKind,
    pub a_grid: Option<Grid>,
    pub b_grid: Option<Grid>,
    pub x_grid: Option<Grid>,
    pub z_grid: Option<Grid>,
    pub a: Option<f64>,
    pub samples: usize,
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().context("flushing CSV")?;
    Ok(String::from_utf8(bytes)?)
}

const CROSSING: f64 = 1e-3;

fn crossing_row(curve: &str, param: f64, cls: TwoModeClass, threshold: f64) -> Result<Vec<String>> {
    let below = thermal_classify(&cls, (threshold - CROSSING).max(0.0))?;
    let above = thermal_classify(&cls, threshold + CROSSING)?;
    Ok(vec![
        curve.to_string(),
        num(param),
        num(threshold),
        below.to_string(),
        above.to_string(),
    ])
}

fn fig1(args: &SweepArgs) -> Result<String> {
    let a_points = args.a_grid.unwrap_or(Grid::new(1.05, 5.0, 0.05)).points()?;
    let b_points = args.b_grid.unwrap_or(Grid::new(0.1, 3.0, 0.1)).points()?;
    let mut rows: Vec<Vec<String>> = a_points
        .par_iter()
        .map(|&a| crossing_row("N1", a, TwoModeClass::defective(a), n1_threshold(a)?))
        .collect::<Result<_>>()?;
    let c_rows: Vec<Vec<String>> = b_points
        .par_iter()
        .map(|&b| {
            let cls = TwoModeClass::new(ClassKind::C, 0.0, b)?;
            crossing_row("N2", b, cls, n2_threshold(0.0, b)?)
        })
        .collect::<Result<_>>()?;
    rows.extend(c_rows);
    csv_text(&["curve", "param", "threshold", "verdict_below", "verdict_above"], rows)
}

fn fig2(args: &SweepArgs) -> Result<String> {
    let a = args.a.unwrap_or(1.0);
    let points = args.b_grid.unwrap_or(Grid::new(0.01, 3.0, 0.01)).points()?;
    let rows = points
        .par_iter()
        .map(|&b| {
            let first = zero_capacity_bound(a, b, BoundVariant::First)?;
            let second = zero_capacity_bound(a, b, BoundVariant::Second)?;
            let n2 = n2_threshold(a, b)?;
            Ok(vec![num(a), num(b), num(n2), num(first), num(second)])
        })
        .collect::<Result<_>>()?;
    csv_text(&["a", "b", "n2", "bound", "bound1"], rows)
}

fn fig3(args: &SweepArgs) -> Result<String> {
    let a = args.a.unwrap_or(2.0);
    let xs = args.x_grid.unwrap_or(Grid::new(1.0, 1.1, 0.02)).points()?;
    let zs = args.z_grid.unwrap_or(Grid::new(0.0, 0.04, 0.01)).points()?;
    let grid: Vec<(f64, f64)> = xs.iter().flat_map(|&x| zs.iter().map(move |&z| (x, z))).collect();
    let rows = grid
        .par_iter()
        .map(|&(x, z)| {
            let (threshold, status) = match decoupling_search(x, z, a) {
                Ok(Some(r)) => (num(r), "found"),
                Ok(None) => (String::new(), "not_found"),
                Err(gcl_core::Error::StandardForm { .. }) => (String::new(), "invalid_environment"),
                Err(e) => return Err(e.into()),
            };
            Ok(vec![num(x), num(z), num(a), threshold, status.to_string()])
        })
        .collect::<Result<_>>()?;
    csv_text(&["x", "z_plus", "a", "threshold", "status"], rows)
}

const FAMILIES: [char; 3] = ['A', 'B', 'C'];

fn draw(rng: &mut impl Rng, family: char) -> TwoModeClass {
    let kind = match family {
        'A' if rng.gen_bool(0.5) => ClassKind::A1,
        'A' => ClassKind::A2,
        'B' => ClassKind::B,
        _ => ClassKind::C,
    };
    random_class(rng, kind)
}

fn names(set: &BTreeSet<ClassKind>) -> String {
    set.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
}

fn table(config: &RunConfig, args: &SweepArgs) -> Result<String> {
    if args.samples == 0 {
        bail!("empty grid: --samples must be positive");
    }
    let cells: Vec<(char, char)> = FAMILIES
        .iter()
        .flat_map(|&p| FAMILIES.iter().map(move |&q| (p, q)))
        .collect();
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(index, &(p, q))| {
            let mut rng = seeded(config.seed.wrapping_mul(31).wrapping_add(index as u64));
            let mut allowed = BTreeSet::new();
            let mut observed = BTreeSet::new();
            let mut conforming = 0;
            for _ in 0..args.samples {
                let out = compose_class(&draw(&mut rng, p), &draw(&mut rng, q))?;
                conforming += usize::from(out.conforms());
                observed.insert(out.concrete.kind);
                allowed.extend(out.allowed);
            }
            Ok(vec![
                p.to_string(),
                q.to_string(),
                args.samples.to_string(),
                conforming.to_string(),
                names(&allowed),
                names(&observed),
            ])
        })
        .collect::<Result<_>>()?;
    csv_text(
        &["first", "second", "samples", "conforming", "allowed", "observed"],
        rows,
    )
}

pub fn run(config: &RunConfig, args: &SweepArgs) -> Result<(Status, String)> {
    let text = match args.kind {
        SweepKind::Fig1 => fig1(args)?,
        SweepKind::Fig2 => fig2(args)?,
        SweepKind::Fig3 => fig3(args)?,
        SweepKind::Table => table(config, args)?,
    };
    let status = if args.kind == SweepKind::Table && !table_conforms(&text) {
        Status::ValidationFailed
    } else {
        Status::Ok
    };
    Ok((status, text))
}

fn table_conforms(text: &str) -> bool {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .filter_map(|r| r.ok())
        .all(|r| r.get(2) == r.get(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0.1:0.3:0.1".parse().unwrap();
        assert_eq!(g.points().unwrap().len(), 3);
        let single: Grid = "2".parse().unwrap();
        assert_eq!(single.points().unwrap(), vec![2.0]);
        assert!("1:2".parse::<Grid>().is_err());
        assert!(Grid::new(1.0, 0.0, 0.1).points().is_err());
        assert!(Grid::new(0.0, 1.0, 0.0).points().is_err());
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
