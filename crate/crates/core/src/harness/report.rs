//! Aggregating a suite's CSVs into seed bands and final-success tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::suite::{Summary, CSV_HEADER, SCHEMA_VERSION, SUMMARY_FILE};
use crate::error::{Error, Result};

pub const REPORT_FILE: &str = "report.json";
/// Points on each aggregated curve.
pub const CURVE_POINTS: usize = 50;

/// One parsed CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub step: usize,
    pub episode: usize,
    pub success_rolling20: f64,
    pub r_dist_mean: f64,
    pub r_prog_mean: f64,
    pub r_expl_mean: f64,
    pub m_final: usize,
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, what: &str| Error::config(format!("{}:{line}: {what}", path.display()));
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(bad(1, "unexpected header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(i + 2, "expected 7 fields"));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(i + 2, "bad integer"));
            let real = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 2, "bad number"));
            Ok(Row {
                step: int(f[0])?,
                episode: int(f[1])?,
                success_rolling20: real(f[2])?,
                r_dist_mean: real(f[3])?,
                r_prog_mean: real(f[4])?,
                r_expl_mean: real(f[5])?,
                m_final: int(f[6])?,
            })
        })
        .collect()
}

/// Rolling success at `step`: the last episode ending at or before it.
pub fn success_at(rows: &[Row], step: usize) -> f64 {
    let i = rows.partition_point(|r| r.step <= step);
    if i == 0 {
        0.0
    } else {
        rows[i - 1].success_rolling20
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Band {
    pub fn of(values: &[f64]) -> Option<Band> {
        if values.is_empty() {
            return None;
        }
        Some(Band {
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            median: median(values),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveBand {
    pub step: Vec<usize>,
    pub min: Vec<f64>,
    pub median: Vec<f64>,
    pub max: Vec<f64>,
}

/// One (level, task, method) group across seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub level: String,
    pub task: String,
    pub mode: String,
    pub seeds: Vec<u64>,
    pub missing_seeds: Vec<u64>,
    pub final_success: Option<Band>,
    pub curve: Option<CurveBand>,
}

impl Cell {
    pub fn complete(&self) -> bool {
        self.missing_seeds.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub dir: PathBuf,
    /// `(label, column header)` in sweep order.
    pub levels: Vec<(String, String)>,
    pub cells: Vec<Cell>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, level: &str, task: &str, mode: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.level == level && c.task == task && c.mode == mode)
    }

    /// Final-success table: one row per method/task, one column per level.
    /// Entries are `median [min, max]` over seeds; `*` marks an incomplete
    /// cell, `-` a cell without any data.
    pub fn render(&self) -> String {
        let mut s = String::new();
        if self.is_empty() {
            let _ = writeln!(s, "{}: empty, no metrics found", self.dir.display());
            return s;
        }
        let mut rows: BTreeSet<(String, String)> = BTreeSet::new();
        for c in &self.cells {
            rows.insert((c.mode.clone(), c.task.clone()));
        }
        let _ = writeln!(s, "final rolling success (median [min, max] over seeds)");
        let _ = write!(s, "{:<32}", "method/task");
        for (_, col) in &self.levels {
            let _ = write!(s, " | {:<20}", col);
        }
        s.push('\n');
        for (mode, task) in rows {
            let _ = write!(s, "{:<32}", format!("{mode}/{task}"));
            for (label, _) in &self.levels {
                let entry = match self.cell(label, &task, &mode) {
                    Some(c) => {
                        let flag = if c.complete() { "" } else { "*" };
                        match &c.final_success {
                            Some(b) => format!("{:.2} [{:.2}, {:.2}]{flag}", b.median, b.min, b.max),
                            None => format!("-{flag}"),
                        }
                    }
                    None => "-".to_string(),
                };
                let _ = write!(s, " | {:<20}", entry);
            }
            s.push('\n');
        }
        let incomplete: Vec<_> = self.cells.iter().filter(|c| !c.complete()).collect();
        if !incomplete.is_empty() {
            let _ = writeln!(s, "\n* incomplete grid cells:");
            for c in incomplete {
                let _ = writeln!(
                    s,
                    "  {}/{}/{} missing seeds {:?}",
                    c.level, c.task, c.mode, c.missing_seeds
                );
            }
        }
        s
    }
}

/// `<level>/<task>/<mode>/seed<k>.csv` files under `dir`.
fn find_csvs(dir: &Path) -> Result<Vec<(String, String, String, u64)>> {
    let mut found = Vec::new();
    let read = |p: &Path| -> Result<Vec<PathBuf>> {
        let mut v: Vec<PathBuf> = fs::read_dir(p)
            .map_err(|e| Error::io(p, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        v.sort();
        Ok(v)
    };
    let name = |p: &Path| p.file_name().and_then(|n| n.to_str()).unwrap_or("").to_string();
    for level in read(dir)?.into_iter().filter(|p| p.is_dir()) {
        for task in read(&level)?.into_iter().filter(|p| p.is_dir()) {
            for mode in read(&task)?.into_iter().filter(|p| p.is_dir()) {
                for f in read(&mode)? {
                    let n = name(&f);
                    if let Some(seed) = n
                        .strip_prefix("seed")
                        .and_then(|r| r.strip_suffix(".csv"))
                        .and_then(|k| k.parse().ok())
                    {
                        found.push((name(&level), name(&task), name(&mode), seed));
                    }
                }
            }
        }
    }
    Ok(found)
}

/// Builds the report for `dir` and writes it to `dir/report.json`, unless
/// the directory holds no metrics at all.
pub fn report(dir: &Path) -> Result<Report> {
    if !dir.is_dir() {
        return Err(Error::config(format!("{} is not a directory", dir.display())));
    }
    let summary = if dir.join(SUMMARY_FILE).exists() {
        Some(Summary::load(dir)?)
    } else {
        None
    };
    let found = find_csvs(dir)?;

    // Expected grid: planned runs plus whatever is on disk.
    let mut groups: BTreeMap<(String, String, String), BTreeSet<u64>> = BTreeMap::new();
    let mut all_seeds: BTreeSet<u64> = BTreeSet::new();
    if let Some(sm) = &summary {
        for r in &sm.runs {
            groups.entry((r.level.clone(), r.task.clone(), r.mode.clone())).or_default();
            all_seeds.insert(r.seed);
        }
    }
    let mut on_disk: BTreeSet<(String, String, String, u64)> = BTreeSet::new();
    for (level, task, mode, seed) in found {
        groups.entry((level.clone(), task.clone(), mode.clone())).or_default().insert(seed);
        all_seeds.insert(seed);
        on_disk.insert((level, task, mode, seed));
    }

    let mut levels: Vec<(String, String)> = match &summary {
        Some(sm) => sm.levels.iter().map(|l| (l.label.clone(), l.column.clone())).collect(),
        None => Vec::new(),
    };
    for (level, _, _) in groups.keys() {
        if !levels.iter().any(|(l, _)| l == level) {
            levels.push((level.clone(), level.clone()));
        }
    }

    let mut cells = Vec::new();
    for ((level, task, mode), seeds_found) in groups {
        let mut curves = Vec::new();
        for &seed in &seeds_found {
            let path = dir.join(&level).join(&task).join(&mode).join(format!("seed{seed}.csv"));
            curves.push(read_csv(&path)?);
        }
        let finals: Vec<f64> = curves
            .iter()
            .filter_map(|rows| rows.last().map(|r| r.success_rolling20))
            .collect();
        let last_step = curves.iter().filter_map(|r| r.last().map(|r| r.step)).max().unwrap_or(0);
        let curve = (last_step > 0).then(|| {
            let steps: Vec<usize> = (1..=CURVE_POINTS).map(|i| last_step * i / CURVE_POINTS).collect();
            let mut band = CurveBand {
                step: steps.clone(),
                min: Vec::new(),
                median: Vec::new(),
                max: Vec::new(),
            };
            for &st in &steps {
                let vals: Vec<f64> = curves.iter().map(|rows| success_at(rows, st)).collect();
                let b = Band::of(&vals).expect("at least one curve");
                band.min.push(b.min);
                band.median.push(b.median);
                band.max.push(b.max);
            }
            band
        });
        let missing_seeds = all_seeds
            .iter()
            .filter(|s| !on_disk.contains(&(level.clone(), task.clone(), mode.clone(), **s)))
            .copied()
            .collect();
        cells.push(Cell {
            level,
            task,
            mode,
            seeds: seeds_found.into_iter().collect(),
            missing_seeds,
            final_success: Band::of(&finals),
            curve,
        });
    }

    let report = Report {
        schema_version: SCHEMA_VERSION,
        dir: dir.to_path_buf(),
        levels,
        cells,
    };
    if !report.is_empty() {
        let path = dir.join(super::report::REPORT_FILE);
        let text = serde_json::to_string_pretty(&report).map_err(|e| Error::config(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    }
    Ok(report)
}
