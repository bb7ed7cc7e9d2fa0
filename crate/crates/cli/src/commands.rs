use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use farey_lab::constants::{
    a_h_empirical, b3_cross_check, bk_empirical, bk_exact_from_cells, bk_trivial_bound, calibrate_c,
    convergence_report, nu_k_distribution, DEFAULT_KAPPA_MAX,
};
use farey_lab::farey::{correlation_sum, count_farey, sum_nu_k};
use farey_lab::geometry::{
    enumerate_cells, farey_triangle, read_cell_cache, region_tk, region_tk_star, visible_count, write_cell_cache,
    ConvexPolygon, CylinderCell,
};
use farey_lab::identities::verify_all;
use num_traits::ToPrimitive;
use serde_json::Value;

use crate::table::{approx, big, float, rat, Table};
use crate::{optional, required, CliError, Command, Settings};

pub struct Series {
    pub x: &'static str,
    pub y: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub struct CommandResult {
    pub table: Table,
    /// Replaces the default JSON rendering of `table`.
    pub json: Option<Value>,
    pub series: Option<Series>,
    /// False when a check failed (exit code 1).
    pub passed: bool,
}

impl CommandResult {
    fn table(table: Table) -> Self {
        Self {
            table,
            json: None,
            series: None,
            passed: true,
        }
    }

    fn with_series(mut self, x: &'static str, y: &'static str, points: Vec<(f64, f64)>) -> Self {
        self.series = Some(Series { x, y, points });
        self
    }
}

pub fn dispatch(command: Command, s: &Settings) -> Result<CommandResult, CliError> {
    let f = &s.file;
    match command {
        Command::Verify { order, k_max } => verify(
            required(order, f.order, "order")?,
            optional(k_max, f.k_max, "k-max")?.unwrap_or(8),
            s.chunks,
        ),
        Command::Avg { order, k } => avg(required(order, f.order, "order")?, required(k, f.k, "k")?, s.chunks),
        Command::Corr { order, h } => corr(
            required(order, f.order, "order")?,
            optional(h, f.h, "h")?.unwrap_or(1),
            s.chunks,
        ),
        Command::Constants { k, kappa_max, cell_cache } => constants(
            required(k, f.k, "k")?,
            kappa(kappa_max, s)?,
            cell_cache.as_deref().or(f.cell_cache.as_deref()),
        ),
        Command::Conv { k, orders, kappa_max } => conv(required(k, f.k, "k")?, &orders, kappa(kappa_max, s)?, s.chunks),
        Command::B3check {
            order,
            kappa_max,
            calibrate_to,
        } => b3check(required(order, f.order, "order")?, kappa(kappa_max, s)?, calibrate_to, s.chunks),
        Command::Dist { k, order, kappa_max } => {
            let k = required(k, f.k, "k")?;
            if k < 2 {
                return Err(CliError::Usage("k must be at least 2".into()));
            }
            dist(k, required(order, f.order, "order")?, kappa(kappa_max, s)?, s.chunks)
        }
        Command::Latcount { order, region } => latcount(required(order, f.order, "order")?, &region),
        Command::Cells {
            depth,
            kappa_max,
            cell_cache,
        } => cells(
            required(depth, None, "depth")? as usize,
            kappa(kappa_max, s)?,
            cell_cache.as_deref().or(f.cell_cache.as_deref()),
        ),
    }
}

fn kappa(flag: Option<u64>, s: &Settings) -> Result<u64, CliError> {
    Ok(optional(flag, s.file.kappa_max, "kappa-max")?.unwrap_or(DEFAULT_KAPPA_MAX))
}

fn verify(order: u64, k_max: u64, chunks: usize) -> Result<CommandResult, CliError> {
    let reports = verify_all(order, k_max, chunks)?;
    let mut t = Table::new(&["identity", "Q", "k_min", "k_max", "checked", "failure_count", "first_failure"]);
    for r in &reports {
        let first = r
            .failures
            .first()
            .map_or(String::new(), |f| format!("i={}: expected {} got {}", f.index, f.expected, f.got));
        t.push(vec![
            r.identity_name.clone().into(),
            r.order.into(),
            r.k_range.0.into(),
            r.k_range.1.into(),
            r.checked.into(),
            r.failure_count.into(),
            first.into(),
        ]);
    }
    Ok(CommandResult {
        passed: reports.iter().all(|r| r.passed()),
        json: Some(serde_json::to_value(&reports).map_err(|e| CliError::Failure(e.to_string()))?),
        ..CommandResult::table(t)
    })
}

fn avg(order: u64, k: u64, chunks: usize) -> Result<CommandResult, CliError> {
    let n = count_farey(order)?;
    let sum = sum_nu_k(order, k, chunks)?;
    let a = bk_empirical(k, order, chunks)?;
    let mut t = Table::new(&["Q", "k", "N", "sum", "average", "average_approx"]);
    t.push(vec![order.into(), k.into(), n.into(), big(sum), rat(&a), approx(&a)]);
    let y = a.to_f64().unwrap_or(f64::NAN);
    Ok(CommandResult::table(t).with_series("Q", "average", vec![(order as f64, y)]))
}

fn corr(order: u64, h: u64, chunks: usize) -> Result<CommandResult, CliError> {
    let n = count_farey(order)?;
    let sum = correlation_sum(order, h, chunks)?;
    let a = a_h_empirical(h, order, chunks)?;
    let mut t = Table::new(&["Q", "h", "N", "sum", "average", "average_approx"]);
    t.push(vec![order.into(), h.into(), n.into(), big(sum), rat(&a), approx(&a)]);
    let y = a.to_f64().unwrap_or(f64::NAN);
    Ok(CommandResult::table(t).with_series("h", "average", vec![(h as f64, y)]))
}

/// Cells of the given depth, from the cache when it covers `kappa_max`.
fn load_cells(path: Option<&Path>, depth: usize, kappa_max: u64) -> Result<Vec<CylinderCell>, CliError> {
    let fail = |e: std::io::Error| CliError::Failure(e.to_string());
    if let Some(p) = path {
        if p.exists() {
            let (d, l, cells) = read_cell_cache(BufReader::new(File::open(p).map_err(fail)?))?;
            if d == depth && l >= kappa_max {
                return Ok(cells);
            }
        }
    }
    let cells = enumerate_cells(depth, kappa_max)?;
    if let Some(p) = path {
        write_cell_cache(BufWriter::new(File::create(p).map_err(fail)?), depth, kappa_max, &cells)?;
    }
    Ok(cells)
}

fn constants(k: u64, kappa_max: u64, cache: Option<&Path>) -> Result<CommandResult, CliError> {
    let cells = if k >= 2 {
        load_cells(cache, k as usize - 1, kappa_max)?
    } else {
        Vec::new()
    };
    let b = bk_exact_from_cells(k, kappa_max, &cells)?;
    let ceiling = if k >= 2 {
        Value::String(bk_trivial_bound(k)?.to_string())
    } else {
        Value::Null
    };
    let mut t = Table::new(&[
        "k",
        "kappa_max",
        "depth",
        "lo",
        "hi",
        "tail_bound",
        "lo_approx",
        "hi_approx",
        "trivial_bound",
    ]);
    t.push(vec![
        k.into(),
        kappa_max.into(),
        b.depth.into(),
        rat(&b.lo),
        rat(&b.hi),
        rat(&b.tail_bound),
        approx(&b.lo),
        approx(&b.hi),
        ceiling,
    ]);
    Ok(CommandResult::table(t))
}

fn conv(k: u64, orders: &[u64], kappa_max: u64, chunks: usize) -> Result<CommandResult, CliError> {
    let r = convergence_report(k, orders, kappa_max, chunks)?;
    let mut t = Table::new(&[
        "Q",
        "k",
        "empirical",
        "b_k",
        "distance",
        "empirical_approx",
        "distance_approx",
        "model_approx",
    ]);
    let mut points = Vec::new();
    for row in &r.rows {
        t.push(vec![
            row.order.into(),
            k.into(),
            rat(&row.empirical),
            rat(&r.interval.lo),
            rat(&row.distance),
            approx(&row.empirical),
            approx(&row.distance),
            float(row.model),
        ]);
        points.push((row.order as f64, row.distance.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(CommandResult::table(t).with_series("Q", "distance", points))
}

fn b3check(order: u64, kappa_max: u64, calibrate_to: u64, chunks: usize) -> Result<CommandResult, CliError> {
    let c = calibrate_c(calibrate_to)?;
    let r = b3_cross_check(order, kappa_max, c, chunks)?;
    let mut t = Table::new(&[
        "Q",
        "kappa_max",
        "bk3",
        "a1_minus_1",
        "b3",
        "c_approx",
        "widening_approx",
        "distance_approx",
        "identity_holds",
        "inside",
    ]);
    t.push(vec![
        order.into(),
        kappa_max.into(),
        rat(&r.bk3),
        rat(&r.a1_minus_1),
        rat(&r.interval.lo),
        float(r.c),
        float(r.widening),
        float(r.distance_approx),
        r.identity_holds.into(),
        r.inside.into(),
    ]);
    Ok(CommandResult {
        passed: r.passed(),
        ..CommandResult::table(t)
    })
}

fn dist(k: u64, order: u64, kappa_max: u64, chunks: usize) -> Result<CommandResult, CliError> {
    let d = nu_k_distribution(k, kappa_max, order, chunks)?;
    let mut t = Table::new(&["v", "measure", "empirical", "measure_approx", "empirical_approx"]);
    let mut points = Vec::new();
    for (v, e) in &d.entries {
        t.push(vec![big(*v), rat(&e.measure), rat(&e.empirical), approx(&e.measure), approx(&e.empirical)]);
        points.push((*v as f64, e.empirical.to_f64().unwrap_or(f64::NAN)));
    }
    eprintln!("measure above kappa_max: {}", d.deficit);
    Ok(CommandResult::table(t).with_series("v", "empirical", points))
}

fn parse_region(text: &str) -> Result<ConvexPolygon, CliError> {
    let bad = || CliError::Usage(format!("unknown region {text:?}; use triangle, tk:K or star:K"));
    if text == "triangle" {
        return Ok(farey_triangle());
    }
    let (kind, k) = text.split_once(':').ok_or_else(bad)?;
    let k: u64 = k.parse().map_err(|_| bad())?;
    Ok(match kind {
        "tk" => region_tk(k)?,
        "star" => region_tk_star(k)?,
        _ => return Err(bad()),
    })
}

fn latcount(order: u64, region: &str) -> Result<CommandResult, CliError> {
    let poly = parse_region(region)?;
    let count = visible_count(&poly, order);
    let q = order as f64;
    let area = poly.area().to_f64().unwrap_or(f64::NAN);
    let expected = 6.0 * q * q * area / std::f64::consts::PI.powi(2);
    let mut t = Table::new(&["Q", "region", "count", "N", "expected_approx"]);
    t.push(vec![
        order.into(),
        region.into(),
        count.into(),
        count_farey(order)?.into(),
        float(expected),
    ]);
    Ok(CommandResult::table(t).with_series("Q", "count", vec![(q, count as f64)]))
}

fn cells(depth: usize, kappa_max: u64, cache: Option<&Path>) -> Result<CommandResult, CliError> {
    let cells = load_cells(cache, depth, kappa_max)?;
    let mut t = Table::new(&["itinerary", "area", "area_approx", "vertices"]);
    for c in cells.iter().filter(|c| c.itinerary.iter().all(|&s| s <= kappa_max)) {
        let it: Vec<String> = c.itinerary.iter().map(u64::to_string).collect();
        let vs: Vec<String> = c.region.vertices().iter().map(|p| p.to_string()).collect();
        t.push(vec![it.join(" ").into(), rat(&c.area()), approx(&c.area()), vs.join(" ").into()]);
    }
    Ok(CommandResult::table(t))
}
