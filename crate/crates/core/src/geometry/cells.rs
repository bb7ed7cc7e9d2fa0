//! Cylinder cells `T_{k_1} ∩ T^{-1} T_{k_2} ∩ ... ∩ T^{-(d-1)} T_{k_d}`.
//!
//! Cells are built depth-first on forward images: if `F = T^{d-1}(cell)`
//! lies in `T_{k_d}`, the children are `B_{k_d}(F) ∩ T_s`, and the child
//! region is recovered by inverting the composed branch map. Every branch is
//! in `SL_2(Z)`, so region and forward image always have equal area.

use std::io::{BufRead, Write};
use std::ops::RangeInclusive;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::bcz::{branch_map, region_tk, region_tk_star, slab_halfplanes};
use super::{floor_int, parse_rat, ConvexPolygon, Point, Rat, UnimodularMap};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderCell {
    pub itinerary: Vec<u64>,
    pub region: ConvexPolygon,
    /// `T^{d-1}(region)`, contained in `T_{k_d}`.
    pub forward_image: ConvexPolygon,
    /// `B_{k_{d-1}} ⋯ B_{k_1}`, mapping `region` onto `forward_image`.
    pub composed_map: UnimodularMap,
}

impl CylinderCell {
    pub fn area(&self) -> Rat {
        self.region.area()
    }

    pub fn depth(&self) -> usize {
        self.itinerary.len()
    }

    fn root(k: u64) -> Result<Self> {
        let r = region_tk(k)?;
        Ok(Self {
            itinerary: vec![k],
            region: r.clone(),
            forward_image: r,
            composed_map: UnimodularMap::identity(),
        })
    }

    /// Rebuild a cell from its itinerary and region.
    pub fn from_region(itinerary: Vec<u64>, region: ConvexPolygon) -> Result<Self> {
        if itinerary.is_empty() || itinerary.contains(&0) {
            return domain("itinerary entries must be positive");
        }
        let map = itinerary[..itinerary.len() - 1]
            .iter()
            .fold(UnimodularMap::identity(), |m, &k| branch_map(k).compose(&m));
        let forward_image = region.map(&map);
        Ok(Self {
            itinerary,
            region,
            forward_image,
            composed_map: map,
        })
    }

    fn children(&self, kappa_max: u64) -> Vec<CylinderCell> {
        let last = *self.itinerary.last().expect("itinerary is non-empty");
        let branch = branch_map(last);
        let image = self.forward_image.map(&branch);
        let map = branch.compose(&self.composed_map);
        let inverse = map.inverse();
        symbol_range(&image, kappa_max)
            .filter_map(|s| {
                let fwd = image.clip_all(&slab_halfplanes(s));
                if fwd.is_empty() {
                    return None;
                }
                let mut itinerary = self.itinerary.clone();
                itinerary.push(s);
                Some(CylinderCell {
                    itinerary,
                    region: fwd.map(&inverse),
                    forward_image: fwd,
                    composed_map: map.clone(),
                })
            })
            .collect()
    }
}

/// Values of `κ_1` that can occur on a polygon inside the triangle, capped.
fn symbol_range(poly: &ConvexPolygon, cap: u64) -> RangeInclusive<u64> {
    let mut lo = u64::MAX;
    let mut hi = 0u64;
    for p in poly.vertices() {
        if !p.y.is_positive() {
            hi = cap;
            continue;
        }
        let v = floor_int(&((Rat::from_integer(1.into()) + &p.x) / &p.y))
            .to_u64()
            .unwrap_or(u64::MAX);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    lo.max(1)..=hi.min(cap)
}

fn descend(cell: CylinderCell, depth: usize, kappa_max: u64, out: &mut Vec<CylinderCell>) {
    if cell.depth() == depth {
        out.push(cell);
        return;
    }
    for child in cell.children(kappa_max) {
        descend(child, depth, kappa_max, out);
    }
}

/// All depth-`depth` cells whose itinerary entries are at most `kappa_max`
/// and whose interior is non-empty, in lexicographic itinerary order.
pub fn enumerate_cells(depth: usize, kappa_max: u64) -> Result<Vec<CylinderCell>> {
    if depth == 0 {
        return domain("depth must be at least 1");
    }
    if kappa_max == 0 {
        return domain("kappa_max must be at least 1");
    }
    let branch = |k: u64| -> Result<Vec<CylinderCell>> {
        let mut out = Vec::new();
        descend(CylinderCell::root(k)?, depth, kappa_max, &mut out);
        Ok(out)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<Vec<CylinderCell>>> = {
        use rayon::prelude::*;
        (1..=kappa_max).into_par_iter().map(branch).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<Vec<CylinderCell>>> = (1..=kappa_max).map(branch).collect();
    let mut cells = Vec::new();
    for p in parts {
        cells.extend(p?);
    }
    Ok(cells)
}

/// The symbols that follow a visit to `T_m*` for `steps` iterations, if
/// they are the same for every point of `T_m*`.
///
/// `T` maps `T_m*` onto its mirror image in the diagonal, and the mirror
/// conjugates `T` to `T^{-1}`, so the same list also gives the symbols that
/// precede the visit, read backwards in time.
pub fn forced_itinerary(m: u64, steps: usize) -> Result<Option<Vec<u64>>> {
    let mut poly = region_tk_star(m)?.reflect();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        if poly.vertices().iter().any(|p| !p.y.is_positive()) {
            return Ok(None);
        }
        let range = symbol_range(&poly, u64::MAX);
        let area = poly.area();
        let mut hit = None;
        for s in range {
            let part = poly.clip_all(&slab_halfplanes(s));
            if part.is_empty() {
                continue;
            }
            if hit.is_some() || part.area() != area {
                return Ok(None);
            }
            hit = Some(s);
        }
        let Some(s) = hit else { return Ok(None) };
        out.push(s);
        poly = poly.map(&branch_map(s));
    }
    Ok(Some(out))
}

const CACHE_MAGIC: &str = "# farey-lab cells";

/// Write cells as text: a header line, then one line per cell of the form
/// `k_1 k_2 ... k_d; x/y,x/y x/y,x/y ...` (region vertices, counterclockwise).
pub fn write_cell_cache<W: Write>(
    mut w: W,
    depth: usize,
    kappa_max: u64,
    cells: &[CylinderCell],
) -> Result<()> {
    let io = |e: std::io::Error| Error::Cache(e.to_string());
    writeln!(w, "{CACHE_MAGIC} depth={depth} kappa_max={kappa_max}").map_err(io)?;
    for c in cells {
        let it: Vec<String> = c.itinerary.iter().map(u64::to_string).collect();
        let vs: Vec<String> = c.region.vertices().iter().map(Point::to_string).collect();
        writeln!(w, "{}; {}", it.join(" "), vs.join(" ")).map_err(io)?;
    }
    Ok(())
}

/// Read a cache written by [`write_cell_cache`], returning `(depth, kappa_max, cells)`.
pub fn read_cell_cache<R: BufRead>(r: R) -> Result<(usize, u64, Vec<CylinderCell>)> {
    let bad = |msg: String| Error::Cache(msg);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty cache".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let rest = header
        .strip_prefix(CACHE_MAGIC)
        .ok_or_else(|| bad(format!("bad header: {header}")))?;
    let mut depth = None;
    let mut kappa_max = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("depth", v)) => depth = v.parse::<usize>().ok(),
            Some(("kappa_max", v)) => kappa_max = v.parse::<u64>().ok(),
            _ => return Err(bad(format!("bad header field: {field}"))),
        }
    }
    let (depth, kappa_max) = depth
        .zip(kappa_max)
        .ok_or_else(|| bad(format!("bad header: {header}")))?;
    let mut cells = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let (it, vs) = line
            .split_once(';')
            .ok_or_else(|| bad(format!("line {}: missing ';'", n + 2)))?;
        let itinerary = it
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("line {}: {e}", n + 2)))?;
        let vertices = vs
            .split_whitespace()
            .map(|pair| {
                let (x, y) = pair
                    .split_once(',')
                    .ok_or_else(|| bad(format!("line {}: bad vertex {pair}", n + 2)))?;
                Ok(Point::new(parse_rat(x)?, parse_rat(y)?))
            })
            .collect::<Result<Vec<_>>>()?;
        if itinerary.len() != depth {
            return Err(bad(format!("line {}: itinerary length differs from depth", n + 2)));
        }
        let region = ConvexPolygon::new(vertices)?;
        if region.area().is_zero() {
            return Err(bad(format!("line {}: empty region", n + 2)));
        }
        cells.push(CylinderCell::from_region(itinerary, region)?);
    }
    Ok((depth, kappa_max, cells))
}
