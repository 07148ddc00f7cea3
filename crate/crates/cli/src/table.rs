//! Period-count grids: rows indexed by `(fixed point?, n)`, columns by `r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use similar::TextDiff;

use sds_core::affine::{closed_form_row, representative_spec, spec_fixed_point};
use sds_core::{PhaseGraph, RuleVector, SdsSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridRow {
    pub fixed_point: bool,
    pub n: u64,
    /// `counts[r - 1] = |Per_r|`.
    pub counts: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodGrid {
    pub r_max: u64,
    pub rows: Vec<GridRow>,
}

fn cells(classes: &[bool], n_min: u64, n_max: u64) -> Vec<(bool, u64)> {
    classes
        .iter()
        .flat_map(|&fp| (n_min..=n_max).map(move |n| (fp, n)))
        .collect()
}

/// Every row from the closed forms.
pub fn closed_grid(classes: &[bool], n_min: u64, n_max: u64, r_max: u64) -> Result<PeriodGrid, String> {
    let rows = cells(classes, n_min, n_max)
        .into_iter()
        .map(|(fp, n)| {
            closed_form_row(n, fp, r_max)
                .map(|counts| GridRow {
                    fixed_point: fp,
                    n,
                    counts,
                })
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    Ok(PeriodGrid { r_max, rows })
}

fn brute_counts(spec: &SdsSpec, r_max: u64, cap: u64) -> Result<Vec<u128>, String> {
    let table = PhaseGraph::build(spec, cap)
        .map_err(|e| e.to_string())?
        .orbit_decomposition();
    Ok((1..=r_max).map(|r| table.count(r) as u128).collect())
}

/// Every row by enumerating the phase space of one representative system
/// per class.
pub fn brute_grid(classes: &[bool], n_min: u64, n_max: u64, r_max: u64, cap: u64) -> Result<PeriodGrid, String> {
    let rows = cells(classes, n_min, n_max)
        .into_par_iter()
        .map(|(fp, n)| {
            let spec = representative_spec(n as usize, fp).map_err(|e| e.to_string())?;
            Ok(GridRow {
                fixed_point: fp,
                n,
                counts: brute_counts(&spec, r_max, cap)?,
            })
        })
        .collect::<Result<_, String>>()?;
    Ok(PeriodGrid { r_max, rows })
}

/// Enumerates `per_n` seeded random rule vectors for each `n` and lists those
/// whose counts differ from the row of their fixed-point class in `grid`.
pub fn sampled_mismatches(grid: &PeriodGrid, per_n: usize, seed: u64, cap: u64) -> Result<Vec<String>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    let mut sizes: Vec<u64> = grid.rows.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    for n in sizes {
        let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        for _ in 0..per_n {
            jobs.push((n, rng.gen::<u64>() & full));
        }
    }
    let found: Vec<Option<String>> = jobs
        .into_par_iter()
        .map(|(n, mask)| {
            let rules = RuleVector::new(n as usize, mask).map_err(|e| e.to_string())?;
            let spec = SdsSpec::with_identity_order(rules);
            let fp = spec_fixed_point(&spec).map_err(|e| e.to_string())?.exists;
            let Some(row) = grid.row(fp, n) else {
                return Ok(None);
            };
            let counts = brute_counts(&spec, grid.r_max, cap)?;
            Ok((counts != row.counts).then(|| {
                format!(
                    "rules {} (n={n}, fixed point {}): {:?} vs {:?}",
                    spec.rules(),
                    yes_no(fp),
                    counts,
                    row.counts
                )
            }))
        })
        .collect::<Result<_, String>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Unified diff of the text renderings, closed form on the left; `None`
/// when the grids are equal.
pub fn grid_diff(closed: &PeriodGrid, brute: &PeriodGrid) -> Option<String> {
    if closed == brute {
        return None;
    }
    let (left, right) = (closed.to_text(), brute.to_text());
    Some(
        TextDiff::from_lines(&left, &right)
            .unified_diff()
            .header("closed-form", "brute-force")
            .to_string(),
    )
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl PeriodGrid {
    pub fn row(&self, fixed_point: bool, n: u64) -> Option<&GridRow> {
        self.rows
            .iter()
            .find(|r| r.fixed_point == fixed_point && r.n == n)
    }

    /// `|Per_r|` for one cell.
    pub fn cell(&self, fixed_point: bool, n: u64, r: u64) -> Option<u128> {
        let row = self.row(fixed_point, n)?;
        row.counts.get(r.checked_sub(1)? as usize).copied()
    }

    pub fn entry_count(&self) -> usize {
        self.rows.iter().map(|r| r.counts.len()).sum()
    }

    /// One block per fixed-point class, columns right-aligned.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for fp in [true, false] {
            let rows: Vec<&GridRow> = self.rows.iter().filter(|r| r.fixed_point == fp).collect();
            if rows.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("fixed point: {}\n", yes_no(fp)));
            let mut lines: Vec<Vec<String>> = Vec::new();
            lines.push(
                std::iter::once("n\\r".to_string())
                    .chain((1..=self.r_max).map(|r| r.to_string()))
                    .collect(),
            );
            for row in rows {
                lines.push(
                    std::iter::once(row.n.to_string())
                        .chain(row.counts.iter().map(|c| c.to_string()))
                        .collect(),
                );
            }
            let widths: Vec<usize> = (0..lines[0].len())
                .map(|j| lines.iter().map(|l| l[j].len()).max().unwrap_or(0))
                .collect();
            for line in lines {
                let cells: Vec<String> = line
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
        out
    }

    /// Header `fixed_point,n,1,...,r_max`, one record per row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = ["fixed_point".to_string(), "n".to_string()]
            .into_iter()
            .chain((1..=self.r_max).map(|r| r.to_string()))
            .collect();
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let record: Vec<String> = [yes_no(row.fixed_point).to_string(), row.n.to_string()]
                .into_iter()
                .chain(row.counts.iter().map(|c| c.to_string()))
                .collect();
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    /// A JSON array of `{"fixed_point", "n", "counts"}` objects.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "{{\"fixed_point\":{},\"n\":{},\"counts\":{}}}",
                    r.fixed_point,
                    r.n,
                    serde_json::to_string(&r.counts).expect("integers serialize")
                )
            })
            .collect();
        format!("[{}]\n", rows.join(","))
    }
}
