use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{SweepResult, GAP_GRID, TEMPERATURE_GRID};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableId {
    /// Temperature vs. polarization.
    Table1,
    /// Gap vs. polarization.
    Table2,
    /// Gap vs. kink energy.
    Table3,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::Table1, TableId::Table2, TableId::Table3];

    pub fn file_name(self) -> &'static str {
        match self {
            TableId::Table1 => "table1.csv",
            TableId::Table2 => "table2.csv",
            TableId::Table3 => "table3.csv",
        }
    }

    pub fn header(self) -> &'static str {
        match self {
            TableId::Table1 => "temperature_K,inv2_P,inv3_P",
            TableId::Table2 => "gap_nm,inv2_P,inv3_P",
            TableId::Table3 => "gap_nm,inv2_Ek_J,inv3_Ek_J",
        }
    }

    pub fn grid(self) -> &'static [f64] {
        match self {
            TableId::Table1 => &TEMPERATURE_GRID,
            TableId::Table2 | TableId::Table3 => &GAP_GRID,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_name().trim_end_matches(".csv"))
    }
}

impl FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "table1" => Ok(TableId::Table1),
            "table2" => Ok(TableId::Table2),
            "table3" => Ok(TableId::Table3),
            other => Err(format!("unknown reference table `{other}`")),
        }
    }
}

/// A published table, kept with both its parsed values and the exact text of
/// every cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceTable {
    pub id: TableId,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub text: Vec<Vec<String>>,
}

impl ReferenceTable {
    pub fn parse(id: TableId, content: &str) -> Result<Self> {
        let bad = |m: String| Error::Reference(format!("{id}: {m}"));
        let mut lines = content.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        if header.trim() != id.header() {
            return Err(bad(format!("header `{header}`, expected `{}`", id.header())));
        }
        let columns: Vec<String> = header.trim().split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        let mut text = Vec::new();
        for (n, line) in lines.enumerate() {
            let fields: Vec<String> = line.trim().split(',').map(str::to_string).collect();
            if fields.len() != columns.len() {
                return Err(bad(format!("row {} has {} fields", n + 1, fields.len())));
            }
            let values = fields
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| bad(format!("row {}: invalid number `{f}`", n + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(values);
            text.push(fields);
        }
        let grid = id.grid();
        if rows.len() != grid.len() {
            return Err(bad(format!("{} rows, expected {}", rows.len(), grid.len())));
        }
        for (row, &g) in rows.iter().zip(grid) {
            if row[0] != g {
                return Err(bad(format!("grid value {} where {g} was expected", row[0])));
            }
        }
        Ok(ReferenceTable { id, columns, rows, text })
    }

    /// Reads `<dir>/<id>.csv`.
    pub fn load(id: TableId, dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join(id.file_name());
        let content = std::fs::read_to_string(&path)
            .map_err(|e| Error::Reference(format!("{}: {e}", path.display())))?;
        Self::parse(id, &content)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// The printed text of column `name` at `row`.
    pub fn text_at(&self, row: usize, name: &str) -> Option<&str> {
        let k = self.columns.iter().position(|c| c == name)?;
        self.text.get(row).map(|r| r[k].as_str())
    }

    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub value: f64,
    pub simulated: f64,
    pub reference: f64,
    pub abs_diff: f64,
    /// `abs_diff / |reference|`; infinite when the reference is zero and the
    /// values differ.
    pub rel_diff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub table: TableId,
    pub column: String,
    pub rows: Vec<ComparisonRow>,
    /// Spearman rank correlation, `None` when either column is constant.
    pub rank_correlation: Option<f64>,
}

/// Lines a sweep up against one reference column. `_P` columns compare the
/// polarization magnitude, `_Ek_J` columns the kink-energy magnitude.
pub fn compare_to_reference(
    result: &SweepResult,
    table: &ReferenceTable,
    column: &str,
) -> Result<Comparison> {
    let reference = table
        .column(column)
        .filter(|_| column != table.columns[0])
        .ok_or_else(|| Error::GridMismatch(format!("{} has no data column `{column}`", table.id)))?;
    let grid = table.grid();
    if result.rows.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} sweep rows vs {} reference rows",
            result.rows.len(),
            grid.len()
        )));
    }
    let energy = column.ends_with("_Ek_J");
    let mut rows = Vec::with_capacity(grid.len());
    for ((row, &g), &r) in result.rows.iter().zip(&grid).zip(&reference) {
        if (row.value - g).abs() > 1e-9 * g.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("sweep value {} vs reference {g}", row.value)));
        }
        let simulated = if energy {
            row.kink_energy
                .ok_or_else(|| Error::GridMismatch("sweep has no kink energies".into()))?
                .abs()
        } else {
            row.polarization
        };
        let abs_diff = (simulated - r).abs();
        let rel_diff = if abs_diff == 0.0 { 0.0 } else { abs_diff / r.abs() };
        rows.push(ComparisonRow { value: g, simulated, reference: r, abs_diff, rel_diff });
    }
    let sim: Vec<f64> = rows.iter().map(|r| r.simulated).collect();
    Ok(Comparison {
        table: table.id,
        column: column.to_string(),
        rank_correlation: spearman(&sim, &reference),
        rows,
    })
}

/// Ranks starting at 1, ties sharing the mean of their positions.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = mean;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of tie-averaged ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweeps::{SweepRow, SweptVariable};

    fn result_from(values: &[f64], grid: &[f64]) -> SweepResult {
        SweepResult {
            variable: SweptVariable::Gap,
            layout_name: "x".into(),
            engine_name: "bistable".into(),
            snapshot: vec![],
            rows: grid
                .iter()
                .zip(values)
                .map(|(&g, &v)| SweepRow {
                    value: g,
                    cell_id: "out".into(),
                    polarization: v,
                    kink_energy: Some(-v),
                })
                .collect(),
        }
    }

    fn table2() -> ReferenceTable {
        let text = "gap_nm,inv2_P,inv3_P\n0.50,0.6,0.9\n1.00,0.5,0.8\n1.50,0.4,0.7\n2.00,0.3,0.6\n2.50,0.2,0.5\n3.00,0.1,0.4\n";
        ReferenceTable::parse(TableId::Table2, text).unwrap()
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&x, &[10.0, 20.0, 25.0, 100.0]), Some(1.0));
        assert_eq!(spearman(&x, &[4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&x, &[1.0, 1.0, 1.0, 1.0]), None);
        assert!(spearman(&x, &[2.0, 1.0, 1.0, 3.0]).unwrap() < 1.0);
        assert_eq!(spearman(&[1.0], &[1.0]), None);
    }

    #[test]
    fn identity_comparison() {
        let t = table2();
        let r = result_from(&t.column("inv3_P").unwrap(), &GAP_GRID);
        let c = compare_to_reference(&r, &t, "inv3_P").unwrap();
        assert!(c.rows.iter().all(|r| r.abs_diff == 0.0 && r.rel_diff == 0.0));
        assert_eq!(c.rank_correlation, Some(1.0));
    }

    #[test]
    fn reversed_comparison() {
        let t = table2();
        let mut v = t.column("inv3_P").unwrap();
        v.reverse();
        let c = compare_to_reference(&result_from(&v, &GAP_GRID), &t, "inv3_P").unwrap();
        assert_eq!(c.rank_correlation, Some(-1.0));
        assert!((c.rows[0].abs_diff - 0.5).abs() < 1e-12);
    }

    #[test]
    fn energy_columns_use_magnitude() {
        let text = "gap_nm,inv2_Ek_J,inv3_Ek_J\n0.50,6,1\n1.00,5,1\n1.50,4,1\n2.00,3,1\n2.50,2,1\n3.00,1,1\n";
        let t = ReferenceTable::parse(TableId::Table3, text).unwrap();
        let r = result_from(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0], &GAP_GRID);
        let c = compare_to_reference(&r, &t, "inv2_Ek_J").unwrap();
        assert!(c.rows.iter().all(|r| r.abs_diff == 0.0));
        assert_eq!(c.rank_correlation, Some(1.0));
        let c = compare_to_reference(&r, &t, "inv3_Ek_J").unwrap();
        assert_eq!(c.rank_correlation, None);
    }

    #[test]
    fn grid_mismatch() {
        let t = table2();
        let short = result_from(&[1.0, 2.0], &[0.5, 1.0]);
        assert!(matches!(compare_to_reference(&short, &t, "inv3_P"), Err(Error::GridMismatch(_))));
        let shifted = result_from(&[1.0; 6], &[0.6, 1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(compare_to_reference(&shifted, &t, "inv3_P").is_err());
        let ok = result_from(&[1.0; 6], &GAP_GRID);
        assert!(compare_to_reference(&ok, &t, "gap_nm").is_err());
        assert!(compare_to_reference(&ok, &t, "inv4_P").is_err());
    }

    #[test]
    fn parse_rejects_malformed_tables() {
        assert!(ReferenceTable::parse(TableId::Table2, "").is_err());
        assert!(ReferenceTable::parse(TableId::Table2, "gap_nm,a,b\n").is_err());
        assert!(ReferenceTable::parse(TableId::Table2, "gap_nm,inv2_P,inv3_P\n0.50,1,1\n").is_err());
        let wrong_grid = "gap_nm,inv2_P,inv3_P\n0.50,1,1\n1.00,1,1\n1.50,1,1\n2.00,1,1\n2.50,1,1\n3.50,1,1\n";
        assert!(ReferenceTable::parse(TableId::Table2, wrong_grid).is_err());
    }
}
