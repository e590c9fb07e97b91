use std::fmt::Write;

use super::{bandwidth_constant, delay_measures, m_log, WindowFamily, WindowKind};
use crate::error::Result;
use crate::temporal::{LadderDistribution, ScaleLadder};

/// Attenuation levels (dB) of the bandwidth-constant table.
pub const TABLE1_DB_LEVELS: [f64; 4] = [-3.0, -10.0, -20.0, -30.0];

/// Ladder ratios of the logarithmic columns of the delay tables.
pub const TABLE_C_VALUES: [(f64, &str); 3] = [
    (std::f64::consts::SQRT_2, "c=sqrt2"),
    (1.681_792_830_507_429, "c=2^(3/4)"),
    (2.0, "c=2"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
    pub decimals: usize,
}

/// Bandwidth constants `C` for the Gaussian and the K = 4, 7 cascades.
pub fn table1() -> Result<Table> {
    let mut families = vec![("gauss".to_string(), WindowKind::Gauss)];
    for k in [4, 7] {
        families.push((format!("uni K={k}"), WindowKind::RecUniform { stages: k }));
        for (c, name) in TABLE_C_VALUES {
            families.push((
                format!("log K={k} {name}"),
                WindowKind::RecLog { stages: k, c },
            ));
        }
    }
    let rows = families
        .into_iter()
        .map(|(label, kind)| {
            let fam = WindowFamily::new(kind, 1.0)?;
            let values = TABLE1_DB_LEVELS
                .iter()
                .map(|&db| bandwidth_constant(&fam, db))
                .collect::<Result<Vec<_>>>()?;
            Ok(TableRow { label, values })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        title: "bandwidth constant C".into(),
        columns: TABLE1_DB_LEVELS
            .iter()
            .map(|db| format!("{db} dB"))
            .collect(),
        rows,
        decimals: 3,
    })
}

fn delay_columns() -> Vec<String> {
    std::iter::once("uni".to_string())
        .chain(TABLE_C_VALUES.iter().map(|(_, name)| format!("log {name}")))
        .collect()
}

/// Temporal means in units of `sqrt(tau)` for K = 2..8.
pub fn table2() -> Result<Table> {
    let rows = (2..=8)
        .map(|k| {
            let mut values = vec![(k as f64).sqrt()];
            values.extend(TABLE_C_VALUES.iter().map(|&(c, _)| m_log(k, c)));
            TableRow {
                label: format!("K={k}"),
                values,
            }
        })
        .collect();
    Ok(Table {
        title: "temporal mean m".into(),
        columns: delay_columns(),
        rows,
        decimals: 3,
    })
}

/// Positions of the kernel maximum in units of `sqrt(tau)` for K = 2..8.
pub fn table3() -> Result<Table> {
    let rows = (2..=8)
        .map(|k| {
            let mut values = vec![(k as f64 - 1.0) / (k as f64).sqrt()];
            for &(c, _) in &TABLE_C_VALUES {
                let ladder =
                    ScaleLadder::continuous(LadderDistribution::Logarithmic { c }, 1.0, k)?;
                values.push(delay_measures(&ladder)?.t_max);
            }
            Ok(TableRow {
                label: format!("K={k}"),
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        title: "temporal delay t_max".into(),
        columns: delay_columns(),
        rows,
        decimals: 3,
    })
}

/// Aligned plain-text rendering.
pub fn format_table_text(table: &Table) -> String {
    let label_width = table
        .rows
        .iter()
        .map(|r| r.label.len())
        .max()
        .unwrap_or(0)
        .max(1);
    let cell_width = table
        .columns
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(0)
        .max(table.decimals + 3);
    let mut out = String::new();
    writeln!(out, "{}", table.title).unwrap();
    write!(out, "{:label_width$}", "").unwrap();
    for col in &table.columns {
        write!(out, "  {col:>cell_width$}").unwrap();
    }
    out.push('\n');
    for row in &table.rows {
        write!(out, "{:label_width$}", row.label).unwrap();
        for v in &row.values {
            write!(out, "  {:>cell_width$.*}", table.decimals, v).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Comma-separated rendering with a header row.
pub fn format_table_csv(table: &Table) -> String {
    let mut out = String::from("family");
    for col in &table.columns {
        write!(out, ",{col}").unwrap();
    }
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.label);
        for v in &row.values {
            write!(out, ",{:.*}", table.decimals, v).unwrap();
        }
        out.push('\n');
    }
    out
}
