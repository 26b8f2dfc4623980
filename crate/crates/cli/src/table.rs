//! Kernel tables `dimension,alpha,s,value`, as written by the `kernels` scenario.

use analog_sqed::fit::{fit_exponential, fit_power_law, ExpFit, PowerLawFit};
use analog_sqed::kernel::Dimension;
use serde::{Deserialize, Serialize};

pub const HEADER: [&str; 4] = ["dimension", "alpha", "s", "value"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub dimension: Dimension,
    pub alpha: f64,
    pub s: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("kernel table line {line}: {message}")]
pub struct TableError {
    pub line: u64,
    pub message: String,
}

pub fn parse_kernel_table(text: &str) -> Result<Vec<KernelRow>, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| TableError {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(TableError {
            line: 1,
            message: format!("expected header {}", HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.deserialize::<KernelRow>() {
        let row = record.map_err(|e| TableError {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rows.len() as u64 + 2;
        if !(row.alpha > 0.0 && row.alpha < 1.0) {
            return Err(TableError {
                line,
                message: format!("alpha = {} outside (0, 1)", row.alpha),
            });
        }
        if !(row.s >= 0.0 && row.s.is_finite() && row.value.is_finite()) {
            return Err(TableError {
                line,
                message: "s must be finite and >= 0, value finite".into(),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(TableError {
            line: 1,
            message: "table has no rows".into(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableGroupFit {
    pub dimension: Dimension,
    pub alpha: f64,
    pub points: usize,
    pub fit: ExpFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableFit {
    pub groups: Vec<TableGroupFit>,
    /// `(dimension, a law, b law)` where at least five alphas were fitted.
    pub laws: Vec<(Dimension, PowerLawFit, PowerLawFit)>,
}

/// Fits `a exp(-b s)` to every `(dimension, alpha)` group and power laws across alpha.
pub fn fit_table(rows: &[KernelRow]) -> analog_sqed::Result<TableFit> {
    let mut keys: Vec<(u8, f64)> = Vec::new();
    for r in rows {
        let key = (dim_index(r.dimension), r.alpha);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut groups = Vec::new();
    for (d, alpha) in keys {
        let mut pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| dim_index(r.dimension) == d && r.alpha == alpha)
            .map(|r| (r.s, r.value))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (s, v): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        groups.push(TableGroupFit {
            dimension: if d == 1 { Dimension::One } else { Dimension::Two },
            alpha,
            points: s.len(),
            fit: fit_exponential(&s, &v)?,
        });
    }
    let mut laws = Vec::new();
    for dim in [Dimension::One, Dimension::Two] {
        let sel: Vec<&TableGroupFit> = groups.iter().filter(|g| g.dimension == dim).collect();
        if sel.len() >= 5 {
            let a: Vec<(f64, f64)> = sel.iter().map(|g| (g.alpha, g.fit.a)).collect();
            let b: Vec<(f64, f64)> = sel.iter().map(|g| (g.alpha, g.fit.b)).collect();
            laws.push((dim, fit_power_law(&a)?, fit_power_law(&b)?));
        }
    }
    Ok(TableFit { groups, laws })
}

fn dim_index(d: Dimension) -> u8 {
    match d {
        Dimension::One => 1,
        Dimension::Two => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(alphas: &[f64]) -> String {
        let mut out = String::from("dimension,alpha,s,value\n");
        for &a in alphas {
            let (amp, decay) = (0.64 * a.powf(-1.23), 0.56 * a.powf(0.88));
            for i in 0..30 {
                let s = i as f64 * 4.0 / decay / 29.0;
                out.push_str(&format!("1d,{a},{s:e},{:e}\n", amp * (-decay * s).exp()));
            }
        }
        out
    }

    #[test]
    fn recovers_power_laws() {
        let rows = parse_kernel_table(&synthetic(&[0.08, 0.09, 0.1, 0.11, 0.12])).unwrap();
        let fit = fit_table(&rows).unwrap();
        assert_eq!(fit.groups.len(), 5);
        let (_, a, b) = &fit.laws[0];
        assert!((a.exponent + 1.23).abs() < 1e-8 && (a.prefactor - 0.64).abs() < 1e-8);
        assert!((b.exponent - 0.88).abs() < 1e-8 && (b.prefactor - 0.56).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_rows() {
        assert_eq!(parse_kernel_table("a,b\n1,2\n").unwrap_err().line, 1);
        let err = parse_kernel_table("dimension,alpha,s,value\n1d,0.1,0,1\n3d,0.1,1,1\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_kernel_table("dimension,alpha,s,value\n1d,1.5,0,1\n").unwrap_err();
        assert!(err.message.contains("alpha"));
        assert!(parse_kernel_table("dimension,alpha,s,value\n").is_err());
        assert!(parse_kernel_table("dimension,alpha,s,value\n2d,0.1,-1,1\n").is_err());
        assert!(parse_kernel_table("dimension,alpha,s,value\n2d,0.1,1,NaN\n").is_err());
    }
}
