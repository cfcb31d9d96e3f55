use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::run::{BenchRecord, PathKind};
use crate::{storage, BenchError, Result};

/// Least-squares line `mean_s = intercept + slope * size_bytes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub kind: PathKind,
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// One CSV line. `overhead_pct` is set on sandbox rows whose size also has
/// a native measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub size_bytes: u64,
    pub path_kind: PathKind,
    pub runs: usize,
    pub mean_s: f64,
    pub stddev_s: f64,
    pub overhead_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub fits: Vec<LinearFit>,
}

impl Report {
    pub fn fit(&self, kind: PathKind) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.kind == kind)
    }

    /// `(size_bytes, overhead_pct)` in increasing size order.
    pub fn overheads(&self) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.overhead_pct.map(|o| (r.size_bytes, o)))
            .collect()
    }

    pub fn write_csv_to<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(storage(path))?;
        self.write_csv_to(file)
    }
}

fn least_squares(kind: PathKind, points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    LinearFit {
        kind,
        points: points.len(),
        slope,
        intercept,
        r_squared,
    }
}

/// Fits each path kind present and computes per-size sandbox overhead
/// `(abi - native) / native * 100`.
pub fn fit_and_report(records: &[BenchRecord]) -> Result<Report> {
    let mut by_kind: BTreeMap<PathKind, BTreeMap<u64, &BenchRecord>> = BTreeMap::new();
    for r in records {
        by_kind
            .entry(r.path_kind)
            .or_default()
            .insert(r.size_bytes, r);
    }
    if by_kind.is_empty() {
        return Err(BenchError::InsufficientData {
            kind: PathKind::Native,
            sizes: 0,
        });
    }

    let mut fits = Vec::new();
    for (&kind, sizes) in &by_kind {
        if sizes.len() < 3 {
            return Err(BenchError::InsufficientData {
                kind,
                sizes: sizes.len(),
            });
        }
        let points: Vec<(f64, f64)> = sizes
            .values()
            .map(|r| (r.size_bytes as f64, r.mean_s))
            .collect();
        fits.push(least_squares(kind, &points));
    }

    let native = by_kind.get(&PathKind::Native);
    let mut rows: Vec<ReportRow> = by_kind
        .values()
        .flat_map(|sizes| sizes.values())
        .map(|r| {
            let overhead_pct = match (r.path_kind, native.and_then(|n| n.get(&r.size_bytes))) {
                (PathKind::Abi, Some(n)) => Some((r.mean_s - n.mean_s) / n.mean_s * 100.0),
                _ => None,
            };
            ReportRow {
                size_bytes: r.size_bytes,
                path_kind: r.path_kind,
                runs: r.runs,
                mean_s: r.mean_s,
                stddev_s: r.stddev_s,
                overhead_pct,
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.size_bytes, r.path_kind));
    Ok(Report { rows, fits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(size: u64, kind: PathKind, mean: f64) -> BenchRecord {
        BenchRecord {
            size_bytes: size,
            path_kind: kind,
            runs: 10,
            mean_s: mean,
            stddev_s: 0.01,
        }
    }

    #[test]
    fn exact_line() {
        let records: Vec<_> = [1u64, 2, 3, 4]
            .iter()
            .map(|&s| rec(s, PathKind::Native, 0.5 + 2.0 * s as f64))
            .collect();
        let fit = fit_and_report(&records).unwrap().fits[0].clone();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn known_r_squared() {
        // y = 1, 3, 2 at x = 1, 2, 3: slope 0.5, R² = 0.25.
        let records = vec![
            rec(1, PathKind::Native, 1.0),
            rec(2, PathKind::Native, 3.0),
            rec(3, PathKind::Native, 2.0),
        ];
        let fit = fit_and_report(&records).unwrap().fits[0].clone();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 0.25).abs() < 1e-12);
    }

    #[test]
    fn overhead_per_size() {
        let mut records = vec![
            rec(100, PathKind::Native, 1.0),
            rec(200, PathKind::Native, 2.0),
            rec(300, PathKind::Native, 4.0),
        ];
        records.extend([
            rec(100, PathKind::Abi, 1.75),
            rec(200, PathKind::Abi, 3.0),
            rec(300, PathKind::Abi, 5.0),
        ]);
        let report = fit_and_report(&records).unwrap();
        assert_eq!(
            report.overheads(),
            vec![(100, 75.0), (200, 50.0), (300, 25.0)]
        );
        assert_eq!(report.fits.len(), 2);
        assert!(report.fit(PathKind::Abi).is_some());
    }

    #[test]
    fn two_sizes_is_insufficient() {
        let records = vec![rec(1, PathKind::Native, 1.0), rec(2, PathKind::Native, 2.0)];
        assert!(matches!(
            fit_and_report(&records),
            Err(BenchError::InsufficientData { sizes: 2, .. })
        ));
        assert!(matches!(
            fit_and_report(&[]),
            Err(BenchError::InsufficientData { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let records = vec![
            rec(10, PathKind::Native, 1.0),
            rec(20, PathKind::Native, 2.0),
            rec(30, PathKind::Native, 3.0),
            rec(10, PathKind::Abi, 1.5),
            rec(20, PathKind::Abi, 2.5),
            rec(30, PathKind::Abi, 3.5),
        ];
        let mut out = Vec::new();
        fit_and_report(&records)
            .unwrap()
            .write_csv_to(&mut out)
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "size_bytes,path_kind,runs,mean_s,stddev_s,overhead_pct"
        );
        assert_eq!(lines[1], "10,native,10,1.0,0.01,");
        assert_eq!(lines[2], "10,abi,10,1.5,0.01,50.0");
        assert_eq!(lines.len(), 7);
    }

    proptest! {
        #[test]
        fn r_squared_bounded(ys in proptest::collection::vec(0.001f64..100.0, 3..12)) {
            let records: Vec<_> = ys
                .iter()
                .enumerate()
                .map(|(i, &y)| rec(i as u64 + 1, PathKind::Native, y))
                .collect();
            let fit = fit_and_report(&records).unwrap().fits[0].clone();
            prop_assert!(fit.r_squared >= -1e-9 && fit.r_squared <= 1.0 + 1e-9);
        }

        #[test]
        fn affine_data_fits_perfectly(a in 0.0f64..10.0, b in 1e-9f64..1e-6, n in 3usize..10) {
            let records: Vec<_> = (1..=n as u64)
                .map(|s| rec(s * 1000, PathKind::Native, a + b * (s * 1000) as f64))
                .collect();
            let fit = fit_and_report(&records).unwrap().fits[0].clone();
            prop_assert!((fit.r_squared - 1.0).abs() < 1e-9);
        }
    }
}
