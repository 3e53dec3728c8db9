use std::io::Write;
use std::path::{Path, PathBuf};

use causal_modes::commutator::{zero_mode_commutator, CommutatorEngine};
use causal_modes::dynamics::{signal_block, signal_magnitude};
use causal_modes::estimator::{estimator_e, smeared_commutator, EstimatorMethod};
use causal_modes::{Complex64, SpacetimeEvent};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::{OutputSpec, Point, Quantity, Scenario, SweepVar};

/// One CSV line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub value: Complex64,
    pub abs: f64,
    pub modes_summed: usize,
    /// NaN where the quantity carries no estimate.
    pub error_estimate: f64,
}

fn compute(e: causal_modes::Error) -> CliError {
    CliError::Compute(e.to_string())
}

fn events(p: &Point) -> (SpacetimeEvent, SpacetimeEvent) {
    (
        SpacetimeEvent::new(p.b.mid_time(), p.b.center.clone()),
        SpacetimeEvent::new(p.a.mid_time(), p.a.center.clone()),
    )
}

fn is_commutator(q: Quantity) -> bool {
    matches!(q, Quantity::Commutator | Quantity::CommutatorOsc)
}

fn evaluate_point(
    p: &Point,
    q: Quantity,
    states: Option<(causal_modes::dynamics::QubitState, causal_modes::dynamics::QubitState)>,
    engine: Option<&CommutatorEngine>,
    x: f64,
) -> Result<Row, CliError> {
    let row = |value: Complex64, modes_summed: usize, error_estimate: f64| Row {
        x,
        value,
        abs: value.norm(),
        modes_summed,
        error_estimate,
    };
    let dt = p.b.mid_time() - p.a.mid_time();
    match q {
        Quantity::Commutator | Quantity::CommutatorOsc => {
            let (eb, ea) = events(p);
            let r = match engine {
                Some(e) => e.eval(&eb, &ea),
                None => CommutatorEngine::new(p.checked()?).and_then(|e| e.eval(&eb, &ea)),
            }
            .map_err(compute)?;
            let v = if q == Quantity::Commutator { r.value } else { r.parts.osc };
            Ok(row(v, r.diagnostics.modes_summed, r.diagnostics.error_estimate))
        }
        Quantity::CommutatorZeroMode => {
            Ok(row(zero_mode_commutator(&p.bc, dt).map_err(compute)?, 0, 0.0))
        }
        Quantity::ZeroModeReference => {
            Ok(row(Complex64::new(0.0, dt / p.bc.compact_volume()), 0, 0.0))
        }
        Quantity::SmearedCommutator => {
            let cfg = p.checked()?;
            let k = smeared_commutator(&cfg, &p.b, &p.a, p.b.mid_time(), p.a.mid_time())
                .map_err(compute)?;
            Ok(row(k.value, k.modes_summed, k.error_estimate))
        }
        Quantity::Estimator => {
            let cfg = p.checked()?;
            let r = estimator_e(&cfg, &p.a, &p.b).map_err(compute)?;
            Ok(Row { abs: r.value, ..row(r.kernel, r.modes_summed, r.error_estimate) })
        }
        Quantity::SignalBlockNorm => {
            let cfg = p.checked()?;
            let (sa, sb) = states.expect("validated: both states present");
            let blk = signal_block(&cfg, &p.a, &sa, &p.b, &sb, EstimatorMethod::Auto)
                .map_err(compute)?;
            Ok(row(Complex64::new(signal_magnitude(&blk), 0.0), 0, f64::NAN))
        }
    }
}

/// Every grid point of one output, in grid order.
pub fn evaluate_output(s: &Scenario, out: &OutputSpec) -> Result<Vec<Row>, CliError> {
    let base = s.output_point(out)?;
    let var = s.sweep.variable;
    let states = match (s.detectors.a.state, s.detectors.b.state) {
        (Some(a), Some(b)) => Some((a.to_state().map_err(compute)?, b.to_state().map_err(compute)?)),
        _ => None,
    };
    // geometry-only sweeps can share one mode table
    let engine = if is_commutator(out.quantity) && matches!(var, SweepVar::Dt | SweepVar::D) {
        Some(CommutatorEngine::new(base.checked()?).map_err(compute)?)
    } else {
        None
    };
    s.sweep
        .grid
        .values()
        .par_iter()
        .map(|&x| {
            let mut p = base.clone();
            p.apply(var, x)?;
            evaluate_point(&p, out.quantity, states, engine.as_ref(), x).map_err(|e| match e {
                CliError::Compute(m) => {
                    CliError::Compute(format!("output {:?} at {} = {x}: {m}", out.column, var.name()))
                }
                other => other,
            })
        })
        .collect()
}

/// Least-squares slope of `ln |y|` against `ln x` and the relative spread of
/// `|y|` over the upper half of the `x` range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub upper_half_variation: f64,
}

pub fn power_fit(rows: &[Row]) -> PowerFit {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.x > 0.0 && r.abs > 0.0)
        .map(|r| (r.x.ln(), r.abs.ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.x), b.max(r.x)));
    let upper: Vec<f64> = rows.iter().filter(|r| r.x >= 0.5 * (lo + hi)).map(|r| r.abs).collect();
    let max = upper.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = upper.iter().cloned().fold(f64::INFINITY, f64::min);
    PowerFit { exponent: num / den, upper_half_variation: (max - min) / max }
}

fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    fill(tmp.as_file_mut())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Shortest representation that parses back to the same `f64`.
fn fmt(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

pub fn write_csv(path: &Path, variable: &str, rows: &[Row]) -> Result<(), CliError> {
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([variable, "re", "im", "abs", "modes_summed", "error_estimate"])?;
        for r in rows {
            csv.write_record([
                fmt(r.x),
                fmt(r.value.re),
                fmt(r.value.im),
                fmt(r.abs),
                r.modes_summed.to_string(),
                fmt(r.error_estimate),
            ])?;
        }
        csv.flush()
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(path, |w| writeln!(w, "{text}"))
}

/// Validates, evaluates every output, then writes `<name>_<column>.csv`,
/// `<name>.resolved.json` and, for length sweeps, `<name>.fits.json`.
/// Nothing is written unless every point succeeds.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let resolved = s.resolved()?;
    let results: Vec<Vec<Row>> = resolved
        .outputs
        .iter()
        .map(|o| evaluate_output(&resolved, o))
        .collect::<Result<_, _>>()?;

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut files = Vec::new();
    for (o, rows) in resolved.outputs.iter().zip(&results) {
        let path = out_dir.join(format!("{}_{}.csv", resolved.name, o.column));
        write_csv(&path, resolved.sweep.variable.name(), rows)?;
        files.push(path);
    }
    let sidecar = out_dir.join(format!("{}.resolved.json", resolved.name));
    write_json(&sidecar, &resolved)?;
    files.push(sidecar);
    if resolved.sweep.variable == SweepVar::L {
        let fits: std::collections::BTreeMap<&str, PowerFit> = resolved
            .outputs
            .iter()
            .zip(&results)
            .map(|(o, rows)| (o.column.as_str(), power_fit(rows)))
            .collect();
        let path = out_dir.join(format!("{}.fits.json", resolved.name));
        write_json(&path, &fits)?;
        files.push(path);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_fit_recovers_exponent() {
        let rows: Vec<Row> = [10.0, 20.0, 60.0, 80.0]
            .iter()
            .map(|&x: &f64| Row {
                x,
                value: Complex64::new(0.0, 0.0),
                abs: 3.0 * x.powi(-2),
                modes_summed: 0,
                error_estimate: 0.0,
            })
            .collect();
        let f = power_fit(&rows);
        assert!((f.exponent + 2.0).abs() < 1e-12);
        assert!((f.upper_half_variation - 0.4375).abs() < 1e-12);
    }

    #[test]
    fn csv_floats_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let v = Complex64::new(0.1 + 0.2, -1.0 / 3.0);
        let rows = [Row { x: 1e-7, value: v, abs: v.norm(), modes_summed: 7, error_estimate: f64::NAN }];
        write_csv(&path, "dt", &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("dt,re,im,abs,modes_summed,error_estimate"));
        let f: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(f[1].parse::<f64>().unwrap(), v.re);
        assert_eq!(f[2].parse::<f64>().unwrap(), v.im);
        assert_eq!(f[5], "NaN");
    }
}
