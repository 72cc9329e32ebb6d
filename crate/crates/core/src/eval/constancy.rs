use serde::{Deserialize, Serialize};

use super::Streamline;
use crate::error::{Error, Result};
use crate::net::ScalarFunction;
use crate::volume::Dims;

/// Resolution of the lattice used to measure a function's global range.
pub const GLOBAL_RANGE_RES: usize = 64;

/// `max f - min f` over a `GLOBAL_RANGE_RES^3` lattice of the cube.
pub fn global_range<F: ScalarFunction + ?Sized>(f: &F) -> Result<f64> {
    let dims = Dims::cube(GLOBAL_RANGE_RES)?;
    let points: Vec<[f64; 3]> = dims.coords().collect();
    let values = f.eval_batch(&points)?;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(hi - lo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineConstancy {
    pub seed: [f64; 3],
    pub points: usize,
    /// `max |f(p) - f(seed)|` along the line.
    pub max_deviation: f64,
    /// `max_deviation` divided by the global range.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub global_range: f64,
    pub lines: Vec<LineConstancy>,
    pub median_relative: f64,
    pub max_relative: f64,
}

/// How far `f` drifts along each streamline, relative to its global range.
/// An exact stream function is constant along every streamline.
pub fn constancy_check<F: ScalarFunction + ?Sized>(f: &F, streamlines: &[Streamline]) -> Result<ConstancyReport> {
    if streamlines.is_empty() {
        return Err(Error::Usage("no streamlines to check".into()));
    }
    let range = global_range(f)?;
    if !(range >= 1e-9) {
        return Err(Error::Data(format!("function is constant (global range {range:e})")));
    }
    let mut lines = Vec::with_capacity(streamlines.len());
    for line in streamlines {
        let values = f.eval_batch(&line.points)?;
        let base = values[0];
        let max_deviation = values.iter().map(|v| (v - base).abs()).fold(0.0, f64::max);
        lines.push(LineConstancy {
            seed: line.seed(),
            points: line.points.len(),
            max_deviation,
            relative: max_deviation / range,
        });
    }
    let mut rel: Vec<f64> = lines.iter().map(|l| l.relative).collect();
    rel.sort_by(f64::total_cmp);
    let n = rel.len();
    let median = if n % 2 == 1 {
        rel[n / 2]
    } else {
        0.5 * (rel[n / 2 - 1] + rel[n / 2])
    };
    Ok(ConstancyReport {
        global_range: range,
        lines,
        median_relative: median,
        max_relative: rel[n - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{trace_streamline, Termination};
    use crate::net::FnField;
    use crate::volume::VectorField;

    #[test]
    fn exact_stream_function_is_constant_on_streamlines() {
        let field = VectorField::from_fn(Dims::cube(32).unwrap(), |x| [-x[1], x[0], 0.0]).unwrap();
        let f = FnField::new(|x: [f64; 3]| x[0] * x[0] + x[1] * x[1]);
        let lines: Vec<_> = [[0.5, 0.0, 0.0], [0.1, -0.6, 0.4], [-0.3, 0.3, -0.9]]
            .into_iter()
            .map(|s| trace_streamline(&field, s, 0.01, 700).unwrap())
            .collect();
        let report = constancy_check(&f, &lines).unwrap();
        // the even lattice misses the origin; its nearest vertices sit at +-1/63
        let min = 2.0 / 63.0f64.powi(2);
        assert!((report.global_range - (2.0 - min)).abs() < 1e-12);
        assert!(report.max_relative <= 1e-6, "{}", report.max_relative);
    }

    #[test]
    fn single_point_line_has_zero_variation() {
        let f = FnField::new(|x: [f64; 3]| x[0]);
        let line = Streamline {
            points: vec![[0.2, 0.1, 0.0]],
            step: 0.01,
            termination: Termination::Stagnation,
        };
        let report = constancy_check(&f, &[line]).unwrap();
        assert_eq!(report.lines[0].relative, 0.0);
    }

    #[test]
    fn constant_function_is_data_error() {
        let f = FnField::new(|_: [f64; 3]| 1.0);
        let line = Streamline {
            points: vec![[0.0; 3]],
            step: 0.01,
            termination: Termination::MaxSteps,
        };
        assert!(matches!(constancy_check(&f, &[line]), Err(Error::Data(_))));
        assert!(matches!(constancy_check(&f, &[]), Err(Error::Usage(_))));
    }
}
