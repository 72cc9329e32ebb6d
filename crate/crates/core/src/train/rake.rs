//! Seeding rakes: curves the learned surface at isovalue 0 should pass through.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_count() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RakeShape {
    Segment { start: [f64; 3], end: [f64; 3] },
    Circle { center: [f64; 3], radius: f64, normal: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RakeSpec {
    #[serde(flatten)]
    pub shape: RakeShape,
    #[serde(default = "default_count")]
    pub sample_count: usize,
}

impl RakeSpec {
    pub fn segment(start: [f64; 3], end: [f64; 3], sample_count: usize) -> Self {
        Self {
            shape: RakeShape::Segment { start, end },
            sample_count,
        }
    }

    pub fn circle(center: [f64; 3], radius: f64, normal: [f64; 3], sample_count: usize) -> Self {
        Self {
            shape: RakeShape::Circle {
                center,
                radius,
                normal,
            },
            sample_count,
        }
    }
}

/// Accepts JSON (`{"kind":"segment","start":[..],"end":[..]}`) or the inline
/// forms `segment:x1,y1,z1,x2,y2,z2[,count]` and `circle:cx,cy,cz,r,nx,ny,nz[,count]`.
impl FromStr for RakeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Usage(format!("bad rake JSON: {e}")));
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Usage(format!("bad rake {s:?}; expected kind:numbers")))?;
        let nums = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Usage(format!("bad rake number in {s:?}: {e}")))?;
        let count = |extra: Option<&f64>| -> Result<usize> {
            match extra {
                None => Ok(default_count()),
                Some(&c) if c >= 1.0 && c.fract() == 0.0 => Ok(c as usize),
                Some(c) => Err(Error::Usage(format!("rake sample count must be a positive integer, got {c}"))),
            }
        };
        match (kind, nums.len()) {
            ("segment", 6 | 7) => Ok(Self::segment(
                [nums[0], nums[1], nums[2]],
                [nums[3], nums[4], nums[5]],
                count(nums.get(6))?,
            )),
            ("circle", 7 | 8) => Ok(Self::circle(
                [nums[0], nums[1], nums[2]],
                nums[3],
                [nums[4], nums[5], nums[6]],
                count(nums.get(7))?,
            )),
            _ => Err(Error::Usage(format!(
                "bad rake {s:?}; expected segment:x1,y1,z1,x2,y2,z2[,n] or circle:cx,cy,cz,r,nx,ny,nz[,n]"
            ))),
        }
    }
}

/// Evenly spaced points along the rake. Segments include both endpoints.
pub fn sample_rake(spec: &RakeSpec) -> Result<Vec<[f64; 3]>> {
    let n = spec.sample_count;
    if n == 0 {
        return Err(Error::Usage("rake needs at least one sample".into()));
    }
    let points: Vec<[f64; 3]> = match spec.shape {
        RakeShape::Segment { start, end } => (0..n)
            .map(|i| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                [0, 1, 2].map(|c| start[c] + t * (end[c] - start[c]))
            })
            .collect(),
        RakeShape::Circle {
            center,
            radius,
            normal,
        } => {
            if radius < 0.0 {
                return Err(Error::Usage(format!("rake radius must be non-negative, got {radius}")));
            }
            let (u, v) = plane_basis(normal)?;
            (0..n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    let (s, c) = a.sin_cos();
                    [0, 1, 2].map(|k| center[k] + radius * (c * u[k] + s * v[k]))
                })
                .collect()
        }
    };
    for p in &points {
        if p.iter().any(|c| !c.is_finite() || c.abs() > 1.0 + 1e-12) {
            return Err(Error::Usage(format!("rake point {p:?} lies outside [-1, 1]^3")));
        }
    }
    Ok(points)
}

/// Two unit vectors spanning the plane orthogonal to `normal`.
fn plane_basis(normal: [f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let len = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
    if !(len > 0.0) {
        return Err(Error::Usage("rake circle normal must be nonzero".into()));
    }
    let n = normal.map(|c| c / len);
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = helper[0] * n[0] + helper[1] * n[1] + helper[2] * n[2];
    let mut u = [0, 1, 2].map(|k| helper[k] - d * n[k]);
    let ul = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u = u.map(|c| c / ul);
    let v = [
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];
    Ok((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_is_evenly_spaced() {
        let s = RakeSpec::segment([-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], 3);
        assert_eq!(sample_rake(&s).unwrap(), vec![[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
    }

    #[test]
    fn zero_radius_circle_collapses_to_centre() {
        let s = RakeSpec::circle([0.1, 0.2, 0.3], 0.0, [0.0, 0.0, 1.0], 8);
        assert!(sample_rake(&s).unwrap().iter().all(|p| *p == [0.1, 0.2, 0.3]));
    }

    #[test]
    fn circle_points_lie_on_circle() {
        let s = RakeSpec::circle([0.0, 0.0, 0.2], 0.5, [1.0, 1.0, 0.0], 16);
        for p in sample_rake(&s).unwrap() {
            let r = ((p[0]).powi(2) + (p[1]).powi(2) + (p[2] - 0.2).powi(2)).sqrt();
            assert!((r - 0.5).abs() < 1e-12);
            assert!((p[0] + p[1]).abs() < 1e-12, "in plane orthogonal to normal");
        }
    }

    #[test]
    fn outside_rake_is_usage_error() {
        let s = RakeSpec::segment([1.5, 0.0, 0.0], [0.0, 0.0, 0.0], 4);
        assert!(matches!(sample_rake(&s), Err(Error::Usage(_))));
    }

    #[test]
    fn parses_inline_and_json() {
        let a: RakeSpec = "segment:-0.5,0,0,0.5,0,0".parse().unwrap();
        assert_eq!(a, RakeSpec::segment([-0.5, 0.0, 0.0], [0.5, 0.0, 0.0], 1024));
        let b: RakeSpec = "circle:0,0,0,0.25,0,0,1,64".parse().unwrap();
        assert_eq!(b, RakeSpec::circle([0.0; 3], 0.25, [0.0, 0.0, 1.0], 64));
        let c: RakeSpec = r#"{"kind":"segment","start":[-0.5,0,0],"end":[0.5,0,0],"sample_count":9}"#
            .parse()
            .unwrap();
        assert_eq!(c.sample_count, 9);
        assert!("line:0,0".parse::<RakeSpec>().is_err());
        assert!("segment:0,0,0,1,1".parse::<RakeSpec>().is_err());
    }
}
