use crate::error::{Error, Result};

use super::{clamp_marginal, SetFunction, Subset, EPS_MONO};

/// Largest ground set accepted by [`TabularFunction`].
pub const MAX_TABULAR: usize = 16;

/// An explicit table of `2^N` values, checked for `f(∅) = 0` and monotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularFunction {
    ground: usize,
    values: Vec<f64>,
}

impl TabularFunction {
    pub fn new(ground: usize, values: Vec<f64>) -> Result<Self> {
        if ground > MAX_TABULAR {
            return Err(Error::TooLarge {
                ground,
                limit: MAX_TABULAR,
            });
        }
        if values.len() != 1 << ground {
            return Err(Error::DimensionMismatch {
                expected: 1 << ground,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "value for mask {i} is not finite"
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "f(∅) must be 0, got {}",
                values[0]
            )));
        }
        for mask in 0..values.len() {
            for a in 0..ground {
                let bit = 1usize << a;
                if mask & bit == 0 {
                    let d = values[mask | bit] - values[mask];
                    if d < -EPS_MONO {
                        return Err(Error::NotMonotone {
                            set: mask as u64,
                            element: a,
                            marginal: d,
                        });
                    }
                }
            }
        }
        Ok(Self { ground, values })
    }

    /// Parses lines `mask,value`. Blank lines and lines starting with `#` are
    /// ignored. Every mask `0..2^N` must appear exactly once.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut entries: Vec<(u64, f64, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let mask_txt = parts.next().unwrap_or("").trim();
            let value_txt = parts.next().map(str::trim).ok_or_else(|| Error::Parse {
                line: line_no,
                column: 2,
                message: "expected `mask,value`".into(),
            })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    column: 3,
                    message: "too many fields; expected `mask,value`".into(),
                });
            }
            let mask = mask_txt.parse::<u64>().map_err(|e| Error::Parse {
                line: line_no,
                column: 1,
                message: format!("bad mask `{mask_txt}`: {e}"),
            })?;
            let value = value_txt.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                column: 2,
                message: format!("bad value `{value_txt}`: {e}"),
            })?;
            entries.push((mask, value, line_no));
        }
        let count = entries.len();
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::Parse {
                line: entries.last().map_or(1, |e| e.2),
                column: 1,
                message: format!("expected 2^N entries, found {count}"),
            });
        }
        let ground = count.trailing_zeros() as usize;
        let mut values = vec![f64::NAN; count];
        for (mask, value, line) in entries {
            if mask as usize >= count || !values[mask as usize].is_nan() {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("mask {mask} is out of range or duplicated"),
                });
            }
            values[mask as usize] = value;
        }
        Self::new(ground, values)
    }

    pub fn to_csv_string(&self) -> String {
        self.values
            .iter()
            .enumerate()
            .map(|(m, v)| format!("{m},{v:?}\n"))
            .collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl SetFunction for TabularFunction {
    fn ground_size(&self) -> usize {
        self.ground
    }

    fn evaluate(&self, set: Subset) -> Result<f64> {
        Ok(self.values[set.mask() as usize])
    }

    fn marginal(&self, set: Subset, element: usize) -> Result<f64> {
        if set.contains(element) {
            return Ok(0.0);
        }
        let m = set.mask() as usize;
        Ok(clamp_marginal(
            self.values[m | 1 << element] - self.values[m],
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_monotone() {
        let r = TabularFunction::new(1, vec![0.0, -1.0]);
        assert!(matches!(r, Err(Error::NotMonotone { .. })));
        let r = TabularFunction::new(1, vec![1.0, 2.0]);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn csv_roundtrip_and_errors() {
        let f = TabularFunction::new(2, vec![0.0, 1.0, 2.0, 2.5]).unwrap();
        let back = TabularFunction::from_csv_str(&f.to_csv_string()).unwrap();
        assert_eq!(back, f);

        let err = TabularFunction::from_csv_str("0,0\n1,1\n2,x\n3,2\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                column: 2,
                ..
            }
        ));
        let err = TabularFunction::from_csv_str("0,0\n1,1\n1,2\n3,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = TabularFunction::from_csv_str("0,0\n1,1\n2,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
