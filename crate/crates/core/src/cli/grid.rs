use std::str::FromStr;

/// A list of sample points given as `start:stop:count`, `log:start:stop:count`
/// or a single number.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn number(text: &str) -> Result<f64, String> {
    let x: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(text: &str) -> Result<Grid, String> {
        let (log, body) = match text.strip_prefix("log:") {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let parts: Vec<&str> = body.split(':').collect();
        match parts.as_slice() {
            [single] if !log => Ok(Grid(vec![number(single)?])),
            [start, stop, count] => {
                let (a, b) = (number(start)?, number(stop)?);
                let n: usize = count
                    .trim()
                    .parse()
                    .map_err(|_| format!("grid count `{count}` is not a positive integer"))?;
                if n == 0 {
                    return Err("grid count must be positive".into());
                }
                if log && !(a > 0.0 && b > 0.0) {
                    return Err("log grid endpoints must be positive".into());
                }
                if n == 1 {
                    return Ok(Grid(vec![a]));
                }
                let points = (0..n)
                    .map(|i| {
                        let w = i as f64 / (n - 1) as f64;
                        if i == n - 1 {
                            b
                        } else if log {
                            (a.ln() + w * (b.ln() - a.ln())).exp()
                        } else {
                            a + w * (b - a)
                        }
                    })
                    .collect();
                Ok(Grid(points))
            }
            _ => Err(format!(
                "invalid grid `{text}`: expected start:stop:count, log:start:stop:count or a number"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!("2".parse::<Grid>().unwrap().0, vec![2.0]);
        assert_eq!("0:1:3".parse::<Grid>().unwrap().0, vec![0.0, 0.5, 1.0]);
        let g = "log:1:100:3".parse::<Grid>().unwrap().0;
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-13);
        assert_eq!(g[2], 100.0);
        assert_eq!("5:9:1".parse::<Grid>().unwrap().0, vec![5.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        for bad in ["", "a:1:2", "0:1:0", "0:1", "log:0:1:3", "log:2", "1:2:x", "nan"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
