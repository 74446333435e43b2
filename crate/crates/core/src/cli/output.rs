use std::io::{self, Write};

/// Rows of one CSV schema. Cells are preformatted strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn optional(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn needs_quotes(arg: &str) -> bool {
    arg.is_empty() || arg.chars().any(|c| c.is_whitespace() || "'\"#,\\".contains(c))
}

/// Joins arguments into one line that [`split_args`] reads back.
pub fn join_args(args: &[String]) -> String {
    args.iter()
        .map(|a| {
            if !needs_quotes(a) {
                a.clone()
            } else if !a.contains('\'') {
                format!("'{a}'")
            } else {
                format!("\"{}\"", a.replace('\\', "\\\\").replace('"', "\\\""))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits a line produced by [`join_args`]: whitespace separated words,
/// `'...'` taken literally, `"..."` with backslash escapes.
pub fn split_args(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            return Ok(out);
        }
        let mut word = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                break;
            }
            chars.next();
            match c {
                '\'' => loop {
                    match chars.next() {
                        Some('\'') => break,
                        Some(x) => word.push(x),
                        None => return Err("unterminated single quote".into()),
                    }
                },
                '"' => loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(x) => word.push(x),
                            None => return Err("dangling escape".into()),
                        },
                        Some(x) => word.push(x),
                        None => return Err("unterminated double quote".into()),
                    }
                },
                _ => word.push(c),
            }
        }
        out.push(word);
    }
}

pub const COMMENT_PREFIX: &str = "# renvol";

/// Writes the argument comment line, the header and the rows.
pub fn write_table<W: Write>(out: W, args: &[String], table: &Table) -> io::Result<()> {
    let mut out = out;
    if args.is_empty() {
        writeln!(out, "{COMMENT_PREFIX}")?;
    } else {
        writeln!(out, "{COMMENT_PREFIX} {}", join_args(args))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()
}

/// A CSV file written by [`write_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct Recorded {
    pub args: Vec<String>,
    pub table: Table,
}

pub fn read_table(text: &str) -> Result<Recorded, String> {
    let first = text.lines().next().unwrap_or_default();
    let rest = first
        .strip_prefix(COMMENT_PREFIX)
        .ok_or_else(|| format!("first line does not start with `{COMMENT_PREFIX}`"))?;
    let args = split_args(rest)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(Recorded {
        args,
        table: Table { header, rows },
    })
}

fn cells_match(a: &str, b: &str, rel_tol: f64) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= rel_tol * x.abs().max(y.abs()),
        _ => false,
    }
}

/// Differences between a recorded table and a fresh one, one line each.
pub fn diff_tables(recorded: &Table, fresh: &Table, rel_tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    if recorded.header != fresh.header {
        out.push(format!(
            "header differs: recorded {:?}, now {:?}",
            recorded.header, fresh.header
        ));
        return out;
    }
    if recorded.rows.len() != fresh.rows.len() {
        out.push(format!(
            "row count differs: recorded {}, now {}",
            recorded.rows.len(),
            fresh.rows.len()
        ));
    }
    for (i, (a, b)) in recorded.rows.iter().zip(&fresh.rows).enumerate() {
        for ((name, x), y) in recorded.header.iter().zip(a).zip(b) {
            if !cells_match(x, y, rel_tol) {
                out.push(format!("row {}, column {name}: recorded {x}, now {y}", i + 1));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn args_round_trip() {
        let args: Vec<String> = [
            "volume",
            "--profile",
            "1 + s^2 - m/s",
            "--param",
            "m=2",
            "it's",
            "a\"b\\c",
            "",
            "x,y#z",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(split_args(&join_args(&args)).unwrap(), args);
        assert!(split_args("'open").is_err());
    }

    #[test]
    fn real_has_seventeen_digits() {
        assert_eq!(real(1.0), "1.0000000000000000e0");
        let x = 0.1 + 0.2;
        assert_eq!(real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn header_only_and_round_trip() {
        let args = vec!["sweep".to_string(), "--m".into(), "1".into()];
        let mut table = Table::new(&["m", "V", "dV_prev"]);
        let mut buf = Vec::new();
        write_table(&mut buf, &args, &table).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(read_table(&text).unwrap(), Recorded { args: args.clone(), table: table.clone() });

        table.push(vec![real(1.0), real(6.5), String::new()]);
        let mut buf = Vec::new();
        write_table(&mut buf, &args, &table).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back = read_table(&text).unwrap();
        assert_eq!(back.table, table);
        assert!(diff_tables(&back.table, &table, 0.0).is_empty());

        let mut other = table.clone();
        other.rows[0][1] = real(6.6);
        assert_eq!(diff_tables(&table, &other, 1e-12).len(), 1);
    }
}
