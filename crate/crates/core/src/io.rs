//! Text formats: edge lists, density CSV and a minimal SVG density plot.
//!
//! Edge-list layout: optional `#` comment lines, then a header `n m`, then
//! `m` lines `i j` with `i < j` in ascending lexicographic order.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::DensityGrid;

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.n(), g.edge_count())?;
    for &(i, j) in g.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

pub fn edge_list_string(g: &Graph) -> String {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("edge list is ASCII")
}

pub fn read_edge_list<R: Read>(input: R) -> Result<Graph> {
    let reader = BufReader::new(input);
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if header.is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "comment lines are only allowed before the header".into(),
                });
            }
            continue;
        }
        let (a, b) = parse_pair(trimmed, lineno)?;
        match header {
            None => header = Some((a, b)),
            Some(_) => edges.push((a, b)),
        }
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing `n m` header".into(),
    })?;
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    read_edge_list(text.as_bytes())
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    read_edge_list(fs::File::open(path)?)
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, edge_list_string(g))?;
    Ok(())
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("missing {what}"),
            })?
            .parse::<usize>()
            .map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad {what}: {e}"),
            })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            msg: "expected exactly two fields".into(),
        });
    }
    Ok((a, b))
}

/// Locale-free number formatting with up to 15 significant digits and no
/// trailing zeros. Magnitudes outside `[1e-4, 1e15)` use exponent notation.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let mag = x.abs();
    if (1e-4..1e15).contains(&mag) {
        let exp = mag.log10().floor() as i32;
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let text = format!("{x:.14e}");
        let (mantissa, exp) = text.split_once('e').expect("exponent");
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn density_csv(grid: &DensityGrid) -> String {
    let mut s = String::with_capacity(grid.xs.len() * 40);
    s.push_str("x,phi\n");
    for (x, p) in grid.xs.iter().zip(&grid.phis) {
        let _ = writeln!(s, "{},{}", fmt_num(*x), fmt_num(*p));
    }
    s
}

/// Polyline overlay of one or more densities on a shared grid.
pub fn density_svg(series: &[(&str, &DensityGrid)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#27ae60", "#8e44ad"];

    let ymax = series
        .iter()
        .flat_map(|(_, g)| g.phis.iter().copied())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/>"#,
        y = H - PAD,
        x2 = W - PAD
    );
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{y}" stroke="black"/>"#,
        y = H - PAD
    );
    for (tick, label) in [(0.0, "0"), (1.0, "1"), (2.0, "2")] {
        let x = PAD + tick / 2.0 * (W - 2.0 * PAD);
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-size="12" text-anchor="middle">{label}</text>"#,
            y = H - PAD + 16.0
        );
    }
    for (k, (name, grid)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut pts = String::new();
        for (x, p) in grid.xs.iter().zip(&grid.phis) {
            let px = PAD + x / 2.0 * (W - 2.0 * PAD);
            let py = H - PAD - p / ymax * (H - 2.0 * PAD);
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.trim_end()
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-size="12" fill="{color}">{name}</text>"#,
            x = W - PAD - 120.0,
            y = PAD + 16.0 * (k as f64 + 1.0)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_layout() {
        let g = Graph::from_edges(4, [(2, 3), (1, 0), (0, 3)]).unwrap();
        assert_eq!(edge_list_string(&g), "4 3\n0 1\n0 3\n2 3\n");
    }

    #[test]
    fn comments_before_header() {
        let g = parse_edge_list("# star\n# n=3\n3 2\n0 1\n0 2\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("3 2\n0 1\n").is_err());
        assert!(parse_edge_list("3 1\n0 0\n").is_err());
        assert!(parse_edge_list("3 2\n0 1\n1 0\n").is_err());
        assert!(parse_edge_list("3 1\n0 x\n").is_err());
        assert!(parse_edge_list("3 1\n0 1\n# late\n").is_err());
        assert!(parse_edge_list("3 1\n0 5\n").is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.25), "1.25");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-20.0), "-20");
        assert_eq!(fmt_num(1e20), "1e20");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        let tiny = fmt_num(1.5e-9);
        assert!(tiny.contains('e'));
        assert_eq!(tiny.parse::<f64>().unwrap(), 1.5e-9);
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..12, mask in proptest::collection::vec(any::<bool>(), 66)) {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] { edges.push((u, v)); }
                    k += 1;
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let back = parse_edge_list(&edge_list_string(&g)).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn formatted_numbers_keep_precision(x in -1e6f64..1e6) {
            let y: f64 = fmt_num(x).parse().unwrap();
            prop_assert!((x - y).abs() <= 1e-13 * x.abs().max(1e-4));
        }
    }
}
