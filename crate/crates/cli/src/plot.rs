//! Plot-ready series from emitted reports, and a bare-bones SVG renderer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use deconv_core::risk::fit_points;

use crate::error::CliError;
use crate::output::{embedded_hash, hash_line, num, parse_report, split_csv, Outputs, BIAS_HEADER, REPORT_HEADER, SPECTRUM_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub fit: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub stem: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub series: Vec<Series>,
}

fn fit_line(points: &[(f64, f64)]) -> Option<Vec<(f64, f64)>> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let (slope, intercept, _, _) = fit_points(&xs, &ys).ok()?;
    Some(xs.iter().map(|&x| (x, intercept + slope * x)).collect())
}

fn rate_figure(text: &str) -> Result<Figure, CliError> {
    let (_, cells) = parse_report(text)?;
    let all_estimated = cells.iter().all(|c| c.m.is_some());
    let by_m = all_estimated && cells.iter().all(|c| c.n == cells[0].n);
    // Diagonal reports pair each n with its own m: one curve.
    let diagonal = all_estimated && !by_m && cells.windows(2).all(|w| w[0].n < w[1].n);
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for c in &cells {
        let (key, size) = match c.m {
            Some(m) if by_m => (format!("n={}", c.n), m),
            Some(_) if diagonal => ("estimated".to_string(), c.n),
            Some(m) => (format!("m={m}"), c.n),
            None => ("known".to_string(), c.n),
        };
        groups.entry(key).or_default().push(((size as f64).ln(), c.mean.ln()));
    }
    let series = groups
        .into_iter()
        .map(|(name, points)| Series { fit: fit_line(&points), name, points })
        .collect();
    Ok(Figure { stem: "rate", x_label: if by_m { "log_m" } else { "log_n" }, y_label: "log_risk", series })
}

fn mask_figure(rows: &[Vec<&str>]) -> Result<Figure, CliError> {
    let parse = |v: &str| v.parse::<f64>().map_err(|_| CliError::Data(format!("bad number `{v}`")));
    let mut modulus = Vec::new();
    let mut mask = Vec::new();
    for r in rows {
        let t = parse(r[0])?;
        modulus.push((t, parse(r[1])?.hypot(parse(r[2])?)));
        mask.push((t, parse(r[3])?));
    }
    Ok(Figure {
        stem: "mask",
        x_label: "t",
        y_label: "value",
        series: vec![Series { name: "abs".into(), points: modulus, fit: None }, Series { name: "mask".into(), points: mask, fit: None }],
    })
}

fn bias_figure(rows: &[Vec<&str>]) -> Result<Figure, CliError> {
    let parse = |v: &str| v.parse::<f64>().map_err(|_| CliError::Data(format!("bad number `{v}`")));
    let mut lhs = Vec::new();
    let mut bound = Vec::new();
    for r in rows {
        let la = parse(r[0])?.ln();
        lhs.push((la, parse(r[1])?.ln()));
        bound.push((la, (parse(r[2])? * parse(r[3])?).ln()));
    }
    Ok(Figure {
        stem: "bias",
        x_label: "log_alpha",
        y_label: "log_value",
        series: vec![Series { name: "lhs".into(), points: lhs, fit: None }, Series { name: "bound".into(), points: bound, fit: None }],
    })
}

/// Recognises a report by its header and builds the matching figure.
pub fn figure_from_report(text: &str) -> Result<(Option<String>, Figure), CliError> {
    let (comments, header, rows) = split_csv(text)?;
    if rows.is_empty() {
        return Err(CliError::Data("report has no rows".into()));
    }
    let hash = embedded_hash(&comments);
    let fig = if header == REPORT_HEADER {
        rate_figure(text)?
    } else if header == SPECTRUM_HEADER {
        mask_figure(&rows)?
    } else if header.starts_with(BIAS_HEADER) {
        bias_figure(&rows)?
    } else {
        return Err(CliError::Data(format!("unrecognised report header `{header}`")));
    };
    Ok((hash, fig))
}

pub fn series_csv(hash: Option<&str>, fig: &Figure) -> String {
    let mut out = hash.map(hash_line).unwrap_or_default();
    let _ = writeln!(out, "series,{},{},fit_line", fig.x_label, fig.y_label);
    for s in &fig.series {
        for (i, (x, y)) in s.points.iter().enumerate() {
            let fit = s.fit.as_ref().map(|f| num(f[i].1)).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{fit}", s.name, num(*x), num(*y));
        }
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn svg(fig: &Figure) -> String {
    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let all: Vec<(f64, f64)> = fig.series.iter().flat_map(|s| s.points.iter().filter(finite).copied()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold((f64::MAX, f64::MIN, f64::MAX, f64::MIN), |(a, b, c, d), &(x, y)| {
        (a.min(x), b.max(x), c.min(y), d.max(y))
    });
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let poly = |pts: &[(f64, f64)]| {
        pts.iter().filter(finite).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - 2.0 * PAD, H - 2.0 * PAD);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, W / 2.0, H - 12.0, fig.x_label);
    let _ = writeln!(out, r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})">{}</text>"#, H / 2.0, H / 2.0, fig.y_label);
    let _ = writeln!(out, r#"<text x="{PAD}" y="{}" font-size="10">[{:.3}, {:.3}] x [{:.3}, {:.3}]</text>"#, PAD - 8.0, x0, x1, y0, y1);
    for (i, s) in fig.series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, poly(&s.points));
        if let Some(f) = &s.fit {
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-dasharray="4 3" points="{}"/>"#, poly(f));
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="11" fill="{colour}">{}</text>"#, W - PAD - 90.0, PAD + 16.0 * (i as f64 + 1.0), s.name);
    }
    out.push_str("</svg>\n");
    out
}

/// Stages the series CSV (and optionally the SVG) for a report.
pub fn plot_outputs(text: &str, with_svg: bool) -> Result<Outputs, CliError> {
    let (hash, fig) = figure_from_report(text)?;
    let mut out = Outputs::default();
    out.add(&format!("{}_series.csv", fig.stem), series_csv(hash.as_deref(), &fig));
    if with_svg {
        out.add(&format!("{}.svg", fig.stem), svg(&fig));
    }
    Ok(out)
}
