use crate::error::CliError;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl std::str::FromStr for Formats {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut f = Formats { csv: false, json: false, svg: false };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                o => return Err(format!("unknown format `{o}` (expected csv, json or svg)")),
            }
        }
        if !(f.csv || f.json || f.svg) {
            return Err("no output format selected".into());
        }
        Ok(f)
    }
}

impl Default for Formats {
    fn default() -> Self {
        Formats { csv: true, json: true, svg: false }
    }
}

/// 17 significant digits, so every `f64` round-trips.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Writes the files of one run and remembers their paths.
pub struct Artifacts {
    dir: PathBuf,
    pub formats: Formats,
    pub written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, formats: Formats) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf(), formats, written: Vec::new() })
    }

    fn put(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body)?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        if !self.formats.csv {
            return Ok(());
        }
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.put(&format!("{stem}.csv"), &s)
    }

    pub fn json(&mut self, stem: &str, value: &serde_json::Value) -> Result<(), CliError> {
        if !self.formats.json {
            return Ok(());
        }
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        s.push('\n');
        self.put(&format!("{stem}.json"), &s)
    }

    pub fn svg(&mut self, stem: &str, render: impl FnOnce() -> String) -> Result<(), CliError> {
        if !self.formats.svg {
            return Ok(());
        }
        let body = render();
        self.put(&format!("{stem}.svg"), &body)
    }
}

pub mod svg {
    use super::*;

    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 50.0;

    pub enum Style {
        Line,
        Dots,
        Bars,
    }

    fn bounds(pts: &[(f64, f64)]) -> (f64, f64, f64, f64) {
        let fin = pts.iter().filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in fin {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        (x0, x1, y0, y1)
    }

    fn frame(title: &str, xl: &str, yl: &str, b: (f64, f64, f64, f64)) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>
<text x="{}" y="25" text-anchor="middle" font-size="14">{}</text>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>
<text x="{PAD}" y="{}" text-anchor="start">{:.4}</text>
<text x="{}" y="{}" text-anchor="end">{:.4}</text>
<text x="{}" y="{}" text-anchor="end">{:.4}</text>
<text x="{}" y="{}" text-anchor="end">{:.4}</text>
"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD,
            W / 2.0,
            escape(title),
            W / 2.0,
            H - 10.0,
            escape(xl),
            H / 2.0,
            H / 2.0,
            escape(yl),
            H - PAD + 15.0,
            b.0,
            W - PAD,
            H - PAD + 15.0,
            b.1,
            PAD - 4.0,
            H - PAD,
            b.2,
            PAD - 4.0,
            PAD + 10.0,
            b.3
        );
        s
    }

    fn escape(s: &str) -> String {
        s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
    }

    pub fn plot(title: &str, xl: &str, yl: &str, pts: &[(f64, f64)], style: Style) -> String {
        let b = bounds(pts);
        let sx = |x: f64| PAD + (x - b.0) / (b.1 - b.0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - b.2) / (b.3 - b.2) * (H - 2.0 * PAD);
        let mut s = frame(title, xl, yl, b);
        let fin: Vec<_> = pts.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        match style {
            Style::Line => {
                let path: Vec<String> = fin.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
                let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            }
            Style::Dots => {
                for p in fin {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="steelblue"/>"#, sx(p.0), sy(p.1));
                }
            }
            Style::Bars => {
                let base = sy(b.2.max(0.0).min(b.3));
                for p in fin {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="steelblue"/>"#,
                        sx(p.0),
                        base,
                        sy(p.1)
                    );
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }

    /// Histogram of samples with `bins` equal bins.
    pub fn histogram(title: &str, xl: &str, xs: &[f64], bins: usize) -> String {
        let fin: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
        let (lo, hi) = fin.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if fin.is_empty() {
            return plot(title, xl, "density", &[], Style::Bars);
        }
        let width = ((hi - lo) / bins as f64).max(1e-12);
        let mut counts = vec![0usize; bins];
        for x in &fin {
            counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
        }
        let pts: Vec<(f64, f64)> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (lo + (i as f64 + 0.5) * width, c as f64 / (fin.len() as f64 * width)))
            .collect();
        plot(title, xl, "density", &pts, Style::Bars)
    }

    /// Grey-scale heat map of a row-major `res × res` field.
    pub fn heatmap(title: &str, window: [f64; 4], res: usize, values: &[f64]) -> String {
        let b = (window[0], window[1], window[2], window[3]);
        let mut s = frame(title, "lambda", "mu", b);
        let (lo, hi) = values
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), &v| (a.min(v), c.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        let cw = (W - 2.0 * PAD) / res as f64;
        let ch = (H - 2.0 * PAD) / res as f64;
        for j in 0..res {
            for i in 0..res {
                let v = values[j * res + i];
                let fill = if v.is_finite() {
                    let g = (255.0 * (v - lo) / span).round() as u8;
                    format!("rgb({g},{g},{g})")
                } else {
                    "red".to_string()
                };
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                    PAD + i as f64 * cw,
                    H - PAD - (j + 1) as f64 * ch,
                    cw + 0.05,
                    ch + 0.05
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}
