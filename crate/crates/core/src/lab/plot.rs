use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{LabError, ResultRow};

/// `(x, y)` pairs for the three standard plots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotData {
    /// `(certified bound, achieved constant)` per gluing row.
    pub achieved_vs_certified: Vec<(f64, f64)>,
    /// `(generator parameter, modulus)` per modulus row.
    pub modulus_vs_param: Vec<(f64, f64)>,
    /// `(e_n + 2, e^n)` per scan row.
    pub claim1: Vec<(f64, f64)>,
}

impl PlotData {
    pub fn series(&self) -> [(&'static str, &[(f64, f64)]); 3] {
        [
            ("achieved_vs_certified", &self.achieved_vs_certified),
            ("modulus_vs_param", &self.modulus_vs_param),
            ("claim1", &self.claim1),
        ]
    }
}

pub fn plot_data(rows: &[ResultRow]) -> PlotData {
    let mut data = PlotData::default();
    for r in rows {
        if let (Some(c), Some(a)) = (r.certified_bound, r.achieved) {
            data.achieved_vs_certified.push((c, a));
        }
        if r.quantity == "modulus" {
            if let Some(m) = r.modulus {
                data.modulus_vs_param.push((r.param as f64, m));
            }
        }
        if let (Some(lo), Some(up)) = (r.e_n, r.e_up_n) {
            data.claim1.push((lo + 2.0, up));
        }
    }
    data
}

/// Whitespace-separated `x y` lines.
pub fn dat(points: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (x, y) in points {
        let _ = writeln!(s, "{x} {y}");
    }
    s
}

/// Scatter plot with the `y = x` line; the two ratio plots read as
/// "below the diagonal is good".
pub fn svg(title: &str, points: &[(f64, f64)], diagonal: bool) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const PAD: f64 = 40.0;
    let max = points.iter().fold(1.0_f64, |m, &(x, y)| m.max(x).max(y)) * 1.05;
    let sx = |x: f64| PAD + x / max * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / max * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="14">{title}</text>"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {} V{} H{}" fill="none" stroke="black"/>"#,
        PAD,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10">{max:.2}</text>"#,
        W - PAD,
        H - PAD + 14.0
    );
    if diagonal {
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 3"/>"#,
            sx(0.0),
            sy(0.0),
            sx(max),
            sy(max)
        );
    }
    for &(x, y) in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
            sx(x),
            sy(y)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `NAME.dat` and `NAME.svg` for each series into `dir`.
pub fn write_plot_files(rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    std::fs::create_dir_all(dir)?;
    let data = plot_data(rows);
    let mut written = Vec::new();
    for (name, points) in data.series() {
        let dat_path = dir.join(format!("{name}.dat"));
        std::fs::write(&dat_path, dat(points))?;
        let svg_path = dir.join(format!("{name}.svg"));
        std::fs::write(&svg_path, svg(name, points, name != "modulus_vs_param"))?;
        written.extend([dat_path, svg_path]);
    }
    Ok(written)
}
