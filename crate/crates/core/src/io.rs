//! File formats: node-field CSV, PGM heatmaps and masks, radial tables, JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::domain::{GridDomain, ScalarField};
use crate::error::{Error, Result};

pub const FIELD_HEADER: &str = "i,j,x,y,value";

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

/// Writes bytes, creating parent directories.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    create_parent(path)?;
    fs::write(path, bytes)?;
    Ok(())
}

/// 17 significant digits, enough for an exact read-back of any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Renders a field as CSV, one row per grid node in row-major order;
/// outside nodes carry `NaN`.
pub fn field_csv(field: &ScalarField, dom: &GridDomain) -> String {
    let mut out = String::with_capacity(64 * dom.n_nodes() + 16);
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for n in 0..dom.n_nodes() {
        let (i, j) = dom.ij(n);
        let p = dom.position(n);
        let v = if dom.inside[n] { field.values[n] } else { f64::NAN };
        let _ = writeln!(out, "{i},{j},{},{},{}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(v));
    }
    out
}

pub fn write_field(field: &ScalarField, dom: &GridDomain, path: &Path) -> Result<()> {
    write_bytes(path, field_csv(field, dom).as_bytes())
}

fn parse_num<T: std::str::FromStr>(what: &'static str, line: usize, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Format {
        what,
        message: format!("line {line}: cannot parse `{}`", s.trim()),
    })
}

/// Reads a field CSV written by [`write_field`]. Nodes absent from the file are `NaN`.
pub fn read_field(dom: &GridDomain, path: &Path) -> Result<ScalarField> {
    let text = read_text(path)?;
    let what = "field CSV";
    let mut values = vec![f64::NAN; dom.n_nodes()];
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == FIELD_HEADER => {}
        _ => {
            return Err(Error::Format {
                what,
                message: format!("expected header `{FIELD_HEADER}`"),
            })
        }
    }
    for (k, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Format {
                what,
                message: format!("line {}: expected 5 columns, found {}", k + 1, cols.len()),
            });
        }
        let i: usize = parse_num(what, k + 1, cols[0])?;
        let j: usize = parse_num(what, k + 1, cols[1])?;
        if i >= dom.nx || j >= dom.ny {
            return Err(Error::Format {
                what,
                message: format!("line {}: node ({i}, {j}) is off the {}×{} grid", k + 1, dom.nx, dom.ny),
            });
        }
        values[dom.node(i, j)] = parse_num(what, k + 1, cols[4])?;
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(ScalarField::new(name, values))
}

/// Value range recorded next to a heatmap.
#[derive(Debug, Clone, Serialize)]
pub struct HeatmapScale {
    pub field: String,
    pub min: f64,
    pub max: f64,
    pub nan_gray: u8,
}

/// 8-bit binary PGM: finite minimum maps to 0, maximum to 255, `NaN` to 0.
/// The top image row is the largest `j`.
pub fn heatmap_pgm(field: &ScalarField, dom: &GridDomain) -> (Vec<u8>, HeatmapScale) {
    let finite = || {
        (0..dom.n_nodes())
            .filter(|&n| dom.inside[n])
            .map(|n| field.values[n])
            .filter(|v| v.is_finite())
    };
    let min = finite().fold(f64::INFINITY, f64::min);
    let max = finite().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let mut bytes = format!("P5\n{} {}\n255\n", dom.nx, dom.ny).into_bytes();
    for j in (0..dom.ny).rev() {
        for i in 0..dom.nx {
            let n = dom.node(i, j);
            let v = field.values[n];
            let gray = if !dom.inside[n] || !v.is_finite() || !(span > 0.0) {
                0
            } else {
                (255.0 * (v - min) / span).round().clamp(0.0, 255.0) as u8
            };
            bytes.push(gray);
        }
    }
    let scale = HeatmapScale {
        field: field.name.clone(),
        min: if min.is_finite() { min } else { f64::NAN },
        max: if max.is_finite() { max } else { f64::NAN },
        nan_gray: 0,
    };
    (bytes, scale)
}

/// Writes `<stem>.pgm` and `<stem>.scale.json`.
pub fn write_heatmap(field: &ScalarField, dom: &GridDomain, stem: &Path) -> Result<()> {
    let (bytes, scale) = heatmap_pgm(field, dom);
    write_bytes(&stem.with_extension("pgm"), &bytes)?;
    write_json(&stem.with_extension("scale.json"), &scale)
}

/// Reads a P2 or P5 mask; nonzero pixels are inside. The top image row becomes
/// the largest `j`. Returns `(nx, ny, inside)` in node order.
pub fn read_mask_pgm(path: &Path) -> Result<(usize, usize, Vec<bool>)> {
    let bytes = read_bytes(path)?;
    let what = "mask PGM";
    let bad = |m: &str| Error::Format {
        what,
        message: m.to_string(),
    };
    // Header: magic, width, height, maxval, separated by whitespace and comments.
    let mut pos = 0;
    let token = |pos: &mut usize| -> Option<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos).ok_or_else(|| bad("empty file"))?;
    let header_num = |pos: &mut usize, name: &str| -> Result<usize> {
        token(pos)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(&format!("missing or invalid {name}")))
    };
    let nx = header_num(&mut pos, "width")?;
    let ny = header_num(&mut pos, "height")?;
    let maxval = header_num(&mut pos, "maxval")?;
    if nx == 0 || ny == 0 || maxval == 0 || maxval > 65535 {
        return Err(bad("width, height and maxval must be positive (maxval ≤ 65535)"));
    }
    let mut pixels = Vec::with_capacity(nx * ny);
    match magic.as_str() {
        "P2" => {
            for _ in 0..nx * ny {
                pixels.push(header_num(&mut pos, "pixel")?);
            }
        }
        "P5" => {
            pos += 1; // single whitespace after maxval
            let width = if maxval < 256 { 1 } else { 2 };
            let data = bytes.get(pos..pos + nx * ny * width).ok_or_else(|| bad("truncated pixel data"))?;
            pixels.extend(data.chunks(width).map(|c| c.iter().fold(0usize, |acc, &b| acc * 256 + b as usize)));
        }
        _ => return Err(bad(&format!("unsupported magic `{magic}`, expected P2 or P5"))),
    }
    let mut inside = vec![false; nx * ny];
    for row in 0..ny {
        let j = ny - 1 - row;
        for i in 0..nx {
            inside[j * nx + i] = pixels[row * nx + i] != 0;
        }
    }
    Ok((nx, ny, inside))
}

/// Reads `(node, dir, λ index, ρ)` records; a non-numeric first line is a header.
pub fn read_table_csv(path: &Path) -> Result<Vec<(usize, usize, usize, f64)>> {
    let text = read_text(path)?;
    let what = "radial table CSV";
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if k == 0 && cols[0].trim().parse::<usize>().is_err() {
            continue;
        }
        if cols.len() != 4 {
            return Err(Error::Format {
                what,
                message: format!("line {}: expected 4 columns, found {}", k + 1, cols.len()),
            });
        }
        out.push((
            parse_num(what, k + 1, cols[0])?,
            parse_num(what, k + 1, cols[1])?,
            parse_num(what, k + 1, cols[2])?,
            parse_num(what, k + 1, cols[3])?,
        ));
    }
    Ok(out)
}

/// Attainment set as CSV `i,j,x,y,h_du`.
pub fn attain_set_csv(dom: &GridDomain, set: &[usize], h_du: &[f64]) -> String {
    let mut out = String::from("i,j,x,y,h_du\n");
    for &n in set {
        let (i, j) = dom.ij(n);
        let p = dom.position(n);
        let _ = writeln!(out, "{i},{j},{},{},{}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(h_du[n]));
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, json_string(value)?.as_bytes())
}
