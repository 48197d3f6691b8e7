use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Who produced a file, and from what.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub params: Map<String, Value>,
}

impl Provenance {
    pub fn new(params: Map<String, Value>) -> Self {
        Self {
            tool: "sphere-coulomb",
            version: env!("CARGO_PKG_VERSION"),
            command: std::env::args().collect::<Vec<_>>().join(" "),
            params,
        }
    }

    fn comment_lines(&self, prefix: &str) -> String {
        let mut s = format!("{prefix} {} {}\n", self.tool, self.version);
        let _ = writeln!(s, "{prefix} command: {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "{prefix} {k} = {v}");
        }
        s
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.17e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Text(t) => json!(t),
        }
    }

    fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }
}

/// How a table is drawn as SVG.
#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub x: usize,
    pub ys: Vec<usize>,
    /// Rows are split into separate polylines whenever this column changes.
    pub group: Option<usize>,
    pub vlines: Vec<f64>,
    pub equal_axes: bool,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra top-level JSON fields, also written as CSV comments.
    pub extra: Map<String, Value>,
    pub plot: Plot,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            extra: Map::new(),
            plot: Plot::default(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, prov: &Provenance) -> String {
        match format {
            Format::Csv => self.csv(prov),
            Format::Json => self.json(prov),
            Format::Svg => self.svg(prov),
        }
    }

    fn csv(&self, prov: &Provenance) -> String {
        let mut s = prov.comment_lines("#");
        for (k, v) in &self.extra {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn json(&self, prov: &Provenance) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect(),
                )
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("provenance".into(), json!(prov));
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        obj.insert("columns".into(), json!(self.columns));
        obj.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).unwrap_or_default();
        s.push('\n');
        s
    }

    fn svg(&self, prov: &Provenance) -> String {
        let p = &self.plot;
        let mut series: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
        for &y in &p.ys {
            let mut cur: Vec<(f64, f64)> = Vec::new();
            let mut key: Option<String> = None;
            for row in &self.rows {
                let k = p.group.map(|g| row[g].csv());
                if key.is_some() && k != key {
                    series.push((y, std::mem::take(&mut cur)));
                }
                key = k;
                if let (Some(a), Some(b)) = (row[p.x].num(), row[y].num()) {
                    if a.is_finite() && b.is_finite() {
                        cur.push((a, b));
                    }
                }
            }
            series.push((y, cur));
        }
        svg_plot(&series, self, prov)
    }
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 56.0;
const COLOURS: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad"];

fn svg_plot(series: &[(usize, Vec<(f64, f64)>)], table: &Table, prov: &Provenance) -> String {
    let pts = series.iter().flat_map(|s| s.1.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let (pw, ph) = (SVG_W - 2.0 * MARGIN, SVG_H - 2.0 * MARGIN);
    let (mut sx, mut sy) = (pw / (x1 - x0), ph / (y1 - y0));
    if table.plot.equal_axes {
        let s = sx.min(sy);
        sx = s;
        sy = s;
    }
    let tx = |x: f64| MARGIN + (x - x0) * sx;
    let ty = |y: f64| SVG_H - MARGIN - (y - y0) * sy;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(s, "<!--\n{}-->", prov.comment_lines(""));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {b} H{r} M{m} {b} V{m}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        b = SVG_H - MARGIN,
        r = SVG_W - MARGIN
    );
    let label = |v: f64| format!("{v:.3}");
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">{}</text><text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
        MARGIN,
        SVG_H - MARGIN + 16.0,
        label(x0),
        SVG_W - MARGIN,
        SVG_H - MARGIN + 16.0,
        label(x0 + pw / sx)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text><text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        SVG_H - MARGIN,
        label(y0),
        MARGIN - 4.0,
        MARGIN + 4.0,
        label(y0 + ph / sy)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
        SVG_W / 2.0,
        SVG_H - 12.0,
        table.columns[table.plot.x]
    );
    for &v in &table.plot.vlines {
        if v >= x0 && v <= x1 {
            let _ = writeln!(
                s,
                r##"<line x1="{x}" x2="{x}" y1="{t}" y2="{b}" stroke="#888" stroke-dasharray="4 3"/>"##,
                x = tx(v),
                t = MARGIN,
                b = SVG_H - MARGIN
            );
        }
    }
    for (y, pts) in series {
        if pts.is_empty() {
            continue;
        }
        let idx = table.plot.ys.iter().position(|c| c == y).unwrap_or(0);
        let d: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", tx(x), ty(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"><title>{}</title></polyline>"#,
            d.join(" "),
            COLOURS[idx % COLOURS.len()],
            table.columns[*y]
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Where output goes: an explicit path, a file in the default directory, or stdout.
pub fn destination(explicit: Option<PathBuf>, command: &str, format: Format) -> Option<PathBuf> {
    explicit.or_else(|| {
        std::env::var_os("SPHERE_COULOMB_OUT")
            .map(|d| Path::new(&d).join(format!("{command}.{}", format.extension())))
    })
}

/// Write through a temporary file in the target directory and rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
