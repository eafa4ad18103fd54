//! SVG rendering of bi-partitions. This is the only module that converts
//! exact values to floating point.
//!
//! Shapes are drawn in the chart where `e = (v, p)` and `f = (-u, q)`,
//! inside a group whose transform maps chart units to pixels with the
//! unstable axis pointing up. Markers and text are placed in pixel space.

use std::fmt::Write as _;

use serde_json::json;

use crate::berg::{connectivity_at, rectangle_dims, BergShape};
use crate::bifan::{cutting_word, CuttingWord};
use crate::error::{BergError, Result};
use crate::intmat::Mat2Z;
use crate::oracle::{BergPlacement, OracleGeometry};
use crate::qfield::QuadNum;

/// Which layers to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShowFlags {
    pub tiling: bool,
    pub spines: bool,
    pub fixed_points: bool,
    pub image_overlay: bool,
    pub middles: bool,
    pub neighbor_labels: bool,
}

impl Default for ShowFlags {
    fn default() -> Self {
        ShowFlags {
            tiling: true,
            spines: true,
            fixed_points: true,
            image_overlay: false,
            middles: true,
            neighbor_labels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub shape: BergShape,
    /// Sign of the trace of the automorphism, fixing the eigenvalue signs.
    pub trace_sign: i128,
    pub placement: Option<BergPlacement>,
    pub show: ShowFlags,
    pub width: u32,
    pub height: u32,
    pub precision: usize,
}

impl RenderSpec {
    pub fn new(shape: BergShape, m: &Mat2Z) -> Self {
        RenderSpec {
            shape,
            trace_sign: m.trace().signum(),
            placement: None,
            show: ShowFlags::default(),
            width: 480,
            height: 480,
            precision: 6,
        }
    }

    fn geometry(&self) -> OracleGeometry {
        OracleGeometry::new(self.shape.c_raw, self.trace_sign)
    }
}

/// Formats with `prec` decimals, trimming trailing zeros.
fn num(x: f64, prec: usize) -> String {
    let mut s = format!("{x:.prec$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Axis-aligned rectangle in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    fn new(xa: f64, ya: f64, xb: f64, yb: f64) -> Self {
        Rect { x0: xa.min(xb), y0: ya.min(yb), x1: xa.max(xb), y1: ya.max(yb) }
    }

    fn shift(&self, dx: f64, dy: f64) -> Rect {
        Rect { x0: self.x0 + dx, y0: self.y0 + dy, x1: self.x1 + dx, y1: self.y1 + dy }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    fn edge_distance(&self, x: f64, y: f64) -> f64 {
        let dx = if x < self.x0 {
            self.x0 - x
        } else if x > self.x1 {
            x - self.x1
        } else {
            0.0
        };
        let dy = if y < self.y0 {
            self.y0 - y
        } else if y > self.y1 {
            y - self.y1
        } else {
            0.0
        };
        if dx > 0.0 || dy > 0.0 {
            return dx.hypot(dy);
        }
        (x - self.x0).min(self.x1 - x).min(y - self.y0).min(self.y1 - y)
    }
}

/// Float dimensions of a shape.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FDims {
    u: f64,
    v: f64,
    p: f64,
    q: f64,
}

impl FDims {
    fn of(shape: &BergShape) -> Self {
        let d = &shape.dims;
        FDims { u: d.u.to_f64(), v: d.v.to_f64(), p: d.p.to_f64(), q: d.q.to_f64() }
    }

    fn r1(&self) -> Rect {
        Rect::new(-self.u, self.q - self.p, 0.0, self.q)
    }

    fn r2(&self) -> Rect {
        Rect::new(0.0, 0.0, self.v, self.q)
    }

    fn e(&self) -> (f64, f64) {
        (self.v, self.p)
    }

    fn f(&self) -> (f64, f64) {
        (-self.u, self.q)
    }
}

/// Translates `a e + b f` used for the tiling layer, in drawing order.
const NEIGHBORS: [(i32, i32); 9] = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];

fn neighbor_label(a: i32, b: i32) -> String {
    let part = |k: i32, s: &str| match k {
        0 => String::new(),
        1 => format!("+{s}"),
        -1 => format!("-{s}"),
        _ => format!("{k:+}{s}"),
    };
    format!("{}{}", part(a, "e"), part(b, "f"))
}

/// Number of rectangle translates containing `(x, y)`, or `None` when the
/// point is within `edge_tol` of some rectangle edge.
pub fn coverage_count(shape: &BergShape, x: f64, y: f64, edge_tol: f64) -> Option<usize> {
    let d = FDims::of(shape);
    let (e, f) = (d.e(), d.f());
    let mut count = 0;
    for a in -3..=3 {
        for b in -3..=3 {
            let dx = a as f64 * e.0 + b as f64 * f.0;
            let dy = a as f64 * e.1 + b as f64 * f.1;
            for r in [d.r1(), d.r2()] {
                let r = r.shift(dx, dy);
                if r.edge_distance(x, y) < edge_tol {
                    return None;
                }
                if r.contains(x, y) {
                    count += 1;
                }
            }
        }
    }
    Some(count)
}

/// Point `alpha e + beta f` of the fundamental parallelogram.
pub fn fundamental_point(shape: &BergShape, alpha: f64, beta: f64) -> (f64, f64) {
    let d = FDims::of(shape);
    (alpha * d.v - beta * d.u, alpha * d.p + beta * d.q)
}

struct Canvas {
    h: f64,
    pad: f64,
    xmin: f64,
    ymin: f64,
    sx: f64,
    sy: f64,
    prec: usize,
}

impl Canvas {
    fn new(w: u32, h: u32, bounds: Rect, prec: usize) -> Result<Self> {
        let (w, h) = (w as f64, h as f64);
        let pad = 16.0;
        if w <= 4.0 * pad || h <= 4.0 * pad {
            return Err(BergError::Degenerate(format!("canvas {w}x{h} is too small")));
        }
        let sx = (w - 2.0 * pad) / bounds.width();
        let sy = (h - 2.0 * pad) / bounds.height();
        Ok(Canvas { h, pad, xmin: bounds.x0, ymin: bounds.y0, sx, sy, prec })
    }

    fn n(&self, x: f64) -> String {
        num(x, self.prec)
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (self.pad + (x - self.xmin) * self.sx, self.h - self.pad - (y - self.ymin) * self.sy)
    }

    fn transform(&self) -> String {
        format!(
            "matrix({} 0 0 {} {} {})",
            self.n(self.sx),
            self.n(-self.sy),
            self.n(self.pad - self.xmin * self.sx),
            self.n(self.h - self.pad + self.ymin * self.sy)
        )
    }

    fn rect(&self, out: &mut String, r: &Rect, class: &str) {
        let _ = writeln!(
            out,
            "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" vector-effect=\"non-scaling-stroke\"/>",
            self.n(r.x0),
            self.n(r.y0),
            self.n(r.width()),
            self.n(r.height())
        );
    }

    fn segment(&self, out: &mut String, id: &str, class: &str, a: (f64, f64), b: (f64, f64)) {
        let _ = writeln!(
            out,
            "<path id=\"{id}\" class=\"{class}\" d=\"M {} {} L {} {}\" vector-effect=\"non-scaling-stroke\"/>",
            self.n(a.0),
            self.n(a.1),
            self.n(b.0),
            self.n(b.1)
        );
    }

    fn text(&self, out: &mut String, at: (f64, f64), body: &str) {
        let (x, y) = self.px(at.0, at.1);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{body}</text>",
            self.n(x),
            self.n(y)
        );
    }

    fn marker(&self, out: &mut String, at: (f64, f64), class: &str) {
        let (x, y) = self.px(at.0, at.1);
        let _ = writeln!(
            out,
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"4\"/>",
            self.n(x),
            self.n(y)
        );
    }
}

const STYLE: &str = "<style>\
rect{stroke:#222;stroke-width:1}\
.R1{fill:#9ecae1}.R2{fill:#fdd0a2}\
.tile{fill-opacity:0.35}\
.image-R1,.image-R2{fill:none;stroke:#c00;stroke-dasharray:4 3}\
.spine{stroke:#000;stroke-width:3;fill:none}\
.middle{stroke:#2a2;stroke-width:6;stroke-opacity:0.6;fill:none}\
.fixed{fill:#c00}\
text{font-family:sans-serif;font-size:12px}\
</style>";

fn qjson(x: &QuadNum) -> serde_json::Value {
    serde_json::to_value(x).unwrap_or(serde_json::Value::Null)
}

fn metadata(spec: &RenderSpec) -> String {
    let d = &spec.shape.dims;
    let area = d.u * d.p + d.v * d.q;
    let placement = spec.placement.as_ref().map(|pl| {
        json!({
            "lattice_point": pl.lattice_point,
            "p1": pl.p1,
            "p2": pl.p2,
            "offset_s": qjson(&pl.offset_s),
            "offset_u": qjson(&pl.offset_u),
        })
    });
    let v = json!({
        "index": spec.shape.index,
        "C": spec.shape.c,
        "C_basis": spec.shape.c_raw,
        "basis": spec.shape.basis,
        "dims": {"u": qjson(&d.u), "v": qjson(&d.v), "p": qjson(&d.p), "q": qjson(&d.q)},
        "area": qjson(&area),
        "placement": placement,
    });
    // JSON never contains "]]>" here, but escape '<' and '&' for XML safety.
    v.to_string().replace('&', "\\u0026").replace('<', "\\u003c")
}

/// Renders one bi-partition as an SVG document.
pub fn render_bipartition(spec: &RenderSpec) -> Result<String> {
    let geo = spec.geometry();
    let d = FDims::of(&spec.shape);
    let (e, f) = (d.e(), d.f());
    let lam = geo.lambda.to_f64();
    let mu = geo.mu.to_f64();

    // Anchor of the overlay: the fixed point on the horizontal spine.
    let (t, s) = match &spec.placement {
        Some(pl) => {
            let (t, s) = geo.chart(pl.lattice_point);
            (t.to_f64(), s.to_f64())
        }
        None => (0.0, 0.0),
    };
    let f1 = (t, d.q);
    let f2 = (0.0, d.q - s);

    let mut rects: Vec<(Rect, String, String)> = Vec::new();
    let offsets: &[(i32, i32)] = if spec.show.tiling { &NEIGHBORS } else { &NEIGHBORS[..1] };
    for &(a, b) in offsets {
        let dx = a as f64 * e.0 + b as f64 * f.0;
        let dy = a as f64 * e.1 + b as f64 * f.1;
        let tile = if (a, b) == (0, 0) { "" } else { " tile" };
        rects.push((d.r1().shift(dx, dy), format!("R1{tile}"), format!("R1{}", neighbor_label(a, b))));
        rects.push((d.r2().shift(dx, dy), format!("R2{tile}"), format!("R2{}", neighbor_label(a, b))));
    }
    let image = |r: &Rect| {
        let map = |x: f64, y: f64| (f1.0 + mu * (x - f1.0), f1.1 + lam * (y - f1.1));
        let (a, b) = (map(r.x0, r.y0), map(r.x1, r.y1));
        Rect::new(a.0, a.1, b.0, b.1)
    };
    let overlays = [(image(&d.r1()), "image-R1"), (image(&d.r2()), "image-R2")];

    let mut bounds = rects[0].0;
    let mut grow = |r: &Rect| {
        bounds = Rect::new(bounds.x0.min(r.x0), bounds.y0.min(r.y0), bounds.x1.max(r.x1), bounds.y1.max(r.y1));
    };
    for (r, _, _) in &rects {
        grow(r);
    }
    if spec.show.image_overlay {
        for (r, _) in &overlays {
            grow(r);
        }
    }
    let canvas = Canvas::new(spec.width, spec.height, bounds, spec.precision)?;

    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = spec.width,
        h = spec.height
    );
    let _ = writeln!(out, "<metadata>{}</metadata>", metadata(spec));
    let _ = writeln!(out, "{STYLE}");
    let _ = writeln!(out, "<g id=\"chart\" transform=\"{}\">", canvas.transform());
    // Translates first so the base rectangles sit on top.
    for (r, class, _) in rects.iter().rev() {
        canvas.rect(&mut out, r, class);
    }
    if spec.show.spines {
        canvas.segment(&mut out, "spine-s", "spine", (-d.u, d.q), (d.v, d.q));
        canvas.segment(&mut out, "spine-u", "spine", (0.0, -d.p), (0.0, d.q));
    }
    if spec.show.middles {
        let beta = lam.abs();
        if mu < 0.0 {
            let m = (d.u + d.v) / (beta + 1.0);
            canvas.segment(&mut out, "middle-s", "middle", (-d.u + m, d.q), (d.v - m, d.q));
        }
        if lam < 0.0 {
            let m = (d.p + d.q) / (beta + 1.0);
            canvas.segment(&mut out, "middle-u", "middle", (0.0, -d.p + m), (0.0, d.q - m));
        }
    }
    if spec.show.image_overlay {
        for (r, class) in &overlays {
            canvas.rect(&mut out, r, class);
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "<g id=\"annotations\">");
    if spec.show.fixed_points {
        canvas.marker(&mut out, f1, "fixed");
        if spec.placement.is_some() {
            canvas.marker(&mut out, f2, "fixed");
        }
    }
    if spec.show.neighbor_labels {
        for (r, _, label) in &rects {
            canvas.text(&mut out, ((r.x0 + r.x1) / 2.0, (r.y0 + r.y1) / 2.0), label);
        }
    } else {
        for (r, _, label) in rects.iter().take(2) {
            canvas.text(&mut out, ((r.x0 + r.x1) / 2.0, (r.y0 + r.y1) / 2.0), label);
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

/// Shape at fan index `i`, which may lie beyond the first (semi-)period.
pub fn shape_at(cw: &CuttingWord, i: usize) -> Result<BergShape> {
    let basis = cw.basis_at(i as i64);
    let c_raw = connectivity_at(&cw.matrix, &basis)?;
    Ok(BergShape {
        index: i,
        basis,
        c_raw,
        c: c_raw.canonical(),
        dims: rectangle_dims(&c_raw),
        isolated: crate::berg::is_isolated(&c_raw),
    })
}

/// A row of consecutive bi-partition shapes `from ..= to` along the fan.
pub fn render_fan(m: &Mat2Z, from: usize, to: usize) -> Result<String> {
    if from > to {
        return Err(BergError::InvalidRange(format!("{from}..{to} is empty")));
    }
    let cw = cutting_word(m)?;
    let panel = 200.0;
    let prec = 6;
    let count = to - from + 1;
    let width = panel * count as f64;
    let height = panel + 40.0;
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(width, 0),
        h = num(height, 0)
    );
    let meta = json!({
        "matrix": m,
        "word": cw.word_string(),
        "kind": cw.kind.as_str(),
        "from": from,
        "to": to,
    });
    let _ = writeln!(out, "<metadata>{meta}</metadata>");
    let _ = writeln!(out, "{STYLE}");
    for (slot, i) in (from..=to).enumerate() {
        let shape = shape_at(&cw, i)?;
        let d = FDims::of(&shape);
        let bounds = Rect::new(-d.u, (d.q - d.p).min(0.0), d.v, d.q);
        let canvas = Canvas::new(panel as u32, panel as u32, bounds, prec)?;
        let ox = panel * slot as f64;
        let _ = writeln!(
            out,
            "<g class=\"panel\" data-index=\"{i}\" data-c=\"{}\" transform=\"translate({} 0)\">",
            shape.c_raw,
            num(ox, prec)
        );
        let _ = writeln!(out, "<g transform=\"{}\">", canvas.transform());
        canvas.rect(&mut out, &d.r1(), "R1");
        canvas.rect(&mut out, &d.r2(), "R2");
        let _ = writeln!(out, "</g>");
        let bit = cw.bit(i as i64);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">n={i} s={bit} C={}</text>",
            num(panel / 2.0, prec),
            num(panel + 24.0, prec),
            shape.c_raw
        );
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
