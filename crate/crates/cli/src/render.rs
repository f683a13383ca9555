//! Newton-polygon rendering: a static SVG with the lattice grid, shaded
//! hull, support dots and labeled edges, plus a plain ASCII variant.

use abeljac_core::grading::PolygonSnapshot;
use std::fmt::Write;

const CELL: i64 = 28;
const MARGIN: i64 = 40;

fn bounds(snap: &PolygonSnapshot) -> (i64, i64, i64, i64) {
    let min_i = snap.support.iter().map(|p| p.0).min().unwrap_or(0);
    let max_i = snap.support.iter().map(|p| p.0).max().unwrap_or(0);
    let min_j = snap.support.iter().map(|p| p.1).min().unwrap_or(0);
    let max_j = snap.support.iter().map(|p| p.1).max().unwrap_or(0);
    (min_i, max_i, min_j, max_j)
}

pub fn to_svg(snap: &PolygonSnapshot) -> String {
    let (min_i, max_i, min_j, max_j) = bounds(snap);
    let w = (max_i - min_i + 1) * CELL + 2 * MARGIN;
    let h = (max_j - min_j + 1) * CELL + 2 * MARGIN;
    let sx = |i: i64| MARGIN + (i - min_i) * CELL;
    let sy = |j: i64| h - MARGIN - (j - min_j) * CELL;
    let mut out = String::new();
    writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"##
    )
    .unwrap();
    // lattice grid
    for i in min_i..=max_i {
        writeln!(
            out,
            r##"  <line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#ddd" stroke-width="1"/>"##,
            sx(i),
            sy(max_j),
            sy(min_j)
        )
        .unwrap();
    }
    for j in min_j..=max_j {
        writeln!(
            out,
            r##"  <line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="#ddd" stroke-width="1"/>"##,
            sy(j),
            sx(min_i),
            sx(max_i)
        )
        .unwrap();
    }
    // shaded hull
    if snap.hull.len() >= 2 {
        let points: Vec<String> = snap.hull.iter().map(|p| format!("{},{}", sx(p.0), sy(p.1))).collect();
        writeln!(
            out,
            r##"  <polygon points="{}" fill="#c8d8f0" fill-opacity="0.5" stroke="#666" stroke-width="1"/>"##,
            points.join(" ")
        )
        .unwrap();
    }
    // labeled direction edges
    for e in &snap.edges {
        writeln!(
            out,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#205080" stroke-width="2.5"/>"##,
            sx(e.st.0),
            sy(e.st.1),
            sx(e.en.0),
            sy(e.en.1)
        )
        .unwrap();
        let mx = (sx(e.st.0) + sx(e.en.0)) / 2 + 6;
        let my = (sy(e.st.1) + sy(e.en.1)) / 2 - 6;
        writeln!(
            out,
            r##"  <text class="dir-label" x="{mx}" y="{my}" font-size="13" fill="#205080">({},{})</text>"##,
            e.direction.rho, e.direction.sigma
        )
        .unwrap();
    }
    // support dots
    for p in &snap.support {
        writeln!(
            out,
            r##"  <circle cx="{}" cy="{}" r="4" fill="#203040"/>"##,
            sx(p.0),
            sy(p.1)
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

pub fn to_ascii(snap: &PolygonSnapshot) -> String {
    let (min_i, max_i, min_j, max_j) = bounds(snap);
    let mut out = String::new();
    for j in (min_j..=max_j).rev() {
        write!(out, "{j:>4} |").unwrap();
        for i in min_i..=max_i {
            let ch = if snap.support.contains(&(i, j)) { " *" } else { " ." };
            out.push_str(ch);
        }
        out.push('\n');
    }
    write!(out, "      ").unwrap();
    for _ in min_i..=max_i {
        out.push_str("--");
    }
    out.push('\n');
    write!(out, "      ").unwrap();
    for i in min_i..=max_i {
        write!(out, "{:>2}", (i % 10 + 10) % 10).unwrap();
    }
    out.push('\n');
    write!(out, "x from {min_i} to {max_i}; edges:").unwrap();
    for e in &snap.edges {
        write!(
            out,
            " ({},{}): {:?}->{:?}",
            e.direction.rho, e.direction.sigma, e.st, e.en
        )
        .unwrap();
    }
    out.push('\n');
    out
}
