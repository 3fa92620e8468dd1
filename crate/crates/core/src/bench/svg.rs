use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::geometry::{Configuration, Workspace};
use crate::output::{Node, PlannerOutput, VirtualEdge};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#d62728",
];

fn tree_color(t: usize) -> String {
    if t < PALETTE.len() {
        PALETTE[t].to_string()
    } else {
        format!("hsl({}, 65%, 45%)", (t * 137) % 360)
    }
}

/// SVG document showing obstacles, per-tree edges, inter-tree connections,
/// the tour and the targets. World `y` points up.
pub fn svg_document<P: PlannerOutput + ?Sized>(ws: &Workspace, out: &P, tour_paths: &[Vec<Configuration>]) -> String {
    svg_scene(ws, out.targets(), out.nodes(), out.connections(), tour_paths)
}

/// [`svg_document`] from loose parts, for results without trees.
pub fn svg_scene(
    ws: &Workspace,
    targets: &[Configuration],
    nodes: &[Node],
    connections: &[VirtualEdge],
    tour_paths: &[Vec<Configuration>],
) -> String {
    let b = ws.bounds();
    let scale = 1000.0 / b.width().max(b.height());
    let px = |p: Configuration| ((p.x - b.min_x) * scale, (b.max_y - p.y) * scale);
    let (w, h) = (b.width() * scale, b.height() * scale);
    let stroke = 1.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let _ = writeln!(s, r##"<rect class="bounds" x="0" y="0" width="{w:.3}" height="{h:.3}" fill="#ffffff" stroke="#000000"/>"##);

    let _ = writeln!(s, r##"<g class="obstacles" fill="#555555">"##);
    for ob in ws.obstacles() {
        let pts: Vec<String> = ob
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = px(v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
    }
    s.push_str("</g>\n");

    let trees = nodes.iter().map(|n| n.tree.index() + 1).max().unwrap_or(0);
    let mut by_tree: Vec<String> = vec![String::new(); trees];
    for n in nodes {
        if let Some(p) = n.parent {
            let (x1, y1) = px(nodes[p.index()].config);
            let (x2, y2) = px(n.config);
            let _ = writeln!(by_tree[n.tree.index()], r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
        }
    }
    for (t, lines) in by_tree.iter().enumerate() {
        if lines.is_empty() {
            continue;
        }
        let _ = write!(
            s,
            "<g class=\"tree tree-{t}\" stroke=\"{}\" stroke-width=\"{:.2}\">\n{lines}</g>\n",
            tree_color(t),
            stroke * 0.6
        );
    }

    if !connections.is_empty() {
        let _ = writeln!(
            s,
            r##"<g class="virtual-edges" stroke="#000000" stroke-width="{:.2}" stroke-dasharray="4 3">"##,
            stroke
        );
        for e in connections {
            let (x1, y1) = px(nodes[e.a.index()].config);
            let (x2, y2) = px(nodes[e.b.index()].config);
            let _ = writeln!(s, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
        }
        s.push_str("</g>\n");
    }

    if !tour_paths.is_empty() {
        let _ = writeln!(
            s,
            r##"<g class="tour" fill="none" stroke="#e41a1c" stroke-width="{:.2}" stroke-linejoin="round">"##,
            stroke * 3.0
        );
        for path in tour_paths {
            let pts: Vec<String> = path
                .iter()
                .map(|&p| {
                    let (x, y) = px(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        s.push_str("</g>\n");
    }

    let _ = writeln!(s, r##"<g class="targets" fill="#000000" font-family="sans-serif" font-size="14">"##);
    for (i, &t) in targets.iter().enumerate() {
        let (x, y) = px(t);
        let _ = writeln!(s, r##"<circle cx="{x:.3}" cy="{y:.3}" r="6" fill="#ffd700" stroke="#000000"/>"##);
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}">{i}</text>"#, x + 8.0, y - 8.0);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Writes [`svg_document`] to `out`.
pub fn render_svg<P: PlannerOutput + ?Sized>(
    ws: &Workspace,
    f: &P,
    tour_paths: &[Vec<Configuration>],
    out: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(out, svg_document(ws, f, tour_paths))?;
    Ok(())
}
