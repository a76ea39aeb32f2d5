//! Network file writers: CSV edge list, Graphviz DOT, Pajek and VOSviewer JSON.

use std::io::Write;

use serde::Serialize;

use ranksig_core::stats::{Containment, IntervalRelation};
use ranksig_core::{Grouping, SignificanceGraph};

use crate::args::Format;

fn relation_label(rel: Option<IntervalRelation>) -> &'static str {
    match rel {
        None => "",
        Some(IntervalRelation::Disjoint) => "disjoint",
        Some(IntervalRelation::Overlap) => "overlap",
        Some(IntervalRelation::Containment(Containment::AinB)) => "a-in-b",
        Some(IntervalRelation::Containment(Containment::BinA)) => "b-in-a",
        Some(IntervalRelation::Containment(Containment::Mutual)) => "mutual",
    }
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn write_csv(g: &SignificanceGraph, out: &mut dyn Write) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["a", "b", "link_z", "relation", "strong"])?;
    let nodes = g.nodes();
    for e in g.edges() {
        w.write_record([
            nodes[e.a].name.as_str(),
            nodes[e.b].name.as_str(),
            &e.link_z.to_string(),
            relation_label(e.relation),
            if e.strong { "true" } else { "false" },
        ])?;
    }
    w.flush()
}

pub fn write_dot(g: &SignificanceGraph, grouping: Option<&Grouping>, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "graph significance {{")?;
    for (i, n) in g.nodes().iter().enumerate() {
        match grouping {
            Some(gr) => writeln!(out, "  {} [z={}, group={}];", quoted(&n.name), n.z, gr.group_of(i) + 1)?,
            None => writeln!(out, "  {} [z={}];", quoted(&n.name), n.z)?,
        }
    }
    for e in g.edges() {
        let (a, b) = (&g.nodes()[e.a].name, &g.nodes()[e.b].name);
        let style = if e.strong { ", style=bold" } else { "" };
        writeln!(out, "  {} -- {} [z={}{style}];", quoted(a), quoted(b), e.link_z)?;
    }
    writeln!(out, "}}")
}

pub fn write_pajek(g: &SignificanceGraph, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "*Vertices {}", g.len())?;
    for (i, n) in g.nodes().iter().enumerate() {
        writeln!(out, "{} {}", i + 1, quoted(&n.name))?;
    }
    writeln!(out, "*Edges")?;
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.a + 1, e.b + 1, e.link_z.abs())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VosItem<'a> {
    id: usize,
    label: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cluster: Option<usize>,
    weights: VosWeights,
}

#[derive(Serialize)]
struct VosWeights {
    z: f64,
}

#[derive(Serialize)]
struct VosLink {
    source_id: usize,
    target_id: usize,
    strength: f64,
}

#[derive(Serialize)]
struct VosNetwork<'a> {
    items: Vec<VosItem<'a>>,
    links: Vec<VosLink>,
}

#[derive(Serialize)]
struct VosDocument<'a> {
    network: VosNetwork<'a>,
}

pub fn write_vosviewer(g: &SignificanceGraph, grouping: Option<&Grouping>, out: &mut dyn Write) -> std::io::Result<()> {
    let doc = VosDocument {
        network: VosNetwork {
            items: g
                .nodes()
                .iter()
                .enumerate()
                .map(|(i, n)| VosItem {
                    id: i + 1,
                    label: &n.name,
                    cluster: grouping.map(|gr| gr.group_of(i) + 1),
                    weights: VosWeights { z: n.z },
                })
                .collect(),
            links: g
                .edges()
                .iter()
                .map(|e| VosLink {
                    source_id: e.a + 1,
                    target_id: e.b + 1,
                    strength: e.link_z.abs(),
                })
                .collect(),
        },
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

pub fn write_graph(
    format: Format,
    g: &SignificanceGraph,
    grouping: Option<&Grouping>,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(g, out),
        Format::Dot => write_dot(g, grouping, out),
        Format::Pajek => write_pajek(g, out),
        Format::Vjson => write_vosviewer(g, grouping, out),
    }
}
