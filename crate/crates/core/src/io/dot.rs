use std::collections::BTreeSet;
use std::fmt::Write;

use crate::generate::TestSuite;
use crate::lcz::LczReport;
use crate::model::{NodeId, NodeKind, ProcessModel, ProcessNode};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

struct Styler<'a> {
    report: &'a LczReport,
    members: BTreeSet<&'a NodeId>,
    walked_nodes: BTreeSet<&'a NodeId>,
}

impl Styler<'_> {
    fn node(&self, node: &ProcessNode) -> String {
        let id = &node.id;
        let mut styles = vec!["rounded"];
        let mut attrs = vec![format!("label={}", quote(&node.name))];
        let fill = if self.report.is_entry(id) {
            Some("yellow")
        } else if self.report.is_exit(id) {
            Some("lightblue")
        } else if node.kind == NodeKind::Decision {
            Some("grey")
        } else {
            None
        };
        if let Some(fill) = fill {
            styles.push("filled");
            attrs.push(format!("fillcolor={fill}"));
        }
        if self.members.contains(id) {
            attrs.push("color=red".into());
        }
        if self.walked_nodes.contains(id) {
            styles.push("bold");
            attrs.push("penwidth=3".into());
        } else if self.members.contains(id) {
            attrs.push("penwidth=2".into());
        }
        attrs.insert(1, format!("style={}", quote(&styles.join(","))));
        format!("{} [{}];", quote(&id.0), attrs.join(", "))
    }
}

/// Renders the model as Graphviz DOT with zones drawn as red clusters.
///
/// Entries are filled yellow, exits light blue and other decision nodes grey.
/// Nodes and transitions walked by `suite` are drawn bold. Nodes and edges
/// are emitted in id order so the output is stable.
pub fn render_dot(model: &ProcessModel, report: &LczReport, suite: Option<&TestSuite>) -> String {
    let mut walked_nodes = BTreeSet::new();
    let mut walked_edges = BTreeSet::new();
    for case in suite.map(|s| s.cases.as_slice()).unwrap_or_default() {
        walked_nodes.extend(case.steps.iter());
        walked_edges.extend(case.steps.windows(2).map(|w| (&w[0], &w[1])));
    }
    let styler = Styler {
        report,
        members: report.zones.iter().flat_map(|z| z.members.iter()).collect(),
        walked_nodes,
    };
    let mut nodes: Vec<&ProcessNode> = model.nodes().iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));

    let mut out = String::new();
    out.push_str("digraph process {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box, style=rounded];\n");
    for zone in &report.zones {
        let _ = writeln!(out, "  subgraph cluster_lcz{} {{", zone.zone_id);
        let _ = writeln!(out, "    label=\"LCZ {}\";", zone.zone_id);
        out.push_str("    style=dashed;\n    color=red;\n");
        for node in nodes.iter().filter(|n| zone.contains(&n.id)) {
            let _ = writeln!(out, "    {}", styler.node(node));
        }
        out.push_str("  }\n");
    }
    for node in nodes.iter().filter(|n| !styler.members.contains(&n.id)) {
        let _ = writeln!(out, "  {}", styler.node(node));
    }

    let mut edges: Vec<_> = model.transitions().iter().collect();
    edges.sort_by(|a, b| (&a.from, &a.to, &a.label).cmp(&(&b.from, &b.to, &b.label)));
    for t in edges {
        let mut attrs = Vec::new();
        if let Some(label) = &t.label {
            attrs.push(format!("label={}", quote(label)));
        }
        if walked_edges.contains(&(&t.from, &t.to)) {
            attrs.push("style=bold".into());
            attrs.push("penwidth=3".into());
        }
        let _ = write!(out, "  {} -> {}", quote(&t.from.0), quote(&t.to.0));
        if !attrs.is_empty() {
            let _ = write!(out, " [{}]", attrs.join(", "));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}
