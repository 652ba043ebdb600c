use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceNode {
    /// DFS discovery number.
    pub id: usize,
    pub parent: Option<usize>,
    pub action: Option<String>,
    pub location: String,
    pub zone: String,
    /// Ancestor whose key matched, when this node was cut by Passed.
    pub cut_to: Option<usize>,
}

/// Exploration tree in discovery order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplorationTrace {
    pub nodes: Vec<TraceNode>,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl ExplorationTrace {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.parent.is_some()).count()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph exploration {\n  node [shape=box];\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  n{} [label=\"{} / {}\"];", n.id, escape(&n.location), escape(&n.zone));
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                let label = n.action.as_deref().unwrap_or("");
                let _ = writeln!(out, "  n{p} -> n{} [label=\"{}\"];", n.id, escape(label));
            }
        }
        for n in &self.nodes {
            if let Some(t) = n.cut_to {
                let _ = writeln!(out, "  n{} -> n{t} [style=dashed];", n.id);
            }
        }
        out.push_str("}\n");
        out
    }
}
