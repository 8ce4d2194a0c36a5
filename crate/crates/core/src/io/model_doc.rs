use serde::{Deserialize, Serialize};

use crate::io::xml::{self, XmlWriter};
use crate::io::{check_schema_version, Format, IoError};
use crate::model::{NodeId, NodeKind, ProcessModel, ProcessNode, Transition};
use crate::SCHEMA_VERSION;

/// Versioned envelope around a process model.
///
/// `layout` holds editor presentation data (node positions); it is carried
/// through JSON untouched and ignored by every analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub schema_version: String,
    pub model: ProcessModel,
    pub layout: Option<serde_json::Value>,
}

impl ModelDocument {
    pub fn new(model: ProcessModel) -> Self {
        ModelDocument {
            schema_version: SCHEMA_VERSION.to_owned(),
            model,
            layout: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentJson {
    schema_version: String,
    model: ModelJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    start: String,
    ends: Vec<String>,
    nodes: Vec<NodeJson>,
    transitions: Vec<TransitionJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeJson {
    id: String,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    kind: Option<NodeKind>,
    outage_probability: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionJson {
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

/// Raw node fields before kinds are resolved.
struct NodeDraft {
    id: String,
    name: Option<String>,
    kind: Option<NodeKind>,
    outage_probability: f64,
}

fn assemble(
    drafts: Vec<NodeDraft>,
    transitions: Vec<Transition>,
    start: String,
    ends: Vec<String>,
) -> Result<ProcessModel, IoError> {
    for d in &drafts {
        if !(0.0..=1.0).contains(&d.outage_probability) {
            return Err(IoError::schema(
                format!("node '{}'", d.id),
                format!("outage_probability {} is outside [0, 1]", d.outage_probability),
            ));
        }
    }
    let ends: Vec<NodeId> = ends.into_iter().map(NodeId).collect();
    let nodes: Vec<ProcessNode> = drafts
        .iter()
        .map(|d| ProcessNode {
            id: NodeId(d.id.clone()),
            name: d.name.clone().unwrap_or_else(|| d.id.clone()),
            kind: d.kind.unwrap_or(NodeKind::Action),
            outage_probability: d.outage_probability,
        })
        .collect();
    if drafts.iter().all(|d| d.kind.is_some()) {
        return Ok(ProcessModel::new(nodes, transitions, start, ends));
    }
    // missing kinds are derived from out-degree
    let probe = ProcessModel::new(nodes.clone(), transitions.clone(), start.as_str(), ends.clone());
    let nodes = nodes
        .into_iter()
        .zip(&drafts)
        .enumerate()
        .map(|(i, (mut node, d))| {
            if d.kind.is_none() && probe.index_of(&node.id) == Some(i) {
                node.kind = probe.derived_kind(i);
            }
            node
        })
        .collect();
    Ok(ProcessModel::new(nodes, transitions, start, ends))
}

pub fn parse_model(text: &str, format: Format) -> Result<ProcessModel, IoError> {
    parse_model_document(text, format).map(|d| d.model)
}

/// Parses a model document. Structural validation is left to [`crate::model::validate`].
pub fn parse_model_document(text: &str, format: Format) -> Result<ModelDocument, IoError> {
    match format {
        Format::Json => parse_json(text),
        Format::Xml => parse_xml(text),
        Format::Csv => Err(IoError::Unsupported("models cannot be read from CSV".into())),
    }
}

fn parse_json(text: &str) -> Result<ModelDocument, IoError> {
    let doc: DocumentJson = serde_json::from_str(text).map_err(IoError::from_json)?;
    check_schema_version(&doc.schema_version)?;
    let m = doc.model;
    let drafts = m
        .nodes
        .into_iter()
        .map(|n| NodeDraft {
            id: n.id,
            name: n.name,
            kind: n.kind,
            outage_probability: n.outage_probability,
        })
        .collect();
    let transitions = m
        .transitions
        .into_iter()
        .map(|t| Transition {
            from: NodeId(t.from),
            to: NodeId(t.to),
            label: t.label,
        })
        .collect();
    Ok(ModelDocument {
        schema_version: doc.schema_version,
        model: assemble(drafts, transitions, m.start, m.ends)?,
        layout: doc.layout,
    })
}

fn parse_xml(text: &str) -> Result<ModelDocument, IoError> {
    let doc = xml::parse(text)?;
    let root = xml::expect_root(&doc, "process-model")?;
    let version = xml::attr(root, "schema_version")?;
    check_schema_version(version)?;
    let start = xml::attr(root, "start")?.to_owned();
    xml::only_children(root, &["node", "transition", "end"])?;

    let mut drafts = Vec::new();
    let mut transitions = Vec::new();
    let mut ends = Vec::new();
    for child in xml::children(root) {
        match child.tag_name().name() {
            "node" => {
                let kind = match child.attribute("kind") {
                    None => None,
                    Some(k) => Some(NodeKind::parse(k).ok_or_else(|| {
                        IoError::schema(xml::locus(child), format!("unknown node kind '{k}'"))
                    })?),
                };
                drafts.push(NodeDraft {
                    id: xml::attr(child, "id")?.to_owned(),
                    name: child.attribute("name").map(str::to_owned),
                    kind,
                    outage_probability: xml::parse_attr(child, "outage_probability")?,
                });
            }
            "transition" => transitions.push(Transition {
                from: NodeId(xml::attr(child, "from")?.to_owned()),
                to: NodeId(xml::attr(child, "to")?.to_owned()),
                label: child.attribute("label").map(str::to_owned),
            }),
            _ => ends.push(xml::attr(child, "id")?.to_owned()),
        }
    }
    Ok(ModelDocument {
        schema_version: version.to_owned(),
        model: assemble(drafts, transitions, start, ends)?,
        layout: None,
    })
}

pub fn emit_model(model: &ProcessModel, format: Format) -> Result<String, IoError> {
    emit_model_document(&ModelDocument::new(model.clone()), format)
}

/// Canonical text for a model document; parsing it back yields an equal document.
pub fn emit_model_document(doc: &ModelDocument, format: Format) -> Result<String, IoError> {
    let m = &doc.model;
    match format {
        Format::Json => {
            let dto = DocumentJson {
                schema_version: doc.schema_version.clone(),
                model: ModelJson {
                    start: m.start().to_string(),
                    ends: m.ends().iter().map(|e| e.to_string()).collect(),
                    nodes: m
                        .nodes()
                        .iter()
                        .map(|n| NodeJson {
                            id: n.id.to_string(),
                            name: Some(n.name.clone()),
                            kind: Some(n.kind),
                            outage_probability: n.outage_probability,
                        })
                        .collect(),
                    transitions: m
                        .transitions()
                        .iter()
                        .map(|t| TransitionJson {
                            from: t.from.to_string(),
                            to: t.to.to_string(),
                            label: t.label.clone(),
                        })
                        .collect(),
                },
                layout: doc.layout.clone(),
            };
            let mut text = serde_json::to_string_pretty(&dto).map_err(IoError::from_json)?;
            text.push('\n');
            Ok(text)
        }
        Format::Xml => {
            let mut w = XmlWriter::new();
            w.start(
                "process-model",
                &[("schema_version", doc.schema_version.clone()), ("start", m.start().to_string())],
            );
            for n in m.nodes() {
                w.empty(
                    "node",
                    &[
                        ("id", n.id.to_string()),
                        ("name", n.name.clone()),
                        ("kind", n.kind.as_str().to_owned()),
                        ("outage_probability", n.outage_probability.to_string()),
                    ],
                );
            }
            for t in m.transitions() {
                let mut attrs = vec![("from", t.from.to_string()), ("to", t.to.to_string())];
                if let Some(l) = &t.label {
                    attrs.push(("label", l.clone()));
                }
                w.empty("transition", &attrs);
            }
            for e in m.ends() {
                w.empty("end", &[("id", e.to_string())]);
            }
            w.end("process-model");
            Ok(w.finish())
        }
        Format::Csv => Err(IoError::Unsupported("models cannot be written as CSV".into())),
    }
}
