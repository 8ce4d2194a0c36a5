//! Minimal XML helpers: a roxmltree front end that maps errors onto
//! [`IoError`], and an escaping writer for the documents we emit.

use std::fmt::Write;

use roxmltree::{Document, Node};

use crate::io::IoError;

pub(crate) fn parse(text: &str) -> Result<Document<'_>, IoError> {
    Document::parse(text).map_err(|e| {
        let pos = e.pos();
        IoError::Parse {
            line: pos.row as usize,
            column: pos.col as usize,
            message: e.to_string(),
        }
    })
}

pub(crate) fn locus(node: Node<'_, '_>) -> String {
    let pos = node.document().text_pos_at(node.range().start);
    format!("<{}> at line {}", node.tag_name().name(), pos.row)
}

pub(crate) fn expect_root<'a, 'i>(doc: &'a Document<'i>, name: &str) -> Result<Node<'a, 'i>, IoError> {
    let root = doc.root_element();
    if root.tag_name().name() == name {
        Ok(root)
    } else {
        Err(IoError::schema(locus(root), format!("expected root element <{name}>")))
    }
}

pub(crate) fn attr<'a>(node: Node<'a, '_>, name: &str) -> Result<&'a str, IoError> {
    node.attribute(name)
        .ok_or_else(|| IoError::schema(locus(node), format!("missing attribute '{name}'")))
}

pub(crate) fn parse_attr<T: std::str::FromStr>(node: Node<'_, '_>, name: &str) -> Result<T, IoError> {
    let raw = attr(node, name)?;
    raw.parse()
        .map_err(|_| IoError::schema(locus(node), format!("attribute '{name}' has invalid value '{raw}'")))
}

pub(crate) fn children<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|c| c.is_element())
}

/// Rejects child elements outside `allowed`.
pub(crate) fn only_children(node: Node<'_, '_>, allowed: &[&str]) -> Result<(), IoError> {
    for c in children(node) {
        if !allowed.contains(&c.tag_name().name()) {
            return Err(IoError::schema(locus(c), "unexpected element"));
        }
    }
    Ok(())
}

pub(crate) fn escape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for ch in raw.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

/// Line-oriented writer with two-space indentation.
pub(crate) struct XmlWriter {
    out: String,
    depth: usize,
}

impl XmlWriter {
    pub fn new() -> Self {
        XmlWriter {
            out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
            depth: 0,
        }
    }

    fn open_tag(&mut self, name: &str, attrs: &[(&str, String)]) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {k}=\"{}\"", escape(v));
        }
    }

    pub fn start(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.open_tag(name, attrs);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    pub fn empty(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.open_tag(name, attrs);
        self.out.push_str("/>\n");
    }

    pub fn end(&mut self, name: &str) {
        self.depth -= 1;
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        let _ = writeln!(self.out, "</{name}>");
    }

    pub fn finish(self) -> String {
        self.out
    }
}
