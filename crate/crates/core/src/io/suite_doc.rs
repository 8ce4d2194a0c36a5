use serde::{Deserialize, Serialize};

use crate::coverage::checklist::lookup;
use crate::coverage::{AnnotatedCase, AnnotatedStep, AnnotatedSuite, CoverageCriterion, CoveredPair};
use crate::generate::{AcoParams, Algorithm, GenerationConfig};
use crate::io::xml::{self, XmlWriter};
use crate::io::{check_schema_version, Format, IoError};
use crate::lcz::Threshold;
use crate::model::NodeId;
use crate::SCHEMA_VERSION;

/// Serialized suite text tagged with its format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteExport {
    pub format: Format,
    pub payload: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteJson {
    schema_version: String,
    generator: Algorithm,
    total_steps: usize,
    incomplete: bool,
    config_echo: GenerationConfig,
    test_cases: Vec<CaseJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseJson {
    test_case_id: String,
    covered_pairs: Vec<CoveredPair>,
    steps: Vec<StepJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    step_index: usize,
    node_id: NodeId,
    node_name: String,
    annotations: Vec<String>,
}

fn question_ids(step: &AnnotatedStep) -> Vec<String> {
    step.annotations.iter().map(|a| a.question_id.clone()).collect()
}

/// Serializes an annotated suite. CSV keeps one row per step and drops the
/// configuration echo and covered pairs, so it cannot be imported again.
pub fn export_suite(suite: &AnnotatedSuite, format: Format) -> SuiteExport {
    let payload = match format {
        Format::Json => export_json(suite),
        Format::Xml => export_xml(suite),
        Format::Csv => export_csv(suite),
    };
    SuiteExport { format, payload }
}

fn export_json(suite: &AnnotatedSuite) -> String {
    let dto = SuiteJson {
        schema_version: SCHEMA_VERSION.to_owned(),
        generator: suite.generator,
        total_steps: suite.total_steps,
        incomplete: suite.incomplete,
        config_echo: suite.config_echo.clone(),
        test_cases: suite
            .cases
            .iter()
            .map(|c| CaseJson {
                test_case_id: c.case_id.clone(),
                covered_pairs: c.covered_pairs.clone(),
                steps: c
                    .steps
                    .iter()
                    .enumerate()
                    .map(|(i, s)| StepJson {
                        step_index: i + 1,
                        node_id: s.node_id.clone(),
                        node_name: s.node_name.clone(),
                        annotations: question_ids(s),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&dto).expect("suite documents always serialize");
    text.push('\n');
    text
}

fn export_xml(suite: &AnnotatedSuite) -> String {
    let mut w = XmlWriter::new();
    w.start(
        "test-suite",
        &[
            ("schema_version", SCHEMA_VERSION.to_owned()),
            ("generator", suite.generator.as_str().to_owned()),
            ("total_steps", suite.total_steps.to_string()),
            ("incomplete", suite.incomplete.to_string()),
        ],
    );
    let cfg = &suite.config_echo;
    let mut attrs = vec![
        ("threshold", cfg.threshold.value().to_string()),
        ("criterion", cfg.criterion.as_str().to_owned()),
        ("algorithm", cfg.algorithm.as_str().to_owned()),
        ("seed", cfg.seed.to_string()),
    ];
    if let Some(cap) = cfg.walk_cap {
        attrs.push(("walk_cap", cap.to_string()));
    }
    w.start("config", &attrs);
    let a = &cfg.aco;
    w.empty(
        "aco",
        &[
            ("ants", a.ants.to_string()),
            ("alpha", a.alpha.to_string()),
            ("beta", a.beta.to_string()),
            ("evaporation", a.evaporation.to_string()),
            ("deposit", a.deposit.to_string()),
            ("max_iterations", a.max_iterations.to_string()),
        ],
    );
    w.end("config");
    for case in &suite.cases {
        w.start("test-case", &[("id", case.case_id.clone())]);
        for p in &case.covered_pairs {
            let mut attrs = vec![("zone", p.zone_id.to_string()), ("entry", p.entry.to_string())];
            if let Some(exit) = &p.exit {
                attrs.push(("exit", exit.to_string()));
            }
            w.empty("covered-pair", &attrs);
        }
        for (i, s) in case.steps.iter().enumerate() {
            w.empty(
                "step",
                &[
                    ("index", (i + 1).to_string()),
                    ("node_id", s.node_id.to_string()),
                    ("node_name", s.node_name.clone()),
                    ("annotations", question_ids(s).join(";")),
                ],
            );
        }
        w.end("test-case");
    }
    w.end("test-suite");
    w.finish()
}

fn export_csv(suite: &AnnotatedSuite) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["test_case_id", "step_index", "node_id", "node_name", "annotations"])
        .expect("in-memory write");
    for case in &suite.cases {
        for (i, s) in case.steps.iter().enumerate() {
            w.write_record([
                case.case_id.as_str(),
                &(i + 1).to_string(),
                s.node_id.0.as_str(),
                s.node_name.as_str(),
                &question_ids(s).join(";"),
            ])
            .expect("in-memory write");
        }
    }
    let bytes = w.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("csv output of utf-8 fields is utf-8")
}

/// Parses a JSON or XML suite export back into an annotated suite.
pub fn import_suite(text: &str, format: Format) -> Result<AnnotatedSuite, IoError> {
    let suite = match format {
        Format::Json => import_json(text)?,
        Format::Xml => import_xml(text)?,
        Format::Csv => return Err(IoError::Unsupported("CSV suite exports are write-only".into())),
    };
    let steps: usize = suite.cases.iter().map(|c| c.steps.len().saturating_sub(1)).sum();
    if steps != suite.total_steps {
        return Err(IoError::schema(
            "total_steps",
            format!("declared {} but the cases contain {steps}", suite.total_steps),
        ));
    }
    Ok(suite)
}

fn step(case_id: &str, index: usize, expected: usize, node_id: NodeId, node_name: String, ids: &[&str]) -> Result<AnnotatedStep, IoError> {
    let locus = || format!("test case {case_id}, step {index}");
    if index != expected {
        return Err(IoError::schema(locus(), format!("expected step_index {expected}")));
    }
    let annotations = ids
        .iter()
        .map(|id| lookup(id).ok_or_else(|| IoError::schema(locus(), format!("unknown question id '{id}'"))))
        .collect::<Result<_, _>>()?;
    Ok(AnnotatedStep {
        node_id,
        node_name,
        annotations,
    })
}

fn import_json(text: &str) -> Result<AnnotatedSuite, IoError> {
    let doc: SuiteJson = serde_json::from_str(text).map_err(IoError::from_json)?;
    check_schema_version(&doc.schema_version)?;
    let cases = doc
        .test_cases
        .into_iter()
        .map(|c| {
            let steps = c
                .steps
                .into_iter()
                .enumerate()
                .map(|(i, s)| {
                    let ids: Vec<&str> = s.annotations.iter().map(String::as_str).collect();
                    step(&c.test_case_id, s.step_index, i + 1, s.node_id, s.node_name, &ids)
                })
                .collect::<Result<_, _>>()?;
            Ok(AnnotatedCase {
                case_id: c.test_case_id,
                steps,
                covered_pairs: c.covered_pairs,
            })
        })
        .collect::<Result<_, IoError>>()?;
    Ok(AnnotatedSuite {
        generator: doc.generator,
        total_steps: doc.total_steps,
        incomplete: doc.incomplete,
        config_echo: doc.config_echo,
        cases,
    })
}

fn enum_attr<T>(node: roxmltree::Node<'_, '_>, name: &str, parse: fn(&str) -> Option<T>) -> Result<T, IoError> {
    let raw = xml::attr(node, name)?;
    parse(raw).ok_or_else(|| IoError::schema(xml::locus(node), format!("unknown {name} '{raw}'")))
}

fn import_xml(text: &str) -> Result<AnnotatedSuite, IoError> {
    let doc = xml::parse(text)?;
    let root = xml::expect_root(&doc, "test-suite")?;
    check_schema_version(xml::attr(root, "schema_version")?)?;
    xml::only_children(root, &["config", "test-case"])?;

    let config = xml::children(root)
        .find(|c| c.has_tag_name("config"))
        .ok_or_else(|| IoError::schema(xml::locus(root), "missing <config>"))?;
    xml::only_children(config, &["aco"])?;
    let threshold: f64 = xml::parse_attr(config, "threshold")?;
    let threshold = Threshold::new(threshold).map_err(|e| IoError::schema(xml::locus(config), e.to_string()))?;
    let aco = match xml::children(config).next() {
        Some(a) => AcoParams {
            ants: xml::parse_attr(a, "ants")?,
            alpha: xml::parse_attr(a, "alpha")?,
            beta: xml::parse_attr(a, "beta")?,
            evaporation: xml::parse_attr(a, "evaporation")?,
            deposit: xml::parse_attr(a, "deposit")?,
            max_iterations: xml::parse_attr(a, "max_iterations")?,
        },
        None => AcoParams::default(),
    };
    let config_echo = GenerationConfig {
        threshold,
        criterion: enum_attr(config, "criterion", CoverageCriterion::parse)?,
        algorithm: enum_attr(config, "algorithm", Algorithm::parse)?,
        seed: xml::parse_attr(config, "seed")?,
        aco,
        walk_cap: match config.attribute("walk_cap") {
            Some(_) => Some(xml::parse_attr(config, "walk_cap")?),
            None => None,
        },
    };

    let mut cases = Vec::new();
    for c in xml::children(root).filter(|c| c.has_tag_name("test-case")) {
        xml::only_children(c, &["covered-pair", "step"])?;
        let case_id = xml::attr(c, "id")?.to_owned();
        let mut covered_pairs = Vec::new();
        let mut steps = Vec::new();
        for child in xml::children(c) {
            if child.has_tag_name("covered-pair") {
                covered_pairs.push(CoveredPair {
                    zone_id: xml::parse_attr(child, "zone")?,
                    entry: NodeId(xml::attr(child, "entry")?.to_owned()),
                    exit: child.attribute("exit").map(|e| NodeId(e.to_owned())),
                });
            } else {
                let ids: Vec<&str> = xml::attr(child, "annotations")?
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .collect();
                steps.push(step(
                    &case_id,
                    xml::parse_attr(child, "index")?,
                    steps.len() + 1,
                    NodeId(xml::attr(child, "node_id")?.to_owned()),
                    xml::attr(child, "node_name")?.to_owned(),
                    &ids,
                )?);
            }
        }
        cases.push(AnnotatedCase {
            case_id,
            steps,
            covered_pairs,
        });
    }
    Ok(AnnotatedSuite {
        generator: enum_attr(root, "generator", Algorithm::parse)?,
        total_steps: xml::parse_attr(root, "total_steps")?,
        incomplete: xml::parse_attr(root, "incomplete")?,
        config_echo,
        cases,
    })
}
