//! Service descriptions: the parsed shape of a WSDL document and the
//! flattening of parameter trees into word sentences.

pub mod parser;

use crate::text::tokenize_identifier;

pub use parser::{parse_wsdl, parse_wsdl_file, parse_wsdl_with, ParseOptions, WsdlError};

/// A web service reduced to what similarity scoring needs: a name and its
/// operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceDescription {
    pub name: String,
    pub operations: Vec<OperationDef>,
    /// Where the description came from, when known (file path or URI).
    pub source_uri: Option<String>,
}

/// One operation with its input and output parameter trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationDef {
    pub name: String,
    pub input: ParamTree,
    pub output: ParamTree,
}

/// A parameter tree. The root names the message (or its wrapper element) and
/// acts purely as a container: flattening excludes it from every sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamTree {
    pub name: String,
    pub children: Vec<ParamNode>,
}

/// A named node inside a parameter tree; leaves are the actual parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamNode {
    pub name: String,
    pub children: Vec<ParamNode>,
}

impl ParamTree {
    pub fn empty() -> Self {
        Self::default()
    }

    /// True when the message carries no parameters at all.
    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }
}

impl ParamNode {
    pub fn leaf(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            children: Vec::new(),
        }
    }

    pub fn branch(name: impl Into<String>, children: Vec<ParamNode>) -> Self {
        Self {
            name: name.into(),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// One root-to-leaf path rendered as words.
pub type Sentence = Vec<String>;

/// The sentences obtained by flattening a parameter tree: one per
/// root-to-leaf path, deduplicated, in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlattenedParamSet {
    pub sentences: Vec<Sentence>,
}

impl FlattenedParamSet {
    /// Walks every root-to-leaf path of `tree`, tokenizing each node name
    /// along the way into one concatenated sentence. The root is skipped, so
    /// wrapper names never contribute words. Paths whose names tokenize to
    /// nothing are dropped, and duplicate sentences are kept once.
    pub fn from_tree(tree: &ParamTree) -> Self {
        let mut sentences = Vec::new();
        let mut path = Vec::new();
        for child in &tree.children {
            walk(child, &mut path, &mut sentences);
        }
        let mut seen = std::collections::HashSet::new();
        sentences.retain(|s: &Sentence| seen.insert(s.clone()));
        Self { sentences }
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }
}

fn walk(node: &ParamNode, path: &mut Sentence, out: &mut Vec<Sentence>) {
    let tokens = tokenize_identifier(&node.name);
    let added = tokens.len();
    path.extend(tokens);
    if node.children.is_empty() {
        if !path.is_empty() {
            out.push(path.clone());
        }
    } else {
        for child in &node.children {
            walk(child, path, out);
        }
    }
    path.truncate(path.len() - added);
}
