//! WSDL 1.1 parsing: portType operations, message parts, and enough of XML
//! Schema to turn message contents into parameter trees.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use roxmltree::{Document, Node};

use super::{OperationDef, ParamNode, ParamTree, ServiceDescription};

const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema";

#[derive(Debug, thiserror::Error)]
pub enum WsdlError {
    #[error("document is not well-formed XML: {0}")]
    MalformedXml(String),
    #[error("root element is not a WSDL definitions element")]
    NotWsdl,
    #[error("no operations found in any portType")]
    NoOperations,
    #[error("unresolvable reference {qname:?}")]
    UnresolvableTypeRef { qname: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Knobs for parsing. `base_dir` anchors relative `schemaLocation` /
/// `location` attributes; without it (or for non-local locations) imports
/// are skipped. `max_depth` bounds parameter tree depth so that recursive
/// schemas terminate: expansion past the limit truncates to a leaf.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub max_depth: usize,
    pub base_dir: Option<PathBuf>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            max_depth: 16,
            base_dir: None,
        }
    }
}

/// Parses a WSDL document from raw bytes with default options.
pub fn parse_wsdl(bytes: &[u8]) -> Result<ServiceDescription, WsdlError> {
    parse_wsdl_with(bytes, &ParseOptions::default())
}

/// Parses a WSDL file. Relative imports resolve against the file's
/// directory, and the file stem names the service when the document itself
/// does not.
pub fn parse_wsdl_file(path: &Path) -> Result<ServiceDescription, WsdlError> {
    let bytes = std::fs::read(path).map_err(|source| WsdlError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let options = ParseOptions {
        base_dir: path.parent().map(Path::to_path_buf),
        ..ParseOptions::default()
    };
    let mut service = parse_wsdl_with(&bytes, &options)?;
    if service.name.is_empty() {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            service.name = stem.to_string();
        }
    }
    service.source_uri = Some(path.display().to_string());
    Ok(service)
}

/// Parses a WSDL document with explicit options.
pub fn parse_wsdl_with(
    bytes: &[u8],
    options: &ParseOptions,
) -> Result<ServiceDescription, WsdlError> {
    let main_text =
        String::from_utf8(bytes.to_vec()).map_err(|e| WsdlError::MalformedXml(e.to_string()))?;

    // Gather the transitive closure of local imports up front so every
    // document can be parsed into one arena and cross-referenced.
    let mut texts: Vec<(String, Option<PathBuf>)> = vec![(main_text, options.base_dir.clone())];
    let mut visited: HashSet<PathBuf> = HashSet::new();
    let mut cursor = 0;
    while cursor < texts.len() {
        let mut found: Vec<PathBuf> = Vec::new();
        {
            let (text, base) = &texts[cursor];
            let doc = Document::parse(text).map_err(|e| WsdlError::MalformedXml(e.to_string()))?;
            for node in doc.descendants().filter(Node::is_element) {
                let name = node.tag_name().name();
                if name != "import" && name != "include" {
                    continue;
                }
                let Some(location) = node
                    .attribute("schemaLocation")
                    .or_else(|| node.attribute("location"))
                else {
                    continue;
                };
                if location.contains("://") {
                    continue; // remote locations are out of scope
                }
                let Some(dir) = base.as_deref().or(options.base_dir.as_deref()) else {
                    continue;
                };
                let joined = dir.join(location);
                let canonical = joined.canonicalize().unwrap_or(joined);
                if visited.insert(canonical.clone()) {
                    found.push(canonical);
                }
            }
        }
        for path in found {
            let text = std::fs::read_to_string(&path).map_err(|source| WsdlError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let base = path.parent().map(Path::to_path_buf);
            texts.push((text, base));
        }
        cursor += 1;
    }

    let mut docs = Vec::with_capacity(texts.len());
    for (text, _) in &texts {
        docs.push(Document::parse(text).map_err(|e| WsdlError::MalformedXml(e.to_string()))?);
    }
    if docs[0].root_element().tag_name().name() != "definitions" {
        return Err(WsdlError::NotWsdl);
    }

    let mut schema = SchemaIndex::default();
    let mut messages: HashMap<String, Vec<PartDecl>> = HashMap::new();
    let mut ops: Vec<(String, Option<String>, Option<String>)> = Vec::new();
    let mut definitions_name = None;
    let mut service_name = None;

    for doc in &docs {
        let root = doc.root_element();
        match root.tag_name().name() {
            "definitions" => collect_definitions(
                root,
                &mut schema,
                &mut messages,
                &mut ops,
                &mut definitions_name,
                &mut service_name,
            ),
            "schema" => schema.collect(root),
            _ => {} // ignore unrelated imports
        }
    }

    if ops.is_empty() {
        return Err(WsdlError::NoOperations);
    }

    let resolver = Resolver {
        schema: &schema,
        max_depth: options.max_depth,
    };
    let mut operations = Vec::with_capacity(ops.len());
    for (name, input_msg, output_msg) in ops {
        operations.push(OperationDef {
            name,
            input: resolver.tree_for_message(input_msg.as_deref(), &messages)?,
            output: resolver.tree_for_message(output_msg.as_deref(), &messages)?,
        });
    }

    Ok(ServiceDescription {
        name: service_name.or(definitions_name).unwrap_or_default(),
        operations,
        source_uri: None,
    })
}

/// A message part: a name plus either an element reference or a type
/// reference (possibly neither, in degenerate documents).
struct PartDecl {
    name: String,
    element: Option<String>,
    type_ref: Option<TypeRef>,
}

enum TypeRef {
    /// A type in the XML Schema namespace; always a leaf.
    Builtin,
    /// A named type expected in some inlined schema.
    Named(String),
}

fn local_name(qname: &str) -> &str {
    qname.rsplit(':').next().unwrap_or(qname)
}

/// True when a QName-valued attribute points into the XML Schema namespace.
fn is_xsd_qname(scope: Node, qname: &str) -> bool {
    let prefix = qname.split_once(':').map(|(p, _)| p);
    scope.lookup_namespace_uri(prefix) == Some(XSD_NS)
}

fn collect_definitions<'a, 'input>(
    root: Node<'a, 'input>,
    schema: &mut SchemaIndex<'a, 'input>,
    messages: &mut HashMap<String, Vec<PartDecl>>,
    ops: &mut Vec<(String, Option<String>, Option<String>)>,
    definitions_name: &mut Option<String>,
    service_name: &mut Option<String>,
) {
    if definitions_name.is_none() {
        *definitions_name = root.attribute("name").map(str::to_string);
    }
    for child in root.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "types" => {
                for s in child.children().filter(|n| n.tag_name().name() == "schema") {
                    schema.collect(s);
                }
            }
            "message" => {
                let Some(name) = child.attribute("name") else {
                    continue;
                };
                let parts = child
                    .children()
                    .filter(|n| n.tag_name().name() == "part")
                    .map(|part| PartDecl {
                        name: part.attribute("name").unwrap_or_default().to_string(),
                        element: part.attribute("element").map(|q| local_name(q).to_string()),
                        type_ref: part.attribute("type").map(|q| {
                            if is_xsd_qname(part, q) {
                                TypeRef::Builtin
                            } else {
                                TypeRef::Named(local_name(q).to_string())
                            }
                        }),
                    })
                    .collect();
                messages.insert(name.to_string(), parts);
            }
            "portType" => {
                for op in child
                    .children()
                    .filter(|n| n.tag_name().name() == "operation")
                {
                    let Some(name) = op.attribute("name") else {
                        continue;
                    };
                    let msg_of = |kind: &str| {
                        op.children()
                            .find(|n| n.tag_name().name() == kind)
                            .and_then(|n| n.attribute("message"))
                            .map(|q| local_name(q).to_string())
                    };
                    ops.push((name.to_string(), msg_of("input"), msg_of("output")));
                }
            }
            "service" if service_name.is_none() => {
                *service_name = child.attribute("name").map(str::to_string);
            }
            _ => {}
        }
    }
}

/// Global schema declarations gathered from every inlined or imported schema,
/// keyed by local name.
#[derive(Default)]
struct SchemaIndex<'a, 'input> {
    elements: HashMap<String, Node<'a, 'input>>,
    types: HashMap<String, Node<'a, 'input>>,
}

impl<'a, 'input> SchemaIndex<'a, 'input> {
    fn collect(&mut self, schema: Node<'a, 'input>) {
        for child in schema.children().filter(Node::is_element) {
            let Some(name) = child.attribute("name") else {
                continue;
            };
            match child.tag_name().name() {
                "element" => {
                    self.elements.insert(name.to_string(), child);
                }
                "complexType" | "simpleType" => {
                    self.types.insert(name.to_string(), child);
                }
                _ => {}
            }
        }
    }
}

struct Resolver<'s, 'a, 'input> {
    schema: &'s SchemaIndex<'a, 'input>,
    max_depth: usize,
}

impl Resolver<'_, '_, '_> {
    fn tree_for_message(
        &self,
        message: Option<&str>,
        messages: &HashMap<String, Vec<PartDecl>>,
    ) -> Result<ParamTree, WsdlError> {
        let Some(message) = message else {
            return Ok(ParamTree::empty());
        };
        let parts = messages
            .get(message)
            .ok_or_else(|| WsdlError::UnresolvableTypeRef {
                qname: message.to_string(),
            })?;

        // Document/literal wrapping: a single element-referenced part whose
        // element has structure stands in for the whole message, so the
        // wrapper element becomes the (excluded) root.
        if let [part] = parts.as_slice() {
            if let Some(element) = &part.element {
                let node = self.global_element(element)?;
                let mut stack = Vec::new();
                let children = self.element_children(node, &mut stack)?;
                if !children.is_empty() {
                    return Ok(ParamTree {
                        name: element.clone(),
                        children,
                    });
                }
            }
        }

        let mut children = Vec::new();
        for part in parts {
            let mut stack = Vec::new();
            if let Some(element) = &part.element {
                let node = self.global_element(element)?;
                children.push(ParamNode {
                    name: element.clone(),
                    children: self.element_children(node, &mut stack)?,
                });
            } else {
                let grandchildren = match &part.type_ref {
                    Some(TypeRef::Named(type_name)) => {
                        self.named_type_children(type_name, &mut stack)?
                    }
                    Some(TypeRef::Builtin) | None => Vec::new(),
                };
                children.push(ParamNode {
                    name: part.name.clone(),
                    children: grandchildren,
                });
            }
        }
        Ok(ParamTree {
            name: message.to_string(),
            children,
        })
    }

    fn global_element(&self, name: &str) -> Result<Node<'_, '_>, WsdlError> {
        self.schema
            .elements
            .get(name)
            .copied()
            .ok_or_else(|| WsdlError::UnresolvableTypeRef {
                qname: name.to_string(),
            })
    }

    /// Children of an element declaration: empty for simple content, the
    /// expanded structure for complex content.
    fn element_children(
        &self,
        element: Node,
        stack: &mut Vec<String>,
    ) -> Result<Vec<ParamNode>, WsdlError> {
        if let Some(type_attr) = element.attribute("type") {
            if is_xsd_qname(element, type_attr) {
                return Ok(Vec::new());
            }
            return self.named_type_children(local_name(type_attr), stack);
        }
        for child in element.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "complexType" => return self.complex_type_children(child, stack),
                "simpleType" => return Ok(Vec::new()),
                _ => {}
            }
        }
        Ok(Vec::new())
    }

    /// Expands a named type reference, truncating on recursion or at the
    /// depth limit so that self-referential schemas still terminate.
    fn named_type_children(
        &self,
        name: &str,
        stack: &mut Vec<String>,
    ) -> Result<Vec<ParamNode>, WsdlError> {
        if stack.iter().any(|n| n == name) || stack.len() >= self.max_depth {
            return Ok(Vec::new());
        }
        let node =
            self.schema
                .types
                .get(name)
                .copied()
                .ok_or_else(|| WsdlError::UnresolvableTypeRef {
                    qname: name.to_string(),
                })?;
        if node.tag_name().name() == "simpleType" {
            return Ok(Vec::new());
        }
        stack.push(name.to_string());
        let children = self.complex_type_children(node, stack);
        stack.pop();
        children
    }

    /// Walks the content model of a complexType: sequences, alls and choices
    /// contribute their particles in document order, attributes become
    /// leaves, and extensions prepend their base type's structure.
    fn complex_type_children(
        &self,
        node: Node,
        stack: &mut Vec<String>,
    ) -> Result<Vec<ParamNode>, WsdlError> {
        let mut out = Vec::new();
        for child in node.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "sequence" | "all" | "choice" => {
                    out.extend(self.particle_children(child, stack)?);
                }
                "attribute" => {
                    if let Some(name) = child.attribute("name") {
                        out.push(ParamNode::leaf(name));
                    }
                }
                "complexContent" | "simpleContent" => {
                    for inner in child.children().filter(Node::is_element) {
                        let kind = inner.tag_name().name();
                        if kind != "extension" && kind != "restriction" {
                            continue;
                        }
                        if let Some(base) = inner.attribute("base") {
                            if !is_xsd_qname(inner, base) {
                                out.extend(self.named_type_children(local_name(base), stack)?);
                            }
                        }
                        out.extend(self.complex_type_children(inner, stack)?);
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    fn particle_children(
        &self,
        group: Node,
        stack: &mut Vec<String>,
    ) -> Result<Vec<ParamNode>, WsdlError> {
        let mut out = Vec::new();
        for child in group.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "element" => {
                    if let Some(name) = child.attribute("name") {
                        out.push(ParamNode {
                            name: name.to_string(),
                            children: self.element_children(child, stack)?,
                        });
                    } else if let Some(reference) = child.attribute("ref") {
                        let local = local_name(reference);
                        let node = self.global_element(local)?;
                        out.push(ParamNode {
                            name: local.to_string(),
                            children: self.element_children(node, stack)?,
                        });
                    }
                }
                "sequence" | "all" | "choice" => {
                    out.extend(self.particle_children(child, stack)?);
                }
                "any" => out.push(ParamNode::leaf("any")),
                _ => {}
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WRAPPED: &str = r#"<?xml version="1.0"?>
<definitions name="Weather"
    xmlns="http://schemas.xmlsoap.org/wsdl/"
    xmlns:xsd="http://www.w3.org/2001/XMLSchema"
    xmlns:tns="urn:weather"
    targetNamespace="urn:weather">
  <types>
    <xsd:schema targetNamespace="urn:weather">
      <xsd:element name="GetWeatherRequest">
        <xsd:complexType>
          <xsd:sequence>
            <xsd:element name="ZipCode" type="xsd:string"/>
            <xsd:element name="CountryCode" type="xsd:string"/>
          </xsd:sequence>
        </xsd:complexType>
      </xsd:element>
      <xsd:element name="GetWeatherResponse">
        <xsd:complexType>
          <xsd:sequence>
            <xsd:element name="Forecast" type="tns:Forecast"/>
          </xsd:sequence>
        </xsd:complexType>
      </xsd:element>
      <xsd:complexType name="Forecast">
        <xsd:sequence>
          <xsd:element name="Temperature" type="xsd:float"/>
          <xsd:element name="Humidity" type="xsd:float"/>
        </xsd:sequence>
      </xsd:complexType>
    </xsd:schema>
  </types>
  <message name="GetWeatherIn">
    <part name="parameters" element="tns:GetWeatherRequest"/>
  </message>
  <message name="GetWeatherOut">
    <part name="parameters" element="tns:GetWeatherResponse"/>
  </message>
  <portType name="WeatherPort">
    <operation name="GetWeather">
      <input message="tns:GetWeatherIn"/>
      <output message="tns:GetWeatherOut"/>
    </operation>
  </portType>
  <service name="WeatherService"/>
</definitions>"#;

    #[test]
    fn parses_wrapped_document_literal() {
        let service = parse_wsdl(WRAPPED.as_bytes()).unwrap();
        assert_eq!(service.name, "WeatherService");
        assert_eq!(service.operations.len(), 1);
        let op = &service.operations[0];
        assert_eq!(op.name, "GetWeather");
        // The wrapper element is the root; its fields are the children.
        assert_eq!(op.input.name, "GetWeatherRequest");
        assert_eq!(
            op.input.children,
            vec![ParamNode::leaf("ZipCode"), ParamNode::leaf("CountryCode")]
        );
        // Named complex types expand into nested nodes.
        assert_eq!(
            op.output.children,
            vec![ParamNode::branch(
                "Forecast",
                vec![ParamNode::leaf("Temperature"), ParamNode::leaf("Humidity")]
            )]
        );
    }

    #[test]
    fn parses_rpc_style_parts() {
        let text = r#"<definitions name="Calc"
            xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema"
            xmlns:tns="urn:calc">
          <message name="AddIn">
            <part name="lhs" type="xsd:int"/>
            <part name="rhs" type="xsd:int"/>
          </message>
          <portType name="CalcPort">
            <operation name="Add">
              <input message="tns:AddIn"/>
            </operation>
          </portType>
        </definitions>"#;
        let service = parse_wsdl(text.as_bytes()).unwrap();
        let op = &service.operations[0];
        assert_eq!(op.input.name, "AddIn");
        assert_eq!(
            op.input.children,
            vec![ParamNode::leaf("lhs"), ParamNode::leaf("rhs")]
        );
        // Missing output message means an empty tree, not an error.
        assert!(op.output.is_empty());
        assert_eq!(service.name, "Calc");
    }

    #[test]
    fn recursive_types_truncate_instead_of_looping() {
        let text = r#"<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
          <types>
            <xsd:schema>
              <xsd:complexType name="Tree">
                <xsd:sequence>
                  <xsd:element name="Value" type="xsd:string"/>
                  <xsd:element name="Child" type="tns:Tree"/>
                </xsd:sequence>
              </xsd:complexType>
            </xsd:schema>
          </types>
          <message name="In"><part name="node" type="tns:Tree"/></message>
          <portType name="P">
            <operation name="Walk"><input message="tns:In"/></operation>
          </portType>
        </definitions>"#;
        let service = parse_wsdl(text.as_bytes()).unwrap();
        let input = &service.operations[0].input;
        let node = &input.children[0];
        assert_eq!(node.name, "node");
        assert_eq!(node.children[0], ParamNode::leaf("Value"));
        // The self-reference became a leaf rather than recursing.
        assert_eq!(node.children[1], ParamNode::leaf("Child"));
    }

    #[test]
    fn extension_includes_base_fields() {
        let text = r#"<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
          <types>
            <xsd:schema>
              <xsd:complexType name="Base">
                <xsd:sequence><xsd:element name="Id" type="xsd:int"/></xsd:sequence>
              </xsd:complexType>
              <xsd:complexType name="Derived">
                <xsd:complexContent>
                  <xsd:extension base="tns:Base">
                    <xsd:sequence><xsd:element name="Extra" type="xsd:string"/></xsd:sequence>
                  </xsd:extension>
                </xsd:complexContent>
              </xsd:complexType>
            </xsd:schema>
          </types>
          <message name="In"><part name="payload" type="tns:Derived"/></message>
          <portType name="P">
            <operation name="Put"><input message="tns:In"/></operation>
          </portType>
        </definitions>"#;
        let service = parse_wsdl(text.as_bytes()).unwrap();
        let payload = &service.operations[0].input.children[0];
        assert_eq!(
            payload.children,
            vec![ParamNode::leaf("Id"), ParamNode::leaf("Extra")]
        );
    }

    #[test]
    fn rejects_non_wsdl_documents() {
        let err = parse_wsdl(b"<html><body/></html>").unwrap_err();
        assert!(matches!(err, WsdlError::NotWsdl));
        let err = parse_wsdl(b"not xml at all <<<").unwrap_err();
        assert!(matches!(err, WsdlError::MalformedXml(_)));
    }

    #[test]
    fn rejects_definitions_without_operations() {
        let text = r#"<definitions xmlns="http://schemas.xmlsoap.org/wsdl/">
          <portType name="Empty"/>
        </definitions>"#;
        assert!(matches!(
            parse_wsdl(text.as_bytes()).unwrap_err(),
            WsdlError::NoOperations
        ));
    }

    #[test]
    fn reports_unresolvable_references() {
        let text = r#"<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:tns="urn:t">
          <message name="In"><part name="p" element="tns:Missing"/></message>
          <portType name="P">
            <operation name="Go"><input message="tns:In"/></operation>
          </portType>
        </definitions>"#;
        match parse_wsdl(text.as_bytes()).unwrap_err() {
            WsdlError::UnresolvableTypeRef { qname } => assert_eq!(qname, "Missing"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn single_simple_element_part_stays_a_parameter() {
        // A lone element part with simple content must not collapse away.
        let text = r#"<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
          <types>
            <xsd:schema>
              <xsd:element name="ZipCode" type="xsd:string"/>
            </xsd:schema>
          </types>
          <message name="In"><part name="p" element="tns:ZipCode"/></message>
          <portType name="P">
            <operation name="Lookup"><input message="tns:In"/></operation>
          </portType>
        </definitions>"#;
        let service = parse_wsdl(text.as_bytes()).unwrap();
        let input = &service.operations[0].input;
        assert_eq!(input.name, "In");
        assert_eq!(input.children, vec![ParamNode::leaf("ZipCode")]);
    }

    #[test]
    fn follows_local_schema_imports() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("types.xsd"),
            r#"<xsd:schema xmlns:xsd="http://www.w3.org/2001/XMLSchema">
              <xsd:element name="Payload">
                <xsd:complexType>
                  <xsd:sequence><xsd:element name="Body" type="xsd:string"/></xsd:sequence>
                </xsd:complexType>
              </xsd:element>
            </xsd:schema>"#,
        )
        .unwrap();
        let wsdl_path = dir.path().join("svc.wsdl");
        std::fs::write(
            &wsdl_path,
            r#"<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
                xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
              <types>
                <xsd:schema>
                  <xsd:import schemaLocation="types.xsd"/>
                </xsd:schema>
              </types>
              <message name="In"><part name="p" element="tns:Payload"/></message>
              <portType name="P">
                <operation name="Send"><input message="tns:In"/></operation>
              </portType>
            </definitions>"#,
        )
        .unwrap();
        let service = parse_wsdl_file(&wsdl_path).unwrap();
        assert_eq!(service.name, "svc");
        assert_eq!(
            service.operations[0].input.children,
            vec![ParamNode::leaf("Body")]
        );
        assert_eq!(service.operations[0].input.name, "Payload");
    }
}
