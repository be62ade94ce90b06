use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grammatical role of a token in a MOF name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Topology,
    Node,
    Edge,
}

impl Role {
    pub const ORDER: [Role; 3] = [Role::Topology, Role::Node, Role::Edge];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Topology => "topology",
            Role::Node => "node",
            Role::Edge => "edge",
        }
    }
}

/// A MOF written as `topology node edge`, e.g. `pcu N248 E220`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct MofName {
    pub topology: String,
    pub node: String,
    pub edge: String,
}

impl MofName {
    pub fn new(topology: impl Into<String>, node: impl Into<String>, edge: impl Into<String>) -> Self {
        Self {
            topology: topology.into(),
            node: node.into(),
            edge: edge.into(),
        }
    }

    /// Tokens in role order.
    pub fn tokens(&self) -> [&str; 3] {
        [&self.topology, &self.node, &self.edge]
    }
}

impl fmt::Display for MofName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.topology, self.node, self.edge)
    }
}

impl From<MofName> for String {
    fn from(m: MofName) -> String {
        m.to_string()
    }
}

/// Syntactic parse only; use [`parse_mof_name`] to check against a vocabulary.
impl TryFrom<String> for MofName {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for MofName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        match tokens.as_slice() {
            [t, n, e] => Ok(MofName::new(*t, *n, *e)),
            other => Err(Error::TokenCount(other.len())),
        }
    }
}

/// Building-block tokens available to each role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub topologies: Vec<String>,
    pub nodes: Vec<String>,
    pub edges: Vec<String>,
}

/// Metal-cluster nodes of the default library.
pub const DEFAULT_NODES: [&str; 10] = [
    "N106", "N123", "N139", "N144", "N155", "N173", "N205", "N248", "N394", "N505",
];

/// Organic-ligand edges of the default library.
pub const DEFAULT_EDGES: [&str; 15] = [
    "E2", "E5", "E9", "E11", "E14", "E21", "E35", "E43", "E56", "E70", "E88", "E102", "E167",
    "E220", "E229",
];

impl Default for Vocabulary {
    /// One `pcu` topology, 10 nodes and 15 edges.
    fn default() -> Self {
        Self {
            topologies: vec!["pcu".to_string()],
            nodes: DEFAULT_NODES.iter().map(|s| s.to_string()).collect(),
            edges: DEFAULT_EDGES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Vocabulary {
    /// Builds and validates a vocabulary.
    pub fn new<S: Into<String>>(
        topologies: impl IntoIterator<Item = S>,
        nodes: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let v = Self {
            topologies: topologies.into_iter().map(Into::into).collect(),
            nodes: nodes.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().map(Into::into).collect(),
        };
        v.validate()?;
        Ok(v)
    }

    /// Lists must be nonempty, tokens unique and roles disjoint.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for role in Role::ORDER {
            let list = self.tokens(role);
            if list.is_empty() {
                return Err(Error::InvalidVocabulary(format!("no {} tokens", role.as_str())));
            }
            for t in list {
                if t.is_empty() || t.chars().any(char::is_whitespace) {
                    return Err(Error::InvalidVocabulary(format!("bad token `{t}`")));
                }
                if t.starts_with('<') {
                    return Err(Error::InvalidVocabulary(format!(
                        "token `{t}` uses the reserved `<` prefix"
                    )));
                }
                if !seen.insert(t.as_str()) {
                    return Err(Error::InvalidVocabulary(format!("duplicate token `{t}`")));
                }
            }
        }
        Ok(())
    }

    pub fn tokens(&self, role: Role) -> &[String] {
        match role {
            Role::Topology => &self.topologies,
            Role::Node => &self.nodes,
            Role::Edge => &self.edges,
        }
    }

    pub fn role_of(&self, token: &str) -> Option<Role> {
        Role::ORDER
            .into_iter()
            .find(|&r| self.tokens(r).iter().any(|t| t == token))
    }

    /// All tokens, topologies first.
    pub fn all_tokens(&self) -> impl Iterator<Item = &String> {
        self.topologies.iter().chain(&self.nodes).chain(&self.edges)
    }

    pub fn len(&self) -> usize {
        self.topologies.len() + self.nodes.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every (topology, node, edge) combination, in list order.
    pub fn combinations(&self) -> Vec<MofName> {
        let mut out = Vec::with_capacity(self.topologies.len() * self.nodes.len() * self.edges.len());
        for t in &self.topologies {
            for n in &self.nodes {
                for e in &self.edges {
                    out.push(MofName::new(t, n, e));
                }
            }
        }
        out
    }

    /// Checks that every token of `mof` belongs to its role.
    pub fn check(&self, mof: &MofName) -> Result<()> {
        for (token, expected) in mof.tokens().into_iter().zip(Role::ORDER) {
            match self.role_of(token) {
                None => return Err(Error::UnknownToken(token.to_string())),
                Some(found) if found != expected => {
                    return Err(Error::RoleOrder {
                        token: token.to_string(),
                        expected: expected.as_str(),
                        found: found.as_str(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// Parses `topology node edge` and validates every token against `vocab`.
pub fn parse_mof_name(text: &str, vocab: &Vocabulary) -> Result<MofName> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    // Unknown tokens and misplaced roles are reported before a count
    // mismatch, so "pcu N123 N106 E70" names the offending node.
    for (i, token) in tokens.iter().enumerate() {
        let found = vocab
            .role_of(token)
            .ok_or_else(|| Error::UnknownToken(token.to_string()))?;
        if let Some(&expected) = Role::ORDER.get(i) {
            if found != expected {
                return Err(Error::RoleOrder {
                    token: token.to_string(),
                    expected: expected.as_str(),
                    found: found.as_str(),
                });
            }
        }
    }
    match tokens.as_slice() {
        [t, n, e] => Ok(MofName::new(*t, *n, *e)),
        other => Err(Error::TokenCount(other.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_vocabulary_shape() {
        let v = Vocabulary::default();
        v.validate().unwrap();
        assert_eq!((v.topologies.len(), v.nodes.len(), v.edges.len()), (1, 10, 15));
        assert_eq!(v.combinations().len(), 150);
    }

    #[test]
    fn parses_canonical_name() {
        let v = Vocabulary::default();
        let m = parse_mof_name("pcu N248 E220", &v).unwrap();
        assert_eq!(m, MofName::new("pcu", "N248", "E220"));
        assert_eq!(m.to_string(), "pcu N248 E220");
    }

    #[test]
    fn mixed_metal_is_a_role_error() {
        let v = Vocabulary::default();
        let err = parse_mof_name("pcu N123 N106 E70", &v).unwrap_err();
        assert!(matches!(err, Error::RoleOrder { ref token, .. } if token == "N106"), "{err}");
    }

    #[test]
    fn empty_input_is_a_count_error() {
        let v = Vocabulary::default();
        assert!(matches!(parse_mof_name("", &v), Err(Error::TokenCount(0))));
        assert!(matches!(parse_mof_name("pcu N248", &v), Err(Error::TokenCount(2))));
    }

    #[test]
    fn unknown_and_swapped_tokens() {
        let v = Vocabulary::default();
        assert!(matches!(parse_mof_name("pcu N999 E9", &v), Err(Error::UnknownToken(_))));
        assert!(matches!(parse_mof_name("pcu E9 N248", &v), Err(Error::RoleOrder { .. })));
    }

    #[test]
    fn vocabulary_rejects_overlap_and_duplicates() {
        assert!(Vocabulary::new(["pcu"], ["A"], ["A"]).is_err());
        assert!(Vocabulary::new(["pcu"], ["A", "A"], ["B"]).is_err());
        assert!(Vocabulary::new(["pcu"], Vec::<&str>::new(), ["B"]).is_err());
        assert!(Vocabulary::new(["pcu"], ["<start>"], ["B"]).is_err());
        assert!(Vocabulary::new(["pcu"], ["A"], ["B"]).is_ok());
    }

    #[test]
    fn serde_as_plain_string() {
        let m = MofName::new("pcu", "N155", "E9");
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "\"pcu N155 E9\"");
        assert_eq!(serde_json::from_str::<MofName>(&json).unwrap(), m);
    }
}
