use std::collections::BTreeMap;

use rand::Rng;

use crate::compiler::{MofName, Role, Vocabulary};
use crate::error::{Error, Result};

const START: &str = "MOF";
const MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symbol {
    NonTerminal(String),
    Terminal(String),
}

/// Context-free grammar; each nonterminal expands by one of its
/// productions, chosen uniformly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: BTreeMap<String, Vec<Vec<Symbol>>>,
}

impl Grammar {
    /// `MOF -> TOPOLOGY NODE EDGE`, with one terminal production per token.
    pub fn from_vocab(vocab: &Vocabulary) -> Result<Self> {
        vocab.validate()?;
        let nt = |r: Role| r.as_str().to_uppercase();
        let mut rules = BTreeMap::new();
        rules.insert(
            START.to_string(),
            vec![Role::ORDER.iter().map(|&r| Symbol::NonTerminal(nt(r))).collect()],
        );
        for r in Role::ORDER {
            let prods = vocab
                .tokens(r)
                .iter()
                .map(|t| vec![Symbol::Terminal(t.clone())])
                .collect();
            rules.insert(nt(r), prods);
        }
        Ok(Self { rules })
    }

    /// Leftmost derivation from `start`, returning the terminals.
    pub fn derive<R: Rng + ?Sized>(&self, start: &str, rng: &mut R) -> Result<Vec<String>> {
        let mut out = Vec::new();
        self.expand(start, rng, 0, &mut out)?;
        Ok(out)
    }

    fn expand<R: Rng + ?Sized>(&self, nt: &str, rng: &mut R, depth: usize, out: &mut Vec<String>) -> Result<()> {
        if depth > MAX_DEPTH {
            return Err(Error::Precondition("grammar derivation too deep".into()));
        }
        let prods = self
            .rules
            .get(nt)
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::Precondition(format!("no productions for {nt}")))?;
        for sym in &prods[rng.random_range(0..prods.len())] {
            match sym {
                Symbol::Terminal(t) => out.push(t.clone()),
                Symbol::NonTerminal(n) => self.expand(n, rng, depth + 1, out)?,
            }
        }
        Ok(())
    }

    /// One candidate name.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MofName> {
        match self.derive(START, rng)?.as_slice() {
            [t, n, e] => Ok(MofName::new(t, n, e)),
            other => Err(Error::TokenCount(other.len())),
        }
    }
}
