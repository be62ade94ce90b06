use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::mof::MofName;
use super::pregroup::{pregroup_contract, PregroupType};
use crate::error::{Error, Result};

/// Parameter key of the start box in word-sequence diagrams.
pub const START_TOKEN: &str = "<start>";

/// Parameter key of the stair connector joining box `position - 1` to box `position`.
pub fn stair_key(position: usize) -> String {
    format!("<stair:{position}>")
}

/// Compositional model used to wire component boxes together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bow,
    #[serde(rename = "discocat")]
    DisCoCat,
    Sequence,
    Stair,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Bow,
        ModelKind::DisCoCat,
        ModelKind::Sequence,
        ModelKind::Stair,
    ];

    /// Short display name used in reports.
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Bow => "BoW",
            ModelKind::DisCoCat => "DisCoCat",
            ModelKind::Sequence => "Sequence",
            ModelKind::Stair => "Stair",
        }
    }

    /// True for the models that read the name as an ordered word sequence.
    pub fn is_word_sequence(self) -> bool {
        matches!(self, ModelKind::Sequence | ModelKind::Stair)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bow" => Ok(ModelKind::Bow),
            "discocat" => Ok(ModelKind::DisCoCat),
            "sequence" | "seq" | "word-sequence" => Ok(ModelKind::Sequence),
            "stair" => Ok(ModelKind::Stair),
            other => Err(Error::Precondition(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Wire types of a DisCoCat topology box.
pub const DISCOCAT_TOPOLOGY: [PregroupType; 2] = [PregroupType::N, PregroupType::NLeft];
/// Wire types of a DisCoCat node box.
pub const DISCOCAT_NODE: [PregroupType; 1] = [PregroupType::N];
/// Wire types of a DisCoCat edge box; its `n` wire is the sentence output.
pub const DISCOCAT_EDGE: [PregroupType; 2] = [PregroupType::NRight, PregroupType::N];

/// A component state with one or more typed output wires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramBox {
    /// Parameter key: a vocabulary token or [`START_TOKEN`].
    pub label: String,
    pub wires: Vec<PregroupType>,
}

impl DiagramBox {
    fn new(label: impl Into<String>, wires: &[PregroupType]) -> Self {
        Self {
            label: label.into(),
            wires: wires.to_vec(),
        }
    }

    /// The wire that carries the box's rotations; the other, if any, is its
    /// entangled partner.
    pub fn principal_wire(&self) -> usize {
        self.wires
            .iter()
            .position(|&t| t == PregroupType::N)
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WireRef {
    #[serde(rename = "box")]
    pub box_index: usize,
    pub wire: usize,
}

impl WireRef {
    pub fn new(box_index: usize, wire: usize) -> Self {
        Self { box_index, wire }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Connector {
    /// Frobenius multiplication of the first wire of each listed box. The
    /// first box keeps its wire open.
    MergeDot { inputs: Vec<usize> },
    /// Contraction of two adjoint wires.
    Cup { left: WireRef, right: WireRef },
    /// Folds box `next` into the running wire held by box `acc`.
    Stair { position: usize, acc: usize, next: usize },
}

impl Connector {
    pub fn name(&self) -> &'static str {
        match self {
            Connector::MergeDot { .. } => "merge-dot",
            Connector::Cup { .. } => "cup",
            Connector::Stair { .. } => "stair",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringDiagram {
    pub model_kind: ModelKind,
    pub label_width: usize,
    pub boxes: Vec<DiagramBox>,
    pub connectors: Vec<Connector>,
    /// The wire left open after all connectors are applied.
    pub output: WireRef,
}

impl StringDiagram {
    /// Concatenated wire types, box by box.
    pub fn type_list(&self) -> Vec<PregroupType> {
        self.boxes.iter().flat_map(|b| b.wires.iter().copied()).collect()
    }

    pub fn n_wires(&self) -> usize {
        self.boxes.iter().map(|b| b.wires.len()).sum()
    }

    pub fn count_connectors(&self, name: &str) -> usize {
        self.connectors.iter().filter(|c| c.name() == name).count()
    }

    fn check_wire(&self, w: WireRef) -> Result<()> {
        match self.boxes.get(w.box_index) {
            Some(b) if w.wire < b.wires.len() => Ok(()),
            _ => Err(Error::Precondition(format!(
                "wire {}:{} does not exist",
                w.box_index, w.wire
            ))),
        }
    }

    /// Structural checks: connectors match the model, every wire is used
    /// exactly once and exactly one wire stays open.
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.label_width) {
            return Err(Error::Precondition(format!(
                "label width must be 1 or 2, got {}",
                self.label_width
            )));
        }
        if self.boxes.iter().any(|b| b.wires.is_empty() || b.wires.len() > 2) {
            return Err(Error::Precondition("boxes carry one or two wires".into()));
        }
        self.check_wire(self.output)?;
        let offsets: Vec<usize> = self
            .boxes
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.wires.len();
                Some(o)
            })
            .collect();
        let flat = |w: WireRef| offsets[w.box_index] + w.wire;
        let mut uses = vec![0usize; self.n_wires()];
        uses[flat(self.output)] += 1;
        for c in &self.connectors {
            let allowed = matches!(
                (self.model_kind, c),
                (ModelKind::Bow, Connector::MergeDot { .. })
                    | (ModelKind::DisCoCat | ModelKind::Sequence, Connector::Cup { .. })
                    | (ModelKind::Stair, Connector::Stair { .. })
            );
            if !allowed {
                return Err(Error::UnsupportedConnector {
                    connector: c.name(),
                    model: self.model_kind.label(),
                });
            }
            match *c {
                Connector::MergeDot { ref inputs } => {
                    for &b in inputs.iter().skip(1) {
                        let w = WireRef::new(b, 0);
                        self.check_wire(w)?;
                        uses[flat(w)] += 1;
                    }
                    let open = WireRef::new(*inputs.first().ok_or_else(|| {
                        Error::Precondition("merge-dot without inputs".into())
                    })?, 0);
                    self.check_wire(open)?;
                    if open != self.output {
                        return Err(Error::Precondition("merge-dot must feed the output".into()));
                    }
                }
                Connector::Cup { left, right } => {
                    self.check_wire(left)?;
                    self.check_wire(right)?;
                    uses[flat(left)] += 1;
                    uses[flat(right)] += 1;
                }
                Connector::Stair { acc, next, .. } => {
                    let (a, n) = (WireRef::new(acc, 0), WireRef::new(next, 0));
                    self.check_wire(a)?;
                    self.check_wire(n)?;
                    uses[flat(a)] += 1;
                }
            }
        }
        if let Some(i) = uses.iter().position(|&u| u != 1) {
            return Err(Error::Precondition(format!(
                "wire {i} is used {} times",
                uses[i]
            )));
        }
        Ok(())
    }
}

/// DisCoCat wire types for a token sequence whose roles are known.
pub fn discocat_types(roles: &[super::mof::Role]) -> Vec<PregroupType> {
    use super::mof::Role;
    roles
        .iter()
        .flat_map(|r| match r {
            Role::Topology => DISCOCAT_TOPOLOGY.as_slice(),
            Role::Node => DISCOCAT_NODE.as_slice(),
            Role::Edge => DISCOCAT_EDGE.as_slice(),
        })
        .copied()
        .collect()
}

/// Cups and output wire from contracting the boxes' concatenated types.
fn contract_boxes(boxes: &[DiagramBox]) -> Result<(Vec<Connector>, WireRef)> {
    let mut index = Vec::new();
    for (b, bx) in boxes.iter().enumerate() {
        for w in 0..bx.wires.len() {
            index.push(WireRef::new(b, w));
        }
    }
    let types: Vec<PregroupType> = boxes.iter().flat_map(|b| b.wires.iter().copied()).collect();
    let red = pregroup_contract(&types);
    if red.residual != [PregroupType::N] {
        return Err(Error::Precondition(format!(
            "types do not reduce to n: {:?}",
            red.residual
        )));
    }
    let cups = red
        .cups
        .iter()
        .map(|&(l, r)| Connector::Cup {
            left: index[l],
            right: index[r],
        })
        .collect();
    Ok((cups, index[red.residual_positions[0]]))
}

/// Builds the string diagram of `mof` under `model_kind`.
pub fn build_diagram(mof: &MofName, model_kind: ModelKind, label_width: usize) -> Result<StringDiagram> {
    use PregroupType::{NRight, N};
    let [t, n, e] = mof.tokens();
    let (boxes, connectors, output) = match model_kind {
        ModelKind::Bow => {
            let boxes = vec![
                DiagramBox::new(t, &[N]),
                DiagramBox::new(n, &[N]),
                DiagramBox::new(e, &[N]),
            ];
            (boxes, vec![Connector::MergeDot { inputs: vec![0, 1, 2] }], WireRef::new(0, 0))
        }
        ModelKind::DisCoCat => {
            let boxes = vec![
                DiagramBox::new(t, &DISCOCAT_TOPOLOGY),
                DiagramBox::new(n, &DISCOCAT_NODE),
                DiagramBox::new(e, &DISCOCAT_EDGE),
            ];
            let (cups, out) = contract_boxes(&boxes)?;
            (boxes, cups, out)
        }
        ModelKind::Sequence => {
            let boxes = vec![
                DiagramBox::new(START_TOKEN, &[N]),
                DiagramBox::new(t, &[NRight, N]),
                DiagramBox::new(n, &[NRight, N]),
                DiagramBox::new(e, &[NRight, N]),
            ];
            let (cups, out) = contract_boxes(&boxes)?;
            (boxes, cups, out)
        }
        ModelKind::Stair => {
            let boxes = vec![
                DiagramBox::new(t, &[N]),
                DiagramBox::new(n, &[N]),
                DiagramBox::new(e, &[N]),
            ];
            let stairs = (1..boxes.len())
                .map(|p| Connector::Stair {
                    position: p,
                    acc: p - 1,
                    next: p,
                })
                .collect();
            (boxes, stairs, WireRef::new(2, 0))
        }
    };
    let d = StringDiagram {
        model_kind,
        label_width,
        boxes,
        connectors,
        output,
    };
    d.validate()?;
    Ok(d)
}
