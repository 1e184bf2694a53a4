//! The fact ledger: knot atoms, provenance-tagged invariant values and
//! crossing-change relations, loaded from JSON and validated on load.
//!
//! A fact is attached to a signed atom, so `"knot": "-T(3,7)"` records a
//! value for the mirror image. Lookups convert between a knot and its mirror
//! where the invariant allows it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::knot::expr::{KnotExpression, SignedAtom, UNKNOT};
use crate::knot::seifert::SeifertMatrix;
use crate::prime::Prime;
use crate::sequence::DeltaSequence;
use crate::signature;

/// The ledger shipped with the library: torus knots, 9_42 and Whitehead
/// doubles of (2, 2a+1) torus knots.
pub const SEED_LEDGER: &str = include_str!("../../data/seed_ledger.json");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotAtom {
    pub name: String,
    pub seifert: Option<SeifertMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactKind {
    Sigma,
    SigmaQ(Prime),
    LtSignature { q: Prime, j: u32 },
    Tau,
    S,
    DeltaMo,
    DeltaQJabuka(Prime),
    DeltaSeq(Prime),
    G4,
    G4Upper,
    G4Lower,
    UnknottingUpper,
    EllQ(Prime),
    QuasiAlternating,
    Slice,
    LspaceQ(Prime),
}

/// How a fact about K determines the same fact about −K.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MirrorRule {
    Negates,
    Invariant,
    /// Nothing is known about the mirror.
    Oriented,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Int,
    Bool,
    Sequence,
}

impl FactKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sigma => "sigma",
            Self::SigmaQ(_) => "sigma_q",
            Self::LtSignature { .. } => "lt_signature",
            Self::Tau => "tau",
            Self::S => "s",
            Self::DeltaMo => "delta_mo",
            Self::DeltaQJabuka(_) => "delta_q_jabuka",
            Self::DeltaSeq(_) => "delta_seq",
            Self::G4 => "g4",
            Self::G4Upper => "g4_upper",
            Self::G4Lower => "g4_lower",
            Self::UnknottingUpper => "unknotting_upper",
            Self::EllQ(_) => "ell_q",
            Self::QuasiAlternating => "quasi_alternating",
            Self::Slice => "slice",
            Self::LspaceQ(_) => "lspace_q",
        }
    }

    pub fn q(self) -> Option<Prime> {
        match self {
            Self::SigmaQ(q)
            | Self::DeltaQJabuka(q)
            | Self::DeltaSeq(q)
            | Self::EllQ(q)
            | Self::LspaceQ(q)
            | Self::LtSignature { q, .. } => Some(q),
            _ => None,
        }
    }

    pub fn j(self) -> Option<u32> {
        match self {
            Self::LtSignature { j, .. } => Some(j),
            _ => None,
        }
    }

    pub fn mirror_rule(self) -> MirrorRule {
        match self {
            Self::Sigma
            | Self::SigmaQ(_)
            | Self::LtSignature { .. }
            | Self::Tau
            | Self::S
            | Self::DeltaMo
            | Self::DeltaQJabuka(_) => MirrorRule::Negates,
            Self::G4
            | Self::G4Upper
            | Self::G4Lower
            | Self::UnknottingUpper
            | Self::QuasiAlternating
            | Self::Slice
            | Self::LspaceQ(_) => MirrorRule::Invariant,
            Self::DeltaSeq(_) | Self::EllQ(_) => MirrorRule::Oriented,
        }
    }

    fn shape(self) -> Shape {
        match self {
            Self::QuasiAlternating | Self::Slice | Self::LspaceQ(_) => Shape::Bool,
            Self::DeltaSeq(_) => Shape::Sequence,
            _ => Shape::Int,
        }
    }

    fn parse(kind: &str, q: Option<u32>, j: Option<u32>) -> std::result::Result<Self, String> {
        let prime = || -> std::result::Result<Prime, String> {
            let q = q.ok_or_else(|| format!("kind {kind} needs a field q"))?;
            Prime::new(q).map_err(|e| e.to_string())
        };
        let kind = match kind {
            "sigma" => Self::Sigma,
            "sigma_q" => Self::SigmaQ(prime()?),
            "lt_signature" => {
                let q = prime()?;
                let j = j.ok_or("kind lt_signature needs a field j")?;
                if j == 0 || j >= q.get() {
                    return Err(format!("j = {j} must lie in 1..={}", q.get() - 1));
                }
                return Ok(Self::LtSignature { q, j });
            }
            "tau" => Self::Tau,
            "s" => Self::S,
            "delta_mo" | "delta_MO" => Self::DeltaMo,
            "delta_q_jabuka" => Self::DeltaQJabuka(prime()?),
            "delta_seq" => Self::DeltaSeq(prime()?),
            "g4" => Self::G4,
            "g4_upper" => Self::G4Upper,
            "g4_lower" => Self::G4Lower,
            "unknotting_upper" => Self::UnknottingUpper,
            "ell_q" => Self::EllQ(prime()?),
            "quasi_alternating" => Self::QuasiAlternating,
            "slice" => Self::Slice,
            "lspace_q" => Self::LspaceQ(prime()?),
            other => return Err(format!("unknown fact kind `{other}`")),
        };
        if j.is_some() {
            return Err(format!("kind {} takes no field j", kind.name()));
        }
        if q.is_some() && kind.q().is_none() {
            return Err(format!("kind {} takes no field q", kind.name()));
        }
        Ok(kind)
    }
}

impl fmt::Display for FactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LtSignature { q, j } => write!(f, "lt_signature(q={q}, j={j})"),
            k => match k.q() {
                Some(q) => write!(f, "{}({q})", k.name()),
                None => write!(f, "{}", k.name()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactValue {
    Int(i64),
    Bool(bool),
    Sequence(DeltaSequence),
}

impl FactValue {
    fn shape(&self) -> Shape {
        match self {
            Self::Int(_) => Shape::Int,
            Self::Bool(_) => Shape::Bool,
            Self::Sequence(_) => Shape::Sequence,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Self::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Self::Bool(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_sequence(&self) -> Option<&DeltaSequence> {
        match self {
            Self::Sequence(v) => Some(v),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Self::Int(v) => Value::from(*v),
            Self::Bool(v) => Value::from(*v),
            Self::Sequence(s) => serde_json::to_value(s).expect("sequence serializes"),
        }
    }

    fn from_json(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::Bool(b) => Ok(Self::Bool(*b)),
            Value::Number(n) => n
                .as_i64()
                .map(Self::Int)
                .ok_or_else(|| format!("{n} is not a 64-bit integer")),
            Value::Object(_) => serde_json::from_value::<DeltaSequence>(v.clone())
                .map(Self::Sequence)
                .map_err(|e| e.to_string()),
            other => Err(format!(
                "expected an integer, a boolean or {{\"values\", \"stable\"}}, found {other}"
            )),
        }
    }
}

impl fmt::Display for FactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Int(v) => write!(f, "{v}"),
            Self::Bool(v) => write!(f, "{v}"),
            Self::Sequence(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub knot: SignedAtom,
    pub kind: FactKind,
    pub value: FactValue,
    pub provenance: String,
}

/// A ledger value as it was used in a derivation, for reports.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FactUse {
    pub knot: String,
    pub kind: String,
    pub value: String,
    pub provenance: String,
}

impl Fact {
    pub fn usage(&self) -> FactUse {
        FactUse {
            knot: self.knot.to_string(),
            kind: self.kind.to_string(),
            value: self.value.to_string(),
            provenance: self.provenance.clone(),
        }
    }
}

/// `minus` is obtained from `plus` by changing one positive crossing into a
/// negative crossing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingRelation {
    pub plus: KnotExpression,
    pub minus: KnotExpression,
    pub provenance: String,
}

#[derive(Serialize, Deserialize)]
struct RawLedger {
    #[serde(default)]
    atoms: Vec<RawAtom>,
    #[serde(default)]
    facts: Vec<RawFact>,
    #[serde(default)]
    relations: Vec<RawRelation>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seifert: Option<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFact {
    knot: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<u32>,
    value: Value,
    #[serde(default)]
    provenance: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelation {
    plus: String,
    minus: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
}

/// Validated, immutable collection of atoms, facts and relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ledger {
    atoms: Vec<KnotAtom>,
    facts: Vec<Fact>,
    relations: Vec<CrossingRelation>,
    atom_index: BTreeMap<String, usize>,
    fact_index: BTreeMap<(SignedAtom, FactKind), usize>,
}

pub fn load_ledger(path: impl AsRef<Path>) -> Result<Ledger> {
    let text = std::fs::read_to_string(path)?;
    text.parse()
}

fn invalid(field: impl Into<String>, subject: impl Into<String>, message: impl Into<String>) -> Error {
    Error::InvalidEntry {
        field: field.into(),
        subject: subject.into(),
        message: message.into(),
    }
}

impl std::str::FromStr for Ledger {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let raw: RawLedger = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_raw(raw)
    }
}

impl Ledger {
    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new(), Vec::new()).expect("empty ledger is valid")
    }

    /// The bundled seed ledger.
    pub fn seed() -> Self {
        SEED_LEDGER.parse().expect("bundled seed ledger is valid")
    }

    pub fn new(
        atoms: Vec<KnotAtom>,
        facts: Vec<Fact>,
        relations: Vec<CrossingRelation>,
    ) -> Result<Self> {
        let mut atom_index = BTreeMap::new();
        for (i, a) in atoms.iter().enumerate() {
            match SignedAtom::parse(&a.name) {
                Ok(s) if !s.mirrored && s.name == a.name => {}
                _ => {
                    return Err(invalid(
                        format!("atoms[{i}].name"),
                        &a.name,
                        "atom names must be a single unmirrored identifier",
                    ))
                }
            }
            if atom_index.insert(a.name.clone(), i).is_some() {
                return Err(invalid(format!("atoms[{i}].name"), &a.name, "duplicate atom name"));
            }
        }
        let mut ledger = Self {
            atoms,
            facts,
            relations,
            atom_index,
            fact_index: BTreeMap::new(),
        };
        ledger.index_facts()?;
        ledger.check_facts()?;
        ledger.check_relations()?;
        Ok(ledger)
    }

    fn from_raw(raw: RawLedger) -> Result<Self> {
        let atoms = raw
            .atoms
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                let seifert = a
                    .seifert
                    .map(SeifertMatrix::new)
                    .transpose()
                    .map_err(|e| invalid(format!("atoms[{i}].seifert"), &a.name, e.to_string()))?;
                Ok(KnotAtom {
                    name: a.name,
                    seifert,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let facts = raw
            .facts
            .into_iter()
            .enumerate()
            .map(|(i, f)| {
                let knot = SignedAtom::parse(&f.knot)
                    .map_err(|e| invalid(format!("facts[{i}].knot"), &f.knot, e.to_string()))?;
                let kind = FactKind::parse(&f.kind, f.q, f.j)
                    .map_err(|m| invalid(format!("facts[{i}].kind"), &f.knot, m))?;
                let value = FactValue::from_json(&f.value)
                    .map_err(|m| invalid(format!("facts[{i}].value"), subject(&knot, kind), m))?;
                Ok(Fact {
                    knot,
                    kind,
                    value,
                    provenance: f.provenance,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let relations = raw
            .relations
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let parse = |s: &str, part: &str| {
                    s.parse::<KnotExpression>()
                        .map_err(|e| invalid(format!("relations[{i}].{part}"), s, e.to_string()))
                };
                Ok(CrossingRelation {
                    plus: parse(&r.plus, "plus")?,
                    minus: parse(&r.minus, "minus")?,
                    provenance: r.provenance,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, facts, relations)
    }

    fn to_raw(&self) -> RawLedger {
        RawLedger {
            atoms: self
                .atoms
                .iter()
                .map(|a| RawAtom {
                    name: a.name.clone(),
                    seifert: a.seifert.clone().map(Into::into),
                })
                .collect(),
            facts: self
                .facts
                .iter()
                .map(|f| RawFact {
                    knot: f.knot.to_string(),
                    kind: f.kind.name().to_string(),
                    q: f.kind.q().map(Prime::get),
                    j: f.kind.j(),
                    value: f.value.to_json(),
                    provenance: f.provenance.clone(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| RawRelation {
                    plus: r.plus.to_string(),
                    minus: r.minus.to_string(),
                    provenance: r.provenance.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("ledger serializes")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// A new ledger with one more fact, validated as a whole.
    pub fn with_fact(&self, fact: Fact) -> Result<Self> {
        let mut facts = self.facts.clone();
        facts.push(fact);
        Self::new(self.atoms.clone(), facts, self.relations.clone())
    }

    /// A new ledger with the given fact removed.
    pub fn without_fact(&self, index: usize) -> Result<Self> {
        let mut facts = self.facts.clone();
        facts.remove(index);
        Self::new(self.atoms.clone(), facts, self.relations.clone())
    }

    pub fn atoms(&self) -> &[KnotAtom] {
        &self.atoms
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn relations(&self) -> &[CrossingRelation] {
        &self.relations
    }

    pub fn atom(&self, name: &str) -> Option<&KnotAtom> {
        self.atom_index.get(name).map(|&i| &self.atoms[i])
    }

    pub fn knows_atom(&self, name: &str) -> bool {
        name == UNKNOT || self.atom_index.contains_key(name)
    }

    /// Checks that every atom of `expr` is declared.
    pub fn check_expression(&self, expr: &KnotExpression) -> Result<()> {
        match expr.atoms().into_iter().find(|a| !self.knows_atom(a)) {
            Some(a) => Err(Error::UnknownAtom(a.to_string())),
            None => Ok(()),
        }
    }

    /// The fact stored for exactly this signed atom.
    pub fn fact(&self, knot: &SignedAtom, kind: FactKind) -> Option<&Fact> {
        self.fact_index
            .get(&(knot.clone(), kind))
            .map(|&i| &self.facts[i])
    }

    /// Integer value for `knot`, read directly or from its mirror.
    pub fn int(&self, knot: &SignedAtom, kind: FactKind) -> Option<(i64, &Fact)> {
        if let Some(f) = self.fact(knot, kind) {
            return f.value.as_int().map(|v| (v, f));
        }
        let f = self.fact(&knot.mirror(), kind)?;
        let v = f.value.as_int()?;
        match kind.mirror_rule() {
            MirrorRule::Negates => Some((-v, f)),
            MirrorRule::Invariant => Some((v, f)),
            MirrorRule::Oriented => None,
        }
    }

    pub fn flag(&self, knot: &SignedAtom, kind: FactKind) -> Option<(bool, &Fact)> {
        let f = self
            .fact(knot, kind)
            .or_else(|| self.fact(&knot.mirror(), kind))?;
        f.value.as_bool().map(|v| (v, f))
    }

    pub fn delta_sequence(&self, knot: &SignedAtom, q: Prime) -> Option<(&DeltaSequence, &Fact)> {
        let f = self.fact(knot, FactKind::DeltaSeq(q))?;
        f.value.as_sequence().map(|s| (s, f))
    }

    /// Seifert matrix of a signed atom, mirrored as needed.
    pub fn seifert(&self, knot: &SignedAtom) -> Option<SeifertMatrix> {
        if knot.name == UNKNOT {
            return Some(SeifertMatrix::unknot());
        }
        let v = self.atom(&knot.name)?.seifert.as_ref()?;
        Some(if knot.mirrored { v.mirror() } else { v.clone() })
    }

    /// σ^(q) of a signed atom from facts, falling back to its Seifert
    /// matrix. For q = 2 this is the classical signature.
    pub fn sigma_q(&self, knot: &SignedAtom, q: Prime) -> Result<Option<(i64, FactUse)>> {
        if knot.name == UNKNOT {
            return Ok(Some((0, unknot_use("sigma_q"))));
        }
        let stored = if q.is_odd() {
            self.int(knot, FactKind::SigmaQ(q))
        } else {
            self.int(knot, FactKind::Sigma)
                .or_else(|| self.int(knot, FactKind::SigmaQ(q)))
        };
        if let Some((v, f)) = stored {
            return Ok(Some((v, f.usage())));
        }
        match self.seifert(knot) {
            Some(v) => {
                let s = signature::sigma_q(&v, q)?;
                Ok(Some((
                    s,
                    FactUse {
                        knot: knot.to_string(),
                        kind: FactKind::SigmaQ(q).to_string(),
                        value: s.to_string(),
                        provenance: "computed from the Seifert matrix".to_string(),
                    },
                )))
            }
            None => Ok(None),
        }
    }

    fn index_facts(&mut self) -> Result<()> {
        let mut index = BTreeMap::new();
        for (i, f) in self.facts.iter().enumerate() {
            let field = format!("facts[{i}]");
            let subj = subject(&f.knot, f.kind);
            if !self.knows_atom(&f.knot.name) {
                return Err(invalid(field, subj, format!("unknown atom `{}`", f.knot.name)));
            }
            if let Some(prev) = index.insert((f.knot.clone(), f.kind), i) {
                return Err(invalid(
                    field,
                    subj,
                    format!("duplicate fact, first given at facts[{prev}]"),
                ));
            }
        }
        self.fact_index = index;
        Ok(())
    }

    fn check_facts(&self) -> Result<()> {
        for (i, f) in self.facts.iter().enumerate() {
            check_single(f).map_err(|m| invalid(format!("facts[{i}]"), subject(&f.knot, f.kind), m))?;
        }
        for (i, f) in self.facts.iter().enumerate() {
            let fail = |m: String| invalid(format!("facts[{i}]"), subject(&f.knot, f.kind), m);
            if let Some(other) = self.fact(&f.knot.mirror(), f.kind) {
                let agree = match (f.kind.mirror_rule(), &f.value, &other.value) {
                    (MirrorRule::Negates, FactValue::Int(a), FactValue::Int(b)) => *a == -*b,
                    (MirrorRule::Invariant, a, b) => a == b,
                    _ => true,
                };
                if !agree {
                    return Err(fail(format!(
                        "value {} disagrees with {} = {} recorded for the mirror",
                        f.value, other.kind, other.value
                    )));
                }
            }
            self.check_against_others(f).map_err(fail)?;
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if a.seifert.is_some() {
                self.check_seifert(a)
                    .map_err(|m| invalid(format!("atoms[{i}].seifert"), &a.name, m))?;
            }
        }
        Ok(())
    }

    fn check_against_others(&self, f: &Fact) -> std::result::Result<(), String> {
        let k = &f.knot;
        let int = |kind| self.int(k, kind).map(|(v, _)| v);
        match (f.kind, &f.value) {
            (FactKind::G4, FactValue::Int(g)) => {
                if let Some(lo) = int(FactKind::G4Lower) {
                    if lo > *g {
                        return Err(format!("g4 = {g} is below g4_lower = {lo}"));
                    }
                }
                if let Some(hi) = int(FactKind::G4Upper) {
                    if hi < *g {
                        return Err(format!("g4 = {g} exceeds g4_upper = {hi}"));
                    }
                }
            }
            (FactKind::G4Lower, FactValue::Int(lo)) => {
                for kind in [FactKind::G4Upper, FactKind::UnknottingUpper] {
                    if let Some(hi) = int(kind) {
                        if hi < *lo {
                            return Err(format!("g4_lower = {lo} exceeds {kind} = {hi}"));
                        }
                    }
                }
            }
            (FactKind::UnknottingUpper, FactValue::Int(u)) => {
                if let Some(g) = int(FactKind::G4) {
                    if g > *u {
                        return Err(format!("unknotting_upper = {u} is below g4 = {g}"));
                    }
                }
            }
            (FactKind::Sigma, FactValue::Int(s)) => {
                for kind in [FactKind::G4, FactKind::G4Upper, FactKind::UnknottingUpper] {
                    if let Some(g) = int(kind) {
                        if s.abs() > 2 * g {
                            return Err(format!("|sigma|/2 = {} exceeds {kind} = {g}", s.abs() / 2));
                        }
                    }
                }
            }
            (FactKind::Slice, FactValue::Bool(true)) => {
                for kind in [FactKind::Sigma, FactKind::Tau, FactKind::S, FactKind::G4] {
                    if let Some(v) = int(kind) {
                        if v != 0 {
                            return Err(format!("a slice knot has {kind} = 0, not {v}"));
                        }
                    }
                }
            }
            (FactKind::DeltaSeq(q), FactValue::Sequence(d)) => {
                let stable = d.stable();
                if let Some(e) = d.values().iter().find(|&&e| (e - stable) % 4 != 0) {
                    return Err(format!("entry {e} is not congruent to the stable value {stable} mod 4"));
                }
                let sig = self.sigma_q(k, q).map_err(|e| e.to_string())?;
                if let Some((s, _)) = sig {
                    if 2 * stable < -s {
                        return Err(format!(
                            "stable value {stable} lies below -sigma_q/2 = {}",
                            -s / 2
                        ));
                    }
                    if (2 * stable + s) % 8 != 0 {
                        return Err(format!(
                            "entries must be congruent to -sigma_q/2 = {} mod 4",
                            -s / 2
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn check_seifert(&self, atom: &KnotAtom) -> std::result::Result<(), String> {
        let v = atom.seifert.as_ref().expect("checked by caller");
        let k = SignedAtom::positive(atom.name.clone());
        let mut checks: Vec<(FactKind, i64)> = Vec::new();
        if let Some((s, _)) = self.int(&k, FactKind::Sigma) {
            checks.push((FactKind::Sigma, s));
        }
        for f in &self.facts {
            if f.knot.name != atom.name {
                continue;
            }
            if let FactKind::SigmaQ(_) | FactKind::LtSignature { .. } = f.kind {
                let (v, _) = self.int(&k, f.kind).expect("fact present");
                checks.push((f.kind, v));
            }
        }
        for (kind, expected) in checks {
            let computed = match kind {
                FactKind::Sigma => signature::signature(v).map(|s| s.get()),
                FactKind::SigmaQ(q) => signature::sigma_q(v, q),
                FactKind::LtSignature { q, j } => signature::lt_signature(v, q, j).map(|s| s.get()),
                _ => unreachable!(),
            }
            .map_err(|e| e.to_string())?;
            if computed != expected {
                return Err(format!(
                    "matrix gives {kind} = {computed} but the ledger records {expected}"
                ));
            }
        }
        Ok(())
    }

    fn check_relations(&self) -> Result<()> {
        for (i, r) in self.relations.iter().enumerate() {
            for (part, e) in [("plus", &r.plus), ("minus", &r.minus)] {
                self.check_expression(e).map_err(|err| {
                    invalid(format!("relations[{i}].{part}"), e.to_string(), err.to_string())
                })?;
            }
            let sigma = |e: &KnotExpression| -> Option<i64> {
                e.terms()
                    .iter()
                    .map(|t| self.sigma_q(t, Prime::TWO).ok().flatten().map(|(s, _)| s))
                    .sum()
            };
            if let (Some(p), Some(m)) = (sigma(&r.plus), sigma(&r.minus)) {
                if m - p != 0 && m - p != 2 {
                    return Err(invalid(
                        format!("relations[{i}]"),
                        format!("{} -> {}", r.plus, r.minus),
                        format!(
                            "changing a positive crossing moves sigma by 0 or +2, not {}",
                            m - p
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn subject(knot: &SignedAtom, kind: FactKind) -> String {
    format!("{knot} {kind}")
}

fn unknot_use(kind: &str) -> FactUse {
    FactUse {
        knot: UNKNOT.to_string(),
        kind: kind.to_string(),
        value: "0".to_string(),
        provenance: "the unknot bounds a disc".to_string(),
    }
}

/// Parity, divisibility and range checks that involve a single fact.
fn check_single(f: &Fact) -> std::result::Result<(), String> {
    let expected = f.kind.shape();
    if f.value.shape() != expected {
        let want = match expected {
            Shape::Int => "an integer",
            Shape::Bool => "a boolean",
            Shape::Sequence => "a sequence {\"values\", \"stable\"}",
        };
        return Err(format!("{} must be {want}", f.kind.name()));
    }
    let FactValue::Int(v) = f.value else {
        return Ok(());
    };
    match f.kind {
        FactKind::Sigma if v % 2 != 0 => Err("sigma must be even".into()),
        FactKind::S if v % 2 != 0 => Err("s must be even".into()),
        FactKind::LtSignature { .. } if v % 2 != 0 => Err("lt_signature must be even".into()),
        FactKind::SigmaQ(q) if q.is_odd() && v % 4 != 0 => {
            Err(format!("sigma_q must be divisible by 4 for odd q, got {v}"))
        }
        FactKind::SigmaQ(_) if v % 2 != 0 => Err("sigma_q must be even".into()),
        FactKind::G4 | FactKind::G4Upper | FactKind::G4Lower | FactKind::UnknottingUpper
            if v < 0 =>
        {
            Err(format!("{} must be non-negative", f.kind.name()))
        }
        _ => Ok(()),
    }
}
