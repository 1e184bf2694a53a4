//! Bound propagation for θ^(q) over a ledger.
//!
//! A query expands into a finite universe of concordance classes: the query,
//! its sub-sums, their complements, images under the ledger's crossing-change
//! relations, and mirrors of all of these. Every class carries an interval
//! [lower, upper] in (1/(q−1))·Z, and the rules below tighten the intervals
//! until nothing changes. All rules are monotone, so the fixed point does not
//! depend on the order in which they fire.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::knot::ledger::FactUse;
use crate::knot::{ConcordanceClass, FactKind, KnotExpression, Ledger, SignedAtom};
use crate::prime::Prime;
use crate::sequence::{
    crossing_shifts, ell_lower_bound, j_value, j_value_m, nonneg, snap_down, snap_up, theta,
    theta_m, xi_sequence, BoundInterval,
};

const MAX_SUBSET_UNITS: usize = 8;
const MAX_RELATION_DEPTH: usize = 12;
const MAX_NODES: usize = 600;
const MAX_SWEEPS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    /// θ ≥ 0 by definition.
    NonNegative,
    SignatureGenus,
    Subadditivity,
    CrossingChange,
    ClosedForm,
    DeltaJump,
    Unknotting,
    EllBound,
    ExactSequence,
    Concordance,
}

impl Rule {
    /// The propagation rules, in their default firing order.
    pub const ALL: [Rule; 9] = [
        Rule::SignatureGenus,
        Rule::Subadditivity,
        Rule::CrossingChange,
        Rule::ClosedForm,
        Rule::DeltaJump,
        Rule::Unknotting,
        Rule::EllBound,
        Rule::ExactSequence,
        Rule::Concordance,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Self::NonNegative => "R0",
            Self::SignatureGenus => "R1",
            Self::Subadditivity => "R2",
            Self::CrossingChange => "R3",
            Self::ClosedForm => "R4",
            Self::DeltaJump => "R5",
            Self::Unknotting => "R6",
            Self::EllBound => "R7",
            Self::ExactSequence => "R8",
            Self::Concordance => "C",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            Self::NonNegative => "θ is non-negative",
            Self::SignatureGenus => "signature lower bound / slice-genus upper bound",
            Self::Subadditivity => "subadditivity under connected sum",
            Self::CrossingChange => "a positive-to-negative crossing change lowers θ by at most one",
            Self::ClosedForm => "closed form for quasi-alternating knots / L-space branched covers",
            Self::DeltaJump => "δ below -σ/2 with σ ≤ 0 forces θ above -σ/2",
            Self::Unknotting => "θ(K) + θ(-K) is at most the unknotting number",
            Self::EllBound => "lower bound from the bottom degree ℓ of HF+ of the mirror's cover",
            Self::ExactSequence => "exact value from the δ-sequence of the mirror",
            Self::Concordance => "concordance invariance: slice knots have θ = 0",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code(), self.citation())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

/// One link of a justification: a bound on a class and the rules that
/// produce exactly that bound at the fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub knot: String,
    pub side: Side,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational64,
    pub rules: Vec<Rule>,
    pub detail: String,
}

fn ser_rational<S: serde::Serializer>(v: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.side {
            Side::Lower => "≥",
            Side::Upper => "≤",
        };
        let codes: Vec<&str> = self.rules.iter().map(|r| r.code()).collect();
        write!(
            f,
            "θ({}) {op} {}  [{}] {}",
            self.knot,
            self.value,
            codes.join(", "),
            self.detail
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inference {
    /// The query as a concordance class in canonical form.
    pub knot: String,
    pub q: Prime,
    pub bounds: BoundInterval,
    pub trace: Vec<TraceStep>,
    /// Ledger facts used by the trace, sorted.
    pub facts: Vec<FactUse>,
}

impl Inference {
    pub fn is_exact(&self) -> bool {
        self.bounds.is_exact()
    }
}

/// Firing order for the fixed-point loop. The result does not depend on it;
/// it exists so that independence can be tested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub rules: Vec<Rule>,
    /// Seed for permuting the node order; 0 keeps the canonical order.
    pub shuffle: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            rules: Rule::ALL.to_vec(),
            shuffle: 0,
        }
    }
}

pub fn infer_theta(ledger: &Ledger, expr: &KnotExpression, q: Prime) -> Result<Inference> {
    infer_theta_with(ledger, expr, q, &Schedule::default())
}

pub fn infer_theta_with(
    ledger: &Ledger,
    expr: &KnotExpression,
    q: Prime,
    schedule: &Schedule,
) -> Result<Inference> {
    let mut engine = Engine::build(ledger, expr, q)?;
    engine.run(schedule)?;
    Ok(engine.report(0))
}

/// Bounds on θ^(q)(K, m).
///
/// At m = 0 this is [`infer_theta`]. Otherwise the value is exact when the
/// mirror has a δ-sequence; the lower end also uses the signature and the ℓ
/// bound at m, and the upper end uses θ(K,m) ≤ θ(K).
pub fn infer_theta_m(ledger: &Ledger, expr: &KnotExpression, q: Prime, m: u64) -> Result<Inference> {
    let base = infer_theta(ledger, expr, q)?;
    if m == 0 {
        return Ok(base);
    }
    let engine = Engine::build(ledger, expr, q)?;
    let node = &engine.nodes[0];
    let d = q.as_i64() - 1;
    let mut steps = Vec::new();
    let mut facts: BTreeSet<FactUse> = engine.slice_uses.iter().cloned().collect();

    if let Some(x) = &node.data.theta_m_source {
        let j = j_value_m(&x.sequence, -x.sigma, m)?;
        let v = theta_m(q, j, x.sigma).to_rational();
        facts.extend(x.facts.iter().cloned());
        let detail = format!("j(-K, {m}) = {j}, σ = {}", x.sigma);
        for side in [Side::Lower, Side::Upper] {
            steps.push(TraceStep {
                knot: node.class.to_string(),
                side,
                value: v,
                rules: vec![Rule::ExactSequence],
                detail: detail.clone(),
            });
        }
        let bounds = BoundInterval::exact(v).with_reason(Rule::ExactSequence.to_string());
        return Ok(Inference {
            knot: node.class.to_string(),
            q,
            bounds,
            trace: steps,
            facts: facts.into_iter().collect(),
        });
    }

    let mut lower = Rational64::zero();
    let mut lower_rule = Rule::NonNegative;
    let mut lower_facts = Vec::new();
    let mut lower_detail = String::new();
    if let Some(s) = &node.data.sigma {
        let v = snap_up(Rational64::new(-s.value, 2 * d), q);
        if v > lower {
            lower = v;
            lower_rule = Rule::SignatureGenus;
            lower_facts = s.facts.clone();
            lower_detail = format!("σ = {}", s.value);
        }
    }
    if let (Some(ell), Some(s)) = (&node.data.ell_mirror, &node.data.sigma) {
        let v = snap_up(ell_lower_bound(q, ell.value, s.value, m), q);
        if v > lower {
            lower = v;
            lower_rule = Rule::EllBound;
            lower_facts = [ell.facts.clone(), s.facts.clone()].concat();
            lower_detail = format!("ℓ(-K) = {}, σ = {}, m = {m}", ell.value, s.value);
        }
    }
    facts.extend(lower_facts);
    steps.push(TraceStep {
        knot: node.class.to_string(),
        side: Side::Lower,
        value: lower,
        rules: vec![lower_rule],
        detail: lower_detail,
    });
    let upper = base.bounds.upper;
    if upper.is_some() {
        steps.extend(base.trace.iter().filter(|s| s.side == Side::Upper).cloned());
        facts.extend(base.facts.iter().cloned());
    }
    let mut bounds = BoundInterval::new(lower, upper).with_reason(lower_rule.to_string());
    if upper.is_some() {
        bounds = bounds.with_reason("θ(K, m) ≤ θ(K) since θ(K, ·) is non-increasing");
    }
    Ok(Inference {
        knot: node.class.to_string(),
        q,
        bounds,
        trace: steps,
        facts: facts.into_iter().collect(),
    })
}

#[derive(Clone, Debug)]
struct Known<T> {
    value: T,
    facts: Vec<FactUse>,
}

#[derive(Clone, Debug)]
struct SequenceSource {
    sequence: crate::sequence::DeltaSequence,
    sigma: i64,
    facts: Vec<FactUse>,
}

#[derive(Clone, Debug, Default)]
struct NodeData {
    sigma: Option<Known<i64>>,
    delta: Option<Known<i64>>,
    genus: Option<Known<i64>>,
    unknotting: Option<Known<i64>>,
    closed_form: Option<FactUse>,
    ell_mirror: Option<Known<i64>>,
    exact: Option<Known<Rational64>>,
    theta_m_source: Option<SequenceSource>,
}

#[derive(Clone, Debug)]
struct Node {
    class: ConcordanceClass,
    mirror: usize,
    data: NodeData,
    /// (a, b) with a + b = this class.
    splits: Vec<(usize, usize)>,
    /// (other, sum): this + other = sum.
    parts: Vec<(usize, usize)>,
    /// Classes obtained from this one by a positive-to-negative change.
    minus_of: Vec<usize>,
    /// Classes from which this one is obtained by such a change.
    plus_of: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Proposal {
    side: Side,
    value: Rational64,
    rule: Rule,
    deps: Vec<(usize, Side)>,
    facts: Vec<FactUse>,
    detail: String,
}

struct Engine<'a> {
    ledger: &'a Ledger,
    q: Prime,
    nodes: Vec<Node>,
    index: HashMap<ConcordanceClass, usize>,
    lower: Vec<Rational64>,
    upper: Vec<Option<Rational64>>,
    lower_rule: Vec<Rule>,
    upper_rule: Vec<Rule>,
    slice_uses: Vec<FactUse>,
    atom_cache: HashMap<String, AtomData>,
}

#[derive(Clone, Debug, Default)]
struct AtomData {
    sigma: Option<(i64, FactUse)>,
    delta: Option<(i64, FactUse)>,
    genus: Option<(i64, FactUse)>,
    unknotting: Option<(i64, FactUse)>,
}

impl<'a> Engine<'a> {
    fn build(ledger: &'a Ledger, expr: &KnotExpression, q: Prime) -> Result<Self> {
        ledger.check_expression(expr)?;
        let mut engine = Self {
            ledger,
            q,
            nodes: Vec::new(),
            index: HashMap::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            lower_rule: Vec::new(),
            upper_rule: Vec::new(),
            slice_uses: Vec::new(),
            atom_cache: HashMap::new(),
        };
        let query = engine.strip_slice(ConcordanceClass::from_expression(expr), true);
        engine.add(query.clone())?;
        engine.add(ConcordanceClass::zero())?;

        let units = query.units();
        if units.len() <= MAX_SUBSET_UNITS {
            for mask in 0u32..(1 << units.len()) {
                let sub = units
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .fold(ConcordanceClass::zero(), |acc, (_, u)| acc.plus(&ConcordanceClass::unit(u)));
                engine.add(query.minus(&sub))?;
                engine.add(sub)?;
            }
        } else {
            for u in &units {
                engine.add(ConcordanceClass::unit(u))?;
            }
        }

        let relations = engine.relation_classes()?;
        let mut crossings: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut queue: VecDeque<(usize, usize)> = (0..engine.nodes.len()).map(|i| (i, 0)).collect();
        while let Some((x, depth)) = queue.pop_front() {
            if depth >= MAX_RELATION_DEPTH {
                continue;
            }
            let xc = engine.nodes[x].class.clone();
            for (p, m) in &relations {
                if contains(&xc, p) {
                    let y = xc.minus(p).plus(m);
                    if let Some(yi) = engine.try_add(y, &mut queue, depth)? {
                        crossings.insert((x, yi));
                    }
                }
                if !m.is_zero() && contains(&xc, m) {
                    let y = xc.minus(m).plus(p);
                    if let Some(yi) = engine.try_add(y, &mut queue, depth)? {
                        crossings.insert((yi, x));
                    }
                }
            }
        }
        for (p, m) in crossings.clone() {
            let (mp, mm) = (engine.nodes[p].mirror, engine.nodes[m].mirror);
            crossings.insert((mm, mp));
        }
        for (p, m) in crossings {
            engine.nodes[p].minus_of.push(m);
            engine.nodes[m].plus_of.push(p);
        }

        let n = engine.nodes.len();
        for a in 0..n {
            for b in a..n {
                let c = engine.nodes[a].class.plus(&engine.nodes[b].class);
                if let Some(&ci) = engine.index.get(&c) {
                    if a == ci || b == ci {
                        continue;
                    }
                    engine.nodes[ci].splits.push((a, b));
                    engine.nodes[a].parts.push((b, ci));
                    if a != b {
                        engine.nodes[b].parts.push((a, ci));
                    }
                }
            }
        }

        for i in 0..n {
            let data = engine.node_data(&engine.nodes[i].class.clone())?;
            engine.nodes[i].data = data;
        }
        engine.lower = vec![Rational64::zero(); n];
        engine.upper = vec![None; n];
        engine.lower_rule = vec![Rule::NonNegative; n];
        engine.upper_rule = vec![Rule::NonNegative; n];
        Ok(engine)
    }

    /// Removes atoms recorded as slice; they are concordant to the unknot.
    fn strip_slice(&mut self, mut class: ConcordanceClass, record: bool) -> ConcordanceClass {
        let names: Vec<String> = class.coefficients().map(|(n, _)| n.to_string()).collect();
        for name in names {
            if let Some((true, f)) = self
                .ledger
                .flag(&SignedAtom::positive(name.clone()), FactKind::Slice)
            {
                if record {
                    self.slice_uses.push(f.usage());
                }
                class = class.without(&name);
            }
        }
        class
    }

    fn relation_classes(&mut self) -> Result<Vec<(ConcordanceClass, ConcordanceClass)>> {
        let mut out = Vec::new();
        for r in self.ledger.relations() {
            let p = self.strip_slice(ConcordanceClass::from_expression(&r.plus), false);
            let m = self.strip_slice(ConcordanceClass::from_expression(&r.minus), false);
            if p == m {
                continue;
            }
            let sp = self.class_sigma(&p)?;
            let sm = self.class_sigma(&m)?;
            if let (Some(sp), Some(sm)) = (sp, sm) {
                crossing_shifts(self.q, sp.value, sm.value).map_err(|e| match e {
                    Error::RelationInconsistent(msg) => {
                        Error::RelationInconsistent(format!("{} -> {}: {msg}", r.plus, r.minus))
                    }
                    other => other,
                })?;
            }
            out.push((p, m));
        }
        Ok(out)
    }

    fn try_add(
        &mut self,
        class: ConcordanceClass,
        queue: &mut VecDeque<(usize, usize)>,
        depth: usize,
    ) -> Result<Option<usize>> {
        if let Some(&i) = self.index.get(&class) {
            return Ok(Some(i));
        }
        if self.nodes.len() + 2 > MAX_NODES {
            return Ok(None);
        }
        let i = self.add(class)?;
        queue.push_back((i, depth + 1));
        queue.push_back((self.nodes[i].mirror, depth + 1));
        Ok(Some(i))
    }

    /// Adds a class and its mirror; returns the index of the class.
    fn add(&mut self, class: ConcordanceClass) -> Result<usize> {
        if let Some(&i) = self.index.get(&class) {
            return Ok(i);
        }
        let mirror = class.mirror();
        let i = self.nodes.len();
        let fresh = |class: ConcordanceClass, mirror: usize| Node {
            class,
            mirror,
            data: NodeData::default(),
            splits: Vec::new(),
            parts: Vec::new(),
            minus_of: Vec::new(),
            plus_of: Vec::new(),
        };
        if mirror == class {
            self.nodes.push(fresh(class.clone(), i));
            self.index.insert(class, i);
        } else {
            self.nodes.push(fresh(class.clone(), i + 1));
            self.nodes.push(fresh(mirror.clone(), i));
            self.index.insert(class, i);
            self.index.insert(mirror, i + 1);
        }
        Ok(i)
    }

    fn atom_data(&mut self, name: &str) -> Result<AtomData> {
        if let Some(d) = self.atom_cache.get(name) {
            return Ok(d.clone());
        }
        let k = SignedAtom::positive(name.to_string());
        let l = self.ledger;
        let q = self.q;
        let int = |kind| l.int(&k, kind).map(|(v, f)| (v, f.usage()));
        let delta_kind = if q.is_odd() {
            FactKind::DeltaQJabuka(q)
        } else {
            FactKind::DeltaMo
        };
        let genus = [FactKind::G4, FactKind::G4Upper, FactKind::UnknottingUpper]
            .into_iter()
            .filter_map(int)
            .min_by_key(|(v, _)| *v);
        let d = AtomData {
            sigma: l.sigma_q(&k, q)?,
            delta: int(delta_kind),
            genus,
            unknotting: int(FactKind::UnknottingUpper),
        };
        self.atom_cache.insert(name.to_string(), d.clone());
        Ok(d)
    }

    /// Σ c·f(atom) over the class, if every atom has the value.
    fn additive(
        &mut self,
        class: &ConcordanceClass,
        pick: impl Fn(&AtomData) -> Option<(i64, FactUse)>,
        weight: impl Fn(i64) -> i64,
    ) -> Result<Option<Known<i64>>> {
        let mut value = 0;
        let mut facts = Vec::new();
        for (name, c) in class.coefficients().map(|(n, c)| (n.to_string(), c)).collect::<Vec<_>>() {
            match pick(&self.atom_data(&name)?) {
                Some((v, f)) => {
                    value += weight(c) * v;
                    facts.push(f);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Known { value, facts }))
    }

    fn class_sigma(&mut self, class: &ConcordanceClass) -> Result<Option<Known<i64>>> {
        self.additive(class, |a| a.sigma.clone(), |c| c)
    }

    fn node_data(&mut self, class: &ConcordanceClass) -> Result<NodeData> {
        let sigma = self.class_sigma(class)?;
        let delta = self.additive(class, |a| a.delta.clone(), |c| c)?;
        let genus = self.additive(class, |a| a.genus.clone(), i64::abs)?;
        let unknotting = self.additive(class, |a| a.unknotting.clone(), i64::abs)?;
        let mut data = NodeData {
            sigma,
            delta,
            genus,
            unknotting,
            ..NodeData::default()
        };
        let Some(unit) = class.as_unit() else {
            return Ok(data);
        };
        let l = self.ledger;
        let q = self.q;
        let flag = if q.is_odd() {
            FactKind::LspaceQ(q)
        } else {
            FactKind::QuasiAlternating
        };
        if let Some((true, f)) = l.flag(&unit, flag) {
            data.closed_form = Some(f.usage());
        }
        if let Some(&(v, f)) = l.int(&unit.mirror(), FactKind::EllQ(q)).as_ref() {
            data.ell_mirror = Some(Known {
                value: v,
                facts: vec![f.usage()],
            });
        }
        if let (Some((seq, f)), Some(s)) = (l.delta_sequence(&unit.mirror(), q), &data.sigma) {
            let xi = xi_sequence(seq, -s.value)?;
            let j = j_value(&xi).map_err(|e| {
                Error::InconsistentData(format!("δ-sequence of {}: {e}", unit.mirror()))
            })?;
            let facts = [vec![f.usage()], s.facts.clone()].concat();
            data.exact = Some(Known {
                value: theta(q, j, s.value).to_rational(),
                facts: facts.clone(),
            });
            data.theta_m_source = Some(SequenceSource {
                sequence: seq.clone(),
                sigma: s.value,
                facts,
            });
        }
        Ok(data)
    }

    fn run(&mut self, schedule: &Schedule) -> Result<()> {
        let order = permutation(self.nodes.len(), schedule.shuffle);
        for _ in 0..MAX_SWEEPS {
            let mut changed = false;
            for &i in &order {
                for &rule in &schedule.rules {
                    for p in self.proposals(i, rule) {
                        changed |= self.apply(i, &p)?;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
        Err(Error::InconsistentData(
            "bound propagation did not reach a fixed point".to_string(),
        ))
    }

    fn snapped(&self, p: &Proposal) -> Rational64 {
        match p.side {
            Side::Lower => nonneg(snap_up(p.value, self.q)),
            Side::Upper => snap_down(p.value, self.q),
        }
    }

    fn apply(&mut self, i: usize, p: &Proposal) -> Result<bool> {
        let v = self.snapped(p);
        let changed = match p.side {
            Side::Lower if v > self.lower[i] => {
                self.lower[i] = v;
                self.lower_rule[i] = p.rule;
                true
            }
            Side::Upper if self.upper[i].map_or(true, |u| v < u) => {
                self.upper[i] = Some(v);
                self.upper_rule[i] = p.rule;
                true
            }
            _ => false,
        };
        if let Some(u) = self.upper[i] {
            if self.lower[i] > u {
                return Err(Error::LedgerInconsistent {
                    node: self.nodes[i].class.to_string(),
                    lower: self.lower[i].to_string(),
                    lower_rule: self.lower_rule[i].to_string(),
                    upper: u.to_string(),
                    upper_rule: self.upper_rule[i].to_string(),
                });
            }
        }
        Ok(changed)
    }

    fn proposals(&self, i: usize, rule: Rule) -> Vec<Proposal> {
        let node = &self.nodes[i];
        let data = &node.data;
        let d = self.q.as_i64() - 1;
        let mut out = Vec::new();
        let mut push = |side, value, deps: Vec<(usize, Side)>, facts: Vec<FactUse>, detail: String| {
            out.push(Proposal {
                side,
                value,
                rule,
                deps,
                facts,
                detail,
            })
        };
        match rule {
            Rule::NonNegative => {}
            Rule::Concordance => {
                if node.class.is_zero() {
                    push(Side::Lower, 0.into(), vec![], vec![], "slice".into());
                    push(Side::Upper, 0.into(), vec![], vec![], "slice".into());
                }
            }
            Rule::SignatureGenus => {
                if let Some(s) = &data.sigma {
                    push(
                        Side::Lower,
                        Rational64::new(-s.value, 2 * d),
                        vec![],
                        s.facts.clone(),
                        format!("σ = {}", s.value),
                    );
                }
                if let Some(g) = &data.genus {
                    push(
                        Side::Upper,
                        g.value.into(),
                        vec![],
                        g.facts.clone(),
                        format!("g4 ≤ {}", g.value),
                    );
                }
            }
            Rule::Subadditivity => {
                for &(a, b) in &node.splits {
                    if let (Some(ua), Some(ub)) = (self.upper[a], self.upper[b]) {
                        push(
                            Side::Upper,
                            ua + ub,
                            vec![(a, Side::Upper), (b, Side::Upper)],
                            vec![],
                            format!("θ({}) + θ({})", self.nodes[a].class, self.nodes[b].class),
                        );
                    }
                }
                for &(other, sum) in &node.parts {
                    if let Some(uo) = self.upper[other] {
                        push(
                            Side::Lower,
                            self.lower[sum] - uo,
                            vec![(sum, Side::Lower), (other, Side::Upper)],
                            vec![],
                            format!(
                                "θ({}) - θ({})",
                                self.nodes[sum].class, self.nodes[other].class
                            ),
                        );
                    }
                }
            }
            Rule::CrossingChange => {
                for &m in &node.minus_of {
                    push(
                        Side::Lower,
                        self.lower[m],
                        vec![(m, Side::Lower)],
                        vec![],
                        format!("crossing change to {}", self.nodes[m].class),
                    );
                    if let Some(um) = self.upper[m] {
                        push(
                            Side::Upper,
                            um + 1,
                            vec![(m, Side::Upper)],
                            vec![],
                            format!("crossing change to {}", self.nodes[m].class),
                        );
                    }
                }
                for &p in &node.plus_of {
                    push(
                        Side::Lower,
                        self.lower[p] - 1,
                        vec![(p, Side::Lower)],
                        vec![],
                        format!("crossing change from {}", self.nodes[p].class),
                    );
                    if let Some(up) = self.upper[p] {
                        push(
                            Side::Upper,
                            up,
                            vec![(p, Side::Upper)],
                            vec![],
                            format!("crossing change from {}", self.nodes[p].class),
                        );
                    }
                }
            }
            Rule::ClosedForm => {
                if let (Some(f), Some(s)) = (&data.closed_form, &data.sigma) {
                    let v = nonneg(Rational64::new(-s.value, 2 * d));
                    let facts = [vec![f.clone()], s.facts.clone()].concat();
                    let detail = format!("σ = {}", s.value);
                    push(Side::Lower, v, vec![], facts.clone(), detail.clone());
                    push(Side::Upper, v, vec![], facts, detail);
                }
            }
            Rule::DeltaJump => {
                if let (Some(dl), Some(s)) = (&data.delta, &data.sigma) {
                    if 2 * dl.value < -s.value && s.value <= 0 {
                        push(
                            Side::Lower,
                            Rational64::new(2 - s.value, 2 * d),
                            vec![],
                            [dl.facts.clone(), s.facts.clone()].concat(),
                            format!("δ = {} < -σ/2 = {}", dl.value, -s.value / 2),
                        );
                    }
                }
            }
            Rule::Unknotting => {
                if let Some(u) = &data.unknotting {
                    push(
                        Side::Upper,
                        Rational64::from(u.value) - self.lower[node.mirror],
                        vec![(node.mirror, Side::Lower)],
                        u.facts.clone(),
                        format!("u ≤ {}", u.value),
                    );
                }
            }
            Rule::EllBound => {
                if let (Some(ell), Some(s)) = (&data.ell_mirror, &data.sigma) {
                    push(
                        Side::Lower,
                        ell_lower_bound(self.q, ell.value, s.value, 0),
                        vec![],
                        [ell.facts.clone(), s.facts.clone()].concat(),
                        format!("ℓ(-K) = {}, σ = {}", ell.value, s.value),
                    );
                }
            }
            Rule::ExactSequence => {
                if let Some(x) = &data.exact {
                    push(Side::Lower, x.value, vec![], x.facts.clone(), "j(-K) from δ-sequence".into());
                    push(Side::Upper, x.value, vec![], x.facts.clone(), "j(-K) from δ-sequence".into());
                }
            }
        }
        out
    }

    fn report(&self, root: usize) -> Inference {
        let mut steps = Vec::new();
        let mut facts: BTreeSet<FactUse> = self.slice_uses.iter().cloned().collect();
        let mut seen = HashSet::new();
        self.explain(root, Side::Lower, &mut seen, &mut steps, &mut facts);
        self.explain(root, Side::Upper, &mut seen, &mut steps, &mut facts);
        let mut bounds = BoundInterval::new(self.lower[root], self.upper[root]);
        for s in steps.iter().filter(|s| s.knot == self.nodes[root].class.to_string()) {
            for r in &s.rules {
                bounds = bounds.with_reason(r.to_string());
            }
        }
        if !self.slice_uses.is_empty() {
            bounds = bounds.with_reason(Rule::Concordance.to_string());
        }
        bounds.justification.dedup();
        Inference {
            knot: self.nodes[root].class.to_string(),
            q: self.q,
            bounds,
            trace: steps,
            facts: facts.into_iter().collect(),
        }
    }

    fn explain(
        &self,
        i: usize,
        side: Side,
        seen: &mut HashSet<(usize, Side)>,
        steps: &mut Vec<TraceStep>,
        facts: &mut BTreeSet<FactUse>,
    ) {
        if !seen.insert((i, side)) {
            return;
        }
        let target = match side {
            Side::Lower => self.lower[i],
            Side::Upper => match self.upper[i] {
                Some(u) => u,
                None => return,
            },
        };
        let mut support: Vec<Proposal> = Rule::ALL
            .iter()
            .flat_map(|&r| self.proposals(i, r))
            .filter(|p| p.side == side && self.snapped(p) == target)
            .collect();
        support.sort_by_key(|p| p.deps.len());
        let knot = self.nodes[i].class.to_string();
        let Some(first) = support.first() else {
            steps.push(TraceStep {
                knot,
                side,
                value: target,
                rules: vec![Rule::NonNegative],
                detail: String::new(),
            });
            return;
        };
        let mut rules: Vec<Rule> = Vec::new();
        for p in &support {
            if !rules.contains(&p.rule) {
                rules.push(p.rule);
            }
        }
        steps.push(TraceStep {
            knot,
            side,
            value: target,
            rules,
            detail: first.detail.clone(),
        });
        facts.extend(first.facts.iter().cloned());
        for &(dep, s) in &first.deps {
            self.explain(dep, s, seen, steps, facts);
        }
    }
}

/// `part` is a sub-sum of `whole` (same signs, no larger multiplicities).
fn contains(whole: &ConcordanceClass, part: &ConcordanceClass) -> bool {
    !part.is_zero()
        && part.coefficients().all(|(n, c)| {
            let w = whole.coefficient(n);
            w.signum() == c.signum() && w.abs() >= c.abs()
        })
}

/// Deterministic permutation of 0..n from a seed (identity for seed 0).
fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    if seed == 0 {
        return v;
    }
    let mut state = seed;
    for i in (1..n).rev() {
        // splitmix64
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        v.swap(i, (z % (i as u64 + 1)) as usize);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed_theta(expr: &str, q: Prime) -> BoundInterval {
        infer_theta(&Ledger::seed(), &expr.parse().unwrap(), q)
            .unwrap()
            .bounds
    }

    fn exact(v: i64) -> (Rational64, Option<Rational64>) {
        (v.into(), Some(v.into()))
    }

    fn pair(b: &BoundInterval) -> (Rational64, Option<Rational64>) {
        (b.lower, b.upper)
    }

    #[test]
    fn nine_forty_two() {
        assert_eq!(pair(&seed_theta("-9_42", Prime::TWO)), exact(1));
        assert_eq!(pair(&seed_theta("9_42", Prime::TWO)), exact(0));
    }

    #[test]
    fn whitehead_doubles() {
        assert_eq!(pair(&seed_theta("Wh(T(2,3))", Prime::TWO)), exact(1));
        assert_eq!(pair(&seed_theta("-Wh(T(2,3))", Prime::TWO)), exact(0));
        assert_eq!(pair(&seed_theta("-9_42 + Wh(T(2,3))", Prime::TWO)), exact(2));
        assert_eq!(pair(&seed_theta("Wh(T(2,5)) + -Wh(T(2,3))", Prime::TWO)), exact(1));
    }

    #[test]
    fn torus_knots_exact() {
        assert_eq!(pair(&seed_theta("T(3,7)", Prime::TWO)), exact(6));
        assert_eq!(pair(&seed_theta("-T(3,7)", Prime::TWO)), exact(0));
        assert_eq!(pair(&seed_theta("T(2,7)", Prime::THREE)), exact(3));
        assert_eq!(pair(&seed_theta("T(2,5)", Prime::THREE)), exact(2));
    }

    #[test]
    fn unknot_and_cancellation() {
        assert_eq!(pair(&seed_theta("unknot", Prime::TWO)), exact(0));
        assert_eq!(pair(&seed_theta("T(3,7) + -T(3,7)", Prime::TWO)), exact(0));
    }

    #[test]
    fn unknown_atom() {
        let e = infer_theta(&Ledger::seed(), &"X".parse().unwrap(), Prime::TWO);
        assert!(matches!(e, Err(Error::UnknownAtom(_))));
    }

    #[test]
    fn trace_cites_rules() {
        let inf = infer_theta(&Ledger::seed(), &"-9_42 + Wh(T(2,3))".parse().unwrap(), Prime::TWO)
            .unwrap();
        let rules: Vec<Rule> = inf.trace.iter().flat_map(|s| s.rules.clone()).collect();
        assert!(rules.contains(&Rule::DeltaJump), "{:?}", inf.trace);
        assert!(!inf.facts.is_empty());
    }

    #[test]
    fn inconsistent_ledger_is_reported() {
        let l: Ledger = r#"{"atoms":[{"name":"K"}],"facts":[
            {"knot":"K","kind":"sigma","value":-4},
            {"knot":"K","kind":"g4","value":2},
            {"knot":"K","kind":"quasi_alternating","value":true},
            {"knot":"K","kind":"delta_mo","value":-6}]}"#
            .parse()
            .unwrap();
        let e = infer_theta(&l, &"K".parse().unwrap(), Prime::TWO).unwrap_err();
        assert!(matches!(e, Error::LedgerInconsistent { .. }), "{e}");
    }

    #[test]
    fn theta_m_examples() {
        let l = Ledger::seed();
        let t37: KnotExpression = "T(3,7)".parse().unwrap();
        let b = infer_theta_m(&l, &t37, Prime::TWO, 4).unwrap().bounds;
        assert_eq!(pair(&b), exact(4));
        let t35: KnotExpression = "T(3,5)".parse().unwrap();
        let b = infer_theta_m(&l, &t35, Prime::TWO, 0).unwrap().bounds;
        assert_eq!(pair(&b), exact(4));
    }

    #[test]
    fn permutation_is_a_bijection() {
        let mut p = permutation(50, 7);
        p.sort();
        assert_eq!(p, (0..50).collect::<Vec<_>>());
    }
}
