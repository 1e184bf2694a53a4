use clap::Args;
use concordance_core::{
    compare_bounds, cover_topology, genus_bound_odd_q, genus_bound_q2, infer_theta, infer_theta_m,
    lt_signatures, CoverInput, DefiniteForm, Error, HomologyClass, KnotExpression, Ledger, Prime,
    SeifertMatrix, SignedAtom,
};

use crate::report::{Report, Table, TraceLine};
use crate::CliError;

const SIGNATURE_METHOD: &str = "congruence diagonalisation of (1−ω)V + (1−ω̄)Vᵀ over Q(ζ_q)";

#[derive(Args)]
pub struct CoverArgs {
    /// b₂ of the base 4-manifold.
    #[arg(long, default_value_t = 0)]
    b2x: u64,
    /// Signature of the base 4-manifold.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    sigma_x: i64,
    /// Genus of the branch surface.
    #[arg(long)]
    genus: u64,
    /// Self-intersection of the branch surface.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    self_int: i64,
    /// σ^(q) of the outgoing boundary knot.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    sigq_out: i64,
    /// σ^(q) of the incoming boundary knot, for a cobordism.
    #[arg(long, allow_hyphen_values = true)]
    sigq_in: Option<i64>,
}

fn parse_expr(ledger: &Ledger, s: &str) -> Result<KnotExpression, CliError> {
    let e: KnotExpression = s.parse()?;
    ledger.check_expression(&e)?;
    Ok(e)
}

fn theta_symbol(q: Prime) -> String {
    if q == Prime::TWO {
        "θ".to_string()
    } else {
        format!("θ^({q})")
    }
}

pub fn sig(ledger: &Ledger, q: Prime, knot: Option<&str>, matrix: Option<&str>) -> Result<Report, CliError> {
    let mut report = Report::new("sig");
    let (label, v) = match (knot, matrix) {
        (Some(name), _) => {
            let atom = SignedAtom::parse(name)?;
            if !ledger.knows_atom(&atom.name) {
                return Err(Error::UnknownAtom(atom.name).into());
            }
            let v = ledger.seifert(&atom).ok_or_else(|| {
                Error::MissingData(format!("the ledger has no Seifert matrix for {atom}"))
            })?;
            report.query.push("knot", &atom);
            (atom.to_string(), v)
        }
        (None, Some(m)) => {
            let v: SeifertMatrix = serde_json::from_str(m)
                .map_err(|e| CliError::Usage(format!("malformed matrix: {e}")))?;
            report.query.push("matrix", m);
            ("V".to_string(), v)
        }
        (None, None) => return Err(CliError::Usage("give --knot or --matrix".into())),
    };
    report.query.push("q", q);
    let sigs = lt_signatures(&v, q)?;
    for (j, s) in (1..).zip(&sigs) {
        report.results.push(format!("σ(ω^{j})"), s);
        report.trace.push(TraceLine::new(
            &label,
            format!("σ at ω = e^(2πi·{j}/{q}) is {s}"),
            SIGNATURE_METHOD,
        ));
    }
    let total: i64 = sigs.iter().map(|s| s.get()).sum();
    report.results.push(format!("σ^({q})"), total);
    report.trace.push(TraceLine::new(
        &label,
        format!("σ^({q}) = {total}"),
        "sum of the signatures over the nontrivial q-th roots of unity",
    ));
    Ok(report)
}

pub fn branch_cover(q: Prime, a: &CoverArgs) -> Result<Report, CliError> {
    let input = CoverInput {
        q,
        b2x: a.b2x,
        sigma_x: a.sigma_x,
        genus: a.genus,
        self_int: a.self_int,
        sigq_out: a.sigq_out,
        sigq_in: a.sigq_in,
    };
    let t = cover_topology(&input)?;
    let mut report = Report::new("branch-cover");
    report.query.push("q", q);
    report.query.push("b2(X)", a.b2x);
    report.query.push("σ(X)", a.sigma_x);
    report.query.push("genus", a.genus);
    report.query.push("[Σ]²", a.self_int);
    report.query.push("σ^(q) out", a.sigq_out);
    if let Some(v) = a.sigq_in {
        report.query.push("σ^(q) in", v);
    }
    report.results.push("b2(W)", t.b2);
    report.results.push("σ(W)", t.sigma);
    report.results.push("b+(W)", t.b_plus);
    report.results.push("b-(W)", t.b_minus);
    report.trace.push(TraceLine::new("W", format!("b2 = {}", t.b2), "b2(W) = q·b2(X) + 2(q−1)g"));
    report.trace.push(TraceLine::new(
        "W",
        format!("σ = {}", t.sigma),
        "σ(W) = q·σ(X) − ((q²−1)/(3q))[Σ]² + σ^(q)(out) − σ^(q)(in)",
    ));
    report.trace.push(TraceLine::new(
        "W",
        format!("b± = {}, {}", t.b_plus, t.b_minus),
        "b± = (b2 ± σ)/2",
    ));
    Ok(report)
}

pub fn theta(ledger: &Ledger, q: Prime, expr: &str) -> Result<Report, CliError> {
    let e = parse_expr(ledger, expr)?;
    let inf = infer_theta(ledger, &e, q)?;
    let symbol = theta_symbol(q);
    let mut report = Report::new("theta");
    report.query.push("expr", &e);
    report.query.push("q", q);
    report.results.push(format!("{symbol}({})", inf.knot), &inf.bounds);
    report.results.push("exact", inf.is_exact());
    report.absorb(&inf, &symbol);
    Ok(report)
}

pub fn theta_m(ledger: &Ledger, q: Prime, expr: &str, m: u64) -> Result<Report, CliError> {
    let e = parse_expr(ledger, expr)?;
    let inf = infer_theta_m(ledger, &e, q, m)?;
    let symbol = format!("{}(·, {m})", theta_symbol(q));
    let mut report = Report::new("theta-m");
    report.query.push("expr", &e);
    report.query.push("q", q);
    report.query.push("m", m);
    report.results.push(format!("{}({}, {m})", theta_symbol(q), inf.knot), &inf.bounds);
    report.results.push("exact", inf.is_exact());
    report.absorb(&inf, &symbol);
    Ok(report)
}

pub fn infer(ledger: &Ledger, q: Prime, expr: &str) -> Result<Report, CliError> {
    let e = parse_expr(ledger, expr)?;
    let symbol = theta_symbol(q);
    let mut report = Report::new("infer");
    report.query.push("expr", &e);
    report.query.push("q", q);
    for k in [e.clone(), e.mirror()] {
        let inf = infer_theta(ledger, &k, q)?;
        report.results.push(format!("{symbol}({})", inf.knot), &inf.bounds);
        report.absorb(&inf, &symbol);
    }
    Ok(report)
}

/// n with K = T(3, 6n+1), if the expression is that single atom.
fn torus_index(e: &KnotExpression) -> Option<u64> {
    let [atom] = e.terms().try_into().ok()?;
    let atom: SignedAtom = atom;
    if atom.mirrored {
        return None;
    }
    let k: u64 = atom.name.strip_prefix("T(3,")?.strip_suffix(')')?.trim().parse().ok()?;
    (k % 6 == 1 && k > 1).then_some((k - 1) / 6)
}

pub fn genus_bound(
    ledger: &Ledger,
    q: Prime,
    expr: &str,
    rank: usize,
    coords: &[i64],
    compare: bool,
) -> Result<Report, CliError> {
    let e = parse_expr(ledger, expr)?;
    let coords = if coords.is_empty() { vec![0; rank] } else { coords.to_vec() };
    let a = DefiniteForm::new(rank).class(coords)?;
    let b = if q.is_odd() {
        genus_bound_odd_q(ledger, &e, q, &a)?
    } else {
        genus_bound_q2(ledger, &e, &a)?
    };
    let symbol = format!("{}(·, {})", theta_symbol(q), b.m);
    let mut report = Report::new("genus-bound");
    report.query.push("expr", &e);
    report.query.push("q", q);
    report.query.push("rank", rank);
    report.query.push("class", &a);
    report.results.push("a²", b.a_sq);
    report.results.push("m", b.m);
    report.results.push(format!("{}({}, {})", theta_symbol(q), b.theta.knot, b.m), &b.theta.bounds);
    report.results.push("genus bound", b.bound);
    report.results.push("θ exact", b.uses_exact_theta());
    let formula = if q.is_odd() {
        "g ≥ θ^(q)(K, m) + ((q+1)/(6q))·a² with m = −((q²−1)/(6q))·a²"
    } else {
        "g ≥ θ(K, m) + a²/4 with m = −a²/4 + η(a/2)"
    };
    report.trace.push(TraceLine::new(
        b.theta.knot.clone(),
        format!("g ≥ {}", b.bound),
        formula,
    ));
    report.absorb(&b.theta, &symbol);

    if compare {
        let n = torus_index(&e).ok_or_else(|| {
            CliError::Data(Error::Hypotheses(format!(
                "the comparison applies to T(3, 6n+1), not {e}"
            )))
        })?;
        let x: HomologyClass = a.divide(2).ok_or_else(|| {
            CliError::Data(Error::Hypotheses(format!("class {a} is not divisible by 2")))
        })?;
        let c = compare_bounds(n, &x, rank)?;
        report.tables.push(Table {
            title: format!("bounds for T(3,{}) with a = 2x, x = {x}", 6 * n + 1),
            columns: vec!["bound".into(), "value".into()],
            rows: vec![
                vec!["theta".into(), c.theta.to_string()],
                vec!["tau".into(), c.tau.to_string()],
                vec!["sig1".into(), c.sig1.to_string()],
                vec!["sig2".into(), c.sig2.to_string()],
            ],
        });
        let subject = format!("T(3,{})", 6 * n + 1);
        for (claim, cite) in [
            (format!("theta = {}", c.theta), "max{4n + x², 6n + 3x²/2 − η(x)/2}"),
            (format!("tau = {}", c.tau), "6n + 2x² + ‖x‖ from τ"),
            (format!("sig1 = {}", c.sig1), "4n − Σxᵢ² from the signature"),
            (format!("sig2 = {}", c.sig2), "−4n − r + Σxᵢ² from the signature with reversed orientation"),
        ] {
            report.trace.push(TraceLine::new(&subject, claim, cite));
        }
    }
    Ok(report)
}
