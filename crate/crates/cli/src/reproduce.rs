//! Regression checks over the bundled example values.

use concordance_core::{
    compare_bounds, cover_b_plus_for_genus_bound, eta, genus_bound_odd_q, genus_bound_q2,
    infer_theta, infer_theta_m, sigma_q, DefiniteForm, HomologyClass, KnotExpression, Ledger,
    Prime, SeifertMatrix,
};
use num_rational::Rational64;
use serde::Serialize;

use crate::report::write_table;
use crate::Section;

struct Check {
    name: String,
    section: Section,
    expected: String,
    run: Box<dyn Fn(&Ledger) -> Result<String, String>>,
}

#[derive(Serialize)]
struct Outcome {
    name: String,
    section: &'static str,
    expected: String,
    got: String,
    pass: bool,
}

fn section_name(s: Section) -> &'static str {
    match s {
        Section::Examples => "examples",
        Section::Definite => "definite",
    }
}

fn expr(s: &str) -> KnotExpression {
    s.parse().expect("built-in expression parses")
}

fn theta_check(s: &str, q: Prime, want: &str) -> Check {
    let e = expr(s);
    let label = if q == Prime::TWO { "θ".to_string() } else { format!("θ^({q})") };
    Check {
        name: format!("{label}({s})"),
        section: Section::Examples,
        expected: want.to_string(),
        run: Box::new(move |l| {
            infer_theta(l, &e, q)
                .map(|i| i.bounds.to_string())
                .map_err(|e| e.to_string())
        }),
    }
}

fn theta_m_check(s: &str, m: u64, want: i64) -> Check {
    let e = expr(s);
    Check {
        name: format!("θ({s}, {m})"),
        section: Section::Examples,
        expected: want.to_string(),
        run: Box::new(move |l| {
            infer_theta_m(l, &e, Prime::TWO, m)
                .map(|i| i.bounds.to_string())
                .map_err(|e| e.to_string())
        }),
    }
}

fn checks() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check {
        name: "σ^(3)(T(2,7)) from its Seifert matrix".into(),
        section: Section::Examples,
        expected: "-8".into(),
        run: Box::new(|_| {
            let v = SeifertMatrix::torus(2, 7).map_err(|e| e.to_string())?;
            sigma_q(&v, Prime::THREE).map(|s| s.to_string()).map_err(|e| e.to_string())
        }),
    });
    out.push(Check {
        name: "b+ of the cover for g=6, a²=0, σ=−8".into(),
        section: Section::Examples,
        expected: "2".into(),
        run: Box::new(|_| {
            cover_b_plus_for_genus_bound(Prime::TWO, 6, 0, -8)
                .map(|b| b.to_string())
                .map_err(|e| e.to_string())
        }),
    });
    for n in 1..=5i64 {
        out.push(theta_check(&format!("T(3,{})", 6 * n - 1), Prime::TWO, &(6 * n - 2).to_string()));
        out.push(theta_check(&format!("T(3,{})", 6 * n + 1), Prime::TWO, &(6 * n).to_string()));
        out.push(theta_check(&format!("-T(3,{})", 6 * n - 1), Prime::TWO, "0"));
        out.push(theta_check(&format!("-T(3,{})", 6 * n + 1), Prime::TWO, "0"));
    }
    for (s, m, want) in [("T(3,7)", 4, 4), ("T(3,5)", 0, 4), ("T(3,13)", 4, 10), ("T(3,13)", 12, 8)] {
        out.push(theta_m_check(s, m, want));
    }
    for n in 1..=5i64 {
        out.push(theta_check(&format!("T(2,{})", 6 * n - 1), Prime::THREE, &(3 * n - 1).to_string()));
        out.push(theta_check(&format!("T(2,{})", 6 * n + 1), Prime::THREE, &(3 * n).to_string()));
    }
    for (s, want) in [
        ("9_42", "0"),
        ("-9_42", "1"),
        ("-(9_42) + Wh(T(2,3))", "2"),
        ("Wh(T(2,3))", "1"),
        ("-Wh(T(2,3))", "0"),
        ("T(2,5) + -Wh(T(2,3))", "1"),
        ("-T(2,5) + Wh(T(2,3))", "2"),
    ] {
        out.push(theta_check(s, Prime::TWO, want));
    }

    let definite = |name: &str, expected: &str, run: Box<dyn Fn(&Ledger) -> Result<String, String>>| Check {
        name: name.to_string(),
        section: Section::Definite,
        expected: expected.to_string(),
        run,
    };
    let bound2 = |s: &'static str, a: Vec<i64>| -> Box<dyn Fn(&Ledger) -> Result<String, String>> {
        Box::new(move |l| {
            let a = DefiniteForm::new(a.len()).class(a.clone()).map_err(|e| e.to_string())?;
            genus_bound_q2(l, &expr(s), &a).map(|b| b.bound.to_string()).map_err(|e| e.to_string())
        })
    };
    out.push(definite("genus bound T(3,7), a = 0, r = 3", "6", bound2("T(3,7)", vec![0, 0, 0])));
    out.push(definite("genus bound T(3,7), a = (2,0,0)", "5", bound2("T(3,7)", vec![2, 0, 0])));
    out.push(definite("genus bound unknot, a = 0", "0", bound2("unknot", vec![])));
    out.push(definite(
        "genus bound q=3 T(2,7), a = 0, r = 1",
        "3",
        Box::new(|l| {
            genus_bound_odd_q(l, &expr("T(2,7)"), Prime::THREE, &HomologyClass::new(vec![0]))
                .map(|b| b.bound.to_string())
                .map_err(|e| e.to_string())
        }),
    ));
    out.push(definite(
        "η(1,2,3)",
        "-2",
        Box::new(|_| Ok(eta(&HomologyClass::new(vec![1, 2, 3])).to_string())),
    ));
    for (x, want) in [(vec![0, 0, 0], "6, 6, 4, -7"), (vec![1, 0, 0], "5, 5, 3, -6")] {
        out.push(definite(
            &format!("comparison n=1, x={}, r=3", HomologyClass::new(x.clone())),
            want,
            Box::new(move |_| {
                let c = compare_bounds(1, &HomologyClass::new(x.clone()), 3).map_err(|e| e.to_string())?;
                Ok(format!("{}, {}, {}, {}", c.theta, c.tau, c.sig1, c.sig2))
            }),
        ));
    }
    out.push(definite(
        "θ-bound ≥ τ-bound on n ≤ 4, r ≤ 6, |xᵢ| ≤ 3",
        "true",
        Box::new(|_| Ok(theta_dominates_tau().to_string())),
    ));
    out
}

fn theta_dominates_tau() -> bool {
    (1..=4u64).all(|n| {
        (1..=6usize).all(|r| {
            let side = 7usize;
            (0..side.pow(r as u32)).all(|mut k| {
                let x: Vec<i64> = (0..r)
                    .map(|_| {
                        let d = (k % side) as i64 - 3;
                        k /= side;
                        d
                    })
                    .collect();
                compare_bounds(n, &HomologyClass::new(x), r)
                    .map(|c| c.theta >= Rational64::from(c.tau))
                    .unwrap_or(false)
            })
        })
    })
}

fn selected(section: Option<Section>) -> Vec<Check> {
    checks()
        .into_iter()
        .filter(|c| section.map_or(true, |s| s == c.section))
        .collect()
}

pub fn list(section: Option<Section>, json: bool) -> String {
    let checks = selected(section);
    if json {
        let items: Vec<_> = checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "section": section_name(c.section),
                    "expected": c.expected,
                })
            })
            .collect();
        return serde_json::to_string_pretty(&items).expect("serializes") + "\n";
    }
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![section_name(c.section).into(), c.name.clone(), c.expected.clone()])
        .collect();
    let mut out = String::new();
    write_table(&mut out, &["section".into(), "check".into(), "expected".into()], &rows)
        .expect("writing to a string");
    out
}

/// Runs the checks; returns the rendered table and the number of failures.
pub fn run(ledger: &Ledger, section: Option<Section>, json: bool) -> (String, usize) {
    let outcomes: Vec<Outcome> = selected(section)
        .into_iter()
        .map(|c| {
            let got = (c.run)(ledger).unwrap_or_else(|e| format!("error: {e}"));
            Outcome {
                pass: got == c.expected,
                name: c.name,
                section: section_name(c.section),
                expected: c.expected,
                got,
            }
        })
        .collect();
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    if json {
        let doc = serde_json::json!({ "checks": outcomes, "failed": failed });
        return (serde_json::to_string_pretty(&doc).expect("serializes") + "\n", failed);
    }
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                if o.pass { "PASS" } else { "FAIL" }.into(),
                o.section.into(),
                o.name.clone(),
                o.expected.clone(),
                o.got.clone(),
            ]
        })
        .collect();
    let mut out = String::new();
    write_table(
        &mut out,
        &["status".into(), "section".into(), "check".into(), "expected".into(), "got".into()],
        &rows,
    )
    .expect("writing to a string");
    out.push_str(&format!("{} of {} checks passed\n", outcomes.len() - failed, outcomes.len()));
    (out, failed)
}
