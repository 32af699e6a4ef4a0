//! Acceptance criteria 1–11. Each criterion prints one PASS/FAIL line.

use std::io::Write;
use std::time::Duration;

use hankel_besov::harness::{run_verify, CheckRow, RunConfig, VerifyReport};

/// Written straight to stdout so the lines survive the test harness capture.
macro_rules! say {
    ($($t:tt)*) => {
        writeln!(std::io::stdout().lock(), $($t)*).unwrap()
    };
}

/// `(check name, pinned bound on the measured value)`.
type Bound = (&'static str, f64);

struct Criterion {
    id: u8,
    title: &'static str,
    bounds: &'static [Bound],
    budget: Duration,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "Hankel self-reciprocity",
        bounds: &[("hankel.gaussian_fixed_point", 1e-7), ("hankel.round_trip", 1e-6)],
        budget: Duration::from_secs(5),
    },
    Criterion {
        id: 2,
        title: "Hankel Parseval",
        bounds: &[("hankel.parseval", 1e-6)],
        budget: Duration::from_secs(5),
    },
    Criterion {
        id: 3,
        title: "kernel identities",
        bounds: &[("kernel.normalization", 1e-6), ("kernel.product_formula", 1e-6)],
        budget: Duration::from_secs(30),
    },
    Criterion {
        id: 4,
        title: "contraction and Young",
        bounds: &[
            ("convolution.contraction", 1.0 + 1e-4),
            ("convolution.young", 1.0 + 1e-4),
        ],
        budget: Duration::from_secs(60),
    },
    Criterion {
        id: 5,
        title: "convolution theorem",
        bounds: &[("convolution.theorem", 1e-5)],
        budget: Duration::from_secs(60),
    },
    Criterion {
        id: 6,
        title: "admissibility closed form",
        bounds: &[("wavelet.admissibility", 1e-8)],
        budget: Duration::from_secs(1),
    },
    Criterion {
        id: 7,
        title: "wavelet Parseval",
        bounds: &[("cwt.parseval", 1e-2), ("cwt.parseval_monotone", 1.0)],
        budget: Duration::from_secs(120),
    },
    Criterion {
        id: 8,
        title: "wavelet inversion",
        bounds: &[("cwt.inversion", 2e-2), ("cwt.inversion_monotone", 1.0)],
        budget: Duration::from_secs(120),
    },
    Criterion {
        id: 9,
        title: "S₂ Plancherel",
        bounds: &[("cwt.plancherel", 2e-2)],
        budget: Duration::from_secs(60),
    },
    Criterion {
        id: 10,
        title: "Besov bounds",
        bounds: &[
            ("besov.direct", 1.05),
            ("besov.converse", 1.05),
            ("besov.bracket", 1.0),
            ("besov.derivative_reduction", 1.05),
        ],
        budget: Duration::from_secs(300),
    },
];

fn row<'a>(report: &'a VerifyReport, name: &str) -> &'a CheckRow {
    report.row(name).unwrap_or_else(|| panic!("report has no row `{name}`"))
}

fn judge(report: &VerifyReport, c: &Criterion) -> bool {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut elapsed = Duration::ZERO;
    for &(name, bound) in c.bounds {
        let r = row(report, name);
        elapsed += r.elapsed;
        match (r.measured, &r.error) {
            (Some(m), None) => {
                ok &= m <= bound;
                parts.push(format!("{name} {m:.3e} <= {bound:.3e}"));
            }
            (_, err) => {
                ok = false;
                parts.push(format!("{name} error: {}", err.as_deref().unwrap_or("no value")));
            }
        }
    }
    ok &= elapsed <= c.budget;
    let status = if ok { "PASS" } else { "FAIL" };
    say!(
        "criterion {:>2}: {status} {} [{}; {:.1}s of {}s]",
        c.id,
        c.title,
        parts.join("; "),
        elapsed.as_secs_f64(),
        c.budget.as_secs()
    );
    ok
}

fn extra(report: &VerifyReport, name: &str, key: &str) -> f64 {
    row(report, name).extras[key]
}

#[test]
fn acceptance_criteria() {
    let config = RunConfig::default();
    let first = run_verify(&config, None).expect("verify runs");
    let mut all = true;
    for c in CRITERIA {
        all &= judge(&first, c);
    }

    let plancherel = row(&first, "cwt.plancherel");
    say!(
        "    note 9: ratio {:.6} against reproducing constant {:.6}; printed admissibility constant is {:.6}",
        plancherel.extras["ratio"],
        plancherel.extras["reproducing_constant"],
        plancherel.extras["admissibility_constant"]
    );
    let direct = row(&first, "besov.direct");
    let worst_negative = direct
        .extras
        .iter()
        .filter(|(k, _)| k.ends_with("_negative_moment"))
        .fold(
            ("", 0.0f64),
            |acc, (k, &v)| if v > acc.1 { (k.as_str(), v) } else { acc },
        );
    say!(
        "    note 10: with the negative moment ∫ z^-α |ψ| dσ the direct ratio reaches {:.3} at {} ({})",
        worst_negative.1,
        worst_negative.0,
        if worst_negative.1 <= 1.05 { "holds" } else { "violated" }
    );
    say!(
        "    note 10: α = 1.5 direct {:.3}, converse {:.3}",
        extra(&first, "besov.derivative_reduction", "direct"),
        extra(&first, "besov.derivative_reduction", "converse")
    );

    let second = run_verify(&config, None).expect("verify runs");
    let a = first.to_json().unwrap();
    let b = second.to_json().unwrap();
    let same = a.as_bytes() == b.as_bytes();
    say!(
        "criterion 11: {} determinism [{} bytes, {}]",
        if same { "PASS" } else { "FAIL" },
        a.len(),
        if same { "identical" } else { "different" }
    );
    all &= same;

    assert!(all, "at least one acceptance criterion failed");
    assert!(first.summary.all_passed, "verify reported failures");
}
