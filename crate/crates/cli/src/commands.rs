//! One handler per subcommand. Each returns the JSON `result` payload, the
//! text rendering, and the warnings to surface; the envelope around them is
//! assembled in `main`.

use std::fmt::Write as _;

use num_traits::One;
use serde_json::{json, Value};

use eqdd_core::appendixpolys::{check_growth, has_large_middle, minimal_large_middle_power};
use eqdd_core::bddring::{endpoint_case, membership, ExclusionCertificate, Membership, Subring};
use eqdd_core::bratteli::{self, K0Level};
use eqdd_core::cohomology::{
    brauer_trivial_d, e1_group, e2_page, point, sphere, torus, CWDescription, CohomologyError,
};
use eqdd_core::descriptor::Warning;
use eqdd_core::factorint::factor_with_cap;
use eqdd_core::homotopy::{coefficients_table, pi_aut, pi_u_finite, pi_u_limit};
use eqdd_core::locring::{Positivity, Ring};
use eqdd_core::polycore::CharacterPolynomial;

use crate::settings::{OutputFormat, Settings};
use crate::CliError;

pub struct Outcome {
    /// Character the command ran on, echoed in the envelope.
    pub character: Option<CharacterPolynomial>,
    pub result: Value,
    pub text: String,
    pub warnings: Vec<Warning>,
    /// Raw body that replaces the envelope entirely (DOT export).
    pub raw: Option<String>,
}

impl Outcome {
    fn new(character: Option<CharacterPolynomial>, result: Value, text: String) -> Self {
        Outcome {
            character,
            result,
            text,
            warnings: Vec::new(),
            raw: None,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// ---------------------------------------------------------------------------
// normalize / factor
// ---------------------------------------------------------------------------

pub fn normalize(cp: CharacterPolynomial) -> Outcome {
    let case = endpoint_case(&cp);
    let support = cp.support();
    let g = support.iter().fold(0u64, |g, &e| gcd(g, e as u64));
    let result = json!({
        "degree": cp.d(),
        "a0": cp.a0().to_string(),
        "a_d": cp.a_d().to_string(),
        "support": support,
        "support_gcd": g,
        "content": cp.poly().content().to_string(),
        "endpoint_case": to_value(&case),
        "endpoint_subring": case.subring().to_string(),
    });
    let mut text = format!(
        "p = {cp}\ndegree {}, support {:?}, endpoints a_0 = {}, a_{} = {}\n",
        cp.d(),
        support,
        cp.a0(),
        cp.d(),
        cp.a_d()
    );
    if cp.original_offset() != 0 {
        let _ = writeln!(text, "original offset {}", cp.original_offset());
    }
    let _ = writeln!(text, "endpoint case {case:?} ({})", case.subring());
    Outcome::new(Some(cp), result, text)
}

pub fn factor(cp: CharacterPolynomial, settings: &Settings) -> Result<Outcome, CliError> {
    let f = factor_with_cap(cp.poly(), settings.degree_cap)?;
    let irreducible = f.content.is_one() && f.factors.len() == 1 && f.factors[0].mult == 1;
    let text = format!(
        "p = {f}\n{}\n",
        if irreducible {
            "irreducible".to_string()
        } else {
            let n = f.factors.len();
            format!("{n} distinct prime factor{}", if n == 1 { "" } else { "s" })
        }
    );
    let result = json!({
        "factorization": to_value(&f),
        "irreducible": irreducible,
    });
    Ok(Outcome::new(Some(cp), result, text))
}

// ---------------------------------------------------------------------------
// units / pi0
// ---------------------------------------------------------------------------

pub fn units(ring: &Ring) -> Outcome {
    let group = ring.unit_group();
    let mut text = format!("U(R) = {group}\n");
    if let Some(gens) = &group.generators {
        let _ = writeln!(text, "generators: {}", gens.join(", "));
    }
    let warnings = group.warnings.clone();
    let result = json!({
        "group": to_value(&group),
        "primes": to_value(&ring.factorization().factors),
    });
    let mut out = Outcome::new(Some(ring.p().clone()), result, text);
    out.warnings = warnings;
    out
}

pub fn pi0(ring: &Ring) -> Outcome {
    let monoid = ring.positive_unit_monoid();
    let mut text = format!("pi_0(Aut) = {}\n", monoid.descriptor);
    for check in &monoid.checks {
        let _ = writeln!(
            text,
            "prime {}: {}; inverse numerator: {}",
            check.prime, check.positivity, check.inverse_positivity
        );
    }
    let warnings = monoid.descriptor.warnings.clone();
    let mut out = Outcome::new(Some(ring.p().clone()), to_value(&monoid), text);
    out.warnings = warnings;
    out
}

// ---------------------------------------------------------------------------
// element / rbdd
// ---------------------------------------------------------------------------

pub fn element(ring: &Ring, x_text: &str) -> Result<Outcome, CliError> {
    let x = ring.parse_element(x_text)?;
    let unit = x.is_unit();
    let positivity = x.is_positive();
    let mut warnings = Vec::new();
    if positivity == Positivity::Unknown {
        warnings.push(Warning::new(
            "POSITIVITY_UNKNOWN",
            format!(
                "no nonnegative numerator found for {x} up to j = {}",
                ring.search_bound()
            ),
        ));
    }
    let mut text = format!("x = {x}\n");
    match (x.v(), x.w()) {
        (Some(v), Some(w)) => {
            let _ = writeln!(text, "v = {v}, w = {w}");
        }
        _ => {
            let _ = writeln!(text, "x = 0");
        }
    }
    match &unit {
        Some(u) => {
            let _ = writeln!(text, "unit: yes, x = {u}");
        }
        None => {
            let _ = writeln!(text, "unit: no");
        }
    }
    let _ = writeln!(text, "positive: {positivity}");
    let result = json!({
        "element": to_value(&x),
        "canonical": x.to_string(),
        "v": x.v(),
        "w": x.w(),
        "unit": to_value(&unit),
        "positivity": to_value(&positivity),
    });
    let mut out = Outcome::new(Some(ring.p().clone()), result, text);
    out.warnings = warnings;
    Ok(out)
}

fn certificate_text(c: &ExclusionCertificate) -> String {
    match c {
        ExclusionCertificate::Invariant { v, w } => {
            format!("invariants v = {v}, w = {w} leave the support window")
        }
        ExclusionCertificate::ConstantTerm { v } => {
            format!("constant term survives, v = {v} < 1")
        }
        ExclusionCertificate::Degree { w } => format!("top weight survives, w = {w} > -1"),
        ExclusionCertificate::Residue { exponent, modulus } => {
            format!("exponent {exponent} is off the support lattice mod {modulus}")
        }
        ExclusionCertificate::SearchExhausted { j_max } => {
            format!("no witness up to j = {j_max}")
        }
    }
}

pub fn rbdd(ring: &Ring, x_text: &str, sub: &str) -> Result<Outcome, CliError> {
    let sub: Subring = sub.parse().map_err(CliError::usage)?;
    let x = ring.parse_element(x_text)?;
    let verdict = membership(sub, &x);
    let mut warnings = Vec::new();
    let line = match &verdict {
        Membership::In { witness_j } => format!("in {sub}: yes (witness j = {witness_j})"),
        Membership::NotIn { certificate } => {
            format!("in {sub}: no ({})", certificate_text(certificate))
        }
        Membership::Unknown => {
            warnings.push(Warning::new(
                "MEMBERSHIP_UNKNOWN",
                format!(
                    "membership of {x} in {sub} undecided up to j = {}",
                    ring.search_bound()
                ),
            ));
            format!(
                "in {sub}: unknown (no witness up to j = {})",
                ring.search_bound()
            )
        }
    };
    let text = format!("x = {x}\n{line}\n");
    let result = json!({
        "element": to_value(&x),
        "subring": sub.to_string(),
        "membership": to_value(&verdict),
    });
    let mut out = Outcome::new(Some(ring.p().clone()), result, text);
    out.warnings = warnings;
    Ok(out)
}

// ---------------------------------------------------------------------------
// bratteli
// ---------------------------------------------------------------------------

pub fn bratteli_cmd(
    cp: CharacterPolynomial,
    levels: u32,
    k0: Option<u32>,
    format: OutputFormat,
) -> Result<Outcome, CliError> {
    let diagram = bratteli::build(&cp, levels);
    if format == OutputFormat::Dot {
        let dot = bratteli::export(&diagram, "dot")?;
        let mut out = Outcome::new(Some(cp), Value::Null, String::new());
        out.raw = Some(dot);
        return Ok(out);
    }
    let k0_data: Option<K0Level> = k0.map(|n| bratteli::k0_level(&cp, n));
    let mut text = diagram.to_string();
    if let Some(lvl) = &k0_data {
        let _ = writeln!(
            text,
            "K_0 at level {}: {} -> {}",
            lvl.level,
            lvl.descriptor,
            bratteli::k0_level(&cp, lvl.level + 1).descriptor
        );
        for (r, row) in lvl.matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(text, "  t^{}: [{}]", lvl.next_basis[r], cells.join(", "));
        }
    }
    let result = json!({
        "diagram": to_value(&diagram),
        "k0": to_value(&k0_data),
    });
    Ok(Outcome::new(Some(cp), result, text))
}

// ---------------------------------------------------------------------------
// homotopy / coeffs
// ---------------------------------------------------------------------------

pub struct HomotopyArgs {
    pub m: u32,
    pub k: Option<u32>,
    pub unitary_limit: bool,
}

pub fn homotopy(
    cp: CharacterPolynomial,
    args: &HomotopyArgs,
    settings: &Settings,
) -> Result<Outcome, CliError> {
    let m = args.m;
    if let Some(k) = args.k {
        let fin = pi_u_finite(&cp, k, m);
        let mut text = format!("pi_{m}(U at level {k}) = {}\n", fin.group);
        for s in &fin.verdict.summands {
            let status = match s.status {
                eqdd_core::homotopy::SummandStatus::Stable => "stable",
                eqdd_core::homotopy::SummandStatus::U1 => "circle",
                eqdd_core::homotopy::SummandStatus::Unstable => "unstable, omitted",
            };
            let _ = writeln!(text, "block t^{} (size {}): {status}", s.label, s.size);
        }
        let warnings = fin.group.warnings.clone();
        let mut out = Outcome::new(Some(cp), to_value(&fin), text);
        out.warnings = warnings;
        return Ok(out);
    }
    if args.unitary_limit {
        let group = pi_u_limit(&cp, m);
        let text = format!("pi_{m}(U of the limit) = {group}\n");
        let result = json!({"m": m, "group": to_value(&group)});
        return Ok(Outcome::new(Some(cp), result, text));
    }
    let ring = make_ring(&cp, settings)?;
    let group = pi_aut(&ring, m);
    let text = format!("pi_{m}(Aut) = {group}\n");
    let warnings = group.warnings.clone();
    let result = json!({"m": m, "group": to_value(&group)});
    let mut out = Outcome::new(Some(cp), result, text);
    out.warnings = warnings;
    Ok(out)
}

pub fn coeffs(ring: &Ring, k_min: i64, k_max: i64) -> Result<Outcome, CliError> {
    if k_min > k_max {
        return Err(CliError::usage(format!(
            "empty degree range: k_min = {k_min} > k_max = {k_max}"
        )));
    }
    let rows = coefficients_table(ring, k_min, k_max);
    let mut text = String::new();
    let mut warnings = Vec::new();
    for row in rows.iter().rev() {
        let _ = writeln!(text, "E^{} = {}", row.k, row.group);
        warnings.extend(row.group.warnings.iter().cloned());
    }
    let mut out = Outcome::new(Some(ring.p().clone()), to_value(&rows), text);
    out.warnings = warnings;
    Ok(out)
}

// ---------------------------------------------------------------------------
// cohomology commands
// ---------------------------------------------------------------------------

pub fn parse_space(spec: &str) -> Result<CWDescription, CliError> {
    if spec == "pt" {
        return Ok(point());
    }
    if let Some(n) = spec.strip_prefix("T^") {
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::usage(format!("invalid torus dimension {n:?}")))?;
        if n > 16 {
            return Err(CliError::usage("torus dimension capped at 16"));
        }
        return Ok(torus(n));
    }
    if let Some(n) = spec.strip_prefix("S^") {
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::usage(format!("invalid sphere dimension {n:?}")))?;
        if n > 32 {
            return Err(CliError::usage("sphere dimension capped at 32"));
        }
        return Ok(sphere(n));
    }
    if std::path::Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::domain(format!("cannot read space {spec}: {e}")))?;
        let x: CWDescription = serde_json::from_str(&text)
            .map_err(|e| CliError::domain(format!("invalid space description {spec}: {e}")))?;
        x.validate()?;
        return Ok(x);
    }
    Err(CliError::usage(format!(
        "--space takes pt, T^n, S^n, or a path to a JSON space description; got {spec:?}"
    )))
}

pub fn torus_cmd(ring: &Ring, n: u32) -> Result<Outcome, CliError> {
    let x = torus(n);
    let group = e1_group(ring, &x)?;
    let text = format!("E_1({}) = {group}\n", x.name);
    let warnings = group.warnings.clone();
    let result = json!({"space": x.name, "e1": to_value(&group)});
    let mut out = Outcome::new(Some(ring.p().clone()), result, text);
    out.warnings = warnings;
    Ok(out)
}

pub fn cw(ring: &Ring, x: &CWDescription) -> Result<Outcome, CliError> {
    let page = e2_page(ring, x)?;
    let mut warnings = page.warnings.clone();
    let (e1, e1_note) = match e1_group(ring, x) {
        Ok(group) => {
            warnings.extend(group.warnings.iter().cloned());
            (Some(group), None)
        }
        Err(e @ CohomologyError::TorsionUnsupported { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut text = page.to_string();
    match (&e1, &e1_note) {
        (Some(group), _) => {
            let _ = writeln!(text, "E_1({}) = {group}", x.name);
        }
        (None, Some(note)) => {
            let _ = writeln!(text, "E_1({}): {note}", x.name);
        }
        _ => unreachable!(),
    }
    let result = json!({
        "space": to_value(x),
        "page": to_value(&page),
        "e1": to_value(&e1),
        "e1_note": e1_note,
    });
    let mut out = Outcome::new(Some(ring.p().clone()), result, text);
    out.warnings = dedup_warnings(warnings);
    Ok(out)
}

pub fn brauer(x: &CWDescription, k: u32) -> Result<Outcome, CliError> {
    x.validate()?;
    let group = brauer_trivial_d(x, k);
    let text = format!("H^{k} + H^{} over {} = {group}\n", k + 2, x.name);
    let result = json!({"space": x.name, "k": k, "group": to_value(&group)});
    Ok(Outcome::new(None, result, text))
}

// ---------------------------------------------------------------------------
// appendix
// ---------------------------------------------------------------------------

pub fn appendix(cp: CharacterPolynomial, m: Option<u32>, cap: u32) -> Result<Outcome, CliError> {
    let p = cp.poly();
    let large = has_large_middle(p)?;
    let minimal = minimal_large_middle_power(p, cap);
    let mut text = format!("large middle: {large}\n");
    match minimal {
        Some(n) => {
            let _ = writeln!(text, "least large-middle power: {n}");
        }
        None => {
            let _ = writeln!(text, "no large-middle power up to {cap}");
        }
    }
    let growth = match m {
        Some(m) => {
            let report = check_growth(p, m)?;
            let _ = writeln!(
                text,
                "growth of p^{m}: strict {}, relaxed {}",
                if report.strict_ok() { "ok" } else { "violated" },
                if report.relaxed_ok() {
                    "ok"
                } else {
                    "violated"
                },
            );
            for v in &report.violations_strict {
                let _ = writeln!(text, "  interior coefficient b_{} = {} <= m", v.i, v.b);
            }
            for e in &report.endpoint_checks {
                let _ = writeln!(
                    text,
                    "  endpoint b_{} = {} ({} m)",
                    e.i,
                    e.b,
                    if e.exceeds_m { ">" } else { "<=" }
                );
            }
            Some(report)
        }
        None => None,
    };
    let result = json!({
        "large_middle": large,
        "minimal_power": minimal,
        "cap": cap,
        "growth": to_value(&growth),
    });
    Ok(Outcome::new(Some(cp), result, text))
}

// ---------------------------------------------------------------------------
// paper-report
// ---------------------------------------------------------------------------

fn dedup_warnings(warnings: Vec<Warning>) -> Vec<Warning> {
    let mut seen = std::collections::BTreeSet::new();
    warnings
        .into_iter()
        .filter(|w| seen.insert((w.code.clone(), w.detail.clone())))
        .collect()
}

pub fn paper_report(
    cp: CharacterPolynomial,
    n_max: u32,
    settings: &Settings,
) -> Result<Outcome, CliError> {
    let ring = make_ring(&cp, settings)?;
    let case = endpoint_case(&cp);
    let mut warnings = Vec::new();
    let mut text = format!(
        "character p = {cp} (degree {}, endpoint case {case:?}: {})\n",
        cp.d(),
        case.subring()
    );

    text.push_str("\nhomotopy of the automorphism group\n");
    let mut pi_rows = Vec::new();
    for m in 0..=6u32 {
        let group = pi_aut(&ring, m);
        warnings.extend(group.warnings.iter().cloned());
        let _ = writeln!(text, "  pi_{m} = {group}");
        pi_rows.push(json!({"m": m, "group": to_value(&group)}));
    }

    text.push_str("\ncoefficient groups\n");
    let rows = coefficients_table(&ring, -8, 3);
    for row in rows.iter().rev() {
        let _ = writeln!(text, "  E^{} = {}", row.k, row.group);
    }

    text.push_str("\ndegree-1 groups over tori\n");
    let mut tori = Vec::new();
    let mut comparison = Vec::new();
    for n in 1..=n_max {
        let x = torus(n);
        let e1 = e1_group(&ring, &x)?;
        warnings.extend(e1.warnings.iter().cloned());
        let _ = writeln!(text, "  {}: {e1}", x.name);
        tori.push(json!({"n": n, "e1": to_value(&e1)}));
        let trivial = brauer_trivial_d(&x, 1);
        comparison.push((n, x.name.clone(), e1, trivial));
    }

    text.push_str("\ncomparison with a plain matrix fibre (degree 1)\n");
    let comparison: Vec<Value> = comparison
        .into_iter()
        .map(|(n, name, e1, trivial)| {
            let mut stripped = e1.clone();
            stripped.warnings.clear();
            stripped.generators = None;
            stripped.partial = false;
            let matches = stripped == trivial;
            let _ = writeln!(
                text,
                "  {name}: {trivial}{}",
                if matches {
                    " (matches)"
                } else {
                    " (differs from the equivariant answer)"
                }
            );
            json!({"n": n, "group": to_value(&trivial), "matches_e1": matches})
        })
        .collect();

    let result = json!({
        "endpoint_case": to_value(&case),
        "pi_aut": pi_rows,
        "coefficients": to_value(&rows),
        "tori": tori,
        "trivial_fibre_comparison": comparison,
    });
    let mut out = Outcome::new(Some(cp), result, text);
    out.warnings = dedup_warnings(warnings);
    Ok(out)
}

pub fn make_ring(cp: &CharacterPolynomial, settings: &Settings) -> Result<Ring, CliError> {
    Ok(Ring::with_options(
        cp.clone(),
        eqdd_core::locring::RingOptions {
            search_bound: settings.search_bound,
            degree_cap: settings.degree_cap,
        },
    )?)
}
