use std::fmt::Write as _;
use std::path::Path;

use hanflab::census::{census, hanf_equivalent, hanf_full, HanfVerdict};
use hanflab::fologic::{ef_equivalent, eval, localize, parse, parse_unchecked, Assignment, Formula};
use hanflab::invariance::{eval_invariant_with, is_invariant, EvalMode, InvariantQuery, QueryBundle};
use hanflab::lab::{
    cycle_pair, ef_indistinguishability_demo, generate_corpus, greedy_scatter, locality_search, max_scatter,
    minimal_locality_parameters, scattered_check, wideness_estimate, Corpus, CorpusSpec, LocalityReport, Query,
    WIDENESS_LIMIT,
};
use hanflab::presentations::check::power_bound;
use hanflab::presentations::{
    check_degree_bound, check_disjoint_amalgamation, check_elementary, check_elementary_with, check_localization,
    check_neighborhood_bound, enumerate_tables, scheme_by_name, validate_presentation, CheckOptions,
    PresentationScheme,
};
use hanflab::structures::{Element, Radius, Signature, Structure};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::output::{CliError, Outcome};

/// Settings shared by every command.
pub struct Context {
    pub budget: u64,
    pub seed: Option<u64>,
}

type Res = Result<Outcome, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load(path: &Path) -> Result<Structure, CliError> {
    Structure::from_json(&read(path)?).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn formula_text(f: &FormulaArgs) -> Result<String, CliError> {
    match (&f.formula, &f.formula_file) {
        (Some(t), _) => Ok(t.clone()),
        (None, Some(p)) => Ok(read(p)?.trim().to_string()),
        (None, None) => Err(CliError::usage(
            "a formula is required: pass --formula or --formula-file",
        )),
    }
}

fn radius(s: &str) -> Result<Radius, CliError> {
    s.parse().map_err(CliError::usage)
}

fn threshold(s: &str) -> Result<hanflab::Threshold, CliError> {
    s.parse().map_err(CliError::usage)
}

fn elements(s: &str) -> Result<Vec<Element>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("invalid element {p:?}")))
        })
        .collect()
}

fn scheme(name: &str) -> Result<Box<dyn PresentationScheme>, CliError> {
    Ok(scheme_by_name(name)?)
}

fn corpus(ctx: &Context, spec: &str) -> Result<Corpus, CliError> {
    let mut spec: CorpusSpec = spec.parse()?;
    if let (CorpusSpec::Random { seed, .. }, Some(s)) = (&mut spec, ctx.seed) {
        *seed = s;
    }
    Ok(generate_corpus(&spec)?)
}

fn query(q: &QueryArgs) -> Result<Query, CliError> {
    if let Some(path) = &q.query_file {
        return Ok(Query::Invariant(InvariantQuery::from_bundle(&read(path)?)?));
    }
    let text = formula_text(&q.formula)?;
    match &q.scheme {
        Some(s) => {
            let bundle = QueryBundle {
                scheme: s.clone(),
                sentence: text,
                class: q.class.clone(),
            };
            Ok(Query::Invariant(bundle.resolve()?))
        }
        None if q.class.is_some() => Err(CliError::usage("--class needs --scheme")),
        None => {
            let phi = parse_unchecked(&text)?;
            if !phi.is_sentence() {
                return Err(CliError::new("not_a_sentence", format!("{phi} has free variables")));
            }
            Ok(Query::Sentence(phi))
        }
    }
}

fn verdict_word(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn run(cmd: &Command, ctx: &Context) -> Res {
    match cmd {
        Command::Structure(c) => structure(c),
        Command::Fo(c) => fo(c),
        Command::Ef(c) => ef(c),
        Command::Hanf(c) => hanf(c),
        Command::Present(c) => present(c, ctx),
        Command::Invariance(c) => invariance(c, ctx),
        Command::Lab(c) => lab(c, ctx),
    }
}

fn structure(cmd: &StructureCmd) -> Res {
    match cmd {
        StructureCmd::Validate { file } => {
            let text = read(file)?;
            match Structure::from_json(&text) {
                Ok(a) => {
                    let relations: Vec<_> = a
                        .signature()
                        .relations()
                        .iter()
                        .zip(a.tables())
                        .map(|(r, t)| json!({"name": r.name, "arity": r.arity, "tuples": t.len()}))
                        .collect();
                    let text = format!("valid: universe {}, {} relation(s)", a.universe(), relations.len());
                    Ok(Outcome::new(
                        json!({"valid": true, "universe": a.universe(), "relations": relations,
                               "constants": a.signature().constants()}),
                        Some(true),
                        text,
                    ))
                }
                Err(errs) => {
                    let messages: Vec<String> = errs.0.iter().map(ToString::to_string).collect();
                    let mut text = String::from("invalid:");
                    for m in &messages {
                        let _ = write!(text, "\n  {m}");
                    }
                    Ok(Outcome::new(
                        json!({"valid": false, "errors": messages}),
                        Some(false),
                        text,
                    ))
                }
            }
        }
        StructureCmd::Gaifman { file } => {
            let a = load(file)?;
            let g = a.gaifman();
            let profile = g.degree_profile();
            let components = g.components();
            let text = format!(
                "{} vertices, {} edges, max degree {}, {} component(s)",
                a.universe(),
                g.edges().len(),
                profile.max_degree,
                components.len()
            );
            Ok(Outcome::new(
                json!({"universe": a.universe(), "edges": g.edges(), "degrees": profile.degrees,
                       "max_degree": profile.max_degree, "components": components}),
                None,
                text,
            ))
        }
        StructureCmd::Census { file, r } => {
            let a = load(file)?;
            let c = census(&a, radius(r)?);
            let mut text = format!(
                "radius {}: {} type(s) over {} element(s)",
                c.radius,
                c.type_count(),
                c.total
            );
            for (k, e) in &c.types {
                let _ = write!(text, "\n  {}  size {}  count {}", short_key(k), e.size, e.count);
            }
            Ok(Outcome::new(&c, None, text))
        }
    }
}

fn short_key(k: &[u8]) -> String {
    let h = hex_string(k);
    if h.len() > 16 {
        format!("{}…", &h[..16])
    } else {
        h
    }
}

fn hex_string(k: &[u8]) -> String {
    k.iter().map(|b| format!("{b:02x}")).collect()
}

fn signature_of(path: &Option<std::path::PathBuf>) -> Result<Signature, CliError> {
    match path {
        Some(p) => Ok(load(p)?.signature().clone()),
        None => Ok(Signature::graph()),
    }
}

fn describe(phi: &Formula) -> serde_json::Value {
    json!({
        "formula": phi.to_string(),
        "quantifier_rank": phi.quantifier_rank(),
        "free_variables": phi.free_variables(),
        "sentence": phi.is_sentence(),
    })
}

fn fo(cmd: &FoCmd) -> Res {
    match cmd {
        FoCmd::Parse { formula, structure } => {
            let text = formula_text(formula)?;
            let phi = match structure {
                Some(_) => parse(&text, &signature_of(structure)?)?,
                None => parse_unchecked(&text)?,
            };
            let out = format!("{phi}\nquantifier rank {}", phi.quantifier_rank());
            Ok(Outcome::new(describe(&phi), None, out))
        }
        FoCmd::Rank { formula } => {
            let phi = parse_unchecked(&formula_text(formula)?)?;
            let q = phi.quantifier_rank();
            Ok(Outcome::new(json!({"quantifier_rank": q}), None, q.to_string()))
        }
        FoCmd::Eval { file, formula, assign } => {
            let a = load(file)?;
            let phi = parse(&formula_text(formula)?, a.signature())?;
            let mut sigma = Assignment::new();
            if let Some(binds) = assign {
                for part in binds.split(',').filter(|p| !p.trim().is_empty()) {
                    let (v, e) = part
                        .split_once('=')
                        .ok_or_else(|| CliError::usage(format!("invalid binding {part:?}, expected var=element")))?;
                    let e: Element = e
                        .trim()
                        .parse()
                        .map_err(|_| CliError::usage(format!("invalid element in binding {part:?}")))?;
                    sigma.insert(v.trim().to_string(), e);
                }
            }
            let value = eval(&a, &phi, &sigma)?;
            Ok(Outcome::new(json!({"value": value}), Some(value), verdict_word(value)))
        }
        FoCmd::Localize {
            formula,
            r,
            centers,
            structure,
        } => {
            let sig = signature_of(structure)?;
            let phi = parse_unchecked(&formula_text(formula)?)?;
            let names: Vec<&str> = centers.split(',').map(str::trim).filter(|c| !c.is_empty()).collect();
            let l = localize(&sig, &phi, *r, &names)?;
            let renamed: Vec<_> = l.renamed.iter().map(|(a, b)| json!({"from": a, "to": b})).collect();
            let mut result = describe(&l.formula);
            result["renamed"] = json!(renamed);
            Ok(Outcome::new(result, None, l.formula.to_string()))
        }
    }
}

fn ef(cmd: &EfCmd) -> Res {
    match cmd {
        EfCmd::Compare { a, b, q } => {
            let (a, b) = (load(a)?, load(b)?);
            let eq = ef_equivalent(&a, &b, *q)?;
            let text = format!("{} at rank {q}", if eq { "equivalent" } else { "distinguishable" });
            Ok(Outcome::new(json!({"q": q, "equivalent": eq}), Some(eq), text))
        }
        EfCmd::Demo { q, m_min, m_max } => {
            if *m_min < 3 || m_min > m_max {
                return Err(CliError::usage("need 3 <= m-min <= m-max"));
            }
            let m = ef_indistinguishability_demo(&cycle_pair, *m_min..=*m_max, *q)?;
            let text = match m {
                Some(m) => format!("least m = {m}"),
                None => format!("no m in {m_min}..={m_max}"),
            };
            Ok(Outcome::new(
                json!({"q": q, "m_min": m_min, "m_max": m_max, "least_m": m}),
                Some(m.is_some()),
                text,
            ))
        }
    }
}

fn hanf_text(v: &HanfVerdict) -> String {
    let mut text = format!(
        "{} at r={} t={}",
        if v.equivalent { "equivalent" } else { "not equivalent" },
        v.r,
        v.t
    );
    for w in &v.witnesses {
        let _ = write!(
            text,
            "\n  type {} (size {}): {} vs {}",
            short_key(&w.key),
            w.size,
            w.count_a,
            w.count_b
        );
    }
    text
}

fn hanf(cmd: &HanfCmd) -> Res {
    let HanfCmd::Compare { a, b, r, t, full } = cmd;
    let (a, b) = (load(a)?, load(b)?);
    let v = if *full {
        hanf_full(&a, &b)?
    } else {
        hanf_equivalent(&a, &b, radius(r)?, threshold(t)?)?
    };
    Ok(Outcome::new(&v, Some(v.equivalent), hanf_text(&v)))
}

fn passed_text(what: &str, passed: bool, checked: u64) -> String {
    format!(
        "{what}: {} ({checked} presentation(s) checked)",
        if passed { "pass" } else { "fail" }
    )
}

fn present(cmd: &PresentCmd, ctx: &Context) -> Res {
    match cmd {
        PresentCmd::Enumerate { file, scheme: name } => {
            let a = load(file)?;
            let s = scheme(name)?;
            let tables = enumerate_tables(s.as_ref(), &a, ctx.budget)?;
            let text = format!("{} presentation(s) under {}", tables.len(), s.name());
            Ok(Outcome::new(
                json!({"scheme": s.name(), "symbol": s.symbol().name, "count": tables.len(), "presentations": tables}),
                None,
                text,
            ))
        }
        PresentCmd::Validate {
            structure,
            expansion,
            scheme: name,
        } => {
            let (a, e) = (load(structure)?, load(expansion)?);
            let s = scheme(name)?;
            let ok = validate_presentation(s.as_ref(), &e, &a)?;
            Ok(Outcome::new(
                json!({"scheme": s.name(), "valid": ok}),
                Some(ok),
                verdict_word(ok),
            ))
        }
        PresentCmd::Check {
            kind,
            scheme: name,
            corpus: spec,
            nu,
            formula,
        } => {
            let s = scheme(name)?;
            let c = corpus(ctx, spec)?;
            let opts = CheckOptions { budget: ctx.budget };
            let structures = &c.structures;
            let declared = || {
                nu.or(s.declared_nu())
                    .ok_or_else(|| CliError::usage(format!("scheme {} declares no nu; pass --nu", s.name())))
            };
            fn finish<R: Serialize>(r: &R, passed: bool, text: String) -> Res {
                Ok(Outcome::new(r, Some(passed), text))
            }
            match kind {
                CheckKind::Elementary => {
                    let r = if formula.formula.is_some() || formula.formula_file.is_some() {
                        let theta = parse_unchecked(&formula_text(formula)?)?;
                        check_elementary_with(s.as_ref(), structures, &theta, opts)?
                    } else {
                        check_elementary(s.as_ref(), structures, opts)?
                    };
                    let ok = r.passed();
                    finish(&r, ok, passed_text("elementary", ok, r.expansions_checked))
                }
                CheckKind::Nbbound => {
                    let r = check_neighborhood_bound(s.as_ref(), structures, declared()?, opts)?;
                    let ok = r.passed();
                    let mut text =
                        passed_text(&format!("neighbourhood bound nu={}", r.nu), ok, r.presentations_checked);
                    if let Some(w) = &r.witness {
                        let _ = write!(
                            text,
                            "\n  element {} has presentation neighbour {}",
                            w.element, w.neighbor
                        );
                    }
                    finish(&r, ok, text)
                }
                CheckKind::Degbound => {
                    let bound = power_bound(declared()?);
                    let r = check_degree_bound(s.as_ref(), structures, &bound, opts)?;
                    let ok = r.passed();
                    finish(&r, ok, passed_text("degree bound", ok, r.presentations_checked))
                }
                CheckKind::Localization => {
                    let r = check_localization(s.as_ref(), structures, opts)?;
                    let ok = r.passed();
                    let mut text = passed_text("localization", ok, r.presentations_checked);
                    if let Some(w) = &r.witness {
                        let _ = write!(text, "\n  restriction to {:?} is not a presentation", w.subset);
                    }
                    finish(&r, ok, text)
                }
                CheckKind::Amalgamation => {
                    let r = check_disjoint_amalgamation(s.as_ref(), structures, opts)?;
                    let ok = r.passed();
                    let mut text = passed_text("disjoint amalgamation", ok, r.presentations_checked);
                    if let Some(w) = &r.witness {
                        let _ = write!(text, "\n  pieces {:?} and {:?} do not amalgamate", w.b, w.c);
                    }
                    finish(&r, ok, text)
                }
            }
        }
    }
}

fn invariance(cmd: &InvarianceCmd, ctx: &Context) -> Res {
    match cmd {
        InvarianceCmd::Check {
            scheme: name,
            formula,
            corpus: spec,
        } => {
            let s = scheme(name)?;
            let theta = parse_unchecked(&formula_text(formula)?)?;
            if !theta.is_sentence() {
                return Err(CliError::new("not_a_sentence", format!("{theta} has free variables")));
            }
            let c = corpus(ctx, spec)?;
            let v = is_invariant(&theta, s.as_ref(), &c.structures, ctx.budget)?;
            let mut text = format!(
                "{} ({} structure(s), {} presentation(s) checked)",
                if v.invariant_on_corpus {
                    "invariant"
                } else {
                    "not invariant"
                },
                v.structures_checked,
                v.presentations_checked
            );
            if let Some(ce) = &v.counterexample {
                let _ = write!(
                    text,
                    "\n  structure {}\n  {} under {}\n  {} under {}",
                    ce.structure.to_json(),
                    ce.first_value,
                    ce.first.to_json(),
                    ce.second_value,
                    ce.second.to_json()
                );
            }
            Ok(Outcome::new(&v, Some(v.invariant_on_corpus), text))
        }
        InvarianceCmd::Eval {
            file,
            query: q,
            unsafe_first,
            reversed,
        } => {
            let a = load(file)?;
            let query = match query(q)? {
                Query::Invariant(iq) => iq,
                Query::Sentence(_) => {
                    return Err(CliError::usage("invariant evaluation needs --scheme or --query-file"))
                }
            };
            let mode = if *unsafe_first {
                EvalMode::UnsafeFirstOnly
            } else if *reversed {
                EvalMode::Reversed
            } else {
                EvalMode::Certified
            };
            let value = eval_invariant_with(&query, &a, ctx.budget, mode)?;
            let mode_name = match mode {
                EvalMode::Certified => "certified",
                EvalMode::Reversed => "reversed",
                EvalMode::UnsafeFirstOnly => "unsafe",
            };
            Ok(Outcome::new(
                json!({"scheme": query.scheme.name(), "sentence": query.sentence.to_string(),
                       "class": query.class.to_string(), "mode": mode_name, "value": value}),
                Some(value),
                verdict_word(value),
            ))
        }
    }
}

fn locality_text(r: &LocalityReport) -> String {
    let mut text = format!(
        "{} violation(s) among {} pair(s) at r={} t={}",
        r.violations.len(),
        r.pairs_examined,
        r.r,
        r.t
    );
    for v in &r.violations {
        let _ = write!(text, "\n  #{} ({}) vs #{} ({})", v.a, v.value_a, v.b, v.value_b);
    }
    text
}

fn lab(cmd: &LabCmd, ctx: &Context) -> Res {
    match cmd {
        LabCmd::Locality {
            query: q,
            corpus: spec,
            r,
            t,
        } => {
            let query = query(q)?;
            let c = corpus(ctx, spec)?;
            let report = locality_search(&query, &c, radius(r)?, threshold(t)?, ctx.budget)?;
            let text = locality_text(&report);
            Ok(Outcome::new(&report, Some(report.local()), text))
        }
        LabCmd::Minimal {
            query: q,
            corpus: spec,
            r_max,
            t_max,
        } => {
            let query = query(q)?;
            let c = corpus(ctx, spec)?;
            let p = minimal_locality_parameters(&query, &c, *r_max, *t_max, ctx.budget)?;
            let text = match p {
                Some(p) => format!("r = {}, t = {}", p.r, p.t),
                None => format!("none with r <= {r_max}, t <= {t_max}"),
            };
            Ok(Outcome::new(
                json!({"query": query.to_string(), "corpus": c.spec, "seed": c.seed, "r_max": r_max,
                       "t_max": t_max, "parameters": p}),
                Some(p.is_some()),
                text,
            ))
        }
        LabCmd::Scatter {
            file,
            r,
            candidates,
            away,
            check,
        } => {
            let a = load(file)?;
            let r = radius(r)?;
            let away = match away {
                Some(s) => elements(s)?,
                None => Vec::new(),
            };
            if let Some(x) = check {
                let x = elements(x)?;
                let ok = scattered_check(&a, &x, r, &away)?;
                return Ok(Outcome::new(
                    json!({"set": x, "away_from": away, "r": r, "scattered": ok}),
                    Some(ok),
                    verdict_word(ok),
                ));
            }
            let cands = match candidates {
                Some(s) => elements(s)?,
                None => (0..a.universe()).collect(),
            };
            let g = greedy_scatter(&a, &cands, r, &away)?;
            let maximum = if a.universe() <= WIDENESS_LIMIT {
                Some(max_scatter(&a, &cands, r, &away)?)
            } else {
                None
            };
            let mut text = format!("greedy {:?} (size {})", g.set, g.set.len());
            if let Some(m) = maximum {
                let _ = write!(text, ", maximum {m}");
            }
            let _ = write!(
                text,
                "\nlower bound {} {}",
                g.lower_bound,
                if g.bound_holds { "holds" } else { "fails" }
            );
            Ok(Outcome::new(
                json!({"r": r, "candidates": cands, "away_from": away, "greedy": g, "maximum": maximum}),
                None,
                text,
            ))
        }
        LabCmd::Wideness { corpus: spec, r, p, q } => {
            let c = corpus(ctx, spec)?;
            let t = wideness_estimate(&c, radius(r)?, *p, *q)?;
            let mut text = format!("r={} q={} on {}", t.r, t.q, t.corpus);
            for row in &t.rows {
                let _ = write!(text, "\n  m={}  zeta={}", row.m, row.zeta);
            }
            Ok(Outcome::new(&t, None, text))
        }
        LabCmd::Gen { corpus: spec } => {
            let c = corpus(ctx, spec)?;
            let mut text = format!("{} structure(s) from {}", c.len(), c.spec);
            if let Some(seed) = c.seed {
                let _ = write!(text, " (seed {seed})");
            }
            Ok(Outcome::new(&c, None, text))
        }
    }
}
