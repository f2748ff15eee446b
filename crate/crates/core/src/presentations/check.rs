//! Corpus-bounded checkers for elementarity, neighbourhood and degree
//! bounds, localization and disjoint local amalgamation.

use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::fologic::{Compiled, Formula, Model};
use crate::structures::{Element, Structure, Table};

use super::code::{
    automorphisms, disjoint_pair_representatives, mask_elements, mask_flags, subset_representatives, Code, Frame,
};
use super::{admit, default_budget, enumerate_tables, expand, for_each_within, PresentationError, PresentationScheme};

const CHUNK: usize = 1 << 14;

/// Largest universe for exhaustive subset checks.
pub const LOCALIZATION_LIMIT: usize = 16;
/// Largest universe for exhaustive disjoint pair checks.
pub const AMALGAMATION_LIMIT: usize = 10;
/// Tuple spaces up to this size get every possible table in the elementary check.
pub const EXHAUSTIVE_EXPANSIONS: usize = 16;
const RANDOM_EXPANSIONS: usize = 256;
const FLIPPED_PRESENTATIONS: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: default_budget(),
        }
    }
}

fn max_universe(corpus: &[Structure]) -> usize {
    corpus.iter().map(Structure::universe).max().unwrap_or(0)
}

/// Streams presentation codes in chunks; stops when `f` breaks.
fn stream_codes(
    s: &dyn PresentationScheme,
    a: &Structure,
    frame: &Frame,
    budget: u64,
    mut f: impl FnMut(&[Code], usize) -> ControlFlow<()>,
) -> Result<u64, PresentationError> {
    let mut chunk = Vec::with_capacity(CHUNK);
    let mut offset = 0usize;
    let mut stopped = false;
    let seen = for_each_within(s, a, budget, &mut |t| {
        chunk.push(frame.encode(t));
        if chunk.len() == CHUNK {
            let flow = f(&chunk, offset);
            offset += chunk.len();
            chunk.clear();
            if flow.is_break() {
                stopped = true;
                return flow;
            }
        }
        ControlFlow::Continue(())
    })?;
    if !stopped && !chunk.is_empty() {
        let _ = f(&chunk, offset);
    }
    Ok(seen)
}

/// An expansion on which the validity test and the sentence disagree.
#[derive(Debug, Clone, Serialize)]
pub struct ElementaryDisagreement {
    pub structure: Structure,
    pub expansion: Structure,
    pub checker: bool,
    pub sentence: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ElementaryReport {
    pub scheme: String,
    pub corpus_size: usize,
    pub max_universe: usize,
    pub expansions_checked: u64,
    pub disagreement: Option<ElementaryDisagreement>,
}

impl ElementaryReport {
    pub fn passed(&self) -> bool {
        self.disagreement.is_none()
    }
}

/// Candidate expansions: every table for tiny tuple spaces, otherwise all
/// presentations, their single-tuple flips, and seeded random tables.
fn candidate_tables(s: &dyn PresentationScheme, a: &Structure, budget: u64) -> Result<Vec<Table>, PresentationError> {
    let k = s.symbol().arity;
    let frame = Frame::new(a.universe(), k);
    let space = a.universe().pow(k as u32);
    if space <= EXHAUSTIVE_EXPANSIONS {
        let all: Vec<Vec<Element>> = (0..space).map(|i| frame.decode_index(i)).collect();
        return Ok((0u32..1 << space)
            .map(|m| Table::from_tuples(k, (0..space).filter(|&i| m >> i & 1 == 1).map(|i| &all[i])))
            .collect());
    }
    let presentations = enumerate_tables(s, a, budget)?;
    let mut out = presentations.clone();
    for p in presentations.iter().take(FLIPPED_PRESENTATIONS) {
        let code = frame.encode(p);
        for i in 0..space {
            out.push(frame.decode(&frame.flip(&code, i)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for j in 0..RANDOM_EXPANSIONS {
        let density = [0.5, 0.1, 0.02][j % 3];
        let rows = (0..space)
            .filter(|_| rng.random_bool(density))
            .map(|i| frame.decode_index(i));
        out.push(Table::from_tuples(k, rows.collect::<Vec<_>>()));
    }
    Ok(out)
}

fn elementary(
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    theta: &dyn Fn(&Structure) -> Result<Formula, PresentationError>,
    opts: CheckOptions,
) -> Result<ElementaryReport, PresentationError> {
    let mut report = ElementaryReport {
        scheme: s.name(),
        corpus_size: corpus.len(),
        max_universe: max_universe(corpus),
        expansions_checked: 0,
        disagreement: None,
    };
    for a in corpus {
        admit(s, a)?;
        let phi = theta(a)?;
        let tables = candidate_tables(s, a, opts.budget)?;
        let first = tables
            .par_iter()
            .enumerate()
            .map(|(i, t)| -> Result<Option<(usize, bool, bool)>, PresentationError> {
                let e = expand(s, a, t.clone())?;
                let compiled = Compiled::new(&e, &phi, &[])?;
                let value = compiled.eval(&Model::new(&e), &[]);
                let valid = s.is_valid(a, t);
                Ok((valid != value).then_some((i, valid, value)))
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .next();
        report.expansions_checked += tables.len() as u64;
        if let Some((i, checker, sentence)) = first {
            report.disagreement = Some(ElementaryDisagreement {
                structure: a.clone(),
                expansion: expand(s, a, tables[i].clone())?,
                checker,
                sentence,
            });
            break;
        }
    }
    Ok(report)
}

/// Compares the validity test with the scheme's own sentence.
pub fn check_elementary(
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    opts: CheckOptions,
) -> Result<ElementaryReport, PresentationError> {
    elementary(
        s,
        corpus,
        &|a| {
            s.validity_sentence(a)
                .ok_or_else(|| PresentationError::NoSentence(s.name()))
        },
        opts,
    )
}

/// Compares the validity test with a caller-supplied sentence.
pub fn check_elementary_with(
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    theta: &Formula,
    opts: CheckOptions,
) -> Result<ElementaryReport, PresentationError> {
    elementary(
        s,
        corpus,
        &|a| Ok(theta.bind(&a.signature().with_relation(s.symbol())?)?),
        opts,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct NeighborhoodWitness {
    pub structure: Structure,
    pub presentation: Structure,
    pub element: Element,
    pub neighbor: Element,
    /// Distance in the original structure; `None` when disconnected.
    pub distance: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NeighborhoodBoundReport {
    pub scheme: String,
    pub nu: usize,
    pub corpus_size: usize,
    pub max_universe: usize,
    pub presentations_checked: u64,
    pub witness: Option<NeighborhoodWitness>,
}

impl NeighborhoodBoundReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Every presentation edge joins elements at distance at most `nu` in the
/// original Gaifman graph.
pub fn check_neighborhood_bound(
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    nu: usize,
    opts: CheckOptions,
) -> Result<NeighborhoodBoundReport, PresentationError> {
    let mut report = NeighborhoodBoundReport {
        scheme: s.name(),
        nu,
        corpus_size: corpus.len(),
        max_universe: max_universe(corpus),
        presentations_checked: 0,
        witness: None,
    };
    let k = s.symbol().arity;
    for a in corpus {
        let n = a.universe();
        let dist = a.gaifman().distance_matrix();
        let far = |x: Element, y: Element| x != y && dist[x][y].is_none_or(|d| d > nu);
        let frame = Frame::new(n, k);
        let bad_tuples: Vec<Vec<Element>> = (0..n.pow(k as u32))
            .map(|i| frame.decode_index(i))
            .filter(|t| t.iter().any(|&x| t.iter().any(|&y| far(x, y))))
            .collect();
        let bad = frame.encode(&Table::from_tuples(k, &bad_tuples));
        let mut hit: Option<Code> = None;
        report.presentations_checked += stream_codes(s, a, &frame, opts.budget, |chunk, _| {
            match chunk.iter().find(|c| !c.and(&bad).is_zero()) {
                Some(c) => {
                    hit = Some(c.clone());
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        })?;
        if let Some(code) = hit {
            let table = frame.decode(&code);
            let row = table
                .iter()
                .find(|t| t.iter().any(|&x| t.iter().any(|&y| far(x, y))))
                .unwrap()
                .to_vec();
            let (x, y) = row
                .iter()
                .flat_map(|&x| row.iter().map(move |&y| (x, y)))
                .find(|&(x, y)| far(x, y))
                .unwrap();
            report.witness = Some(NeighborhoodWitness {
                structure: a.clone(),
                presentation: expand(s, a, table)?,
                element: x,
                neighbor: y,
                distance: dist[x][y],
            });
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeWitness {
    pub structure: Structure,
    pub presentation: Structure,
    pub element: Element,
    pub degree: usize,
    pub max_degree: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeBoundReport {
    pub scheme: String,
    pub corpus_size: usize,
    pub max_universe: usize,
    pub presentations_checked: u64,
    pub witness: Option<DegreeWitness>,
}

impl DegreeBoundReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// `d^nu`, saturating.
pub fn power_bound(nu: usize) -> impl Fn(usize) -> usize {
    move |d| d.saturating_pow(nu as u32)
}

/// Every presentation of a structure of maximum degree `d` has Gaifman
/// degree at most `bound(d)`.
pub fn check_degree_bound(
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    bound: &dyn Fn(usize) -> usize,
    opts: CheckOptions,
) -> Result<DegreeBoundReport, PresentationError> {
    let mut report = DegreeBoundReport {
        scheme: s.name(),
        corpus_size: corpus.len(),
        max_universe: max_universe(corpus),
        presentations_checked: 0,
        witness: None,
    };
    for a in corpus {
        let n = a.universe();
        let g = a.gaifman();
        let d = g.degree_profile().max_degree;
        let limit = bound(d);
        let words = n.div_ceil(64).max(1);
        let mut base = vec![0u64; n * words];
        for (x, y) in g.edges() {
            base[x * words + y / 64] |= 1 << (y % 64);
            base[y * words + x / 64] |= 1 << (x % 64);
        }
        let mut found: Option<(Table, Element, usize)> = None;
        let mut seen = 0u64;
        for_each_within(s, a, opts.budget, &mut |t| {
            seen += 1;
            let mut adj = base.clone();
            for row in t.iter() {
                for &x in row {
                    for &y in row {
                        if x != y {
                            adj[x * words + y / 64] |= 1 << (y % 64);
                        }
                    }
                }
            }
            let over = (0..n)
                .map(|v| {
                    (
                        v,
                        adj[v * words..(v + 1) * words]
                            .iter()
                            .map(|w| w.count_ones() as usize)
                            .sum(),
                    )
                })
                .find(|&(_, deg)| deg > limit);
            match over {
                Some((v, deg)) => {
                    found = Some((t.clone(), v, deg));
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        })?;
        report.presentations_checked += seen;
        if let Some((t, v, deg)) = found {
            report.witness = Some(DegreeWitness {
                structure: a.clone(),
                presentation: expand(s, a, t)?,
                element: v,
                degree: deg,
                max_degree: d,
                bound: limit,
            });
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationWitness {
    pub structure: Structure,
    pub presentation: Structure,
    pub subset: Vec<Element>,
    /// The presentation restricted to `subset`, which is not a presentation.
    pub restriction: Structure,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationReport {
    pub scheme: String,
    pub corpus_size: usize,
    pub max_universe: usize,
    pub presentations_checked: u64,
    pub witness: Option<LocalizationWitness>,
}

impl LocalizationReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

struct SubsetState {
    origin: Vec<Element>,
    base: Structure,
    mask: Code,
    valid: FxHashSet<Code>,
    failure: Option<usize>,
}

/// Every restriction of every presentation to every subset is a presentation
/// of the restricted structure. Subsets are taken up to automorphism.
pub fn check_localization(
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    opts: CheckOptions,
) -> Result<LocalizationReport, PresentationError> {
    let mut report = LocalizationReport {
        scheme: s.name(),
        corpus_size: corpus.len(),
        max_universe: max_universe(corpus),
        presentations_checked: 0,
        witness: None,
    };
    for a in corpus {
        let n = a.universe();
        if n > LOCALIZATION_LIMIT {
            return Err(PresentationError::TooLarge {
                check: "localization".into(),
                size: n,
            });
        }
        admit(s, a)?;
        let frame = Frame::new(n, s.symbol().arity);
        let group = automorphisms(a);
        // the whole universe restricts each presentation to itself
        let full = (1u64 << n) - 1;
        let mut states: Vec<SubsetState> = subset_representatives(n, &group)
            .into_iter()
            .filter(|&m| m != full)
            .map(|m| {
                let origin = mask_elements(m, n);
                let base = a.restrict(&origin).map(|r| r.structure)?;
                Ok(SubsetState {
                    mask: frame.mask(&mask_flags(m, n)),
                    origin,
                    base,
                    valid: FxHashSet::default(),
                    failure: None,
                })
            })
            .collect::<Result<_, PresentationError>>()?;
        let mut failure: Option<(usize, usize, Code)> = None;
        report.presentations_checked += stream_codes(s, a, &frame, opts.budget, |chunk, offset| {
            states.par_iter_mut().for_each(|st| {
                for (i, code) in chunk.iter().enumerate() {
                    let r = code.and(&st.mask);
                    if st.valid.contains(&r) {
                        continue;
                    }
                    if s.is_valid(&st.base, &frame.restrict_to(&r, &st.origin)) {
                        st.valid.insert(r);
                    } else {
                        st.failure = Some(offset + i);
                        break;
                    }
                }
            });
            let first = states
                .iter()
                .enumerate()
                .filter_map(|(j, st)| st.failure.map(|i| (i, j)))
                .min();
            match first {
                Some((i, j)) => {
                    failure = Some((i, j, chunk[i - offset].clone()));
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        })?;
        if let Some((_, j, code)) = failure {
            let st = &states[j];
            let table = frame.decode(&code);
            let restricted = frame.restrict_to(&code, &st.origin);
            report.witness = Some(LocalizationWitness {
                structure: a.clone(),
                presentation: expand(s, a, table)?,
                subset: st.origin.clone(),
                restriction: expand(s, &st.base, restricted)?,
            });
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct AmalgamationWitness {
    pub structure: Structure,
    pub b: Vec<Element>,
    pub c: Vec<Element>,
    pub b_presentation: Structure,
    pub c_presentation: Structure,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmalgamationReport {
    pub scheme: String,
    pub corpus_size: usize,
    pub max_universe: usize,
    pub presentations_checked: u64,
    pub witness: Option<AmalgamationWitness>,
}

impl AmalgamationReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

struct PairState {
    b: u64,
    c: u64,
    mask_b: Code,
    mask_c: Code,
    pb: FxHashSet<Code>,
    pc: FxHashSet<Code>,
    realized: FxHashSet<(Code, Code)>,
}

impl PairState {
    fn complete(&self) -> bool {
        self.realized.len() == self.pb.len() * self.pc.len()
    }
}

/// For all disjoint `B`, `C` and presentations `B*`, `C*`, some presentation
/// of the whole structure restricts to both. Pairs are taken up to automorphism.
pub fn check_disjoint_amalgamation(
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    opts: CheckOptions,
) -> Result<AmalgamationReport, PresentationError> {
    let mut report = AmalgamationReport {
        scheme: s.name(),
        corpus_size: corpus.len(),
        max_universe: max_universe(corpus),
        presentations_checked: 0,
        witness: None,
    };
    for a in corpus {
        let n = a.universe();
        if n > AMALGAMATION_LIMIT {
            return Err(PresentationError::TooLarge {
                check: "disjoint amalgamation".into(),
                size: n,
            });
        }
        admit(s, a)?;
        let frame = Frame::new(n, s.symbol().arity);
        let group = automorphisms(a);
        let mut sub_presentations: FxHashMap<u64, Vec<Code>> = FxHashMap::default();
        let mut presentations_of = |m: u64| -> Result<Vec<Code>, PresentationError> {
            if let Some(v) = sub_presentations.get(&m) {
                return Ok(v.clone());
            }
            let origin = mask_elements(m, n);
            let sub = a.restrict(&origin)?.structure;
            let mut codes = Vec::new();
            for_each_within(s, &sub, opts.budget, &mut |t| {
                codes.push(frame.lift(t, &origin));
                ControlFlow::Continue(())
            })?;
            sub_presentations.insert(m, codes.clone());
            Ok(codes)
        };
        let mut states = Vec::new();
        // with C empty and B everything, A* = B* amalgamates trivially
        let full = (1u64 << n) - 1;
        for (b, c) in disjoint_pair_representatives(n, &group) {
            if (b, c) == (full, 0) || (b, c) == (0, full) {
                continue;
            }
            let (pb, pc) = (presentations_of(b)?, presentations_of(c)?);
            if (pb.len() as u128) * (pc.len() as u128) > opts.budget as u128 {
                return Err(PresentationError::BudgetExceeded {
                    scheme: s.name(),
                    budget: opts.budget,
                });
            }
            states.push(PairState {
                b,
                c,
                mask_b: frame.mask(&mask_flags(b, n)),
                mask_c: frame.mask(&mask_flags(c, n)),
                pb: pb.into_iter().collect(),
                pc: pc.into_iter().collect(),
                realized: FxHashSet::default(),
            });
        }
        report.presentations_checked += stream_codes(s, a, &frame, opts.budget, |chunk, _| {
            states.par_iter_mut().filter(|st| !st.complete()).for_each(|st| {
                for code in chunk {
                    let (rb, rc) = (code.and(&st.mask_b), code.and(&st.mask_c));
                    if st.pb.contains(&rb) && st.pc.contains(&rc) {
                        st.realized.insert((rb, rc));
                        if st.complete() {
                            break;
                        }
                    }
                }
            });
            if states.iter().all(PairState::complete) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        if let Some(st) = states.iter().find(|st| !st.complete()) {
            let pb = presentations_of(st.b)?;
            let pc = presentations_of(st.c)?;
            let (cb, cc) = pb
                .iter()
                .flat_map(|x| pc.iter().map(move |y| (x, y)))
                .find(|&(x, y)| !st.realized.contains(&(x.clone(), y.clone())))
                .expect("an incomplete pair has a missing combination");
            let (ob, oc) = (mask_elements(st.b, n), mask_elements(st.c, n));
            let sub_b = a.restrict(&ob)?.structure;
            let sub_c = a.restrict(&oc)?.structure;
            report.witness = Some(AmalgamationWitness {
                structure: a.clone(),
                b_presentation: expand(s, &sub_b, frame.restrict_to(cb, &ob))?,
                c_presentation: expand(s, &sub_c, frame.restrict_to(cc, &oc))?,
                b: ob,
                c: oc,
            });
            break;
        }
    }
    Ok(report)
}
