//! The Kostant-problem classifier: the computational negativity test
//! (comparison of θ_w L(w) against the dominant Verma module in degree
//! a(w)−1 over all x strictly below w in ≤_R) plus the positive-answer
//! rules, propagated along left cells.
//!
//! A Negative verdict carries a certified witness; Positive verdicts come
//! only from the rule list; everything else is honestly Unknown. The
//! negativity test runs first, and a dedicated invariant (tested through
//! rank 6) checks that the two never both fire.

use crate::cells::CellDecomposition;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::Engine;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Which sufficient condition produced a positive answer.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum PositiveRule {
    /// L(e) is a quotient of the dominant Verma module.
    DominantQuotient,
    /// L(w₀) is itself a Verma module.
    VermaModule,
    /// w is a simple reflection.
    SimpleReflection,
    /// The right cell of w contains some w′₀w₀.
    ParabolicW0W0,
    /// The right cell of w contains some s·w′₀w₀ with s in the parabolic.
    SParabolicW0W0,
    /// w = s_i s_j with |i−j| > 2.
    CommutingFar,
}

impl fmt::Display for PositiveRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PositiveRule::DominantQuotient => "DominantQuotient",
            PositiveRule::VermaModule => "VermaModule",
            PositiveRule::SimpleReflection => "SimpleReflection",
            PositiveRule::ParabolicW0W0 => "ParabolicW0W0",
            PositiveRule::SParabolicW0W0 => "SParabolicW0W0",
            PositiveRule::CommutingFar => "CommutingFar",
        };
        write!(f, "{name}")
    }
}

/// Certificate for a negative answer: L(x) occurs in degree a(w)−1 of
/// θ_w L(w) strictly more often than in the dominant Verma module.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub x: Permutation,
    pub degree: i32,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Positive(PositiveRule),
    Negative(Witness),
    Unknown,
}

impl Verdict {
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Positive(_) => "positive",
            Verdict::Negative(_) => "negative",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Positive(_))
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Verdict::Negative(_))
    }
}

fn require_involution(w: &Permutation) -> Result<()> {
    if !w.is_involution() {
        return Err(Error::NotAnInvolution(w.one_line_string()));
    }
    Ok(())
}

/// Scans all x <_R w for `[θ_wL(w) : L(x)⟨1−a⟩] > [Δ(e) : L(x)⟨1−a⟩]`
/// (the shift ⟨1−a⟩ sits in degree a−1). Witnesses come in inverse
/// pairs; the scan walks the enumeration in descending order, which is
/// the choice that reproduces the published witnesses, and returns the
/// first hit with both multiplicities.
pub fn negativity_witness(engine: &Engine, w: &Permutation) -> Result<Option<Witness>> {
    require_involution(w)?;
    let g = engine.group().clone();
    let cells = engine.cells();
    let wi = g.index_of(w)?;
    let a = cells.a_value_idx(wi);
    if a == 0 {
        return Ok(None);
    }
    let d = a as i32 - 1;
    let m = engine.chars().theta_on_simple(w, w)?;
    let e_idx = g.identity_index();
    for x in (0..g.order() as u32).rev() {
        if !cells.strictly_less_r_idx(x, wi) {
            continue;
        }
        let lhs = m.gm_idx(x, d);
        if lhs == 0 {
            continue;
        }
        let rhs = engine.table().h(e_idx, x).coeff(d);
        if lhs > rhs {
            return Ok(Some(Witness {
                x: g.perm(x).clone(),
                degree: d,
                lhs,
                rhs,
            }));
        }
    }
    Ok(None)
}

/// First matching positive rule, if any. Cell membership for the
/// parabolic rules is tested in the right cell; the candidate family
/// w′₀w₀ / s·w′₀w₀ over all generator subsets is closed under inverses,
/// so this agrees with the left-cell phrasing.
pub fn positivity_rule(engine: &Engine, w: &Permutation) -> Result<Option<PositiveRule>> {
    require_involution(w)?;
    let g = engine.group().clone();
    let cells = engine.cells();
    let n = g.n();
    let wi = g.index_of(w)?;

    if w.is_identity() {
        return Ok(Some(PositiveRule::DominantQuotient));
    }
    if wi == g.longest_index() {
        return Ok(Some(PositiveRule::VermaModule));
    }
    if w.length() == 1 {
        return Ok(Some(PositiveRule::SimpleReflection));
    }

    let w0 = g.perm(g.longest_index()).clone();
    let cell = cells.right_cell_id(wi);
    let mut s_candidates = Vec::new();
    for mask in 0u32..1 << (n - 1) {
        let gens: Vec<u8> = (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
        let wp = Permutation::longest_element(&gens, n)?;
        let u = wp.multiply(&w0)?;
        if cells.right_cell_id(g.index_of(&u)?) == cell {
            return Ok(Some(PositiveRule::ParabolicW0W0));
        }
        for &i in &gens {
            s_candidates.push(Permutation::simple_reflection(i, n)?.multiply(&u)?);
        }
    }
    for u in s_candidates {
        if cells.right_cell_id(g.index_of(&u)?) == cell {
            return Ok(Some(PositiveRule::SParabolicW0W0));
        }
    }

    if w.length() == 2 {
        let descents = w.right_descents();
        if descents.len() == 2 && descents[1] - descents[0] > 2 {
            return Ok(Some(PositiveRule::CommutingFar));
        }
    }
    Ok(None)
}

/// Verdict for an involution: Negative with a witness if the test fires,
/// else Positive with the first matching rule, else Unknown.
pub fn verdict_involution(engine: &Engine, w: &Permutation) -> Result<Verdict> {
    if let Some(witness) = negativity_witness(engine, w)? {
        return Ok(Verdict::Negative(witness));
    }
    if let Some(rule) = positivity_rule(engine, w)? {
        return Ok(Verdict::Positive(rule));
    }
    Ok(Verdict::Unknown)
}

/// Verdict for an arbitrary element, by propagation from the unique
/// involution of its left cell; returns that involution alongside.
pub fn verdict(engine: &Engine, w: &Permutation) -> Result<(Permutation, Verdict)> {
    let iota = engine.cells().involution_of_left_cell(w)?;
    let v = verdict_involution(engine, &iota)?;
    Ok((iota, v))
}

/// Classification of every involution (hence, by left-cell propagation,
/// of every simple module) for one rank.
pub struct Summary {
    pub n: u8,
    /// (involution, verdict), in enumeration order.
    pub involution_verdicts: Vec<(Permutation, Verdict)>,
}

impl Summary {
    /// (positive, negative, unknown) counts over involutions.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for (_, v) in &self.involution_verdicts {
            match v {
                Verdict::Positive(_) => c.0 += 1,
                Verdict::Negative(_) => c.1 += 1,
                Verdict::Unknown => c.2 += 1,
            }
        }
        c
    }

    pub fn negative_involutions(&self) -> Vec<&Permutation> {
        self.involution_verdicts
            .iter()
            .filter(|(_, v)| v.is_negative())
            .map(|(w, _)| w)
            .collect()
    }

    pub fn unknown_involutions(&self) -> Vec<&Permutation> {
        self.involution_verdicts
            .iter()
            .filter(|(_, v)| matches!(v, Verdict::Unknown))
            .map(|(w, _)| w)
            .collect()
    }

    pub fn verdict_of_involution(&self, w: &Permutation) -> Option<&Verdict> {
        self.involution_verdicts
            .iter()
            .find(|(iota, _)| iota == w)
            .map(|(_, v)| v)
    }

    /// Expands to all n! elements: (element, left-cell involution, verdict).
    pub fn per_element(&self, cells: &CellDecomposition) -> Vec<(Permutation, Permutation, Verdict)> {
        let g = cells.group();
        let by_involution: BTreeMap<&Permutation, &Verdict> = self
            .involution_verdicts
            .iter()
            .map(|(w, v)| (w, v))
            .collect();
        g.elems()
            .iter()
            .map(|w| {
                let iota = g
                    .perm(cells.involution_of_left_cell_idx(
                        g.index_of(w).expect("element of the group"),
                    ))
                    .clone();
                let v = (*by_involution
                    .get(&iota)
                    .expect("every left cell has a classified involution"))
                .clone();
                (w.clone(), iota, v)
            })
            .collect()
    }
}

/// Classifies every involution of S_n, fanning out across a thread pool;
/// results are merged back in enumeration order.
pub fn classify_all(engine: &Engine) -> Result<Summary> {
    let g = engine.group().clone();
    let involutions: Vec<u32> = g.involution_indices();
    let verdicts: Result<Vec<(Permutation, Verdict)>> = involutions
        .par_iter()
        .map(|&wi| {
            let w = g.perm(wi).clone();
            let v = verdict_involution(engine, &w)?;
            Ok((w, v))
        })
        .collect();
    Ok(Summary {
        n: g.n(),
        involution_verdicts: verdicts?,
    })
}
