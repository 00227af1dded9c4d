//! Independent brute-force checks. Convention bugs are the dominant risk
//! in this kind of computation, so these suites ship in the artifact
//! behind the `verify` command rather than living only in tests: a user
//! can re-validate any cache end to end.

use crate::error::Result;
use crate::hecke::KLTable;
use crate::laurent::LaurentPoly;
use crate::perm::Permutation;
use crate::Engine;
use serde::Serialize;

/// Outcome of one suite; `detail` carries the first counterexample on
/// failure.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub n: u8,
    pub pass: bool,
    pub detail: String,
}

impl SuiteReport {
    fn pass(name: &str, n: u8, detail: impl Into<String>) -> Self {
        SuiteReport {
            name: name.into(),
            n,
            pass: true,
            detail: detail.into(),
        }
    }

    fn fail(name: &str, n: u8, detail: impl Into<String>) -> Self {
        SuiteReport {
            name: name.into(),
            n,
            pass: false,
            detail: detail.into(),
        }
    }
}

/// Bruhat order as the reflexive-transitive closure of the covering
/// relation (x ⋖ x·t for a transposition t raising the length by one).
pub fn bruhat_from_covers(n: u8) -> Result<Vec<Vec<bool>>> {
    let elems = Permutation::elements(n)?;
    let order = elems.len();
    let index = |p: &Permutation| {
        elems
            .binary_search_by(|q| q.one_line().cmp(p.one_line()))
            .expect("element of the group")
    };
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); order];
    for (xi, x) in elems.iter().enumerate() {
        for i in 0..n as usize {
            for j in i + 1..n as usize {
                let mut line = x.one_line().to_vec();
                line.swap(i, j);
                let w = Permutation::from_one_line(line)?;
                if w.length() == x.length() + 1 {
                    covers[xi].push(index(&w));
                }
            }
        }
    }
    let mut leq = vec![vec![false; order]; order];
    for (start, row) in leq.iter_mut().enumerate() {
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            if row[x] {
                continue;
            }
            row[x] = true;
            stack.extend_from_slice(&covers[x]);
        }
    }
    Ok(leq)
}

/// The prefix-dominance `bruhat_leq` must agree with the cover closure
/// on every pair.
pub fn bruhat_oracle_suite(n: u8) -> Result<SuiteReport> {
    let name = "bruhat-covers";
    let elems = Permutation::elements(n)?;
    let leq = bruhat_from_covers(n)?;
    for (xi, x) in elems.iter().enumerate() {
        for (wi, w) in elems.iter().enumerate() {
            if x.bruhat_leq(w)? != leq[xi][wi] {
                return Ok(SuiteReport::fail(
                    name,
                    n,
                    format!("disagreement at ({x}, {w})"),
                ));
            }
        }
    }
    Ok(SuiteReport::pass(
        name,
        n,
        format!("{} pairs agree with the cover closure", elems.len().pow(2)),
    ))
}

/// Verifies that the simple_in_standard rows really invert the h-matrix
/// ((h)·(h)⁻¹ = 1 over the Laurent ring) and that expanding H_x back in
/// simple classes recomposes the Verma character.
pub fn kl_matrix_inversion_suite(engine: &Engine) -> Result<SuiteReport> {
    let name = "kl-matrix-inversion";
    let g = engine.group().clone();
    let n = g.n();
    let table = engine.table();
    for w in g.elems() {
        let row = engine.chars().simple_in_standard(w)?;
        let wi = g.index_of(w)?;
        for y in 0..g.order() as u32 {
            let mut acc = LaurentPoly::zero();
            for (x, m) in row.terms() {
                let h = table.h(g.index_of(x)?, y);
                if !h.is_zero() {
                    acc = acc.add(&m.mul(h));
                }
            }
            let expected = if y == wi {
                LaurentPoly::one()
            } else {
                LaurentPoly::zero()
            };
            if acc != expected {
                return Ok(SuiteReport::fail(
                    name,
                    n,
                    format!("(h)·(h)⁻¹ fails at pair ({w}, {})", g.perm(y)),
                ));
            }
        }
    }
    for x in g.elems() {
        let recomposed = engine
            .chars()
            .std_to_simple_coeffs(&crate::hecke::HeckeElement::std_basis(x.clone()))?;
        if recomposed != engine.chars().verma_char(x)? {
            return Ok(SuiteReport::fail(
                name,
                n,
                format!("Verma character of {x} does not recompose"),
            ));
        }
    }
    Ok(SuiteReport::pass(name, n, "identity recovered exactly"))
}

/// Mutual-reachability classes of the μ-generated right preorder must be
/// the insertion-tableau classes, and left cells the recording-tableau
/// classes (checked pairwise, independently of the build's own guard).
pub fn preorder_vs_rsk_suite(engine: &Engine) -> Result<SuiteReport> {
    let name = "preorder-vs-rsk";
    let g = engine.group().clone();
    let n = g.n();
    let cells = engine.cells();
    let pairs: Vec<_> = g.elems().iter().map(|p| p.rsk()).collect();
    for x in 0..g.order() as u32 {
        for y in 0..g.order() as u32 {
            let same_right = cells.right_cell_id(x) == cells.right_cell_id(y);
            if same_right != (pairs[x as usize].p == pairs[y as usize].p) {
                return Ok(SuiteReport::fail(
                    name,
                    n,
                    format!("right cells vs P-tableaux at ({}, {})", g.perm(x), g.perm(y)),
                ));
            }
            let same_left = cells.left_cell_id(x) == cells.left_cell_id(y);
            if same_left != (pairs[x as usize].q == pairs[y as usize].q) {
                return Ok(SuiteReport::fail(
                    name,
                    n,
                    format!("left cells vs Q-tableaux at ({}, {})", g.perm(x), g.perm(y)),
                ));
            }
        }
    }
    Ok(SuiteReport::pass(name, n, "cells coincide with tableau classes"))
}

/// Every KL basis element must be bar-invariant.
pub fn bar_invariance_suite(table: &KLTable) -> Result<SuiteReport> {
    let name = "bar-invariance";
    let n = table.n();
    for w in table.group().elems() {
        let c = table.kl_basis_element(w)?;
        if c.bar()? != c {
            return Ok(SuiteReport::fail(name, n, format!("bar(KL({w})) ≠ KL({w})")));
        }
    }
    Ok(SuiteReport::pass(
        name,
        n,
        format!("{} basis elements fixed by bar", table.group().order()),
    ))
}

/// Degree bounds and positivity of the table itself: h_{w,w} = 1, and for
/// x < w strictly positive exponents, nonnegative coefficients, constant
/// term 1 of the classical polynomial.
pub fn kl_positivity_suite(table: &KLTable) -> Result<SuiteReport> {
    let name = "kl-positivity";
    let g = table.group().clone();
    let n = g.n();
    for w in 0..g.order() as u32 {
        for x in 0..=w {
            let h = table.h(x, w);
            if h.is_zero() {
                continue;
            }
            if x == w {
                if !h.is_one() {
                    return Ok(SuiteReport::fail(name, n, format!("h_{{w,w}} ≠ 1 at {}", g.perm(w))));
                }
                continue;
            }
            let diff = (g.length(w) - g.length(x)) as i32;
            let ok = h.is_nonnegative()
                && h.min_deg().is_some_and(|d| d >= 1)
                && h.coeff(diff) == 1
                && h.max_deg().is_some_and(|d| d <= diff);
            if !ok {
                return Ok(SuiteReport::fail(
                    name,
                    n,
                    format!("degree/positivity violation at ({}, {})", g.perm(x), g.perm(w)),
                ));
            }
        }
    }
    Ok(SuiteReport::pass(name, n, "nonnegative, strictly positive exponents"))
}

/// Graded bounds of θ_w L(w) for every involution w: layers vanish beyond
/// |a(w)|, the ±a(w) layers are exactly L(w), and the whole character is
/// palindromic in the degree.
pub fn lemma_bounds_suite(engine: &Engine) -> Result<SuiteReport> {
    let name = "theta-socle-bounds";
    let g = engine.group().clone();
    let n = g.n();
    for &wi in &g.involution_indices() {
        let w = g.perm(wi).clone();
        let a = engine.cells().a_value_idx(wi) as i32;
        let m = engine.chars().theta_on_simple(&w, &w)?;
        if let Some((lo, hi)) = m.degree_range() {
            if lo < -a || hi > a {
                return Ok(SuiteReport::fail(
                    name,
                    n,
                    format!("θ_{w}L({w}) has layers outside ±a = ±{a}"),
                ));
            }
        }
        for d in [a, -a] {
            let layer = m.graded_layer(d);
            if layer.len() != 1 || m.gm_idx(wi, d) != 1 {
                return Ok(SuiteReport::fail(
                    name,
                    n,
                    format!("layer {d} of θ_{w}L({w}) is not exactly L({w})"),
                ));
            }
        }
        if !m.is_degreewise_palindromic() {
            return Ok(SuiteReport::fail(name, n, format!("θ_{w}L({w}) not self-dual")));
        }
    }
    Ok(SuiteReport::pass(name, n, "bounds, socle layers and self-duality hold"))
}

/// Runs every suite at the largest rank its cost profile allows, capped
/// by the requested rank. CI runs these before the golden acceptance
/// checks.
pub fn verify_all(n: u8, cap: u8) -> Result<Vec<SuiteReport>> {
    let mut reports = Vec::new();
    let quadratic_rank = n.min(5);
    reports.push(bruhat_oracle_suite(quadratic_rank)?);
    let engine_q = Engine::new_capped(quadratic_rank, cap)?;
    reports.push(kl_matrix_inversion_suite(&engine_q)?);
    reports.push(preorder_vs_rsk_suite(&engine_q)?);
    reports.push(bar_invariance_suite(engine_q.table())?);
    if n > quadratic_rank {
        let engine_n = Engine::new_capped(n, cap)?;
        reports.push(kl_positivity_suite(engine_n.table())?);
        reports.push(lemma_bounds_suite(&engine_n)?);
    } else {
        reports.push(kl_positivity_suite(engine_q.table())?);
        reports.push(lemma_bounds_suite(&engine_q)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bruhat_closure_small() {
        let leq = bruhat_from_covers(2).unwrap();
        assert_eq!(leq, vec![vec![true, true], vec![false, true]]);
        // n = 3: six elements, w₀ on top
        let leq3 = bruhat_from_covers(3).unwrap();
        assert_eq!(leq3.len(), 6);
        for (x, row) in leq3.iter().enumerate() {
            assert!(row[5], "everything is below w0");
            assert!(leq3[0][x], "e is below everything");
        }
    }

    #[test]
    fn suites_pass_rank4() {
        let engine = Engine::new(4).unwrap();
        assert!(bruhat_oracle_suite(4).unwrap().pass);
        assert!(kl_matrix_inversion_suite(&engine).unwrap().pass);
        assert!(preorder_vs_rsk_suite(&engine).unwrap().pass);
        assert!(bar_invariance_suite(engine.table()).unwrap().pass);
        assert!(kl_positivity_suite(engine.table()).unwrap().pass);
        assert!(lemma_bounds_suite(&engine).unwrap().pass);
    }

    #[test]
    fn lemma_suite_example_s1s3() {
        // a(s1s3) = 2 from shape (2,2): layers confined to |d| ≤ 2 with
        // socle layer {s1s3} at d = 2
        let engine = Engine::new(4).unwrap();
        let w = Permutation::from_word(&[1, 3], 4).unwrap();
        let m = engine.chars().theta_on_simple(&w, &w).unwrap();
        assert_eq!(m.degree_range(), Some((-2, 2)));
        let layer = m.graded_layer(2);
        assert_eq!(layer.len(), 1);
        assert_eq!(layer[0].0, w);
    }
}
