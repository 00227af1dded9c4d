//! Graded characters of category-O objects realized inside the Hecke
//! algebra: Verma, simple and projective classes, and the graded shadow
//! of projective functors.
//!
//! Degree convention: an entry `(x, d)` is a composition factor
//! `L(x)⟨−d⟩` sitting in degree d (the shift acts by `M⟨k⟩_i = M_{i+k}`).
//! Verma heads sit at degree 0 and the socle of θ_w L(w) at degree
//! +a(w); both facts are pinned by tests rather than trusted.

use crate::error::{Error, Result};
use crate::hecke::{HeckeElement, KLTable};
use crate::laurent::LaurentPoly;
use crate::perm::{GroupData, Permutation};
use dashmap::DashMap;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Finitely supported map (element, degree) → positive multiplicity.
#[derive(Clone)]
pub struct GradedCharacter {
    group: Arc<GroupData>,
    entries: BTreeMap<(u32, i32), i64>,
}

impl PartialEq for GradedCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.n() == other.group.n() && self.entries == other.entries
    }
}

impl Eq for GradedCharacter {}

impl std::fmt::Debug for GradedCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut map = f.debug_map();
        for (&(x, d), m) in &self.entries {
            map.entry(&(self.group.perm(x).one_line_string(), d), m);
        }
        map.finish()
    }
}

impl GradedCharacter {
    /// Builds from possibly-signed data; a negative multiplicity means
    /// the input was not the class of an actual module and is refused.
    pub fn from_signed(
        group: Arc<GroupData>,
        entries: impl IntoIterator<Item = ((u32, i32), i64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((x, d), m) in entries {
            if m == 0 {
                continue;
            }
            if m < 0 {
                return Err(Error::NotAModuleCharacter {
                    perm: group.perm(x).one_line_string(),
                    degree: d,
                    mult: m,
                });
            }
            map.insert((x, d), m);
        }
        Ok(GradedCharacter {
            group,
            entries: map,
        })
    }

    pub fn group(&self) -> &Arc<GroupData> {
        &self.group
    }

    pub fn entries(&self) -> &BTreeMap<(u32, i32), i64> {
        &self.entries
    }

    pub fn gm_idx(&self, x: u32, d: i32) -> i64 {
        self.entries.get(&(x, d)).copied().unwrap_or(0)
    }

    /// Multiplicity of `L(x)⟨−d⟩`, i.e. of L(x) in degree d.
    pub fn gm(&self, x: &Permutation, d: i32) -> Result<i64> {
        Ok(self.gm_idx(self.group.index_of(x)?, d))
    }

    /// The degree-d layer as a multiset, in enumeration order.
    pub fn graded_layer(&self, d: i32) -> Vec<(Permutation, i64)> {
        self.entries
            .iter()
            .filter(|&(&(_, deg), _)| deg == d)
            .map(|(&(x, _), &m)| (self.group.perm(x).clone(), m))
            .collect()
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let mut degs = self.entries.keys().map(|&(_, d)| d);
        let first = degs.next()?;
        let (mut lo, mut hi) = (first, first);
        for d in degs {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Some((lo, hi))
    }

    pub fn is_degreewise_palindromic(&self) -> bool {
        self.entries
            .iter()
            .all(|(&(x, d), &m)| self.gm_idx(x, -d) == m)
    }
}

/// Character computations over one KL table, with an insert-only memo
/// for θ-on-simple characters keyed by (w, x).
pub struct CharacterEngine {
    table: Arc<KLTable>,
    theta_memo: DashMap<(u32, u32), Arc<GradedCharacter>>,
}

impl CharacterEngine {
    pub fn new(table: Arc<KLTable>) -> Self {
        CharacterEngine {
            table,
            theta_memo: DashMap::new(),
        }
    }

    pub fn table(&self) -> &Arc<KLTable> {
        &self.table
    }

    fn group(&self) -> &Arc<GroupData> {
        self.table.group()
    }

    /// Graded character of the Verma module Δ(x): entry (y,d) is the
    /// coefficient of v^d in h_{x,y}.
    pub fn verma_char(&self, x: &Permutation) -> Result<GradedCharacter> {
        let g = self.group().clone();
        let xi = g.index_of(x)?;
        let mut entries = Vec::new();
        for y in 0..g.order() as u32 {
            for &(e, c) in self.table.h(xi, y).terms() {
                entries.push(((y, e), c));
            }
        }
        GradedCharacter::from_signed(g, entries)
    }

    /// Standard-basis coordinates of the simple class [L(w)]: the w-row
    /// of the inverse of the unitriangular matrix (h_{x,y}).
    pub fn simple_in_standard(&self, w: &Permutation) -> Result<HeckeElement> {
        let g = self.group().clone();
        let wi = g.index_of(w)?;
        // m_w = 1; for y > w: m_y = −Σ_{w ≤ x < y} m_x·h_{x,y}
        let mut coords: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
        coords.insert(wi, LaurentPoly::one());
        for y in wi + 1..g.order() as u32 {
            let mut acc = LaurentPoly::zero();
            for (&x, m) in &coords {
                let h = self.table.h(x, y);
                if !h.is_zero() {
                    acc = acc.add(&m.mul(h));
                }
            }
            if !acc.is_zero() {
                coords.insert(y, acc.negate());
            }
        }
        let mut out = HeckeElement::zero(g.n());
        for (x, m) in coords {
            out.add_term(g.perm(x).clone(), m);
        }
        Ok(out)
    }

    /// Expands a standard-basis element in simple classes:
    /// `c_y(v) = Σ_x m_x(v)·h_{x,y}(v)`, entry (y,d) = coeff(c_y, d).
    /// Negative data is refused by the character constructor.
    pub fn std_to_simple_coeffs(&self, a: &HeckeElement) -> Result<GradedCharacter> {
        let g = self.group().clone();
        if a.n() != g.n() {
            return Err(Error::RankMismatch(a.n(), g.n()));
        }
        let mut support: Vec<(u32, LaurentPoly)> = Vec::with_capacity(a.terms().len());
        for (x, m) in a.terms() {
            support.push((g.index_of(x)?, m.clone()));
        }
        let mut entries = Vec::new();
        for y in 0..g.order() as u32 {
            let mut c = LaurentPoly::zero();
            for (x, m) in &support {
                let h = self.table.h(*x, y);
                if !h.is_zero() {
                    c = c.add(&m.mul(h));
                }
            }
            for &(e, coeff) in c.terms() {
                entries.push(((y, e), coeff));
            }
        }
        GradedCharacter::from_signed(g, entries)
    }

    /// Right multiplication by the KL basis element: `a · KL(w)`, the
    /// graded shadow of applying θ_w.
    pub fn theta_apply(&self, a: &HeckeElement, w: &Permutation) -> Result<HeckeElement> {
        let g = self.group().clone();
        if a.n() != g.n() {
            return Err(Error::RankMismatch(a.n(), g.n()));
        }
        let wi = g.index_of(w)?;
        // a·H_y for every y ≤ w, built along right descents, then summed
        // against the h-column of w.
        let mut family: Vec<Option<HeckeElement>> = vec![None; wi as usize + 1];
        let mut out = HeckeElement::zero(g.n());
        for y in 0..=wi {
            let h = self.table.h(y, wi);
            let needed = !h.is_zero();
            if !needed {
                continue;
            }
            let val = if g.length(y) == 0 {
                a.clone()
            } else {
                let s = g.first_right_descent(y).expect("has a descent");
                let prev = g.right_mul_gen(y, s);
                family[prev as usize]
                    .as_ref()
                    .expect("prefix computed")
                    .mul_right_std_gen(s)?
            };
            out = out.add(&val.scale(h))?;
            family[y as usize] = Some(val);
        }
        Ok(out)
    }

    /// Graded character of θ_w L(x); equal by definition to
    /// `std_to_simple_coeffs(theta_apply(simple_in_standard(x), w))`,
    /// computed in dual-KL coordinates where a single generator acts by
    /// `C̃_y·C_s = 0` if ys > y and
    /// `(v+v⁻¹)C̃_y + Σ_{z: zs>z} μ̃(y,z)·C̃_z` otherwise.
    pub fn theta_on_simple(&self, w: &Permutation, x: &Permutation) -> Result<Arc<GradedCharacter>> {
        let g = self.group().clone();
        let (wi, xi) = (g.index_of(w)?, g.index_of(x)?);
        if let Some(hit) = self.theta_memo.get(&(wi, xi)) {
            return Ok(hit.clone());
        }
        let mut memo: BTreeMap<u32, DualRow> = BTreeMap::new();
        let row = self.dual_times_kl(xi, wi, &mut memo)?;
        let mut entries = Vec::new();
        for (y, c) in row {
            for &(e, coeff) in c.terms() {
                entries.push(((y, e), coeff));
            }
        }
        let character = Arc::new(GradedCharacter::from_signed(g, entries)?);
        self.theta_memo.insert((wi, xi), character.clone());
        Ok(character)
    }

    /// Dual-coordinate row of `C̃_x · KL(z)`, memoized over z; mirrors the
    /// KL recursion KL(z) = KL(z′)·C_s − Σ_{u: us<u} μ(u,z′)·KL(u).
    fn dual_times_kl(
        &self,
        xi: u32,
        z: u32,
        memo: &mut BTreeMap<u32, DualRow>,
    ) -> Result<DualRow> {
        if let Some(hit) = memo.get(&z) {
            return Ok(hit.clone());
        }
        let g = self.group().clone();
        let row = if g.length(z) == 0 {
            DualRow::from([(xi, LaurentPoly::one())])
        } else {
            let s = g.first_right_descent(z).expect("has a descent");
            let zp = g.right_mul_gen(z, s);
            let base = self.dual_times_kl(xi, zp, memo)?;
            let mut row = self.dual_mul_kl_gen(&base, s);
            for &(u, mu) in self.table.mu_row(zp) {
                if !g.is_right_descent(u, s) {
                    continue;
                }
                let correction = self.dual_times_kl(xi, u, memo)?;
                for (y, c) in correction {
                    let entry = row.entry(y).or_default();
                    *entry = entry.sub(&c.scale(mu));
                    if entry.is_zero() {
                        row.remove(&y);
                    }
                }
            }
            row
        };
        memo.insert(z, row.clone());
        Ok(row)
    }

    fn dual_mul_kl_gen(&self, row: &DualRow, s: u8) -> DualRow {
        let g = self.group();
        let gauss = LaurentPoly::gauss();
        let mut out = DualRow::new();
        let mut bump = |key: u32, val: LaurentPoly| {
            if val.is_zero() {
                return;
            }
            let entry = out.entry(key).or_default();
            *entry = entry.add(&val);
            if entry.is_zero() {
                out.remove(&key);
            }
        };
        for (&y, c) in row {
            if !g.is_right_descent(y, s) {
                continue; // C̃_y·C_s = 0 when ys > y
            }
            bump(y, c.mul(&gauss));
            for &(z, mu) in self.table.mu_row(y) {
                if !g.is_right_descent(z, s) {
                    bump(z, c.scale(mu));
                }
            }
            for &(z, mu) in self.table.mu_col(y) {
                if !g.is_right_descent(z, s) {
                    bump(z, c.scale(mu));
                }
            }
        }
        out
    }
}

type DualRow = BTreeMap<u32, LaurentPoly>;
