//! Pyramid partitions: finite stone shapes, exhaustive partition functions,
//! simple partitions, and the truncated limit series `S` and `T`.

use alloc::vec::Vec;

use hashbrown::HashMap;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::{Exponents, Polynomial, Substitution};

/// Exhaustive enumeration gives up after this many configurations.
pub const ENUMERATION_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    /// A single row pyramid.
    Row,
    /// Aztec diamond pyramid with white and black stones.
    Aztec2,
    /// Aztec diamond pyramid whose even layers are yellow and blue.
    Aztec4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    White,
    Black,
}

/// Stone at layer `j` (1 = top), row `r` within the layer, position `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stone {
    pub layer: usize,
    pub row: usize,
    pub pos: usize,
    pub role: Role,
}

impl Stone {
    /// Distance of the stone's row from the top layer.
    pub fn height(&self) -> usize {
        self.layer - 1
    }
}

/// Variable assignment for removed stones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColorScheme {
    /// White `y0`, black `y1`.
    TwoColor,
    /// Odd layers: white `y1`, black `y3`. Even layers: yellow `y0`, blue `y2`.
    FourColor,
}

impl ColorScheme {
    pub fn nvars(self) -> usize {
        match self {
            ColorScheme::TwoColor => 2,
            ColorScheme::FourColor => 4,
        }
    }

    pub fn variable(self, stone: &Stone) -> usize {
        match (self, stone.layer % 2 == 1, stone.role) {
            (ColorScheme::TwoColor, _, Role::White) => 0,
            (ColorScheme::TwoColor, _, Role::Black) => 1,
            (ColorScheme::FourColor, true, Role::White) => 1,
            (ColorScheme::FourColor, true, Role::Black) => 3,
            (ColorScheme::FourColor, false, Role::White) => 0,
            (ColorScheme::FourColor, false, Role::Black) => 2,
        }
    }

    /// Identifies yellow with white and blue with black, carrying 4-color
    /// polynomials into the 2-color ring.
    pub fn collapse() -> Substitution {
        Substitution::rename(2, &[0, 0, 1, 1]).expect("indices in range")
    }
}

/// A finite stone set with its support relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PyramidShape {
    pub kind: ShapeKind,
    pub k: usize,
    pub stones: Vec<Stone>,
    /// `above[i]` lists the stones resting on stone `i`; it can be removed
    /// only once all of them are.
    pub above: Vec<Vec<usize>>,
}

impl PyramidShape {
    pub fn build(kind: ShapeKind, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSize(k));
        }
        let layers = if kind == ShapeKind::Row { 1 } else { k };
        // Layer by layer, whites before blacks, so every stone comes after
        // the stones resting on it.
        let mut stones = Vec::new();
        for j in 1..=layers {
            let len = k - j + 1;
            for role in [Role::White, Role::Black] {
                let count = if role == Role::White { len } else { len - 1 };
                for r in 0..j {
                    for p in 0..count {
                        stones.push(Stone { layer: j, row: r, pos: p, role });
                    }
                }
            }
        }
        let index: HashMap<Stone, usize> = stones.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let above = stones
            .iter()
            .map(|s| {
                let candidates: Vec<Stone> = match s.role {
                    Role::Black => alloc::vec![
                        Stone { role: Role::White, ..*s },
                        Stone { role: Role::White, pos: s.pos + 1, ..*s },
                    ],
                    Role::White if s.layer >= 2 => {
                        let mut v = alloc::vec![Stone { layer: s.layer - 1, role: Role::Black, ..*s }];
                        if s.row >= 1 {
                            v.push(Stone { layer: s.layer - 1, row: s.row - 1, role: Role::Black, ..*s });
                        }
                        v
                    }
                    Role::White => Vec::new(),
                };
                candidates.iter().filter_map(|c| index.get(c).copied()).collect()
            })
            .collect();
        Ok(PyramidShape { kind, k, stones, above })
    }

    pub fn count(&self, role: Role) -> usize {
        self.stones.iter().filter(|s| s.role == role).count()
    }

    pub fn default_scheme(&self) -> ColorScheme {
        match self.kind {
            ShapeKind::Aztec4 => ColorScheme::FourColor,
            _ => ColorScheme::TwoColor,
        }
    }

    pub fn index_of(&self, s: &Stone) -> Option<usize> {
        self.stones.iter().position(|t| t == s)
    }
}

/// Walks every stable removal set in a fixed order, calling `leaf` with the
/// removal flags. Fails once more than `cap` sets have been seen.
fn for_each_partition(shape: &PyramidShape, cap: u64, mut leaf: impl FnMut(&[bool])) -> Result<u64> {
    fn go(
        shape: &PyramidShape,
        i: usize,
        removed: &mut Vec<bool>,
        seen: &mut u64,
        cap: u64,
        leaf: &mut dyn FnMut(&[bool]),
    ) -> Result<()> {
        if i == shape.stones.len() {
            *seen += 1;
            if *seen > cap {
                return Err(Error::ShapeTooLarge { limit: cap });
            }
            leaf(removed);
            return Ok(());
        }
        go(shape, i + 1, removed, seen, cap, leaf)?;
        if shape.above[i].iter().all(|&a| removed[a]) {
            removed[i] = true;
            go(shape, i + 1, removed, seen, cap, leaf)?;
            removed[i] = false;
        }
        Ok(())
    }
    if projected_partition_count(shape) > cap {
        return Err(Error::ShapeTooLarge { limit: cap });
    }
    let mut removed = alloc::vec![false; shape.stones.len()];
    let mut seen = 0;
    go(shape, 0, &mut removed, &mut seen, cap, &mut leaf)?;
    Ok(seen)
}

/// Number of partitions expected before enumerating, saturating at
/// `u64::MAX`. Both Aztec colorings share one stone arrangement with
/// `2^(k(k+1)/2)` partitions; rows use the sweep of
/// [`row_partition_function_dp`] at `y = 1`.
pub fn projected_partition_count(shape: &PyramidShape) -> u64 {
    match shape.kind {
        ShapeKind::Aztec2 | ShapeKind::Aztec4 => {
            let bits = shape.k * (shape.k + 1) / 2;
            if bits >= 64 {
                u64::MAX
            } else {
                1u64 << bits
            }
        }
        ShapeKind::Row => {
            let (mut removed, mut kept) = (1u64, 1u64);
            for _ in 1..shape.k {
                let next = removed.saturating_mul(2).saturating_add(kept);
                kept = removed.saturating_add(kept);
                removed = next;
            }
            removed.saturating_add(kept)
        }
    }
}

/// Sum over all partitions of the monomial counting removed stones by color.
pub fn partition_function(shape: &PyramidShape, scheme: ColorScheme) -> Result<Polynomial> {
    partition_function_capped(shape, scheme, ENUMERATION_CAP)
}

pub fn partition_function_capped(shape: &PyramidShape, scheme: ColorScheme, cap: u64) -> Result<Polynomial> {
    let nv = scheme.nvars();
    let vars: Vec<usize> = shape.stones.iter().map(|s| scheme.variable(s)).collect();
    let mut counts: HashMap<Exponents, u64> = HashMap::new();
    for_each_partition(shape, cap, |removed| {
        let mut e = alloc::vec![0i64; nv];
        for (i, &r) in removed.iter().enumerate() {
            if r {
                e[vars[i]] += 1;
            }
        }
        *counts.entry(Exponents::from(e)).or_insert(0) += 1;
    })?;
    Polynomial::from_terms(nv, counts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
}

/// Number of partitions of the shape, by exhaustive enumeration.
pub fn partition_count(shape: &PyramidShape) -> Result<u64> {
    for_each_partition(shape, ENUMERATION_CAP, |_| {})
}

/// Partition function of the row pyramid `R_k` by a left-to-right sweep
/// over the whites, tracking whether the current white is removed.
pub fn row_partition_function_dp(k: usize) -> Result<Polynomial> {
    if k == 0 {
        return Err(Error::InvalidSize(k));
    }
    let y0 = Polynomial::variable(2, 0);
    let one_plus_y1 = Polynomial::variable(2, 1).checked_add(&Polynomial::one(2))?;
    let mut removed = y0.clone();
    let mut kept = Polynomial::one(2);
    for _ in 1..k {
        let next_removed = y0.checked_mul(&removed.checked_mul(&one_plus_y1)?.checked_add(&kept)?)?;
        kept = removed.checked_add(&kept)?;
        removed = next_removed;
    }
    removed.checked_add(&kept)
}

/// An altered row keeps `left` whites at its left end and `right` at its
/// right end and removes everything in between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimpleRowPartition {
    pub left: usize,
    pub right: usize,
}

/// Row statistics split by class: index 0 for odd layers, 1 for even
/// layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SimplePartitionStats {
    pub rows: [i64; 2],
    pub heights: [i64; 2],
    pub kept_whites: [i64; 2],
}

impl SimplePartitionStats {
    fn add_row(&mut self, layer: usize, row: SimpleRowPartition) {
        let c = usize::from(layer.is_multiple_of(2));
        self.rows[c] += 1;
        self.heights[c] += layer as i64 - 1;
        self.kept_whites[c] += (row.left + row.right) as i64;
    }

    /// Exponent of the limit-series term this partition is counted under:
    /// `(x + h + #R, x + h)` for two colors, and the class-split version
    /// `(x2 + h2 + #R2, x1 + h1 + #R1, x2 + h2, x1 + h1)` for four.
    pub fn limit_exponent(&self, scheme: ColorScheme) -> Exponents {
        let xh = |c: usize| self.kept_whites[c] + self.heights[c];
        match scheme {
            ColorScheme::TwoColor => {
                let x = xh(0) + xh(1);
                Exponents::from([x + self.rows[0] + self.rows[1], x])
            }
            ColorScheme::FourColor => Exponents::from([xh(1) + self.rows[1], xh(0) + self.rows[0], xh(1), xh(0)]),
        }
    }

    /// Total degree of [`Self::limit_exponent`], the same for both schemes.
    pub fn limit_degree(&self) -> i64 {
        (0..2).map(|c| 2 * (self.kept_whites[c] + self.heights[c]) + self.rows[c]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplePartition {
    /// Altered rows as `((layer, row), partition)`, in layer order.
    pub rows: Vec<((usize, usize), SimpleRowPartition)>,
    pub stats: SimplePartitionStats,
    /// Removed stones counted with the shape's default colors.
    pub weight: Exponents,
}

/// Every simple partition of `shape` whose limit exponent has total degree at
/// most `max_degree` (all of them when `None`).
pub fn enumerate_simple_partitions(shape: &PyramidShape, max_degree: Option<i64>) -> Result<Vec<SimplePartition>> {
    let layers = if shape.kind == ShapeKind::Row { 1 } else { shape.k };
    let rows: Vec<(usize, usize)> = (1..=layers).flat_map(|j| (0..j).map(move |r| (j, r))).collect();
    let len = |j: usize| shape.k - j + 1;
    let budget = max_degree.unwrap_or(i64::MAX);
    let scheme = shape.default_scheme();

    struct Ctx<'a> {
        rows: &'a [(usize, usize)],
        chosen: Vec<Option<SimpleRowPartition>>,
        out: Vec<SimplePartition>,
        scheme: ColorScheme,
    }

    let removed_whites = |j: usize, sp: SimpleRowPartition| sp.left..len(j) - sp.right;

    fn go(
        ctx: &mut Ctx<'_>,
        i: usize,
        budget: i64,
        len: &dyn Fn(usize) -> usize,
        removed_whites: &dyn Fn(usize, SimpleRowPartition) -> core::ops::Range<usize>,
    ) -> Result<()> {
        if i == ctx.rows.len() {
            if ctx.out.len() as u64 >= ENUMERATION_CAP {
                return Err(Error::ShapeTooLarge { limit: ENUMERATION_CAP });
            }
            let mut stats = SimplePartitionStats::default();
            let mut rows = Vec::new();
            let mut weight = alloc::vec![0i64; ctx.scheme.nvars()];
            for (idx, c) in ctx.chosen.iter().enumerate() {
                if let Some(sp) = *c {
                    let (j, r) = ctx.rows[idx];
                    stats.add_row(j, sp);
                    rows.push(((j, r), sp));
                    for p in removed_whites(j, sp) {
                        let s = Stone { layer: j, row: r, pos: p, role: Role::White };
                        weight[ctx.scheme.variable(&s)] += 1;
                        if p + 1 < len(j) - sp.right {
                            let b = Stone { role: Role::Black, ..s };
                            weight[ctx.scheme.variable(&b)] += 1;
                        }
                    }
                }
            }
            ctx.out.push(SimplePartition { rows, stats, weight: Exponents::from(weight) });
            return Ok(());
        }
        ctx.chosen[i] = None;
        go(ctx, i + 1, budget, len, removed_whites)?;
        let (j, r) = ctx.rows[i];
        let l = len(j);
        let h = j as i64 - 1;
        for left in 0..l {
            for right in 0..l - left {
                let cost = 2 * ((left + right) as i64 + h) + 1;
                if cost > budget {
                    break;
                }
                let sp = SimpleRowPartition { left, right };
                // Each removed white must have the blacks resting on it
                // (from the layer above) removed.
                let ok = j == 1
                    || removed_whites(j, sp).all(|p| {
                        [r.checked_sub(1), Some(r)].into_iter().flatten().filter(|&rr| rr <= j - 2).all(|rr| {
                            let up = ctx.rows.iter().position(|&x| x == (j - 1, rr)).expect("row exists");
                            match ctx.chosen[up] {
                                // Blacks removed in that row sit strictly
                                // inside its removed white block.
                                Some(u) => p >= u.left && p + 1 < len(j - 1) - u.right,
                                None => false,
                            }
                        })
                    });
                if ok {
                    ctx.chosen[i] = Some(sp);
                    go(ctx, i + 1, budget - cost, len, removed_whites)?;
                    ctx.chosen[i] = None;
                }
            }
        }
        Ok(())
    }

    let mut ctx = Ctx { rows: &rows, chosen: alloc::vec![None; rows.len()], out: Vec::new(), scheme };
    go(&mut ctx, 0, budget, &len, &removed_whites)?;
    Ok(ctx.out)
}

/// Tallies simple partitions by their limit exponent.
pub fn simple_partition_series(parts: &[SimplePartition], scheme: ColorScheme) -> Polynomial {
    let mut counts: HashMap<Exponents, u64> = HashMap::new();
    for sp in parts {
        *counts.entry(sp.stats.limit_exponent(scheme)).or_insert(0) += 1;
    }
    Polynomial::from_terms(scheme.nvars(), counts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        .expect("exponent length matches scheme")
}

/// `1 + sum over (l, m) of y0^(l+m+1) y1^(l+m)`, through total degree
/// `degree_cap`.
pub fn limit_series_s(degree_cap: i64) -> Polynomial {
    let mut terms = Vec::new();
    if degree_cap >= 0 {
        terms.push((Exponents::zero(2), BigInt::from(1)));
    }
    let mut s = 0i64;
    while 2 * s < degree_cap {
        for _l in 0..=s {
            terms.push((Exponents::from([s + 1, s]), BigInt::from(1)));
        }
        s += 1;
    }
    Polynomial::from_terms(2, terms).expect("two variables")
}

/// The generating function of simple partitions of the infinite Aztec
/// pyramid, through total degree `degree_cap`.
///
/// A configuration is a finite up-closed set of altered rows, row `(h, r)`
/// with `0 <= r <= h` lying under `(h-1, r-1)` and `(h-1, r)`, together with
/// `(l, m)` per row that never decreases going down a covering edge.
pub fn limit_series_t(degree_cap: i64, scheme: ColorScheme) -> Polynomial {
    let nv = scheme.nvars();
    let mut counts: HashMap<Exponents, u64> = HashMap::new();
    if degree_cap < 0 {
        return Polynomial::zero(nv);
    }
    let max_h = (degree_cap.max(1) as usize - 1) / 2;
    let all_rows: Vec<(usize, usize)> = (0..=max_h).flat_map(|h| (0..=h).map(move |r| (h, r))).collect();
    let parents = |h: usize, r: usize| -> Vec<(usize, usize)> {
        if h == 0 {
            return Vec::new();
        }
        [r.checked_sub(1), Some(r)].into_iter().flatten().filter(|&p| p < h).map(|p| (h - 1, p)).collect()
    };

    // Up-closed row sets within the degree budget.
    let mut sets: Vec<Vec<(usize, usize)>> = Vec::new();
    fn choose(
        rows: &[(usize, usize)],
        i: usize,
        cur: &mut Vec<(usize, usize)>,
        cost: i64,
        cap: i64,
        parents: &dyn Fn(usize, usize) -> Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == rows.len() {
            out.push(cur.clone());
            return;
        }
        choose(rows, i + 1, cur, cost, cap, parents, out);
        let (h, r) = rows[i];
        let c = 2 * h as i64 + 1;
        if cost + c <= cap && parents(h, r).iter().all(|p| cur.contains(p)) {
            cur.push((h, r));
            choose(rows, i + 1, cur, cost + c, cap, parents, out);
            cur.pop();
        }
    }
    if degree_cap >= 1 {
        choose(&all_rows, 0, &mut Vec::new(), 0, degree_cap, &parents, &mut sets);
    } else {
        sets.push(Vec::new());
    }

    for set in &sets {
        let base: i64 = set.iter().map(|&(h, _)| 2 * h as i64 + 1).sum();
        let parent_idx: Vec<Vec<usize>> = set
            .iter()
            .map(|&(h, r)| parents(h, r).iter().map(|p| set.iter().position(|x| x == p).unwrap()).collect())
            .collect();
        let mut assign: Vec<(usize, usize)> = alloc::vec![(0, 0); set.len()];
        #[allow(clippy::too_many_arguments)]
        fn fill(
            set: &[(usize, usize)],
            parent_idx: &[Vec<usize>],
            i: usize,
            assign: &mut Vec<(usize, usize)>,
            spare: i64,
            scheme: ColorScheme,
            counts: &mut HashMap<Exponents, u64>,
        ) {
            if i == set.len() {
                let mut st = SimplePartitionStats::default();
                for (&(h, _), &(l, m)) in set.iter().zip(assign.iter()) {
                    st.add_row(h + 1, SimpleRowPartition { left: l, right: m });
                }
                *counts.entry(st.limit_exponent(scheme)).or_insert(0) += 1;
                return;
            }
            let lo_l = parent_idx[i].iter().map(|&p| assign[p].0).max().unwrap_or(0);
            let lo_m = parent_idx[i].iter().map(|&p| assign[p].1).max().unwrap_or(0);
            let mut l = lo_l;
            while 2 * (l + lo_m) as i64 <= spare {
                let mut m = lo_m;
                while 2 * (l + m) as i64 <= spare {
                    assign[i] = (l, m);
                    fill(set, parent_idx, i + 1, assign, spare - 2 * (l + m) as i64, scheme, counts);
                    m += 1;
                }
                l += 1;
            }
        }
        fill(set, &parent_idx, 0, &mut assign, degree_cap - base, scheme, &mut counts);
    }
    Polynomial::from_terms(nv, counts.into_iter().map(|(e, c)| (e, BigInt::from(c)))).expect("exponent length")
}
