//! Mutation runs carrying polynomial labels: F-polynomials and C-matrices
//! step by step, plus a degree-windowed run that works directly in the
//! inverse-C-matrix coordinates.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, IntMatrix};
use crate::poly::{Exponents, Polynomial, Substitution};
use crate::quiver::{conifold_base, f0_base, kronecker_base, Quiver, TwoCyclePolicy};

/// Default bound on the number of steps a run may record.
pub const DEFAULT_STEP_CAP: usize = 64;

/// Everything needed to start a run: framed quiver, cyclic mutation
/// sequence, and 2-cycle policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSetup {
    pub quiver: Quiver,
    pub sequence: Vec<usize>,
    pub policy: TwoCyclePolicy,
}

impl RunSetup {
    pub fn new(quiver: Quiver, sequence: Vec<usize>, policy: TwoCyclePolicy) -> Result<Self> {
        if sequence.is_empty() {
            return Err(Error::InvalidParameter("mutation sequence is empty".into()));
        }
        if let Some(&bad) = sequence.iter().find(|&&k| k >= quiver.n()) {
            return Err(if bad < quiver.size() {
                Error::FrozenVertexMutation { vertex: bad }
            } else {
                Error::IndexOutOfRange { index: bad, len: quiver.size() }
            });
        }
        Ok(RunSetup { quiver, sequence, policy })
    }

    /// Vertex mutated at step `k >= 1`.
    pub fn vertex_at(&self, k: usize) -> usize {
        self.sequence[(k - 1) % self.sequence.len()]
    }

    /// The quivers `Q_0, ..., Q_steps`.
    pub fn quivers(&self, steps: usize) -> Result<Vec<Quiver>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(self.quiver.clone());
        for k in 1..=steps {
            let q = out[k - 1].mutate(self.vertex_at(k), self.policy)?;
            out.push(q);
        }
        Ok(out)
    }
}

/// Optional rewrite of `F~_k` on steps of one parity, used to remove the
/// period-2 flip of the transformed polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityNormalization {
    pub permutation: Vec<usize>,
    pub even: bool,
}

/// The three built-in case studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Kronecker,
    Conifold,
    F0,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Kronecker, Preset::Conifold, Preset::F0];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Kronecker => "kronecker",
            Preset::Conifold => "conifold",
            Preset::F0 => "f0",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn base(self) -> Vec<Vec<u64>> {
        match self {
            Preset::Kronecker => kronecker_base(),
            Preset::Conifold => conifold_base(),
            Preset::F0 => f0_base(),
        }
    }

    pub fn sequence(self) -> Vec<usize> {
        match self {
            Preset::F0 => alloc::vec![0, 1, 2, 3],
            _ => alloc::vec![0, 1],
        }
    }

    pub fn policy(self) -> TwoCyclePolicy {
        match self {
            Preset::Conifold => TwoCyclePolicy::Keep,
            _ => TwoCyclePolicy::Cancel,
        }
    }

    pub fn setup(self) -> RunSetup {
        RunSetup::new(Quiver::frame(&self.base()).expect("preset base is valid"), self.sequence(), self.policy())
            .expect("preset sequence is valid")
    }

    /// Permutation applied to even (reindexed) steps when parity
    /// normalization is requested.
    pub fn normalization(self) -> ParityNormalization {
        let permutation = match self {
            Preset::F0 => alloc::vec![2, 3, 0, 1],
            _ => alloc::vec![1, 0],
        };
        ParityNormalization { permutation, even: true }
    }

    /// `(offset, stride)` restricting the trace before comparison.
    pub fn subsample(self) -> Option<(usize, usize)> {
        match self {
            Preset::F0 => Some((2, 2)),
            _ => None,
        }
    }

    /// Comparison period for stabilization, with and without normalization.
    pub fn period(self, normalized: bool) -> usize {
        if normalized {
            1
        } else {
            2
        }
    }
}

/// One step of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// Position in this trace (1-based).
    pub k: usize,
    /// Step number in the original, unsubsampled run.
    pub source_step: usize,
    pub vertex: usize,
    pub f: Polynomial,
    pub c: CMatrix,
    /// Quiver after the step, when snapshots are kept.
    pub quiver: Option<Quiver>,
}

/// Records for steps `1..=len`. Step 0 is implicit: `F_0 = 1` and `C_0` is
/// the C-matrix of the unmutated framed quiver, `-I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationTrace {
    pub nvars: usize,
    pub records: Vec<StepRecord>,
}

impl MutationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `F_k`, with `F_0 = 1`.
    pub fn f(&self, k: usize) -> Option<Polynomial> {
        if k == 0 {
            Some(Polynomial::one(self.nvars))
        } else {
            self.records.get(k - 1).map(|r| r.f.clone())
        }
    }

    /// `C_k`, with `C_0 = -I`.
    pub fn c(&self, k: usize) -> Option<CMatrix> {
        if k == 0 {
            let mut c = IntMatrix::zero(self.nvars);
            for i in 0..self.nvars {
                c.set(i, i, -1);
            }
            Some(c)
        } else {
            self.records.get(k - 1).map(|r| r.c.clone())
        }
    }
}

/// A run in progress: the current quiver and one label per mutable vertex.
#[derive(Clone, Debug)]
pub struct MutationRun {
    setup: RunSetup,
    quiver: Quiver,
    labels: Vec<Polynomial>,
    step: usize,
}

impl MutationRun {
    pub fn new(setup: RunSetup) -> Self {
        let n = setup.quiver.n();
        MutationRun { quiver: setup.quiver.clone(), labels: alloc::vec![Polynomial::one(n); n], setup, step: 0 }
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn labels(&self) -> &[Polynomial] {
        &self.labels
    }

    /// Performs the next mutation, checking that the new label has constant
    /// term 1 and only positive coefficients.
    pub fn advance(&mut self, keep_quiver: bool) -> Result<StepRecord> {
        let k = self.step + 1;
        let v = self.setup.vertex_at(k);
        let f = exchange_label(&self.quiver, &self.labels, v)?;
        check_label(&f, k)?;
        let next = self.quiver.mutate(v, self.setup.policy)?;
        self.labels[v] = f.clone();
        self.quiver = next;
        self.step = k;
        Ok(StepRecord {
            k,
            source_step: k,
            vertex: v,
            f,
            c: self.quiver.c_matrix(),
            quiver: keep_quiver.then(|| self.quiver.clone()),
        })
    }
}

fn check_label(f: &Polynomial, step: usize) -> Result<()> {
    if !f.constant_term().is_one() {
        return Err(Error::InvariantViolation {
            step,
            detail: alloc::format!("constant term is {}", f.constant_term()),
        });
    }
    if !f.all_coefficients_positive() {
        return Err(Error::InvariantViolation { step, detail: "non-positive coefficient".to_string() });
    }
    Ok(())
}

/// The exchange relation at mutable vertex `k`: the product over incoming
/// arrows plus the product over outgoing arrows, divided by the old label.
/// Frozen vertex `n + i` contributes `y_i`.
pub fn exchange_label(q: &Quiver, labels: &[Polynomial], k: usize) -> Result<Polynomial> {
    let n = q.n();
    if k >= q.size() {
        return Err(Error::IndexOutOfRange { index: k, len: q.size() });
    }
    if k >= n {
        return Err(Error::FrozenVertexMutation { vertex: k });
    }
    if labels.len() != n {
        return Err(Error::ShapeMismatch(alloc::format!("{} labels for {n} vertices", labels.len())));
    }
    // Both sides often raise the same label to the same power (2-cycles).
    let mut powers: Vec<(usize, u64, Polynomial)> = Vec::new();
    let mut side = |incoming: bool| -> Polynomial {
        let count = |j: usize| if incoming { q.get(j, k) } else { q.get(k, j) };
        let mono = Exponents::from((0..n).map(|i| count(n + i) as i64).collect::<Vec<_>>());
        let mut acc: Option<Polynomial> = None;
        for j in 0..n {
            let m = count(j);
            if m == 0 {
                continue;
            }
            let idx = match powers.iter().position(|(pj, pm, _)| *pj == j && *pm == m) {
                Some(i) => i,
                None => {
                    powers.push((j, m, labels[j].pow(m as u32)));
                    powers.len() - 1
                }
            };
            let factor = &powers[idx].2;
            acc = Some(match acc {
                None => factor.clone(),
                Some(a) => a.checked_mul(factor).expect("same ring"),
            });
        }
        match acc {
            None => Polynomial::monomial(mono, BigInt::one()),
            Some(a) => a.mul_monomial(&mono, &BigInt::one()),
        }
    };
    let incoming = side(true);
    let outgoing = side(false);
    let num = incoming.checked_add(&outgoing)?;
    num.div_exact(&labels[k])
}

/// Runs `steps` mutations. Refuses to exceed `cap` steps.
pub fn run(setup: &RunSetup, steps: usize, cap: usize, keep_quivers: bool) -> Result<MutationTrace> {
    if steps > cap {
        return Err(Error::StepCapExceeded { requested: steps, cap });
    }
    let mut r = MutationRun::new(setup.clone());
    let mut records = Vec::with_capacity(steps);
    for _ in 0..steps {
        records.push(r.advance(keep_quivers)?);
    }
    Ok(MutationTrace { nvars: setup.quiver.n(), records })
}

/// Keeps records `offset, offset + stride, ...` (in the trace's own
/// 1-based numbering) and renumbers them `1, 2, 3, ...`.
pub fn subsample(trace: &MutationTrace, offset: usize, stride: usize) -> Result<MutationTrace> {
    if stride == 0 || offset == 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "subsample needs offset >= 1 and stride >= 1, got {offset}:{stride}"
        )));
    }
    let records = trace
        .records
        .iter()
        .filter(|r| r.k >= offset && (r.k - offset).is_multiple_of(stride))
        .enumerate()
        .map(|(i, r)| StepRecord { k: i + 1, ..r.clone() })
        .collect();
    Ok(MutationTrace { nvars: trace.nvars, records })
}

/// Step numbers of the original run selected by a subsample, up to `horizon`
/// reindexed steps.
pub fn subsample_steps(offset: usize, stride: usize, horizon: usize) -> Vec<usize> {
    (0..horizon).map(|i| offset + i * stride).collect()
}

/// `F~_K = F_K` with exponents mapped by `C_K^{-1}`, known exactly through
/// total degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedLabel {
    pub step: usize,
    pub c: CMatrix,
    pub degree: i64,
    pub poly: Polynomial,
    /// Largest intermediate label (in terms) during the computation.
    pub peak_terms: usize,
}

/// Computes the transformed polynomial `F~_K` through total degree `degree`
/// without ever forming the full `F_K`.
///
/// The exchange relations are replayed in the transformed ring: mutable
/// labels start at 1 and frozen vertex `n + j` carries the monomial given by
/// column `j` of `C_K^{-1}`. Every intermediate label then keeps positive
/// coefficients, so the minimal total degree of each label is computed
/// symbolically first. A backward pass turns the target degree into the
/// degree each intermediate label must be known to, and the forward pass
/// computes exactly that much, using power-series division by the single
/// lowest term of the old label.
pub fn windowed_label(setup: &RunSetup, step: usize, degree: i64) -> Result<WindowedLabel> {
    if step == 0 {
        return Err(Error::InvalidParameter("windowed step must be at least 1".into()));
    }
    let n = setup.quiver.n();
    let quivers = setup.quivers(step)?;
    let c = quivers[step].c_matrix();
    let ci = c.invert_unimodular()?;
    let frozen: Vec<Exponents> = (0..n).map(|j| Exponents::from(ci.column(j))).collect();
    let fw: Vec<i64> = frozen.iter().map(Exponents::total_degree).collect();

    struct Side {
        factors: Vec<(usize, u64)>,
        mono: Exponents,
        min: i64,
    }
    struct Plan {
        old: usize,
        sides: [Side; 2],
    }

    // Label versions: 0..n are the initial labels, n + s is the label made
    // at step s + 1.
    let mut mins: Vec<i64> = alloc::vec![0; n + step];
    let mut current: Vec<usize> = (0..n).collect();
    let mut plans: Vec<Plan> = Vec::with_capacity(step);
    for s in 0..step {
        let q = &quivers[s];
        let v = setup.vertex_at(s + 1);
        let make = |incoming: bool| -> Side {
            let count = |j: usize| if incoming { q.get(j, v) } else { q.get(v, j) };
            let mut mono = Exponents::zero(n);
            let mut min = 0;
            for j in 0..n {
                let m = count(n + j);
                if m > 0 {
                    mono = mono.add(&frozen[j].scale(m as i64));
                    min += fw[j] * m as i64;
                }
            }
            let factors: Vec<(usize, u64)> = (0..n).filter(|&j| count(j) > 0).map(|j| (current[j], count(j))).collect();
            for &(ver, m) in &factors {
                min += mins[ver] * m as i64;
            }
            Side { factors, mono, min }
        };
        let sides = [make(true), make(false)];
        let old = current[v];
        mins[n + s] = sides[0].min.min(sides[1].min) - mins[old];
        plans.push(Plan { old, sides });
        current[v] = n + s;
    }

    // Backward: the degree each version must be known to.
    let mut demand: Vec<Option<i64>> = alloc::vec![None; n + step];
    demand[n + step - 1] = Some(degree);
    let raise = |slot: &mut Option<i64>, d: i64| {
        *slot = Some(slot.map_or(d, |x| x.max(d)));
    };
    for s in (0..step).rev() {
        let x = n + s;
        let Some(d) = demand[x] else { continue };
        if d < mins[x] {
            continue;
        }
        let plan = &plans[s];
        let d_num = d + mins[plan.old];
        raise(&mut demand[plan.old], d - mins[x] + mins[plan.old]);
        for side in &plan.sides {
            for &(ver, _) in &side.factors {
                raise(&mut demand[ver], d_num - (side.min - mins[ver]));
            }
        }
    }

    let mut values: Vec<Option<Polynomial>> = alloc::vec![None; n + step];
    for v in values.iter_mut().take(n) {
        *v = Some(Polynomial::one(n));
    }
    let mut peak = 1;
    for s in 0..step {
        let x = n + s;
        let d = match demand[x] {
            Some(d) if d >= mins[x] => d,
            _ => continue,
        };
        let plan = &plans[s];
        let d_num = d + mins[plan.old];
        let mut num = Polynomial::zero(n);
        for side in &plan.sides {
            let mut acc = Polynomial::monomial(side.mono.clone(), BigInt::one());
            let mut rest = side.min - side.mono.total_degree();
            for &(ver, m) in &side.factors {
                let val = values[ver].as_ref().expect("demanded label computed");
                let val = val.truncate(demand[ver].unwrap_or(i64::MIN));
                for _ in 0..m {
                    rest -= mins[ver];
                    acc = acc.mul_truncated(&val, d_num - rest)?;
                }
            }
            num = num.checked_add(&acc)?;
        }
        let num = num.truncate(d_num);
        let old = values[plan.old].as_ref().expect("demanded label computed").truncate(d - mins[x] + mins[plan.old]);
        let q = series_divide(&num, &old, mins[plan.old], d, d_num, s + 1)?;
        if q.min_total_degree() != Some(mins[x]) {
            return Err(Error::WindowUnsupported(alloc::format!(
                "step {}: lowest degree {:?} differs from the predicted {}",
                s + 1,
                q.min_total_degree(),
                mins[x]
            )));
        }
        peak = peak.max(q.len());
        values[x] = Some(q);
    }
    let poly = values[n + step - 1].take().map(|p| p.truncate(degree)).unwrap_or_else(|| Polynomial::zero(n));
    Ok(WindowedLabel { step, c, degree, poly, peak_terms: peak })
}

/// Power-series quotient `num / den` through total degree `d`, given `num`
/// through `d_num` and `den` whose lowest-degree part is a single monomial
/// of degree `den_min`.
fn series_divide(
    num: &Polynomial,
    den: &Polynomial,
    den_min: i64,
    d: i64,
    d_num: i64,
    step: usize,
) -> Result<Polynomial> {
    let n = num.nvars();
    let face: Vec<(&Exponents, &BigInt)> = den.terms().filter(|(e, _)| e.total_degree() == den_min).collect();
    if face.len() != 1 {
        return Err(Error::WindowUnsupported(alloc::format!(
            "step {step}: lowest-degree part of the divisor has {} terms",
            face.len()
        )));
    }
    let (lt, lc) = (face[0].0.clone(), face[0].1.clone());
    let others: Vec<(&Exponents, &BigInt)> = den.terms().filter(|(e, _)| **e != lt).collect();
    let mut rem: alloc::collections::BTreeMap<(i64, Exponents), BigInt> =
        num.terms().map(|(e, c)| ((e.total_degree(), e.clone()), c.clone())).collect();
    let mut out: Vec<(Exponents, BigInt)> = Vec::new();
    while let Some(((_, x), c)) = rem.pop_first() {
        let q = x.sub(&lt);
        let (qc, r) = c.div_rem(&lc);
        if !r.is_zero() {
            return Err(Error::NonExactDivision);
        }
        if q.total_degree() > d {
            continue;
        }
        for (y, cy) in &others {
            let e = q.add(y);
            let w = e.total_degree();
            if w <= d_num {
                let key = (w, e);
                let slot = rem.entry(key).or_insert_with(BigInt::zero);
                *slot -= &qc * *cy;
                if slot.is_zero() {
                    let key = (w, q.add(y));
                    rem.remove(&key);
                }
            }
        }
        out.push((q, qc));
    }
    let p = Polynomial::from_terms(n, out)?;
    if !p.all_coefficients_positive() {
        return Err(Error::InvariantViolation {
            step,
            detail: "non-positive coefficient in the transformed window".to_string(),
        });
    }
    Ok(p)
}

/// Applies the parity normalization to `p` when `k` has the configured
/// parity.
pub fn normalize_if(p: &Polynomial, k: usize, norm: Option<&ParityNormalization>) -> Result<Polynomial> {
    match norm {
        Some(nm) if k.is_multiple_of(2) == nm.even => p.substitute(&Substitution::permutation(&nm.permutation)?),
        _ => Ok(p.clone()),
    }
}

/// Human-readable one-line summary of a setup, for reports.
pub fn describe(setup: &RunSetup) -> String {
    alloc::format!("n={} sequence={:?} policy={:?}", setup.quiver.n(), setup.sequence, setup.policy)
}

/// True when every coefficient is positive and the constant term is 1.
pub fn is_f_polynomial_shaped(p: &Polynomial) -> bool {
    p.constant_term().is_one() && p.terms().all(|(_, c)| c.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n).unwrap()
    }

    #[test]
    fn exchange_examples() {
        let k = Preset::Kronecker.setup();
        let ones = alloc::vec![Polynomial::one(2); 2];
        assert_eq!(exchange_label(&k.quiver, &ones, 0).unwrap(), p("y0 + 1", 2));
        let c = Preset::Conifold.setup();
        assert_eq!(exchange_label(&c.quiver, &ones, 0).unwrap(), p("y0 + 1", 2));
        let t = run(&k, 2, DEFAULT_STEP_CAP, false).unwrap();
        assert_eq!(t.f(2).unwrap(), p("y0^2*y1 + y0^2 + 2*y0 + 1", 2));
        assert!(exchange_label(&k.quiver, &ones, 2).is_err());
    }

    #[test]
    fn preset_tables() {
        let t = run(&Preset::Conifold.setup(), 2, 64, false).unwrap();
        assert_eq!(t.f(2).unwrap(), p("y0^4*y1 + 2*y0^3*y1 + y0^2*y1 + y0^2 + 2*y0 + 1", 2));
        let t = run(&Preset::F0.setup(), 4, 64, true).unwrap();
        assert_eq!(t.f(4).unwrap(), p("y0^2*y1^2*y3 + 2*y0*y1^2*y3 + y1^2*y3 + y1^2 + 2*y1 + 1", 4));
        assert!(t.records.iter().all(|r| r.quiver.is_some()));
        assert_eq!(t.f(0).unwrap(), Polynomial::one(4));
        assert_eq!(t.c(0).unwrap(), Preset::F0.setup().quiver.c_matrix());
    }

    #[test]
    fn step_cap() {
        assert_eq!(
            run(&Preset::Kronecker.setup(), 65, DEFAULT_STEP_CAP, false),
            Err(Error::StepCapExceeded { requested: 65, cap: 64 })
        );
    }

    #[test]
    fn subsampling() {
        let t = run(&Preset::F0.setup(), 8, 64, false).unwrap();
        assert_eq!(subsample(&t, 1, 1).unwrap(), t);
        let even = subsample(&t, 2, 2).unwrap();
        assert_eq!(even.len(), 4);
        assert_eq!(even.records[1].source_step, 4);
        assert_eq!(even.records[1].k, 2);
        assert!(subsample(&t, 1, 0).is_err());
    }

    #[test]
    fn bad_setups() {
        let q = Quiver::frame(&kronecker_base()).unwrap();
        assert!(RunSetup::new(q.clone(), alloc::vec![], TwoCyclePolicy::Cancel).is_err());
        assert_eq!(
            RunSetup::new(q, alloc::vec![0, 3], TwoCyclePolicy::Cancel),
            Err(Error::FrozenVertexMutation { vertex: 3 })
        );
    }

    #[test]
    fn window_agrees_with_full_transform() {
        for preset in Preset::ALL {
            let setup = preset.setup();
            let steps = if preset == Preset::F0 { 10 } else { 7 };
            let t = run(&setup, steps, 64, false).unwrap();
            for k in 1..=steps {
                let ci = t.c(k).unwrap().invert_unimodular().unwrap();
                let full = t.f(k).unwrap().map_exponents(|e| Exponents::from(ci.apply(e.as_slice()))).truncate(9);
                let w = windowed_label(&setup, k, 9).unwrap();
                assert_eq!(w.poly, full, "{preset:?} step {k}");
            }
        }
    }
}
