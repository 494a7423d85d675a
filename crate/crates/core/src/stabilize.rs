//! The inverse-C-matrix change of basis and detection of stable terms.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::engine::{normalize_if, windowed_label, MutationTrace, ParityNormalization, RunSetup};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, IntMatrix};
use crate::poly::{Exponents, Polynomial, Substitution};

/// Exact integer inverse of a matrix with determinant `±1`.
pub fn invert_unimodular(m: &IntMatrix) -> Result<IntMatrix> {
    m.invert_unimodular()
}

/// Replaces every exponent vector `a` of `f` by `C^{-1} a`.
pub fn transform_polynomial(f: &Polynomial, c: &CMatrix) -> Result<Polynomial> {
    if c.dim() != f.nvars() {
        return Err(Error::VariableCountMismatch { left: f.nvars(), right: c.dim() });
    }
    let ci = c.invert_unimodular()?;
    Ok(apply_matrix(f, &ci))
}

/// Replaces every exponent vector `a` of `f` by `m a`. An invertible `m`
/// cannot merge two terms.
pub fn apply_matrix(f: &Polynomial, m: &IntMatrix) -> Polynomial {
    let out = f.map_exponents(|e| Exponents::from(m.apply(e.as_slice())));
    debug_assert!(m.determinant().is_zero() || out.len() == f.len());
    out
}

/// Applies `permutation` to `f` when `k` has the requested parity.
pub fn normalize_parity(f: &Polynomial, k: usize, permutation: &[usize], even: bool) -> Result<Polynomial> {
    if k.is_multiple_of(2) == even {
        f.substitute(&Substitution::permutation(permutation)?)
    } else {
        Ok(f.clone())
    }
}

/// One transformed polynomial `F~_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedRecord {
    pub k: usize,
    pub source_step: usize,
    pub poly: Polynomial,
    /// Terms are exact through this total degree; `None` means the whole
    /// polynomial is known.
    pub exact_degree: Option<i64>,
}

/// A sequence of transformed polynomials, numbered like the trace they came
/// from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedTrace {
    pub nvars: usize,
    pub records: Vec<TransformedRecord>,
}

impl TransformedTrace {
    /// Transforms every record of a full trace.
    pub fn from_trace(trace: &MutationTrace) -> Result<Self> {
        let records = trace
            .records
            .iter()
            .map(|r| {
                Ok(TransformedRecord {
                    k: r.k,
                    source_step: r.source_step,
                    poly: transform_polynomial(&r.f, &r.c)?,
                    exact_degree: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TransformedTrace { nvars: trace.nvars, records })
    }

    /// Degree-windowed transforms of the given original steps, numbered
    /// `1, 2, ...` in the order given.
    pub fn windowed(setup: &RunSetup, source_steps: &[usize], degree: i64) -> Result<Self> {
        let records = source_steps
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let w = windowed_label(setup, s, degree)?;
                Ok(TransformedRecord { k: i + 1, source_step: s, poly: w.poly, exact_degree: Some(degree) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TransformedTrace { nvars: setup.quiver.n(), records })
    }

    pub fn get(&self, k: usize) -> Option<&TransformedRecord> {
        self.records.iter().find(|r| r.k == k)
    }
}

/// Parameters of the finite-horizon stability rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableOptions {
    pub degree_cap: i64,
    pub period: usize,
    pub window: usize,
    /// Residue class compared, counted from the trace's first record.
    pub phase: usize,
    pub normalization: Option<ParityNormalization>,
}

impl StableOptions {
    pub fn new(degree_cap: i64, period: usize, window: usize) -> Self {
        StableOptions { degree_cap, period, window, phase: 0, normalization: None }
    }

    pub fn normalized(mut self, n: ParityNormalization) -> Self {
        self.normalization = Some(n);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableTerm {
    pub exp: Exponents,
    pub coeff: BigInt,
    pub first_stable_step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableReport {
    pub degree_cap: i64,
    pub period: usize,
    pub window: usize,
    pub phase: usize,
    pub horizon: usize,
    /// Canonical term order.
    pub terms: Vec<StableTerm>,
}

impl StableReport {
    /// The stable terms as a truncated series.
    pub fn series(&self, nvars: usize) -> Polynomial {
        Polynomial::from_terms(nvars, self.terms.iter().map(|t| (t.exp.clone(), t.coeff.clone())))
            .expect("terms have matching length")
    }
}

/// Finds the terms of total degree `<= degree_cap` that have settled.
///
/// Only records in the chosen residue class are compared. A term present in
/// the last compared record is stable when its coefficient is unchanged over
/// a run of at least `window` consecutive compared records ending there; its
/// first stable step is where that run begins.
pub fn stable_series(trace: &TransformedTrace, opts: &StableOptions) -> Result<StableReport> {
    if opts.period == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    if opts.window < 2 {
        return Err(Error::InvalidParameter("window must be at least 2".into()));
    }
    if opts.phase >= opts.period {
        return Err(Error::InvalidParameter("phase must be smaller than the period".into()));
    }
    let first = trace.records.first().map_or(1, |r| r.k);
    let class: Vec<&TransformedRecord> =
        trace.records.iter().filter(|r| (r.k - first) % opts.period == opts.phase).collect();
    if class.len() < opts.window {
        return Err(Error::InsufficientTrace { needed: opts.window, available: class.len() });
    }
    for r in &class {
        if let Some(d) = r.exact_degree {
            if d < opts.degree_cap {
                return Err(Error::WindowUnsupported(alloc::format!("step {} is exact only through degree {d}", r.k)));
            }
        }
    }
    let polys: Vec<Polynomial> = class
        .iter()
        .map(|r| Ok(normalize_if(&r.poly, r.k, opts.normalization.as_ref())?.truncate(opts.degree_cap)))
        .collect::<Result<_>>()?;
    let last = polys.last().expect("class is nonempty");
    let mut terms = Vec::new();
    for (e, c) in last.sorted_terms() {
        let mut start = polys.len() - 1;
        while start > 0 && polys[start - 1].coeff(e) == Some(c) {
            start -= 1;
        }
        if polys.len() - start >= opts.window {
            terms.push(StableTerm { exp: e.clone(), coeff: c.clone(), first_stable_step: class[start].k });
        }
    }
    Ok(StableReport {
        degree_cap: opts.degree_cap,
        period: opts.period,
        window: opts.window,
        phase: opts.phase,
        horizon: trace.records.last().map_or(0, |r| r.k),
        terms,
    })
}

/// `1 + sum_{i >= 1} i y0^i y1^(i-1)` through total degree `degree_cap`.
pub fn kronecker_limit(degree_cap: i64) -> Polynomial {
    let mut terms = alloc::vec![(Exponents::zero(2), BigInt::from(1))];
    let mut i = 1i64;
    while 2 * i - 1 <= degree_cap {
        terms.push((Exponents::from([i, i - 1]), BigInt::from(i)));
        i += 1;
    }
    if degree_cap < 0 {
        terms.clear();
    }
    Polynomial::from_terms(2, terms).expect("two variables")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Preset, DEFAULT_STEP_CAP};
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n).unwrap()
    }

    #[test]
    fn transform_examples() {
        let t = run(&Preset::Kronecker.setup(), 2, DEFAULT_STEP_CAP, false).unwrap();
        assert_eq!(
            transform_polynomial(&t.f(2).unwrap(), &t.c(2).unwrap()).unwrap().to_string(),
            "1 + y1 + 2*y0*y1^2 + y0^2*y1^4"
        );
        let t = run(&Preset::Conifold.setup(), 2, DEFAULT_STEP_CAP, false).unwrap();
        assert_eq!(
            transform_polynomial(&t.f(2).unwrap(), &t.c(2).unwrap()).unwrap(),
            p("y0^2*y1^5 + y0^2*y1^4 + 2*y0*y1^3 + 2*y0*y1^2 + y1 + 1", 2)
        );
        let c = t.c(2).unwrap();
        assert_eq!(transform_polynomial(&Polynomial::one(2), &c).unwrap(), Polynomial::one(2));
        let bad = IntMatrix::from_rows(&[alloc::vec![2, 0], alloc::vec![0, 2]]).unwrap();
        assert!(matches!(transform_polynomial(&Polynomial::one(2), &bad), Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn normalization_examples() {
        let f2 = p("y0^2*y1^4 + 2*y0*y1^2 + y1 + 1", 2);
        assert_eq!(normalize_parity(&f2, 2, &[1, 0], true).unwrap(), p("y0^4*y1^2 + 2*y0^2*y1 + y0 + 1", 2));
        assert_eq!(normalize_parity(&f2, 3, &[1, 0], true).unwrap(), f2);
        assert_eq!(normalize_parity(&f2, 2, &[0, 1], true).unwrap(), f2);
    }

    #[test]
    fn kronecker_limit_examples() {
        assert_eq!(kronecker_limit(0), Polynomial::one(2));
        assert_eq!(kronecker_limit(7), p("1 + y0 + 2*y0^2*y1 + 3*y0^3*y1^2 + 4*y0^4*y1^3", 2));
        assert_eq!(kronecker_limit(3).truncate(3), p("1 + y0 + 2*y0^2*y1", 2));
    }

    #[test]
    fn kronecker_stable_prefix() {
        let setup = Preset::Kronecker.setup();
        let tt = TransformedTrace::from_trace(&run(&setup, 12, 64, false).unwrap()).unwrap();
        let opts = StableOptions::new(3, 1, 3).normalized(Preset::Kronecker.normalization());
        let rep = stable_series(&tt, &opts).unwrap();
        assert_eq!(rep.series(2), p("1 + y0 + 2*y0^2*y1", 2));
        let opts = StableOptions::new(5, 1, 3).normalized(Preset::Kronecker.normalization());
        let rep = stable_series(&tt, &opts).unwrap();
        assert_eq!(rep.series(2), kronecker_limit(5));
        assert_eq!(rep.horizon, 12);
    }

    #[test]
    fn stability_errors() {
        let tt = TransformedTrace::from_trace(&run(&Preset::Kronecker.setup(), 3, 64, false).unwrap()).unwrap();
        assert_eq!(
            stable_series(&tt, &StableOptions::new(3, 2, 3)),
            Err(Error::InsufficientTrace { needed: 3, available: 2 })
        );
        assert!(stable_series(&tt, &StableOptions::new(3, 1, 1)).is_err());
        let w = TransformedTrace::windowed(&Preset::Kronecker.setup(), &[1, 2, 3], 4).unwrap();
        assert!(matches!(stable_series(&w, &StableOptions::new(5, 1, 2)), Err(Error::WindowUnsupported(_))));
    }

    #[test]
    fn odd_transform_law() {
        // For the odd-step matrices [[k, -(k+1)], [k-1, -k]], a monomial
        // y0^a y1^b lands on y0^(k(a-b)-b) y1^(k(a-b)-a).
        for preset in [Preset::Kronecker, Preset::Conifold] {
            let t = run(&preset.setup(), 7, 64, false).unwrap();
            for k in (1..=7).step_by(2) {
                let f = t.f(k).unwrap();
                let kk = k as i64;
                let expected = f.map_exponents(|e| {
                    let (a, b) = (e[0], e[1]);
                    Exponents::from([kk * (a - b) - b, kk * (a - b) - a])
                });
                assert_eq!(transform_polynomial(&f, &t.c(k).unwrap()).unwrap(), expected);
            }
        }
    }

    proptest! {
        #[test]
        fn transform_round_trip(
            rows in proptest::collection::vec(-3i64..=3, 6),
            terms in proptest::collection::vec((proptest::collection::vec(-4i64..=4, 2), -9i64..=9), 0..8),
        ) {
            // Unimodular matrices as products of elementary ones.
            let mut m = IntMatrix::identity(2);
            for (i, &x) in rows.iter().enumerate() {
                let mut e = IntMatrix::identity(2);
                if i % 2 == 0 { e.set(0, 1, x) } else { e.set(1, 0, x) }
                m = m.mul(&e).unwrap();
            }
            let f = Polynomial::from_terms(2, terms.into_iter().map(|(e, c)| (Exponents::from(e), c))).unwrap();
            let g = transform_polynomial(&f, &m).unwrap();
            prop_assert_eq!(g.len(), f.len());
            prop_assert_eq!(apply_matrix(&g, &m), f);
        }
    }
}
