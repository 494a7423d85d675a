//! Named consistency checks for a preset, each an independent oracle or
//! structural invariant.

use std::time::Instant;

use stable_cluster_core::engine::{run, subsample, windowed_label, Preset, DEFAULT_STEP_CAP};
use stable_cluster_core::pyramids::{
    limit_series_s, limit_series_t, partition_count, partition_function, row_partition_function_dp, ColorScheme,
    PyramidShape, ShapeKind,
};
use stable_cluster_core::stabilize::{
    kronecker_limit, stable_series, transform_polynomial, StableOptions, TransformedTrace,
};
use stable_cluster_core::{Exponents, IntMatrix, Polynomial, TwoCyclePolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Outcome = Result<String, String>;

fn check(name: &'static str, f: impl FnOnce() -> Outcome) -> CheckResult {
    let t = Instant::now();
    let r = f();
    let seconds = t.elapsed().as_secs_f64();
    match r {
        Ok(detail) => CheckResult { name, passed: true, detail, seconds },
        Err(detail) => CheckResult { name, passed: false, detail, seconds },
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Closed form of the Kronecker and conifold C-matrices.
pub fn c_closed_form(k: usize) -> IntMatrix {
    let k = k as i64;
    let rows =
        if k % 2 == 1 { vec![vec![k, -(k + 1)], vec![k - 1, -k]] } else { vec![vec![-(k + 1), k], vec![-k, k - 1]] };
    IntMatrix::from_rows(&rows).expect("square")
}

pub fn verify_preset(preset: Preset, max_k: usize) -> Vec<CheckResult> {
    match preset {
        Preset::Kronecker => kronecker(max_k),
        Preset::Conifold => conifold(max_k),
        Preset::F0 => f0(max_k),
    }
}

fn positivity(preset: Preset, steps: usize) -> CheckResult {
    check("positivity", || {
        // The engine refuses to produce a label violating either property.
        let t = run(&preset.setup(), steps, DEFAULT_STEP_CAP, false).map_err(e)?;
        Ok(format!("F_1..F_{} have constant term 1 and positive coefficients", t.len()))
    })
}

fn window_agreement(preset: Preset, steps: usize, degree: i64) -> CheckResult {
    check("window-matches-full-transform", || {
        let setup = preset.setup();
        let t = run(&setup, steps, DEFAULT_STEP_CAP, false).map_err(e)?;
        for k in 1..=steps {
            let full = transform_polynomial(&t.f(k).unwrap(), &t.c(k).unwrap()).map_err(e)?.truncate(degree);
            let w = windowed_label(&setup, k, degree).map_err(e)?;
            ensure(w.poly == full, || format!("step {k}: {} vs {}", w.poly, full))?;
        }
        Ok(format!("steps 1..{steps} through degree {degree}"))
    })
}

fn kronecker(max_k: usize) -> Vec<CheckResult> {
    let max_k = max_k.max(3);
    let mut out = vec![positivity(Preset::Kronecker, max_k)];
    let trace = run(&Preset::Kronecker.setup(), max_k, DEFAULT_STEP_CAP, false);
    let trace = match trace {
        Ok(t) => t,
        Err(err) => {
            out.push(check("run", || Err(e(err))));
            return out;
        }
    };
    out.push(check("recurrence", || {
        for k in 2..=max_k {
            let lhs = trace.f(k).unwrap().checked_mul(&trace.f(k - 2).unwrap()).map_err(e)?;
            let mono = Polynomial::monomial(Exponents::from([k as i64, k as i64 - 1]), 1.into());
            let rhs = mono.checked_add(&trace.f(k - 1).unwrap().square()).map_err(e)?;
            ensure(lhs == rhs, || format!("fails at k = {k}"))?;
        }
        Ok(format!("2 <= k <= {max_k}"))
    }));
    out.push(check("c-matrix-closed-form", || {
        let qs = Preset::Kronecker.setup().quivers(max_k).map_err(e)?;
        for (k, q) in qs.iter().enumerate() {
            ensure(q.c_matrix() == c_closed_form(k), || format!("k = {k}: {:?}", q.c_matrix()))?;
        }
        Ok(format!("0 <= k <= {max_k}"))
    }));
    out.push(check("row-pyramid-oracle", || {
        let top = max_k.min(12);
        for k in 1..=top {
            let shape = PyramidShape::build(ShapeKind::Row, k).map_err(e)?;
            let pf = partition_function(&shape, ColorScheme::TwoColor).map_err(e)?;
            ensure(pf == trace.f(k).unwrap(), || format!("enumeration differs from F_{k}"))?;
            ensure(pf == row_partition_function_dp(k).map_err(e)?, || format!("sweep differs at k = {k}"))?;
        }
        Ok(format!("1 <= k <= {top}"))
    }));
    out.push(check("odd-transform-law", || {
        for k in (1..=max_k).step_by(2) {
            let f = trace.f(k).unwrap();
            let kk = k as i64;
            let law = f.map_exponents(|x| Exponents::from([kk * (x[0] - x[1]) - x[1], kk * (x[0] - x[1]) - x[0]]));
            ensure(transform_polynomial(&f, &trace.c(k).unwrap()).map_err(e)? == law, || format!("k = {k}"))?;
        }
        Ok("all odd steps".into())
    }));
    let norm = Preset::Kronecker.normalization();
    out.push(check("normalized-terms-lean-to-y0", || {
        let tt = TransformedTrace::from_trace(&trace).map_err(e)?;
        for r in &tt.records {
            let f = stable_cluster_core::engine::normalize_if(&r.poly, r.k, Some(&norm)).map_err(e)?;
            for (x, _) in f.terms() {
                ensure(x.is_zero() || x[0] > x[1], || format!("k = {}: term {:?}", r.k, x))?;
            }
        }
        Ok("every nonconstant term has a' > b'".into())
    }));
    out.push(check("stable-limit", || {
        let tt = TransformedTrace::from_trace(&trace).map_err(e)?;
        let cap = (2 * max_k as i64 - 7).max(1);
        let rep = stable_series(&tt, &StableOptions::new(cap, 1, 3).normalized(norm.clone())).map_err(e)?;
        let s = rep.series(2);
        ensure(s == kronecker_limit(cap), || format!("stable {s} vs limit {}", kronecker_limit(cap)))?;
        ensure(s == limit_series_s(cap), || "differs from S".into())?;
        Ok(format!("degree <= {cap}, horizon {max_k}"))
    }));
    out
}

fn conifold(max_k: usize) -> Vec<CheckResult> {
    let max_k = max_k.max(2);
    let setup = Preset::Conifold.setup();
    let mut out = vec![positivity(Preset::Conifold, max_k.min(10))];
    out.push(check("c-matrix-odd-form", || {
        let qs = setup.quivers(max_k).map_err(e)?;
        for k in (1..=max_k).step_by(2) {
            ensure(qs[k].c_matrix() == c_closed_form(k), || format!("k = {k}: {:?}", qs[k].c_matrix()))?;
        }
        Ok(format!("odd k <= {max_k}"))
    }));
    out.push(check("aztec2-oracle", || {
        let top = max_k.min(5);
        let t = run(&setup, top, DEFAULT_STEP_CAP, false).map_err(e)?;
        for k in 1..=top {
            let shape = PyramidShape::build(ShapeKind::Aztec2, k).map_err(e)?;
            let pf = partition_function(&shape, ColorScheme::TwoColor).map_err(e)?;
            ensure(pf == t.f(k).unwrap(), || format!("k = {k}"))?;
        }
        Ok(format!("1 <= k <= {top}"))
    }));
    out.push(check("aztec2-partition-count", || {
        let top = max_k.min(4);
        for k in 1..=top {
            let n = partition_count(&PyramidShape::build(ShapeKind::Aztec2, k).map_err(e)?).map_err(e)?;
            ensure(n == 1u64 << (k * (k + 1) / 2), || format!("k = {k}: {n}"))?;
        }
        Ok(format!("1 <= k <= {top}"))
    }));
    out.push(window_agreement(Preset::Conifold, max_k.min(8), 10));
    out.push(check("stable-series-matches-t", || {
        let degree = 12;
        let steps: Vec<usize> = (1..=max_k.max(20)).collect();
        let tt = TransformedTrace::windowed(&setup, &steps, degree).map_err(e)?;
        let rep = stable_series(&tt, &StableOptions::new(degree, 2, 3)).map_err(e)?;
        let t = limit_series_t(degree, ColorScheme::TwoColor);
        ensure(rep.series(2) == t, || format!("stable {} vs T {}", rep.series(2), t))?;
        Ok(format!("degree <= {degree}, horizon {}", steps.len()))
    }));
    out
}

fn f0(max_k: usize) -> Vec<CheckResult> {
    let max_k = max_k.max(4);
    let setup = Preset::F0.setup();
    let mut out = vec![positivity(Preset::F0, max_k.min(14))];
    out.push(check("cancel-policy-periodic", || {
        // Cancelling matters here: step 2 forms a 2-cycle between vertices 2 and 3.
        let qs = setup.quivers(DEFAULT_STEP_CAP).map_err(e)?;
        let n = setup.quiver.n();
        let block = |k: usize| -> Vec<Vec<u64>> { (0..n).map(|i| (0..n).map(|j| qs[k].get(i, j)).collect()).collect() };
        for (k, q) in qs.iter().enumerate() {
            ensure(q.is_two_cycle_free(), || format!("Q_{k} has a 2-cycle"))?;
            ensure(k < 4 || block(k) == block(k - 4), || format!("mutable part of Q_{k} differs from Q_{}", k - 4))?;
        }
        let mut keep = setup.clone();
        keep.policy = TwoCyclePolicy::Keep;
        ensure(keep.quivers(DEFAULT_STEP_CAP).is_err(), || "keeping 2-cycles stayed bounded".into())?;
        Ok(format!("{DEFAULT_STEP_CAP} steps, period 4; keeping 2-cycles overflows"))
    }));
    let even_steps = (max_k / 2).max(6);
    out.push(check("folding", || {
        let f = run(&setup, 2 * even_steps, DEFAULT_STEP_CAP, false).map_err(e)?;
        let even = subsample(&f, 2, 2).map_err(e)?;
        let c = run(&Preset::Conifold.setup(), even_steps, DEFAULT_STEP_CAP, false).map_err(e)?;
        let fold = ColorScheme::collapse();
        for k in 1..=even_steps {
            let folded = even.f(k).unwrap().substitute(&fold).map_err(e)?;
            ensure(folded == c.f(k).unwrap(), || format!("even step {k}"))?;
        }
        Ok(format!("first {even_steps} even steps"))
    }));
    out.push(check("aztec4-oracle", || {
        let top = (max_k / 2).min(4);
        let f = run(&setup, 2 * top, DEFAULT_STEP_CAP, false).map_err(e)?;
        for k in 1..=top {
            let a4 = PyramidShape::build(ShapeKind::Aztec4, k).map_err(e)?;
            let a2 = PyramidShape::build(ShapeKind::Aztec2, k).map_err(e)?;
            let pf4 = partition_function(&a4, ColorScheme::FourColor).map_err(e)?;
            ensure(pf4 == f.f(2 * k).unwrap(), || format!("k = {k}"))?;
            let pf2 = partition_function(&a2, ColorScheme::TwoColor).map_err(e)?;
            ensure(pf4.substitute(&ColorScheme::collapse()).map_err(e)? == pf2, || format!("collapse, k = {k}"))?;
        }
        Ok(format!("1 <= k <= {top}, with collapse"))
    }));
    out.push(window_agreement(Preset::F0, max_k.min(12), 8));
    out.push(check("stable-series-matches-t4", || {
        let degree = 10;
        let horizon = (max_k / 2).max(11);
        let steps: Vec<usize> = (1..=horizon).map(|i| 2 * i).collect();
        let tt = TransformedTrace::windowed(&setup, &steps, degree).map_err(e)?;
        let rep = stable_series(&tt, &StableOptions::new(degree, 2, 3)).map_err(e)?;
        let t = limit_series_t(degree, ColorScheme::FourColor);
        ensure(rep.series(4) == t, || format!("stable {} vs T4 {}", rep.series(4), t))?;
        Ok(format!("degree <= {degree}, horizon {horizon}"))
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_verify() {
        for preset in Preset::ALL {
            for r in verify_preset(preset, 8) {
                assert!(r.passed, "{:?} {}: {}", preset, r.name, r.detail);
            }
        }
    }

    #[test]
    fn closed_form_at_zero_is_minus_identity() {
        assert_eq!(c_closed_form(0), Preset::Kronecker.setup().quiver.c_matrix());
    }
}
