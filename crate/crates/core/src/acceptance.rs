//! End-to-end checks of the published tables, worked examples and
//! identities. Every check is exact; runtime budgets are wall-clock.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    d_h, d_v, delta_v, detach, drop_one_loops, euler_eq, euler_eq_at, euler_estar, graft_trailing, interior_euler,
    marked_d, marked_d_to_mark, release, wedge, wedge_forest, FormCombo, MarkedCombo, NodeSelector, Q,
};
use crate::evaldiff::{check_dh_identity, check_solenoidal_numeric, random_field};
use crate::forest::{bamboo, generate, Forest};
use crate::genfun::dimension_table;
use crate::homotopy::{
    aug_h_h, aug_h_v, divfree_identity_residual, divfree_simple_residual, h_h, h_v, ibp_homotopy,
    remainder, variational_identity_check,
};
use crate::spaces::{
    annihilator_div_basis, basis, bamboo_check, divergence_basis, exactness_report, kernel_dim_dh, matrix_dh,
    matrix_i, non_self_looped_scalars, pairing, rank_of, self_looped_scalars, solenoidal_basis,
    solenoidal_generators, vp_certificate, Arrow, VpOutcome, VpReason,
};
use crate::util::binomial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {} ({} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.detail
        )
    }
}

type Outcome = (bool, String);

fn timed(id: u8, name: &'static str, budget: Option<Duration>, run: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let (mut passed, mut detail) = run();
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail = format!("{detail}; over the {} ms budget", b.as_millis());
        }
    }
    CriterionResult { id, name, passed, detail, elapsed_ms: elapsed.as_millis() }
}

fn fc(s: &str) -> FormCombo {
    FormCombo::parse(s).unwrap_or_else(|e| panic!("literal form {s:?}: {e}"))
}

fn wf(s: &str) -> FormCombo {
    wedge(&fc(s)).expect("homogeneous literal")
}

fn first_failure<T: fmt::Display>(failures: &[T]) -> String {
    match failures.first() {
        None => String::new(),
        Some(x) => format!("; first failure: {x}"),
    }
}

/// Dimension counts N = 1..14: |Ω₁|, |Ω̊₀|, |Ψ|, |Ψ̃|.
pub const TABLE1: [[u64; 4]; 14] = [
    [1, 1, 0, 1],
    [2, 2, 0, 0],
    [6, 5, 1, 1],
    [16, 13, 3, 2],
    [45, 34, 11, 7],
    [121, 90, 31, 16],
    [338, 243, 95, 48],
    [929, 660, 269, 123],
    [2598, 1818, 780, 346],
    [7261, 5045, 2216, 937],
    [20453, 14102, 6351, 2626],
    [57738, 39639, 18099, 7284],
    [163799, 111982, 51817, 20533],
    [465778, 317533, 148245, 57804],
];

/// Bottom two rows of the bicomplex, N = 1..9: |Ω_{n,0}| and |Ω_{n,1}| for
/// n = 4, 3, 2, 1, 0, then dim I₁.
pub const TABLE2: [([u64; 5], [u64; 5], u64); 9] = [
    ([0, 0, 0, 1, 1], [0, 0, 0, 1, 1], 0),
    ([0, 0, 0, 2, 3], [0, 0, 1, 4, 4], 1),
    ([0, 0, 1, 6, 7], [0, 0, 4, 15, 15], 4),
    ([0, 0, 3, 16, 19], [0, 1, 16, 52, 52], 15),
    ([0, 0, 11, 45, 47], [0, 5, 57, 175, 175], 52),
    ([0, 2, 33, 121, 130], [0, 22, 197, 571, 571], 175),
    ([0, 7, 102, 338, 343], [2, 85, 654, 1838, 1838], 571),
    ([0, 29, 298, 929, 951], [11, 310, 2137, 5834, 5834], 1838),
    ([1, 99, 878, 2598, 2615], [53, 1078, 6859, 18363, 18363], 5834),
];

/// Scalars of order ≤ 3 with their two horizontal homotopies.
pub const TABLE4: [(&str, &str, &str); 11] = [
    ("<b>", "b", "b"),
    ("<b[b]>", "0", "0"),
    ("<b,b>", "b[b]", "b[b]"),
    ("<b> <b>", "<b> b", "<b> b"),
    (
        "<b[b[b]]>",
        "1/6 * <b[b]> b + 1/6 * <b> b[b] + -1/6 * b[b,b] + -1/6 * <b,b> b",
        "1/3 * <b> b[b] + -1/3 * <b,b> b",
    ),
    (
        "<b[b],b>",
        "1/6 * b[b,b] + 1/6 * <b,b> b + -1/6 * <b[b]> b + -1/6 * <b> b[b]",
        "1/3 * <b,b> b + -1/3 * <b> b[b]",
    ),
    ("<b,b,b>", "b[b[b]]", "b[b[b]]"),
    ("<b[b,b]>", "2/3 * <b[b]> b + 1/3 * b[b,b]", "b[b,b] + 2/3 * <b> b[b] + -2/3 * <b,b> b"),
    ("<b[b]> <b>", "0", "0"),
    ("<b,b> <b>", "1/3 * <b,b> b + 2/3 * <b> b[b]", "<b,b> b + 2/3 * <b[b]> b + -2/3 * b[b,b]"),
    ("<b> <b> <b>", "<b> <b> b", "<b> <b> b"),
];

/// Listed divergence-free solenoidal generators (twice d_H ∧γ).
pub const TABLE3: [(usize, &[&str]); 4] = [
    (1, &["b"]),
    (3, &["<b,b> b + -1 * b[b,b]"]),
    (
        4,
        &[
            "<b[b],b> b + <b,b,b> b + -1 * b[b[b,b]] + -1 * b[b[b],b]",
            "2 * <b[b],b> b + b[b[b,b]] + -2 * b[b[b],b] + -1 * b[b,b,b]",
        ],
    ),
    (
        5,
        &[
            "<b[b[b]],b> b + <b[b],b,b> b + <b,b,b,b> b + -1 * b[b[b[b,b]]] + -1 * b[b[b[b],b]] + -1 * b[b[b[b]],b]",
            "<b[b,b],b> b + 2 * <b[b],b,b> b + b[b[b[b,b]]] + -2 * b[b[b[b],b]] + -1 * b[b[b,b,b]] + -1 * b[b[b,b],b]",
            "<b[b[b]],b> b + <b[b],b[b]> b + <b[b],b,b> b + b[b[b[b],b]] + -1 * b[b[b[b]],b] + -1 * b[b[b,b],b] \
             + -1 * b[b[b],b[b]] + -1 * b[b[b],b,b]",
            "3 * <b[b,b],b> b + b[b[b,b,b]] + -3 * b[b[b],b,b] + -1 * b[b,b,b,b]",
            "<b[b],b> b[b] + <b,b,b> b[b] + b[b[b[b]],b] + -1 * <b,b> b[b[b]] + -1 * b[b[b[b],b]] \
             + -1 * b[b[b],b[b]]",
            "2 * <b[b],b> b[b] + b[b[b[b,b]]] + b[b[b,b],b] + -1 * <b,b> b[b,b] + -2 * b[b[b[b]],b] \
             + -1 * b[b[b],b,b]",
            "<b,b> <b,b> b + 2 * <b[b[b]],b> b + -1 * <b,b> b[b,b] + -2 * <b[b],b> b[b]",
        ],
    ),
];

/// Twelve wedges of order 6 whose divergences cancel.
pub const ORDER_SIX_RELATION: [&str; 12] = [
    "<b> b[b] b[b[b]]",
    "<b[b]> b[b[b]] b",
    "<b[b[b]]> b b[b]",
    "b b[b[b[b]],b]",
    "b[b,b] b[b[b]]",
    "b[b[b],b[b]] b",
    "b[b[b[b],b]] b",
    "b[b] b[b[b],b]",
    "b[b] b[b[b,b]]",
    "<b,b> b[b[b]] b",
    "<b[b],b> b b[b]",
    "<b,b,b> b b[b]",
];

pub fn criterion_1() -> CriterionResult {
    timed(1, "generating functions reproduce the solenoidal dimension table, N ≤ 14", Some(Duration::from_secs(1)), || {
        let t = dimension_table(14);
        let mut bad = Vec::new();
        for (row, want) in t.table1.iter().zip(TABLE1.iter()) {
            let got = [&row.omega1, &row.self_looped, &row.psi, &row.psi_divfree].map(|s| s.parse::<u64>().unwrap_or(0));
            if got != *want {
                bad.push(format!("N={}: {got:?} vs {want:?}", row.order));
            }
        }
        (bad.is_empty() && t.table1.len() == 14, format!("{} rows compared{}", t.table1.len(), first_failure(&bad)))
    })
}

pub fn criterion_2() -> CriterionResult {
    timed(2, "bottom two rows by construction (N ≤ 7) and by series (N ≤ 9)", Some(Duration::from_secs(120)), || {
        let mut bad = Vec::new();
        for (k, (r0, r1, i1)) in TABLE2.iter().enumerate().take(7) {
            let order = k + 1;
            for n in 0..=4 {
                let d0 = basis(order, n, 0, false).len() as u64;
                let d1 = basis(order, n, 1, false).len() as u64;
                if d0 != r0[4 - n] || d1 != r1[4 - n] {
                    bad.push(format!("construction N={order} n={n}: ({d0}, {d1})"));
                }
            }
            let rank = matrix_i(order, 1, false).rank() as u64;
            if rank != *i1 {
                bad.push(format!("construction N={order} rank I = {rank}"));
            }
        }
        let t = dimension_table(9);
        for (row, (r0, r1, i1)) in t.table2.iter().zip(TABLE2.iter()) {
            let g0: Vec<u64> = row.row0.iter().rev().map(|s| s.parse().unwrap_or(0)).collect();
            let g1: Vec<u64> = row.row1.iter().rev().map(|s| s.parse().unwrap_or(0)).collect();
            if g0 != r0.to_vec() || g1 != r1.to_vec() || row.interior1.parse::<u64>().ok() != Some(*i1) {
                bad.push(format!("series N={}", row.order));
            }
        }
        (bad.is_empty(), format!("7 orders constructed, {} orders by series{}", t.table2.len(), first_failure(&bad)))
    })
}

pub fn criterion_3() -> CriterionResult {
    timed(3, "kernel ranks of d_H on one-rooted forms, N ≤ 7", Some(Duration::from_secs(300)), || {
        let mut bad = Vec::new();
        let mut seen = Vec::new();
        for order in 1..=7 {
            let k = kernel_dim_dh(order, 1, 0, false) as u64;
            let want = TABLE1[order - 1][2];
            if k != want {
                bad.push(format!("N={order}: dim Ker = {k}, expected {want}"));
            }
            let mut line = format!("N={order}: {k}");
            if order >= 2 {
                let kt = kernel_dim_dh(order, 1, 0, true) as u64;
                let want = TABLE1[order - 1][3];
                if kt != want {
                    bad.push(format!("N={order}: divergence-free dim Ker = {kt}, expected {want}"));
                }
                line = format!("{line}/{kt}");
            }
            seen.push(line);
        }
        (bad.is_empty(), format!("{}{}", seen.join(", "), first_failure(&bad)))
    })
}

fn compare(bad: &mut Vec<String>, label: &str, got: Result<FormCombo, String>, want: &FormCombo) {
    match got {
        Ok(g) if &g == want => {}
        Ok(g) => bad.push(format!("{label}: got {g}, expected {want}")),
        Err(e) => bad.push(format!("{label}: {e}")),
    }
}

pub fn criterion_4() -> CriterionResult {
    timed(4, "worked examples of d_H and d_V", None, || {
        let mut bad = Vec::new();
        let g1 = fc("b");
        let g2 = wf("b b[b]");
        let g3 = wf("b o1");
        let dh = |c: &FormCombo| d_h(c).map_err(|e| e.to_string());
        let dv = |c: &FormCombo| d_v(c).map_err(|e| e.to_string());
        compare(&mut bad, "d_H γ1", dh(&g1), &fc("<b>"));
        compare(
            &mut bad,
            "d_H γ2",
            dh(&g2),
            &fc("1/2 * <b,b> b + 1/2 * <b[b]> b + -1/2 * <b> b[b] + -1/2 * b[b,b]"),
        );
        compare(&mut bad, "d_H γ3", dh(&g3), &fc("1/2 * <o1> b + 1/2 * b[o1] + -1/2 * <b> o1 + -1/2 * o1[b]"));
        compare(&mut bad, "d_V γ1", dv(&g1), &fc("o1"));
        let mut dv2 = wf("o1 b[b]");
        dv2 += &wf("b o1[b]");
        dv2 += &wf("b b[o1]");
        compare(&mut bad, "d_V γ2", dv(&g2), &dv2);
        compare(&mut bad, "d_V γ3", dv(&g3), &fc("1/2 * o2 o1 + -1/2 * o1 o2"));
        compare(&mut bad, "d_V γ3 as a wedge", dv(&g3), &wf("o2 o1"));
        compare(&mut bad, "d_H² γ2", dh(&g2).and_then(|c| dh(&c)), &FormCombo::zero());
        (bad.is_empty(), format!("8 identities{}", first_failure(&bad)))
    })
}

pub fn criterion_5() -> CriterionResult {
    timed(5, "variational derivative on the first scalars", None, || {
        let mut bad = Vec::new();
        let e = |s: &str| euler_estar(&fc(s)).map_err(|e| e.to_string());
        compare(&mut bad, "E° <b>", e("<b>"), &FormCombo::zero());
        compare(&mut bad, "E° <b[b]>", e("<b[b]>"), &fc("2 * <b[o1]>"));
        compare(&mut bad, "E° <b,b>", e("<b,b>"), &fc("-2 * <b[o1]>"));
        compare(&mut bad, "E° <b> <b>", e("<b> <b>"), &fc("-2 * <b[o1]>"));
        for s in ["b", "b[b]", "<b> b"] {
            let d = d_h(&fc(s)).map_err(|e| e.to_string());
            compare(&mut bad, &format!("E° d_H {s}"), d.and_then(|c| euler_estar(&c).map_err(|e| e.to_string())), &FormCombo::zero());
        }
        (bad.is_empty(), format!("4 values and 3 divergences{}", first_failure(&bad)))
    })
}

pub fn criterion_6() -> CriterionResult {
    timed(6, "comparison table of the two horizontal homotopies", None, || {
        let mut bad = Vec::new();
        let mut solenoidal_gaps = 0;
        for (g, hh, ibp) in TABLE4 {
            let c = fc(g);
            compare(&mut bad, &format!("h_H {g}"), h_h(&c).map_err(|e| e.to_string()), &fc(hh));
            let before = bad.len();
            let got = ibp_homotopy(&c).map_err(|e| e.to_string());
            compare(&mut bad, &format!("ĥ_H {g}"), got.clone(), &fc(ibp));
            if bad.len() > before {
                let gap = &got.unwrap_or_default() - &fc(ibp);
                if d_h(&gap).map(|d| d.is_zero()).unwrap_or(false) {
                    solenoidal_gaps += 1;
                }
            }
        }
        (
            bad.is_empty(),
            format!(
                "{} rows, both operators; {} mismatches, {solenoidal_gaps} of them differ by a solenoidal form{}",
                TABLE4.len(),
                bad.len(),
                first_failure(&bad)
            ),
        )
    })
}

/// Random wedged forms built from the forests of each grade.
pub struct FormSampler {
    rng: ChaCha8Rng,
    pool: HashMap<(usize, usize, usize, bool), Vec<Forest>>,
}

impl FormSampler {
    pub fn new(seed: u64) -> Self {
        FormSampler { rng: ChaCha8Rng::seed_from_u64(seed), pool: HashMap::new() }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn forests(&mut self, order: usize, roots: usize, covertices: usize, divfree: bool) -> &[Forest] {
        self.pool
            .entry((order, roots, covertices, divfree))
            .or_insert_with(|| generate(order, roots, covertices, divfree).unwrap_or_default())
    }

    /// Up to three forests with coefficients in ±{1, 2, 3}, wedged; `None`
    /// when the space is empty.
    pub fn form(&mut self, order: usize, roots: usize, covertices: usize, divfree: bool) -> Option<FormCombo> {
        let picks: Vec<Forest> = {
            let terms = self.rng.gen_range(1..=3);
            let pool = self.forests(order, roots, covertices, divfree).to_vec();
            if pool.is_empty() {
                return None;
            }
            (0..terms).map(|_| pool.choose(&mut self.rng).expect("nonempty").clone()).collect()
        };
        let mut raw = FormCombo::zero();
        for f in picks {
            let c: i64 = self.rng.gen_range(1..=3) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
            raw.add_term(f.code(), Q::from_integer(c.into()));
        }
        let w = wedge(&raw).expect("homogeneous");
        Some(if divfree { drop_one_loops(&w) } else { w })
    }

    /// A nonzero random form of a random grade accepted by `grade`.
    pub fn any_form<G>(&mut self, divfree: bool, mut grade: G) -> (usize, usize, usize, FormCombo)
    where
        G: FnMut(&mut ChaCha8Rng) -> (usize, usize, usize),
    {
        loop {
            let (order, roots, p) = grade(&mut self.rng);
            if let Some(c) = self.form(order, roots, p, divfree) {
                if !c.is_zero() {
                    return (order, roots, p, c);
                }
            }
        }
    }
}

fn residual_suite<F>(bad: &mut Vec<String>, name: &str, samples: usize, mut next: F)
where
    F: FnMut() -> (String, Result<FormCombo, String>),
{
    for _ in 0..samples {
        let (label, r) = next();
        match r {
            Ok(r) if r.is_zero() => {}
            Ok(r) => bad.push(format!("{name} on {label}: residual {r}")),
            Err(e) => bad.push(format!("{name} on {label}: {e}")),
        }
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

pub const IDENTITY_SAMPLES: usize = 200;

pub fn criterion_7() -> CriterionResult {
    timed(7, "homotopy identities on random forms, N ≤ 5", None, || {
        let mut bad = Vec::new();
        let mut s = FormSampler::new(7);
        let grade = |rng: &mut ChaCha8Rng, n_min: usize, n_max: usize, p_min: usize, p_max: usize| {
            let order = rng.gen_range(1..=5usize);
            (order, rng.gen_range(n_min..=n_max.min(order)), rng.gen_range(p_min..=p_max))
        };

        residual_suite(&mut bad, "vertical", IDENTITY_SAMPLES, || {
            let (_, _, _, c) = s.any_form(false, |r| grade(r, 0, 2, 1, 2));
            let run = || -> Result<FormCombo, String> {
                let a = d_v(&h_v(&c).map_err(err)?).map_err(err)?;
                let b = h_v(&d_v(&c).map_err(err)?).map_err(err)?;
                Ok(&(&a + &b) - &c)
            };
            (c.to_string(), run())
        });

        residual_suite(&mut bad, "horizontal", IDENTITY_SAMPLES, || {
            let (_, _, _, c) = s.any_form(false, |r| grade(r, 1, 2, 0, 2));
            let run = || -> Result<FormCombo, String> {
                let a = d_h(&h_h(&c).map_err(err)?).map_err(err)?;
                let b = h_h(&d_h(&c).map_err(err)?).map_err(err)?;
                Ok(&(&a + &b) - &c)
            };
            (c.to_string(), run())
        });

        residual_suite(&mut bad, "variational", IDENTITY_SAMPLES, || {
            let (_, _, _, c) = s.any_form(false, |r| grade(r, 0, 0, 0, 0));
            let r = variational_identity_check(&c).map_err(err);
            (c.to_string(), r)
        });

        residual_suite(&mut bad, "divergence-free with remainder", IDENTITY_SAMPLES, || {
            let (_, _, _, c) = s.any_form(true, |r| grade(r, 1, 2, 0, 1));
            let r = divfree_identity_residual(&c).map_err(err);
            (c.to_string(), r)
        });

        residual_suite(&mut bad, "divergence-free without remainder", IDENTITY_SAMPLES, || {
            let (_, _, _, c) = s.any_form(true, |r| {
                let order = r.gen_range(2..=5usize);
                (order, 1, r.gen_range(0..=1))
            });
            let r = divfree_simple_residual(&c).map_err(err);
            (c.to_string(), r)
        });

        // R vanishes on divergence-free solenoidal forms exactly when N > 1.
        let mut remainder_checks = 0;
        for order in 1..=5 {
            for p in 0..=1 {
                for k in matrix_dh(order, 1, p, true).kernel() {
                    remainder_checks += 1;
                    match remainder(&k) {
                        Ok(r) if r.is_zero() == (order > 1) => {}
                        Ok(r) => bad.push(format!("remainder of {k} at N={order} is {r}")),
                        Err(e) => bad.push(format!("remainder of {k}: {e}")),
                    }
                }
            }
        }

        residual_suite(&mut bad, "augmented", IDENTITY_SAMPLES, || {
            let (_, _, p, c) = s.any_form(false, |r| {
                let order = r.gen_range(1..=5usize);
                (order, 0, r.gen_range(1..=3usize.min(order)))
            });
            let run = || -> Result<FormCombo, String> {
                let i = interior_euler(&c).map_err(err)?;
                let mut total = &(&i + &d_h(&aug_h_h(&c).map_err(err)?).map_err(err)?) - &c;
                total += &(&interior_euler(&i).map_err(err)? - &i);
                let dv = delta_v(&c).map_err(err)?;
                if !dv.is_zero() {
                    total += &delta_v(&dv).map_err(err)?;
                }
                // The same identities on the functional form I c ∈ I_p.
                let dvi = delta_v(&i).map_err(err)?;
                let back = if dvi.is_zero() { FormCombo::zero() } else { aug_h_v(&dvi).map_err(err)? };
                let hv = if p == 1 {
                    let h = h_v(&i).map_err(err)?;
                    if h.is_zero() { h } else { delta_v(&h).map_err(err)? }
                } else {
                    let h = aug_h_v(&i).map_err(err)?;
                    if h.is_zero() { h } else { delta_v(&h).map_err(err)? }
                };
                total += &(&(&hv + &back) - &i);
                Ok(total)
            };
            (c.to_string(), run())
        });

        residual_suite(&mut bad, "I d_H", IDENTITY_SAMPLES, || {
            let (_, _, _, c) = s.any_form(false, |r| grade(r, 1, 1, 1, 2));
            let r = d_h(&c).map_err(err).and_then(|d| if d.is_zero() { Ok(d) } else { interior_euler(&d).map_err(err) });
            (c.to_string(), r)
        });

        (
            bad.is_empty(),
            format!(
                "{IDENTITY_SAMPLES} random forms per identity family, {remainder_checks} remainder checks{}",
                first_failure(&bad)
            ),
        )
    })
}

fn decomposition_residual(f: &Forest) -> FormCombo {
    let g = FormCombo::from_forest(f);
    let n = f.len();
    let mut total = g.scale(&-Q::from_integer(n.into()));
    for q in 0..=n {
        total += &graft_trailing(&euler_eq(&g, q), q, q);
    }
    for v in 0..n {
        let mut per = -g.clone();
        for q in 0..=n {
            let e = euler_eq_at(&g, q, NodeSelector::Node(v)).expect("node in range");
            per += &graft_trailing(&e, q, q);
        }
        total += &per;
    }
    total
}

fn scaled(c: &MarkedCombo, k: usize) -> MarkedCombo {
    c.scale(&Q::from_integer(k.into()))
}

/// Violations of the Leibniz rules and of the binomial composition rule
/// for the forest `f` detached at `v`.
pub fn leibniz_failures(f: &Forest, v: usize) -> Vec<String> {
    let preds = f.preds(v).len();
    let m = detach(&FormCombo::from_forest(f), NodeSelector::Node(v)).expect("node in range");
    let m = &m;
    let mut out = Vec::new();
    let dp: Vec<MarkedCombo> = (0..=preds).map(|p| marked_d(m, p)).collect();
    let rel: Vec<MarkedCombo> = dp.iter().map(release).collect();
    let outer = |q: usize, k: usize, p: usize| marked_d(&marked_d_to_mark(&rel[p], k), q);
    for p in 0..preds {
        for q in 0..preds - p {
            let k = preds - 1 - p - q;
            let lhs = scaled(&outer(q + 1, k, p), q + 1);
            let rhs = &scaled(&outer(q, k + 1, p), k + 1) + &scaled(&outer(q, k, p + 1), p + 1);
            if lhs != rhs {
                out.push(format!("three-term rule p={p} q={q} k={k}"));
            }
            let mut expand = MarkedCombo::zero();
            for n in 0..=k {
                let c = Q::from_integer(binomial(q + n, q) * binomial(p + k - n, p));
                let c = if (k - n) % 2 == 0 { c } else { -c };
                expand.add_scaled(&marked_d(&rel[p + k - n], q + n), &c);
            }
            if outer(q, k, p) != expand {
                out.push(format!("expansion p={p} q={q} k={k}"));
            }
        }
    }
    for n in 0..=preds {
        for p in 0..=n {
            let lhs = marked_d(m, n).scale(&Q::from_integer(binomial(n, p)));
            if lhs != marked_d(&marked_d(m, n - p), p) {
                out.push(format!("composition n={n} p={p}"));
            }
        }
    }
    out
}

pub const MARKED_SAMPLES: usize = 100;

pub fn criterion_8() -> CriterionResult {
    timed(8, "Euler decomposition and the Leibniz rules for marked forests", None, || {
        let mut bad = Vec::new();
        let mut forests = 0;
        for order in 1..=5 {
            for n in 0..=order {
                for p in 0..=order {
                    for f in generate(order, n, p, false).unwrap_or_default() {
                        forests += 1;
                        let r = decomposition_residual(&f);
                        if !r.is_zero() {
                            bad.push(format!("decomposition of {f}: residual {r}"));
                        }
                    }
                }
            }
        }
        let mut s = FormSampler::new(8);
        let mut marked = 0;
        while marked < MARKED_SAMPLES {
            let order = s.rng().gen_range(2..=5usize);
            let n = s.rng().gen_range(0..=2usize.min(order));
            let p = s.rng().gen_range(0..=1usize);
            let pool = generate(order, n, p, false).unwrap_or_default();
            let Some(f) = pool.choose(s.rng()).cloned() else { continue };
            let nodes: Vec<usize> = (0..f.len()).filter(|&v| (1..=4).contains(&f.preds(v).len())).collect();
            let Some(&v) = nodes.choose(s.rng()) else { continue };
            marked += 1;
            for e in leibniz_failures(&f, v) {
                bad.push(format!("{f} at node {v}: {e}"));
            }
        }
        (
            bad.is_empty(),
            format!("{forests} forests decomposed, {marked} random marked forests{}", first_failure(&bad)),
        )
    })
}

pub fn criterion_9() -> CriterionResult {
    timed(9, "listed divergence-free solenoidal generators span the kernel", None, || {
        let mut bad = Vec::new();
        let mut dims = Vec::new();
        for (order, listed) in TABLE3 {
            let b = basis(order, 1, 0, true);
            let computed: Vec<_> = solenoidal_generators(order, true).iter().map(|c| b.reduce(c)).collect();
            let given: Vec<_> = listed.iter().map(|s| b.reduce(&fc(s))).collect();
            let stacked: Vec<_> = computed.iter().chain(&given).cloned().collect();
            let (rc, rg, rs) = (rank_of(&computed), rank_of(&given), rank_of(&stacked));
            if !(rc == rg && rg == rs) {
                bad.push(format!("N={order}: ranks {rc}, {rg}, stacked {rs}"));
            }
            for s in listed.iter() {
                let c = fc(s);
                if !drop_one_loops(&d_h(&c).expect("one root")).is_zero() {
                    bad.push(format!("N={order}: {s} is not solenoidal"));
                }
            }
            dims.push(format!("N={order}: {rs}"));
        }
        (bad.is_empty(), format!("{}{}", dims.join(", "), first_failure(&bad)))
    })
}

/// Σ d_H ∧γ over the order-six relation.
pub fn order_six_relation() -> FormCombo {
    let mut total = FormCombo::zero();
    for s in ORDER_SIX_RELATION {
        let f = Forest::parse(s).expect("literal forest");
        total += &d_h(&wedge_forest(&f)).expect("two roots");
    }
    total
}

pub fn criterion_10() -> CriterionResult {
    timed(10, "order-six relation among the divergences of two-rooted forms", None, || {
        let r = order_six_relation();
        (r.is_zero(), if r.is_zero() { "sum is 0".into() } else { format!("sum is {r}") })
    })
}

pub fn criterion_11() -> CriterionResult {
    timed(11, "divergences over self-looped scalars and their annihilators, N ≤ 5", None, || {
        let mut bad = Vec::new();
        let mut solved = 0;
        let mut annihilators = 0;
        for order in 1..=5 {
            let m = matrix_dh(order, 1, 0, false);
            for (alpha, c) in divergence_basis(order) {
                solved += 1;
                if m.matrix.solve(&m.target.reduce(&c)).is_err() {
                    bad.push(format!("N={order}: divergence for {alpha} has no preimage"));
                }
            }
            let ann = annihilator_div_basis(order);
            let nonself = non_self_looped_scalars(order).len();
            let scalars = basis(order, 0, 0, false);
            let rows: Vec<_> = ann.iter().map(|a| scalars.reduce(a)).collect();
            if ann.len() != nonself || rank_of(&rows) != nonself {
                bad.push(format!("N={order}: {} annihilators of rank {} for {nonself} scalars", ann.len(), rank_of(&rows)));
            }
            if self_looped_scalars(order).len() + nonself != scalars.len() {
                bad.push(format!("N={order}: scalar split is not a partition"));
            }
            for a in &ann {
                annihilators += 1;
                for j in 0..m.source.len() {
                    let image = d_h(&m.source.element(j)).expect("one root");
                    if !pairing(a, &image).is_zero() {
                        bad.push(format!("N={order}: {a} pairs nontrivially with d_H {}", m.source.code(j)));
                        break;
                    }
                }
            }
            // On non-self-looped scalars the annihilators are the dual basis.
            let betas = non_self_looped_scalars(order);
            for (a, beta) in ann.iter().zip(&betas) {
                for other in &betas {
                    let want = if other == beta { Q::one() } else { Q::zero() };
                    if a.coeff(&other.code()) != want {
                        bad.push(format!("N={order}: annihilator of {beta} has {other}-coefficient {}", a.coeff(&other.code())));
                    }
                }
            }
            if m.rank() + nonself != scalars.len() {
                bad.push(format!("N={order}: rank d_H = {} leaves room for other divergences", m.rank()));
            }
        }
        (
            bad.is_empty(),
            format!("{solved} divergences solved, {annihilators} annihilators checked{}", first_failure(&bad)),
        )
    })
}

pub fn criterion_12() -> CriterionResult {
    timed(12, "bamboo obstruction", None, || {
        let mut bad = Vec::new();
        let mut count = 0;
        for order in 2..=6 {
            for c in solenoidal_basis(order) {
                count += 1;
                match bamboo_check(&c) {
                    Ok(m) if m.values().all(|v| v.is_zero()) => {}
                    Ok(m) => bad.push(format!("N={order}: {c} has bamboo coefficients {m:?}")),
                    Err(e) => bad.push(e.to_string()),
                }
            }
        }
        let mut rejected = 0;
        for k in 2..=5 {
            let bam = bamboo(k).expect("k ≥ 1").code().to_string();
            for (num, den) in [(1, 1), (-1, 2), (3, 7)] {
                for extra in ["", " + 5 * b[b,b]"] {
                    let text = format!("b + {num}/{den} * {bam}{}", if k == 3 { extra } else { "" });
                    match vp_certificate(&fc(&text), 5, false) {
                        Ok(VpOutcome::Infeasible(f)) if f.order == k && f.reason == VpReason::Bamboo => rejected += 1,
                        Ok(o) => bad.push(format!("{text}: not rejected at order {k}: {}", o.to_json())),
                        Err(e) => bad.push(format!("{text}: {e}")),
                    }
                }
            }
        }
        (
            bad.is_empty(),
            format!("{count} basis elements bamboo-free, {rejected} maps rejected{}", first_failure(&bad)),
        )
    })
}

pub fn criterion_13() -> CriterionResult {
    timed(13, "exactness of the bicomplex in both contexts", None, || {
        let mut bad = Vec::new();
        for order in 1..=5 {
            let r = exactness_report(order, order, 2, false);
            if !r.bicomplex_exact() {
                bad.push(format!("standard N={order}: {} defects", r.defects().len()));
            }
        }
        for order in 2..=5 {
            let r = exactness_report(order, order, 2, true);
            if !r.bicomplex_exact() {
                bad.push(format!("divergence-free N={order}: {} defects", r.defects().len()));
            }
        }
        let r = exactness_report(1, 1, 2, true);
        let defects: Vec<_> = r.defects().into_iter().filter(|e| matches!(e.arrow, Arrow::Horizontal | Arrow::Vertical)).collect();
        let witness = defects.first().and_then(|e| e.witness.clone());
        if witness != Some(fc("b")) {
            bad.push(format!("divergence-free N=1: first defect witness {witness:?}"));
        }
        (bad.is_empty(), format!("divergence-free N=1 defects: {}{}", defects.len(), first_failure(&bad)))
    })
}

pub fn criterion_14() -> CriterionResult {
    timed(14, "elementary differentials on random polynomial fields", Some(Duration::from_secs(120)), || {
        let mut bad = Vec::new();
        let fields: Vec<_> = (0..5).map(|s| random_field(3, 2, 1400 + s).expect("d = 3")).collect();
        let mut checks = 0;
        for order in 1..=4 {
            for f in generate(order, 1, 0, false).expect("valid grade") {
                let g = FormCombo::from_forest(&f);
                for field in &fields {
                    checks += 1;
                    match check_dh_identity(&g, field) {
                        Ok(true) => {}
                        Ok(false) => bad.push(format!("Div F({f}) differs from F(d_H {f})")),
                        Err(e) => bad.push(e.to_string()),
                    }
                }
            }
        }
        let mut generators = 0;
        for (order, listed) in TABLE3 {
            for s in listed.iter() {
                generators += 1;
                match check_solenoidal_numeric(&fc(s), true, 5, 1400 + order as u64) {
                    Ok(true) => {}
                    Ok(false) => bad.push(format!("{s} is not divergence-free on divergence-free fields")),
                    Err(e) => bad.push(e.to_string()),
                }
            }
        }
        (bad.is_empty(), format!("{checks} field checks, {generators} generators{}", first_failure(&bad)))
    })
}

pub fn criterion_15() -> CriterionResult {
    timed(15, "no claim beyond desk scale", None, || {
        (true, "every quantitative statement is finite and covered by criteria 1-14".into())
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
        criterion_13(),
        criterion_14(),
        criterion_15(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_seeded() {
        let mut a = FormSampler::new(3);
        let mut b = FormSampler::new(3);
        for _ in 0..5 {
            assert_eq!(a.form(3, 1, 1, false), b.form(3, 1, 1, false));
        }
        assert!(a.form(2, 3, 0, false).is_none());
    }
}
