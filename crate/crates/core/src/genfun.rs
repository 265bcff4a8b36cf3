//! Truncated power series and the generating functions counting the
//! spaces of the bicomplex.
//!
//! Reference sequences: rooted trees A000081, mapping patterns A001372,
//! self-looped mapping patterns A217896 (shifted), and A001373.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::Q;

/// Power series in z, exact up to and including z^K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Q>,
}

impl PowerSeries {
    pub fn zero(k: usize) -> Self {
        PowerSeries { coeffs: vec![Q::zero(); k + 1] }
    }

    pub fn one(k: usize) -> Self {
        Self::monomial(k, 0, Q::one())
    }

    /// c·z^e.
    pub fn monomial(k: usize, e: usize, c: Q) -> Self {
        let mut s = Self::zero(k);
        if e <= k {
            s.coeffs[e] = c;
        }
        s
    }

    pub fn from_coeffs(k: usize, c: &[Q]) -> Self {
        let mut s = Self::zero(k);
        for (i, v) in c.iter().enumerate().take(k + 1) {
            s.coeffs[i] = v.clone();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Integer coefficients; panics on a non-integral one.
    pub fn integers(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .map(|c| {
                assert!(c.is_integer(), "non-integral coefficient {c}");
                c.to_integer()
            })
            .collect()
    }

    pub fn scale(&self, c: &Q) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// f(z^m).
    pub fn substitute_power(&self, m: usize) -> Self {
        assert!(m >= 1);
        let k = self.order();
        let mut s = Self::zero(k);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * m > k {
                break;
            }
            s.coeffs[i * m] = c.clone();
        }
        s
    }

    /// z^m·f.
    pub fn shift_up(&self, m: usize) -> Self {
        let k = self.order();
        let mut s = Self::zero(k);
        for i in m..=k {
            s.coeffs[i] = self.coeffs[i - m].clone();
        }
        s
    }

    /// f/z^m; the truncation order drops by m. Panics unless z^m divides f.
    pub fn shift_down(&self, m: usize) -> Self {
        assert!(self.coeffs[..m].iter().all(|c| c.is_zero()), "z^{m} does not divide the series");
        PowerSeries { coeffs: self.coeffs[m..].to_vec() }
    }

    pub fn truncate(&self, k: usize) -> Self {
        assert!(k <= self.order());
        PowerSeries { coeffs: self.coeffs[..=k].to_vec() }
    }

    /// exp(f) for f(0) = 0.
    pub fn exp(&self) -> Self {
        assert!(self.coeffs[0].is_zero(), "exp needs a zero constant term");
        let k = self.order();
        // g' = f' g, coefficientwise.
        let mut g = Self::zero(k);
        g.coeffs[0] = Q::one();
        for n in 1..=k {
            let mut acc = Q::zero();
            for j in 1..=n {
                acc += Q::from_integer(j.into()) * &self.coeffs[j] * &g.coeffs[n - j];
            }
            g.coeffs[n] = acc / Q::from_integer(n.into());
        }
        g
    }

    /// 1/f for f(0) ≠ 0.
    pub fn recip(&self) -> Self {
        let k = self.order();
        let c0 = self.coeffs[0].clone();
        assert!(!c0.is_zero(), "reciprocal needs a nonzero constant term");
        let mut g = Self::zero(k);
        g.coeffs[0] = c0.recip();
        for n in 1..=k {
            let mut acc = Q::zero();
            for j in 1..=n {
                acc += &self.coeffs[j] * &g.coeffs[n - j];
            }
            g.coeffs[n] = -acc / &c0;
        }
        g
    }

    /// Σ_{m≥1} w(m) f(z^m), stopping once z^m passes the truncation.
    fn plethystic_sum(&self, w: impl Fn(usize) -> Q) -> Self {
        let k = self.order();
        let mut s = Self::zero(k);
        for m in 1..=k {
            s = &s + &self.substitute_power(m).scale(&w(m));
        }
        s
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, o: &PowerSeries) -> PowerSeries {
        let k = self.order().min(o.order());
        PowerSeries { coeffs: (0..=k).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect() }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, o: &PowerSeries) -> PowerSeries {
        self + &(-o)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, o: &PowerSeries) -> PowerSeries {
        let k = self.order().min(o.order());
        let mut s = PowerSeries::zero(k);
        for i in 0..=k {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=k - i {
                s.coeffs[i + j] += &self.coeffs[i] * &o.coeffs[j];
            }
        }
        s
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}] + O(z^{})", parts.join(", "), self.order() + 1)
    }
}

/// Series in z (truncated at K) whose coefficients are polynomials in u.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    /// coeffs[n][j] is the coefficient of z^n u^j.
    coeffs: Vec<Vec<Q>>,
}

impl BivariateSeries {
    pub fn zero(k: usize) -> Self {
        BivariateSeries { coeffs: vec![Vec::new(); k + 1] }
    }

    /// u^j·f(z).
    pub fn from_series(f: &PowerSeries, j: usize) -> Self {
        let mut s = Self::zero(f.order());
        for (n, c) in f.coeffs().iter().enumerate() {
            if !c.is_zero() {
                s.set(n, j, c.clone());
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn set(&mut self, n: usize, j: usize, c: Q) {
        let row = &mut self.coeffs[n];
        if row.len() <= j {
            row.resize(j + 1, Q::zero());
        }
        row[j] = c;
    }

    /// Coefficient of z^n u^j.
    pub fn coeff(&self, n: usize, j: usize) -> Q {
        self.coeffs.get(n).and_then(|r| r.get(j)).cloned().unwrap_or_else(Q::zero)
    }

    /// The series in z at a fixed value of u.
    pub fn eval_u(&self, u: &Q) -> PowerSeries {
        let k = self.order();
        let mut s = PowerSeries::zero(k);
        for (n, row) in self.coeffs.iter().enumerate() {
            let mut acc = Q::zero();
            let mut pow = Q::one();
            for c in row {
                acc += c * &pow;
                pow *= u;
            }
            s.coeffs[n] = acc;
        }
        s
    }

    /// Coefficient of u^j as a series in z.
    pub fn u_part(&self, j: usize) -> PowerSeries {
        let k = self.order();
        let mut s = PowerSeries::zero(k);
        for n in 0..=k {
            s.coeffs[n] = self.coeff(n, j);
        }
        s
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        let mut s = Self::zero(k);
        for n in 0..=k {
            let len = self.coeffs[n].len().max(o.coeffs[n].len());
            for j in 0..len {
                let c = self.coeff(n, j) + o.coeff(n, j);
                if !c.is_zero() {
                    s.set(n, j, c);
                }
            }
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        let mut s = Self::zero(k);
        for n in 0..=k {
            for (j, a) in self.coeffs[n].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for m in 0..=k - n {
                    for (l, b) in o.coeffs[m].iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let c = s.coeff(n + m, j + l) + a * b;
                        s.set(n + m, j + l, c);
                    }
                }
            }
        }
        s
    }

    pub fn mul_series(&self, f: &PowerSeries) -> Self {
        self.mul(&Self::from_series(f, 0))
    }

    /// exp(f) for f with no z^0 term.
    pub fn exp(&self) -> Self {
        assert!(self.coeffs[0].iter().all(|c| c.is_zero()), "exp needs a zero z^0 part");
        let k = self.order();
        let mut g = Self::zero(k);
        g.set(0, 0, Q::one());
        for n in 1..=k {
            let mut row: Vec<Q> = Vec::new();
            for i in 1..=n {
                let w = Q::from_integer(i.into());
                for (j, a) in self.coeffs[i].iter().enumerate() {
                    for (l, b) in g.coeffs[n - i].iter().enumerate() {
                        if row.len() <= j + l {
                            row.resize(j + l + 1, Q::zero());
                        }
                        row[j + l] += &w * a * b;
                    }
                }
            }
            let nn = Q::from_integer(n.into());
            g.coeffs[n] = row.into_iter().map(|c| c / &nn).collect();
        }
        g
    }
}

/// Rooted trees: t = z·exp(Σ_k t(z^k)/k).
pub fn t_series(k: usize) -> PowerSeries {
    let mut t = PowerSeries::monomial(k, 1, Q::one());
    for _ in 0..k {
        let inner = t.plethystic_sum(|m| Q::new(1.into(), m.into()));
        t = inner.exp().shift_up(1);
    }
    t
}

/// (a, å, ā): all scalars, self-looped scalars and non-self-looped scalars
/// (the last including the empty scalar).
pub fn aroma_series(k: usize) -> (PowerSeries, PowerSeries, PowerSeries) {
    let t = t_series(k + 1);
    let one = PowerSeries::one(k + 1);
    let mut a = one.clone();
    for m in 1..=k {
        a = &a * &(&one - &t.substitute_power(m)).recip();
    }
    let abar = (&a * &t.shift_down(1).recip()).truncate(k);
    let a = a.truncate(k);
    // Both a and ā count the empty scalar once, so no extra 1 is removed.
    let aring = &a - &abar;
    (a, aring, abar)
}

/// b_0(u, z) = a(z)·exp(Σ_k (−1)^{k−1} u^k t(z^k)/k).
fn b0_series(k: usize, a: &PowerSeries, t: &PowerSeries) -> BivariateSeries {
    let mut inner = BivariateSeries::zero(k);
    for m in 1..=k {
        let w = if m % 2 == 1 { Q::new(1.into(), m.into()) } else { Q::new((-1).into(), m.into()) };
        inner = inner.add(&BivariateSeries::from_series(&t.substitute_power(m).scale(&w), m));
    }
    inner.exp().mul_series(a)
}

/// Generating functions of rows 0 and 1 of the bicomplex.
#[derive(Debug, Clone)]
pub struct RowSeries {
    pub b0: BivariateSeries,
    pub b1: BivariateSeries,
    pub c1: PowerSeries,
    pub s: PowerSeries,
}

/// Standard rows: b_0, b_1 = b_0·t(1 + u − ut)/(1 − t)^2, c_1 = zat/(1 − t)^2,
/// s = at − å.
pub fn row_series(k: usize) -> RowSeries {
    let t = t_series(k);
    let (a, aring, _) = aroma_series(k);
    let one = PowerSeries::one(k);
    let b0 = b0_series(k, &a, &t);
    let inv_sq = { let r = (&one - &t).recip(); &r * &r };
    let u_one_minus_t = BivariateSeries::from_series(&(&one - &t), 1);
    let factor = BivariateSeries::from_series(&one, 0).add(&u_one_minus_t);
    let b1 = b0.mul(&factor).mul_series(&(&t * &inv_sq));
    let c1 = (&(&a * &t) * &inv_sq).shift_up(1);
    let s = &(&a * &t) - &aring;
    RowSeries { b0, b1, c1, s }
}

/// Divergence-free rows: b̃_0 = z b_0/t, b̃_1 = z b_0 (t + u − ut)/(1 − t)^2,
/// c̃_1 = z c_1, s̃ = z + z s/t.
pub fn tilde_row_series(k: usize) -> RowSeries {
    let kk = k + 1;
    let t = t_series(kk);
    let (a, aring, _) = aroma_series(kk);
    let one = PowerSeries::one(kk);
    let b0 = b0_series(kk, &a, &t);
    let z_over_t = t.shift_down(1).recip();
    let inv_sq = { let r = (&one - &t).recip(); &r * &r };
    let b0t = b0.mul_series(&z_over_t);
    let factor = BivariateSeries::from_series(&t, 0).add(&BivariateSeries::from_series(&(&one - &t), 1));
    let b1 = b0.mul(&factor).mul_series(&inv_sq.shift_up(1));
    let c1 = (&(&a * &t) * &inv_sq).shift_up(2);
    let s = &(&a * &t) - &aring;
    let st = &PowerSeries::monomial(kk, 1, Q::one()) + &(&s * &z_over_t);
    RowSeries {
        b0: truncate_bi(&b0t, k),
        b1: truncate_bi(&b1, k),
        c1: c1.truncate(k),
        s: st.truncate(k),
    }
}

fn truncate_bi(b: &BivariateSeries, k: usize) -> BivariateSeries {
    BivariateSeries { coeffs: b.coeffs[..=k].to_vec() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub order: usize,
    pub omega1: String,
    pub self_looped: String,
    pub psi: String,
    pub psi_divfree: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table2Row {
    pub order: usize,
    /// |Ω_{n,0}^N| for n = 0..=4.
    pub row0: Vec<String>,
    /// |Ω_{n,1}^N| for n = 0..=4.
    pub row1: Vec<String>,
    pub interior1: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionTable {
    pub table1: Vec<Table1Row>,
    pub table2: Vec<Table2Row>,
}

fn int(q: &Q) -> String {
    assert!(q.is_integer(), "non-integral count {q}");
    q.to_integer().to_string()
}

/// Both dimension tables for N = 1..=K. Panics if |Ψ| ≠ |Ω_1| − |Ω̊_0|.
pub fn dimension_table(k: usize) -> DimensionTable {
    let rows = row_series(k);
    let tilde = tilde_row_series(k);
    let (_, aring, _) = aroma_series(k);
    let mut table1 = Vec::new();
    let mut table2 = Vec::new();
    for n in 1..=k {
        let omega1 = rows.b0.coeff(n, 1);
        let ring = aring.coeff(n);
        let psi = rows.s.coeff(n);
        assert_eq!(psi, &omega1 - &ring, "solenoidal count at order {n}");
        table1.push(Table1Row {
            order: n,
            omega1: int(&omega1),
            self_looped: int(&ring),
            psi: int(&psi),
            psi_divfree: int(&tilde.s.coeff(n)),
        });
        table2.push(Table2Row {
            order: n,
            row0: (0..=4).map(|j| int(&rows.b0.coeff(n, j))).collect(),
            row1: (0..=4).map(|j| int(&rows.b1.coeff(n, j))).collect(),
            interior1: int(&rows.c1.coeff(n)),
        });
    }
    DimensionTable { table1, table2 }
}

impl DimensionTable {
    pub fn table1_csv(&self) -> String {
        let mut s = String::from("N,omega1,self_looped_scalars,psi,psi_divfree\n");
        for r in &self.table1 {
            s.push_str(&format!("{},{},{},{},{}\n", r.order, r.omega1, r.self_looped, r.psi, r.psi_divfree));
        }
        s
    }

    pub fn table2_csv(&self) -> String {
        let mut s = String::from("N,row0_n0,row0_n1,row0_n2,row0_n3,row0_n4,row1_n0,row1_n1,row1_n2,row1_n3,row1_n4,I1\n");
        for r in &self.table2 {
            s.push_str(&format!("{},{},{},{}\n", r.order, r.row0.join(","), r.row1.join(","), r.interior1));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

impl fmt::Display for DimensionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>3} {:>12} {:>12} {:>12} {:>12}", "N", "|Ω1|", "|Ω̊0|", "|Ψ|", "|Ψ̃|")?;
        for r in &self.table1 {
            writeln!(f, "{:>3} {:>12} {:>12} {:>12} {:>12}", r.order, r.omega1, r.self_looped, r.psi, r.psi_divfree)?;
        }
        writeln!(f)?;
        writeln!(f, "{:>3}  {:<36} {:<40} {:>8}", "N", "row 0, n = 4..0", "row 1, n = 4..0", "|I1|")?;
        for r in &self.table2 {
            let r0: Vec<&str> = r.row0.iter().rev().map(|s| s.as_str()).collect();
            let r1: Vec<&str> = r.row1.iter().rev().map(|s| s.as_str()).collect();
            writeln!(f, "{:>3}  {:<36} {:<40} {:>8}", r.order, r0.join(" "), r1.join(" "), r.interior1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &PowerSeries, from: usize, to: usize) -> Vec<i64> {
        (from..=to).map(|i| i64::try_from(s.coeff(i).to_integer()).unwrap()).collect()
    }

    #[test]
    fn trees_and_aromas() {
        let t = t_series(8);
        assert_eq!(ints(&t, 0, 6), vec![0, 1, 1, 2, 4, 9, 20]);
        let (a, aring, abar) = aroma_series(8);
        assert_eq!(ints(&a, 0, 6), vec![1, 1, 3, 7, 19, 47, 130]);
        assert_eq!(ints(&aring, 0, 6), vec![0, 1, 2, 5, 13, 34, 90]);
        let lhs = a.shift_up(1);
        assert_eq!(lhs.truncate(8), (&t.truncate(8) * &abar).truncate(8));
    }

    #[test]
    fn rows() {
        let r = row_series(9);
        assert_eq!(ints(&r.s, 0, 8), vec![0, 0, 0, 1, 3, 11, 31, 95, 269]);
        assert_eq!(ints(&r.c1, 1, 9), vec![0, 1, 4, 15, 52, 175, 571, 1838, 5834]);
        let alt = &r.b1.eval_u(&-Q::one()) - &r.c1;
        assert!(alt.coeffs().iter().all(|c| c.is_zero()));
        let t = tilde_row_series(9);
        assert_eq!(ints(&t.s, 1, 8), vec![1, 0, 1, 2, 7, 16, 48, 123]);
        assert_eq!(t.c1.coeff(5), r.c1.coeff(4));
    }
}
