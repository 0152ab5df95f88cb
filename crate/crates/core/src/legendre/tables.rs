//! Exact reference forms of the low-degree generalized Legendre polynomials
//! `P_n` and of the polynomial parts `T_n` of the second-kind functions.
//!
//! Each row is `1 / ((1+μ)^n 2^k) · Σ c_j(μ) (1+μ)^l_j s^j`, with `c_j` a
//! polynomial in `μ` with rational coefficients. These are kept independent
//! of the recursion so that they can serve as its oracle.

/// One monomial `c(μ) (1+μ)^l s^power`; `c` lists `(num, den)` by power of μ.
#[derive(Debug, Clone, Copy)]
pub struct RefTerm {
    pub power: usize,
    pub coef: &'static [(i64, i64)],
    pub l: i32,
}

/// One table row: the normalizer `2^-k (1+μ)^-n` and its monomials.
#[derive(Debug, Clone, Copy)]
pub struct RefRow {
    pub n: usize,
    pub two_pow: i32,
    pub terms: &'static [RefTerm],
}

const fn t(power: usize, coef: &'static [(i64, i64)], l: i32) -> RefTerm {
    RefTerm { power, coef, l }
}

pub const FIRST_KIND: [RefRow; 7] = [
    RefRow { n: 0, two_pow: 0, terms: &[t(0, &[(1, 1)], 0)] },
    RefRow { n: 1, two_pow: 0, terms: &[t(1, &[(1, 1)], 0)] },
    RefRow { n: 2, two_pow: 1, terms: &[t(2, &[(3, 1), (1, 1)], 0), t(0, &[(-1, 1)], 2)] },
    RefRow { n: 3, two_pow: 1, terms: &[t(3, &[(5, 1), (3, 1)], 0), t(1, &[(-3, 1)], 2)] },
    RefRow {
        n: 4,
        two_pow: 3,
        terms: &[t(4, &[(35, 1), (30, 1), (3, 1)], 0), t(2, &[(-30, 1), (-6, 1)], 2), t(0, &[(3, 1)], 4)],
    },
    RefRow {
        n: 5,
        two_pow: 3,
        terms: &[t(5, &[(63, 1), (70, 1), (15, 1)], 0), t(3, &[(-70, 1), (-30, 1)], 2), t(1, &[(15, 1)], 4)],
    },
    RefRow {
        n: 6,
        two_pow: 4,
        terms: &[
            t(6, &[(231, 1), (315, 1), (105, 1), (5, 1)], 0),
            t(4, &[(-315, 1), (-210, 1), (-15, 1)], 2),
            t(2, &[(105, 1), (15, 1)], 4),
            t(0, &[(-5, 1)], 6),
        ],
    },
];

pub const SECOND_KIND_PART: [RefRow; 7] = [
    RefRow { n: 0, two_pow: 0, terms: &[] },
    RefRow { n: 1, two_pow: 0, terms: &[t(0, &[(1, 1)], 0)] },
    RefRow { n: 2, two_pow: 1, terms: &[t(1, &[(3, 1)], 0)] },
    RefRow { n: 3, two_pow: 1, terms: &[t(2, &[(5, 1), (4, 3)], 0), t(0, &[(-4, 3)], 2)] },
    RefRow { n: 4, two_pow: 3, terms: &[t(3, &[(35, 1), (55, 3)], 0), t(1, &[(-55, 3)], 2)] },
    RefRow {
        n: 5,
        two_pow: 3,
        terms: &[t(4, &[(63, 1), (49, 1), (64, 15)], 0), t(2, &[(-49, 1), (-128, 15)], 2), t(0, &[(64, 15)], 4)],
    },
    RefRow {
        n: 6,
        two_pow: 4,
        terms: &[t(5, &[(231, 1), (238, 1), (231, 5)], 0), t(3, &[(-238, 1), (-462, 5)], 2), t(1, &[(231, 5)], 4)],
    },
];

impl RefRow {
    /// Dense coefficient vector (index = power of `s`) at a given `μ`.
    pub fn coefficients(&self, mu: f64) -> Vec<f64> {
        let m1 = 1.0 + mu;
        let norm = 1.0 / (m1.powi(self.n as i32) * 2f64.powi(self.two_pow));
        let mut out = vec![0.0; self.n + 1];
        for term in self.terms {
            let poly: f64 = term.coef.iter().rev().fold(0.0, |acc, &(num, den)| acc * mu + num as f64 / den as f64);
            out[term.power] += norm * poly * m1.powi(term.l);
        }
        out
    }
}
