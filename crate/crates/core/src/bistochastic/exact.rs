use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::Rational;

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    pub fn variable(vars: usize, index: usize) -> Self {
        assert!(index < vars);
        let mut e = vec![0; vars];
        e[index] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(mut self, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(self.vars, Rational::one());
        for _ in 0..n {
            out = out * self.clone();
        }
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.vars);
        let mut s = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= *xi;
                }
            }
            s += t;
        }
        s
    }

    /// Substitutes variable `i` with `subs[i]`; all substitutes must share a
    /// variable count, which becomes that of the result.
    pub fn compose(&self, subs: &[Polynomial]) -> Polynomial {
        assert_eq!(subs.len(), self.vars);
        let out_vars = subs[0].vars;
        let mut powers: Vec<Vec<Polynomial>> = subs
            .iter()
            .map(|s| vec![Polynomial::constant(out_vars, Rational::one()), s.clone()])
            .collect();
        let mut out = Polynomial::zero(out_vars);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(out_vars, *c);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().clone() * subs[i].clone();
                    powers[i].push(next);
                }
                t = t * powers[i][k as usize].clone();
            }
            out = out + t;
        }
        out
    }

    /// Integral over the standard simplex `{λ ≥ 0, Σλ ≤ 1}` in `vars`
    /// dimensions, with the implicit coordinate `λ₀ = 1 − Σλ` absent.
    ///
    /// Uses `∫ λ^α dλ = α! / (d + |α|)!`.
    pub fn integrate_standard_simplex(&self) -> Rational {
        let d = self.vars as u32;
        let mut s = Rational::zero();
        for (e, c) in &self.terms {
            let total: u32 = e.iter().sum();
            let mut num = Rational::one();
            for &k in e {
                num *= factorial(k);
            }
            s += *c * num / factorial(d + total);
        }
        s
    }
}

fn factorial(n: u32) -> Rational {
    (1..=n as i128).fold(Rational::one(), |acc, k| acc * Rational::from_integer(k))
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        assert_eq!(self.vars, rhs.vars);
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        assert_eq!(self.vars, rhs.vars);
        for (e, c) in rhs.terms {
            self.add_term(e, -c);
        }
        self
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        assert_eq!(self.vars, rhs.vars);
        let mut out = Polynomial::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, *ca * *cb);
            }
        }
        out
    }
}
