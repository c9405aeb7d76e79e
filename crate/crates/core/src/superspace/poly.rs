//! Polynomial Hamiltonians with exact rational coefficients.
//!
//! Polynomials can be evaluated on any coefficient type and substituted
//! directly with Grassmann-valued arguments, which is what the identity
//! suites compare the nilpotent Taylor expansion against.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::dynamics::{HamiltonianModel, PhasePoint, ThirdDerivative};
use crate::grassmann::{Algebra, Coefficient, GrassmannElement, GrassmannError};

/// Σ c_e Π x_a^{e_a} over a fixed number of variables.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// Terms as (exponents, numerator, denominator).
    pub fn from_terms(nvars: usize, terms: &[(&[u32], i64, i64)]) -> Self {
        let mut p = Self::zero(nvars);
        for (e, num, den) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e.to_vec(), BigRational::new(BigInt::from(*num), BigInt::from(*den)));
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * BigRational::from_integer(BigInt::from(e[var])));
        }
        out
    }

    pub fn eval<C: Coefficient>(&self, x: &[C]) -> C {
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut t = C::from_rational(c);
            for (xa, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xa.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                e.iter().zip(x).fold(c, |t, (&k, &xa)| t * xa.powi(k as i32))
            })
            .sum()
    }

    /// Direct substitution with Grassmann-valued arguments.
    pub fn substitute<C: Coefficient>(
        &self,
        algebra: &Algebra<C>,
        x: &[GrassmannElement<C>],
    ) -> Result<GrassmannElement<C>, GrassmannError> {
        let mut powers: Vec<Vec<GrassmannElement<C>>> = x.iter().map(|xa| vec![algebra.one(), xa.clone()]).collect();
        let mut acc = algebra.zero();
        for (e, c) in &self.terms {
            let mut t = algebra.scalar(C::from_rational(c));
            for (a, &k) in e.iter().enumerate() {
                while powers[a].len() <= k as usize {
                    let next = powers[a].last().unwrap().try_mul(&x[a])?;
                    powers[a].push(next);
                }
                if k > 0 {
                    t = t.try_mul(&powers[a][k as usize])?;
                }
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: String = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(a, k)| format!("·x{a}^{k}"))
                    .collect();
                format!("{c}{vars}")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Polynomial H(q, p) with all derivatives up to third order precomputed.
#[derive(Clone, Debug)]
pub struct PolynomialHamiltonian {
    name: String,
    dof: usize,
    h: Polynomial,
    grad: Vec<Polynomial>,
    hess: Vec<Vec<Polynomial>>,
    third: Vec<Vec<Vec<Polynomial>>>,
}

impl PolynomialHamiltonian {
    pub fn new(name: impl Into<String>, dof: usize, h: Polynomial) -> Self {
        let d = 2 * dof;
        assert_eq!(h.nvars(), d, "polynomial must be in the 2n phase-space variables");
        let grad: Vec<Polynomial> = (0..d).map(|a| h.derivative(a)).collect();
        let hess: Vec<Vec<Polynomial>> = grad.iter().map(|g| (0..d).map(|b| g.derivative(b)).collect()).collect();
        let third = hess
            .iter()
            .map(|row| row.iter().map(|hab| (0..d).map(|c| hab.derivative(c)).collect()).collect())
            .collect();
        Self {
            name: name.into(),
            dof,
            h,
            grad,
            hess,
            third,
        }
    }

    /// p²/2
    pub fn free() -> Self {
        Self::new("free", 1, Polynomial::from_terms(2, &[(&[0, 2], 1, 2)]))
    }

    /// (q² + p²)/2
    pub fn harmonic() -> Self {
        Self::new("harmonic", 1, Polynomial::from_terms(2, &[(&[2, 0], 1, 2), (&[0, 2], 1, 2)]))
    }

    /// p²/2 + q⁴/4
    pub fn quartic() -> Self {
        Self::new("quartic", 1, Polynomial::from_terms(2, &[(&[0, 2], 1, 2), (&[4, 0], 1, 4)]))
    }

    /// q²p, a non-separable cubic.
    pub fn cubic() -> Self {
        Self::new("cubic", 1, Polynomial::from_terms(2, &[(&[2, 1], 1, 1)]))
    }

    /// A constant Hamiltonian.
    pub fn constant(num: i64, den: i64) -> Self {
        Self::new("constant", 1, Polynomial::from_terms(2, &[(&[0, 0], num, den)]))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "free" => Some(Self::free()),
            "ho" | "harmonic" => Some(Self::harmonic()),
            "quartic" => Some(Self::quartic()),
            "cubic" => Some(Self::cubic()),
            _ => None,
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.h
    }

    pub fn value<C: Coefficient>(&self, phi: &[C]) -> C {
        self.h.eval(phi)
    }

    pub fn gradient_at<C: Coefficient>(&self, phi: &[C]) -> Vec<C> {
        self.grad.iter().map(|g| g.eval(phi)).collect()
    }

    pub fn hessian_at<C: Coefficient>(&self, phi: &[C]) -> Vec<Vec<C>> {
        self.hess.iter().map(|row| row.iter().map(|h| h.eval(phi)).collect()).collect()
    }

    pub fn third_at<C: Coefficient>(&self, phi: &[C]) -> Vec<Vec<Vec<C>>> {
        self.third
            .iter()
            .map(|m| m.iter().map(|row| row.iter().map(|t| t.eval(phi)).collect()).collect())
            .collect()
    }
}

impl HamiltonianModel for PolynomialHamiltonian {
    fn name(&self) -> &str {
        &self.name
    }

    fn dof(&self) -> usize {
        self.dof
    }

    fn energy(&self, phi: &PhasePoint) -> f64 {
        self.h.eval_f64(phi.as_slice())
    }

    fn gradient(&self, phi: &PhasePoint) -> DVector<f64> {
        DVector::from_iterator(self.grad.len(), self.grad.iter().map(|g| g.eval_f64(phi.as_slice())))
    }

    fn hessian(&self, phi: &PhasePoint) -> DMatrix<f64> {
        let d = self.grad.len();
        DMatrix::from_fn(d, d, |a, b| self.hess[a][b].eval_f64(phi.as_slice()))
    }

    fn third_derivative(&self, phi: &PhasePoint) -> ThirdDerivative {
        let d = self.grad.len();
        (0..d)
            .map(|a| DMatrix::from_fn(d, d, |b, c| self.third[a][b][c].eval_f64(phi.as_slice())))
            .collect()
    }

    fn is_separable(&self) -> bool {
        let n = self.dof;
        self.h.terms().all(|(e, _)| {
            let has_q = e[..n].iter().any(|&k| k > 0);
            let has_p = e[n..].iter().any(|&k| k > 0);
            !(has_q && has_p)
        })
    }

    fn is_quadratic(&self) -> bool {
        self.h.degree() <= 2
    }
}
