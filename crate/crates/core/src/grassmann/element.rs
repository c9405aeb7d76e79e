use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{Coefficient, GeneratorTable, GrassmannError, Monomial};

/// Binds a generator table to a coefficient ring. All elements are created
/// through an algebra handle, so mode mismatches are caught once.
#[derive(Debug)]
pub struct Algebra<C> {
    table: Arc<GeneratorTable>,
    _coeff: PhantomData<fn() -> C>,
}

impl<C> Clone for Algebra<C> {
    fn clone(&self) -> Self {
        Self {
            table: Arc::clone(&self.table),
            _coeff: PhantomData,
        }
    }
}

impl<C> PartialEq for Algebra<C> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table) || self.table == other.table
    }
}

impl<C: Coefficient> Algebra<C> {
    pub fn new(table: Arc<GeneratorTable>) -> Result<Self, GrassmannError> {
        if table.mode() != C::MODE {
            return Err(GrassmannError::ModeMismatch {
                table: table.mode(),
                requested: C::MODE,
            });
        }
        Ok(Self {
            table,
            _coeff: PhantomData,
        })
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn zero(&self) -> GrassmannElement<C> {
        GrassmannElement {
            table: Arc::clone(&self.table),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(&self, c: C) -> GrassmannElement<C> {
        self.monomial(Monomial::ONE, c)
    }

    pub fn one(&self) -> GrassmannElement<C> {
        self.scalar(C::one())
    }

    /// The generator at `index` with unit coefficient.
    pub fn generator(&self, index: usize) -> Result<GrassmannElement<C>, GrassmannError> {
        self.table.check_index(index)?;
        Ok(self.monomial(Monomial::single(index), C::one()))
    }

    pub fn named(&self, name: &str) -> Result<GrassmannElement<C>, GrassmannError> {
        self.generator(self.table.index_of(name)?)
    }

    fn monomial(&self, m: Monomial, c: C) -> GrassmannElement<C> {
        let mut e = self.zero();
        e.accumulate(m, c);
        e
    }

    pub fn term(&self, m: Monomial, c: C) -> Result<GrassmannElement<C>, GrassmannError> {
        self.check_monomial(m)?;
        Ok(self.monomial(m, c))
    }

    pub fn from_terms<I>(&self, terms: I) -> Result<GrassmannElement<C>, GrassmannError>
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut e = self.zero();
        for (m, c) in terms {
            self.check_monomial(m)?;
            e.accumulate(m, c);
        }
        Ok(e)
    }

    pub(crate) fn check_monomial(&self, m: Monomial) -> Result<(), GrassmannError> {
        match m.max_index() {
            Some(i) if i >= self.table.len() => {
                Err(GrassmannError::UnknownGenerator(format!("#{i}")))
            }
            _ => Ok(()),
        }
    }
}

/// Sparse element of the exterior algebra: a map from canonical monomials
/// to nonzero coefficients.
#[derive(Clone)]
pub struct GrassmannElement<C> {
    table: Arc<GeneratorTable>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> GrassmannElement<C> {
    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn algebra(&self) -> Algebra<C> {
        Algebra {
            table: Arc::clone(&self.table),
            _coeff: PhantomData,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient_of(&self, m: Monomial) -> C {
        self.terms.get(&m).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of the empty monomial.
    pub fn scalar_part(&self) -> C {
        self.coefficient_of(Monomial::ONE)
    }

    fn accumulate(&mut self, m: Monomial, c: C) {
        let threshold = self.table.zero_threshold();
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_negligible(threshold) {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                if !c.is_negligible(threshold) {
                    self.terms.insert(m, c);
                }
            }
        }
    }

    fn same_table(&self, other: &Self) -> Result<(), GrassmannError> {
        if Arc::ptr_eq(&self.table, &other.table) || *self.table == *other.table {
            Ok(())
        } else {
            Err(GrassmannError::TableMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.same_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.same_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.same_table(other)?;
        let mut out = self.algebra().zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, odd)) = ma.product(*mb) {
                    let c = ca.clone() * cb.clone();
                    out.accumulate(m, if odd { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.algebra().zero();
        for (m, v) in &self.terms {
            out.accumulate(*m, v.clone() * c.clone());
        }
        out
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(Monomial) -> bool) -> Self {
        Self {
            table: Arc::clone(&self.table),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Degree-`k` part.
    pub fn grade(&self, k: u32) -> Self {
        self.filter(|m| m.degree() == k)
    }

    /// `Some(k)` if every term has degree `k`; the zero element reports `Some(0)`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|m| m.degree());
        match degrees.next() {
            None => Some(0),
            Some(d) => degrees.all(|e| e == d).then_some(d),
        }
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.degree() % 2 == 0)
    }

    /// Left derivative ∂/∂g: anticommute g to the front of each monomial,
    /// then delete it.
    pub fn left_derivative(&self, g: usize) -> Result<Self, GrassmannError> {
        self.table.check_index(g)?;
        let mut out = self.algebra().zero();
        for (m, c) in &self.terms {
            if m.contains(g) {
                let odd = m.count_below(g) % 2 == 1;
                out.accumulate(m.without(g), if odd { -c.clone() } else { c.clone() });
            }
        }
        Ok(out)
    }

    /// Iterated Berezin integral ∫dg₁ ∫dg₂ … ∫dgₖ (·). The innermost
    /// integral is the last one listed and is applied first. Each single
    /// integral is the left derivative, so ∫dg (a + b g) = b.
    pub fn berezin(&self, gens: &[usize]) -> Result<Self, GrassmannError> {
        let mut out = self.clone();
        for &g in gens.iter().rev() {
            out = out.left_derivative(g)?;
        }
        Ok(out)
    }

    /// Same as [`berezin`](Self::berezin), addressing generators by name.
    pub fn berezin_named(&self, names: &[&str]) -> Result<Self, GrassmannError> {
        let idx = names
            .iter()
            .map(|n| self.table.index_of(n))
            .collect::<Result<Vec<_>, _>>()?;
        self.berezin(&idx)
    }

    /// Conjugation: complex-conjugates coefficients and reverses the order
    /// of every product of generators, (ab)* = b* a*, with generators
    /// self-conjugate.
    pub fn conjugate(&self) -> Self {
        let mut out = self.algebra().zero();
        for (m, c) in &self.terms {
            let c = c.conj();
            out.accumulate(*m, if m.reversal_is_odd() { -c } else { c });
        }
        out
    }

    /// Exponential of an even element with vanishing scalar part. The series
    /// terminates because such an element is nilpotent.
    pub fn exp(&self) -> Result<Self, GrassmannError> {
        if !self.is_even() || !self.scalar_part().is_negligible(0.0) {
            return Err(GrassmannError::NotNilpotent);
        }
        let alg = self.algebra();
        let mut sum = alg.one();
        let mut power = alg.one();
        let mut k = 1i64;
        loop {
            power = power.try_mul(self)?.scale(&C::from_ratio(1, k));
            if power.is_zero() {
                break;
            }
            sum = sum.try_add(&power)?;
            k += 1;
        }
        Ok(sum)
    }

    /// Largest coefficient magnitude, as f64.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_complex64().norm())
            .fold(0.0, f64::max)
    }

    /// Componentwise distance to `other` (largest coefficient magnitude of
    /// the difference).
    pub fn distance(&self, other: &Self) -> Result<f64, GrassmannError> {
        Ok(self.try_sub(other)?.max_abs_coefficient())
    }
}

impl<C: Coefficient> PartialEq for GrassmannElement<C> {
    fn eq(&self, other: &Self) -> bool {
        self.same_table(other).is_ok() && self.terms == other.terms
    }
}

impl<C: Coefficient> fmt::Debug for GrassmannElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Coefficient> fmt::Display for GrassmannElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            for i in m.indices() {
                write!(f, "·{}", self.table.name(i).unwrap_or("?"))?;
            }
        }
        Ok(())
    }
}

// Operator forms panic on table mismatch; use the `try_*` methods where the
// tables are not known to agree.
macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<C: Coefficient> $trait<&GrassmannElement<C>> for &GrassmannElement<C> {
            type Output = GrassmannElement<C>;
            fn $method(self, rhs: &GrassmannElement<C>) -> GrassmannElement<C> {
                self.$checked(rhs).expect("grassmann operands on different tables")
            }
        }
        impl<C: Coefficient> $trait for GrassmannElement<C> {
            type Output = GrassmannElement<C>;
            fn $method(self, rhs: GrassmannElement<C>) -> GrassmannElement<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<C: Coefficient> Neg for &GrassmannElement<C> {
    type Output = GrassmannElement<C>;
    fn neg(self) -> GrassmannElement<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coefficient> Neg for GrassmannElement<C> {
    type Output = GrassmannElement<C>;
    fn neg(self) -> GrassmannElement<C> {
        -&self
    }
}
