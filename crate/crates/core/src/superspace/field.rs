//! Superfields Φ^a(t, θ, θ̄) and the nilpotent expansion of H(Φ).
//!
//! Canonical monomial order puts θ before θ̄, so the superfield
//!
//! Φ^a = φ^a + θ c^a + θ̄ ω^{ab} c̄_b + i θ̄θ ω^{ab} λ_b
//!
//! is stored with top coefficient −i ω^{ab} λ_b on θθ̄.

use nalgebra::DMatrix;

use super::poly::PolynomialHamiltonian;
use super::SuperspaceError;
use crate::dynamics::{HamiltonianModel, PhasePoint};
use crate::grassmann::{theta_pair, Algebra, Coefficient, GrassmannElement, Monomial};
use num_complex::Complex64;

/// ω = [[0, I], [−I, 0]] in the (q, p) ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dof(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn entry(&self, a: usize, b: usize) -> i64 {
        let n = self.n;
        if a < n && b == a + n {
            1
        } else if a >= n && b + n == a {
            -1
        } else {
            0
        }
    }

    pub fn matrix(&self) -> DMatrix<i64> {
        DMatrix::from_fn(self.dim(), self.dim(), |a, b| self.entry(a, b))
    }

    /// The unique nonzero column b of row a, with its sign.
    pub fn partner(&self, a: usize) -> (usize, i64) {
        if a < self.n {
            (a + self.n, 1)
        } else {
            (a - self.n, -1)
        }
    }

    /// (ω v)^a for element-valued v.
    pub fn apply<C: Coefficient>(&self, v: &[GrassmannElement<C>]) -> Vec<GrassmannElement<C>> {
        (0..self.dim())
            .map(|a| {
                let (b, s) = self.partner(a);
                v[b].scale(&C::from_i64(s))
            })
            .collect()
    }
}

/// Scalars lifted to elements.
pub fn lift<C: Coefficient>(algebra: &Algebra<C>, values: &[C]) -> Vec<GrassmannElement<C>> {
    values.iter().map(|v| algebra.scalar(v.clone())).collect()
}

/// The value of an element with no generator content.
pub fn scalar_value<C: Coefficient>(e: &GrassmannElement<C>) -> Result<C, SuperspaceError> {
    if e.terms().any(|(m, _)| *m != Monomial::ONE) {
        return Err(SuperspaceError::NotScalar);
    }
    Ok(e.scalar_part())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperField<C: Coefficient> {
    algebra: Algebra<C>,
    theta: usize,
    thetabar: usize,
    omega: SymplecticForm,
    pub phi: Vec<GrassmannElement<C>>,
    pub c: Vec<GrassmannElement<C>>,
    pub cbar: Vec<GrassmannElement<C>>,
    pub lambda: Vec<GrassmannElement<C>>,
    fields: Vec<GrassmannElement<C>>,
}

impl<C: Coefficient> SuperField<C> {
    pub fn algebra(&self) -> &Algebra<C> {
        &self.algebra
    }

    pub fn omega(&self) -> SymplecticForm {
        self.omega
    }

    pub fn theta_indices(&self) -> (usize, usize) {
        (self.theta, self.thetabar)
    }

    /// Φ^a for every a.
    pub fn fields(&self) -> &[GrassmannElement<C>] {
        &self.fields
    }

    /// ΔΦ^a = Φ^a − φ^a.
    pub fn displacement(&self) -> Vec<GrassmannElement<C>> {
        self.fields.iter().zip(&self.phi).map(|(f, p)| f - p).collect()
    }

    /// φ as plain coefficients; fails if φ carries generators.
    pub fn base_values(&self) -> Result<Vec<C>, SuperspaceError> {
        self.phi.iter().map(scalar_value).collect()
    }
}

/// Assembles Φ^a from element-valued components. φ and λ must be even,
/// c and c̄ odd; all four live on the algebra, which must contain θ and θ̄.
pub fn build_superfield<C: Coefficient>(
    algebra: &Algebra<C>,
    phi: Vec<GrassmannElement<C>>,
    c: Vec<GrassmannElement<C>>,
    cbar: Vec<GrassmannElement<C>>,
    lambda: Vec<GrassmannElement<C>>,
    omega: SymplecticForm,
) -> Result<SuperField<C>, SuperspaceError> {
    let d = omega.dim();
    for (what, v) in [("φ", &phi), ("c", &c), ("c̄", &cbar), ("λ", &lambda)] {
        if v.len() != d {
            return Err(SuperspaceError::DimensionMismatch {
                what,
                expected: d,
                got: v.len(),
            });
        }
    }
    let (theta, thetabar) = theta_pair(algebra.table())?;
    let th = algebra.generator(theta)?;
    let thb = algebra.generator(thetabar)?;
    let thb_th = thb.try_mul(&th)?;
    let i = C::imag_unit();
    let wcbar = omega.apply(&cbar);
    let wlambda = omega.apply(&lambda);
    let mut fields = Vec::with_capacity(d);
    for a in 0..d {
        let f = phi[a]
            .try_add(&th.try_mul(&c[a])?)?
            .try_add(&thb.try_mul(&wcbar[a])?)?
            .try_add(&thb_th.try_mul(&wlambda[a])?.scale(&i))?;
        fields.push(f);
    }
    Ok(SuperField {
        algebra: algebra.clone(),
        theta,
        thetabar,
        omega,
        phi,
        c,
        cbar,
        lambda,
        fields,
    })
}

/// e = base + θ·theta + θ̄·thetabar + θθ̄·top with all four parts free of θ, θ̄.
#[derive(Clone, Debug, PartialEq)]
pub struct Components<C: Coefficient> {
    pub base: GrassmannElement<C>,
    pub theta: GrassmannElement<C>,
    pub thetabar: GrassmannElement<C>,
    pub top: GrassmannElement<C>,
}

pub fn decompose<C: Coefficient>(e: &GrassmannElement<C>) -> Result<Components<C>, SuperspaceError> {
    let (t, tb) = theta_pair(e.table())?;
    let free = |m: Monomial| !m.contains(t) && !m.contains(tb);
    Ok(Components {
        base: e.filter(free),
        theta: e.left_derivative(t)?.filter(free),
        thetabar: e.left_derivative(tb)?.filter(free),
        top: e.left_derivative(t)?.left_derivative(tb)?,
    })
}

impl<C: Coefficient> Components<C> {
    pub fn recombine(&self) -> Result<GrassmannElement<C>, SuperspaceError> {
        let alg = self.base.algebra();
        let (t, tb) = theta_pair(alg.table())?;
        let th = alg.generator(t)?;
        let thb = alg.generator(tb)?;
        Ok(self
            .base
            .try_add(&th.try_mul(&self.theta)?)?
            .try_add(&thb.try_mul(&self.thetabar)?)?
            .try_add(&th.try_mul(&thb)?.try_mul(&self.top)?)?)
    }
}

/// Value and derivatives of H at a point with coefficients of type C.
pub trait SuperspaceHamiltonian<C: Coefficient> {
    fn label(&self) -> &str;
    fn phase_dim(&self) -> usize;
    /// (H, ∂_aH, ∂_a∂_bH)
    fn jet2(&self, phi: &[C]) -> Result<(C, Vec<C>, Vec<Vec<C>>), SuperspaceError>;
    fn jet3(&self, phi: &[C]) -> Result<Vec<Vec<Vec<C>>>, SuperspaceError>;
    /// Direct H(Φ) by Grassmann arithmetic, where H allows it.
    fn substitute(
        &self,
        _algebra: &Algebra<C>,
        _x: &[GrassmannElement<C>],
    ) -> Option<Result<GrassmannElement<C>, SuperspaceError>> {
        None
    }
}

impl<C: Coefficient> SuperspaceHamiltonian<C> for PolynomialHamiltonian {
    fn label(&self) -> &str {
        HamiltonianModel::name(self)
    }
    fn phase_dim(&self) -> usize {
        2 * self.dof()
    }
    fn jet2(&self, phi: &[C]) -> Result<(C, Vec<C>, Vec<Vec<C>>), SuperspaceError> {
        Ok((self.value(phi), self.gradient_at(phi), self.hessian_at(phi)))
    }
    fn jet3(&self, phi: &[C]) -> Result<Vec<Vec<Vec<C>>>, SuperspaceError> {
        Ok(self.third_at(phi))
    }
    fn substitute(
        &self,
        algebra: &Algebra<C>,
        x: &[GrassmannElement<C>],
    ) -> Option<Result<GrassmannElement<C>, SuperspaceError>> {
        Some(self.polynomial().substitute(algebra, x).map_err(SuperspaceError::from))
    }
}

/// A float [`HamiltonianModel`] used with complex-float tables. Points must
/// be real.
pub struct FloatModel<'a>(pub &'a dyn HamiltonianModel);

impl FloatModel<'_> {
    fn real_point(&self, phi: &[Complex64]) -> Result<PhasePoint, SuperspaceError> {
        if phi.iter().any(|z| z.im != 0.0) {
            return Err(SuperspaceError::NotScalar);
        }
        Ok(PhasePoint::from_iterator(phi.len(), phi.iter().map(|z| z.re)))
    }
}

impl SuperspaceHamiltonian<Complex64> for FloatModel<'_> {
    fn label(&self) -> &str {
        self.0.name()
    }
    fn phase_dim(&self) -> usize {
        2 * self.0.dof()
    }
    fn jet2(&self, phi: &[Complex64]) -> Result<(Complex64, Vec<Complex64>, Vec<Vec<Complex64>>), SuperspaceError> {
        let x = self.real_point(phi)?;
        let d = x.len();
        let g = self.0.gradient(&x);
        let h = self.0.hessian(&x);
        Ok((
            self.0.energy(&x).into(),
            g.iter().map(|v| (*v).into()).collect(),
            (0..d).map(|a| (0..d).map(|b| h[(a, b)].into()).collect()).collect(),
        ))
    }
    fn jet3(&self, phi: &[Complex64]) -> Result<Vec<Vec<Vec<Complex64>>>, SuperspaceError> {
        let x = self.real_point(phi)?;
        let d = x.len();
        let t = self.0.third_derivative(&x);
        Ok((0..d)
            .map(|a| (0..d).map(|b| (0..d).map(|c| t[a][(b, c)].into()).collect()).collect())
            .collect())
    }
}

fn check_dim<C: Coefficient>(h: &dyn SuperspaceHamiltonian<C>, phi: &SuperField<C>) -> Result<(), SuperspaceError> {
    if h.phase_dim() != phi.omega.dim() {
        return Err(SuperspaceError::DimensionMismatch {
            what: "Hamiltonian",
            expected: phi.omega.dim(),
            got: h.phase_dim(),
        });
    }
    Ok(())
}

/// H(φ + ΔΦ) = H + ∂_aH ΔΦ^a + ½ ∂_a∂_bH ΔΦ^a ΔΦ^b, exact because every
/// product of three displacements vanishes.
pub fn taylor_expand<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    field: &SuperField<C>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    check_dim(h, field)?;
    let phi = field.base_values()?;
    let (v, g, hess) = h.jet2(&phi)?;
    let alg = field.algebra();
    let dphi = field.displacement();
    let half = C::from_ratio(1, 2);
    let mut acc = alg.scalar(v);
    for a in 0..dphi.len() {
        acc = acc.try_add(&dphi[a].scale(&g[a]))?;
        for b in 0..dphi.len() {
            acc = acc.try_add(&dphi[a].try_mul(&dphi[b])?.scale(&(hess[a][b].clone() * half.clone())))?;
        }
    }
    Ok(acc)
}

/// H(Φ) by direct substitution when H supports it, by the Taylor form
/// otherwise.
pub fn evaluate_on_superfield<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    field: &SuperField<C>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    check_dim(h, field)?;
    match h.substitute(field.algebra(), field.fields()) {
        Some(r) => r,
        None => taylor_expand(h, field),
    }
}

/// The third-order Taylor term (1/6) ∂³H ΔΦΔΦΔΦ, which must vanish.
pub fn truncation_remainder<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    field: &SuperField<C>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    check_dim(h, field)?;
    let phi = field.base_values()?;
    let t = h.jet3(&phi)?;
    let dphi = field.displacement();
    let sixth = C::from_ratio(1, 6);
    let mut acc = field.algebra().zero();
    for a in 0..dphi.len() {
        for b in 0..dphi.len() {
            let ab = dphi[a].try_mul(&dphi[b])?;
            for c in 0..dphi.len() {
                acc = acc.try_add(&ab.try_mul(&dphi[c])?.scale(&(t[a][b][c].clone() * sixth.clone())))?;
            }
        }
    }
    Ok(acc)
}

/// H̃ = λ_a ω^{ab} ∂_bH + i c̄_a ω^{ac} ∂_c∂_bH c^b.
pub fn tilde_hamiltonian<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    algebra: &Algebra<C>,
    phi: &[C],
    lambda: &[GrassmannElement<C>],
    c: &[GrassmannElement<C>],
    cbar: &[GrassmannElement<C>],
) -> Result<GrassmannElement<C>, SuperspaceError> {
    let d = phi.len();
    if h.phase_dim() != d || lambda.len() != d || c.len() != d || cbar.len() != d {
        return Err(SuperspaceError::DimensionMismatch {
            what: "H̃ arguments",
            expected: h.phase_dim(),
            got: d,
        });
    }
    let omega = SymplecticForm::new(d / 2);
    let (_, g, hess) = h.jet2(phi)?;
    let i = C::imag_unit();
    let mut acc = algebra.zero();
    for a in 0..d {
        let (b, s) = omega.partner(a);
        acc = acc.try_add(&lambda[a].scale(&(C::from_i64(s) * g[b].clone())))?;
        // i c̄_a ω^{ac} H_{cb} c^b with the single partner c of a
        for (bb, cb) in c.iter().enumerate() {
            let w = hess[b][bb].clone() * C::from_i64(s) * i.clone();
            if w == C::zero() {
                continue;
            }
            acc = acc.try_add(&cbar[a].try_mul(cb)?.scale(&w))?;
        }
    }
    Ok(acc)
}

/// The four components of H(Φ) written out as the known closed forms:
/// base H(φ), θ-part ∂_aH c^a, θ̄-part ∂_aH ω^{ab} c̄_b, θθ̄-part i H̃.
pub fn expansion_components<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    field: &SuperField<C>,
) -> Result<Components<C>, SuperspaceError> {
    check_dim(h, field)?;
    let alg = field.algebra();
    let phi = field.base_values()?;
    let (v, g, _) = h.jet2(&phi)?;
    let wcbar = field.omega.apply(&field.cbar);
    let mut theta = alg.zero();
    let mut thetabar = alg.zero();
    for a in 0..g.len() {
        theta = theta.try_add(&field.c[a].scale(&g[a]))?;
        thetabar = thetabar.try_add(&wcbar[a].scale(&g[a]))?;
    }
    let top = tilde_hamiltonian(h, alg, &phi, &field.lambda, &field.c, &field.cbar)?.scale(&C::imag_unit());
    Ok(Components {
        base: alg.scalar(v),
        theta,
        thetabar,
        top,
    })
}

/// Components of H(Φ) read off its Taylor expansion.
pub fn expand_function<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    field: &SuperField<C>,
) -> Result<Components<C>, SuperspaceError> {
    decompose(&taylor_expand(h, field)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{create_algebra, CoefficientMode, Exact, GeneratorRole::*};

    pub(crate) fn slice_algebra() -> Algebra<Exact> {
        let t = create_algebra(
            CoefficientMode::Exact,
            &[
                ("θ", Theta),
                ("θ̄", ThetaBar),
                ("c^q", GhostC),
                ("c^p", GhostC),
                ("c̄_q", GhostCBar),
                ("c̄_p", GhostCBar),
            ],
        )
        .unwrap();
        Algebra::new(t).unwrap()
    }

    fn field(alg: &Algebra<Exact>, phi: [Exact; 2], lambda: [Exact; 2]) -> SuperField<Exact> {
        let g = |i| alg.generator(i).unwrap();
        build_superfield(
            alg,
            lift(alg, &phi),
            vec![g(2), g(3)],
            vec![g(4), g(5)],
            lift(alg, &lambda),
            SymplecticForm::new(1),
        )
        .unwrap()
    }

    fn r(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    #[test]
    fn symplectic_form() {
        let w = SymplecticForm::new(2).matrix();
        assert_eq!(&w * &w, -DMatrix::<i64>::identity(4, 4));
        assert_eq!(w.transpose(), -w);
    }

    #[test]
    fn bosonic_superfield_is_plain() {
        let alg = slice_algebra();
        let z = alg.zero();
        let f = build_superfield(
            &alg,
            lift(&alg, &[r(1, 2), r(-3, 1)]),
            vec![z.clone(), z.clone()],
            vec![z.clone(), z.clone()],
            vec![z.clone(), z],
            SymplecticForm::new(1),
        )
        .unwrap();
        assert_eq!(f.fields()[0], alg.scalar(r(1, 2)));
        assert_eq!(f.fields()[1], alg.scalar(r(-3, 1)));
    }

    #[test]
    fn superfield_components_carry_omega() {
        let alg = slice_algebra();
        let f = field(&alg, [r(1, 1), r(2, 1)], [r(5, 1), r(7, 1)]);
        let q = decompose(&f.fields()[0]).unwrap();
        let p = decompose(&f.fields()[1]).unwrap();
        let g = |i| alg.generator(i).unwrap();
        assert_eq!(q.theta, g(2));
        assert_eq!(q.thetabar, g(5));
        assert_eq!(p.thetabar, -g(4));
        // i θ̄θ λ_p = −i θθ̄ λ_p
        assert_eq!(q.top, alg.scalar(Exact::from_i64(-7) * Exact::imag_unit()));
        assert_eq!(p.top, alg.scalar(Exact::from_i64(5) * Exact::imag_unit()));
        assert_eq!(q.recombine().unwrap(), f.fields()[0]);
    }

    #[test]
    fn harmonic_expansion_closed_forms() {
        let alg = slice_algebra();
        let (q, p, lq, lp) = (r(2, 3), r(-5, 4), r(1, 7), r(3, 2));
        let f = field(&alg, [q.clone(), p.clone()], [lq.clone(), lp.clone()]);
        let h = PolynomialHamiltonian::harmonic();
        let comps = expand_function(&h, &f).unwrap();
        let g = |i| alg.generator(i).unwrap();
        assert_eq!(comps.theta, g(2).scale(&q) + g(3).scale(&p));
        // i[λ_q p − λ_p q + i(c̄_q c^p − c̄_p c^q)]
        let i = Exact::imag_unit();
        let inner = alg.scalar(lq * p - lp * q) + (g(4) * g(3) - g(5) * g(2)).scale(&i);
        assert_eq!(comps.top, inner.scale(&i));
        assert_eq!(comps, expansion_components(&h, &f).unwrap());
    }

    #[test]
    fn free_particle_tilde_hamiltonian() {
        let alg = slice_algebra();
        let f = field(&alg, [r(1, 3), r(4, 5)], [r(2, 1), r(-1, 2)]);
        let h = PolynomialHamiltonian::free();
        let ht = tilde_hamiltonian(&h, &alg, &[r(1, 3), r(4, 5)], &f.lambda, &f.c, &f.cbar).unwrap();
        let g = |i| alg.generator(i).unwrap();
        let expected = alg.scalar(r(2, 1) * r(4, 5)) + (g(4) * g(3)).scale(&Exact::imag_unit());
        assert_eq!(ht, expected);
        let zero = lift(&alg, &[r(0, 1), r(0, 1)]);
        let z = tilde_hamiltonian(&h, &alg, &[r(1, 3), r(4, 5)], &zero, &zero, &f.cbar).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn constant_hamiltonian_has_only_base() {
        let alg = slice_algebra();
        let f = field(&alg, [r(1, 1), r(1, 1)], [r(1, 1), r(1, 1)]);
        let c = expand_function(&PolynomialHamiltonian::constant(3, 1), &f).unwrap();
        assert!(c.theta.is_zero() && c.thetabar.is_zero() && c.top.is_zero());
        assert_eq!(c.base, alg.scalar(r(3, 1)));
    }

    #[test]
    fn substitution_matches_taylor_and_remainder_vanishes() {
        let alg = slice_algebra();
        let f = field(&alg, [r(-3, 2), r(5, 3)], [r(2, 9), r(-4, 5)]);
        for h in [
            PolynomialHamiltonian::free(),
            PolynomialHamiltonian::harmonic(),
            PolynomialHamiltonian::quartic(),
            PolynomialHamiltonian::cubic(),
        ] {
            let direct = evaluate_on_superfield(&h, &f).unwrap();
            assert_eq!(direct, taylor_expand(&h, &f).unwrap());
            assert_eq!(direct, expansion_components(&h, &f).unwrap().recombine().unwrap());
            assert!(truncation_remainder(&h, &f).unwrap().is_zero());
        }
    }

    #[test]
    fn float_model_taylor_path() {
        use crate::dynamics::BuiltinModel;
        let t = create_algebra(
            CoefficientMode::Float,
            &[("θ", Theta), ("θ̄", ThetaBar), ("c^q", GhostC), ("c^p", GhostC), ("c̄_q", GhostCBar), ("c̄_p", GhostCBar)],
        )
        .unwrap();
        let alg: Algebra<Complex64> = Algebra::new(t).unwrap();
        let g = |i| alg.generator(i).unwrap();
        let phi = [Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.0)];
        let lam = [Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0)];
        let f = build_superfield(&alg, lift(&alg, &phi), vec![g(2), g(3)], vec![g(4), g(5)], lift(&alg, &lam), SymplecticForm::new(1))
            .unwrap();
        let model = FloatModel(&BuiltinModel::Pendulum);
        let e = evaluate_on_superfield(&model, &f).unwrap();
        let c = expansion_components(&model, &f).unwrap().recombine().unwrap();
        assert!(e.distance(&c).unwrap() < 1e-14);
    }
}
