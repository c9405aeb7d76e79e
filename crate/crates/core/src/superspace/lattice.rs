//! Time-lattice superspace action and its Berezin reduction.
//!
//! The kinetic term is the symmetrised forward difference
//! ½[Φ^p_k(Φ^q_{k+1} − Φ^q_k) − Φ^q_k(Φ^p_{k+1} − Φ^p_k)], with H at slice k.
//! The matching lattice CPI action is
//!
//! S̃_lat = Σ_k [½(λ_k + λ_{k+1})·Δφ_k + i ½(c̄_k + c̄_{k+1})·Δc_k − dt H̃_k],
//!
//! and with these choices i∫dθdθ̄ S_lat[Φ] = S̃_lat + (s.t.) holds exactly,
//! slice by slice, where (s.t.) = −½(λ_aφ^a + i c̄_a c^a) evaluated from the
//! first slice to the last.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{build_superfield, evaluate_on_superfield, lift, SuperField, SuperspaceHamiltonian, SymplecticForm};
use super::SuperspaceError;
use crate::grassmann::{
    create_algebra, theta_measure, theta_pair, Algebra, Coefficient, GeneratorRole, GrassmannElement,
};

/// Coordinate labels: q, p for one degree of freedom, q1.., p1.. otherwise.
pub fn coordinate_names(n: usize) -> Vec<String> {
    if n == 1 {
        return vec!["q".into(), "p".into()];
    }
    (1..=n).map(|j| format!("q{j}")).chain((1..=n).map(|j| format!("p{j}"))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSlice<C> {
    pub phi: Vec<C>,
    pub lambda: Vec<C>,
    /// Generator indices of c^a_k.
    pub c: Vec<usize>,
    /// Generator indices of c̄_{a,k}.
    pub cbar: Vec<usize>,
}

/// A nilpotent shift ε = η₁η₂ of one bosonic variable on one slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variation {
    Phi { slice: usize, index: usize },
    Lambda { slice: usize, index: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticePath<C: Coefficient> {
    algebra: Algebra<C>,
    omega: SymplecticForm,
    pub dt: C,
    pub slices: Vec<LatticeSlice<C>>,
    ghosts: bool,
    aux: Option<(usize, usize)>,
}

impl<C: Coefficient> LatticePath<C> {
    /// Builds the shared table (θ, θ̄, then c_k and c̄_k slice by slice, then
    /// optionally two auxiliary generators) and attaches the bosonic data.
    pub fn new(
        n: usize,
        dt: C,
        phi: Vec<Vec<C>>,
        lambda: Vec<Vec<C>>,
        with_aux: bool,
    ) -> Result<Self, SuperspaceError> {
        let d = 2 * n;
        if phi.len() < 2 {
            return Err(SuperspaceError::InvalidLattice("need at least one time step".into()));
        }
        if lambda.len() != phi.len() {
            return Err(SuperspaceError::InvalidLattice("φ and λ need the same number of slices".into()));
        }
        for v in phi.iter().chain(&lambda) {
            if v.len() != d {
                return Err(SuperspaceError::DimensionMismatch {
                    what: "slice data",
                    expected: d,
                    got: v.len(),
                });
            }
        }
        let names = coordinate_names(n);
        let mut gens: Vec<(String, GeneratorRole)> =
            vec![("θ".into(), GeneratorRole::Theta), ("θ̄".into(), GeneratorRole::ThetaBar)];
        for k in 0..phi.len() {
            gens.extend(names.iter().map(|x| (format!("c^{x}_{k}"), GeneratorRole::GhostC)));
            gens.extend(names.iter().map(|x| (format!("c̄_{x},{k}"), GeneratorRole::GhostCBar)));
        }
        if with_aux {
            gens.push(("η₁".into(), GeneratorRole::Auxiliary));
            gens.push(("η₂".into(), GeneratorRole::Auxiliary));
        }
        let table = create_algebra(C::MODE, &gens)?;
        let algebra = Algebra::new(table)?;
        let slices = phi
            .into_iter()
            .zip(lambda)
            .enumerate()
            .map(|(k, (phi, lambda))| {
                let base = 2 + 2 * d * k;
                LatticeSlice {
                    phi,
                    lambda,
                    c: (base..base + d).collect(),
                    cbar: (base + d..base + 2 * d).collect(),
                }
            })
            .collect::<Vec<_>>();
        let aux = with_aux.then(|| {
            let m = 2 + 2 * d * slices.len();
            (m, m + 1)
        });
        Ok(Self {
            algebra,
            omega: SymplecticForm::new(n),
            dt,
            slices,
            ghosts: true,
            aux,
        })
    }

    /// Seeded pseudo-random rational data: numerators in −6..=6, denominators
    /// in 1..=5, on `steps + 1` slices.
    pub fn random(n: usize, steps: usize, dt: C, seed: u64, with_aux: bool) -> Result<Self, SuperspaceError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |count: usize| -> Vec<Vec<C>> {
            (0..count)
                .map(|_| {
                    (0..2 * n)
                        .map(|_| C::from_ratio(rng.random_range(-6..=6), rng.random_range(1..=5)))
                        .collect()
                })
                .collect()
        };
        let phi = draw(steps + 1);
        let lambda = draw(steps + 1);
        Self::new(n, dt, phi, lambda, with_aux)
    }

    /// Sets every ghost to zero.
    pub fn without_ghosts(mut self) -> Self {
        self.ghosts = false;
        self
    }

    pub fn without_lambda(mut self) -> Self {
        for s in &mut self.slices {
            s.lambda.iter_mut().for_each(|l| *l = C::zero());
        }
        self
    }

    pub fn algebra(&self) -> &Algebra<C> {
        &self.algebra
    }

    pub fn omega(&self) -> SymplecticForm {
        self.omega
    }

    /// Number of time steps N (slices 0..=N).
    pub fn steps(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn generator_count(&self) -> usize {
        self.algebra.table().len()
    }

    fn ghost(&self, index: usize) -> Result<GrassmannElement<C>, SuperspaceError> {
        if self.ghosts {
            Ok(self.algebra.generator(index)?)
        } else {
            Ok(self.algebra.zero())
        }
    }

    pub fn c(&self, k: usize) -> Result<Vec<GrassmannElement<C>>, SuperspaceError> {
        self.slices[k].c.iter().map(|&i| self.ghost(i)).collect()
    }

    pub fn cbar(&self, k: usize) -> Result<Vec<GrassmannElement<C>>, SuperspaceError> {
        self.slices[k].cbar.iter().map(|&i| self.ghost(i)).collect()
    }

    /// ε = η₁η₂, the nilpotent even parameter of a variation.
    pub fn epsilon(&self) -> Result<GrassmannElement<C>, SuperspaceError> {
        let (a, b) = self.aux.ok_or(SuperspaceError::MissingAuxiliary)?;
        Ok(self.algebra.generator(a)?.try_mul(&self.algebra.generator(b)?)?)
    }

    fn bosons(
        &self,
        k: usize,
        variation: Option<Variation>,
    ) -> Result<(Vec<GrassmannElement<C>>, Vec<GrassmannElement<C>>), SuperspaceError> {
        let mut phi = lift(&self.algebra, &self.slices[k].phi);
        let mut lambda = lift(&self.algebra, &self.slices[k].lambda);
        match variation {
            Some(Variation::Phi { slice, index }) if slice == k => {
                phi[index] = phi[index].try_add(&self.epsilon()?)?;
            }
            Some(Variation::Lambda { slice, index }) if slice == k => {
                lambda[index] = lambda[index].try_add(&self.epsilon()?)?;
            }
            _ => {}
        }
        Ok((phi, lambda))
    }

    pub fn superfield(&self, k: usize, variation: Option<Variation>) -> Result<SuperField<C>, SuperspaceError> {
        let (phi, lambda) = self.bosons(k, variation)?;
        build_superfield(&self.algebra, phi, self.c(k)?, self.cbar(k)?, lambda, self.omega)
    }

    pub fn boundary(&self, k: usize, variation: Option<Variation>) -> Result<Boundary<C>, SuperspaceError> {
        let (phi, lambda) = self.bosons(k, variation)?;
        Ok(Boundary {
            phi,
            lambda,
            c: self.c(k)?,
            cbar: self.cbar(k)?,
        })
    }
}

/// Boundary data entering the surface term.
#[derive(Clone, Debug, PartialEq)]
pub struct Boundary<C: Coefficient> {
    pub phi: Vec<GrassmannElement<C>>,
    pub lambda: Vec<GrassmannElement<C>>,
    pub c: Vec<GrassmannElement<C>>,
    pub cbar: Vec<GrassmannElement<C>>,
}

fn boundary_bracket<C: Coefficient>(b: &Boundary<C>) -> Result<GrassmannElement<C>, SuperspaceError> {
    let alg = b.phi[0].algebra();
    let i = C::imag_unit();
    let mut acc = alg.zero();
    for a in 0..b.phi.len() {
        acc = acc.try_add(&b.lambda[a].try_mul(&b.phi[a])?)?;
        acc = acc.try_add(&b.cbar[a].try_mul(&b.c[a])?.scale(&i))?;
    }
    Ok(acc)
}

/// (s.t.) = −½(λ_aφ^a + i c̄_a c^a)|_{initial}^{final}.
pub fn surface_term<C: Coefficient>(
    initial: &Boundary<C>,
    final_: &Boundary<C>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    let diff = boundary_bracket(final_)?.try_sub(&boundary_bracket(initial)?)?;
    Ok(diff.scale(&C::from_ratio(-1, 2)))
}

/// S_lat[Φ], optionally with one bosonic variable shifted by ε.
pub fn lattice_superaction_varied<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    path: &LatticePath<C>,
    variation: Option<Variation>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    let n = path.omega.dof();
    let fields: Vec<SuperField<C>> = (0..path.slices.len())
        .map(|k| path.superfield(k, variation))
        .collect::<Result<_, _>>()?;
    let half = C::from_ratio(1, 2);
    let mut acc = path.algebra.zero();
    for k in 0..path.steps() {
        let (now, next) = (fields[k].fields(), fields[k + 1].fields());
        for j in 0..n {
            let (q, p) = (j, j + n);
            let dq = next[q].try_sub(&now[q])?;
            let dp = next[p].try_sub(&now[p])?;
            let kin = now[p].try_mul(&dq)?.try_sub(&now[q].try_mul(&dp)?)?;
            acc = acc.try_add(&kin.scale(&half))?;
        }
        let hk = evaluate_on_superfield(h, &fields[k])?;
        acc = acc.try_sub(&hk.scale(&path.dt))?;
    }
    Ok(acc)
}

pub fn lattice_superaction<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    path: &LatticePath<C>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    lattice_superaction_varied(h, path, None)
}

/// S_lat[φ] = Σ_k ½(p_kΔq_k − q_kΔp_k) − dt H(φ_k).
pub fn classical_lattice_action<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    path: &LatticePath<C>,
) -> Result<C, SuperspaceError> {
    let n = path.omega.dof();
    let half = C::from_ratio(1, 2);
    let mut acc = C::zero();
    for k in 0..path.steps() {
        let (now, next) = (&path.slices[k].phi, &path.slices[k + 1].phi);
        for j in 0..n {
            let (q, p) = (j, j + n);
            let kin = now[p].clone() * (next[q].clone() - now[q].clone())
                - now[q].clone() * (next[p].clone() - now[p].clone());
            acc = acc + kin * half.clone();
        }
        let (v, _, _) = h.jet2(now)?;
        acc = acc - path.dt.clone() * v;
    }
    Ok(acc)
}

/// S̃_lat, written directly from Δφ, Δc and H̃ on each slice.
pub fn tilde_lattice_action<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    path: &LatticePath<C>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    let alg = &path.algebra;
    let d = path.omega.dim();
    let half = C::from_ratio(1, 2);
    let i = C::imag_unit();
    let mut acc = alg.zero();
    for k in 0..path.steps() {
        let (s0, s1) = (&path.slices[k], &path.slices[k + 1]);
        let (c0, c1) = (path.c(k)?, path.c(k + 1)?);
        let (cb0, cb1) = (path.cbar(k)?, path.cbar(k + 1)?);
        for a in 0..d {
            let lmid = (s0.lambda[a].clone() + s1.lambda[a].clone()) * half.clone();
            acc = acc.try_add(&alg.scalar(lmid * (s1.phi[a].clone() - s0.phi[a].clone())))?;
            let cbmid = cb0[a].try_add(&cb1[a])?;
            let dc = c1[a].try_sub(&c0[a])?;
            acc = acc.try_add(&cbmid.try_mul(&dc)?.scale(&(i.clone() * half.clone())))?;
        }
        let lambda = lift(alg, &s0.lambda);
        let ht = super::field::tilde_hamiltonian(h, alg, &s0.phi, &lambda, &c0, &cb0)?;
        acc = acc.try_sub(&ht.scale(&path.dt))?;
    }
    Ok(acc)
}

pub fn lattice_surface_term<C: Coefficient>(
    path: &LatticePath<C>,
    variation: Option<Variation>,
) -> Result<GrassmannElement<C>, SuperspaceError> {
    surface_term(&path.boundary(0, variation)?, &path.boundary(path.steps(), variation)?)
}

/// ∫ i dθ dθ̄ S, which is S̃ + (s.t.) for a superspace action S.
pub fn berezin_reduce<C: Coefficient>(s: &GrassmannElement<C>) -> Result<GrassmannElement<C>, SuperspaceError> {
    Ok(theta_measure(s)?)
}

/// Inserts −(i/ħ) δ(θ) δ(θ̄) under ∫ i dθ dθ̄ and integrates. With
/// δ(θ)δ(θ̄) = θ̄θ the result is the θ, θ̄ free part of S divided by ħ, which
/// must have no ghost content left.
pub fn quantize_projector<C: Coefficient>(s: &GrassmannElement<C>, hbar: &C) -> Result<C, SuperspaceError> {
    if !hbar.is_positive_real() {
        return Err(SuperspaceError::InvalidHbar(format!("{hbar:?}")));
    }
    let alg = s.algebra();
    let (t, tb) = theta_pair(alg.table())?;
    let delta = alg.generator(tb)?.try_mul(&alg.generator(t)?)?;
    let projected = theta_measure(&delta.try_mul(s)?)?;
    let factor = -C::imag_unit() / hbar.clone();
    let out = projected.scale(&factor);
    if out.terms().any(|(m, _)| m.degree() > 0) {
        return Err(SuperspaceError::GhostContent);
    }
    Ok(out.scalar_part())
}

/// Residuals of the lattice Euler–Lagrange equations of the reduced action,
/// obtained from the superspace side, against their explicit forms.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerLagrangeReport {
    pub checks: usize,
    pub max_residual: f64,
}

/// Varies the reduced action i∫dθdθ̄ S_lat − (s.t.) in φ and λ (by a
/// nilpotent shift ε = η₁η₂) and in c and c̄ (by left derivatives) on every
/// interior slice, and compares with
///
/// * ∂/∂φ^a_k: ½(λ_{k−1} − λ_{k+1})_a − dt[λ_b ω^{bc} H_{ca} + i c̄_b ω^{bd} H_{dca} c^c]
/// * ∂/∂λ_{a,k}: ½(φ_{k+1} − φ_{k−1})^a − dt ω^{ab}∂_bH
/// * ∂/∂c̄_{a,k}: i[½(c_{k+1} − c_{k−1})^a − dt ω^{ab} H_{bc} c^c]
/// * ∂/∂c^a_k: i[½(c̄_{k+1} − c̄_{k−1})_a + dt c̄_b ω^{bd} H_{da}]
///
/// The first line carries the source term of the λ equation of motion.
pub fn lattice_euler_lagrange<C: Coefficient>(
    h: &dyn SuperspaceHamiltonian<C>,
    path: &LatticePath<C>,
) -> Result<EulerLagrangeReport, SuperspaceError> {
    let (e1, e2) = path.aux.ok_or(SuperspaceError::MissingAuxiliary)?;
    let alg = &path.algebra;
    let omega = path.omega;
    let d = omega.dim();
    let half = C::from_ratio(1, 2);
    let i = C::imag_unit();
    let reduced = |v: Option<Variation>| -> Result<GrassmannElement<C>, SuperspaceError> {
        let s = lattice_superaction_varied(h, path, v)?;
        Ok(berezin_reduce(&s)?.try_sub(&lattice_surface_term(path, v)?)?)
    };
    let epsilon_part = |e: &GrassmannElement<C>| -> Result<GrassmannElement<C>, SuperspaceError> {
        Ok(e.left_derivative(e1)?.left_derivative(e2)?)
    };
    let unvaried = reduced(None)?;
    let mut max_residual: f64 = 0.0;
    let mut checks = 0;
    for k in 1..path.steps() {
        let (prev, now, next) = (&path.slices[k - 1], &path.slices[k], &path.slices[k + 1]);
        let (_, g, hess) = h.jet2(&now.phi)?;
        let third = h.jet3(&now.phi)?;
        let (c_prev, c_now, c_next) = (path.c(k - 1)?, path.c(k)?, path.c(k + 1)?);
        let (cb_prev, cb_now, cb_next) = (path.cbar(k - 1)?, path.cbar(k)?, path.cbar(k + 1)?);
        for a in 0..d {
            // φ^a_k
            let mut expected = alg.scalar((prev.lambda[a].clone() - next.lambda[a].clone()) * half.clone());
            let mut source = alg.zero();
            for b in 0..d {
                let (c, s) = omega.partner(b);
                let w = C::from_i64(s);
                source = source.try_add(&alg.scalar(now.lambda[b].clone() * w.clone() * hess[c][a].clone()))?;
                for (cc, gc) in c_now.iter().enumerate() {
                    let t = third[c][cc][a].clone() * w.clone() * i.clone();
                    source = source.try_add(&cb_now[b].try_mul(gc)?.scale(&t))?;
                }
            }
            expected = expected.try_sub(&source.scale(&path.dt))?;
            let got = epsilon_part(&reduced(Some(Variation::Phi { slice: k, index: a }))?)?;
            max_residual = max_residual.max(got.distance(&expected)?);

            // λ_{a,k}
            let (b, s) = omega.partner(a);
            let expected = alg.scalar(
                (next.phi[a].clone() - prev.phi[a].clone()) * half.clone()
                    - path.dt.clone() * C::from_i64(s) * g[b].clone(),
            );
            let got = epsilon_part(&reduced(Some(Variation::Lambda { slice: k, index: a }))?)?;
            max_residual = max_residual.max(got.distance(&expected)?);

            // c̄_{a,k}
            let mut lin = alg.zero();
            for (cc, gc) in c_now.iter().enumerate() {
                lin = lin.try_add(&gc.scale(&(C::from_i64(s) * hess[b][cc].clone())))?;
            }
            let expected = c_next[a]
                .try_sub(&c_prev[a])?
                .scale(&half)
                .try_sub(&lin.scale(&path.dt))?
                .scale(&i);
            let got = unvaried.left_derivative(path.slices[k].cbar[a])?;
            max_residual = max_residual.max(got.distance(&expected)?);

            // c^a_k
            let mut lin = alg.zero();
            for bb in 0..d {
                let (dd, sb) = omega.partner(bb);
                lin = lin.try_add(&cb_now[bb].scale(&(C::from_i64(sb) * hess[dd][a].clone())))?;
            }
            let expected = cb_next[a]
                .try_sub(&cb_prev[a])?
                .scale(&half)
                .try_add(&lin.scale(&path.dt))?
                .scale(&i);
            let got = unvaried.left_derivative(path.slices[k].c[a])?;
            max_residual = max_residual.max(got.distance(&expected)?);
            checks += 4;
        }
    }
    Ok(EulerLagrangeReport { checks, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{Coefficient, Exact};
    use crate::superspace::poly::PolynomialHamiltonian;
    use crate::superspace::field::decompose;

    fn dt() -> Exact {
        Exact::from_ratio(1, 10)
    }

    #[test]
    fn table_layout() {
        let path = LatticePath::<Exact>::random(1, 8, dt(), 1, true).unwrap();
        assert_eq!(path.generator_count(), 2 + 4 * 9 + 2);
        let t = path.algebra().table();
        assert_eq!(t.name(path.slices[3].c[1]), Some("c^p_3"));
        assert_eq!(t.name(path.slices[3].cbar[0]), Some("c̄_q,3"));
        assert!(LatticePath::<Exact>::random(1, 0, dt(), 1, false).is_err());
    }

    #[test]
    fn bosonic_action_is_pure_base() {
        let h = PolynomialHamiltonian::quartic();
        let path = LatticePath::<Exact>::random(1, 4, dt(), 2, false).unwrap().without_ghosts().without_lambda();
        let s = lattice_superaction(&h, &path).unwrap();
        assert_eq!(s, path.algebra().scalar(classical_lattice_action(&h, &path).unwrap()));
    }

    #[test]
    fn one_slice_free_particle_identity() {
        let h = PolynomialHamiltonian::free();
        let path = LatticePath::<Exact>::random(1, 1, dt(), 3, false).unwrap();
        let s = lattice_superaction(&h, &path).unwrap();
        let top = decompose(&s).unwrap().top;
        let expected = tilde_lattice_action(&h, &path)
            .unwrap()
            .try_add(&lattice_surface_term(&path, None).unwrap())
            .unwrap()
            .scale(&Exact::imag_unit());
        assert_eq!(top, expected);
    }

    #[test]
    fn reduction_identity_small() {
        for h in [PolynomialHamiltonian::harmonic(), PolynomialHamiltonian::quartic()] {
            let path = LatticePath::<Exact>::random(1, 2, dt(), 4, false).unwrap();
            let s = lattice_superaction(&h, &path).unwrap();
            let residual = berezin_reduce(&s)
                .unwrap()
                .try_sub(&lattice_surface_term(&path, None).unwrap())
                .unwrap()
                .try_sub(&tilde_lattice_action(&h, &path).unwrap())
                .unwrap();
            assert!(residual.is_zero(), "{residual}");
        }
    }

    #[test]
    fn berezin_reduce_examples() {
        let path = LatticePath::<Exact>::random(1, 1, dt(), 5, false).unwrap();
        let alg = path.algebra();
        let x = alg.generator(path.slices[0].cbar[0]).unwrap() * alg.generator(path.slices[0].c[1]).unwrap();
        let th = alg.named("θ").unwrap();
        let thb = alg.named("θ̄").unwrap();
        let input = (th.clone() * thb.clone() * x.clone()).scale(&Exact::imag_unit());
        assert_eq!(berezin_reduce(&input).unwrap(), x);
        assert!(berezin_reduce(&(th + x)).unwrap().is_zero());
    }

    #[test]
    fn surface_term_examples() {
        let path = LatticePath::<Exact>::random(1, 1, dt(), 6, false).unwrap().without_ghosts();
        let alg = path.algebra();
        let b = |l: [i64; 2], p: [i64; 2]| Boundary {
            phi: lift(alg, &[Exact::from_i64(p[0]), Exact::from_i64(p[1])]),
            lambda: lift(alg, &[Exact::from_i64(l[0]), Exact::from_i64(l[1])]),
            c: vec![alg.zero(), alg.zero()],
            cbar: vec![alg.zero(), alg.zero()],
        };
        let same = surface_term(&b([1, 2], [3, 4]), &b([1, 2], [3, 4])).unwrap();
        assert!(same.is_zero());
        // λ·φ = 2 initially and 4 finally
        let st = surface_term(&b([1, 0], [2, 0]), &b([2, 0], [2, 0])).unwrap();
        assert_eq!(st, alg.scalar(Exact::from_i64(-1)));
    }

    #[test]
    fn projector_examples() {
        let path = LatticePath::<Exact>::random(1, 1, dt(), 7, false).unwrap();
        let alg = path.algebra();
        let sigma = alg.scalar(Exact::from_i64(3)) + alg.named("θ").unwrap() * alg.generator(2).unwrap();
        assert_eq!(quantize_projector(&sigma, &Exact::one()).unwrap(), Exact::from_i64(3));
        assert_eq!(quantize_projector(&sigma, &Exact::from_ratio(1, 2)).unwrap(), Exact::from_i64(6));
        assert!(matches!(
            quantize_projector(&sigma, &Exact::zero()),
            Err(SuperspaceError::InvalidHbar(_))
        ));
        let ghosty = alg.generator(2).unwrap() * alg.generator(3).unwrap();
        assert!(matches!(quantize_projector(&ghosty, &Exact::one()), Err(SuperspaceError::GhostContent)));
        let h = PolynomialHamiltonian::free();
        let s = lattice_superaction(&h, &path).unwrap();
        let expected = classical_lattice_action(&h, &path).unwrap() / Exact::from_ratio(1, 2);
        assert_eq!(quantize_projector(&s, &Exact::from_ratio(1, 2)).unwrap(), expected);
    }

    #[test]
    fn euler_lagrange_small_lattice() {
        let h = PolynomialHamiltonian::quartic();
        let path = LatticePath::<Exact>::random(1, 3, dt(), 8, true).unwrap();
        let r = lattice_euler_lagrange(&h, &path).unwrap();
        assert_eq!(r.checks, 2 * 2 * 4);
        assert_eq!(r.max_residual, 0.0);
        let no_aux = LatticePath::<Exact>::random(1, 3, dt(), 8, false).unwrap();
        assert!(matches!(lattice_euler_lagrange(&h, &no_aux), Err(SuperspaceError::MissingAuxiliary)));
    }
}
