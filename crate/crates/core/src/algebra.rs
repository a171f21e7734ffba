//! The twisted convolution *-algebra of a finite groupoid: finitely
//! supported scalar coefficient maps on arrows relative to a fixed
//! 2-cocycle, with convolution, involution, the four norms (sup, d*, r*,
//! I) and the decomposition (projective) norm as an exact rational
//! linear program, and the passage to the opposite algebra.

use crate::error::{Error, Result};
use crate::groupoid::{Bisection, FiniteGroupoid};
use crate::scalar::{Rational, Scalar};
use crate::simplex::{self, Constraint, Lp, Rel};
use crate::twist::Cocycle;
use num_traits::Zero;
use std::sync::Arc;

/// The ambient pair (groupoid, twist) of an algebra element.
#[derive(Debug, PartialEq)]
pub struct Carrier {
    pub groupoid: FiniteGroupoid,
    pub cocycle: Cocycle,
}

impl Carrier {
    pub fn new(groupoid: FiniteGroupoid, cocycle: Cocycle) -> Result<Arc<Self>> {
        cocycle.check_carrier(&groupoid)?;
        Ok(Arc::new(Carrier { groupoid, cocycle }))
    }

    pub fn untwisted(groupoid: FiniteGroupoid) -> Arc<Self> {
        let cocycle = Cocycle::trivial(&groupoid);
        Arc::new(Carrier { groupoid, cocycle })
    }

    /// The opposite carrier: same groupoid, opposite twist.
    pub fn opposite(self: &Arc<Self>) -> Arc<Self> {
        Arc::new(Carrier {
            groupoid: self.groupoid.clone(),
            cocycle: self.cocycle.opposite(&self.groupoid),
        })
    }
}

fn same_carrier(a: &Arc<Carrier>, b: &Arc<Carrier>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Clone, Debug)]
pub struct AlgElement {
    carrier: Arc<Carrier>,
    coeff: Vec<Scalar>,
}

impl PartialEq for AlgElement {
    fn eq(&self, other: &Self) -> bool {
        same_carrier(&self.carrier, &other.carrier) && self.coeff == other.coeff
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    Sup,
    DStar,
    RStar,
    INorm,
}

impl AlgElement {
    pub fn zero(carrier: Arc<Carrier>) -> Self {
        let n = carrier.groupoid.arrows();
        AlgElement {
            carrier,
            coeff: vec![Scalar::zero(); n],
        }
    }

    pub fn from_coeffs(carrier: Arc<Carrier>, coeff: Vec<Scalar>) -> Result<Self> {
        if coeff.len() != carrier.groupoid.arrows() {
            return Err(Error::Domain("coefficient count mismatch".into()));
        }
        Ok(AlgElement { carrier, coeff })
    }

    pub fn delta(carrier: Arc<Carrier>, arrow: usize) -> Self {
        let mut e = AlgElement::zero(carrier);
        e.coeff[arrow] = Scalar::one();
        e
    }

    /// The multiplicative unit 1_X (indicator of the unit space).
    pub fn unit(carrier: Arc<Carrier>) -> Self {
        let mut e = AlgElement::zero(carrier.clone());
        for &u in carrier.groupoid.units() {
            e.coeff[u] = Scalar::one();
        }
        e
    }

    /// Indicator of a set of unit-space points (by unit position).
    pub fn unit_indicator(carrier: Arc<Carrier>, points: &[usize]) -> Self {
        let mut e = AlgElement::zero(carrier.clone());
        for &p in points {
            let u = carrier.groupoid.unit_at(p);
            e.coeff[u] = Scalar::one();
        }
        e
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.carrier.groupoid
    }

    pub fn coeff(&self, arrow: usize) -> &Scalar {
        &self.coeff[arrow]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeff
    }

    pub fn set_coeff(&mut self, arrow: usize, v: Scalar) {
        self.coeff[arrow] = v;
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeff.len())
            .filter(|&a| !self.coeff[a].is_zero())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|c| c.is_zero())
    }

    pub fn is_exact(&self) -> bool {
        self.coeff.iter().all(|c| c.is_exact())
    }

    pub fn is_real(&self) -> bool {
        self.coeff.iter().all(|c| c.is_real())
    }

    pub fn add(&self, other: &AlgElement) -> Result<AlgElement> {
        self.check_carrier(other)?;
        Ok(AlgElement {
            carrier: self.carrier.clone(),
            coeff: self
                .coeff
                .iter()
                .zip(&other.coeff)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &AlgElement) -> Result<AlgElement> {
        self.check_carrier(other)?;
        Ok(AlgElement {
            carrier: self.carrier.clone(),
            coeff: self
                .coeff
                .iter()
                .zip(&other.coeff)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: &Scalar) -> AlgElement {
        AlgElement {
            carrier: self.carrier.clone(),
            coeff: self.coeff.iter().map(|c| s * c).collect(),
        }
    }

    fn check_carrier(&self, other: &AlgElement) -> Result<()> {
        if !same_carrier(&self.carrier, &other.carrier) {
            return Err(Error::CarrierMismatch(
                "elements live on different twisted groupoids".into(),
            ));
        }
        Ok(())
    }

    /// (f*g)(γ) = Σ_{r(η) = r(γ)} σ(η, η⁻¹γ)·f(η)·g(η⁻¹γ); exact on
    /// exact inputs.
    pub fn convolve(&self, other: &AlgElement) -> Result<AlgElement> {
        self.check_carrier(other)?;
        let g = &self.carrier.groupoid;
        let sigma = &self.carrier.cocycle;
        let fibers = g.range_fibers();
        let mut out = AlgElement::zero(self.carrier.clone());
        for gamma in 0..g.arrows() {
            let fiber = &fibers[g.unit_pos(g.r(gamma)).unwrap()];
            let mut acc = Scalar::zero();
            for &eta in fiber {
                if self.coeff[eta].is_zero() {
                    continue;
                }
                let rest = g.compose(g.inv(eta), gamma).expect("r(η) = r(γ)");
                if other.coeff[rest].is_zero() {
                    continue;
                }
                let tw = sigma.value(eta, rest);
                acc = &acc + &(&(tw * &self.coeff[eta]) * &other.coeff[rest]);
            }
            out.coeff[gamma] = acc;
        }
        Ok(out)
    }

    /// f*(γ) = conj(σ(γ, γ⁻¹))·conj(f(γ⁻¹)).
    pub fn involute(&self) -> AlgElement {
        let g = &self.carrier.groupoid;
        let sigma = &self.carrier.cocycle;
        let coeff = (0..g.arrows())
            .map(|gamma| {
                let tw = sigma.value(gamma, g.inv(gamma));
                &tw.conj() * &self.coeff[g.inv(gamma)].conj()
            })
            .collect();
        AlgElement {
            carrier: self.carrier.clone(),
            coeff,
        }
    }

    /// f̌(γ) = f(γ⁻¹), an element of the opposite-twist algebra.
    pub fn opposite(&self, op_carrier: &Arc<Carrier>) -> Result<AlgElement> {
        if !same_carrier(&self.carrier.opposite(), op_carrier) {
            return Err(Error::CarrierMismatch(
                "target carrier is not the opposite twist".into(),
            ));
        }
        let g = &self.carrier.groupoid;
        let coeff = (0..g.arrows()).map(|a| self.coeff[g.inv(a)].clone()).collect();
        Ok(AlgElement {
            carrier: op_carrier.clone(),
            coeff,
        })
    }

    /// The four closed-form norms, as floats.
    pub fn norm(&self, kind: NormKind) -> f64 {
        let g = &self.carrier.groupoid;
        match kind {
            NormKind::Sup => self.coeff.iter().map(|c| c.abs()).fold(0.0, f64::max),
            NormKind::DStar => fiber_sums(g.domain_fibers(), &self.coeff),
            NormKind::RStar => fiber_sums(g.range_fibers(), &self.coeff),
            NormKind::INorm => self
                .norm(NormKind::DStar)
                .max(self.norm(NormKind::RStar)),
        }
    }

    /// Exact rational value of a closed-form norm when every |f(γ)| is
    /// an exact rational (real or purely imaginary exact entries, or
    /// perfect-square moduli).
    pub fn norm_exact(&self, kind: NormKind) -> Option<Rational> {
        let g = &self.carrier.groupoid;
        let abs: Option<Vec<Rational>> = self.coeff.iter().map(|c| c.abs_exact()).collect();
        let abs = abs?;
        let fiber_max = |fibers: Vec<Vec<usize>>| -> Rational {
            fibers
                .into_iter()
                .map(|f| f.into_iter().map(|a| abs[a].clone()).sum::<Rational>())
                .max()
                .unwrap_or_else(Rational::zero)
        };
        Some(match kind {
            NormKind::Sup => abs.into_iter().max().unwrap_or_else(Rational::zero),
            NormKind::DStar => fiber_max(g.domain_fibers()),
            NormKind::RStar => fiber_max(g.range_fibers()),
            NormKind::INorm => {
                let d = fiber_max(g.domain_fibers());
                let r = fiber_max(g.range_fibers());
                d.max(r)
            }
        })
    }

    /// The projective norm ‖f‖_max^S over a covering family of
    /// bisections, by exact rational simplex. Real exact elements only.
    /// Returns the optimum and an optimal decomposition f = Σ_U f_U with
    /// supp f_U ⊆ U.
    pub fn norm_projective(
        &self,
        family: &[Bisection],
    ) -> Result<(Rational, Vec<(usize, AlgElement)>)> {
        if !self.is_exact() {
            return Err(Error::Unsupported(
                "projective norm needs exact coefficients".into(),
            ));
        }
        if !self.is_real() {
            return Err(Error::Unsupported(
                "projective norm in complex mode is out of scope (second-order cone)".into(),
            ));
        }
        let supp = self.support();
        for &a in &supp {
            if !family.iter().any(|u| u.contains(a)) {
                return Err(Error::Infeasible(format!(
                    "support arrow {} not covered by the bisection family",
                    self.groupoid().label(a)
                )));
            }
        }
        if supp.is_empty() {
            return Ok((Rational::zero(), Vec::new()));
        }
        // one piece per bisection: merging pieces on the same U never
        // increases the cost, so variables are x⁺, x⁻ per (U, γ) and a
        // bound t_U per bisection
        let used: Vec<usize> = (0..family.len())
            .filter(|&ui| supp.iter().any(|&a| family[ui].contains(a)))
            .collect();
        let mut pair_vars: Vec<(usize, usize)> = Vec::new(); // (ui, arrow)
        for &ui in &used {
            for &a in &supp {
                if family[ui].contains(a) {
                    pair_vars.push((ui, a));
                }
            }
        }
        let np = pair_vars.len();
        // variable layout: [x⁺ (np) | x⁻ (np) | t (used.len())]
        let t_var = |k: usize| 2 * np + k;
        let mut objective = vec![Rational::zero(); 2 * np + used.len()];
        for k in 0..used.len() {
            objective[t_var(k)] = Rational::from_integer(1.into());
        }
        let mut constraints = Vec::new();
        for &a in &supp {
            let mut terms = Vec::new();
            for (v, &(_, arrow)) in pair_vars.iter().enumerate() {
                if arrow == a {
                    terms.push((v, Rational::from_integer(1.into())));
                    terms.push((np + v, Rational::from_integer((-1).into())));
                }
            }
            constraints.push(Constraint {
                terms,
                rel: Rel::Eq,
                rhs: self.coeff[a].re_exact().unwrap().clone(),
            });
        }
        for (v, &(ui, _)) in pair_vars.iter().enumerate() {
            let k = used.iter().position(|&u| u == ui).unwrap();
            constraints.push(Constraint {
                terms: vec![
                    (v, Rational::from_integer(1.into())),
                    (np + v, Rational::from_integer(1.into())),
                    (t_var(k), Rational::from_integer((-1).into())),
                ],
                rel: Rel::Le,
                rhs: Rational::zero(),
            });
        }
        let lp = Lp {
            num_vars: 2 * np + used.len(),
            objective,
            constraints,
        };
        let sol = simplex::solve(&lp)?;
        let mut pieces = Vec::new();
        for (k, &ui) in used.iter().enumerate() {
            if sol.x[t_var(k)].is_zero() {
                continue;
            }
            let mut piece = AlgElement::zero(self.carrier.clone());
            for (v, &(uj, arrow)) in pair_vars.iter().enumerate() {
                if uj == ui {
                    let val = &sol.x[v] - &sol.x[np + v];
                    piece.coeff[arrow] = Scalar::from_rational(val);
                }
            }
            if !piece.is_zero() {
                pieces.push((ui, piece));
            }
        }
        Ok((sol.value, pieces))
    }
}

fn fiber_sums(fibers: Vec<Vec<usize>>, coeff: &[Scalar]) -> f64 {
    fibers
        .into_iter()
        .map(|f| f.into_iter().map(|a| coeff[a].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
