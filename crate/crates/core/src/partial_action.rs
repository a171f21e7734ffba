//! Twisted partial actions of finite groups on finite sets, their
//! transformation groupoids with the induced cocycle σ_u, the ℓ¹
//! crossed product, the embedding into the groupoid convolution algebra,
//! and the induced twisted action of Exel's semigroup S(G).

use crate::algebra::{AlgElement, Carrier};
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::scalar::{Rational, Scalar};
use crate::semigroup::{exel_semigroup, ExelSemigroup, GroupTable, PartialBijection, SemigroupAction};
use crate::twist::{Cocycle, TwistedAction};
use num_traits::Zero;
use std::sync::Arc;

/// A partial action θ of a finite group: partial bijections
/// θ_t : X_{t⁻¹} → X_t with θ_1 = id, θ_{t⁻¹} = θ_t⁻¹, and θ_{ts}
/// extending θ_t ∘ θ_s.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialAction {
    pub group: GroupTable,
    pub ground: usize,
    pub theta: Vec<PartialBijection>,
}

impl PartialAction {
    pub fn validate(
        group: GroupTable,
        ground: usize,
        theta: Vec<PartialBijection>,
    ) -> Result<Self> {
        if theta.len() != group.order() {
            return Err(Error::Domain("one partial bijection per group element".into()));
        }
        if theta.iter().any(|m| m.ground() != ground) {
            return Err(Error::Domain("maps on different ground sets".into()));
        }
        if theta[group.unit()] != PartialBijection::identity(ground) {
            return Err(Error::Axiom("θ_1 is not the identity".into()));
        }
        for t in 0..group.order() {
            if theta[group.inv(t)] != theta[t].inverse() {
                return Err(Error::Axiom(format!(
                    "θ_{} is not the inverse of θ_{}",
                    group.label(group.inv(t)),
                    group.label(t)
                )));
            }
        }
        for t in 0..group.order() {
            for s in 0..group.order() {
                let ts = group.mul(t, s);
                let comp = theta[t].compose(&theta[s]);
                if !theta[ts].extends(&comp) {
                    return Err(Error::Axiom(format!(
                        "θ_({}·{}) does not extend θ_{} ∘ θ_{}",
                        group.label(t),
                        group.label(s),
                        group.label(t),
                        group.label(s)
                    )));
                }
            }
        }
        Ok(PartialAction {
            group,
            ground,
            theta,
        })
    }

    /// A global action of the group (every θ_t total).
    pub fn global(group: GroupTable, perms: Vec<PartialBijection>) -> Result<Self> {
        let ground = perms.first().map(|p| p.ground()).unwrap_or(0);
        PartialAction::validate(group, ground, perms)
    }

    /// The domain X_t (range of θ_t).
    pub fn domain_of(&self, t: usize) -> Vec<usize> {
        self.theta[t].range()
    }

    pub fn apply(&self, t: usize, x: usize) -> Option<usize> {
        self.theta[t].apply(x)
    }
}

/// A twist of a partial action: unimodular functions u(s, t) on
/// X_s ∩ X_{st} with u(1, t) = u(t, 1) = 1 and the associativity-type
/// identity α_r(a·u(s,t))·u(r,st) = α_r(a)·u(r,s)·u(rs,t).
#[derive(Clone, Debug)]
pub struct PartialTwist {
    u: Vec<Vec<Scalar>>,
}

impl PartialTwist {
    pub fn trivial(pa: &PartialAction) -> Self {
        let n = pa.group.order();
        let mut u = vec![vec![Scalar::zero(); pa.ground]; n * n];
        for s in 0..n {
            for t in 0..n {
                let st = pa.group.mul(s, t);
                let xs = pa.domain_of(s);
                for x in pa.domain_of(st) {
                    if xs.contains(&x) {
                        u[s * n + t][x] = Scalar::one();
                    }
                }
            }
        }
        PartialTwist { u }
    }

    pub fn validate(pa: &PartialAction, u: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = pa.group.order();
        if u.len() != n * n || u.iter().any(|f| f.len() != pa.ground) {
            return Err(Error::Domain("twist table shape mismatch".into()));
        }
        let tw = PartialTwist { u };
        let unit = pa.group.unit();
        // support and unimodularity on X_s ∩ X_{st}
        for s in 0..n {
            let xs = pa.domain_of(s);
            for t in 0..n {
                let st = pa.group.mul(s, t);
                let xst = pa.domain_of(st);
                for x in 0..pa.ground {
                    let inside = xs.contains(&x) && xst.contains(&x);
                    let v = &tw.u(s, t, n)[x];
                    if inside && !v.is_unimodular() {
                        return Err(Error::Axiom(format!(
                            "u({}, {}) not unimodular at {}",
                            pa.group.label(s),
                            pa.group.label(t),
                            x
                        )));
                    }
                    if !inside && !v.is_zero() {
                        return Err(Error::Axiom(format!(
                            "u({}, {}) supported outside X_s ∩ X_st at {}",
                            pa.group.label(s),
                            pa.group.label(t),
                            x
                        )));
                    }
                }
            }
        }
        // u(1, t) = u(t, 1) = 1
        for t in 0..n {
            for x in pa.domain_of(t) {
                if !tw.u(unit, t, n)[x].is_one() || !tw.u(t, unit, n)[x].is_one() {
                    return Err(Error::Axiom(format!(
                        "u is not normalized at {} and the unit",
                        pa.group.label(t)
                    )));
                }
            }
        }
        // the twist identity, pointwise: for y ∈ X_r with
        // x = θ_{r⁻¹}(y) ∈ X_{r⁻¹} ∩ X_s ∩ X_{st}:
        // u(s,t)(x)·u(r,st)(y) = u(r,s)(y)·u(rs,t)(y)
        for r in 0..n {
            for s in 0..n {
                for t in 0..n {
                    let st = pa.group.mul(s, t);
                    let rs = pa.group.mul(r, s);
                    let xs = pa.domain_of(s);
                    let xst = pa.domain_of(st);
                    for x in pa.theta[r].domain() {
                        if !xs.contains(&x) || !xst.contains(&x) {
                            continue;
                        }
                        let y = pa.theta[r].apply(x).unwrap();
                        let lhs = &tw.u(s, t, n)[x] * &tw.u(r, st, n)[y];
                        let rhs = &tw.u(r, s, n)[y] * &tw.u(rs, t, n)[y];
                        if lhs != rhs {
                            return Err(Error::Axiom(format!(
                                "twist identity fails at (r, s, t, x) = ({}, {}, {}, {})",
                                pa.group.label(r),
                                pa.group.label(s),
                                pa.group.label(t),
                                x
                            )));
                        }
                    }
                }
            }
        }
        Ok(tw)
    }

    fn u(&self, s: usize, t: usize, n: usize) -> &[Scalar] {
        &self.u[s * n + t]
    }

    /// The dense table, indexed s·|G| + t, for adjustment and re-validation.
    pub fn raw(&self) -> &[Vec<Scalar>] {
        &self.u
    }

    pub fn value(&self, pa: &PartialAction, s: usize, t: usize, x: usize) -> &Scalar {
        &self.u[s * pa.group.order() + t][x]
    }
}

/// The transformation groupoid G_θ with arrows ⊔_t {t} × X_{t⁻¹} and the
/// cocycle σ_u((s, θ_t(x)), (t, x)) = u(s, t)(θ_{st}(x)).
#[derive(Clone, Debug)]
pub struct PartialActionGroupoid {
    pub groupoid: FiniteGroupoid,
    /// arrow -> (t, x) with x ∈ X_{t⁻¹}
    pub arrows: Vec<(usize, usize)>,
    pub cocycle: Cocycle,
}

pub fn partial_action_groupoid(
    pa: &PartialAction,
    tw: &PartialTwist,
) -> Result<PartialActionGroupoid> {
    let n = pa.group.order();
    let unit = pa.group.unit();
    let mut arrows: Vec<(usize, usize)> = Vec::new();
    for t in 0..n {
        for x in pa.theta[t].domain() {
            arrows.push((t, x));
        }
    }
    let id_of = |t: usize, x: usize| -> usize {
        arrows.iter().position(|&a| a == (t, x)).unwrap()
    };
    let m = arrows.len();
    let mut range = vec![0; m];
    let mut domain = vec![0; m];
    let mut inverse = vec![0; m];
    for (i, &(t, x)) in arrows.iter().enumerate() {
        let y = pa.theta[t].apply(x).unwrap();
        range[i] = id_of(unit, y);
        domain[i] = id_of(unit, x);
        inverse[i] = id_of(pa.group.inv(t), y);
    }
    let mut compose = Vec::new();
    for (i, &(s, y)) in arrows.iter().enumerate() {
        for (j, &(t, x)) in arrows.iter().enumerate() {
            if pa.theta[t].apply(x) == Some(y) {
                let st = pa.group.mul(s, t);
                compose.push((i, j, id_of(st, x)));
            }
        }
    }
    let labels = arrows
        .iter()
        .map(|&(t, x)| format!("({},x{})", pa.group.label(t), x))
        .collect();
    let groupoid =
        FiniteGroupoid::validate(m, range, domain, inverse, compose)?.with_labels(labels);
    let cocycle = Cocycle::new(&groupoid, |i, j| {
        let (s, _) = arrows[i];
        let (t, x) = arrows[j];
        let st = pa.group.mul(s, t);
        let z = pa.theta[st].apply(x).expect("composable arrows");
        tw.value(pa, s, t, z).clone()
    })?;
    Ok(PartialActionGroupoid {
        groupoid,
        arrows,
        cocycle,
    })
}

/// An element of the ℓ¹ crossed product: one function per group element,
/// supported on X_t.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement {
    pub f: Vec<Vec<Scalar>>,
}

impl CrossedElement {
    pub fn zero(pa: &PartialAction) -> Self {
        CrossedElement {
            f: vec![vec![Scalar::zero(); pa.ground]; pa.group.order()],
        }
    }

    pub fn delta(pa: &PartialAction, t: usize) -> Result<Self> {
        let mut e = CrossedElement::zero(pa);
        for x in pa.domain_of(t) {
            e.f[t][x] = Scalar::one();
        }
        Ok(e)
    }

    pub fn check_support(&self, pa: &PartialAction) -> Result<()> {
        for t in 0..pa.group.order() {
            let xt = pa.domain_of(t);
            for x in 0..pa.ground {
                if !self.f[t][x].is_zero() && !xt.contains(&x) {
                    return Err(Error::Domain(format!(
                        "support leaves X_t at (t, x) = ({}, {})",
                        pa.group.label(t),
                        x
                    )));
                }
            }
        }
        Ok(())
    }

    /// The ℓ¹ norm Σ_t ‖f(t)‖_∞.
    pub fn l1_norm(&self) -> f64 {
        self.f
            .iter()
            .map(|ft| ft.iter().map(|v| v.abs()).fold(0.0, f64::max))
            .sum()
    }

    pub fn l1_norm_exact(&self) -> Option<Rational> {
        let mut acc = Rational::zero();
        for ft in &self.f {
            let mut best = Rational::zero();
            for v in ft {
                let a = v.abs_exact()?;
                if a > best {
                    best = a;
                }
            }
            acc += best;
        }
        Some(acc)
    }
}

/// (f * g)(r) = Σ_{st = r} α_s(α_{s⁻¹}(f(s))·g(t))·u(s, t), pointwise:
/// the (s, t) term at y ∈ X_s is f(s)(y)·g(t)(θ_{s⁻¹}(y))·u(s,t)(y).
pub fn crossed_convolve(
    pa: &PartialAction,
    tw: &PartialTwist,
    f: &CrossedElement,
    g: &CrossedElement,
) -> Result<CrossedElement> {
    f.check_support(pa)?;
    g.check_support(pa)?;
    let n = pa.group.order();
    let mut out = CrossedElement::zero(pa);
    for s in 0..n {
        for t in 0..n {
            let r = pa.group.mul(s, t);
            for y in pa.domain_of(s) {
                if f.f[s][y].is_zero() {
                    continue;
                }
                let x = pa.theta[pa.group.inv(s)].apply(y).unwrap();
                if g.f[t][x].is_zero() {
                    continue;
                }
                let term = &(&f.f[s][y] * &g.f[t][x]) * tw.value(pa, s, t, y);
                out.f[r][y] = &out.f[r][y] + &term;
            }
        }
    }
    out.check_support(pa)?;
    Ok(out)
}

/// f*(t) = α_t(f(t⁻¹)^*)·u(t, t⁻¹)^*, pointwise
/// conj(f(t⁻¹)(θ_{t⁻¹}(y)))·conj(u(t, t⁻¹)(y)) at y ∈ X_t.
pub fn crossed_involute(
    pa: &PartialAction,
    tw: &PartialTwist,
    f: &CrossedElement,
) -> Result<CrossedElement> {
    f.check_support(pa)?;
    let n = pa.group.order();
    let mut out = CrossedElement::zero(pa);
    for t in 0..n {
        let ti = pa.group.inv(t);
        for y in pa.domain_of(t) {
            let x = pa.theta[ti].apply(y).unwrap();
            out.f[t][y] = &f.f[ti][x].conj() * &tw.value(pa, t, ti, y).conj();
        }
    }
    Ok(out)
}

/// The embedding into the convolution algebra of (G_θ, σ_u):
/// f̂(t, x) := f(t)(θ_t(x)).
pub fn embed_into_groupoid_algebra(
    pa: &PartialAction,
    pag: &PartialActionGroupoid,
    carrier: &Arc<Carrier>,
    f: &CrossedElement,
) -> Result<AlgElement> {
    f.check_support(pa)?;
    let mut out = AlgElement::zero(carrier.clone());
    for (i, &(t, x)) in pag.arrows.iter().enumerate() {
        let y = pa.theta[t].apply(x).unwrap();
        out.set_coeff(i, f.f[t][y].clone());
    }
    Ok(out)
}

/// The induced twisted action ([θ], [u]) of Exel's semigroup S(G):
/// for t̄ = (A, g), the map is θ_g restricted to ∩_{k ∈ g⁻¹A} X_k, and
/// [u]((A, g), (B, h)) is u(g, h) restricted to X_{(A,g)(B,h)}.
pub fn induced_exel_action(
    pa: &PartialAction,
    tw: &PartialTwist,
    exel: &ExelSemigroup,
) -> Result<TwistedAction> {
    let s = &exel.semigroup;
    let n = s.len();
    let group = &pa.group;
    let mut maps = Vec::with_capacity(n);
    for i in 0..n {
        let (mask, g) = exel.elements[i];
        // domain of [θ]_(A,g) is ∩_{k ∈ (g⁻¹A)} X_k
        let star_mask = {
            let gi = group.inv(g);
            let mut out = 0u64;
            for k in 0..group.order() {
                if mask & (1 << k) != 0 {
                    out |= 1 << group.mul(gi, k);
                }
            }
            out
        };
        let mut pairs = Vec::new();
        'points: for x in pa.theta[g].domain() {
            for k in 0..group.order() {
                if star_mask & (1 << k) != 0 && !pa.domain_of(k).contains(&x) {
                    continue 'points;
                }
            }
            pairs.push((x, pa.theta[g].apply(x).unwrap()));
        }
        maps.push(PartialBijection::from_pairs(pa.ground, &pairs)?);
    }
    let action = SemigroupAction {
        semigroup: s.clone(),
        ground: pa.ground,
        maps,
    };
    action.validate()?;
    let mut u = vec![vec![Scalar::zero(); pa.ground]; n * n];
    for i in 0..n {
        let (_, g) = exel.elements[i];
        for j in 0..n {
            let (_, h) = exel.elements[j];
            let ij = s.mul(i, j);
            for x in action.maps[ij].range() {
                u[i * n + j][x] = tw.value(pa, g, h, x).clone();
            }
        }
    }
    let ta = TwistedAction::new(action, u)?;
    let report = ta.validate();
    if !report.all_pass() {
        let fail = report.first_failure().unwrap();
        return Err(Error::Axiom(format!(
            "induced Exel action violates {}: {}",
            fail.name,
            fail.witness.clone().unwrap_or_default()
        )));
    }
    Ok(ta)
}

pub fn exel_of(pa: &PartialAction) -> Result<ExelSemigroup> {
    exel_semigroup(&pa.group)
}
