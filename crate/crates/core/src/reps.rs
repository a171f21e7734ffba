//! Representations on finite weighted ℓ^p spaces: spatial partial
//! isometries ωU_Φ and their calculus, L^p-projections, the regular
//! representation Λ_p of the twisted convolution algebra, covariant
//! representations with integration and disintegration over a modeled
//! twisted groupoid, inclusion–exclusion idempotents, joint
//! F-contractivity, and tightness of semigroup representations.

use crate::algebra::{AlgElement, Carrier};
use crate::error::{Error, Result};
use crate::groupoid::{bisection_semigroup, singleton_bisections, FiniteGroupoid};
use crate::matrix::Matrix;
use crate::opnorm::{opnorm_bracket, opnorm_exact};
use crate::scalar::{Exponent, Scalar};
use crate::semigroup::{ISemigroup, PartialBijection};
use crate::semilattice::FiniteSemilattice;
use crate::space::{weighted_conjugate, WeightedSpace};
use crate::twist::{model_twisted_action, Cocycle, ModeledGroupoid, Sections, TwistedAction};
use crate::twist::extract_twisted_action;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const FLOAT_TOL: f64 = 1e-9;

/// The concrete ωU_Φ: a weighted space, a partial point bijection
/// φ : D* → D, and a unimodular phase on the range D. It acts by
/// (ωU_Φ ξ)(x) = ω(x)·(w(φ*(x))/w(x))^{1/p}·ξ(φ*(x)) for x ∈ D.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialPartialIsometry {
    space: WeightedSpace,
    map: PartialBijection,
    phase: Vec<Scalar>,
}

impl SpatialPartialIsometry {
    pub fn new(space: WeightedSpace, map: PartialBijection, phase: Vec<Scalar>) -> Result<Self> {
        if map.ground() != space.dim() || phase.len() != space.dim() {
            return Err(Error::Domain("dimension mismatch".into()));
        }
        let ran = map.range();
        for x in 0..space.dim() {
            if ran.contains(&x) {
                if !phase[x].is_unimodular() {
                    return Err(Error::Domain(format!(
                        "phase at point {} is not unimodular",
                        x
                    )));
                }
            } else if !phase[x].is_zero() {
                return Err(Error::Domain(format!(
                    "phase supported off the range at point {}",
                    x
                )));
            }
        }
        Ok(SpatialPartialIsometry { space, map, phase })
    }

    pub fn identity(space: WeightedSpace) -> Self {
        let n = space.dim();
        SpatialPartialIsometry {
            space,
            map: PartialBijection::identity(n),
            phase: vec![Scalar::one(); n],
        }
    }

    /// Multiplication by the indicator of a set (the idempotents).
    pub fn indicator(space: WeightedSpace, set: &[usize]) -> Self {
        let n = space.dim();
        let mut phase = vec![Scalar::zero(); n];
        for &x in set {
            phase[x] = Scalar::one();
        }
        SpatialPartialIsometry {
            space,
            map: PartialBijection::identity_on(n, set),
            phase,
        }
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    pub fn point_map(&self) -> &PartialBijection {
        &self.map
    }

    pub fn domain(&self) -> Vec<usize> {
        self.map.domain()
    }

    pub fn range(&self) -> Vec<usize> {
        self.map.range()
    }

    /// The matrix in point coordinates: M[x, y] = ω(x)·(w(y)/w(x))^{1/p}
    /// for y = φ*(x); exact when all needed roots are exact.
    pub fn matrix(&self) -> Matrix {
        let n = self.space.dim();
        let mut entries: Vec<(usize, usize, Scalar)> = Vec::new();
        let mut all_exact = true;
        for y in self.map.domain() {
            let x = self.map.apply(y).unwrap();
            let rn = self.space.rn_factor(y, x);
            let v = &self.phase[x] * &rn;
            if !v.is_exact() {
                all_exact = false;
            }
            entries.push((x, y, v));
        }
        let mut m = Matrix::zero(n, n);
        for (x, y, v) in entries {
            let v = if all_exact { v } else { v.as_float() };
            m.set(x, y, v);
        }
        if all_exact {
            m
        } else {
            m.to_float()
        }
    }

    /// Composition law ωU_Φ ∘ υU_Ψ = ω·T_Φ(υ)·U_{Φ∘Ψ}.
    pub fn compose(&self, other: &SpatialPartialIsometry) -> Result<SpatialPartialIsometry> {
        if self.space != other.space {
            return Err(Error::CarrierMismatch(
                "spatial partial isometries on different spaces".into(),
            ));
        }
        let map = self.map.compose(&other.map);
        let phi_star = self.map.inverse();
        let n = self.space.dim();
        let mut phase = vec![Scalar::zero(); n];
        for &x in &map.range() {
            let mid = phi_star.apply(x).expect("x in ran(Φ∘Ψ) ⊆ ran Φ");
            phase[x] = &self.phase[x] * &other.phase[mid];
        }
        SpatialPartialIsometry::new(self.space.clone(), map, phase)
    }

    /// (ωU_Φ)* = T_{Φ*}(conj ω)·U_{Φ*}.
    pub fn star(&self) -> SpatialPartialIsometry {
        let map = self.map.inverse();
        let n = self.space.dim();
        let mut phase = vec![Scalar::zero(); n];
        for &y in &map.range() {
            let x = self.map.apply(y).expect("y in dom Φ");
            phase[y] = self.phase[x].conj();
        }
        SpatialPartialIsometry {
            space: self.space.clone(),
            map,
            phase,
        }
    }
}

/// Structural/definitional L^p-projection test. For p ≠ 2 an idempotent
/// is an L^p-projection iff its unweighted conjugate is a 0/1 diagonal;
/// this is cross-checked definitionally on all basis vectors and 100
/// random vectors, and the two verdicts must agree. For p = 2 the
/// definitional (orthogonal projection) test decides.
pub fn is_lp_projection(p_mat: &Matrix, space: &WeightedSpace) -> Result<bool> {
    if !p_mat.is_square() || p_mat.rows() != space.dim() {
        return Err(Error::Domain("projection/space dimension mismatch".into()));
    }
    let idempotent = if p_mat.is_exact() {
        p_mat.is_idempotent()
    } else {
        (&(p_mat * p_mat) - p_mat).max_abs() <= FLOAT_TOL
    };
    if !idempotent {
        return Err(Error::Domain("matrix is not idempotent".into()));
    }
    let definitional = definitional_lp_projection(p_mat, space);
    match space.exponent() {
        Exponent::Finite(q) if q.to_string() == "2" => Ok(definitional),
        _ => {
            let conj = weighted_conjugate(p_mat, space)?;
            let structural = if conj.is_exact() {
                conj.is_zero_one_diagonal()
            } else {
                conj.is_zero_one_diagonal_tol(FLOAT_TOL)
            };
            if structural != definitional {
                return Err(Error::Axiom(
                    "structural and definitional L^p-projection tests disagree".into(),
                ));
            }
            Ok(structural)
        }
    }
}

fn definitional_lp_projection(p_mat: &Matrix, space: &WeightedSpace) -> bool {
    let n = space.dim();
    let one_minus = &Matrix::identity(n) - p_mat;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1b);
    let mut vectors: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::float(1.0, 0.0) } else { Scalar::float(0.0, 0.0) })
                .collect()
        })
        .collect();
    for _ in 0..100 {
        vectors.push(
            (0..n)
                .map(|_| Scalar::float(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
                .collect(),
        );
    }
    let pf = space.exponent().as_f64();
    for xi in &vectors {
        let norm = space.norm(xi);
        let a = space.norm(&p_mat.apply(xi));
        let b = space.norm(&one_minus.apply(xi));
        let recombined = if pf.is_finite() {
            (a.powf(pf) + b.powf(pf)).powf(1.0 / pf)
        } else {
            a.max(b)
        };
        if (recombined - norm).abs() > FLOAT_TOL * norm.max(1.0) {
            return false;
        }
    }
    true
}

/// The regular representation matrix on ℓ^p of the arrows:
/// M[γ, γ'] = σ(γγ'⁻¹, γ')·f(γγ'⁻¹) when d(γ) = d(γ'), else 0. The
/// matrix does not depend on p; the exponent enters through the norm.
pub fn regular_representation(f: &AlgElement) -> Matrix {
    let g = f.groupoid();
    let sigma = &f.carrier().cocycle;
    let n = g.arrows();
    let mut m = Matrix::zero(n, n);
    let mut any_float = !f.is_exact();
    for gamma in 0..n {
        for gamma2 in 0..n {
            if g.d(gamma) != g.d(gamma2) {
                continue;
            }
            let eta = g
                .compose(gamma, g.inv(gamma2))
                .expect("equal domains compose");
            if f.coeff(eta).is_zero() {
                continue;
            }
            let v = sigma.value(eta, gamma2) * f.coeff(eta);
            if !v.is_exact() {
                any_float = true;
            }
            m.set(gamma, gamma2, v);
        }
    }
    if any_float {
        m.to_float()
    } else {
        m
    }
}

/// A covariant representation of a twisted action on a finite weighted
/// space: π acts by diagonal multiplication through a partial assignment
/// of ground points to space points, and v maps semigroup elements to
/// matrices.
#[derive(Clone, Debug)]
pub struct CovariantRep {
    pub twisted: TwistedAction,
    pub space: WeightedSpace,
    /// space point -> ground point carried by π (None: annihilated)
    pub point_map: Vec<Option<usize>>,
    pub v: Vec<Matrix>,
}

impl CovariantRep {
    /// π(a) = diag(a(point_map(ω))) for a function a on the ground set.
    pub fn pi(&self, a: &[Scalar]) -> Matrix {
        let diag: Vec<Scalar> = self
            .point_map
            .iter()
            .map(|p| match p {
                Some(x) => a[*x].clone(),
                None => Scalar::zero(),
            })
            .collect();
        Matrix::diagonal(&diag)
    }

    pub fn pi_indicator(&self, points: &[usize]) -> Matrix {
        let mut a = vec![Scalar::zero(); self.twisted.action.ground];
        for &x in points {
            a[x] = Scalar::one();
        }
        self.pi(&a)
    }

    /// The finite-case covariance relations, checked exactly on basis
    /// functions: (CR1) v_t π(a) = π(α_t(a)) v_t on I_{t*},
    /// (CR2) π(a) v_s v_t = π(a·u(s,t)) v_{st} on I_{st},
    /// (CR3) π(a) v_e = π(a) on I_e, and the normalization
    /// v_t = π(1_{X_t}) v_t.
    pub fn validate(&self) -> Result<()> {
        let s = &self.twisted.action.semigroup;
        let n = s.len();
        if self.v.len() != n {
            return Err(Error::Domain("one matrix per semigroup element".into()));
        }
        let dim = self.space.dim();
        if self.point_map.len() != dim
            || self.v.iter().any(|m| m.rows() != dim || m.cols() != dim)
        {
            return Err(Error::Domain("matrix dimensions disagree with the space".into()));
        }
        let ground = self.twisted.action.ground;
        let delta = |x: usize| -> Vec<Scalar> {
            let mut a = vec![Scalar::zero(); ground];
            a[x] = Scalar::one();
            a
        };
        for t in 0..n {
            // CR1 on basis functions over X_{t*}
            for x in self.twisted.action.maps[t].domain() {
                let lhs = &self.v[t] * &self.pi(&delta(x));
                let y = self.twisted.action.maps[t].apply(x).unwrap();
                let rhs = &self.pi(&delta(y)) * &self.v[t];
                if lhs != rhs {
                    return Err(Error::Axiom(format!(
                        "CR1 fails at t = {}, x = {}",
                        s.label(t),
                        x
                    )));
                }
            }
            // normalization v_t = π(1_{X_t}) v_t
            let xt = self.twisted.action.maps[t].range();
            if (&self.pi_indicator(&xt) * &self.v[t]) != self.v[t] {
                return Err(Error::Axiom(format!(
                    "normalization v_t = π(1_Xt) v_t fails at t = {}",
                    s.label(t)
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = s.mul(a, b);
                let u = self.twisted.u(a, b);
                for x in self.twisted.action.maps[ab].range() {
                    let lhs = &(&self.pi(&delta(x)) * &self.v[a]) * &self.v[b];
                    let scaled: Vec<Scalar> = {
                        let mut f = vec![Scalar::zero(); ground];
                        f[x] = u[x].clone();
                        f
                    };
                    let rhs = &self.pi(&scaled) * &self.v[ab];
                    if lhs != rhs {
                        return Err(Error::Axiom(format!(
                            "CR2 fails at (s, t, x) = ({}, {}, {})",
                            s.label(a),
                            s.label(b),
                            x
                        )));
                    }
                }
            }
        }
        for &e in s.idempotents() {
            for x in self.twisted.action.maps[e].range() {
                let lhs = &self.pi(&delta(x)) * &self.v[e];
                if lhs != self.pi(&delta(x)) {
                    return Err(Error::Axiom(format!(
                        "CR3 fails at e = {}, x = {}",
                        s.label(e),
                        x
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A representation of the modeled twisted groupoid algebra by its
/// values on the arrow basis.
#[derive(Clone, Debug)]
pub struct BasisRep {
    pub images: Vec<Matrix>,
    pub dim: usize,
}

impl BasisRep {
    /// Verify multiplicativity against the model:
    /// ψ(b_γ)ψ(b_η) = σ̃(γ,η)·ψ(b_γη) for composable pairs and 0
    /// otherwise; exact.
    pub fn verify_homomorphism(&self, model: &ModeledGroupoid) -> Result<()> {
        let g = &model.tg.groupoid;
        if self.images.len() != g.arrows() {
            return Err(Error::Domain("one image per arrow required".into()));
        }
        for a in 0..g.arrows() {
            for b in 0..g.arrows() {
                let prod = &self.images[a] * &self.images[b];
                match g.compose(a, b) {
                    Some(c) => {
                        let expected = self.images[c].scale(model.cocycle.value(a, b));
                        if prod != expected {
                            return Err(Error::Axiom(format!(
                                "ψ not multiplicative at composable pair ({}, {})",
                                g.label(a),
                                g.label(b)
                            )));
                        }
                    }
                    None => {
                        if !prod.is_zero() {
                            return Err(Error::Axiom(format!(
                                "ψ nonzero on non-composable pair ({}, {})",
                                g.label(a),
                                g.label(b)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Linear extension to an algebra element on the model's carrier.
    pub fn apply(&self, f: &AlgElement) -> Matrix {
        let mut out = Matrix::zero(self.dim, self.dim);
        for a in f.support() {
            out = &out + &self.images[a].scale(f.coeff(a));
        }
        out
    }
}

/// Integrate a validated covariant representation over the model:
/// a_t δ_t ↦ π(a_t) v_t along the canonical grading γ ↦ t_can(γ).
/// Checks well-definedness across overlapping bisections through the
/// grading relation a δ_s = a·conj(u(ss*, t))·δ_t for s ≤ t, and that
/// the result is an algebra homomorphism on basis products.
pub fn integrate(rep: &CovariantRep, model: &ModeledGroupoid) -> Result<BasisRep> {
    rep.validate()?;
    if !rep.twisted.same_as(model.twisted()) {
        return Err(Error::CarrierMismatch(
            "representation and model carry different twisted actions".into(),
        ));
    }
    let s = &rep.twisted.action.semigroup;
    let g = &model.tg.groupoid;
    let ground = rep.twisted.action.ground;
    let delta_at = |x: usize, v: Scalar| -> Vec<Scalar> {
        let mut a = vec![Scalar::zero(); ground];
        a[x] = v;
        a
    };
    // well-definedness: s ≤ t and x ∈ dom h_s imply
    // π(δ_r) v_s = π(conj(u(ss*, t))(r)·δ_r) v_t at r = h_s(x)
    for t in 0..s.len() {
        for small in 0..s.len() {
            if small == t || !s.natural_order(small, t) {
                continue;
            }
            let ss = s.mul(small, s.star(small));
            for x in rep.twisted.action.maps[small].domain() {
                let r = rep.twisted.action.maps[small].apply(x).unwrap();
                let lhs = &rep.pi(&delta_at(r, Scalar::one())) * &rep.v[small];
                let coeff = rep.twisted.u(ss, t)[r].unimodular_inv();
                let rhs = &rep.pi(&delta_at(r, coeff)) * &rep.v[t];
                if lhs != rhs {
                    return Err(Error::Axiom(format!(
                        "grading not well defined across {} ≤ {} at point {}",
                        s.label(small),
                        s.label(t),
                        x
                    )));
                }
            }
        }
    }
    let images: Vec<Matrix> = (0..g.arrows())
        .map(|gid| {
            let (t, x) = model.tg.reps[gid];
            let r = rep.twisted.action.maps[t].apply(x).unwrap();
            &rep.pi(&delta_at(r, Scalar::one())) * &rep.v[t]
        })
        .collect();
    let out = BasisRep {
        images,
        dim: rep.space.dim(),
    };
    out.verify_homomorphism(model)?;
    Ok(out)
}

/// Disintegrate a basis representation of the modeled algebra into a
/// covariant representation: π is ψ on unit indicators (which must be
/// exact 0/1 diagonals) and v_t = ψ(1_{X_t} δ_t) = Σ_x ψ(b_[t,x]).
pub fn disintegrate(
    psi: &BasisRep,
    model: &ModeledGroupoid,
    space: WeightedSpace,
) -> Result<CovariantRep> {
    psi.verify_homomorphism(model)?;
    if space.dim() != psi.dim {
        return Err(Error::Domain("space dimension mismatch".into()));
    }
    let s = model.twisted().action.semigroup.clone();
    let ground = model.twisted().action.ground;
    // π from unit germs
    let mut point_map: Vec<Option<usize>> = vec![None; psi.dim];
    for x in 0..ground {
        let unit_arrow = model.tg.unit_at_point[x];
        let im = &psi.images[unit_arrow];
        if !im.is_exact() || !im.is_zero_one_diagonal() {
            return Err(Error::Unsupported(
                "ψ on unit indicators is not a 0/1 diagonal; representation is not spatial"
                    .into(),
            ));
        }
        for w in 0..psi.dim {
            if im[(w, w)].is_one() {
                if point_map[w].is_some() {
                    return Err(Error::Axiom(format!(
                        "unit images overlap at space point {}",
                        w
                    )));
                }
                point_map[w] = Some(x);
            }
        }
    }
    let mut v = Vec::with_capacity(s.len());
    for t in 0..s.len() {
        let mut m = Matrix::zero(psi.dim, psi.dim);
        for x in model.twisted().action.maps[t].domain() {
            let gid = model.tg.germ_of[&(t, x)];
            m = &m + &psi.images[gid];
        }
        v.push(m);
    }
    let rep = CovariantRep {
        twisted: model.twisted().clone(),
        space,
        point_map,
        v,
    };
    rep.validate()?;
    Ok(rep)
}

/// A groupoid together with a model of it by a twisted action of its
/// singleton-bisection semigroup: the rebuilt cocycle agrees with the
/// original through the canonical arrow identification.
pub struct GroupoidModel {
    pub model: ModeledGroupoid,
    /// model arrow -> original arrow
    pub arrow_of_germ: Vec<usize>,
    /// original arrow -> model arrow
    pub germ_of_arrow: Vec<usize>,
    pub carrier: Arc<Carrier>,
}

/// Model an arbitrary twisted groupoid by the twisted action of its
/// singleton bisections with trivial sections; the germ groupoid is
/// canonically the original and the rebuilt twist equals σ on the nose.
pub fn model_of_groupoid(g: &FiniteGroupoid, sigma: &Cocycle) -> Result<GroupoidModel> {
    let bs = bisection_semigroup(g, &singleton_bisections(g), g.arrows() + 2)?;
    let sections = Sections::trivial(&bs);
    let ex = extract_twisted_action(g, sigma, &bs, sections)?;
    let model = model_twisted_action(&ex.twisted)?;
    let mut arrow_of_germ = vec![usize::MAX; g.arrows()];
    let mut germ_of_arrow = vec![usize::MAX; g.arrows()];
    if model.tg.groupoid.arrows() != g.arrows() {
        return Err(Error::Axiom(
            "singleton model has a different arrow count".into(),
        ));
    }
    for gid in 0..g.arrows() {
        let (t, _) = model.tg.reps[gid];
        let arr = bs.bisections[t].arrows();
        if arr.len() != 1 {
            return Err(Error::Axiom("non-singleton canonical representative".into()));
        }
        arrow_of_germ[gid] = arr[0];
        germ_of_arrow[arr[0]] = gid;
    }
    // the rebuilt cocycle must be σ through the identification
    for (a, b, _) in model.tg.groupoid.composable_pairs() {
        if model.cocycle.value(a, b) != sigma.value(arrow_of_germ[a], arrow_of_germ[b]) {
            return Err(Error::Axiom(
                "rebuilt cocycle differs from the original on the singleton model".into(),
            ));
        }
    }
    let carrier = Carrier::new(g.clone(), sigma.clone())?;
    Ok(GroupoidModel {
        model,
        arrow_of_germ,
        germ_of_arrow,
        carrier,
    })
}

impl GroupoidModel {
    /// Transport an algebra element on (G, σ) to the model's basis
    /// indexing: images[germ] corresponds to the original arrow.
    pub fn to_model_coeffs(&self, f: &AlgElement) -> Vec<Scalar> {
        (0..f.groupoid().arrows())
            .map(|gid| f.coeff(self.arrow_of_germ[gid]).clone())
            .collect()
    }

    /// The regular representation as a basis representation of the model.
    pub fn regular_basis_rep(&self) -> BasisRep {
        let images: Vec<Matrix> = (0..self.carrier.groupoid.arrows())
            .map(|gid| {
                let d = AlgElement::delta(self.carrier.clone(), self.arrow_of_germ[gid]);
                regular_representation(&d)
            })
            .collect();
        BasisRep {
            images,
            dim: self.carrier.groupoid.arrows(),
        }
    }
}

/// The regular covariant representation of a modeled twisted action on
/// ℓ^p of the germ groupoid arrows (counting weights):
/// π(a)ξ(γ) = a(r(γ))ξ(γ) and
/// v_t ξ([s, x]) = u(t, t*s)(h_s(x))·ξ([t*s, x]) for h_s(x) ∈ X_t.
pub fn regular_covariant_rep(model: &ModeledGroupoid, p: Exponent) -> CovariantRep {
    let ta = model.twisted();
    let s = &ta.action.semigroup;
    let g = &model.tg.groupoid;
    let n = g.arrows();
    let space = WeightedSpace::counting(n, p);
    let point_map: Vec<Option<usize>> = (0..n)
        .map(|gid| {
            let (t, x) = model.tg.reps[gid];
            Some(ta.action.maps[t].apply(x).unwrap())
        })
        .collect();
    let mut v = Vec::with_capacity(s.len());
    for t in 0..s.len() {
        let mut m = Matrix::zero(n, n);
        for gid in 0..n {
            let (s1, x) = model.tg.reps[gid];
            let y = ta.action.maps[s1].apply(x).unwrap();
            // h_s(x) must lie in X_t
            if ta.action.maps[s.star(t)].apply(y).is_none() {
                continue;
            }
            let src = model.tg.germ_of[&(s.mul(s.star(t), s1), x)];
            let coeff = ta.u(t, s.mul(s.star(t), s1))[y].clone();
            m.set(gid, src, coeff);
        }
        v.push(m);
    }
    CovariantRep {
        twisted: ta.clone(),
        space,
        point_map,
        v,
    }
}

/// Inclusion–exclusion idempotents of a multiplicative family of
/// commuting idempotent matrices indexed by a finite subset F of a
/// semilattice: P_{F0}^F = Σ_{F0 ⊆ G ⊆ F} (−1)^{|G∖F0|} v_{∧G}, with
/// P_∅^F = 0. Verifies mutual orthogonality and the reconstruction
/// identity v_e = Σ_{e ∈ F0 ⊆ F} P_{F0}^F exactly.
pub struct InclusionExclusion {
    /// (subset mask over F, idempotent); the empty mask is omitted
    pub parts: Vec<(u32, Matrix)>,
}

pub fn inclusion_exclusion(
    lattice: &FiniteSemilattice,
    v: &dyn Fn(usize) -> Matrix,
    family: &[usize],
) -> Result<InclusionExclusion> {
    let k = family.len();
    if k > 20 {
        return Err(Error::BoundExceeded("family too large".into()));
    }
    let dim = v(family.first().copied().unwrap_or(0)).rows();
    // multiplicativity and commuting idempotents, checked exactly
    for &e in family {
        let ve = v(e);
        if !ve.is_idempotent() {
            return Err(Error::Domain(format!(
                "value at {} is not idempotent",
                lattice.label(e)
            )));
        }
        for &f in family {
            let vf = v(f);
            let ef = v(lattice.meet(e, f));
            if (&ve * &vf) != ef || (&vf * &ve) != ef {
                return Err(Error::Domain(format!(
                    "values at {} and {} do not commute multiplicatively into the meet",
                    lattice.label(e),
                    lattice.label(f)
                )));
            }
        }
    }
    let meet_of_mask = |mask: u32| -> usize {
        let mut it = (0..k).filter(|i| mask & (1 << i) != 0);
        let first = it.next().unwrap();
        it.fold(family[first], |acc, i| lattice.meet(acc, family[i]))
    };
    let mut parts = Vec::new();
    for f0 in 1u32..(1 << k) {
        let mut acc = Matrix::zero(dim, dim);
        let complement: Vec<usize> = (0..k).filter(|i| f0 & (1 << i) == 0).collect();
        for extra_bits in 0u32..(1 << complement.len()) {
            let mut g_mask = f0;
            for (j, &i) in complement.iter().enumerate() {
                if extra_bits & (1 << j) != 0 {
                    g_mask |= 1 << i;
                }
            }
            let term = v(meet_of_mask(g_mask));
            if (g_mask.count_ones() - f0.count_ones()) % 2 == 0 {
                acc = &acc + &term;
            } else {
                acc = &acc - &term;
            }
        }
        parts.push((f0, acc));
    }
    // mutual orthogonality
    for (i, (m1, p1)) in parts.iter().enumerate() {
        for (m2, p2) in parts.iter().skip(i + 1) {
            if !(p1 * p2).is_zero() || !(p2 * p1).is_zero() {
                return Err(Error::Axiom(format!(
                    "parts {:b} and {:b} are not orthogonal",
                    m1, m2
                )));
            }
        }
        if !p1.is_idempotent() {
            return Err(Error::Axiom(format!("part {:b} is not idempotent", m1)));
        }
    }
    // reconstruction: v_e = Σ_{e ∈ F0} P_{F0}
    for (i, &e) in family.iter().enumerate() {
        let mut acc = Matrix::zero(dim, dim);
        for (mask, p) in &parts {
            if mask & (1 << i) != 0 {
                acc = &acc + p;
            }
        }
        if acc != v(e) {
            return Err(Error::Axiom(format!(
                "reconstruction fails at {}",
                lattice.label(e)
            )));
        }
    }
    Ok(InclusionExclusion { parts })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractivityMode {
    Real,
    Complex,
}

#[derive(Clone, Debug)]
pub enum ContractivityVerdict {
    /// Certified at every vertex (real) — exact by convexity.
    Pass,
    /// Sampling/grid verdict only (complex mode), worst value seen.
    ApproxPass { worst: f64 },
    Fail { coeffs: Vec<Scalar>, norm: f64 },
}

impl ContractivityVerdict {
    pub fn passed(&self) -> bool {
        !matches!(self, ContractivityVerdict::Fail { .. })
    }
}

/// Joint M-contractivity of a mutually orthogonal idempotent family:
/// ‖Σ a_i P_i‖_p ≤ 1 for coefficients in {−1, 1} (real mode; vertices
/// suffice by convexity) or on the unit circle (complex mode: 16-phase
/// grid for |F| ≤ 4 plus 10⁴ random samples, APPROX verdict).
pub fn jointly_contractive_check(
    family: &[Matrix],
    space: &WeightedSpace,
    mode: ContractivityMode,
    seed: u64,
) -> Result<ContractivityVerdict> {
    if family.is_empty() {
        return Ok(ContractivityVerdict::Pass);
    }
    let dim = space.dim();
    for (i, p) in family.iter().enumerate() {
        if p.rows() != dim || p.cols() != dim {
            return Err(Error::Domain("family/space dimension mismatch".into()));
        }
        if !p.is_idempotent() {
            return Err(Error::Domain(format!("family member {} not idempotent", i)));
        }
        for (j, q) in family.iter().enumerate() {
            if i != j && (!(p * q).is_zero() || !(q * p).is_zero()) {
                return Err(Error::Domain(format!(
                    "family members {} and {} are not orthogonal",
                    i, j
                )));
            }
        }
    }
    let eval = |coeffs: &[Scalar]| -> Result<f64> {
        let mut acc = Matrix::zero(dim, dim);
        for (c, p) in coeffs.iter().zip(family) {
            acc = &acc + &p.scale(c);
        }
        let conj = weighted_conjugate(&acc, space)?;
        norm_upper(&conj, space.exponent())
    };
    match mode {
        ContractivityMode::Real => {
            let k = family.len();
            for mask in 0u32..(1 << k) {
                let coeffs: Vec<Scalar> = (0..k)
                    .map(|i| {
                        if mask & (1 << i) != 0 {
                            Scalar::from_int(-1)
                        } else {
                            Scalar::one()
                        }
                    })
                    .collect();
                let norm = eval(&coeffs)?;
                if norm > 1.0 + FLOAT_TOL {
                    return Ok(ContractivityVerdict::Fail { coeffs, norm });
                }
            }
            Ok(ContractivityVerdict::Pass)
        }
        ContractivityMode::Complex => {
            let k = family.len();
            let mut worst: f64 = 0.0;
            let mut worst_coeffs: Vec<Scalar> = vec![Scalar::one(); k];
            let try_coeffs = |coeffs: Vec<Scalar>,
                                  worst: &mut f64,
                                  worst_coeffs: &mut Vec<Scalar>|
             -> Result<()> {
                let norm = eval(&coeffs)?;
                if norm > *worst {
                    *worst = norm;
                    *worst_coeffs = coeffs;
                }
                Ok(())
            };
            if k <= 4 {
                let phases: Vec<Scalar> = (0..16)
                    .map(|j| {
                        let th = 2.0 * std::f64::consts::PI * (j as f64) / 16.0;
                        Scalar::float(th.cos(), th.sin())
                    })
                    .collect();
                let mut idx = vec![0usize; k];
                loop {
                    let coeffs: Vec<Scalar> = idx.iter().map(|&i| phases[i].clone()).collect();
                    try_coeffs(coeffs, &mut worst, &mut worst_coeffs)?;
                    let mut carry = 0;
                    loop {
                        idx[carry] += 1;
                        if idx[carry] < 16 {
                            break;
                        }
                        idx[carry] = 0;
                        carry += 1;
                        if carry == k {
                            break;
                        }
                    }
                    if carry == k {
                        break;
                    }
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..10_000 {
                let coeffs: Vec<Scalar> = (0..k)
                    .map(|_| {
                        let th = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                        Scalar::float(th.cos(), th.sin())
                    })
                    .collect();
                try_coeffs(coeffs, &mut worst, &mut worst_coeffs)?;
            }
            if worst > 1.0 + FLOAT_TOL {
                Ok(ContractivityVerdict::Fail {
                    coeffs: worst_coeffs,
                    norm: worst,
                })
            } else {
                Ok(ContractivityVerdict::ApproxPass { worst })
            }
        }
    }
}

/// Rigorous-enough upper evaluation of ‖M‖_p for verdicts: exact closed
/// forms at p ∈ {1, 2, ∞}, bracket upper bound otherwise.
fn norm_upper(m: &Matrix, p: &Exponent) -> Result<f64> {
    match p {
        Exponent::Infinity => opnorm_exact(m, p),
        Exponent::Finite(q) if q.to_string() == "1" || q.to_string() == "2" => opnorm_exact(m, p),
        _ => Ok(opnorm_bracket(m, p)?.upper),
    }
}

#[derive(Clone, Debug)]
pub struct TightnessReport {
    pub is_homomorphism: bool,
    pub contractive: bool,
    pub zero_to_zero: bool,
    pub tight: bool,
    pub tight_witness: Option<String>,
    /// Injectivity certificate on the diagonal algebra: the products
    /// over maximal non-covering families are all nonzero.
    pub injective: bool,
    pub injective_witness: Option<String>,
}

impl TightnessReport {
    pub fn is_tight(&self) -> bool {
        self.is_homomorphism && self.contractive && self.zero_to_zero && self.tight
    }
}

/// Tightness of a semigroup representation v : S → contractions, by the
/// finite criterion: v_0 = 0 (when E has a zero) and for every nonzero
/// e ∈ E the product ∏_{a ∈ atoms(e)} (v_e − v_a) vanishes exactly.
/// Atoms below e form a cover, and killing it kills every cover: every
/// cover F of e dominates the atoms elementwise, so the atom product
/// divides (commutatively) the product over F.
pub fn is_tight_rep(
    s: &ISemigroup,
    v: &[Matrix],
    space: &WeightedSpace,
) -> Result<TightnessReport> {
    if v.len() != s.len() {
        return Err(Error::Domain("one matrix per semigroup element".into()));
    }
    let mut is_homomorphism = true;
    'hom: for a in 0..s.len() {
        for b in 0..s.len() {
            if (&v[a] * &v[b]) != v[s.mul(a, b)] {
                is_homomorphism = false;
                break 'hom;
            }
        }
    }
    if !is_homomorphism {
        return Err(Error::Domain(
            "v is not a semigroup homomorphism".into(),
        ));
    }
    let mut contractive = true;
    for m in v {
        let conj = weighted_conjugate(m, space)?;
        if norm_upper(&conj, space.exponent())? > 1.0 + FLOAT_TOL {
            // the bracket upper may be loose; accept when the lower
            // bound stays below the threshold for fractional p
            let lower = match space.exponent() {
                Exponent::Finite(q) if q.to_string() != "1" && q.to_string() != "2" => {
                    opnorm_bracket(&conj, space.exponent())?.lower
                }
                _ => f64::INFINITY,
            };
            if lower > 1.0 + FLOAT_TOL {
                contractive = false;
                break;
            }
        }
    }
    let lat = s.semilattice();
    let dim = space.dim();
    let zero_to_zero = match s.zero() {
        Some(z) => v[z].is_zero() || v[z] == Matrix::zero(dim, dim),
        None => true,
    };
    let mut tight = true;
    let mut tight_witness = None;
    for pos in 0..lat.len() {
        if lat.is_zero(pos) {
            continue;
        }
        let e = s.idempotent_at(pos);
        let mut prod = Matrix::identity(dim);
        for apos in lat.atoms_below(pos) {
            let a = s.idempotent_at(apos);
            prod = &prod * &(&v[e] - &v[a]);
        }
        if !prod.is_zero() {
            tight = false;
            tight_witness = Some(format!(
                "atom product at {} is nonzero",
                lat.label(pos)
            ));
            break;
        }
    }
    // injectivity certificate over maximal non-covering families:
    // for every e and nonzero z ≤ e, F_z = {f ∈ eE \ {e} : f ∧ z = 0}
    let mut injective = true;
    let mut injective_witness = None;
    'inj: for pos in 0..lat.len() {
        if lat.is_zero(pos) {
            continue;
        }
        let e = s.idempotent_at(pos);
        for zpos in 0..lat.len() {
            if lat.is_zero(zpos) || !lat.leq(zpos, pos) {
                continue;
            }
            let mut prod = Matrix::identity(dim);
            for fpos in 0..lat.len() {
                if fpos != pos && lat.leq(fpos, pos) {
                    let meet = lat.meet(fpos, zpos);
                    if lat.is_zero(meet) {
                        let f = s.idempotent_at(fpos);
                        prod = &prod * &(&v[e] - &v[f]);
                    }
                }
            }
            if prod.is_zero() {
                injective = false;
                injective_witness = Some(format!(
                    "product over the maximal family missing {} at {} vanishes",
                    lat.label(zpos),
                    lat.label(pos)
                ));
                break 'inj;
            }
        }
    }
    Ok(TightnessReport {
        is_homomorphism,
        contractive,
        zero_to_zero,
        tight,
        tight_witness,
        injective,
        injective_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use crate::scalar::{rat, rat_int};
    use crate::semigroup::GroupTable;

    fn space2(p: i64) -> WeightedSpace {
        WeightedSpace::counting(2, Exponent::from_int(p).unwrap())
    }

    fn swap_map() -> PartialBijection {
        PartialBijection::from_pairs(2, &[(0, 1), (1, 0)]).unwrap()
    }

    #[test]
    fn spi_identity_matrix() {
        let s = SpatialPartialIsometry::identity(space2(3));
        assert_eq!(s.matrix(), Matrix::identity(2));
    }

    #[test]
    fn spi_weighted_swap_matrix() {
        // swap on w = (1, 4), p = 2: matrix [[0, 2], [1/2, 0]]
        let sp = WeightedSpace::new(
            vec![rat_int(1), rat_int(4)],
            Exponent::from_int(2).unwrap(),
        )
        .unwrap();
        let s = SpatialPartialIsometry::new(
            sp.clone(),
            swap_map(),
            vec![Scalar::one(), Scalar::one()],
        )
        .unwrap();
        let m = s.matrix();
        assert_eq!(m[(0, 1)], Scalar::from_int(2));
        assert_eq!(m[(1, 0)], Scalar::from_rational(rat(1, 2)));
        // conjugated form is the plain swap with operator norm 1
        let c = weighted_conjugate(&m, &sp).unwrap();
        assert_eq!(
            opnorm_exact(&c, &Exponent::from_int(2).unwrap()).unwrap(),
            1.0
        );
    }

    #[test]
    fn spi_empty_domain_is_zero_matrix() {
        let s = SpatialPartialIsometry::new(
            space2(2),
            PartialBijection::empty(2),
            vec![Scalar::zero(), Scalar::zero()],
        )
        .unwrap();
        assert!(s.matrix().is_zero());
    }

    #[test]
    fn spi_calculus_laws() {
        // weights are squares so all p = 2 roots are exact
        let sp = WeightedSpace::new(
            vec![rat_int(1), rat_int(4)],
            Exponent::from_int(2).unwrap(),
        )
        .unwrap();
        let s = SpatialPartialIsometry::new(
            sp.clone(),
            swap_map(),
            vec![Scalar::from_int(-1), Scalar::exact(rat(3, 5), rat(4, 5))],
        )
        .unwrap();
        // s s* s = s
        let sss = s.compose(&s.star()).unwrap().compose(&s).unwrap();
        assert_eq!(sss, s);
        // matrix homomorphism, exactly
        let t = SpatialPartialIsometry::indicator(sp.clone(), &[1]);
        let lhs = s.compose(&t).unwrap().matrix();
        let rhs = &s.matrix() * &t.matrix();
        assert_eq!(lhs, rhs);
        // star gives the conjugate-transpose pattern through the weights:
        // s ∘ s* = indicator of the range, s* ∘ s = indicator of the domain
        let p = s.compose(&s.star()).unwrap();
        assert_eq!(
            p.matrix(),
            SpatialPartialIsometry::indicator(sp.clone(), &[0, 1]).matrix()
        );
        // swap ∘ swap = identity
        let swap = SpatialPartialIsometry::new(
            sp.clone(),
            swap_map(),
            vec![Scalar::one(), Scalar::one()],
        )
        .unwrap();
        assert_eq!(
            swap.compose(&swap).unwrap().matrix(),
            Matrix::identity(2)
        );
    }

    #[test]
    fn disjoint_idempotents_compose_to_empty() {
        let sp = space2(4);
        let a = SpatialPartialIsometry::indicator(sp.clone(), &[0]);
        let b = SpatialPartialIsometry::indicator(sp.clone(), &[1]);
        let ab = a.compose(&b).unwrap();
        assert!(ab.matrix().is_zero());
    }

    #[test]
    fn lp_projection_diagonal_indicator() {
        for p in [1, 2, 4] {
            let sp = space2(p);
            let ind = SpatialPartialIsometry::indicator(sp.clone(), &[0]).matrix();
            assert!(is_lp_projection(&ind, &sp).unwrap());
        }
        let sp = WeightedSpace::new(
            vec![rat_int(1), rat_int(9)],
            Exponent::infinity(),
        )
        .unwrap();
        let ind = SpatialPartialIsometry::indicator(sp.clone(), &[1]).matrix();
        assert!(is_lp_projection(&ind, &sp).unwrap());
    }

    #[test]
    fn averaging_projection_rejected_off_p2() {
        let half = Scalar::from_rational(rat(1, 2));
        let avg = Matrix::new(2, 2, vec![half.clone(), half.clone(), half.clone(), half])
            .unwrap();
        for p in [1, 4] {
            assert!(!is_lp_projection(&avg, &space2(p)).unwrap());
        }
        let spinf = WeightedSpace::counting(2, Exponent::infinity());
        assert!(!is_lp_projection(&avg, &spinf).unwrap());
        // definitional at p = 2: orthogonal projection
        assert!(is_lp_projection(&avg, &space2(2)).unwrap());
        // witness arithmetic at ξ = (1, 0), p = 4: ‖Pξ‖^p + ‖(1-P)ξ‖^p = 2^{2-p}
        let sp4 = space2(4);
        let xi = vec![Scalar::one(), Scalar::zero()];
        let a = sp4.norm(&avg.apply(&xi)).powi(4);
        let b = sp4
            .norm(&(&Matrix::identity(2) - &avg).apply(&xi))
            .powi(4);
        assert!((a + b - 0.25).abs() < 1e-12);
    }

    #[test]
    fn non_idempotent_rejected() {
        let m = Matrix::new(
            2,
            2,
            vec![
                Scalar::from_int(1),
                Scalar::from_int(1),
                Scalar::zero(),
                Scalar::from_int(1),
            ],
        )
        .unwrap();
        assert!(is_lp_projection(&m, &space2(3)).is_err());
    }

    fn pair2_carrier() -> Arc<Carrier> {
        Carrier::untwisted(FiniteGroupoid::pair(2))
    }

    #[test]
    fn regular_rep_of_unit_delta_is_range_fiber_indicator() {
        let c = pair2_carrier();
        let f = AlgElement::delta(c.clone(), 0); // unit (0,0)
        let m = regular_representation(&f);
        // diagonal indicator of {γ : r(γ) = (0,0)} = arrows 0 and 1
        let expect = Matrix::diagonal(&[
            Scalar::one(),
            Scalar::one(),
            Scalar::zero(),
            Scalar::zero(),
        ]);
        assert_eq!(m, expect);
    }

    #[test]
    fn regular_rep_is_multiplicative_and_isometric_at_endpoints() {
        let c = pair2_carrier();
        let f = AlgElement::from_coeffs(
            c.clone(),
            vec![
                Scalar::from_int(1),
                Scalar::from_int(2),
                Scalar::from_int(-3),
                Scalar::from_int(5),
            ],
        )
        .unwrap();
        let g = AlgElement::from_coeffs(
            c.clone(),
            vec![
                Scalar::from_int(-2),
                Scalar::from_int(1),
                Scalar::from_int(4),
                Scalar::from_int(1),
            ],
        )
        .unwrap();
        let lhs = regular_representation(&f.convolve(&g).unwrap());
        let rhs = &regular_representation(&f) * &regular_representation(&g);
        assert_eq!(lhs, rhs);
        // ‖Λ₁(f)‖ = ‖f‖_d* and ‖Λ_∞(f)‖ = ‖f‖_r*
        use crate::algebra::NormKind;
        let m = regular_representation(&f);
        let p1 = Exponent::from_int(1).unwrap();
        assert_eq!(opnorm_exact(&m, &p1).unwrap(), f.norm(NormKind::DStar));
        assert_eq!(
            opnorm_exact(&m, &Exponent::infinity()).unwrap(),
            f.norm(NormKind::RStar)
        );
    }

    #[test]
    fn twisted_z2_regular_rep_squares_to_minus_identity() {
        let g = FiniteGroupoid::from_group(&GroupTable::cyclic(2));
        let sigma = Cocycle::new(&g, |a, b| {
            if a == 1 && b == 1 {
                Scalar::from_int(-1)
            } else {
                Scalar::one()
            }
        })
        .unwrap();
        let c = Carrier::new(g, sigma).unwrap();
        let m = regular_representation(&AlgElement::delta(c, 1));
        let sq = &m * &m;
        assert_eq!(sq, Matrix::identity(2).scale(&Scalar::from_int(-1)));
    }

    #[test]
    fn regular_rep_injective_on_basis() {
        let c = pair2_carrier();
        for a in 0..4 {
            let m = regular_representation(&AlgElement::delta(c.clone(), a));
            assert!(!m.is_zero());
        }
    }

    #[test]
    fn disintegrate_regular_rep_roundtrip() {
        let g = FiniteGroupoid::pair(2);
        let sigma = Cocycle::trivial(&g);
        let gm = model_of_groupoid(&g, &sigma).unwrap();
        let psi = gm.regular_basis_rep();
        let space = WeightedSpace::counting(4, Exponent::from_int(2).unwrap());
        let rep = disintegrate(&psi, &gm.model, space).unwrap();
        let back = integrate(&rep, &gm.model).unwrap();
        for a in 0..g.arrows() {
            assert_eq!(back.images[a], psi.images[a]);
        }
    }

    #[test]
    fn regular_covariant_rep_integrates_to_regular_rep() {
        let g = FiniteGroupoid::from_group(&GroupTable::cyclic(2));
        let sigma = Cocycle::new(&g, |a, b| {
            if a == 1 && b == 1 {
                Scalar::from_int(-1)
            } else {
                Scalar::one()
            }
        })
        .unwrap();
        let gm = model_of_groupoid(&g, &sigma).unwrap();
        let rep = regular_covariant_rep(&gm.model, Exponent::from_int(3).unwrap());
        rep.validate().unwrap();
        let psi = integrate(&rep, &gm.model).unwrap();
        let reg = gm.regular_basis_rep();
        // both are basis representations over germ indexing; the germ
        // arrows of the regular covariant representation are permuted by
        // the germ/arrow identification
        for gid in 0..g.arrows() {
            let lhs = &psi.images[gid];
            // transport the regular image into germ coordinates
            let rhs = &reg.images[gid];
            let n = g.arrows();
            let perm = &gm.germ_of_arrow;
            let transported = Matrix::from_fn(n, n, |i, j| {
                rhs[(gm.arrow_of_germ[i], gm.arrow_of_germ[j])].clone()
            });
            assert_eq!(lhs, &transported, "basis image {} differs", gid);
            let _ = perm;
        }
    }

    #[test]
    fn zero_map_disintegrates_to_zero() {
        let g = FiniteGroupoid::pair(2);
        let gm = model_of_groupoid(&g, &Cocycle::trivial(&g)).unwrap();
        let psi = gm.regular_basis_rep();
        let space = WeightedSpace::counting(4, Exponent::from_int(1).unwrap());
        let rep = disintegrate(&psi, &gm.model, space).unwrap();
        let zero = AlgElement::zero(gm.carrier.clone());
        let basis = integrate(&rep, &gm.model).unwrap();
        assert!(basis.apply(&zero).is_zero());
    }

    #[test]
    fn inclusion_exclusion_singleton_and_pairs() {
        use crate::semilattice::examples::diamond;
        let lat = diamond();
        // diagonal indicators: v(a) = 1_{A}, v(b) = 1_{B} with A = {0,1},
        // B = {1,2} inside a 3-point space; meets map to intersections
        let indicator = |pts: &[usize]| {
            let mut d = vec![Scalar::zero(); 3];
            for &p in pts {
                d[p] = Scalar::one();
            }
            Matrix::diagonal(&d)
        };
        let v = move |e: usize| -> Matrix {
            match e {
                0 => indicator(&[]),        // zero
                1 => indicator(&[0, 1]),    // a
                2 => indicator(&[1, 2]),    // b  (a ∧ b = 0 fails here!)
                3 => indicator(&[0, 1, 2]), // top
                _ => unreachable!(),
            }
        };
        // a ∧ b = 0 must map to the zero matrix; the above violates
        // multiplicativity, so it is rejected
        assert!(inclusion_exclusion(&lat, &v, &[1, 2]).is_err());

        // disjoint indicators respect the diamond meets
        let indicator2 = |pts: &[usize]| {
            let mut d = vec![Scalar::zero(); 3];
            for &p in pts {
                d[p] = Scalar::one();
            }
            Matrix::diagonal(&d)
        };
        let w = move |e: usize| -> Matrix {
            match e {
                0 => indicator2(&[]),
                1 => indicator2(&[0]),
                2 => indicator2(&[2]),
                3 => indicator2(&[0, 2]),
                _ => unreachable!(),
            }
        };
        let parts = inclusion_exclusion(&lat, &w, &[1, 2]).unwrap();
        assert_eq!(parts.parts.len(), 3);
        // singleton family: P_{e} = v_e
        let single = inclusion_exclusion(&lat, &w, &[3]).unwrap();
        assert_eq!(single.parts.len(), 1);
        assert_eq!(single.parts[0].1, w(3));
    }

    #[test]
    fn inclusion_exclusion_equal_values_vanish() {
        use crate::semilattice::examples::chain3;
        let lat = chain3();
        // v(e) = v(f) = same indicator: differences vanish
        let m = Matrix::diagonal(&[Scalar::one(), Scalar::zero()]);
        let mz = Matrix::zero(2, 2);
        let v = move |e: usize| -> Matrix {
            if e == 0 {
                mz.clone()
            } else {
                m.clone()
            }
        };
        let parts = inclusion_exclusion(&lat, &v, &[1, 2]).unwrap();
        // P_{e} = P_{f} = 0, P_{e,f} = v_e
        for (mask, p) in &parts.parts {
            if mask.count_ones() == 1 {
                assert!(p.is_zero());
            } else {
                assert!(!p.is_zero());
            }
        }
    }

    #[test]
    fn joint_contractivity_diagonal_family_passes() {
        for p in [1, 2] {
            let sp = space2(p);
            let fam = vec![
                SpatialPartialIsometry::indicator(sp.clone(), &[0]).matrix(),
                SpatialPartialIsometry::indicator(sp.clone(), &[1]).matrix(),
            ];
            let v = jointly_contractive_check(&fam, &sp, ContractivityMode::Real, 7).unwrap();
            assert!(matches!(v, ContractivityVerdict::Pass));
        }
        let spinf = WeightedSpace::counting(2, Exponent::infinity());
        let fam = vec![
            SpatialPartialIsometry::indicator(spinf.clone(), &[0]).matrix(),
            SpatialPartialIsometry::indicator(spinf.clone(), &[1]).matrix(),
        ];
        let v = jointly_contractive_check(&fam, &spinf, ContractivityMode::Real, 7).unwrap();
        assert!(matches!(v, ContractivityVerdict::Pass));
    }

    #[test]
    fn averaging_family_real_passes_complex_fails_at_p1() {
        let half = Scalar::from_rational(rat(1, 2));
        let mhalf = Scalar::from_rational(rat(-1, 2));
        let p = Matrix::new(2, 2, vec![half.clone(), half.clone(), half.clone(), half.clone()])
            .unwrap();
        let q = Matrix::new(2, 2, vec![half.clone(), mhalf.clone(), mhalf, half]).unwrap();
        let sp = space2(1);
        let fam = vec![p, q];
        let real = jointly_contractive_check(&fam, &sp, ContractivityMode::Real, 7).unwrap();
        assert!(matches!(real, ContractivityVerdict::Pass));
        let complex =
            jointly_contractive_check(&fam, &sp, ContractivityMode::Complex, 7).unwrap();
        match complex {
            ContractivityVerdict::Fail { norm, .. } => {
                assert!(norm >= 2f64.sqrt() - 1e-9, "norm {}", norm);
            }
            other => panic!("expected failure, got {:?}", other),
        }
    }

    #[test]
    fn tightness_on_diamond_semilattice() {
        // the diamond as a commutative inverse semigroup
        let meet = vec![
            vec![0, 0, 0, 0],
            vec![0, 1, 0, 1],
            vec![0, 0, 2, 2],
            vec![0, 1, 2, 3],
        ];
        let s = ISemigroup::validate(meet, vec![0, 1, 2, 3]).unwrap();
        let sp = WeightedSpace::counting(1, Exponent::from_int(2).unwrap());
        let i = Matrix::identity(1);
        let z = Matrix::zero(1, 1);
        // v_1 = I, v_a = v_b = 0: not tight
        let v1 = vec![z.clone(), z.clone(), z.clone(), i.clone()];
        let r1 = is_tight_rep(&s, &v1, &sp).unwrap();
        assert!(!r1.is_tight());
        // v_1 = v_a = I, v_b = 0: tight
        let v2 = vec![z.clone(), i.clone(), z.clone(), i.clone()];
        let r2 = is_tight_rep(&s, &v2, &sp).unwrap();
        assert!(r2.is_tight());
        // the tight one is not injective: (v_1 - v_a) = 0 misses b
        assert!(!r2.injective);
    }
}
