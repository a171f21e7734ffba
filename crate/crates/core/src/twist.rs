//! 2-cocycle twists on finite groupoids, twisted inverse semigroup
//! actions with the (A1)–(A4) axioms, extraction of a twisted action
//! from a twisted groupoid via unimodular sections over a wide bisection
//! semigroup, reconstruction of the twisted groupoid from the action
//! (germ groupoid with the rebuilt cocycle), and comparison against the
//! original up to groupoid isomorphism and a coboundary.

use crate::algebra::{AlgElement, Carrier};
use crate::error::{Error, Result};
use crate::groupoid::{
    canonical_action, transformation_groupoid, BisectionSemigroup, FiniteGroupoid,
    TransformationGroupoid,
};
use crate::scalar::Scalar;
use crate::semigroup::SemigroupAction;
use std::collections::HashMap;

/// A normalized unimodular 2-cocycle, stored on all composable pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    values: HashMap<(usize, usize), Scalar>,
}

impl Cocycle {
    /// Evaluate `f` on composable pairs and verify normalization,
    /// unimodularity and the cocycle identity on all composable triples.
    pub fn new(g: &FiniteGroupoid, f: impl Fn(usize, usize) -> Scalar) -> Result<Self> {
        let mut values = HashMap::new();
        for (a, b, _) in g.composable_pairs() {
            values.insert((a, b), f(a, b));
        }
        let c = Cocycle { values };
        c.validate(g)?;
        Ok(c)
    }

    pub fn trivial(g: &FiniteGroupoid) -> Self {
        let values = g
            .composable_pairs()
            .map(|(a, b, _)| ((a, b), Scalar::one()))
            .collect();
        Cocycle { values }
    }

    pub fn from_values(g: &FiniteGroupoid, values: HashMap<(usize, usize), Scalar>) -> Result<Self> {
        let c = Cocycle { values };
        c.check_carrier(g)?;
        c.validate(g)?;
        Ok(c)
    }

    pub fn value(&self, a: usize, b: usize) -> &Scalar {
        &self.values[&(a, b)]
    }

    pub fn is_exact(&self) -> bool {
        self.values.values().all(|v| v.is_exact())
    }

    pub fn is_real(&self) -> bool {
        self.values.values().all(|v| v.is_real())
    }

    /// Defined exactly on the composable pairs of `g`.
    pub fn check_carrier(&self, g: &FiniteGroupoid) -> Result<()> {
        let mut count = 0usize;
        for (a, b, _) in g.composable_pairs() {
            if !self.values.contains_key(&(a, b)) {
                return Err(Error::Domain(format!(
                    "cocycle undefined on composable pair ({}, {})",
                    g.label(a),
                    g.label(b)
                )));
            }
            count += 1;
        }
        if count != self.values.len() {
            return Err(Error::Domain(
                "cocycle defined on non-composable pairs".into(),
            ));
        }
        Ok(())
    }

    fn validate(&self, g: &FiniteGroupoid) -> Result<()> {
        for (&(a, b), v) in &self.values {
            if !v.is_unimodular() {
                return Err(Error::Axiom(format!(
                    "cocycle value at ({}, {}) has modulus != 1",
                    g.label(a),
                    g.label(b)
                )));
            }
        }
        for a in 0..g.arrows() {
            if !self.value(g.r(a), a).is_one() || !self.value(a, g.d(a)).is_one() {
                return Err(Error::Axiom(format!(
                    "cocycle not normalized at arrow {}",
                    g.label(a)
                )));
            }
        }
        // σ(α,β)σ(αβ,γ) = σ(β,γ)σ(α,βγ) on composable triples
        for (alpha, beta, ab) in g.composable_pairs() {
            for gamma in 0..g.arrows() {
                if g.d(beta) == g.r(gamma) {
                    let bg = g.compose(beta, gamma).unwrap();
                    let lhs = self.value(alpha, beta) * self.value(ab, gamma);
                    let rhs = self.value(beta, gamma) * self.value(alpha, bg);
                    if lhs != rhs {
                        return Err(Error::Axiom(format!(
                            "cocycle identity fails at triple ({}, {}, {})",
                            g.label(alpha),
                            g.label(beta),
                            g.label(gamma)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The opposite twist: σ°(γ, η) = σ(η⁻¹, γ⁻¹).
    pub fn opposite(&self, g: &FiniteGroupoid) -> Cocycle {
        let values = g
            .composable_pairs()
            .map(|(a, b, _)| ((a, b), self.value(g.inv(b), g.inv(a)).clone()))
            .collect();
        Cocycle { values }
    }
}

/// One pass/fail line of an axiom report.
#[derive(Clone, Debug)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct TwistReport {
    pub checks: Vec<AxiomCheck>,
}

impl TwistReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// A twisted action (α, u) of an inverse semigroup on the functions of a
/// finite set: α is realized by the point maps h_t : X_{t*} → X_t of a
/// semigroup action (on commutative coefficients (A1) says exactly that
/// α is an action), and u(s, t) is a unimodular function supported on
/// X_{st}, stored densely on the ground set.
#[derive(Clone, Debug)]
pub struct TwistedAction {
    pub action: SemigroupAction,
    u: Vec<Vec<Scalar>>,
}

impl TwistedAction {
    pub fn new(action: SemigroupAction, u: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = action.semigroup.len();
        if u.len() != n * n || u.iter().any(|f| f.len() != action.ground) {
            return Err(Error::Domain(
                "u must assign a ground-length function to every pair".into(),
            ));
        }
        Ok(TwistedAction { action, u })
    }

    /// The untwisted action: u(s, t) = 1 on X_{st}.
    pub fn untwisted(action: SemigroupAction) -> Self {
        let n = action.semigroup.len();
        let mut u = vec![vec![Scalar::zero(); action.ground]; n * n];
        for s in 0..n {
            for t in 0..n {
                let st = action.semigroup.mul(s, t);
                for x in action.range(st) {
                    u[s * n + t][x] = Scalar::one();
                }
            }
        }
        TwistedAction { action, u }
    }

    pub fn u(&self, s: usize, t: usize) -> &[Scalar] {
        &self.u[s * self.action.semigroup.len() + t]
    }

    /// Structural identity of two twisted actions.
    pub fn same_as(&self, other: &TwistedAction) -> bool {
        self.action.semigroup == other.action.semigroup
            && self.action.ground == other.action.ground
            && self.action.maps == other.action.maps
            && self.u == other.u
    }

    pub fn set_u(&mut self, s: usize, t: usize, f: Vec<Scalar>) {
        let n = self.action.semigroup.len();
        self.u[s * n + t] = f;
    }

    /// Exhaustive check of the twisted-action axioms; the report lists
    /// each axiom with a pass flag and a witness for failures.
    pub fn validate(&self) -> TwistReport {
        let s = &self.action.semigroup;
        let n = s.len();
        let mut checks = Vec::new();

        // (A1): α is an action: h homomorphism with exact domains
        let a1 = self.action.validate();
        checks.push(AxiomCheck {
            name: "A1 action homomorphism".into(),
            pass: a1.is_ok(),
            witness: a1.err().map(|e| e.to_string()),
        });

        // u supported on X_{st} and unimodular there
        let mut support_witness = None;
        'support: for a in 0..n {
            for b in 0..n {
                let ab = s.mul(a, b);
                let xab = self.action.maps[ab].range();
                let f = self.u(a, b);
                for x in 0..self.action.ground {
                    let inside = xab.contains(&x);
                    if inside && !f[x].is_unimodular() {
                        support_witness = Some(format!(
                            "u({}, {}) not unimodular at point {}",
                            s.label(a),
                            s.label(b),
                            x
                        ));
                        break 'support;
                    }
                    if !inside && !f[x].is_zero() {
                        support_witness = Some(format!(
                            "u({}, {}) supported outside X_st at point {}",
                            s.label(a),
                            s.label(b),
                            x
                        ));
                        break 'support;
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            name: "u unimodular on X_st".into(),
            pass: support_witness.is_none(),
            witness: support_witness,
        });

        // (A2): u(s,t)(x) u(r,st)(h_r x) = u(r,s)(h_r x) u(rs,t)(h_r x)
        // for x ∈ X_{r*} ∩ X_{st}
        let mut a2_witness = None;
        'a2: for r in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let ab = s.mul(a, b);
                    let ra = s.mul(r, a);
                    let rab = s.mul(r, ab);
                    for x in self.action.maps[r].domain() {
                        if self.u(a, b)[x].is_zero() {
                            continue; // x outside X_{ab}
                        }
                        let y = self.action.maps[r].apply(x).unwrap();
                        let lhs = &self.u(a, b)[x] * &self.u(r, ab)[y];
                        let rhs = &self.u(r, a)[y] * &self.u(ra, b)[y];
                        if lhs != rhs {
                            a2_witness = Some(format!(
                                "A2 fails at (r, s, t, x) = ({}, {}, {}, {})",
                                s.label(r),
                                s.label(a),
                                s.label(b),
                                x
                            ));
                            break 'a2;
                        }
                        let _ = rab;
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            name: "A2 twist identity".into(),
            pass: a2_witness.is_none(),
            witness: a2_witness,
        });

        // (A3): u(e, f) = 1 on X_{ef}; u(t, t*t) = u(tt*, t) = 1 on X_t
        let mut a3_witness = None;
        'a3: for &e in s.idempotents() {
            for &f in s.idempotents() {
                let ef = s.mul(e, f);
                for x in self.action.maps[ef].range() {
                    if !self.u(e, f)[x].is_one() {
                        a3_witness = Some(format!(
                            "u({}, {}) != 1 at point {}",
                            s.label(e),
                            s.label(f),
                            x
                        ));
                        break 'a3;
                    }
                }
            }
        }
        if a3_witness.is_none() {
            'a3b: for t in 0..n {
                let ts = s.star(t);
                let tst = s.mul(ts, t);
                let tts = s.mul(t, ts);
                for x in self.action.maps[t].range() {
                    if !self.u(t, tst)[x].is_one() || !self.u(tts, t)[x].is_one() {
                        a3_witness = Some(format!(
                            "u(t, t*t) or u(tt*, t) != 1 for t = {} at point {}",
                            s.label(t),
                            x
                        ));
                        break 'a3b;
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            name: "A3 unit twists".into(),
            pass: a3_witness.is_none(),
            witness: a3_witness,
        });

        // (A4): u(t*, e)(x) u(t*e, t)(x) = u(t*, t)(x) for x ∈ X_{t*et}
        let mut a4_witness = None;
        'a4: for t in 0..n {
            let ts = s.star(t);
            for &e in s.idempotents() {
                let tse = s.mul(ts, e);
                let tset = s.mul(tse, t);
                for x in self.action.maps[tset].range() {
                    let lhs = &self.u(ts, e)[x] * &self.u(tse, t)[x];
                    if lhs != self.u(ts, t)[x] {
                        a4_witness = Some(format!(
                            "A4 fails at (t, e, x) = ({}, {}, {})",
                            s.label(t),
                            s.label(e),
                            x
                        ));
                        break 'a4;
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            name: "A4 conjugation identity".into(),
            pass: a4_witness.is_none(),
            witness: a4_witness,
        });

        TwistReport { checks }
    }
}

/// A choice of unimodular section per bisection-semigroup element,
/// aligned with `bisections[t].arrows()`.
#[derive(Clone, Debug)]
pub struct Sections(pub Vec<Vec<Scalar>>);

impl Sections {
    pub fn trivial(bs: &BisectionSemigroup) -> Self {
        Sections(
            bs.bisections
                .iter()
                .map(|b| vec![Scalar::one(); b.len()])
                .collect(),
        )
    }

    pub fn value_at(&self, t: usize, pos: usize) -> &Scalar {
        &self.0[t][pos]
    }
}

/// Result of extracting a twisted action from a twisted groupoid.
#[derive(Clone, Debug)]
pub struct TwistedExtraction {
    pub twisted: TwistedAction,
    pub sections: Sections,
}

/// Extract the twisted action (α, u) of a wide bisection semigroup on
/// the unit space of a twisted groupoid: α_U(a) = c_U * a * c_U^* and
/// u(U, V) = c_U * c_V * c_UV^*, computed in the convolution algebra.
pub fn extract_twisted_action(
    g: &FiniteGroupoid,
    sigma: &Cocycle,
    bs: &BisectionSemigroup,
    sections: Sections,
) -> Result<TwistedExtraction> {
    if !bs.wide {
        return Err(Error::Domain(
            "bisection semigroup must be wide to model the groupoid".into(),
        ));
    }
    let s = &bs.semigroup;
    if sections.0.len() != s.len() {
        return Err(Error::Domain("one section per semigroup element".into()));
    }
    for (t, vals) in sections.0.iter().enumerate() {
        let b = &bs.bisections[t];
        if vals.len() != b.len() {
            return Err(Error::Domain(format!(
                "section {} length mismatch",
                s.label(t)
            )));
        }
        for (pos, v) in vals.iter().enumerate() {
            if !v.is_unimodular() {
                return Err(Error::Domain(format!(
                    "section for {} not unimodular at position {}",
                    s.label(t),
                    pos
                )));
            }
            let a = b.arrows()[pos];
            if g.is_unit(a) && !v.is_one() {
                return Err(Error::Domain(format!(
                    "sections must equal 1 on unit-space bisections (element {})",
                    s.label(t)
                )));
            }
        }
    }
    let carrier = Carrier::new(g.clone(), sigma.clone())?;
    let action = canonical_action(g, bs)?;
    let section_elem = |t: usize| -> AlgElement {
        let mut e = AlgElement::zero(carrier.clone());
        for (pos, &a) in bs.bisections[t].arrows().iter().enumerate() {
            e.set_coeff(a, sections.0[t][pos].clone());
        }
        e
    };
    // α_U(δ_x) = c_U * δ_x * c_U^* must be exactly δ_{h_U(x)}
    for t in 0..s.len() {
        let c_t = section_elem(t);
        for x in action.maps[t].domain() {
            let dx = AlgElement::unit_indicator(carrier.clone(), &[x]);
            let moved = c_t.convolve(&dx)?.convolve(&c_t.involute())?;
            let y = action.maps[t].apply(x).unwrap();
            let expected = AlgElement::unit_indicator(carrier.clone(), &[y]);
            if moved != expected {
                return Err(Error::Axiom(format!(
                    "c_U * δ_x * c_U^* is not δ_h(x) for U = {}, x = {}",
                    s.label(t),
                    x
                )));
            }
        }
    }
    // u(U, V) = c_U * c_V * c_UV^*, a unimodular function on X_UV ⊆ X
    let n = s.len();
    let mut u = vec![vec![Scalar::zero(); action.ground]; n * n];
    for a in 0..n {
        let c_a = section_elem(a);
        for b in 0..n {
            let c_b = section_elem(b);
            let ab = s.mul(a, b);
            let c_ab_star = section_elem(ab).involute();
            let prod = c_a.convolve(&c_b)?.convolve(&c_ab_star)?;
            let mut dense = vec![Scalar::zero(); action.ground];
            for arrow in prod.support() {
                let pos = g.unit_pos(arrow).ok_or_else(|| {
                    Error::Axiom(format!(
                        "u({}, {}) supported off the unit space at arrow {}",
                        s.label(a),
                        s.label(b),
                        g.label(arrow)
                    ))
                })?;
                dense[pos] = prod.coeff(arrow).clone();
            }
            u[a * n + b] = dense;
        }
    }
    let twisted = TwistedAction::new(action, u)?;
    let report = twisted.validate();
    if !report.all_pass() {
        let fail = report.first_failure().unwrap();
        return Err(Error::Axiom(format!(
            "extracted action violates {}: {}",
            fail.name,
            fail.witness.clone().unwrap_or_default()
        )));
    }
    Ok(TwistedExtraction { twisted, sections })
}

/// The transformation groupoid of a twisted action together with the
/// cocycle induced by the canonical basis sections b_γ = [δ_{r(γ)}, t, x]
/// at the canonical germ representatives.
#[derive(Clone, Debug)]
pub struct ModeledGroupoid {
    pub tg: TransformationGroupoid,
    pub cocycle: Cocycle,
    pub(crate) twisted_action: TwistedAction,
}

impl ModeledGroupoid {
    pub fn twisted(&self) -> &TwistedAction {
        &self.twisted_action
    }
}

pub fn model_twisted_action(ta: &TwistedAction) -> Result<ModeledGroupoid> {
    let report = ta.validate();
    if !report.all_pass() {
        let fail = report.first_failure().unwrap();
        return Err(Error::Axiom(format!(
            "twisted action invalid ({}): {}",
            fail.name,
            fail.witness.clone().unwrap_or_default()
        )));
    }
    let tg = transformation_groupoid(&ta.action)?;
    let s = &ta.action.semigroup;
    let g = &tg.groupoid;
    // σ̃(γ, η) for germs γ = [s1, y], η = [t1, x]:
    //   u(s1, t1)(r) · u(vv*, s1 t1)(r) · conj(u(vv*, t')(r))
    // where r = h_{s1 t1}(x), (t', x) is the canonical representative of
    // the product germ and v ≤ s1 t1, t' with x ∈ dom h_v.
    let mut values = HashMap::new();
    for (gid, eta, _prod) in g.composable_pairs().collect::<Vec<_>>() {
        let (s1, _y) = tg.reps[gid];
        let (t1, x) = tg.reps[eta];
        let st = s.mul(s1, t1);
        let r_pt = ta
            .action
            .maps[st]
            .apply(x)
            .expect("composable germs have x in dom h_st");
        let prod_germ = tg.germ_of[&(st, x)];
        let (t_can, _) = tg.reps[prod_germ];
        let v = (0..s.len())
            .find(|&v| {
                s.natural_order(v, st)
                    && s.natural_order(v, t_can)
                    && ta.action.maps[v].apply(x).is_some()
            })
            .expect("equal germs admit a common minorant");
        let vv = s.mul(v, s.star(v));
        let c0 = &ta.u(s1, t1)[r_pt];
        let adj = &ta.u(vv, st)[r_pt] * &ta.u(vv, t_can)[r_pt].unimodular_inv();
        values.insert((gid, eta), c0 * &adj);
    }
    let cocycle = Cocycle::from_values(g, values)?;
    Ok(ModeledGroupoid {
        tg: tg.clone(),
        cocycle,
        twisted_action: ta.clone(),
    })
}

const ISO_NODE_CAP: usize = 2_000_000;

/// Backtracking groupoid isomorphism search with forced-composition
/// propagation; adequate for desk-scale groupoids (≤ 30 arrows).
pub fn groupoid_isomorphisms(
    a: &FiniteGroupoid,
    b: &FiniteGroupoid,
    max_found: usize,
) -> Result<Vec<Vec<usize>>> {
    if a.arrows() != b.arrows() || a.units().len() != b.units().len() {
        return Ok(Vec::new());
    }
    let n = a.arrows();
    // order: units first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (!a.is_unit(x), x));
    let mut map: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    let mut found = Vec::new();
    let mut nodes = 0usize;

    struct Ctx<'x> {
        a: &'x FiniteGroupoid,
        b: &'x FiniteGroupoid,
        order: Vec<usize>,
        max_found: usize,
    }

    fn consistent(ctx: &Ctx, map: &[Option<usize>], x: usize, y: usize) -> bool {
        let (a, b) = (ctx.a, ctx.b);
        if a.is_unit(x) != b.is_unit(y) {
            return false;
        }
        if let Some(ry) = map[a.r(x)] {
            if b.r(y) != ry {
                return false;
            }
        }
        if let Some(dy) = map[a.d(x)] {
            if b.d(y) != dy {
                return false;
            }
        }
        if let Some(iy) = map[a.inv(x)] {
            if b.inv(y) != iy {
                return false;
            }
        }
        true
    }

    /// Assign x ↦ y and propagate forced images through compositions and
    /// inverses; returns the undo log or None on conflict.
    fn assign(
        ctx: &Ctx,
        map: &mut [Option<usize>],
        used: &mut [bool],
        x: usize,
        y: usize,
    ) -> Option<Vec<usize>> {
        let mut log = Vec::new();
        let mut queue = vec![(x, y)];
        while let Some((x, y)) = queue.pop() {
            match map[x] {
                Some(prev) => {
                    if prev != y {
                        undo(map, used, &log);
                        return None;
                    }
                    continue;
                }
                None => {
                    if used[y] || !consistent(ctx, map, x, y) {
                        undo(map, used, &log);
                        return None;
                    }
                    map[x] = Some(y);
                    used[y] = true;
                    log.push(x);
                }
            }
            let (a, b) = (ctx.a, ctx.b);
            queue.push((a.inv(x), b.inv(y)));
            for z in 0..a.arrows() {
                if let Some(zy) = map[z] {
                    if let Some(p) = a.compose(x, z) {
                        match b.compose(y, zy) {
                            Some(q) => queue.push((p, q)),
                            None => {
                                undo(map, used, &log);
                                return None;
                            }
                        }
                    }
                    if let Some(p) = a.compose(z, x) {
                        match b.compose(zy, y) {
                            Some(q) => queue.push((p, q)),
                            None => {
                                undo(map, used, &log);
                                return None;
                            }
                        }
                    }
                }
            }
        }
        Some(log)
    }

    fn undo(map: &mut [Option<usize>], used: &mut [bool], log: &[usize]) {
        for &x in log {
            if let Some(y) = map[x].take() {
                used[y] = false;
            }
        }
    }

    fn search(
        ctx: &Ctx,
        map: &mut [Option<usize>],
        used: &mut [bool],
        found: &mut Vec<Vec<usize>>,
        nodes: &mut usize,
        depth: usize,
    ) -> Result<()> {
        if found.len() >= ctx.max_found {
            return Ok(());
        }
        *nodes += 1;
        if *nodes > ISO_NODE_CAP {
            return Err(Error::BoundExceeded(
                "isomorphism search node cap exceeded".into(),
            ));
        }
        let next = ctx.order[depth..].iter().copied().find(|&x| map[x].is_none());
        let Some(x) = next else {
            found.push(map.iter().map(|m| m.unwrap()).collect());
            return Ok(());
        };
        for y in 0..ctx.b.arrows() {
            if used[y] {
                continue;
            }
            if let Some(log) = assign(ctx, map, used, x, y) {
                search(ctx, map, used, found, nodes, depth)?;
                undo(map, used, &log);
                if found.len() >= ctx.max_found {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    let ctx = Ctx {
        a,
        b,
        order,
        max_found,
    };
    search(&ctx, &mut map, &mut used, &mut found, &mut nodes, 0)?;
    Ok(found)
}

pub fn groupoid_iso_check(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<Option<Vec<usize>>> {
    Ok(groupoid_isomorphisms(a, b, 1)?.into_iter().next())
}

/// Verdict of the twisted-groupoid round trip.
#[derive(Clone, Debug)]
pub enum CompareVerdict {
    /// Isomorphism found and the twists agree up to a coboundary.
    Match { iso: Vec<usize>, note: String },
    Mismatch(String),
    Inconclusive(String),
}

impl CompareVerdict {
    pub fn is_match(&self) -> bool {
        matches!(self, CompareVerdict::Match { .. })
    }
}

/// Rebuild the twisted groupoid of a twisted action and compare it to
/// `(g, sigma)`: search for a groupoid isomorphism carrying the rebuilt
/// twist to σ up to a coboundary. When the action came from
/// `extract_twisted_action`, passing the bisection semigroup and the
/// section choice checks the canonical isomorphism with the explicit
/// section-induced coboundary, exactly.
pub fn rebuild_and_compare(
    ta: &TwistedAction,
    g: &FiniteGroupoid,
    sigma: &Cocycle,
    hint: Option<(&BisectionSemigroup, &Sections)>,
) -> Result<CompareVerdict> {
    let model = model_twisted_action(ta)?;
    let rg = &model.tg.groupoid;
    if rg.arrows() != g.arrows() || rg.units().len() != g.units().len() {
        return Ok(CompareVerdict::Mismatch(format!(
            "rebuilt groupoid has {} arrows / {} units, original {} / {}",
            rg.arrows(),
            rg.units().len(),
            g.arrows(),
            g.units().len()
        )));
    }

    if let Some((bs, sections)) = hint {
        // canonical map: germ with representative (t, x) goes to the
        // arrow of U_t whose domain is the unit at point x
        let mut iso = Vec::with_capacity(rg.arrows());
        let mut ok = true;
        let mut beta = Vec::with_capacity(rg.arrows());
        for gid in 0..rg.arrows() {
            let (t, x) = model.tg.reps[gid];
            match bs.bisections[t].arrow_with_domain(g, g.unit_at(x)) {
                Some(arrow) => {
                    let pos = bs.bisections[t]
                        .arrows()
                        .iter()
                        .position(|&a| a == arrow)
                        .unwrap();
                    iso.push(arrow);
                    beta.push(sections.value_at(t, pos).clone());
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && is_bijection(&iso, g.arrows()) && is_groupoid_hom(rg, g, &iso) {
            // σ̃(γ,η) β(γη) = β(γ) β(η) σ(Θγ, Θη)
            let mut exact = true;
            for (gid, eta, prod) in rg.composable_pairs() {
                let lhs = model.cocycle.value(gid, eta) * &beta[prod];
                let rhs = &(&beta[gid] * &beta[eta]) * sigma.value(iso[gid], iso[eta]);
                if lhs != rhs {
                    exact = false;
                    break;
                }
            }
            if exact {
                return Ok(CompareVerdict::Match {
                    iso,
                    note: "canonical isomorphism, section coboundary verified exactly".into(),
                });
            }
        }
    }

    let isos = match groupoid_isomorphisms(rg, g, 64) {
        Ok(isos) => isos,
        Err(Error::BoundExceeded(m)) => return Ok(CompareVerdict::Inconclusive(m)),
        Err(e) => return Err(e),
    };
    if isos.is_empty() {
        return Ok(CompareVerdict::Mismatch(
            "no groupoid isomorphism exists".into(),
        ));
    }
    let exhaustive = isos.len() < 64;
    for iso in &isos {
        match twist_matches(rg, &model.cocycle, sigma, iso) {
            TwistMatchResult::Yes(note) => {
                return Ok(CompareVerdict::Match {
                    iso: iso.clone(),
                    note,
                });
            }
            TwistMatchResult::No => {}
            TwistMatchResult::Unknown(m) => {
                return Ok(CompareVerdict::Inconclusive(m));
            }
        }
    }
    if exhaustive {
        Ok(CompareVerdict::Mismatch(
            "no isomorphism carries the rebuilt twist to the original up to coboundary".into(),
        ))
    } else {
        Ok(CompareVerdict::Inconclusive(
            "isomorphism enumeration truncated before a twist match was found".into(),
        ))
    }
}

fn is_bijection(iso: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    iso.iter().all(|&y| {
        if y < n && !seen[y] {
            seen[y] = true;
            true
        } else {
            false
        }
    })
}

fn is_groupoid_hom(a: &FiniteGroupoid, b: &FiniteGroupoid, iso: &[usize]) -> bool {
    for x in 0..a.arrows() {
        if b.r(iso[x]) != iso[a.r(x)] || b.d(iso[x]) != iso[a.d(x)] || b.inv(iso[x]) != iso[a.inv(x)]
        {
            return false;
        }
    }
    for (x, y, z) in a.composable_pairs() {
        if b.compose(iso[x], iso[y]) != Some(iso[z]) {
            return false;
        }
    }
    true
}

enum TwistMatchResult {
    Yes(String),
    No,
    Unknown(String),
}

/// Decide whether τ(γ,η) := σ(Θγ, Θη)·conj(σ̃(γ,η)) is a coboundary
/// δβ(γ,η) = β(γ)β(η)/β(γη) with β unimodular and 1 on units.
fn twist_matches(
    rg: &FiniteGroupoid,
    rebuilt: &Cocycle,
    sigma: &Cocycle,
    iso: &[usize],
) -> TwistMatchResult {
    let tau: HashMap<(usize, usize), Scalar> = rg
        .composable_pairs()
        .map(|(a, b, _)| {
            (
                (a, b),
                sigma.value(iso[a], iso[b]) * &rebuilt.value(a, b).unimodular_inv(),
            )
        })
        .collect();
    if tau.values().all(|v| v.is_one()) {
        return TwistMatchResult::Yes("twists agree on the nose".into());
    }
    let all_signs = tau.values().all(|v| {
        v == &Scalar::from_int(1) || v == &Scalar::from_int(-1)
    });
    if all_signs {
        // β(γ)β(η)β(γη) = τ as a linear system over F₂, units pinned to 1
        let n = rg.arrows();
        let mut rows: Vec<(Vec<bool>, bool)> = Vec::new();
        for (a, b, c) in rg.composable_pairs() {
            let mut row = vec![false; n];
            for x in [a, b, c] {
                if !rg.is_unit(x) {
                    row[x] ^= true;
                }
            }
            let rhs = tau[&(a, b)] == Scalar::from_int(-1);
            rows.push((row, rhs));
        }
        return if f2_solvable(&mut rows, n) {
            TwistMatchResult::Yes("sign coboundary found by F2 elimination".into())
        } else {
            TwistMatchResult::No
        };
    }
    // complex values: on components with cyclic isotropy every unimodular
    // 2-cocycle class is trivial (the circle is divisible)
    if components_have_cyclic_isotropy(rg) {
        TwistMatchResult::Yes("complex twists on cyclic-isotropy components are coboundaries".into())
    } else {
        TwistMatchResult::Unknown(
            "complex twist comparison on non-cyclic isotropy is undecided".into(),
        )
    }
}

fn f2_solvable(rows: &mut Vec<(Vec<bool>, bool)>, n: usize) -> bool {
    let mut rank_rows: Vec<(Vec<bool>, bool)> = Vec::new();
    'next: for (row, mut rhs) in rows.drain(..) {
        let mut row = row;
        for (r, b) in &rank_rows {
            let pivot = r.iter().position(|&v| v).unwrap();
            if row[pivot] {
                for i in 0..n {
                    row[i] ^= r[i];
                }
                rhs ^= b;
            }
        }
        if row.iter().all(|&v| !v) {
            if rhs {
                return false;
            }
            continue 'next;
        }
        rank_rows.push((row, rhs));
    }
    true
}

fn components_have_cyclic_isotropy(g: &FiniteGroupoid) -> bool {
    for &u in g.units() {
        let iso: Vec<usize> = (0..g.arrows())
            .filter(|&a| g.r(a) == u && g.d(a) == u)
            .collect();
        let is_cyclic = iso.iter().any(|&gen| {
            let mut seen = vec![gen];
            let mut cur = gen;
            loop {
                cur = match g.compose(cur, gen) {
                    Some(c) => c,
                    None => return false,
                };
                if cur == gen {
                    break;
                }
                if seen.contains(&cur) {
                    break;
                }
                seen.push(cur);
            }
            seen.len() == iso.len()
        });
        if !is_cyclic && iso.len() > 1 {
            return false;
        }
    }
    true
}
