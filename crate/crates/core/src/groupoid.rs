//! Finite (discrete étale) groupoids: arrow tables with exhaustive axiom
//! validation, the pair/group constructors, transformation groupoids of
//! inverse semigroup actions (germ quotient), Deaconu–Renault groupoids
//! of aperiodic partial maps, and bisections with their inverse
//! semigroup and wideness verdict.

use crate::error::{Error, Result};
use crate::semigroup::{
    close_semigroup, GroupTable, ISemigroup, PartialBijection, SemigroupAction,
};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroupoid {
    n: usize,
    units: Vec<usize>,
    unit_pos: Vec<Option<usize>>,
    range: Vec<usize>,
    domain: Vec<usize>,
    inverse: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
    labels: Vec<String>,
}

impl FiniteGroupoid {
    /// Validate groupoid tables exhaustively: units compose as
    /// identities, r and d land in units and restrict to the identity on
    /// units, composability is governed by d(γ) = r(η), composition is
    /// associative, and inverses satisfy γγ⁻¹ = r(γ), γ⁻¹γ = d(γ).
    pub fn validate(
        n: usize,
        range: Vec<usize>,
        domain: Vec<usize>,
        inverse: Vec<usize>,
        compose_pairs: Vec<(usize, usize, usize)>,
    ) -> Result<Self> {
        if range.len() != n || domain.len() != n || inverse.len() != n {
            return Err(Error::Domain("table lengths do not match arrow count".into()));
        }
        if range.iter().chain(&domain).chain(&inverse).any(|&v| v >= n) {
            return Err(Error::Domain("arrow index out of range".into()));
        }
        let mut compose = HashMap::new();
        for (a, b, c) in compose_pairs {
            if a >= n || b >= n || c >= n {
                return Err(Error::Domain("arrow index out of range in compose".into()));
            }
            if compose.insert((a, b), c).is_some() {
                return Err(Error::Domain(format!(
                    "duplicate composition entry ({}, {})",
                    a, b
                )));
            }
        }
        let units: Vec<usize> = {
            // units are the arrows appearing as ranges/domains
            let mut u: BTreeSet<usize> = BTreeSet::new();
            u.extend(range.iter().copied());
            u.extend(domain.iter().copied());
            u.into_iter().collect()
        };
        let mut unit_pos = vec![None; n];
        for (p, &u) in units.iter().enumerate() {
            unit_pos[u] = Some(p);
        }
        let g = FiniteGroupoid {
            n,
            units,
            unit_pos,
            range,
            domain,
            inverse,
            compose,
            labels: (0..n).map(|i| format!("a{}", i)).collect(),
        };
        g.check_axioms()?;
        Ok(g)
    }

    fn check_axioms(&self) -> Result<()> {
        for &u in &self.units {
            if self.range[u] != u || self.domain[u] != u {
                return Err(Error::Axiom(format!(
                    "unit {} does not have itself as range and domain",
                    u
                )));
            }
        }
        for a in 0..self.n {
            let (r, d) = (self.range[a], self.domain[a]);
            if self.unit_pos[r].is_none() || self.unit_pos[d].is_none() {
                return Err(Error::Axiom(format!("arrow {} has non-unit endpoints", a)));
            }
            // inverse laws
            let i = self.inverse[a];
            if self.inverse[i] != a {
                return Err(Error::Axiom(format!("inverse not involutive at arrow {}", a)));
            }
            if self.range[i] != d || self.domain[i] != r {
                return Err(Error::Axiom(format!(
                    "inverse of arrow {} has wrong endpoints",
                    a
                )));
            }
            if self.compose.get(&(a, i)) != Some(&r) || self.compose.get(&(i, a)) != Some(&d) {
                return Err(Error::Axiom(format!(
                    "γγ⁻¹ or γ⁻¹γ is not the expected unit at arrow {}",
                    a
                )));
            }
            // unit neutrality
            if self.compose.get(&(r, a)) != Some(&a) || self.compose.get(&(a, d)) != Some(&a) {
                return Err(Error::Axiom(format!(
                    "units do not act neutrally on arrow {}",
                    a
                )));
            }
        }
        // composability exactly on d(γ) = r(η), endpoints of composites
        for a in 0..self.n {
            for b in 0..self.n {
                match self.compose.get(&(a, b)) {
                    Some(&c) => {
                        if self.domain[a] != self.range[b] {
                            return Err(Error::Axiom(format!(
                                "arrows {} and {} compose but are not composable",
                                a, b
                            )));
                        }
                        if self.range[c] != self.range[a] || self.domain[c] != self.domain[b] {
                            return Err(Error::Axiom(format!(
                                "composite of {} and {} has wrong endpoints",
                                a, b
                            )));
                        }
                    }
                    None => {
                        if self.domain[a] == self.range[b] {
                            return Err(Error::Axiom(format!(
                                "composable arrows {} and {} have no composite",
                                a, b
                            )));
                        }
                    }
                }
            }
        }
        // associativity over all composable triples
        for (&(a, b), &ab) in &self.compose {
            for c in 0..self.n {
                if self.domain[b] == self.range[c] {
                    let bc = self.compose[&(b, c)];
                    if self.compose.get(&(ab, c)) != self.compose.get(&(a, bc)) {
                        return Err(Error::Axiom(format!(
                            "associativity fails at triple ({}, {}, {})",
                            a, b, c
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub fn arrows(&self) -> usize {
        self.n
    }

    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.unit_pos[a].is_some()
    }

    /// Position of a unit arrow in the unit list (the "point" index).
    pub fn unit_pos(&self, a: usize) -> Option<usize> {
        self.unit_pos[a]
    }

    pub fn unit_at(&self, pos: usize) -> usize {
        self.units[pos]
    }

    pub fn r(&self, a: usize) -> usize {
        self.range[a]
    }

    pub fn d(&self, a: usize) -> usize {
        self.domain[a]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.compose.get(&(a, b)).copied()
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    /// Arrows grouped by range unit position.
    pub fn range_fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.units.len()];
        for a in 0..self.n {
            fibers[self.unit_pos[self.range[a]].unwrap()].push(a);
        }
        fibers
    }

    /// Arrows grouped by domain unit position.
    pub fn domain_fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.units.len()];
        for a in 0..self.n {
            fibers[self.unit_pos[self.domain[a]].unwrap()].push(a);
        }
        fibers
    }

    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.compose.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    /// The pair groupoid on n points: arrows (i, j), units (i, i).
    pub fn pair(n: usize) -> Self {
        assert!(n >= 1);
        let idx = |i: usize, j: usize| i * n + j;
        let arrows = n * n;
        let mut range = vec![0; arrows];
        let mut domain = vec![0; arrows];
        let mut inverse = vec![0; arrows];
        let mut labels = vec![String::new(); arrows];
        for i in 0..n {
            for j in 0..n {
                range[idx(i, j)] = idx(i, i);
                domain[idx(i, j)] = idx(j, j);
                inverse[idx(i, j)] = idx(j, i);
                labels[idx(i, j)] = format!("({},{})", i, j);
            }
        }
        let mut compose = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    compose.push((idx(i, j), idx(j, k), idx(i, k)));
                }
            }
        }
        FiniteGroupoid::validate(arrows, range, domain, inverse, compose)
            .unwrap()
            .with_labels(labels)
    }

    /// A finite group as a one-unit groupoid.
    pub fn from_group(g: &GroupTable) -> Self {
        let n = g.order();
        let u = g.unit();
        let range = vec![u; n];
        let domain = vec![u; n];
        let inverse: Vec<usize> = (0..n).map(|a| g.inv(a)).collect();
        let mut compose = Vec::new();
        for a in 0..n {
            for b in 0..n {
                compose.push((a, b, g.mul(a, b)));
            }
        }
        let labels = (0..n).map(|a| g.label(a).to_string()).collect();
        FiniteGroupoid::validate(n, range, domain, inverse, compose)
            .unwrap()
            .with_labels(labels)
    }
}

/// A bisection: a set of arrows on which both r and d are injective.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bisection {
    arrows: Vec<usize>, // sorted
}

impl Bisection {
    pub fn new(g: &FiniteGroupoid, arrows: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = arrows.into_iter().collect();
        let mut seen_r = BTreeSet::new();
        let mut seen_d = BTreeSet::new();
        for &a in &set {
            if a >= g.arrows() {
                return Err(Error::Domain("arrow out of range".into()));
            }
            if !seen_r.insert(g.r(a)) || !seen_d.insert(g.d(a)) {
                return Err(Error::Domain(
                    "range or domain not injective on bisection".into(),
                ));
            }
        }
        Ok(Bisection {
            arrows: set.into_iter().collect(),
        })
    }

    pub fn empty() -> Self {
        Bisection { arrows: Vec::new() }
    }

    pub fn singleton(a: usize) -> Self {
        Bisection { arrows: vec![a] }
    }

    pub fn unit_space(g: &FiniteGroupoid) -> Self {
        Bisection {
            arrows: g.units().to_vec(),
        }
    }

    pub fn arrows(&self) -> &[usize] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.arrows.binary_search(&a).is_ok()
    }

    pub fn is_subset_of(&self, other: &Bisection) -> bool {
        self.arrows.iter().all(|&a| other.contains(a))
    }

    pub fn intersect(&self, other: &Bisection) -> Bisection {
        Bisection {
            arrows: self
                .arrows
                .iter()
                .copied()
                .filter(|&a| other.contains(a))
                .collect(),
        }
    }

    /// U·V = {γη : γ ∈ U, η ∈ V composable}; a bisection again.
    pub fn product(&self, other: &Bisection, g: &FiniteGroupoid) -> Bisection {
        let mut out = BTreeSet::new();
        for &a in &self.arrows {
            for &b in &other.arrows {
                if let Some(c) = g.compose(a, b) {
                    out.insert(c);
                }
            }
        }
        let b = Bisection {
            arrows: out.into_iter().collect(),
        };
        debug_assert!(Bisection::new(g, b.arrows.iter().copied()).is_ok());
        b
    }

    pub fn inverse(&self, g: &FiniteGroupoid) -> Bisection {
        let mut arrows: Vec<usize> = self.arrows.iter().map(|&a| g.inv(a)).collect();
        arrows.sort_unstable();
        Bisection { arrows }
    }

    /// The arrow of the bisection with the given domain unit, if any.
    pub fn arrow_with_domain(&self, g: &FiniteGroupoid, d_unit: usize) -> Option<usize> {
        self.arrows.iter().copied().find(|&a| g.d(a) == d_unit)
    }

    pub fn arrow_with_range(&self, g: &FiniteGroupoid, r_unit: usize) -> Option<usize> {
        self.arrows.iter().copied().find(|&a| g.r(a) == r_unit)
    }
}

/// An inverse semigroup of bisections, with its wideness verdict.
#[derive(Clone, Debug)]
pub struct BisectionSemigroup {
    pub semigroup: ISemigroup,
    pub bisections: Vec<Bisection>,
    pub wide: bool,
}

/// Closure of a family of bisections under product and inverse.
/// Wide iff the closure covers the arrows and every pairwise
/// intersection is a union of members.
pub fn bisection_semigroup(
    g: &FiniteGroupoid,
    gens: &[Bisection],
    bound: usize,
) -> Result<BisectionSemigroup> {
    if gens.is_empty() {
        return Err(Error::Domain("need at least one bisection".into()));
    }
    let (elems, mult, star) = close_semigroup(
        gens.to_vec(),
        |a: &Bisection, b: &Bisection| a.product(b, g),
        |a: &Bisection| a.inverse(g),
        bound,
    )?;
    let n = elems.len();
    let mult_rows: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| mult[i * n + j]).collect())
        .collect();
    let semigroup = ISemigroup::validate(mult_rows, star)?;
    // wideness
    let mut covered = vec![false; g.arrows()];
    for b in &elems {
        for &a in b.arrows() {
            covered[a] = true;
        }
    }
    let covers = covered.into_iter().all(|c| c);
    let intersections_ok = covers && {
        let mut ok = true;
        'outer: for u in &elems {
            for v in &elems {
                let i = u.intersect(v);
                let mut seen: BTreeSet<usize> = BTreeSet::new();
                for w in &elems {
                    if w.is_subset_of(&i) {
                        seen.extend(w.arrows().iter().copied());
                    }
                }
                if seen.len() != i.len() {
                    ok = false;
                    break 'outer;
                }
            }
        }
        ok
    };
    Ok(BisectionSemigroup {
        semigroup,
        bisections: elems,
        wide: covers && intersections_ok,
    })
}

/// All singleton bisections, generating a wide inverse semigroup.
pub fn singleton_bisections(g: &FiniteGroupoid) -> Vec<Bisection> {
    (0..g.arrows()).map(Bisection::singleton).collect()
}

/// The canonical action of a bisection semigroup on the unit space:
/// h_U : d(U) → r(U), d(γ) ↦ r(γ).
pub fn canonical_action(g: &FiniteGroupoid, bs: &BisectionSemigroup) -> Result<SemigroupAction> {
    let ground = g.units().len();
    let mut maps = Vec::with_capacity(bs.bisections.len());
    for b in &bs.bisections {
        let pairs: Vec<(usize, usize)> = b
            .arrows()
            .iter()
            .map(|&a| {
                (
                    g.unit_pos(g.d(a)).expect("domain is a unit"),
                    g.unit_pos(g.r(a)).expect("range is a unit"),
                )
            })
            .collect();
        maps.push(PartialBijection::from_pairs(ground, &pairs)?);
    }
    let action = SemigroupAction {
        semigroup: bs.semigroup.clone(),
        ground,
        maps,
    };
    action.validate()?;
    Ok(action)
}

/// The transformation groupoid S ⋉ X of an inverse semigroup action,
/// with germ bookkeeping: arrows are classes [t, x] for x ∈ dom h_t,
/// where (t, x) ~ (t', x) iff some v ≤ t, t' has x ∈ dom h_v.
#[derive(Clone, Debug)]
pub struct TransformationGroupoid {
    pub groupoid: FiniteGroupoid,
    /// canonical representative (t, x) of each germ; idempotent t
    /// preferred, then smallest t
    pub reps: Vec<(usize, usize)>,
    /// (t, x) -> germ arrow id, for every pair with x ∈ dom h_t
    pub germ_of: HashMap<(usize, usize), usize>,
    /// the open bisections U_t = {[t, x]}
    pub bisections: Vec<Bisection>,
    /// ground point of each unit position of the groupoid
    pub point_of_unit_pos: Vec<usize>,
    /// unit arrow at each ground point (actions here are non-degenerate)
    pub unit_at_point: Vec<usize>,
}

pub fn transformation_groupoid(action: &SemigroupAction) -> Result<TransformationGroupoid> {
    action.validate()?;
    if !action.is_nondegenerate() {
        return Err(Error::Domain(
            "action is degenerate: domains do not cover the ground set".into(),
        ));
    }
    let s = &action.semigroup;
    let x_n = action.ground;
    // collect pairs (t, x) with x in dom h_t
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for t in 0..s.len() {
        for x in action.maps[t].domain() {
            pairs.push((t, x));
        }
    }
    let pair_id: HashMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    // union-find over germ equivalence
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    // (t, x) ~ (t', x) via any v ≤ t, t' with x ∈ dom h_v; it is enough
    // to merge each (t, x) with (v, x) for all v ≤ t
    for &(t, x) in &pairs {
        for v in 0..s.len() {
            if v != t && s.natural_order(v, t) && action.maps[v].apply(x).is_some() {
                let a = find(&mut parent, pair_id[&(t, x)]);
                let b = find(&mut parent, pair_id[&(v, x)]);
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    // choose canonical representatives
    let mut class_best: HashMap<usize, (usize, usize)> = HashMap::new();
    for (i, &(t, x)) in pairs.iter().enumerate() {
        let root = find(&mut parent, i);
        let cand = (t, x);
        let better = match class_best.get(&root) {
            None => true,
            Some(&(bt, _)) => {
                let cand_idem = s.is_idempotent(t);
                let best_idem = s.is_idempotent(bt);
                (cand_idem && !best_idem) || (cand_idem == best_idem && t < bt)
            }
        };
        if better {
            class_best.insert(root, cand);
        }
    }
    // stable ordering of germ classes: by representative
    let mut roots: Vec<usize> = class_best.keys().copied().collect();
    roots.sort_by_key(|r| class_best[r]);
    let reps: Vec<(usize, usize)> = roots.iter().map(|r| class_best[r]).collect();
    let root_of_arrow: HashMap<usize, usize> =
        roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut germ_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, &p) in pairs.iter().enumerate() {
        let root = find(&mut parent, i);
        germ_of.insert(p, root_of_arrow[&root]);
    }
    let n = reps.len();
    // endpoints: r([t,x]) = h_t(x), d([t,x]) = x; units are germs of
    // idempotents at their domain points
    let mut unit_at_point: Vec<Option<usize>> = vec![None; x_n];
    for (gid, &(t, x)) in reps.iter().enumerate() {
        if s.is_idempotent(t) {
            unit_at_point[x] = Some(gid);
        }
    }
    let unit_at_point: Vec<usize> = (0..x_n)
        .map(|x| {
            unit_at_point[x].ok_or_else(|| {
                Error::Axiom(format!("no unit germ at point {} (degenerate action)", x))
            })
        })
        .collect::<Result<_>>()?;
    let mut range = vec![0usize; n];
    let mut domain = vec![0usize; n];
    let mut inverse = vec![0usize; n];
    for (gid, &(t, x)) in reps.iter().enumerate() {
        let y = action.maps[t].apply(x).expect("x in dom h_t");
        range[gid] = unit_at_point[y];
        domain[gid] = unit_at_point[x];
        inverse[gid] = germ_of[&(s.star(t), y)];
    }
    let mut compose = Vec::new();
    for (g1, &(t1, x1)) in reps.iter().enumerate() {
        for (g2, &(t2, x2)) in reps.iter().enumerate() {
            // [t1, h_{t2}(x2)] ∘ [t2, x2] = [t1 t2, x2]
            if action.maps[t2].apply(x2) == Some(x1) {
                let prod = germ_of[&(s.mul(t1, t2), x2)];
                compose.push((g1, g2, prod));
            }
        }
    }
    let labels: Vec<String> = reps
        .iter()
        .map(|&(t, x)| format!("[{},x{}]", s.label(t), x))
        .collect();
    let groupoid =
        FiniteGroupoid::validate(n, range, domain, inverse, compose)?.with_labels(labels);
    let point_of_unit_pos: Vec<usize> = groupoid
        .units()
        .iter()
        .map(|&u| reps[u].1)
        .collect();
    let mut bisections = Vec::with_capacity(s.len());
    for t in 0..s.len() {
        let arrows: BTreeSet<usize> = action.maps[t]
            .domain()
            .into_iter()
            .map(|x| germ_of[&(t, x)])
            .collect();
        bisections.push(Bisection::new(&groupoid, arrows)?);
    }
    // t ↦ U_t is a semigroup homomorphism
    for t1 in 0..s.len() {
        for t2 in 0..s.len() {
            let prod = bisections[t1].product(&bisections[t2], &groupoid);
            if prod != bisections[s.mul(t1, t2)] {
                return Err(Error::Axiom(format!(
                    "U_{} · U_{} differs from U_({}·{})",
                    t1, t2, t1, t2
                )));
            }
        }
    }
    Ok(TransformationGroupoid {
        groupoid,
        reps,
        germ_of,
        bisections,
        point_of_unit_pos,
        unit_at_point,
    })
}

/// A partial self-map of a finite set (not necessarily injective).
#[derive(Clone, Debug, PartialEq)]
pub struct PartialMap {
    pub ground: usize,
    pub map: Vec<Option<usize>>,
}

impl PartialMap {
    pub fn new(ground: usize, map: Vec<Option<usize>>) -> Result<Self> {
        if map.len() != ground {
            return Err(Error::Domain("map length mismatch".into()));
        }
        if map.iter().flatten().any(|&y| y >= ground) {
            return Err(Error::Domain("image point out of range".into()));
        }
        Ok(PartialMap { ground, map })
    }

    pub fn empty(ground: usize) -> Self {
        PartialMap {
            ground,
            map: vec![None; ground],
        }
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map[x]
    }
}

/// The Deaconu–Renault groupoid of an aperiodic partial map, together
/// with minimal witnesses. Arrows are (y, k, x) with φⁿ(x) = φᵐ(y) and
/// k = n − m; in the finite aperiodic case k is forced to
/// depth(x) − depth(y) where depth counts the iterations until φ is
/// undefined. Periodic maps are rejected with the offending cycle.
#[derive(Clone, Debug)]
pub struct DeaconuRenault {
    pub groupoid: FiniteGroupoid,
    /// (y, k, x) per arrow
    pub triples: Vec<(usize, i64, usize)>,
    /// minimal witness (n, m) per arrow
    pub witnesses: Vec<(usize, usize)>,
    pub depth: Vec<usize>,
}

pub fn deaconu_renault(phi: &PartialMap) -> Result<DeaconuRenault> {
    let n = phi.ground;
    // aperiodicity: some iterated domain is empty
    let mut depth = vec![0usize; n];
    for x in 0..n {
        let mut seen = vec![false; n];
        let mut cur = x;
        let mut d = 0;
        loop {
            if seen[cur] {
                // walk the cycle for the error message
                let mut cyc = vec![cur];
                let mut c = phi.apply(cur).unwrap();
                while c != cur {
                    cyc.push(c);
                    c = phi.apply(c).unwrap();
                }
                return Err(Error::Domain(format!(
                    "map is periodic on cycle {:?}; the groupoid would be infinite",
                    cyc
                )));
            }
            seen[cur] = true;
            match phi.apply(cur) {
                Some(next) => {
                    cur = next;
                    d += 1;
                }
                None => break,
            }
        }
        depth[x] = d;
    }
    let end = |x: usize| -> usize {
        let mut cur = x;
        while let Some(next) = phi.apply(cur) {
            cur = next;
        }
        cur
    };
    let orbit = |x: usize| -> Vec<usize> {
        let mut o = vec![x];
        let mut cur = x;
        while let Some(next) = phi.apply(cur) {
            o.push(next);
            cur = next;
        }
        o
    };
    let mut triples = Vec::new();
    let mut witnesses = Vec::new();
    let mut arrow_id: HashMap<(usize, i64, usize), usize> = HashMap::new();
    for y in 0..n {
        for x in 0..n {
            if end(x) != end(y) {
                continue;
            }
            let k = depth[x] as i64 - depth[y] as i64;
            // minimal witness: first n with φⁿ(x) = φ^{n-k}(y)
            let ox = orbit(x);
            let oy = orbit(y);
            let mut witness = None;
            for (nx, &px) in ox.iter().enumerate() {
                let my = nx as i64 - k;
                if my >= 0 && (my as usize) < oy.len() && oy[my as usize] == px {
                    witness = Some((nx, my as usize));
                    break;
                }
            }
            let w = witness.expect("matching ends admit a witness");
            arrow_id.insert((y, k, x), triples.len());
            triples.push((y, k, x));
            witnesses.push(w);
        }
    }
    let m = triples.len();
    let mut range = vec![0usize; m];
    let mut domain = vec![0usize; m];
    let mut inverse = vec![0usize; m];
    for (i, &(y, k, x)) in triples.iter().enumerate() {
        range[i] = arrow_id[&(y, 0, y)];
        domain[i] = arrow_id[&(x, 0, x)];
        inverse[i] = arrow_id[&(x, -k, y)];
    }
    let mut compose = Vec::new();
    for (i, &(z, k1, y1)) in triples.iter().enumerate() {
        for (j, &(y2, k2, x)) in triples.iter().enumerate() {
            if y1 == y2 {
                compose.push((i, j, arrow_id[&(z, k1 + k2, x)]));
            }
        }
    }
    let labels = triples
        .iter()
        .map(|&(y, k, x)| format!("({},{},{})", y, k, x))
        .collect();
    let groupoid =
        FiniteGroupoid::validate(m, range, domain, inverse, compose)?.with_labels(labels);
    Ok(DeaconuRenault {
        groupoid,
        triples,
        witnesses,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_groupoid_shape() {
        let g = FiniteGroupoid::pair(2);
        assert_eq!(g.arrows(), 4);
        assert_eq!(g.units().len(), 2);
        let g1 = FiniteGroupoid::pair(1);
        assert_eq!(g1.arrows(), 1);
        assert_eq!(g1.units().len(), 1);
    }

    #[test]
    fn group_groupoid_shape() {
        let g = FiniteGroupoid::from_group(&GroupTable::cyclic(2));
        assert_eq!(g.arrows(), 2);
        assert_eq!(g.units().len(), 1);
    }

    #[test]
    fn validate_rejects_broken_inverse() {
        // one unit u=0 and two mutually inverse arrows 1, 2 — but declare
        // inverse[1] = 1 (not involutive against compose)
        let res = FiniteGroupoid::validate(
            3,
            vec![0, 0, 0],
            vec![0, 0, 0],
            vec![0, 2, 2],
            vec![
                (0, 0, 0),
                (0, 1, 1),
                (1, 0, 1),
                (0, 2, 2),
                (2, 0, 2),
                (1, 1, 2),
                (1, 2, 0),
                (2, 1, 0),
                (2, 2, 1),
            ],
        );
        assert!(res.is_err());
    }

    #[test]
    fn singleton_bisections_of_pair_groupoid_close_wide() {
        let g = FiniteGroupoid::pair(2);
        let bs = bisection_semigroup(&g, &singleton_bisections(&g), 100).unwrap();
        // products of singletons are singletons or empty: 4 + 1 elements
        assert_eq!(bs.semigroup.len(), 5);
        assert!(bs.wide);
    }

    #[test]
    fn unit_space_alone_is_not_wide() {
        let g = FiniteGroupoid::pair(2);
        let bs = bisection_semigroup(&g, &[Bisection::unit_space(&g)], 100).unwrap();
        assert_eq!(bs.semigroup.len(), 1);
        assert!(!bs.wide);
    }

    #[test]
    fn diagonal_antidiagonal_wide_in_pair2() {
        let g = FiniteGroupoid::pair(2);
        // arrows indexed (i,j) -> 2i+j: diagonal {0,3}, antidiagonal {1,2}
        let diag = Bisection::new(&g, [0usize, 3]).unwrap();
        let anti = Bisection::new(&g, [1usize, 2]).unwrap();
        let bs = bisection_semigroup(&g, &[diag, anti], 100).unwrap();
        assert!(bs.wide);
        assert_eq!(bs.semigroup.len(), 2);
        assert!(bs.semigroup.unit().is_some());
    }

    #[test]
    fn transformation_groupoid_of_z2_swap_is_pair2() {
        let swap = PartialBijection::from_pairs(2, &[(0, 1), (1, 0)]).unwrap();
        let act = crate::semigroup::generate_from_partial_bijections(&[swap], 100).unwrap();
        let tg = transformation_groupoid(&act).unwrap();
        assert_eq!(tg.groupoid.arrows(), 4);
        assert_eq!(tg.groupoid.units().len(), 2);
    }

    #[test]
    fn transformation_groupoid_collapses_restricted_identities() {
        // S = {id_X, id_{x}} on X = {x, y}: germ collapse leaves 2 units
        let idx = PartialBijection::identity_on(2, &[0]);
        let act = crate::semigroup::generate_from_partial_bijections(
            &[PartialBijection::identity(2), idx],
            100,
        )
        .unwrap();
        let tg = transformation_groupoid(&act).unwrap();
        assert_eq!(tg.groupoid.arrows(), 2);
        assert_eq!(tg.groupoid.units().len(), 2);
    }

    #[test]
    fn transformation_groupoid_of_trivial_action_is_unit_space() {
        let act = crate::semigroup::generate_from_partial_bijections(
            &[PartialBijection::identity(3)],
            100,
        )
        .unwrap();
        let tg = transformation_groupoid(&act).unwrap();
        assert_eq!(tg.groupoid.arrows(), 3);
        assert_eq!(tg.groupoid.units().len(), 3);
    }

    #[test]
    fn deaconu_renault_two_points() {
        // X = {0, 1}, φ(1) = 0: pair groupoid on two points
        let phi = PartialMap::new(2, vec![None, Some(0)]).unwrap();
        let dr = deaconu_renault(&phi).unwrap();
        assert_eq!(dr.groupoid.arrows(), 4);
        assert_eq!(dr.groupoid.units().len(), 2);
        // the arrow (0, 1, 1) exists with witness (1, 0)
        let i = dr.triples.iter().position(|&t| t == (0, 1, 1)).unwrap();
        assert_eq!(dr.witnesses[i], (1, 0));
    }

    #[test]
    fn deaconu_renault_empty_map_gives_units() {
        let phi = PartialMap::empty(3);
        let dr = deaconu_renault(&phi).unwrap();
        assert_eq!(dr.groupoid.arrows(), 3);
        assert_eq!(dr.groupoid.units().len(), 3);
    }

    #[test]
    fn deaconu_renault_rejects_periodic() {
        let phi = PartialMap::new(1, vec![Some(0)]).unwrap();
        let err = deaconu_renault(&phi).unwrap_err();
        assert!(err.to_string().contains("periodic"));
    }

    #[test]
    fn deaconu_renault_singletons_are_wide() {
        let phi = PartialMap::new(2, vec![None, Some(0)]).unwrap();
        let dr = deaconu_renault(&phi).unwrap();
        let bs =
            bisection_semigroup(&dr.groupoid, &singleton_bisections(&dr.groupoid), 100).unwrap();
        assert!(bs.wide);
    }

    #[test]
    fn bisection_inverse_law() {
        let g = FiniteGroupoid::pair(3);
        let u = Bisection::new(&g, [1usize, 5]).unwrap(); // (0,1), (1,2)
        let v = Bisection::new(&g, [3usize, 7]).unwrap(); // (1,0), (2,1)
        let lhs = u.product(&v, &g).inverse(&g);
        let rhs = v.inverse(&g).product(&u.inverse(&g), &g);
        assert_eq!(lhs, rhs);
    }
}
