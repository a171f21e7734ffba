//! Finite inverse semigroups: multiplication/involution tables with full
//! axiom validation, generation from partial bijections, the natural
//! partial order, the idempotent semilattice, the action on characters
//! of E(S), and the universal semigroup S(G) of a finite group in the
//! (A, g) model.

use crate::error::{Error, Result};
use crate::semilattice::FiniteSemilattice;
use std::collections::HashMap;
use std::hash::Hash;

/// A partial bijection on {0, .., ground-1}, stored as a total map with
/// `None` outside the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialBijection {
    ground: usize,
    map: Vec<Option<usize>>,
}

impl PartialBijection {
    pub fn identity(ground: usize) -> Self {
        PartialBijection {
            ground,
            map: (0..ground).map(Some).collect(),
        }
    }

    pub fn empty(ground: usize) -> Self {
        PartialBijection {
            ground,
            map: vec![None; ground],
        }
    }

    pub fn identity_on(ground: usize, set: &[usize]) -> Self {
        let mut map = vec![None; ground];
        for &x in set {
            map[x] = Some(x);
        }
        PartialBijection { ground, map }
    }

    pub fn from_pairs(ground: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut map = vec![None; ground];
        let mut seen = vec![false; ground];
        for &(x, y) in pairs {
            if x >= ground || y >= ground {
                return Err(Error::Domain("point out of range".into()));
            }
            if map[x].is_some() {
                return Err(Error::Domain(format!("duplicate domain point {}", x)));
            }
            if seen[y] {
                return Err(Error::Domain(format!("map not injective at {}", y)));
            }
            map[x] = Some(y);
            seen[y] = true;
        }
        Ok(PartialBijection { ground, map })
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(x).copied().flatten()
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.ground).filter(|&x| self.map[x].is_some()).collect()
    }

    pub fn range(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.map.iter().flatten().copied().collect();
        r.sort_unstable();
        r
    }

    /// self ∘ other, defined on other⁻¹(dom(self) ∩ ran(other)).
    pub fn compose(&self, other: &PartialBijection) -> PartialBijection {
        assert_eq!(self.ground, other.ground);
        let map = (0..self.ground)
            .map(|x| other.apply(x).and_then(|y| self.apply(y)))
            .collect();
        PartialBijection {
            ground: self.ground,
            map,
        }
    }

    pub fn inverse(&self) -> PartialBijection {
        let mut map = vec![None; self.ground];
        for x in 0..self.ground {
            if let Some(y) = self.map[x] {
                map[y] = Some(x);
            }
        }
        PartialBijection {
            ground: self.ground,
            map,
        }
    }

    pub fn is_partial_identity(&self) -> bool {
        (0..self.ground).all(|x| self.map[x].is_none() || self.map[x] == Some(x))
    }

    /// True when `self` extends `other` (other ≤ self in PBij).
    pub fn extends(&self, other: &PartialBijection) -> bool {
        (0..self.ground).all(|x| other.map[x].is_none() || other.map[x] == self.map[x])
    }
}

/// Multiplication table of a finite group, with unit and inverses.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupTable {
    n: usize,
    mult: Vec<usize>,
    unit: usize,
    inv: Vec<usize>,
    labels: Vec<String>,
}

impl GroupTable {
    pub fn validate(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("group table is not square".into()));
        }
        let mult: Vec<usize> = table.into_iter().flatten().collect();
        if mult.iter().any(|&v| v >= n) {
            return Err(Error::Domain("group table entry out of range".into()));
        }
        let m = |a: usize, b: usize| mult[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::Axiom(format!(
                            "group associativity fails at ({}, {}, {})",
                            a, b, c
                        )));
                    }
                }
            }
        }
        let unit = (0..n)
            .find(|&u| (0..n).all(|a| m(u, a) == a && m(a, u) == a))
            .ok_or_else(|| Error::Axiom("group has no unit".into()))?;
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| m(a, b) == unit && m(b, a) == unit)
                .ok_or_else(|| Error::Axiom(format!("element {} has no inverse", a)))?;
        }
        let labels = (0..n).map(|i| format!("g{}", i)).collect();
        Ok(GroupTable {
            n,
            mult,
            unit,
            inv,
            labels,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table: Vec<Vec<usize>> =
            (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::validate(table).unwrap()
    }

    pub fn direct_product(a: &GroupTable, b: &GroupTable) -> Self {
        let n = a.n * b.n;
        let idx = |x: usize, y: usize| x * b.n + y;
        let table: Vec<Vec<usize>> = (0..n)
            .map(|p| {
                let (p1, p2) = (p / b.n, p % b.n);
                (0..n)
                    .map(|q| {
                        let (q1, q2) = (q / b.n, q % b.n);
                        idx(a.mul(p1, q1), b.mul(p2, q2))
                    })
                    .collect()
            })
            .collect();
        GroupTable::validate(table).unwrap()
    }

    pub fn klein_four() -> Self {
        GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(2))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.n + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }
}

/// Validated finite inverse semigroup.
#[derive(Clone, Debug, PartialEq)]
pub struct ISemigroup {
    n: usize,
    mult: Vec<usize>,
    star: Vec<usize>,
    idempotents: Vec<usize>,
    idempotent_pos: Vec<Option<usize>>,
    semilattice: FiniteSemilattice,
    zero: Option<usize>,
    unit: Option<usize>,
    labels: Vec<String>,
}

pub const DEFAULT_CLOSURE_BOUND: usize = 5000;

/// Close a generating set under a product and an involution.
pub fn close_semigroup<T, M, S>(
    gens: Vec<T>,
    mul: M,
    star: S,
    bound: usize,
) -> Result<(Vec<T>, Vec<usize>, Vec<usize>)>
where
    T: Clone + Eq + Hash,
    M: Fn(&T, &T) -> T,
    S: Fn(&T) -> T,
{
    let mut elems: Vec<T> = Vec::new();
    let mut index: HashMap<T, usize> = HashMap::new();
    fn push<T: Clone + Eq + Hash>(
        elems: &mut Vec<T>,
        index: &mut HashMap<T, usize>,
        bound: usize,
        t: T,
    ) -> Result<usize> {
        if let Some(&i) = index.get(&t) {
            return Ok(i);
        }
        if elems.len() >= bound {
            return Err(Error::BoundExceeded(format!(
                "semigroup closure exceeds {} elements",
                bound
            )));
        }
        elems.push(t.clone());
        index.insert(t, elems.len() - 1);
        Ok(elems.len() - 1)
    }
    for g in gens {
        let s = star(&g);
        push(&mut elems, &mut index, bound, g)?;
        push(&mut elems, &mut index, bound, s)?;
    }
    loop {
        let known = elems.len();
        let mut grew = false;
        for i in 0..known {
            for j in 0..known {
                let prod = mul(&elems[i], &elems[j]);
                let before = elems.len();
                let k = push(&mut elems, &mut index, bound, prod)?;
                if k >= before {
                    grew = true;
                    let st = star(&elems[k]);
                    push(&mut elems, &mut index, bound, st)?;
                }
            }
        }
        if !grew && elems.len() == known {
            break;
        }
    }
    let n = elems.len();
    let mut mult_table = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let prod = mul(&elems[i], &elems[j]);
            mult_table[i * n + j] = *index
                .get(&prod)
                .ok_or_else(|| Error::Axiom("closure not closed under product".into()))?;
        }
    }
    let mut star_table = vec![0usize; n];
    for (i, entry) in star_table.iter_mut().enumerate() {
        *entry = *index
            .get(&star(&elems[i]))
            .ok_or_else(|| Error::Axiom("closure not closed under star".into()))?;
    }
    Ok((elems, mult_table, star_table))
}

impl ISemigroup {
    /// Validate multiplication and involution tables: associativity, the
    /// generalized-inverse identities, uniqueness of generalized
    /// inverses, and commuting idempotents. Derives E(S), its meet
    /// semilattice, the natural order, the zero and the unit.
    pub fn validate(mult: Vec<Vec<usize>>, star: Vec<usize>) -> Result<Self> {
        let n = mult.len();
        if n == 0 {
            return Err(Error::Domain("empty semigroup".into()));
        }
        if mult.iter().any(|r| r.len() != n) || star.len() != n {
            return Err(Error::Domain("tables are not square".into()));
        }
        let mult: Vec<usize> = mult.into_iter().flatten().collect();
        if mult.iter().any(|&v| v >= n) || star.iter().any(|&v| v >= n) {
            return Err(Error::Domain("table entry out of range".into()));
        }
        let m = |a: usize, b: usize| mult[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::Axiom(format!(
                            "associativity fails at triple ({}, {}, {})",
                            a, b, c
                        )));
                    }
                }
            }
        }
        for t in 0..n {
            let s = star[t];
            if m(m(t, s), t) != t || m(m(s, t), s) != s {
                return Err(Error::Axiom(format!(
                    "star[{}] = {} is not a generalized inverse",
                    t, s
                )));
            }
        }
        for t in 0..n {
            let invs: Vec<usize> = (0..n)
                .filter(|&s| m(m(t, s), t) == t && m(m(s, t), s) == s)
                .collect();
            if invs.len() != 1 {
                return Err(Error::Axiom(format!(
                    "element {} has {} generalized inverses ({:?})",
                    t,
                    invs.len(),
                    invs
                )));
            }
            if invs[0] != star[t] {
                return Err(Error::Axiom(format!(
                    "star table disagrees with the unique generalized inverse at {}",
                    t
                )));
            }
        }
        let idempotents: Vec<usize> = (0..n).filter(|&e| m(e, e) == e).collect();
        for &e in &idempotents {
            for &f in &idempotents {
                if m(e, f) != m(f, e) {
                    return Err(Error::Axiom(format!(
                        "idempotents {} and {} do not commute",
                        e, f
                    )));
                }
            }
        }
        let mut idempotent_pos = vec![None; n];
        for (p, &e) in idempotents.iter().enumerate() {
            idempotent_pos[e] = Some(p);
        }
        let zero = (0..n).find(|&z| (0..n).all(|s| m(z, s) == z && m(s, z) == z));
        let unit = (0..n).find(|&u| (0..n).all(|s| m(u, s) == s && m(s, u) == s));
        let k = idempotents.len();
        let mut meet = vec![vec![0usize; k]; k];
        for (i, &e) in idempotents.iter().enumerate() {
            for (j, &f) in idempotents.iter().enumerate() {
                let p = m(e, f);
                meet[i][j] = idempotent_pos[p].ok_or_else(|| {
                    Error::Axiom(format!(
                        "product of idempotents {} and {} not idempotent",
                        e, f
                    ))
                })?;
            }
        }
        let lattice_zero = zero.and_then(|z| idempotent_pos[z]);
        let semilattice = FiniteSemilattice::validate(meet, lattice_zero)?
            .with_labels(idempotents.iter().map(|&e| format!("s{}", e)).collect());
        let labels = (0..n).map(|i| format!("s{}", i)).collect();
        Ok(ISemigroup {
            n,
            mult,
            star,
            idempotents,
            idempotent_pos,
            semilattice,
            zero,
            unit,
            labels,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub fn from_group(g: &GroupTable) -> Self {
        let n = g.order();
        let mult: Vec<Vec<usize>> =
            (0..n).map(|a| (0..n).map(|b| g.mul(a, b)).collect()).collect();
        let star: Vec<usize> = (0..n).map(|a| g.inv(a)).collect();
        ISemigroup::validate(mult, star).unwrap()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.n + b]
    }

    pub fn star(&self, a: usize) -> usize {
        self.star[a]
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.mul(a, a) == a
    }

    /// Element ids of E(S), in semilattice position order.
    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    /// Semilattice position of an idempotent element.
    pub fn idempotent_pos(&self, e: usize) -> Option<usize> {
        self.idempotent_pos[e]
    }

    pub fn idempotent_at(&self, pos: usize) -> usize {
        self.idempotents[pos]
    }

    pub fn semilattice(&self) -> &FiniteSemilattice {
        &self.semilattice
    }

    /// The natural order s ≤ t iff s = t s* s; cross-checked against the
    /// characterization by an idempotent witness s = t e.
    pub fn natural_order(&self, s: usize, t: usize) -> bool {
        let by_formula = s == self.mul(t, self.mul(self.star(s), s));
        debug_assert_eq!(
            by_formula,
            self.idempotents.iter().any(|&e| self.mul(t, e) == s),
            "order characterizations disagree at ({}, {})",
            s,
            t
        );
        by_formula
    }

    pub fn mult_rows(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn star_row(&self) -> Vec<usize> {
        self.star.clone()
    }
}

/// An inverse semigroup together with a realization by partial
/// bijections of a finite set: h_t : X_{t*} → X_t with h_t ∘ h_s = h_{ts}.
#[derive(Clone, Debug)]
pub struct SemigroupAction {
    pub semigroup: ISemigroup,
    pub ground: usize,
    pub maps: Vec<PartialBijection>,
}

impl SemigroupAction {
    /// Verify the homomorphism property h_a ∘ h_b = h_{ab} exhaustively
    /// and that star maps to the inverse partial bijection.
    pub fn validate(&self) -> Result<()> {
        let s = &self.semigroup;
        if self.maps.len() != s.len() {
            return Err(Error::Domain(
                "one partial bijection per element required".into(),
            ));
        }
        if self.maps.iter().any(|m| m.ground() != self.ground) {
            return Err(Error::Domain("maps live on different ground sets".into()));
        }
        for a in 0..s.len() {
            for b in 0..s.len() {
                let lhs = self.maps[a].compose(&self.maps[b]);
                if lhs != self.maps[s.mul(a, b)] {
                    return Err(Error::Axiom(format!(
                        "h_{} ∘ h_{} differs from h_({}·{})",
                        a, b, a, b
                    )));
                }
            }
            if self.maps[s.star(a)] != self.maps[a].inverse() {
                return Err(Error::Axiom(format!(
                    "h_(star {}) is not the inverse of h_{}",
                    a, a
                )));
            }
        }
        Ok(())
    }

    /// Non-degeneracy: the ranges X_t cover the ground set.
    pub fn is_nondegenerate(&self) -> bool {
        let mut covered = vec![false; self.ground];
        for m in &self.maps {
            for x in m.range() {
                covered[x] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }

    /// Domain of h_t (the set X_{t*}).
    pub fn domain(&self, t: usize) -> Vec<usize> {
        self.maps[t].domain()
    }

    /// Range of h_t (the set X_t).
    pub fn range(&self, t: usize) -> Vec<usize> {
        self.maps[t].range()
    }
}

/// Multiplicative closure of partial bijections (with all stars),
/// returned as the tautological action of the generated inverse
/// semigroup on the ground set.
pub fn generate_from_partial_bijections(
    gens: &[PartialBijection],
    bound: usize,
) -> Result<SemigroupAction> {
    if gens.is_empty() {
        return Err(Error::Domain("need at least one generator".into()));
    }
    let ground = gens[0].ground();
    if gens.iter().any(|g| g.ground() != ground) {
        return Err(Error::Domain("generators on different ground sets".into()));
    }
    let (elems, mult, star) = close_semigroup(
        gens.to_vec(),
        |a: &PartialBijection, b: &PartialBijection| a.compose(b),
        |a: &PartialBijection| a.inverse(),
        bound,
    )?;
    let n = elems.len();
    let mult_rows: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| mult[i * n + j]).collect())
        .collect();
    let semigroup = ISemigroup::validate(mult_rows, star)?;
    Ok(SemigroupAction {
        semigroup,
        ground,
        maps: elems,
    })
}

/// The action of S on the characters of E(S):
/// h_t : {φ : φ(t*t) = 1} → {φ : φ(tt*) = 1}, h_t(φ)(e) = φ(t* e t).
pub fn spectral_action(s: &ISemigroup) -> Result<SemigroupAction> {
    let chars = s.semilattice().characters()?;
    let ground = chars.len();
    let char_index: HashMap<usize, usize> = chars
        .iter()
        .enumerate()
        .map(|(i, c)| (c.filter.min, i))
        .collect();
    let mut maps = Vec::with_capacity(s.len());
    for t in 0..s.len() {
        let ts = s.star(t);
        let tt = s.mul(ts, t); // t*t
        let tt_pos = s
            .idempotent_pos(tt)
            .ok_or_else(|| Error::Axiom("t*t is not idempotent".into()))?;
        let mut pairs = Vec::new();
        for (i, ch) in chars.iter().enumerate() {
            if !ch.value(tt_pos) {
                continue;
            }
            // image character e ↦ φ(t* e t)
            let values: Vec<bool> = s
                .idempotents()
                .iter()
                .map(|&e| {
                    let conj = s.mul(s.mul(ts, e), t);
                    s.idempotent_pos(conj).map(|p| ch.value(p)).unwrap_or(false)
                })
                .collect();
            // a character of a finite semilattice is principal at the
            // meet of its support
            let support: Vec<usize> = (0..values.len()).filter(|&p| values[p]).collect();
            let min = support
                .iter()
                .copied()
                .reduce(|a, b| s.semilattice().meet(a, b))
                .ok_or_else(|| Error::Axiom("spectral image character is zero".into()))?;
            let j = *char_index
                .get(&min)
                .ok_or_else(|| Error::Axiom("spectral image is not a proper character".into()))?;
            pairs.push((i, j));
        }
        maps.push(PartialBijection::from_pairs(ground, &pairs)?);
    }
    let action = SemigroupAction {
        semigroup: s.clone(),
        ground,
        maps,
    };
    action.validate()?;
    Ok(action)
}

/// Exel's universal inverse semigroup S(G) for a finite group G, in the
/// (A, g) model: elements are pairs of a subset A ⊆ G containing {1, g}
/// and a group element g, with (A, g)(B, h) = (A ∪ gB, gh) and
/// (A, g)* = (g⁻¹A, g⁻¹). The generator map is [g] = ({1, g}, g).
#[derive(Clone, Debug)]
pub struct ExelSemigroup {
    pub group: GroupTable,
    pub semigroup: ISemigroup,
    /// element id -> (subset mask over G, group element)
    pub elements: Vec<(u64, usize)>,
    /// group element -> id of [g]
    pub bracket: Vec<usize>,
}

pub fn exel_semigroup(group: &GroupTable) -> Result<ExelSemigroup> {
    let n = group.order();
    if n > 6 {
        return Err(Error::BoundExceeded(format!(
            "Exel semigroup model limited to |G| <= 6, got {}",
            n
        )));
    }
    let unit_mask = 1u64 << group.unit();
    let mut elements: Vec<(u64, usize)> = Vec::new();
    let mut index: HashMap<(u64, usize), usize> = HashMap::new();
    for mask in 0..(1u64 << n) {
        if mask & unit_mask == 0 {
            continue;
        }
        for g in 0..n {
            if mask & (1 << g) == 0 {
                continue;
            }
            index.insert((mask, g), elements.len());
            elements.push((mask, g));
        }
    }
    let translate = |g: usize, mask: u64| -> u64 {
        let mut out = 0u64;
        for t in 0..n {
            if mask & (1 << t) != 0 {
                out |= 1 << group.mul(g, t);
            }
        }
        out
    };
    let m = elements.len();
    let mut mult = vec![vec![0usize; m]; m];
    for i in 0..m {
        let (a, g) = elements[i];
        for j in 0..m {
            let (b, h) = elements[j];
            let key = (a | translate(g, b), group.mul(g, h));
            mult[i][j] = index[&key];
        }
    }
    let mut star = vec![0usize; m];
    for i in 0..m {
        let (a, g) = elements[i];
        let gi = group.inv(g);
        star[i] = index[&(translate(gi, a), gi)];
    }
    let labels: Vec<String> = elements
        .iter()
        .map(|&(mask, g)| {
            let mut parts: Vec<String> = Vec::new();
            for t in 0..n {
                if mask & (1 << t) != 0 && t != group.unit() && t != g {
                    parts.push(format!("e_{}", group.label(t)));
                }
            }
            parts.push(format!("[{}]", group.label(g)));
            parts.join(" ")
        })
        .collect();
    let semigroup = ISemigroup::validate(mult, star)?.with_labels(labels);
    let bracket: Vec<usize> = (0..n)
        .map(|g| index[&(unit_mask | (1 << g), g)])
        .collect();
    let out = ExelSemigroup {
        group: group.clone(),
        semigroup,
        elements,
        bracket,
    };
    out.check_defining_relations()?;
    Ok(out)
}

impl ExelSemigroup {
    /// The four defining relations of S(G), checked exhaustively over G².
    pub fn check_defining_relations(&self) -> Result<()> {
        let s = &self.semigroup;
        let g = &self.group;
        let br = |t: usize| self.bracket[t];
        let one = br(g.unit());
        for a in 0..g.order() {
            for b in 0..g.order() {
                let lhs = s.mul(s.mul(br(a), br(b)), br(g.inv(b)));
                let rhs = s.mul(br(g.mul(a, b)), br(g.inv(b)));
                if lhs != rhs {
                    return Err(Error::Axiom(format!(
                        "[s][t][t⁻¹] = [st][t⁻¹] fails at ({}, {})",
                        a, b
                    )));
                }
                let lhs = s.mul(s.mul(br(g.inv(a)), br(a)), br(b));
                let rhs = s.mul(br(g.inv(a)), br(g.mul(a, b)));
                if lhs != rhs {
                    return Err(Error::Axiom(format!(
                        "[s⁻¹][s][t] = [s⁻¹][st] fails at ({}, {})",
                        a, b
                    )));
                }
            }
            if s.mul(br(a), one) != br(a) || s.mul(one, br(a)) != br(a) {
                return Err(Error::Axiom(format!("unit relations fail at {}", a)));
            }
        }
        Ok(())
    }
}
