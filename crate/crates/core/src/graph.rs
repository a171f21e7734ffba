//! Directed graphs and their algebras: the graph inverse semigroup S_Q
//! of path pairs, boundary path spaces with the shift, graph groupoids
//! (acyclic case) through the Deaconu–Renault construction, Leavitt
//! path algebra elements with the antichain normal form, Q-families with
//! the Cuntz–Krieger relations, the spatial Q-family on ℓ^p(∂Q), and
//! Webster's disjointification idempotents.

use crate::algebra::{AlgElement, Carrier};
use crate::error::{Error, Result};
use crate::groupoid::{deaconu_renault, DeaconuRenault, PartialMap};
use crate::matrix::Matrix;
use crate::reps::{
    is_tight_rep, jointly_contractive_check, ContractivityMode, ContractivityVerdict,
    SpatialPartialIsometry, TightnessReport,
};
use crate::scalar::{Exponent, Scalar};
use crate::semigroup::{ISemigroup, PartialBijection};
use crate::space::{weighted_conjugate, WeightedSpace};
use crate::twist::AxiomCheck;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Which vertices count as regular. The standard convention is
/// 0 < |r⁻¹(v)| < ∞; the alternative requires at least two incoming
/// edges and is exposed for comparison only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularConvention {
    Standard,
    AtLeastTwo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n_vertices: usize,
    /// (range, source) per edge
    edges: Vec<(usize, usize)>,
    convention: RegularConvention,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.iter().any(|&(r, s)| r >= n_vertices || s >= n_vertices) {
            return Err(Error::Domain("edge endpoint out of range".into()));
        }
        Ok(Graph {
            n_vertices,
            edges,
            convention: RegularConvention::Standard,
        })
    }

    pub fn with_convention(mut self, convention: RegularConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn r(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn s(&self, e: usize) -> usize {
        self.edges[e].1
    }

    /// Edges received by v.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.r(e) == v).collect()
    }

    pub fn is_regular(&self, v: usize) -> bool {
        let indeg = self.in_edges(v).len();
        match self.convention {
            RegularConvention::Standard => indeg > 0,
            RegularConvention::AtLeastTwo => indeg > 1,
        }
    }

    pub fn regular_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices).filter(|&v| self.is_regular(v)).collect()
    }

    pub fn singular_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices).filter(|&v| !self.is_regular(v)).collect()
    }

    /// Cycle detection along the direction source → range.
    pub fn is_acyclic(&self) -> bool {
        let mut state = vec![0u8; self.n_vertices]; // 0 new, 1 active, 2 done
        fn dfs(g: &Graph, v: usize, state: &mut [u8]) -> bool {
            state[v] = 1;
            for e in 0..g.edges.len() {
                if g.s(e) == v {
                    let w = g.r(e);
                    if state[w] == 1 || (state[w] == 0 && !dfs(g, w, state)) {
                        return false;
                    }
                }
            }
            state[v] = 2;
            true
        }
        (0..self.n_vertices).all(|v| state[v] != 0 || dfs(self, v, &mut state))
    }
}

/// A finite path, stored from the range end: r(edges[0]) = range and
/// s(edges[i]) = r(edges[i+1]). Vertices are paths of length zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub range: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn vertex(v: usize) -> Self {
        Path {
            range: v,
            edges: Vec::new(),
        }
    }

    pub fn of_edge(g: &Graph, e: usize) -> Self {
        Path {
            range: g.r(e),
            edges: vec![e],
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self, g: &Graph) -> usize {
        match self.edges.last() {
            Some(&e) => g.s(e),
            None => self.range,
        }
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        let mut cur = self.range;
        for &e in &self.edges {
            if e >= g.n_edges() || g.r(e) != cur {
                return false;
            }
            cur = g.s(e);
        }
        true
    }

    /// μ·ν, defined when s(μ) = r(ν).
    pub fn concat(&self, g: &Graph, other: &Path) -> Result<Path> {
        if self.source(g) != other.range {
            return Err(Error::Domain("paths do not concatenate".into()));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Path {
            range: self.range,
            edges,
        })
    }

    /// Extend at the source by one edge e with r(e) = s(self).
    pub fn extend(&self, g: &Graph, e: usize) -> Result<Path> {
        if g.r(e) != self.source(g) {
            return Err(Error::Domain("edge does not extend the path".into()));
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        Ok(Path {
            range: self.range,
            edges,
        })
    }

    /// If self = prefix·w, return w.
    pub fn strip_prefix(&self, g: &Graph, prefix: &Path) -> Option<Path> {
        if self.range != prefix.range || self.edges.len() < prefix.edges.len() {
            return None;
        }
        if self.edges[..prefix.edges.len()] != prefix.edges[..] {
            return None;
        }
        Some(Path {
            range: prefix.source(g),
            edges: self.edges[prefix.edges.len()..].to_vec(),
        })
    }

    /// Drop the first (range-end) edge; the one-sided shift.
    pub fn shift(&self, g: &Graph) -> Option<Path> {
        let (&first, rest) = self.edges.split_first()?;
        Some(Path {
            range: g.s(first),
            edges: rest.to_vec(),
        })
    }
}

/// An element of the graph inverse semigroup S_Q: a pair (μ, ν) with
/// s(μ) = s(ν), or zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathPair {
    Zero,
    Pair(Path, Path),
}

impl PathPair {
    pub fn pair(g: &Graph, mu: Path, nu: Path) -> Result<Self> {
        if !mu.is_valid(g) || !nu.is_valid(g) {
            return Err(Error::Domain("invalid path".into()));
        }
        if mu.source(g) != nu.source(g) {
            return Err(Error::Domain("path pair sources differ".into()));
        }
        Ok(PathPair::Pair(mu, nu))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PathPair::Zero)
    }
}

/// The three-case multiplication of S_Q.
pub fn sq_mul(g: &Graph, a: &PathPair, b: &PathPair) -> PathPair {
    let (PathPair::Pair(mu, nu), PathPair::Pair(alpha, beta)) = (a, b) else {
        return PathPair::Zero;
    };
    if let Some(alpha2) = alpha.strip_prefix(g, nu) {
        let new_mu = mu.concat(g, &alpha2).expect("sources align");
        return PathPair::Pair(new_mu, beta.clone());
    }
    if let Some(nu2) = nu.strip_prefix(g, alpha) {
        let new_nu = beta.concat(g, &nu2).expect("sources align");
        return PathPair::Pair(mu.clone(), new_nu);
    }
    PathPair::Zero
}

pub fn sq_star(a: &PathPair) -> PathPair {
    match a {
        PathPair::Zero => PathPair::Zero,
        PathPair::Pair(mu, nu) => PathPair::Pair(nu.clone(), mu.clone()),
    }
}

/// All finite paths of the graph, sorted; errors when the graph is
/// cyclic or the count exceeds the bound.
pub fn all_paths(g: &Graph, bound: usize) -> Result<Vec<Path>> {
    if !g.is_acyclic() {
        return Err(Error::Unsupported(
            "cyclic graph has infinitely many paths".into(),
        ));
    }
    let mut out: Vec<Path> = (0..g.vertices()).map(Path::vertex).collect();
    let mut frontier = out.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            for e in 0..g.n_edges() {
                if g.r(e) == p.source(g) {
                    let q = p.extend(g, e)?;
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > bound {
            return Err(Error::BoundExceeded(format!(
                "more than {} paths",
                bound
            )));
        }
        frontier = next;
    }
    out.sort();
    Ok(out)
}

/// The boundary path space ∂Q of an acyclic graph (all finite paths
/// with singular source), the shift, and the graph groupoid
/// G_Q = G(∂Q, σ).
#[derive(Clone, Debug)]
pub struct GraphGroupoid {
    pub graph: Arc<Graph>,
    pub boundary: Vec<Path>,
    pub index: HashMap<Path, usize>,
    pub shift: PartialMap,
    pub dr: DeaconuRenault,
    pub carrier: Arc<Carrier>,
}

pub const DEFAULT_PATH_BOUND: usize = 4000;

pub fn boundary_paths(graph: &Arc<Graph>, bound: usize) -> Result<GraphGroupoid> {
    let g = graph.as_ref();
    let boundary: Vec<Path> = all_paths(g, bound)?
        .into_iter()
        .filter(|p| !g.is_regular(p.source(g)))
        .collect();
    let index: HashMap<Path, usize> = boundary
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let map: Vec<Option<usize>> = boundary
        .iter()
        .map(|p| p.shift(g).map(|q| index[&q]))
        .collect();
    let shift = PartialMap::new(boundary.len(), map)?;
    let dr = deaconu_renault(&shift)?;
    let carrier = Carrier::untwisted(dr.groupoid.clone());
    Ok(GraphGroupoid {
        graph: graph.clone(),
        boundary,
        index,
        shift,
        dr,
        carrier,
    })
}

impl GraphGroupoid {
    /// Boundary paths extending μ (the cylinder Z(μ)).
    pub fn cylinder(&self, mu: &Path) -> Vec<usize> {
        self.boundary
            .iter()
            .enumerate()
            .filter(|(_, p)| p.strip_prefix(&self.graph, mu).is_some())
            .map(|(i, _)| i)
            .collect()
    }

    /// The indicator of Z(μ, ν) = {(μw, ·, νw)} as an algebra element.
    pub fn steinberg_indicator(&self, pair: &PathPair) -> Result<AlgElement> {
        let mut out = AlgElement::zero(self.carrier.clone());
        let PathPair::Pair(mu, nu) = pair else {
            return Ok(out);
        };
        for (i, &(y, _k, x)) in self.dr.triples.iter().enumerate() {
            let py = &self.boundary[y];
            let px = &self.boundary[x];
            match (
                py.strip_prefix(&self.graph, mu),
                px.strip_prefix(&self.graph, nu),
            ) {
                (Some(w1), Some(w2)) if w1 == w2 => out.set_coeff(i, Scalar::one()),
                _ => {}
            }
        }
        Ok(out)
    }

    /// Linear extension of the Steinberg map over an LPA element.
    pub fn steinberg(&self, x: &LpaElement) -> Result<AlgElement> {
        let mut out = AlgElement::zero(self.carrier.clone());
        for (pair, coeff) in &x.terms {
            let ind = self.steinberg_indicator(pair)?;
            out = out.add(&ind.scale(coeff))?;
        }
        Ok(out)
    }
}

/// A formal scalar combination of path pairs; equality is decided by the
/// canonical antichain normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct LpaElement {
    pub graph: Arc<Graph>,
    pub terms: BTreeMap<PathPair, Scalar>,
}

impl LpaElement {
    pub fn zero(graph: Arc<Graph>) -> Self {
        LpaElement {
            graph,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(graph: Arc<Graph>, pair: PathPair, coeff: Scalar) -> Self {
        let mut e = LpaElement::zero(graph);
        e.add_term(pair, coeff);
        e
    }

    /// p_v = (v, v).
    pub fn vertex(graph: Arc<Graph>, v: usize) -> Self {
        let p = Path::vertex(v);
        LpaElement::term(graph, PathPair::Pair(p.clone(), p), Scalar::one())
    }

    /// t_e = (e, s(e)).
    pub fn edge(graph: Arc<Graph>, e: usize) -> Self {
        let mu = Path::of_edge(&graph, e);
        let nu = Path::vertex(graph.s(e));
        LpaElement::term(graph, PathPair::Pair(mu, nu), Scalar::one())
    }

    /// t_e^* = (s(e), e).
    pub fn edge_star(graph: Arc<Graph>, e: usize) -> Self {
        let mu = Path::vertex(graph.s(e));
        let nu = Path::of_edge(&graph, e);
        LpaElement::term(graph, PathPair::Pair(mu, nu), Scalar::one())
    }

    pub fn add_term(&mut self, pair: PathPair, coeff: Scalar) {
        if pair.is_zero() || coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(pair.clone()).or_insert_with(Scalar::zero);
        *entry = &*entry + &coeff;
        if self.terms[&pair].is_zero() {
            self.terms.remove(&pair);
        }
    }

    pub fn add(&self, other: &LpaElement) -> Result<LpaElement> {
        self.check_graph(other)?;
        let mut out = self.clone();
        for (pair, coeff) in &other.terms {
            out.add_term(pair.clone(), coeff.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LpaElement) -> Result<LpaElement> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> LpaElement {
        let mut out = LpaElement::zero(self.graph.clone());
        for (pair, coeff) in &self.terms {
            out.add_term(pair.clone(), s * coeff);
        }
        out
    }

    fn check_graph(&self, other: &LpaElement) -> Result<()> {
        if self.graph != other.graph {
            return Err(Error::CarrierMismatch(
                "elements over different graphs".into(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, other: &LpaElement) -> Result<LpaElement> {
        self.check_graph(other)?;
        let g = self.graph.as_ref();
        let mut out = LpaElement::zero(self.graph.clone());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(sq_mul(g, a, b), ca * cb);
            }
        }
        Ok(out.normalize())
    }

    pub fn star(&self) -> LpaElement {
        let mut out = LpaElement::zero(self.graph.clone());
        for (pair, coeff) in &self.terms {
            out.add_term(sq_star(pair), coeff.conj());
        }
        out
    }

    /// Canonical antichain normal form: expand the shorter of any two
    /// comparable terms (pairs related by a common extension) through
    /// Z(μ, ν) = ⊔_e Z(μe, νe) at regular sources, then contract
    /// complete equal-coefficient sibling families, longest first.
    /// Expansion order is lexicographic by edge index.
    pub fn normalize(&self) -> LpaElement {
        let g = self.graph.as_ref();
        let mut terms = self.terms.clone();
        terms.retain(|_, c| !c.is_zero());
        // expansion
        loop {
            let mut to_expand: Option<PathPair> = None;
            'scan: for a in terms.keys() {
                for b in terms.keys() {
                    if a == b {
                        continue;
                    }
                    let (PathPair::Pair(mu1, nu1), PathPair::Pair(mu2, nu2)) = (a, b) else {
                        continue;
                    };
                    // b = (μ1 α, ν1 α) for a nonempty α?
                    if let (Some(al), Some(be)) =
                        (mu2.strip_prefix(g, mu1), nu2.strip_prefix(g, nu1))
                    {
                        if al == be && !al.is_empty() && g.is_regular(mu1.source(g)) {
                            to_expand = Some(a.clone());
                            break 'scan;
                        }
                    }
                }
            }
            let Some(pair) = to_expand else { break };
            let coeff = terms.remove(&pair).unwrap();
            let PathPair::Pair(mu, nu) = &pair else {
                unreachable!()
            };
            let mut incoming = g.in_edges(mu.source(g));
            incoming.sort_unstable();
            for e in incoming {
                let pm = mu.extend(g, e).unwrap();
                let pn = nu.extend(g, e).unwrap();
                let key = PathPair::Pair(pm, pn);
                let entry = terms.entry(key.clone()).or_insert_with(Scalar::zero);
                *entry = &*entry + &coeff;
                if terms[&key].is_zero() {
                    terms.remove(&key);
                }
            }
        }
        // contraction, longest terms first
        loop {
            let mut contracted = false;
            let mut keys: Vec<PathPair> = terms.keys().cloned().collect();
            keys.sort_by_key(|p| match p {
                PathPair::Pair(m, _) => std::cmp::Reverse(m.len()),
                PathPair::Zero => std::cmp::Reverse(0),
            });
            for key in keys {
                let PathPair::Pair(mu, nu) = &key else { continue };
                if !terms.contains_key(&key) {
                    continue;
                }
                let (Some(&le), Some(&ln)) = (mu.edges.last(), nu.edges.last()) else {
                    continue;
                };
                if le != ln {
                    continue;
                }
                let parent_mu = Path {
                    range: mu.range,
                    edges: mu.edges[..mu.edges.len() - 1].to_vec(),
                };
                let parent_nu = Path {
                    range: nu.range,
                    edges: nu.edges[..nu.edges.len() - 1].to_vec(),
                };
                let v = parent_mu.source(g);
                if !g.is_regular(v) {
                    continue;
                }
                let siblings = g.in_edges(v);
                let coeff = terms[&key].clone();
                let complete = siblings.iter().all(|&e| {
                    let k = PathPair::Pair(
                        parent_mu.extend(g, e).unwrap(),
                        parent_nu.extend(g, e).unwrap(),
                    );
                    terms.get(&k) == Some(&coeff)
                });
                if complete {
                    for &e in &siblings {
                        let k = PathPair::Pair(
                            parent_mu.extend(g, e).unwrap(),
                            parent_nu.extend(g, e).unwrap(),
                        );
                        terms.remove(&k);
                    }
                    let parent = PathPair::Pair(parent_mu, parent_nu);
                    let entry = terms.entry(parent.clone()).or_insert_with(Scalar::zero);
                    *entry = &*entry + &coeff;
                    if terms[&parent].is_zero() {
                        terms.remove(&parent);
                    }
                    contracted = true;
                    break;
                }
            }
            if !contracted {
                break;
            }
        }
        LpaElement {
            graph: self.graph.clone(),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.normalize().terms.is_empty()
    }
}

/// A Q-family: vertex idempotents and edge partial isometries with
/// their generalized inverses, over a weighted space.
#[derive(Clone, Debug)]
pub struct QFamily {
    pub graph: Arc<Graph>,
    pub space: WeightedSpace,
    pub p_v: Vec<Matrix>,
    pub t_e: Vec<Matrix>,
    pub t_e_star: Vec<Matrix>,
}

impl QFamily {
    /// T_μ for a finite path (P_v for a vertex path).
    pub fn path_op(&self, mu: &Path) -> Matrix {
        let mut m = self.p_v[mu.range].clone();
        for &e in &mu.edges {
            m = &m * &self.t_e[e];
        }
        m
    }

    pub fn path_op_star(&self, mu: &Path) -> Matrix {
        let mut m = self.p_v[mu.range].clone();
        for &e in &mu.edges {
            m = &self.t_e_star[e] * &m;
        }
        m
    }

    /// T_μ T_μ^*, the range idempotent of a path.
    pub fn range_idempotent(&self, mu: &Path) -> Matrix {
        &self.path_op(mu) * &self.path_op_star(mu)
    }
}

/// Report of the Q-family axioms.
#[derive(Clone, Debug)]
pub struct QFamilyReport {
    pub checks: Vec<AxiomCheck>,
}

impl QFamilyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Validate a Q-family: mutual orthogonality of the vertex idempotents,
/// the generalized-inverse laws, (CK1), (CK2) at regular vertices,
/// contractivity of the generators, and joint F-contractivity of the
/// Webster families over paths of length ≤ 2 (families of size ≤ 3 plus
/// the full family when small).
pub fn q_family_validate(fam: &QFamily, mode: ContractivityMode, seed: u64) -> Result<QFamilyReport> {
    let g = fam.graph.as_ref();
    let mut checks = Vec::new();
    let dim = fam.space.dim();
    let push = |checks: &mut Vec<AxiomCheck>, name: &str, witness: Option<String>| {
        checks.push(AxiomCheck {
            name: name.into(),
            pass: witness.is_none(),
            witness,
        });
    };

    let mut w = None;
    'orth: for v in 0..g.vertices() {
        if !fam.p_v[v].is_idempotent() {
            w = Some(format!("P_{} is not idempotent", v));
            break;
        }
        for u in 0..g.vertices() {
            if u != v && !(&fam.p_v[u] * &fam.p_v[v]).is_zero() {
                w = Some(format!("P_{} and P_{} are not orthogonal", u, v));
                break 'orth;
            }
        }
    }
    push(&mut checks, "vertex idempotents orthogonal", w);

    let mut w = None;
    for e in 0..g.n_edges() {
        let te = &fam.t_e[e];
        let ts = &fam.t_e_star[e];
        if &(&(te * ts) * te) != te || &(&(ts * te) * ts) != ts {
            w = Some(format!("T_{} lacks its generalized inverse law", e));
            break;
        }
    }
    checks.push(AxiomCheck {
        name: "generalized inverse laws".into(),
        pass: w.is_none(),
        witness: w,
    });

    let mut w = None;
    for e in 0..g.n_edges() {
        let tst = &fam.t_e_star[e] * &fam.t_e[e];
        if tst != fam.p_v[g.s(e)] {
            w = Some(format!("T_{}^* T_{} != P_s({})", e, e, e));
            break;
        }
        let tts = &fam.t_e[e] * &fam.t_e_star[e];
        let pr = &fam.p_v[g.r(e)];
        if (&tts * pr) != tts || (pr * &tts) != tts {
            w = Some(format!("T_{} T_{}^* not dominated by P_r({})", e, e, e));
            break;
        }
    }
    checks.push(AxiomCheck {
        name: "CK1".into(),
        pass: w.is_none(),
        witness: w,
    });

    let mut w = None;
    for v in g.regular_vertices() {
        let mut acc = Matrix::zero(dim, dim);
        for e in g.in_edges(v) {
            acc = &acc + &(&fam.t_e[e] * &fam.t_e_star[e]);
        }
        if acc != fam.p_v[v] {
            w = Some(format!("CK2 fails at regular vertex {}", v));
            break;
        }
    }
    checks.push(AxiomCheck {
        name: "CK2".into(),
        pass: w.is_none(),
        witness: w,
    });

    let mut w = None;
    'contr: for (name, ms) in [("P", &fam.p_v), ("T", &fam.t_e), ("T*", &fam.t_e_star)] {
        for (i, m) in ms.iter().enumerate() {
            let conj = weighted_conjugate(m, &fam.space)?;
            let upper = match fam.space.exponent() {
                Exponent::Infinity => crate::opnorm::opnorm_exact(&conj, fam.space.exponent())?,
                Exponent::Finite(q) if q.to_string() == "1" || q.to_string() == "2" => {
                    crate::opnorm::opnorm_exact(&conj, fam.space.exponent())?
                }
                _ => crate::opnorm::opnorm_bracket(&conj, fam.space.exponent())?.lower,
            };
            if upper > 1.0 + 1e-9 {
                w = Some(format!("{}_{} has norm {} > 1", name, i, upper));
                break 'contr;
            }
        }
    }
    checks.push(AxiomCheck {
        name: "generators contractive".into(),
        pass: w.is_none(),
        witness: w,
    });

    // Webster families over paths of length ≤ 2
    let mut w = None;
    let paths = paths_up_to(g, 2);
    let families = webster_candidate_families(&paths);
    'webster: for f in &families {
        let parts = webster_idempotents(fam, f)?;
        let nonzero: Vec<Matrix> = parts.into_iter().filter(|m| !m.is_zero()).collect();
        if nonzero.is_empty() {
            continue;
        }
        if let ContractivityVerdict::Fail { norm, .. } = jointly_contractive_check(&nonzero, &fam.space, mode, seed)? {
            w = Some(format!(
                "Webster family of size {} not jointly contractive (norm {})",
                f.len(),
                norm
            ));
            break 'webster;
        }
    }
    checks.push(AxiomCheck {
        name: "Webster joint contractivity".into(),
        pass: w.is_none(),
        witness: w,
    });

    Ok(QFamilyReport { checks })
}

fn paths_up_to(g: &Graph, max_len: usize) -> Vec<Path> {
    let mut out: Vec<Path> = (0..g.vertices()).map(Path::vertex).collect();
    let mut frontier = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for e in 0..g.n_edges() {
                if g.r(e) == p.source(g) {
                    next.push(p.extend(g, e).unwrap());
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

fn webster_candidate_families(paths: &[Path]) -> Vec<Vec<Path>> {
    let mut out = Vec::new();
    let n = paths.len();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(vec![paths[i].clone(), paths[j].clone()]);
            for k in (j + 1)..n {
                out.push(vec![paths[i].clone(), paths[j].clone(), paths[k].clone()]);
            }
        }
    }
    if n <= 12 {
        out.push(paths.to_vec());
    }
    out
}

/// Webster's disjointification: P^F_μ = ∏_{μμ' ∈ F∖{μ}} (T_μT_μ^* −
/// T_{μμ'}T_{μμ'}^*), with the empty product T_μT_μ^*. Verifies mutual
/// orthogonality and the reconstruction T_μT_μ^* = Σ_{ν ∈ F, μ ≤ ν} P^F_ν.
pub fn webster_idempotents(fam: &QFamily, family: &[Path]) -> Result<Vec<Matrix>> {
    let g = fam.graph.as_ref();
    let mut parts = Vec::with_capacity(family.len());
    for mu in family {
        let base = fam.range_idempotent(mu);
        let mut acc = base.clone();
        for nu in family {
            if nu == mu {
                continue;
            }
            if let Some(ext) = nu.strip_prefix(g, mu) {
                if !ext.is_empty() {
                    acc = &acc * &(&base - &fam.range_idempotent(nu));
                }
            }
        }
        parts.push(acc);
    }
    for (i, p) in parts.iter().enumerate() {
        for (j, q) in parts.iter().enumerate() {
            if i != j && !(p * q).is_zero() {
                return Err(Error::Axiom(format!(
                    "Webster parts {} and {} are not orthogonal",
                    i, j
                )));
            }
        }
    }
    for (i, mu) in family.iter().enumerate() {
        let mut acc = Matrix::zero(fam.space.dim(), fam.space.dim());
        for (j, nu) in family.iter().enumerate() {
            if nu.strip_prefix(g, mu).is_some() {
                acc = &acc + &parts[j];
            }
        }
        if acc != fam.range_idempotent(mu) {
            return Err(Error::Axiom(format!(
                "Webster reconstruction fails at family index {}",
                i
            )));
        }
    }
    Ok(parts)
}

/// The spatial Q-family on ℓ^p(∂Q) with counting weights: P_v is
/// multiplication by 1_{Z(v)} and T_e the spatial partial isometry with
/// point map x ↦ ex from Z(s(e)) onto Z(e), phase 1.
pub fn spatial_q_family(gg: &GraphGroupoid, p: Exponent) -> Result<QFamily> {
    let g = gg.graph.as_ref();
    let n = gg.boundary.len();
    let space = WeightedSpace::counting(n, p);
    let mut p_v = Vec::with_capacity(g.vertices());
    for v in 0..g.vertices() {
        let z: Vec<usize> = gg.cylinder(&Path::vertex(v));
        p_v.push(SpatialPartialIsometry::indicator(space.clone(), &z).matrix());
    }
    let mut t_e = Vec::with_capacity(g.n_edges());
    let mut t_e_star = Vec::with_capacity(g.n_edges());
    for e in 0..g.n_edges() {
        let mut pairs = Vec::new();
        for (i, path) in gg.boundary.iter().enumerate() {
            if path.range == g.s(e) {
                let extended = Path {
                    range: g.r(e),
                    edges: std::iter::once(e).chain(path.edges.iter().copied()).collect(),
                };
                let j = *gg
                    .index
                    .get(&extended)
                    .ok_or_else(|| Error::Axiom("extension leaves the boundary".into()))?;
                pairs.push((i, j));
            }
        }
        let map = PartialBijection::from_pairs(n, &pairs)?;
        let phase: Vec<Scalar> = {
            let ran = map.range();
            (0..n)
                .map(|x| {
                    if ran.contains(&x) {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                })
                .collect()
        };
        let spi = SpatialPartialIsometry::new(space.clone(), map, phase)?;
        t_e.push(spi.matrix());
        t_e_star.push(spi.star().matrix());
    }
    Ok(QFamily {
        graph: gg.graph.clone(),
        space,
        p_v,
        t_e,
        t_e_star,
    })
}

/// Evaluate an LPA element through a Q-family: term-wise T_μ T_ν^*.
pub fn evaluate_q_family(x: &LpaElement, fam: &QFamily) -> Result<Matrix> {
    if x.graph != fam.graph {
        return Err(Error::CarrierMismatch("element over a different graph".into()));
    }
    let dim = fam.space.dim();
    let mut out = Matrix::zero(dim, dim);
    for (pair, coeff) in &x.terms {
        let PathPair::Pair(mu, nu) = pair else { continue };
        let term = &fam.path_op(mu) * &fam.path_op_star(nu);
        out = &out + &term.scale(coeff);
    }
    Ok(out)
}

/// The idempotent fragment of S_Q for an acyclic graph: elements 0 and
/// (μ, μ) over all finite paths, as a validated inverse semigroup with
/// the zero adjoined.
pub struct IdempotentFragment {
    pub semigroup: ISemigroup,
    /// element id -> path (element 0 is the zero)
    pub paths: Vec<Path>,
}

pub fn idempotent_fragment(graph: &Arc<Graph>, bound: usize) -> Result<IdempotentFragment> {
    let g = graph.as_ref();
    let paths = all_paths(g, bound)?;
    let n = paths.len() + 1; // slot 0 is the zero element
    let idx_of = |p: &Path| -> usize {
        paths.binary_search(p).expect("path enumerated") + 1
    };
    let mut mult = vec![vec![0usize; n]; n];
    for (i, p) in paths.iter().enumerate() {
        for (j, q) in paths.iter().enumerate() {
            let prod = sq_mul(
                g,
                &PathPair::Pair(p.clone(), p.clone()),
                &PathPair::Pair(q.clone(), q.clone()),
            );
            mult[i + 1][j + 1] = match prod {
                PathPair::Zero => 0,
                PathPair::Pair(m, _) => idx_of(&m),
            };
        }
    }
    let star: Vec<usize> = (0..n).collect();
    let labels: Vec<String> = std::iter::once("0".to_string())
        .chain(paths.iter().map(|p| format!("({:?})", p.edges)))
        .collect();
    let semigroup = ISemigroup::validate(mult, star)?.with_labels(labels);
    Ok(IdempotentFragment {
        semigroup,
        paths,
    })
}

/// Tightness of the E-representation induced by a Q-family:
/// (μ, μ) ↦ T_μ T_μ^*.
pub fn q_family_tightness(fam: &QFamily, frag: &IdempotentFragment) -> Result<TightnessReport> {
    let dim = fam.space.dim();
    let mut v = Vec::with_capacity(frag.semigroup.len());
    v.push(Matrix::zero(dim, dim));
    for p in &frag.paths {
        v.push(fam.range_idempotent(p));
    }
    is_tight_rep(&frag.semigroup, &v, &fam.space)
}
