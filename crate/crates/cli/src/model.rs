//! JSON model files: schema types, scalar parsing, and construction of
//! validated in-memory objects. Scalars are decimal strings or "n/d"
//! rationals, optionally with an imaginary part ("3/5+4/5i"); the
//! exponent ∞ is the string "inf".

use anyhow::{anyhow, bail, Context, Result};
use lpalg_core::algebra::Carrier;
use lpalg_core::groupoid::FiniteGroupoid;
use lpalg_core::graph::{Graph, RegularConvention};
use lpalg_core::partial_action::{PartialAction, PartialTwist};
use lpalg_core::scalar::{Exponent, Rational, Scalar};
use lpalg_core::semigroup::{GroupTable, ISemigroup, PartialBijection, SemigroupAction};
use lpalg_core::twist::Cocycle;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Deserialize;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub groupoid: Option<GroupoidSpec>,
    #[serde(default)]
    pub cocycle: Option<CocycleSpec>,
    #[serde(default)]
    pub mult: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub star: Option<Vec<usize>>,
    #[serde(default)]
    pub vertices: Option<usize>,
    #[serde(default)]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub convention: Option<String>,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub theta: Option<Vec<Vec<(usize, usize)>>>,
    #[serde(default)]
    pub twist: Option<Vec<PartialTwistEntry>>,
    #[serde(default)]
    pub generators: Option<Vec<Vec<(usize, usize)>>>,
}

fn default_mode() -> String {
    "real".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidSpec {
    #[serde(default)]
    pub pair: Option<usize>,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub arrows: Option<usize>,
    #[serde(default)]
    pub range: Option<Vec<usize>>,
    #[serde(default)]
    pub domain: Option<Vec<usize>>,
    #[serde(default)]
    pub inverse: Option<Vec<usize>>,
    #[serde(default)]
    pub compose: Option<Vec<(usize, usize, usize)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSpec {
    #[serde(default)]
    pub values: Vec<(usize, usize, String)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialTwistEntry {
    pub s: usize,
    pub t: usize,
    pub values: Vec<(usize, String)>,
}

/// A parsed and validated model.
pub enum Model {
    Groupoid {
        carrier: Arc<Carrier>,
    },
    Semigroup {
        semigroup: ISemigroup,
    },
    Graph {
        graph: Arc<Graph>,
    },
    PartialAction {
        action: PartialAction,
        twist: PartialTwist,
    },
    Action {
        action: SemigroupAction,
    },
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Groupoid { .. } => "groupoid",
            Model::Semigroup { .. } => "semigroup",
            Model::Graph { .. } => "graph",
            Model::PartialAction { .. } => "partial-action",
            Model::Action { .. } => "action",
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).context("numerator")?;
        let d = BigInt::from_str(den.trim()).context("denominator")?;
        if d.is_zero() {
            bail!("zero denominator in {s}");
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac)) = s.split_once('.') {
        let digits = frac.trim();
        let base = BigInt::from_str(if int_part.is_empty() { "0" } else { int_part })?;
        let neg = int_part.trim_start().starts_with('-');
        let mut den = BigInt::one();
        for _ in 0..digits.len() {
            den *= 10;
        }
        let num = BigInt::from_str(digits).unwrap_or_else(|_| BigInt::zero());
        let frac = Rational::new(if neg { -num } else { num }, den);
        return Ok(Rational::from_integer(base) + frac);
    }
    Ok(Rational::from_integer(BigInt::from_str(s)?))
}

/// "n/d", decimals, and complex forms "a+bi" / "a-bi" / "bi" / "i".
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim().replace(' ', "");
    if !s.contains('i') {
        return Ok(Scalar::from_rational(parse_rational(&s)?));
    }
    let body = s.strip_suffix('i').ok_or_else(|| anyhow!("malformed complex scalar {s}"))?;
    // split at the last +/- that is not a leading sign or inside n/d
    let candidates: Vec<usize> = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(&body[i - 1..i], "/"))
        .map(|(i, _)| i)
        .collect();
    let split = candidates.last().copied();
    match split {
        Some(i) => {
            let re = parse_rational(&body[..i])?;
            let im_str = &body[i..];
            let im = match im_str {
                "+" => Rational::one(),
                "-" => -Rational::one(),
                _ => parse_rational(im_str)?,
            };
            Ok(Scalar::exact(re, im))
        }
        None => {
            let im = match body {
                "" => Rational::one(),
                "-" => -Rational::one(),
                _ => parse_rational(body)?,
            };
            Ok(Scalar::exact(Rational::zero(), im))
        }
    }
}

pub fn parse_exponent(s: &str) -> Result<Exponent> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(Exponent::infinity());
    }
    Exponent::new(parse_rational(s)?).map_err(|e| anyhow!("{e}"))
}

pub fn parse_p_list(s: &str) -> Result<Vec<Exponent>> {
    s.split(',').map(parse_exponent).collect()
}

fn parse_group(name: &str) -> Result<GroupTable> {
    let n = name.trim();
    match n {
        "Z1" | "trivial" => Ok(GroupTable::cyclic(1)),
        "Z2" => Ok(GroupTable::cyclic(2)),
        "Z3" => Ok(GroupTable::cyclic(3)),
        "Z4" => Ok(GroupTable::cyclic(4)),
        "Z5" => Ok(GroupTable::cyclic(5)),
        "Z6" => Ok(GroupTable::cyclic(6)),
        "Z2xZ2" | "K4" => Ok(GroupTable::klein_four()),
        other => bail!("unknown group name {other} (use Z1..Z6, Z2xZ2)"),
    }
}

/// Parse and shape-check a model file. I/O, JSON, schema and
/// index-range problems surface here (usage errors, exit code 2);
/// mathematical axiom failures are left to [`construct`] so the verify
/// flow can report them as failing checks.
pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text)
        .with_context(|| format!("schema error in {}", path.display()))?;
    shape_check(&file).with_context(|| format!("schema error in {}", path.display()))?;
    Ok(file)
}

fn shape_check(file: &ModelFile) -> Result<()> {
    match file.kind.as_str() {
        "groupoid" => {
            let spec = file
                .groupoid
                .as_ref()
                .ok_or_else(|| anyhow!("groupoid model needs a groupoid block"))?;
            if spec.pair.is_none() && spec.group.is_none() {
                let n = spec
                    .arrows
                    .ok_or_else(|| anyhow!("explicit groupoid needs an arrow count"))?;
                for (name, table) in [
                    ("range", &spec.range),
                    ("domain", &spec.domain),
                    ("inverse", &spec.inverse),
                ] {
                    let t = table
                        .as_ref()
                        .ok_or_else(|| anyhow!("missing {name} table"))?;
                    if t.len() != n || t.iter().any(|&v| v >= n) {
                        bail!("{name} table has an out-of-range entry");
                    }
                }
                for &(a, b, c) in spec.compose.iter().flatten() {
                    if a >= n || b >= n || c >= n {
                        bail!("compose entry out of range");
                    }
                }
            }
            Ok(())
        }
        "semigroup" => {
            let mult = file
                .mult
                .as_ref()
                .ok_or_else(|| anyhow!("semigroup model needs a mult table"))?;
            let n = mult.len();
            if mult.iter().any(|row| row.len() != n) {
                bail!("mult table is not square");
            }
            if mult.iter().flatten().any(|&v| v >= n) {
                bail!("mult table entry out of range");
            }
            if let Some(star) = &file.star {
                if star.len() != n || star.iter().any(|&v| v >= n) {
                    bail!("star table entry out of range");
                }
            }
            Ok(())
        }
        "graph" => {
            let vertices = file
                .vertices
                .ok_or_else(|| anyhow!("graph model needs a vertex count"))?;
            for &(r, s) in file.edges.iter().flatten() {
                if r >= vertices || s >= vertices {
                    bail!("edge endpoint out of range");
                }
            }
            Ok(())
        }
        "partial-action" => {
            let points = file
                .points
                .ok_or_else(|| anyhow!("partial-action model needs a point count"))?;
            let group = parse_group(
                file.group
                    .as_deref()
                    .ok_or_else(|| anyhow!("partial-action model needs a group"))?,
            )?;
            let theta = file
                .theta
                .as_ref()
                .ok_or_else(|| anyhow!("partial-action model needs theta maps"))?;
            if theta.len() != group.order() {
                bail!("theta must list one map per group element");
            }
            for pairs in theta {
                for &(x, y) in pairs {
                    if x >= points || y >= points {
                        bail!("theta pair out of range");
                    }
                }
            }
            for entry in file.twist.iter().flatten() {
                if entry.s >= group.order() || entry.t >= group.order() {
                    bail!("twist entry indexes outside the group");
                }
                for &(x, _) in &entry.values {
                    if x >= points {
                        bail!("twist entry point out of range");
                    }
                }
            }
            Ok(())
        }
        "action" => {
            let points = file
                .points
                .ok_or_else(|| anyhow!("action model needs a point count"))?;
            for pairs in file.generators.iter().flatten() {
                for &(x, y) in pairs {
                    if x >= points || y >= points {
                        bail!("generator pair out of range");
                    }
                }
            }
            Ok(())
        }
        other => bail!("unknown model kind {other}"),
    }
}

/// Build the validated in-memory objects; axiom failures land here.
pub fn construct(file: &ModelFile) -> Result<Model> {
    build(file)
}

fn build(file: &ModelFile) -> Result<Model> {
    match file.kind.as_str() {
        "groupoid" => {
            let spec = file
                .groupoid
                .as_ref()
                .ok_or_else(|| anyhow!("groupoid model needs a groupoid block"))?;
            let g = build_groupoid(spec)?;
            let cocycle = match &file.cocycle {
                None => Cocycle::trivial(&g),
                Some(c) => {
                    let mut values = std::collections::HashMap::new();
                    for (a, b, v) in &c.values {
                        values.insert((*a, *b), parse_scalar(v)?);
                    }
                    Cocycle::new(&g, |a, b| {
                        values
                            .get(&(a, b))
                            .cloned()
                            .unwrap_or_else(Scalar::one)
                    })
                    .map_err(|e| anyhow!("{e}"))?
                }
            };
            let carrier = Carrier::new(g, cocycle).map_err(|e| anyhow!("{e}"))?;
            Ok(Model::Groupoid { carrier })
        }
        "semigroup" => {
            let mult = file
                .mult
                .clone()
                .ok_or_else(|| anyhow!("semigroup model needs a mult table"))?;
            let star = match &file.star {
                Some(star) => star.clone(),
                None => derive_star(&mult)?,
            };
            let semigroup = ISemigroup::validate(mult, star).map_err(|e| anyhow!("{e}"))?;
            Ok(Model::Semigroup { semigroup })
        }
        "graph" => {
            let vertices = file
                .vertices
                .ok_or_else(|| anyhow!("graph model needs a vertex count"))?;
            let edges = file.edges.clone().unwrap_or_default();
            let mut graph = Graph::new(vertices, edges).map_err(|e| anyhow!("{e}"))?;
            if let Some(conv) = &file.convention {
                graph = graph.with_convention(match conv.as_str() {
                    "standard" => RegularConvention::Standard,
                    "at-least-two" => RegularConvention::AtLeastTwo,
                    other => bail!("unknown regularity convention {other}"),
                });
            }
            Ok(Model::Graph {
                graph: Arc::new(graph),
            })
        }
        "partial-action" => {
            let group = parse_group(
                file.group
                    .as_deref()
                    .ok_or_else(|| anyhow!("partial-action model needs a group"))?,
            )?;
            let points = file
                .points
                .ok_or_else(|| anyhow!("partial-action model needs a point count"))?;
            let theta_spec = file
                .theta
                .as_ref()
                .ok_or_else(|| anyhow!("partial-action model needs theta maps"))?;
            if theta_spec.len() != group.order() {
                bail!("theta must list one map per group element");
            }
            let theta: Vec<PartialBijection> = theta_spec
                .iter()
                .map(|pairs| PartialBijection::from_pairs(points, pairs).map_err(|e| anyhow!("{e}")))
                .collect::<Result<_>>()?;
            let action =
                PartialAction::validate(group.clone(), points, theta).map_err(|e| anyhow!("{e}"))?;
            let twist = match &file.twist {
                None => PartialTwist::trivial(&action),
                Some(entries) => {
                    let n = group.order();
                    let mut u: Vec<Vec<Scalar>> =
                        PartialTwist::trivial(&action).raw().to_vec();
                    for entry in entries {
                        if entry.s >= n || entry.t >= n {
                            bail!("twist entry indexes outside the group");
                        }
                        for (x, v) in &entry.values {
                            if *x >= points {
                                bail!("twist entry point {} out of range", x);
                            }
                            u[entry.s * n + entry.t][*x] = parse_scalar(v)?;
                        }
                    }
                    PartialTwist::validate(&action, u).map_err(|e| anyhow!("{e}"))?
                }
            };
            Ok(Model::PartialAction { action, twist })
        }
        "action" => {
            let points = file
                .points
                .ok_or_else(|| anyhow!("action model needs a point count"))?;
            let gens_spec = file
                .generators
                .as_ref()
                .ok_or_else(|| anyhow!("action model needs generators"))?;
            let gens: Vec<PartialBijection> = gens_spec
                .iter()
                .map(|pairs| PartialBijection::from_pairs(points, pairs).map_err(|e| anyhow!("{e}")))
                .collect::<Result<_>>()?;
            let action = lpalg_core::semigroup::generate_from_partial_bijections(&gens, 5000)
                .map_err(|e| anyhow!("{e}"))?;
            Ok(Model::Action { action })
        }
        other => bail!("unknown model kind {other}"),
    }
}

fn build_groupoid(spec: &GroupoidSpec) -> Result<FiniteGroupoid> {
    if let Some(n) = spec.pair {
        return Ok(FiniteGroupoid::pair(n));
    }
    if let Some(name) = &spec.group {
        return Ok(FiniteGroupoid::from_group(&parse_group(name)?));
    }
    let arrows = spec
        .arrows
        .ok_or_else(|| anyhow!("explicit groupoid needs arrows/range/domain/inverse/compose"))?;
    let g = FiniteGroupoid::validate(
        arrows,
        spec.range.clone().ok_or_else(|| anyhow!("missing range"))?,
        spec.domain.clone().ok_or_else(|| anyhow!("missing domain"))?,
        spec.inverse.clone().ok_or_else(|| anyhow!("missing inverse"))?,
        spec.compose.clone().unwrap_or_default(),
    )
    .map_err(|e| anyhow!("{e}"))?;
    Ok(g)
}

fn derive_star(mult: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = mult.len();
    let m = |a: usize, b: usize| mult[a][b];
    (0..n)
        .map(|t| {
            let candidates: Vec<usize> = (0..n)
                .filter(|&s| m(m(t, s), t) == t && m(m(s, t), s) == s)
                .collect();
            match candidates.as_slice() {
                [s] => Ok(*s),
                _ => bail!(
                    "element {} has {} generalized inverses; star table required",
                    t,
                    candidates.len()
                ),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpalg_core::scalar::rat;

    #[test]
    fn rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn scalar_forms() {
        assert_eq!(parse_scalar("1").unwrap(), Scalar::one());
        assert_eq!(parse_scalar("-1").unwrap(), Scalar::from_int(-1));
        assert_eq!(parse_scalar("i").unwrap(), Scalar::i());
        assert_eq!(
            parse_scalar("3/5+4/5i").unwrap(),
            Scalar::exact(rat(3, 5), rat(4, 5))
        );
        assert_eq!(
            parse_scalar("3/5-4/5i").unwrap(),
            Scalar::exact(rat(3, 5), rat(-4, 5))
        );
        assert_eq!(
            parse_scalar("-7/25+24/25i").unwrap(),
            Scalar::exact(rat(-7, 25), rat(24, 25))
        );
    }

    #[test]
    fn exponent_forms() {
        assert!(parse_exponent("inf").unwrap().is_infinite());
        assert_eq!(parse_exponent("3/2").unwrap().to_string(), "3/2");
        assert!(parse_exponent("1/2").is_err());
        assert_eq!(parse_p_list("1,2,inf").unwrap().len(), 3);
    }

    #[test]
    fn star_derivation() {
        // Z/2 table: star is forced
        let star = derive_star(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(star, vec![0, 1]);
        // left-zero band: non-unique inverses
        assert!(derive_star(&[vec![0, 0], vec![1, 1]]).is_err());
    }
}
