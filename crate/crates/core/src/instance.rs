//! JSON instance files: a group, a multiset and an optional step law.
//!
//! ```json
//! {"group": {"factors": [12]}, "a": [1, 1, {"x": 5, "mult": 3}],
//!  "law": {"kind": "lazy", "alpha": "1/2"}, "m": 2}
//! ```
//!
//! `"group": "Z"` selects the integers. Elements of a product group are
//! coordinate lists such as `[1, 4]`.

use std::path::Path;

use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::concentration::{
    rho_classical, rho_m, rho_star_m, rho_xi, walk_distribution, Extremum, StepLaw, WeightMultiset,
};
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GroupElement};
use crate::pipeline::rational_string;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Finite { factors: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Int(i64),
    Coords(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Weighted { x: ElementSpec, mult: u64 },
    Plain(ElementSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub group: GroupSpec,
    pub a: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<StepLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<AbelianGroup> {
        match self {
            GroupSpec::Named(s) if matches!(s.as_str(), "Z" | "integers") => Ok(AbelianGroup::integers()),
            GroupSpec::Named(s) => Err(Error::Parse(format!("unknown group {s:?}; use \"Z\" or {{\"factors\": [..]}}"))),
            GroupSpec::Finite { factors } => AbelianGroup::finite(factors.clone()),
        }
    }

    pub fn of(group: &AbelianGroup) -> Self {
        if group.is_torsion_free() {
            GroupSpec::Named("Z".into())
        } else {
            GroupSpec::Finite { factors: group.factors().to_vec() }
        }
    }
}

impl ElementSpec {
    fn build(&self, g: &AbelianGroup) -> Result<GroupElement> {
        match self {
            ElementSpec::Int(x) if g.dim() <= 1 => g.scalar(*x),
            ElementSpec::Int(_) => Err(Error::Parse(format!("elements of {g} are coordinate lists"))),
            ElementSpec::Coords(c) => g.element(c),
        }
    }

    fn of(g: &AbelianGroup, x: &GroupElement) -> Self {
        if g.dim() <= 1 {
            ElementSpec::Int(x.scalar())
        } else {
            ElementSpec::Coords(x.coords().to_vec())
        }
    }
}

impl Instance {
    pub fn from_multiset(a: &WeightMultiset) -> Self {
        let g = a.group();
        let a = a
            .items()
            .iter()
            .map(|(x, m)| match m {
                1 => Entry::Plain(ElementSpec::of(g, x)),
                _ => Entry::Weighted { x: ElementSpec::of(g, x), mult: *m },
            })
            .collect();
        Instance { group: GroupSpec::of(g), a, law: None, m: None }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn multiset(&self) -> Result<WeightMultiset> {
        let g = self.group.build()?;
        let mut items = Vec::with_capacity(self.a.len());
        for e in &self.a {
            items.push(match e {
                Entry::Plain(x) => (x.build(&g)?, 1),
                Entry::Weighted { x, mult } => (x.build(&g)?, *mult),
            });
        }
        WeightMultiset::new(g, items)
    }

    /// Laziness `alpha` of a lazy law, if one is given.
    pub fn alpha(&self) -> Option<Ratio<u64>> {
        match self.law {
            Some(StepLaw::Lazy { alpha }) => Some(alpha),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueAt {
    pub value: String,
    pub approx: f64,
    pub witness: GroupElement,
}

impl ValueAt {
    fn new(e: Extremum) -> Self {
        ValueAt { approx: to_f64(&e.value), value: rational_string(&e.value), witness: e.witness }
    }
}

fn to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Every functional that applies to an instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RhoReport {
    pub group: String,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<StepLaw>,
    /// Largest point probability of the signed walk.
    pub rho: ValueAt,
    /// Largest point probability under the given law.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law_max_point: Option<ValueAt>,
    /// Sup-discrepancy from uniform under the given law (finite groups).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law_discrepancy: Option<ValueAt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_xi: Option<ValueAt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_m: Option<ValueAt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_star_m: Option<ValueAt>,
    /// Needs `n >= 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_star: Option<ValueAt>,
    pub notes: Vec<String>,
}

pub fn rho_report(inst: &Instance) -> Result<RhoReport> {
    let a = inst.multiset()?;
    let g = a.group();
    let mut notes = Vec::new();
    let (mut law_max_point, mut law_discrepancy) = (None, None);
    if let Some(law) = inst.law {
        if law == StepLaw::UniformOnA {
            notes.push("the uniform-on-A law is reported through rho_m".into());
        } else {
            let dist = walk_distribution(&a, law)?;
            law_max_point = Some(ValueAt::new(dist.max_point()));
            if g.is_finite() {
                law_discrepancy = Some(ValueAt::new(dist.sup_discrepancy()?));
            }
        }
    }
    let rho_xi_v = match inst.alpha() {
        Some(alpha) if g.is_finite() => Some(ValueAt::new(rho_xi(&a, alpha)?)),
        _ => None,
    };
    let (mut rho_m_v, mut rho_star_m_v) = (None, None);
    if let Some(m) = inst.m {
        if a.is_symmetric() {
            rho_m_v = Some(ValueAt::new(rho_m(&a, m)?));
        } else {
            notes.push("rho_m needs a symmetric multiset".into());
        }
        if m <= a.n() {
            rho_star_m_v = Some(ValueAt::new(rho_star_m(&a, m)?));
        } else {
            notes.push(format!("rho*_m needs m <= n = {}", a.n()));
        }
    }
    Ok(RhoReport {
        group: g.to_string(),
        n: a.n(),
        law: inst.law,
        rho: ValueAt::new(rho_classical(&a)?),
        law_max_point,
        law_discrepancy,
        rho_xi: rho_xi_v,
        rho_m: rho_m_v,
        rho_star_m: rho_star_m_v,
        rho_star: if a.n() >= 2 { Some(ValueAt::new(rho_star_m(&a, a.n() / 2)?)) } else { None },
        notes,
    })
}
